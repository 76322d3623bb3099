//! Scenario files: a flat, versioned TOML document naming an instance, an
//! experiment and its parameters. Running one produces check rows, a data
//! CSV and a summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::gamma::{
    adversary_panel, bernoulli_check, eq9_bound, geometric_gof, myopic_sender, proposition1_bound,
    proposition2_bound, random_duration_payoff, run_gamma, tau_y, theta_star_from_policy,
    write_gamma_csv, GammaConfig, GammaRow, SenderStrategy,
};
use crate::instances::{self, PanelInstance};
use crate::markov::{invariant_distribution, Belief, StochasticMatrix};
use crate::mcgame::{self, GameSolveOptions, MatrixGameFamily};
use crate::persuasion::{PersuasionInstance, SplitPolicy};
use crate::trajectories::{
    self, corollary1_check, lipschitz_violation, rate_check, report_from_solutions,
    shift_bound_violation, shrunk_dirac_family, trajectory_rows, weighted_trajectory_from,
    SolveSettings, TRAJECTORY_HEADER,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_EPS_STOP: f64 = 1e-6;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_DELTAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];
pub const DEFAULT_SORIN_PAIRS: [(f64, f64); 3] = [(0.3, 0.7), (0.5, 1.0), (0.1, 0.4)];
pub const DEFAULT_SEQUENCES: usize = 100;
/// Invariant mass of the appendix chain's first state.
const APPENDIX_PI: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Solve,
    Trajectory,
    Gamma,
    McGame,
    Sorin,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "solve" => Experiment::Solve,
            "trajectory" => Experiment::Trajectory,
            "gamma" => Experiment::Gamma,
            "mcgame" => Experiment::McGame,
            "sorin" => Experiment::Sorin,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Trajectory => "trajectory",
            Experiment::Gamma => "gamma",
            Experiment::McGame => "mcgame",
            Experiment::Sorin => "sorin",
        }
    }

    fn allowed(&self) -> &'static [Check] {
        use Check::*;
        match self {
            Experiment::Solve => &[ClosedForm, Converged],
            Experiment::Trajectory => &[ClosedForm, Monotone, Corollary1, Theorem2, Rate, Lemmas],
            Experiment::Gamma => &[Claim1, Prop1, Prop2, Gaps],
            Experiment::McGame => &[Monotone, CavU],
            Experiment::Sorin => &[Identity],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    ClosedForm,
    Converged,
    Monotone,
    Corollary1,
    Theorem2,
    Rate,
    Lemmas,
    Claim1,
    Prop1,
    Prop2,
    Gaps,
    CavU,
    Identity,
}

impl Check {
    pub fn parse(s: &str) -> Option<Self> {
        use Check::*;
        Some(match s {
            "closed_form" => ClosedForm,
            "converged" => Converged,
            "monotone" => Monotone,
            "corollary1" => Corollary1,
            "weighted" => Theorem2,
            "rate" => Rate,
            "lemmas" => Lemmas,
            "claim1" => Claim1,
            "prop1" => Prop1,
            "prop2" => Prop2,
            "gaps" => Gaps,
            "cav_u" => CavU,
            "identity" => Identity,
            _ => return None,
        })
    }
}

/// What a scenario runs on.
#[derive(Debug, Clone)]
pub enum Subject {
    Builtin {
        id: String,
        instance: PersuasionInstance,
        matrix: StochasticMatrix,
    },
    Inline {
        instance: PersuasionInstance,
        matrix: StochasticMatrix,
    },
    Panel {
        seed: u64,
        instances: Vec<PanelInstance>,
    },
    Game {
        games: MatrixGameFamily,
        matrix: StochasticMatrix,
    },
    Sequences,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub experiment: Experiment,
    pub subject: Subject,
    pub checks: Vec<Check>,
    pub deltas: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Option<f64>,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    /// `None` picks the default for the state count.
    pub grid: Option<usize>,
    pub eps_stop: f64,
    pub strategy_res: usize,
    pub delta_star: Option<f64>,
    pub prior: Option<Belief>,
    pub pairs: Vec<(f64, f64)>,
    pub sequences: usize,
}

impl ScenarioConfig {
    pub fn settings(&self) -> SolveSettings {
        SolveSettings {
            resolution: self.grid,
            eps_stop: self.eps_stop,
            ..SolveSettings::default()
        }
    }

    fn game_options(&self) -> GameSolveOptions {
        GameSolveOptions {
            grid_res: self.grid,
            strategy_res: self.strategy_res,
            eps_stop: self.eps_stop,
            ..Default::default()
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Spanned<u32>,
    name: Spanned<String>,
    experiment: Spanned<String>,
    instance: Option<Spanned<String>>,
    matrix: Option<Spanned<Vec<Vec<f64>>>>,
    sender: Option<Spanned<Vec<Vec<f64>>>>,
    receiver: Option<Spanned<Vec<Vec<f64>>>>,
    games: Option<Spanned<Vec<Vec<Vec<f64>>>>>,
    panel: Option<Spanned<usize>>,
    panel_seed: Option<u64>,
    prior: Option<Spanned<Vec<f64>>>,
    checks: Option<Spanned<Vec<String>>>,
    deltas: Option<Spanned<Vec<f64>>>,
    x: Option<Spanned<OneOrMany>>,
    y: Option<Spanned<f64>>,
    horizon: Option<Spanned<usize>>,
    trials: Option<Spanned<usize>>,
    seed: Option<u64>,
    grid: Option<Spanned<usize>>,
    eps_stop: Option<Spanned<f64>>,
    strategy_res: Option<Spanned<usize>>,
    delta_star: Option<Spanned<f64>>,
    pairs: Option<Spanned<Vec<(f64, f64)>>>,
    sequences: Option<Spanned<usize>>,
}

struct Problems<'a> {
    text: &'a str,
    list: Vec<String>,
}

impl Problems<'_> {
    fn line<T>(&self, s: &Spanned<T>) -> usize {
        let end = s.span().start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn push<T>(&mut self, at: &Spanned<T>, field: &str, msg: impl std::fmt::Display) {
        let line = self.line(at);
        self.list.push(format!("line {line}: `{field}`: {msg}"));
    }
}

fn check_matrix(p: &mut Problems, raw: &Spanned<Vec<Vec<f64>>>) -> Option<StochasticMatrix> {
    match StochasticMatrix::new(raw.get_ref().clone()) {
        Ok(m) => Some(m),
        Err(e) => {
            p.push(raw, "matrix", e);
            None
        }
    }
}

/// Parses and validates a scenario document. All violations are reported
/// together, each with the line of the offending key.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut p = Problems {
        text,
        list: Vec::new(),
    };
    if *raw.schema_version.get_ref() != SCHEMA_VERSION {
        p.push(
            &raw.schema_version,
            "schema_version",
            format!(
                "expected {SCHEMA_VERSION}, found {}",
                raw.schema_version.get_ref()
            ),
        );
    }
    let name = raw.name.get_ref().clone();
    if name.is_empty() || name.contains(['/', '\\']) {
        p.push(&raw.name, "name", "must be a non-empty file stem");
    }
    let experiment = Experiment::parse(raw.experiment.get_ref());
    if experiment.is_none() {
        p.push(
            &raw.experiment,
            "experiment",
            format!(
                "unknown experiment `{}` (known: solve, trajectory, gamma, mcgame, sorin)",
                raw.experiment.get_ref()
            ),
        );
    }

    let matrix = raw.matrix.as_ref().and_then(|m| check_matrix(&mut p, m));
    let subject = match experiment {
        Some(Experiment::Sorin) => Some(Subject::Sequences),
        Some(Experiment::McGame) => match (&raw.games, matrix.clone()) {
            (Some(g), Some(matrix)) => match MatrixGameFamily::new(g.get_ref().clone()) {
                Ok(games) if games.k() == matrix.k() => Some(Subject::Game { games, matrix }),
                Ok(games) => {
                    p.push(
                        g,
                        "games",
                        format!("{} games for a {}-state matrix", games.k(), matrix.k()),
                    );
                    None
                }
                Err(e) => {
                    p.push(g, "games", e);
                    None
                }
            },
            (None, _) => {
                p.push(
                    &raw.experiment,
                    "games",
                    "mcgame needs an inline `games` array",
                );
                None
            }
            (Some(_), None) => {
                if raw.matrix.is_none() {
                    p.push(&raw.experiment, "matrix", "mcgame needs a `matrix`");
                }
                None
            }
        },
        Some(_) => {
            if let Some(n) = &raw.panel {
                if *n.get_ref() == 0 {
                    p.push(n, "panel", "panel size must be positive");
                    None
                } else {
                    let seed = raw.panel_seed.unwrap_or(DEFAULT_SEED);
                    match instances::ergodic_panel(*n.get_ref(), seed) {
                        Ok(instances) => Some(Subject::Panel { seed, instances }),
                        Err(e) => {
                            p.push(n, "panel", e);
                            None
                        }
                    }
                }
            } else if let Some(id) = &raw.instance {
                match instances::builtin(id.get_ref()) {
                    Ok((instance, matrix)) => Some(Subject::Builtin {
                        id: id.get_ref().clone(),
                        instance,
                        matrix,
                    }),
                    Err(e) => {
                        p.push(id, "instance", e);
                        None
                    }
                }
            } else {
                match (&raw.sender, &raw.receiver, matrix.clone()) {
                    (Some(s), Some(r), Some(matrix)) => {
                        let names = (0..s.get_ref().first().map_or(0, |r| r.len()))
                            .map(|b| format!("b{b}"))
                            .collect();
                        match PersuasionInstance::from_tables(
                            names,
                            s.get_ref().clone(),
                            r.get_ref().clone(),
                        ) {
                            Ok(instance) if instance.k() == matrix.k() => {
                                Some(Subject::Inline { instance, matrix })
                            }
                            Ok(_) => {
                                p.push(s, "sender", "state count differs from `matrix`");
                                None
                            }
                            Err(e) => {
                                p.push(s, "sender", e);
                                None
                            }
                        }
                    }
                    _ => {
                        if raw.matrix.is_none() || matrix.is_some() {
                            p.push(
                                &raw.experiment,
                                "instance",
                                "give `instance`, `panel`, or inline `matrix`, `sender` and `receiver`",
                            );
                        }
                        None
                    }
                }
            }
        }
        None => None,
    };

    let checks = match (&raw.checks, experiment) {
        (Some(c), Some(exp)) => {
            let mut out = Vec::new();
            for s in c.get_ref() {
                match Check::parse(s) {
                    Some(ch) if exp.allowed().contains(&ch) => out.push(ch),
                    Some(_) => p.push(
                        c,
                        "checks",
                        format!("`{s}` does not apply to {}", exp.name()),
                    ),
                    None => p.push(c, "checks", format!("unknown check `{s}`")),
                }
            }
            out
        }
        (None, Some(exp)) => default_checks(exp, subject.as_ref()),
        _ => Vec::new(),
    };

    let deltas = match &raw.deltas {
        Some(d) => {
            let v = d.get_ref().clone();
            if v.is_empty() {
                p.push(d, "deltas", "empty list");
            }
            if let Some(bad) = v.iter().find(|x| !(0.0..1.0).contains(*x)) {
                p.push(d, "deltas", format!("{bad} is outside [0, 1)"));
            } else if v.windows(2).any(|w| w[1] <= w[0]) {
                p.push(d, "deltas", "must be strictly increasing");
            }
            v
        }
        None => DEFAULT_DELTAS.to_vec(),
    };
    let x = match &raw.x {
        Some(s) => {
            let v = match s.get_ref() {
                OneOrMany::One(x) => vec![*x],
                OneOrMany::Many(v) => v.clone(),
            };
            if v.is_empty() {
                p.push(s, "x", "empty list");
            }
            if let Some(bad) = v.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                p.push(s, "x", format!("{bad} is outside (0, 1)"));
            }
            v
        }
        None => vec![0.5],
    };
    let y = raw.y.as_ref().map(|s| {
        let y = *s.get_ref();
        if !(y > 0.0 && y <= 1.0) {
            p.push(s, "y", format!("{y} is outside (0, 1]"));
        } else if x.iter().any(|&x| y <= x) {
            p.push(s, "y", format!("{y} must exceed every x"));
        }
        y
    });
    if checks.contains(&Check::Prop2) && y.is_none() {
        p.push(&raw.experiment, "y", "check `prop2` needs `y`");
    }
    let positive =
        |p: &mut Problems, v: &Option<Spanned<usize>>, field: &str, default: usize| match v {
            Some(s) if *s.get_ref() == 0 => {
                p.push(s, field, "must be positive");
                default
            }
            Some(s) => *s.get_ref(),
            None => default,
        };
    let horizon = positive(&mut p, &raw.horizon, "horizon", DEFAULT_HORIZON);
    let trials = positive(&mut p, &raw.trials, "trials", DEFAULT_TRIALS);
    let sequences = positive(&mut p, &raw.sequences, "sequences", DEFAULT_SEQUENCES);
    let strategy_res = positive(
        &mut p,
        &raw.strategy_res,
        "strategy_res",
        mcgame::DEFAULT_STRATEGY_RES,
    );
    let grid = match &raw.grid {
        Some(s) if *s.get_ref() == 0 => {
            p.push(s, "grid", "must be positive");
            None
        }
        Some(s) => Some(*s.get_ref()),
        None => None,
    };
    let eps_stop = match &raw.eps_stop {
        Some(s) if !(*s.get_ref() > 0.0) => {
            p.push(s, "eps_stop", "must be positive");
            DEFAULT_EPS_STOP
        }
        Some(s) => *s.get_ref(),
        None => DEFAULT_EPS_STOP,
    };
    let delta_star = raw.delta_star.as_ref().map(|s| {
        if !(0.0..1.0).contains(s.get_ref()) {
            p.push(s, "delta_star", "must lie in [0, 1)");
        }
        *s.get_ref()
    });
    let prior = raw
        .prior
        .as_ref()
        .and_then(|s| match Belief::new(s.get_ref().clone()) {
            Ok(b) => Some(b),
            Err(e) => {
                p.push(s, "prior", e);
                None
            }
        });
    let pairs = match &raw.pairs {
        Some(s) => {
            for &(mu, lambda) in s.get_ref() {
                if !(mu > 0.0 && mu < lambda && lambda <= 1.0) {
                    p.push(
                        s,
                        "pairs",
                        format!("({mu}, {lambda}) needs 0 < mu < lambda <= 1"),
                    );
                }
            }
            s.get_ref().clone()
        }
        None => DEFAULT_SORIN_PAIRS.to_vec(),
    };

    if !p.list.is_empty() {
        return Err(Error::Config(p.list.join("\n")));
    }
    Ok(ScenarioConfig {
        name,
        experiment: experiment.expect("checked"),
        subject: subject.expect("checked"),
        checks,
        deltas,
        x,
        y,
        horizon,
        trials,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        grid,
        eps_stop,
        strategy_res,
        delta_star,
        prior,
        pairs,
        sequences,
    })
}

fn default_checks(exp: Experiment, subject: Option<&Subject>) -> Vec<Check> {
    let builtin = matches!(subject, Some(Subject::Builtin { .. }));
    match exp {
        Experiment::Solve if builtin => vec![Check::ClosedForm, Check::Converged],
        Experiment::Solve => vec![Check::Converged],
        Experiment::Trajectory if builtin => {
            vec![Check::Monotone, Check::Corollary1, Check::ClosedForm]
        }
        Experiment::Trajectory => vec![Check::Monotone, Check::Corollary1],
        Experiment::Gamma => vec![Check::Claim1],
        Experiment::McGame => vec![Check::Monotone, Check::CavU],
        Experiment::Sorin => vec![Check::Identity],
    }
}

/// One judged quantity. `pass` compares `measured` with `bound` after
/// allowing `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl CheckRow {
    fn at_most(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        CheckRow {
            name: name.into(),
            measured,
            bound,
            tolerance,
            pass: measured <= bound + tolerance,
            note: String::new(),
        }
    }

    fn at_least(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        CheckRow {
            pass: measured >= bound - tolerance,
            ..Self::at_most(name, measured, bound, tolerance)
        }
    }

    fn flag(name: impl Into<String>, ok: bool, note: impl Into<String>) -> Self {
        CheckRow {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            tolerance: 0.0,
            pass: ok,
            note: note.into(),
        }
    }

    fn rejected(name: impl Into<String>, e: &Error) -> Self {
        CheckRow {
            name: name.into(),
            measured: f64::NAN,
            bound: f64::NAN,
            tolerance: 0.0,
            pass: false,
            note: format!("rejected: {e}"),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub grid: String,
    pub eps_stop: f64,
    pub trials: usize,
    pub strategy_res: usize,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub experiment: Experiment,
    pub rows: Vec<CheckRow>,
    pub provenance: Provenance,
    /// Header plus data lines of the scenario CSV.
    pub csv: String,
}

impl RunReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn summary(&self) -> String {
        let p = &self.provenance;
        let mut s = format!(
            "scenario {} ({}): {}\n  seed={} grid={} eps_stop={:e} trials={} strategy_res={} version={}\n",
            self.scenario,
            self.experiment.name(),
            if self.pass() { "PASS" } else { "FAIL" },
            p.seed,
            p.grid,
            p.eps_stop,
            p.trials,
            p.strategy_res,
            p.version
        );
        for r in &self.rows {
            let _ = write!(
                s,
                "  [{}] {} measured={:.6e} bound={:.6e} tolerance={:.3e}",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.measured,
                r.bound,
                r.tolerance
            );
            if !r.note.is_empty() {
                let _ = write!(s, " ({})", r.note);
            }
            s.push('\n');
        }
        s
    }

    pub fn checks_csv(&self) -> String {
        let mut s = String::from("name,measured,bound,tolerance,pass,note\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.name,
                r.measured,
                r.bound,
                r.tolerance,
                r.pass,
                r.note.replace(',', ";")
            );
        }
        s
    }
}

/// Runs the scenario and, when `out` is given, writes `<out>/<name>.csv`
/// and `<out>/<name>.checks.csv`.
pub fn run_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<RunReport> {
    let wrap = |e: Error| Error::Config(format!("scenario `{}`: {e}", cfg.name));
    let (rows, csv) = match cfg.experiment {
        Experiment::Solve => run_solve(cfg),
        Experiment::Trajectory => run_trajectory(cfg),
        Experiment::Gamma => run_gamma_scenario(cfg),
        Experiment::McGame => run_mcgame(cfg),
        Experiment::Sorin => run_sorin(cfg),
    }
    .map_err(wrap)?;
    let report = RunReport {
        scenario: cfg.name.clone(),
        experiment: cfg.experiment,
        rows,
        provenance: Provenance {
            seed: cfg.seed,
            grid: cfg.grid.map_or("default".into(), |g| g.to_string()),
            eps_stop: cfg.eps_stop,
            trials: cfg.trials,
            strategy_res: cfg.strategy_res,
            version: env!("CARGO_PKG_VERSION"),
        },
        csv,
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{}.csv", cfg.name)), &report.csv)?;
        fs::write(
            dir.join(format!("{}.checks.csv", cfg.name)),
            report.checks_csv(),
        )?;
    }
    Ok(report)
}

/// Writes the summaries of several runs to `<out>/summary.txt`.
pub fn write_summary(out: &Path, reports: &[RunReport]) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.summary());
    }
    let failed = reports.iter().filter(|r| !r.pass()).count();
    let _ = writeln!(
        s,
        "overall: {} ({} of {} scenarios failed)",
        if failed == 0 { "PASS" } else { "FAIL" },
        failed,
        reports.len()
    );
    fs::write(out.join("summary.txt"), s)?;
    Ok(())
}

type Run = Result<(Vec<CheckRow>, String)>;

fn persuasion_subject(
    cfg: &ScenarioConfig,
) -> Result<(Option<&str>, &PersuasionInstance, &StochasticMatrix)> {
    match &cfg.subject {
        Subject::Builtin {
            id,
            instance,
            matrix,
        } => Ok((Some(id.as_str()), instance, matrix)),
        Subject::Inline { instance, matrix } => Ok((None, instance, matrix)),
        _ => Err(Error::Unsupported(format!(
            "{} needs a single persuasion instance",
            cfg.experiment.name()
        ))),
    }
}

fn run_solve(cfg: &ScenarioConfig) -> Run {
    let (id, inst, m) = persuasion_subject(cfg)?;
    let settings = cfg.settings();
    let sols = trajectories::solve_all(inst, m, &cfg.deltas, &settings)?;
    let mut rows = Vec::new();
    let k = inst.k();
    let mut csv = String::from("delta");
    for l in 1..=k {
        let _ = write!(csv, ",xi_{l}");
    }
    csv.push_str(",value\n");
    for (d, s) in cfg.deltas.iter().zip(&sols) {
        let g = s.value.grid();
        for i in 0..g.len() {
            let _ = write!(csv, "{d}");
            for x in g.point(i) {
                let _ = write!(csv, ",{x}");
            }
            let _ = writeln!(csv, ",{}", s.value.values()[i]);
        }
        if cfg.checks.contains(&Check::Converged) {
            rows.push(CheckRow::at_most(
                format!("converged_d{d}"),
                s.error_bound,
                cfg.eps_stop,
                0.0,
            ));
        }
    }
    if cfg.checks.contains(&Check::ClosedForm) {
        match id {
            Some("appendixA") => {
                for (d, s) in cfg.deltas.iter().zip(&sols) {
                    let g = s.value.grid();
                    let err = (0..g.len())
                        .map(|i| {
                            (s.value.values()[i]
                                - instances::appendix_a_closed_form(*d, g.point(i)[0]))
                            .abs()
                        })
                        .fold(0.0, f64::max);
                    rows.push(CheckRow::at_most(
                        format!("closed_form_d{d}"),
                        err,
                        0.0,
                        2e-3,
                    ));
                }
            }
            _ => rows.push(CheckRow::flag(
                "closed_form",
                false,
                "no closed form for this instance",
            )),
        }
    }
    Ok((rows, csv))
}

fn trajectory_csv_lines(
    csv: &mut String,
    label: &str,
    rows: &[trajectories::TrajectoryRow],
    tol: f64,
) {
    for r in rows {
        let _ = writeln!(csv, "{label},{},{tol}", r.csv_fields());
    }
}

fn closed_form_rows(id: Option<&str>, report: &trajectories::TrajectoryReport) -> Vec<CheckRow> {
    match id {
        Some("appendixA") => {
            let target = 2.05 * APPENDIX_PI;
            let phi_err = report
                .phi
                .iter()
                .map(|f| (f - target).abs())
                .fold(0.0, f64::max);
            let mut rows = vec![CheckRow::at_most("phi_constant", phi_err, 0.0, 2e-3)
                .with_note(format!("target {target}"))];
            if let Some(i) = report.deltas.iter().position(|&d| d == 0.0) {
                let psi0 = 0.25 * instances::appendix_a_u(1.0);
                rows.push(
                    CheckRow::at_most("psi_at_zero", (report.psi[i] - psi0).abs(), 0.0, 1e-3)
                        .with_note(format!("target {psi0}")),
                );
            }
            let inc = report.min_psi_increment();
            rows.push(CheckRow {
                pass: inc > report.tolerance,
                ..CheckRow::at_least("psi_strictly_increasing", inc, report.tolerance, 0.0)
            });
            rows
        }
        Some("periodic") => {
            let phi_err = report
                .phi
                .iter()
                .map(|f| (f - 0.25).abs())
                .fold(0.0, f64::max);
            let psi_err = report.psi.iter().map(|f| f.abs()).fold(0.0, f64::max);
            vec![
                CheckRow::at_most("phi_constant", phi_err, 0.0, 1e-3).with_note("target 0.25"),
                CheckRow::at_most("psi_zero", psi_err, 0.0, 1e-9),
            ]
        }
        _ => vec![CheckRow::flag(
            "closed_form",
            false,
            "no closed form for this instance",
        )],
    }
}

/// Deltas for the rate check.
pub const RATE_DELTAS: [f64; 4] = [0.9, 0.95, 0.975, 0.99];

fn trajectory_checks(
    cfg: &ScenarioConfig,
    label: &str,
    id: Option<&str>,
    inst: &PersuasionInstance,
    m: &StochasticMatrix,
    csv: &mut String,
) -> Result<Vec<CheckRow>> {
    let settings = cfg.settings();
    let mut rows = Vec::new();
    let prefix = |n: &str| {
        if label.is_empty() {
            n.to_string()
        } else {
            format!("{label}/{n}")
        }
    };
    let class = m.classification();
    if !class.irreducible {
        rows.push(CheckRow::rejected(
            prefix("trajectory"),
            &Error::NotIrreducible,
        ));
        return Ok(rows);
    }
    let pi = invariant_distribution(m);
    let sols = trajectories::solve_all(inst, m, &cfg.deltas, &settings)?;
    let report = report_from_solutions(&cfg.deltas, &sols, &pi, settings.eps_stop)?;
    let rate = if cfg.checks.contains(&Check::Rate) {
        Some(rate_check(inst, m, &RATE_DELTAS, cfg.delta_star, &settings))
    } else {
        None
    };
    let rate_ok = rate.as_ref().and_then(|r| r.as_ref().ok());
    trajectory_csv_lines(
        csv,
        label,
        &trajectory_rows(&report, None),
        report.tolerance,
    );
    if let Some(r) = rate_ok {
        let extra = trajectories::TrajectoryReport::from_parts(
            r.rows.iter().map(|x| x.delta).collect(),
            vec![f64::NAN; r.rows.len()],
            vec![f64::NAN; r.rows.len()],
            report.tolerance,
        );
        trajectory_csv_lines(
            csv,
            label,
            &trajectory_rows(&extra, Some(r)),
            report.tolerance,
        );
    }
    for c in &cfg.checks {
        match c {
            Check::Monotone => {
                let worst_phi = report
                    .phi
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                let worst_psi = report
                    .psi
                    .windows(2)
                    .map(|w| w[0] - w[1])
                    .fold(f64::NEG_INFINITY, f64::max);
                rows.push(CheckRow::at_most(
                    prefix("phi_non_increasing"),
                    worst_phi.max(0.0),
                    0.0,
                    report.tolerance,
                ));
                rows.push(CheckRow::at_most(
                    prefix("psi_non_decreasing"),
                    worst_psi.max(0.0),
                    0.0,
                    report.tolerance,
                ));
            }
            Check::Corollary1 => {
                rows.push(CheckRow::flag(
                    prefix("touching_implies_constant"),
                    corollary1_check(&report),
                    "",
                ));
            }
            Check::ClosedForm => {
                for r in closed_form_rows(id, &report) {
                    rows.push(CheckRow {
                        name: prefix(&r.name),
                        ..r
                    });
                }
            }
            Check::Theorem2 => {
                let fam = shrunk_dirac_family(m);
                match weighted_trajectory_from(&cfg.deltas, &sols, m, &fam, settings.eps_stop) {
                    Ok(w) => {
                        let worst = w.values.windows(2).map(|x| x[0] - x[1]).fold(0.0, f64::max);
                        rows.push(CheckRow::at_most(
                            prefix("weighted_non_decreasing"),
                            worst,
                            0.0,
                            w.tolerance,
                        ));
                    }
                    Err(e) => rows.push(CheckRow::rejected(prefix("weighted_non_decreasing"), &e)),
                }
            }
            Check::Rate => match rate.as_ref().expect("computed") {
                Ok(r) => rows.push(
                    CheckRow::at_most(
                        prefix("rate_ratio"),
                        r.max_ratio(),
                        3.0 * r.median_ratio(),
                        0.0,
                    )
                    .with_note("max ratio against 3 x median"),
                ),
                Err(e) => rows.push(CheckRow::rejected(prefix("rate_ratio"), e)),
            },
            Check::Lemmas => {
                let mut worst: f64 = f64::NEG_INFINITY;
                let mut tol: f64 = 0.0;
                for (d, s) in cfg.deltas.iter().zip(&sols) {
                    if *d > 0.0 {
                        worst = worst.max(shift_bound_violation(&s.value, inst, m, *d, 1)?);
                        tol = tol.max(2.0 * trajectories::combined_error(s, settings.eps_stop));
                    }
                }
                rows.push(CheckRow::at_most(prefix("shift_bound"), worst, 0.0, tol));
                if class.ergodic() {
                    let d = trajectories::default_bracket_delta(&RATE_DELTAS).min(0.95);
                    let s = trajectories::solve(inst, m, d, &settings)?;
                    let tol = 2.0 * trajectories::combined_error(&s, settings.eps_stop);
                    match lipschitz_violation(&s.value, inst, m) {
                        Ok(v) => {
                            rows.push(CheckRow::at_most(prefix("lipschitz_near_pi"), v, 0.0, tol))
                        }
                        Err(e) => rows.push(CheckRow::rejected(prefix("lipschitz_near_pi"), &e)),
                    }
                } else {
                    rows.push(CheckRow::rejected(
                        prefix("lipschitz_near_pi"),
                        &Error::NotErgodic {
                            irreducible: class.irreducible,
                            period: class.period,
                        },
                    ));
                }
            }
            _ => {}
        }
    }
    Ok(rows)
}

fn run_trajectory(cfg: &ScenarioConfig) -> Run {
    let mut csv = format!("instance,{TRAJECTORY_HEADER},tolerance\n");
    let rows = match &cfg.subject {
        Subject::Panel { instances, .. } => {
            let mut rows = Vec::new();
            for p in instances {
                // k = 3 panel members run on a coarser grid unless one is given
                let mut c = cfg.clone();
                if c.grid.is_none() && p.instance.k() == 3 {
                    c.grid = Some(PANEL_K3_GRID);
                }
                rows.extend(trajectory_checks(
                    &c,
                    &p.name,
                    None,
                    &p.instance,
                    &p.matrix,
                    &mut csv,
                )?);
            }
            rows
        }
        _ => {
            let (id, inst, m) = persuasion_subject(cfg)?;
            trajectory_checks(cfg, id.unwrap_or("inline"), id, inst, m, &mut csv)?
                .into_iter()
                .map(|r| CheckRow {
                    name: r.name.splitn(2, '/').last().unwrap_or("").to_string(),
                    ..r
                })
                .collect()
        }
    };
    Ok((rows, csv))
}

/// Grid resolution for three-state panel members.
pub const PANEL_K3_GRID: usize = 30;

fn run_gamma_scenario(cfg: &ScenarioConfig) -> Run {
    let (_, inst, m) = persuasion_subject(cfg)?;
    let settings = cfg.settings();
    let grid = settings.grid(inst.k())?;
    let u_inf = inst.u_sup(&grid)?;
    let pi = match &cfg.prior {
        Some(p) => p.clone(),
        None => invariant_distribution(m),
    };
    let mut rows = Vec::new();
    let mut data = Vec::new();
    let n = cfg.horizon;
    let policy_at = |delta: f64| -> Result<(SplitPolicy, f64)> {
        let sol = trajectories::solve(inst, m, delta, &settings)?;
        let v = sol.value.eval(pi.as_slice())?;
        Ok((SplitPolicy::new(&sol.value, inst, m, delta)?, v))
    };
    for c in &cfg.checks {
        match c {
            Check::Claim1 => {
                for &x in &cfg.x {
                    let (policy, v) = policy_at(1.0 - x)?;
                    let est = random_duration_payoff(&policy, &pi, x, cfg.trials, cfg.seed)?;
                    let target = v / x;
                    let row = CheckRow::at_most(
                        format!("claim1_x{x}"),
                        (est.mean - target).abs(),
                        0.0,
                        3.0 * est.stderr,
                    )
                    .with_note(format!("mean {} target {target}", est.mean));
                    data.push(GammaRow {
                        label: "claim1".to_string(),
                        x,
                        y: None,
                        n: 0,
                        trials: cfg.trials,
                        mean: est.mean,
                        stderr: est.stderr,
                        bound: 0.0,
                        target_value: target,
                        pass: row.pass,
                        seed: cfg.seed,
                    });
                    rows.push(row);
                }
            }
            Check::Prop1 | Check::Gaps => {
                if *c == Check::Gaps && cfg.checks.contains(&Check::Prop1) {
                    continue;
                }
                for &x in &cfg.x {
                    let (policy, v) = policy_at(1.0 - x)?;
                    let theta = theta_star_from_policy(&policy, &pi, x)?;
                    let gcfg = GammaConfig {
                        x,
                        n,
                        trials: cfg.trials,
                        seed: cfg.seed,
                    };
                    let b = if cfg.checks.contains(&Check::Prop1) {
                        Some(proposition1_bound(x, n, u_inf))
                    } else {
                        None
                    };
                    let panel = adversary_panel();
                    let advs = if b.is_some() { &panel[..] } else { &panel[..1] };
                    for (ai, adv) in advs.iter().enumerate() {
                        let record = ai == 0 && cfg.checks.contains(&Check::Gaps);
                        let out = run_gamma(&theta, adv, &gcfg, record)?;
                        if let Some(b) = &b {
                            match b {
                                Ok(b) => {
                                    let row = CheckRow::at_least(
                                        format!("prop1_x{x}_{}", adv.name()),
                                        out.payoff.mean,
                                        v - b,
                                        3.0 * out.payoff.stderr,
                                    );
                                    data.push(GammaRow {
                                        label: format!("prop1_{}", adv.name()),
                                        x,
                                        y: None,
                                        n,
                                        trials: cfg.trials,
                                        mean: out.payoff.mean,
                                        stderr: out.payoff.stderr,
                                        bound: *b,
                                        target_value: v,
                                        pass: row.pass,
                                        seed: cfg.seed,
                                    });
                                    rows.push(row);
                                }
                                Err(e) if ai == 0 => {
                                    rows.push(CheckRow::rejected(format!("prop1_x{x}"), e))
                                }
                                Err(_) => {}
                            }
                        }
                        if record {
                            rows.extend(gap_rows(x, n, u_inf, &out));
                        }
                        if theta.truncated_mass >= 1e-9 && ai == 0 {
                            rows.push(CheckRow::at_most(
                                format!("restoration_truncation_x{x}"),
                                theta.truncated_mass,
                                0.0,
                                1e-9,
                            ));
                        }
                    }
                }
            }
            Check::Prop2 => {
                let y = cfg.y.expect("validated");
                let (_, v) = policy_at(1.0 - y)?;
                let b = proposition2_bound(y, n, u_inf)?;
                for &x in &cfg.x {
                    let tau = tau_y(x, y)?;
                    let (policy, _) = policy_at(1.0 - x)?;
                    let senders = [
                        theta_star_from_policy(&policy, &pi, x)?,
                        myopic_sender(inst, m, &pi, &settings)?,
                        SenderStrategy::no_reveal(&policy, &pi)?,
                    ];
                    let gcfg = GammaConfig {
                        x,
                        n,
                        trials: cfg.trials,
                        seed: cfg.seed,
                    };
                    for (si, s) in senders.iter().enumerate() {
                        let out = run_gamma(s, &tau, &gcfg, false)?;
                        let row = CheckRow::at_most(
                            format!("prop2_x{x}_y{y}_{}", s.name),
                            out.payoff.mean,
                            v + b,
                            3.0 * out.payoff.stderr,
                        );
                        data.push(GammaRow {
                            label: format!("prop2_{}", s.name),
                            x,
                            y: Some(y),
                            n,
                            trials: cfg.trials,
                            mean: out.payoff.mean,
                            stderr: out.payoff.stderr,
                            bound: b,
                            target_value: v,
                            pass: row.pass,
                            seed: cfg.seed,
                        });
                        rows.push(row);
                        if si == 0 && cfg.checks.contains(&Check::Gaps) {
                            let bc = bernoulli_check(out.z_ones, out.z_total, y);
                            rows.push(
                                CheckRow::at_most(
                                    format!("erasure_rate_x{x}_y{y}"),
                                    (bc.mean - y).abs(),
                                    0.0,
                                    bc.tolerance,
                                )
                                .with_note(format!("mean {}", bc.mean)),
                            );
                        }
                    }
                }
            }
            _ => {}
        }
    }
    let mut buf = Vec::new();
    write_gamma_csv(&mut buf, &data)?;
    Ok((rows, String::from_utf8(buf).expect("ascii")))
}

fn gap_rows(x: f64, n: usize, u_inf: f64, out: &crate::gamma::GammaOutcome) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let traces = out.traces.as_deref().unwrap_or_default();
    let ks: Vec<u32> = traces.iter().flat_map(|t| t.stopped_kappas()).collect();
    match geometric_gof(&ks, x) {
        Ok(g) => rows.push(
            CheckRow {
                pass: g.pass(1e-3),
                ..CheckRow::at_least(format!("gap_gof_x{x}"), g.p_value, 1e-3, 0.0)
            }
            .with_note(format!(
                "chi2 {} on {} dof, {} gaps",
                g.statistic, g.dof, g.samples
            )),
        ),
        Err(e) => rows.push(CheckRow::rejected(format!("gap_gof_x{x}"), &e)),
    }
    rows.push(CheckRow::at_most(
        format!("eq9_gap_x{x}"),
        out.b_n.mean,
        eq9_bound(x, n, u_inf),
        3.0 * out.b_n.stderr,
    ));
    rows
}

fn run_mcgame(cfg: &ScenarioConfig) -> Run {
    let Subject::Game { games, matrix } = &cfg.subject else {
        return Err(Error::Unsupported("mcgame needs a game family".into()));
    };
    let opts = cfg.game_options();
    let prior = match &cfg.prior {
        Some(p) => p.clone(),
        None => invariant_distribution(matrix),
    };
    let invariant = crate::markov::l1(&matrix.apply(prior.as_slice()), prior.as_slice()) <= 1e-12;
    let surfaces: Vec<mcgame::GameValueSurface> = {
        use rayon::prelude::*;
        cfg.deltas
            .par_iter()
            .map(|&d| mcgame::solve_game_value(games, matrix, d, &opts))
            .collect::<Result<_>>()?
    };
    let grid = opts.grid(games.k())?;
    let cav = mcgame::cav_u(games, grid)?;
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    let mut tol: f64 = 0.0;
    for s in &surfaces {
        phi.push(trajectories::phi_of(&s.value, &prior)?);
        psi.push(trajectories::psi_of(&s.value, &prior));
        tol = tol.max(s.tolerance);
    }
    let report =
        trajectories::TrajectoryReport::from_parts(cfg.deltas.clone(), phi, psi, 2.0 * tol);
    let mut csv = format!("model,{TRAJECTORY_HEADER},tolerance\n");
    for r in trajectory_rows(&report, None) {
        let _ = writeln!(csv, "mcgame,{},{}", r.csv_fields(), report.tolerance);
    }
    let mut rows = Vec::new();
    let coarse: usize = surfaces.iter().map(|s| s.coarse_points).sum();
    if coarse > 0 {
        rows.push(CheckRow::flag(
            "strategy_lattice",
            true,
            format!("{coarse} grid points refined past one lattice step"),
        ));
    }
    for c in &cfg.checks {
        match c {
            Check::Monotone => {
                if invariant {
                    let worst = report
                        .phi
                        .windows(2)
                        .map(|w| w[1] - w[0])
                        .fold(0.0, f64::max);
                    rows.push(CheckRow::at_most(
                        "value_non_increasing",
                        worst,
                        0.0,
                        report.tolerance,
                    ));
                } else {
                    rows.push(CheckRow::rejected(
                        "value_non_increasing",
                        &Error::param("prior", "prior is not invariant under the chain"),
                    ));
                }
            }
            Check::CavU => {
                let cav_prior = cav.eval(prior.as_slice())?;
                let low = report.phi.iter().cloned().fold(f64::INFINITY, f64::min);
                rows.push(CheckRow::at_least(
                    "value_above_cav_u",
                    low,
                    cav_prior,
                    report.tolerance,
                ));
                if let Some(i) = cfg.deltas.iter().position(|&d| d == 0.0) {
                    let s = &surfaces[i];
                    let dev = s
                        .values()
                        .iter()
                        .zip(cav.values())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    rows.push(CheckRow::at_most("v0_equals_cav_u", dev, 0.0, s.tolerance));
                }
            }
            _ => {}
        }
    }
    Ok((rows, csv))
}

fn run_sorin(cfg: &ScenarioConfig) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("mu,lambda,sequence,lhs,rhs,slack,residual\n");
    let mut rows = Vec::new();
    for &(mu, lambda) in &cfg.pairs {
        let (len, terms) = sorin_prefix(mu, lambda);
        let mut worst: f64 = 0.0;
        for s in 0..cfg.sequences {
            let a: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
            let chk = mcgame::sorin_identity_check(&a, mu, lambda, terms, 1.0)?;
            worst = worst.max(chk.residual);
            let _ = writeln!(
                csv,
                "{mu},{lambda},{s},{},{},{},{}",
                chk.lhs, chk.rhs, chk.slack, chk.residual
            );
        }
        rows.push(CheckRow::at_most(
            format!("sorin_mu{mu}_lambda{lambda}"),
            worst,
            0.0,
            1e-9,
        ));
    }
    Ok((rows, csv))
}

/// Prefix length and outer cut that keep the truncation slack near 1e-13.
fn sorin_prefix(mu: f64, lambda: f64) -> (usize, usize) {
    let steps = |q: f64, target: f64| {
        if q <= 0.0 {
            1
        } else {
            (target.ln() / q.ln()).ceil() as usize + 1
        }
    };
    let terms = steps(1.0 - mu, 1e-14 * mu);
    let extra = steps(1.0 - lambda, 1e-14 / terms as f64);
    (terms + extra, terms)
}

/// Scenario documents behind `verify-all`, keyed by file stem.
pub fn builtin_scenarios() -> Vec<(&'static str, &'static str)> {
    vec![
        ("appendixA_solve", APPENDIX_SOLVE),
        ("appendixA_trajectory", APPENDIX_TRAJECTORY),
        ("periodic_trajectory", PERIODIC_TRAJECTORY),
        ("ergodic_panel", ERGODIC_PANEL),
        ("appendixA_gamma", APPENDIX_GAMMA),
        ("appendixA_erasure", APPENDIX_ERASURE),
        ("identity_game", IDENTITY_GAME),
        ("appendixA_tau", APPENDIX_TAU),
        ("sorin", SORIN),
    ]
}

const APPENDIX_SOLVE: &str = r#"schema_version = 1
name = "appendixA_solve"
experiment = "solve"
instance = "appendixA"
deltas = [0.0, 0.25, 0.5, 0.75, 0.9]
grid = 2000
"#;

const APPENDIX_TRAJECTORY: &str = r#"schema_version = 1
name = "appendixA_trajectory"
experiment = "trajectory"
instance = "appendixA"
deltas = [0.0, 0.25, 0.5, 0.75, 0.9]
"#;

const PERIODIC_TRAJECTORY: &str = r#"schema_version = 1
name = "periodic_trajectory"
experiment = "trajectory"
instance = "periodic"
deltas = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
checks = ["monotone", "corollary1", "closed_form"]
"#;

const ERGODIC_PANEL: &str = r#"schema_version = 1
name = "ergodic_panel"
experiment = "trajectory"
panel = 20
panel_seed = 2024
deltas = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
checks = ["monotone", "weighted", "rate", "lemmas"]
"#;

const APPENDIX_GAMMA: &str = r#"schema_version = 1
name = "appendixA_gamma"
experiment = "gamma"
instance = "appendixA"
x = [0.3, 0.5, 0.8]
checks = ["claim1"]
trials = 100000
"#;

const APPENDIX_ERASURE: &str = r#"schema_version = 1
name = "appendixA_erasure"
experiment = "gamma"
instance = "appendixA"
x = 0.5
horizon = 10000
trials = 256
checks = ["prop1", "gaps"]
"#;

const IDENTITY_GAME: &str = r#"schema_version = 1
name = "identity_game"
experiment = "mcgame"
matrix = [[1.0, 0.0], [0.0, 1.0]]
games = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]
prior = [0.5, 0.5]
deltas = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
"#;

const SORIN: &str = r#"schema_version = 1
name = "sorin"
experiment = "sorin"
sequences = 100
"#;

const APPENDIX_TAU: &str = r#"schema_version = 1
name = "appendixA_tau"
experiment = "gamma"
instance = "appendixA"
x = 0.2
y = 0.6
horizon = 10000
trials = 256
checks = ["prop2", "gaps"]
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_trajectory_gets_defaults() {
        let c = parse_config(
            "schema_version = 1\nname = \"t\"\nexperiment = \"trajectory\"\ninstance = \"appendixA\"\n",
        )
        .unwrap();
        assert_eq!(c.deltas, DEFAULT_DELTAS.to_vec());
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.trials, DEFAULT_TRIALS);
        assert_eq!(c.eps_stop, DEFAULT_EPS_STOP);
        assert!(c.checks.contains(&Check::ClosedForm));
    }

    #[test]
    fn rejections_name_the_field_and_line() {
        let e = parse_config(
            "schema_version = 1\nname = \"t\"\nexperiment = \"trajectory\"\ninstance = \"appendixA\"\ndeltas = [0.5, 1.0]\n",
        )
        .unwrap_err()
        .to_string();
        assert!(e.contains("line 5") && e.contains("`deltas`"), "{e}");
        let e = parse_config(
            "schema_version = 1\nname = \"t\"\nexperiment = \"solve\"\nmatrix = [[0.5, 0.4], [0.5, 0.5]]\nsender = [[1.0], [0.0]]\nreceiver = [[1.0], [0.0]]\n",
        )
        .unwrap_err()
        .to_string();
        assert!(e.contains("row 0") && e.contains("line 4"), "{e}");
        let e = parse_config(
            "schema_version = 1\nname = \"t\"\nexperiment = \"solve\"\ninstance = \"nope\"\n",
        )
        .unwrap_err()
        .to_string();
        assert!(e.contains("unknown instance id"), "{e}");
        let e = parse_config("schema_version = 1\nname = \"t\"\nexperiment = \"solve\"\ninstance = \"appendixA\"\ngrdi = 3\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("grdi"), "{e}");
    }

    #[test]
    fn builtins_parse() {
        for (name, text) in builtin_scenarios() {
            let c = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(c.name, name);
        }
    }

    #[test]
    fn periodic_rate_is_a_rejection_row() {
        let c = parse_config(
            "schema_version = 1\nname = \"p\"\nexperiment = \"trajectory\"\ninstance = \"periodic\"\ngrid = 200\ndeltas = [0.5, 0.9]\nchecks = [\"rate\"]\n",
        )
        .unwrap();
        let r = run_scenario(&c, None).unwrap();
        let row = r.rows.iter().find(|r| r.name == "rate_ratio").unwrap();
        assert!(!row.pass && row.note.starts_with("rejected"));
    }

    #[test]
    fn reports_are_reproducible() {
        let text = "schema_version = 1\nname = \"g\"\nexperiment = \"gamma\"\ninstance = \"appendixA\"\nx = 0.5\ngrid = 200\ntrials = 2000\n";
        let c = parse_config(text).unwrap();
        let a = run_scenario(&c, None).unwrap();
        let b = run_scenario(&c, None).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.checks_csv(), b.checks_csv());
        assert!(a.pass(), "{}", a.summary());
    }
}
