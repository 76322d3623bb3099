//! Monte Carlo simulation of the erasure game: chance erases the receiver's
//! memory with probability `x` each stage, an adversary may erase it too,
//! and the sender splits the current state every stage.
//!
//! Beliefs live on the solver grid. After each push through `M` the belief
//! is split without bias onto the grid points that interpolate the value
//! function there, so the simulated dynamics are those of the grid MDP the
//! solver optimised.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::markov::{l1, Belief, StochasticMatrix};
use crate::persuasion::{
    posterior_laws, GridTable, PersuasionInstance, PushMode, Split, SplitPolicy,
    DEFAULT_SUPPORT_CAP,
};
use crate::trajectories::{solve, SolveSettings};

/// State of the erasure game.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaState {
    Belief(Belief),
    /// After an erasure by chance.
    PiStar,
    /// After an erasure by the adversary that chance did not override.
    PiStarStar,
}

impl GammaState {
    /// The belief the state stands for; both erasure states mean `pi`.
    pub fn belief<'a>(&'a self, pi: &'a Belief) -> &'a Belief {
        match self {
            GammaState::Belief(b) => b,
            _ => pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConfig {
    pub x: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl GammaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x > 0.0 && self.x < 1.0) {
            return Err(Error::param("x", format!("{} is outside (0, 1)", self.x)));
        }
        if self.n == 0 {
            return Err(Error::param("N", "need at least one stage"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl CesaroEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        CesaroEstimate {
            mean,
            stderr: (var / n).sqrt(),
            trials: xs.len(),
        }
    }
}

/// Chance erasures of one play.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErasureTrace {
    /// Stages (from 2 on) at which chance erased the memory.
    pub stages: Vec<u32>,
    pub horizon: usize,
}

impl ErasureTrace {
    /// `T_N`: number of chance erasures among stages `2..=N`.
    pub fn t_n(&self) -> usize {
        self.stages.len()
    }

    /// `l_N`: the last chance-erasure stage, or 1 if there was none.
    pub fn ell_n(&self) -> usize {
        self.stages.last().map(|&s| s as usize).unwrap_or(1)
    }

    /// Complete gaps `kappa_1, ..., kappa_{T_N}` between erasures, counting
    /// stage 1 as the start.
    pub fn kappas(&self) -> Vec<u32> {
        let mut prev = 1;
        self.stages
            .iter()
            .map(|&s| {
                let g = s - prev;
                prev = s;
                g
            })
            .collect()
    }

    /// Gaps that start no later than stage `N/2` and end within the play.
    /// Inclusion is decided before each gap is drawn, so pooled counts have
    /// exactly geometric expectations.
    pub fn stopped_kappas(&self) -> Vec<u32> {
        let half = (self.horizon / 2) as u32;
        let mut prev = 1;
        let mut out = Vec::new();
        for &s in &self.stages {
            if prev > half {
                break;
            }
            out.push(s - prev);
            prev = s;
        }
        out
    }
}

/// A distribution over grid indices with its stage payoff.
#[derive(Debug, Clone)]
struct Dist {
    atoms: Vec<usize>,
    cum: Vec<f64>,
    payoff: f64,
}

impl Dist {
    fn new(atoms: &[(usize, f64)], u: &[f64]) -> Self {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mut acc = 0.0;
        let cum = atoms
            .iter()
            .map(|a| {
                acc += a.1 / total;
                acc
            })
            .collect();
        Dist {
            atoms: atoms.iter().map(|a| a.0).collect(),
            cum,
            payoff: atoms.iter().map(|&(j, w)| w / total * u[j]).sum(),
        }
    }

    #[inline]
    fn sample(&self, rng: &mut impl Rng) -> usize {
        if self.atoms.len() == 1 {
            return self.atoms[0];
        }
        let r: f64 = rng.random();
        let i = self.cum.partition_point(|&c| c <= r);
        self.atoms[i.min(self.atoms.len() - 1)]
    }
}

#[inline]
fn sample_small(atoms: &[(usize, f64)], rng: &mut impl Rng) -> usize {
    if atoms.len() == 1 {
        return atoms[0].0;
    }
    let mut r: f64 = rng.random();
    for &(j, w) in atoms {
        if r < w {
            return j;
        }
        r -= w;
    }
    atoms[atoms.len() - 1].0
}

/// A sender strategy compiled to grid tables.
#[derive(Debug, Clone)]
pub struct SenderStrategy {
    pub name: String,
    table: Arc<GridTable>,
    grid: Arc<crate::grid::SimplexGrid>,
    /// Split of `pi` played at the start and after chance erasures.
    root: Dist,
    /// Memory restorations `mu*_{i+1}` indexed by `i`, for theta*.
    restorations: Option<Vec<Dist>>,
    /// Mass lost to support truncation in the restoration laws.
    pub truncated_mass: f64,
}

fn grid_atoms(policy: &SplitPolicy, b: &Belief) -> Result<Vec<(usize, f64)>> {
    match policy.grid().exact_index(b.as_slice()) {
        Some(j) => Ok(vec![(j, 1.0)]),
        None => policy.value().interpolation_atoms(b.as_slice()),
    }
}

/// The optimal split of `pi` as grid atoms. Off-grid beliefs that the
/// policy would not split are split onto their interpolating grid points.
fn root_split(policy: &SplitPolicy, pi: &Belief) -> Result<Vec<(usize, f64)>> {
    if let Some(j) = policy.grid().exact_index(pi.as_slice()) {
        return Ok(policy.grid_table()?.splits[j].clone());
    }
    let s = policy.split(pi)?;
    let mut out = Vec::new();
    for (w, b) in s.atoms() {
        for (j, t) in grid_atoms(policy, b)? {
            out.push((j, w * t));
        }
    }
    Ok(out)
}

impl SenderStrategy {
    /// Follows the stationary policy everywhere; both erasure states are
    /// treated as `pi`.
    pub fn stationary(name: impl Into<String>, policy: &SplitPolicy, pi: &Belief) -> Result<Self> {
        let table = policy.grid_table()?;
        let root = Dist::new(&root_split(policy, pi)?, &table.u);
        Ok(SenderStrategy {
            name: name.into(),
            grid: policy.grid().clone(),
            table,
            root,
            restorations: None,
            truncated_mass: 0.0,
        })
    }

    /// Never reveals anything: plays the trivial split of every state.
    pub fn no_reveal(policy: &SplitPolicy, pi: &Belief) -> Result<Self> {
        let base = policy.grid_table()?;
        let g = policy.grid();
        let table = GridTable {
            u: base.u.clone(),
            splits: (0..g.len()).map(|j| vec![(j, 1.0)]).collect(),
            stage_payoff: base.u.clone(),
            pushes: base.pushes.clone(),
        };
        let root = match g.exact_index(pi.as_slice()) {
            Some(j) => vec![(j, 1.0)],
            None => policy.value().interpolation_atoms(pi.as_slice())?,
        };
        Ok(SenderStrategy {
            name: "no-reveal".into(),
            grid: g.clone(),
            root: Dist::new(&root, &table.u),
            table: Arc::new(table),
            restorations: None,
            truncated_mass: 0.0,
        })
    }

    pub fn root_payoff(&self) -> f64 {
        self.root.payoff
    }

    /// Number of precomputed restoration depths (theta* only).
    pub fn restoration_depth(&self) -> usize {
        self.restorations.as_ref().map_or(0, |r| r.len())
    }

    /// The split played at `state` when `i` stages have passed since the
    /// last erasure by chance.
    pub fn split_at(&self, state: &GammaState, i: usize, pi: &Belief) -> Result<Split> {
        let dist_atoms = |d: &Dist| -> Vec<(f64, Belief)> {
            let mut prev = 0.0;
            d.atoms
                .iter()
                .zip(&d.cum)
                .map(|(&j, &c)| {
                    let w = c - prev;
                    prev = c;
                    (w, self.grid.belief(j))
                })
                .filter(|(w, _)| *w > 0.0)
                .collect()
        };
        match state {
            GammaState::PiStar => Split::new(dist_atoms(&self.root), pi),
            GammaState::PiStarStar => match &self.restorations {
                Some(r) => Split::new(dist_atoms(&r[i.min(r.len() - 1)]), pi),
                None => Split::new(dist_atoms(&self.root), pi),
            },
            GammaState::Belief(b) => {
                let j = self.grid.exact_index(b.as_slice()).ok_or_else(|| {
                    Error::param("state", "simulated beliefs must be grid points")
                })?;
                let atoms = self.table.splits[j]
                    .iter()
                    .map(|&(a, w)| (w, self.grid.belief(a)))
                    .collect();
                Split::new(atoms, b)
            }
        }
    }
}

/// Depth beyond which a block outlives chance erasures with probability
/// below `1e-15`.
fn restoration_depth(x: f64) -> usize {
    ((1e-15f64).ln() / (1.0 - x).ln()).ceil() as usize + 1
}

/// theta*: follow the policy for `delta = 1 - x`; at the adversary's
/// erasure state, `i` stages after the last chance erasure, split `pi`
/// into the stage-`(i+1)` posterior law of the policy.
pub fn theta_star_from_policy(policy: &SplitPolicy, pi: &Belief, x: f64) -> Result<SenderStrategy> {
    if (policy.delta() - (1.0 - x)).abs() > 1e-12 {
        return Err(Error::param(
            "x",
            format!(
                "policy was solved at delta = {}, not 1 - x = {}",
                policy.delta(),
                1.0 - x
            ),
        ));
    }
    let mut s = SenderStrategy::stationary("theta*", policy, pi)?;
    let depth = restoration_depth(x);
    let laws = posterior_laws(
        policy,
        pi,
        depth,
        PushMode::GridRounded,
        DEFAULT_SUPPORT_CAP,
        true,
    )?;
    let mut dists = Vec::with_capacity(depth);
    let mut truncated = 0.0f64;
    for law in &laws {
        truncated = truncated.max(law.truncated_mass);
        let mut atoms = Vec::with_capacity(law.atoms.len());
        for (w, b) in &law.atoms {
            for (j, t) in grid_atoms(policy, b)? {
                atoms.push((j, w * t));
            }
        }
        dists.push(Dist::new(&atoms, &s.table.u));
    }
    s.restorations = Some(dists);
    s.truncated_mass = truncated;
    Ok(s)
}

/// Solves at `delta = 1 - x` and compiles theta*.
pub fn theta_star(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    pi: &Belief,
    x: f64,
    settings: &SolveSettings,
) -> Result<SenderStrategy> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param("x", "must lie in (0, 1)"));
    }
    let sol = solve(instance, m, 1.0 - x, settings)?;
    let policy = SplitPolicy::new(&sol.value, instance, m, 1.0 - x)?;
    theta_star_from_policy(&policy, pi, x)
}

/// Splits every state to the supports of `Cav u` (the static optimum).
pub fn myopic_sender(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    pi: &Belief,
    settings: &SolveSettings,
) -> Result<SenderStrategy> {
    let sol = solve(instance, m, 0.0, settings)?;
    let policy = SplitPolicy::new(&sol.value, instance, m, 0.0)?;
    SenderStrategy::stationary("myopic", &policy, pi)
}

/// The adversary decides to erase (action 1) from its own past moves only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adversary {
    Constant(bool),
    /// Erases with probability `beta` each stage, independently.
    Iid(f64),
    /// Erases at every stage divisible by `period`.
    Periodic(usize),
}

impl Adversary {
    pub fn name(&self) -> String {
        match self {
            Adversary::Constant(c) => format!("const{}", *c as u8),
            Adversary::Iid(b) => format!("iid{b}"),
            Adversary::Periodic(p) => format!("periodic{p}"),
        }
    }

    #[inline]
    fn act(&self, stage: usize, rng: &mut impl Rng) -> bool {
        match *self {
            Adversary::Constant(c) => c,
            Adversary::Iid(b) => rng.random::<f64>() < b,
            Adversary::Periodic(p) => stage.is_multiple_of(p),
        }
    }
}

/// The finite adversary panel: constant 0 and 1, i.i.d. with
/// `beta = 0.1, ..., 0.9`, and a period-3 eraser.
pub fn adversary_panel() -> Vec<Adversary> {
    let mut v = vec![Adversary::Constant(false), Adversary::Constant(true)];
    v.extend((1..=9).map(|i| Adversary::Iid(i as f64 / 10.0)));
    v.push(Adversary::Periodic(3));
    v
}

/// `tau^y`: erase with probability `(y - x)/(1 - x)` at every stage.
pub fn tau_y(x: f64, y: f64) -> Result<Adversary> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param("x", "must lie in (0, 1)"));
    }
    if !(y > x && y <= 1.0) {
        return Err(Error::param(
            "y",
            format!("need x < y <= 1, got x = {x}, y = {y}"),
        ));
    }
    Ok(Adversary::Iid((y - x) / (1.0 - x)))
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Total undiscounted payoff over a horizon `Y ~ Geometric(x)` when the
/// policy is followed from `q`. Stage payoffs are `sum_s alpha_s u(xi_s)`.
pub fn random_duration_payoff(
    policy: &SplitPolicy,
    q: &Belief,
    x: f64,
    trials: usize,
    seed: u64,
) -> Result<CesaroEstimate> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::param("x", "must lie in (0, 1]"));
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let table = policy.grid_table()?;
    let root = Dist::new(&root_split(policy, q)?, &table.u);
    let totals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut total = root.payoff;
            let mut post = root.sample(&mut rng);
            while rng.random::<f64>() >= x {
                let state = sample_small(&table.pushes[post], &mut rng);
                total += table.stage_payoff[state];
                post = sample_small(&table.splits[state], &mut rng);
            }
            total
        })
        .collect();
    Ok(CesaroEstimate::from_samples(&totals))
}

/// Result of a batch of plays.
#[derive(Debug, Clone)]
pub struct GammaOutcome {
    /// `gamma_N`: the N-Cesaro payoff.
    pub payoff: CesaroEstimate,
    /// `A_N`: stages up to and including the last chance erasure, over `N`.
    pub a_n: CesaroEstimate,
    /// `B_N = gamma_N - A_N` per trial.
    pub b_n: CesaroEstimate,
    /// Erasure indicators `Z_n` for `n >= 2`, pooled over trials.
    pub z_ones: u64,
    pub z_total: u64,
    pub traces: Option<Vec<ErasureTrace>>,
    /// Adversary erasures deeper than the precomputed restorations.
    pub restoration_overflow: u64,
}

struct TrialResult {
    payoff: f64,
    a_n: f64,
    z_ones: u64,
    overflow: u64,
    trace: Option<ErasureTrace>,
}

enum Omega {
    Grid(usize),
    Star,
    StarStar,
}

fn play(
    sender: &SenderStrategy,
    adversary: &Adversary,
    cfg: &GammaConfig,
    trial: usize,
    record: bool,
) -> TrialResult {
    let mut rng = trial_rng(cfg.seed, trial);
    let table = &sender.table;
    let mut state = Omega::Star;
    let mut since = 0usize;
    let mut total = 0.0;
    let mut upto_last = 0.0;
    let mut z_ones = 0;
    let mut overflow = 0;
    let mut stages = Vec::new();
    for n in 1..=cfg.n {
        if n >= 2 && !matches!(state, Omega::Grid(_)) {
            z_ones += 1;
        }
        let post = match state {
            Omega::Grid(j) => {
                total += table.stage_payoff[j];
                sample_small(&table.splits[j], &mut rng)
            }
            Omega::Star => {
                total += sender.root.payoff;
                // stage l_N itself belongs to A_N
                upto_last = total;
                sender.root.sample(&mut rng)
            }
            Omega::StarStar => {
                let d = match &sender.restorations {
                    Some(r) => {
                        if since >= r.len() {
                            overflow += 1;
                        }
                        &r[since.min(r.len() - 1)]
                    }
                    None => &sender.root,
                };
                total += d.payoff;
                d.sample(&mut rng)
            }
        };
        if n == cfg.n {
            break;
        }
        let erase = adversary.act(n, &mut rng);
        if rng.random::<f64>() < cfg.x {
            state = Omega::Star;
            since = 0;
            if record {
                stages.push((n + 1) as u32);
            }
        } else {
            since += 1;
            state = if erase {
                Omega::StarStar
            } else {
                Omega::Grid(sample_small(&table.pushes[post], &mut rng))
            };
        }
    }
    let n = cfg.n as f64;
    TrialResult {
        payoff: total / n,
        a_n: upto_last / n,
        z_ones,
        overflow,
        trace: record.then_some(ErasureTrace {
            stages,
            horizon: cfg.n,
        }),
    }
}

/// Plays `trials` independent `N`-stage games and aggregates in trial order.
pub fn run_gamma(
    sender: &SenderStrategy,
    adversary: &Adversary,
    cfg: &GammaConfig,
    record_traces: bool,
) -> Result<GammaOutcome> {
    cfg.validate()?;
    if let Adversary::Iid(b) = adversary {
        if !(0.0..=1.0).contains(b) {
            return Err(Error::param("beta", "must lie in [0, 1]"));
        }
    }
    if let Adversary::Periodic(0) = adversary {
        return Err(Error::param("period", "must be positive"));
    }
    let results: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| play(sender, adversary, cfg, t, record_traces))
        .collect();
    let payoffs: Vec<f64> = results.iter().map(|r| r.payoff).collect();
    let a: Vec<f64> = results.iter().map(|r| r.a_n).collect();
    let b: Vec<f64> = results.iter().map(|r| r.payoff - r.a_n).collect();
    Ok(GammaOutcome {
        payoff: CesaroEstimate::from_samples(&payoffs),
        a_n: CesaroEstimate::from_samples(&a),
        b_n: CesaroEstimate::from_samples(&b),
        z_ones: results.iter().map(|r| r.z_ones).sum(),
        z_total: (cfg.n.saturating_sub(1) * cfg.trials) as u64,
        restoration_overflow: results.iter().map(|r| r.overflow).sum(),
        traces: record_traces.then(|| results.into_iter().filter_map(|r| r.trace).collect()),
    })
}

/// Lower-guarantee slack for theta*:
/// `(||u||/x)(2/N^{1/4} + 2 exp(-2 sqrt N)(2x + 3) + (1 - x)/N)`.
pub fn proposition1_bound(x: f64, n: usize, u_inf: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param("x", "must lie in (0, 1)"));
    }
    let nf = n as f64;
    if n == 0 || (nf - 1.0) * x - nf.powf(0.75) < 0.0 {
        return Err(Error::param(
            "N",
            format!("{n} is below N0: need (N - 1) x - N^0.75 >= 0"),
        ));
    }
    Ok(u_inf / x
        * (2.0 / nf.powf(0.25) + 2.0 * (-2.0 * nf.sqrt()).exp() * (2.0 * x + 3.0) + (1.0 - x) / nf))
}

/// Upper-guarantee slack under `tau^y`:
/// `(1/(y N^{1/4}) + 2 exp(-2 sqrt N)) ||u|| + ((1 - y)/y) ||u|| / N`.
pub fn proposition2_bound(y: f64, n: usize, u_inf: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::param("y", "must lie in (0, 1]"));
    }
    if n == 0 {
        return Err(Error::param("N", "need at least one stage"));
    }
    let nf = n as f64;
    Ok(
        (1.0 / (y * nf.powf(0.25)) + 2.0 * (-2.0 * nf.sqrt()).exp()) * u_inf
            + (1.0 - y) / y * u_inf / nf,
    )
}

/// `((1 - x)/x) ||u|| / N`, the gap between `gamma_N` and `A_N`.
pub fn eq9_bound(x: f64, n: usize, u_inf: f64) -> f64 {
    (1.0 - x) / x * u_inf / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub samples: usize,
}

impl GofResult {
    pub fn pass(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson chi-square test of samples against `Geometric(x)` on
/// `{1, 2, ...}`; the tail is pooled so every expected count is at least 5.
pub fn geometric_gof(samples: &[u32], x: f64) -> Result<GofResult> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param("x", "must lie in (0, 1)"));
    }
    let n = samples.len() as f64;
    if n < 50.0 {
        return Err(Error::param("samples", "need at least 50 samples"));
    }
    let p = |j: u32| x * (1.0 - x).powi(j as i32 - 1);
    // last bin J collects everything >= J
    let mut bins = 1u32;
    while n * (1.0 - x).powi(bins as i32) >= 5.0 && n * p(bins) >= 5.0 {
        bins += 1;
    }
    let mut observed = vec![0u64; bins as usize];
    for &s in samples {
        if s == 0 {
            return Err(Error::param("samples", "geometric samples start at 1"));
        }
        observed[(s.min(bins) - 1) as usize] += 1;
    }
    let mut stat = 0.0;
    for j in 1..=bins {
        let e = if j == bins {
            n * (1.0 - x).powi(j as i32 - 1)
        } else {
            n * p(j)
        };
        let o = observed[(j - 1) as usize] as f64;
        stat += (o - e).powi(2) / e;
    }
    let dof = (bins as usize).saturating_sub(1).max(1);
    let chi = ChiSquared::new(dof as f64).map_err(|e| Error::param("dof", e.to_string()))?;
    Ok(GofResult {
        statistic: stat,
        dof,
        p_value: 1.0 - chi.cdf(stat),
        samples: samples.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliCheck {
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Empirical mean within `4 sqrt(y(1 - y)/samples)` of `y`.
pub fn bernoulli_check(ones: u64, total: u64, y: f64) -> BernoulliCheck {
    let mean = ones as f64 / total as f64;
    let tolerance = 4.0 * (y * (1.0 - y) / total as f64).sqrt();
    BernoulliCheck {
        mean,
        tolerance,
        pass: (mean - y).abs() <= tolerance,
    }
}

/// One CSV row of a gamma experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRow {
    pub label: String,
    pub x: f64,
    pub y: Option<f64>,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub target_value: f64,
    pub pass: bool,
    pub seed: u64,
}

pub const GAMMA_HEADER: &str = "label,x,y,N,trials,mean,stderr,bound,target_value,pass,seed";

pub fn write_gamma_csv(mut w: impl Write, rows: &[GammaRow]) -> Result<()> {
    writeln!(w, "{GAMMA_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.label,
            r.x,
            r.y.map(|y| y.to_string()).unwrap_or_default(),
            r.n,
            r.trials,
            r.mean,
            r.stderr,
            r.bound,
            r.target_value,
            r.pass,
            r.seed
        )?;
    }
    Ok(())
}

/// Checks that a split is a valid split of `xi` up to `tol` in l1.
pub fn split_matches(split: &Split, xi: &Belief, tol: f64) -> bool {
    l1(split.barycenter().as_slice(), xi.as_slice()) <= tol
}
