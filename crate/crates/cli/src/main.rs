use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use markov_persuasion::scenario::{
    builtin_scenarios, parse_config, run_scenario, write_summary, Experiment, RunReport,
    ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "mpersuade",
    version,
    about = "Run Markovian persuasion scenarios and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve the discounted value on the belief grid.
    Solve(RunArgs),
    /// Trace the value bracket across discount factors.
    Trajectory(RunArgs),
    /// Simulate the random-erasure game.
    Gamma(RunArgs),
    /// Solve a Markov chain game.
    Mcgame(RunArgs),
    /// Check the discounted-average decomposition on random sequences.
    Sorin(RunArgs),
    /// Run every built-in scenario.
    VerifyAll(SuiteArgs),
}

#[derive(Args)]
struct Overrides {
    /// Output directory for CSV files and summary.txt.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid resolution m.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario files; may be repeated.
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    #[command(flatten)]
    over: Overrides,
    /// Run scenarios in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct SuiteArgs {
    #[command(flatten)]
    over: Overrides,
    #[arg(long)]
    parallel: bool,
}

fn apply(over: &Overrides, mut cfg: ScenarioConfig) -> ScenarioConfig {
    if let Some(s) = over.seed {
        cfg.seed = s;
    }
    if let Some(g) = over.grid {
        cfg.grid = Some(g);
    }
    if let Some(t) = over.trials {
        cfg.trials = t;
    }
    cfg
}

fn load(path: &PathBuf, want: Experiment) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cfg = parse_config(&text).map_err(|e| format!("{}:\n{e}", path.display()))?;
    if cfg.experiment != want {
        return Err(format!(
            "{}: experiment is `{}`, not `{}`",
            path.display(),
            cfg.experiment.name(),
            want.name()
        ));
    }
    Ok(cfg)
}

fn execute(configs: Vec<ScenarioConfig>, over: &Overrides, parallel: bool) -> ExitCode {
    let run = |c: &ScenarioConfig| run_scenario(c, Some(&over.out));
    let results: Vec<_> = if parallel {
        configs.par_iter().map(run).collect()
    } else {
        configs.iter().map(run).collect()
    };
    let mut reports: Vec<RunReport> = Vec::new();
    let mut errors = 0;
    for r in results {
        match r {
            Ok(r) => {
                print!("{}", r.summary());
                reports.push(r);
            }
            Err(e) => {
                eprintln!("error: {e}");
                errors += 1;
            }
        }
    }
    if let Err(e) = write_summary(&over.out, &reports) {
        eprintln!("error: writing summary: {e}");
        return ExitCode::from(2);
    }
    let failed = reports.iter().filter(|r| !r.pass()).count();
    println!(
        "{} of {} scenarios passed; artifacts in {}",
        reports.len() - failed,
        reports.len() + errors,
        over.out.display()
    );
    if errors > 0 {
        ExitCode::from(2)
    } else if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (want, args) = match cli.verb {
        Verb::Solve(a) => (Experiment::Solve, a),
        Verb::Trajectory(a) => (Experiment::Trajectory, a),
        Verb::Gamma(a) => (Experiment::Gamma, a),
        Verb::Mcgame(a) => (Experiment::McGame, a),
        Verb::Sorin(a) => (Experiment::Sorin, a),
        Verb::VerifyAll(s) => {
            let configs = builtin_scenarios()
                .into_iter()
                .map(|(_, text)| {
                    apply(
                        &s.over,
                        parse_config(text).expect("built-in scenarios parse"),
                    )
                })
                .collect();
            return execute(configs, &s.over, s.parallel);
        }
    };
    let mut configs = Vec::new();
    for p in &args.config {
        match load(p, want) {
            Ok(c) => configs.push(apply(&args.over, c)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    execute(configs, &args.over, args.parallel)
}
