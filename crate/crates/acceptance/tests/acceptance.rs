//! Acceptance suite: one line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use markov_persuasion::instances::{appendix_a, periodic};
use markov_persuasion::mcgame::{solve_game_value, GameSolveOptions, MatrixGameFamily};
use markov_persuasion::scenario::{builtin_scenarios, parse_config, run_scenario, RunReport};
use markov_persuasion::trajectories::{phi_psi, solve, SolveSettings};
use markov_persuasion::{Belief, StochasticMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scenario(name: &str) -> RunReport {
    let (_, text) = builtin_scenarios()
        .into_iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no built-in scenario {name}"));
    run_scenario(&parse_config(text).expect("built-in parses"), None).expect("scenario runs")
}

/// Rows whose name ends with `suffix` (panel rows carry an instance prefix).
fn rows_ending<'a>(
    r: &'a RunReport,
    suffix: &str,
) -> Vec<&'a markov_persuasion::scenario::CheckRow> {
    r.rows.iter().filter(|c| c.name.ends_with(suffix)).collect()
}

const DELTAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];

fn closed_form() -> Outcome {
    let (inst, m) = appendix_a();
    let settings = SolveSettings::with_resolution(2000);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in DELTAS {
        let sol = solve(&inst, &m, d, &settings).expect("solve");
        for i in 0..=2000 {
            let p = i as f64 / 2000.0;
            let v = sol.value.eval(&[p, 1.0 - p]).expect("eval");
            worst = worst.max((v - common::appendix_value(d, p)).abs());
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 2e-3 && t <= Duration::from_secs(60),
        format!(
            "max error {worst:.3e} (<= 2e-3), {:.2}s (<= 60s)",
            t.as_secs_f64()
        ),
    )
}

fn constant_phi() -> Outcome {
    let (inst, m) = appendix_a();
    let r = phi_psi(&inst, &m, &DELTAS, &SolveSettings::with_resolution(2000)).expect("trajectory");
    let target = common::appendix_value(0.0, 0.25);
    let worst = r.phi.iter().map(|f| (f - target).abs()).fold(0.0, f64::max);
    outcome(
        worst <= 2e-3,
        format!("target {target}, max deviation {worst:.3e} (<= 2e-3)"),
    )
}

fn increasing_psi() -> Outcome {
    let (inst, m) = appendix_a();
    let r = phi_psi(&inst, &m, &DELTAS, &SolveSettings::with_resolution(2000)).expect("trajectory");
    let psi0 = 0.25 * common::appendix_u(1.0);
    let inc = r.min_psi_increment();
    let e0 = (r.psi[0] - psi0).abs();
    outcome(
        inc > r.tolerance && e0 <= 1e-3,
        format!(
            "min increment {inc:.3e} > tolerance {:.3e}, |Psi(0) - {psi0}| = {e0:.3e}",
            r.tolerance
        ),
    )
}

fn periodic_case() -> Outcome {
    let (inst, m) = periodic();
    let deltas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let r = phi_psi(&inst, &m, &deltas, &SolveSettings::with_resolution(2000)).expect("trajectory");
    let phi = r.phi.iter().map(|f| (f - 0.25).abs()).fold(0.0, f64::max);
    let psi = r.psi.iter().map(|f| f.abs()).fold(0.0, f64::max);
    outcome(
        phi <= 1e-3 && psi <= 1e-9,
        format!("|Phi - 0.25| <= {phi:.3e}, |Psi| <= {psi:.3e}"),
    )
}

fn all_pass(rows: &[&markov_persuasion::scenario::CheckRow], what: &str) -> Outcome {
    let failed: Vec<&str> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    let worst = rows
        .iter()
        .map(|r| r.measured - r.bound - r.tolerance)
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        !rows.is_empty() && failed.is_empty(),
        format!(
            "{} {what} rows, {} violations, worst excess {worst:.3e}{}",
            rows.len(),
            failed.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(" ({})", failed.join(" "))
            }
        ),
    )
}

fn theorem1(panel: &RunReport) -> Outcome {
    all_pass(&rows_ending(panel, "/phi_non_increasing"), "Phi")
}

fn theorem2(panel: &RunReport) -> Outcome {
    let mut rows = rows_ending(panel, "/psi_non_decreasing");
    rows.extend(rows_ending(panel, "/weighted_non_decreasing"));
    all_pass(&rows, "Psi and weighted")
}

fn rate(panel: &RunReport) -> Outcome {
    let rows = rows_ending(panel, "/rate_ratio");
    let failed = rows.iter().filter(|r| !r.pass).count();
    let worst = rows
        .iter()
        .map(|r| r.measured / r.bound)
        .fold(0.0, f64::max);
    outcome(
        rows.len() == 20 && failed == 0,
        format!(
            "{} instances, max/(3 median) at most {worst:.3}",
            rows.len()
        ),
    )
}

fn lemmas(panel: &RunReport) -> Outcome {
    let mut rows = rows_ending(panel, "/shift_bound");
    rows.extend(rows_ending(panel, "/lipschitz_near_pi"));
    all_pass(&rows, "lemma")
}

fn claim1() -> Outcome {
    let start = Instant::now();
    let r = scenario("appendixA_gamma");
    let t = start.elapsed();
    let ok = r.rows.len() == 3 && r.pass() && t <= Duration::from_secs(120);
    let notes: Vec<String> = r
        .rows
        .iter()
        .map(|c| format!("{}: {}", c.name, c.note))
        .collect();
    outcome(
        ok,
        format!("{} ; {:.2}s (<= 120s)", notes.join("; "), t.as_secs_f64()),
    )
}

fn prop1(erasure: &RunReport) -> Outcome {
    let rows: Vec<_> = erasure
        .rows
        .iter()
        .filter(|r| r.name.starts_with("prop1_"))
        .collect();
    let failed = rows.iter().filter(|r| !r.pass).count();
    let lowest = rows
        .iter()
        .map(|r| r.measured)
        .fold(f64::INFINITY, f64::min);
    outcome(
        rows.len() == 12 && failed == 0,
        format!(
            "{} adversaries, {failed} below; lowest mean {lowest:.5} against v - bound = {:.5}",
            rows.len(),
            rows.first().map_or(f64::NAN, |r| r.bound)
        ),
    )
}

fn prop2(tau: &RunReport) -> Outcome {
    let rows: Vec<_> = tau
        .rows
        .iter()
        .filter(|r| r.name.starts_with("prop2_"))
        .collect();
    let failed = rows.iter().filter(|r| !r.pass).count();
    let highest = rows
        .iter()
        .map(|r| r.measured)
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        rows.len() == 3 && failed == 0,
        format!(
            "{} senders, {failed} above; highest mean {highest:.5} against v + bound = {:.5}",
            rows.len(),
            rows.first().map_or(f64::NAN, |r| r.bound)
        ),
    )
}

fn gaps(erasure: &RunReport, tau: &RunReport) -> Outcome {
    let mut rows: Vec<_> = erasure
        .rows
        .iter()
        .filter(|r| r.name.starts_with("gap_gof"))
        .collect();
    rows.extend(
        tau.rows
            .iter()
            .filter(|r| r.name.starts_with("gap_gof") || r.name.starts_with("erasure_rate")),
    );
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("{}={:.4}", r.name, r.measured))
        .collect();
    outcome(
        rows.len() == 3 && rows.iter().all(|r| r.pass),
        detail.join(", "),
    )
}

fn sorin() -> Outcome {
    let start = Instant::now();
    let r = scenario("sorin");
    let t = start.elapsed();
    let worst = r.rows.iter().map(|c| c.measured).fold(0.0, f64::max);
    outcome(
        r.rows.len() == 3 && r.pass() && t <= Duration::from_secs(5),
        format!(
            "max residual {worst:.3e} (<= 1e-9), {:.2}s (<= 5s)",
            t.as_secs_f64()
        ),
    )
}

fn markov_game() -> Outcome {
    let games = MatrixGameFamily::new(vec![
        vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        vec![vec![0.0, 0.0], vec![0.0, 1.0]],
    ])
    .expect("games");
    let m = StochasticMatrix::identity(2);
    let opts = GameSolveOptions::default();
    let deltas: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    let half = Belief::uniform(2);
    let mut vals = Vec::new();
    let mut tol: f64 = 0.0;
    let mut v0_dev = f64::NAN;
    let mut v0_tol = f64::NAN;
    for &d in &deltas {
        let s = solve_game_value(&games, &m, d, &opts).expect("game solve");
        vals.push(s.value.eval(half.as_slice()).expect("eval"));
        tol = tol.max(s.tolerance);
        if d == 0.0 {
            let g = s.grid().clone();
            let u: Vec<f64> = (0..g.len())
                .map(|i| {
                    let p = g.point(i)[0];
                    common::value_2x2([[p, 0.0], [0.0, 1.0 - p]])
                })
                .collect();
            // the oracle needs points ordered along [0, 1]
            let mut order: Vec<usize> = (0..g.len()).collect();
            order.sort_by(|&a, &b| g.point(a)[0].total_cmp(&g.point(b)[0]));
            let sorted: Vec<f64> = order.iter().map(|&i| u[i]).collect();
            let cav = common::cav_pairs(&sorted);
            v0_dev = order
                .iter()
                .zip(&cav)
                .map(|(&i, c)| (s.values()[i] - c).abs())
                .fold(0.0, f64::max);
            v0_tol = s.tolerance;
        }
    }
    let cav_half = common::cav_pairs(
        &(0..=200)
            .map(|i| {
                let p = i as f64 / 200.0;
                common::value_2x2([[p, 0.0], [0.0, 1.0 - p]])
            })
            .collect::<Vec<_>>(),
    )[100];
    let worst_rise = vals.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let lowest = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let monotone = worst_rise <= 2.0 * tol;
    let above = lowest >= cav_half - 2.0 * tol;
    let v0 = v0_dev <= v0_tol;
    outcome(
        monotone && above && v0,
        format!(
            "V(1/2) from {:.4} to {:.4}, worst rise {worst_rise:.2e} [{}]; min {lowest:.4} vs Cav U {cav_half} [{}]; V0 vs Cav U max deviation {v0_dev:.4} vs tolerance {v0_tol:.2e} [{}]",
            vals[0],
            vals[vals.len() - 1],
            if monotone { "ok" } else { "fail" },
            if above { "ok" } else { "fail" },
            if v0 { "ok" } else { "fail" },
        ),
    )
}

fn brute_force() -> Outcome {
    let (inst, m) = appendix_a();
    let rows = m.rows();
    let m2 = [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]];
    let oracle = common::grid_mdp_value(common::appendix_u, m2, 60, 0.5);
    let settings = SolveSettings {
        eps_stop: 1e-9,
        ..SolveSettings::with_resolution(60)
    };
    let sol = solve(&inst, &m, 0.5, &settings).expect("solve");
    let gap = oracle
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let p = i as f64 / 60.0;
            (sol.value.eval(&[p, 1.0 - p]).expect("eval") - o).abs()
        })
        .fold(0.0, f64::max);
    outcome(gap <= 1e-6, format!("max gap {gap:.3e} (<= 1e-6)"))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |name: &str, o: Outcome| {
        println!(
            "[{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    };
    report("closed-form match (appendixA)", closed_form());
    report("constant Phi (appendixA)", constant_phi());
    report("increasing Psi (appendixA)", increasing_psi());
    report("periodic chain", periodic_case());
    let panel = scenario("ergodic_panel");
    report("Phi non-increasing on ergodic panel", theorem1(&panel));
    report(
        "Psi and weighted family non-decreasing on ergodic panel",
        theorem2(&panel),
    );
    report("rate bound ratios on ergodic panel", rate(&panel));
    report(
        "shift and Lipschitz bounds on ergodic panel",
        lemmas(&panel),
    );
    report("random-duration Monte Carlo", claim1());
    let erasure = scenario("appendixA_erasure");
    let tau = scenario("appendixA_tau");
    report("lower guarantee against adversary panel", prop1(&erasure));
    report("upper guarantee under tau_y", prop2(&tau));
    report("erasure gap statistics", gaps(&erasure, &tau));
    report("discounted-average decomposition", sorin());
    report("Markov chain game (identity chain)", markov_game());
    report("brute-force grid MDP oracle", brute_force());
    println!("acceptance: {} of 15 criteria passed", 15 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
