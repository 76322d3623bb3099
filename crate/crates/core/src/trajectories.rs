//! Value trajectories in the discount factor: `Phi(delta) = v(pi)` and
//! `Psi(delta) = sum_l pi_l v(e_l)`, monotonicity checks, the asymptotic
//! bracket, the shift and local Lipschitz bounds, and the rate check.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;
use crate::markov::{invariant_distribution, l1, Belief, StochasticMatrix};
use crate::persuasion::envelope::invert;
use crate::persuasion::{
    solve_discounted_value, GridValueFunction, PersuasionInstance, Solution, SolverOptions,
    DEFAULT_EPS_STOP, DEFAULT_MAX_ITER,
};

/// Default lattice resolution per state count.
pub fn default_resolution(k: usize) -> usize {
    match k {
        2 => 2000,
        3 => 60,
        _ => 12,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    /// Lattice resolution; `None` picks [`default_resolution`].
    pub resolution: Option<usize>,
    pub eps_stop: f64,
    pub max_iter: usize,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            resolution: None,
            eps_stop: DEFAULT_EPS_STOP,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SolveSettings {
    pub fn with_resolution(m: usize) -> Self {
        SolveSettings {
            resolution: Some(m),
            ..Default::default()
        }
    }

    pub fn grid(&self, k: usize) -> Result<Arc<SimplexGrid>> {
        Ok(Arc::new(SimplexGrid::new(
            k,
            self.resolution.unwrap_or_else(|| default_resolution(k)),
        )?))
    }

    fn options(&self) -> SolverOptions {
        SolverOptions {
            eps_stop: self.eps_stop,
            max_iter: self.max_iter,
        }
    }
}

/// Solves at one discount factor with the given settings.
pub fn solve(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
    settings: &SolveSettings,
) -> Result<Solution> {
    solve_discounted_value(
        instance,
        m,
        delta,
        settings.grid(instance.k())?,
        settings.options(),
    )
}

pub(crate) fn solve_all(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    deltas: &[f64],
    settings: &SolveSettings,
) -> Result<Vec<Solution>> {
    let grid = settings.grid(instance.k())?;
    deltas
        .par_iter()
        .map(|&d| solve_discounted_value(instance, m, d, grid.clone(), settings.options()))
        .collect()
}

/// Solver plus grid error: `eps_stop` and the interpolation estimate.
pub fn combined_error(sol: &Solution, eps_stop: f64) -> f64 {
    eps_stop + sol.value.interpolation_error_estimate()
}

fn check_sorted(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::param("deltas", "empty list"));
    }
    for &d in deltas {
        if !(0.0..1.0).contains(&d) {
            return Err(Error::param("deltas", format!("{d} is outside [0, 1)")));
        }
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("deltas", "must be strictly increasing"));
    }
    Ok(())
}

fn require_irreducible(m: &StochasticMatrix) -> Result<()> {
    if !m.classification().irreducible {
        return Err(Error::NotIrreducible);
    }
    Ok(())
}

fn require_ergodic(m: &StochasticMatrix) -> Result<()> {
    let c = m.classification();
    if !c.ergodic() {
        return Err(Error::NotErgodic {
            irreducible: c.irreducible,
            period: c.period,
        });
    }
    Ok(())
}

/// `Phi(delta) = v(pi)`.
pub fn phi_of(v: &GridValueFunction, pi: &Belief) -> Result<f64> {
    v.eval(pi.as_slice())
}

/// `Psi(delta) = sum_l pi_l v(e_l)`.
pub fn psi_of(v: &GridValueFunction, pi: &Belief) -> f64 {
    let g = v.grid();
    pi.as_slice()
        .iter()
        .enumerate()
        .map(|(l, p)| p * v.values()[g.vertex(l)])
        .sum()
}

fn non_increasing(xs: &[f64], tol: f64) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + tol)
}

fn non_decreasing(xs: &[f64], tol: f64) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0] - tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport {
    pub deltas: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub monotone_phi: bool,
    pub monotone_psi: bool,
    /// `2 * (eps_stop + grid error)`, the slack for every comparison.
    pub tolerance: f64,
}

impl TrajectoryReport {
    /// Builds a report from raw trajectories, computing the flags.
    pub fn from_parts(deltas: Vec<f64>, phi: Vec<f64>, psi: Vec<f64>, tolerance: f64) -> Self {
        let monotone_phi = non_increasing(&phi, tolerance);
        let monotone_psi = non_decreasing(&psi, tolerance);
        TrajectoryReport {
            deltas,
            phi,
            psi,
            monotone_phi,
            monotone_psi,
            tolerance,
        }
    }

    /// `Phi >= Psi - tolerance` at every delta.
    pub fn phi_dominates_psi(&self) -> bool {
        self.phi
            .iter()
            .zip(&self.psi)
            .all(|(f, s)| *f >= s - self.tolerance)
    }

    /// Smallest increment of `Psi` between consecutive deltas.
    pub fn min_psi_increment(&self) -> f64 {
        self.psi
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves at every delta and collects `Phi` and `Psi`.
pub fn phi_psi(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    deltas: &[f64],
    settings: &SolveSettings,
) -> Result<TrajectoryReport> {
    check_sorted(deltas)?;
    require_irreducible(m)?;
    let pi = invariant_distribution(m);
    let sols = solve_all(instance, m, deltas, settings)?;
    report_from_solutions(deltas, &sols, &pi, settings.eps_stop)
}

pub(crate) fn report_from_solutions(
    deltas: &[f64],
    sols: &[Solution],
    pi: &Belief,
    eps_stop: f64,
) -> Result<TrajectoryReport> {
    let mut phi = Vec::with_capacity(sols.len());
    let mut psi = Vec::with_capacity(sols.len());
    let mut err: f64 = 0.0;
    for s in sols {
        phi.push(phi_of(&s.value, pi)?);
        psi.push(psi_of(&s.value, pi));
        err = err.max(combined_error(s, eps_stop));
    }
    Ok(TrajectoryReport::from_parts(
        deltas.to_vec(),
        phi,
        psi,
        2.0 * err,
    ))
}

/// If `Phi` and `Psi` touch at some `delta_0`, both must be constant on the
/// deltas from `delta_0` on. Vacuously true when they never touch.
pub fn corollary1_check(report: &TrajectoryReport) -> bool {
    let tol = report.tolerance;
    let Some(i0) = report
        .phi
        .iter()
        .zip(&report.psi)
        .position(|(f, s)| (f - s).abs() <= tol)
    else {
        return true;
    };
    let flat = |xs: &[f64]| xs.iter().all(|x| (x - xs[0]).abs() <= tol);
    flat(&report.phi[i0..]) && flat(&report.psi[i0..])
}

/// Enclosure of the asymptotic value from one discount factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimate {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub delta_used: f64,
    /// Solver plus grid error of the bracketing solve.
    pub error: f64,
}

impl AsymptoticEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn bracket_from(sol: &Solution, pi: &Belief, eps_stop: f64) -> Result<AsymptoticEstimate> {
    let upper = phi_of(&sol.value, pi)?;
    let lower = psi_of(&sol.value, pi);
    Ok(AsymptoticEstimate {
        lower,
        upper,
        estimate: 0.5 * (lower + upper),
        delta_used: sol.delta,
        error: combined_error(sol, eps_stop),
    })
}

/// `[Psi(delta*), Phi(delta*)]` with its midpoint as the estimate.
pub fn asymptotic_bracket(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta_star: f64,
    settings: &SolveSettings,
) -> Result<AsymptoticEstimate> {
    require_ergodic(m)?;
    let sol = solve(instance, m, delta_star, settings)?;
    bracket_from(&sol, &invariant_distribution(m), settings.eps_stop)
}

/// Outcome of a bound check: the largest excess over the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub max_violation: f64,
    pub tolerance: f64,
}

impl LemmaCheck {
    pub fn pass(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

/// `max |v(xi) - v(xi M^n)| - n (1 - delta) ||u|| / delta` over the grid,
/// for `n = steps`.
pub fn shift_bound_violation(
    v: &GridValueFunction,
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
    steps: usize,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", "shift bound needs delta in (0, 1)"));
    }
    let g = v.grid();
    let bound = steps as f64 * (1.0 - delta) * instance.u_sup(g)? / delta;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..g.len() {
        let mut x = g.point(i).to_vec();
        for _ in 0..steps {
            x = m.apply(&x);
        }
        worst = worst.max((v.values()[i] - v.eval(&x)?).abs() - bound);
    }
    Ok(worst)
}

/// Solves at `delta` and checks the one-step shift bound.
pub fn shift_bound_check(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
    settings: &SolveSettings,
) -> Result<LemmaCheck> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", "shift bound needs delta in (0, 1)"));
    }
    let sol = solve(instance, m, delta, settings)?;
    Ok(LemmaCheck {
        max_violation: shift_bound_violation(&sol.value, instance, m, delta, 1)?,
        tolerance: 2.0 * combined_error(&sol, settings.eps_stop),
    })
}

/// Lipschitz excess `|v(xi) - v(p)| - (2||u||/c*) |xi - p|_1` over grid pairs
/// in the l1 ball of radius `c*/2` around `pi`.
pub fn lipschitz_violation(
    v: &GridValueFunction,
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
) -> Result<f64> {
    require_ergodic(m)?;
    let pi = invariant_distribution(m);
    let c_star = pi.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
    let g = v.grid();
    let ball: Vec<usize> = (0..g.len())
        .filter(|&i| l1(g.point(i), pi.as_slice()) <= 0.5 * c_star)
        .collect();
    if ball.len() < 2 {
        return Err(Error::param(
            "resolution",
            format!(
                "ball around pi holds {} grid point(s); refine the grid",
                ball.len()
            ),
        ));
    }
    let lip = 2.0 * instance.u_sup(g)? / c_star;
    let vals = v.values();
    let worst = ball
        .par_iter()
        .map(|&a| {
            ball.iter()
                .filter(|&&b| b > a)
                .map(|&b| (vals[a] - vals[b]).abs() - lip * l1(g.point(a), g.point(b)))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(worst)
}

pub fn lipschitz_near_pi_check(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
    settings: &SolveSettings,
) -> Result<LemmaCheck> {
    require_ergodic(m)?;
    let sol = solve(instance, m, delta, settings)?;
    Ok(LemmaCheck {
        max_violation: lipschitz_violation(&sol.value, instance, m)?,
        tolerance: 2.0 * combined_error(&sol, settings.eps_stop),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub delta: f64,
    pub supgap: f64,
    pub bound_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
    pub bracket: AsymptoticEstimate,
}

impl RateReport {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.bound_ratio).fold(0.0, f64::max)
    }

    pub fn median_ratio(&self) -> f64 {
        let mut r: Vec<f64> = self.rows.iter().map(|r| r.bound_ratio).collect();
        r.sort_by(f64::total_cmp);
        let n = r.len();
        if n == 0 {
            0.0
        } else if n % 2 == 1 {
            r[n / 2]
        } else {
            0.5 * (r[n / 2 - 1] + r[n / 2])
        }
    }

    /// Bounded ratio: the largest is at most three times the median.
    pub fn pass(&self) -> bool {
        self.max_ratio() <= 3.0 * self.median_ratio()
    }
}

/// Threshold `1 - c*/2` above which the rate bound applies.
pub fn rate_threshold(m: &StochasticMatrix) -> f64 {
    1.0 - 0.5 * m.min_invariant_mass()
}

/// Default bracketing discount: halfway from the largest delta to 1.
pub fn default_bracket_delta(deltas: &[f64]) -> f64 {
    let top = deltas.iter().cloned().fold(0.0, f64::max);
    1.0 - 0.5 * (1.0 - top)
}

pub fn rate_check(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    deltas: &[f64],
    delta_star: Option<f64>,
    settings: &SolveSettings,
) -> Result<RateReport> {
    require_ergodic(m)?;
    check_sorted(deltas)?;
    let thr = rate_threshold(m);
    if let Some(&d) = deltas.iter().find(|&&d| d <= thr) {
        return Err(Error::param(
            "deltas",
            format!("{d} is not above the rate threshold 1 - c*/2 = {thr}"),
        ));
    }
    let star = delta_star.unwrap_or_else(|| default_bracket_delta(deltas));
    let mut all = deltas.to_vec();
    all.push(star);
    let sols = solve_all(instance, m, &all, settings)?;
    let pi = invariant_distribution(m);
    let bracket = bracket_from(&sols[deltas.len()], &pi, settings.eps_stop)?;
    let rows = deltas
        .iter()
        .zip(&sols)
        .map(|(&d, s)| {
            let supgap = s
                .value
                .values()
                .iter()
                .map(|v| (v - bracket.estimate).abs())
                .fold(0.0, f64::max);
            let scale = (1.0 - d) * (1.0 / (1.0 - d)).log2();
            RateRow {
                delta: d,
                supgap,
                bound_ratio: supgap / scale,
            }
        })
        .collect();
    Ok(RateReport { rows, bracket })
}

/// Weights `gamma` with `pi = sum_i gamma_i xi_i` after checking that the
/// `xi_i` are affinely independent and that every row of `M` lies in their
/// convex hull.
pub fn theorem2_weights(m: &StochasticMatrix, xis: &[Belief]) -> Result<Vec<f64>> {
    let k = m.k();
    if xis.len() != k || xis.iter().any(|x| x.k() != k) {
        return Err(Error::param(
            "xis",
            format!("need exactly {k} beliefs on {k} states"),
        ));
    }
    // columns are the xi_i; beliefs sum to one, so affine and linear
    // independence coincide
    let mut a = vec![0.0; k * k];
    for (i, x) in xis.iter().enumerate() {
        for (r, p) in x.as_slice().iter().enumerate() {
            a[r * k + i] = *p;
        }
    }
    let inv = invert(k, &a).ok_or_else(|| Error::param("xis", "beliefs are affinely dependent"))?;
    let coords = |y: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|i| (0..k).map(|r| inv[i * k + r] * y[r]).sum())
            .collect()
    };
    for l in 0..k {
        let lam = coords(m.row(l));
        if lam.iter().any(|&x| x < -1e-10) {
            return Err(Error::param(
                "xis",
                format!("row {l} of M lies outside the hull of the beliefs"),
            ));
        }
    }
    Ok(coords(invariant_distribution(m).as_slice()))
}

/// `xi_i = (1 - t) e_i + t pi` with `t` half the largest value keeping every
/// row of `M` inside the hull.
pub fn shrunk_dirac_family(m: &StochasticMatrix) -> Vec<Belief> {
    let k = m.k();
    let pi = invariant_distribution(m);
    let mut t = f64::INFINITY;
    for l in 0..k {
        for (j, p) in pi.as_slice().iter().enumerate() {
            if *p > 0.0 {
                t = t.min(m.get(l, j) / p);
            }
        }
    }
    let t = 0.5 * t.min(1.0);
    (0..k)
        .map(|i| {
            let w = pi
                .as_slice()
                .iter()
                .enumerate()
                .map(|(j, p)| t * p + if i == j { 1.0 - t } else { 0.0 })
                .collect();
            Belief::from_raw(w)
        })
        .collect()
}

/// `sum_i gamma_i v(xi_i)` across deltas, with its monotonicity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTrajectory {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub gamma: Vec<f64>,
    pub tolerance: f64,
    pub non_decreasing: bool,
}

pub fn weighted_trajectory_from(
    deltas: &[f64],
    sols: &[Solution],
    m: &StochasticMatrix,
    xis: &[Belief],
    eps_stop: f64,
) -> Result<WeightedTrajectory> {
    let gamma = theorem2_weights(m, xis)?;
    let mut values = Vec::with_capacity(sols.len());
    let mut err: f64 = 0.0;
    for s in sols {
        let mut acc = 0.0;
        for (g, x) in gamma.iter().zip(xis) {
            acc += g * s.value.eval(x.as_slice())?;
        }
        values.push(acc);
        err = err.max(combined_error(s, eps_stop));
    }
    let tolerance = 2.0 * err;
    Ok(WeightedTrajectory {
        deltas: deltas.to_vec(),
        non_decreasing: non_decreasing(&values, tolerance),
        values,
        gamma,
        tolerance,
    })
}

pub fn weighted_trajectory(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    deltas: &[f64],
    xis: &[Belief],
    settings: &SolveSettings,
) -> Result<WeightedTrajectory> {
    check_sorted(deltas)?;
    require_irreducible(m)?;
    theorem2_weights(m, xis)?;
    let sols = solve_all(instance, m, deltas, settings)?;
    weighted_trajectory_from(deltas, &sols, m, xis, settings.eps_stop)
}

/// One CSV row; absent quantities are written as empty fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryRow {
    pub delta: f64,
    pub phi: f64,
    pub psi: f64,
    pub bracket_lower: Option<f64>,
    pub bracket_upper: Option<f64>,
    pub supgap: Option<f64>,
    pub bound_ratio: Option<f64>,
}

pub const TRAJECTORY_HEADER: &str = "delta,phi,psi,bracket_lower,bracket_upper,supgap,bound_ratio";

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

impl TrajectoryRow {
    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.delta,
            self.phi,
            self.psi,
            opt(self.bracket_lower),
            opt(self.bracket_upper),
            opt(self.supgap),
            opt(self.bound_ratio)
        )
    }
}

/// Merges a trajectory report with an optional rate report into CSV rows.
pub fn trajectory_rows(report: &TrajectoryReport, rate: Option<&RateReport>) -> Vec<TrajectoryRow> {
    report
        .deltas
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let r = rate.and_then(|r| r.rows.iter().find(|x| x.delta == d));
            TrajectoryRow {
                delta: d,
                phi: report.phi[i],
                psi: report.psi[i],
                bracket_lower: Some(report.psi[i]),
                bracket_upper: Some(report.phi[i]),
                supgap: r.map(|x| x.supgap),
                bound_ratio: r.map(|x| x.bound_ratio),
            }
        })
        .collect()
}

pub fn write_trajectory_csv(mut w: impl Write, rows: &[TrajectoryRow]) -> Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_fields())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn coarse() -> SolveSettings {
        SolveSettings::with_resolution(400)
    }

    #[test]
    fn constant_instance_is_flat() {
        let inst = PersuasionInstance::constant(2, 0.6).unwrap();
        let (_, m) = instances::appendix_a();
        let r = phi_psi(&inst, &m, &[0.0, 0.5, 0.9], &coarse()).unwrap();
        assert!(r.phi.iter().chain(&r.psi).all(|x| (x - 0.6).abs() < 1e-5));
        assert!(r.monotone_phi && r.monotone_psi);
        assert!(corollary1_check(&r));
        let b = asymptotic_bracket(&inst, &m, 0.9, &coarse()).unwrap();
        assert!(b.width().abs() < 1e-5 && (b.estimate - 0.6).abs() < 1e-5);
        let rate = rate_check(&inst, &m, &[0.9, 0.95], None, &coarse()).unwrap();
        assert!(rate.rows.iter().all(|r| r.supgap < 1e-5));
    }

    #[test]
    fn corollary_negative_control() {
        let r = TrajectoryReport::from_parts(
            vec![0.0, 0.5, 0.9],
            vec![0.5, 0.5, 0.6],
            vec![0.5, 0.5, 0.4],
            1e-6,
        );
        assert!(!corollary1_check(&r));
        let r = TrajectoryReport::from_parts(vec![0.0, 0.5], vec![0.3, 0.3], vec![0.0, 0.0], 1e-6);
        assert!(corollary1_check(&r));
    }

    #[test]
    fn appendix_static_bracket() {
        let (inst, m) = instances::appendix_a();
        let b = asymptotic_bracket(&inst, &m, 0.0, &SolveSettings::default()).unwrap();
        assert!((b.lower - 0.125).abs() < 1e-9);
        assert!((b.upper - 0.5125).abs() < 1e-9);
    }

    #[test]
    fn preconditions() {
        let (inst, m) = instances::periodic();
        assert!(matches!(
            rate_check(&inst, &m, &[0.9, 0.95], None, &coarse()),
            Err(Error::NotErgodic { .. })
        ));
        let (inst, m) = instances::appendix_a();
        assert!(rate_check(&inst, &m, &[0.8, 0.95], None, &coarse()).is_err());
        assert!(shift_bound_check(&inst, &m, 0.0, &coarse()).is_err());
        assert!(phi_psi(&inst, &m, &[0.5, 1.0], &coarse()).is_err());
        let tiny = SolveSettings::with_resolution(2);
        assert!(lipschitz_near_pi_check(&inst, &m, 0.5, &tiny).is_err());
        let id = StochasticMatrix::identity(2);
        assert!(phi_psi(&inst, &id, &[0.5], &coarse()).is_err());
    }

    #[test]
    fn family_weights() {
        let (_, m) = instances::appendix_a();
        let xis = shrunk_dirac_family(&m);
        let g = theorem2_weights(&m, &xis).unwrap();
        assert!((g[0] - 0.25).abs() < 1e-12 && (g[1] - 0.75).abs() < 1e-12);
        let bad = vec![Belief::binary(0.4).unwrap(), Belief::binary(0.6).unwrap()];
        assert!(theorem2_weights(&m, &bad).is_err());
        let same = vec![Belief::binary(0.4).unwrap(), Belief::binary(0.4).unwrap()];
        assert!(theorem2_weights(&m, &same).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = TrajectoryReport::from_parts(vec![0.5], vec![0.25], vec![0.0], 1e-3);
        let mut out = Vec::new();
        write_trajectory_csv(&mut out, &trajectory_rows(&r, None)).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s, format!("{TRAJECTORY_HEADER}\n0.5,0.25,0,0,0.25,,\n"));
    }
}
