//! Zero-sum Markov chain games with one informed player: non-revealing
//! values, the belief recursion and discounted value surfaces.

mod lp;
mod sorin;

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

pub use lp::{matrix_game_value, GameSolution};
pub use sorin::{sorin_f, sorin_identity_check, SorinCheck, Truncated};

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;
use crate::markov::{invariant_distribution, Belief, StochasticMatrix};
use crate::persuasion::{concave_envelope, ConcaveEnvelope, GridValueFunction};
use crate::trajectories::{
    phi_of, psi_of, AsymptoticEstimate, RateReport, RateRow, TrajectoryReport,
};

/// Stage games `G^1, ..., G^k` with non-negative entries and equal shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGameFamily {
    payoff: Vec<Vec<Vec<f64>>>,
}

impl MatrixGameFamily {
    pub fn new(payoff: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if payoff.is_empty() {
            return Err(Error::InvalidInstance("game family has no states".into()));
        }
        let rows = payoff[0].len();
        let cols = payoff[0].first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInstance("empty stage game".into()));
        }
        for (l, g) in payoff.iter().enumerate() {
            if g.len() != rows || g.iter().any(|r| r.len() != cols) {
                return Err(Error::InvalidInstance(format!(
                    "game {l} is not {rows}x{cols} like game 0"
                )));
            }
            if g.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInstance(format!(
                    "game {l} has a negative or non-finite entry"
                )));
            }
        }
        Ok(MatrixGameFamily { payoff })
    }

    /// Every game constant at `c`.
    pub fn constant(k: usize, rows: usize, cols: usize, c: f64) -> Result<Self> {
        Self::new(vec![vec![vec![c; cols]; rows]; k])
    }

    pub fn k(&self) -> usize {
        self.payoff.len()
    }

    pub fn rows(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0][0].len()
    }

    pub fn game(&self, l: usize) -> &[Vec<f64>] {
        &self.payoff[l]
    }

    pub fn sup_norm(&self) -> f64 {
        self.payoff
            .iter()
            .flatten()
            .flatten()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// `sum_l xi_l G^l`.
    pub fn average(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols()]; self.rows()];
        for (g, &w) in self.payoff.iter().zip(xi) {
            for (o, r) in out.iter_mut().zip(g) {
                o.iter_mut().zip(r).for_each(|(a, b)| *a += w * b);
            }
        }
        out
    }

    fn check(&self, xi: &Belief) -> Result<()> {
        if xi.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: xi.k(),
            });
        }
        Ok(())
    }
}

/// One mixed action per state.
#[derive(Debug, Clone, PartialEq)]
pub struct StageStrategy {
    rows: Vec<Vec<f64>>,
}

impl StageStrategy {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.is_empty() || n == 0 {
            return Err(Error::param("strategy", "empty"));
        }
        for (l, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::param(
                    "strategy",
                    format!("row {l} has the wrong length"),
                ));
            }
            if r.iter().any(|x| !(*x >= 0.0)) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::param(
                    "strategy",
                    format!("row {l} is not a distribution"),
                ));
            }
        }
        Ok(StageStrategy { rows })
    }

    /// The same mixed action in all `k` states.
    pub fn state_independent(row: Vec<f64>, k: usize) -> Result<Self> {
        Self::new(vec![row; k])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `chi(xi)[i] = sum_l xi_l chi^l[i]`.
    pub fn action_probability(&self, xi: &[f64], i: usize) -> f64 {
        self.rows.iter().zip(xi).map(|(r, w)| w * r[i]).sum()
    }
}

/// Value of the average game `sum_l xi_l G^l`.
pub fn nonrevealing_value(games: &MatrixGameFamily, xi: &Belief) -> Result<f64> {
    games.check(xi)?;
    Ok(matrix_game_value(&games.average(xi.as_slice()))?.value)
}

/// Bayes posterior after action `i`, with its total probability. Actions of
/// probability at most `1e-12` leave the belief unchanged.
pub fn posterior_after_action(xi: &Belief, chi: &StageStrategy, i: usize) -> (Belief, f64) {
    let p = chi.action_probability(xi.as_slice(), i);
    if p <= 1e-12 {
        return (xi.clone(), 0.0);
    }
    let post: Vec<f64> = xi
        .as_slice()
        .iter()
        .zip(&chi.rows)
        .map(|(w, r)| w * r[i] / p)
        .collect();
    (Belief::new(post).unwrap_or_else(|_| xi.clone()), p)
}

fn reward(games: &MatrixGameFamily, xi: &[f64], chi: &[Vec<f64>]) -> f64 {
    (0..games.cols())
        .map(|j| {
            let mut s = 0.0;
            for (l, (&w, row)) in xi.iter().zip(chi).enumerate() {
                if w == 0.0 {
                    continue;
                }
                let g = &games.payoff[l];
                s += w * row.iter().zip(g).map(|(p, r)| p * r[j]).sum::<f64>();
            }
            s
        })
        .fold(f64::INFINITY, f64::min)
}

/// `r(xi, chi) = min_j sum_l xi_l sum_i chi^l[i] G^l(i, j)`.
pub fn stage_reward(games: &MatrixGameFamily, xi: &Belief, chi: &StageStrategy) -> Result<f64> {
    games.check(xi)?;
    if chi.rows.len() != games.k() || chi.rows[0].len() != games.rows() {
        return Err(Error::param(
            "strategy",
            "shape does not match the game family",
        ));
    }
    Ok(reward(games, xi.as_slice(), &chi.rows))
}

/// Default strategy lattice resolution per simplex axis.
pub const DEFAULT_STRATEGY_RES: usize = 20;
/// Step-halving rounds of local refinement after the lattice search.
pub const DEFAULT_REFINE_ROUNDS: usize = 5;
/// Largest strategy product searched exhaustively; beyond it the lattice is
/// searched one state at a time.
pub const EXHAUSTIVE_CAP: usize = 50_000;

/// Belief grid resolution for game surfaces.
pub fn default_game_resolution(k: usize) -> usize {
    match k {
        2 => 200,
        3 => 20,
        _ => 8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSolveOptions {
    pub grid_res: Option<usize>,
    pub strategy_res: usize,
    pub refine_rounds: usize,
    pub eps_stop: f64,
    pub max_iter: usize,
}

impl Default for GameSolveOptions {
    fn default() -> Self {
        GameSolveOptions {
            grid_res: None,
            strategy_res: DEFAULT_STRATEGY_RES,
            refine_rounds: DEFAULT_REFINE_ROUNDS,
            eps_stop: crate::persuasion::DEFAULT_EPS_STOP,
            max_iter: 100_000,
        }
    }
}

impl GameSolveOptions {
    pub fn grid(&self, k: usize) -> Result<Arc<SimplexGrid>> {
        let m = self.grid_res.unwrap_or_else(|| default_game_resolution(k));
        Ok(Arc::new(SimplexGrid::new(k, m)?))
    }

    /// Finest step of the strategy search.
    pub fn final_step(&self) -> f64 {
        1.0 / (self.strategy_res as f64 * 2f64.powi(self.refine_rounds as i32))
    }
}

/// Discounted value of the game on the belief grid.
#[derive(Debug, Clone)]
pub struct GameValueSurface {
    pub value: GridValueFunction,
    pub delta: f64,
    pub iterations: usize,
    pub last_gap: f64,
    /// Grid points where refinement moved further than one lattice step in
    /// the final iteration, a sign the lattice is too coarse.
    pub coarse_points: usize,
    /// Solver error plus the strategy search error `k ||G|| step`.
    pub tolerance: f64,
}

impl GameValueSurface {
    pub fn grid(&self) -> &Arc<SimplexGrid> {
        self.value.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.value.values()
    }
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(left - a, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, parts, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|c| c.into_iter().map(|a| a as f64 / n as f64).collect())
        .collect()
}

struct GameModel<'a> {
    games: &'a MatrixGameFamily,
    m: &'a StochasticMatrix,
    delta: f64,
    lattice: Vec<Vec<f64>>,
    opts: GameSolveOptions,
}

struct PointResult {
    value: f64,
    coarse: bool,
}

impl GameModel<'_> {
    fn objective(&self, xi: &[f64], chi: &[Vec<f64>], v: &GridValueFunction) -> Result<f64> {
        let r = reward(self.games, xi, chi);
        if self.delta == 0.0 {
            return Ok(r);
        }
        let mut cont = 0.0;
        let mut post = vec![0.0; xi.len()];
        for i in 0..self.games.rows() {
            let p: f64 = xi.iter().zip(chi).map(|(w, row)| w * row[i]).sum();
            if p <= 1e-12 {
                continue;
            }
            for ((q, w), row) in post.iter_mut().zip(xi).zip(chi) {
                *q = w * row[i] / p;
            }
            cont += p * v.eval(&self.m.apply(&post))?;
        }
        Ok((1.0 - self.delta) * r + self.delta * cont)
    }

    fn best_at(&self, xi: &[f64], v: &GridValueFunction) -> Result<PointResult> {
        let k = self.games.k();
        let n = self.lattice.len();
        let mut chi = vec![self.lattice[0].clone(); k];
        let mut best = f64::NEG_INFINITY;
        let product = (n as f64).powi(k as i32);
        if product <= EXHAUSTIVE_CAP as f64 {
            let mut idx = vec![0usize; k];
            loop {
                let cand: Vec<Vec<f64>> = idx.iter().map(|&i| self.lattice[i].clone()).collect();
                let f = self.objective(xi, &cand, v)?;
                if f > best {
                    best = f;
                    chi = cand;
                }
                let mut d = 0;
                while d < k {
                    idx[d] += 1;
                    if idx[d] < n {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == k {
                    break;
                }
            }
        } else {
            for row in &self.lattice {
                let cand = vec![row.clone(); k];
                let f = self.objective(xi, &cand, v)?;
                if f > best {
                    best = f;
                    chi = cand;
                }
            }
            for _sweep in 0..20 {
                let mut improved = false;
                for l in 0..k {
                    for row in &self.lattice {
                        let mut cand = chi.clone();
                        cand[l] = row.clone();
                        let f = self.objective(xi, &cand, v)?;
                        if f > best + 1e-15 {
                            best = f;
                            chi = cand;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        let anchor = chi.clone();
        let acts = self.games.rows();
        let mut h = 1.0 / self.opts.strategy_res as f64;
        for _ in 0..self.opts.refine_rounds {
            h *= 0.5;
            for _ in 0..100 {
                let mut step: Option<(Vec<Vec<f64>>, f64)> = None;
                for l in 0..k {
                    for a in 0..acts {
                        if chi[l][a] < h - 1e-15 {
                            continue;
                        }
                        for b in 0..acts {
                            if a == b {
                                continue;
                            }
                            let mut cand = chi.clone();
                            cand[l][a] = (cand[l][a] - h).max(0.0);
                            cand[l][b] += h;
                            let f = self.objective(xi, &cand, v)?;
                            if f > step.as_ref().map_or(best, |s| s.1) + 1e-15 {
                                step = Some((cand, f));
                            }
                        }
                    }
                }
                match step {
                    Some((c, f)) => {
                        chi = c;
                        best = f;
                    }
                    None => break,
                }
            }
        }
        let moved = chi
            .iter()
            .zip(&anchor)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        Ok(PointResult {
            value: best,
            coarse: moved > 1.0 / self.opts.strategy_res as f64 + 1e-12,
        })
    }

    fn step(&self, v: &GridValueFunction) -> Result<(GridValueFunction, usize)> {
        let grid = v.grid().clone();
        if grid.k() > 2 {
            v.hull()?;
        }
        let pts: Vec<PointResult> = (0..grid.len())
            .into_par_iter()
            .map(|i| self.best_at(grid.point(i), v))
            .collect::<Result<_>>()?;
        let coarse = pts.iter().filter(|p| p.coarse).count();
        let vals = pts.into_iter().map(|p| p.value).collect();
        // concave interpolation between grid points
        let env = ConcaveEnvelope::build(grid, vals)?;
        Ok((GridValueFunction::from_envelope(env), coarse))
    }
}

/// One application of the game Bellman operator
/// `sup_chi (1 - delta) r(xi, chi) + delta sum_i chi(xi)[i] V(xi(chi, i) M)`.
pub fn game_bellman_step(
    v: &GridValueFunction,
    games: &MatrixGameFamily,
    m: &StochasticMatrix,
    delta: f64,
    opts: &GameSolveOptions,
) -> Result<GridValueFunction> {
    Ok(model(games, m, delta, opts)?.step(v)?.0)
}

fn model<'a>(
    games: &'a MatrixGameFamily,
    m: &'a StochasticMatrix,
    delta: f64,
    opts: &GameSolveOptions,
) -> Result<GameModel<'a>> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::param("delta", format!("{delta} is outside [0, 1)")));
    }
    if m.k() != games.k() {
        return Err(Error::DimensionMismatch {
            expected: games.k(),
            got: m.k(),
        });
    }
    if opts.strategy_res == 0 {
        return Err(Error::param("strategy_res", "must be positive"));
    }
    Ok(GameModel {
        games,
        m,
        delta,
        lattice: compositions(opts.strategy_res, games.rows()),
        opts: *opts,
    })
}

/// Value iteration from `V = 0`, keeping the pointwise maximum of the old
/// and new iterate. The search only approximates the sup from below, so
/// the iterates rise monotonically under `V_delta` and converge; the plain
/// recursion can cycle on search noise. Stops when the sup-norm change is at
/// most `eps_stop (1 - delta)`.
pub fn solve_game_value(
    games: &MatrixGameFamily,
    m: &StochasticMatrix,
    delta: f64,
    opts: &GameSolveOptions,
) -> Result<GameValueSurface> {
    if !(opts.eps_stop > 0.0) {
        return Err(Error::param("eps_stop", "must be positive"));
    }
    let model = model(games, m, delta, opts)?;
    let grid = opts.grid(games.k())?;
    let search = games.k() as f64 * games.sup_norm() * opts.final_step();
    let mut v = GridValueFunction::constant(grid.clone(), 0.0);
    for it in 1..=opts.max_iter {
        let (next, coarse) = model.step(&v)?;
        let lifted: Vec<f64> = next
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| a.max(*b))
            .collect();
        let next = GridValueFunction::from_envelope(ConcaveEnvelope::build(grid.clone(), lifted)?);
        let gap = next.sup_distance(&v);
        v = next;
        if delta == 0.0 || gap <= opts.eps_stop * (1.0 - delta) {
            let tolerance = opts.eps_stop + v.interpolation_error_estimate() + search;
            return Ok(GameValueSurface {
                value: v,
                delta,
                iterations: it,
                last_gap: gap,
                coarse_points: coarse,
                tolerance,
            });
        }
    }
    Err(Error::IterationCap {
        cap: opts.max_iter,
        context: format!("game value iteration at delta = {delta}"),
    })
}

/// `Cav U` on the grid: the concave envelope of non-revealing values.
pub fn cav_u(games: &MatrixGameFamily, grid: Arc<SimplexGrid>) -> Result<GridValueFunction> {
    let u: Vec<f64> = (0..grid.len())
        .map(|i| Ok(matrix_game_value(&games.average(grid.point(i)))?.value))
        .collect::<Result<_>>()?;
    concave_envelope(&GridValueFunction::new(grid, u)?)
}

/// Trajectories of `Phi_V(delta) = V(pi)` and `Psi_V = sum_l pi_l V(e_l)`.
#[derive(Debug, Clone)]
pub struct GameTrajectoryReport {
    pub report: TrajectoryReport,
    pub bracket: AsymptoticEstimate,
    /// Present when the chain is ergodic and every delta is above `1 - c*/2`.
    pub rate: Option<RateReport>,
    pub coarse_points: usize,
}

pub fn game_trajectories(
    games: &MatrixGameFamily,
    m: &StochasticMatrix,
    deltas: &[f64],
    opts: &GameSolveOptions,
) -> Result<GameTrajectoryReport> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "deltas",
            "must be non-empty and strictly increasing",
        ));
    }
    let class = m.classification();
    if !class.irreducible {
        return Err(Error::NotIrreducible);
    }
    let pi = invariant_distribution(m);
    let surfaces: Vec<GameValueSurface> = deltas
        .par_iter()
        .map(|&d| solve_game_value(games, m, d, opts))
        .collect::<Result<_>>()?;
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    let mut tol: f64 = 0.0;
    for s in &surfaces {
        phi.push(phi_of(&s.value, &pi)?);
        psi.push(psi_of(&s.value, &pi));
        tol = tol.max(2.0 * s.tolerance);
    }
    let last = surfaces.len() - 1;
    let bracket = AsymptoticEstimate {
        lower: psi[last],
        upper: phi[last],
        estimate: 0.5 * (psi[last] + phi[last]),
        delta_used: deltas[last],
        error: surfaces[last].tolerance,
    };
    let thr = crate::trajectories::rate_threshold(m);
    let rate = (class.ergodic() && deltas.iter().all(|&d| d > thr)).then(|| RateReport {
        rows: deltas
            .iter()
            .zip(&surfaces)
            .map(|(&d, s)| {
                let supgap = s
                    .values()
                    .iter()
                    .map(|v| (v - bracket.estimate).abs())
                    .fold(0.0, f64::max);
                RateRow {
                    delta: d,
                    supgap,
                    bound_ratio: supgap / ((1.0 - d) * (1.0 / (1.0 - d)).log2()),
                }
            })
            .collect(),
        bracket,
    });
    Ok(GameTrajectoryReport {
        report: TrajectoryReport::from_parts(deltas.to_vec(), phi, psi, tol),
        bracket,
        rate,
        coarse_points: surfaces.iter().map(|s| s.coarse_points).sum(),
    })
}

pub const GAME_HEADER: &str = "model,delta,phi,psi,bracket_lower,bracket_upper,supgap,bound_ratio";

pub fn write_game_csv(mut w: impl Write, r: &GameTrajectoryReport) -> Result<()> {
    writeln!(w, "{GAME_HEADER}")?;
    let rows = crate::trajectories::trajectory_rows(&r.report, r.rate.as_ref());
    for row in rows {
        writeln!(w, "mcgame,{}", row.csv_fields())?;
    }
    Ok(())
}
