use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;
use crate::markov::StochasticMatrix;
use crate::persuasion::envelope::ConcaveEnvelope;
use crate::persuasion::value::GridValueFunction;
use crate::persuasion::PersuasionInstance;

pub const DEFAULT_EPS_STOP: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub eps_stop: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            eps_stop: DEFAULT_EPS_STOP,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Output of [`solve_discounted_value`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub value: GridValueFunction,
    pub iterations: usize,
    /// Sup-norm change in the final iteration.
    pub last_gap: f64,
    /// Bound on the distance to the grid fixed point, `delta/(1-delta) * gap`.
    pub error_bound: f64,
    pub delta: f64,
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::param("delta", format!("{delta} is outside [0, 1)")));
    }
    Ok(())
}

/// Precomputed pieces of the Bellman operator on one grid.
pub(crate) struct BellmanModel {
    grid: Arc<SimplexGrid>,
    u: Vec<f64>,
    pushed: Vec<Vec<f64>>,
    delta: f64,
}

impl BellmanModel {
    pub(crate) fn new(
        grid: Arc<SimplexGrid>,
        instance: &PersuasionInstance,
        m: &StochasticMatrix,
        delta: f64,
    ) -> Result<Self> {
        check_delta(delta)?;
        for got in [instance.k(), m.k()] {
            if got != grid.k() {
                return Err(Error::DimensionMismatch {
                    expected: grid.k(),
                    got,
                });
            }
        }
        let u = instance.sample_u(&grid)?;
        let pushed = (0..grid.len()).map(|i| m.apply(grid.point(i))).collect();
        Ok(BellmanModel {
            grid,
            u,
            pushed,
            delta,
        })
    }

    /// `f(xi) = (1 - delta) u(xi) + delta v(xi M)` at every grid point.
    pub(crate) fn objective(&self, v: &GridValueFunction) -> Result<Vec<f64>> {
        let d = self.delta;
        if d == 0.0 {
            return Ok(self.u.to_vec());
        }
        // build any lazy hull before the parallel section
        if self.grid.k() > 2 {
            v.hull()?;
        }
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| Ok((1.0 - d) * self.u[i] + d * v.eval(&self.pushed[i])?))
            .collect()
    }

    pub(crate) fn step(&self, v: &GridValueFunction) -> Result<GridValueFunction> {
        if v.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::param(
                "v",
                "value function lives on a different grid",
            ));
        }
        let f = self.objective(v)?;
        let hint = if self.grid.k() > 2 {
            v.hull().ok()
        } else {
            None
        };
        let env = ConcaveEnvelope::build_with_hint(self.grid.clone(), f, hint.map(|h| h.as_ref()))?;
        Ok(GridValueFunction::from_envelope(env))
    }
}

/// One application of the discounted Bellman operator: concavify
/// `(1 - delta) u + delta (v o M)`.
pub fn bellman_step(
    v: &GridValueFunction,
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
) -> Result<GridValueFunction> {
    BellmanModel::new(v.grid().clone(), instance, m, delta)?.step(v)
}

/// Value iteration from `v = 0` until the sup-norm change drops to
/// `eps_stop * (1 - delta)`, which bounds the final error by `eps_stop`.
pub fn solve_discounted_value(
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
    grid: Arc<SimplexGrid>,
    opts: SolverOptions,
) -> Result<Solution> {
    if !(opts.eps_stop > 0.0) {
        return Err(Error::param("eps_stop", "must be positive"));
    }
    let model = BellmanModel::new(grid.clone(), instance, m, delta)?;
    let mut v = GridValueFunction::constant(grid, 0.0);
    for it in 1..=opts.max_iter {
        let next = model.step(&v)?;
        let gap = next.sup_distance(&v);
        v = next;
        if delta == 0.0 || gap <= opts.eps_stop * (1.0 - delta) {
            return Ok(Solution {
                value: v,
                iterations: it,
                last_gap: gap,
                error_bound: if delta == 0.0 {
                    0.0
                } else {
                    delta / (1.0 - delta) * gap
                },
                delta,
            });
        }
    }
    Err(Error::IterationCap {
        cap: opts.max_iter,
        context: format!("value iteration at delta = {delta}; delta too close to 1 for eps_stop"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::persuasion::concave_envelope;

    #[test]
    fn delta_zero_gives_cav_u() {
        let (inst, m) = instances::appendix_a();
        let g = Arc::new(SimplexGrid::new(2, 200).unwrap());
        let v = GridValueFunction::constant(g.clone(), 0.3);
        let out = bellman_step(&v, &inst, &m, 0.0).unwrap();
        let u = GridValueFunction::new(g.clone(), inst.sample_u(&g).unwrap()).unwrap();
        let cav = concave_envelope(&u).unwrap();
        assert!(out.sup_distance(&cav) < 1e-15);
        // Cav u is 2.05 p on [0, 1/2]
        for i in 0..=100 {
            let p = g.point(i)[0];
            assert!((out.values()[i] - 2.05 * p).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        let inst = PersuasionInstance::constant(3, 0.4).unwrap();
        let m = StochasticMatrix::new(vec![
            vec![0.2, 0.5, 0.3],
            vec![0.1, 0.1, 0.8],
            vec![0.6, 0.2, 0.2],
        ])
        .unwrap();
        let g = Arc::new(SimplexGrid::new(3, 10).unwrap());
        let v = GridValueFunction::constant(g.clone(), 0.4);
        let out = bellman_step(&v, &inst, &m, 0.7).unwrap();
        assert!(out.values().iter().all(|x| (x - 0.4).abs() < 1e-12));
        let sol = solve_discounted_value(&inst, &m, 0.9, g, SolverOptions::default()).unwrap();
        assert!(sol.value.values().iter().all(|x| (x - 0.4).abs() < 1e-5));
    }

    #[test]
    fn closed_form_is_a_fixed_point() {
        let (inst, m) = instances::appendix_a();
        let g = Arc::new(SimplexGrid::new(2, 2000).unwrap());
        let v =
            GridValueFunction::sample(g.clone(), |x| instances::appendix_a_closed_form(0.5, x[0]));
        let out = bellman_step(&v, &inst, &m, 0.5).unwrap();
        assert!(out.sup_distance(&v) < 1e-3);
    }

    #[test]
    fn rejects_bad_parameters() {
        let (inst, m) = instances::appendix_a();
        let g = Arc::new(SimplexGrid::new(2, 20).unwrap());
        let opts = SolverOptions::default();
        assert!(solve_discounted_value(&inst, &m, 1.0, g.clone(), opts).is_err());
        assert!(solve_discounted_value(&inst, &m, -0.1, g.clone(), opts).is_err());
        let bad = SolverOptions {
            eps_stop: 0.0,
            ..opts
        };
        assert!(solve_discounted_value(&inst, &m, 0.5, g.clone(), bad).is_err());
        let capped = SolverOptions {
            eps_stop: 1e-12,
            max_iter: 3,
        };
        assert!(matches!(
            solve_discounted_value(&inst, &m, 0.9, g.clone(), capped),
            Err(Error::IterationCap { .. })
        ));
        let g3 = Arc::new(SimplexGrid::new(3, 5).unwrap());
        assert!(solve_discounted_value(&inst, &m, 0.5, g3, opts).is_err());
    }
}
