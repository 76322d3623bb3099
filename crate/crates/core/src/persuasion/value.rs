use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;
use crate::persuasion::envelope::ConcaveEnvelope;

/// A function sampled on a simplex grid.
///
/// Off-grid evaluation is linear between neighbours for two states and
/// barycentric within the hull facet otherwise; in both cases it is the
/// concave interpolation of the samples when the samples are concave.
#[derive(Debug, Clone)]
pub struct GridValueFunction {
    grid: Arc<SimplexGrid>,
    values: Vec<f64>,
    concave: bool,
    hull: OnceLock<Arc<ConcaveEnvelope>>,
}

impl GridValueFunction {
    pub fn new(grid: Arc<SimplexGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(GridValueFunction {
            grid,
            values,
            concave: false,
            hull: OnceLock::new(),
        })
    }

    pub fn constant(grid: Arc<SimplexGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        GridValueFunction {
            grid,
            values,
            concave: true,
            hull: OnceLock::new(),
        }
    }

    /// Samples `f` at every grid point.
    pub fn sample(grid: Arc<SimplexGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        GridValueFunction {
            grid,
            values,
            concave: false,
            hull: OnceLock::new(),
        }
    }

    pub(crate) fn from_envelope(env: ConcaveEnvelope) -> Self {
        let grid = env.grid().clone();
        let values = env.values().to_vec();
        let hull = OnceLock::new();
        let _ = hull.set(Arc::new(env));
        GridValueFunction {
            grid,
            values,
            concave: true,
            hull,
        }
    }

    pub fn grid(&self) -> &Arc<SimplexGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_concave_flagged(&self) -> bool {
        self.concave
    }

    /// The upper concave envelope of the samples, built on first use.
    pub fn hull(&self) -> Result<&Arc<ConcaveEnvelope>> {
        if let Some(h) = self.hull.get() {
            return Ok(h);
        }
        let env = ConcaveEnvelope::build(self.grid.clone(), self.values.clone())?;
        Ok(self.hull.get_or_init(|| Arc::new(env)))
    }

    /// Grid points and weights whose combination interpolates at `xi`.
    pub fn interpolation_atoms(&self, xi: &[f64]) -> Result<Vec<(usize, f64)>> {
        if xi.len() != self.grid.k() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.k(),
                got: xi.len(),
            });
        }
        if self.grid.k() == 2 {
            let atoms = self.grid.bracket(xi[0]);
            return Ok(atoms.into_iter().filter(|(_, w)| *w > 0.0).collect());
        }
        if let Some(j) = self.grid.exact_index(xi) {
            return Ok(vec![(j, 1.0)]);
        }
        self.hull()?.locate(xi)
    }

    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        Ok(self
            .interpolation_atoms(xi)?
            .iter()
            .map(|&(j, w)| w * self.values[j])
            .sum())
    }

    pub fn sup_distance(&self, other: &GridValueFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of the midpoint inequality over lattice triples.
    pub fn midpoint_concavity_violation(&self) -> f64 {
        self.grid
            .midpoint_triples()
            .into_iter()
            .map(|(a, mid, b)| 0.5 * (self.values[a] + self.values[b]) - self.values[mid])
            .fold(0.0, f64::max)
    }

    /// Grid interpolation error estimate: half the largest value change
    /// between lattice neighbours. Bounds the gap between a concave function
    /// and its piecewise-linear interpolant on the grid.
    pub fn interpolation_error_estimate(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.len() {
            for j in self.grid.neighbours(i) {
                worst = worst.max((self.values[i] - self.values[j]).abs());
            }
        }
        0.5 * worst
    }
}

/// Least concave majorant of `f` over grid convex combinations.
pub fn concave_envelope(f: &GridValueFunction) -> Result<GridValueFunction> {
    let env = ConcaveEnvelope::build(f.grid.clone(), f.values.clone())?;
    Ok(GridValueFunction::from_envelope(env))
}
