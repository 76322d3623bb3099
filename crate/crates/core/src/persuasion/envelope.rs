//! Upper concave envelopes of functions sampled on a [`SimplexGrid`].
//!
//! Two-state grids use a monotone-chain upper hull. For three or more states
//! the envelope at a point `xi` is the linear programme
//!
//! ```text
//! max  sum_j w_j f_j   s.t.  sum_j w_j x_j = xi,  w >= 0
//! ```
//!
//! over grid points `x_j`. An optimal basis is a facet of the upper hull: its
//! dual vector is a supporting hyperplane, so every grid point inside the
//! basis simplex gets its envelope value from the same plane. Facets are
//! found one LP at a time and each LP is warm-started from the facet that
//! held the point in a previous envelope.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;

const NO_FACET: u32 = u32::MAX;
const INSIDE_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

/// Upper hull vertices of the points `(ps[i], fs[i])`, `ps` ascending.
/// Collinear interior points are dropped.
pub fn upper_hull_1d(ps: &[f64], fs: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(ps.len());
    for i in 0..ps.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (fs[b] - fs[a]) * (ps[i] - ps[a]) - (fs[i] - fs[a]) * (ps[b] - ps[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Inverse of a small dense row-major matrix by Gauss-Jordan elimination.
pub(crate) fn invert(k: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| {
            m[r * k + col]
                .abs()
                .partial_cmp(&m[s * k + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let pv = m[piv * k + col];
        if pv.abs() < 1e-14 {
            return None;
        }
        if piv != col {
            for j in 0..k {
                m.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        for j in 0..k {
            m[col * k + j] /= pv;
            inv[col * k + j] /= pv;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = m[r * k + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                m[r * k + j] -= f * m[col * k + j];
                inv[r * k + j] -= f * inv[col * k + j];
            }
        }
    }
    Some(inv)
}

fn mat_vec(k: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..k)
        .map(|r| (0..k).map(|c| a[r * k + c] * x[c]).sum())
        .collect()
}

/// An optimal LP basis: the grid points spanning one hull facet.
#[derive(Debug, Clone)]
pub struct Facet {
    basis: Vec<usize>,
    inv: Vec<f64>,
    plane: Vec<f64>,
}

impl Facet {
    fn new(grid: &SimplexGrid, f: &[f64], basis: Vec<usize>) -> Option<Self> {
        let k = grid.k();
        // B has grid points as columns
        let mut b = vec![0.0; k * k];
        for (c, &j) in basis.iter().enumerate() {
            for (r, &x) in grid.point(j).iter().enumerate() {
                b[r * k + c] = x;
            }
        }
        let inv = invert(k, &b)?;
        // plane y solves B^T y = f_B
        let plane = (0..k)
            .map(|c| (0..k).map(|r| inv[r * k + c] * f[basis[r]]).sum())
            .collect();
        Some(Facet { basis, inv, plane })
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Barycentric weights of `xi` with respect to the basis points.
    pub fn weights(&self, xi: &[f64]) -> Vec<f64> {
        mat_vec(self.basis.len(), &self.inv, xi)
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        self.weights(xi).iter().all(|&w| w >= -INSIDE_TOL)
    }

    pub fn plane_value(&self, xi: &[f64]) -> f64 {
        self.plane.iter().zip(xi).map(|(y, x)| y * x).sum()
    }
}

/// Primal simplex for the envelope LP at `xi`, starting from `start` (which
/// must contain `xi`) or from the Dirac vertices.
pub(crate) fn solve_facet(
    grid: &SimplexGrid,
    f: &[f64],
    xi: &[f64],
    start: Option<&[usize]>,
) -> Result<Facet> {
    let k = grid.k();
    let n = grid.len();
    let scale = f.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let tol = 1e-12 * scale;
    let mut facet = start
        .and_then(|b| Facet::new(grid, f, b.to_vec()))
        .filter(|fc| fc.contains(xi))
        .or_else(|| Facet::new(grid, f, (0..k).map(|s| grid.vertex(s)).collect()))
        .ok_or_else(|| Error::DegenerateEnvelope(xi.to_vec()))?;
    for pivot in 0..MAX_PIVOTS {
        let bland = pivot > 50;
        let mut entering = None;
        let mut best = tol;
        for j in 0..n {
            let r = f[j] - facet.plane_value(grid.point(j));
            if r > best && !facet.basis.contains(&j) {
                entering = Some(j);
                if bland {
                    break;
                }
                best = r;
            }
        }
        let Some(e) = entering else {
            return Ok(facet);
        };
        let lambda: Vec<f64> = facet.weights(xi).into_iter().map(|w| w.max(0.0)).collect();
        let d = facet.weights(grid.point(e));
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..k {
            if d[i] > 1e-12 {
                let ratio = lambda[i] / d[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15
                            || (ratio <= lr + 1e-15 && facet.basis[i] < facet.basis[li])
                        {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let (r, _) = leave.ok_or_else(|| Error::DegenerateEnvelope(xi.to_vec()))?;
        let mut basis = facet.basis.clone();
        basis[r] = e;
        facet = Facet::new(grid, f, basis).ok_or_else(|| Error::DegenerateEnvelope(xi.to_vec()))?;
    }
    Err(Error::IterationCap {
        cap: MAX_PIVOTS,
        context: "envelope simplex".into(),
    })
}

#[derive(Debug, Clone)]
enum Pieces {
    /// Hull vertices, ascending in the first coordinate.
    Chain(Vec<usize>),
    Facets {
        facets: Vec<Facet>,
        owner: Vec<u32>,
    },
}

/// Upper concave envelope of grid samples, with its hull structure.
#[derive(Debug, Clone)]
pub struct ConcaveEnvelope {
    grid: Arc<SimplexGrid>,
    source: Vec<f64>,
    values: Vec<f64>,
    pieces: Pieces,
}

impl ConcaveEnvelope {
    pub fn build(grid: Arc<SimplexGrid>, source: Vec<f64>) -> Result<Self> {
        Self::build_with_hint(grid, source, None)
    }

    /// Builds the envelope, warm-starting facet searches from `hint`.
    pub fn build_with_hint(
        grid: Arc<SimplexGrid>,
        source: Vec<f64>,
        hint: Option<&ConcaveEnvelope>,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::param("grid", "empty grid"));
        }
        if source.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: source.len(),
            });
        }
        if grid.k() == 2 {
            let ps: Vec<f64> = (0..grid.len()).map(|i| grid.point(i)[0]).collect();
            let hull = upper_hull_1d(&ps, &source);
            let mut values = vec![0.0; grid.len()];
            for w in hull.windows(2) {
                let (a, b) = (w[0], w[1]);
                for (i, v) in values.iter_mut().enumerate().take(b + 1).skip(a) {
                    let t = (ps[i] - ps[a]) / (ps[b] - ps[a]);
                    *v = ((1.0 - t) * source[a] + t * source[b]).max(source[i]);
                }
            }
            if hull.len() == 1 {
                values[hull[0]] = source[hull[0]];
            }
            return Ok(ConcaveEnvelope {
                grid,
                source,
                values,
                pieces: Pieces::Chain(hull),
            });
        }
        let n = grid.len();
        let mut owner = vec![NO_FACET; n];
        let mut values = vec![0.0; n];
        let mut facets: Vec<Facet> = Vec::new();
        for j in 0..n {
            if owner[j] != NO_FACET {
                continue;
            }
            let start = hint.and_then(|h| h.facet_of(j)).map(|fc| fc.basis.clone());
            let facet = solve_facet(&grid, &source, grid.point(j), start.as_deref())?;
            let id = facets.len() as u32;
            let claim = |t: usize, owner: &mut Vec<u32>, values: &mut Vec<f64>| {
                if owner[t] == NO_FACET && facet.contains(grid.point(t)) {
                    owner[t] = id;
                    values[t] = facet.plane_value(grid.point(t)).max(source[t]);
                }
            };
            if grid.k() == 3 {
                let m = grid.resolution() as u32;
                let lat: Vec<&[u32]> = facet.basis.iter().map(|&b| grid.lattice_point(b)).collect();
                let (a0, a1) = (
                    lat.iter().map(|c| c[0]).min().unwrap(),
                    lat.iter().map(|c| c[0]).max().unwrap(),
                );
                let (b0, b1) = (
                    lat.iter().map(|c| c[1]).min().unwrap(),
                    lat.iter().map(|c| c[1]).max().unwrap(),
                );
                for a in a0..=a1 {
                    for b in b0..=b1.min(m - a) {
                        let t = grid.index_of(&[a, b, m - a - b]).expect("lattice point");
                        claim(t, &mut owner, &mut values);
                    }
                }
            } else {
                for t in j..n {
                    claim(t, &mut owner, &mut values);
                }
            }
            if owner[j] == NO_FACET {
                owner[j] = id;
                values[j] = facet.plane_value(grid.point(j)).max(source[j]);
            }
            facets.push(facet);
        }
        Ok(ConcaveEnvelope {
            grid,
            source,
            values,
            pieces: Pieces::Facets { facets, owner },
        })
    }

    pub fn grid(&self) -> &Arc<SimplexGrid> {
        &self.grid
    }

    /// Envelope values at the grid points.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The samples the envelope was built from.
    pub fn source(&self) -> &[f64] {
        &self.source
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of hull pieces (segments for two states, facets otherwise).
    pub fn piece_count(&self) -> usize {
        match &self.pieces {
            Pieces::Chain(h) => h.len().saturating_sub(1),
            Pieces::Facets { facets, .. } => facets.len(),
        }
    }

    fn facet_of(&self, j: usize) -> Option<&Facet> {
        match &self.pieces {
            Pieces::Facets { facets, owner } => {
                let id = *owner.get(j)?;
                (id != NO_FACET).then(|| &facets[id as usize])
            }
            Pieces::Chain(_) => None,
        }
    }

    /// Hull vertices spanning the piece that contains `xi`, with barycentric
    /// weights. A single `(j, 1.0)` entry means `xi` is a hull vertex.
    pub fn locate(&self, xi: &[f64]) -> Result<Vec<(usize, f64)>> {
        let k = self.grid.k();
        if xi.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: xi.len(),
            });
        }
        match &self.pieces {
            Pieces::Chain(hull) => {
                let p = xi[0];
                let pos = |i: usize| self.grid.point(i)[0];
                let idx = hull.partition_point(|&h| pos(h) < p);
                if idx < hull.len() && (pos(hull[idx]) - p).abs() <= 1e-15 {
                    return Ok(vec![(hull[idx], 1.0)]);
                }
                if idx == 0 || idx == hull.len() {
                    return Err(Error::DegenerateEnvelope(xi.to_vec()));
                }
                let (a, b) = (hull[idx - 1], hull[idx]);
                let t = (p - pos(a)) / (pos(b) - pos(a));
                Ok(vec![(a, 1.0 - t), (b, t)])
            }
            Pieces::Facets { facets, owner } => {
                let pack = |fc: &Facet| -> Vec<(usize, f64)> {
                    let w = fc.weights(xi);
                    fc.basis
                        .iter()
                        .zip(w)
                        .filter(|(_, w)| *w > INSIDE_TOL)
                        .map(|(&b, w)| (b, w))
                        .collect()
                };
                if let Some(j) = self.grid.exact_index(xi) {
                    return Ok(pack(&facets[owner[j] as usize]));
                }
                if k == 3 {
                    for (c, _) in self.grid.cell3(xi) {
                        let fc = &facets[owner[c] as usize];
                        if fc.contains(xi) {
                            return Ok(pack(fc));
                        }
                    }
                }
                if let Some(fc) = facets.iter().find(|fc| fc.contains(xi)) {
                    return Ok(pack(fc));
                }
                let fc = solve_facet(&self.grid, &self.source, xi, None)?;
                Ok(pack(&fc))
            }
        }
    }

    /// Envelope value at an arbitrary belief.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        Ok(self
            .locate(xi)?
            .iter()
            .map(|&(j, w)| w * self.values[j])
            .sum())
    }
}
