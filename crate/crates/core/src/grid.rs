//! Uniform lattice discretisation of the belief simplex.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::markov::Belief;

/// All beliefs whose coordinates are integer multiples of `1/m`.
///
/// For `k = 2` point `i` is `(i/m, 1 - i/m)`, so points are ordered by
/// their first coordinate.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    k: usize,
    m: usize,
    lattice: Vec<u32>,
    coords: Vec<f64>,
    lookup: Option<HashMap<Vec<u32>, usize>>,
}

impl PartialEq for SimplexGrid {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.m == other.m
    }
}

fn enumerate(k: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<u32>) {
    let used: u32 = prefix.iter().sum();
    if prefix.len() == k - 1 {
        out.extend_from_slice(prefix);
        out.push(m - used);
        return;
    }
    for a in 0..=(m - used) {
        prefix.push(a);
        enumerate(k, m, prefix, out);
        prefix.pop();
    }
}

impl SimplexGrid {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::param("k", "need at least 2 states"));
        }
        if m == 0 {
            return Err(Error::param("resolution", "must be positive"));
        }
        let mut lattice = Vec::new();
        if k == 2 {
            for i in 0..=m as u32 {
                lattice.push(i);
                lattice.push(m as u32 - i);
            }
        } else {
            enumerate(k, m as u32, &mut Vec::with_capacity(k), &mut lattice);
        }
        let coords = lattice.iter().map(|&c| c as f64 / m as f64).collect();
        let lookup = (k > 3).then(|| {
            lattice
                .chunks(k)
                .enumerate()
                .map(|(i, c)| (c.to_vec(), i))
                .collect()
        });
        Ok(SimplexGrid {
            k,
            m,
            lattice,
            coords,
            lookup,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of point `i` as a probability vector.
    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.k..(i + 1) * self.k]
    }

    pub fn lattice_point(&self, i: usize) -> &[u32] {
        &self.lattice[i * self.k..(i + 1) * self.k]
    }

    pub fn belief(&self, i: usize) -> Belief {
        Belief::from_raw(self.point(i).to_vec())
    }

    pub fn index_of(&self, lattice: &[u32]) -> Option<usize> {
        if lattice.len() != self.k || lattice.iter().sum::<u32>() as usize != self.m {
            return None;
        }
        let m = self.m;
        match self.k {
            2 => Some(lattice[0] as usize),
            3 => {
                // rows a' < a hold m - a' + 1 points each
                let (a, b) = (lattice[0] as usize, lattice[1] as usize);
                Some(a * (m + 1) - a * a.saturating_sub(1) / 2 + b)
            }
            _ => self.lookup.as_ref().and_then(|l| l.get(lattice).copied()),
        }
    }

    /// Index of the Dirac vertex `e_state`.
    pub fn vertex(&self, state: usize) -> usize {
        let mut c = vec![0u32; self.k];
        c[state] = self.m as u32;
        self.index_of(&c).expect("vertices are grid points")
    }

    /// Index of the grid point equal to `xi`, if any (within 1e-12).
    pub fn exact_index(&self, xi: &[f64]) -> Option<usize> {
        let c = self.round_lattice(xi);
        let i = self.index_of(&c)?;
        (crate::markov::l1(self.point(i), xi) <= 1e-12).then_some(i)
    }

    /// Nearest lattice point in l1 (largest-remainder rounding).
    pub fn round_lattice(&self, xi: &[f64]) -> Vec<u32> {
        let m = self.m as f64;
        let scaled: Vec<f64> = xi.iter().map(|x| x * m).collect();
        let mut base: Vec<u32> = scaled.iter().map(|x| x.floor().max(0.0) as u32).collect();
        let used: i64 = base.iter().map(|&b| b as i64).sum();
        let mut deficit = self.m as i64 - used;
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by(|&a, &b| {
            let fa = scaled[a] - scaled[a].floor();
            let fb = scaled[b] - scaled[b].floor();
            fb.partial_cmp(&fa).unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut idx = 0;
        while deficit > 0 {
            base[order[idx % self.k]] += 1;
            deficit -= 1;
            idx += 1;
        }
        while deficit < 0 {
            let j = order[self.k - 1 - (idx % self.k)];
            if base[j] > 0 {
                base[j] -= 1;
                deficit += 1;
            }
            idx += 1;
        }
        base
    }

    pub fn nearest(&self, xi: &[f64]) -> usize {
        self.index_of(&self.round_lattice(xi))
            .expect("rounded lattice point lies on the grid")
    }

    /// For `k = 2`: the two adjacent grid points bracketing `p = xi[0]` with
    /// linear interpolation weights.
    pub fn bracket(&self, p: f64) -> [(usize, f64); 2] {
        let m = self.m as f64;
        let s = (p * m).clamp(0.0, m);
        let lo = (s.floor() as usize).min(self.m.saturating_sub(1));
        let t = s - lo as f64;
        [(lo, 1.0 - t), (lo + 1, t)]
    }

    /// Grid neighbours of point `i` along lattice directions `e_a - e_b`.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let c = self.lattice_point(i).to_vec();
        let mut out = Vec::new();
        for a in 0..self.k {
            for b in 0..self.k {
                if a == b || c[b] == 0 {
                    continue;
                }
                let mut d = c.clone();
                d[a] += 1;
                d[b] -= 1;
                if let Some(j) = self.index_of(&d) {
                    out.push(j);
                }
            }
        }
        out
    }

    /// Triples `(a, mid, b)` of grid points with `mid` the midpoint of `a`
    /// and `b` along a lattice direction, for concavity checks.
    pub fn midpoint_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            let c = self.lattice_point(i);
            for a in 0..self.k {
                for b in (a + 1)..self.k {
                    if c[b] == 0 || c[a] == 0 {
                        continue;
                    }
                    let mut up = c.to_vec();
                    up[a] += 1;
                    up[b] -= 1;
                    let mut down = c.to_vec();
                    down[a] -= 1;
                    down[b] += 1;
                    if let (Some(u), Some(d)) = (self.index_of(&up), self.index_of(&down)) {
                        out.push((d, i, u));
                    }
                }
            }
        }
        out
    }

    /// Containing lattice cell for `k = 3`: up to three grid points with
    /// barycentric weights.
    pub(crate) fn cell3(&self, xi: &[f64]) -> Vec<(usize, f64)> {
        debug_assert_eq!(self.k, 3);
        let m = self.m as f64;
        let a = (xi[0] * m).clamp(0.0, m);
        let b = (xi[1] * m).clamp(0.0, m - a);
        let (i, j) = (a.floor(), b.floor());
        let (fa, fb) = (a - i, b - j);
        let (i, j) = (i as u32, j as u32);
        let mu = self.m as u32;
        let mut out: Vec<(u32, u32, f64)> = if fa + fb <= 1.0 {
            vec![(i, j, 1.0 - fa - fb), (i + 1, j, fa), (i, j + 1, fb)]
        } else {
            vec![
                (i + 1, j + 1, fa + fb - 1.0),
                (i, j + 1, 1.0 - fa),
                (i + 1, j, 1.0 - fb),
            ]
        };
        out.retain(|&(_, _, w)| w > 0.0);
        out.into_iter()
            .filter(|&(p, q, _)| p + q <= mu)
            .filter_map(|(p, q, w)| self.index_of(&[p, q, mu - p - q]).map(|idx| (idx, w)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, r: usize) -> usize {
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn counts_and_vertices() {
        for (k, m) in [(2, 7), (3, 5), (4, 3)] {
            let g = SimplexGrid::new(k, m).unwrap();
            assert_eq!(g.len(), binom(m + k - 1, k - 1));
            for s in 0..k {
                let v = g.vertex(s);
                assert_eq!(g.point(v)[s], 1.0);
            }
            for i in 0..g.len() {
                assert_eq!(g.index_of(g.lattice_point(i)), Some(i));
                let s: f64 = g.point(i).iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn binary_grid_is_ordered() {
        let g = SimplexGrid::new(2, 10).unwrap();
        for i in 1..g.len() {
            assert!(g.point(i)[0] > g.point(i - 1)[0]);
        }
        assert_eq!(g.bracket(0.25), [(2, 0.5), (3, 0.5)]);
        let [(hi, w), _] = g.bracket(1.0);
        assert_eq!((hi, w), (9, 0.0));
    }

    #[test]
    fn rounding_hits_nearest() {
        let g = SimplexGrid::new(3, 10).unwrap();
        let i = g.nearest(&[0.33, 0.33, 0.34]);
        assert_eq!(g.lattice_point(i), &[3, 3, 4]);
        let i = g.nearest(&[0.0, 0.0, 1.0]);
        assert_eq!(g.lattice_point(i), &[0, 0, 10]);
        assert_eq!(
            g.exact_index(&[0.3, 0.3, 0.4]),
            Some(g.index_of(&[3, 3, 4]).unwrap())
        );
        assert_eq!(g.exact_index(&[0.31, 0.29, 0.4]), None);
    }

    #[test]
    fn cell3_reconstructs_point() {
        let g = SimplexGrid::new(3, 7).unwrap();
        for xi in [
            [0.13, 0.41, 0.46],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [0.5, 0.5, 0.0],
            [0.2, 0.79, 0.01],
        ] {
            let cell = g.cell3(&xi);
            let mut acc = [0.0; 3];
            let mut wsum = 0.0;
            for (idx, w) in &cell {
                wsum += w;
                for (a, p) in acc.iter_mut().zip(g.point(*idx)) {
                    *a += w * p;
                }
            }
            assert!((wsum - 1.0).abs() < 1e-12);
            assert!(crate::markov::l1(&acc, &xi) < 1e-12, "{xi:?} -> {acc:?}");
        }
    }

    #[test]
    fn rejects_degenerate() {
        assert!(SimplexGrid::new(1, 4).is_err());
        assert!(SimplexGrid::new(2, 0).is_err());
    }
}
