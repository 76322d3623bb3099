//! Stochastic-matrix algebra: beliefs, invariant distributions, chain
//! classification, belief push-forward and mixing steps.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Input tolerance for row sums and belief sums. Values accepted within this
/// tolerance are renormalised so that stored sums are exact to rounding.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// A point of the probability simplex over `k >= 2` states.
#[derive(Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidBelief(format!(
                "need at least 2 states, got {}",
                weights.len()
            )));
        }
        let mut w = weights;
        for (i, x) in w.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidBelief(format!("weight {i} is not finite")));
            }
            if *x < 0.0 {
                if *x < -STOCHASTIC_TOL {
                    return Err(Error::InvalidBelief(format!(
                        "weight {i} is negative ({x})"
                    )));
                }
                *x = 0.0;
            }
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidBelief(format!("weights sum to {s}")));
        }
        w.iter_mut().for_each(|x| *x /= s);
        Ok(Belief(w))
    }

    /// Builds a belief from weights known to be a probability vector up to
    /// rounding; clamps and renormalises without validation.
    pub(crate) fn from_raw(mut w: Vec<f64>) -> Self {
        w.iter_mut().for_each(|x| {
            if *x < 0.0 {
                *x = 0.0
            }
        });
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        Belief(w)
    }

    /// The Dirac belief concentrated on `state`.
    pub fn dirac(k: usize, state: usize) -> Self {
        let mut w = vec![0.0; k];
        w[state] = 1.0;
        Belief(w)
    }

    pub fn uniform(k: usize) -> Self {
        Belief(vec![1.0 / k as f64; k])
    }

    /// Two-state belief `(p, 1 - p)`.
    pub fn binary(p: f64) -> Result<Self> {
        Belief::new(vec![p, 1.0 - p])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1_distance(&self, other: &Belief) -> f64 {
        l1(&self.0, &other.0)
    }

    pub fn is_dirac(&self) -> bool {
        self.0.contains(&1.0)
    }
}

impl fmt::Debug for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Belief{:?}", self.0)
    }
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainClassification {
    pub irreducible: bool,
    pub aperiodic: bool,
    pub period: usize,
}

impl ChainClassification {
    pub fn ergodic(&self) -> bool {
        self.irreducible && self.aperiodic
    }
}

/// Row-stochastic `k x k` transition kernel with its classification.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    k: usize,
    entries: Vec<f64>,
    classification: ChainClassification,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: k,
            });
        }
        let mut entries = Vec::with_capacity(k * k);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
            if let Some(&bad) = row.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::NotStochastic {
                    row: r,
                    reason: format!("entry {bad} is negative or not finite"),
                });
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic {
                    row: r,
                    reason: format!("row sums to {s}"),
                });
            }
            entries.extend(row.iter().map(|x| x / s));
        }
        let mut m = StochasticMatrix {
            k,
            entries,
            classification: ChainClassification {
                irreducible: false,
                aperiodic: false,
                period: 1,
            },
        };
        m.classification = classify_chain(&m);
        Ok(m)
    }

    pub fn identity(k: usize) -> Self {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        StochasticMatrix::new(rows).expect("identity is stochastic")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn classification(&self) -> ChainClassification {
        self.classification
    }

    /// `xi * M` for a raw probability vector.
    pub fn apply(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for (i, &w) in xi.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += w * m;
            }
        }
        out
    }

    /// Smallest coordinate of the invariant distribution (`c*`).
    pub fn min_invariant_mass(&self) -> f64 {
        invariant_distribution(self)
            .as_slice()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    fn matmul(&self, other: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k * k];
        for i in 0..k {
            for l in 0..k {
                let a = other[i * k + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..k {
                    out[i * k + j] += a * self.get(l, j);
                }
            }
        }
        out
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Solves `pi M = pi`, `sum pi = 1` as a linear system. For reducible chains
/// the minimum-norm solution is returned, which is a mixture of the extremal
/// invariant distributions and therefore itself invariant.
pub fn invariant_distribution(m: &StochasticMatrix) -> Belief {
    let k = m.k;
    let mut a = DMatrix::<f64>::zeros(k + 1, k);
    for i in 0..k {
        for j in 0..k {
            // row i of (M^T - I)
            a[(i, j)] = m.get(j, i) - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..k {
        a[(k, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k + 1);
    b[k] = 1.0;
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-12)
        .expect("svd with both factors always solves");
    Belief::from_raw(x.iter().cloned().collect())
}

/// Strongly connected components by mutual reachability (k is desk-scale).
fn reachability(m: &StochasticMatrix) -> Vec<Vec<bool>> {
    let k = m.k;
    let mut reach = vec![vec![false; k]; k];
    for (s, r) in reach.iter_mut().enumerate() {
        let mut stack = vec![s];
        r[s] = true;
        while let Some(u) = stack.pop() {
            for v in 0..k {
                if m.get(u, v) > 0.0 && !r[v] {
                    r[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    reach
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of the component `comp` from BFS levels: the gcd of
/// `level(u) + 1 - level(v)` over internal edges `u -> v`.
fn component_period(m: &StochasticMatrix, comp: &[usize]) -> Option<usize> {
    let k = m.k;
    let mut inside = vec![false; k];
    comp.iter().for_each(|&c| inside[c] = true);
    let mut level = vec![usize::MAX; k];
    let root = comp[0];
    level[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for v in 0..k {
            if inside[v] && m.get(u, v) > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    let mut has_edge = false;
    for &u in comp {
        for &v in comp {
            if m.get(u, v) > 0.0 {
                has_edge = true;
                let d = (level[u] + 1) as i64 - level[v] as i64;
                g = gcd(g, d.unsigned_abs() as usize);
            }
        }
    }
    has_edge.then_some(g.max(1))
}

pub fn classify_chain(m: &StochasticMatrix) -> ChainClassification {
    let k = m.k;
    let reach = reachability(m);
    let irreducible = reach.iter().all(|r| r.iter().all(|&x| x));
    let mut assigned = vec![false; k];
    let mut period = 0usize;
    for s in 0..k {
        if assigned[s] {
            continue;
        }
        let comp: Vec<usize> = (0..k).filter(|&t| reach[s][t] && reach[t][s]).collect();
        comp.iter().for_each(|&c| assigned[c] = true);
        if let Some(p) = component_period(m, &comp) {
            period = gcd(period, p);
        }
    }
    let period = period.max(1);
    ChainClassification {
        irreducible,
        aperiodic: period == 1,
        period,
    }
}

/// `xi * M^n`.
pub fn push_belief(xi: &Belief, m: &StochasticMatrix, n: usize) -> Result<Belief> {
    check_dim(m.k, xi.k())?;
    let mut cur = xi.as_slice().to_vec();
    for _ in 0..n {
        cur = m.apply(&cur);
    }
    Ok(Belief::from_raw(cur))
}

pub const DEFAULT_MIXING_CAP: usize = 1_000_000;

/// Largest l1 distance between a Dirac row of `M^n` and `pi`.
fn worst_row_distance(power: &[f64], pi: &[f64], k: usize) -> f64 {
    (0..k)
        .map(|i| l1(&power[i * k..(i + 1) * k], pi))
        .fold(0.0, f64::max)
}

/// Least `n` with `max_l |e_l M^n - pi|_1 <= eps`. The maximum over Dirac
/// vertices bounds the supremum over the simplex by convexity.
pub fn mixing_steps(m: &StochasticMatrix, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", "must be positive"));
    }
    let c = m.classification();
    if !c.ergodic() {
        return Err(Error::NotErgodic {
            irreducible: c.irreducible,
            period: c.period,
        });
    }
    let k = m.k;
    let pi = invariant_distribution(m);
    let mut power: Vec<f64> = StochasticMatrix::identity(k).entries;
    for n in 0..=cap {
        if worst_row_distance(&power, pi.as_slice(), k) <= eps {
            return Ok(n);
        }
        power = m.matmul(&power);
    }
    Err(Error::IterationCap {
        cap,
        context: format!("mixing to within {eps}"),
    })
}

/// `max_l |e_l M^n - pi|_1` for a single `n`.
pub fn mixing_distance(m: &StochasticMatrix, n: usize) -> f64 {
    let k = m.k;
    let pi = invariant_distribution(m);
    let mut power: Vec<f64> = StochasticMatrix::identity(k).entries;
    for _ in 0..n {
        power = m.matmul(&power);
    }
    worst_row_distance(&power, pi.as_slice(), k)
}
