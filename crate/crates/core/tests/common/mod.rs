//! Reference computations used only by tests. Nothing here calls the
//! solver, the envelope code or the LP.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub fn appendix_u(p: f64) -> f64 {
    p * (2.0 - 3.0 * (p - 0.5).abs()) + (1.0 - p) * p / 10.0
}

/// Closed-form discounted value of the two-state appendix example, `p` the
/// mass on the first state.
pub fn appendix_value(delta: f64, p: f64) -> f64 {
    if p <= 0.5 {
        2.05 * (3.0 * (delta - 1.0) * p - delta / 2.0) / (delta - 3.0)
    } else {
        (1.0 - delta) * appendix_u(p) + delta * 2.05 * ((delta - 1.0) * p - 0.5) / (delta - 3.0)
    }
}

/// Upper concave envelope of samples on an equispaced grid over `[0, 1]`,
/// by trying every pair of bracketing points.
pub fn cav_pairs(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            let mut best = f[i];
            for a in 0..=i {
                for b in i..n {
                    if a < b {
                        let w = (i - a) as f64 / (b - a) as f64;
                        best = best.max((1.0 - w) * f[a] + w * f[b]);
                    }
                }
            }
            best
        })
        .collect()
}

/// Value of a 2x2 zero-sum game for the row maximiser.
pub fn value_2x2(g: [[f64; 2]; 2]) -> f64 {
    let lower = (0..2)
        .map(|i| g[i][0].min(g[i][1]))
        .fold(f64::NEG_INFINITY, f64::max);
    let upper = (0..2)
        .map(|j| g[0][j].max(g[1][j]))
        .fold(f64::INFINITY, f64::min);
    if (upper - lower).abs() < 1e-15 {
        return lower;
    }
    let den = g[0][0] - g[0][1] - g[1][0] + g[1][1];
    (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / den
}

/// Exhaustive policy iteration on the two-state grid MDP: belief `i/m` on
/// the first state, a split to any bracketing pair `(a, b)`, stage payoff
/// `u` at the posterior, then the pushed posterior rounded to its two grid
/// neighbours in proportion. Every policy is evaluated exactly.
pub fn grid_mdp_value(u: impl Fn(f64) -> f64, m2: [[f64; 2]; 2], m: usize, delta: f64) -> Vec<f64> {
    let n = m + 1;
    let p = |i: usize| i as f64 / m as f64;
    let us: Vec<f64> = (0..n).map(|i| u(p(i))).collect();
    let next: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|j| {
            let q = p(j) * m2[0][0] + (1.0 - p(j)) * m2[1][0];
            let pos = (q * m as f64).clamp(0.0, m as f64);
            let lo = (pos.floor() as usize).min(m - 1);
            let w = pos - lo as f64;
            vec![(lo, 1.0 - w), (lo + 1, w)]
        })
        .collect();
    let actions = |i: usize| -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![vec![(i, 1.0)]];
        for a in 0..=i {
            for b in i..n {
                if a < b && (a < i || b > i) {
                    let w = (i - a) as f64 / (b - a) as f64;
                    out.push(vec![(a, 1.0 - w), (b, w)]);
                }
            }
        }
        out
    };
    let all: Vec<_> = (0..n).map(actions).collect();
    let q_of = |v: &[f64], j: usize| -> f64 {
        (1.0 - delta) * us[j] + delta * next[j].iter().map(|&(l, w)| w * v[l]).sum::<f64>()
    };
    let mut choice = vec![0usize; n];
    let mut v = vec![0.0; n];
    for _ in 0..10_000 {
        let mut a = DMatrix::<f64>::identity(n, n);
        let mut r = DVector::<f64>::zeros(n);
        for i in 0..n {
            for &(j, w) in &all[i][choice[i]] {
                r[i] += w * (1.0 - delta) * us[j];
                for &(l, x) in &next[j] {
                    a[(i, l)] -= delta * w * x;
                }
            }
        }
        let sol = a.lu().solve(&r).expect("policy evaluation is non-singular");
        v = sol.iter().cloned().collect();
        let mut changed = false;
        for i in 0..n {
            let val =
                |act: &Vec<(usize, f64)>| act.iter().map(|&(j, w)| w * q_of(&v, j)).sum::<f64>();
            let current = val(&all[i][choice[i]]);
            let (best, best_val) = all[i]
                .iter()
                .enumerate()
                .map(|(k, act)| (k, val(act)))
                .fold((choice[i], current), |acc, x| {
                    if x.1 > acc.1 + 1e-13 {
                        x
                    } else {
                        acc
                    }
                });
            if best != choice[i] && best_val > current + 1e-13 {
                choice[i] = best;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
    panic!("policy iteration did not settle");
}
