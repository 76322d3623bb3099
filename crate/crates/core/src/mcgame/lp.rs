//! Zero-sum matrix games by the simplex method.

use crate::error::{Error, Result};

/// Value and optimal mixed strategies of a zero-sum game (row maximises).
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
    /// `max_i (A q)_i - min_j (p A)_j`.
    pub duality_gap: f64,
}

const PIVOT_EPS: f64 = 1e-12;

/// Solves `max 1.y` subject to `B y <= 1`, `y >= 0` for a positive matrix
/// `B`, returning the primal `y` and dual `x` (Bland's rule, no cycling).
fn simplex_unit(b: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = b.len();
    let cols = b[0].len();
    let width = cols + rows + 1;
    let mut t: Vec<Vec<f64>> = b
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![0.0; width];
            row[..cols].copy_from_slice(r);
            row[cols + i] = 1.0;
            row[width - 1] = 1.0;
            row
        })
        .collect();
    // objective row holds reduced costs -c
    let mut obj = vec![0.0; width];
    obj[..cols].iter_mut().for_each(|c| *c = -1.0);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let cap = 50 * (rows + cols) + 1000;
    for _ in 0..cap {
        let Some(enter) = (0..width - 1).find(|&j| obj[j] < -PIVOT_EPS) else {
            let mut y = vec![0.0; cols];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < cols {
                    y[bv] = t[i][width - 1];
                }
            }
            let x = obj[cols..cols + rows].to_vec();
            return Ok((y, x));
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let a = t[i][enter];
            if a > PIVOT_EPS {
                let ratio = t[i][width - 1] / a;
                leave = match leave {
                    Some((l, r)) if ratio > r + 1e-15 => Some((l, r)),
                    Some((l, r)) if (ratio - r).abs() <= 1e-15 && basis[l] < basis[i] => {
                        Some((l, r))
                    }
                    _ => Some((i, ratio)),
                };
            }
        }
        // bounded: B > 0 keeps every column blocked
        let (l, _) = leave.ok_or_else(|| Error::Unsupported("unbounded game LP".into()))?;
        let piv = t[l][enter];
        t[l].iter_mut().for_each(|v| *v /= piv);
        let pivot_row = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != l {
                let f = row[enter];
                if f != 0.0 {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(v, p)| *v -= f * p);
                }
            }
        }
        let f = obj[enter];
        obj.iter_mut()
            .zip(&pivot_row)
            .for_each(|(v, p)| *v -= f * p);
        basis[l] = enter;
    }
    Err(Error::IterationCap {
        cap,
        context: "simplex pivots on a matrix game".into(),
    })
}

/// Value of the zero-sum game `A` with optimal strategies for both players.
pub fn matrix_game_value(a: &[Vec<f64>]) -> Result<GameSolution> {
    if a.is_empty() || a[0].is_empty() {
        return Err(Error::param("A", "empty matrix"));
    }
    let cols = a[0].len();
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::param("A", "ragged matrix"));
    }
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::param("A", "entries must be finite"));
    }
    let lo = a.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - lo;
    let b: Vec<Vec<f64>> = a
        .iter()
        .map(|r| r.iter().map(|x| x + shift).collect())
        .collect();
    let (y, x) = simplex_unit(&b)?;
    let z: f64 = y.iter().sum();
    let zx: f64 = x.iter().sum();
    let col: Vec<f64> = y.iter().map(|v| (v / z).max(0.0)).collect();
    let row: Vec<f64> = x.iter().map(|v| (v / zx).max(0.0)).collect();
    let normalise = |v: Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    let (row, col) = (normalise(row), normalise(col));
    let guarantee = (0..cols)
        .map(|j| a.iter().zip(&row).map(|(r, p)| p * r[j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let cap = a
        .iter()
        .map(|r| r.iter().zip(&col).map(|(x, q)| x * q).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = cap - guarantee;
    if gap > 1e-9 {
        return Err(Error::Unsupported(format!(
            "simplex ended with duality gap {gap:e}"
        )));
    }
    Ok(GameSolution {
        value: 1.0 / z - shift,
        row_strategy: row,
        col_strategy: col,
        duality_gap: gap.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_games() {
        let s = matrix_game_value(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        assert!(s.row_strategy.iter().all(|p| (p - 0.5).abs() < 1e-12));
        assert!(s.col_strategy.iter().all(|p| (p - 0.5).abs() < 1e-12));
        let s = matrix_game_value(&vec![vec![0.3; 3]; 2]).unwrap();
        assert!((s.value - 0.3).abs() < 1e-12);
        let s = matrix_game_value(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.row_strategy[0] - 1.0).abs() < 1e-12);
        // 2x2 closed form (ad - bc)/(a + d - b - c)
        let s = matrix_game_value(&[vec![3.0, -1.0], vec![-2.0, 4.0]]).unwrap();
        assert!((s.value - 10.0 / 10.0).abs() < 1e-12);
        assert!(matrix_game_value(&[]).is_err());
        assert!(matrix_game_value(&[vec![]]).is_err());
    }

    #[test]
    fn rock_paper_scissors() {
        let a = vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ];
        let s = matrix_game_value(&a).unwrap();
        assert!(s.value.abs() < 1e-12);
        assert!(s.row_strategy.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-9));
        assert!(s.duality_gap <= 1e-9);
    }
}
