//! Decomposition of a discounted average into shifted averages with a
//! larger discount rate, checked numerically on sequence prefixes.

use crate::error::{Error, Result};

/// Truncated value with a certified bound on the missing tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: f64,
    pub tail: f64,
}

/// `F_lambda^m(a) = sum_{n>=1} lambda (1 - lambda)^{n-1} a_{m+n}` on the
/// prefix `a_1..a_L`; terms past `L` are bounded by `tail_bound`.
pub fn sorin_f(a: &[f64], lambda: f64, m: usize, tail_bound: f64) -> Result<Truncated> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::param("lambda", "must lie in (0, 1]"));
    }
    if m >= a.len() {
        return Err(Error::param(
            "m",
            format!("shift {m} leaves nothing of a prefix of length {}", a.len()),
        ));
    }
    let q = 1.0 - lambda;
    let mut w = lambda;
    let mut value = 0.0;
    for &x in &a[m..] {
        value += w * x;
        w *= q;
    }
    Ok(Truncated {
        value,
        tail: tail_bound.abs() * q.powi((a.len() - m) as i32),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SorinCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Certified truncation slack on `|lhs - rhs|`.
    pub slack: f64,
    /// `max(0, |lhs - rhs| - slack)`.
    pub residual: f64,
}

impl SorinCheck {
    pub fn pass(&self) -> bool {
        self.residual <= 1e-9
    }
}

/// Compares `F_mu^0` with
/// `(mu/lambda) F_lambda^0 + (mu/lambda)(lambda - mu) sum_m (1 - mu)^m F_lambda^{m+1}`,
/// the outer sum cut at `terms`.
pub fn sorin_identity_check(
    a: &[f64],
    mu: f64,
    lambda: f64,
    terms: usize,
    bound: f64,
) -> Result<SorinCheck> {
    if !(mu > 0.0 && mu < lambda && lambda <= 1.0) {
        return Err(Error::param("mu", "need 0 < mu < lambda <= 1"));
    }
    if terms == 0 || terms >= a.len() {
        return Err(Error::param("terms", "need 0 < terms < prefix length"));
    }
    let lhs = sorin_f(a, mu, 0, bound)?;
    let head = sorin_f(a, lambda, 0, bound)?;
    let r = mu / lambda;
    let mut sum = 0.0;
    let mut sum_tail = 0.0;
    let mut w = 1.0;
    for m in 0..terms {
        let f = sorin_f(a, lambda, m + 1, bound)?;
        sum += w * f.value;
        sum_tail += w * f.tail;
        w *= 1.0 - mu;
    }
    // sum over m >= terms of (1 - mu)^m |F| <= bound (1 - mu)^terms / mu
    let cut = bound.abs() * (1.0 - mu).powi(terms as i32) / mu;
    let rhs = r * head.value + r * (lambda - mu) * sum;
    let slack = lhs.tail + r * head.tail + r * (lambda - mu) * (sum_tail + cut);
    if slack > 1e-10 {
        return Err(Error::param(
            "a",
            format!("prefix too short: truncation slack {slack:e} exceeds 1e-10"),
        ));
    }
    Ok(SorinCheck {
        lhs: lhs.value,
        rhs,
        slack,
        residual: ((lhs.value - rhs).abs() - slack).max(0.0),
    })
}
