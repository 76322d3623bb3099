//! Markovian persuasion: receiver best responses, the sender's stage payoff
//! `u`, concavification, the discounted Bellman operator and its optimal
//! splitting policy.

pub mod envelope;
mod policy;
mod solver;
mod value;

use std::fmt;
use std::sync::Arc;

pub use envelope::{upper_hull_1d, ConcaveEnvelope};
pub use policy::{
    extract_optimal_split, posterior_law, posterior_laws, GridTable, PosteriorLaw, PushMode, Split,
    SplitPolicy, DEFAULT_SUPPORT_CAP, TOL_EXTRACT,
};
pub use solver::{
    bellman_step, solve_discounted_value, Solution, SolverOptions, DEFAULT_EPS_STOP,
    DEFAULT_MAX_ITER,
};
pub use value::{concave_envelope, GridValueFunction};

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;
use crate::markov::Belief;

/// Relative tolerance used when comparing expected payoffs for ties.
const TIE_TOL: f64 = 1e-12;

type UtilityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// The sender's stage payoff, either induced by receiver best responses or
/// given directly as a function of the posterior.
#[derive(Clone)]
pub enum Utility {
    Tables {
        actions: Vec<String>,
        /// `sender[l][b]`, non-negative.
        sender: Vec<Vec<f64>>,
        /// `receiver[l][b]`.
        receiver: Vec<Vec<f64>>,
    },
    Analytic {
        name: String,
        func: Arc<UtilityFn>,
    },
}

impl fmt::Debug for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Utility::Tables {
                actions,
                sender,
                receiver,
            } => f
                .debug_struct("Tables")
                .field("actions", actions)
                .field("sender", sender)
                .field("receiver", receiver)
                .finish(),
            Utility::Analytic { name, .. } => write!(f, "Analytic({name})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PersuasionInstance {
    k: usize,
    utility: Utility,
}

impl PersuasionInstance {
    pub fn from_tables(
        actions: Vec<String>,
        sender: Vec<Vec<f64>>,
        receiver: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = sender.len();
        if k < 2 {
            return Err(Error::InvalidInstance("need at least 2 states".into()));
        }
        if actions.is_empty() {
            return Err(Error::InvalidInstance("need at least one action".into()));
        }
        if receiver.len() != k {
            return Err(Error::InvalidInstance(format!(
                "receiver table has {} rows, sender table {k}",
                receiver.len()
            )));
        }
        for (l, (v, w)) in sender.iter().zip(&receiver).enumerate() {
            if v.len() != actions.len() || w.len() != actions.len() {
                return Err(Error::InvalidInstance(format!(
                    "row {l} does not cover all {} actions",
                    actions.len()
                )));
            }
            if let Some(bad) = v.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "sender payoff {bad} in row {l} is negative or not finite"
                )));
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "receiver payoff in row {l} not finite"
                )));
            }
        }
        Ok(PersuasionInstance {
            k,
            utility: Utility::Tables {
                actions,
                sender,
                receiver,
            },
        })
    }

    /// Instance with a directly specified, non-negative payoff `u(xi)`.
    pub fn analytic(
        k: usize,
        name: impl Into<String>,
        func: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInstance("need at least 2 states".into()));
        }
        Ok(PersuasionInstance {
            k,
            utility: Utility::Analytic {
                name: name.into(),
                func: Arc::new(func),
            },
        })
    }

    /// Sender payoff constant `c` under every belief.
    pub fn constant(k: usize, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::InvalidInstance(
                "constant payoff must be non-negative".into(),
            ));
        }
        Self::from_tables(vec!["only".into()], vec![vec![c]; k], vec![vec![0.0]; k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn utility(&self) -> &Utility {
        &self.utility
    }

    fn check(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: xi.len(),
            });
        }
        Ok(())
    }

    /// The receiver's action at belief `xi`: maximise expected `W`, break
    /// ties by expected `V`, then by lowest index.
    pub fn receiver_best_action(&self, xi: &Belief) -> Result<usize> {
        self.check(xi.as_slice())?;
        match &self.utility {
            Utility::Tables {
                sender,
                receiver,
                actions,
            } => Ok(best_action(xi.as_slice(), sender, receiver, actions.len())),
            Utility::Analytic { name, .. } => Err(Error::Unsupported(format!(
                "instance `{name}` specifies u directly; it has no receiver actions"
            ))),
        }
    }

    /// Sender stage payoff `u(xi)`.
    pub fn u(&self, xi: &Belief) -> Result<f64> {
        self.check(xi.as_slice())?;
        Ok(self.u_raw(xi.as_slice()))
    }

    pub(crate) fn u_raw(&self, xi: &[f64]) -> f64 {
        match &self.utility {
            Utility::Tables {
                sender,
                receiver,
                actions,
            } => {
                let b = best_action(xi, sender, receiver, actions.len());
                xi.iter().zip(sender).map(|(p, row)| p * row[b]).sum()
            }
            Utility::Analytic { func, .. } => func(xi),
        }
    }

    pub fn sample_u(&self, grid: &SimplexGrid) -> Result<Vec<f64>> {
        if grid.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: grid.k(),
            });
        }
        let u: Vec<f64> = (0..grid.len()).map(|i| self.u_raw(grid.point(i))).collect();
        if let Some((i, bad)) = u
            .iter()
            .enumerate()
            .find(|(_, x)| !(**x >= 0.0) || !x.is_finite())
        {
            return Err(Error::InvalidInstance(format!(
                "u({:?}) = {bad} is negative or not finite",
                grid.point(i)
            )));
        }
        Ok(u)
    }

    /// `||u||_inf`: the largest sender payoff for table instances, the grid
    /// maximum for analytic ones.
    pub fn u_sup(&self, grid: &SimplexGrid) -> Result<f64> {
        match &self.utility {
            Utility::Tables { sender, .. } => Ok(sender
                .iter()
                .flat_map(|r| r.iter())
                .cloned()
                .fold(0.0, f64::max)),
            Utility::Analytic { .. } => Ok(self.sample_u(grid)?.into_iter().fold(0.0, f64::max)),
        }
    }
}

fn best_action(xi: &[f64], sender: &[Vec<f64>], receiver: &[Vec<f64>], n_actions: usize) -> usize {
    let expect = |table: &[Vec<f64>], b: usize| -> f64 {
        xi.iter().zip(table).map(|(p, row)| p * row[b]).sum()
    };
    let mut best = 0;
    let (mut bw, mut bv) = (expect(receiver, 0), expect(sender, 0));
    for b in 1..n_actions {
        let (w, v) = (expect(receiver, b), expect(sender, b));
        let tie = TIE_TOL * (1.0 + w.abs().max(bw.abs()));
        if w > bw + tie || ((w - bw).abs() <= tie && v > bv + TIE_TOL * (1.0 + v.abs())) {
            best = b;
            bw = w;
            bv = v;
        }
    }
    best
}
