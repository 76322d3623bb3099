//! Built-in instances and seeded random panels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::markov::{invariant_distribution, StochasticMatrix};
use crate::persuasion::PersuasionInstance;

/// `u(p) = p(2 - 3|p - 1/2|) + (1 - p)p/10`, with `p` the mass on state 1.
pub fn appendix_a_u(p: f64) -> f64 {
    p * (2.0 - 3.0 * (p - 0.5).abs()) + (1.0 - p) * p / 10.0
}

/// Two states, `M = [[1/2, 1/2], [1/6, 5/6]]`, analytic `u`.
pub fn appendix_a() -> (PersuasionInstance, StochasticMatrix) {
    let inst = PersuasionInstance::analytic(2, "appendixA", |x: &[f64]| appendix_a_u(x[0]))
        .expect("two states");
    let m = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![1.0 / 6.0, 5.0 / 6.0]])
        .expect("stochastic");
    (inst, m)
}

/// Known discounted value of [`appendix_a`] at `p`.
pub fn appendix_a_closed_form(delta: f64, p: f64) -> f64 {
    if p <= 0.5 {
        2.05 * (3.0 * (delta - 1.0) * p - delta / 2.0) / (delta - 3.0)
    } else {
        (1.0 - delta) * appendix_a_u(p) + delta * 2.05 * ((delta - 1.0) * p - 0.5) / (delta - 3.0)
    }
}

/// The swap chain with `u(p) = p(1 - p)`.
pub fn periodic() -> (PersuasionInstance, StochasticMatrix) {
    let inst = PersuasionInstance::analytic(2, "periodic", |x: &[f64]| x[0] * (1.0 - x[0]))
        .expect("two states");
    let m = StochasticMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).expect("stochastic");
    (inst, m)
}

/// Looks up a built-in instance by id.
pub fn builtin(id: &str) -> Result<(PersuasionInstance, StochasticMatrix)> {
    match id {
        "appendixA" => Ok(appendix_a()),
        "periodic" => Ok(periodic()),
        other => Err(Error::Config(format!(
            "unknown instance id `{other}` (known: appendixA, periodic)"
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct PanelInstance {
    pub name: String,
    pub instance: PersuasionInstance,
    pub matrix: StochasticMatrix,
}

/// Smallest invariant mass allowed in the random panel. Keeps every
/// tested discount above `1 - c*/2` for deltas from 0.9 upwards.
pub const PANEL_MIN_MASS: f64 = 0.2;

/// Random ergodic instance: `M` mixes a random kernel with the uniform one
/// (so every entry is positive) and the payoff tables are uniform on
/// `[0, 1]` with `actions` receiver actions.
pub fn random_instance(rng: &mut impl Rng, k: usize, actions: usize) -> Result<PanelInstance> {
    if k < 2 || actions == 0 {
        return Err(Error::param("k", "need k >= 2 and at least one action"));
    }
    let eta = (PANEL_MIN_MASS * k as f64 + 0.05).min(0.95);
    loop {
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
                let s: f64 = raw.iter().sum();
                raw.iter()
                    .map(|x| (1.0 - eta) * x / s + eta / k as f64)
                    .collect()
            })
            .collect();
        let m = StochasticMatrix::new(rows)?;
        if m.min_invariant_mass() < PANEL_MIN_MASS {
            continue;
        }
        let table = |rng: &mut dyn rand::RngCore| -> Vec<Vec<f64>> {
            (0..k)
                .map(|_| (0..actions).map(|_| rng.random::<f64>()).collect())
                .collect()
        };
        let sender = table(rng);
        let receiver = table(rng);
        let names = (0..actions).map(|b| format!("b{b}")).collect();
        let instance = PersuasionInstance::from_tables(names, sender, receiver)?;
        return Ok(PanelInstance {
            name: String::new(),
            instance,
            matrix: m,
        });
    }
}

/// The seeded ergodic panel: the first half has two states, the rest three.
pub fn ergodic_panel(count: usize, seed: u64) -> Result<Vec<PanelInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let k = if i < count.div_ceil(2) { 2 } else { 3 };
            let mut p = random_instance(&mut rng, k, 3)?;
            p.name = format!("panel{i:02}_k{k}");
            debug_assert!(invariant_distribution(&p.matrix)
                .as_slice()
                .iter()
                .all(|&x| x > 0.0));
            Ok(p)
        })
        .collect()
}
