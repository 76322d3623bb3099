use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::grid::SimplexGrid;
use crate::markov::{l1, Belief, StochasticMatrix};
use crate::persuasion::envelope::ConcaveEnvelope;
use crate::persuasion::solver::{check_delta, BellmanModel};
use crate::persuasion::value::GridValueFunction;
use crate::persuasion::PersuasionInstance;

/// Slack under which the trivial split is preferred to a revealing one.
pub const TOL_EXTRACT: f64 = 1e-9;
/// Default cap on the support of a posterior law.
pub const DEFAULT_SUPPORT_CAP: usize = 100_000;
const MERGE_SCALE: f64 = 1e10;

/// A finite distribution over beliefs with a prescribed barycenter.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    atoms: Vec<(f64, Belief)>,
}

impl Split {
    /// Validates weights and the barycenter against `xi`.
    pub fn new(atoms: Vec<(f64, Belief)>, xi: &Belief) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSplit("no atoms".into()));
        }
        let k = xi.k();
        let mut total = 0.0;
        let mut bary = vec![0.0; k];
        for (w, b) in &atoms {
            if !(*w > 0.0) {
                return Err(Error::InvalidSplit(format!("weight {w} is not positive")));
            }
            if b.k() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: b.k(),
                });
            }
            total += w;
            for (acc, p) in bary.iter_mut().zip(b.as_slice()) {
                *acc += w * p;
            }
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidSplit(format!("weights sum to {total}")));
        }
        let gap = l1(&bary, xi.as_slice());
        if gap > 1e-9 {
            return Err(Error::InvalidSplit(format!(
                "barycenter off by {gap:e} in l1"
            )));
        }
        Ok(Split { atoms })
    }

    pub fn trivial(xi: &Belief) -> Self {
        Split {
            atoms: vec![(1.0, xi.clone())],
        }
    }

    pub fn atoms(&self) -> &[(f64, Belief)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn barycenter(&self) -> Belief {
        let k = self.atoms[0].1.k();
        let mut bary = vec![0.0; k];
        for (w, b) in &self.atoms {
            for (acc, p) in bary.iter_mut().zip(b.as_slice()) {
                *acc += w * p;
            }
        }
        Belief::from_raw(bary)
    }

    /// Expected stage payoff `sum_s alpha_s u(xi_s)`.
    pub fn expected_payoff(&self, instance: &PersuasionInstance) -> Result<f64> {
        self.atoms.iter().map(|(w, b)| Ok(w * instance.u(b)?)).sum()
    }
}

/// How beliefs move between stages when forwarding a policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushMode {
    /// `p -> pM` exactly.
    Exact,
    /// `p -> pM`, then split without bias onto the grid points that
    /// interpolate the value function at `pM`. This is the transition of
    /// the grid MDP the solver actually optimises.
    GridRounded,
}

/// The stationary splitting policy that is greedy for a value function.
#[derive(Debug, Clone)]
pub struct SplitPolicy {
    instance: PersuasionInstance,
    matrix: StochasticMatrix,
    delta: f64,
    value: GridValueFunction,
    objective: ConcaveEnvelope,
    grid_table: OnceLock<Arc<GridTable>>,
}

impl SplitPolicy {
    pub fn new(
        value: &GridValueFunction,
        instance: &PersuasionInstance,
        m: &StochasticMatrix,
        delta: f64,
    ) -> Result<Self> {
        check_delta(delta)?;
        let grid = value.grid().clone();
        let model = BellmanModel::new(grid.clone(), instance, m, delta)?;
        let f = model.objective(value)?;
        let hint = if grid.k() > 2 {
            value.hull().ok()
        } else {
            None
        };
        let objective = ConcaveEnvelope::build_with_hint(grid, f, hint.map(|h| h.as_ref()))?;
        Ok(SplitPolicy {
            instance: instance.clone(),
            matrix: m.clone(),
            delta,
            value: value.clone(),
            objective,
            grid_table: OnceLock::new(),
        })
    }

    pub fn value(&self) -> &GridValueFunction {
        &self.value
    }

    pub fn instance(&self) -> &PersuasionInstance {
        &self.instance
    }

    pub fn matrix(&self) -> &StochasticMatrix {
        &self.matrix
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn grid(&self) -> &Arc<SimplexGrid> {
        self.value.grid()
    }

    /// The Bellman objective `(1 - delta) u(xi) + delta v(xi M)`.
    pub fn objective_at(&self, xi: &[f64]) -> Result<f64> {
        let d = self.delta;
        let cont = if d == 0.0 {
            0.0
        } else {
            self.value.eval(&self.matrix.apply(xi))?
        };
        Ok((1.0 - d) * self.instance.u_raw(xi) + d * cont)
    }

    /// Envelope of the objective at `xi`; equals `v(xi)` at a fixed point.
    pub fn envelope_at(&self, xi: &[f64]) -> Result<f64> {
        self.objective.eval(xi)
    }

    /// Atoms as grid indices, or `None` when the trivial split is optimal.
    fn split_indices(&self, xi: &[f64]) -> Result<Option<Vec<(usize, f64)>>> {
        if xi.iter().any(|&p| p >= 1.0) {
            return Ok(None);
        }
        let direct = self.objective_at(xi)?;
        let env = self.objective.eval(xi)?;
        if direct >= env - TOL_EXTRACT {
            return Ok(None);
        }
        let atoms = self.objective.locate(xi)?;
        if atoms.len() < 2 {
            return Ok(None);
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        Ok(Some(
            atoms.into_iter().map(|(j, w)| (j, w / total)).collect(),
        ))
    }

    /// Optimal split of `xi`: no revelation when the objective already
    /// touches its envelope at `xi`, otherwise the spanning hull vertices.
    pub fn split(&self, xi: &Belief) -> Result<Split> {
        if xi.k() != self.grid().k() {
            return Err(Error::DimensionMismatch {
                expected: self.grid().k(),
                got: xi.k(),
            });
        }
        match self.split_indices(xi.as_slice())? {
            None => Ok(Split::trivial(xi)),
            Some(atoms) => {
                let g = self.grid();
                let atoms = atoms.into_iter().map(|(j, w)| (w, g.belief(j))).collect();
                Split::new(atoms, xi)
            }
        }
    }

    /// The policy and grid-rounded dynamics tabulated on every grid point.
    pub fn grid_table(&self) -> Result<Arc<GridTable>> {
        if let Some(t) = self.grid_table.get() {
            return Ok(t.clone());
        }
        let t = Arc::new(GridTable::build(self)?);
        Ok(self.grid_table.get_or_init(|| t).clone())
    }

    fn round_push(&self, xi: &[f64]) -> Result<Vec<(usize, f64)>> {
        self.value.interpolation_atoms(&self.matrix.apply(xi))
    }
}

/// A split policy restricted to grid beliefs, with grid-rounded transitions.
/// Index-based so that simulations avoid any allocation per stage.
#[derive(Debug, Clone)]
pub struct GridTable {
    pub u: Vec<f64>,
    /// Atoms `(grid index, weight)` of the optimal split at each grid point.
    pub splits: Vec<Vec<(usize, f64)>>,
    /// `sum_s alpha_s u(xi_s)` for the optimal split at each grid point.
    pub stage_payoff: Vec<f64>,
    /// Grid-rounded law of `xi M` for each grid point.
    pub pushes: Vec<Vec<(usize, f64)>>,
}

impl GridTable {
    fn build(policy: &SplitPolicy) -> Result<Self> {
        let g = policy.grid();
        let u = policy.instance.sample_u(g)?;
        let mut splits = Vec::with_capacity(g.len());
        let mut pushes = Vec::with_capacity(g.len());
        let mut stage_payoff = Vec::with_capacity(g.len());
        for i in 0..g.len() {
            let s = policy
                .split_indices(g.point(i))?
                .unwrap_or_else(|| vec![(i, 1.0)]);
            stage_payoff.push(s.iter().map(|&(j, w)| w * u[j]).sum());
            splits.push(s);
            pushes.push(policy.round_push(g.point(i))?);
        }
        Ok(GridTable {
            u,
            splits,
            stage_payoff,
            pushes,
        })
    }
}

/// Optimal split at `xi` for the Bellman objective built from `v`.
pub fn extract_optimal_split(
    v: &GridValueFunction,
    instance: &PersuasionInstance,
    m: &StochasticMatrix,
    delta: f64,
    xi: &Belief,
) -> Result<Split> {
    SplitPolicy::new(v, instance, m, delta)?.split(xi)
}

/// Law of the stage-`n` posterior when the policy is followed from prior `q`.
#[derive(Debug, Clone)]
pub struct PosteriorLaw {
    pub stage: usize,
    pub atoms: Vec<(f64, Belief)>,
    /// Mass dropped by support truncation (before renormalisation).
    pub truncated_mass: f64,
}

impl PosteriorLaw {
    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(w, _)| w).sum()
    }

    pub fn mean(&self) -> Belief {
        let k = self.atoms[0].1.k();
        let mut acc = vec![0.0; k];
        for (w, b) in &self.atoms {
            for (a, p) in acc.iter_mut().zip(b.as_slice()) {
                *a += w * p;
            }
        }
        Belief::from_raw(acc)
    }
}

#[derive(Default)]
struct Merger {
    atoms: BTreeMap<Vec<i64>, (f64, Vec<f64>)>,
}

impl Merger {
    fn add(&mut self, w: f64, b: &[f64]) {
        if w <= 0.0 {
            return;
        }
        let key = b.iter().map(|x| (x * MERGE_SCALE).round() as i64).collect();
        let e = self.atoms.entry(key).or_insert_with(|| (0.0, b.to_vec()));
        e.0 += w;
    }

    fn finish(self, stage: usize, cap: usize, truncate: bool) -> Result<PosteriorLaw> {
        let mut atoms: Vec<(f64, Vec<f64>)> = self.atoms.into_values().collect();
        let mut truncated_mass = 0.0;
        if atoms.len() > cap {
            if !truncate {
                return Err(Error::SupportExplosion { cap, stage });
            }
            atoms.sort_by(|a, b| b.0.total_cmp(&a.0));
            truncated_mass = atoms[cap..].iter().map(|a| a.0).sum();
            atoms.truncate(cap);
            let kept: f64 = atoms.iter().map(|a| a.0).sum();
            atoms.iter_mut().for_each(|a| a.0 /= kept);
        }
        Ok(PosteriorLaw {
            stage,
            atoms: atoms
                .into_iter()
                .map(|(w, b)| (w, Belief::from_raw(b)))
                .collect(),
            truncated_mass,
        })
    }
}

/// Posterior laws for stages `1..=n`, optionally truncating supports beyond
/// `cap` atoms instead of failing.
pub fn posterior_laws(
    policy: &SplitPolicy,
    q: &Belief,
    n: usize,
    mode: PushMode,
    cap: usize,
    truncate: bool,
) -> Result<Vec<PosteriorLaw>> {
    if n == 0 {
        return Err(Error::param("n", "stages start at 1"));
    }
    let g = policy.grid().clone();
    let mut prior: Vec<(f64, Vec<f64>)> = vec![(1.0, q.as_slice().to_vec())];
    let mut laws = Vec::with_capacity(n);
    for stage in 1..=n {
        let mut acc = Merger::default();
        for (w, b) in &prior {
            match policy.split_indices(b)? {
                None => acc.add(*w, b),
                Some(atoms) => atoms.iter().for_each(|&(j, a)| acc.add(w * a, g.point(j))),
            }
        }
        let law = acc.finish(stage, cap, truncate)?;
        if stage < n {
            let mut next = Merger::default();
            for (w, b) in &law.atoms {
                match mode {
                    PushMode::Exact => next.add(*w, &policy.matrix.apply(b.as_slice())),
                    PushMode::GridRounded => {
                        for (j, t) in policy.round_push(b.as_slice())? {
                            next.add(w * t, g.point(j));
                        }
                    }
                }
            }
            prior = next.atoms.into_values().collect();
        }
        laws.push(law);
    }
    Ok(laws)
}

/// `mu*_n`: the law of the stage-`n` posterior under the policy from `q`,
/// with exact belief dynamics.
pub fn posterior_law(policy: &SplitPolicy, q: &Belief, n: usize) -> Result<PosteriorLaw> {
    let mut laws = posterior_laws(policy, q, n, PushMode::Exact, DEFAULT_SUPPORT_CAP, false)?;
    Ok(laws.pop().expect("n >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::markov::push_belief;
    use crate::persuasion::{solve_discounted_value, SolverOptions};

    fn appendix_policy(delta: f64, m: usize) -> SplitPolicy {
        let (inst, mm) = instances::appendix_a();
        let g = Arc::new(SimplexGrid::new(2, m).unwrap());
        let sol = solve_discounted_value(&inst, &mm, delta, g, SolverOptions::default()).unwrap();
        SplitPolicy::new(&sol.value, &inst, &mm, delta).unwrap()
    }

    #[test]
    fn static_split_hits_segment_ends() {
        let pol = appendix_policy(0.0, 2000);
        let s = pol.split(&Belief::binary(0.25).unwrap()).unwrap();
        assert_eq!(s.len(), 2);
        let mut ps: Vec<f64> = s.atoms().iter().map(|(_, b)| b.as_slice()[0]).collect();
        ps.sort_by(f64::total_cmp);
        assert_eq!(ps, vec![0.0, 0.5]);
        assert!(s.barycenter().l1_distance(&Belief::binary(0.25).unwrap()) < 1e-12);
    }

    #[test]
    fn vertices_and_touching_points_are_not_split() {
        let pol = appendix_policy(0.5, 400);
        for s in 0..2 {
            let e = Belief::dirac(2, s);
            assert_eq!(pol.split(&e).unwrap(), Split::trivial(&e));
        }
        // u touches Cav u at p = 1/2
        let half = Belief::binary(0.5).unwrap();
        assert!(pol.split(&half).unwrap().is_trivial());
    }

    #[test]
    fn posterior_means_follow_the_chain() {
        let pol = appendix_policy(0.5, 2000);
        let (_, m) = instances::appendix_a();
        let pi = Belief::new(vec![0.25, 0.75]).unwrap();
        let laws =
            posterior_laws(&pol, &pi, 20, PushMode::Exact, DEFAULT_SUPPORT_CAP, false).unwrap();
        for law in &laws {
            assert!((law.total_mass() - 1.0).abs() < 1e-9);
            assert!(law.mean().l1_distance(&pi) < 1e-8);
        }
        let two = posterior_law(&pol, &pi, 2).unwrap();
        assert!(two.support_size() <= 4);
        let q = Belief::dirac(2, 0);
        let law = posterior_law(&pol, &q, 4).unwrap();
        let target = push_belief(&q, &m, 3).unwrap();
        assert!(law.mean().l1_distance(&target) < 1e-8);
        let rounded = posterior_laws(&pol, &q, 4, PushMode::GridRounded, 10, false).unwrap();
        assert!(rounded[3].mean().l1_distance(&target) < 1e-8);
    }

    #[test]
    fn support_cap_is_enforced() {
        let pol = appendix_policy(0.5, 2000);
        let q = Belief::dirac(2, 0);
        let err = posterior_laws(&pol, &q, 6, PushMode::Exact, 1, false);
        assert!(matches!(err, Err(Error::SupportExplosion { cap: 1, .. })));
        let laws = posterior_laws(&pol, &q, 6, PushMode::Exact, 1, true).unwrap();
        assert!(laws.iter().any(|l| l.truncated_mass > 0.0));
        assert!(laws.iter().all(|l| (l.total_mass() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn split_validation() {
        let xi = Belief::binary(0.5).unwrap();
        let bad = vec![
            (0.5, Belief::dirac(2, 0)),
            (0.5, Belief::binary(0.2).unwrap()),
        ];
        assert!(Split::new(bad, &xi).is_err());
        let ok = vec![(0.5, Belief::dirac(2, 0)), (0.5, Belief::dirac(2, 1))];
        assert_eq!(Split::new(ok, &xi).unwrap().len(), 2);
        assert!(Split::new(vec![(1.0, Belief::dirac(2, 0)), (0.0, xi.clone())], &xi).is_err());
    }

    #[test]
    fn grid_table_is_consistent() {
        let pol = appendix_policy(0.5, 200);
        let t = pol.grid_table().unwrap();
        let g = pol.grid();
        for i in 0..g.len() {
            let s: f64 = t.splits[i].iter().map(|a| a.1).sum();
            assert!((s - 1.0).abs() < 1e-12);
            let p: f64 = t.splits[i].iter().map(|&(j, w)| w * g.point(j)[0]).sum();
            assert!((p - g.point(i)[0]).abs() < 1e-12);
            let pushed: f64 = t.pushes[i].iter().map(|&(j, w)| w * g.point(j)[0]).sum();
            assert!((pushed - pol.matrix().apply(g.point(i))[0]).abs() < 1e-12);
        }
    }
}
