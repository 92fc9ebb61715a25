//! Brute-force convex-roof (minimum) and assistance (maximum) extensions of a
//! pure-state measure over the pure-state decompositions of a small mixed state.
//!
//! Every `m`-member decomposition of `ρ = Σ_k μ_k |e_k⟩⟨e_k|` is
//! `|ψ̃_i⟩ = Σ_k V_ik √μ_k |e_k⟩` for an `m × r` isometry `V`. Each restart draws
//! a random isometry and refines it by random two-row unitary rotations, keeping
//! a rotation only when it improves the weighted measure. The step scale grows
//! after an accepted move and shrinks after a rejected one.
//!
//! The minimum found is an upper bound on the true roof, and the maximum a lower
//! bound on the true assistance.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::measures::{PureMeasure, TsallisParams};
use crate::qstate::{DensityMatrix, PartyPartition, PureState};
use crate::random;

pub const MAX_RANK: usize = 8;
pub const MAX_DIM: usize = 256;
/// Eigenvalues of `ρ` at or below this are treated as outside its support.
pub const SUPPORT_EIG_TOL: f64 = 1e-13;
/// Members lighter than this are dropped from the reported ensemble.
pub const MEMBER_WEIGHT_TOL: f64 = 1e-30;

const WINDOW: usize = 100;
const INITIAL_STEP: f64 = 0.5;
const STEP_GROW: f64 = 1.2;
const STEP_SHRINK: f64 = 0.98;
/// The window-improvement test only counts once the step has shrunk below this.
const SETTLED_STEP: f64 = 1e-3;
const MIN_STEP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Min => 1.0,
            Direction::Max => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerBudget {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Ensemble size is `rank + extra_members`.
    pub extra_members: usize,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget { restarts: 200, iters: 2000, tol: 1e-8, seed: 0, extra_members: 2 }
    }
}

impl OptimizerBudget {
    pub fn with_seed(self, seed: u64) -> Self {
        OptimizerBudget { seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("at least one restart is required".into()));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {} must be finite and non-negative", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Ensemble {
    /// `Σ_i p_i |ψ_i⟩⟨ψ_i|`
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.states.first().map_or(0, |s| s.total_dim());
        self.weights.iter().zip(&self.states).fold(CMatrix::zeros(dim, dim), |acc, (&w, s)| {
            acc.add(&CMatrix::outer(s.amps()).scale(C64::new(w, 0.0)))
        })
    }

    /// `Σ_i p_i E(ψ_i)`
    pub fn average(&self, measure: PureMeasure, cut: &PartyPartition) -> Result<f64> {
        self.weights.iter().zip(&self.states).map(|(&w, s)| Ok(w * measure.eval(s, cut)?)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub restarts_used: usize,
    /// Whether the winning restart met the tolerance before exhausting its iterations.
    pub converged: bool,
}

struct Problem {
    dims: Vec<usize>,
    measure: PureMeasure,
    /// `√μ_k |e_k⟩` in the state's own layout.
    components: Vec<Vec<C64>>,
    /// The same vectors reshaped across the cut.
    component_mats: Vec<CMatrix>,
}

struct Outcome {
    objective: f64,
    iso: CMatrix,
    converged: bool,
}

impl Problem {
    fn new(rho: &DensityMatrix, cut: &PartyPartition, measure: PureMeasure) -> Result<Self> {
        rho.validate()?;
        cut.check_bipartition(rho.n_parties())?;
        if rho.total_dim() > MAX_DIM {
            return Err(Error::BudgetExceeded(format!("dimension {} > {MAX_DIM}", rho.total_dim())));
        }
        let eig = linalg::hermitian_eigen(rho.matrix(), true)?;
        let vecs = eig.vectors.expect("eigenvectors requested");
        let components: Vec<Vec<C64>> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &mu)| mu > SUPPORT_EIG_TOL)
            .map(|(k, &mu)| vecs.column(k).into_iter().map(|z| z * mu.sqrt()).collect())
            .collect();
        if components.len() > MAX_RANK {
            return Err(Error::BudgetExceeded(format!("rank {} > {MAX_RANK}", components.len())));
        }
        let component_mats = components
            .iter()
            .map(|v| PureState::from_parts_unchecked(rho.dims().to_vec(), v.clone()).bipartite_matrix(cut))
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem { dims: rho.dims().to_vec(), measure, components, component_mats })
    }

    fn rank(&self) -> usize {
        self.components.len()
    }

    /// `p_i E(ψ_i)` for the unnormalized member `X_i`.
    fn term(&self, x: &CMatrix) -> Result<f64> {
        let w: f64 = x.as_slice().iter().map(|z| z.norm_sqr()).sum();
        if w <= MEMBER_WEIGHT_TOL {
            return Ok(0.0);
        }
        Ok(w * self.measure.eval_matrix(x)?)
    }

    fn member_mats(&self, iso: &CMatrix) -> Vec<CMatrix> {
        (0..iso.rows())
            .map(|i| {
                let first = &self.component_mats[0];
                let mut acc = CMatrix::zeros(first.rows(), first.cols());
                for (k, m) in self.component_mats.iter().enumerate() {
                    acc = acc.add(&m.scale(iso[(i, k)]));
                }
                acc
            })
            .collect()
    }

    fn run_restart(&self, budget: &OptimizerBudget, direction: Direction, index: usize) -> Result<Outcome> {
        let sign = direction.sign();
        let r = self.rank();
        let m = r + budget.extra_members;
        let mut rng = random::rng_from_seed(random::child_seed(budget.seed, index as u64));
        let mut iso = random::random_isometry(&mut rng, m, r);
        let mut members = self.member_mats(&iso);
        let mut terms = members.iter().map(|x| self.term(x)).collect::<Result<Vec<_>>>()?;
        let mut objective = sign * terms.iter().sum::<f64>();
        if m < 2 {
            return Ok(Outcome { objective, iso, converged: true });
        }

        let mut step = INITIAL_STEP;
        let mut window_start = objective;
        let mut converged = false;
        for iter in 1..=budget.iters {
            let i = rng.random_range(0..m);
            let mut j = rng.random_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let theta = step * rng.sample::<f64, _>(StandardNormal);
            let phase = C64::from_polar(1.0, rng.random::<f64>() * TAU);
            let (c, s) = (C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0));
            let xi = members[i].scale(c).add(&members[j].scale(-phase * s));
            let xj = members[i].scale(phase.conj() * s).add(&members[j].scale(c));
            let (ti, tj) = (self.term(&xi)?, self.term(&xj)?);
            let candidate = objective + sign * (ti + tj - terms[i] - terms[j]);
            if candidate < objective {
                objective = candidate;
                members[i] = xi;
                members[j] = xj;
                terms[i] = ti;
                terms[j] = tj;
                for k in 0..r {
                    let (vi, vj) = (iso[(i, k)], iso[(j, k)]);
                    iso[(i, k)] = c * vi - phase * s * vj;
                    iso[(j, k)] = phase.conj() * s * vi + c * vj;
                }
                step = (step * STEP_GROW).min(PI);
            } else {
                step *= STEP_SHRINK;
            }
            if step < MIN_STEP {
                converged = true;
                break;
            }
            if iter % WINDOW == 0 {
                let improvement = window_start - objective;
                if step < SETTLED_STEP && improvement <= budget.tol * objective.abs().max(1.0) {
                    converged = true;
                    break;
                }
                window_start = objective;
            }
        }
        Ok(Outcome { objective, iso, converged })
    }

    fn ensemble(&self, iso: &CMatrix) -> Result<Ensemble> {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for i in 0..iso.rows() {
            let mut v = vec![ZERO; self.components[0].len()];
            for (k, comp) in self.components.iter().enumerate() {
                let coeff = iso[(i, k)];
                v.iter_mut().zip(comp).for_each(|(a, b)| *a += coeff * b);
            }
            let w = linalg::norm_sqr(&v);
            if w > MEMBER_WEIGHT_TOL {
                weights.push(w);
                states.push(PureState::normalized(self.dims.clone(), v)?);
            }
        }
        Ok(Ensemble { weights, states })
    }
}

/// Optimizes `Σ_i p_i E(ψ_i)` over decompositions of `rho` across `cut`.
///
/// Restarts are independent and may run in parallel; the winner is the best
/// value with ties broken by the lower restart index, so the result does not
/// depend on scheduling.
pub fn roof_optimize(
    rho: &DensityMatrix,
    cut: &PartyPartition,
    measure: PureMeasure,
    direction: Direction,
    budget: &OptimizerBudget,
) -> Result<RoofResult> {
    budget.validate()?;
    let problem = Problem::new(rho, cut, measure)?;
    if problem.rank() == 0 {
        return Err(Error::InvalidState("density matrix has no support".into()));
    }
    let outcomes = (0..budget.restarts)
        .into_par_iter()
        .map(|idx| problem.run_restart(budget, direction, idx))
        .collect::<Result<Vec<_>>>()?;
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.objective.total_cmp(&b.objective).then(ia.cmp(ib)))
        .map(|(_, o)| o)
        .expect("at least one restart");
    let ensemble = problem.ensemble(&best.iso)?;
    let value = ensemble.average(measure, cut)?;
    Ok(RoofResult { value, ensemble, restarts_used: outcomes.len(), converged: best.converged })
}

/// Convex-roof concurrence `min Σ p_i C(ψ_i)`.
pub fn concurrence_mixed(rho: &DensityMatrix, cut: &PartyPartition, budget: &OptimizerBudget) -> Result<f64> {
    Ok(roof_optimize(rho, cut, PureMeasure::Concurrence, Direction::Min, budget)?.value)
}

/// Concurrence of assistance `max Σ p_i C(ψ_i)`.
pub fn concurrence_assist(rho: &DensityMatrix, cut: &PartyPartition, budget: &OptimizerBudget) -> Result<f64> {
    Ok(roof_optimize(rho, cut, PureMeasure::Concurrence, Direction::Max, budget)?.value)
}

/// Tsallis-q entanglement `min Σ p_i T_q(ψ_i)`.
pub fn tsallis_mixed(
    rho: &DensityMatrix,
    cut: &PartyPartition,
    params: TsallisParams,
    budget: &OptimizerBudget,
) -> Result<f64> {
    Ok(roof_optimize(rho, cut, PureMeasure::Tsallis(params), Direction::Min, budget)?.value)
}

/// Tsallis-q entanglement of assistance `max Σ p_i T_q(ψ_i)`.
pub fn tsallis_assist(
    rho: &DensityMatrix,
    cut: &PartyPartition,
    params: TsallisParams,
    budget: &OptimizerBudget,
) -> Result<f64> {
    Ok(roof_optimize(rho, cut, PureMeasure::Tsallis(params), Direction::Max, budget)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn cut01() -> PartyPartition {
        PartyPartition::bipartition(vec![0], vec![1]).unwrap()
    }

    fn small_budget(seed: u64) -> OptimizerBudget {
        OptimizerBudget { restarts: 20, iters: 2000, tol: 1e-10, seed, extra_members: 2 }
    }

    #[test]
    fn pure_input_is_trivial() {
        let psi = PureState::normalized(vec![2, 2], vec![r(0.6), ZERO, ZERO, r(0.8)]).unwrap();
        let c = measures::concurrence_pure(&psi, &cut01()).unwrap();
        for dir in [Direction::Min, Direction::Max] {
            let res = roof_optimize(&psi.density(), &cut01(), PureMeasure::Concurrence, dir, &small_budget(1)).unwrap();
            assert!((res.value - c).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_mixture_has_zero_roof() {
        let a = PureState::basis(vec![2, 2], 0).unwrap();
        let b = PureState::basis(vec![2, 2], 3).unwrap();
        let rho = DensityMatrix::mixture(&[(0.5, &a), (0.5, &b)]).unwrap();
        let p2 = TsallisParams::new(2.0).unwrap();
        assert!(tsallis_mixed(&rho, &cut01(), p2, &small_budget(2)).unwrap() < 1e-6);
        // the same mixture equals (|Φ+⟩⟨Φ+| + |Φ−⟩⟨Φ−|)/2, so assistance reaches 1/2
        assert!((tsallis_assist(&rho, &cut01(), p2, &small_budget(2)).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn ensemble_reconstructs_target() {
        let mut rng = random::rng_from_seed(9);
        let rho = random::random_density(&mut rng, vec![2, 3], 3).unwrap();
        let cut = cut01();
        let res = roof_optimize(&rho, &cut, PureMeasure::Concurrence, Direction::Min, &small_budget(3)).unwrap();
        assert!(res.ensemble.reconstruct().max_abs_diff(rho.matrix()) < 1e-8);
        assert!((res.ensemble.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let avg = res.ensemble.average(PureMeasure::Concurrence, &cut).unwrap();
        assert!((avg - res.value).abs() < 1e-10);
        assert_eq!(res.restarts_used, 20);
    }

    #[test]
    fn min_not_above_max() {
        let mut rng = random::rng_from_seed(10);
        let rho = random::random_density(&mut rng, vec![2, 2], 2).unwrap();
        let lo = concurrence_mixed(&rho, &cut01(), &small_budget(4)).unwrap();
        let hi = concurrence_assist(&rho, &cut01(), &small_budget(4)).unwrap();
        assert!(lo <= hi + 1e-9);
    }

    #[test]
    fn deterministic_under_seed() {
        let mut rng = random::rng_from_seed(11);
        let rho = random::random_density(&mut rng, vec![2, 2], 2).unwrap();
        let a = roof_optimize(&rho, &cut01(), PureMeasure::Concurrence, Direction::Min, &small_budget(5)).unwrap();
        let b = roof_optimize(&rho, &cut01(), PureMeasure::Concurrence, Direction::Min, &small_budget(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_limits() {
        let big = DensityMatrix::maximally_mixed(vec![3, 3]).unwrap();
        let err = concurrence_mixed(&big, &cut01(), &small_budget(0)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
        let huge = DensityMatrix::maximally_mixed(vec![16, 17]).unwrap();
        assert!(matches!(concurrence_mixed(&huge, &cut01(), &small_budget(0)), Err(Error::BudgetExceeded(_))));
        let rho = PureState::basis(vec![2, 2], 0).unwrap().density();
        let none = OptimizerBudget { restarts: 0, ..small_budget(0) };
        assert!(concurrence_mixed(&rho, &cut01(), &none).is_err());
        assert!(concurrence_mixed(&rho, &PartyPartition::singletons(3), &small_budget(0)).is_err());
    }
}
