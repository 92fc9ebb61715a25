//! Generalized W-class states and their relatives.
//!
//! A [`GWSpec`] holds the excitation amplitudes `a[j][i]` (party `j`, level
//! `i+1`) of `Σ_{j,i} a_{ji} |0…(i+1)_j…0⟩` over `n` parties of local dimension
//! `d+1`, plus the vacuum weight `p` used by the GWV superposition and the
//! partially coherent (PCS) mixture.

mod format;

pub use format::{parse_spec, write_spec};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::measures;
use crate::qstate::{CoarseGrain, DensityMatrix, PureState};
pub use crate::qstate::PartyPartition;

pub const SPEC_NORM_TOL: f64 = 1e-12;
/// Agreement required between the additivity route and the direct pure-state route.
pub const ONE_VS_REST_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GWSpec {
    n: usize,
    d: usize,
    a: Vec<Vec<C64>>,
    p: f64,
    ancilla: Option<Vec<C64>>,
}

impl GWSpec {
    /// `a` has `n` rows of `d` coefficients; `Σ|a_{ji}|² = 1` within [`SPEC_NORM_TOL`].
    pub fn new(a: Vec<Vec<C64>>, p: f64) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::InvalidState(format!("GW state needs at least 2 parties, got {n}")));
        }
        let d = a[0].len();
        if d < 1 {
            return Err(Error::InvalidState("GW state needs at least one excitation level".into()));
        }
        if a.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidState("coefficient rows have different lengths".into()));
        }
        let norm: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > SPEC_NORM_TOL {
            return Err(Error::InvalidState(format!("coefficients have squared norm {norm}, expected 1")));
        }
        check_p(p)?;
        Ok(GWSpec { n, d, a, p, ancilla: None })
    }

    /// Like [`GWSpec::new`] but rescales the coefficients to unit norm first.
    pub fn normalized(a: Vec<Vec<C64>>, p: f64) -> Result<Self> {
        let norm: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("all coefficients are zero".into()));
        }
        Self::new(a.into_iter().map(|row| row.into_iter().map(|z| z / norm).collect()).collect(), p)
    }

    /// Uniform coefficients `a_{ji} = 1/√(nd)`.
    pub fn symmetric_w(n: usize, d: usize) -> Result<Self> {
        let c = C64::new(1.0 / ((n * d) as f64).sqrt(), 0.0);
        Self::new(vec![vec![c; d]; n], 1.0)
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        check_p(p)?;
        self.p = p;
        Ok(self)
    }

    /// Ancilla coefficients over levels `1..=d` for [`purify_pcs`].
    pub fn with_ancilla(mut self, ancilla: Vec<C64>) -> Result<Self> {
        if ancilla.len() != self.d {
            return Err(Error::InvalidState(format!("ancilla has {} levels, expected {}", ancilla.len(), self.d)));
        }
        let norm: f64 = ancilla.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > SPEC_NORM_TOL {
            return Err(Error::InvalidState(format!("ancilla has squared norm {norm}, expected 1")));
        }
        self.ancilla = Some(ancilla);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coefficients(&self) -> &[Vec<C64>] {
        &self.a
    }

    pub fn ancilla(&self) -> Option<&[C64]> {
        self.ancilla.as_deref()
    }

    pub fn local_dim(&self) -> usize {
        self.d + 1
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.d + 1; self.n]
    }

    /// `‖v_j‖² = Σ_i |a_{ji}|²`
    pub fn party_weight(&self, j: usize) -> f64 {
        self.a[j].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn group_weight(&self, group: &[usize]) -> f64 {
        group.iter().map(|&j| self.party_weight(j)).sum()
    }

    fn stride(&self, j: usize) -> usize {
        (self.d + 1).pow((self.n - 1 - j) as u32)
    }

    fn excitation_amplitudes(&self, scale: f64) -> Vec<C64> {
        let mut amps = vec![ZERO; (self.d + 1).pow(self.n as u32)];
        for (j, row) in self.a.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                amps[(i + 1) * self.stride(j)] += c * scale;
            }
        }
        amps
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("vacuum weight p = {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_party(spec: &GWSpec, s: usize) -> Result<()> {
    if s >= spec.n {
        return Err(Error::InvalidPartition(format!("party {s} out of range for {} parties", spec.n)));
    }
    Ok(())
}

/// The GW state `Σ_{j,i} a_{ji}|0…i_j…0⟩`. The vacuum weight `p` is ignored.
pub fn build_gw(spec: &GWSpec) -> PureState {
    PureState::from_parts_unchecked(spec.dims(), spec.excitation_amplitudes(1.0))
}

/// `√p |W⟩ + √(1−p) |0…0⟩`
pub fn build_gwv(spec: &GWSpec) -> PureState {
    let mut amps = spec.excitation_amplitudes(spec.p.sqrt());
    amps[0] += C64::new((1.0 - spec.p).sqrt(), 0.0);
    PureState::from_parts_unchecked(spec.dims(), amps)
}

/// `p |W⟩⟨W| + (1−p) |0…0⟩⟨0…0|`
pub fn build_pcs_mixture(spec: &GWSpec) -> DensityMatrix {
    let w = spec.excitation_amplitudes(1.0);
    let mut mat = CMatrix::outer(&w).scale(C64::new(spec.p, 0.0));
    mat[(0, 0)] += C64::new(1.0 - spec.p, 0.0);
    DensityMatrix::from_parts_unchecked(spec.dims(), mat)
}

/// Purification of the PCS mixture on `n+1` parties:
/// `√p |W⟩|0⟩ + √(1−p) |0…0⟩|φ⟩` with `|φ⟩ = Σ_i a_{n+1,i}|i⟩` (default `|1⟩`).
pub fn purify_pcs(spec: &GWSpec) -> PureState {
    let default_anc: Vec<C64> = (0..spec.d).map(|i| if i == 0 { C64::new(1.0, 0.0) } else { ZERO }).collect();
    let anc = spec.ancilla.clone().unwrap_or(default_anc);
    let w = spec.excitation_amplitudes(spec.p.sqrt());
    let ld = spec.d + 1;
    let mut amps = vec![ZERO; w.len() * ld];
    for (k, c) in w.iter().enumerate() {
        amps[k * ld] = *c;
    }
    let vac = (1.0 - spec.p).sqrt();
    for (i, c) in anc.iter().enumerate() {
        amps[i + 1] += c * vac;
    }
    let mut dims = spec.dims();
    dims.push(ld);
    PureState::from_parts_unchecked(dims, amps)
}

/// Closed form `2p‖v_s‖‖v_t‖` for the concurrence (and concurrence of assistance)
/// of the two-party reduced state of the GWV state.
///
/// This is a conjectured closed form; the test suite validates it against the
/// convex-roof oracle in both directions.
pub fn pairwise_concurrence_gw(spec: &GWSpec, s: usize, t: usize) -> Result<f64> {
    check_party(spec, s)?;
    check_party(spec, t)?;
    if s == t {
        return Err(Error::InvalidPartition(format!("pairwise concurrence needs two distinct parties, got {s} twice")));
    }
    Ok(2.0 * spec.p * (spec.party_weight(s) * spec.party_weight(t)).sqrt())
}

/// Closed form for two disjoint groups of parties, each treated as one party.
pub fn group_pair_concurrence(spec: &GWSpec, g1: &[usize], g2: &[usize]) -> Result<f64> {
    let pair = PartyPartition::new(vec![g1.to_vec(), g2.to_vec()])?;
    pair.check_range(spec.n)?;
    Ok(2.0 * spec.p * (spec.group_weight(g1) * spec.group_weight(g2)).sqrt())
}

/// Two-group reduced state of the GWV state, each group coarse-grained to a single party.
pub fn group_pair_state(spec: &GWSpec, g1: &[usize], g2: &[usize]) -> Result<DensityMatrix> {
    let pair = PartyPartition::new(vec![g1.to_vec(), g2.to_vec()])?;
    pair.check_range(spec.n)?;
    let keep = pair.parties();
    let reduced = build_gwv(spec).reduced(&keep)?;
    let pos = |p: &usize| keep.iter().position(|k| k == p).expect("kept party");
    let local = PartyPartition::new(vec![g1.iter().map(pos).collect(), g2.iter().map(pos).collect()])?;
    reduced.coarse_grain(&local)
}

/// Group-pair concurrence computed numerically: coarse-grain, compress each
/// group onto its (rank ≤ 2) local support, then apply the Wootters formula.
pub fn group_pair_concurrence_numeric(spec: &GWSpec, g1: &[usize], g2: &[usize]) -> Result<f64> {
    let rho = group_pair_state(spec, g1, g2)?;
    measures::wootters_concurrence_2qubit(&measures::project_to_effective_2x2(&rho)?)
}

/// `C_{P_s | rest}` of the pure GWV state for a partition covering all parties,
/// from the additivity `C² = Σ_{k≠s} C²_{P_s P_k}` over numerically computed
/// group-pair concurrences. Fails if it disagrees with the direct pure-state
/// concurrence across `P_s | rest` by more than [`ONE_VS_REST_TOL`].
pub fn onevsrest_concurrence_gw(spec: &GWSpec, partition: &PartyPartition, s: usize) -> Result<f64> {
    partition.check_range(spec.n)?;
    if !partition.covers(spec.n) {
        return Err(Error::InvalidPartition(format!("partition {partition} must cover all {} parties", spec.n)));
    }
    if s >= partition.len() {
        return Err(Error::InvalidPartition(format!("group {s} out of range for {} groups", partition.len())));
    }
    let groups = partition.groups();
    let mut sum_sq = 0.0;
    for (k, g) in groups.iter().enumerate() {
        if k != s {
            sum_sq += group_pair_concurrence_numeric(spec, &groups[s], g)?.powi(2);
        }
    }
    let additive = sum_sq.sqrt();
    let rest: Vec<usize> = groups.iter().enumerate().filter(|(k, _)| *k != s).flat_map(|(_, g)| g.clone()).collect();
    if rest.is_empty() {
        return Ok(0.0);
    }
    let cut = PartyPartition::bipartition(groups[s].clone(), rest)?;
    let direct = measures::concurrence_pure(&build_gwv(spec), &cut)?;
    if (additive - direct).abs() > ONE_VS_REST_TOL {
        return Err(Error::NumericMismatch(format!(
            "one-vs-rest concurrence: additivity gives {additive}, pure state gives {direct}"
        )));
    }
    Ok(additive)
}
