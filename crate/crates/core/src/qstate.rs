//! Dense multi-qudit states.
//!
//! Basis layout is row-major over parties: party 0 is the most significant
//! digit, so the basis state with level `i` at party `j` and `0` elsewhere
//! sits at index `i * stride(j)` where `stride(j)` is the product of the
//! dimensions of parties `j+1..n`. Party indices are 0-based throughout.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIG_CLAMP, 0)` are roundoff and clamp to zero; anything lower is an error.
pub const EIG_CLAMP: f64 = 1e-10;
/// Singular values at or below this are treated as exact zeros in Schmidt decompositions.
pub const SCHMIDT_ZERO: f64 = 1e-15;
/// Tolerance for the matrix-power vs eigenvalue cross-check in [`trace_power`].
pub const TRACE_POWER_XCHECK: f64 = 1e-9;

/// Ordered list of disjoint, nonempty groups of party indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartyPartition {
    groups: Vec<Vec<usize>>,
}

impl PartyPartition {
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (gi, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::InvalidPartition(format!("group {gi} is empty")));
            }
            for &p in g {
                if !seen.insert(p) {
                    return Err(Error::InvalidPartition(format!("party {p} appears in more than one group")));
                }
            }
        }
        if groups.is_empty() {
            return Err(Error::InvalidPartition("no groups".into()));
        }
        Ok(PartyPartition { groups })
    }

    /// Every party in its own group, in index order.
    pub fn singletons(n: usize) -> Self {
        PartyPartition { groups: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn bipartition(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        Self::new(vec![left, right])
    }

    /// `|`-separated groups of `,`-separated indices, e.g. `"0,1|2|3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let groups = s
            .split('|')
            .map(|g| {
                g.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::InvalidPartition(format!("bad party index {t:?} in {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// All parties mentioned, ascending.
    pub fn parties(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.groups.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// Parties in group order (concatenation of the groups).
    pub fn flattened(&self) -> Vec<usize> {
        self.groups.iter().flatten().copied().collect()
    }

    pub fn check_range(&self, n_parties: usize) -> Result<()> {
        match self.groups.iter().flatten().find(|&&p| p >= n_parties) {
            Some(p) => Err(Error::InvalidPartition(format!("party {p} out of range for {n_parties} parties"))),
            None => Ok(()),
        }
    }

    pub fn covers(&self, n_parties: usize) -> bool {
        self.parties().len() == n_parties && self.check_range(n_parties).is_ok()
    }

    /// Validates a two-group cut covering all `n_parties`.
    pub fn check_bipartition(&self, n_parties: usize) -> Result<()> {
        if self.groups.len() != 2 {
            return Err(Error::InvalidPartition(format!("cut has {} groups, expected 2", self.groups.len())));
        }
        self.check_range(n_parties)?;
        if !self.covers(n_parties) {
            return Err(Error::InvalidPartition(format!("cut {self} does not cover all {n_parties} parties")));
        }
        Ok(())
    }
}

impl fmt::Display for PartyPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|g| g.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidState("dimension list is empty".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidState(format!("local dimension {d} < 2")));
    }
    Ok(dims.iter().product())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Linear offsets of every row-major multi-index over `parties` (in the given order).
fn offsets(dims: &[usize], parties: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in parties {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for digit in 0..dims[p] {
                next.push(base + digit * st[p]);
            }
        }
        out = next;
    }
    out
}

fn complement(n: usize, keep: &[usize]) -> Vec<usize> {
    (0..n).filter(|p| !keep.contains(p)).collect()
}

fn sorted_keep(n: usize, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidPartition("keep set is empty".into()));
    }
    let set: BTreeSet<usize> = keep.iter().copied().collect();
    if let Some(&p) = set.iter().find(|&&p| p >= n) {
        return Err(Error::InvalidPartition(format!("party {p} out of range for {n} parties")));
    }
    Ok(set.into_iter().collect())
}

/// Normalized pure state over a list of local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amps.len() != total {
            return Err(Error::InvalidState(format!("{} amplitudes for total dimension {total}", amps.len())));
        }
        let norm = linalg::norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(PureState { dims, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(dims, amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = check_dims(&dims)?;
        if index >= total {
            return Err(Error::InvalidState(format!("basis index {index} >= {total}")));
        }
        let mut amps = vec![ZERO; total];
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { dims, amps })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amps: Vec<C64>) -> Self {
        PureState { dims, amps }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        PureState { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims.clone(), mat: CMatrix::outer(&self.amps) }
    }

    /// Reduced density matrix on `keep` (parties in ascending order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = sorted_keep(self.n_parties(), keep)?;
        let rest = complement(self.n_parties(), &keep);
        let k_off = offsets(&self.dims, &keep);
        let t_off = offsets(&self.dims, &rest);
        let m = CMatrix::from_fn(k_off.len(), t_off.len(), |a, t| self.amps[k_off[a] + t_off[t]]);
        let dims = keep.iter().map(|&p| self.dims[p]).collect();
        Ok(DensityMatrix { dims, mat: m.gram() })
    }

    /// Amplitudes as a `dim(left) x dim(right)` matrix for a two-group cut.
    pub fn bipartite_matrix(&self, cut: &PartyPartition) -> Result<CMatrix> {
        cut.check_bipartition(self.n_parties())?;
        let l_off = offsets(&self.dims, &cut.groups()[0]);
        let r_off = offsets(&self.dims, &cut.groups()[1]);
        Ok(CMatrix::from_fn(l_off.len(), r_off.len(), |a, b| self.amps[l_off[a] + r_off[b]]))
    }

    /// Schmidt decomposition across a two-group cut.
    pub fn schmidt(&self, cut: &PartyPartition) -> Result<SchmidtDecomposition> {
        let m = self.bipartite_matrix(cut)?;
        SchmidtDecomposition::from_matrix(&m)
    }
}

/// `|ψ⟩ = Σ_k coeffs[k] |left_k⟩|right_k⟩`, coefficients nonincreasing and strictly positive.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coeffs: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    /// From the amplitude matrix `M[a][b]` of `Σ M_ab |a⟩|b⟩`.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let f = linalg::svd(m)?;
        // M = U S V†  =>  |ψ⟩ = Σ s_k |u_k⟩ ⊗ |conj(v_k)⟩
        let mut out = SchmidtDecomposition { coeffs: Vec::new(), left: Vec::new(), right: Vec::new() };
        for ((s, u), v) in f.s.into_iter().zip(f.u).zip(f.v) {
            if s <= SCHMIDT_ZERO {
                continue;
            }
            out.coeffs.push(s);
            out.left.push(u);
            out.right.push(v.into_iter().map(|z| z.conj()).collect());
        }
        Ok(out)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|&&c| c > tol).count()
    }

    /// Schmidt probabilities `λ_k = coeffs[k]²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c * c).collect()
    }

    /// Amplitudes in cut order (left group digits most significant).
    pub fn reconstruct(&self) -> Vec<C64> {
        let dl = self.left.first().map_or(0, Vec::len);
        let dr = self.right.first().map_or(0, Vec::len);
        let mut out = vec![ZERO; dl * dr];
        for ((c, l), r) in self.coeffs.iter().zip(&self.left).zip(&self.right) {
            for (a, la) in l.iter().enumerate() {
                for (b, rb) in r.iter().enumerate() {
                    out[a * dr + b] += la * rb * *c;
                }
            }
        }
        out
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix with its local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        let rho = DensityMatrix { dims, mat };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, mat: CMatrix) -> Self {
        DensityMatrix { dims, mat }
    }

    /// Checks every density-matrix invariant, including the spectrum.
    pub fn validate(&self) -> Result<()> {
        let total = check_dims(&self.dims)?;
        if self.mat.rows() != total || !self.mat.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix for total dimension {total}",
                self.mat.rows(),
                self.mat.cols()
            )));
        }
        let dev = self.mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        eigvals_hermitian(self).map(|_| ())
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|`; weights must be nonnegative and sum to one.
    pub fn mixture(terms: &[(f64, &PureState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dims = first.1.dims().to_vec();
        let total: f64 = terms.iter().map(|t| t.0).sum();
        if terms.iter().any(|t| t.0 < 0.0) || (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("mixture weights must be >= 0 and sum to 1 (sum {total})")));
        }
        let mut mat = CMatrix::zeros(first.1.total_dim(), first.1.total_dim());
        for (w, psi) in terms {
            if psi.dims() != dims.as_slice() {
                return Err(Error::InvalidState("mixture members have different dimensions".into()));
            }
            mat = mat.add(&CMatrix::outer(psi.amps()).scale(C64::new(*w, 0.0)));
        }
        Ok(DensityMatrix { dims, mat })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        let mat = CMatrix::from_real_diagonal(&vec![1.0 / total as f64; total]);
        Ok(DensityMatrix { dims, mat })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// `ρ_A ⊗ ρ_B`
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { dims, mat: self.mat.kron(&other.mat) }
    }
}

/// Reduced state over `keep`; kept parties appear in ascending index order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = sorted_keep(rho.n_parties(), keep)?;
    if keep.len() == rho.n_parties() {
        return Ok(rho.clone());
    }
    let rest = complement(rho.n_parties(), &keep);
    let k_off = offsets(&rho.dims, &keep);
    let t_off = offsets(&rho.dims, &rest);
    let mat = CMatrix::from_fn(k_off.len(), k_off.len(), |a, b| {
        t_off.iter().map(|&t| rho.mat[(k_off[a] + t, k_off[b] + t)]).sum()
    });
    let dims = keep.iter().map(|&p| rho.dims[p]).collect();
    Ok(DensityMatrix { dims, mat })
}

/// Re-indexes a state so that each partition group becomes a single party
/// whose dimension is the product of its members' dimensions.
pub trait CoarseGrain: Sized {
    fn coarse_grain(&self, partition: &PartyPartition) -> Result<Self>;
}

impl CoarseGrain for PureState {
    /// The partition must cover every party; a pure state cannot drop parties and stay pure.
    fn coarse_grain(&self, partition: &PartyPartition) -> Result<Self> {
        partition.check_range(self.n_parties())?;
        if !partition.covers(self.n_parties()) {
            return Err(Error::InvalidPartition(format!(
                "partition {partition} must cover all {} parties of a pure state",
                self.n_parties()
            )));
        }
        let map = offsets(&self.dims, &partition.flattened());
        let amps = map.iter().map(|&i| self.amps[i]).collect();
        let dims = group_dims(&self.dims, partition);
        Ok(PureState { dims, amps })
    }
}

impl CoarseGrain for DensityMatrix {
    /// Parties outside the partition are traced out first.
    fn coarse_grain(&self, partition: &PartyPartition) -> Result<Self> {
        partition.check_range(self.n_parties())?;
        let kept = partition.parties();
        let reduced = partial_trace(self, &kept)?;
        // positions of the original parties inside the reduced state
        let position = |p: usize| kept.iter().position(|&k| k == p).expect("party in keep set");
        let order: Vec<usize> = partition.flattened().into_iter().map(position).collect();
        let map = offsets(&reduced.dims, &order);
        let mat = CMatrix::from_fn(map.len(), map.len(), |a, b| reduced.mat[(map[a], map[b])]);
        let dims = group_dims(&self.dims, partition);
        Ok(DensityMatrix { dims, mat })
    }
}

fn group_dims(dims: &[usize], partition: &PartyPartition) -> Vec<usize> {
    partition.groups().iter().map(|g| g.iter().map(|&p| dims[p]).product()).collect()
}

/// Schmidt decomposition of `state` across `cut`.
pub fn schmidt(state: &PureState, cut: &PartyPartition) -> Result<SchmidtDecomposition> {
    state.schmidt(cut)
}

/// Spectrum of a density matrix, nonincreasing, with the roundoff clamp applied.
pub fn eigvals_hermitian(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let dev = rho.mat.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let eig = linalg::hermitian_eigen(&rho.mat, false)?;
    clamp_spectrum(eig.values)
}

pub(crate) fn clamp_spectrum(mut values: Vec<f64>) -> Result<Vec<f64>> {
    for v in values.iter_mut() {
        if *v < -EIG_CLAMP {
            return Err(Error::NegativeEigenvalue(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(values)
}

/// `Tr ρ^q`. For `q ∈ {2, 3}` the value comes from direct matrix products and
/// is cross-checked against the eigenvalue route.
pub fn trace_power(rho: &DensityMatrix, q: f64) -> Result<f64> {
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::InvalidParameter(format!("trace power needs q > 0, got {q}")));
    }
    let spectral = || -> Result<f64> { Ok(eigvals_hermitian(rho)?.iter().map(|l| l.powf(q)).sum()) };
    let direct = if q == 2.0 {
        rho.mat.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>()
    } else if q == 3.0 {
        let sq = rho.mat.matmul(&rho.mat);
        let n = rho.total_dim();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (sq[(i, j)] * rho.mat[(j, i)]).re).sum::<f64>()
    } else {
        return spectral();
    };
    let check = spectral()?;
    if (direct - check).abs() > TRACE_POWER_XCHECK {
        return Err(Error::NumericMismatch(format!(
            "Tr rho^{q}: matrix products give {direct}, eigenvalues give {check}"
        )));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![2, 2], vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]).unwrap()
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// 0.3|0001⟩ + 0.4|0010⟩ + 0.5|0100⟩ + √0.5|1000⟩
    fn four_qubit_example() -> PureState {
        let mut amps = vec![ZERO; 16];
        amps[0b0001] = r(0.3);
        amps[0b0010] = r(0.4);
        amps[0b0100] = r(0.5);
        amps[0b1000] = r(0.5f64.sqrt());
        PureState::new(vec![2; 4], amps).unwrap()
    }

    #[test]
    fn partition_parse_and_display() {
        let p = PartyPartition::parse("0,1|2|3").unwrap();
        assert_eq!(p.groups(), &[vec![0, 1], vec![2], vec![3]]);
        assert_eq!(p.to_string(), "0,1|2|3");
        assert!(PartyPartition::parse("0|0").is_err());
        assert!(PartyPartition::parse("0||1").is_err());
        assert!(PartyPartition::parse("a").is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell().density().partial_trace(&[0]).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn keep_all_is_identity() {
        let rho = four_qubit_example().density();
        assert_eq!(rho.partial_trace(&[3, 1, 0, 2]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell().density();
        assert!(matches!(rho.partial_trace(&[]), Err(Error::InvalidPartition(_))));
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn example_reduced_to_three_parties() {
        let psi = four_qubit_example();
        let rho = psi.density().partial_trace(&[0, 1, 2]).unwrap();
        let mut phi = vec![ZERO; 8];
        phi[0b001] = r(0.4);
        phi[0b010] = r(0.5);
        phi[0b100] = r(0.5f64.sqrt());
        let mut expected = CMatrix::outer(&phi);
        expected[(0, 0)] += r(0.09);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
        assert!((linalg::norm_sqr(&phi) - 0.91).abs() < 1e-15);
        let ev = eigvals_hermitian(&rho).unwrap();
        assert!((ev[0] - 0.91).abs() < 1e-12);
        assert!((ev[1] - 0.09).abs() < 1e-12);
        assert!(ev[2..].iter().all(|&v| v.abs() < 1e-12));
        assert!((trace_power(&rho, 2.0).unwrap() - 0.8362).abs() < 1e-12);
        // same result straight from the pure state
        assert!(psi.reduced(&[2, 0, 1]).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn eigvals_of_simple_states() {
        let d = DensityMatrix::new(vec![2], CMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        let ev = eigvals_hermitian(&d).unwrap();
        assert!((ev[0] - 0.7).abs() < 1e-15 && (ev[1] - 0.3).abs() < 1e-15);
        let mm = DensityMatrix::maximally_mixed(vec![3]).unwrap();
        for v in eigvals_hermitian(&mm).unwrap() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eigvals_rejects_invalid_input() {
        let neg = DensityMatrix::from_parts_unchecked(vec![2], CMatrix::from_real_diagonal(&[1.1, -0.1]));
        assert!(matches!(eigvals_hermitian(&neg), Err(Error::NegativeEigenvalue(_))));
        let mut m = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = r(0.1);
        let skew = DensityMatrix::from_parts_unchecked(vec![2], m);
        assert!(matches!(eigvals_hermitian(&skew), Err(Error::NotHermitian(_))));
        let tiny = DensityMatrix::from_parts_unchecked(vec![2], CMatrix::from_real_diagonal(&[1.0 + 5e-11, -5e-11]));
        assert_eq!(eigvals_hermitian(&tiny).unwrap()[1], 0.0);
    }

    #[test]
    fn trace_power_basics() {
        let pure = bell().density();
        for q in [0.5, 2.0, 3.0, 3.7] {
            assert!((trace_power(&pure, q).unwrap() - 1.0).abs() < 1e-10);
        }
        let mm = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert!((trace_power(&mm, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_power(&mm, 0.0).is_err());
        assert!(trace_power(&mm, -1.0).is_err());
    }

    #[test]
    fn schmidt_of_product_and_bell() {
        let cut = PartyPartition::bipartition(vec![0], vec![1]).unwrap();
        let prod = PureState::basis(vec![2, 2], 0).unwrap();
        let s = prod.schmidt(&cut).unwrap();
        assert_eq!(s.coeffs.len(), 1);
        assert!((s.coeffs[0] - 1.0).abs() < 1e-15);
        let s = bell().schmidt(&cut).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.coeffs.len(), 2);
        assert!(s.coeffs.iter().all(|c| (c - h).abs() < 1e-14));
    }

    #[test]
    fn schmidt_requires_bipartition() {
        let psi = four_qubit_example();
        assert!(psi.schmidt(&PartyPartition::singletons(4)).is_err());
        assert!(psi.schmidt(&PartyPartition::parse("0|1").unwrap()).is_err());
    }

    #[test]
    fn schmidt_reconstructs_in_cut_order() {
        let psi = four_qubit_example();
        let cut = PartyPartition::parse("2,0|3,1").unwrap();
        let s = psi.schmidt(&cut).unwrap();
        let rebuilt = s.reconstruct();
        let direct = psi.bipartite_matrix(&cut).unwrap();
        let err: f64 = rebuilt.iter().zip(direct.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-12);
        assert!((s.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grain_pure_three_qubits() {
        let amps: Vec<C64> = (0..8).map(|i| r(i as f64 + 1.0)).collect();
        let psi = PureState::normalized(vec![2, 2, 2], amps).unwrap();
        let p = PartyPartition::parse("0,1|2").unwrap();
        let cg = psi.coarse_grain(&p).unwrap();
        assert_eq!(cg.dims(), &[4, 2]);
        assert_eq!(cg.amps(), psi.amps());
        let swapped = psi.coarse_grain(&PartyPartition::parse("2|0,1").unwrap()).unwrap();
        assert_eq!(swapped.dims(), &[2, 4]);
        assert_eq!(swapped.amps()[1], psi.amps()[2]);
        assert_eq!(psi.coarse_grain(&PartyPartition::singletons(3)).unwrap(), psi);
        assert!(psi.coarse_grain(&PartyPartition::parse("0|1").unwrap()).is_err());
    }

    #[test]
    fn coarse_grain_density_traces_uncovered_parties() {
        let psi = four_qubit_example();
        let p = PartyPartition::parse("2|0").unwrap();
        let cg = psi.density().coarse_grain(&p).unwrap();
        let reduced = psi.reduced(&[0, 2]).unwrap();
        assert_eq!(cg.dims(), &[2, 2]);
        // swap party order by hand
        let swap = [0usize, 2, 1, 3];
        let expected = CMatrix::from_fn(4, 4, |a, b| reduced.matrix()[(swap[a], swap[b])]);
        assert!(cg.matrix().max_abs_diff(&expected) < 1e-15);
    }
}
