//! Entanglement measures: concurrence, negativity and Tsallis-q entanglement
//! of pure states, the conversion function `f_q`, joint Tsallis entropies,
//! the two-qubit Wootters formula, and local-support compression.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::qstate::{self, DensityMatrix, PartyPartition, PureState};

/// Eigenvalues of `ρ` at or below this are dropped when forming Wootters' subnormalized vectors.
pub const WOOTTERS_RANK_TOL: f64 = 1e-14;
/// Marginal eigenvalues above this count towards a local support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Lower end of the `q` window where `f_q²` is increasing and convex.
pub fn q_window_low() -> f64 {
    (5.0 - 13f64.sqrt()) / 2.0
}

/// Upper end of the `q` window where `f_q²` is increasing and convex.
pub fn q_window_high() -> f64 {
    (5.0 + 13f64.sqrt()) / 2.0
}

/// Tsallis parameter `q > 0`, `q ≠ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsallisParams {
    q: f64,
}

impl TsallisParams {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::InvalidParameter(format!("Tsallis q must be positive and finite, got {q}")));
        }
        if q == 1.0 {
            return Err(Error::InvalidParameter("Tsallis q = 1 is excluded".into()));
        }
        Ok(TsallisParams { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `q ∈ [(5−√13)/2, (5+√13)/2]`: `f_q²` increasing and convex.
    pub fn in_convex_range(&self) -> bool {
        (q_window_low()..=q_window_high()).contains(&self.q)
    }

    /// `q ∈ [(5−√13)/2, 2] ∪ [3, (5+√13)/2]`: `f_q` increasing and concave.
    pub fn in_concave_range(&self) -> bool {
        (q_window_low()..=2.0).contains(&self.q) || (3.0..=q_window_high()).contains(&self.q)
    }
}

/// `f_q(x) = [1 − ((1+√(1−x))/2)^q − ((1−√(1−x))/2)^q] / (q−1)`, mapping `C²` to `T_q`
/// for Schmidt-rank-two pure states.
pub fn f_q(x: f64, params: TsallisParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("f_q argument {x} outside [0, 1]")));
    }
    Ok(f_q_unchecked(x, params.q))
}

pub(crate) fn f_q_unchecked(x: f64, q: f64) -> f64 {
    let r = (1.0 - x).max(0.0).sqrt();
    let hi = (1.0 + r) / 2.0;
    let lo = (1.0 - r) / 2.0;
    (1.0 - hi.powf(q) - lo.powf(q)) / (q - 1.0)
}

/// `g_q(y) = f_q(y²)`, i.e. `T_q` as a function of the concurrence itself.
pub fn g_q(y: f64, params: TsallisParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::InvalidParameter(format!("g_q argument {y} outside [0, 1]")));
    }
    Ok(f_q_unchecked(y * y, params.q))
}

/// Squared concurrence `2(1 − Tr ρ_A²)` of the (possibly unnormalized) vector
/// with amplitude matrix `m`, rescaled to unit norm.
///
/// Uses `(Tr ρ)² − Tr ρ² = 2 Σ |2×2 minors of m|²`. The minors of each row pair
/// sum to `‖r_i‖² ‖r_j − proj_{r_i} r_j‖²`, evaluated through the explicit
/// residual so there is no cancellation near product states.
pub fn concurrence_squared_of_matrix(m: &CMatrix) -> f64 {
    let norm2: f64 = m.as_slice().iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return 0.0;
    }
    let owned;
    let m = if m.rows() > m.cols() {
        owned = m.transpose();
        &owned
    } else {
        m
    };
    let mut minors = 0.0;
    for i in 0..m.rows() {
        let ri = m.row(i);
        let ni = linalg::norm_sqr(ri);
        if ni == 0.0 {
            continue;
        }
        for j in i + 1..m.rows() {
            let rj = m.row(j);
            let proj = linalg::inner(ri, rj) / ni;
            let resid: f64 = ri.iter().zip(rj).map(|(a, b)| (b - proj * a).norm_sqr()).sum();
            minors += ni * resid;
        }
    }
    4.0 * minors / (norm2 * norm2)
}

/// Eigenvalues of the smaller marginal of the vector with amplitude matrix `m`, normalized to sum one.
pub(crate) fn marginal_spectrum_of_matrix(m: &CMatrix) -> Result<Vec<f64>> {
    let small = if m.rows() <= m.cols() { m.gram() } else { m.adjoint().gram() };
    let tr = small.trace().re;
    if tr <= 0.0 {
        return Err(Error::InvalidState("zero vector has no marginal spectrum".into()));
    }
    let eig = linalg::hermitian_eigen(&small, false)?;
    Ok(eig.values.into_iter().map(|v| (v / tr).max(0.0)).collect())
}

/// Pure-state concurrence `√(2(1 − Tr ρ_A²))` with `ρ_A` the marginal of the first group.
pub fn concurrence_pure(state: &PureState, cut: &PartyPartition) -> Result<f64> {
    let m = state.bipartite_matrix(cut)?;
    Ok(concurrence_squared_of_matrix(&m).sqrt())
}

/// Pure-state negativity `(Σ_i √λ_i)² − 1` from the Schmidt coefficients.
pub fn negativity_pure(state: &PureState, cut: &PartyPartition) -> Result<f64> {
    let s = state.schmidt(cut)?;
    let sum: f64 = s.coeffs.iter().sum();
    Ok((sum * sum - 1.0).max(0.0))
}

/// `(1 − Σ λ_i^q)/(q − 1)` over the Schmidt probabilities.
pub fn tsallis_pure(state: &PureState, cut: &PartyPartition, params: TsallisParams) -> Result<f64> {
    let probs = state.schmidt(cut)?.probabilities();
    Ok(tsallis_of_spectrum(&probs, params.q))
}

pub(crate) fn tsallis_of_spectrum(spectrum: &[f64], q: f64) -> f64 {
    let s: f64 = spectrum.iter().map(|l| l.powf(q)).sum();
    // roundoff can push a pure product spectrum a few ulps below zero
    ((1.0 - s) / (q - 1.0)).max(0.0)
}

/// Tsallis entropy `(1 − Tr ρ^q)/(q − 1)` of a density matrix.
pub fn tsallis_entropy(rho: &DensityMatrix, params: TsallisParams) -> Result<f64> {
    Ok(((1.0 - qstate::trace_power(rho, params.q)?) / (params.q - 1.0)).max(0.0))
}

/// Joint-state Tsallis entropy for `q ∈ {2, 3}` via matrix powers. This is the
/// entropy of `ρ` itself, not a convex roof.
pub fn joint_tsallis_q23(rho: &DensityMatrix, q: u32) -> Result<f64> {
    if q != 2 && q != 3 {
        return Err(Error::InvalidParameter(format!(
            "joint matrix-power route supports q = 2 or 3 only, got {q}; use tsallis_entropy"
        )));
    }
    let q = f64::from(q);
    Ok((1.0 - qstate::trace_power(rho, q)?) / (q - 1.0))
}

/// Pure-state functional extended to mixtures by the roof oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PureMeasure {
    Concurrence,
    Negativity,
    Tsallis(TsallisParams),
}

impl PureMeasure {
    /// Value on the normalized version of the vector with amplitude matrix `m`.
    pub fn eval_matrix(&self, m: &CMatrix) -> Result<f64> {
        match self {
            PureMeasure::Concurrence => Ok(concurrence_squared_of_matrix(m).sqrt()),
            PureMeasure::Negativity => {
                let s: f64 = marginal_spectrum_of_matrix(m)?.iter().map(|l| l.sqrt()).sum();
                Ok((s * s - 1.0).max(0.0))
            }
            PureMeasure::Tsallis(p) => Ok(tsallis_of_spectrum(&marginal_spectrum_of_matrix(m)?, p.q)),
        }
    }

    pub fn eval(&self, state: &PureState, cut: &PartyPartition) -> Result<f64> {
        self.eval_matrix(&state.bipartite_matrix(cut)?)
    }

    pub fn label(&self) -> String {
        match self {
            PureMeasure::Concurrence => "concurrence".into(),
            PureMeasure::Negativity => "negativity".into(),
            PureMeasure::Tsallis(p) => format!("tsallis({})", p.q),
        }
    }
}

/// `σ_y ⊗ σ_y` in the computational basis (real).
fn spin_flip() -> CMatrix {
    let mut y = CMatrix::zeros(4, 4);
    y[(0, 3)] = -ONE;
    y[(1, 2)] = ONE;
    y[(2, 1)] = ONE;
    y[(3, 0)] = -ONE;
    y
}

/// Wootters concurrence `max(0, μ₁ − μ₂ − μ₃ − μ₄)` of a two-qubit state.
///
/// The `μ_i` are computed as the singular values of `τ_ij = ⟨x_i|x̃_j⟩` over the
/// subnormalized eigenvectors `|x_i⟩ = √λ_i |e_i⟩`; these coincide with the square
/// roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)` and avoid square roots
/// of roundoff-level eigenvalues.
pub fn wootters_concurrence_2qubit(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidState(format!("Wootters formula needs dims [2, 2], got {:?}", rho.dims())));
    }
    let eig = linalg::hermitian_eigen(rho.matrix(), true)?;
    let vecs = eig.vectors.expect("eigenvectors requested");
    let xs: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > WOOTTERS_RANK_TOL)
        .map(|(k, &l)| vecs.column(k).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    if xs.is_empty() {
        return Err(Error::InvalidState("zero matrix".into()));
    }
    let y = spin_flip();
    let tau = CMatrix::from_fn(xs.len(), xs.len(), |i, j| {
        let flipped: Vec<C64> = y.apply(&xs[j].iter().map(|z| z.conj()).collect::<Vec<_>>());
        linalg::inner(&xs[i], &flipped)
    });
    let s = linalg::svd(&tau)?.s;
    Ok((s[0] - s[1..].iter().sum::<f64>()).max(0.0))
}

/// Orthonormal basis (columns) of a local support, completed to at least `min_dim` vectors.
///
/// Vectors are chosen greedily from projected computational basis states, so a
/// support spanned by computational states maps to those states unchanged.
fn local_basis(marginal: &CMatrix, min_dim: usize) -> Result<(Vec<Vec<C64>>, usize)> {
    let d = marginal.rows();
    let eig = linalg::hermitian_eigen(marginal, true)?;
    let vecs = eig.vectors.expect("eigenvectors requested");
    let support: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > SUPPORT_TOL)
        .map(|(k, _)| vecs.column(k))
        .collect();
    let rank = support.len();
    let project = |v: &[C64], onto: &[Vec<C64>]| -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for u in onto {
            let c = linalg::inner(u, v);
            for (o, ui) in out.iter_mut().zip(u) {
                *o += ui * c;
            }
        }
        out
    };
    let mut chosen: Vec<Vec<C64>> = Vec::new();
    let target = rank.max(min_dim).min(d);
    // first the support, then its complement
    for phase in 0..2 {
        let want = if phase == 0 { rank } else { target };
        while chosen.len() < want {
            let mut best: Option<(f64, Vec<C64>)> = None;
            for j in 0..d {
                let mut e = vec![ZERO; d];
                e[j] = ONE;
                let mut r = if phase == 0 { project(&e, &support) } else { e };
                let back = project(&r, &chosen);
                for (ri, bi) in r.iter_mut().zip(back) {
                    *ri -= bi;
                }
                let n = linalg::norm_sqr(&r).sqrt();
                if best.as_ref().is_none_or(|(bn, _)| n > *bn + 1e-12) {
                    best = Some((n, r));
                }
            }
            let (n, r) = best.expect("nonempty basis");
            if n < 1e-8 {
                return Err(Error::NumericMismatch("could not complete a local support basis".into()));
            }
            chosen.push(r.into_iter().map(|z| z / n).collect());
        }
    }
    Ok((chosen, rank))
}

/// Compresses every party onto its local support (at least two dimensions each)
/// with an isometry; every local-unitary-invariant measure is unchanged.
pub fn compress_local_supports(rho: &DensityMatrix) -> Result<DensityMatrix> {
    compress_with_limit(rho, usize::MAX)
}

fn compress_with_limit(rho: &DensityMatrix, max_rank: usize) -> Result<DensityMatrix> {
    let mut iso = CMatrix::identity(1);
    let mut dims = Vec::with_capacity(rho.n_parties());
    for k in 0..rho.n_parties() {
        let marginal = rho.partial_trace(&[k])?;
        let (basis, rank) = local_basis(marginal.matrix(), 2)?;
        if rank > max_rank {
            return Err(Error::InvalidState(format!(
                "party {k} has local support rank {rank} > {max_rank}; not of GW pairwise form"
            )));
        }
        let w = CMatrix::from_fn(rho.dims()[k], basis.len(), |i, j| basis[j][i]);
        dims.push(basis.len());
        iso = iso.kron(&w);
    }
    let mat = iso.adjoint().matmul(rho.matrix()).matmul(&iso);
    Ok(DensityMatrix::from_parts_unchecked(dims, mat))
}

/// Isometric compression of a two-party state whose marginals have rank ≤ 2
/// onto an effective two-qubit state.
pub fn project_to_effective_2x2(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.n_parties() != 2 {
        return Err(Error::InvalidState(format!("expected two parties, got {}", rho.n_parties())));
    }
    compress_with_limit(rho, 2)
}
