//! Small dense complex matrices and the two Jacobi-type factorizations the
//! rest of the crate relies on: a cyclic two-sided Jacobi eigensolver for
//! Hermitian matrices and a one-sided (Hestenes) Jacobi SVD.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Off-diagonal Frobenius norm at which the eigensolver stops.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

const SVD_ORTH_TOL: f64 = 1e-15;
const SVD_MAX_SWEEPS: usize = 80;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        CMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// `self · self†`
    pub fn gram(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let s: C64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b.conj()).sum();
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn scale(&self, factor: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues (nonincreasing) and, optionally, the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<CMatrix>,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix using complex plane rotations.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation. Sweeps continue
/// until the off-diagonal Frobenius norm is at most [`JACOBI_OFF_TOL`]
/// (scaled by the matrix norm when that exceeds one).
pub fn hermitian_eigen(a: &CMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::InvalidParameter(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    let n = a.rows;
    let mut w = a.clone();
    for i in 0..n {
        w[(i, i)] = C64::new(w[(i, i)].re, 0.0);
    }
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let tol = JACOBI_OFF_TOL * a.frobenius_norm().max(1.0);

    let mut converged = n <= 1;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut w, v.as_mut(), p, q);
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > tol {
            return Err(Error::NoConvergence { algorithm: "Jacobi eigensolver", sweeps: JACOBI_MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| w[(i, i)].re).collect();
    let vectors = v.map(|v| CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok(HermitianEigen { values, vectors })
}

fn rotate(w: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize) {
    let b = w[(p, q)];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        w[(p, q)] = ZERO;
        w[(q, p)] = ZERO;
        return;
    }
    let phase_conj = (b / mag).conj();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase_conj * (-s);
    let u_qq = phase_conj * c;

    let n = w.rows();
    // columns: W <- W U
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = wkp * u_pp + wkq * u_qp;
        w[(k, q)] = wkp * u_pq + wkq * u_qq;
    }
    // rows: W <- U† W
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = u_pp.conj() * wpk + u_qp.conj() * wqk;
        w[(q, k)] = u_pq.conj() * wpk + u_qq.conj() * wqk;
    }
    w[(p, q)] = ZERO;
    w[(q, p)] = ZERO;
    w[(p, p)] = C64::new(app - t * mag, 0.0);
    w[(q, q)] = C64::new(aqq + t * mag, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * u_pp + vkq * u_qp;
            v[(k, q)] = vkp * u_pq + vkq * u_qq;
        }
    }
}

/// Thin SVD `M = U diag(s) V†`, singular values nonincreasing.
///
/// Columns of `u` belonging to a zero singular value are zero vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Vec<Vec<C64>>,
    pub s: Vec<f64>,
    pub v: Vec<Vec<C64>>,
}

/// One-sided Jacobi SVD. Orthogonality of the rotated columns is enforced
/// relative to their norms, so small singular values keep full absolute accuracy.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    // columns at roundoff level relative to the whole matrix cannot be made
    // relatively orthogonal; they are left alone
    let floor = (16.0 * f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut converged = cols <= 1;
    for _ in 0..SVD_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let alpha = norm_sqr(&a[p]);
                let beta = norm_sqr(&a[q]);
                let gamma = inner(&a[p], &a[q]);
                let g = gamma.norm();
                if g == 0.0 || alpha.min(beta) <= floor || g <= SVD_ORTH_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols_vec in [&mut a, &mut v] {
                    let (left, right) = cols_vec.split_at_mut(q);
                    let xp = &mut left[p];
                    let xq = &mut right[0];
                    for (ep, eq) in xp.iter_mut().zip(xq.iter_mut()) {
                        let aq = *eq * phase_conj;
                        let ap = *ep;
                        *ep = ap * c - aq * s;
                        *eq = ap * s + aq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { algorithm: "one-sided Jacobi SVD", sweeps: SVD_MAX_SWEEPS });
    }

    let mut triples: Vec<(f64, Vec<C64>, Vec<C64>)> = a
        .into_iter()
        .zip(v)
        .map(|(col, vcol)| {
            let sigma = norm_sqr(&col).sqrt();
            let u = if sigma > 0.0 { col.iter().map(|z| z / sigma).collect() } else { vec![ZERO; rows] };
            (sigma, u, vcol)
        })
        .collect();
    triples.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut out = Svd { u: Vec::new(), s: Vec::new(), v: Vec::new() };
    for (s, u, v) in triples {
        out.s.push(s);
        out.u.push(u);
        out.v.push(v);
    }
    Ok(out)
}
