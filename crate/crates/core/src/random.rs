//! Seeded random states, specs and partitions.
//!
//! All randomness flows from a `u64` root seed. Sub-streams (one per fuzz case
//! or optimizer restart) use [`child_seed`] so results do not depend on thread
//! scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gwstates::GWSpec;
use crate::linalg::{inner, norm_sqr, CMatrix, C64, ZERO};
use crate::qstate::{DensityMatrix, PartyPartition, PureState};

pub type SeededRng = ChaCha8Rng;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(root: u64, index: u64) -> u64 {
    splitmix64(root ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector(rng: &mut impl Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| gaussian_complex(rng)).collect()
}

pub fn random_pure(rng: &mut impl Rng, dims: Vec<usize>) -> Result<PureState> {
    let len = dims.iter().product();
    PureState::normalized(dims, gaussian_vector(rng, len))
}

/// `m × r` matrix with orthonormal columns (`r ≤ m`), Gaussian then Gram–Schmidt.
pub fn random_isometry(rng: &mut impl Rng, m: usize, r: usize) -> CMatrix {
    assert!(r <= m, "isometry needs r <= m");
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut v = gaussian_vector(rng, m);
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = norm_sqr(&v).sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_fn(m, r, |i, j| cols[j][i])
}

/// Random density matrix of the given rank: Gaussian mixture of `rank` random vectors.
pub fn random_density(rng: &mut impl Rng, dims: Vec<usize>, rank: usize) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    let mut mat = CMatrix::zeros(total, total);
    let mut weight = 0.0;
    for _ in 0..rank.max(1) {
        let v = gaussian_vector(rng, total);
        weight += norm_sqr(&v);
        mat = mat.add(&CMatrix::outer(&v));
    }
    DensityMatrix::new(dims, mat.scale(C64::new(1.0 / weight, 0.0)))
}

/// Options for [`random_gw_spec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwSampling {
    /// Probability that a party's coefficient row is set to zero.
    pub zero_row_prob: f64,
    /// Restrict coefficients to real values.
    pub real: bool,
}

impl Default for GwSampling {
    fn default() -> Self {
        GwSampling { zero_row_prob: 0.0, real: false }
    }
}

/// Gaussian GW coefficients with vacuum weight `p`. At least one row stays nonzero.
pub fn random_gw_spec(rng: &mut impl Rng, n: usize, d: usize, p: f64, opts: GwSampling) -> Result<GWSpec> {
    let keep_row = rng.random_range(0..n);
    let a = (0..n)
        .map(|j| {
            let zero = j != keep_row && rng.random_bool(opts.zero_row_prob.clamp(0.0, 1.0));
            (0..d)
                .map(|_| {
                    let z = gaussian_complex(rng);
                    match (zero, opts.real) {
                        (true, _) => ZERO,
                        (false, true) => C64::new(z.re, 0.0),
                        (false, false) => z,
                    }
                })
                .collect()
        })
        .collect();
    GWSpec::normalized(a, p)
}

/// Random partition of `0..n` into `groups` nonempty groups, covering all parties.
pub fn random_partition(rng: &mut impl Rng, n: usize, groups: usize) -> Result<PartyPartition> {
    let groups = groups.clamp(1, n.max(1));
    let mut parties: Vec<usize> = (0..n).collect();
    parties.shuffle(rng);
    let mut out: Vec<Vec<usize>> = parties[..groups].iter().map(|&p| vec![p]).collect();
    for &p in &parties[groups..] {
        let g = rng.random_range(0..groups);
        out[g].push(p);
    }
    for g in &mut out {
        g.sort_unstable();
    }
    PartyPartition::new(out)
}
