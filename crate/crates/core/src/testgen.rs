//! Seeded instance generators and brute-force oracles.
//!
//! Everything here is deterministic in the seed: the same seed yields
//! bit-identical matrices.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::blocks::{Assembled, BlockDescriptor, BlockKind, DecompositionDescriptor, RegularPart};
use crate::error::{Error, Result};
use crate::matrix::{rank_of, ComplexMatrix, Tolerance, UnitaryFactor};
use crate::pair::MatrixPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Unitary,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScrambleSpec {
    pub seed: u64,
    pub kind: TransformKind,
    /// Upper bound on the 2-norm condition number of general transforms.
    pub condition_bound: f64,
}

impl ScrambleSpec {
    pub fn unitary(seed: u64) -> Self {
        Self {
            seed,
            kind: TransformKind::Unitary,
            condition_bound: 1.0,
        }
    }

    pub fn general(seed: u64, condition_bound: f64) -> Self {
        Self {
            seed,
            kind: TransformKind::General,
            condition_bound,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.condition_bound >= 1.0 && self.condition_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "condition bound must be finite and >= 1, got {}",
                self.condition_bound
            )));
        }
        Ok(())
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = Mat::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    // Fixing the phases of diag(R) makes the distribution Haar.
    ComplexMatrix::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Haar-distributed `n x n` unitary.
pub fn random_unitary(n: usize, seed: u64) -> UnitaryFactor {
    UnitaryFactor::new(haar_unitary(n, &mut rng(seed, 0))).expect("QR factor is unitary")
}

/// `T = U diag(s) V*` with `s` in `[1, cond]` (both ends attained when
/// `n >= 2`), together with `T^-1 = V diag(1/s) U*`.
pub fn random_well_conditioned(n: usize, cond: f64, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut r = rng(seed, 1);
    let u = haar_unitary(n, &mut r);
    let v = haar_unitary(n, &mut r);
    let mut s: Vec<f64> = (0..n).map(|_| cond.powf(r.random::<f64>())).collect();
    if n >= 2 {
        s[0] = 1.0;
        s[n - 1] = cond;
    }
    let scale = |m: &ComplexMatrix, d: &[f64]| ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * d[j]);
    let inv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
    let t = &scale(&u, &s) * &v.conjugate_transpose();
    let t_inv = &scale(&v, &inv) * &u.conjugate_transpose();
    (t, t_inv)
}

/// Random nonsingular matrix with singular values in `[0.5, 2]`.
pub fn random_regular_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed, 2);
    let u = haar_unitary(n, &mut r);
    let v = haar_unitary(n, &mut r);
    let s: Vec<f64> = (0..n).map(|_| 0.5 * 4f64.powf(r.random::<f64>())).collect();
    let us = ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)] * s[j]);
    &us * &v.conjugate_transpose()
}

/// Pair of independent random nonsingular matrices.
pub fn random_regular_pair(n: usize, seed: u64) -> MatrixPair {
    let a = random_regular_matrix(n, seed);
    let b = random_regular_matrix(n, seed ^ 0x9e37_79b9_7f4a_7c15);
    MatrixPair { first: a, second: b }
}

/// `T A conj(T)^-1`; for unitary `T` the coninverse is `T^T`.
pub fn scramble_consim(a: &ComplexMatrix, spec: &ScrambleSpec) -> Result<ComplexMatrix> {
    a.require_square()?;
    spec.validate()?;
    let n = a.rows();
    match spec.kind {
        TransformKind::Unitary => {
            let t = random_unitary(n, spec.seed);
            Ok(&(t.matrix() * a) * &t.matrix().transpose())
        }
        TransformKind::General => {
            let (t, t_inv) = random_well_conditioned(n, spec.condition_bound, spec.seed);
            Ok(&(&t * a) * &t_inv.conjugate())
        }
    }
}

/// `(S A R, S B conj(R))`.
pub fn scramble_pair(p: &MatrixPair, spec: &ScrambleSpec) -> Result<MatrixPair> {
    spec.validate()?;
    let (m, n) = p.shape();
    let seed_r = spec.seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(1);
    let (s, r) = match spec.kind {
        TransformKind::Unitary => (
            random_unitary(m, spec.seed).into_matrix(),
            random_unitary(n, seed_r).into_matrix(),
        ),
        TransformKind::General => (
            random_well_conditioned(m, spec.condition_bound, spec.seed).0,
            random_well_conditioned(n, spec.condition_bound, seed_r).0,
        ),
    };
    MatrixPair::new(
        &(&s * &p.first) * &r,
        &(&s * &p.second) * &r.conjugate(),
    )
}

/// Kernel-growth sequence of the semilinear operator `u -> A conj(u)`.
///
/// `M_0 = I`, `M_k = A conj(M_{k-1})` is the matrix of the k-th power of the
/// operator; `r_k = rank M_{k-1} - rank M_k` until it reaches zero. Ranks of
/// `M_k` use the cut `value * n * ||A||_2 * ||M_{k-1}||_2`, the scale of the
/// rounding error one more product can add. A cut tied to `||A||^k` instead
/// swamps the regular part once `A` is badly scaled.
pub fn consim_power_oracle(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<usize>> {
    a.require_square()?;
    a.require_finite()?;
    tol.validate()?;
    let n = a.rows();
    let norm = a.spectral_norm();
    let mut out = Vec::new();
    let mut m = ComplexMatrix::identity(n);
    let mut prev_rank = n;
    for _ in 1..=n {
        let prev_norm = m.spectral_norm();
        m = a.multiply(&m.conjugate())?;
        let rank = match *tol {
            Tolerance::Absolute(_) => rank_of(&m, tol)?,
            Tolerance::Relative(v) => {
                let cut = v * n as f64 * norm * prev_norm;
                if cut > 0.0 {
                    rank_of(&m, &Tolerance::Absolute(cut))?
                } else {
                    0
                }
            }
        };
        let r = prev_rank.saturating_sub(rank);
        if r == 0 {
            break;
        }
        out.push(r);
        prev_rank = rank;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemClass {
    Consimilarity,
    MixedPair,
}

/// All multisets of singular canonical blocks with total size `1..=max_total`
/// (size `n` for `J_n(0)` and for each pair family), assembled without a
/// regular part.
pub fn exhaustive_block_suite(max_total: usize, class: ProblemClass) -> Vec<(DecompositionDescriptor, Assembled)> {
    let kinds: Vec<BlockKind> = match class {
        ProblemClass::Consimilarity => (1..=max_total).map(|n| BlockKind::JordanZero { n }).collect(),
        ProblemClass::MixedPair => (1..=max_total)
            .flat_map(|n| {
                [
                    BlockKind::Fg { n },
                    BlockKind::Ji { n },
                    BlockKind::Fgt { n },
                    BlockKind::Ij { n },
                ]
            })
            .collect(),
    };
    let mut multisets = Vec::new();
    let mut current = Vec::new();
    enumerate(&kinds, 0, max_total, &mut current, &mut multisets);
    multisets
        .into_iter()
        .filter(|blocks| !blocks.is_empty())
        .map(|blocks| {
            let desc = match class {
                ProblemClass::Consimilarity => DecompositionDescriptor::matrix(blocks),
                ProblemClass::MixedPair => DecompositionDescriptor::pair(blocks),
            };
            let inst = desc.assemble().expect("suite descriptors are valid");
            (desc, inst)
        })
        .collect()
}

fn block_size(kind: &BlockKind) -> usize {
    match *kind {
        BlockKind::JordanZero { n }
        | BlockKind::Fg { n }
        | BlockKind::Fgt { n }
        | BlockKind::Ji { n }
        | BlockKind::Ij { n } => n,
        _ => unreachable!("suite uses singular blocks only"),
    }
}

fn enumerate(
    kinds: &[BlockKind],
    from: usize,
    budget: usize,
    current: &mut Vec<BlockDescriptor>,
    out: &mut Vec<Vec<BlockDescriptor>>,
) {
    if from == kinds.len() {
        out.push(current.clone());
        return;
    }
    let size = block_size(&kinds[from]);
    enumerate(kinds, from + 1, budget, current, out);
    let mut mult = 1;
    while mult * size <= budget {
        current.push(BlockDescriptor::new(kinds[from], mult));
        enumerate(kinds, from + 1, budget - mult * size, current, out);
        current.pop();
        mult += 1;
    }
}

/// Attaches a seeded random regular part of size `n` to a descriptor.
pub fn with_random_regular(desc: &DecompositionDescriptor, n: usize, seed: u64) -> DecompositionDescriptor {
    let regular = if desc.is_pair() {
        RegularPart::Pair(random_regular_pair(n, seed))
    } else {
        RegularPart::Matrix(random_regular_matrix(n, seed))
    };
    desc.clone().with_regular(regular)
}
