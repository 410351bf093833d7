//! Staircase reduction under consimilarity `A -> S A conj(S)^-1`.
//!
//! Each step compresses the rows of the current matrix with a unitary `S`
//! and applies the coninverse column transformation, which for unitary `S`
//! is multiplication by `S^T` on the right:
//!
//! ```text
//! S A S^T = [ 0_r  0  ]
//!           [ *    A1 ]
//! ```
//!
//! The step repeats on `A1` until the trailing block is nonsingular. The
//! number `r_k` of rows removed at step `k` equals the number of Jordan
//! blocks `J_j(0)` with `j >= k`, so the singular part is
//! `J_1^(r1-r2) ⊕ J_2^(r2-r3) ⊕ ... ⊕ J_t^(rt)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{row_compress, ComplexMatrix, Tolerance, UnitaryFactor};

/// One staircase step.
#[derive(Clone, Debug)]
pub struct ConsimStep {
    pub transform: UnitaryFactor,
    /// Rows compressed to zero, `n - rank(A)`.
    pub r: usize,
    /// Trailing `(n - r) x (n - r)` block of `S A S^T`.
    pub next: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConsimResult {
    pub r_seq: Vec<usize>,
    /// Nonsingular trailing block `A_t`, possibly `0 x 0`.
    pub regular: ComplexMatrix,
    /// `Q` with `Q A Q^T` in staircase form.
    pub accumulated: UnitaryFactor,
    /// Frobenius norm of the declared-zero blocks of `Q A Q^T`.
    pub residual: f64,
    /// Absolute singular-value cut used for every rank decision.
    pub rank_cut: f64,
}

/// Multiplicities of the singular Jordan blocks `J_k(0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsimStructure {
    /// `k -> multiplicity of J_k(0)`; zero multiplicities are omitted.
    pub jordan: BTreeMap<usize, usize>,
    pub regular_dim: usize,
}

impl ConsimStructure {
    pub fn singular_dim(&self) -> usize {
        self.jordan.iter().map(|(k, m)| k * m).sum()
    }
}

/// A single row compression followed by the coninverse column transform.
///
/// On a nonsingular input this returns `r = 0` and `next = S A S^T`.
pub fn consim_step(a: &ComplexMatrix, tol: &Tolerance) -> Result<ConsimStep> {
    a.require_square()?;
    let rc = row_compress(a, tol)?;
    let n = a.rows();
    let r = rc.zero_rows;
    // S A S^T restricted to the bottom rows: reduced * S^T.
    let s_t = rc.transform.matrix().transpose();
    let bottom = &rc.reduced * &s_t;
    Ok(ConsimStep {
        transform: rc.transform,
        r,
        next: bottom.block(0, n - r, r, n),
    })
}

/// Runs the staircase to completion.
///
/// The tolerance is anchored to `a` once, so the same absolute cut decides
/// every rank along the way. A nonsingular input gives an empty `r_seq`.
pub fn consim_regularize(a: &ComplexMatrix, tol: &Tolerance) -> Result<ConsimResult> {
    a.require_square()?;
    a.require_finite()?;
    tol.validate()?;
    let n = a.rows();
    let cut_tol = tol.anchored(a);
    let mut current = a.clone();
    let mut accumulated = UnitaryFactor::identity(n);
    let mut r_seq: Vec<usize> = Vec::new();
    let mut offset = 0;

    while current.rows() > 0 {
        let step = consim_step(&current, &cut_tol)?;
        if step.r == 0 {
            break;
        }
        if let Some(&prev) = r_seq.last() {
            if step.r > prev {
                return Err(Error::ToleranceBreakdown(format!(
                    "staircase step {} removed {} rows after {} (sequence must be non-increasing)",
                    r_seq.len() + 1,
                    step.r,
                    prev
                )));
            }
        }
        accumulated = step.transform.embed(offset).compose(&accumulated);
        offset += step.r;
        r_seq.push(step.r);
        current = step.next;
    }

    let mut result = ConsimResult {
        r_seq,
        regular: current,
        accumulated,
        residual: 0.0,
        rank_cut: cut_tol.value(),
    };
    result.residual = consim_residual(a, &result)?;
    Ok(result)
}

/// `||declared-zero blocks of Q A Q^T||_F`: for each step, the rows it
/// removed, from its own diagonal block to the last column.
pub fn consim_residual(a: &ComplexMatrix, res: &ConsimResult) -> Result<f64> {
    let q = res.accumulated.matrix();
    let image = q.multiply(a)?.multiply(&q.transpose())?;
    let n = image.cols();
    let mut sq = 0.0;
    let mut offset = 0;
    for &r in &res.r_seq {
        sq += image.block_norm(offset, offset + r, offset, n).powi(2);
        offset += r;
    }
    Ok(sq.sqrt())
}

/// Jordan multiplicities `mult(J_k) = r_k - r_{k+1}` with `r_{t+1} = 0`.
pub fn consim_structure(res: &ConsimResult) -> ConsimStructure {
    let mut jordan = BTreeMap::new();
    for (i, &r) in res.r_seq.iter().enumerate() {
        let next = res.r_seq.get(i + 1).copied().unwrap_or(0);
        let mult = r.saturating_sub(next);
        if mult > 0 {
            jordan.insert(i + 1, mult);
        }
    }
    ConsimStructure {
        jordan,
        regular_dim: res.regular.rows(),
    }
}
