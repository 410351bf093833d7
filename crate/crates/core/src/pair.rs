//! Staircase reduction of matrix pairs under mixed equivalence
//! `(A, B) -> (S A R, S B conj(R))`.
//!
//! A step compresses the rows of `A` with a unitary `S`, compresses the
//! columns of the top `k` rows `B'` of `S B` with a unitary `R`, and applies
//! `conj(R)` to the columns of `A`:
//!
//! ```text
//! (S A conj(R), S B R) = ( [ 0_{k x l}  0  ]   [ B1'  0  ] )
//!                        ( [ *          A1 ] , [ *    B1 ] )
//! ```
//!
//! Orientation: steps conjugate the right factor on the FIRST component.
//! Since `conj(R)` is unitary whenever `R` is, this is still a mixed
//! equivalence transformation (with right factor `conj(R)`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    column_compress, direct_sum, rank_of, row_compress, ComplexMatrix, Tolerance, UnitaryFactor,
};

/// Two matrices of identical size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPair {
    pub first: ComplexMatrix,
    pub second: ComplexMatrix,
}

impl MatrixPair {
    pub fn new(first: ComplexMatrix, second: ComplexMatrix) -> Result<Self> {
        if first.shape() != second.shape() {
            return Err(Error::DimensionMismatch(format!(
                "pair components differ in size: {}x{} vs {}x{}",
                first.rows(),
                first.cols(),
                second.rows(),
                second.cols()
            )));
        }
        Ok(Self { first, second })
    }

    pub fn empty() -> Self {
        Self {
            first: ComplexMatrix::zeros(0, 0),
            second: ComplexMatrix::zeros(0, 0),
        }
    }

    pub fn rows(&self) -> usize {
        self.first.rows()
    }

    pub fn cols(&self) -> usize {
        self.first.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.first.shape()
    }

    /// `(A ⊕ C, B ⊕ D)`.
    pub fn direct_sum(&self, other: &MatrixPair) -> MatrixPair {
        MatrixPair {
            first: direct_sum(&self.first, &other.first),
            second: direct_sum(&self.second, &other.second),
        }
    }

    /// `(B^*, A^T)`. If `(A, B)` moves to `(S A conj(R), S B R)` then this
    /// pair moves to `(R^* B^* S^*, R^* A^T S^T)`, again of that form, so the
    /// dual can be fed back into the same staircase. Plain `(B^T, A^T)` would
    /// pick up the wrong conjugation on one side.
    pub fn dual(&self) -> MatrixPair {
        MatrixPair {
            first: self.second.conjugate_transpose(),
            second: self.first.transpose(),
        }
    }

    /// Inverse of [`MatrixPair::dual`]: `(X, Y) -> (Y^T, X^*)`.
    pub fn undual(&self) -> MatrixPair {
        MatrixPair {
            first: self.second.transpose(),
            second: self.first.conjugate_transpose(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.first.frobenius_norm().hypot(self.second.frobenius_norm())
    }

    fn validate(&self) -> Result<()> {
        if self.first.shape() != self.second.shape() {
            return Err(Error::DimensionMismatch(format!(
                "pair components differ in size: {:?} vs {:?}",
                self.first.shape(),
                self.second.shape()
            )));
        }
        self.first.require_finite()?;
        self.second.require_finite()
    }
}

#[derive(Clone, Debug)]
pub struct PairStep {
    /// Row transform `S` (m x m).
    pub left: UnitaryFactor,
    /// Column transform `R` (n x n), applied as `conj(R)` on `A`, `R` on `B`.
    pub right: UnitaryFactor,
    pub k: usize,
    pub l: usize,
    pub next: MatrixPair,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairResult {
    pub kl_seq: Vec<(usize, usize)>,
    /// `(A_t, B_t)`; rows of `A_t` are numerically independent.
    pub remainder: MatrixPair,
    pub left: UnitaryFactor,
    pub right: UnitaryFactor,
    pub residual: f64,
    /// Absolute cuts for rank decisions on the first and second component.
    pub rank_cuts: (f64, f64),
}

/// Multiplicities read off a single pass: `(F_n, G_n)` and `(J_n(0), I_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstPassStructure {
    pub fg: BTreeMap<usize, usize>,
    pub ji: BTreeMap<usize, usize>,
    pub remainder: MatrixPair,
}

/// Singular block multiplicities of a regularizing decomposition and its
/// nonsingular square part. Zero multiplicities are omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStructure {
    /// `n -> mult (F_n, G_n)`.
    pub fg: BTreeMap<usize, usize>,
    /// `n -> mult (J_n(0), I_n)`.
    pub ji: BTreeMap<usize, usize>,
    /// `n -> mult (F_n^T, G_n^T)`.
    pub fgt: BTreeMap<usize, usize>,
    /// `n -> mult (I_n, J_n(0))`.
    pub ij: BTreeMap<usize, usize>,
    pub regular: MatrixPair,
}

impl PairStructure {
    /// Rows and columns occupied by the singular blocks.
    pub fn singular_shape(&self) -> (usize, usize) {
        let sum = |m: &BTreeMap<usize, usize>, f: &dyn Fn(usize) -> usize| -> usize {
            m.iter().map(|(&n, &c)| c * f(n)).sum()
        };
        let rows = sum(&self.fg, &|n| n) + sum(&self.ji, &|n| n) + sum(&self.fgt, &|n| n - 1) + sum(&self.ij, &|n| n);
        let cols = sum(&self.fg, &|n| n - 1) + sum(&self.ji, &|n| n) + sum(&self.fgt, &|n| n) + sum(&self.ij, &|n| n);
        (rows, cols)
    }
}

/// Both passes of the two-pass pipeline plus the resulting structure.
#[derive(Clone, Debug)]
pub struct FullPairResult {
    pub first_pass: PairResult,
    /// Pass over the dual `(B_t^*, A_t^T)` of the first remainder.
    pub second_pass: PairResult,
    pub structure: PairStructure,
}

/// One step with the tolerance anchored to `p`'s two components.
pub fn pair_step(p: &MatrixPair, tol: &Tolerance) -> Result<PairStep> {
    p.validate()?;
    tol.validate()?;
    step_with(p, &tol.anchored(&p.first), &tol.anchored(&p.second))
}

fn step_with(p: &MatrixPair, tol_a: &Tolerance, tol_b: &Tolerance) -> Result<PairStep> {
    let (m, n) = p.shape();
    let rc = row_compress(&p.first, tol_a)?;
    let k = rc.zero_rows;
    let s = rc.transform;
    let sb = s.matrix().multiply(&p.second)?;
    let top = sb.block(0, k, 0, n);
    let cc = column_compress(&top, tol_b)?;
    let l = cc.rank;
    let r = cc.transform;
    let a_next = rc.reduced.multiply(&r.matrix().conjugate())?;
    let b_next = sb.block(k, m, 0, n).multiply(r.matrix())?;
    Ok(PairStep {
        left: s,
        right: r,
        k,
        l,
        next: MatrixPair {
            first: a_next.block(0, m - k, l, n),
            second: b_next.block(0, m - k, l, n),
        },
    })
}

/// Repeats [`pair_step`] while the rows of the first component are dependent.
pub fn pair_regularize(p: &MatrixPair, tol: &Tolerance) -> Result<PairResult> {
    p.validate()?;
    tol.validate()?;
    regularize_with(p, tol.anchored(&p.first), tol.anchored(&p.second))
}

fn regularize_with(p: &MatrixPair, tol_a: Tolerance, tol_b: Tolerance) -> Result<PairResult> {
    let (m, n) = p.shape();
    let mut current = p.clone();
    let mut left = UnitaryFactor::identity(m);
    let mut right = UnitaryFactor::identity(n);
    let mut kl_seq: Vec<(usize, usize)> = Vec::new();
    let (mut row_off, mut col_off) = (0, 0);

    while current.rows() > 0 {
        let step = step_with(&current, &tol_a, &tol_b)?;
        if step.k == 0 {
            break;
        }
        if let Some(&(_, prev_l)) = kl_seq.last() {
            if step.k > prev_l {
                return Err(Error::ToleranceBreakdown(format!(
                    "step {} has k = {} > previous l = {}",
                    kl_seq.len() + 1,
                    step.k,
                    prev_l
                )));
            }
        }
        left = step.left.embed(row_off).compose(&left);
        right = right.compose(&step.right.embed(col_off));
        row_off += step.k;
        col_off += step.l;
        kl_seq.push((step.k, step.l));
        current = step.next;
    }

    let mut result = PairResult {
        kl_seq,
        remainder: current,
        left,
        right,
        residual: 0.0,
        rank_cuts: (tol_a.value(), tol_b.value()),
    };
    result.residual = pair_residual(p, &result)?;
    Ok(result)
}

/// Frobenius norm of the declared-zero blocks of `(S A conj(R), S B R)`.
///
/// Step `i` occupies rows `K_{i-1}..K_i` (`K` = running sum of `k`); in `A`
/// those rows vanish from column `L_{i-1}` on, in `B` from column `L_i` on
/// (`L` = running sum of `l`).
pub fn pair_residual(p: &MatrixPair, res: &PairResult) -> Result<f64> {
    let s = res.left.matrix();
    let r = res.right.matrix();
    let a_img = s.multiply(&p.first)?.multiply(&r.conjugate())?;
    let b_img = s.multiply(&p.second)?.multiply(r)?;
    let n = p.cols();
    let (mut row_off, mut col_off) = (0, 0);
    let mut sq = 0.0;
    for &(k, l) in &res.kl_seq {
        sq += a_img.block_norm(row_off, row_off + k, col_off, n).powi(2);
        sq += b_img.block_norm(row_off, row_off + k, col_off + l, n).powi(2);
        row_off += k;
        col_off += l;
    }
    Ok(sq.sqrt())
}

/// Splits a `(k, l)` sequence into `(F, G)`- and `(J, I)`-type multiplicities:
/// `mult F_i = k_i - l_i`, `mult J_i = l_i - k_{i+1}` with `k_{t+1} = 0`.
fn split_indices(kl_seq: &[(usize, usize)]) -> (BTreeMap<usize, usize>, BTreeMap<usize, usize>) {
    let mut fg = BTreeMap::new();
    let mut ji = BTreeMap::new();
    for (i, &(k, l)) in kl_seq.iter().enumerate() {
        let next_k = kl_seq.get(i + 1).map_or(0, |&(k, _)| k);
        if k > l {
            fg.insert(i + 1, k - l);
        }
        if l > next_k {
            ji.insert(i + 1, l - next_k);
        }
    }
    (fg, ji)
}

pub fn pair_structure_first_pass(res: &PairResult) -> FirstPassStructure {
    let (fg, ji) = split_indices(&res.kl_seq);
    FirstPassStructure {
        fg,
        ji,
        remainder: res.remainder.clone(),
    }
}

/// Full regularizing decomposition: a first pass on `(A, B)`, then a second
/// pass on the dual `(B_t^*, A_t^T)` whose indices give the `(F^T, G^T)` and
/// `(I, J)` families. Undoing the dual on the second remainder gives the
/// regular part, which must come out square with both matrices nonsingular.
pub fn full_regularize(p: &MatrixPair, tol: &Tolerance) -> Result<FullPairResult> {
    p.validate()?;
    tol.validate()?;
    let tol_a = tol.anchored(&p.first);
    let tol_b = tol.anchored(&p.second);
    let first_pass = regularize_with(p, tol_a, tol_b)?;
    let second_in = first_pass.remainder.dual();
    let second_pass = regularize_with(&second_in, tol_b, tol_a)?;

    let (fg, ji) = split_indices(&first_pass.kl_seq);
    let (fgt, ij) = split_indices(&second_pass.kl_seq);
    let regular = second_pass.remainder.undual();

    if !regular.first.is_square() {
        return Err(Error::ToleranceBreakdown(format!(
            "regular part is {}x{}, not square",
            regular.rows(),
            regular.cols()
        )));
    }
    for (name, m, cut) in [
        ("first", &regular.first, tol_a.value()),
        ("second", &regular.second, tol_b.value()),
    ] {
        let rank = rank_of(m, &Tolerance::Absolute(cut))?;
        if rank != m.rows() {
            return Err(Error::ToleranceBreakdown(format!(
                "{name} matrix of the regular part has numerical rank {rank} < {}",
                m.rows()
            )));
        }
    }

    Ok(FullPairResult {
        first_pass,
        second_pass,
        structure: PairStructure {
            fg,
            ji,
            fgt,
            ij,
            regular,
        },
    })
}
