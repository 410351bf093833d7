//! Dense complex matrices and rank-revealing unitary compressions.
//!
//! Zero-dimension matrices (`m x 0`, `0 x n`, `0 x 0`) are ordinary values
//! here: `F_1` is the `1 x 0` matrix and the empty direct sum is `0 x 0`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    /// `[re, im]` pairs in row order.
    entries: Vec<[f64; 2]>,
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let data = raw
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(raw.rows, raw.cols, data)
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a real matrix from equal-length rows. `cols` must be given so
    /// that `m x 0` matrices can be written as `&[&[], ...]`.
    pub fn from_real_rows(rows: &[&[f64]], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn require_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            Some(p) => Err(Error::NonFinite {
                row: p / self.cols,
                col: p % self.cols,
            }),
            None => Ok(()),
        }
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self[(i, p)];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[p * rhs.cols..(p + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, op: &str, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn subtract(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute difference between matching entries.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        let d = self.subtract(rhs)?;
        Ok(d.data.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Copy of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols, "block out of range");
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Overwrites the block whose top-left corner is `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &Self) {
        assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols, "block out of range");
        for i in 0..src.rows {
            for j in 0..src.cols {
                self[(r0 + i, c0 + j)] = src[(i, j)];
            }
        }
    }

    /// Frobenius norm of the block `r0..r1 x c0..c1`.
    pub fn block_norm(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        let mut s = 0.0;
        for i in r0..r1 {
            for j in c0..c1 {
                s += self[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Singular values in non-increasing order (`min(m, n)` of them).
    pub fn singular_values(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        match full_svd(self) {
            Ok((_, s, _)) => s,
            // Last resort, less accurate for tiny values: eigenvalues of the
            // smaller Gram matrix, which always converge.
            Err(_) => {
                let gram = if self.rows <= self.cols {
                    self.multiply(&self.conjugate_transpose())
                } else {
                    self.conjugate_transpose().multiply(self)
                }
                .expect("Gram matrix shapes agree");
                let mut s: Vec<f64> = gram
                    .to_faer()
                    .self_adjoint_eigenvalues(faer::Side::Lower)
                    .expect("Hermitian eigenvalues converge")
                    .into_iter()
                    .map(|x| x.max(0.0).sqrt())
                    .collect();
                s.sort_by(|a, b| b.total_cmp(a));
                s
            }
        }
    }

    /// Spectral norm; zero for empty matrices.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on inner-dimension mismatch; use [`ComplexMatrix::multiply`] for a
/// checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.multiply(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Block-diagonal stacking `A ⊕ B`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
    out.set_block(0, 0, a);
    out.set_block(a.rows, a.cols, b);
    out
}

/// Rank-decision policy on singular values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum Tolerance {
    /// Cut at `value * max(rows, cols) * sigma_max`.
    Relative(f64),
    /// Cut at `value`.
    Absolute(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Relative(1e-10)
    }
}

impl Tolerance {
    pub fn relative(value: f64) -> Result<Self> {
        Self::check(value)?;
        Ok(Tolerance::Relative(value))
    }

    pub fn absolute(value: f64) -> Result<Self> {
        Self::check(value)?;
        Ok(Tolerance::Absolute(value))
    }

    fn check(value: f64) -> Result<()> {
        if value.is_finite() && value > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "tolerance must be finite and positive, got {value}"
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Tolerance::Relative(v) | Tolerance::Absolute(v) => Self::check(v),
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Tolerance::Relative(v) | Tolerance::Absolute(v) => v,
        }
    }

    /// Singular values strictly above this are counted as nonzero.
    pub fn cut(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            Tolerance::Relative(v) => v * rows.max(cols) as f64 * sigma_max,
            Tolerance::Absolute(v) => v,
        }
    }

    /// Freezes this policy against `a` into an absolute cut, so that the same
    /// threshold can be applied to every sub-block a staircase produces.
    ///
    /// An all-zero matrix stays exactly zero under unitary transformations,
    /// so the smallest positive cut is enough there.
    pub fn anchored(&self, a: &ComplexMatrix) -> Tolerance {
        match *self {
            Tolerance::Absolute(_) => *self,
            Tolerance::Relative(_) => {
                let cut = self.cut(a.rows(), a.cols(), a.spectral_norm());
                Tolerance::Absolute(cut.max(f64::MIN_POSITIVE))
            }
        }
    }
}

/// Square matrix with orthonormal rows and columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitaryFactor(ComplexMatrix);

impl UnitaryFactor {
    /// Wraps `m` after checking `||U U* - I||_F <= 1e3 * n * eps`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.require_square()?;
        let u = UnitaryFactor(m);
        let bound = 1e3 * u.dim().max(1) as f64 * f64::EPSILON;
        let defect = u.defect();
        if defect > bound {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary: ||UU* - I||_F = {defect:e} > {bound:e}"
            )));
        }
        Ok(u)
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        UnitaryFactor(m)
    }

    pub fn identity(n: usize) -> Self {
        UnitaryFactor(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `||U U* - I||_F`.
    pub fn defect(&self) -> f64 {
        let uu = &self.0 * &self.0.conjugate_transpose();
        uu.subtract(&ComplexMatrix::identity(self.dim()))
            .expect("square")
            .frobenius_norm()
    }

    /// `I_k ⊕ self`.
    pub fn embed(&self, k: usize) -> UnitaryFactor {
        UnitaryFactor(direct_sum(&ComplexMatrix::identity(k), &self.0))
    }

    pub fn compose(&self, rhs: &UnitaryFactor) -> UnitaryFactor {
        UnitaryFactor(&self.0 * &rhs.0)
    }
}

/// Number of singular values of `a` above the tolerance cut.
pub fn rank_of(a: &ComplexMatrix, tol: &Tolerance) -> Result<usize> {
    a.require_finite()?;
    tol.validate()?;
    let s = a.singular_values();
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cut = tol.cut(a.rows(), a.cols(), sigma_max);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Result of [`row_compress`]: `S A = [0_{r x n}; reduced]`.
#[derive(Clone, Debug)]
pub struct RowCompression {
    pub transform: UnitaryFactor,
    /// Number of rows compressed to zero, `m - rank(A)`.
    pub zero_rows: usize,
    /// The `(m - r) x n` bottom block, numerically full row rank.
    pub reduced: ComplexMatrix,
}

/// Result of [`column_compress`]: `B R = [left | 0]`.
#[derive(Clone, Debug)]
pub struct ColumnCompression {
    pub transform: UnitaryFactor,
    pub rank: usize,
    /// The `m x c` leading block, numerically full column rank.
    pub left: ComplexMatrix,
}

fn faer_svd(a: &ComplexMatrix) -> Option<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let svd = a.to_faer().svd().ok()?;
    let s = svd.S().column_vector().iter().map(|x| x.re).collect();
    Some((ComplexMatrix::from_faer(svd.U()), s, ComplexMatrix::from_faer(svd.V())))
}

/// Full SVD of a nonempty matrix: `(U, s, V)` with `U` square `m x m`,
/// `V` square `n x n`, `s` descending and `a = U diag(s) V*`.
///
/// The bidiagonal iteration occasionally fails to converge on one
/// orientation of a matrix and not on another, so `A^*` and `A^T` are tried
/// before giving up.
fn full_svd(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    if let Some(f) = faer_svd(a) {
        return Ok(f);
    }
    // A^* = U' S V'^*  =>  A = V' S U'^*.
    if let Some((u, s, v)) = faer_svd(&a.conjugate_transpose()) {
        return Ok((v, s, u));
    }
    // A^T = U' S V'^*  =>  A = conj(V') S conj(U')^*.
    if let Some((u, s, v)) = faer_svd(&a.transpose()) {
        return Ok((v.conjugate(), s, u.conjugate()));
    }
    Err(Error::NoConvergence(format!("SVD of a {}x{} matrix", a.rows(), a.cols())))
}

/// Unitary row compression: `S A = [0; reduced]` with the zero block on top.
pub fn row_compress(a: &ComplexMatrix, tol: &Tolerance) -> Result<RowCompression> {
    a.require_finite()?;
    tol.validate()?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(RowCompression {
            transform: UnitaryFactor::identity(m),
            zero_rows: m,
            reduced: ComplexMatrix::zeros(0, n),
        });
    }
    let (u, s, _) = full_svd(a)?;
    let cut = tol.cut(m, n, s[0]);
    let rank = s.iter().filter(|&&x| x > cut).count();
    let zero_rows = m - rank;
    // Rows of S are conjugated left singular vectors: null space first, then
    // the range in descending singular-value order.
    let order: Vec<usize> = (rank..m).chain(0..rank).collect();
    let s_mat = ComplexMatrix::from_fn(m, m, |i, j| u[(j, order[i])].conj());
    let sa = &s_mat * a;
    Ok(RowCompression {
        transform: UnitaryFactor::new_unchecked(s_mat),
        zero_rows,
        reduced: sa.block(zero_rows, m, 0, n),
    })
}

/// Unitary column compression: `B R = [left | 0]`.
pub fn column_compress(b: &ComplexMatrix, tol: &Tolerance) -> Result<ColumnCompression> {
    b.require_finite()?;
    tol.validate()?;
    let (m, n) = b.shape();
    if m == 0 || n == 0 {
        return Ok(ColumnCompression {
            transform: UnitaryFactor::identity(n),
            rank: 0,
            left: ComplexMatrix::zeros(m, 0),
        });
    }
    let (_, s, r_mat) = full_svd(b)?;
    let cut = tol.cut(m, n, s[0]);
    let rank = s.iter().filter(|&&x| x > cut).count();
    let br = b * &r_mat;
    Ok(ColumnCompression {
        transform: UnitaryFactor::new_unchecked(r_mat),
        rank,
        left: br.block(0, m, 0, rank),
    })
}
