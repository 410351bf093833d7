//! Canonical blocks, block pairs, and descriptors of regularizing
//! decompositions.
//!
//! Jordan blocks carry their ones on the first SUBdiagonal. `F_n` and `G_n`
//! are `n x (n-1)`: `F_n` has ones at `(i+1, i)`, `G_n` at `(i, i)`, so
//! `F_1 = G_1` is the `1 x 0` matrix.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::consim::ConsimStructure;
use crate::error::{Error, Result};
use crate::matrix::{direct_sum, ComplexMatrix};
use crate::pair::{MatrixPair, PairStructure};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter(format!("{what} size must be at least 1")))
    } else {
        Ok(())
    }
}

/// `J_n(lambda)`: `lambda` on the diagonal, ones on the subdiagonal.
pub fn jordan(n: usize, lambda: Complex64) -> Result<ComplexMatrix> {
    require_positive(n, "Jordan block")?;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda
        } else if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    }))
}

pub fn jordan_zero(n: usize) -> Result<ComplexMatrix> {
    jordan(n, ZERO)
}

pub fn f_block(n: usize) -> Result<ComplexMatrix> {
    require_positive(n, "F block")?;
    Ok(ComplexMatrix::from_fn(n, n - 1, |i, j| if i == j + 1 { ONE } else { ZERO }))
}

pub fn g_block(n: usize) -> Result<ComplexMatrix> {
    require_positive(n, "G block")?;
    Ok(ComplexMatrix::from_fn(n, n - 1, |i, j| if i == j { ONE } else { ZERO }))
}

fn check_mu(mu: Complex64) -> Result<()> {
    if mu.im == 0.0 && mu.re >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mu must be non-real or negative, got {mu}"
        )));
    }
    if !mu.re.is_finite() || !mu.im.is_finite() {
        return Err(Error::InvalidParameter("mu must be finite".into()));
    }
    Ok(())
}

/// `[[0, 1], [mu, 0]]` for `mu` non-real or negative.
pub fn mu_block(mu: Complex64) -> Result<ComplexMatrix> {
    check_mu(mu)?;
    ComplexMatrix::new(2, 2, vec![ZERO, ONE, mu, ZERO])
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")))
    }
}

/// Kinds of canonical summands. The first three occur under consimilarity,
/// the rest are pair blocks under mixed equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockKind {
    JordanZero { n: usize },
    JordanLambda { n: usize, lambda: f64 },
    Mu { re: f64, im: f64 },
    /// `(F_n, G_n)`
    Fg { n: usize },
    /// `(F_n^T, G_n^T)`
    Fgt { n: usize },
    /// `(J_n(0), I_n)`
    Ji { n: usize },
    /// `(I_n, J_n(0))`
    Ij { n: usize },
    /// `(I_n, J_n(lambda))`
    IjLambda { n: usize, lambda: f64 },
    /// `(I_2, [[0, 1], [mu, 0]])`
    IMu { re: f64, im: f64 },
}

impl BlockKind {
    pub fn is_pair(&self) -> bool {
        !matches!(
            self,
            BlockKind::JordanZero { .. } | BlockKind::JordanLambda { .. } | BlockKind::Mu { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BlockKind::JordanZero { n }
            | BlockKind::Fg { n }
            | BlockKind::Fgt { n }
            | BlockKind::Ji { n }
            | BlockKind::Ij { n } => require_positive(n, "block"),
            BlockKind::JordanLambda { n, lambda } | BlockKind::IjLambda { n, lambda } => {
                require_positive(n, "block")?;
                check_lambda(lambda)
            }
            BlockKind::Mu { re, im } | BlockKind::IMu { re, im } => check_mu(Complex64::new(re, im)),
        }
    }

    /// Position in the canonical presentation order: singular families
    /// `(F,G)`, `(J,I)`, `(F^T,G^T)`, `(I,J)` (or `J_k(0)`), then the
    /// regular-type blocks.
    fn order_key(&self) -> (u8, usize) {
        match *self {
            BlockKind::JordanZero { n } => (0, n),
            BlockKind::JordanLambda { n, .. } => (5, n),
            BlockKind::Mu { .. } => (6, 2),
            BlockKind::Fg { n } => (0, n),
            BlockKind::Ji { n } => (1, n),
            BlockKind::Fgt { n } => (2, n),
            BlockKind::Ij { n } => (3, n),
            BlockKind::IjLambda { n, .. } => (5, n),
            BlockKind::IMu { .. } => (6, 2),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        match *self {
            BlockKind::JordanZero { n } => jordan_zero(n),
            BlockKind::JordanLambda { n, lambda } => jordan(n, Complex64::new(lambda, 0.0)),
            BlockKind::Mu { re, im } => mu_block(Complex64::new(re, im)),
            _ => Err(Error::InvalidParameter(format!("{self:?} is a pair block"))),
        }
    }

    pub fn pair(&self) -> Result<MatrixPair> {
        self.validate()?;
        let p = match *self {
            BlockKind::Fg { n } => (f_block(n)?, g_block(n)?),
            BlockKind::Fgt { n } => (f_block(n)?.transpose(), g_block(n)?.transpose()),
            BlockKind::Ji { n } => (jordan_zero(n)?, ComplexMatrix::identity(n)),
            BlockKind::Ij { n } => (ComplexMatrix::identity(n), jordan_zero(n)?),
            BlockKind::IjLambda { n, lambda } => {
                (ComplexMatrix::identity(n), jordan(n, Complex64::new(lambda, 0.0))?)
            }
            BlockKind::IMu { re, im } => (ComplexMatrix::identity(2), mu_block(Complex64::new(re, im))?),
            _ => return Err(Error::InvalidParameter(format!("{self:?} is not a pair block"))),
        };
        MatrixPair::new(p.0, p.1)
    }
}

/// `(I_n, J_n(lambda))` and friends, by kind.
pub fn pair_block(kind: BlockKind) -> Result<MatrixPair> {
    kind.pair()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDescriptor {
    #[serde(flatten)]
    pub kind: BlockKind,
    pub multiplicity: usize,
}

impl BlockDescriptor {
    pub fn new(kind: BlockKind, multiplicity: usize) -> Self {
        Self { kind, multiplicity }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularPart {
    Matrix(ComplexMatrix),
    Pair(MatrixPair),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDescriptor {
    pub blocks: Vec<BlockDescriptor>,
    pub regular: RegularPart,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Assembled {
    Matrix(ComplexMatrix),
    Pair(MatrixPair),
}

impl Assembled {
    pub fn into_matrix(self) -> Option<ComplexMatrix> {
        match self {
            Assembled::Matrix(m) => Some(m),
            Assembled::Pair(_) => None,
        }
    }

    pub fn into_pair(self) -> Option<MatrixPair> {
        match self {
            Assembled::Pair(p) => Some(p),
            Assembled::Matrix(_) => None,
        }
    }
}

impl DecompositionDescriptor {
    /// Consimilarity descriptor with no regular part.
    pub fn matrix(blocks: Vec<BlockDescriptor>) -> Self {
        Self {
            blocks,
            regular: RegularPart::Matrix(ComplexMatrix::zeros(0, 0)),
        }
    }

    /// Mixed-equivalence descriptor with no regular part.
    pub fn pair(blocks: Vec<BlockDescriptor>) -> Self {
        Self {
            blocks,
            regular: RegularPart::Pair(MatrixPair::empty()),
        }
    }

    pub fn with_regular(mut self, regular: RegularPart) -> Self {
        self.regular = regular;
        self
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.regular, RegularPart::Pair(_))
    }

    /// Blocks sorted into presentation order, with zero multiplicities dropped.
    pub fn ordered_blocks(&self) -> Vec<BlockDescriptor> {
        let mut out: Vec<_> = self.blocks.iter().copied().filter(|b| b.multiplicity > 0).collect();
        out.sort_by_key(|b| b.kind.order_key());
        out
    }

    /// Direct sum of every block (repeated by multiplicity) followed by the
    /// regular part.
    pub fn assemble(&self) -> Result<Assembled> {
        let pair_mode = self.is_pair();
        for b in &self.blocks {
            if b.kind.is_pair() != pair_mode {
                return Err(Error::InvalidParameter(format!(
                    "block {:?} does not belong to a {} descriptor",
                    b.kind,
                    if pair_mode { "pair" } else { "matrix" }
                )));
            }
        }
        let blocks = self.ordered_blocks();
        match &self.regular {
            RegularPart::Matrix(reg) => {
                reg.require_square()?;
                let mut acc = ComplexMatrix::zeros(0, 0);
                for b in &blocks {
                    let m = b.kind.matrix()?;
                    for _ in 0..b.multiplicity {
                        acc = direct_sum(&acc, &m);
                    }
                }
                Ok(Assembled::Matrix(direct_sum(&acc, reg)))
            }
            RegularPart::Pair(reg) => {
                if !reg.first.is_square() || reg.first.shape() != reg.second.shape() {
                    return Err(Error::DimensionMismatch(
                        "regular pair must consist of two square matrices of equal size".into(),
                    ));
                }
                let mut acc = MatrixPair::empty();
                for b in &blocks {
                    let p = b.kind.pair()?;
                    for _ in 0..b.multiplicity {
                        acc = acc.direct_sum(&p);
                    }
                }
                Ok(Assembled::Pair(acc.direct_sum(reg)))
            }
        }
    }

    /// Singular-block multiplicities keyed by kind, for comparisons.
    pub fn multiplicities(&self) -> BTreeMap<(u8, usize), usize> {
        let mut out = BTreeMap::new();
        for b in self.ordered_blocks() {
            if b.kind.order_key().0 <= 3 {
                *out.entry(b.kind.order_key()).or_insert(0) += b.multiplicity;
            }
        }
        out
    }
}

/// Presents a consimilarity structure as a descriptor with `regular` attached.
pub fn consim_descriptor(st: &ConsimStructure, regular: ComplexMatrix) -> DecompositionDescriptor {
    let blocks = st
        .jordan
        .iter()
        .map(|(&n, &m)| BlockDescriptor::new(BlockKind::JordanZero { n }, m))
        .collect();
    DecompositionDescriptor::matrix(blocks).with_regular(RegularPart::Matrix(regular))
}

pub fn pair_descriptor(st: &PairStructure) -> DecompositionDescriptor {
    let mut blocks = Vec::new();
    let families: [(&BTreeMap<usize, usize>, fn(usize) -> BlockKind); 4] = [
        (&st.fg, |n| BlockKind::Fg { n }),
        (&st.ji, |n| BlockKind::Ji { n }),
        (&st.fgt, |n| BlockKind::Fgt { n }),
        (&st.ij, |n| BlockKind::Ij { n }),
    ];
    for (map, make) in families {
        blocks.extend(map.iter().map(|(&n, &m)| BlockDescriptor::new(make(n), m)));
    }
    DecompositionDescriptor::pair(blocks).with_regular(RegularPart::Pair(st.regular.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]], cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows, cols).unwrap()
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_zero(1).unwrap(), ComplexMatrix::zeros(1, 1));
        assert_eq!(jordan_zero(2).unwrap(), real(&[&[0.0, 0.0], &[1.0, 0.0]], 2));
        let j = jordan(3, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(j, real(&[&[2.0, 0.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 1.0, 2.0]], 3));
        assert!(jordan_zero(0).is_err());
    }

    #[test]
    fn f_and_g_examples() {
        assert_eq!(f_block(1).unwrap().shape(), (1, 0));
        assert_eq!(g_block(1).unwrap().shape(), (1, 0));
        assert_eq!(f_block(2).unwrap(), real(&[&[0.0], &[1.0]], 1));
        assert_eq!(g_block(2).unwrap(), real(&[&[1.0], &[0.0]], 1));
        assert_eq!(g_block(3).unwrap(), real(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]], 2));
        assert!(f_block(0).is_err());
        assert!(g_block(0).is_err());
    }

    #[test]
    fn mu_block_constraints() {
        assert_eq!(mu_block(Complex64::new(-1.0, 0.0)).unwrap(), real(&[&[0.0, 1.0], &[-1.0, 0.0]], 2));
        let m = mu_block(Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
        assert!(mu_block(Complex64::new(2.0, 0.0)).is_err());
        assert!(mu_block(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn pair_block_examples() {
        let p = pair_block(BlockKind::Ji { n: 1 }).unwrap();
        assert_eq!(p.first, real(&[&[0.0]], 1));
        assert_eq!(p.second, real(&[&[1.0]], 1));
        let p = pair_block(BlockKind::Fg { n: 1 }).unwrap();
        assert_eq!(p.shape(), (1, 0));
        let p = pair_block(BlockKind::Fgt { n: 2 }).unwrap();
        assert_eq!(p.first, real(&[&[0.0, 1.0]], 2));
        assert_eq!(p.second, real(&[&[1.0, 0.0]], 2));
        assert!(pair_block(BlockKind::IjLambda { n: 2, lambda: -1.0 }).is_err());
        assert!(pair_block(BlockKind::JordanZero { n: 2 }).is_err());
    }

    #[test]
    fn assemble_example_one_blocks() {
        let desc = DecompositionDescriptor::matrix(vec![
            BlockDescriptor::new(BlockKind::JordanZero { n: 4 }, 1),
            BlockDescriptor::new(BlockKind::JordanZero { n: 2 }, 1),
            BlockDescriptor::new(BlockKind::JordanZero { n: 3 }, 1),
        ]);
        let a = desc.assemble().unwrap().into_matrix().unwrap();
        assert_eq!(a.shape(), (9, 9));
        // Ascending sizes: J_2 first.
        assert_eq!(a.block(0, 2, 0, 2), jordan_zero(2).unwrap());
        assert_eq!(a.block(5, 9, 5, 9), jordan_zero(4).unwrap());
        let ones = a.entries().iter().filter(|z| z.re == 1.0).count();
        assert_eq!(ones, 6);
    }

    #[test]
    fn assemble_regular_only() {
        let desc = DecompositionDescriptor::matrix(vec![])
            .with_regular(RegularPart::Matrix(ComplexMatrix::identity(2)));
        assert_eq!(desc.assemble().unwrap(), Assembled::Matrix(ComplexMatrix::identity(2)));
    }

    #[test]
    fn assemble_fg2_with_regular_pair() {
        let reg = MatrixPair::new(ComplexMatrix::identity(1), real(&[&[3.0]], 1)).unwrap();
        let desc = DecompositionDescriptor::pair(vec![BlockDescriptor::new(BlockKind::Fg { n: 2 }, 1)])
            .with_regular(RegularPart::Pair(reg));
        let p = desc.assemble().unwrap().into_pair().unwrap();
        assert_eq!(p.shape(), (3, 2));
        assert_eq!(p.second[(2, 1)], Complex64::new(3.0, 0.0));
    }

    #[test]
    fn assemble_rejects_mixed_kinds() {
        let desc = DecompositionDescriptor::matrix(vec![BlockDescriptor::new(BlockKind::Fg { n: 2 }, 1)]);
        assert!(desc.assemble().is_err());
        let desc = DecompositionDescriptor::pair(vec![BlockDescriptor::new(BlockKind::JordanZero { n: 2 }, 1)]);
        assert!(desc.assemble().is_err());
    }
}
