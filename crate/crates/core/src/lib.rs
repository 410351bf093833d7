//! Regularizing decompositions of complex matrices under consimilarity
//! `A -> S A conj(S)^-1` and of matrix pairs under mixed equivalence
//! `(A, B) -> (S A R, S B conj(R))`, computed with unitary staircase
//! reductions only.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`] dense complex matrices, tolerances and the two
//!   rank-revealing unitary compressions every staircase step uses;
//! * [`consim`] the consimilarity staircase and its singular Jordan structure;
//! * [`pair`] the mixed-equivalence staircase and the two-pass pipeline;
//! * [`blocks`] canonical blocks and decomposition descriptors;
//! * [`testgen`] seeded instance generators and brute-force oracles;
//! * [`io`] the plain-text matrix container and a Matrix Market reader.

pub mod blocks;
pub mod consim;
pub mod error;
pub mod io;
pub mod matrix;
pub mod pair;
pub mod testgen;

pub use blocks::{Assembled, BlockDescriptor, BlockKind, DecompositionDescriptor, RegularPart};
pub use consim::{
    consim_regularize, consim_residual, consim_step, consim_structure, ConsimResult, ConsimStep,
    ConsimStructure,
};
pub use error::{Error, Result};
pub use matrix::{
    column_compress, direct_sum, rank_of, row_compress, ColumnCompression, ComplexMatrix,
    RowCompression, Tolerance, UnitaryFactor,
};
pub use num_complex::Complex64;
pub use pair::{
    full_regularize, pair_regularize, pair_residual, pair_step, pair_structure_first_pass,
    FirstPassStructure, FullPairResult, MatrixPair, PairResult, PairStep, PairStructure,
};
