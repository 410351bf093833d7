mod common;

use std::collections::BTreeMap;

use staircase::blocks::{f_block, g_block, jordan_zero, BlockDescriptor, BlockKind, DecompositionDescriptor, RegularPart};
use staircase::testgen::{consim_power_oracle, random_unitary, scramble_consim, scramble_pair, ScrambleSpec};
use staircase::{
    consim_regularize, consim_structure, direct_sum, full_regularize, pair_regularize, pair_structure_first_pass,
    rank_of, Complex64, ComplexMatrix, MatrixPair, Tolerance,
};

use common::{jordan_r_seq, step_rule_kl_seq, Chain};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn scalar(z: f64) -> ComplexMatrix {
    ComplexMatrix::new(1, 1, vec![Complex64::new(z, 0.0)]).unwrap()
}

#[test]
fn unitary_scramble_of_j2_plus_identity() {
    let a = direct_sum(&jordan_zero(2).unwrap(), &ComplexMatrix::identity(3));
    let u = random_unitary(5, 3);
    let b = u.matrix().multiply(&a).unwrap().multiply(&u.matrix().transpose()).unwrap();
    let res = consim_regularize(&b, &tol()).unwrap();
    assert_eq!(res.r_seq, vec![1, 1]);
    assert_eq!(res.regular.shape(), (3, 3));
    assert_eq!(rank_of(&res.regular, &tol()).unwrap(), 3);
    assert_eq!(consim_power_oracle(&b, &tol()).unwrap(), vec![1, 1]);
}

#[test]
fn general_scramble_keeps_j3_oracle() {
    let a = jordan_zero(3).unwrap();
    let before = consim_power_oracle(&a, &tol()).unwrap();
    assert_eq!(before, jordan_r_seq(&[3]));
    for seed in 0..10 {
        let b = scramble_consim(&a, &ScrambleSpec::general(seed, 100.0)).unwrap();
        assert_eq!(consim_power_oracle(&b, &tol()).unwrap(), before);
        assert_eq!(consim_regularize(&b, &tol()).unwrap().r_seq, before);
    }
}

#[test]
fn weyr_differences_of_j4_plus_j2() {
    let a = direct_sum(&jordan_zero(4).unwrap(), &jordan_zero(2).unwrap());
    assert_eq!(consim_power_oracle(&a, &tol()).unwrap(), vec![2, 2, 1, 1]);
    let res = consim_regularize(&a, &tol()).unwrap();
    assert_eq!(res.r_seq, vec![2, 2, 1, 1]);
    assert_eq!(consim_structure(&res).jordan, BTreeMap::from([(2, 1), (4, 1)]));
}

#[test]
fn scrambled_f2_plus_j1_first_pass() {
    // Step rules: F_2 -> (1,1), F_1 -> (1,0); J_1 -> (1,1). Summed levelwise.
    let expected = step_rule_kl_seq(&[Chain::F(2), Chain::J(1)]);
    assert_eq!(expected, vec![(2, 2), (1, 0)]);
    let p = MatrixPair::new(f_block(2).unwrap(), g_block(2).unwrap())
        .unwrap()
        .direct_sum(&MatrixPair::new(jordan_zero(1).unwrap(), ComplexMatrix::identity(1)).unwrap());
    for seed in 0..5 {
        let q = scramble_pair(&p, &ScrambleSpec::unitary(seed)).unwrap();
        let res = pair_regularize(&q, &tol()).unwrap();
        assert_eq!(res.kl_seq, expected);
        assert_eq!(res.remainder.shape(), (0, 0));
    }
}

#[test]
fn first_pass_multiplicities_of_f1_plus_j2() {
    let p = MatrixPair::new(f_block(1).unwrap(), g_block(1).unwrap())
        .unwrap()
        .direct_sum(&MatrixPair::new(jordan_zero(2).unwrap(), ComplexMatrix::identity(2)).unwrap());
    let res = pair_regularize(&scramble_pair(&p, &ScrambleSpec::unitary(9)).unwrap(), &tol()).unwrap();
    assert_eq!(res.kl_seq, vec![(2, 1), (1, 1)]);
    let st = pair_structure_first_pass(&res);
    assert_eq!(st.fg, BTreeMap::from([(1, 1)]));
    assert_eq!(st.ji, BTreeMap::from([(2, 1)]));
}

#[test]
fn unitary_scramble_keeps_fg2_sequence() {
    let p = MatrixPair::new(f_block(2).unwrap(), g_block(2).unwrap()).unwrap();
    let plain = pair_regularize(&p, &tol()).unwrap().kl_seq;
    assert_eq!(plain, vec![(1, 1), (1, 0)]);
    for seed in 0..5 {
        let q = scramble_pair(&p, &ScrambleSpec::unitary(seed)).unwrap();
        assert_eq!(pair_regularize(&q, &tol()).unwrap().kl_seq, plain);
    }
}

fn mixed_sum() -> DecompositionDescriptor {
    DecompositionDescriptor::pair(vec![
        BlockDescriptor::new(BlockKind::Fg { n: 2 }, 1),
        BlockDescriptor::new(BlockKind::Ij { n: 2 }, 1),
        BlockDescriptor::new(BlockKind::Ji { n: 1 }, 1),
    ])
    .with_regular(RegularPart::Pair(MatrixPair::new(ComplexMatrix::identity(1), scalar(2.0)).unwrap()))
}

#[test]
fn full_decomposition_of_scrambled_mixed_sum() {
    let p = mixed_sum().assemble().unwrap().into_pair().unwrap();
    assert_eq!(p.shape(), (6, 5));
    for seed in 0..5 {
        let q = scramble_pair(&p, &ScrambleSpec::unitary(seed)).unwrap();
        let st = full_regularize(&q, &tol()).unwrap().structure;
        assert_eq!(st.fg, BTreeMap::from([(2, 1)]));
        assert_eq!(st.ij, BTreeMap::from([(2, 1)]));
        assert_eq!(st.ji, BTreeMap::from([(1, 1)]));
        assert!(st.fgt.is_empty());
        assert_eq!(st.regular.shape(), (1, 1));
        // The regular pair is (1, 2) up to S x conj(R), S y R: |y / x| = 2.
        let ratio = st.regular.second[(0, 0)].norm() / st.regular.first[(0, 0)].norm();
        assert!((ratio - 2.0).abs() < 1e-10, "ratio {ratio}");
    }
}

#[test]
fn general_scramble_keeps_pair_structure() {
    let p = mixed_sum().assemble().unwrap().into_pair().unwrap();
    let plain = full_regularize(&p, &tol()).unwrap().structure;
    for seed in 0..10 {
        let q = scramble_pair(&p, &ScrambleSpec::general(seed, 100.0)).unwrap();
        let st = full_regularize(&q, &tol()).unwrap().structure;
        assert_eq!((&st.fg, &st.ji, &st.fgt, &st.ij), (&plain.fg, &plain.ji, &plain.fgt, &plain.ij));
        assert_eq!(st.regular.shape(), plain.regular.shape());
    }
}

#[test]
fn transposed_fg2_lands_in_second_pass() {
    let p = MatrixPair::new(f_block(2).unwrap().transpose(), g_block(2).unwrap().transpose()).unwrap();
    let q = scramble_pair(&p, &ScrambleSpec::unitary(4)).unwrap();
    let full = full_regularize(&q, &tol()).unwrap();
    assert!(full.first_pass.kl_seq.is_empty());
    assert_eq!(full.structure.fgt, BTreeMap::from([(2, 1)]));
    assert!(full.structure.fg.is_empty() && full.structure.ji.is_empty() && full.structure.ij.is_empty());
}
