//! Test-only oracles. These never call the staircase code.

#![allow(dead_code)]

use staircase::blocks::{BlockDescriptor, BlockKind};

/// Construction-known r-sequence of `⊕ J_{n}(0)`: `r_k = #{blocks of size >= k}`.
pub fn jordan_r_seq(sizes: &[usize]) -> Vec<usize> {
    let max = sizes.iter().copied().max().unwrap_or(0);
    (1..=max).map(|k| sizes.iter().filter(|&&n| n >= k).count()).collect()
}

pub fn jordan_sizes(blocks: &[BlockDescriptor]) -> Vec<usize> {
    let mut out = Vec::new();
    for b in blocks {
        if let BlockKind::JordanZero { n } = b.kind {
            out.extend(std::iter::repeat_n(n, b.multiplicity));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chain {
    F(usize),
    J(usize),
}

/// Simulates the mixed-equivalence staircase on a direct sum of `(F_i, G_i)`
/// and `(J_i, I_i)` blocks using only the single-block step rules
///
///   (J_i, I_i) => (1, 1, (J_{i-1}, I_{i-1})),   (J_1, I_1) => (1, 1, empty)
///   (F_i, G_i) => (1, 1, (F_{i-1}, G_{i-1})),   (F_1, G_1) => (1, 0, empty)
///
/// and additivity of steps over direct sums.
pub fn step_rule_kl_seq(blocks: &[Chain]) -> Vec<(usize, usize)> {
    let mut live: Vec<Chain> = blocks.to_vec();
    let mut out = Vec::new();
    while !live.is_empty() {
        let mut k = 0;
        let mut l = 0;
        let mut next = Vec::new();
        for b in &live {
            k += 1;
            match *b {
                Chain::J(i) => {
                    l += 1;
                    if i > 1 {
                        next.push(Chain::J(i - 1));
                    }
                }
                Chain::F(i) => {
                    if i > 1 {
                        l += 1;
                        next.push(Chain::F(i - 1));
                    }
                }
            }
        }
        out.push((k, l));
        live = next;
    }
    out
}

/// Componentwise sum of two index sequences, zero-padded.
pub fn add_kl(a: &[(usize, usize)], b: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or((0, 0));
            let y = b.get(i).copied().unwrap_or((0, 0));
            (x.0 + y.0, x.1 + y.1)
        })
        .collect()
}
