//! Canonical bases of `Λᵏ(ℝⁿ)*`.
//!
//! A basis monomial `e^{i₁…iₖ}` is stored as a bitmask (bit `i−1` set for
//! index `i`); monomials of each degree are ordered lexicographically on
//! their strictly increasing index tuples.

use std::sync::OnceLock;

pub const MAX_DIM: usize = 8;

pub(crate) type Mask = u8;

pub(crate) struct DegreeBasis {
    pub masks: Vec<Mask>,
}

pub(crate) struct DimTables {
    /// `degrees[k]` for `k = 0..=n+1` (the last one is empty).
    pub degrees: Vec<DegreeBasis>,
    /// Position of a mask inside its own degree.
    pub position: [u16; 256],
}

fn build(n: usize) -> DimTables {
    let mut degrees = Vec::with_capacity(n + 2);
    let mut position = [u16::MAX; 256];
    for k in 0..=n + 1 {
        let mut masks = Vec::new();
        if k <= n {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                masks.push(idx.iter().fold(0u8, |m, &i| m | (1 << i)));
                // Advance to the next k-combination in lexicographic order.
                let mut p = k;
                while p > 0 && idx[p - 1] == n - k + p - 1 {
                    p -= 1;
                }
                if p == 0 {
                    break;
                }
                idx[p - 1] += 1;
                for q in p..k {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
        for (i, &m) in masks.iter().enumerate() {
            position[m as usize] = i as u16;
        }
        degrees.push(DegreeBasis { masks });
    }
    DimTables { degrees, position }
}

pub(crate) fn tables(n: usize) -> &'static DimTables {
    static TABLES: OnceLock<Vec<DimTables>> = OnceLock::new();
    &TABLES.get_or_init(|| (0..=MAX_DIM).map(build).collect())[n]
}

pub(crate) fn masks(n: usize, k: usize) -> &'static [Mask] {
    if k > n + 1 {
        return &[];
    }
    &tables(n).degrees[k].masks
}

pub(crate) fn position(n: usize, mask: Mask) -> usize {
    tables(n).position[mask as usize] as usize
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `+1`/`-1`: sign of `e^A ∧ e^B` relative to `e^{A∪B}` for disjoint masks.
pub(crate) fn merge_sign(a: Mask, b: Mask) -> i32 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += ((a as u32) >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) { 1 } else { -1 }
}

/// Number of indices of `mask` strictly below bit `j`.
pub(crate) fn count_below(mask: Mask, j: u32) -> u32 {
    ((mask as u32) & ((1u32 << j) - 1)).count_ones()
}

pub(crate) fn indices(mask: Mask) -> impl Iterator<Item = usize> {
    (0..8).filter(move |&i| mask & (1 << i) != 0)
}

/// Converts 1-based indices to a mask and the sign of the sorting permutation;
/// `None` if an index repeats or is out of range.
pub(crate) fn mask_from_indices(n: usize, idx: &[usize]) -> Option<(Mask, i32)> {
    let mut mask: Mask = 0;
    let mut sign = 1;
    for &i in idx {
        if i == 0 || i > n {
            return None;
        }
        let bit = 1u8 << (i - 1);
        if mask & bit != 0 {
            return None;
        }
        // Moving e^i past the already placed larger indices.
        if ((mask as u32) >> i).count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bit;
    }
    Some((mask, sign))
}

/// Lowercase label such as `e127` for the monomial `e^{127}`.
pub fn monomial_label(n: usize, k: usize, position: usize) -> String {
    let mut s = String::from("e");
    for i in indices(masks(n, k)[position]) {
        s.push_str(&(i + 1).to_string());
    }
    s
}
