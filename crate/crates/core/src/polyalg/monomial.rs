use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::binomial;

/// Exponent vector of a monomial `X_1^{n_1} ⋯ X_d^{n_d}`.
///
/// The same type labels multiset classes of the symmetric power: the class
/// of `(j_1, …, j_n)` is the vector of multiplicities of each index.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "dimension must be at least 1");
        MultiIndex(exponents)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex::new(vec![0; d])
    }

    /// The unit exponent `e_j` (0-based `j`).
    pub fn unit(d: usize, j: usize) -> Self {
        let mut e = vec![0; d];
        e[j] = 1;
        MultiIndex::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self + e_j`.
    pub fn raised(&self, j: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[j] += 1;
        MultiIndex(e)
    }

    /// `self - e_j`, if that stays nonnegative.
    pub fn lowered(&self, j: usize) -> Option<MultiIndex> {
        let mut e = self.0.clone();
        e[j] = e[j].checked_sub(1)?;
        Some(MultiIndex(e))
    }

    /// One representative word `(j_1, …, j_n)` of the multiset class, with
    /// indices in nondecreasing order (0-based).
    pub fn word(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(j, &m)| std::iter::repeat_n(j, m as usize))
            .collect()
    }

    /// The class of a word, i.e. its multiplicity vector.
    pub fn from_word(d: usize, word: &[usize]) -> MultiIndex {
        let mut e = vec![0; d];
        for &j in word {
            e[j] += 1;
        }
        MultiIndex::new(e)
    }
}

impl Ord for MultiIndex {
    /// Graded order; within a degree, lexicographically decreasing exponents.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All exponent vectors of total degree `n` in `d` variables, in canonical
/// order. Its length is `C(n+d-1, d-1)`.
pub fn enumerate_monomials(d: usize, n: u32) -> Vec<MultiIndex> {
    assert!(d >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(sym_dim(d, n));
    let mut current = vec![0u32; d];
    fill(&mut current, 0, n, &mut out);
    out
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(current, pos + 1, remaining - e, out);
    }
}

/// `dim (R^d)^{⊗̂n} = C(n+d-1, d-1)`.
pub fn sym_dim(d: usize, n: u32) -> usize {
    binomial(n as u64 + d as u64 - 1, d as u64 - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn canonical_order_d3_n2() {
        let got = enumerate_monomials(3, 2);
        let want = vec![
            mi(&[2, 0, 0]),
            mi(&[1, 1, 0]),
            mi(&[1, 0, 1]),
            mi(&[0, 2, 0]),
            mi(&[0, 1, 1]),
            mi(&[0, 0, 2]),
        ];
        assert_eq!(got, want);
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(sorted, want);
    }

    #[test]
    fn one_dimensional_level_is_single() {
        assert_eq!(enumerate_monomials(1, 5), vec![mi(&[5])]);
        assert_eq!(enumerate_monomials(2, 3).len(), 4);
        assert_eq!(enumerate_monomials(4, 0), vec![mi(&[0, 0, 0, 0])]);
    }

    #[test]
    fn graded_before_lexicographic() {
        assert!(mi(&[0, 1]) < mi(&[2, 0]));
        assert!(mi(&[2, 0]) < mi(&[1, 1]));
    }

    #[test]
    fn words_round_trip() {
        let m = mi(&[2, 0, 1]);
        assert_eq!(m.word(), vec![0, 0, 2]);
        assert_eq!(MultiIndex::from_word(3, &[2, 0, 0]), m);
        assert_eq!(m.lowered(1), None);
        assert_eq!(m.lowered(2), Some(mi(&[2, 0, 0])));
    }
}
