use std::collections::HashMap;

use super::{enumerate_monomials, MultiIndex, Polynomial};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{factorial, Scalar};

/// Multiset basis `e_ī` of the symmetric power `(R^d)^{⊗̂n}` at one level,
/// each class labelled by its multiplicity vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBasis {
    dim: usize,
    level: u32,
    entries: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl SymBasis {
    pub fn new(dim: usize, level: u32) -> Self {
        let entries = enumerate_monomials(dim, level);
        let positions = entries
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        SymBasis {
            dim,
            level,
            entries,
            positions,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MultiIndex] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.entries[i]
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.positions.get(m).copied()
    }
}

/// Gram matrix `S_n` of the symmetrized basis vectors under the tensor inner
/// product. With `e_ī` the average over permutations of `e_{i_1}⊗…⊗e_{i_n}`,
/// `S_n` is diagonal with entry `(∏_l m_l!) / n!` for class `(m_1, …, m_d)`.
pub fn canonical_sym_gram<S: Scalar>(basis: &SymBasis) -> Matrix<S> {
    let n_fact: S = factorial(basis.level());
    let diag: Vec<S> = basis
        .entries()
        .iter()
        .map(|m| {
            let num = m
                .exponents()
                .iter()
                .fold(S::one(), |acc, &e| acc * &factorial::<S>(e));
            num / &n_fact
        })
        .collect();
    Matrix::diagonal(&diag)
}

/// Matrix of `R^{⊗n}` restricted to the symmetric power, in multiset
/// coordinates. Under `e_ī ↔ z^{m(ī)}` the column of class `(j_1, …, j_n)` is
/// the coefficient vector of `∏_t (Σ_k R[k, j_t] z_k)`.
pub fn sym_lift<S: Scalar>(r: &Matrix<S>, level: u32, tol: f64) -> Result<Matrix<S>> {
    if !r.is_square() || r.rows() == 0 {
        return Err(Error::Precondition(format!(
            "basis change must be a nonempty square matrix, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    if r.rank(tol) < r.rows() {
        return Err(Error::SingularMatrix(
            "basis-change matrix R is not invertible".into(),
        ));
    }
    Ok(sym_lift_unchecked(r, level))
}

pub(crate) fn sym_lift_unchecked<S: Scalar>(r: &Matrix<S>, level: u32) -> Matrix<S> {
    let d = r.rows();
    let basis = SymBasis::new(d, level);
    let images: Vec<Polynomial<S>> = (0..d).map(|j| Polynomial::linear(&r.column(j))).collect();
    let columns: Vec<Vec<S>> = basis
        .entries()
        .iter()
        .map(|class| {
            let mut p = Polynomial::one(d);
            for j in class.word() {
                p = p.mul(&images[j]).expect("same dimension");
            }
            basis.entries().iter().map(|m| p.coeff(m)).collect()
        })
        .collect();
    Matrix::from_columns(basis.len(), &columns)
}

/// Structural creation map `ξ ↦ e_j ⊗̂ ξ` from level `n` to level `n + 1` in
/// multiset coordinates: class `m` goes to class `m + e_j` with coefficient 1.
pub fn creation_shift<S: Scalar>(dim: usize, level: u32, j: usize) -> Matrix<S> {
    let from = SymBasis::new(dim, level);
    let to = SymBasis::new(dim, level + 1);
    let mut m = Matrix::zeros(to.len(), from.len());
    for (col, class) in from.entries().iter().enumerate() {
        let row = to.position(&class.raised(j)).expect("raised class exists");
        m[(row, col)] = S::one();
    }
    m
}
