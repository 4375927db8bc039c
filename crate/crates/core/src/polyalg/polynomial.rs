use std::collections::BTreeMap;
use std::fmt;

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse polynomial in `d` commuting indeterminates. Zero coefficients are
/// never stored, and terms iterate in canonical basis order.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    dim: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, S::one())
    }

    pub fn constant(dim: usize, c: S) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    /// The coordinate `X_j` (0-based `j`).
    pub fn var(dim: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, j), S::one())
    }

    pub fn monomial(index: MultiIndex, c: S) -> Self {
        let mut p = Self::zero(index.dim());
        if !c.is_zero() {
            p.terms.insert(index, c);
        }
        p
    }

    /// `Σ_k coeffs[k] X_k`.
    pub fn linear(coeffs: &[S]) -> Self {
        let mut p = Self::zero(coeffs.len());
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex::unit(coeffs.len(), k), c);
        }
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.dim(), dim, "term dimension mismatch");
            p.add_term(m, &c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .next_back()
            .map_or(-1, |m| m.degree() as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &MultiIndex) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    /// Adds `c` to the coefficient of `m`.
    pub fn add_term(&mut self, m: MultiIndex, c: &S) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.dim(), self.dim);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &Polynomial<S>, c: &S) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &v.mul_ref(c));
        }
    }

    pub fn add(&self, other: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        out.add_scaled(other, &S::one());
        out
    }

    pub fn sub(&self, other: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        out.add_scaled(other, &-S::one());
        out
    }

    pub fn scale(&self, c: &S) -> Polynomial<S> {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.mul_ref(c)))
                .collect(),
        }
    }

    /// Multiplication by the coordinate `X_j`.
    pub fn mul_var(&self, j: usize) -> Polynomial<S> {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.raised(j), v.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial<S>) -> Result<Polynomial<S>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), &x.mul_ref(y));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Polynomial<S> {
        let mut acc = Self::one(self.dim);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// The homogeneous component of total degree `n`.
    pub fn homogeneous(&self, n: u32) -> Polynomial<S> {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, v)| (m.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Drops coefficients with `|c| <= tol` (no-op in rational mode).
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, v| !v.is_negligible(tol));
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        let mut out = Polynomial::zero(self.dim);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &f(v));
        }
        out
    }
}

/// Product of two polynomials over the same number of indeterminates.
pub fn poly_mul<S: Scalar>(p: &Polynomial<S>, q: &Polynomial<S>) -> Result<Polynomial<S>> {
    p.mul(q)
}

impl<S: Scalar> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| {
                    if e == 1 {
                        format!("X{}", j + 1)
                    } else {
                        format!("X{}^{}", j + 1, e)
                    }
                })
                .collect();
            let (neg, mag) = if c.is_negative() {
                (true, c.abs())
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}
