//! Graded orthogonal decomposition `P = ⊕ P_n` by monic Gram–Schmidt on
//! total degree.
//!
//! Each degree-`n` monomial `M` gets the representative
//! `q_M = M − proj(M onto levels < n)`, where the projection solves the
//! normal equations of each lower level with the Moore–Penrose
//! pseudo-inverse of that level's Gram matrix. When the pre-scalar product is
//! degenerate this fixes one representative per leading monomial; inner
//! products of the results do not depend on that choice.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moments::MomentFunctional;
use crate::polyalg::{MultiIndex, Polynomial, SymBasis};
use crate::scalar::{max_abs, Arithmetic, Scalar};

/// One level `P_n` of the decomposition.
#[derive(Debug, Clone)]
pub struct OrthoLevel<S: Scalar> {
    basis: SymBasis,
    polys: Vec<Polynomial<S>>,
    gram: Matrix<S>,
    gram_pinv: Matrix<S>,
    rank: usize,
}

impl<S: Scalar> OrthoLevel<S> {
    pub fn basis(&self) -> &SymBasis {
        &self.basis
    }

    /// Monic representatives `q_M`, in basis order.
    pub fn polys(&self) -> &[Polynomial<S>] {
        &self.polys
    }

    pub fn poly(&self, i: usize) -> &Polynomial<S> {
        &self.polys[i]
    }

    /// `G_n[M, M'] = ⟨q_M, q_M'⟩`.
    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    pub fn gram_pinv(&self) -> &Matrix<S> {
        &self.gram_pinv
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.rank < self.polys.len()
    }
}

#[derive(Debug, Clone)]
pub struct OrthogonalDecomposition<S: Scalar> {
    dim: usize,
    levels: Vec<OrthoLevel<S>>,
    tol: f64,
}

/// Per-level coordinates of a polynomial in the monic bases.
pub type LevelCoords<S> = Vec<Vec<S>>;

/// Builds levels `0..=max_level`. Requires moments up to degree `2·max_level`.
pub fn decompose<S: Scalar>(
    m: &MomentFunctional<S>,
    max_level: usize,
) -> Result<OrthogonalDecomposition<S>> {
    decompose_with_order(m, max_level, |_, _| {})
}

/// Like [`decompose`], but processes the monomials of each level in the order
/// left by `reorder`. The stored result is always in canonical basis order.
pub fn decompose_with_order<S: Scalar>(
    m: &MomentFunctional<S>,
    max_level: usize,
    reorder: impl Fn(usize, &mut Vec<MultiIndex>),
) -> Result<OrthogonalDecomposition<S>> {
    let needed = 2 * max_level as u32;
    if m.max_degree() < needed {
        return Err(Error::InsufficientMoments {
            needed,
            available: m.max_degree(),
        });
    }
    let d = m.dim();
    let tol = m.tolerance();
    // Levels in processing order: (monomials, polys, gram pseudo-inverse).
    let mut work: Vec<(Vec<MultiIndex>, Vec<Polynomial<S>>, Matrix<S>)> = Vec::new();
    let mut levels = Vec::with_capacity(max_level + 1);

    for n in 0..=max_level {
        let basis = SymBasis::new(d, n as u32);
        let mut order = basis.entries().to_vec();
        reorder(n, &mut order);
        debug_assert_eq!(order.len(), basis.len());

        let mut polys = Vec::with_capacity(order.len());
        for mono in &order {
            let mut q = Polynomial::monomial(mono.clone(), S::one());
            for (k, (_, lower, pinv)) in work.iter().enumerate() {
                let b: Vec<S> = lower
                    .iter()
                    .map(|p| m.inner_monomial(mono, p))
                    .collect::<Result<_>>()?;
                let c = pinv.mul_vec(&b);
                check_consistency(
                    &levels[k],
                    &order_to_canonical(&work[k].0, &levels[k]),
                    &c,
                    &b,
                    k,
                    mono,
                    tol,
                )?;
                for (coef, p) in c.iter().zip(lower) {
                    q.add_scaled(p, &-coef.clone());
                }
            }
            if S::ARITHMETIC == Arithmetic::F64 {
                q.prune(0.0);
            }
            polys.push(q);
        }

        // ⟨q_M, q_M'⟩ = ⟨M, q_M'⟩ because q_M' is orthogonal to all lower levels.
        let len = order.len();
        let mut gram = Matrix::zeros(len, len);
        for i in 0..len {
            for j in i..len {
                let v = m.inner_monomial(&order[i], &polys[j])?;
                gram[(i, j)] = v.clone();
                gram[(j, i)] = v;
            }
        }
        if let Some(detail) = S::psd_violation(&gram, tol) {
            return Err(Error::NotPositiveSemidefinite { level: n, detail });
        }
        let pinv = gram.psd_pseudo_inverse(tol);

        // Store canonically ordered copy.
        let perm: Vec<usize> = basis
            .entries()
            .iter()
            .map(|e| order.iter().position(|o| o == e).expect("permutation"))
            .collect();
        let canon_polys: Vec<Polynomial<S>> = perm.iter().map(|&i| polys[i].clone()).collect();
        let canon_gram = Matrix::from_fn(len, len, |i, j| gram[(perm[i], perm[j])].clone());
        let canon_pinv = Matrix::from_fn(len, len, |i, j| pinv[(perm[i], perm[j])].clone());
        let rank = canon_gram.psd_rank(tol);
        levels.push(OrthoLevel {
            basis,
            polys: canon_polys,
            gram: canon_gram,
            gram_pinv: canon_pinv,
            rank,
        });
        work.push((order, polys, pinv));
    }

    Ok(OrthogonalDecomposition {
        dim: d,
        levels,
        tol,
    })
}

/// Maps processing-order positions to canonical positions of a stored level.
fn order_to_canonical<S: Scalar>(order: &[MultiIndex], level: &OrthoLevel<S>) -> Vec<usize> {
    order
        .iter()
        .map(|m| level.basis.position(m).expect("same level"))
        .collect()
}

/// The normal equations `G_k c = b` must be solvable; otherwise some null
/// vector of `G_k` has a nonzero inner product with `M`, which a positive
/// semidefinite moment matrix cannot produce.
fn check_consistency<S: Scalar>(
    level: &OrthoLevel<S>,
    to_canonical: &[usize],
    c: &[S],
    b: &[S],
    k: usize,
    mono: &MultiIndex,
    tol: f64,
) -> Result<()> {
    if !level.is_degenerate() {
        return Ok(());
    }
    let mut canon_c = vec![S::zero(); c.len()];
    for (pos, &ci) in to_canonical.iter().enumerate() {
        canon_c[ci] = c[pos].clone();
    }
    let gc = level.gram.mul_vec(&canon_c);
    let worst = to_canonical
        .iter()
        .enumerate()
        .map(|(pos, &ci)| (gc[ci].clone() - &b[pos]).to_f64().abs())
        .fold(0.0, f64::max);
    let ok = match S::ARITHMETIC {
        Arithmetic::Rational => worst == 0.0,
        Arithmetic::F64 => worst <= tol.sqrt() * max_abs(b).max(1.0),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotPositiveSemidefinite {
            level: k,
            detail: format!(
                "a null vector of the level-{k} Gram is not orthogonal to monomial {mono}"
            ),
        })
    }
}

impl<S: Scalar> OrthogonalDecomposition<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn level(&self, n: usize) -> &OrthoLevel<S> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[OrthoLevel<S>] {
        &self.levels
    }

    /// Monic representative of monomial `m`.
    pub fn poly_of(&self, m: &MultiIndex) -> Option<&Polynomial<S>> {
        let level = self.levels.get(m.degree() as usize)?;
        level.basis.position(m).map(|i| &level.polys[i])
    }

    /// `Σ_n Σ_i coords[n][i] q_{n,i}`.
    pub fn polynomial(&self, coords: &[Vec<S>]) -> Polynomial<S> {
        let mut p = Polynomial::zero(self.dim);
        for (level, c) in self.levels.iter().zip(coords) {
            for (q, ci) in level.polys.iter().zip(c) {
                p.add_scaled(q, ci);
            }
        }
        p
    }

    /// Zero coordinate vectors for every level.
    pub fn zero_coords(&self) -> LevelCoords<S> {
        self.levels
            .iter()
            .map(|l| vec![S::zero(); l.len()])
            .collect()
    }
}

/// Coordinates of `p` in the monic bases, by elimination on leading terms
/// from the top degree down. Exact and independent of the Gram matrices; the
/// components sum back to `p`.
pub fn project_coeffs<S: Scalar>(
    p: &Polynomial<S>,
    dec: &OrthogonalDecomposition<S>,
) -> Result<LevelCoords<S>> {
    if p.dim() != dec.dim {
        return Err(Error::DimensionMismatch {
            expected: dec.dim,
            found: p.dim(),
        });
    }
    if p.degree() > dec.max_level() as i64 {
        return Err(Error::DegreeTooHigh {
            degree: p.degree(),
            max_level: dec.max_level(),
        });
    }
    let mut rest = p.clone();
    let mut coords = dec.zero_coords();
    for n in (0..=dec.max_level()).rev() {
        let level = &dec.levels[n];
        let top: Vec<S> = level
            .basis
            .entries()
            .iter()
            .map(|m| rest.coeff(m))
            .collect();
        for (i, c) in top.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            rest.add_scaled(&level.polys[i], &-c.clone());
            // q_M has coefficient exactly 1 on M; make the cancellation exact.
            let residue = rest.coeff(level.basis.get(i));
            if !residue.is_zero() {
                rest.add_term(level.basis.get(i).clone(), &-residue);
            }
        }
        coords[n] = top;
    }
    debug_assert!(rest.is_zero() || S::ARITHMETIC == Arithmetic::F64);
    Ok(coords)
}
