//! Multi-dimensional Jacobi sequences `(Ω_n, α_{·|n})`, the interacting Fock
//! fields they define, basis covariance and moment reconstruction.
//!
//! `Ω_n` is stored as the bilinear form `W_n[ī, j̄] = ⟨e_ī, Ω_n e_j̄⟩` on the
//! multiset basis. The operator matrix is `S_n⁻¹ W_n`, with `S_n` the Gram
//! matrix of the symmetrized basis vectors.

use crate::cap::Cap;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moments::MomentFunctional;
use crate::ortho::OrthogonalDecomposition;
use crate::polyalg::{canonical_sym_gram, creation_shift, sym_lift, MultiIndex, SymBasis};
use crate::scalar::{within_tolerance, Scalar};
use crate::verify::CheckReport;

#[derive(Debug, Clone)]
pub struct JacobiLevel<S: Scalar> {
    basis: SymBasis,
    un: Matrix<S>,
    un_rank: usize,
    omega: Matrix<S>,
    omega_rank: usize,
    alpha: Option<Vec<Matrix<S>>>,
    alpha_least_squares: bool,
}

impl<S: Scalar> JacobiLevel<S> {
    pub fn level(&self) -> usize {
        self.basis.level() as usize
    }

    pub fn basis(&self) -> &SymBasis {
        &self.basis
    }

    /// `C_n`: column `ī` holds the monic coordinates of `(a^+_1)^{m_1}⋯(a^+_d)^{m_d} Φ`.
    pub fn un(&self) -> &Matrix<S> {
        &self.un
    }

    pub fn un_rank(&self) -> usize {
        self.un_rank
    }

    /// The Ω-form `W_n = C_nᵀ G_n C_n`.
    pub fn omega(&self) -> &Matrix<S> {
        &self.omega
    }

    pub fn omega_rank(&self) -> usize {
        self.omega_rank
    }

    /// The Ω-operator `S_n⁻¹ W_n`.
    pub fn omega_operator(&self) -> Matrix<S> {
        let s = canonical_sym_gram::<S>(&self.basis);
        let inv: Vec<S> = s.diagonal_entries().iter().map(|x| S::one() / x).collect();
        &Matrix::diagonal(&inv) * &self.omega
    }

    /// `Λ_{j|n}`, available below the top level.
    pub fn alpha(&self, j: usize) -> Option<&Matrix<S>> {
        self.alpha.as_ref().map(|a| &a[j])
    }

    pub fn alphas(&self) -> Option<&[Matrix<S>]> {
        self.alpha.as_deref()
    }

    /// `Λ_{v|n} = Σ_j v_j Λ_{j|n}`.
    pub fn alpha_v(&self, v: &[S]) -> Option<Matrix<S>> {
        let a = self.alpha.as_ref()?;
        let mut out = Matrix::zeros(self.basis.len(), self.basis.len());
        for (m, c) in a.iter().zip(v) {
            out = &out + &m.scale(c);
        }
        Some(out)
    }

    /// True when `C_n` was singular and `Λ` is a least-squares solution.
    pub fn alpha_least_squares(&self) -> bool {
        self.alpha_least_squares
    }

    /// `Λ` is only determined modulo `ker W_n` when `W_n` is singular.
    pub fn alpha_modulo_kernel(&self) -> bool {
        self.omega_rank < self.basis.len()
    }
}

#[derive(Debug, Clone)]
pub struct JacobiSequences<S: Scalar> {
    dim: usize,
    levels: Vec<JacobiLevel<S>>,
    tol: f64,
}

impl<S: Scalar> JacobiSequences<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &JacobiLevel<S> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[JacobiLevel<S>] {
        &self.levels
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }
}

/// Assembles `C_n`, `W_n` and `Λ_{j|n}` from the decomposition and CAP data.
pub fn build_jacobi<S: Scalar>(
    dec: &OrthogonalDecomposition<S>,
    cap: &Cap<S>,
) -> Result<JacobiSequences<S>> {
    let d = dec.dim();
    let top = dec.max_level();
    if cap.len() != top {
        return Err(Error::Precondition(format!(
            "CAP data covers {} levels, decomposition has {top}",
            cap.len()
        )));
    }
    let tol = dec.tolerance();
    let mut levels: Vec<JacobiLevel<S>> = Vec::with_capacity(top + 1);
    let mut prev: Option<(SymBasis, Matrix<S>)> = None;
    for n in 0..=top {
        let basis = SymBasis::new(d, n as u32);
        let un = match &prev {
            None => Matrix::identity(1),
            Some((pb, pc)) => {
                let columns: Vec<Vec<S>> = basis
                    .entries()
                    .iter()
                    .map(|class| {
                        let j = class
                            .exponents()
                            .iter()
                            .position(|&e| e > 0)
                            .expect("level >= 1");
                        let lower = class.lowered(j).expect("positive exponent");
                        let col = pc.column(pb.position(&lower).expect("lower class"));
                        cap.level(n - 1).aplus(j).mul_vec(&col)
                    })
                    .collect();
                Matrix::from_columns(basis.len(), &columns)
            }
        };
        let g = dec.level(n).gram();
        let omega = &(&un.transpose() * g) * &un;
        let un_rank = un.rank(tol);
        let omega_rank = omega.psd_rank(tol);
        let full = un_rank == basis.len();
        let alpha = (n < top).then(|| {
            let inv = if full {
                un.inverse(tol).unwrap_or_else(|| un.pseudo_inverse(tol))
            } else {
                un.pseudo_inverse(tol)
            };
            (0..d)
                .map(|j| &(&inv * cap.level(n).azero(j)) * &un)
                .collect::<Vec<_>>()
        });
        levels.push(JacobiLevel {
            basis: basis.clone(),
            un: un.clone(),
            un_rank,
            omega,
            omega_rank,
            alpha,
            alpha_least_squares: !full,
        });
        prev = Some((basis, un));
    }
    Ok(JacobiSequences {
        dim: d,
        levels,
        tol,
    })
}

/// Runs the whole pipeline on the moments of `Y_j = Σ_k R[k, j] X_k`, i.e.
/// in the basis `e'_j = R e_j`.
pub fn jacobi_in_basis<S: Scalar>(
    m: &MomentFunctional<S>,
    r: &Matrix<S>,
    max_level: usize,
) -> Result<JacobiSequences<S>> {
    sym_lift(r, 1, m.tolerance())?;
    let pulled = m.pull_back(r)?;
    let dec = crate::ortho::decompose(&pulled, max_level)?;
    let cap = crate::cap::build_cap(&dec, &pulled)?;
    build_jacobi(&dec, &cap)
}

/// Compares primed data (basis `e'_j = R e_j`) with unprimed data at level
/// `n`: `W'_n = Lᵀ W_n L` with `L = sym_lift(R, n)`, and
/// `W'_n Λ'_{j|n} = Lᵀ W_n (Σ_k R[k,j] Λ_{k|n}) L`, which is the α
/// conjugation identity restricted to the complement of `ker W`.
pub fn check_basis_covariance<S: Scalar>(
    jac_e: &JacobiSequences<S>,
    jac_eprime: &JacobiSequences<S>,
    r: &Matrix<S>,
    n: usize,
) -> Result<CheckReport> {
    if n > jac_e.max_level() || n > jac_eprime.max_level() {
        return Err(Error::Precondition(format!(
            "level {n} not available in both Jacobi sequences"
        )));
    }
    let tol = jac_e.tolerance();
    let l = sym_lift(r, n as u32, tol)?;
    let lt = l.transpose();
    let w = jac_e.level(n).omega();
    let wp = jac_eprime.level(n).omega();
    let expected = &(&lt * w) * &l;
    let omega_dev = wp.max_abs_diff(&expected);
    // Entry bound of the triple product, the natural scale for rounding.
    let size = (l.rows() * l.rows()) as f64;
    let lw_scale = l.max_abs() * l.max_abs() * w.max_abs() * size;
    let mut passed = within_tolerance::<S>(omega_dev, lw_scale, tol);
    let mut worst = omega_dev;
    let mut alpha_dev = 0.0f64;
    if let (Some(_), Some(_)) = (jac_e.level(n).alphas(), jac_eprime.level(n).alphas()) {
        // Rounding in the primed pipeline mixes every direction, so the
        // scale uses the largest |R| entry and every Λ_k.
        let alpha_bound = jac_e
            .level(n)
            .alphas()
            .expect("alpha present")
            .iter()
            .map(|a| a.max_abs())
            .sum::<f64>()
            .max(1.0)
            * r.max_abs();
        for j in 0..jac_e.dim() {
            let rj = r.column(j);
            let combo = jac_e.level(n).alpha_v(&rj).expect("alpha present");
            let rhs = &(&(&lt * w) * &combo) * &l;
            let lhs = wp * jac_eprime.level(n).alpha(j).expect("alpha present");
            let dev = lhs.max_abs_diff(&rhs);
            alpha_dev = alpha_dev.max(dev);
            let scale = (lw_scale * alpha_bound * size).max(lhs.max_abs());
            passed &= within_tolerance::<S>(dev, scale, tol);
        }
        worst = worst.max(alpha_dev);
    }
    let mut report = CheckReport::new("basis_covariance", passed, worst);
    report.note(format!(
        "level {n}: omega deviation {omega_dev:e}, alpha deviation {alpha_dev:e}"
    ));
    Ok(report)
}

/// Creation and annihilation fields on the symmetric Fock space with level
/// inner products `W_n`.
#[derive(Debug, Clone)]
pub struct FockFields<S: Scalar> {
    dim: usize,
    /// `fplus[n][j]`: level `n` to `n+1`.
    fplus: Vec<Vec<Matrix<S>>>,
    /// `fminus[n][j]`: level `n` to `n-1`; empty matrices at level 0.
    fminus: Vec<Vec<Matrix<S>>>,
}

/// `Fplus[j]@n` is the structural shift `ξ ↦ e_j ⊗̂ ξ`; `Fminus[j]@(n+1)` is
/// the minimum-norm solution of `W_n F = Fplus[j]@nᵀ W_{n+1}`.
pub fn build_fock_fields<S: Scalar>(jac: &JacobiSequences<S>) -> FockFields<S> {
    let d = jac.dim();
    let top = jac.max_level();
    let tol = jac.tolerance();
    let fplus: Vec<Vec<Matrix<S>>> = (0..top)
        .map(|n| (0..d).map(|j| creation_shift(d, n as u32, j)).collect())
        .collect();
    let mut fminus = vec![(0..d).map(|_| Matrix::zeros(0, 1)).collect::<Vec<_>>()];
    for n in 0..top {
        let pinv = jac.level(n).omega().psd_pseudo_inverse(tol);
        let w_up = jac.level(n + 1).omega();
        fminus.push(
            (0..d)
                .map(|j| &(&pinv * &fplus[n][j].transpose()) * w_up)
                .collect(),
        );
    }
    FockFields {
        dim: d,
        fplus,
        fminus,
    }
}

impl<S: Scalar> FockFields<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> usize {
        self.fplus.len()
    }

    pub fn fplus(&self, j: usize, n: usize) -> &Matrix<S> {
        &self.fplus[n][j]
    }

    pub fn fminus(&self, j: usize, n: usize) -> &Matrix<S> {
        &self.fminus[n][j]
    }

    /// `φ(X_{j_1} ⋯ X_{j_k})` recovered from the Jacobi sequences alone: the
    /// level-0 coordinate of `M_{j_1} ⋯ M_{j_k} Φ` with
    /// `M_j = Fplus[j] + Λ_j + Fminus[j]`. Letters are 0-based.
    pub fn reconstruct(&self, jac: &JacobiSequences<S>, word: &[usize]) -> Result<S> {
        let k = word.len();
        if k > jac.max_level() {
            return Err(Error::DegreeTooHigh {
                degree: k as i64,
                max_level: jac.max_level(),
            });
        }
        if let Some(&bad) = word.iter().find(|&&j| j >= self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: bad + 1,
            });
        }
        // graded vector, levels 0..=state.len()-1
        let mut state: Vec<Vec<S>> = vec![vec![S::one()]];
        for (step, &j) in word.iter().rev().enumerate() {
            // Only levels that can still return to 0 matter.
            let remaining = k - step - 1;
            let reach = (state.len() + 1).min(remaining + 1);
            let mut next: Vec<Vec<S>> = (0..reach)
                .map(|n| vec![S::zero(); jac.level(n).basis().len()])
                .collect();
            for (n, v) in state.iter().enumerate() {
                if v.iter().all(|x| x.is_zero()) {
                    continue;
                }
                if n + 1 < reach {
                    add_into(&mut next[n + 1], &self.fplus[n][j].mul_vec(v));
                }
                if n < reach {
                    let alpha = jac.level(n).alpha(j).ok_or_else(|| {
                        Error::Internal(format!("alpha missing at level {n} during reconstruction"))
                    })?;
                    add_into(&mut next[n], &alpha.mul_vec(v));
                }
                if n > 0 && n - 1 < reach {
                    add_into(&mut next[n - 1], &self.fminus[n][j].mul_vec(v));
                }
            }
            state = next;
        }
        Ok(state[0][0].clone())
    }
}

fn add_into<S: Scalar>(acc: &mut [S], v: &[S]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// Reconstructs `φ(X_{j_1} ⋯ X_{j_k})` from `jac`. Builds the fields on each
/// call; use [`FockFields::reconstruct`] for many words.
pub fn reconstruct_moments<S: Scalar>(jac: &JacobiSequences<S>, word: &[usize]) -> Result<S> {
    build_fock_fields(jac).reconstruct(jac, word)
}

/// Reconstructed moment for a multi-index (its nondecreasing word).
pub fn reconstruct_moment_index<S: Scalar>(
    fields: &FockFields<S>,
    jac: &JacobiSequences<S>,
    m: &MultiIndex,
) -> Result<S> {
    fields.reconstruct(jac, &m.word())
}

/// Kernel of `W_{n-1}` lifted by every creator must stay null at level `n`.
/// Returns the kernel dimension per level and the worst quadratic-form value.
pub fn check_null_propagation<S: Scalar>(
    jac: &JacobiSequences<S>,
    fields: &FockFields<S>,
) -> CheckReport {
    let tol = jac.tolerance();
    let mut worst = 0.0f64;
    let mut passed = true;
    let mut dims = Vec::new();
    for n in 1..=jac.max_level() {
        let w_prev = jac.level(n - 1).omega();
        let kernel = w_prev.psd_kernel(tol);
        dims.push(format!("ker W_{} = {}", n - 1, kernel.len()));
        let w = jac.level(n).omega();
        for eta in &kernel {
            for j in 0..jac.dim() {
                let lift = fields.fplus(j, n - 1).mul_vec(eta);
                let val = w.bilinear(&lift, &lift).to_f64().abs();
                let scale = w.max_abs() * crate::scalar::max_abs(&lift).powi(2);
                worst = worst.max(val);
                passed &= within_tolerance::<S>(val, scale, tol);
            }
        }
    }
    let mut report = CheckReport::new("null_propagation", passed, worst);
    report.note(dims.join(", "));
    report
}
