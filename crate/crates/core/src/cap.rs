//! Creation, preservation and annihilation blocks of multiplication by each
//! coordinate, in the monic coordinates of an [`OrthogonalDecomposition`].

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moments::{inner, MomentFunctional};
use crate::ortho::{project_coeffs, OrthogonalDecomposition};
use crate::polyalg::Polynomial;
use crate::scalar::{max_abs, within_tolerance, Scalar};
use crate::verify::CheckReport;

/// `a^+_{j|n}`, `a^0_{j|n}` and `a^-_{j|n}` for every coordinate `j`.
#[derive(Debug, Clone)]
pub struct CapLevel<S: Scalar> {
    level: usize,
    aplus: Vec<Matrix<S>>,
    azero: Vec<Matrix<S>>,
    aminus: Vec<Matrix<S>>,
    null_residue: usize,
}

impl<S: Scalar> CapLevel<S> {
    pub fn level(&self) -> usize {
        self.level
    }

    /// `dim_{n+1} × dim_n`.
    pub fn aplus(&self, j: usize) -> &Matrix<S> {
        &self.aplus[j]
    }

    /// `dim_n × dim_n`.
    pub fn azero(&self, j: usize) -> &Matrix<S> {
        &self.azero[j]
    }

    /// `dim_{n-1} × dim_n` (zero rows at level 0).
    pub fn aminus(&self, j: usize) -> &Matrix<S> {
        &self.aminus[j]
    }

    /// `a^+_v = Σ_j v_j a^+_j` at this level.
    pub fn aplus_v(&self, v: &[S]) -> Matrix<S> {
        combine(&self.aplus, v)
    }

    pub fn azero_v(&self, v: &[S]) -> Matrix<S> {
        combine(&self.azero, v)
    }

    pub fn aminus_v(&self, v: &[S]) -> Matrix<S> {
        combine(&self.aminus, v)
    }

    /// Number of products `X_j q` whose expansion had a (null) component
    /// outside levels `n-1, n, n+1`. Always 0 for nondegenerate measures.
    pub fn null_residue(&self) -> usize {
        self.null_residue
    }
}

fn combine<S: Scalar>(mats: &[Matrix<S>], v: &[S]) -> Matrix<S> {
    assert_eq!(mats.len(), v.len(), "direction has wrong dimension");
    let mut out = Matrix::zeros(mats[0].rows(), mats[0].cols());
    for (m, c) in mats.iter().zip(v) {
        if !c.is_zero() {
            out = &out + &m.scale(c);
        }
    }
    out
}

/// CAP matrices for levels `0..N`, `N` being the top level of `dec`.
#[derive(Debug, Clone)]
pub struct Cap<S: Scalar> {
    dim: usize,
    levels: Vec<CapLevel<S>>,
}

impl<S: Scalar> Cap<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[CapLevel<S>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &CapLevel<S> {
        &self.levels[n]
    }

    /// Number of levels carrying CAP data, i.e. `N`.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Pre-norm test for a coordinate vector of level `k`: `G_k c = 0`.
fn is_null_component<S: Scalar>(
    dec: &OrthogonalDecomposition<S>,
    k: usize,
    c: &[S],
) -> (bool, f64) {
    let gc = dec.level(k).gram().mul_vec(c);
    let dev = max_abs(&gc);
    let scale = dec.level(k).gram().max_abs() * max_abs(c);
    (within_tolerance::<S>(dev, scale, dec.tolerance()), dev)
}

/// Expands `X_j q` for every monic basis element `q` of levels `0..N` and
/// reads off the three blocks. Components at other levels must be null
/// vectors; anything else is an internal inconsistency.
pub fn build_cap<S: Scalar>(
    dec: &OrthogonalDecomposition<S>,
    m: &MomentFunctional<S>,
) -> Result<Cap<S>> {
    let d = dec.dim();
    let top = dec.max_level();
    if m.max_degree() < 2 * top as u32 {
        return Err(Error::InsufficientMoments {
            needed: 2 * top as u32,
            available: m.max_degree(),
        });
    }
    let mut levels = Vec::with_capacity(top);
    for n in 0..top {
        let dim_n = dec.level(n).len();
        let dim_up = dec.level(n + 1).len();
        let dim_down = if n > 0 { dec.level(n - 1).len() } else { 0 };
        let mut aplus = vec![Matrix::zeros(dim_up, dim_n); d];
        let mut azero = vec![Matrix::zeros(dim_n, dim_n); d];
        let mut aminus = vec![Matrix::zeros(dim_down, dim_n); d];
        let mut null_residue = 0;
        for j in 0..d {
            for (i, q) in dec.level(n).polys().iter().enumerate() {
                let coords = project_coeffs(&q.mul_var(j), dec)?;
                let mut off_band = false;
                for (k, c) in coords.iter().enumerate() {
                    if k + 1 == n {
                        set_column(&mut aminus[j], i, c);
                    } else if k == n {
                        set_column(&mut azero[j], i, c);
                    } else if k == n + 1 {
                        set_column(&mut aplus[j], i, c);
                    } else if c.iter().any(|x| !x.is_negligible(dec.tolerance())) {
                        let (null, dev) = is_null_component(dec, k, c);
                        if !null {
                            return Err(Error::Internal(format!(
                                "X_{} q at level {n} has a non-null level-{k} component (|G c| = {dev:e})",
                                j + 1
                            )));
                        }
                        off_band = true;
                    }
                }
                if off_band {
                    null_residue += 1;
                }
            }
        }
        levels.push(CapLevel {
            level: n,
            aplus,
            azero,
            aminus,
            null_residue,
        });
    }
    Ok(Cap { dim: d, levels })
}

fn set_column<S: Scalar>(m: &mut Matrix<S>, col: usize, values: &[S]) {
    for (r, v) in values.iter().enumerate() {
        m[(r, col)] = v.clone();
    }
}

/// `Σ_i coords[i] q_{n,i}`.
fn level_polynomial<S: Scalar>(
    dec: &OrthogonalDecomposition<S>,
    n: usize,
    coords: &[S],
) -> Polynomial<S> {
    let mut p = Polynomial::zero(dec.dim());
    for (q, c) in dec.level(n).polys().iter().zip(coords) {
        p.add_scaled(q, c);
    }
    p
}

/// Checks `X_j q = a^+_j q + a^0_j q + a^-_j q` for every `j` and every monic
/// basis element below the top level. The residual polynomial must vanish;
/// for degenerate measures it may be a nonzero null vector, so the pass
/// criterion is a zero pre-norm, and the coefficient residual is reported
/// beside it.
pub fn check_quantum_decomposition<S: Scalar>(
    cap: &Cap<S>,
    dec: &OrthogonalDecomposition<S>,
    m: &MomentFunctional<S>,
) -> Result<CheckReport> {
    let tol = dec.tolerance();
    let mut max_coeff = 0.0f64;
    let mut max_prenorm = 0.0f64;
    let mut passed = true;
    let mut nonzero_residuals = 0usize;
    for level in cap.levels() {
        let n = level.level();
        for j in 0..cap.dim() {
            for (i, q) in dec.level(n).polys().iter().enumerate() {
                let lhs = q.mul_var(j);
                let mut rhs = level_polynomial(dec, n + 1, &level.aplus(j).column(i));
                rhs.add_scaled(
                    &level_polynomial(dec, n, &level.azero(j).column(i)),
                    &S::one(),
                );
                if n > 0 {
                    rhs.add_scaled(
                        &level_polynomial(dec, n - 1, &level.aminus(j).column(i)),
                        &S::one(),
                    );
                }
                let r = lhs.sub(&rhs);
                let coeff = r.max_abs_coeff();
                let prenorm = inner(&r, &r, m)?.to_f64().abs();
                if !r.is_zero() && coeff > 0.0 {
                    nonzero_residuals += 1;
                }
                max_coeff = max_coeff.max(coeff);
                max_prenorm = max_prenorm.max(prenorm);
                let scale = lhs.max_abs_coeff();
                if !within_tolerance::<S>(prenorm, scale * scale, tol) {
                    passed = false;
                }
            }
        }
    }
    let mut report = CheckReport::new("quantum_decomposition", passed, max_prenorm);
    report.note(format!("max residual pre-norm {max_prenorm:e}"));
    report.note(format!("max residual coefficient {max_coeff:e}"));
    report.note(format!(
        "residuals that are nonzero null polynomials: {nonzero_residuals}"
    ));
    Ok(report)
}

/// Checks that every component of `X_j q` outside levels `n-1, n, n+1` is a
/// null vector (exactly zero for nondegenerate measures).
pub fn check_jacobi_relation<S: Scalar>(
    cap: &Cap<S>,
    dec: &OrthogonalDecomposition<S>,
) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    let mut passed = true;
    let mut off_band = 0usize;
    for level in cap.levels() {
        let n = level.level();
        for j in 0..cap.dim() {
            for q in dec.level(n).polys() {
                let coords = project_coeffs(&q.mul_var(j), dec)?;
                for (k, c) in coords.iter().enumerate() {
                    if k + 1 >= n && k <= n + 1 {
                        continue;
                    }
                    if c.iter().all(|x| x.is_zero()) {
                        continue;
                    }
                    off_band += 1;
                    let (null, dev) = is_null_component(dec, k, c);
                    worst = worst.max(dev);
                    passed &= null;
                }
            }
        }
    }
    let mut report = CheckReport::new("jacobi_relation", passed, worst);
    report.note(format!(
        "off-band components (all must be null vectors): {off_band}"
    ));
    Ok(report)
}

/// Outcome of an injectivity test of `a^+_v` at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport {
    pub level: usize,
    pub rank: usize,
    pub dim: usize,
    pub injective: bool,
}

/// Whether `a^+_v|_n` has full column rank, as a map of coefficient vectors.
pub fn check_creator_injectivity<S: Scalar>(
    cap: &Cap<S>,
    v: &[S],
    n: usize,
) -> Result<InjectivityReport> {
    if v.len() != cap.dim() {
        return Err(Error::DimensionMismatch {
            expected: cap.dim(),
            found: v.len(),
        });
    }
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::Precondition("direction v must be nonzero".into()));
    }
    if n >= cap.len() {
        return Err(Error::Precondition(format!(
            "creator at level {n} needs decomposition level {}, have {}",
            n + 1,
            cap.len()
        )));
    }
    let a = cap.level(n).aplus_v(v);
    let rank = a.rank(crate::scalar::RANK_RTOL);
    Ok(InjectivityReport {
        level: n,
        rank,
        dim: a.cols(),
        injective: rank == a.cols(),
    })
}
