//! Classical one-dimensional recurrence coefficients (Stieltjes procedure)
//! and the closed-form Jacobi sequences of product measures built from them.
//!
//! Univariate polynomials are handled here as plain coefficient vectors so
//! that this module stays independent of the multivariate pipeline it is
//! used to check.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::polyalg::SymBasis;
use crate::scalar::Scalar;

/// Monic three-term recurrence `x p_n = p_{n+1} + α_n p_n + β²_{n-1} p_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence1D<S> {
    /// `α_0 … α_{N-1}`.
    pub alphas: Vec<S>,
    /// `β²_0 … β²_{N-1}`, with `β²_n = ⟨p_{n+1},p_{n+1}⟩ / ⟨p_n,p_n⟩`.
    pub beta_squared: Vec<S>,
    /// `⟨p_n, p_n⟩` for `n = 0..=N`.
    pub squared_norms: Vec<S>,
    /// First `n` with `⟨p_n, p_n⟩ = 0`, or `N + 1` if none.
    pub termination_rank: usize,
    /// True where `α_n` is a convention (0) because the recurrence terminated.
    pub alpha_is_conventional: Vec<bool>,
}

impl<S: Scalar> Recurrence1D<S> {
    pub fn levels(&self) -> usize {
        self.alphas.len()
    }

    /// `β_n` as floats.
    pub fn betas(&self) -> Vec<f64> {
        self.beta_squared
            .iter()
            .map(|b| b.to_f64().max(0.0).sqrt())
            .collect()
    }

    /// `β²_0 ⋯ β²_{n-1}`, the one-dimensional Ω-form at level `n`.
    pub fn omega(&self, n: usize) -> S {
        self.beta_squared[..n]
            .iter()
            .fold(S::one(), |acc, b| acc * b)
    }
}

fn pair<S: Scalar>(f: &[S], g: &[S], moments: &[S]) -> S {
    let mut acc = S::zero();
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            acc += &(a.mul_ref(b) * &moments[i + j]);
        }
    }
    acc
}

fn times_x<S: Scalar>(p: &[S]) -> Vec<S> {
    std::iter::once(S::zero())
        .chain(p.iter().cloned())
        .collect()
}

/// Recurrence coefficients for levels `0..levels` from raw moments
/// `m_0 = 1, m_1, …, m_{2·levels}`.
pub fn stieltjes<S: Scalar>(moments: &[S], levels: usize, tol: f64) -> Result<Recurrence1D<S>> {
    if moments.len() < 2 * levels + 1 {
        return Err(Error::InsufficientMoments {
            needed: 2 * levels as u32,
            available: moments.len().saturating_sub(1) as u32,
        });
    }
    if !moments[0].is_one() {
        return Err(Error::InvalidParameter(format!(
            "moment m_0 must be 1, got {}",
            moments[0]
        )));
    }

    let mut alphas = Vec::with_capacity(levels);
    let mut beta_squared = Vec::with_capacity(levels);
    let mut norms = vec![S::one()];
    let mut flags = Vec::with_capacity(levels);
    let mut termination = levels + 1;
    let mut prev: Vec<S> = Vec::new();
    let mut cur: Vec<S> = vec![S::one()];

    for n in 0..levels {
        if termination <= n {
            alphas.push(S::zero());
            beta_squared.push(S::zero());
            norms.push(S::zero());
            flags.push(true);
            continue;
        }
        let h = norms[n].clone();
        let xp = times_x(&cur);
        let a = pair(&xp, &cur, moments) / &h;
        let mut next = xp;
        for (k, c) in cur.iter().enumerate() {
            next[k] -= &a.mul_ref(c);
        }
        if n > 0 {
            let b = h.clone() / &norms[n - 1];
            for (k, c) in prev.iter().enumerate() {
                next[k] -= &b.mul_ref(c);
            }
        }
        let mut h_next = pair(&next, &next, moments);
        if h_next.is_negative() && !h_next.is_negligible(tol) {
            return Err(Error::NotPositiveSemidefinite {
                level: n + 1,
                detail: format!("squared norm of monic p_{} is {h_next}", n + 1),
            });
        }
        if h_next.is_negligible(tol) {
            h_next = S::zero();
            termination = n + 1;
        }
        beta_squared.push(h_next.clone() / &h);
        alphas.push(a);
        flags.push(false);
        norms.push(h_next);
        prev = std::mem::replace(&mut cur, next);
    }

    Ok(Recurrence1D {
        alphas,
        beta_squared,
        squared_norms: norms,
        termination_rank: termination,
        alpha_is_conventional: flags,
    })
}

/// Diagonal Jacobi data of a product measure at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormLevel<S: Scalar> {
    pub basis: SymBasis,
    /// Diagonal Ω-form `W_n`.
    pub omega: Matrix<S>,
    /// Diagonal `Λ_{l|n}` for each coordinate `l`, when every factor
    /// recurrence reaches `α_n`.
    pub alpha: Option<Vec<Matrix<S>>>,
}

/// For class `(m_1, …, m_d)`: Ω entry `∏_l β²_{l,0} ⋯ β²_{l,m_l-1}` and
/// `Λ_l` entry `α_{l,m_l}`.
pub fn product_jacobi_closed_form<S: Scalar>(
    recs: &[Recurrence1D<S>],
    n: usize,
) -> Result<ClosedFormLevel<S>> {
    if recs.is_empty() {
        return Err(Error::Precondition(
            "at least one factor recurrence is required".into(),
        ));
    }
    if let Some(short) = recs.iter().position(|r| r.levels() < n) {
        return Err(Error::Precondition(format!(
            "factor {} recurrence covers {} levels, level {n} requested",
            short + 1,
            recs[short].levels()
        )));
    }
    let basis = SymBasis::new(recs.len(), n as u32);
    let omega: Vec<S> = basis
        .entries()
        .iter()
        .map(|m| {
            m.exponents()
                .iter()
                .zip(recs)
                .fold(S::one(), |acc, (&e, r)| acc * &r.omega(e as usize))
        })
        .collect();
    let alpha = recs.iter().all(|r| r.levels() > n).then(|| {
        (0..recs.len())
            .map(|l| {
                let diag: Vec<S> = basis
                    .entries()
                    .iter()
                    .map(|m| recs[l].alphas[m.exponents()[l] as usize].clone())
                    .collect();
                Matrix::diagonal(&diag)
            })
            .collect()
    });
    Ok(ClosedFormLevel {
        omega: Matrix::diagonal(&omega),
        alpha,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::FactorSpec;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn rec(f: FactorSpec, levels: usize) -> Recurrence1D<Rational> {
        stieltjes(
            &f.moments::<Rational>(2 * levels as u32).unwrap(),
            levels,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_recurrence() {
        let r = rec(FactorSpec::gaussian(0, 1), 6);
        for n in 0..6 {
            assert_eq!(r.alphas[n], q(0, 1));
            assert_eq!(r.beta_squared[n], q(n as i64 + 1, 1));
        }
        assert_eq!(r.termination_rank, 7);
        assert_eq!(r.omega(4), q(24, 1));
    }

    #[test]
    fn uniform_and_exponential() {
        let u = rec(FactorSpec::uniform(-1, 1), 3);
        assert_eq!(u.beta_squared[0], q(1, 3));
        assert_eq!(u.beta_squared[1], q(4, 15));
        let e = rec(FactorSpec::exponential(1), 5);
        for n in 0..5 {
            assert_eq!(e.alphas[n], q(2 * n as i64 + 1, 1));
            assert_eq!(e.beta_squared[n], q((n as i64 + 1).pow(2), 1));
        }
    }

    #[test]
    fn two_point_terminates() {
        let r = rec(FactorSpec::two_point(-1, 1), 4);
        assert_eq!(r.beta_squared[0], q(1, 1));
        assert_eq!(r.beta_squared[1], q(0, 1));
        assert_eq!(r.termination_rank, 2);
        assert_eq!(r.alphas[2], q(0, 1));
        assert!(r.alpha_is_conventional[2] && !r.alpha_is_conventional[1]);
        assert!(r.beta_squared[2..].iter().all(|b| *b == q(0, 1)));
    }

    #[test]
    fn float_two_point_terminates_too() {
        let m = FactorSpec::two_point(-1, 1).moments::<f64>(8).unwrap();
        let r = stieltjes(&m, 4, 1e-10).unwrap();
        assert_eq!(r.termination_rank, 2);
        assert_eq!(r.betas()[0], 1.0);
    }

    #[test]
    fn negative_norm_is_rejected() {
        let m: Vec<Rational> = vec![q(1, 1), q(1, 1), q(1, 2)];
        assert!(matches!(
            stieltjes(&m, 1, 0.0),
            Err(Error::NotPositiveSemidefinite { level: 1, .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let g = rec(FactorSpec::gaussian(0, 1), 3);
        let cf = product_jacobi_closed_form(&[g.clone(), g], 2).unwrap();
        assert_eq!(cf.omega, Matrix::diagonal(&[q(2, 1), q(1, 1), q(2, 1)]));
        assert!(cf.alpha.unwrap().iter().all(|a| a.max_abs() == 0.0));

        let t = rec(FactorSpec::two_point(-1, 1), 3);
        let cf = product_jacobi_closed_form(&[t.clone(), t], 2).unwrap();
        assert_eq!(cf.omega, Matrix::diagonal(&[q(0, 1), q(1, 1), q(0, 1)]));
    }
}
