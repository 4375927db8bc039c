//! Mixed moments of a probability measure on `R^d` and the pre-scalar
//! product `⟨p, q⟩ = φ(p q)` they induce on polynomials.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::polyalg::{enumerate_monomials, MultiIndex, Polynomial};
use crate::scalar::{binomial, factorial, Rational, Scalar, DEFAULT_TOLERANCE};

/// One-dimensional factor of a product measure.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorSpec {
    Gaussian {
        mean: Rational,
        variance: Rational,
    },
    Uniform {
        a: Rational,
        b: Rational,
    },
    Exponential {
        rate: Rational,
    },
    /// Mass `p` at `x1` and `1 - p` at `x2`.
    TwoPoint {
        x1: Rational,
        x2: Rational,
        p: Rational,
    },
    /// Raw moments `m_0 = 1, m_1, m_2, …`.
    MomentList(Vec<Rational>),
}

impl FactorSpec {
    pub fn gaussian(mean: i64, variance: i64) -> Self {
        FactorSpec::Gaussian {
            mean: Rational::from_integer(mean.into()),
            variance: Rational::from_integer(variance.into()),
        }
    }

    pub fn uniform(a: i64, b: i64) -> Self {
        FactorSpec::Uniform {
            a: Rational::from_integer(a.into()),
            b: Rational::from_integer(b.into()),
        }
    }

    pub fn exponential(rate: i64) -> Self {
        FactorSpec::Exponential {
            rate: Rational::from_integer(rate.into()),
        }
    }

    /// Symmetric Bernoulli on `{x1, x2}` with equal weights.
    pub fn two_point(x1: i64, x2: i64) -> Self {
        FactorSpec::TwoPoint {
            x1: Rational::from_integer(x1.into()),
            x2: Rational::from_integer(x2.into()),
            p: Rational::new(1.into(), 2.into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            FactorSpec::Gaussian { variance, .. } if !variance.is_positive() => {
                bad(format!("gaussian variance must be > 0, got {variance}"))
            }
            FactorSpec::Uniform { a, b } if a >= b => {
                bad(format!("uniform requires a < b, got a={a}, b={b}"))
            }
            FactorSpec::Exponential { rate } if !rate.is_positive() => {
                bad(format!("exponential rate must be > 0, got {rate}"))
            }
            FactorSpec::TwoPoint { p, .. } if !(p.is_positive() && *p < Rational::one()) => {
                bad(format!("two-point weight must satisfy 0 < p < 1, got {p}"))
            }
            FactorSpec::MomentList(m) if m.first() != Some(&Rational::one()) => {
                bad("moment list must start with 1".into())
            }
            _ => Ok(()),
        }
    }

    /// Raw moments `m_0, …, m_max` from the closed form of the family.
    pub fn moments<S: Scalar>(&self, max_degree: u32) -> Result<Vec<S>> {
        self.validate()?;
        let n = max_degree as usize + 1;
        Ok(match self {
            FactorSpec::Gaussian { mean, variance } => {
                let mean = S::from_rational(mean);
                let var = S::from_rational(variance);
                // central moments: σ^{2r} (2r-1)!!, odd ones vanish
                let mut central = vec![S::zero(); n];
                let mut even = S::one();
                for (k, slot) in central.iter_mut().enumerate() {
                    if k % 2 == 0 {
                        if k > 0 {
                            even = even * &var * &S::from_i64(k as i64 - 1);
                        }
                        *slot = even.clone();
                    }
                }
                (0..n)
                    .map(|k| {
                        (0..=k).fold(S::zero(), |acc, i| {
                            let c = S::from_i64(binomial(k as u64, i as u64) as i64);
                            acc + &(c * &mean.pow_u32((k - i) as u32) * &central[i])
                        })
                    })
                    .collect()
            }
            FactorSpec::Uniform { a, b } => {
                let a = S::from_rational(a);
                let b = S::from_rational(b);
                let width = b.clone() - &a;
                (0..n)
                    .map(|k| {
                        let num = b.pow_u32(k as u32 + 1) - &a.pow_u32(k as u32 + 1);
                        num / &(width.clone() * &S::from_i64(k as i64 + 1))
                    })
                    .collect()
            }
            FactorSpec::Exponential { rate } => {
                let rate = S::from_rational(rate);
                (0..n)
                    .map(|k| factorial::<S>(k as u32) / &rate.pow_u32(k as u32))
                    .collect()
            }
            FactorSpec::TwoPoint { x1, x2, p } => {
                let (x1, x2, p) = (
                    S::from_rational(x1),
                    S::from_rational(x2),
                    S::from_rational(p),
                );
                let q = S::one() - &p;
                (0..n)
                    .map(|k| {
                        p.clone() * &x1.pow_u32(k as u32) + &(q.clone() * &x2.pow_u32(k as u32))
                    })
                    .collect()
            }
            FactorSpec::MomentList(list) => {
                if list.len() < n {
                    return Err(Error::InsufficientMoments {
                        needed: max_degree,
                        available: list.len() as u32 - 1,
                    });
                }
                list[..n].iter().map(S::from_rational).collect()
            }
        })
    }
}

/// A point mass of an atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Vec<Rational>,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    /// `μ_1 ⊗ … ⊗ μ_d`, one factor per coordinate.
    Product(Vec<FactorSpec>),
    /// Explicit mixed moments up to total degree `max_degree`.
    MomentTable {
        max_degree: u32,
        moments: BTreeMap<MultiIndex, Rational>,
    },
    /// Finite convex combination of point masses; produces degenerate
    /// pre-scalar products.
    Atomic(Vec<Atom>),
}

/// A probability measure on `R^d` given in one of the supported forms.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub dimension: usize,
    pub measure: Measure,
}

impl MeasureSpec {
    pub fn product(factors: Vec<FactorSpec>) -> Self {
        MeasureSpec {
            dimension: factors.len(),
            measure: Measure::Product(factors),
        }
    }

    pub fn atomic(dimension: usize, atoms: Vec<Atom>) -> Self {
        MeasureSpec {
            dimension,
            measure: Measure::Atomic(atoms),
        }
    }

    pub fn moment_table(
        dimension: usize,
        max_degree: u32,
        moments: BTreeMap<MultiIndex, Rational>,
    ) -> Self {
        MeasureSpec {
            dimension,
            measure: Measure::MomentTable {
                max_degree,
                moments,
            },
        }
    }

    pub fn factors(&self) -> Option<&[FactorSpec]> {
        match &self.measure {
            Measure::Product(f) => Some(f),
            _ => None,
        }
    }

    /// Largest total degree for which moments can be produced.
    pub fn available_degree(&self) -> Option<u32> {
        match &self.measure {
            Measure::MomentTable { max_degree, .. } => Some(*max_degree),
            Measure::Product(factors) => factors
                .iter()
                .filter_map(|f| match f {
                    FactorSpec::MomentList(m) => Some(m.len().saturating_sub(1) as u32),
                    _ => None,
                })
                .min(),
            Measure::Atomic(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        match &self.measure {
            Measure::Product(factors) => {
                if factors.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        found: factors.len(),
                    });
                }
                factors.iter().try_for_each(FactorSpec::validate)
            }
            Measure::Atomic(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::InvalidParameter(
                        "atomic measure needs at least one atom".into(),
                    ));
                }
                let mut total = Rational::zero();
                for atom in atoms {
                    if atom.point.len() != self.dimension {
                        return Err(Error::DimensionMismatch {
                            expected: self.dimension,
                            found: atom.point.len(),
                        });
                    }
                    if !atom.weight.is_positive() {
                        return Err(Error::InvalidParameter(format!(
                            "atom weight {} is not positive",
                            atom.weight
                        )));
                    }
                    total += &atom.weight;
                }
                if !total.is_one() {
                    return Err(Error::InvalidParameter(format!(
                        "atom weights sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
            Measure::MomentTable {
                max_degree,
                moments,
            } => {
                if let Some(bad) = moments.keys().find(|m| m.dim() != self.dimension) {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        found: bad.dim(),
                    });
                }
                if moments.get(&MultiIndex::zero(self.dimension)) != Some(&Rational::one()) {
                    return Err(Error::InvalidParameter(
                        "moment table must contain μ[0] = 1".into(),
                    ));
                }
                for n in 0..=*max_degree {
                    if let Some(missing) = enumerate_monomials(self.dimension, n)
                        .into_iter()
                        .find(|m| !moments.contains_key(m))
                    {
                        return Err(Error::InvalidParameter(format!(
                            "moment table is missing index {missing}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// The state `φ` in coordinates: every mixed moment `μ[α]` with `|α| <= D`,
/// precomputed at construction.
#[derive(Debug, Clone)]
pub struct MomentFunctional<S> {
    dim: usize,
    max_degree: u32,
    table: HashMap<MultiIndex, S>,
    tol: f64,
}

/// Computes every mixed moment of total degree `<= max_degree`.
pub fn build_moments<S: Scalar>(
    spec: &MeasureSpec,
    max_degree: u32,
) -> Result<MomentFunctional<S>> {
    spec.validate()?;
    let d = spec.dimension;
    let indices = (0..=max_degree).flat_map(|n| enumerate_monomials(d, n));
    let table: HashMap<MultiIndex, S> = match &spec.measure {
        Measure::Product(factors) => {
            let per_factor = factors
                .iter()
                .map(|f| f.moments::<S>(max_degree))
                .collect::<Result<Vec<_>>>()?;
            indices
                .map(|m| {
                    let v = m
                        .exponents()
                        .iter()
                        .zip(&per_factor)
                        .fold(S::one(), |acc, (&e, mom)| acc * &mom[e as usize]);
                    (m, v)
                })
                .collect()
        }
        Measure::Atomic(atoms) => {
            let atoms: Vec<(Vec<S>, S)> = atoms
                .iter()
                .map(|a| {
                    (
                        a.point.iter().map(S::from_rational).collect(),
                        S::from_rational(&a.weight),
                    )
                })
                .collect();
            indices
                .map(|m| {
                    let v = atoms.iter().fold(S::zero(), |acc, (pt, w)| {
                        let mono = m
                            .exponents()
                            .iter()
                            .zip(pt)
                            .fold(w.clone(), |acc, (&e, x)| acc * &x.pow_u32(e));
                        acc + &mono
                    });
                    (m, v)
                })
                .collect()
        }
        Measure::MomentTable {
            max_degree: avail,
            moments,
        } => {
            if max_degree > *avail {
                return Err(Error::InsufficientMoments {
                    needed: max_degree,
                    available: *avail,
                });
            }
            indices
                .map(|m| (m.clone(), S::from_rational(&moments[&m])))
                .collect()
        }
    };
    Ok(MomentFunctional {
        dim: d,
        max_degree,
        table,
        tol: DEFAULT_TOLERANCE,
    })
}

impl<S: Scalar> MomentFunctional<S> {
    /// Wraps an explicit table. It must hold `μ[0] = 1` and every index of
    /// total degree `<= max_degree`.
    pub fn from_table(dim: usize, max_degree: u32, table: HashMap<MultiIndex, S>) -> Result<Self> {
        let zero = MultiIndex::zero(dim);
        match table.get(&zero) {
            Some(v) if (v.clone() - &S::one()).is_negligible(DEFAULT_TOLERANCE) => {}
            _ => return Err(Error::InvalidParameter("μ[0] must equal 1".into())),
        }
        for n in 0..=max_degree {
            if let Some(m) = enumerate_monomials(dim, n)
                .into_iter()
                .find(|m| !table.contains_key(m))
            {
                return Err(Error::InvalidParameter(format!(
                    "moment table is missing index {m}"
                )));
            }
        }
        Ok(MomentFunctional {
            dim,
            max_degree,
            table,
            tol: DEFAULT_TOLERANCE,
        })
    }

    /// Float-mode comparison tolerance carried through the pipeline.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn get(&self, m: &MultiIndex) -> Result<&S> {
        self.table.get(m).ok_or(Error::InsufficientMoments {
            needed: m.degree(),
            available: self.max_degree,
        })
    }

    /// `φ(p)`.
    pub fn apply(&self, p: &Polynomial<S>) -> Result<S> {
        self.check_degree(p.degree())?;
        let mut acc = S::zero();
        for (m, c) in p.terms() {
            acc += &c.mul_ref(self.get(m)?);
        }
        Ok(acc)
    }

    /// `⟨M, q⟩` for a monomial `M`.
    pub fn inner_monomial(&self, m: &MultiIndex, q: &Polynomial<S>) -> Result<S> {
        self.check_degree(m.degree() as i64 + q.degree())?;
        let mut acc = S::zero();
        for (b, c) in q.terms() {
            acc += &c.mul_ref(&self.table[&m.add(b)]);
        }
        Ok(acc)
    }

    fn check_degree(&self, degree: i64) -> Result<()> {
        if degree > self.max_degree as i64 {
            return Err(Error::InsufficientMoments {
                needed: degree as u32,
                available: self.max_degree,
            });
        }
        Ok(())
    }

    /// Moments of the coordinates `Y_j = Σ_k R[k, j] X_k`, i.e. the state
    /// pulled back through the linear change of variables `R`.
    pub fn pull_back(&self, r: &Matrix<S>) -> Result<MomentFunctional<S>> {
        let d = self.dim;
        if r.rows() != d || r.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.rows().max(r.cols()),
            });
        }
        let forms: Vec<Polynomial<S>> = (0..d).map(|j| Polynomial::linear(&r.column(j))).collect();
        let mut powers: HashMap<MultiIndex, Polynomial<S>> = HashMap::new();
        powers.insert(MultiIndex::zero(d), Polynomial::one(d));
        let mut table = HashMap::new();
        table.insert(MultiIndex::zero(d), S::one());
        for n in 1..=self.max_degree {
            for alpha in enumerate_monomials(d, n) {
                let j = alpha
                    .exponents()
                    .iter()
                    .rposition(|&e| e > 0)
                    .expect("n >= 1");
                let prev = &powers[&alpha.lowered(j).expect("positive exponent")];
                let poly = prev.mul(&forms[j])?;
                table.insert(alpha.clone(), self.apply(&poly)?);
                powers.insert(alpha, poly);
            }
        }
        Ok(MomentFunctional {
            dim: d,
            max_degree: self.max_degree,
            table,
            tol: self.tol,
        })
    }

    /// One-dimensional moments of coordinate `j` (0-based) up to `max_degree`.
    pub fn marginal(&self, j: usize) -> Vec<S> {
        (0..=self.max_degree)
            .map(|k| {
                let mut e = vec![0; self.dim];
                e[j] = k;
                self.table[&MultiIndex::new(e)].clone()
            })
            .collect()
    }
}

/// The pre-scalar product `⟨p, q⟩ = φ(p q)`.
pub fn inner<S: Scalar>(
    p: &Polynomial<S>,
    q: &Polynomial<S>,
    m: &MomentFunctional<S>,
) -> Result<S> {
    if p.dim() != m.dim() || q.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: if p.dim() != m.dim() { p.dim() } else { q.dim() },
        });
    }
    if p.is_zero() || q.is_zero() {
        return Ok(S::zero());
    }
    m.check_degree(p.degree() + q.degree())?;
    let mut acc = S::zero();
    for (a, x) in p.terms() {
        for (b, y) in q.terms() {
            acc += &(x.mul_ref(y) * &m.table[&a.add(b)]);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn standard_gaussian_moments() {
        let m = FactorSpec::gaussian(0, 1).moments::<Rational>(6).unwrap();
        assert_eq!(m, ints(&[1, 0, 1, 0, 3, 0, 15]));
    }

    #[test]
    fn shifted_gaussian_moments() {
        // X = 1 + 2Z: E X^2 = 1 + 4 = 5, E X^3 = 1 + 3·4 = 13, E X^4 = 1 + 6·4 + 16·3 = 73
        let spec = FactorSpec::Gaussian {
            mean: q(1, 1),
            variance: q(4, 1),
        };
        assert_eq!(
            spec.moments::<Rational>(4).unwrap(),
            ints(&[1, 1, 5, 13, 73])
        );
    }

    #[test]
    fn closed_forms_of_other_families() {
        let u = FactorSpec::uniform(-1, 1).moments::<Rational>(4).unwrap();
        assert_eq!(u, vec![q(1, 1), q(0, 1), q(1, 3), q(0, 1), q(1, 5)]);
        let e = FactorSpec::exponential(2).moments::<Rational>(3).unwrap();
        assert_eq!(e, vec![q(1, 1), q(1, 2), q(1, 2), q(3, 4)]);
        let t = FactorSpec::TwoPoint {
            x1: q(0, 1),
            x2: q(1, 1),
            p: q(1, 4),
        }
        .moments::<Rational>(2)
        .unwrap();
        assert_eq!(t, vec![q(1, 1), q(3, 4), q(3, 4)]);
    }

    #[test]
    fn product_moments_multiply() {
        let spec =
            MeasureSpec::product(vec![FactorSpec::gaussian(0, 1), FactorSpec::gaussian(0, 1)]);
        let m = build_moments::<Rational>(&spec, 4).unwrap();
        assert_eq!(m.get(&MultiIndex::new(vec![2, 2])).unwrap(), &q(1, 1));
        assert_eq!(m.get(&MultiIndex::new(vec![4, 0])).unwrap(), &q(3, 1));
        assert_eq!(m.get(&MultiIndex::new(vec![3, 1])).unwrap(), &q(0, 1));
    }

    #[test]
    fn symmetric_atoms() {
        let spec = MeasureSpec::atomic(
            1,
            vec![
                Atom {
                    point: vec![q(1, 1)],
                    weight: q(1, 2),
                },
                Atom {
                    point: vec![q(-1, 1)],
                    weight: q(1, 2),
                },
            ],
        );
        let m = build_moments::<Rational>(&spec, 7).unwrap();
        for k in 0..=7u32 {
            let want = if k % 2 == 0 { q(1, 1) } else { q(0, 1) };
            assert_eq!(m.get(&MultiIndex::new(vec![k])).unwrap(), &want);
        }
    }

    #[test]
    fn inner_products_on_uniform() {
        let spec = MeasureSpec::product(vec![FactorSpec::uniform(-1, 1)]);
        let m = build_moments::<Rational>(&spec, 4).unwrap();
        let one = Polynomial::<Rational>::one(1);
        let x = Polynomial::var(1, 0);
        assert_eq!(inner(&one, &one, &m).unwrap(), q(1, 1));
        assert_eq!(inner(&x, &x, &m).unwrap(), q(1, 3));
        let q2 = x.mul(&x).unwrap().sub(&Polynomial::constant(1, q(1, 3)));
        assert_eq!(inner(&q2, &one, &m).unwrap(), q(0, 1));
    }

    #[test]
    fn insufficient_degree_is_reported() {
        let spec = MeasureSpec::product(vec![FactorSpec::gaussian(0, 1)]);
        let m = build_moments::<Rational>(&spec, 2).unwrap();
        let x2 = Polynomial::<Rational>::var(1, 0).pow(2);
        assert!(matches!(
            inner(&x2, &x2, &m),
            Err(Error::InsufficientMoments {
                needed: 4,
                available: 2
            })
        ));
    }

    #[test]
    fn invalid_parameters() {
        assert!(FactorSpec::gaussian(0, 0).validate().is_err());
        assert!(FactorSpec::uniform(1, 1).validate().is_err());
        assert!(FactorSpec::exponential(-1).validate().is_err());
        let bad_p = FactorSpec::TwoPoint {
            x1: q(0, 1),
            x2: q(1, 1),
            p: q(1, 1),
        };
        assert!(bad_p.validate().is_err());
        assert!(FactorSpec::MomentList(ints(&[2, 0])).validate().is_err());
        let short = MeasureSpec::product(vec![FactorSpec::MomentList(ints(&[1, 0, 1]))]);
        assert!(matches!(
            build_moments::<Rational>(&short, 4),
            Err(Error::InsufficientMoments {
                needed: 4,
                available: 2
            })
        ));
        let heavy = MeasureSpec::atomic(
            1,
            vec![Atom {
                point: vec![q(0, 1)],
                weight: q(1, 2),
            }],
        );
        assert!(heavy.validate().is_err());
    }

    #[test]
    fn moment_table_must_be_complete() {
        let mut table = BTreeMap::new();
        table.insert(MultiIndex::new(vec![0, 0]), q(1, 1));
        table.insert(MultiIndex::new(vec![1, 0]), q(0, 1));
        let spec = MeasureSpec::moment_table(2, 1, table.clone());
        assert!(spec.validate().is_err());
        table.insert(MultiIndex::new(vec![0, 1]), q(0, 1));
        let spec = MeasureSpec::moment_table(2, 1, table);
        assert!(spec.validate().is_ok());
        assert!(matches!(
            build_moments::<Rational>(&spec, 2),
            Err(Error::InsufficientMoments { .. })
        ));
    }

    #[test]
    fn pull_back_by_shear() {
        // Y_1 = X_1, Y_2 = X_1 + X_2 for independent standard Gaussians.
        let spec =
            MeasureSpec::product(vec![FactorSpec::gaussian(0, 1), FactorSpec::gaussian(0, 1)]);
        let m = build_moments::<Rational>(&spec, 4).unwrap();
        let r = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(0, 1), q(1, 1)]]);
        let y = m.pull_back(&r).unwrap();
        assert_eq!(y.get(&MultiIndex::new(vec![0, 2])).unwrap(), &q(2, 1));
        assert_eq!(y.get(&MultiIndex::new(vec![1, 1])).unwrap(), &q(1, 1));
        assert_eq!(y.get(&MultiIndex::new(vec![0, 4])).unwrap(), &q(12, 1));
    }
}
