//! Named structural checks over an [`Analysis`], each producing a
//! [`CheckReport`].

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::cap::{check_creator_injectivity, check_jacobi_relation, check_quantum_decomposition};
use crate::error::{Error, Result};
use crate::favard1d::{product_jacobi_closed_form, stieltjes};
use crate::fock::{check_basis_covariance, check_null_propagation, jacobi_in_basis};
use crate::matrix::Matrix;
use crate::moments::MeasureSpec;
use crate::pipeline::{factor_recurrences, Analysis};
use crate::polyalg::MultiIndex;
use crate::scalar::{within_tolerance, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub max_deviation: f64,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: &str, passed: bool, max_deviation: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            passed,
            skipped: false,
            max_deviation,
            notes: Vec::new(),
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: true,
            skipped: true,
            max_deviation: 0.0,
            notes: vec![reason.to_string()],
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Folds another report of the same check into this one.
    fn absorb(&mut self, other: CheckReport) {
        self.passed &= other.passed;
        self.max_deviation = self.max_deviation.max(other.max_deviation);
        self.notes.extend(other.notes);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    QuantumDecomposition,
    JacobiRelation,
    Adjointness,
    CreatorCommutation,
    Injectivity,
    OmegaPsd,
    AlphaSymmetry,
    NullPropagation,
    BasisCovariance,
    ProductDiagonality,
    D1Consistency,
    Roundtrip,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::QuantumDecomposition,
        Check::JacobiRelation,
        Check::Adjointness,
        Check::CreatorCommutation,
        Check::Injectivity,
        Check::OmegaPsd,
        Check::AlphaSymmetry,
        Check::NullPropagation,
        Check::BasisCovariance,
        Check::ProductDiagonality,
        Check::D1Consistency,
        Check::Roundtrip,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::QuantumDecomposition => "quantum_decomposition",
            Check::JacobiRelation => "jacobi_relation",
            Check::Adjointness => "adjointness",
            Check::CreatorCommutation => "creator_commutation",
            Check::Injectivity => "injectivity",
            Check::OmegaPsd => "omega_psd",
            Check::AlphaSymmetry => "alpha_symmetry",
            Check::NullPropagation => "null_propagation",
            Check::BasisCovariance => "basis_covariance",
            Check::ProductDiagonality => "product_diagonality",
            Check::D1Consistency => "d1_consistency",
            Check::Roundtrip => "roundtrip",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown check '{s}'")))
    }
}

/// Parses `all` or a comma-separated list of check names.
pub fn parse_checks(list: &str) -> Result<Vec<Check>> {
    if list.trim() == "all" {
        return Ok(Check::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let c: Check = part.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty check list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Explicit basis changes for `basis_covariance`; random ones are drawn
    /// when empty.
    pub basis_changes: Vec<Matrix<Rational>>,
    pub random_basis_changes: usize,
    /// Random directions per level for `injectivity`, on top of the unit
    /// vectors.
    pub random_directions: usize,
    /// Highest level compared by `basis_covariance`.
    pub covariance_max_level: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            basis_changes: Vec::new(),
            random_basis_changes: 3,
            random_directions: 100,
            covariance_max_level: 4,
            seed: 0x5eed,
        }
    }
}

/// Nonzero rational with small numerator and denominator.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    let num: i64 = rng.random_range(-9..=9);
    let den: i64 = rng.random_range(1..=9);
    Rational::new(num.into(), den.into())
}

/// Random nonzero rational vector.
pub fn random_direction(rng: &mut impl Rng, d: usize) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..d).map(|_| random_rational(rng)).collect();
        if v.iter().any(|x| !num_traits::Zero::is_zero(x)) {
            return v;
        }
    }
}

/// Random invertible rational `d × d` matrix.
pub fn random_invertible(rng: &mut impl Rng, d: usize) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(d, d, |_, _| {
            let num: i64 = rng.random_range(-4..=4);
            let den: i64 = rng.random_range(1..=3);
            Rational::new(num.into(), den.into())
        });
        if m.rank(0.0) == d {
            return m;
        }
    }
}

fn matrices_agree<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, tol: f64) -> (bool, f64) {
    let dev = a.max_abs_diff(b);
    (
        within_tolerance::<S>(dev, a.max_abs().max(b.max_abs()), tol),
        dev,
    )
}

fn convert<S: Scalar>(m: &Matrix<Rational>) -> Matrix<S> {
    m.map(S::from_rational)
}

/// Runs one check. Precondition failures (such as a singular basis change)
/// are errors rather than failed reports.
pub fn run_check<S: Scalar>(
    check: Check,
    spec: &MeasureSpec,
    a: &Analysis<S>,
    opts: &VerifyOptions,
) -> Result<CheckReport> {
    let tol = a.moments.tolerance();
    let top = a.max_level();
    let d = a.dim();
    let name = check.name();
    Ok(match check {
        Check::QuantumDecomposition => {
            check_quantum_decomposition(&a.cap, &a.decomposition, &a.moments)?
        }
        Check::JacobiRelation => check_jacobi_relation(&a.cap, &a.decomposition)?,
        Check::Adjointness => {
            let mut passed = true;
            let mut worst = 0.0f64;
            for n in 0..top {
                let g = a.decomposition.level(n).gram();
                let l = a.cap.level(n);
                for j in 0..d {
                    let (ok, dev) =
                        matrices_agree(&(g * l.azero(j)), &(&l.azero(j).transpose() * g), tol);
                    passed &= ok;
                    worst = worst.max(dev);
                    if n + 1 < top {
                        let g_up = a.decomposition.level(n + 1).gram();
                        let lhs = g * a.cap.level(n + 1).aminus(j);
                        let rhs = &l.aplus(j).transpose() * g_up;
                        let (ok, dev) = matrices_agree(&lhs, &rhs, tol);
                        passed &= ok;
                        worst = worst.max(dev);
                    }
                    let w = a.jacobi.level(n).omega();
                    let w_up = a.jacobi.level(n + 1).omega();
                    let lhs = w * a.fields.fminus(j, n + 1);
                    let rhs = &a.fields.fplus(j, n).transpose() * w_up;
                    let (ok, dev) = matrices_agree(&lhs, &rhs, tol);
                    passed &= ok;
                    worst = worst.max(dev);
                }
            }
            let mut r = CheckReport::new(name, passed, worst);
            r.note("G_n A-@(n+1) = (A+@n)^T G_(n+1); G_n A0 = A0^T G_n; W_n F-@(n+1) = (F+@n)^T W_(n+1)");
            r
        }
        Check::CreatorCommutation => {
            let mut passed = true;
            let mut worst = 0.0f64;
            for n in 0..top.saturating_sub(1) {
                for j in 0..d {
                    for k in (j + 1)..d {
                        let jk = a.cap.level(n + 1).aplus(j) * a.cap.level(n).aplus(k);
                        let kj = a.cap.level(n + 1).aplus(k) * a.cap.level(n).aplus(j);
                        let (ok, dev) = matrices_agree(&jk, &kj, tol);
                        passed &= ok;
                        worst = worst.max(dev);
                    }
                }
            }
            CheckReport::new(name, passed, worst)
        }
        Check::Injectivity => {
            let mut rng = StdRng::seed_from_u64(opts.seed);
            let mut failures = 0usize;
            let mut tested = 0usize;
            for n in 0..top {
                let mut dirs: Vec<Vec<Rational>> = (0..d)
                    .map(|j| {
                        (0..d)
                            .map(|k| Rational::from_integer(i64::from(j == k).into()))
                            .collect()
                    })
                    .collect();
                dirs.extend((0..opts.random_directions).map(|_| random_direction(&mut rng, d)));
                for v in dirs {
                    let v: Vec<S> = v.iter().map(S::from_rational).collect();
                    let rep = check_creator_injectivity(&a.cap, &v, n)?;
                    tested += 1;
                    if !rep.injective {
                        failures += 1;
                    }
                }
            }
            let mut r = CheckReport::new(name, failures == 0, failures as f64);
            r.note(format!(
                "{tested} directions tested, {failures} not injective"
            ));
            r
        }
        Check::OmegaPsd => {
            let w0 = a.jacobi.level(0).omega();
            let mut worst = (w0[(0, 0)].clone() - S::one()).to_f64().abs();
            let mut passed = w0.rows() == 1 && within_tolerance::<S>(worst, 1.0, tol);
            let mut r = CheckReport::new(name, true, 0.0);
            for lvl in a.jacobi.levels() {
                let w = lvl.omega();
                let (ok, dev) = matrices_agree(w, &w.transpose(), tol);
                passed &= ok;
                worst = worst.max(dev);
                if let Some(v) = S::psd_violation(w, tol) {
                    passed = false;
                    r.note(format!("W_{} not PSD: {v}", lvl.level()));
                }
                r.note(format!(
                    "rank W_{} = {} of {}",
                    lvl.level(),
                    lvl.omega_rank(),
                    lvl.basis().len()
                ));
            }
            r.passed = passed;
            r.max_deviation = worst;
            r
        }
        Check::AlphaSymmetry => {
            let mut passed = true;
            let mut worst = 0.0f64;
            for lvl in a.jacobi.levels() {
                let Some(alphas) = lvl.alphas() else { continue };
                let w = lvl.omega();
                for al in alphas {
                    let (ok, dev) = matrices_agree(&(w * al), &(&al.transpose() * w), tol);
                    passed &= ok;
                    worst = worst.max(dev);
                }
            }
            CheckReport::new(name, passed, worst)
        }
        Check::NullPropagation => check_null_propagation(&a.jacobi, &a.fields),
        Check::BasisCovariance => {
            let mut mats = opts.basis_changes.clone();
            if mats.is_empty() {
                let mut rng = StdRng::seed_from_u64(opts.seed ^ 0xb4515);
                mats = (0..opts.random_basis_changes)
                    .map(|_| random_invertible(&mut rng, d))
                    .collect();
            }
            let levels = top.min(opts.covariance_max_level);
            let mut report = CheckReport::new(name, true, 0.0);
            for r in &mats {
                if r.rows() != d || r.cols() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: r.rows(),
                    });
                }
                let rs: Matrix<S> = convert(r);
                let jp = jacobi_in_basis(&a.moments, &rs, top)?;
                for n in 0..=levels {
                    let mut sub = check_basis_covariance(&a.jacobi, &jp, &rs, n)?;
                    sub.notes.clear();
                    report.absorb(sub);
                }
            }
            report.note(format!("{} basis changes, levels 0..={levels}", mats.len()));
            report
        }
        Check::ProductDiagonality => {
            let Some(recs) = factor_recurrences::<S>(spec, top, tol) else {
                return Ok(CheckReport::skipped(name, "not a product measure"));
            };
            let recs = recs?;
            let mut passed = true;
            let mut worst = 0.0f64;
            for lvl in a.jacobi.levels() {
                let cf = product_jacobi_closed_form(&recs, lvl.level())?;
                let w = lvl.omega();
                let (ok, dev) = matrices_agree(w, &cf.omega, tol);
                passed &= ok && w.is_diagonal(tol * w.max_abs().max(1.0));
                worst = worst.max(dev);
                if let (Some(al), Some(cfa)) = (lvl.alphas(), cf.alpha.as_ref()) {
                    for (x, y) in al.iter().zip(cfa) {
                        let (ok, dev) = matrices_agree(&(w * x), &(w * y), tol);
                        passed &= ok;
                        worst = worst.max(dev);
                    }
                }
            }
            let mut r = CheckReport::new(name, passed, worst);
            r.note("alpha compared modulo ker W_n");
            r
        }
        Check::D1Consistency => {
            if d != 1 {
                return Ok(CheckReport::skipped(name, "dimension is not 1"));
            }
            let rec = stieltjes(&a.moments.marginal(0), top, tol)?;
            let mut passed = true;
            let mut worst = 0.0f64;
            for lvl in a.jacobi.levels() {
                let n = lvl.level();
                let w = lvl.omega()[(0, 0)].clone();
                let expect = rec.omega(n);
                let dev = (w.clone() - &expect).to_f64().abs();
                passed &= within_tolerance::<S>(dev, expect.to_f64().abs(), tol);
                worst = worst.max(dev);
                if let Some(al) = lvl.alpha(0) {
                    // modulo ker W_n: compare W_n·Λ with W_n·α_n
                    let lhs = w.clone() * &al[(0, 0)];
                    let rhs = w * &rec.alphas[n];
                    let dev = (lhs - &rhs).to_f64().abs();
                    passed &= within_tolerance::<S>(dev, rhs.to_f64().abs(), tol);
                    worst = worst.max(dev);
                }
            }
            let mut r = CheckReport::new(name, passed, worst);
            r.note(format!("termination rank {}", rec.termination_rank));
            r
        }
        Check::Roundtrip => {
            let mut passed = true;
            let mut worst = 0.0f64;
            let mut words = 0usize;
            let mut word = Vec::new();
            for k in 0..=top {
                for_each_word(d, k, &mut word, &mut |w| -> Result<()> {
                    let got = a.fields.reconstruct(&a.jacobi, w)?;
                    let want = a.moments.get(&MultiIndex::from_word(d, w))?;
                    let dev = (got - want).to_f64().abs();
                    passed &= within_tolerance::<S>(dev, want.to_f64().abs(), tol);
                    worst = worst.max(dev);
                    words += 1;
                    Ok(())
                })?;
            }
            let mut r = CheckReport::new(name, passed, worst);
            r.note(format!("{words} words of length <= {top}"));
            r
        }
    })
}

/// Calls `f` on every word of length `k` over `0..d`.
pub fn for_each_word(
    d: usize,
    k: usize,
    prefix: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if prefix.len() == k {
        return f(prefix);
    }
    for j in 0..d {
        prefix.push(j);
        for_each_word(d, k, prefix, f)?;
        prefix.pop();
    }
    Ok(())
}

pub fn run_checks<S: Scalar>(
    checks: &[Check],
    spec: &MeasureSpec,
    a: &Analysis<S>,
    opts: &VerifyOptions,
) -> Result<Vec<CheckReport>> {
    checks
        .iter()
        .map(|&c| run_check(c, spec, a, opts))
        .collect()
}
