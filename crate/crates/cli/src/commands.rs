use std::path::Path;

use anyhow::Context;
use favard_core::scalar::within_tolerance;
use favard_core::{
    analyze_spec, check_basis_covariance, factor_recurrences, jacobi_in_basis, parse_checks,
    reconstruct_moment_index, run_checks, Arithmetic, Error, Matrix, Rational, Scalar, SymBasis,
    VerifyOptions, BASIS_ORDERING,
};

use crate::config::{load_matrix, RunConfig};
use crate::report::{self, Header};
use crate::{Command, RunArgs};

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Passed
        } else {
            Status::Failed
        }
    }
}

/// Core errors carry their own code; anything else (I/O) is treated as bad
/// input.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    e.chain()
        .find_map(|c| c.downcast_ref::<Error>())
        .map_or(1, |e| e.exit_code() as u8)
}

fn load(run: &RunArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::load(&run.config)?;
    if let Some(a) = run.arith {
        cfg.arithmetic = a.into();
    }
    if let Some(t) = run.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(
                Error::Parse(format!("--tol must be finite and nonnegative, got {t}")).into(),
            );
        }
        cfg.tolerance = t;
    }
    Ok(cfg)
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Dispatches to the rational or float instantiation of a command.
macro_rules! with_scalar {
    ($cfg:expr, $f:ident ( $($arg:expr),* )) => {
        match $cfg.arithmetic {
            Arithmetic::Rational => $f::<Rational>($($arg),*),
            Arithmetic::F64 => $f::<f64>($($arg),*),
        }
    };
}

pub fn run(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Compute { run } => {
            let cfg = load(&run)?;
            let text = with_scalar!(cfg, compute(&cfg))?;
            emit(&text, run.output.as_deref())?;
            Ok(Status::Passed)
        }
        Command::Verify {
            run,
            checks,
            basis_change,
        } => {
            let cfg = load(&run)?;
            let checks = parse_checks(&checks)?;
            let mut opts = VerifyOptions::default();
            if let Some(r) = basis_matrix(&cfg, basis_change.as_deref())? {
                opts.basis_changes.push(r);
            }
            let (text, ok) = with_scalar!(cfg, verify(&cfg, &checks, &opts))?;
            emit(&text, run.output.as_deref())?;
            Ok(ok.into())
        }
        Command::Reconstruct { run, degree } => {
            let cfg = load(&run)?;
            let k = degree.unwrap_or(cfg.max_level);
            let (text, ok) = with_scalar!(cfg, reconstruct(&cfg, k))?;
            emit(&text, run.output.as_deref())?;
            Ok(ok.into())
        }
        Command::BasisChange { run, basis_change } => {
            let cfg = load(&run)?;
            let r = basis_matrix(&cfg, basis_change.as_deref())?.ok_or_else(|| {
                Error::Precondition("basis-change needs -R or basis_change in the config".into())
            })?;
            let (text, ok) = with_scalar!(cfg, change_basis(&cfg, &r))?;
            emit(&text, run.output.as_deref())?;
            Ok(ok.into())
        }
        Command::Dims {
            dimension,
            degree,
            output,
        } => {
            if dimension == 0 {
                return Err(Error::Parse("dimension must be at least 1".into()).into());
            }
            let rep = report::DimsReport {
                format: report::FORMAT,
                command: "dims",
                basis_ordering: BASIS_ORDERING,
                dimension,
                levels: (0..=degree)
                    .map(|n| report::DimsRow {
                        level: n,
                        size: SymBasis::new(dimension, n).len(),
                    })
                    .collect(),
            };
            emit(&report::render(&rep)?, output.as_deref())?;
            Ok(Status::Passed)
        }
    }
}

/// `-R` wins over the config entry.
fn basis_matrix(cfg: &RunConfig, path: Option<&Path>) -> anyhow::Result<Option<Matrix<Rational>>> {
    Ok(match path {
        Some(p) => Some(load_matrix(p, cfg.dimension)?),
        None => cfg.basis_change.clone(),
    })
}

fn compute<S: Scalar>(cfg: &RunConfig) -> anyhow::Result<String> {
    let tol = cfg.effective_tolerance();
    let a = analyze_spec::<S>(&cfg.measure, cfg.max_level, tol)?;
    let recs = factor_recurrences::<S>(&cfg.measure, cfg.max_level, tol).transpose()?;
    let rep = report::ComputeReport {
        header: Header::new::<S>("compute", cfg.dimension, cfg.max_level, tol),
        levels: report::levels(&a.jacobi),
        recurrences: recs.as_deref().map(report::recurrences),
    };
    Ok(report::render(&rep)?)
}

fn verify<S: Scalar>(
    cfg: &RunConfig,
    checks: &[favard_core::Check],
    opts: &VerifyOptions,
) -> anyhow::Result<(String, bool)> {
    let tol = cfg.effective_tolerance();
    let a = analyze_spec::<S>(&cfg.measure, cfg.max_level, tol)?;
    let results = run_checks(checks, &cfg.measure, &a, opts)?;
    for r in &results {
        let tag = match (r.skipped, r.passed) {
            (true, _) => "SKIP",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        eprintln!("{tag} {} (max deviation {:e})", r.name, r.max_deviation);
    }
    let passed = results.iter().all(|r| r.passed);
    let rep = report::VerifyReport {
        header: Header::new::<S>("verify", cfg.dimension, cfg.max_level, tol),
        passed,
        checks: results,
    };
    Ok((report::render(&rep)?, passed))
}

fn reconstruct<S: Scalar>(cfg: &RunConfig, k: usize) -> anyhow::Result<(String, bool)> {
    if k > cfg.max_level {
        return Err(Error::DegreeTooHigh {
            degree: k as i64,
            max_level: cfg.max_level,
        }
        .into());
    }
    let tol = cfg.effective_tolerance();
    let a = analyze_spec::<S>(&cfg.measure, cfg.max_level, tol)?;
    let mut rows = Vec::new();
    let mut passed = true;
    for n in 0..=k as u32 {
        for m in SymBasis::new(cfg.dimension, n).entries() {
            let source = a.moments.get(m)?.clone();
            let rebuilt = reconstruct_moment_index(&a.fields, &a.jacobi, m)?;
            let dev = source.clone() - &rebuilt;
            passed &= within_tolerance::<S>(dev.to_f64().abs(), source.to_f64().abs(), tol);
            rows.push(report::ReconstructRow {
                index: m.exponents().to_vec(),
                source: source.to_report_string(),
                reconstructed: rebuilt.to_report_string(),
                deviation: dev.to_report_string(),
            });
        }
    }
    let rep = report::ReconstructReport {
        header: Header::new::<S>("reconstruct", cfg.dimension, cfg.max_level, tol),
        degree: k,
        passed,
        rows,
    };
    Ok((report::render(&rep)?, passed))
}

fn change_basis<S: Scalar>(
    cfg: &RunConfig,
    r: &Matrix<Rational>,
) -> anyhow::Result<(String, bool)> {
    let tol = cfg.effective_tolerance();
    let a = analyze_spec::<S>(&cfg.measure, cfg.max_level, tol)?;
    let rs: Matrix<S> = r.map(S::from_rational);
    let primed = jacobi_in_basis(&a.moments, &rs, cfg.max_level)?;
    let covariance = (0..=cfg.max_level)
        .map(|n| check_basis_covariance(&a.jacobi, &primed, &rs, n))
        .collect::<favard_core::Result<Vec<_>>>()?;
    let passed = covariance.iter().all(|c| c.passed);
    let rep = report::BasisChangeReport {
        header: Header::new::<S>("basis-change", cfg.dimension, cfg.max_level, tol),
        basis_change: r
            .to_rows()
            .iter()
            .map(|row| row.iter().map(|x| x.to_report_string()).collect())
            .collect(),
        passed,
        covariance,
        levels: report::levels(&primed),
    };
    Ok((report::render(&rep)?, passed))
}
