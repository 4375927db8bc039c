//! Serializable report documents. Field order is fixed by the struct
//! definitions, so identical inputs give byte-identical output.

use favard_core::{
    CheckReport, JacobiSequences, Matrix, MultiIndex, Recurrence1D, Scalar, SymBasis,
    BASIS_ORDERING,
};
use serde::Serialize;

pub const FORMAT: &str = "favard-report/1";

pub fn scalar_encoding<S: Scalar>() -> &'static str {
    match S::ARITHMETIC {
        favard_core::Arithmetic::Rational => {
            "exact rationals as strings \"p/q\" (integers as \"p\")"
        }
        favard_core::Arithmetic::F64 => "binary64 floats as shortest round-trip decimal strings",
    }
}

/// Common header of every report.
#[derive(Debug, Serialize)]
pub struct Header {
    pub format: &'static str,
    pub command: &'static str,
    pub basis_ordering: &'static str,
    pub scalar_encoding: &'static str,
    pub arithmetic: &'static str,
    /// Only meaningful in float mode; `null` for rational runs.
    pub tolerance: Option<f64>,
    pub dimension: usize,
    pub max_level: usize,
}

impl Header {
    pub fn new<S: Scalar>(
        command: &'static str,
        dimension: usize,
        max_level: usize,
        tol: f64,
    ) -> Self {
        Header {
            format: FORMAT,
            command,
            basis_ordering: BASIS_ORDERING,
            scalar_encoding: scalar_encoding::<S>(),
            arithmetic: S::ARITHMETIC.as_str(),
            tolerance: (S::ARITHMETIC == favard_core::Arithmetic::F64).then_some(tol),
            dimension,
            max_level,
        }
    }
}

fn exponents(basis: &[MultiIndex]) -> Vec<Vec<u32>> {
    basis.iter().map(|m| m.exponents().to_vec()).collect()
}

fn strings<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(Scalar::to_report_string).collect()
}

/// Row-major matrix with the exponent vectors indexing its rows and columns.
#[derive(Debug, Serialize)]
pub struct MatrixReport {
    pub rows: Vec<Vec<u32>>,
    pub cols: Vec<Vec<u32>>,
    pub data: Vec<Vec<String>>,
}

impl MatrixReport {
    pub fn new<S: Scalar>(m: &Matrix<S>, rows: &SymBasis, cols: &SymBasis) -> Self {
        MatrixReport {
            rows: exponents(rows.entries()),
            cols: exponents(cols.entries()),
            data: m.to_rows().iter().map(|r| strings(r)).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub basis: Vec<Vec<u32>>,
    pub un_rank: usize,
    pub omega_rank: usize,
    pub degenerate: bool,
    /// `W_n`, the Gram form on the level-`n` symmetric power.
    pub omega_form: MatrixReport,
    /// `Ω_n = S_n⁻¹ W_n`.
    pub omega_operator: MatrixReport,
    /// `Λ_{j|n}` for `j = 1..d`; `null` at the top level.
    pub alpha: Option<Vec<MatrixReport>>,
    pub alpha_least_squares: bool,
    pub alpha_modulo_kernel: bool,
}

pub fn levels<S: Scalar>(jac: &JacobiSequences<S>) -> Vec<LevelReport> {
    jac.levels()
        .iter()
        .enumerate()
        .map(|(n, l)| {
            let b = l.basis();
            LevelReport {
                level: n,
                basis: exponents(b.entries()),
                un_rank: l.un_rank(),
                omega_rank: l.omega_rank(),
                degenerate: l.omega_rank() < b.len(),
                omega_form: MatrixReport::new(l.omega(), b, b),
                omega_operator: MatrixReport::new(&l.omega_operator(), b, b),
                alpha: l
                    .alphas()
                    .map(|a| a.iter().map(|m| MatrixReport::new(m, b, b)).collect()),
                alpha_least_squares: l.alpha_least_squares(),
                alpha_modulo_kernel: l.alpha_modulo_kernel(),
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct RecurrenceReport {
    pub coordinate: usize,
    pub alpha: Vec<String>,
    pub beta_squared: Vec<String>,
    pub squared_norms: Vec<String>,
    pub termination_rank: usize,
    pub alpha_is_conventional: Vec<bool>,
}

pub fn recurrences<S: Scalar>(recs: &[Recurrence1D<S>]) -> Vec<RecurrenceReport> {
    recs.iter()
        .enumerate()
        .map(|(l, r)| RecurrenceReport {
            coordinate: l + 1,
            alpha: strings(&r.alphas),
            beta_squared: strings(&r.beta_squared),
            squared_norms: strings(&r.squared_norms),
            termination_rank: r.termination_rank,
            alpha_is_conventional: r.alpha_is_conventional.clone(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ComputeReport {
    #[serde(flatten)]
    pub header: Header,
    pub levels: Vec<LevelReport>,
    /// Per-coordinate one-dimensional recurrences; `null` unless the measure
    /// is a product.
    pub recurrences: Option<Vec<RecurrenceReport>>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub header: Header,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Serialize)]
pub struct ReconstructRow {
    pub index: Vec<u32>,
    pub source: String,
    pub reconstructed: String,
    pub deviation: String,
}

#[derive(Debug, Serialize)]
pub struct ReconstructReport {
    #[serde(flatten)]
    pub header: Header,
    pub degree: usize,
    pub passed: bool,
    pub rows: Vec<ReconstructRow>,
}

#[derive(Debug, Serialize)]
pub struct BasisChangeReport {
    #[serde(flatten)]
    pub header: Header,
    /// `R`, with the new basis `e'_j = R e_j` in its columns.
    pub basis_change: Vec<Vec<String>>,
    pub passed: bool,
    pub covariance: Vec<CheckReport>,
    /// Jacobi sequences in the new basis.
    pub levels: Vec<LevelReport>,
}

#[derive(Debug, Serialize)]
pub struct DimsRow {
    pub level: u32,
    pub size: usize,
}

#[derive(Debug, Serialize)]
pub struct DimsReport {
    pub format: &'static str,
    pub command: &'static str,
    pub basis_ordering: &'static str,
    pub dimension: usize,
    pub levels: Vec<DimsRow>,
}

pub fn render<T: Serialize>(report: &T) -> favard_core::Result<String> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| favard_core::Error::Internal(format!("report serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}
