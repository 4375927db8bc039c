//! JSON run configuration and its conversion to core types.

use std::collections::BTreeMap;
use std::path::Path;

use favard_core::{
    parse_rational, Arithmetic, Atom, Error, FactorSpec, Matrix, MeasureSpec, MultiIndex, Rational,
    Result, DEFAULT_TOLERANCE,
};
use serde::Deserialize;

/// A scalar in a config file: a string such as `"3/4"`, `"-2"` or `"0.125"`,
/// or a JSON integer. JSON floats are rejected because they are not exact.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Int(i64),
}

impl Num {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Num::Text(s) => parse_rational(s),
            Num::Int(i) => Ok(Rational::from_integer((*i).into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ArithName {
    Rational,
    F64,
}

impl From<ArithName> for Arithmetic {
    fn from(a: ArithName) -> Self {
        match a {
            ArithName::Rational => Arithmetic::Rational,
            ArithName::F64 => Arithmetic::F64,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorConfig {
    Gaussian { mean: Num, variance: Num },
    Uniform { a: Num, b: Num },
    Exponential { rate: Num },
    TwoPoint { x1: Num, x2: Num, p: Option<Num> },
    MomentList(Vec<Num>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentEntry {
    pub index: Vec<u32>,
    pub value: Num,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub point: Vec<Num>,
    pub weight: Num,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Product(Vec<FactorConfig>),
    MomentTable {
        max_degree: u32,
        moments: Vec<MomentEntry>,
    },
    Atomic(Vec<AtomConfig>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub dimension: usize,
    pub max_level: usize,
    #[serde(default = "default_arith")]
    pub arithmetic: ArithName,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    pub measure: MeasureConfig,
    #[serde(default)]
    pub basis_change: Option<Vec<Vec<Num>>>,
}

fn default_arith() -> ArithName {
    ArithName::Rational
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dimension: usize,
    pub max_level: usize,
    pub arithmetic: Arithmetic,
    pub tolerance: f64,
    pub measure: MeasureSpec,
    pub basis_change: Option<Matrix<Rational>>,
}

fn factor(f: &FactorConfig) -> Result<FactorSpec> {
    Ok(match f {
        FactorConfig::Gaussian { mean, variance } => FactorSpec::Gaussian {
            mean: mean.to_rational()?,
            variance: variance.to_rational()?,
        },
        FactorConfig::Uniform { a, b } => FactorSpec::Uniform {
            a: a.to_rational()?,
            b: b.to_rational()?,
        },
        FactorConfig::Exponential { rate } => FactorSpec::Exponential {
            rate: rate.to_rational()?,
        },
        FactorConfig::TwoPoint { x1, x2, p } => FactorSpec::TwoPoint {
            x1: x1.to_rational()?,
            x2: x2.to_rational()?,
            p: match p {
                Some(p) => p.to_rational()?,
                None => Rational::new(1.into(), 2.into()),
            },
        },
        FactorConfig::MomentList(list) => {
            FactorSpec::MomentList(list.iter().map(Num::to_rational).collect::<Result<_>>()?)
        }
    })
}

fn measure(dimension: usize, m: &MeasureConfig) -> Result<MeasureSpec> {
    Ok(match m {
        MeasureConfig::Product(factors) => {
            let spec = MeasureSpec::product(factors.iter().map(factor).collect::<Result<_>>()?);
            if spec.dimension != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: spec.dimension,
                });
            }
            spec
        }
        MeasureConfig::MomentTable {
            max_degree,
            moments,
        } => {
            let mut table = BTreeMap::new();
            for e in moments {
                if e.index.len() != dimension {
                    return Err(Error::DimensionMismatch {
                        expected: dimension,
                        found: e.index.len(),
                    });
                }
                let key = MultiIndex::new(e.index.clone());
                if table.insert(key.clone(), e.value.to_rational()?).is_some() {
                    return Err(Error::Parse(format!("moment {key} given twice")));
                }
            }
            MeasureSpec::moment_table(dimension, *max_degree, table)
        }
        MeasureConfig::Atomic(atoms) => MeasureSpec::atomic(
            dimension,
            atoms
                .iter()
                .map(|a| {
                    Ok(Atom {
                        point: a
                            .point
                            .iter()
                            .map(Num::to_rational)
                            .collect::<Result<_>>()?,
                        weight: a.weight.to_rational()?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
    })
}

/// Square rational matrix from rows of scalars.
pub fn matrix_from_rows(rows: &[Vec<Num>], d: usize) -> Result<Matrix<Rational>> {
    if rows.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rows.len(),
        });
    }
    let mut parsed = Vec::with_capacity(d);
    for row in rows {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
        parsed.push(
            row.iter()
                .map(Num::to_rational)
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Matrix::from_rows(parsed))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Reads a basis-change file: a JSON array of `d` rows of `d` scalars.
pub fn load_matrix(path: &Path, d: usize) -> Result<Matrix<Rational>> {
    let rows: Vec<Vec<Num>> = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    matrix_from_rows(&rows, d)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        if raw.dimension == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        if raw.max_level == 0 {
            return Err(Error::Parse("max_level must be at least 1".into()));
        }
        if !(raw.tolerance.is_finite() && raw.tolerance >= 0.0) {
            return Err(Error::Parse(format!(
                "tolerance must be a finite nonnegative number, got {}",
                raw.tolerance
            )));
        }
        let spec = measure(raw.dimension, &raw.measure)?;
        spec.validate()?;
        let needed = 2 * raw.max_level as u32;
        if let Some(available) = spec.available_degree() {
            if available < needed {
                return Err(Error::InsufficientMoments { needed, available });
            }
        }
        let basis_change = raw
            .basis_change
            .as_deref()
            .map(|rows| matrix_from_rows(rows, raw.dimension))
            .transpose()?;
        Ok(RunConfig {
            dimension: raw.dimension,
            max_level: raw.max_level,
            arithmetic: raw.arithmetic.into(),
            tolerance: raw.tolerance,
            measure: spec,
            basis_change,
        })
    }

    /// Tolerance handed to the core: zero in rational mode.
    pub fn effective_tolerance(&self) -> f64 {
        match self.arithmetic {
            Arithmetic::Rational => 0.0,
            Arithmetic::F64 => self.tolerance,
        }
    }
}
