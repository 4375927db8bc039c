//! End-to-end computation from a measure to its Jacobi sequences.

use crate::cap::{build_cap, Cap};
use crate::error::{Error, Result};
use crate::favard1d::{stieltjes, Recurrence1D};
use crate::fock::{build_fock_fields, build_jacobi, FockFields, JacobiSequences};
use crate::moments::{build_moments, MeasureSpec, MomentFunctional};
use crate::ortho::{decompose, OrthogonalDecomposition};
use crate::scalar::Scalar;

/// Everything derived from one moment functional up to level `N`.
#[derive(Debug, Clone)]
pub struct Analysis<S: Scalar> {
    pub moments: MomentFunctional<S>,
    pub decomposition: OrthogonalDecomposition<S>,
    pub cap: Cap<S>,
    pub jacobi: JacobiSequences<S>,
    pub fields: FockFields<S>,
}

impl<S: Scalar> Analysis<S> {
    pub fn max_level(&self) -> usize {
        self.decomposition.max_level()
    }

    pub fn dim(&self) -> usize {
        self.decomposition.dim()
    }
}

pub fn analyze<S: Scalar>(moments: MomentFunctional<S>, max_level: usize) -> Result<Analysis<S>> {
    if max_level == 0 {
        return Err(Error::Precondition("max_level must be at least 1".into()));
    }
    let decomposition = decompose(&moments, max_level)?;
    let cap = build_cap(&decomposition, &moments)?;
    let jacobi = build_jacobi(&decomposition, &cap)?;
    let fields = build_fock_fields(&jacobi);
    Ok(Analysis {
        moments,
        decomposition,
        cap,
        jacobi,
        fields,
    })
}

/// Builds moments to degree `2·max_level` and runs [`analyze`].
pub fn analyze_spec<S: Scalar>(
    spec: &MeasureSpec,
    max_level: usize,
    tol: f64,
) -> Result<Analysis<S>> {
    let moments = build_moments::<S>(spec, 2 * max_level as u32)?.with_tolerance(tol);
    analyze(moments, max_level)
}

/// Stieltjes recurrences of each factor of a product measure, computed from
/// the factor closed forms. `None` for non-product measures.
pub fn factor_recurrences<S: Scalar>(
    spec: &MeasureSpec,
    levels: usize,
    tol: f64,
) -> Option<Result<Vec<Recurrence1D<S>>>> {
    let factors = spec.factors()?;
    Some(
        factors
            .iter()
            .map(|f| stieltjes(&f.moments::<S>(2 * levels as u32)?, levels, tol))
            .collect(),
    )
}
