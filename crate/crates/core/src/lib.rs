//! Graded orthogonal polynomials, CAP operators and multi-dimensional Jacobi
//! sequences computed from the mixed moments of a probability measure on `R^d`.

pub mod cap;
pub mod catalog;
pub mod error;
pub mod favard1d;
pub mod fock;
pub mod matrix;
pub mod moments;
pub mod ortho;
pub mod pipeline;
pub mod polyalg;
pub mod scalar;
pub mod verify;

pub use cap::{
    build_cap, check_creator_injectivity, check_jacobi_relation, check_quantum_decomposition, Cap,
    CapLevel, InjectivityReport,
};
pub use error::{Error, Result};
pub use favard1d::{product_jacobi_closed_form, stieltjes, ClosedFormLevel, Recurrence1D};
pub use fock::{
    build_fock_fields, build_jacobi, check_basis_covariance, check_null_propagation,
    jacobi_in_basis, reconstruct_moment_index, reconstruct_moments, FockFields, JacobiLevel,
    JacobiSequences,
};
pub use matrix::Matrix;
pub use moments::{build_moments, inner, Atom, FactorSpec, Measure, MeasureSpec, MomentFunctional};
pub use ortho::{
    decompose, decompose_with_order, project_coeffs, OrthoLevel, OrthogonalDecomposition,
};
pub use pipeline::{analyze, analyze_spec, factor_recurrences, Analysis};
pub use polyalg::{
    canonical_sym_gram, creation_shift, enumerate_monomials, poly_mul, sym_dim, sym_lift,
    MultiIndex, Polynomial, SymBasis, BASIS_ORDERING,
};
pub use scalar::{parse_rational, Arithmetic, Rational, Scalar, DEFAULT_TOLERANCE};
pub use verify::{parse_checks, run_check, run_checks, Check, CheckReport, VerifyOptions};
