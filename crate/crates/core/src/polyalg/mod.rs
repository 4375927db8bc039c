//! Exact polynomial algebra in `d` commuting indeterminates and the
//! combinatorics of symmetric tensor powers of `R^d`.
//!
//! Basis ordering contract: graded by total degree, and within a degree by
//! lexicographically *decreasing* exponent vectors. For `d = 3, n = 2` the
//! order is `(2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2)`. Every
//! matrix produced by this crate is indexed in this order.

mod monomial;
mod polynomial;
mod sym;

pub use monomial::{enumerate_monomials, sym_dim, MultiIndex};
pub use polynomial::{poly_mul, Polynomial};
pub use sym::{canonical_sym_gram, creation_shift, sym_lift, SymBasis};

/// Human-readable statement of the basis ordering, embedded in reports.
pub const BASIS_ORDERING: &str =
    "graded by total degree; within a degree, exponent vectors in lexicographically decreasing order";
