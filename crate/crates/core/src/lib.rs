//! Exact computations with polynomial invariants of tuples of matrices under
//! simultaneous conjugation by GL(n) and O(n).
//!
//! The crate evaluates and expands invariants `sigma_t(word)`, checks
//! separation by explicit witness pairs, and decides decomposability of
//! invariants by graded span computations.

pub mod cli;
pub mod decomp;
pub mod error;
pub mod genmat;
pub mod invlang;
pub mod polyring;
pub mod scalars;
pub mod septest;

pub use error::{Error, Result};
pub use genmat::{generic_matrix, psi, Matrix, MatrixKind, ScalarMatrix};
pub use invlang::{parse_expr, standard_set, standard_set_for_field, InvariantExpr, InvariantSet, Word};
pub use polyring::{MultiDegree, Polynomial, VariableId};
pub use scalars::{FieldDescriptor, Ring, Scalar};
