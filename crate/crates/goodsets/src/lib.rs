//! Exact decision procedures for additive decomposition of functions on
//! finite point sets.
//!
//! A finite subset of a cartesian product `X1 x ... x Xn` is *good* when
//! every function on it splits as `u1(x1) + ... + un(xn)`. This crate
//! decides goodness, computes boundary sets, fullness, full and related
//! components and geodesics — all over arbitrary-precision rationals, so
//! every answer is exact — and ships generators for a family of reference
//! sets in four dimensions whose structure the `verify-paper` CLI verb
//! re-checks end to end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod families;
pub mod incidence;
pub mod linalg;
pub mod points;
pub mod solver;

pub use analysis::{
    enumerate_boundaries, full_components, full_subsets, geodesic, geodesic_by_index, is_boundary,
    is_full, is_good, maximality_oracle, related_components, BoundaryEnumeration, BoundarySet,
    Budgets, Geodesic, Partition, SubsetStream,
};
pub use error::{Error, Result};
pub use incidence::{ColumnKey, IncidenceMatrix};
pub use linalg::{ratio, Rational, RationalMatrix};
pub use points::{Point, PointSet, Symbol};
pub use solver::{
    solution_bound_report, solve_decomposition, verify_decomposition, AdditiveSolution,
    BoundaryAssignment, FunctionTable,
};
