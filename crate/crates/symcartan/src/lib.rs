//! Exact symbolic engine plus numeric verification harness for symmetric
//! Cartan calculus on coordinate charts.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`] — the coefficient ring: exact rational functions of chart
//!   coordinates, with trigonometric generators for angle coordinates.
//! * [`symtensor`] — symmetric covariant tensor fields and their
//!   vector-valued variants, represented as fiber polynomials in velocity
//!   variables.
//! * [`linalg`] — exact rational matrices (RREF, rank, kernel) and the small
//!   numeric SVD used as a cross-check oracle.
//! * [`connection`] — affine connections and the operators built from them:
//!   symmetric derivative, symmetric Lie derivative, symmetric bracket,
//!   curvature, commutator identities.
//! * [`cotangent`] — the doubled chart of the cotangent bundle, lifts, the
//!   Patterson–Walker metric and its lifted connections.
//! * [`killing`] — Killing-tensor and affine-field solvers, symmetric
//!   cohomology dimensions, circle classification, Künneth products and the
//!   cotangent cohomology lift.
//! * [`liealg`] — Lie-admissible algebras and their symmetric cohomology.
//! * [`geodesic`] — the numeric layer: geodesic integration, conserved
//!   quantities, spray correspondence and the flow-formula check.

pub mod connection;
pub mod cotangent;
pub mod geodesic;
pub mod halton;
pub mod killing;
pub mod liealg;
pub mod linalg;
pub mod par;
pub mod ring;
pub mod symtensor;

pub use ring::{Chart, CoordKind, NumericPoint, RingError, ScalarField};
