//! Complete hyperbolic structures on cusped orientable 3-manifolds from ideal
//! triangulations, by angle structures and volume maximization.
//!
//! The pipeline: parse an ideal triangulation, assemble the linear part of the
//! gluing equations into a constraint system, find a strictly interior angle
//! vector, and maximize the concave volume functional over the polytope (or a
//! Dehn-filling slice of it) to a critical point. At a critical point the full
//! non-linear gluing and completeness equations hold, which is verified by
//! computing holonomy residuals of edge-link and peripheral curves.

pub mod angles;
pub mod curves;
pub mod geometry;
pub mod solver;
pub mod triangulation;

pub use angles::{AngleVector, ConstraintSystem, TangentBasis};
pub use curves::{DeformationVector, NormalCurve, Segment};
pub use solver::{SolveOptions, SolveReport, SolveStatus};
pub use triangulation::{Cusp, CuspTriangulation, EdgeClass, Triangulation};
