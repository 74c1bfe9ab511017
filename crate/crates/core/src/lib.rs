//! Deep diagonal maps on twisted polygons in the real projective plane.
//!
//! The crate covers projective primitives, twisted polygons and their corner
//! invariants, the maps `T_k` (geometric) and `T_3` (in corner-invariant
//! coordinates), spiral and tic-tac-toe classification, the four conserved
//! quantities of `T_3`, and orbit diagnostics.

pub mod classify;
pub mod cli;
pub mod conserved;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod orbit;
pub mod projective;
pub mod protocol;
pub mod polygon;
pub mod scalar;
pub mod server;
pub mod verify;

pub use classify::{
    certify_invariants, classify_spiral, grid_classify, is_k_nice, sample_k_spiral, spiral_window_check, spiral_window_check_framed,
    transversal_check, GridSquare, Interval, SpiralReport, SpiralType, TransversalReport, WindowFailure, WindowFrame,
};
pub use conserved::{f_invariants, invariant_drift, ConservedQuantities, Quantity};
pub use dynamics::{t3_coords_forward, t3_coords_inverse, t_k_forward, t_k_inverse, MapLabeling};
pub use error::{Error, Result};
pub use polygon::{
    alpha_seed, conditioned_seed, extend_from_invariants, reconstruct, reconstruct_conditioned, square_seed, CornerInvariants, Reindex, TwistedPolygon};
pub use orbit::{
    iterate, orbit_projection, precompactness_report, project_point, sample_in_square, BoundsReport, Direction, OrbitTrajectory,
    Termination,
};
pub use projective::{
    collinear, cross_ratio_lines, cross_ratio_lines_with, cross_ratio_points, in_general_position, in_triangle_interior, join,
    meet, orientation, transform_from_correspondence, AffinePoint, HomogeneousPoint, ProjectiveLine, ProjectiveTransform,
};
pub use scalar::{rational, ExtReal, Rational, Scalar, INCIDENCE_EPS, SINGULAR_EPS};
