//! Minimal universally rigid bar-joint frameworks.
//!
//! Given a point set in the plane or in space, this crate builds a framework
//! on those points whose edge count meets the lower bound for universal
//! rigidity of generic configurations (2n-2 in 2D, 3n-5 in 3D), then
//! certifies the result numerically: rank of the rigidity matrix, selfstress
//! extraction, positive-semidefiniteness and rank of the stress matrix, and
//! a check that the edge directions block all affine motions. Two
//! independent oracles probe the certified frameworks: exhaustive
//! enumeration of the 2^f fold configurations of a fan, and a randomized
//! perturb-and-descend search for alternative realizations in higher
//! ambient dimensions.

pub mod construction;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod rigidity;
pub mod session;

pub use error::{Error, Result};

/// Geometric predicate tolerance, relative to the bounding-box diagonal.
pub const TOL_GEOM: f64 = 1e-9;
/// Rank decision tolerance, relative to the largest singular value.
pub const TOL_RANK: f64 = 1e-9;
/// Squared-length residual tolerance for realization checks.
pub const TOL_EQ: f64 = 1e-8;
/// Slack allowed below zero in the stress matrix spectrum.
pub const TOL_PSD: f64 = 1e-8;
/// Relative tolerance for congruence of configurations.
pub const TOL_CONG: f64 = 1e-8;
/// Largest fold count accepted for exhaustive fan enumeration.
pub const MAX_FOLDS: usize = 20;
