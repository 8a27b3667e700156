//! Numerical laboratory for normed planes.
//!
//! A norm is given by its unit sphere. The crate computes curvature of the
//! sphere, inner and outer tangent discs and ellipses, contractive
//! automorphisms between sphere points, moduli of convexity, and the
//! resulting semitransitivity verdicts.

pub mod classify;
pub mod curvature;
pub mod curve_builder;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod models;
pub mod moduli;
pub mod numeric;
pub mod reproduce;
pub mod report;
pub mod semigroup;
pub mod spec_file;
pub mod svg;
pub mod tangency;

pub use error::{Error, Result};
pub use geometry::{Curvature, Disc, LinearMap2, SpherePoint, Vec2};
pub use models::NormModel;
pub use spec_file::ModelSpec;
pub use tangency::Ellipse;
