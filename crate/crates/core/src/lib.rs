//! Random planar shadows of regular polytopes.
//!
//! A uniformly random 2-plane through the origin of ℝ³ or ℝ⁴ casts a convex
//! polygonal shadow of a fixed polytope. Its area is the *chorowidth* `cw`
//! and its perimeter the *periwidth* `pw`. This crate estimates the joint
//! moments `E(cw)`, `E(cw²)`, `E(pw)`, `E(pw²)`, `E(cw·pw)`, the correlation
//! and the shadow vertex-count distribution for the regular simplex, cube and
//! crosspolytope in dimensions 3 and 4, and checks them against exact
//! constants computed from special functions.
//!
//! Layout:
//!
//! - [`polytopes`]: the fixed bodies (unit edge or unit side, centred).
//! - [`geometry`]: planar convex hull, area and perimeter.
//! - [`subspace`]: random 2-subspaces, projection frames, spherical angles.
//! - [`estimators`]: Monte Carlo and tensor Gauss–Legendre moment estimators.
//! - [`closedforms`]: special functions and the reference table of constants.
//! - [`oracles`]: piecewise closed-form shadows on fundamental domains, width
//!   densities, box intrinsic volumes and the distribution identity test.
//! - [`cli`]: the command-line driver.

pub mod cli;
pub mod closedforms;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod oracles;
pub mod polytopes;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod subspace;

pub use error::{Error, Result};
pub use estimators::{
    estimate_mc, estimate_quadrature3, shadow, vertex_distribution, Method, MomentReport,
    ShadowSample, VertexDistribution,
};
pub use geometry::{area, convex_hull, perimeter, Point2, Polygon};
pub use polytopes::{make_polytope, Polytope, PolytopeKind};
pub use subspace::{ProjectionFrame, SphericalAngles, UnitVector};
