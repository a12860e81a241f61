//! Exact constants for shadow moments, computed from special functions.

pub mod special;
mod table;

use std::f64::consts::PI;

pub use special::{arccot, arcsec, elliptic_e, erf, erfc, hyp3f2_unit};
pub use table::{body_key, reference_table, Entry, ReferenceTable, Status};

use crate::error::{Error, Result};
use crate::polytopes::PolytopeKind;
use crate::quadrature::composite;

/// Truncation point of the Gaussian integrals; `e^{-3·8²} ≈ 1e-84`.
const GAUSS_CUTOFF: f64 = 8.0;
const PANEL_ORDER: usize = 64;
const PANELS: usize = 16;

fn arcsec3() -> f64 {
    (1.0f64 / 3.0).acos()
}

/// Mean shadow area of the unit-edge regular n-simplex:
/// `n(n+1)/(8√π) ∫ e^{-3x²} ((1 + erf x)/2)^{n−2} dx`.
pub fn mean_cw_simplex(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("simplex dimension {n} < 2")));
    }
    let f = |x: f64| (-3.0 * x * x).exp() * (0.5 * (1.0 + erf(x))).powi(n as i32 - 2);
    let integral = composite(f, -GAUSS_CUTOFF, GAUSS_CUTOFF, 2 * PANELS, PANEL_ORDER);
    Ok((n * (n + 1)) as f64 / (8.0 * PI.sqrt()) * integral)
}

/// Mean shadow area of the unit n-cube, `n/2`.
pub fn mean_cw_cube(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("cube dimension {n} < 2")));
    }
    Ok(n as f64 / 2.0)
}

/// Mean shadow area of the unit-edge n-crosspolytope:
/// `n(n−2)/√π ∫₀^∞ e^{-3x²} erf(x)^{n−3} dx`.
pub fn mean_cw_crosspolytope(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("crosspolytope dimension {n} < 3")));
    }
    let f = |x: f64| (-3.0 * x * x).exp() * erf(x).powi(n as i32 - 3);
    let integral = composite(f, 0.0, GAUSS_CUTOFF, PANELS, PANEL_ORDER);
    Ok((n * (n - 2)) as f64 / PI.sqrt() * integral)
}

/// Probability that the shadow of a 3-body has `k` vertices.
pub fn vertex_probability_3d(kind: PolytopeKind, k: usize) -> Result<f64> {
    let a = arcsec3();
    let p = match (kind, k) {
        (PolytopeKind::Simplex, 3) | (PolytopeKind::Crosspolytope, 6) => 2.0 / PI * (3.0 * a - PI),
        (PolytopeKind::Simplex, 4) | (PolytopeKind::Crosspolytope, 4) => 3.0 / PI * (PI - 2.0 * a),
        (PolytopeKind::Cube, 6) => 1.0,
        (PolytopeKind::Simplex | PolytopeKind::Crosspolytope | PolytopeKind::Cube, _) => 0.0,
        _ => return Err(Error::Config(format!("no vertex law for 3-dimensional {kind}"))),
    };
    Ok(p)
}

/// Expected number of shadow vertices.
///
/// In dimension 4 the simplex and crosspolytope values come from the
/// Gaussian-polytope integrals
/// `20√(2/π) ∫ e^{-2x²} ((1+erf x)/2)³ dx` and `48√(2/π) ∫₀^∞ e^{-2x²} erf(x)² dx`.
pub fn expected_vertices(kind: PolytopeKind, dim: usize) -> Result<f64> {
    let c = (2.0 / PI).sqrt();
    match (kind, dim) {
        (PolytopeKind::Cube, 3 | 4) => Ok(2.0 * dim as f64),
        (PolytopeKind::Simplex | PolytopeKind::Crosspolytope, 3) => {
            let ks: &[usize] = if kind == PolytopeKind::Simplex { &[3, 4] } else { &[4, 6] };
            ks.iter()
                .map(|&k| Ok(k as f64 * vertex_probability_3d(kind, k)?))
                .sum()
        }
        (PolytopeKind::Simplex, 4) => {
            let f = |x: f64| (-2.0 * x * x).exp() * (0.5 * (1.0 + erf(x))).powi(3);
            Ok(20.0 * c * composite(f, -GAUSS_CUTOFF, GAUSS_CUTOFF, 2 * PANELS, PANEL_ORDER))
        }
        (PolytopeKind::Crosspolytope, 4) => {
            let f = |x: f64| (-2.0 * x * x).exp() * erf(x).powi(2);
            Ok(48.0 * c * composite(f, 0.0, GAUSS_CUTOFF, PANELS, PANEL_ORDER))
        }
        _ => Err(Error::Config(format!("no expected vertex count for {kind} in dimension {dim}"))),
    }
}

/// Surface area of the unit-edge 3-bodies (cube: unit side).
pub fn surface_area_3d(kind: PolytopeKind) -> Result<f64> {
    match kind {
        PolytopeKind::Simplex => Ok(3f64.sqrt()),
        PolytopeKind::Cube => Ok(6.0),
        PolytopeKind::Crosspolytope => Ok(2.0 * 3f64.sqrt()),
        _ => Err(Error::Config(format!("no surface area for {kind}"))),
    }
}

/// Which second moment of the 3-cube an `(I, J)` pair of octant integrals assembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctantPair {
    /// `I = ∫∫ (1 − x²) sin φ`, `J = ∫∫ √(1−x²)√(1−y²) sin φ`.
    PwSquared,
    /// `I = ∫∫ x √(1−x²) sin φ`, `J = ∫∫ x √(1−y²) sin φ`.
    CwPw,
}

/// Second moment of the 3-cube from its first-octant integrals. With
/// `cw = x+y+z` and `pw = 2Σ√(1−xᵢ²)` there are three diagonal and six
/// off-diagonal terms, the octant carries `8/(4π)` of the sphere, and the
/// product picks up `2·2` for `pw²` but only `2` for `cw·pw`:
/// `32(3I + 6J)/(4π)` and `16(3I + 6J)/(4π)` respectively.
pub fn cube_moment_from_octant_integrals(pair: OctantPair, i: f64, j: f64) -> f64 {
    let product_factor = match pair {
        OctantPair::PwSquared => 4.0,
        OctantPair::CwPw => 2.0,
    };
    8.0 * product_factor * (3.0 * i + 6.0 * j) / (4.0 * PI)
}
