//! Random 2-subspaces of ℝ³ and ℝ⁴ and their orthonormal projection frames.
//!
//! In ℝ³ the plane is the orthogonal complement of a unit vector `U`; in ℝ⁴
//! it is the complement of an orthonormal pair `(U, V)`. The frame rows are
//! the first two rows of the explicit rotation matrices `M₃(U)` and
//! `M₄(U, V)`, which map the plane onto the first two coordinate axes.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::polytopes::Polytope;

/// Below this the squared denominator `1−x²` (or `1−p²−x²`) is treated as
/// near-singular: rounding in it costs about `ε / (1−x²)` relative accuracy.
pub const POLE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalises `v`; fails on a zero or non-finite vector.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain("cannot normalise a zero vector".into()));
        }
        Ok(UnitVector(v.into_iter().map(|x| x / n).collect()))
    }

    /// Wraps components that are already of unit length.
    pub fn from_unit(v: Vec<f64>) -> Self {
        UnitVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }
}

/// Two orthonormal rows spanning the projection plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFrame {
    pub dim: usize,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

impl ProjectionFrame {
    pub fn apply(&self, v: &[f64]) -> Point2 {
        [dot(&self.e1, v), dot(&self.e2, v)]
    }
}

/// Spherical angles of `U` (`theta`, `phi`, and in ℝ⁴ `psi`) and of `V`
/// on the 2-sphere orthogonal to `U` (`kappa`, `lambda`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl SphericalAngles {
    pub fn new3(theta: f64, phi: f64) -> Self {
        SphericalAngles {
            theta,
            phi,
            psi: PI / 2.0,
            kappa: 0.0,
            lambda: 0.0,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let in_range = |x: f64, hi: f64| (0.0..=hi).contains(&x);
        let ok = match dim {
            3 => in_range(self.theta, 2.0 * PI) && in_range(self.phi, PI),
            4 => {
                in_range(self.theta, 2.0 * PI)
                    && in_range(self.phi, PI)
                    && in_range(self.psi, PI)
                    && in_range(self.kappa, 2.0 * PI)
                    && in_range(self.lambda, PI)
            }
            _ => return Err(Error::Config(format!("spherical angles for dimension {dim}"))),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("angles out of range: {self:?}")))
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Uniform point on `S^{dim−1}` from normalised standard normals.
pub fn sample_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = UnitVector::new(v) {
            return u;
        }
    }
}

/// Uniform unit vector orthogonal to `u`.
pub fn sample_orthogonal<R: Rng + ?Sized>(u: &UnitVector, rng: &mut R) -> UnitVector {
    loop {
        let mut v: Vec<f64> = (0..u.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let c = dot(&v, u.components());
        for (x, ui) in v.iter_mut().zip(u.components()) {
            *x -= c * ui;
        }
        if norm(&v) > 1e-8 {
            if let Ok(w) = UnitVector::new(v) {
                return w;
            }
        }
    }
}

/// Uniformly random projection frame in dimension 3 or 4.
pub fn random_frame<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ProjectionFrame> {
    match dim {
        3 => frame3(&sample_unit(3, rng)),
        4 => {
            let u = sample_unit(4, rng);
            let v = sample_orthogonal(&u, rng);
            frame4(&u, &v)
        }
        _ => Err(Error::Config(format!("no random frames in dimension {dim}"))),
    }
}

/// Cyclic left shift of coordinates: `(Rx)ᵢ = x_{i+k}`.
fn rotate(v: &[f64], k: usize) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| v[(i + k) % n]).collect()
}

/// Inverse of [`rotate`], i.e. `Rᵀ`.
fn unrotate(v: &[f64], k: usize) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| v[(i + n - k) % n]).collect()
}

fn m3_rows(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (x, y, z) = (u[0], u[1], u[2]);
    let d = (1.0 - x * x).sqrt();
    (vec![d, -x * y / d, -x * z / d], vec![0.0, z / d, -y / d])
}

fn m4_rows(u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (x, y, z, w) = (u[0], u[1], u[2], u[3]);
    let (p, q, r, s) = (v[0], v[1], v[2], v[3]);
    let d = (1.0 - p * p - x * x).sqrt();
    (
        vec![d, -(p * q + x * y) / d, -(p * r + x * z) / d, -(p * s + x * w) / d],
        vec![0.0, (r * w - s * z) / d, -(q * w - s * y) / d, (q * z - r * y) / d],
    )
}

/// Frame of the plane orthogonal to `u` (rows 1–2 of `M₃(u)`).
///
/// When `1 − x² ≤ POLE_THRESHOLD` the rows are computed for the cyclically
/// permuted vector and rotated back, which yields a frame of the same plane.
pub fn frame3(u: &UnitVector) -> Result<ProjectionFrame> {
    if u.dim() != 3 {
        return Err(Error::Config(format!("frame3 needs a 3-vector, got {}", u.dim())));
    }
    let c = u.components();
    let denom = |k: usize| 1.0 - c[k] * c[k];
    let shift = if denom(0) > POLE_THRESHOLD {
        0
    } else {
        (1..3).max_by(|&i, &j| denom(i).total_cmp(&denom(j))).unwrap()
    };
    let (e1, e2) = m3_rows(&rotate(c, shift));
    Ok(ProjectionFrame {
        dim: 3,
        e1: unrotate(&e1, shift),
        e2: unrotate(&e2, shift),
    })
}

/// Frame of the plane orthogonal to `u` and `v` (rows 1–2 of `M₄(u, v)`).
pub fn frame4(u: &UnitVector, v: &UnitVector) -> Result<ProjectionFrame> {
    if u.dim() != 4 || v.dim() != 4 {
        return Err(Error::Config("frame4 needs two 4-vectors".into()));
    }
    let (a, b) = (u.components(), v.components());
    let denom = |k: usize| 1.0 - a[k] * a[k] - b[k] * b[k];
    let shift = if denom(0) > POLE_THRESHOLD {
        0
    } else {
        (1..4).max_by(|&i, &j| denom(i).total_cmp(&denom(j))).unwrap()
    };
    let (e1, e2) = m4_rows(&rotate(a, shift), &rotate(b, shift));
    Ok(ProjectionFrame {
        dim: 4,
        e1: unrotate(&e1, shift),
        e2: unrotate(&e2, shift),
    })
}

/// The point `V` on the 2-sphere orthogonal to `u ∈ S³` with angles `(κ, λ)`.
pub fn orthogonal_point(u: &UnitVector, kappa: f64, lambda: f64) -> Result<UnitVector> {
    if u.dim() != 4 {
        return Err(Error::Config("orthogonal_point needs a 4-vector".into()));
    }
    let c = u.components();
    let (x, y, z, w) = (c[0], c[1], c[2], c[3]);
    let a = kappa.cos() * lambda.sin();
    let b = kappa.sin() * lambda.sin();
    let g = lambda.cos();
    Ok(UnitVector::from_unit(vec![
        a * -y + b * -z + g * -w,
        a * x + b * w + g * -z,
        a * -w + b * x + g * y,
        a * z + b * -y + g * x,
    ]))
}

/// Evaluates the spherical parameterisation; for `dim = 4` also returns `V`.
pub fn angles_to_unit(a: &SphericalAngles, dim: usize) -> Result<(UnitVector, Option<UnitVector>)> {
    a.validate(dim)?;
    let (st, ct) = a.theta.sin_cos();
    let (sp, cp) = a.phi.sin_cos();
    match dim {
        3 => Ok((UnitVector::from_unit(vec![ct * sp, st * sp, cp]), None)),
        4 => {
            let (ss, cs) = a.psi.sin_cos();
            let u = UnitVector::from_unit(vec![ct * sp * ss, st * sp * ss, cp * ss, cs]);
            let v = orthogonal_point(&u, a.kappa, a.lambda)?;
            Ok((u, Some(v)))
        }
        _ => unreachable!("validate rejects other dimensions"),
    }
}

/// Images of the polytope's vertices in the plane.
pub fn project(frame: &ProjectionFrame, p: &Polytope) -> Result<Vec<Point2>> {
    if frame.dim != p.dim {
        return Err(Error::Config(format!(
            "frame dimension {} does not match polytope dimension {}",
            frame.dim, p.dim
        )));
    }
    Ok(p.vertices.iter().map(|v| frame.apply(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{area, convex_hull};
    use crate::polytopes::{make_polytope, PolytopeKind};
    use crate::rng::block_rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn frame_violation(f: &ProjectionFrame, normals: &[&[f64]]) -> f64 {
        let mut worst = (norm(&f.e1) - 1.0).abs().max((norm(&f.e2) - 1.0).abs());
        worst = worst.max(dot(&f.e1, &f.e2).abs());
        for n in normals {
            worst = worst.max(dot(&f.e1, n).abs()).max(dot(&f.e2, n).abs());
        }
        worst
    }

    #[test]
    fn frame3_at_north_pole() {
        let f = frame3(&UnitVector::from_unit(vec![0.0, 0.0, 1.0])).unwrap();
        assert_eq!(f.e1, vec![1.0, 0.0, 0.0]);
        assert!(close(&f.e2, &[0.0, 1.0, 0.0], 0.0));
    }

    #[test]
    fn frame3_at_y_axis() {
        let f = frame3(&UnitVector::from_unit(vec![0.0, 1.0, 0.0])).unwrap();
        assert!(close(&f.e1, &[1.0, 0.0, 0.0], 0.0));
        assert!(close(&f.e2, &[0.0, 0.0, -1.0], 0.0));
    }

    #[test]
    fn frame3_pole_singularity_is_rotated_away() {
        for u in [vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![1.0, 1e-9, 0.0]] {
            let u = UnitVector::new(u).unwrap();
            let f = frame3(&u).unwrap();
            assert!(frame_violation(&f, &[u.components()]) < 1e-12);
        }
    }

    #[test]
    fn random_frames3_are_orthonormal() {
        let mut rng = block_rng(1, 0);
        for _ in 0..10_000 {
            let u = sample_unit(3, &mut rng);
            let f = frame3(&u).unwrap();
            assert!(frame_violation(&f, &[u.components()]) < 1e-12);
        }
    }

    #[test]
    fn orthogonal_point_examples() {
        let u = UnitVector::from_unit(vec![0.0, 0.0, 0.0, 1.0]);
        let v = orthogonal_point(&u, 0.0, PI / 2.0).unwrap();
        assert!(close(v.components(), &[0.0, 0.0, -1.0, 0.0], 1e-15));

        let mut rng = block_rng(2, 0);
        for _ in 0..1000 {
            let u = sample_unit(4, &mut rng);
            let kappa = rng.random::<f64>() * 2.0 * PI;
            let lambda = rng.random::<f64>() * PI;
            let v = orthogonal_point(&u, kappa, lambda).unwrap();
            assert!(dot(u.components(), v.components()).abs() < 1e-12);
            assert!((norm(v.components()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn frame4_examples() {
        let u = UnitVector::from_unit(vec![0.0, 0.0, 0.0, 1.0]);
        let v = UnitVector::from_unit(vec![0.0, 0.0, 1.0, 0.0]);
        let f = frame4(&u, &v).unwrap();
        assert!(close(&f.e1, &[1.0, 0.0, 0.0, 0.0], 0.0));
        assert!(close(&f.e2, &[0.0, 1.0, 0.0, 0.0], 0.0));

        let mut rng = block_rng(3, 0);
        for _ in 0..10_000 {
            let u = sample_unit(4, &mut rng);
            let v = sample_orthogonal(&u, &mut rng);
            let f = frame4(&u, &v).unwrap();
            let viol = frame_violation(&f, &[u.components(), v.components()]);
            assert!(viol < 1e-12, "{viol} {u:?} {v:?}");
            let pu = f.apply(u.components());
            let pv = f.apply(v.components());
            assert!(pu[0].abs() < 1e-12 && pu[1].abs() < 1e-12);
            assert!(pv[0].abs() < 1e-12 && pv[1].abs() < 1e-12);
        }
    }

    #[test]
    fn frame4_singular_planes() {
        let cases = [
            (vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]),
            (vec![0.0, 1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0, 0.0]),
            (vec![FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0], vec![FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2, 0.0]),
        ];
        for (u, v) in cases {
            let (u, v) = (UnitVector::from_unit(u), UnitVector::from_unit(v));
            let f = frame4(&u, &v).unwrap();
            assert!(frame_violation(&f, &[u.components(), v.components()]) < 1e-12);
        }
    }

    #[test]
    fn angles_examples() {
        let (u, v) = angles_to_unit(&SphericalAngles::new3(0.0, PI / 2.0), 3).unwrap();
        assert!(close(u.components(), &[1.0, 0.0, 0.0], 1e-16));
        assert!(v.is_none());
        let a = SphericalAngles {
            theta: PI / 2.0,
            phi: PI / 2.0,
            psi: PI / 2.0,
            kappa: 0.3,
            lambda: 1.1,
        };
        let (u, v) = angles_to_unit(&a, 4).unwrap();
        assert!(close(u.components(), &[0.0, 1.0, 0.0, 0.0], 1e-15));
        assert!(dot(u.components(), v.unwrap().components()).abs() < 1e-15);
        assert!(angles_to_unit(&SphericalAngles::new3(7.0, 0.0), 3).is_err());
    }

    #[test]
    fn density_normalisation_3d() {
        // ∫∫ sin φ dφ dθ / 4π = 1 with a midpoint grid
        let n = 400;
        let h = PI / n as f64;
        let inner: f64 = (0..n).map(|i| ((i as f64 + 0.5) * h).sin() * h).sum();
        assert!((inner * 2.0 * PI / (4.0 * PI) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn sphere_moments() {
        let mut rng = block_rng(11, 0);
        let n = 100_000;
        let mut mean = [0.0; 3];
        let mut sq = 0.0;
        for _ in 0..n {
            let u = sample_unit(3, &mut rng);
            for (m, x) in mean.iter_mut().zip(u.components()) {
                *m += x;
            }
            sq += u.components()[0].powi(2);
        }
        let sigma = 1.0 / (3.0 * n as f64).sqrt();
        for m in mean {
            assert!((m / n as f64).abs() < 4.0 * sigma);
        }
        // Var(x²) = E x⁴ − (E x²)² = 1/5 − 1/9
        let sigma2 = ((1.0 / 5.0 - 1.0 / 9.0) / n as f64).sqrt();
        assert!((sq / n as f64 - 1.0 / 3.0).abs() < 4.0 * sigma2);
    }

    #[test]
    fn project_examples() {
        let cube = make_polytope(PolytopeKind::Cube, 3).unwrap();
        let f = frame3(&UnitVector::from_unit(vec![0.0, 0.0, 1.0])).unwrap();
        let pts = project(&f, &cube).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(pts.iter().all(|p| p[0].abs() == 0.5 && p[1].abs() == 0.5));

        let tet = make_polytope(PolytopeKind::Simplex, 3).unwrap();
        let mut rng = block_rng(5, 0);
        let f = frame3(&sample_unit(3, &mut rng)).unwrap();
        let pts = project(&f, &tet).unwrap();
        let cx: f64 = pts.iter().map(|p| p[0]).sum();
        let cy: f64 = pts.iter().map(|p| p[1]).sum();
        assert!(cx.abs() < 1e-15 && cy.abs() < 1e-15);

        let oct = make_polytope(PolytopeKind::Crosspolytope, 3).unwrap();
        let f = frame3(&UnitVector::from_unit(vec![0.0, 0.0, 1.0])).unwrap();
        let hull = convex_hull(&project(&f, &oct).unwrap()).unwrap();
        assert_eq!(hull.len(), 4);
        for v in hull.vertices() {
            let r = v[0].abs().max(v[1].abs());
            assert!((r - FRAC_1_SQRT_2).abs() < 1e-15 && v[0] * v[1] == 0.0);
        }
        assert!((area(&hull) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn project_is_linear_in_scale() {
        let p = make_polytope(PolytopeKind::Simplex, 4).unwrap();
        let mut rng = block_rng(9, 0);
        let f = random_frame(4, &mut rng).unwrap();
        let a = project(&f, &p).unwrap();
        let b = project(&f, &p.scaled(2.5)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((2.5 * x[0] - y[0]).abs() < 1e-14 && (2.5 * x[1] - y[1]).abs() < 1e-14);
        }
        let cube3 = make_polytope(PolytopeKind::Cube, 3).unwrap();
        assert!(project(&f, &cube3).is_err());
    }
}
