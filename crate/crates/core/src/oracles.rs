//! Independent closed-form references for the hull pipeline.
//!
//! On a fundamental angular domain each 3-body's shadow has an explicit
//! piecewise description: the first octant for the cube, the first dodecant
//! (`0 ≤ θ ≤ π/3`, `0 ≤ φ ≤ π/2`) for the tetrahedron and the first
//! hexadecant (`0 ≤ θ ≤ π/4`, `0 ≤ φ ≤ π/2`) for the octahedron. Branch
//! boundaries are the curves `θ = α(φ)`, `θ = β(φ)` and the colatitudes
//! `γ = arccot(2√2)`, `δ = arccot(√2)`.
//!
//! The module also holds the width densities of the square and triangle,
//! the intrinsic volumes of a box, and the empirical test of the
//! conjecture that `cw(octahedron)` and `2·cw(tetrahedron)` share a law.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use serde::Serialize;

use crate::closedforms::{arccot, arcsec, elliptic_e, OctantPair};
use crate::error::{Error, Result};
use crate::estimators::{sample_shadows, shadow};
use crate::polytopes::{make_polytope, Polytope, PolytopeKind};
use crate::quadrature::{adaptive, Rule};
use crate::rng::{block_rng, blocks, pool};
use crate::stats::{chi_square, ks_two_sample};
use crate::subspace::{angles_to_unit, frame3, sample_unit, SphericalAngles, UnitVector};

const S2: f64 = std::f64::consts::SQRT_2;

fn s3() -> f64 {
    3f64.sqrt()
}

fn s6() -> f64 {
    6f64.sqrt()
}

/// `γ = arccot(2√2)`.
pub fn gamma() -> f64 {
    arccot(2.0 * S2)
}

/// `δ = arccot(√2)`.
pub fn delta() -> f64 {
    arccot(S2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OracleBody {
    Cube3,
    Simplex3,
    Cross3,
}

impl OracleBody {
    pub const ALL: [OracleBody; 3] = [OracleBody::Cube3, OracleBody::Simplex3, OracleBody::Cross3];

    /// How many copies of the fundamental domain tile the sphere.
    pub fn symmetry_count(self) -> f64 {
        match self {
            OracleBody::Cube3 => 8.0,
            OracleBody::Simplex3 => 12.0,
            OracleBody::Cross3 => 16.0,
        }
    }

    pub fn theta_max(self) -> f64 {
        match self {
            OracleBody::Cube3 => FRAC_PI_2,
            OracleBody::Simplex3 => PI / 3.0,
            OracleBody::Cross3 => FRAC_PI_4,
        }
    }

    pub fn kind(self) -> PolytopeKind {
        match self {
            OracleBody::Cube3 => PolytopeKind::Cube,
            OracleBody::Simplex3 => PolytopeKind::Simplex,
            OracleBody::Cross3 => PolytopeKind::Crosspolytope,
        }
    }

    pub fn polytope(self) -> Polytope {
        make_polytope(self.kind(), 3).expect("3-bodies are supported")
    }
}

impl std::str::FromStr for OracleBody {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<PolytopeKind>()? {
            PolytopeKind::Cube => Ok(OracleBody::Cube3),
            PolytopeKind::Simplex => Ok(OracleBody::Simplex3),
            PolytopeKind::Crosspolytope => Ok(OracleBody::Cross3),
            other => Err(Error::Config(format!("no piecewise oracle for {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub cw: f64,
    pub pw: f64,
    pub branch: u8,
}

fn unit_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [ct * sp, st * sp, cp]
}

/// `(cw, pw)` of the unit cube for `U` in the first octant.
pub fn cube_oracle(u: [f64; 3]) -> Result<(f64, f64)> {
    let [x, y, z] = u;
    if x < 0.0 || y < 0.0 || z < 0.0 {
        return Err(Error::Domain(format!("{u:?} is not in the first octant")));
    }
    let cw = x + y + z;
    let pw = 2.0 * ((1.0 - x * x).sqrt() + (1.0 - y * y).sqrt() + (1.0 - z * z).sqrt());
    Ok((cw, pw))
}

pub fn simplex_alpha(phi: f64) -> f64 {
    if phi >= gamma() {
        arcsec(2.0 * S2 * phi.tan()).unwrap_or(0.0)
    } else {
        0.0
    }
}

pub fn simplex_beta(phi: f64) -> f64 {
    2.0 * PI / 3.0 - simplex_alpha(phi)
}

pub fn cross_alpha(phi: f64) -> f64 {
    if phi >= delta() {
        FRAC_PI_4 - arcsec(S2 * phi.tan()).unwrap_or(0.0)
    } else {
        FRAC_PI_4
    }
}

pub fn cross_beta(phi: f64) -> f64 {
    -cross_alpha(phi)
}

fn root(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// The tetrahedron's formula on one branch, evaluated at any `U`.
pub fn simplex_branch(branch: u8, u: [f64; 3]) -> (f64, f64) {
    let [x, y, z] = u;
    let (s3, s6) = (s3(), s6());
    match branch {
        1 => (
            (s6 * x + 3.0 * S2 * y + s3 * z) / 12.0,
            (3.0 * root(4.0 - (s3 * x - y).powi(2))
                + s3 * root(12.0 - (x - s3 * y + 2.0 * S2 * z).powi(2))
                + 2.0 * s3 * root(3.0 - (x - S2 * z).powi(2)))
                / 6.0,
        ),
        2 => (
            s3 / 6.0 * (S2 * x + z),
            s3 / 6.0
                * (s3 * root(4.0 - (s3 * x - y).powi(2))
                    + s3 * root(4.0 - (s3 * x + y).powi(2))
                    + root(12.0 - (x - s3 * y + 2.0 * S2 * z).powi(2))
                    + root(12.0 - (x + s3 * y + 2.0 * S2 * z).powi(2))),
        ),
        3 => (
            s3 / 4.0 * z,
            0.5 * (root(4.0 - (s3 * x - y).powi(2))
                + 2.0 * root(1.0 - y * y)
                + root(4.0 - (s3 * x + y).powi(2))),
        ),
        _ => panic!("the tetrahedron has branches 1-3, got {branch}"),
    }
}

/// The octahedron's formula on one branch, evaluated at any `U`.
pub fn cross_branch(branch: u8, u: [f64; 3]) -> (f64, f64) {
    let [x, y, z] = u;
    match branch {
        1 => (
            0.5 * (x + y + z),
            S2 * (root(2.0 - (x + y).powi(2)) + root(2.0 - (x + z).powi(2)) + root(2.0 - (y + z).powi(2))),
        ),
        2 => (x, S2 * (root(2.0 - (y - z).powi(2)) + root(2.0 - (y + z).powi(2)))),
        3 => (z, S2 * (root(2.0 - (x - y).powi(2)) + root(2.0 - (x + y).powi(2)))),
        _ => panic!("the octahedron has branches 1-3, got {branch}"),
    }
}

fn check_domain(body: OracleBody, theta: f64, phi: f64) -> Result<()> {
    if (0.0..=body.theta_max()).contains(&theta) && (0.0..=FRAC_PI_2).contains(&phi) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { theta, phi })
    }
}

/// Tetrahedron shadow on the first dodecant; branches tried in order 1, 2, 3.
pub fn simplex_oracle(theta: f64, phi: f64) -> Result<OracleValue> {
    check_domain(OracleBody::Simplex3, theta, phi)?;
    let (a, b) = (simplex_alpha(phi), simplex_beta(phi));
    let branch = if delta() <= phi && b <= theta {
        1
    } else if gamma() <= phi && theta <= a.min(b) {
        2
    } else {
        3
    };
    let (cw, pw) = simplex_branch(branch, unit_from_angles(theta, phi));
    Ok(OracleValue { cw, pw, branch })
}

/// Octahedron shadow on the first hexadecant; branches tried in order 1, 2, 3.
pub fn cross_oracle(theta: f64, phi: f64) -> Result<OracleValue> {
    check_domain(OracleBody::Cross3, theta, phi)?;
    let (a, b) = (cross_alpha(phi), cross_beta(phi));
    let branch = if delta() <= phi && a.max(b) <= theta {
        1
    } else if FRAC_PI_4 <= phi && theta <= b {
        2
    } else {
        3
    };
    let (cw, pw) = cross_branch(branch, unit_from_angles(theta, phi));
    Ok(OracleValue { cw, pw, branch })
}

/// Dispatches to the body's oracle at spherical angles `(θ, φ)`.
pub fn oracle(body: OracleBody, theta: f64, phi: f64) -> Result<OracleValue> {
    match body {
        OracleBody::Cube3 => {
            check_domain(body, theta, phi)?;
            let (cw, pw) = cube_oracle(unit_from_angles(theta, phi).map(|c| c.max(0.0)))?;
            Ok(OracleValue { cw, pw, branch: 1 })
        }
        OracleBody::Simplex3 => simplex_oracle(theta, phi),
        OracleBody::Cross3 => cross_oracle(theta, phi),
    }
}

/// Uniform direction folded into the first octant, rejected unless it lies
/// in the body's fundamental domain. Returns `(θ, φ)`.
pub fn sample_fundamental<R: Rng + ?Sized>(body: OracleBody, rng: &mut R) -> (f64, f64) {
    loop {
        let u = sample_unit(3, rng);
        let c = u.components();
        let (x, y, z) = (c[0].abs(), c[1].abs(), c[2].abs());
        let theta = y.atan2(x);
        if theta <= body.theta_max() {
            return (theta, z.clamp(-1.0, 1.0).acos());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XcheckReport {
    pub body: OracleBody,
    pub n_points: usize,
    pub max_abs_err_cw: f64,
    pub max_abs_err_pw: f64,
    pub branch_counts: BTreeMap<u8, u64>,
}

/// Compares the oracle with the hull pipeline at `n_points` random points
/// of the fundamental domain.
pub fn xcheck(body: OracleBody, n_points: usize, seed: u64) -> Result<XcheckReport> {
    let p = body.polytope();
    let parts: Vec<Result<XcheckReport>> = blocks(n_points)
        .map(|(b, range)| {
            let mut rng = block_rng(seed, b);
            let mut part = XcheckReport {
                body,
                n_points: range.len(),
                max_abs_err_cw: 0.0,
                max_abs_err_pw: 0.0,
                branch_counts: BTreeMap::new(),
            };
            for _ in range {
                let (theta, phi) = sample_fundamental(body, &mut rng);
                let o = oracle(body, theta, phi)?;
                let (u, _) = angles_to_unit(&SphericalAngles::new3(theta, phi), 3)?;
                let s = shadow(&p, &frame3(&u)?)?;
                part.max_abs_err_cw = part.max_abs_err_cw.max((o.cw - s.cw).abs());
                part.max_abs_err_pw = part.max_abs_err_pw.max((o.pw - s.pw).abs());
                *part.branch_counts.entry(o.branch).or_insert(0) += 1;
            }
            Ok(part)
        })
        .collect();
    let mut out = XcheckReport {
        body,
        n_points: 0,
        max_abs_err_cw: 0.0,
        max_abs_err_pw: 0.0,
        branch_counts: BTreeMap::new(),
    };
    for part in parts {
        let part = part?;
        out.n_points += part.n_points;
        out.max_abs_err_cw = out.max_abs_err_cw.max(part.max_abs_err_cw);
        out.max_abs_err_pw = out.max_abs_err_pw.max(part.max_abs_err_pw);
        for (k, v) in part.branch_counts {
            *out.branch_counts.entry(k).or_insert(0) += v;
        }
    }
    Ok(out)
}

/// `(E cw, E cw², E pw, E pw², E cw·pw)` by Gauss–Legendre quadrature of the
/// oracle over its fundamental domain, scaled up by the symmetry count.
/// Panels follow the branch boundaries; `grid` is the node budget per axis.
pub fn oracle_moments(body: OracleBody, grid: usize) -> Result<[f64; 5]> {
    // (lo, hi, graded): α(φ) grows like √(φ − lo) on graded panels, so those
    // use φ = lo + (hi − lo) t²
    let phi_panels: Vec<(f64, f64, bool)> = match body {
        OracleBody::Cube3 => vec![(0.0, FRAC_PI_2, false)],
        OracleBody::Simplex3 => vec![(0.0, gamma(), false), (gamma(), delta(), true), (delta(), FRAC_PI_2, false)],
        OracleBody::Cross3 => vec![(0.0, delta(), false), (delta(), FRAC_PI_4, true), (FRAC_PI_4, FRAC_PI_2, false)],
    };
    let mut phi_rule = Rule { nodes: Vec::new(), weights: Vec::new() };
    for (lo, hi, graded) in phi_panels {
        let n = ((grid as f64 * (hi - lo) / FRAC_PI_2).round() as usize).max(8);
        if graded {
            let r = Rule::on_interval(n, 0.0, 1.0);
            for (&t, &w) in r.nodes.iter().zip(&r.weights) {
                phi_rule.nodes.push(lo + (hi - lo) * t * t);
                phi_rule.weights.push(w * 2.0 * (hi - lo) * t);
            }
        } else {
            let r = Rule::on_interval(n, lo, hi);
            phi_rule.nodes.extend(r.nodes);
            phi_rule.weights.extend(r.weights);
        }
    }
    let tmax = body.theta_max();
    let scale = body.symmetry_count() / (4.0 * PI);
    let mut acc = [0.0; 5];
    for (&phi, &wp) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
        let theta_breaks = match body {
            OracleBody::Cube3 => vec![],
            OracleBody::Simplex3 => vec![simplex_alpha(phi), simplex_beta(phi)],
            OracleBody::Cross3 => vec![cross_alpha(phi), cross_beta(phi)],
        };
        let theta_rule = Rule::panels(&theta_breaks, 0.0, tmax, grid, 8);
        for (&theta, &wt) in theta_rule.nodes.iter().zip(&theta_rule.weights) {
            let o = oracle(body, theta, phi)?;
            let w = wp * wt * phi.sin() * scale;
            let g = [o.cw, o.cw * o.cw, o.pw, o.pw * o.pw, o.cw * o.pw];
            for (a, gi) in acc.iter_mut().zip(g) {
                *a += w * gi;
            }
        }
    }
    Ok(acc)
}

/// The `(I, J)` pair of first-octant integrals for one cube moment, by
/// tensor Gauss–Legendre with `n` nodes per axis.
pub fn octant_integrals(pair: OctantPair, n: usize) -> (f64, f64) {
    let rule = Rule::on_interval(n, 0.0, FRAC_PI_2);
    let (mut i, mut j) = (0.0, 0.0);
    for (&phi, &wp) in rule.nodes.iter().zip(&rule.weights) {
        for (&theta, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let [x, y, _] = unit_from_angles(theta, phi);
            let w = wp * wt * phi.sin();
            let (gi, gj) = match pair {
                OctantPair::PwSquared => (1.0 - x * x, (1.0 - x * x).sqrt() * (1.0 - y * y).sqrt()),
                OctantPair::CwPw => (x * (1.0 - x * x).sqrt(), x * (1.0 - y * y).sqrt()),
            };
            i += w * gi;
            j += w * gj;
        }
    }
    (i, j)
}

/// `J` of the `pw²` pair as the single integral `∫₀^{π/2} E(sin φ) sin²φ dφ`.
pub fn octant_j_elliptic() -> Result<f64> {
    let f = |phi: f64| elliptic_e(phi.sin().min(1.0)).map_or(f64::NAN, |e| e * phi.sin().powi(2));
    let v = adaptive(&f, 0.0, FRAC_PI_2, 1e-13);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain("elliptic integrand failed".into()))
    }
}

/// Density of the width of the square or triangle along a uniform direction.
pub fn width_density(body: PolytopeKind, w: f64) -> Result<f64> {
    let v = match body {
        PolytopeKind::Square if (1.0..S2).contains(&w) => 4.0 / PI / (2.0 - w * w).sqrt(),
        PolytopeKind::Triangle if (s3() / 2.0..1.0).contains(&w) => 6.0 / PI / (1.0 - w * w).sqrt(),
        PolytopeKind::Square | PolytopeKind::Triangle => 0.0,
        other => return Err(Error::Config(format!("no width density for {other}"))),
    };
    Ok(v)
}

/// Support `[lo, hi)` of the width density.
pub fn width_support(body: PolytopeKind) -> Result<(f64, f64)> {
    match body {
        PolytopeKind::Square => Ok((1.0, S2)),
        PolytopeKind::Triangle => Ok((s3() / 2.0, 1.0)),
        other => Err(Error::Config(format!("no width density for {other}"))),
    }
}

/// `∫ g(w) f(w) dw` over `[a, b] ⊂` support, for the width density `f`.
/// The inverse-square-root singularity at the upper end is removed with
/// `w = hi − s²`.
pub fn integrate_width_density(body: PolytopeKind, a: f64, b: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let (_, hi) = width_support(body)?;
    let (s_lo, s_hi) = ((hi - b).max(0.0).sqrt(), (hi - a).max(0.0).sqrt());
    let rule = Rule::on_interval(64, s_lo, s_hi);
    let mut total = 0.0;
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = hi - s * s;
        total += w * 2.0 * s * width_density(body, x)? * g(x);
    }
    Ok(total)
}

/// Width of a planar polygon along the direction at angle `t`.
pub fn width_along(p: &Polytope, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let proj = p.vertices.iter().map(|v| c * v[0] + s * v[1]);
    let (lo, hi) = proj.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi - lo
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthDensityReport {
    pub body: PolytopeKind,
    pub n_samples: usize,
    pub bins: usize,
    pub normalization: f64,
    pub mean_width: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Histogram of widths at uniform angles against the density, Pearson χ²
/// with equal-width bins over the support.
pub fn width_density_test(body: PolytopeKind, n_samples: usize, bins: usize, seed: u64) -> Result<WidthDensityReport> {
    let (lo, hi) = width_support(body)?;
    if bins < 2 || n_samples < bins {
        return Err(Error::Config(format!("width test needs bins >= 2 and samples >= bins ({n_samples}, {bins})")));
    }
    let p = make_polytope(body, 2)?;
    let mut counts = vec![0u64; bins];
    let mut rng = block_rng(seed, 0);
    let h = (hi - lo) / bins as f64;
    for _ in 0..n_samples {
        let w = width_along(&p, rng.random::<f64>() * 2.0 * PI);
        let k = (((w - lo) / h).floor().max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let probs: Vec<f64> = (0..bins)
        .map(|k| integrate_width_density(body, lo + k as f64 * h, lo + (k + 1) as f64 * h, |_| 1.0))
        .collect::<Result<_>>()?;
    let chi = chi_square(&counts, &probs)?;
    Ok(WidthDensityReport {
        body,
        n_samples,
        bins,
        normalization: integrate_width_density(body, lo, hi, |_| 1.0)?,
        mean_width: integrate_width_density(body, lo, hi, |w| w)?,
        chi_square: chi.statistic,
        dof: chi.dof,
        p_value: chi.p_value,
    })
}

/// Intrinsic volumes `(V₁, V₂, V₃, V₄)` of a box with sides `z`: the
/// elementary symmetric polynomials.
pub fn box_intrinsic_volumes(z: [f64; 4]) -> Result<[f64; 4]> {
    if z.iter().any(|x| *x < 0.0 || x.is_nan()) {
        return Err(Error::Domain(format!("box sides must be non-negative: {z:?}")));
    }
    // e_k via the product ∏(1 + zᵢ t)
    let mut e = [1.0, 0.0, 0.0, 0.0, 0.0];
    for zi in z {
        for k in (1..5).rev() {
            e[k] += zi * e[k - 1];
        }
    }
    Ok([e[1], e[2], e[3], e[4]])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n_samples: usize,
    pub seed: u64,
    pub ks_statistic: f64,
    pub p_value: f64,
    /// "consistent" or "inconsistent" at level 0.01; never a proof.
    pub verdict: String,
    pub mean_cw_octahedron: f64,
    pub mean_twice_cw_tetrahedron: f64,
    pub mean_diff: f64,
    pub se_diff: f64,
}

pub const IDENTITY_ALPHA: f64 = 0.01;

/// Two-sample KS test of `cw(octahedron)` against `2·cw(tetrahedron)`.
pub fn distribution_identity_test(n_samples: usize, seed: u64) -> Result<IdentityReport> {
    if n_samples < 10_000 {
        return Err(Error::Config(format!("identity test needs >= 10000 samples, got {n_samples}")));
    }
    let octa = make_polytope(PolytopeKind::Crosspolytope, 3)?;
    let tetra = make_polytope(PolytopeKind::Simplex, 3)?;
    let (a, b) = pool(0).install(|| -> Result<_> {
        let a: Vec<f64> = sample_shadows(&octa, n_samples, seed, 0)?.iter().map(|s| s.cw).collect();
        let b: Vec<f64> = sample_shadows(&tetra, n_samples, seed ^ 0x5bd1_e995_9e37_79b9, 0)?
            .iter()
            .map(|s| 2.0 * s.cw)
            .collect();
        Ok((a, b))
    })?;
    let ks = ks_two_sample(&a, &b)?;
    let mean_var = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v / n)
    };
    let (ma, va) = mean_var(&a);
    let (mb, vb) = mean_var(&b);
    Ok(IdentityReport {
        n_samples,
        seed,
        ks_statistic: ks.statistic,
        p_value: ks.p_value,
        verdict: if ks.p_value > IDENTITY_ALPHA { "consistent" } else { "inconsistent" }.into(),
        mean_cw_octahedron: ma,
        mean_twice_cw_tetrahedron: mb,
        mean_diff: ma - mb,
        se_diff: (va + vb).sqrt(),
    })
}

/// Direction-wise comparison used by tests: oracle and pipeline at `u`.
pub fn pipeline_shadow(body: OracleBody, u: [f64; 3]) -> Result<(f64, f64)> {
    let s = shadow(&body.polytope(), &frame3(&UnitVector::new(u.to_vec())?)?)?;
    Ok((s.cw, s.pw))
}
