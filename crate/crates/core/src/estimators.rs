//! Moment estimators for `(cw, pw)`.
//!
//! Monte Carlo works in dimensions 3 and 4. Samples are processed in fixed
//! blocks of [`BLOCK_SIZE`](crate::rng::BLOCK_SIZE), each with its own
//! random stream, and block sums are merged in block order, so a report is
//! bit-identical for any worker count.
//!
//! The deterministic estimator integrates over `(θ, φ)` with weight
//! `sin φ / 4π` using composite Gauss–Legendre rules. The shadow functions
//! are piecewise smooth: their kinks lie on the great circles orthogonal to
//! the facet normals. Panels in `θ` break at the longitudes of all pairwise
//! circle intersections, and for each `θ` node the `φ` panels break where
//! that meridian crosses a circle.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{area, convex_hull, perimeter};
use crate::polytopes::Polytope;
use crate::quadrature::Rule;
use crate::rng::{block_rng, blocks, pool, SampleRng};
use crate::subspace::{angles_to_unit, frame3, project, random_frame, ProjectionFrame, SphericalAngles};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowSample {
    pub cw: f64,
    pub pw: f64,
    pub nverts: usize,
}

/// Area, perimeter and vertex count of the shadow on the frame's plane.
pub fn shadow(p: &Polytope, frame: &ProjectionFrame) -> Result<ShadowSample> {
    let hull = convex_hull(&project(frame, p)?)?;
    Ok(ShadowSample {
        cw: area(&hull),
        pw: perimeter(&hull),
        nverts: hull.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    MonteCarlo,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub polytope: String,
    pub dim: usize,
    pub method: Method,
    pub n_samples: u64,
    pub seed: Option<u64>,
    pub degenerate_count: u64,
    pub mean_cw: f64,
    pub se_cw: f64,
    pub mean_cw2: f64,
    pub se_cw2: f64,
    pub mean_pw: f64,
    pub se_pw: f64,
    pub mean_pw2: f64,
    pub se_pw2: f64,
    pub mean_cwpw: f64,
    pub se_cwpw: f64,
    pub correlation: f64,
    /// First-order delta-method approximation.
    pub se_correlation: f64,
    pub mean_vertices: f64,
    pub se_vertices: f64,
    pub vertex_hist: BTreeMap<usize, f64>,
    /// Smallest `pw² / (4π cw)` seen; at least 1 by the isoperimetric inequality.
    pub min_isoperimetric_ratio: f64,
}

const CSV_COLUMNS: [&str; 22] = [
    "polytope",
    "dim",
    "method",
    "n_samples",
    "seed",
    "degenerate_count",
    "mean_cw",
    "se_cw",
    "mean_cw2",
    "se_cw2",
    "mean_pw",
    "se_pw",
    "mean_pw2",
    "se_pw2",
    "mean_cwpw",
    "se_cwpw",
    "correlation",
    "se_correlation",
    "mean_vertices",
    "se_vertices",
    "vertex_hist",
    "min_isoperimetric_ratio",
];

impl MomentReport {
    pub fn means(&self) -> [f64; 5] {
        [self.mean_cw, self.mean_cw2, self.mean_pw, self.mean_pw2, self.mean_cwpw]
    }

    pub fn standard_errors(&self) -> [f64; 5] {
        [self.se_cw, self.se_cw2, self.se_pw, self.se_pw2, self.se_cwpw]
    }

    /// Standard error of the frequency of `k`-vertex shadows.
    pub fn vertex_se(&self, k: usize) -> f64 {
        let p = self.vertex_hist.get(&k).copied().unwrap_or(0.0);
        match self.method {
            Method::MonteCarlo => (p * (1.0 - p) / self.n_samples as f64).sqrt(),
            Method::Quadrature => 0.0,
        }
    }

    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        let method = match self.method {
            Method::MonteCarlo => "MonteCarlo",
            Method::Quadrature => "Quadrature",
        };
        let hist = self
            .vertex_hist
            .iter()
            .map(|(k, v)| format!("{k}:{v:?}"))
            .collect::<Vec<_>>()
            .join(";");
        let f = |x: f64| format!("{x:?}");
        [
            self.polytope.clone(),
            self.dim.to_string(),
            method.to_string(),
            self.n_samples.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.degenerate_count.to_string(),
            f(self.mean_cw),
            f(self.se_cw),
            f(self.mean_cw2),
            f(self.se_cw2),
            f(self.mean_pw),
            f(self.se_pw),
            f(self.mean_pw2),
            f(self.se_pw2),
            f(self.mean_cwpw),
            f(self.se_cwpw),
            f(self.correlation),
            f(self.se_correlation),
            f(self.mean_vertices),
            f(self.se_vertices),
            hist,
            f(self.min_isoperimetric_ratio),
        ]
        .join(",")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{} (dim {}), {:?}, {} samples\n",
            self.polytope, self.dim, self.method, self.n_samples
        );
        let rows = [
            ("E(cw)", self.mean_cw, self.se_cw),
            ("E(cw^2)", self.mean_cw2, self.se_cw2),
            ("E(pw)", self.mean_pw, self.se_pw),
            ("E(pw^2)", self.mean_pw2, self.se_pw2),
            ("E(cw*pw)", self.mean_cwpw, self.se_cwpw),
            ("corr", self.correlation, self.se_correlation),
            ("E(vertices)", self.mean_vertices, self.se_vertices),
        ];
        for (name, v, se) in rows {
            out.push_str(&format!("{name:<12} {v:>22.15}  ± {se:.3e}\n"));
        }
        for (k, p) in &self.vertex_hist {
            out.push_str(&format!("P({k} vertices) {p:>19.15}  ± {:.3e}\n", self.vertex_se(*k)));
        }
        out
    }
}

/// Weighted running sums of `g = (cw, cw², pw, pw², cw·pw)` and of `g gᵀ`.
#[derive(Debug, Clone, Default)]
struct Accumulator {
    weight: f64,
    count: u64,
    degenerate: u64,
    sum: [f64; 5],
    cross: [[f64; 5]; 5],
    vert: f64,
    vert2: f64,
    hist: BTreeMap<usize, f64>,
    min_iso: Option<f64>,
}

impl Accumulator {
    fn add(&mut self, s: &ShadowSample, w: f64) {
        let g = [s.cw, s.cw * s.cw, s.pw, s.pw * s.pw, s.cw * s.pw];
        self.weight += w;
        self.count += 1;
        for i in 0..5 {
            self.sum[i] += w * g[i];
            for j in i..5 {
                self.cross[i][j] += w * g[i] * g[j];
            }
        }
        let k = s.nverts as f64;
        self.vert += w * k;
        self.vert2 += w * k * k;
        *self.hist.entry(s.nverts).or_insert(0.0) += w;
        let iso = s.pw * s.pw / (4.0 * PI * s.cw);
        self.min_iso = Some(self.min_iso.map_or(iso, |m| m.min(iso)));
    }

    fn merge(&mut self, o: &Accumulator) {
        self.weight += o.weight;
        self.count += o.count;
        self.degenerate += o.degenerate;
        for i in 0..5 {
            self.sum[i] += o.sum[i];
            for j in i..5 {
                self.cross[i][j] += o.cross[i][j];
            }
        }
        self.vert += o.vert;
        self.vert2 += o.vert2;
        for (k, v) in &o.hist {
            *self.hist.entry(*k).or_insert(0.0) += v;
        }
        if let Some(m) = o.min_iso {
            self.min_iso = Some(self.min_iso.map_or(m, |x| x.min(m)));
        }
    }

    fn finish(self, p: &Polytope, method: Method, seed: Option<u64>) -> MomentReport {
        let w = self.weight;
        let m: [f64; 5] = std::array::from_fn(|i| self.sum[i] / w);
        let [cw, cw2, pw, pw2, cwpw] = m;
        let var_cw = cw2 - cw * cw;
        let var_pw = pw2 - pw * pw;
        let denom = (var_cw * var_pw).sqrt();
        let corr = (cwpw - cw * pw) / denom;

        let (se, se_corr, se_vert) = match method {
            Method::Quadrature => ([0.0; 5], 0.0, 0.0),
            Method::MonteCarlo => {
                let n = self.count as f64;
                let bessel = n / (n - 1.0);
                let cov = |i: usize, j: usize| {
                    let (a, b) = if i <= j { (i, j) } else { (j, i) };
                    (self.cross[a][b] / w - m[a] * m[b]) * bessel
                };
                let se: [f64; 5] = std::array::from_fn(|i| (cov(i, i).max(0.0) / n).sqrt());
                // ∂r/∂(m_cw, m_cw2, m_pw, m_pw2, m_cwpw)
                let grad = [
                    -pw / denom + corr * cw / var_cw,
                    -0.5 * corr / var_cw,
                    -cw / denom + corr * pw / var_pw,
                    -0.5 * corr / var_pw,
                    1.0 / denom,
                ];
                let mut var_r = 0.0;
                for i in 0..5 {
                    for j in 0..5 {
                        var_r += grad[i] * cov(i, j) * grad[j];
                    }
                }
                let ev = self.vert / w;
                let var_v = (self.vert2 / w - ev * ev) * bessel;
                (se, (var_r.max(0.0) / n).sqrt(), (var_v.max(0.0) / n).sqrt())
            }
        };

        MomentReport {
            polytope: p.name.to_string(),
            dim: p.dim,
            method,
            n_samples: self.count,
            seed,
            degenerate_count: self.degenerate,
            mean_cw: cw,
            se_cw: se[0],
            mean_cw2: cw2,
            se_cw2: se[1],
            mean_pw: pw,
            se_pw: se[2],
            mean_pw2: pw2,
            se_pw2: se[3],
            mean_cwpw: cwpw,
            se_cwpw: se[4],
            correlation: corr,
            se_correlation: se_corr,
            mean_vertices: self.vert / w,
            se_vertices: se_vert,
            vertex_hist: self.hist.into_iter().map(|(k, v)| (k, v / w)).collect(),
            min_isoperimetric_ratio: self.min_iso.unwrap_or(f64::NAN),
        }
    }
}

/// One non-degenerate shadow of a uniformly random plane. Degenerate draws
/// are retried from the same stream and counted in `degenerate`.
fn draw_shadow(p: &Polytope, rng: &mut SampleRng, degenerate: &mut u64) -> Result<ShadowSample> {
    loop {
        let frame = random_frame(p.dim, rng)?;
        match shadow(p, &frame) {
            Ok(s) => return Ok(s),
            Err(Error::DegenerateShadow) => *degenerate += 1,
            Err(e) => return Err(e),
        }
    }
}

fn check_mc(p: &Polytope, n_samples: usize) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::Config(format!("need at least 2 samples, got {n_samples}")));
    }
    if !(3..=4).contains(&p.dim) {
        return Err(Error::UnsupportedMethod(format!(
            "Monte Carlo shadows need dimension 3 or 4, got {}",
            p.dim
        )));
    }
    Ok(())
}

/// Monte Carlo estimate over `n_samples` uniformly random planes.
/// `workers = 0` uses every available core.
pub fn estimate_mc(p: &Polytope, n_samples: usize, seed: u64, workers: usize) -> Result<MomentReport> {
    check_mc(p, n_samples)?;
    let block_list: Vec<_> = blocks(n_samples).collect();
    let parts: Vec<Result<Accumulator>> = pool(workers).install(|| {
        block_list
            .par_iter()
            .map(|(b, range)| {
                let mut rng = block_rng(seed, *b);
                let mut acc = Accumulator::default();
                for _ in range.clone() {
                    let s = draw_shadow(p, &mut rng, &mut acc.degenerate)?;
                    acc.add(&s, 1.0);
                }
                Ok(acc)
            })
            .collect()
    });
    let mut total = Accumulator::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total.finish(p, Method::MonteCarlo, Some(seed)))
}

/// The raw shadows behind [`estimate_mc`] with the same `(seed, n)`, in sample order.
pub fn sample_shadows(p: &Polytope, n_samples: usize, seed: u64, workers: usize) -> Result<Vec<ShadowSample>> {
    check_mc(p, n_samples)?;
    let block_list: Vec<_> = blocks(n_samples).collect();
    let parts: Vec<Result<Vec<ShadowSample>>> = pool(workers).install(|| {
        block_list
            .par_iter()
            .map(|(b, range)| {
                let mut rng = block_rng(seed, *b);
                let mut degenerate = 0;
                range
                    .clone()
                    .map(|_| draw_shadow(p, &mut rng, &mut degenerate))
                    .collect()
            })
            .collect()
    });
    let mut out = Vec::with_capacity(n_samples);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Longitudes where the kink structure of the shadow functions changes.
fn theta_breaks(normals: &[[f64; 3]]) -> Vec<f64> {
    let wrap = |t: f64| t.rem_euclid(2.0 * PI);
    let mut out = Vec::new();
    for n in normals {
        if n[2].abs() < 1e-12 {
            // circle through the poles: a whole meridian pair is a kink
            let t = n[0].atan2(-n[1]);
            out.push(wrap(t));
            out.push(wrap(t + PI));
        }
    }
    for (i, a) in normals.iter().enumerate() {
        for b in &normals[i + 1..] {
            let c = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            if c[0].hypot(c[1]) > 1e-12 {
                out.push(wrap(c[1].atan2(c[0])));
                out.push(wrap((-c[1]).atan2(-c[0])));
            }
        }
    }
    out
}

/// Colatitudes where the meridian at `theta` crosses the circles `n·U = 0`.
fn phi_breaks(normals: &[[f64; 3]], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    normals
        .iter()
        .filter(|n| n[2].abs() >= 1e-12)
        .map(|n| {
            let a = n[0] * c + n[1] * s;
            n[2].abs().atan2(-n[2].signum() * a)
        })
        .collect()
}

const MIN_PANEL_NODES: usize = 4;

/// Deterministic estimate for a 3-body by composite tensor Gauss–Legendre
/// over `(θ, φ) ∈ [0, 2π) × [0, π]` with weight `sin φ / 4π`. `grid_theta`
/// and `grid_phi` are the node budgets per axis, shared among panels.
pub fn estimate_quadrature3(p: &Polytope, grid_theta: usize, grid_phi: usize) -> Result<MomentReport> {
    if p.dim != 3 {
        return Err(Error::UnsupportedMethod(format!(
            "quadrature is only available in dimension 3, got {}",
            p.dim
        )));
    }
    if grid_theta < 8 || grid_phi < 8 {
        return Err(Error::Config(format!(
            "quadrature grids need at least 8 nodes per axis, got {grid_theta}x{grid_phi}"
        )));
    }
    let normals = p.facet_normals();
    let theta_rule = Rule::panels(&theta_breaks(&normals), 0.0, 2.0 * PI, grid_theta, MIN_PANEL_NODES);
    let nodes: Vec<(f64, f64)> = theta_rule.nodes.iter().copied().zip(theta_rule.weights.iter().copied()).collect();

    let parts: Vec<Result<Accumulator>> = nodes
        .par_iter()
        .map(|&(theta, wt)| {
            let phi_rule = Rule::panels(&phi_breaks(&normals, theta), 0.0, PI, grid_phi, MIN_PANEL_NODES);
            let mut acc = Accumulator::default();
            for (&phi, &wp) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
                let (u, _) = angles_to_unit(&SphericalAngles::new3(theta, phi), 3)?;
                let s = shadow(p, &frame3(&u)?)?;
                acc.add(&s, wt * wp * phi.sin() / (4.0 * PI));
            }
            Ok(acc)
        })
        .collect();
    let mut total = Accumulator::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total.finish(p, Method::Quadrature, None))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexProbability {
    pub p: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexDistribution {
    pub polytope: String,
    pub dim: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub probabilities: BTreeMap<usize, VertexProbability>,
    pub expected: f64,
    pub se_expected: f64,
}

/// Frequencies of shadow vertex counts with binomial standard errors.
pub fn vertex_distribution(p: &Polytope, n_samples: usize, seed: u64) -> Result<VertexDistribution> {
    let r = estimate_mc(p, n_samples, seed, 0)?;
    Ok(VertexDistribution {
        polytope: r.polytope.clone(),
        dim: r.dim,
        n_samples: r.n_samples,
        seed,
        probabilities: r
            .vertex_hist
            .keys()
            .map(|&k| (k, VertexProbability { p: r.vertex_hist[&k], se: r.vertex_se(k) }))
            .collect(),
        expected: r.mean_vertices,
        se_expected: r.se_vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytopes::{make_polytope, PolytopeKind};
    use crate::subspace::UnitVector;

    fn body(k: PolytopeKind, d: usize) -> Polytope {
        make_polytope(k, d).unwrap()
    }

    #[test]
    fn cube_axis_shadow() {
        let f = frame3(&UnitVector::from_unit(vec![0.0, 0.0, 1.0])).unwrap();
        let s = shadow(&body(PolytopeKind::Cube, 3), &f).unwrap();
        assert_eq!(s.nverts, 4);
        assert!((s.cw - 1.0).abs() < 1e-15 && (s.pw - 4.0).abs() < 1e-15);
    }

    #[test]
    fn cube_diagonal_shadow_is_regular_hexagon() {
        let u = UnitVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        let s = shadow(&body(PolytopeKind::Cube, 3), &frame3(&u).unwrap()).unwrap();
        assert_eq!(s.nverts, 6);
        assert!((s.cw - 3f64.sqrt()).abs() < 1e-14);
        assert!((s.pw - 6.0 * (2.0f64 / 3.0).sqrt()).abs() < 1e-14, "{s:?}");
    }

    #[test]
    fn octahedron_vertex_counts() {
        let oct = body(PolytopeKind::Crosspolytope, 3);
        let mut rng = block_rng(17, 0);
        for _ in 0..2000 {
            let s = shadow(&oct, &random_frame(3, &mut rng).unwrap()).unwrap();
            assert!(s.nverts == 4 || s.nverts == 6);
        }
    }

    #[test]
    fn perturbed_axis_octahedron_is_square() {
        let u = UnitVector::new(vec![1.0, 1e-3, 2e-3]).unwrap();
        let s = shadow(&body(PolytopeKind::Crosspolytope, 3), &frame3(&u).unwrap()).unwrap();
        assert_eq!(s.nverts, 4);
    }

    #[test]
    fn quadrature_rejects_dim4_and_small_grids() {
        assert!(matches!(
            estimate_quadrature3(&body(PolytopeKind::Cube, 4), 16, 16),
            Err(Error::UnsupportedMethod(_))
        ));
        assert!(matches!(
            estimate_quadrature3(&body(PolytopeKind::Cube, 3), 4, 16),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn mc_needs_two_samples() {
        assert!(matches!(estimate_mc(&body(PolytopeKind::Cube, 3), 1, 0, 1), Err(Error::Config(_))));
        assert!(estimate_mc(&body(PolytopeKind::Square, 2), 10, 0, 1).is_err());
    }

    #[test]
    fn small_quadrature_is_close() {
        let r = estimate_quadrature3(&body(PolytopeKind::Cube, 3), 32, 32).unwrap();
        assert!((r.mean_cw - 1.5).abs() < 1e-12);
        assert!((r.mean_pw - 1.5 * PI).abs() < 1e-5);
        let total: f64 = r.vertex_hist.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_invariants() {
        let r = estimate_mc(&body(PolytopeKind::Simplex, 3), 20_000, 3, 2).unwrap();
        let total: f64 = r.vertex_hist.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(r.correlation >= -1.0 && r.correlation <= 1.0);
        assert!(r.mean_cw2 >= r.mean_cw * r.mean_cw);
        assert!(r.min_isoperimetric_ratio >= 1.0);
        let recomputed = (r.mean_cwpw - r.mean_cw * r.mean_pw)
            / ((r.mean_cw2 - r.mean_cw.powi(2)) * (r.mean_pw2 - r.mean_pw.powi(2))).sqrt();
        assert_eq!(recomputed, r.correlation);
    }

    #[test]
    fn sample_shadows_match_report() {
        let p = body(PolytopeKind::Crosspolytope, 4);
        let xs = sample_shadows(&p, 5000, 21, 3).unwrap();
        let r = estimate_mc(&p, 5000, 21, 1).unwrap();
        let mean: f64 = xs.iter().map(|s| s.cw).sum::<f64>() / 5000.0;
        assert!((mean - r.mean_cw).abs() < 1e-12);
    }

    #[test]
    fn csv_row_has_every_column() {
        let r = estimate_mc(&body(PolytopeKind::Cube, 3), 100, 1, 1).unwrap();
        assert_eq!(r.to_csv_row().split(',').count(), CSV_COLUMNS.len());
        assert!(r.to_table().contains("E(cw*pw)"));
    }
}
