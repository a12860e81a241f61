//! The fixed regular bodies whose shadows are measured.
//!
//! Normalisation: simplices and crosspolytopes have unit edge, cubes have
//! unit side, and every body is centred at the origin. The three-dimensional
//! coordinates are exactly the classical ones (tetrahedron with a vertex on
//! the positive z-axis, cube `{±1/2}³`, octahedron `±eᵢ/√2`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    Simplex,
    Cube,
    Crosspolytope,
    Square,
    Triangle,
}

impl PolytopeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolytopeKind::Simplex => "simplex",
            PolytopeKind::Cube => "cube",
            PolytopeKind::Crosspolytope => "crosspolytope",
            PolytopeKind::Square => "square",
            PolytopeKind::Triangle => "triangle",
        }
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolytopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simplex" | "tetrahedron" | "tetra" => Ok(PolytopeKind::Simplex),
            "cube" | "hypercube" => Ok(PolytopeKind::Cube),
            "crosspolytope" | "cross" | "octahedron" | "octa" => Ok(PolytopeKind::Crosspolytope),
            "square" => Ok(PolytopeKind::Square),
            "triangle" => Ok(PolytopeKind::Triangle),
            other => Err(Error::Config(format!("unknown polytope '{other}'"))),
        }
    }
}

/// A centred convex polytope given by its vertices, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub name: PolytopeKind,
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

/// Builds one of the supported bodies: simplex, cube or crosspolytope in
/// dimension 3 or 4, the unit square or the unit-edge triangle in dimension 2.
pub fn make_polytope(name: PolytopeKind, dim: usize) -> Result<Polytope> {
    let vertices = match (name, dim) {
        (PolytopeKind::Simplex, 3) => tetrahedron(),
        (PolytopeKind::Simplex, 4) => regular_simplex(4),
        (PolytopeKind::Cube, 3 | 4) => cube(dim),
        (PolytopeKind::Crosspolytope, 3 | 4) => crosspolytope(dim),
        (PolytopeKind::Square, 2) => cube(2),
        (PolytopeKind::Triangle, 2) => triangle(),
        _ => {
            return Err(Error::Config(format!(
                "unsupported polytope {name} in dimension {dim}"
            )))
        }
    };
    Ok(Polytope::from_vertices(name, dim, vertices))
}

impl Polytope {
    fn from_vertices(name: PolytopeKind, dim: usize, mut vertices: Vec<Vec<f64>>) -> Self {
        vertices.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Polytope {
            name,
            dim,
            vertices,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn centroid(&self) -> Vec<f64> {
        let m = self.vertices.len() as f64;
        (0..self.dim)
            .map(|k| self.vertices.iter().map(|v| v[k]).sum::<f64>() / m)
            .collect()
    }

    /// Uniformly scaled copy; shadows scale as `s²` (area) and `s` (perimeter).
    pub fn scaled(&self, s: f64) -> Polytope {
        Polytope {
            name: self.name,
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| x * s).collect())
                .collect(),
        }
    }

    /// Smallest distance between two distinct vertices.
    pub fn min_vertex_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.min(distance(a, b));
            }
        }
        best
    }

    /// Lengths of the edges, taken as vertex pairs at the minimal distance.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let d0 = self.min_vertex_distance();
        let mut out = Vec::new();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                let d = distance(a, b);
                if d <= d0 * (1.0 + 1e-9) {
                    out.push(d);
                }
            }
        }
        out
    }

    /// Distinct outward unit facet normals of a 3-polytope, one per
    /// antipodal pair. Brute force over vertex triples; fine for ≤ 8 vertices.
    pub fn facet_normals(&self) -> Vec<[f64; 3]> {
        assert_eq!(self.dim, 3, "facet normals are only computed in dimension 3");
        let v: Vec<[f64; 3]> = self.vertices.iter().map(|p| [p[0], p[1], p[2]]).collect();
        let mut normals: Vec<[f64; 3]> = Vec::new();
        let n = v.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = sub3(v[j], v[i]);
                    let b = sub3(v[k], v[i]);
                    let c = cross3(a, b);
                    let len = dot3(c, c).sqrt();
                    if len < 1e-9 {
                        continue;
                    }
                    let c = [c[0] / len, c[1] / len, c[2] / len];
                    let side: Vec<f64> = v.iter().map(|p| dot3(sub3(*p, v[i]), c)).collect();
                    let supporting = side.iter().all(|s| *s <= 1e-9) || side.iter().all(|s| *s >= -1e-9);
                    if supporting && !normals.iter().any(|m| (dot3(*m, c).abs() - 1.0).abs() < 1e-9) {
                        normals.push(c);
                    }
                }
            }
        }
        normals
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn tetrahedron() -> Vec<Vec<f64>> {
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    vec![
        vec![0.0, 0.0, s6 / 4.0],
        vec![s3 / 3.0, 0.0, -s6 / 12.0],
        vec![-s3 / 6.0, 0.5, -s6 / 12.0],
        vec![-s3 / 6.0, -0.5, -s6 / 12.0],
    ]
}

fn triangle() -> Vec<Vec<f64>> {
    let s3 = 3f64.sqrt();
    vec![
        vec![0.0, s3 / 3.0],
        vec![0.5, -s3 / 6.0],
        vec![-0.5, -s3 / 6.0],
    ]
}

fn cube(dim: usize) -> Vec<Vec<f64>> {
    (0..1usize << dim)
        .map(|mask| {
            (0..dim)
                .map(|k| if mask >> k & 1 == 1 { 0.5 } else { -0.5 })
                .collect()
        })
        .collect()
}

fn crosspolytope(dim: usize) -> Vec<Vec<f64>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[k] = sign * r;
            out.push(v);
        }
    }
    out
}

/// Unit-edge regular n-simplex: the points `eᵢ/√2` of ℝⁿ⁺¹, centred and
/// expressed in the orthonormal Helmert basis of the hyperplane `Σxᵢ = 0`.
fn regular_simplex(dim: usize) -> Vec<Vec<f64>> {
    let m = dim + 1;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mean = r / m as f64;
    (0..m)
        .map(|i| {
            let point: Vec<f64> = (0..m)
                .map(|j| if j == i { r - mean } else { -mean })
                .collect();
            (1..m)
                .map(|k| {
                    // h_k = (1, …, 1, -k, 0, …) / √(k(k+1)), k ones
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    let head: f64 = point[..k].iter().sum();
                    (head - k as f64 * point[k]) / norm
                })
                .collect()
        })
        .collect()
}
