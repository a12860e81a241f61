//! Python bindings: `import chorowidth_py`.

use std::collections::BTreeMap;

use chorowidth::closedforms::reference_table as table;
use chorowidth::estimators::{estimate_mc as mc, estimate_quadrature3, MomentReport as CoreReport};
use chorowidth::oracles::{self, OracleBody};
use chorowidth::subspace::{frame3, frame4};
use chorowidth::{Error, PolytopeKind, UnitVector};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn kind(name: &str) -> PyResult<PolytopeKind> {
    name.parse().map_err(err)
}

#[pyclass(frozen, module = "chorowidth_py")]
pub struct Polytope {
    inner: chorowidth::Polytope,
}

#[pymethods]
impl Polytope {
    #[new]
    fn new(name: &str, dim: usize) -> PyResult<Self> {
        let inner = chorowidth::make_polytope(kind(name)?, dim).map_err(err)?;
        Ok(Polytope { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices.clone()
    }

    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    fn scaled(&self, s: f64) -> Polytope {
        Polytope { inner: self.inner.scaled(s) }
    }

    /// `(cw, pw, vertices)` of the shadow on the plane orthogonal to `u`
    /// (and `v` in dimension 4).
    #[pyo3(signature = (u, v=None))]
    fn shadow(&self, u: Vec<f64>, v: Option<Vec<f64>>) -> PyResult<(f64, f64, usize)> {
        let u = UnitVector::new(u).map_err(err)?;
        let frame = match (self.inner.dim, v) {
            (3, None) => frame3(&u),
            (4, Some(v)) => frame4(&u, &UnitVector::new(v).map_err(err)?),
            (d, _) => Err(Error::Config(format!("dimension {d} needs {} direction vectors", d - 2))),
        }
        .map_err(err)?;
        let s = chorowidth::shadow(&self.inner, &frame).map_err(err)?;
        Ok((s.cw, s.pw, s.nverts))
    }

    fn __repr__(&self) -> String {
        format!("Polytope('{}', {})", self.inner.name, self.inner.dim)
    }
}

#[pyclass(frozen, module = "chorowidth_py")]
pub struct MomentReport {
    inner: CoreReport,
}

#[pymethods]
impl MomentReport {
    #[getter]
    fn polytope(&self) -> String {
        self.inner.polytope.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn n_samples(&self) -> u64 {
        self.inner.n_samples
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.inner.seed
    }

    /// `[E cw, E cw², E pw, E pw², E cw·pw]`.
    #[getter]
    fn means(&self) -> [f64; 5] {
        self.inner.means()
    }

    #[getter]
    fn standard_errors(&self) -> [f64; 5] {
        self.inner.standard_errors()
    }

    #[getter]
    fn correlation(&self) -> f64 {
        self.inner.correlation
    }

    #[getter]
    fn mean_vertices(&self) -> f64 {
        self.inner.mean_vertices
    }

    #[getter]
    fn vertex_hist(&self) -> BTreeMap<usize, f64> {
        self.inner.vertex_hist.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| err(e.into()))
    }

    fn __repr__(&self) -> String {
        format!(
            "MomentReport({}{}, E(cw)={:.6}, E(pw)={:.6}, n={})",
            self.inner.polytope, self.inner.dim, self.inner.mean_cw, self.inner.mean_pw, self.inner.n_samples
        )
    }
}

#[pyfunction]
#[pyo3(signature = (polytope, dim, n_samples, seed=42, workers=0))]
fn estimate_mc(py: Python<'_>, polytope: &str, dim: usize, n_samples: usize, seed: u64, workers: usize) -> PyResult<MomentReport> {
    let p = chorowidth::make_polytope(kind(polytope)?, dim).map_err(err)?;
    let inner = py.detach(|| mc(&p, n_samples, seed, workers)).map_err(err)?;
    Ok(MomentReport { inner })
}

#[pyfunction]
#[pyo3(signature = (polytope, grid_theta=256, grid_phi=256))]
fn estimate_quadrature(py: Python<'_>, polytope: &str, grid_theta: usize, grid_phi: usize) -> PyResult<MomentReport> {
    let p = chorowidth::make_polytope(kind(polytope)?, 3).map_err(err)?;
    let inner = py.detach(|| estimate_quadrature3(&p, grid_theta, grid_phi)).map_err(err)?;
    Ok(MomentReport { inner })
}

/// Area and perimeter of the convex hull of planar points, and its vertices.
#[pyfunction]
fn convex_hull(points: Vec<[f64; 2]>) -> PyResult<(f64, f64, Vec<[f64; 2]>)> {
    let h = chorowidth::convex_hull(&points).map_err(err)?;
    Ok((chorowidth::area(&h), chorowidth::perimeter(&h), h.vertices().to_vec()))
}

/// `[(key, value, formula, status)]` for every tabulated constant.
#[pyfunction]
fn reference_table() -> Vec<(String, f64, String, String)> {
    table()
        .entries
        .iter()
        .map(|e| (e.key.clone(), e.value, e.formula.clone(), format!("{:?}", e.status)))
        .collect()
}

/// `(cw, pw, branch)` from the piecewise closed form at `(θ, φ)`.
#[pyfunction]
fn oracle(body: &str, theta: f64, phi: f64) -> PyResult<(f64, f64, u8)> {
    let b: OracleBody = body.parse().map_err(err)?;
    let o = oracles::oracle(b, theta, phi).map_err(err)?;
    Ok((o.cw, o.pw, o.branch))
}

#[pyfunction]
fn width_density(body: &str, w: f64) -> PyResult<f64> {
    oracles::width_density(kind(body)?, w).map_err(err)
}

#[pyfunction]
fn box_intrinsic_volumes(z: [f64; 4]) -> PyResult<[f64; 4]> {
    oracles::box_intrinsic_volumes(z).map_err(err)
}

/// `(ks_statistic, p_value, verdict)` for cw(octahedron) against 2·cw(tetrahedron).
#[pyfunction]
#[pyo3(signature = (n_samples, seed=42))]
fn distribution_identity_test(py: Python<'_>, n_samples: usize, seed: u64) -> PyResult<(f64, f64, String)> {
    let r = py.detach(|| oracles::distribution_identity_test(n_samples, seed)).map_err(err)?;
    Ok((r.ks_statistic, r.p_value, r.verdict))
}

#[pymodule]
fn chorowidth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Polytope>()?;
    m.add_class::<MomentReport>()?;
    m.add_function(wrap_pyfunction!(estimate_mc, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(reference_table, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(width_density, m)?)?;
    m.add_function(wrap_pyfunction!(box_intrinsic_volumes, m)?)?;
    m.add_function(wrap_pyfunction!(distribution_identity_test, m)?)?;
    Ok(())
}
