//! Python module `cartan`.

use cartan_core::geometry::{self, BodySpec, Halfspace};
use cartan_core::intrinsic_volumes::{self as iv, Valuation};
use cartan_core::kinematic::{self, KinematicGroup, ReportInputs};
use cartan_core::matrix_group::{self as mg, Component};
use cartan_core::sampling::{shard_stream, EstimatorResult, McPlan};
use cartan_core::weyl::{self, Method, WeylConstants};
use cartan_core::{Matrix, Vector};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: cartan_core::Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for cartan_core::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Parses a serde value through Python's `json` so results arrive as
/// plain dicts and lists.
fn to_python<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn plan(samples: u64, seed: u64, shards: Option<u32>) -> PyResult<McPlan> {
    if samples == 0 {
        return Err(PyValueError::new_err("samples must be positive"));
    }
    let p = McPlan::new(samples, seed);
    Ok(match shards {
        Some(s) => p.with_shards(s),
        None => p,
    })
}

fn estimate(r: &EstimatorResult) -> (f64, f64) {
    (r.mean, r.std_error)
}

fn group(name: &str) -> PyResult<KinematicGroup> {
    match name.to_ascii_lowercase().as_str() {
        "gl" => Ok(KinematicGroup::Gl),
        "o" => Ok(KinematicGroup::O),
        "so" => Ok(KinematicGroup::So),
        _ => Err(PyValueError::new_err(format!("unknown group {name:?}; use 'gl', 'o' or 'so'"))),
    }
}

fn valuation(name: &str, n: usize) -> PyResult<Valuation> {
    match name {
        "chi" => Ok(Valuation::euler()),
        "vn" => Ok(Valuation::volume(n)),
        _ => Err(PyValueError::new_err(format!("unknown valuation {name:?}; use 'chi' or 'vn'"))),
    }
}

fn component(name: &str) -> PyResult<Component> {
    match name {
        "full" => Ok(Component::Full),
        "special" => Ok(Component::Special),
        "reflection" => Ok(Component::Reflection),
        _ => Err(PyValueError::new_err(format!(
            "unknown component {name:?}; use 'full', 'special' or 'reflection'"
        ))),
    }
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    mg::rows(m)
}

/// A convex body: ball, ellipsoid, H-polytope or V-polytope.
#[pyclass(name = "ConvexBody", module = "cartan", frozen)]
pub struct PyConvexBody {
    inner: geometry::ConvexBody,
}

#[pymethods]
impl PyConvexBody {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        let inner = geometry::ConvexBody::ball(Vector::from_vec(center), radius).or_py()?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn unit_ball(n: usize) -> Self {
        Self {
            inner: geometry::ConvexBody::unit_ball(n),
        }
    }

    /// Principal axes are the columns of `axes` (default: coordinate axes).
    #[staticmethod]
    #[pyo3(signature = (center, semiaxes, axes=None))]
    fn ellipsoid(center: Vec<f64>, semiaxes: Vec<f64>, axes: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        Self::from_spec(BodySpec::Ellipsoid { center, semiaxes, axes })
    }

    /// `{x : ⟨normals[i], x⟩ ≤ offsets[i]}`.
    #[staticmethod]
    fn hpolytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> PyResult<Self> {
        if normals.len() != offsets.len() {
            return Err(PyValueError::new_err("normals and offsets differ in length"));
        }
        let halfspaces = normals.into_iter().zip(offsets).map(|(a, b)| Halfspace::new(a, b)).collect();
        Self::from_spec(BodySpec::Hpolytope { halfspaces })
    }

    #[staticmethod]
    fn vpolytope(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        Self::from_spec(BodySpec::Vpolytope { vertices })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = BodySpec::from_json(text).or_py()?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&BodySpec::from(&self.inner)).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        self.inner.contains(&Vector::from_vec(x)).or_py()
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.dim() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.inner.distance_to_point(&Vector::from_vec(x)))
    }

    /// `(value, exact)`; inexact means an upper bound.
    fn diameter(&self) -> (f64, bool) {
        let d = self.inner.diameter();
        (d.value, d.exact)
    }

    fn volume(&self) -> Option<f64> {
        self.inner.exact_volume()
    }

    fn support(&self, direction: Vec<f64>) -> PyResult<f64> {
        if direction.len() != self.inner.dim() {
            return Err(PyValueError::new_err("direction has the wrong dimension"));
        }
        Ok(self.inner.support_value(&Vector::from_vec(direction)))
    }

    fn translate(&self, t: Vec<f64>) -> PyResult<Self> {
        let inner = self.inner.translate(&Vector::from_vec(t)).or_py()?;
        Ok(Self { inner })
    }

    fn scale(&self, factor: f64) -> PyResult<Self> {
        let inner = self.inner.scale(factor).or_py()?;
        Ok(Self { inner })
    }

    /// Image under `x ↦ A x + b`.
    fn affine_image(&self, a: Vec<Vec<f64>>, b: Vec<f64>) -> PyResult<Self> {
        let map = geometry::AffineMap::new(mg::matrix_from_rows(&a).or_py()?, Vector::from_vec(b)).or_py()?;
        let inner = self.inner.affine_image(&map).or_py()?;
        Ok(Self { inner })
    }

    /// Closed-form `V₀..V_n`, or `None` for bodies without one.
    fn intrinsic_volumes(&self) -> Option<Vec<f64>> {
        iv::intrinsic_volumes_closed(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("ConvexBody({})", self.to_json().unwrap_or_else(|_| self.inner.kind().into()))
    }
}

impl PyConvexBody {
    fn from_spec(spec: BodySpec) -> PyResult<Self> {
        Ok(Self {
            inner: spec.build().or_py()?,
        })
    }
}

#[pyfunction]
fn kappa(j: usize) -> f64 {
    iv::kappa(j)
}

#[pyfunction]
#[pyo3(signature = (n, j, radius=1.0))]
fn intrinsic_volume_ball(n: usize, j: usize, radius: f64) -> PyResult<f64> {
    iv::intrinsic_volume_ball(n, j, radius).or_py()
}

#[pyfunction]
fn intrinsic_volumes_ellipsoid(semiaxes: Vec<f64>) -> PyResult<Vec<f64>> {
    iv::intrinsic_volumes_ellipsoid(&semiaxes).or_py()
}

/// Steiner-polynomial fit; returns the fit as a dict.
#[pyfunction]
#[pyo3(signature = (body, epsilons, samples, seed, shards=None))]
fn steiner_fit<'py>(
    py: Python<'py>,
    body: &PyConvexBody,
    epsilons: Vec<f64>,
    samples: u64,
    seed: u64,
    shards: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = plan(samples, seed, shards)?;
    let fit = py.detach(|| iv::steiner_fit(&body.inner, &epsilons, &p)).or_py()?;
    to_python(py, &fit)
}

/// `[(mean, std_error)]` for `c₀..c_n` by the direct route or the
/// eigenvalue route (`method = "weyl"`).
#[pyfunction]
#[pyo3(signature = (n, samples, seed, method="direct", shards=None))]
fn weyl_constants<'py>(
    py: Python<'py>,
    n: usize,
    samples: u64,
    seed: u64,
    method: &str,
    shards: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let method = match method {
        "direct" => Method::Direct,
        "weyl" => Method::Weyl,
        _ => return Err(PyValueError::new_err("method must be 'direct' or 'weyl'")),
    };
    let p = plan(samples, seed, shards)?;
    let c = py.detach(|| WeylConstants::compute(n, method, &p)).or_py()?;
    to_python(py, &c)
}

#[pyfunction]
fn z_n(n: usize) -> f64 {
    weyl::z_n(n)
}

/// `(mean, std_error)` of `∫ φ(M ∩ ḡL) dḡ`.
#[pyfunction]
#[pyo3(signature = (group, phi, m, l, samples, seed, shards=None))]
#[allow(clippy::too_many_arguments)]
fn lhs_kinematic(
    py: Python<'_>,
    group: &str,
    phi: &str,
    m: &PyConvexBody,
    l: &PyConvexBody,
    samples: u64,
    seed: u64,
    shards: Option<u32>,
) -> PyResult<(f64, f64)> {
    let (g, v, p) = (self::group(group)?, valuation(phi, m.inner.dim())?, plan(samples, seed, shards)?);
    let r = py.detach(|| kinematic::lhs_kinematic(g, &v, &m.inner, &l.inner, &p)).or_py()?;
    Ok(estimate(&r))
}

/// `(mean, std_error)` of the Crofton coefficient over affine `j`-flats.
#[pyfunction]
#[pyo3(signature = (phi, m, j, samples, seed, window=None, shards=None))]
#[allow(clippy::too_many_arguments)]
fn crofton_coefficient(
    py: Python<'_>,
    phi: &str,
    m: &PyConvexBody,
    j: usize,
    samples: u64,
    seed: u64,
    window: Option<f64>,
    shards: Option<u32>,
) -> PyResult<(f64, f64)> {
    let (v, p) = (valuation(phi, m.inner.dim())?, plan(samples, seed, shards)?);
    let window = window.unwrap_or_else(|| kinematic::default_window(&m.inner));
    let r = py
        .detach(|| kinematic::crofton_coefficient_with_window(&v, &m.inner, j, window, &p))
        .or_py()?;
    Ok(estimate(&r))
}

/// Full left/right-hand side report as a dict. The constants `cⱼ` for the
/// affine group are computed by the direct route with the same budget.
#[pyfunction]
#[pyo3(signature = (group, phi, m, l, samples, seed, shards=None))]
#[allow(clippy::too_many_arguments)]
fn kinematic_report<'py>(
    py: Python<'py>,
    group: &str,
    phi: &str,
    m: &PyConvexBody,
    l: &PyConvexBody,
    samples: u64,
    seed: u64,
    shards: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let n = m.inner.dim();
    let (g, v, base) = (self::group(group)?, valuation(phi, n)?, plan(samples, seed, shards)?);
    let report = py
        .detach(|| {
            let c = if g.is_affine() {
                Some(weyl::c_direct_all(n, &base.reseeded(2))?)
            } else {
                None
            };
            let inputs = ReportInputs {
                group: g,
                phi: &v,
                lhs_plan: base,
                crofton_plan: base.reseeded(1),
                c,
            };
            kinematic::kinematic_report(&inputs, &m.inner, &l.inner)
        })
        .or_py()?;
    to_python(py, &report)
}

/// Stratified check of the touching-position characterization on random
/// polygon pairs.
#[pyfunction]
#[pyo3(signature = (trials, seed, shards=None))]
fn separation_lemma_check<'py>(
    py: Python<'py>,
    trials: u64,
    seed: u64,
    shards: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = plan(trials, seed, shards)?;
    let r = py.detach(|| kinematic::separation_lemma_check_random(&p)).or_py()?;
    to_python(py, &r)
}

/// Haar-random orthogonal matrix as a list of rows.
#[pyfunction]
#[pyo3(signature = (n, seed, component="full"))]
fn sample_haar_orthogonal(n: usize, seed: u64, component: &str) -> PyResult<Vec<Vec<f64>>> {
    let c = self::component(component)?;
    let mut rng = shard_stream(seed, 0);
    Ok(rows(mg::sample_haar_orthogonal(n, c, &mut rng).as_matrix()))
}

/// Standard Gaussian symmetric matrix as a list of rows.
#[pyfunction]
fn sample_gaussian_sym(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = shard_stream(seed, 0);
    rows(mg::sample_gaussian_sym(n, &mut rng).as_matrix())
}

/// `exp` of a symmetric matrix.
#[pyfunction]
fn expm_sym(x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let x = mg::SymMatrix::new(mg::matrix_from_rows(&x).or_py()?).or_py()?;
    Ok(rows(&mg::expm_sym(&x).or_py()?))
}

#[pymodule]
fn cartan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConvexBody>()?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(intrinsic_volume_ball, m)?)?;
    m.add_function(wrap_pyfunction!(intrinsic_volumes_ellipsoid, m)?)?;
    m.add_function(wrap_pyfunction!(steiner_fit, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_constants, m)?)?;
    m.add_function(wrap_pyfunction!(z_n, m)?)?;
    m.add_function(wrap_pyfunction!(lhs_kinematic, m)?)?;
    m.add_function(wrap_pyfunction!(crofton_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(kinematic_report, m)?)?;
    m.add_function(wrap_pyfunction!(separation_lemma_check, m)?)?;
    m.add_function(wrap_pyfunction!(sample_haar_orthogonal, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gaussian_sym, m)?)?;
    m.add_function(wrap_pyfunction!(expm_sym, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
