use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gjk::{self, Mode};
use super::hull::{convex_hull_2d, polygon_area};
use super::lp::{LinearProgram, LpStatus, FEASIBILITY_TOL};
use super::{AffineMap, BoxRegion};
use crate::error::{Error, Result};
use crate::matrix_group::{eigendecompose, OrthogonalMatrix, SymMatrix};
use crate::{Matrix, Vector, MAX_DIM};

/// Vertex enumeration is skipped above this many candidate bases.
const MAX_VERTEX_BASES: usize = 200_000;

/// Closed halfspace `⟨x, normal⟩ ≤ offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub(crate) fn normal_vec(&self) -> Vector {
        Vector::from_row_slice(&self.normal)
    }

    fn value(&self, x: &Vector) -> f64 {
        self.normal.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
    }

    fn normal_norm(&self) -> f64 {
        self.normal.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub(crate) fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.value(x) <= self.offset + tol * self.normal_norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// `{x : Σᵢ ⟨x − c, uᵢ⟩² / aᵢ² ≤ 1}` with the `uᵢ` the columns of `axes`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: Vector,
    axes: OrthogonalMatrix,
    semiaxes: Vector,
    /// `axes · diag(semiaxes)`: the image of the unit ball, centered.
    shape: Matrix,
}

impl Ellipsoid {
    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn axes(&self) -> &OrthogonalMatrix {
        &self.axes
    }

    pub fn semiaxes(&self) -> &Vector {
        &self.semiaxes
    }

    fn local(&self, x: &Vector) -> Vector {
        self.axes.as_matrix().transpose() * (x - &self.center)
    }

    /// Euclidean distance from `x`, by Newton iteration on the Lagrange
    /// multiplier `μ` of `Σ aᵢ² yᵢ² / (aᵢ² + μ)² = 1`.
    ///
    /// The secular function is convex and decreasing in `μ`, so Newton from
    /// `μ = 0` increases monotonically to the root.
    fn distance_to(&self, x: &Vector) -> f64 {
        let y = self.local(x);
        let a = &self.semiaxes;
        let inside: f64 = y.iter().zip(a.iter()).map(|(yi, ai)| (yi / ai).powi(2)).sum();
        if inside <= 1.0 {
            return 0.0;
        }
        let mut mu = 0.0_f64;
        for _ in 0..200 {
            let mut g = -1.0;
            let mut dg = 0.0;
            for (yi, ai) in y.iter().zip(a.iter()) {
                let d = ai * ai + mu;
                let term = (ai * yi / d).powi(2);
                g += term;
                dg -= 2.0 * term / d;
            }
            if g <= 0.0 || dg == 0.0 {
                break;
            }
            let step = g / dg;
            mu -= step;
            if step.abs() <= 1e-15 * (1.0 + mu.abs()) {
                break;
            }
        }
        y.iter()
            .zip(a.iter())
            .map(|(yi, ai)| {
                let z = ai * ai * yi / (ai * ai + mu);
                (yi - z).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Bounded intersection of halfspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    bbox: BoxRegion,
    vertices: Option<Vec<Vector>>,
}

impl HPolytope {
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Enumerated vertices, when enumeration was affordable.
    pub fn vertices(&self) -> Option<&[Vector]> {
        self.vertices.as_deref()
    }

    /// Axis-aligned box `∏[lowerᵢ, upperᵢ]`.
    pub fn cuboid(lower: &[f64], upper: &[f64]) -> Result<ConvexBody> {
        Error::check_dim(lower.len(), upper.len())?;
        let n = lower.len();
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            hs.push(Halfspace::new(e.clone(), upper[i]));
            e[i] = -1.0;
            hs.push(Halfspace::new(e, -lower[i]));
        }
        ConvexBody::hpolytope(n, hs)
    }

    fn support_lp(halfspaces: &[Halfspace], dim: usize, d: &Vector) -> Result<LpStatus> {
        let mut lp = LinearProgram::free(dim);
        lp.maximize(d.iter().copied().collect());
        for h in halfspaces {
            lp.le(h.normal.clone(), h.offset);
        }
        lp.solve()
    }

    fn support_point(&self, d: &Vector) -> Vector {
        if let Some(v) = &self.vertices {
            return argmax(v, d).clone();
        }
        match Self::support_lp(&self.halfspaces, self.dim, d) {
            Ok(LpStatus::Optimal { x, .. }) => Vector::from_vec(x),
            // Boundedness and nonemptiness were established on construction.
            _ => Vector::from_row_slice(&self.bbox.upper),
        }
    }

    fn contains(&self, x: &Vector) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x, FEASIBILITY_TOL))
    }
}

/// Convex hull of a nonempty vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct VPolytope {
    vertices: Vec<Vector>,
    /// Facet halfspaces when cheaply available (n = 1, and full-dimensional
    /// polygons); membership falls back to an LP otherwise.
    facets: Option<Vec<Halfspace>>,
    /// Counter-clockwise strict hull for n = 2.
    hull: Option<Vec<Vector>>,
}

impl VPolytope {
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Counter-clockwise hull (planar polytopes only).
    pub fn hull_2d(&self) -> Option<&[Vector]> {
        self.hull.as_deref()
    }

    fn contains(&self, x: &Vector) -> bool {
        if let Some(f) = &self.facets {
            return f.iter().all(|h| h.contains(x, FEASIBILITY_TOL));
        }
        convex_combination_feasible(&self.vertices, x)
    }
}

/// Is `x` a convex combination of `points`? (LP over the weights.)
pub(crate) fn convex_combination_feasible(points: &[Vector], x: &Vector) -> bool {
    let k = points.len();
    let n = x.len();
    let mut lp = LinearProgram::nonnegative(k);
    lp.eq(vec![1.0; k], 1.0);
    for r in 0..n {
        lp.eq(points.iter().map(|p| p[r]).collect(), x[r]);
    }
    matches!(lp.solve(), Ok(LpStatus::Optimal { .. }))
}

fn argmax<'a>(points: &'a [Vector], d: &Vector) -> &'a Vector {
    let mut best = &points[0];
    let mut bv = best.dot(d);
    for p in &points[1..] {
        let v = p.dot(d);
        if v > bv {
            bv = v;
            best = p;
        }
    }
    best
}

fn max_pairwise_distance(points: &[Vector]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

/// Diameter, flagged when only an upper bound could be computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub exact: bool,
}

/// A nonempty compact convex subset of ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    HPolytope(HPolytope),
    VPolytope(VPolytope),
}

fn check_finite(what: &str, xs: impl IntoIterator<Item = f64>) -> Result<()> {
    if xs.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("{what} has non-finite entries")))
    }
}

fn check_supported_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "dimension {n} is outside 1..={MAX_DIM}"
        )))
    }
}

impl ConvexBody {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        check_supported_dim(center.len())?;
        check_finite("ball center", center.iter().copied())?;
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody(format!("ball radius {radius} must be a nonnegative finite number")));
        }
        Ok(Self::Ball(Ball { center, radius }))
    }

    /// The unit ball `Bⁿ` at the origin.
    pub fn unit_ball(n: usize) -> Self {
        Self::Ball(Ball {
            center: Vector::zeros(n),
            radius: 1.0,
        })
    }

    pub fn ellipsoid(center: Vector, axes: OrthogonalMatrix, semiaxes: Vector) -> Result<Self> {
        let n = center.len();
        check_supported_dim(n)?;
        Error::check_dim(n, axes.dim())?;
        Error::check_dim(n, semiaxes.len())?;
        check_finite("ellipsoid center", center.iter().copied())?;
        if semiaxes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidBody("ellipsoid semiaxes must be strictly positive".into()));
        }
        let shape = axes.as_matrix() * Matrix::from_diagonal(&semiaxes);
        Ok(Self::Ellipsoid(Ellipsoid {
            center,
            axes,
            semiaxes,
            shape,
        }))
    }

    /// Axis-aligned ellipsoid with the given semiaxes.
    pub fn axis_ellipsoid(center: Vector, semiaxes: &[f64]) -> Result<Self> {
        let n = semiaxes.len();
        Self::ellipsoid(center, OrthogonalMatrix::identity(n), Vector::from_row_slice(semiaxes))
    }

    /// `center + S·Bⁿ`, poles of `SSᵀ` giving semiaxes and axes.
    fn ellipsoid_from_shape(center: Vector, shape: &Matrix) -> Result<Self> {
        let gram = SymMatrix::new(shape * shape.transpose())?;
        let (values, vectors) = eigendecompose(&gram)?;
        let semiaxes = values.map(|v| v.max(0.0).sqrt());
        if semiaxes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::SingularMap(0.0));
        }
        Self::ellipsoid(center, vectors, semiaxes)
    }

    /// Validates boundedness via the support function in all `2n`
    /// coordinate directions (an unbounded or empty input is an error).
    pub fn hpolytope(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        check_supported_dim(dim)?;
        for h in &halfspaces {
            Error::check_dim(dim, h.normal.len())?;
            check_finite("halfspace", h.normal.iter().copied().chain([h.offset]))?;
            if h.normal_norm() == 0.0 {
                return Err(Error::InvalidBody("halfspace normal is zero".into()));
            }
        }
        let mut lower = vec![0.0; dim];
        let mut upper = vec![0.0; dim];
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut d = Vector::zeros(dim);
                d[i] = sign;
                match HPolytope::support_lp(&halfspaces, dim, &d)? {
                    LpStatus::Optimal { value, .. } => {
                        if sign > 0.0 {
                            upper[i] = value;
                        } else {
                            lower[i] = -value;
                        }
                    }
                    LpStatus::Unbounded => {
                        return Err(Error::Unbounded(format!(
                            "{}e{}",
                            if sign > 0.0 { "+" } else { "-" },
                            i + 1
                        )))
                    }
                    LpStatus::Infeasible => {
                        return Err(Error::InvalidBody("halfspaces have empty intersection".into()))
                    }
                }
            }
        }
        let vertices = enumerate_vertices(dim, &halfspaces);
        Ok(Self::HPolytope(HPolytope {
            dim,
            halfspaces,
            bbox: BoxRegion::new(lower, upper),
            vertices,
        }))
    }

    pub fn vpolytope(vertices: Vec<Vector>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidBody("vertex list is empty".into()));
        };
        let n = first.len();
        check_supported_dim(n)?;
        for v in &vertices {
            Error::check_dim(n, v.len())?;
            check_finite("vertex", v.iter().copied())?;
        }
        let (facets, hull) = match n {
            1 => {
                let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
                (
                    Some(vec![Halfspace::new(vec![1.0], hi), Halfspace::new(vec![-1.0], -lo)]),
                    None,
                )
            }
            2 => {
                let hull = convex_hull_2d(&vertices);
                let facets = (hull.len() >= 3).then(|| {
                    (0..hull.len())
                        .map(|i| {
                            let a = &hull[i];
                            let b = &hull[(i + 1) % hull.len()];
                            let normal = vec![b[1] - a[1], a[0] - b[0]];
                            let offset = normal[0] * a[0] + normal[1] * a[1];
                            Halfspace::new(normal, offset)
                        })
                        .collect()
                });
                (facets, Some(hull))
            }
            _ => (None, None),
        };
        Ok(Self::VPolytope(VPolytope {
            vertices,
            facets,
            hull,
        }))
    }

    /// Polygon from `(x, y)` pairs.
    pub fn polygon(points: &[(f64, f64)]) -> Result<Self> {
        Self::vpolytope(points.iter().map(|&(x, y)| Vector::from_vec(vec![x, y])).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball(b) => b.center.len(),
            Self::Ellipsoid(e) => e.center.len(),
            Self::HPolytope(h) => h.dim,
            Self::VPolytope(v) => v.vertices[0].len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Ball(_) => "ball",
            Self::Ellipsoid(_) => "ellipsoid",
            Self::HPolytope(_) => "hpolytope",
            Self::VPolytope(_) => "vpolytope",
        }
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(self.contains_point(x))
    }

    /// Membership without the dimension check (hot Monte Carlo paths).
    pub(crate) fn contains_point(&self, x: &Vector) -> bool {
        match self {
            Self::Ball(b) => (x - &b.center).norm() <= b.radius * (1.0 + 1e-12) + 1e-15,
            Self::Ellipsoid(e) => {
                let y = e.local(x);
                let s: f64 = y
                    .iter()
                    .zip(e.semiaxes.iter())
                    .map(|(yi, ai)| (yi / ai).powi(2))
                    .sum();
                s <= 1.0 + 1e-12
            }
            Self::HPolytope(h) => h.contains(x),
            Self::VPolytope(v) => v.contains(x),
        }
    }

    /// A maximizer of `⟨x, d⟩` over the body.
    pub fn support_point(&self, d: &Vector) -> Vector {
        match self {
            Self::Ball(b) => {
                let n = d.norm();
                if n == 0.0 {
                    b.center.clone()
                } else {
                    &b.center + d * (b.radius / n)
                }
            }
            Self::Ellipsoid(e) => {
                let y = e.shape.transpose() * d;
                let n = y.norm();
                if n == 0.0 {
                    e.center.clone()
                } else {
                    &e.center + &e.shape * (y / n)
                }
            }
            Self::HPolytope(h) => h.support_point(d),
            Self::VPolytope(v) => argmax(&v.vertices, d).clone(),
        }
    }

    /// Support function `h(d) = max ⟨x, d⟩`.
    pub fn support_value(&self, d: &Vector) -> f64 {
        match self {
            Self::Ball(b) => b.center.dot(d) + b.radius * d.norm(),
            Self::Ellipsoid(e) => e.center.dot(d) + (e.shape.transpose() * d).norm(),
            _ => self.support_point(d).dot(d),
        }
    }

    pub fn bounding_box(&self) -> BoxRegion {
        let n = self.dim();
        match self {
            Self::Ball(b) => BoxRegion::new(
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            Self::Ellipsoid(e) => {
                let half: Vec<f64> = (0..n).map(|i| e.shape.row(i).norm()).collect();
                BoxRegion::new(
                    (0..n).map(|i| e.center[i] - half[i]).collect(),
                    (0..n).map(|i| e.center[i] + half[i]).collect(),
                )
            }
            Self::HPolytope(h) => match &h.vertices {
                Some(v) => vertex_box(v),
                None => h.bbox.clone(),
            },
            Self::VPolytope(v) => vertex_box(&v.vertices),
        }
    }

    /// Upper bound on `max_{x ∈ body} ‖x‖`, exact for balls and polytopes.
    pub fn origin_radius(&self) -> f64 {
        match self {
            Self::Ball(b) => b.center.norm() + b.radius,
            Self::Ellipsoid(e) => e.center.norm() + e.semiaxes.amax(),
            Self::HPolytope(h) => match &h.vertices {
                Some(v) => v.iter().map(|p| p.norm()).fold(0.0, f64::max),
                None => {
                    let b = &h.bbox;
                    b.lower
                        .iter()
                        .zip(&b.upper)
                        .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                        .sum::<f64>()
                        .sqrt()
                }
            },
            Self::VPolytope(v) => v.vertices.iter().map(|p| p.norm()).fold(0.0, f64::max),
        }
    }

    pub fn diameter(&self) -> Diameter {
        match self {
            Self::Ball(b) => Diameter {
                value: 2.0 * b.radius,
                exact: true,
            },
            Self::Ellipsoid(e) => Diameter {
                value: 2.0 * e.semiaxes.amax(),
                exact: true,
            },
            Self::HPolytope(h) => match &h.vertices {
                Some(v) => Diameter {
                    value: max_pairwise_distance(v),
                    exact: true,
                },
                None => Diameter {
                    value: h.bbox.diagonal(),
                    exact: false,
                },
            },
            Self::VPolytope(v) => Diameter {
                value: max_pairwise_distance(&v.vertices),
                exact: true,
            },
        }
    }

    /// Vertices of a polytope (enumerated ones for H-polytopes).
    pub fn vertices(&self) -> Option<&[Vector]> {
        match self {
            Self::HPolytope(h) => h.vertices(),
            Self::VPolytope(v) => Some(&v.vertices),
            _ => None,
        }
    }

    /// Euclidean distance from `x` to the body.
    pub fn distance_to_point(&self, x: &Vector) -> f64 {
        match self {
            Self::Ball(b) => ((x - &b.center).norm() - b.radius).max(0.0),
            Self::Ellipsoid(e) => e.distance_to(x),
            _ => {
                if self.contains_point(x) {
                    return 0.0;
                }
                gjk::closest_to_origin(
                    |d| self.support_point(d) - x,
                    &Vector::zeros(x.len()),
                    Mode::Distance,
                    0.0,
                )
                .distance()
            }
        }
    }

    /// Exact volume where a closed form or exact formula is available.
    pub fn exact_volume(&self) -> Option<f64> {
        let n = self.dim();
        match self {
            Self::Ball(b) => Some(unit_ball_volume(n) * b.radius.powi(n as i32)),
            Self::Ellipsoid(e) => Some(unit_ball_volume(n) * e.semiaxes.iter().product::<f64>()),
            _ if n == 1 => {
                let b = self.bounding_box();
                Some(b.upper[0] - b.lower[0])
            }
            _ if n == 2 => {
                let hull = match self {
                    Self::VPolytope(v) => v.hull.clone()?,
                    _ => convex_hull_2d(self.vertices()?),
                };
                Some(polygon_area(&hull))
            }
            _ => None,
        }
    }

    /// Exact image under an affine map (see module docs for the types).
    pub fn affine_image(&self, map: &AffineMap) -> Result<ConvexBody> {
        Error::check_dim(self.dim(), map.dim())?;
        let f = map.linear_part();
        match self {
            Self::Ball(b) => {
                let center = map.apply(&b.center);
                if let Some(s) = map.similarity_scale() {
                    return Self::ball(center, s * b.radius);
                }
                if b.radius == 0.0 {
                    return Self::ball(center, 0.0);
                }
                Self::ellipsoid_from_shape(center, &(f * b.radius))
            }
            Self::Ellipsoid(e) => Self::ellipsoid_from_shape(map.apply(&e.center), &(f * &e.shape)),
            Self::HPolytope(h) => {
                let inv_t = map.inverse_transpose();
                let t = map.translation_part();
                let halfspaces = h
                    .halfspaces
                    .iter()
                    .map(|hs| {
                        let u = &inv_t * hs.normal_vec();
                        Halfspace::new(u.iter().copied().collect(), hs.offset + u.dot(t))
                    })
                    .collect();
                let vertices = h
                    .vertices
                    .as_ref()
                    .map(|v| v.iter().map(|p| map.apply(p)).collect::<Vec<_>>());
                let bbox = match &vertices {
                    Some(v) => vertex_box(v),
                    None => return Self::hpolytope(h.dim, halfspaces),
                };
                Ok(Self::HPolytope(HPolytope {
                    dim: h.dim,
                    halfspaces,
                    bbox,
                    vertices,
                }))
            }
            Self::VPolytope(v) => Self::vpolytope(v.vertices.iter().map(|p| map.apply(p)).collect()),
        }
    }

    pub fn translate(&self, t: &Vector) -> Result<ConvexBody> {
        self.affine_image(&AffineMap::translation(t.clone()))
    }

    /// Reflection through the origin, `−K`.
    pub fn reflect(&self) -> Result<ConvexBody> {
        let n = self.dim();
        self.affine_image(&AffineMap::linear(-Matrix::identity(n, n))?)
    }

    /// Scaling about the origin, `λK`.
    pub fn scale(&self, lambda: f64) -> Result<ConvexBody> {
        let n = self.dim();
        if lambda <= 0.0 {
            return Err(Error::OutOfRange(format!("scale factor {lambda} must be positive")));
        }
        self.affine_image(&AffineMap::linear(Matrix::identity(n, n) * lambda)?)
    }
}

pub(crate) fn unit_ball_volume(n: usize) -> f64 {
    // κₙ by the two-step recurrence κₙ = 2π/n · κₙ₋₂.
    let mut k = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut m = if n.is_multiple_of(2) { 0 } else { 1 };
    while m < n {
        m += 2;
        k *= 2.0 * PI / m as f64;
    }
    k
}

fn vertex_box(v: &[Vector]) -> BoxRegion {
    let n = v[0].len();
    let mut lower = vec![f64::INFINITY; n];
    let mut upper = vec![f64::NEG_INFINITY; n];
    for p in v {
        for i in 0..n {
            lower[i] = lower[i].min(p[i]);
            upper[i] = upper[i].max(p[i]);
        }
    }
    BoxRegion::new(lower, upper)
}

/// Vertices from all `n`-subsets of facets whose solution is feasible.
fn enumerate_vertices(dim: usize, halfspaces: &[Halfspace]) -> Option<Vec<Vector>> {
    let m = halfspaces.len();
    if binomial(m, dim) > MAX_VERTEX_BASES {
        return None;
    }
    let mut out: Vec<Vector> = Vec::new();
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let a = Matrix::from_fn(dim, dim, |r, c| halfspaces[idx[r]].normal[c]);
        let b = Vector::from_iterator(dim, idx.iter().map(|&i| halfspaces[i].offset));
        if let Some(x) = a.lu().solve(&b) {
            let scale = 1.0 + x.amax();
            let feasible = x.iter().all(|v| v.is_finite())
                && halfspaces.iter().all(|h| h.contains(&x, FEASIBILITY_TOL * scale));
            if feasible && !out.iter().any(|p| (p - &x).amax() <= 1e-9 * scale) {
                out.push(x);
            }
        }
        // Next combination in lexicographic order.
        let mut i = dim;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            if idx[i] < m - dim + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..dim {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    fn unit_square() -> ConvexBody {
        HPolytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let b = ConvexBody::unit_ball(2);
        assert!(b.contains(&v(&[0.0, 0.0])).unwrap());
        assert!(!b.contains(&v(&[2.0, 0.0])).unwrap());
        assert!(unit_square().contains(&v(&[0.5, 0.5])).unwrap());
        assert!(matches!(b.contains(&v(&[0.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn vpolytope_membership_by_lp_in_three_dimensions() {
        let tet = ConvexBody::vpolytope(vec![
            v(&[0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        assert!(tet.contains(&v(&[0.2, 0.2, 0.2])).unwrap());
        assert!(!tet.contains(&v(&[0.5, 0.5, 0.5])).unwrap());
    }

    #[test]
    fn unbounded_and_empty_hpolytopes_are_rejected() {
        let half = vec![Halfspace::new(vec![1.0, 0.0], 1.0)];
        assert!(matches!(ConvexBody::hpolytope(2, half), Err(Error::Unbounded(_))));
        let empty = vec![
            Halfspace::new(vec![1.0], 0.0),
            Halfspace::new(vec![-1.0], -1.0),
        ];
        assert!(matches!(ConvexBody::hpolytope(1, empty), Err(Error::InvalidBody(_))));
    }

    #[test]
    fn ellipsoid_invariants_are_checked() {
        let bad = ConvexBody::axis_ellipsoid(v(&[0.0, 0.0]), &[1.0, 0.0]);
        assert!(bad.is_err());
        assert!(ConvexBody::ball(v(&[0.0]), -1.0).is_err());
        assert!(ConvexBody::vpolytope(vec![]).is_err());
    }

    #[test]
    fn affine_images() {
        let b = ConvexBody::unit_ball(2);
        let t = v(&[1.0, -2.0]);
        let moved = b.affine_image(&AffineMap::translation(t.clone())).unwrap();
        match moved {
            ConvexBody::Ball(ball) => {
                assert_eq!(ball.center(), &t);
                assert_eq!(ball.radius(), 1.0);
            }
            other => panic!("expected ball, got {other:?}"),
        }

        let scaled = b
            .affine_image(&AffineMap::linear(Matrix::from_diagonal(&v(&[2.0, 3.0]))).unwrap())
            .unwrap();
        match scaled {
            ConvexBody::Ellipsoid(e) => {
                assert!((e.semiaxes()[0] - 3.0).abs() < 1e-12);
                assert!((e.semiaxes()[1] - 2.0).abs() < 1e-12);
                assert!(e.axes().as_matrix()[(1, 0)].abs() > 1.0 - 1e-12);
            }
            other => panic!("expected ellipsoid, got {other:?}"),
        }

        let rot = OrthogonalMatrix::rotation2(std::f64::consts::FRAC_PI_2);
        let sq = unit_square().affine_image(&AffineMap::linear(rot.as_matrix().clone()).unwrap()).unwrap();
        let mut got: Vec<(f64, f64)> = sq
            .vertices()
            .unwrap()
            .iter()
            .map(|p| ((p[0] * 1e9).round() / 1e9 + 0.0, (p[1] * 1e9).round() / 1e9 + 0.0))
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, vec![(-1.0, 0.0), (-1.0, 1.0), (0.0, 0.0), (0.0, 1.0)]);
        // The transformed halfspaces agree with the transformed vertices.
        assert!(sq.contains(&v(&[-0.5, 0.5])).unwrap());
        assert!(!sq.contains(&v(&[0.5, 0.5])).unwrap());
    }

    #[test]
    fn singular_maps_are_rejected() {
        assert!(matches!(
            AffineMap::linear(Matrix::zeros(2, 2)),
            Err(Error::SingularMap(_))
        ));
    }

    #[test]
    fn diameters() {
        assert_eq!(ConvexBody::ball(v(&[3.0, 1.0]), 1.0).unwrap().diameter().value, 2.0);
        let cube = HPolytope::cuboid(&[0.0; 3], &[1.0; 3]).unwrap();
        let d = cube.diameter();
        assert!(d.exact && (d.value - 3f64.sqrt()).abs() < 1e-12);
        let e = ConvexBody::axis_ellipsoid(v(&[0.0, 0.0]), &[0.3f64.exp(), 1.2f64.exp()]).unwrap();
        assert!((e.diameter().value - 2.0 * 1.2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_hpolytope_is_a_segment() {
        let seg = HPolytope::cuboid(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(seg.vertices().unwrap().len(), 2);
        assert_eq!(seg.exact_volume(), Some(0.0));
    }

    #[test]
    fn support_and_distance() {
        let e = ConvexBody::axis_ellipsoid(v(&[0.0, 0.0]), &[2.0, 1.0]).unwrap();
        assert!((e.support_value(&v(&[1.0, 0.0])) - 2.0).abs() < 1e-15);
        assert!((e.distance_to_point(&v(&[5.0, 0.0])) - 3.0).abs() < 1e-12);
        assert!((e.distance_to_point(&v(&[0.0, 4.0])) - 3.0).abs() < 1e-12);
        assert_eq!(e.distance_to_point(&v(&[1.0, 0.5])), 0.0);

        let sq = unit_square();
        assert!((sq.distance_to_point(&v(&[2.0, 2.0])) - 2f64.sqrt()).abs() < 1e-9);
        assert!((sq.distance_to_point(&v(&[0.5, -3.0])) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn ellipsoid_distance_matches_dense_boundary_scan() {
        let e = ConvexBody::axis_ellipsoid(v(&[0.5, -0.2]), &[1.7, 0.4]).unwrap();
        let p = v(&[2.5, 1.3]);
        let scan = (0..200_000)
            .map(|k| {
                let th = k as f64 / 200_000.0 * std::f64::consts::TAU;
                let q = v(&[0.5 + 1.7 * th.cos(), -0.2 + 0.4 * th.sin()]);
                (q - &p).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((e.distance_to_point(&p) - scan).abs() < 1e-8);
    }

    #[test]
    fn kappa_recurrence() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }
}
