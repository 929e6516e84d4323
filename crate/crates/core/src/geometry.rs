//! Computational geometry in R^2 and R^3.
//!
//! Everything here is a pure function over immutable inputs. Points carry
//! their dimension at runtime; only `n = 2` and `n = 3` are supported.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::AgentId;

/// Largest supported workspace dimension.
pub const MAX_DIM: usize = 3;

/// Points on a simplex face count as inside with this tolerance.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Relative determinant threshold below which a simplex is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unsupported dimension {0}; only 2 and 3 are supported")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate simplex (|det| = {det:e}, threshold {threshold:e})")]
    DegenerateSimplex { det: f64, threshold: f64 },
}

/// A point in R^n, `n` in {2, 3}.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self, GeometryError> {
        if coords.len() != 2 && coords.len() != 3 {
            return Err(GeometryError::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: c,
            dim: coords.len() as u8,
        })
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Self {
            coords: [x, y, 0.0],
            dim: 2,
        }
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self {
            coords: [x, y, z],
            dim: 3,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim == 2 || dim == 3);
        Self {
            coords: [0.0; MAX_DIM],
            dim: dim as u8,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    #[inline]
    pub fn coords_mut(&mut self) -> &mut [f64] {
        let d = self.dim();
        &mut self.coords[..d]
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.coords[2]
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }

    /// Lexicographic total order on coordinates.
    pub fn total_cmp(&self, other: &Point) -> std::cmp::Ordering {
        for (a, b) in self.coords().iter().zip(other.coords()) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        self.dim.cmp(&other.dim)
    }

    /// Scale `self` about `center` by `factor`.
    pub fn scaled_about(&self, center: &Point, factor: f64) -> Point {
        *center + (*self - *center) * factor
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.coords().iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = GeometryError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Point::new(&v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords().to_vec()
    }
}

impl Add for Point {
    type Output = Point;

    fn add(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..MAX_DIM {
            self.coords[k] += rhs.coords[k];
        }
        self
    }
}

impl Sub for Point {
    type Output = Point;

    fn sub(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..MAX_DIM {
            self.coords[k] -= rhs.coords[k];
        }
        self
    }
}

impl Mul<f64> for Point {
    type Output = Point;

    fn mul(mut self, rhs: f64) -> Point {
        for c in self.coords.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

/// Arithmetic mean of a non-empty point list.
pub fn mean(points: &[Point]) -> Option<Point> {
    let first = points.first()?;
    let mut acc = Point::zeros(first.dim());
    for p in points {
        acc = acc + *p;
    }
    Some(acc * (1.0 / points.len() as f64))
}

/// `Σ w_k · p_k`.
pub fn combine(weights: &[f64], points: &[Point]) -> Point {
    debug_assert_eq!(weights.len(), points.len());
    let mut acc = Point::zeros(points[0].dim());
    for (w, p) in weights.iter().zip(points) {
        acc = acc + *p * *w;
    }
    acc
}

/// An n-simplex: `n + 1` affinely independent vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertex_ids: Vec<AgentId>,
    pub vertex_points: Vec<Point>,
}

impl Simplex {
    pub fn new(vertex_ids: Vec<AgentId>, vertex_points: Vec<Point>) -> Result<Self, GeometryError> {
        if vertex_ids.len() != vertex_points.len() {
            return Err(GeometryError::DegenerateInput(format!(
                "{} ids for {} vertices",
                vertex_ids.len(),
                vertex_points.len()
            )));
        }
        check_simplex(&vertex_points)?;
        Ok(Self {
            vertex_ids,
            vertex_points,
        })
    }

    /// Simplex with vertex ids `0..=n`.
    pub fn from_points(points: Vec<Point>) -> Result<Self, GeometryError> {
        let ids = (0..points.len() as u32).map(AgentId).collect();
        Self::new(ids, points)
    }

    pub fn dim(&self) -> usize {
        self.vertex_points[0].dim()
    }

    /// Unsigned n-volume (area in 2-D).
    pub fn volume(&self) -> f64 {
        let n = self.dim();
        let det = augmented_det(&self.vertex_points).abs();
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        det / fact
    }

    pub fn centroid(&self) -> Point {
        mean(&self.vertex_points).expect("simplex has vertices")
    }
}

/// Unit-sum barycentric weights, one per simplex vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricCoords(pub Vec<f64>);

impl BarycentricCoords {
    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_inside(&self, tol: f64) -> bool {
        self.0.iter().all(|w| *w >= -tol)
    }
}

/// Square system of size at most `MAX_DIM + 1`, solved by Gaussian
/// elimination with partial pivoting. Returns the solution and the
/// determinant of the original matrix.
fn solve_small(mut a: [[f64; MAX_DIM + 1]; MAX_DIM + 1], mut b: [f64; MAX_DIM + 1], m: usize) -> (Option<[f64; MAX_DIM + 1]>, f64) {
    let mut det = 1.0;
    for col in 0..m {
        let mut piv = col;
        for row in col + 1..m {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col] == 0.0 {
            return (None, 0.0);
        }
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..m {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = [0.0; MAX_DIM + 1];
    for row in (0..m).rev() {
        let mut s = b[row];
        for k in row + 1..m {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    (Some(x), det)
}

fn augmented(vertices: &[Point]) -> ([[f64; MAX_DIM + 1]; MAX_DIM + 1], usize) {
    let n = vertices[0].dim();
    let mut a = [[0.0; MAX_DIM + 1]; MAX_DIM + 1];
    for (col, v) in vertices.iter().enumerate() {
        for row in 0..n {
            a[row][col] = v.coords[row];
        }
        a[n][col] = 1.0;
    }
    (a, n + 1)
}

/// Determinant of the `(n+1) × (n+1)` augmented vertex matrix
/// `[v_1 … v_{n+1}; 1 … 1]`.
pub fn augmented_det(vertices: &[Point]) -> f64 {
    let (a, m) = augmented(vertices);
    solve_small(a, [0.0; MAX_DIM + 1], m).1
}

fn degeneracy_threshold(vertices: &[Point]) -> f64 {
    let n = vertices[0].dim() as i32;
    let scale = vertices.iter().fold(0.0_f64, |m, v| m.max(v.max_abs()));
    DEGENERACY_TOL * scale.powi(n)
}

fn check_simplex(vertices: &[Point]) -> Result<(), GeometryError> {
    let Some(first) = vertices.first() else {
        return Err(GeometryError::DegenerateInput("empty simplex".into()));
    };
    let n = first.dim();
    if vertices.len() != n + 1 {
        return Err(GeometryError::DegenerateInput(format!(
            "{} vertices for a {n}-simplex",
            vertices.len()
        )));
    }
    if let Some(v) = vertices.iter().find(|v| v.dim() != n) {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    let det = augmented_det(vertices);
    let threshold = degeneracy_threshold(vertices);
    if !(det.abs() >= threshold) || det == 0.0 {
        return Err(GeometryError::DegenerateSimplex { det, threshold });
    }
    Ok(())
}

/// Barycentric weights of `point` with respect to `vertices` by a direct solve
/// of the augmented system `[V; 1ᵀ] w = [point; 1]`.
pub fn barycentric_weights(vertices: &[Point], point: &Point) -> Result<Vec<f64>, GeometryError> {
    check_simplex(vertices)?;
    let n = vertices[0].dim();
    if point.dim() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: point.dim(),
        });
    }
    let (a, m) = augmented(vertices);
    let mut b = [0.0; MAX_DIM + 1];
    b[..n].copy_from_slice(point.coords());
    b[n] = 1.0;
    match solve_small(a, b, m) {
        (Some(x), _) => Ok(x[..m].to_vec()),
        (None, det) => Err(GeometryError::DegenerateSimplex {
            det,
            threshold: degeneracy_threshold(vertices),
        }),
    }
}

pub fn barycentric(point: &Point, simplex: &Simplex) -> Result<BarycentricCoords, GeometryError> {
    barycentric_weights(&simplex.vertex_points, point).map(BarycentricCoords)
}

pub fn contains(simplex: &Simplex, point: &Point, tol: f64) -> Result<bool, GeometryError> {
    Ok(barycentric(point, simplex)?.is_inside(tol))
}

/// Same as [`contains`] on a raw vertex list.
pub fn contains_points(vertices: &[Point], point: &Point, tol: f64) -> Result<bool, GeometryError> {
    Ok(barycentric_weights(vertices, point)?.iter().all(|w| *w >= -tol))
}

fn cross2(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x())
}

fn check_dims(points: &[Point]) -> Result<usize, GeometryError> {
    let n = points
        .first()
        .ok_or_else(|| GeometryError::DegenerateInput("no points".into()))?
        .dim();
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    Ok(n)
}

fn scale_of(points: &[Point]) -> f64 {
    points.iter().fold(0.0_f64, |m, p| m.max(p.max_abs())).max(1.0)
}

/// Indices of the convex-hull vertices.
///
/// In 2-D the indices are in counterclockwise order starting from the
/// lexicographically smallest point; collinear points on hull edges are not
/// vertices. In 3-D they are returned in ascending index order.
pub fn convex_hull(points: &[Point]) -> Result<Vec<usize>, GeometryError> {
    match check_dims(points)? {
        2 => convex_hull_2d(points),
        3 => {
            let facets = hull_facets_3d(points)?;
            let mut ids: Vec<usize> = facets.iter().flatten().copied().collect();
            ids.sort_unstable();
            ids.dedup();
            Ok(ids)
        }
        d => Err(GeometryError::UnsupportedDimension(d)),
    }
}

fn convex_hull_2d(points: &[Point]) -> Result<Vec<usize>, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::DegenerateInput(format!(
            "{} points cannot span the plane",
            points.len()
        )));
    }
    let eps = 1e-12 * scale_of(points).powi(2);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]).then(a.cmp(&b)));
    order.dedup_by(|a, b| points[*a] == points[*b]);

    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross2(&points[hull[hull.len() - 2]], &points[hull[hull.len() - 1]], &points[i]) <= eps
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(GeometryError::DegenerateInput("all points are collinear".into()));
    }
    Ok(hull)
}

/// Outward-oriented triangular facets of the 3-D convex hull, as index
/// triples. Coplanar faces are fan-triangulated over their own 2-D hull.
pub fn hull_facets_3d(points: &[Point]) -> Result<Vec<[usize; 3]>, GeometryError> {
    let n = check_dims(points)?;
    if n != 3 {
        return Err(GeometryError::DimensionMismatch { expected: 3, got: n });
    }
    if points.len() < 4 {
        return Err(GeometryError::DegenerateInput(format!(
            "{} points cannot span space",
            points.len()
        )));
    }
    let scale = scale_of(points);
    let eps = 1e-10 * scale;
    let interior = mean(points).expect("non-empty");

    // supporting planes found so far, as (unit normal, offset)
    let mut planes: Vec<(Point, f64)> = Vec::new();
    let mut facets = Vec::new();
    let m = points.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let u = points[j] - points[i];
                let v = points[k] - points[i];
                let c = cross3(&u, &v);
                let len = c.norm();
                if len <= 1e-12 * scale * scale {
                    continue;
                }
                let mut normal = c * (1.0 / len);
                let mut offset = normal.dot(&points[i]);
                if normal.dot(&interior) > offset {
                    normal = normal * -1.0;
                    offset = -offset;
                }
                if points.iter().any(|p| normal.dot(p) - offset > eps) {
                    continue;
                }
                if planes
                    .iter()
                    .any(|(nn, oo)| nn.distance(&normal) < 1e-9 && (oo - offset).abs() < eps)
                {
                    continue;
                }
                planes.push((normal, offset));
                let on_plane: Vec<usize> = (0..m)
                    .filter(|&q| (normal.dot(&points[q]) - offset).abs() <= eps)
                    .collect();
                facets.extend(triangulate_face(points, &on_plane, &normal));
            }
        }
    }
    if facets.is_empty() {
        return Err(GeometryError::DegenerateInput("all points are coplanar".into()));
    }
    Ok(facets)
}

fn cross3(a: &Point, b: &Point) -> Point {
    Point::xyz(
        a.y() * b.z() - a.z() * b.y(),
        a.z() * b.x() - a.x() * b.z(),
        a.x() * b.y() - a.y() * b.x(),
    )
}

/// Fan-triangulate a planar convex face so that triangles wind
/// counterclockwise about `normal`.
fn triangulate_face(points: &[Point], on_plane: &[usize], normal: &Point) -> Vec<[usize; 3]> {
    // in-plane basis
    let seed = if normal.x().abs() < 0.9 {
        Point::xyz(1.0, 0.0, 0.0)
    } else {
        Point::xyz(0.0, 1.0, 0.0)
    };
    let e1 = {
        let c = cross3(normal, &seed);
        c * (1.0 / c.norm())
    };
    let e2 = cross3(normal, &e1);
    let projected: Vec<Point> = on_plane
        .iter()
        .map(|&q| Point::xy(points[q].dot(&e1), points[q].dot(&e2)))
        .collect();
    let Ok(ring) = convex_hull_2d(&projected) else {
        return Vec::new();
    };
    let ring: Vec<usize> = ring.into_iter().map(|r| on_plane[r]).collect();
    (1..ring.len() - 1)
        .map(|k| [ring[0], ring[k], ring[k + 1]])
        .collect()
}

/// Signed area of a 2-D polygon (positive when counterclockwise).
pub fn polygon_signed_area(vertices: &[Point]) -> f64 {
    let m = vertices.len();
    (0..m)
        .map(|k| {
            let a = &vertices[k];
            let b = &vertices[(k + 1) % m];
            a.x() * b.y() - b.x() * a.y()
        })
        .sum::<f64>()
        / 2.0
}

/// Area centroid of a non-degenerate 2-D polygon.
pub fn polygon_centroid(vertices: &[Point]) -> Option<Point> {
    let area = polygon_signed_area(vertices);
    if area.abs() < f64::EPSILON * scale_of(vertices).powi(2) {
        return None;
    }
    let m = vertices.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for k in 0..m {
        let a = &vertices[k];
        let b = &vertices[(k + 1) % m];
        let cr = a.x() * b.y() - b.x() * a.y();
        cx += (a.x() + b.x()) * cr;
        cy += (a.y() + b.y()) * cr;
    }
    Some(Point::xy(cx / (6.0 * area), cy / (6.0 * area)))
}

/// Distance from `p` to segment `[a, b]`.
pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((*p - *a).dot(&ab) / len2).clamp(0.0, 1.0);
    p.distance(&(*a + ab * t))
}

/// Even-odd point-in-polygon test; points within `tol` of an edge count
/// as inside.
pub fn point_in_polygon(p: &Point, vertices: &[Point], tol: f64) -> bool {
    let m = vertices.len();
    let mut inside = false;
    for k in 0..m {
        let a = &vertices[k];
        let b = &vertices[(k + 1) % m];
        if segment_distance(p, a, b) <= tol {
            return true;
        }
        if (a.y() > p.y()) != (b.y() > p.y()) {
            let x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if p.x() < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// A convex polytope stored as outward half-spaces `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    pub vertices: Vec<Point>,
    halfspaces: Vec<(Point, f64)>,
}

impl ConvexPolytope {
    /// Convex hull of `points` as a polytope.
    pub fn hull_of(points: &[Point]) -> Result<Self, GeometryError> {
        let n = check_dims(points)?;
        match n {
            2 => {
                let ring = convex_hull_2d(points)?;
                let vertices: Vec<Point> = ring.iter().map(|&i| points[i]).collect();
                let m = vertices.len();
                let halfspaces = (0..m)
                    .map(|k| {
                        let a = vertices[k];
                        let b = vertices[(k + 1) % m];
                        let e = b - a;
                        let normal = Point::xy(e.y(), -e.x());
                        let normal = normal * (1.0 / normal.norm());
                        (normal, normal.dot(&a))
                    })
                    .collect();
                Ok(Self {
                    vertices,
                    halfspaces,
                })
            }
            3 => {
                let facets = hull_facets_3d(points)?;
                let mut ids: Vec<usize> = facets.iter().flatten().copied().collect();
                ids.sort_unstable();
                ids.dedup();
                let halfspaces = facets
                    .iter()
                    .map(|f| {
                        let c = cross3(&(points[f[1]] - points[f[0]]), &(points[f[2]] - points[f[0]]));
                        let normal = c * (1.0 / c.norm());
                        (normal, normal.dot(&points[f[0]]))
                    })
                    .collect();
                Ok(Self {
                    vertices: ids.iter().map(|&i| points[i]).collect(),
                    halfspaces,
                })
            }
            d => Err(GeometryError::UnsupportedDimension(d)),
        }
    }

    /// Largest signed distance to a bounding hyperplane; negative inside.
    pub fn signed_distance(&self, p: &Point) -> f64 {
        self.halfspaces
            .iter()
            .map(|(nrm, off)| nrm.dot(p) - off)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.signed_distance(p) <= tol
    }

    pub fn strictly_contains(&self, p: &Point, tol: f64) -> bool {
        self.signed_distance(p) < -tol
    }

    /// Smallest `t > 0` with `origin + t·dir` on the boundary, for an
    /// `origin` inside the polytope.
    pub fn ray_exit(&self, origin: &Point, dir: &Point) -> Option<f64> {
        self.halfspaces
            .iter()
            .filter_map(|(nrm, off)| {
                let rate = nrm.dot(dir);
                (rate > 0.0).then(|| (off - nrm.dot(origin)) / rate)
            })
            .fold(None, |best: Option<f64>, t| Some(best.map_or(t, |b| b.min(t))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Simplex {
        Simplex::from_points(vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn hull_of_square_excludes_centroid() {
        let pts = vec![
            Point::xy(0.0, 0.0),
            Point::xy(1.0, 0.0),
            Point::xy(1.0, 1.0),
            Point::xy(0.0, 1.0),
            Point::xy(0.5, 0.5),
        ];
        let mut h = convex_hull(&pts).unwrap();
        assert_eq!(h, vec![0, 1, 2, 3]);
        h.sort();
        assert!(!h.contains(&4));
    }

    #[test]
    fn hull_of_three_points() {
        let pts = vec![Point::xy(0.0, 0.0), Point::xy(2.0, 1.0), Point::xy(0.5, 3.0)];
        assert_eq!(convex_hull(&pts).unwrap().len(), 3);
    }

    #[test]
    fn hull_rejects_collinear() {
        let pts: Vec<Point> = (0..5).map(|k| Point::xy(k as f64, 2.0 * k as f64)).collect();
        assert!(matches!(convex_hull(&pts), Err(GeometryError::DegenerateInput(_))));
    }

    #[test]
    fn hull_skips_edge_midpoints() {
        let pts = vec![
            Point::xy(0.0, 0.0),
            Point::xy(0.5, 0.0),
            Point::xy(1.0, 0.0),
            Point::xy(0.0, 1.0),
        ];
        assert_eq!(convex_hull(&pts).unwrap(), vec![0, 2, 3]);
    }

    #[test]
    fn barycentric_centroid_and_vertices() {
        let s = tri();
        let w = barycentric(&s.centroid(), &s).unwrap();
        for x in w.weights() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        for (k, v) in s.vertex_points.iter().enumerate() {
            let w = barycentric(v, &s).unwrap();
            for (j, x) in w.weights().iter().enumerate() {
                assert_eq!(*x, if j == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn barycentric_quarter_point() {
        let w = barycentric(&Point::xy(0.25, 0.25), &tri()).unwrap();
        let expected = [0.5, 0.25, 0.25];
        for (a, b) in w.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let r = Simplex::from_points(vec![Point::xy(0.0, 0.0), Point::xy(1.0, 1.0), Point::xy(2.0, 2.0)]);
        assert!(matches!(r, Err(GeometryError::DegenerateSimplex { .. })));
    }

    #[test]
    fn containment_conventions() {
        let s = tri();
        assert!(contains(&s, &s.centroid(), BOUNDARY_TOL).unwrap());
        assert!(!contains(&s, &Point::xy(2.0, 2.0), BOUNDARY_TOL).unwrap());
        assert!(contains(&s, &Point::xy(0.5, 0.5), BOUNDARY_TOL).unwrap());
        assert!(contains(&s, &Point::xy(0.3, 0.0), BOUNDARY_TOL).unwrap());
        assert!(!contains(&s, &Point::xy(0.3, -1e-6), BOUNDARY_TOL).unwrap());
    }

    #[test]
    fn tetrahedron_volume_and_barycentric() {
        let s = Simplex::from_points(vec![
            Point::xyz(0.0, 0.0, 0.0),
            Point::xyz(1.0, 0.0, 0.0),
            Point::xyz(0.0, 1.0, 0.0),
            Point::xyz(0.0, 0.0, 1.0),
        ])
        .unwrap();
        assert!((s.volume() - 1.0 / 6.0).abs() < 1e-15);
        let w = barycentric(&Point::xyz(0.25, 0.25, 0.25), &s).unwrap();
        for x in w.weights() {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn cube_hull_3d() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(Point::xyz(x, y, z));
                }
            }
        }
        pts.push(Point::xyz(0.5, 0.5, 0.5));
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull, (0..8).collect::<Vec<_>>());
        let facets = hull_facets_3d(&pts).unwrap();
        // 6 square faces, 2 triangles each
        assert_eq!(facets.len(), 12);
        let poly = ConvexPolytope::hull_of(&pts).unwrap();
        assert!(poly.strictly_contains(&Point::xyz(0.5, 0.5, 0.5), 1e-9));
        assert!(!poly.contains(&Point::xyz(1.5, 0.5, 0.5), 1e-9));
        // facet tetrahedra around the center tile the cube
        let c = Point::xyz(0.5, 0.5, 0.5);
        let vol: f64 = facets
            .iter()
            .map(|f| {
                Simplex::from_points(vec![pts[f[0]], pts[f[1]], pts[f[2]], c])
                    .unwrap()
                    .volume()
            })
            .sum();
        assert!((vol - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_helpers() {
        let sq = vec![
            Point::xy(-0.5, -0.5),
            Point::xy(0.5, -0.5),
            Point::xy(0.5, 0.5),
            Point::xy(-0.5, 0.5),
        ];
        assert!((polygon_signed_area(&sq) - 1.0).abs() < 1e-15);
        assert_eq!(polygon_centroid(&sq).unwrap(), Point::xy(0.0, 0.0));
        assert!(point_in_polygon(&Point::xy(0.5, 0.0), &sq, 1e-12));
        assert!(!point_in_polygon(&Point::xy(0.51, 0.0), &sq, 1e-12));
    }

    #[test]
    fn point_serde_is_a_plain_list() {
        let p = Point::xy(1.5, -2.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let q: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Point>("[1.0]").is_err());
    }
}
