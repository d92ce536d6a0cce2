//! Planar geometry: points, convex polygons, half-plane clipping and
//! Voronoi partitions bounded by a convex domain.
//!
//! Everything here works in plain `f64`. Vertices closer than
//! [`VERTEX_TOLERANCE`] are merged, and vertices that are collinear with
//! their neighbours (within the same tolerance) are dropped, so a valid
//! [`ConvexPolygon`] is always strictly convex and counter-clockwise.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for merging vertices and detecting collinearity.
pub const VERTEX_TOLERANCE: f64 = 1e-12;

/// Minimum length for a shared edge to make two sites neighbours.
pub const NEIGHBOR_EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn l1(self) -> f64 {
        self.x.abs() + self.y.abs()
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    #[inline]
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// A strictly convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates and normalizes a vertex list.
    ///
    /// Clockwise input is reversed; duplicate and collinear vertices are
    /// removed. Fails if fewer than three vertices survive or the outline
    /// is not convex.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut vertices = simplify(vertices);
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) <= VERTEX_TOLERANCE {
                return Err(Error::NotConvex);
            }
        }
        // Turning left at every vertex is not enough on its own: a star
        // polygon also does that. The total turn of a simple convex outline
        // is exactly one revolution.
        let winding: f64 = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                let (u, v) = (b - a, c - b);
                u.cross(v).atan2(u.dot(v))
            })
            .sum();
        if (winding - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::NotConvex);
        }
        Ok(ConvexPolygon { vertices })
    }

    /// Builds from output of a clipping routine, which is convex by
    /// construction. Returns `None` when nothing of positive area is left.
    fn from_clipped(vertices: Vec<Point>) -> Option<Self> {
        let vertices = simplify(vertices);
        if vertices.len() < 3 || signed_area(&vertices) <= 0.0 {
            return None;
        }
        Some(ConvexPolygon { vertices })
    }

    pub fn rectangle(min: Point, max: Point) -> Result<Self> {
        ConvexPolygon::new(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    pub fn unit_square() -> Self {
        ConvexPolygon::rectangle(Point::new(0.0, 0.0), Point::new(1.0, 1.0))
            .expect("unit square is valid")
    }

    /// Regular polygon with `n` vertices on a circle.
    pub fn regular(center: Point, radius: f64, n: usize) -> Result<Self> {
        let verts = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                center + Point::new(t.cos(), t.sin()) * radius
            })
            .collect();
        ConvexPolygon::new(verts)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` pairs in counter-clockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        polygon_area_centroid(self).1
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut min = self.vertices[0];
        let mut max = self.vertices[0];
        for p in &self.vertices[1..] {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        BoundingBox { min, max }
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0_f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    /// Closed containment test with absolute slack `tol`.
    pub fn contains(&self, q: Point, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            // Signed distance of q to the left of edge a->b.
            e.cross(q - a) / e.norm() >= -tol
        })
    }

    pub fn translated(&self, v: Point) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
        }
    }

    /// Keeps the part of the polygon where `normal · q <= offset`.
    pub fn clip_line(&self, normal: Point, offset: f64) -> Option<ConvexPolygon> {
        let n = self.vertices.len();
        let side: Vec<f64> = self
            .vertices
            .iter()
            .map(|&p| normal.dot(p) - offset)
            .collect();
        if side.iter().all(|&s| s <= 0.0) {
            return Some(self.clone());
        }
        if side.iter().all(|&s| s >= 0.0) {
            return None;
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q) = (self.vertices[i], self.vertices[j]);
            let (sp, sq) = (side[i], side[j]);
            if sp <= 0.0 {
                out.push(p);
            }
            if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
                out.push(p.lerp(q, sp / (sp - sq)));
            }
        }
        ConvexPolygon::from_clipped(out)
    }

    /// Intersection with an axis-aligned rectangle.
    pub fn clip_rect(&self, min: Point, max: Point) -> Option<ConvexPolygon> {
        self.clip_line(Point::new(-1.0, 0.0), -min.x)?
            .clip_line(Point::new(1.0, 0.0), max.x)?
            .clip_line(Point::new(0.0, -1.0), -min.y)?
            .clip_line(Point::new(0.0, 1.0), max.y)
    }

    /// Fan triangulation from the geometric centroid.
    pub fn fan(&self) -> impl Iterator<Item = [Point; 3]> + '_ {
        let c = self.centroid();
        self.edges().map(move |(a, b)| [c, a, b])
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        twice += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * twice
}

/// Drops near-duplicate and collinear vertices (cyclically).
fn simplify(mut vertices: Vec<Point>) -> Vec<Point> {
    vertices.dedup_by(|a, b| a.dist(*b) <= VERTEX_TOLERANCE);
    while vertices.len() > 1 && vertices[0].dist(vertices[vertices.len() - 1]) <= VERTEX_TOLERANCE {
        vertices.pop();
    }
    loop {
        let n = vertices.len();
        if n < 3 {
            return vertices;
        }
        let drop = (0..n).find(|&i| {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            let base = c - a;
            let len = base.norm();
            // distance of b from the line through a and c
            len <= VERTEX_TOLERANCE || (base.cross(b - a) / len).abs() <= VERTEX_TOLERANCE
        });
        match drop {
            Some(i) => {
                vertices.remove(i);
            }
            None => return vertices,
        }
    }
}

/// Shoelace area and geometric centroid.
pub fn polygon_area_centroid(poly: &ConvexPolygon) -> (f64, Point) {
    let v = poly.vertices();
    let n = v.len();
    // Shift to the first vertex to limit cancellation.
    let o = v[0];
    let mut twice_area = 0.0;
    let mut acc = Point::ORIGIN;
    for i in 0..n {
        let a = v[i] - o;
        let b = v[(i + 1) % n] - o;
        let c = a.cross(b);
        twice_area += c;
        acc += (a + b) * c;
    }
    let area = 0.5 * twice_area;
    (area, o + acc / (3.0 * twice_area))
}

/// `poly ∩ {q : |q − a| <= |q − b|}`: the side of the perpendicular
/// bisector of `a` and `b` that contains `a`.
pub fn clip_halfplane(poly: &ConvexPolygon, a: Point, b: Point) -> Result<Option<ConvexPolygon>> {
    let d = b - a;
    if d.norm() <= VERTEX_TOLERANCE {
        return Err(Error::DegenerateBisector(VERTEX_TOLERANCE));
    }
    let mid = (a + b) * 0.5;
    Ok(poly.clip_line(d, d.dot(mid)))
}

/// Index of the nearest site; ties go to the lower index.
pub fn nearest_site(sites: &[Point], q: Point) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in sites.iter().enumerate() {
        let d = p.dist_sq(q);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Voronoi cells of a set of sites, clipped to a convex domain.
#[derive(Clone, Debug)]
pub struct VoronoiPartition {
    pub cells: Vec<ConvexPolygon>,
    /// Pairs `(i, j)` with `i < j` whose cells share an edge of positive length.
    pub neighbor_pairs: Vec<(usize, usize)>,
}

impl VoronoiPartition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the cell containing `q`, if any.
    pub fn locate(&self, q: Point, tol: f64) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(q, tol))
    }
}

/// Builds the bounded Voronoi partition by clipping the domain with the
/// bisector against every other site, O(k²) overall.
pub fn voronoi_partition(sites: &[Point], domain: &ConvexPolygon) -> Result<VoronoiPartition> {
    if sites.is_empty() {
        return Err(Error::NoSites);
    }
    for (i, p) in sites.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        if !domain.contains(*p, VERTEX_TOLERANCE) {
            return Err(Error::OutOfDomain(i));
        }
        for (j, q) in sites.iter().enumerate().skip(i + 1) {
            if p.dist(*q) <= VERTEX_TOLERANCE {
                return Err(Error::DuplicateSite(i, j));
            }
        }
    }

    let mut cells = Vec::with_capacity(sites.len());
    for (i, &p) in sites.iter().enumerate() {
        let mut cell = domain.clone();
        // Clip against nearer sites first; they cut the most away.
        let mut order: Vec<usize> = (0..sites.len()).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| p.dist_sq(sites[a]).total_cmp(&p.dist_sq(sites[b])));
        for j in order {
            let q = sites[j];
            // Beyond twice the farthest vertex distance the bisector misses.
            let reach = cell
                .vertices()
                .iter()
                .map(|v| v.dist_sq(p))
                .fold(0.0_f64, f64::max);
            if p.dist_sq(q) > 4.0 * reach {
                break;
            }
            cell = clip_halfplane(&cell, p, q)?.ok_or(Error::EmptyCell(i))?;
        }
        cells.push(cell);
    }

    let neighbor_pairs = find_neighbors(sites, &cells);
    Ok(VoronoiPartition {
        cells,
        neighbor_pairs,
    })
}

fn find_neighbors(sites: &[Point], cells: &[ConvexPolygon]) -> Vec<(usize, usize)> {
    // An edge of cell i belongs to the bisector with j when both endpoints
    // sit on that bisector.
    const ON_LINE: f64 = 1e-9;
    let mut pairs = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let p = sites[i];
        for (a, b) in cell.edges() {
            if a.dist(b) <= NEIGHBOR_EDGE_TOLERANCE {
                continue;
            }
            for (j, &q) in sites.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = q - p;
                let len = d.norm();
                let mid = (p + q) * 0.5;
                let sa = (d.dot(a - mid) / len).abs();
                let sb = (d.dot(b - mid) / len).abs();
                if sa <= ON_LINE && sb <= ON_LINE {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Largest distance between two Voronoi neighbours; 0 for a single site.
pub fn max_neighbor_distance(partition: &VoronoiPartition, sites: &[Point]) -> f64 {
    partition
        .neighbor_pairs
        .iter()
        .map(|&(i, j)| sites[i].dist(sites[j]))
        .fold(0.0, f64::max)
}
