//! Fixed-order quadrature on triangles and convex polygons.
//!
//! Polygons are fan-triangulated from their geometric centroid, each
//! triangle is split uniformly into `4^depth` sub-triangles, and a
//! symmetric 7-point rule exact for polynomials of degree 5 is applied on
//! every sub-triangle.

use crate::geometry::{ConvexPolygon, Point};

/// Barycentric abscissae and weights (weights sum to one) of the
/// 7-point degree-5 rule.
struct Rule {
    points: [[f64; 3]; 7],
    weights: [f64; 7],
}

fn degree5_rule() -> Rule {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let b1 = 1.0 - 2.0 * a1;
    let a2 = (6.0 + s15) / 21.0;
    let b2 = 1.0 - 2.0 * a2;
    let w0 = 9.0 / 40.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    Rule {
        points: [
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [a1, a1, b1],
            [a1, b1, a1],
            [b1, a1, a1],
            [a2, a2, b2],
            [a2, b2, a2],
            [b2, a2, a2],
        ],
        weights: [w0, w1, w1, w1, w2, w2, w2],
    }
}

/// Quadrature resolution. `depth` levels of uniform 1-to-4 subdivision are
/// applied to each fan triangle before the 7-point rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadrature {
    pub depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { depth: 2 }
    }
}

impl Quadrature {
    pub const fn new(depth: u32) -> Self {
        Quadrature { depth }
    }

    /// Resolution used when normalizing a density over the whole domain.
    pub const fn fine() -> Self {
        Quadrature { depth: 6 }
    }

    /// Calls `f(q, weight)` at every node of the rule on triangle `tri`;
    /// the weights carry the (sub-)triangle area.
    pub fn for_each_node_triangle(&self, tri: [Point; 3], mut f: impl FnMut(Point, f64)) {
        let rule = degree5_rule();
        let n = 1usize << self.depth;
        let [a, b, c] = tri;
        let e1 = (b - a) / n as f64;
        let e2 = (c - a) / n as f64;
        let sub_area = 0.5 * e1.cross(e2).abs();
        let vertex = |i: usize, j: usize| a + e1 * i as f64 + e2 * j as f64;
        let mut apply = |p0: Point, p1: Point, p2: Point| {
            for (bary, w) in rule.points.iter().zip(rule.weights) {
                let q = Point::new(
                    bary[0] * p0.x + bary[1] * p1.x + bary[2] * p2.x,
                    bary[0] * p0.y + bary[1] * p1.y + bary[2] * p2.y,
                );
                f(q, w * sub_area);
            }
        };
        for i in 0..n {
            for j in 0..n - i {
                apply(vertex(i, j), vertex(i + 1, j), vertex(i, j + 1));
                if i + j + 1 < n {
                    apply(vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1));
                }
            }
        }
    }

    pub fn for_each_node(&self, poly: &ConvexPolygon, mut f: impl FnMut(Point, f64)) {
        for tri in poly.fan() {
            self.for_each_node_triangle(tri, &mut f);
        }
    }

    pub fn integrate(&self, poly: &ConvexPolygon, mut f: impl FnMut(Point) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each_node(poly, |q, w| acc += w * f(q));
        acc
    }
}
