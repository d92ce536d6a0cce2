//! Coverage metrics: the continuous cost `H(P)`, the discrete weighted
//! k-means cost `Φ(P)` over grid candidates, and the sandwich bound
//! `H ≤ Φ + ΣJ ≤ H + 2√2·D·ε` relating them.

use crate::density::{polygon_moments, Density, PolygonMoments};
use crate::discretization::CellPartition;
use crate::error::Result;
use crate::geometry::{
    max_neighbor_distance, voronoi_partition, ConvexPolygon, Point, VoronoiPartition,
};
use crate::quadrature::Quadrature;

/// Absolute slack applied to both sides of the sandwich check.
pub const SANDWICH_TOLERANCE: f64 = 1e-7;

/// Voronoi partition of a configuration together with the density moments
/// of every cell. Everything the descent and the cost need in one pass.
#[derive(Clone, Debug)]
pub struct CoverageState {
    pub partition: VoronoiPartition,
    pub moments: Vec<PolygonMoments>,
}

impl CoverageState {
    pub fn new<D: Density + ?Sized>(
        sites: &[Point],
        field: &D,
        domain: &ConvexPolygon,
        quad: Quadrature,
    ) -> Result<Self> {
        let partition = voronoi_partition(sites, domain)?;
        let moments = partition
            .cells
            .iter()
            .map(|c| polygon_moments(field, c, quad))
            .collect();
        Ok(CoverageState { partition, moments })
    }

    /// `H(P) = Σ_i ∫_{V_i} |q − p_i|² φ(q) dq`
    pub fn cost(&self, sites: &[Point]) -> f64 {
        self.moments
            .iter()
            .zip(sites)
            .map(|(m, &p)| m.inertia_about(p))
            .sum()
    }
}

/// `H(P)` via quadrature over the bounded Voronoi cells.
pub fn coverage_cost<D: Density + ?Sized>(
    sites: &[Point],
    field: &D,
    domain: &ConvexPolygon,
    quad: Quadrature,
) -> Result<f64> {
    Ok(CoverageState::new(sites, field, domain, quad)?.cost(sites))
}

/// `Φ(P) = Σ_i w_i min_p |x_i − p|²` over arbitrary weighted points.
pub fn wkmeans_cost_points(centers: &[Point], points: &[Point], weights: &[f64]) -> f64 {
    points
        .iter()
        .zip(weights)
        .map(|(x, w)| {
            let d = centers
                .iter()
                .map(|p| p.dist_sq(*x))
                .fold(f64::INFINITY, f64::min);
            w * d
        })
        .sum()
}

/// `Φ(P)` over the cells of a grid partition (massless cells contribute 0).
pub fn wkmeans_cost(centers: &[Point], candidates: &CellPartition) -> f64 {
    let (points, weights): (Vec<Point>, Vec<f64>) = candidates
        .cells
        .iter()
        .map(|c| (c.centroid, c.weight))
        .unzip();
    wkmeans_cost_points(centers, &points, &weights)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageReport {
    pub h: f64,
    pub phi: f64,
    /// `Σ_i J_{C_i|x_i}`
    pub inertia_sum: f64,
    /// Largest distance between Voronoi neighbours.
    pub d: f64,
    pub epsilon: f64,
    pub sandwich_lhs_ok: bool,
    pub sandwich_rhs_ok: bool,
}

impl CoverageReport {
    /// `Φ + ΣJ − H`, which the bound places in `[0, 2√2·D·ε]`.
    pub fn gap(&self) -> f64 {
        self.phi + self.inertia_sum - self.h
    }

    pub fn upper_slack(&self) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * self.d * self.epsilon
    }

    pub fn holds(&self) -> bool {
        self.sandwich_lhs_ok && self.sandwich_rhs_ok
    }
}

/// Evaluates both sides of the sandwich bound for one configuration.
pub fn sandwich_check<D: Density + ?Sized>(
    sites: &[Point],
    field: &D,
    domain: &ConvexPolygon,
    candidates: &CellPartition,
    quad: Quadrature,
) -> Result<CoverageReport> {
    let state = CoverageState::new(sites, field, domain, quad)?;
    let h = state.cost(sites);
    let phi = wkmeans_cost(sites, candidates);
    let inertia_sum = candidates.inertia_sum();
    let d = max_neighbor_distance(&state.partition, sites);
    let epsilon = candidates.epsilon;
    let mid = phi + inertia_sum;
    Ok(CoverageReport {
        h,
        phi,
        inertia_sum,
        d,
        epsilon,
        sandwich_lhs_ok: h <= mid + SANDWICH_TOLERANCE,
        sandwich_rhs_ok: mid
            <= h + 2.0 * std::f64::consts::SQRT_2 * d * epsilon + SANDWICH_TOLERANCE,
    })
}
