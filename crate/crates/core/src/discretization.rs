//! Square-grid discretization of the domain into weighted cells.

use crate::density::{polygon_moments, Density, MIN_CELL_WEIGHT};
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};
use crate::par;
use crate::quadrature::Quadrature;

#[derive(Clone, Debug)]
pub struct Cell {
    pub polygon: ConvexPolygon,
    /// Mass of the density over the cell.
    pub weight: f64,
    /// Mass centroid (geometric centroid for massless cells).
    pub centroid: Point,
    /// Second moment about `centroid`.
    pub inertia: f64,
}

impl Cell {
    /// Whether the cell can be drawn by the seeding procedure.
    pub fn is_candidate(&self) -> bool {
        self.weight >= MIN_CELL_WEIGHT
    }
}

/// Cells of an `epsilon × epsilon` grid anchored at the lower-left corner
/// of the domain's bounding box, each clipped to the domain.
#[derive(Clone, Debug)]
pub struct CellPartition {
    pub cells: Vec<Cell>,
    pub epsilon: f64,
}

impl CellPartition {
    pub fn build<D: Density + ?Sized>(
        domain: &ConvexPolygon,
        epsilon: f64,
        field: &D,
        quad: Quadrature,
    ) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let bb = domain.bounding_box();
        let count = |extent: f64| ((extent / epsilon) - 1e-9).ceil().max(1.0) as usize;
        let (nx, ny) = (count(bb.width()), count(bb.height()));

        let rows = par::map_range(ny, |j| {
            (0..nx)
                .filter_map(|i| {
                    let min =
                        Point::new(bb.min.x + i as f64 * epsilon, bb.min.y + j as f64 * epsilon);
                    let polygon = domain.clip_rect(min, min + Point::new(epsilon, epsilon))?;
                    let m = polygon_moments(field, &polygon, quad);
                    let centroid = m.centroid();
                    Some(Cell {
                        inertia: m.inertia_about(centroid),
                        weight: m.weight,
                        centroid,
                        polygon,
                    })
                })
                .collect::<Vec<_>>()
        });
        Ok(CellPartition {
            cells: rows.into_iter().flatten().collect(),
            epsilon,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.cells.iter().map(|c| c.weight).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.polygon.area()).sum()
    }

    /// `Σ_i J_i`, the inertia of every cell about its own centroid.
    pub fn inertia_sum(&self) -> f64 {
        self.cells.iter().map(|c| c.inertia).sum()
    }

    /// Cells eligible for sampling (weight at least `MIN_CELL_WEIGHT`).
    pub fn candidates(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.is_candidate())
    }

    /// Candidate centroids and weights as parallel arrays.
    pub fn candidate_arrays(&self) -> (Vec<Point>, Vec<f64>) {
        self.candidates().map(|c| (c.centroid, c.weight)).unzip()
    }
}
