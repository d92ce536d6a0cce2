//! Weighted-D² seeding and Lloyd descent for density-weighted coverage by
//! mobile sensors on a convex planar domain.
//!
//! The pipeline: discretize the domain into grid cells ([`discretization`]),
//! draw initial sensor positions from the cell centroids by weighted-D²
//! sampling ([`sampling`]), then descend to a centroidal Voronoi
//! configuration ([`lloyd`]). [`coverage`] and [`oracle`] hold the metrics
//! and the exact/Monte-Carlo checks of the seeding guarantees; the
//! [`harness`] runs batch experiments and writes CSV/SVG artifacts.

pub mod coverage;
pub mod density;
pub mod discretization;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod lloyd;
pub mod oracle;
pub mod par;
pub mod quadrature;
pub mod sampling;

pub use coverage::{coverage_cost, sandwich_check, wkmeans_cost, CoverageReport};
pub use density::{Density, DensityField, GaussianTerm, PolygonMoments};
pub use discretization::{Cell, CellPartition};
pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Point, VoronoiPartition};
pub use lloyd::{run_descent, DescentSettings, DescentTrace};
pub use quadrature::Quadrature;
pub use sampling::{RngStream, SensorConfiguration};
