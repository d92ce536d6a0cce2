//! Initial sensor placements: weighted-D² seeding over weighted candidate
//! points, and the uniform random baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretization::CellPartition;
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};

/// Ordered sensor positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorConfiguration {
    pub positions: Vec<Point>,
}

impl SensorConfiguration {
    pub fn new(positions: Vec<Point>) -> Self {
        SensorConfiguration { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl From<Vec<Point>> for SensorConfiguration {
    fn from(positions: Vec<Point>) -> Self {
        SensorConfiguration { positions }
    }
}

/// Identifies an independent, reproducible random stream.
///
/// Streams with the same `(seed, stream)` produce the same draws on every
/// platform and regardless of which thread consumes them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub const ALGORITHM: &'static str = "chacha8";

    pub const fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Index drawn from unnormalized `masses` by inverting the cumulative sum
/// with one uniform variate. Zero-mass entries are never returned.
/// Returns `None` if the total mass is not positive.
pub fn draw_categorical<R: Rng + ?Sized>(masses: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = masses.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &m) in masses.iter().enumerate() {
        if m > 0.0 {
            acc += m;
            last_positive = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    // Rounding can leave target a hair above the running sum.
    last_positive
}

/// Incremental weighted-D² sampler over a fixed candidate set.
///
/// Tracks, for each candidate, the squared distance to the nearest center
/// chosen so far (or to externally supplied centers). Distances are
/// refreshed against the newest center only.
#[derive(Clone, Debug)]
pub struct D2Sampler<'a> {
    points: &'a [Point],
    weights: &'a [f64],
    dist_sq: Vec<f64>,
    chosen: Vec<usize>,
}

impl<'a> D2Sampler<'a> {
    pub fn new(points: &'a [Point], weights: &'a [f64]) -> Self {
        assert_eq!(points.len(), weights.len(), "points and weights must align");
        D2Sampler {
            points,
            weights,
            dist_sq: vec![f64::INFINITY; points.len()],
            chosen: Vec::new(),
        }
    }

    /// Starts from an existing clustering whose centers need not be
    /// candidates.
    pub fn with_centers(points: &'a [Point], weights: &'a [f64], centers: &[Point]) -> Self {
        let mut s = D2Sampler::new(points, weights);
        for &c in centers {
            s.absorb(c);
        }
        s
    }

    fn absorb(&mut self, c: Point) {
        for (d, p) in self.dist_sq.iter_mut().zip(self.points) {
            *d = d.min(p.dist_sq(c));
        }
    }

    fn has_centers(&self) -> bool {
        self.dist_sq.first().is_some_and(|d| d.is_finite())
    }

    /// Sampling masses for the next draw: `w_i` before any center exists,
    /// `w_i · D(x_i)²` afterwards.
    pub fn masses(&self) -> Vec<f64> {
        if self.has_centers() {
            self.weights
                .iter()
                .zip(&self.dist_sq)
                .map(|(w, d)| w * d)
                .collect()
        } else {
            self.weights.to_vec()
        }
    }

    /// Squared distance of every candidate to its nearest center.
    pub fn dist_sq(&self) -> &[f64] {
        &self.dist_sq
    }

    /// Records candidate `i` as chosen.
    pub fn push(&mut self, i: usize) {
        self.absorb(self.points[i]);
        self.dist_sq[i] = 0.0;
        self.chosen.push(i);
    }

    /// Draws and records the next candidate.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let i = draw_categorical(&self.masses(), rng).ok_or(Error::DegenerateDistribution {
            chosen: self.chosen.len(),
        })?;
        self.push(i);
        Ok(i)
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }
}

/// Indices of `k` candidates chosen by weighted-D² sampling.
pub fn weighted_d2_indices<R: Rng + ?Sized>(
    points: &[Point],
    weights: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let available = weights.iter().filter(|&&w| w > 0.0).count();
    if k == 0 {
        return Err(Error::NoSites);
    }
    if available < k {
        return Err(Error::InsufficientCandidates {
            available,
            requested: k,
        });
    }
    let mut sampler = D2Sampler::new(points, weights);
    for _ in 0..k {
        sampler.draw(rng)?;
    }
    Ok(sampler.chosen)
}

/// Weighted-D² seeding over the candidate cells of a grid partition.
pub fn weighted_d2_sample<R: Rng + ?Sized>(
    candidates: &CellPartition,
    k: usize,
    rng: &mut R,
) -> Result<SensorConfiguration> {
    let (points, weights) = candidates.candidate_arrays();
    let idx = weighted_d2_indices(&points, &weights, k, rng)?;
    Ok(idx
        .into_iter()
        .map(|i| points[i])
        .collect::<Vec<_>>()
        .into())
}

/// `k` i.i.d. uniform points in `domain`, by rejection from its bounding box.
pub fn uniform_sample<R: Rng + ?Sized>(
    domain: &ConvexPolygon,
    k: usize,
    rng: &mut R,
) -> SensorConfiguration {
    let bb = domain.bounding_box();
    let mut positions = Vec::with_capacity(k);
    while positions.len() < k {
        let q = Point::new(
            bb.min.x + rng.random::<f64>() * bb.width(),
            bb.min.y + rng.random::<f64>() * bb.height(),
        );
        if domain.contains(q, 0.0) {
            positions.push(q);
        }
    }
    SensorConfiguration { positions }
}
