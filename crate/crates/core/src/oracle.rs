//! Exhaustive weighted k-means optimum for small instances, and exact /
//! Monte-Carlo checks of the weighted-D² seeding guarantees.

use rand::Rng;

use crate::coverage::wkmeans_cost_points;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::par;
use crate::sampling::{draw_categorical, weighted_d2_indices, D2Sampler, RngStream};

/// Largest instance `brute_force_opt` will enumerate.
pub const MAX_BRUTE_FORCE_POINTS: usize = 12;
pub const MAX_BRUTE_FORCE_CLUSTERS: usize = 3;

/// Tolerance for the exact-expectation identities.
pub const EXACT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointSet {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidPointSet(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidPointSet(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidPointSet("no positive weight".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(WeightedPointSet { points, weights })
    }

    /// `n` points uniform in the unit square with weights uniform in (0, 1].
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| Point::new(rng.random(), rng.random()))
            .collect();
        let weights = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
        WeightedPointSet { points, weights }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted centroid, the optimal single center.
    pub fn centroid(&self) -> Point {
        weighted_centroid(
            self.points
                .iter()
                .copied()
                .zip(self.weights.iter().copied()),
        )
    }

    /// Cost with the given centers.
    pub fn cost(&self, centers: &[Point]) -> f64 {
        wkmeans_cost_points(centers, &self.points, &self.weights)
    }

    /// Optimal single-center cost `φ_OPT(A)`.
    pub fn single_center_cost(&self) -> f64 {
        self.cost(&[self.centroid()])
    }
}

/// Offsets are taken from the first point, so coincident points give
/// their common location exactly.
fn weighted_centroid(mut items: impl Iterator<Item = (Point, f64)>) -> Point {
    let Some((base, w0)) = items.next() else {
        return Point::ORIGIN;
    };
    let mut acc = Point::ORIGIN;
    let mut plain = Point::ORIGIN;
    let mut total = w0;
    let mut count = 1usize;
    for (p, w) in items {
        acc += (p - base) * w;
        plain += p - base;
        total += w;
        count += 1;
    }
    if total > 0.0 {
        base + acc / total
    } else {
        base + plain / count as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalClustering {
    pub cost: f64,
    pub centers: Vec<Point>,
}

/// Exact weighted k-means optimum by enumerating every partition of the
/// points into at most `k` blocks (restricted-growth strings). Each block's
/// best center is its weighted centroid.
pub fn brute_force_opt(set: &WeightedPointSet, k: usize) -> Result<OptimalClustering> {
    let n = set.len();
    if k == 0 {
        return Err(Error::NoSites);
    }
    if k >= n {
        return Ok(OptimalClustering {
            cost: 0.0,
            centers: set.points.clone(),
        });
    }
    if n > MAX_BRUTE_FORCE_POINTS || k > MAX_BRUTE_FORCE_CLUSTERS {
        return Err(Error::InstanceTooLarge { n, k });
    }

    let mut labels = vec![0usize; n];
    let mut best = OptimalClustering {
        cost: f64::INFINITY,
        centers: Vec::new(),
    };
    loop {
        let blocks = labels.iter().max().map_or(0, |m| m + 1);
        let centers: Vec<Point> = (0..blocks)
            .map(|b| {
                weighted_centroid(
                    labels
                        .iter()
                        .zip(set.points.iter().zip(&set.weights))
                        .filter(|(l, _)| **l == b)
                        .map(|(_, (p, w))| (*p, *w)),
                )
            })
            .collect();
        let cost: f64 = labels
            .iter()
            .zip(set.points.iter().zip(&set.weights))
            .map(|(&l, (p, w))| w * p.dist_sq(centers[l]))
            .sum();
        if cost < best.cost {
            best = OptimalClustering { cost, centers };
        }
        if !next_restricted_growth(&mut labels, k) {
            break;
        }
    }
    Ok(best)
}

/// Advances a restricted-growth string (`a[0] = 0`, `a[i] ≤ 1 + max a[..i]`)
/// with values below `k`. Returns false after the last one.
fn next_restricted_growth(a: &mut [usize], k: usize) -> bool {
    let n = a.len();
    for i in (1..n).rev() {
        let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
        if a[i] <= prefix_max && a[i] + 1 < k {
            a[i] += 1;
            for x in &mut a[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Single-center seeding on one cluster: exact and sampled expectation of
/// the cost when the center is drawn proportionally to weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleCenterReport {
    pub opt_cost: f64,
    /// `Σ_i (w_i / W) Σ_j w_j |x_i − x_j|²`
    pub exact_expectation: f64,
    pub monte_carlo_mean: f64,
    /// `monte_carlo_mean / opt_cost`; 1 for degenerate instances.
    pub ratio: f64,
    pub exact_ratio: f64,
    /// Zero optimal cost (a single point, or all points coincide).
    pub degenerate: bool,
    /// `|exact_expectation − 2 opt_cost| ≤ 1e-10`
    pub exact_ok: bool,
}

/// Closed-form `E[φ(A)]` for one center drawn proportionally to weight.
pub fn single_center_expectation(set: &WeightedPointSet) -> f64 {
    let total = set.total_weight();
    set.points
        .iter()
        .zip(&set.weights)
        .map(|(xi, wi)| {
            let inner: f64 = set
                .points
                .iter()
                .zip(&set.weights)
                .map(|(xj, wj)| wj * xi.dist_sq(*xj))
                .sum();
            wi / total * inner
        })
        .sum()
}

pub fn lemma1_check(set: &WeightedPointSet, trials: usize, seed: u64) -> SingleCenterReport {
    let opt_cost = set.single_center_cost();
    let exact_expectation = single_center_expectation(set);
    let costs = par::map_range(trials, |t| {
        let mut rng = RngStream::new(seed, t as u64).rng();
        let i = draw_categorical(&set.weights, &mut rng).expect("positive total weight");
        set.cost(&[set.points[i]])
    });
    let monte_carlo_mean = if trials == 0 {
        exact_expectation
    } else {
        costs.iter().sum::<f64>() / trials as f64
    };
    let degenerate = opt_cost == 0.0;
    let (ratio, exact_ratio) = if degenerate {
        (1.0, 1.0)
    } else {
        (monte_carlo_mean / opt_cost, exact_expectation / opt_cost)
    };
    SingleCenterReport {
        opt_cost,
        exact_expectation,
        monte_carlo_mean,
        ratio,
        exact_ratio,
        degenerate,
        exact_ok: (exact_expectation - 2.0 * opt_cost).abs() <= EXACT_TOLERANCE,
    }
}

/// Adding one D²-sampled center from cluster `A` to an existing clustering.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneDrawReport {
    pub opt_cost: f64,
    /// `Σ_i Pr(i) Σ_j w_j min(D(x_j), |x_i − x_j|)²`
    pub exact_expectation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Exact expectation of the cluster cost after one weighted-D² draw from
/// `set`, given existing centers (which need not belong to `set`).
pub fn one_draw_expectation(set: &WeightedPointSet, existing: &[Point]) -> OneDrawReport {
    let opt_cost = set.single_center_cost();
    let sampler = D2Sampler::with_centers(&set.points, &set.weights, existing);
    let dist_sq = sampler.dist_sq();
    let masses = sampler.masses();
    let total: f64 = masses.iter().sum();
    let exact_expectation = if total > 0.0 {
        masses
            .iter()
            .zip(&set.points)
            .filter(|(m, _)| **m > 0.0)
            .map(|(m, xi)| {
                let after: f64 = set
                    .points
                    .iter()
                    .zip(&set.weights)
                    .zip(dist_sq)
                    .map(|((xj, wj), dj)| wj * dj.min(xi.dist_sq(*xj)))
                    .sum();
                m / total * after
            })
            .sum()
    } else {
        // Existing centers already cover A at zero cost.
        0.0
    };
    let bound = 8.0 * opt_cost;
    OneDrawReport {
        opt_cost,
        exact_expectation,
        bound,
        pass: exact_expectation <= bound + EXACT_TOLERANCE,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheckReport {
    pub mean_sampled_cost: f64,
    pub opt_cost: f64,
    /// `mean_sampled_cost / opt_cost` (0 when both vanish).
    pub ratio: f64,
    /// `8 (ln k + 2)`
    pub bound: f64,
    pub trials: usize,
    pub pass: bool,
}

pub fn competitive_bound(k: usize) -> f64 {
    8.0 * ((k as f64).ln() + 2.0)
}

/// Runs weighted-D² seeding `trials` times on `set` and compares the mean
/// cost with `8 (ln k + 2) Φ_OPT`.
pub fn theorem3_check(
    set: &WeightedPointSet,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    let opt = brute_force_opt(set, k)?;
    let costs = par::map_range(trials, |t| {
        let mut rng = RngStream::new(seed, t as u64).rng();
        weighted_d2_indices(&set.points, &set.weights, k.min(set.len()), &mut rng).map(|idx| {
            let centers: Vec<Point> = idx.iter().map(|&i| set.points[i]).collect();
            set.cost(&centers)
        })
    });
    let costs = costs.into_iter().collect::<Result<Vec<_>>>()?;
    let mean_sampled_cost = costs.iter().sum::<f64>() / trials.max(1) as f64;
    let bound = competitive_bound(k);
    let ratio = if opt.cost > 0.0 {
        mean_sampled_cost / opt.cost
    } else if mean_sampled_cost > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(BoundCheckReport {
        mean_sampled_cost,
        opt_cost: opt.cost,
        ratio,
        bound,
        trials,
        pass: mean_sampled_cost <= bound * opt.cost + EXACT_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set(points: &[(f64, f64)], weights: &[f64]) -> WeightedPointSet {
        WeightedPointSet::new(points.iter().map(|&p| p.into()).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn two_points_one_center() {
        let s = set(&[(0.0, 0.0), (1.0, 0.0)], &[1.0, 1.0]);
        let opt = brute_force_opt(&s, 1).unwrap();
        assert_abs_diff_eq!(opt.cost, 0.5, epsilon = 1e-15);
        assert_eq!(opt.centers, vec![Point::new(0.5, 0.0)]);
    }

    #[test]
    fn k_equals_n_is_free() {
        let s = set(&[(0.0, 0.0), (1.0, 0.0), (0.3, 0.9)], &[1.0, 2.0, 0.5]);
        assert_eq!(brute_force_opt(&s, 3).unwrap().cost, 0.0);
        let r = theorem3_check(&s, 3, 100, 1).unwrap();
        assert_eq!(r.mean_sampled_cost, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn budget_guard() {
        let mut rng = RngStream::new(0, 0).rng();
        let big = WeightedPointSet::random(13, &mut rng);
        assert!(matches!(
            brute_force_opt(&big, 2),
            Err(Error::InstanceTooLarge { n: 13, k: 2 })
        ));
        let s = WeightedPointSet::random(8, &mut rng);
        assert!(matches!(
            brute_force_opt(&s, 4),
            Err(Error::InstanceTooLarge { n: 8, k: 4 })
        ));
    }

    #[test]
    fn restricted_growth_counts_match_stirling() {
        // Σ_{j≤k} S(n, j) for n = 6: S(6,1)=1, S(6,2)=31, S(6,3)=90.
        for (k, expected) in [(1, 1), (2, 32), (3, 122)] {
            let mut a = vec![0; 6];
            let mut count = 1;
            while next_restricted_growth(&mut a, k) {
                count += 1;
            }
            assert_eq!(count, expected);
        }
    }

    #[test]
    fn single_center_two_points() {
        let d: f64 = 0.7;
        let w = 2.0;
        let s = set(&[(0.0, 0.0), (d, 0.0)], &[w, w]);
        let r = lemma1_check(&s, 2000, 3);
        assert_abs_diff_eq!(r.opt_cost, w * d * d / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.exact_expectation, w * d * d, epsilon = 1e-15);
        assert_abs_diff_eq!(r.exact_ratio, 2.0, epsilon = 1e-12);
        // Either draw costs w d², so every sample equals the expectation.
        assert_abs_diff_eq!(r.ratio, 2.0, epsilon = 1e-12);
        assert!(r.exact_ok);
    }

    #[test]
    fn single_point_is_degenerate() {
        let s = set(&[(0.4, 0.4)], &[3.0]);
        let r = lemma1_check(&s, 10, 0);
        assert!(r.degenerate);
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.opt_cost, 0.0);
        assert!(r.exact_ok);
    }

    #[test]
    fn covered_cluster_has_zero_expectation() {
        let s = set(&[(0.1, 0.1), (0.2, 0.3)], &[1.0, 1.0]);
        let r = one_draw_expectation(&s, &[Point::new(0.1, 0.1), Point::new(0.2, 0.3)]);
        assert_eq!(r.exact_expectation, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn invalid_sets() {
        assert!(WeightedPointSet::new(vec![Point::ORIGIN], vec![]).is_err());
        assert!(WeightedPointSet::new(vec![Point::ORIGIN], vec![0.0]).is_err());
        assert!(WeightedPointSet::new(vec![Point::ORIGIN], vec![-1.0]).is_err());
    }

    #[test]
    fn bound_values() {
        assert_abs_diff_eq!(competitive_bound(2), 21.545177444479562, epsilon = 1e-12);
        assert_abs_diff_eq!(competitive_bound(3), 24.788898309344878, epsilon = 1e-12);
    }
}
