//! Verification suite behind `cover check`.

use std::fmt;

use rand::Rng;

use super::experiment::Experiment;
use super::scenario::{Method, Scenario};
use crate::coverage::{sandwich_check, CoverageState, SANDWICH_TOLERANCE};
use crate::density::{Density, DensityField};
use crate::discretization::CellPartition;
use crate::error::Result;
use crate::geometry::{max_neighbor_distance, ConvexPolygon, Point};
use crate::oracle::{
    competitive_bound, lemma1_check, one_draw_expectation, theorem3_check, WeightedPointSet,
    EXACT_TOLERANCE,
};
use crate::par;
use crate::quadrature::Quadrature;
use crate::sampling::{uniform_sample, RngStream};

/// Reference value of the normalization constant of the two-Gaussian field.
pub const REFERENCE_NORMALIZATION: f64 = 0.610882;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckSettings {
    pub seed: u64,
    /// Random point sets per oracle check.
    pub instances: usize,
    /// Monte-Carlo trials per instance for the seeding bound.
    pub trials: usize,
    /// Random sensor configurations per ε in the sandwich check.
    pub configurations: usize,
    /// Descent runs used to estimate the optimal coverage; 0 skips the
    /// end-to-end bound.
    pub descent_runs: usize,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            seed: 0,
            instances: 100,
            trials: 10_000,
            configurations: 20,
            descent_runs: 10,
        }
    }
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_owned(),
        passed,
        detail,
    }
}

/// Normalization constant of the reference field against 0.610882.
pub fn check_normalization() -> Result<CheckOutcome> {
    let domain = ConvexPolygon::unit_square();
    let field = DensityField::paper().normalize(&domain)?;
    let a = field.normalization();
    let rel = (a - REFERENCE_NORMALIZATION).abs() / REFERENCE_NORMALIZATION;
    let mass = Quadrature::fine().integrate(&domain, |q| field.eval(q));
    Ok(outcome(
        "normalization",
        rel <= 1e-4 && (mass - 1.0).abs() <= 1e-9,
        format!("A = {a:.7} (rel. err {rel:.1e}), normalized mass = {mass:.12}"),
    ))
}

/// `H ≤ Φ + ΣJ ≤ H + 2√2·D·ε` on random uniform configurations.
pub fn check_sandwich(
    field: &DensityField,
    domain: &ConvexPolygon,
    epsilon: f64,
    k: usize,
    settings: &CheckSettings,
) -> Result<CheckOutcome> {
    let quad = Quadrature::default();
    let cells = CellPartition::build(domain, epsilon, field, quad)?;
    let reports = par::map_range(settings.configurations, |i| {
        let mut rng = RngStream::new(settings.seed, i as u64).rng();
        let p = uniform_sample(domain, k, &mut rng);
        sandwich_check(&p.positions, field, domain, &cells, quad)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.holds()).count();
    let min_gap = reports
        .iter()
        .map(|r| r.gap())
        .fold(f64::INFINITY, f64::min);
    let min_slack = reports
        .iter()
        .map(|r| r.upper_slack())
        .fold(f64::INFINITY, f64::min);
    Ok(outcome(
        &format!("sandwich eps={epsilon}"),
        passed == reports.len(),
        format!(
            "{passed}/{} configurations; min(Φ+ΣJ−H) = {min_gap:.3e}, min upper slack = {min_slack:.3e}, tol {SANDWICH_TOLERANCE:e}",
            reports.len()
        ),
    ))
}

/// Exact single-center expectation equals twice the optimum.
pub fn check_single_center(settings: &CheckSettings) -> CheckOutcome {
    let reports = par::map_range(settings.instances, |i| {
        let mut rng = RngStream::new(settings.seed, 1000 + i as u64).rng();
        let n = rng.random_range(1..=10);
        let set = WeightedPointSet::random(n, &mut rng);
        lemma1_check(&set, 1000, settings.seed.wrapping_add(i as u64))
    });
    let passed = reports.iter().filter(|r| r.exact_ok).count();
    let worst = reports
        .iter()
        .map(|r| (r.exact_expectation - 2.0 * r.opt_cost).abs())
        .fold(0.0, f64::max);
    let mc: Vec<f64> = reports
        .iter()
        .filter(|r| !r.degenerate)
        .map(|r| r.ratio)
        .collect();
    let mc_mean = mc.iter().sum::<f64>() / mc.len().max(1) as f64;
    outcome(
        "single-center expectation",
        passed == reports.len(),
        format!(
            "{passed}/{} instances; max |E − 2φ_OPT| = {worst:.2e} (tol {EXACT_TOLERANCE:e}); Monte-Carlo mean ratio {mc_mean:.3}",
            reports.len()
        ),
    )
}

/// One D² draw from a cluster with arbitrary existing centers stays within
/// eight times the cluster optimum.
pub fn check_one_draw(settings: &CheckSettings) -> CheckOutcome {
    let reports = par::map_range(settings.instances, |i| {
        let mut rng = RngStream::new(settings.seed, 2000 + i as u64).rng();
        let n = rng.random_range(1..=10);
        let set = WeightedPointSet::random(n, &mut rng);
        let m = rng.random_range(1..=3);
        let existing: Vec<Point> = (0..m)
            .map(|_| Point::new(rng.random_range(-0.5..1.5), rng.random_range(-0.5..1.5)))
            .collect();
        one_draw_expectation(&set, &existing)
    });
    let passed = reports.iter().filter(|r| r.pass).count();
    let worst = reports
        .iter()
        .filter(|r| r.opt_cost > 0.0)
        .map(|r| r.exact_expectation / r.opt_cost)
        .fold(0.0, f64::max);
    outcome(
        "one-draw expectation",
        passed == reports.len(),
        format!(
            "{passed}/{} instances; max E/φ_OPT = {worst:.3} (bound 8)",
            reports.len()
        ),
    )
}

/// Mean seeded cost against `8(ln k + 2)·Φ_OPT` by exhaustive search.
pub fn check_seeding_bound(settings: &CheckSettings) -> Result<CheckOutcome> {
    let mut reports = Vec::with_capacity(settings.instances);
    for i in 0..settings.instances {
        let mut rng = RngStream::new(settings.seed, 3000 + i as u64).rng();
        let n = rng.random_range(2..=12);
        let k = rng.random_range(1..=3);
        let set = WeightedPointSet::random(n, &mut rng);
        reports.push(theorem3_check(
            &set,
            k,
            settings.trials,
            settings.seed.wrapping_add(i as u64),
        )?);
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let worst = reports
        .iter()
        .map(|r| r.ratio / r.bound)
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max);
    Ok(outcome(
        "seeding bound",
        passed == reports.len(),
        format!(
            "{passed}/{} instances, {} trials each; max ratio/bound = {worst:.3}",
            reports.len(),
            settings.trials
        ),
    ))
}

/// End-to-end bound on the expected initial coverage of weighted-D²
/// seeding, with the optimum `H*` estimated by the best descent endpoint.
pub fn check_coverage_bound(scenario: &Scenario, runs: usize) -> Result<CheckOutcome> {
    let mut scenario = scenario.clone();
    scenario.runs = runs;
    scenario.methods = vec![Method::WeightedD2];
    let exp = Experiment::new(&scenario)?;
    let traces = par::map_range(runs, |r| exp.trace(Method::WeightedD2, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mean_initial = traces.iter().map(|(r, _)| r.initial_h).sum::<f64>() / runs as f64;
    let (best_record, best_trace) = traces
        .iter()
        .min_by(|a, b| a.0.final_h.total_cmp(&b.0.final_h))
        .expect("at least one run");
    let h_star = best_record.final_h;
    let best = &best_trace.last().positions;
    let state = CoverageState::new(
        best,
        &scenario.density,
        &scenario.domain,
        scenario.descent.quadrature,
    )?;
    let d = max_neighbor_distance(&state.partition, best);
    let k = scenario.k as f64;
    let ln_term = k.ln() + 2.0;
    let bound = competitive_bound(scenario.k) * h_star
        + 16.0 * std::f64::consts::SQRT_2 * ln_term * d * scenario.epsilon
        + exp.cells.inertia_sum();
    Ok(outcome(
        "coverage bound",
        mean_initial <= bound,
        format!(
            "E[H] ≈ {mean_initial:.5} over {runs} runs ≤ {bound:.5} (H* ≈ {h_star:.5}, D = {d:.3})"
        ),
    ))
}

/// Runs every check in order.
pub fn run_checks(settings: &CheckSettings) -> Result<Vec<CheckOutcome>> {
    let domain = ConvexPolygon::unit_square();
    let field = DensityField::paper().normalize(&domain)?;
    let mut out = vec![check_normalization()?];
    for eps in [0.1, 0.05] {
        out.push(check_sandwich(&field, &domain, eps, 10, settings)?);
    }
    out.push(check_single_center(settings));
    out.push(check_one_draw(settings));
    out.push(check_seeding_bound(settings)?);
    if settings.descent_runs > 0 {
        out.push(check_coverage_bound(
            &Scenario::paper(10, 0.1),
            settings.descent_runs,
        )?);
    }
    Ok(out)
}
