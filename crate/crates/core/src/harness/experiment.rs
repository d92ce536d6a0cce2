//! Batch trials: seeding, descent, per-trial records and summaries.

use std::path::Path;

use serde::Serialize;

use super::scenario::{Method, Scenario};
use crate::coverage::coverage_cost;
use crate::discretization::CellPartition;
use crate::error::Result;
use crate::lloyd::{run_descent, DescentTrace};
use crate::par;
use crate::sampling::{uniform_sample, weighted_d2_sample, RngStream, SensorConfiguration};

/// One row of `trials.csv`. Field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub run_id: usize,
    pub method: Method,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(rename = "initial_H")]
    pub initial_h: f64,
    #[serde(rename = "final_H")]
    pub final_h: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mean_distance: f64,
    /// Largest single-step increase of `H` along the descent (≤ 0 when
    /// the cost never went up).
    #[serde(skip)]
    pub max_cost_increase: f64,
}

/// A trial that could not be completed.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub run_id: usize,
    pub method: Method,
    pub error: String,
}

/// Seed of trial `run_id`; both methods of a run share it and draw from
/// different streams.
pub fn trial_seed(master_seed: u64, run_id: usize) -> u64 {
    master_seed.wrapping_add(run_id as u64)
}

/// A scenario together with its grid cells, built once and shared by all
/// trials.
pub struct Experiment<'a> {
    pub scenario: &'a Scenario,
    pub cells: CellPartition,
}

impl<'a> Experiment<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let cells = CellPartition::build(
            &scenario.domain,
            scenario.epsilon,
            &scenario.density,
            scenario.descent.quadrature,
        )?;
        Ok(Experiment { scenario, cells })
    }

    pub fn rng_stream(&self, method: Method, run_id: usize) -> RngStream {
        RngStream::new(
            trial_seed(self.scenario.master_seed, run_id),
            method.stream(),
        )
    }

    /// Initial configuration of trial `run_id`.
    pub fn initial_configuration(
        &self,
        method: Method,
        run_id: usize,
    ) -> Result<SensorConfiguration> {
        let mut rng = self.rng_stream(method, run_id).rng();
        match method {
            Method::WeightedD2 => weighted_d2_sample(&self.cells, self.scenario.k, &mut rng),
            Method::Uniform => Ok(uniform_sample(
                &self.scenario.domain,
                self.scenario.k,
                &mut rng,
            )),
        }
    }

    /// Initial `H` of trial `run_id` without running the descent.
    pub fn initial_cost(&self, method: Method, run_id: usize) -> Result<f64> {
        let p = self.initial_configuration(method, run_id)?;
        coverage_cost(
            &p.positions,
            &self.scenario.density,
            &self.scenario.domain,
            self.scenario.descent.quadrature,
        )
    }

    /// Runs one trial and keeps the full descent trace.
    pub fn trace(&self, method: Method, run_id: usize) -> Result<(TrialRecord, DescentTrace)> {
        let s = self.scenario;
        let initial = self.initial_configuration(method, run_id)?;
        let trace = run_descent(&initial, &s.density, &s.domain, &s.descent)?;
        let max_cost_increase = trace
            .coverage_history
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let record = TrialRecord {
            run_id,
            method,
            k: s.k,
            epsilon: s.epsilon,
            seed: trial_seed(s.master_seed, run_id),
            initial_h: trace.initial_cost(),
            final_h: trace.final_cost(),
            iterations: trace.iterations,
            converged: trace.converged,
            mean_distance: trace.mean_distance(),
            max_cost_increase,
        };
        Ok((record, trace))
    }

    pub fn run_trial(&self, method: Method, run_id: usize) -> Result<TrialRecord> {
        self.trace(method, run_id).map(|(r, _)| r)
    }

    /// Every (method, run) pair of the scenario, ordered by method then run.
    pub fn run(&self) -> ExperimentResult {
        self.run_with(true)
    }

    /// Same as [`Experiment::run`] but strictly sequential.
    pub fn run_sequential(&self) -> ExperimentResult {
        self.run_with(false)
    }

    fn run_with(&self, parallel: bool) -> ExperimentResult {
        let s = self.scenario;
        let jobs: Vec<(Method, usize)> = s
            .methods
            .iter()
            .flat_map(|&m| (0..s.runs).map(move |r| (m, r)))
            .collect();
        let job = |i: usize| self.run_trial(jobs[i].0, jobs[i].1);
        let outcomes = if parallel {
            par::map_range(jobs.len(), job)
        } else {
            par::map_range_seq(jobs.len(), job)
        };
        let mut records = Vec::new();
        let mut failures = Vec::new();
        for ((method, run_id), outcome) in jobs.into_iter().zip(outcomes) {
            match outcome {
                Ok(r) => records.push(r),
                Err(e) => failures.push(TrialFailure {
                    run_id,
                    method,
                    error: e.to_string(),
                }),
            }
        }
        let summary = ScenarioSummary::from_records(&records);
        ExperimentResult {
            records,
            failures,
            summary,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
    pub summary: ScenarioSummary,
}

impl ExperimentResult {
    pub fn records_for(&self, method: Method) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    /// Writes `trials.csv` and `summary.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_trials_csv(dir.join("trials.csv"), &self.records)?;
        self.summary.write_csv(dir.join("summary.csv"))?;
        Ok(())
    }
}

pub fn write_trials_csv(path: impl AsRef<Path>, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Sample mean and standard deviation (n − 1 divisor; 0 for one sample).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Stat {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len();
        if n == 0 {
            return Stat {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, sd }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub runs: usize,
    pub converged: usize,
    pub initial_h: Stat,
    pub final_h: Stat,
    pub mean_distance: Stat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSummary {
    pub k: usize,
    pub epsilon: f64,
    pub methods: Vec<MethodSummary>,
    /// `(H_U − H_D²) / H_U · 100` on mean initial costs.
    pub improvement_initial_pct: Option<f64>,
    /// `(d_U − d_D²) / d_U · 100` on mean distances.
    pub improvement_distance_pct: Option<f64>,
}

pub fn improvement_pct(uniform: f64, weighted: f64) -> f64 {
    (uniform - weighted) / uniform * 100.0
}

impl ScenarioSummary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
        methods.sort();
        methods.dedup();
        let methods: Vec<MethodSummary> = methods
            .into_iter()
            .map(|m| {
                let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.method == m).collect();
                MethodSummary {
                    method: m,
                    runs: rs.len(),
                    converged: rs.iter().filter(|r| r.converged).count(),
                    initial_h: Stat::of(rs.iter().map(|r| r.initial_h)),
                    final_h: Stat::of(rs.iter().map(|r| r.final_h)),
                    mean_distance: Stat::of(rs.iter().map(|r| r.mean_distance)),
                }
            })
            .collect();
        let get = |m: Method| methods.iter().find(|s| s.method == m);
        let (improvement_initial_pct, improvement_distance_pct) =
            match (get(Method::Uniform), get(Method::WeightedD2)) {
                (Some(u), Some(d)) => (
                    Some(improvement_pct(u.initial_h.mean, d.initial_h.mean)),
                    Some(improvement_pct(u.mean_distance.mean, d.mean_distance.mean)),
                ),
                _ => (None, None),
            };
        let (k, epsilon) = records.first().map_or((0, f64::NAN), |r| (r.k, r.epsilon));
        ScenarioSummary {
            k,
            epsilon,
            methods,
            improvement_initial_pct,
            improvement_distance_pct,
        }
    }

    pub fn method(&self, m: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "method",
            "k",
            "epsilon",
            "runs",
            "converged",
            "initial_H_mean",
            "initial_H_sd",
            "final_H_mean",
            "final_H_sd",
            "mean_distance_mean",
            "mean_distance_sd",
            "improvement_initial_pct",
            "improvement_distance_pct",
        ])?;
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        for s in &self.methods {
            w.write_record([
                s.method.to_string(),
                self.k.to_string(),
                self.epsilon.to_string(),
                s.runs.to_string(),
                s.converged.to_string(),
                s.initial_h.mean.to_string(),
                s.initial_h.sd.to_string(),
                s.final_h.mean.to_string(),
                s.final_h.sd.to_string(),
                s.mean_distance.mean.to_string(),
                s.mean_distance.sd.to_string(),
                opt(self.improvement_initial_pct),
                opt(self.improvement_distance_pct),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl std::fmt::Display for ScenarioSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "k = {}, epsilon = {}", self.k, self.epsilon)?;
        writeln!(
            f,
            "{:<12} {:>5} {:>20} {:>20} {:>20}",
            "method", "runs", "initial H", "final H", "distance/sensor"
        )?;
        for s in &self.methods {
            writeln!(
                f,
                "{:<12} {:>5} {:>11.4} ± {:<6.4} {:>11.4} ± {:<6.4} {:>11.4} ± {:<6.4}",
                s.method.as_str(),
                s.runs,
                s.initial_h.mean,
                s.initial_h.sd,
                s.final_h.mean,
                s.final_h.sd,
                s.mean_distance.mean,
                s.mean_distance.sd
            )?;
        }
        if let (Some(i), Some(d)) = (self.improvement_initial_pct, self.improvement_distance_pct) {
            writeln!(f, "improvement: initial H {i:.1}%, distance {d:.1}%")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_sd_convention() {
        let s = Stat::of([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(Stat::of([7.0]).sd, 0.0);
    }

    #[test]
    fn improvement_formula() {
        assert!((improvement_pct(0.0372, 0.0235) - 36.827_956_989_247_31).abs() < 1e-9);
    }

    #[test]
    fn trial_seeds_are_distinct_per_run() {
        assert_ne!(trial_seed(5, 0), trial_seed(5, 1));
        assert_eq!(trial_seed(u64::MAX, 1), 0);
    }
}
