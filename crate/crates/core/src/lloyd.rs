//! Discrete-time Lloyd descent toward a centroidal Voronoi configuration.
//!
//! Each sensor follows `ṗ = −K (p − c)`, where `c` is the mass centroid of
//! its current Voronoi cell, integrated with explicit Euler steps of size
//! `dt`. With `K·dt ≤ 1` a step never moves a sensor past its centroid.

use crate::coverage::CoverageState;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};
use crate::quadrature::Quadrature;
use crate::sampling::SensorConfiguration;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentSettings {
    pub gain: f64,
    pub dt: f64,
    /// Stop once the mean per-sensor L1 displacement of a step drops below this.
    pub convergence_threshold: f64,
    pub max_iterations: usize,
    pub quadrature: Quadrature,
}

impl Default for DescentSettings {
    fn default() -> Self {
        DescentSettings {
            gain: 10.0,
            dt: 0.01,
            convergence_threshold: 1e-4,
            max_iterations: 10_000,
            quadrature: Quadrature::default(),
        }
    }
}

impl DescentSettings {
    /// Fraction of the way to the centroid covered by one step.
    pub fn step_fraction(&self) -> f64 {
        self.gain * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "gain must be positive, got {}",
                self.gain
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.step_fraction() > 1.0 + 1e-12 {
            return Err(Error::InvalidSettings(format!(
                "gain * dt = {} overshoots the centroid",
                self.step_fraction()
            )));
        }
        if self.convergence_threshold.is_nan() || self.convergence_threshold < 0.0 {
            return Err(Error::InvalidSettings(
                "negative convergence threshold".into(),
            ));
        }
        Ok(())
    }
}

/// Full record of one descent.
#[derive(Clone, Debug)]
pub struct DescentTrace {
    /// `iterations + 1` configurations, starting with the initial one.
    pub iterates: Vec<SensorConfiguration>,
    /// `H` of each iterate.
    pub coverage_history: Vec<f64>,
    /// Path length of each sensor.
    pub per_sensor_distance: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl DescentTrace {
    pub fn initial(&self) -> &SensorConfiguration {
        &self.iterates[0]
    }

    pub fn last(&self) -> &SensorConfiguration {
        self.iterates.last().expect("trace is never empty")
    }

    pub fn initial_cost(&self) -> f64 {
        self.coverage_history[0]
    }

    pub fn final_cost(&self) -> f64 {
        *self.coverage_history.last().expect("trace is never empty")
    }

    pub fn mean_distance(&self) -> f64 {
        let k = self.per_sensor_distance.len();
        self.per_sensor_distance.iter().sum::<f64>() / k as f64
    }

    /// Trajectory of sensor `i` through all iterates.
    pub fn trajectory(&self, i: usize) -> impl Iterator<Item = Point> + '_ {
        self.iterates.iter().map(move |c| c.positions[i])
    }
}

/// Moves each sensor a fraction `K·dt` of the way to its cell's centroid.
/// Sensors whose cell carries no mass stay put.
fn advance(state: &CoverageState, sites: &[Point], fraction: f64) -> (Vec<Point>, f64) {
    let mut l1 = 0.0;
    let next: Vec<Point> = sites
        .iter()
        .zip(&state.moments)
        .map(|(&p, m)| match m.mass_centroid() {
            Some(c) => {
                let step = (c - p) * fraction;
                l1 += step.l1();
                p + step
            }
            None => p,
        })
        .collect();
    let mean = l1 / sites.len() as f64;
    (next, mean)
}

/// One descent step. Returns the new configuration and the mean L1 norm
/// of the per-sensor displacement.
pub fn lloyd_step<D: Density + ?Sized>(
    config: &SensorConfiguration,
    field: &D,
    domain: &ConvexPolygon,
    settings: &DescentSettings,
) -> Result<(SensorConfiguration, f64)> {
    settings.validate()?;
    let state = CoverageState::new(&config.positions, field, domain, settings.quadrature)?;
    let (next, mean) = advance(&state, &config.positions, settings.step_fraction());
    Ok((next.into(), mean))
}

/// Iterates [`lloyd_step`] until the mean L1 displacement falls below the
/// threshold or the iteration budget runs out. Running out of budget is
/// reported through `converged = false`, not as an error.
pub fn run_descent<D: Density + ?Sized>(
    initial: &SensorConfiguration,
    field: &D,
    domain: &ConvexPolygon,
    settings: &DescentSettings,
) -> Result<DescentTrace> {
    settings.validate()?;
    let k = initial.len();
    let fraction = settings.step_fraction();
    let mut current = initial.positions.clone();
    let mut state = CoverageState::new(&current, field, domain, settings.quadrature)?;
    let mut iterates = vec![initial.clone()];
    let mut coverage_history = vec![state.cost(&current)];
    let mut per_sensor_distance = vec![0.0; k];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        let (next, mean_l1) = advance(&state, &current, fraction);
        for ((d, a), b) in per_sensor_distance.iter_mut().zip(&current).zip(&next) {
            *d += a.dist(*b);
        }
        iterations += 1;
        current = next;
        // Sensors stay in the convex domain in exact arithmetic; a rounding
        // drift of an ulp outside is pulled back by the containment slack.
        state = CoverageState::new(&current, field, domain, settings.quadrature)?;
        coverage_history.push(state.cost(&current));
        iterates.push(SensorConfiguration::new(current.clone()));
        if mean_l1 < settings.convergence_threshold {
            converged = true;
            break;
        }
    }

    Ok(DescentTrace {
        iterates,
        coverage_history,
        per_sensor_distance,
        converged,
        iterations,
    })
}
