//! Three-observable margin over angle-parametrized settings.
//!
//! With `â = ẑ`, `b̂ = (sin θ, 0, cos θ)` and
//! `ĉ = (sin θ′ cos φ, sin θ′ sin φ, cos θ′)`, the singlet correlators turn
//! the inequality margin into
//!
//! ```text
//! m(θ, θ′, φ) = (1 − sin θ sin θ′ cos φ − cos θ cos θ′) − |cos θ − cos θ′|
//! ```
//!
//! which is negative exactly where the inequality fails. Angles are
//! restricted to θ, θ′ ∈ [0, π/2] and φ ∈ [0, π).

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inequalities::bell1964_margin;
use crate::quantum::{correlator, singlet, UnitVector3};

const DOMAIN_SLACK: f64 = 1e-12;

/// A final node this close to `end`, as a fraction of `step`, is snapped onto it.
const END_SNAP: f64 = 1e-3;

fn check_polar(name: &'static str, value: f64) -> Result<()> {
    if !(-DOMAIN_SLACK..=FRAC_PI_2 + DOMAIN_SLACK).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: FRAC_PI_2,
        });
    }
    Ok(())
}

fn check_azimuth(value: f64) -> Result<()> {
    if !(-DOMAIN_SLACK..PI).contains(&value) {
        return Err(Error::OutOfRange {
            name: "phi",
            value,
            min: 0.0,
            max: PI,
        });
    }
    Ok(())
}

/// Evenly spaced nodes `start, start + step, …` up to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    start: f64,
    end: f64,
    step: f64,
}

impl AxisRange {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if !start.is_finite() || !end.is_finite() || end < start {
            return Err(Error::InvalidGrid(format!("empty range [{start}, {end}]")));
        }
        Ok(Self { start, end, step })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.step + END_SNAP).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node `k` is `start + k·step`, capped at `end`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| (self.start + k as f64 * self.step).min(self.end))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    theta: AxisRange,
    theta_prime: AxisRange,
    phi: f64,
}

impl GridSpec {
    pub fn new(theta: AxisRange, theta_prime: AxisRange, phi: f64) -> Result<Self> {
        check_polar("theta", theta.start)?;
        check_polar("theta", theta.end)?;
        check_polar("theta_prime", theta_prime.start)?;
        check_polar("theta_prime", theta_prime.end)?;
        check_azimuth(phi)?;
        Ok(Self {
            theta,
            theta_prime,
            phi,
        })
    }

    /// Both polar angles over all of [0, π/2] with the same step.
    pub fn full(step: f64, phi: f64) -> Result<Self> {
        let axis = AxisRange::new(0.0, FRAC_PI_2, step)?;
        Self::new(axis, axis, phi)
    }

    pub fn theta(&self) -> &AxisRange {
        &self.theta
    }

    pub fn theta_prime(&self) -> &AxisRange {
        &self.theta_prime
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapePoint {
    pub theta: f64,
    pub theta_prime: f64,
    pub margin: f64,
}

/// `(â, b̂, ĉ)` for the given angles.
pub fn directions_from_angles(
    theta: f64,
    theta_prime: f64,
    phi: f64,
) -> Result<(UnitVector3, UnitVector3, UnitVector3)> {
    check_polar("theta", theta)?;
    check_polar("theta_prime", theta_prime)?;
    check_azimuth(phi)?;
    Ok((
        UnitVector3::z_axis(),
        UnitVector3::from_spherical(theta, 0.0),
        UnitVector3::from_spherical(theta_prime, phi),
    ))
}

/// Closed-form margin; negative means the inequality is violated.
pub fn parametrized_margin(theta: f64, theta_prime: f64, phi: f64) -> Result<f64> {
    check_polar("theta", theta)?;
    check_polar("theta_prime", theta_prime)?;
    check_azimuth(phi)?;
    Ok(margin_unchecked(theta, theta_prime, phi))
}

fn margin_unchecked(theta: f64, theta_prime: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = theta_prime.sin_cos();
    (1.0 - st * sp * phi.cos() - ct * cp) - (ct - cp).abs()
}

/// The same margin computed through directions, Born-rule singlet
/// correlators and [`bell1964_margin`].
pub fn cross_check_margin(theta: f64, theta_prime: f64, phi: f64) -> Result<f64> {
    let (a, b, c) = directions_from_angles(theta, theta_prime, phi)?;
    let psi = singlet();
    bell1964_margin(
        correlator(&psi, &a, &b)?,
        correlator(&psi, &a, &c)?,
        correlator(&psi, &b, &c)?,
    )
}

/// Margin at every node, θ outer and θ′ inner.
pub fn scan_landscape(grid: &GridSpec) -> Vec<LandscapePoint> {
    let theta_primes = grid.theta_prime.nodes();
    let rows: Vec<Vec<LandscapePoint>> = grid
        .theta
        .nodes()
        .into_par_iter()
        .map(|theta| {
            theta_primes
                .iter()
                .map(|&theta_prime| LandscapePoint {
                    theta,
                    theta_prime,
                    margin: margin_unchecked(theta, theta_prime, grid.phi),
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Smallest margin on the grid.
///
/// The margin is symmetric under `θ ↔ θ′`, so minima come in mirrored pairs
/// with bit-identical values. Ties prefer nodes with `θ ≥ θ′`, then the
/// first node in row-major order.
pub fn find_min_margin(grid: &GridSpec) -> LandscapePoint {
    let points = scan_landscape(grid);
    let lower_half = |p: &LandscapePoint| p.theta >= p.theta_prime;
    let mut best = points[0];
    for p in &points[1..] {
        if p.margin < best.margin
            || (p.margin == best.margin && lower_half(p) && !lower_half(&best))
        {
            best = *p;
        }
    }
    best
}
