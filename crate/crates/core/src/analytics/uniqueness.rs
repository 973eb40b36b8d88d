//! Probability that a randomly built tree names only distinct agents.

use std::f64::consts::PI;

use crate::analytics::numeric::adaptive_simpson;
use crate::error::{Error, Result};
use crate::types::ThetaParams;

/// Absolute tolerance of the uniqueness integrals.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Probability that `y` agents drawn with replacement from `k_mean` neighbours are
/// distinct from each other and from `n` agents already eliminated:
/// `(k-n)(k-n-1)...(k-n-y+1) / k^y`.
///
/// Returns 0 outside the domain `k_mean > n + y - 1`.
pub fn kappa(k_mean: f64, n: usize, y: usize) -> f64 {
    checked_kappa(k_mean, n, y).unwrap_or(0.0)
}

pub fn checked_kappa(k_mean: f64, n: usize, y: usize) -> Result<f64> {
    if !(k_mean.is_finite() && k_mean > (n + y) as f64 - 1.0 && k_mean > 0.0) {
        return Err(Error::Domain { function: "kappa", value: k_mean });
    }
    let numerator: f64 = (0..y).map(|i| k_mean - (n + i) as f64).product();
    Ok(numerator / k_mean.powi(y as i32))
}

fn check_separation(function: &'static str, delta: f64, r: f64) -> Result<()> {
    if r.is_nan() || r <= 0.0 || !(0.0..=2.0 * r).contains(&delta) {
        return Err(Error::Domain { function, value: delta });
    }
    Ok(())
}

/// Density of the distance between two uniform points in a disk of radius `r`.
pub fn distance_pdf(delta: f64, r: f64) -> Result<f64> {
    check_separation("distance_pdf", delta, r)?;
    Ok(distance_pdf_unchecked(delta, r))
}

fn distance_pdf_unchecked(delta: f64, r: f64) -> f64 {
    let ratio = (delta / (2.0 * r)).min(1.0);
    let value = 4.0 * delta / (PI * r * r) * ratio.acos()
        - 2.0 * delta * delta / (PI * r.powi(3)) * (1.0 - ratio * ratio).max(0.0).sqrt();
    value.max(0.0)
}

/// Fraction of a radius-`r` disk covered by a second one whose centre is `delta` away.
pub fn overlap_fraction(delta: f64, r: f64) -> Result<f64> {
    check_separation("overlap_fraction", delta, r)?;
    Ok(overlap_fraction_unchecked(delta, r))
}

fn overlap_fraction_unchecked(delta: f64, r: f64) -> f64 {
    if delta >= 2.0 * r {
        return 0.0;
    }
    let lens = 2.0 * r * r * (delta / (2.0 * r)).acos() - 0.5 * delta * (4.0 * r * r - delta * delta).max(0.0).sqrt();
    (lens / (PI * r * r)).clamp(0.0, 1.0)
}

/// Tree shapes with a closed-form uniqueness approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessShape {
    /// `h = 1`, `w_1` children of the prover.
    Star(usize),
    /// `h = 2`, `w_1 = w_2 = 2`.
    BinaryTwoLevel,
}

impl UniquenessShape {
    pub fn of(theta: &ThetaParams) -> Result<Self> {
        match theta.branching() {
            [w] => Ok(Self::Star(*w)),
            [2, 2] => Ok(Self::BinaryTwoLevel),
            _ => Err(Error::UnsupportedShape(theta.to_string())),
        }
    }
}

/// Approximate probability that a tree with shape `theta` holds distinct agents
/// when every agent has `k_mean` neighbours on average and range `r`.
pub fn uniqueness_probability(theta: &ThetaParams, k_mean: f64, r: f64) -> Result<f64> {
    if !(k_mean.is_finite() && k_mean > 0.0) {
        return Err(Error::Domain { function: "uniqueness_probability", value: k_mean });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("range must be positive, got {r}")));
    }
    match UniquenessShape::of(theta)? {
        UniquenessShape::Star(w) => Ok(kappa(k_mean, 0, w)),
        UniquenessShape::BinaryTwoLevel => Ok(kappa(k_mean, 0, 2) * leaves_distinct(k_mean, r)),
    }
}

/// `P(L2 | L0, L1)`: the four leaves are distinct from each other and from the
/// first three agents. Split at `delta = r`, where the second child stops being
/// a neighbour of the first.
fn leaves_distinct(k: f64, r: f64) -> f64 {
    let near = |delta: f64| {
        let a = overlap_fraction_unchecked(delta, r);
        let b = 1.0 - a;
        distance_pdf_unchecked(delta, r)
            * kappa(k, 2, 2)
            * (b * b * kappa(k, 2, 2) + 2.0 * b * a * kappa(k, 3, 2) + a * a * kappa(k, 4, 2))
    };
    let far = |delta: f64| {
        let a = overlap_fraction_unchecked(delta, r);
        let b = 1.0 - a;
        distance_pdf_unchecked(delta, r)
            * kappa(k, 1, 2)
            * (b * b * kappa(k, 1, 2) + 2.0 * b * a * kappa(k, 2, 2) + a * a * kappa(k, 3, 2))
    };
    let half = 0.5 * QUADRATURE_TOLERANCE;
    adaptive_simpson(near, 0.0, r, half) + adaptive_simpson(far, r, 2.0 * r, half)
}

/// Mean degree of a random geometric graph of `n_agents` uniform points in a
/// `side x side` square with connection radius `r`, boundary effects included.
///
/// Uses the exact probability that two uniform points in a square lie within
/// `r` of each other (`r <= side`).
pub fn square_mean_degree(n_agents: usize, r: f64, side: f64) -> f64 {
    let s = (r / side).min(1.0);
    let p = PI * s * s - 8.0 / 3.0 * s.powi(3) + 0.5 * s.powi(4);
    n_agents.saturating_sub(1) as f64 * p
}
