//! Criterion probabilities, their product, and the TP/TN surfaces.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::matrix::{approval_transition, Matrix, Mix};
use crate::analytics::numeric::{binomial_upper_tail, poisson_upper_tail};
use crate::analytics::uniqueness::uniqueness_probability;
use crate::analytics::grid;
use crate::error::{Error, Result};
use crate::types::{AgentState, ThetaParams};

/// Agent density assumed by the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    /// Criteria 2 and 3 hold with certainty.
    Infinite,
    /// `mu` agents per unit area, range of sight `r`.
    Finite { mu: f64, r: f64 },
}

impl Density {
    pub fn finite(mu: f64, r: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("density must be positive, got {mu}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("range of sight must be positive, got {r}")));
        }
        Ok(Self::Finite { mu, r })
    }

    /// Expected number of neighbours `lambda = mu * pi * r^2`.
    pub fn lambda(&self) -> f64 {
        match *self {
            Self::Infinite => f64::INFINITY,
            Self::Finite { mu, r } => mu * PI * r * r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mix: Mix,
    pub theta: ThetaParams,
    pub density: Density,
}

impl ModelParams {
    pub fn new(p_h: f64, p_c: f64, theta: ThetaParams, density: Density) -> Result<Self> {
        Ok(Self { mix: Mix::new(p_h, p_c)?, theta, density })
    }
}

/// `P(level d receives at least ceil(t n_d) approvals)`, multiplied over levels,
/// with each approval at depth `d` independent with probability `P_{u,d}`.
pub fn criterion1_probability(state: AgentState, theta: &ThetaParams, mix: Mix) -> f64 {
    criterion1_with(state, theta, &approval_transition(mix))
}

fn criterion1_with(state: AgentState, theta: &ThetaParams, transition: &Matrix<6>) -> f64 {
    let mut power = Matrix::identity();
    let mut product = 1.0;
    for n_d in theta.level_sizes() {
        power = power.matmul(transition);
        let p = power.row_sum(state.index()).clamp(0.0, 1.0);
        product *= binomial_upper_tail(n_d, theta.quota(n_d), p);
        if product == 0.0 {
            break;
        }
    }
    product
}

/// Probability that every parent finds enough neighbours under a Poisson point
/// process with mean `lambda = mu pi r^2`.
pub fn criterion2_probability(theta: &ThetaParams, mu: f64, r: f64) -> Result<f64> {
    let lambda = Density::finite(mu, r)?.lambda();
    Ok(criterion2_from_lambda(theta, lambda))
}

pub fn criterion2_from_lambda(theta: &ThetaParams, lambda: f64) -> f64 {
    let sizes = theta.level_sizes();
    let mut parents = 1usize;
    let mut product = 1.0;
    for &needed in &sizes {
        product *= poisson_upper_tail(lambda, needed).powi(parents as i32);
        parents = needed;
    }
    product
}

/// Criterion 3: the tree holds distinct agents. Requires a supported shape.
pub fn criterion3_probability(theta: &ThetaParams, density: Density) -> Result<f64> {
    match density {
        Density::Infinite => Ok(1.0),
        Density::Finite { r, .. } => uniqueness_probability(theta, density.lambda(), r),
    }
}

/// The three criterion probabilities and their product for one prover state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionBreakdown {
    pub criterion1: f64,
    pub criterion2: f64,
    pub criterion3: f64,
}

impl CriterionBreakdown {
    pub fn product(&self) -> f64 {
        self.criterion1 * self.criterion2 * self.criterion3
    }
}

pub fn criterion_breakdown(state: AgentState, model: &ModelParams) -> Result<CriterionBreakdown> {
    let (criterion2, criterion3) = density_factors(&model.theta, model.density)?;
    Ok(CriterionBreakdown {
        criterion1: criterion1_probability(state, &model.theta, model.mix),
        criterion2,
        criterion3,
    })
}

fn density_factors(theta: &ThetaParams, density: Density) -> Result<(f64, f64)> {
    match density {
        Density::Infinite => Ok((1.0, 1.0)),
        Density::Finite { .. } => {
            Ok((criterion2_from_lambda(theta, density.lambda()), criterion3_probability(theta, density)?))
        }
    }
}

/// Probability that a prover in `state` is declared truthful.
pub fn tpop_probability(state: AgentState, model: &ModelParams) -> Result<f64> {
    Ok(criterion_breakdown(state, model)?.product())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub p_h: f64,
    pub p_c: f64,
    /// Probability an honest prover is accepted.
    pub tp: f64,
    /// Probability a dishonest prover is rejected.
    pub tn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSet {
    pub theta: ThetaParams,
    pub density: Density,
    pub grid_step: f64,
    /// Row-major over `p_h`, then `p_c`.
    pub points: Vec<SurfacePoint>,
}

impl SurfaceSet {
    pub fn at(&self, p_h: f64, p_c: f64) -> Option<&SurfacePoint> {
        self.points.iter().find(|pt| (pt.p_h - p_h).abs() < 1e-9 && (pt.p_c - p_c).abs() < 1e-9)
    }
}

/// TP and TN at one grid point. The root distribution is conditioned on the
/// prover's honesty, which leaves weights `1 - p_c` and `p_c` on the
/// non-coerced and coerced states respectively.
pub fn surface_point(theta: &ThetaParams, mix: Mix, density: Density) -> Result<SurfacePoint> {
    let (c2, c3) = density_factors(theta, density)?;
    let transition = approval_transition(mix);
    let accept = |state| criterion1_with(state, theta, &transition) * c2 * c3;
    let tp = (1.0 - mix.p_c) * accept(AgentState::S3) + mix.p_c * accept(AgentState::S4);
    let fooled = (1.0 - mix.p_c) * accept(AgentState::S1) + mix.p_c * accept(AgentState::S5);
    Ok(SurfacePoint { p_h: mix.p_h, p_c: mix.p_c, tp, tn: 1.0 - fooled })
}

pub fn theoretical_surfaces(theta: &ThetaParams, grid_step: f64, density: Density) -> Result<SurfaceSet> {
    let axis = grid(grid_step)?;
    // fail early on unsupported shapes rather than per cell
    density_factors(theta, density)?;
    let cells: Vec<(f64, f64)> = axis.iter().flat_map(|&ph| axis.iter().map(move |&pc| (ph, pc))).collect();
    let points = cells
        .par_iter()
        .map(|&(p_h, p_c)| surface_point(theta, Mix::new(p_h, p_c)?, density))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceSet { theta: theta.clone(), density, grid_step, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use AgentState::*;

    fn mix(p_h: f64, p_c: f64) -> Mix {
        Mix::new(p_h, p_c).unwrap()
    }

    #[test]
    fn criterion1_closed_forms() {
        let wide = ThetaParams::wide(1.0);
        let deep = ThetaParams::deep(1.0);
        let m = mix(0.6, 0.3);
        let t = approval_transition(m);
        let p1 = t.row_sum(S4.index());
        let p2 = t.pow(2).row_sum(S4.index());
        assert!((criterion1_probability(S4, &wide, m) - p1.powi(6)).abs() < 1e-14);
        assert!((criterion1_probability(S4, &deep, m) - p1.powi(2) * p2.powi(4)).abs() < 1e-14);
        assert_eq!(criterion1_probability(S3, &deep, mix(1.0, 0.0)), 1.0);
    }

    #[test]
    fn criterion2_examples() {
        let deep = ThetaParams::deep(1.0);
        assert!(criterion2_probability(&deep, 140.0, 1.0).unwrap() > 1.0 - 1e-12);
        assert!(criterion2_from_lambda(&deep, 1e-9) < 1e-12);
        let wide = ThetaParams::wide(1.0);
        let lambda = 3.5 * PI;
        let cdf5: f64 = (0..6).map(|k| (-lambda).exp() * lambda.powi(k) / (1..=k).product::<i32>().max(1) as f64).sum();
        assert!((criterion2_probability(&wide, 3.5, 1.0).unwrap() - (1.0 - cdf5)).abs() < 1e-12);
        assert!(criterion2_probability(&wide, 0.0, 1.0).is_err());
    }

    #[test]
    fn tpop_reduces_to_criterion1_at_infinite_density() {
        let deep = ThetaParams::deep(1.0);
        let model = ModelParams::new(0.7, 0.4, deep.clone(), Density::Infinite).unwrap();
        for state in [S1, S3, S4, S5] {
            assert_eq!(tpop_probability(state, &model).unwrap(), criterion1_probability(state, &deep, model.mix));
        }
        let dense = ModelParams::new(1.0, 0.0, deep, Density::finite(1e7, 1.0).unwrap()).unwrap();
        assert!(tpop_probability(S3, &dense).unwrap() > 1.0 - 1e-5);
        let sparse = ModelParams::new(1.0, 0.0, ThetaParams::wide(1.0), Density::finite(1e-6, 1.0).unwrap()).unwrap();
        assert!(tpop_probability(S3, &sparse).unwrap() < 1e-12);
    }

    #[test]
    fn surface_corners() {
        for theta in [ThetaParams::wide(1.0), ThetaParams::deep(1.0)] {
            let set = theoretical_surfaces(&theta, 0.1, Density::Infinite).unwrap();
            assert_eq!(set.points.len(), 121);
            assert!((set.at(1.0, 0.0).unwrap().tp - 1.0).abs() < 1e-15);
            assert!((set.at(0.0, 0.0).unwrap().tn - 1.0).abs() < 1e-15);
            // security degrades as coercion grows
            assert!(set.at(0.5, 0.9).unwrap().tn < set.at(0.5, 0.1).unwrap().tn);
            for pt in &set.points {
                assert!((0.0..=1.0).contains(&pt.tp) && (0.0..=1.0).contains(&pt.tn));
            }
        }
    }

    #[test]
    fn unsupported_shape_at_finite_density() {
        let odd = ThetaParams::new(1.0, vec![3, 2]).unwrap();
        assert!(theoretical_surfaces(&odd, 0.5, Density::Infinite).is_ok());
        assert!(theoretical_surfaces(&odd, 0.5, Density::finite(50.0, 1.0).unwrap()).is_err());
    }
}
