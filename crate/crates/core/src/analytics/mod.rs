//! Closed-form probability model of the protocol.

mod criteria;
mod edges;
mod matrix;
pub mod numeric;
mod uniqueness;

pub use criteria::{
    criterion1_probability, criterion2_from_lambda, criterion2_probability, criterion3_probability,
    criterion_breakdown, surface_point, theoretical_surfaces, tpop_probability, CriterionBreakdown, Density,
    ModelParams, SurfacePoint, SurfaceSet,
};
pub use edges::{
    expected_edges, optimal_honest_edge_points, platoon_expected_edges, platoon_matrices, OptimalPoint,
    PLATOON_STATES,
};
pub use matrix::{
    approval_matrix, approval_probability, approval_transition, root_state_vector, selection_matrix, Matrix, Mix,
    StateMatrix, StateVector, Vector,
};
pub use uniqueness::{
    checked_kappa, distance_pdf, kappa, overlap_fraction, square_mean_degree, uniqueness_probability,
    UniquenessShape, QUADRATURE_TOLERANCE,
};

use crate::error::{Error, Result};

/// Grid `0, step, 2 step, ..., 1`. `step` must divide 1.
pub fn grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!("grid step must lie in (0, 1], got {step}")));
    }
    let cells = (1.0 / step).round();
    if (cells * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("grid step {step} does not divide 1")));
    }
    let cells = cells as usize;
    Ok((0..=cells).map(|i| i as f64 / cells as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values() {
        let g = grid(0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert!(grid(0.3).is_err());
        assert!(grid(0.0).is_err());
    }
}
