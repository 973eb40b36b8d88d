//! Expected number of confirmed edges, for ordinary and platoon trees.

use serde::{Deserialize, Serialize};

use crate::analytics::matrix::{approval_transition, root_state_vector, selection_matrix, Matrix, Mix, Vector};
use crate::types::{AgentState, ThetaParams};

/// `sum_d n_d <I_0 (M ⊙ A)^d, 1>`.
pub fn expected_edges(theta: &ThetaParams, mix: Mix) -> f64 {
    propagate(root_state_vector(mix), &approval_transition(mix), theta)
}

fn propagate<const N: usize>(root: Vector<N>, transition: &Matrix<N>, theta: &ThetaParams) -> f64 {
    let mut state = root;
    theta
        .level_sizes()
        .into_iter()
        .map(|n_d| {
            state = state.times(transition);
            n_d as f64 * state.sum()
        })
        .sum()
}

/// States tracked by the platoon model, in order.
pub const PLATOON_STATES: [AgentState; 3] = [AgentState::S1, AgentState::S4, AgentState::S5];

/// Platoon root vector, selection matrix and approval matrix over `{s1, s4, s5}`.
/// The root vector is not renormalized.
pub fn platoon_matrices(mix: Mix) -> (Vector<3>, Matrix<3>, Matrix<3>) {
    let root = root_state_vector(mix);
    let m = selection_matrix(mix);
    let mut initial = [0.0; 3];
    let mut selection = Matrix::<3>::zeros();
    for (i, &u) in PLATOON_STATES.iter().enumerate() {
        if u != AgentState::S4 {
            initial[i] = root[u];
        }
        for (j, &v) in PLATOON_STATES.iter().enumerate() {
            selection.0[i][j] = m[(u, v)];
        }
    }
    let approval = Matrix([[0.0, 1.0, 0.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]);
    (Vector(initial), selection, approval)
}

pub fn platoon_expected_edges(theta: &ThetaParams, mix: Mix) -> f64 {
    let (root, selection, approval) = platoon_matrices(mix);
    propagate(root, &selection.hadamard(&approval), theta)
}

/// Grid point where `P(parent in u) * m_{u,v}` peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalPoint {
    pub parent: AgentState,
    pub child: AgentState,
    pub p_h: f64,
    pub p_c: f64,
    pub value: f64,
}

/// Maximizes the probability of honest-to-honest edges `(s3|s4) -> (s3|s4)` over a
/// 101 x 101 grid. Ties keep the first point in `p_h`-major order.
pub fn optimal_honest_edge_points() -> Vec<OptimalPoint> {
    use AgentState::{S3, S4};
    const STEPS: usize = 100;
    let pairs = [(S3, S3), (S3, S4), (S4, S3), (S4, S4)];
    pairs
        .iter()
        .map(|&(parent, child)| {
            let mut best = OptimalPoint { parent, child, p_h: 0.0, p_c: 0.0, value: f64::NEG_INFINITY };
            for i in 0..=STEPS {
                for j in 0..=STEPS {
                    let (p_h, p_c) = (i as f64 / STEPS as f64, j as f64 / STEPS as f64);
                    let mix = Mix { p_h, p_c };
                    let value = root_state_vector(mix)[parent] * selection_matrix(mix)[(parent, child)];
                    if value > best.value {
                        best = OptimalPoint { parent, child, p_h, p_c, value };
                    }
                }
            }
            best
        })
        .collect()
}
