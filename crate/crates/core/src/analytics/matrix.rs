//! State vectors and the selection (M) and approval (A) matrices.
//!
//! Rows index the parent's state and columns the child's state, so that
//! `(M ⊙ A)[u][v]` is the probability that a parent in state `u` names a child
//! in state `v` who then approves it.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::AgentState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector<const N: usize>(pub [f64; N]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[f64; N]; N]);

pub type StateVector = Vector<6>;
pub type StateMatrix = Matrix<6>;

impl<const N: usize> Vector<N> {
    pub fn ones() -> Self {
        Self([1.0; N])
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Row vector times matrix.
    pub fn times(&self, m: &Matrix<N>) -> Self {
        let mut out = [0.0; N];
        for (u, &x) in self.0.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (v, acc) in out.iter_mut().enumerate() {
                *acc += x * m.0[u][v];
            }
        }
        Self(out)
    }
}

impl Index<AgentState> for StateVector {
    type Output = f64;

    fn index(&self, state: AgentState) -> &f64 {
        &self.0[state.index()]
    }
}

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Self([[0.0; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn hadamard(&self, other: &Self) -> Self {
        let mut out = *self;
        for (row, other_row) in out.0.iter_mut().zip(other.0.iter()) {
            for (x, y) in row.iter_mut().zip(other_row.iter()) {
                *x *= y;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * other.0[k][j];
                }
            }
        }
        out
    }

    pub fn pow(&self, exponent: usize) -> Self {
        (0..exponent).fold(Self::identity(), |acc, _| acc.matmul(self))
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        self.0[row].iter().sum()
    }

    pub fn get(&self, parent: usize, child: usize) -> f64 {
        self.0[parent][child]
    }
}

impl Index<(AgentState, AgentState)> for StateMatrix {
    type Output = f64;

    fn index(&self, (parent, child): (AgentState, AgentState)) -> &f64 {
        &self.0[parent.index()][child.index()]
    }
}

impl<const N: usize> fmt::Display for Matrix<N> {
    /// Fixed-precision table, one row per parent state.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let precision = f.precision().unwrap_or(4);
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$.precision$}", width = precision + 3)).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Probabilities of being honest (`p_h`) and coerced (`p_c`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub p_h: f64,
    pub p_c: f64,
}

impl Mix {
    pub fn new(p_h: f64, p_c: f64) -> Result<Self> {
        for (name, p) in [("p_h", p_h), ("p_c", p_c)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(Self { p_h, p_c })
    }

    /// Probability that a randomly drawn agent has the attributes of `state`.
    fn attribute_probability(&self, state: AgentState) -> f64 {
        let a = state.attributes();
        let honesty = if a.honest { self.p_h } else { 1.0 - self.p_h };
        let coercion = if a.coerced { self.p_c } else { 1.0 - self.p_c };
        honesty * coercion
    }
}

/// Distribution of the prover's state: dishonest provers always root their
/// tree at the claimed position, so S2 and S6 carry no mass.
pub fn root_state_vector(mix: Mix) -> StateVector {
    let mut v = [0.0; 6];
    for state in AgentState::ALL {
        if !state.attributes().honest && state.claims_true_position() {
            continue;
        }
        v[state.index()] = mix.attribute_probability(state);
    }
    Vector(v)
}

/// Whether a parent in `parent` state can name a child appearing in `child` state.
///
/// Non-coerced parents see dishonest agents only at their real positions;
/// coerced parents see them only at their claimed positions. S2 and S6 never
/// name children.
fn selectable(parent: AgentState, child: AgentState) -> bool {
    use AgentState::*;
    if matches!(parent, S2 | S6) {
        return false;
    }
    let child_attrs = child.attributes();
    if child_attrs.honest {
        return true;
    }
    let parent_coerced = parent.attributes().coerced;
    child.claims_true_position() != parent_coerced
}

/// Selection matrix `m_{u,v} = P(alpha_c) P(beta_c) P(gamma_c)`, where the
/// position factor is 0 or 1 depending on the parent's coercion.
pub fn selection_matrix(mix: Mix) -> StateMatrix {
    let mut m = Matrix::zeros();
    for parent in AgentState::ALL {
        for child in AgentState::ALL {
            if selectable(parent, child) {
                m.0[parent.index()][child.index()] = mix.attribute_probability(child);
            }
        }
    }
    m
}

/// Child-approves-parent matrix, parent rows and child columns.
pub fn approval_matrix() -> StateMatrix {
    Matrix([
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 1.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ])
}

/// `M ⊙ A`.
pub fn approval_transition(mix: Mix) -> StateMatrix {
    selection_matrix(mix).hadamard(&approval_matrix())
}

/// Probability that a prover in state `state` receives an approval from a
/// witness at depth `depth`: `e_u^T (M ⊙ A)^d 1`.
pub fn approval_probability(state: AgentState, depth: usize, mix: Mix) -> Result<f64> {
    if depth == 0 {
        return Err(Error::InvalidParameter("approval depth must be at least 1".into()));
    }
    let power = approval_transition(mix).pow(depth);
    Ok(power.row_sum(state.index()).clamp(0.0, 1.0))
}
