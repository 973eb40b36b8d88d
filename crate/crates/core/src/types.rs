//! Domain types shared by the protocol, the analytical model and the simulator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque agent identifier assigned at population generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_squared(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Closed-disk membership: `other` lies within `range` of `self`.
    pub fn within(&self, other: &Position, range: f64) -> bool {
        self.distance_squared(other) <= range * range
    }
}

/// Honesty and coercion attributes of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attributes {
    pub honest: bool,
    pub coerced: bool,
}

/// The six valid (honesty, coercion, claims-true-position) combinations.
///
/// | state | honest | coerced | claims true position |
/// |-------|--------|---------|----------------------|
/// | S1    | no     | no      | no                   |
/// | S2    | no     | no      | yes                  |
/// | S3    | yes    | no      | yes                  |
/// | S4    | yes    | yes     | yes                  |
/// | S5    | no     | yes     | no                   |
/// | S6    | no     | yes     | yes                  |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentState {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl AgentState {
    pub const ALL: [AgentState; 6] = [
        AgentState::S1,
        AgentState::S2,
        AgentState::S3,
        AgentState::S4,
        AgentState::S5,
        AgentState::S6,
    ];

    /// Zero-based index (S1 -> 0).
    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// One-based state number as used in tables (S1 -> 1).
    pub const fn number(self) -> usize {
        self as usize + 1
    }

    pub const fn attributes(self) -> Attributes {
        match self {
            AgentState::S1 | AgentState::S2 => Attributes { honest: false, coerced: false },
            AgentState::S3 => Attributes { honest: true, coerced: false },
            AgentState::S4 => Attributes { honest: true, coerced: true },
            AgentState::S5 | AgentState::S6 => Attributes { honest: false, coerced: true },
        }
    }

    pub const fn claims_true_position(self) -> bool {
        !matches!(self, AgentState::S1 | AgentState::S5)
    }
}

impl fmt::Display for AgentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.number())
    }
}

/// Maps attributes and the truthfulness of the position an agent appears at to its state.
pub fn classify_state(attributes: Attributes, claims_true_position: bool) -> Result<AgentState> {
    use AgentState::*;
    match (attributes.honest, attributes.coerced, claims_true_position) {
        (true, _, false) => Err(Error::ImpossibleState),
        (true, false, true) => Ok(S3),
        (true, true, true) => Ok(S4),
        (false, false, false) => Ok(S1),
        (false, false, true) => Ok(S2),
        (false, true, false) => Ok(S5),
        (false, true, true) => Ok(S6),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: AgentId,
    pub attributes: Attributes,
    pub real_position: Position,
    pub claimed_position: Position,
}

impl Agent {
    pub fn honest(id: AgentId, coerced: bool, position: Position) -> Self {
        Self {
            id,
            attributes: Attributes { honest: true, coerced },
            real_position: position,
            claimed_position: position,
        }
    }

    pub fn dishonest(id: AgentId, coerced: bool, real: Position, claimed: Position) -> Result<Self> {
        if real == claimed {
            return Err(Error::InvalidParameter(format!(
                "dishonest agent {id} must claim a position different from its real one"
            )));
        }
        Ok(Self {
            id,
            attributes: Attributes { honest: false, coerced },
            real_position: real,
            claimed_position: claimed,
        })
    }

    pub fn is_honest(&self) -> bool {
        self.attributes.honest
    }

    pub fn is_coerced(&self) -> bool {
        self.attributes.coerced
    }
}

/// Rectangular environment with a single range of sight shared by every agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub width: f64,
    pub height: f64,
    pub range_of_sight: f64,
    pub agent_count: usize,
}

impl Environment {
    pub fn new(width: f64, height: f64, range_of_sight: f64, agent_count: usize) -> Result<Self> {
        let env = Self { width, height, range_of_sight, agent_count };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0 && self.height.is_finite() && self.height > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "environment must have positive finite size, got {}x{}",
                self.width, self.height
            )));
        }
        if !(self.range_of_sight.is_finite() && self.range_of_sight >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "range of sight must be finite and non-negative, got {}",
                self.range_of_sight
            )));
        }
        if self.agent_count == 0 {
            return Err(Error::InvalidParameter("agent count must be positive".into()));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Agents per unit area.
    pub fn density(&self) -> f64 {
        self.agent_count as f64 / self.area()
    }
}

/// Operating conditions: threshold `t` and per-level branching factors `w_1..w_h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThetaRepr", into = "ThetaRepr")]
pub struct ThetaParams {
    threshold: f64,
    branching: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ThetaRepr {
    t: f64,
    h: usize,
    w: Vec<usize>,
}

impl TryFrom<ThetaRepr> for ThetaParams {
    type Error = Error;

    fn try_from(repr: ThetaRepr) -> Result<Self> {
        if repr.h != repr.w.len() {
            return Err(Error::InvalidParameter(format!(
                "height {} does not match {} branching factors",
                repr.h,
                repr.w.len()
            )));
        }
        ThetaParams::new(repr.t, repr.w)
    }
}

impl From<ThetaParams> for ThetaRepr {
    fn from(theta: ThetaParams) -> Self {
        ThetaRepr { t: theta.threshold, h: theta.height(), w: theta.branching }
    }
}

impl ThetaParams {
    pub fn new(threshold: f64, branching: Vec<usize>) -> Result<Self> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!("threshold must lie in (0, 1], got {threshold}")));
        }
        if branching.is_empty() {
            return Err(Error::InvalidParameter("tree height must be at least 1".into()));
        }
        if branching.contains(&0) {
            return Err(Error::InvalidParameter("branching factors must be positive".into()));
        }
        Ok(Self { threshold, branching })
    }

    /// `h = 1`, `w_1 = 6`.
    pub fn wide(threshold: f64) -> Self {
        Self::new(threshold, vec![6]).expect("valid")
    }

    /// `h = 2`, `w_1 = w_2 = 2`.
    pub fn deep(threshold: f64) -> Self {
        Self::new(threshold, vec![2, 2]).expect("valid")
    }

    /// The four named simulation scenarios (1-based).
    pub fn scenario(index: usize) -> Option<Self> {
        match index {
            1 => Some(Self::deep(1.0)),
            2 => Some(Self::wide(1.0)),
            3 => Some(Self::deep(0.4)),
            4 => Some(Self::wide(0.4)),
            _ => None,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn height(&self) -> usize {
        self.branching.len()
    }

    pub fn branching(&self) -> &[usize] {
        &self.branching
    }

    /// Branching factor of level `depth` (1-based), i.e. children per parent at `depth - 1`.
    pub fn branching_at(&self, depth: usize) -> usize {
        self.branching[depth - 1]
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        Self::new(threshold, self.branching.clone())
    }

    /// Witness slots per level: `n_d = w_d * n_{d-1}` with `n_0 = 1`, returned for `d = 1..=h`.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.branching
            .iter()
            .scan(1usize, |n, &w| {
                *n *= w;
                Some(*n)
            })
            .collect()
    }

    /// Node count of a full tree, root included.
    pub fn full_tree_size(&self) -> usize {
        1 + self.level_sizes().iter().sum::<usize>()
    }

    /// `ceil(t * count)`, robust to representation error in `t * count`.
    pub fn quota(&self, count: usize) -> usize {
        threshold_quota(self.threshold, count)
    }
}

impl fmt::Display for ThetaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={},h={},w=", self.threshold, self.height())?;
        for (i, w) in self.branching.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ThetaParams {
    type Err = Error;

    /// Parses `t=<real>,h=<int>,w=<int>[,<int>...]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("theta `{s}`: {msg}"));
        let mut threshold = None;
        let mut height = None;
        let mut branching: Option<Vec<usize>> = None;
        for part in s.split(',').map(str::trim) {
            if let Some((key, value)) = part.split_once('=') {
                match key.trim() {
                    "t" => threshold = Some(value.trim().parse::<f64>().map_err(|_| bad("bad threshold"))?),
                    "h" => height = Some(value.trim().parse::<usize>().map_err(|_| bad("bad height"))?),
                    "w" => {
                        let first = value.trim().parse::<usize>().map_err(|_| bad("bad branching factor"))?;
                        branching = Some(vec![first]);
                    }
                    other => return Err(bad(&format!("unknown key `{other}`"))),
                }
            } else {
                // continuation of the w list
                let w = branching.as_mut().ok_or_else(|| bad("stray value outside w list"))?;
                w.push(part.parse::<usize>().map_err(|_| bad("bad branching factor"))?);
            }
        }
        let threshold = threshold.ok_or_else(|| bad("missing t"))?;
        let height = height.ok_or_else(|| bad("missing h"))?;
        let mut branching = branching.ok_or_else(|| bad("missing w"))?;
        if branching.len() == 1 && height > 1 {
            branching = vec![branching[0]; height];
        }
        if branching.len() != height {
            return Err(bad(&format!("expected {height} branching factors, got {}", branching.len())));
        }
        ThetaParams::new(threshold, branching)
    }
}

pub(crate) fn threshold_quota(threshold: f64, count: usize) -> usize {
    let raw = threshold * count as f64;
    let nearest = raw.round();
    if (raw - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        raw.ceil() as usize
    }
}

/// Level sizes `n_1..n_h` for `theta`.
pub fn level_sizes(theta: &ThetaParams) -> Vec<usize> {
    theta.level_sizes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(honest: bool, coerced: bool) -> Attributes {
        Attributes { honest, coerced }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_state(attrs(true, false), true).unwrap(), AgentState::S3);
        assert_eq!(classify_state(attrs(false, true), false).unwrap(), AgentState::S5);
        assert!(matches!(classify_state(attrs(true, false), false), Err(Error::ImpossibleState)));
        assert!(matches!(classify_state(attrs(true, true), false), Err(Error::ImpossibleState)));
    }

    #[test]
    fn classification_is_total_and_exclusive() {
        let mut seen = std::collections::HashSet::new();
        for honest in [false, true] {
            for coerced in [false, true] {
                for truthful in [false, true] {
                    match classify_state(attrs(honest, coerced), truthful) {
                        Ok(state) => {
                            assert!(seen.insert(state));
                            assert_eq!(state.attributes(), attrs(honest, coerced));
                            assert_eq!(state.claims_true_position(), truthful);
                        }
                        Err(_) => assert!(honest && !truthful),
                    }
                }
            }
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn level_size_examples() {
        assert_eq!(ThetaParams::deep(0.5).level_sizes(), vec![2, 4]);
        assert_eq!(ThetaParams::wide(1.0).level_sizes(), vec![6]);
        assert_eq!(ThetaParams::new(1.0, vec![1, 1, 1]).unwrap().level_sizes(), vec![1, 1, 1]);
        let theta = ThetaParams::new(0.7, vec![3, 2, 4]).unwrap();
        assert_eq!(theta.level_sizes(), vec![3, 6, 24]);
        assert_eq!(theta.full_tree_size(), 1 + 3 + 6 + 24);
    }

    #[test]
    fn theta_validation() {
        assert!(ThetaParams::new(0.0, vec![2]).is_err());
        assert!(ThetaParams::new(1.5, vec![2]).is_err());
        assert!(ThetaParams::new(0.5, vec![]).is_err());
        assert!(ThetaParams::new(0.5, vec![2, 0]).is_err());
    }

    #[test]
    fn theta_parsing() {
        let theta: ThetaParams = "t=1,h=2,w=2,2".parse().unwrap();
        assert_eq!(theta, ThetaParams::deep(1.0));
        let theta: ThetaParams = "t=0.4,h=1,w=6".parse().unwrap();
        assert_eq!(theta, ThetaParams::wide(0.4));
        let theta: ThetaParams = "t=0.5,h=3,w=2".parse().unwrap();
        assert_eq!(theta.branching(), &[2, 2, 2]);
        assert!("t=1,h=2,w=2,2,2".parse::<ThetaParams>().is_err());
        assert!("h=2,w=2,2".parse::<ThetaParams>().is_err());
        assert!("t=1,h=1,w=x".parse::<ThetaParams>().is_err());
        let round: ThetaParams = theta.to_string().parse().unwrap();
        assert_eq!(round, theta);
    }

    #[test]
    fn quota_is_exact_ceiling() {
        assert_eq!(threshold_quota(0.5, 4), 2);
        assert_eq!(threshold_quota(0.5, 2), 1);
        assert_eq!(threshold_quota(0.4, 6), 3);
        assert_eq!(threshold_quota(0.4, 2), 1);
        assert_eq!(threshold_quota(1.0, 6), 6);
        assert_eq!(threshold_quota(0.3, 10), 3);
        assert_eq!(threshold_quota(0.7, 10), 7);
    }

    #[test]
    fn environment_density() {
        let env = Environment::new(10.0, 10.0, 1.0, 350).unwrap();
        assert!((env.density() - 3.5).abs() < 1e-12);
        assert!(Environment::new(0.0, 1.0, 1.0, 10).is_err());
        assert!(Environment::new(1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn dishonest_agents_claim_elsewhere() {
        let p = Position::new(1.0, 1.0);
        assert!(Agent::dishonest(AgentId(0), false, p, p).is_err());
        let a = Agent::honest(AgentId(1), true, p);
        assert_eq!(a.claimed_position, a.real_position);
    }
}
