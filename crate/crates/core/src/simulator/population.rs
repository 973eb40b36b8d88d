use rand::Rng;

use crate::analytics::Mix;
use crate::protocol::{Placement, WitnessSource};
use crate::types::{Agent, AgentId, Environment, Position};

/// Uniform bucket grid answering fixed-radius queries.
#[derive(Debug, Clone)]
struct SpatialGrid {
    cell: f64,
    columns: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

const MAX_CELLS_PER_AXIS: usize = 2048;

impl SpatialGrid {
    fn new(env: &Environment) -> Self {
        let longest = env.width.max(env.height);
        let cell = env.range_of_sight.max(longest / MAX_CELLS_PER_AXIS as f64);
        let columns = ((env.width / cell).ceil() as usize).max(1);
        let rows = ((env.height / cell).ceil() as usize).max(1);
        Self { cell, columns, rows, buckets: vec![Vec::new(); columns * rows] }
    }

    fn coords(&self, p: &Position) -> (usize, usize) {
        let cx = ((p.x / self.cell).floor().max(0.0) as usize).min(self.columns - 1);
        let cy = ((p.y / self.cell).floor().max(0.0) as usize).min(self.rows - 1);
        (cx, cy)
    }

    fn insert(&mut self, p: &Position, index: u32) {
        let (cx, cy) = self.coords(p);
        self.buckets[cy * self.columns + cx].push(index);
    }

    /// Candidate indices in every bucket that may hold points within `range` of `centre`.
    fn candidates(&self, centre: &Position, range: f64) -> impl Iterator<Item = u32> + '_ {
        let reach = (range / self.cell).ceil() as usize;
        let (cx, cy) = self.coords(centre);
        let xs = cx.saturating_sub(reach)..=(cx + reach).min(self.columns - 1);
        let ys = cy.saturating_sub(reach)..=(cy + reach).min(self.rows - 1);
        ys.flat_map(move |y| xs.clone().map(move |x| y * self.columns + x))
            .flat_map(move |b| self.buckets[b].iter().copied())
    }
}

/// A population with spatial indexes over real positions and over the
/// claimed positions of dishonest agents.
#[derive(Debug, Clone)]
pub struct PopulationIndex {
    env: Environment,
    agents: Vec<Agent>,
    real: SpatialGrid,
    claimed: SpatialGrid,
}

impl PopulationIndex {
    /// Agents must be numbered `0..n` in order.
    pub fn new(env: Environment, agents: Vec<Agent>) -> Self {
        assert!(
            agents.iter().enumerate().all(|(i, a)| a.id.0 as usize == i),
            "agent ids must match their positions in the list"
        );
        let mut real = SpatialGrid::new(&env);
        let mut claimed = SpatialGrid::new(&env);
        for agent in &agents {
            real.insert(&agent.real_position, agent.id.0);
            if !agent.is_honest() {
                claimed.insert(&agent.claimed_position, agent.id.0);
            }
        }
        Self { env, agents, real, claimed }
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &Agent {
        &self.agents[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Where a prover roots its tree: the position it claims.
    pub fn prover_placement(&self, id: AgentId) -> Placement {
        let agent = self.agent(id);
        Placement { agent: id, position: agent.claimed_position }
    }

    /// Agents `observer` perceives from `viewpoint`, sorted by id.
    ///
    /// Non-coerced observers see everyone at their real positions. Coerced
    /// observers see honest agents at their real positions and dishonest
    /// agents at their claimed ones.
    pub fn perceived_neighbours(&self, observer: &Agent, viewpoint: &Position) -> Vec<Placement> {
        let r = self.env.range_of_sight;
        let mut out: Vec<Placement> = Vec::new();
        for i in self.real.candidates(viewpoint, r) {
            let other = &self.agents[i as usize];
            if other.id == observer.id || (observer.is_coerced() && !other.is_honest()) {
                continue;
            }
            if viewpoint.within(&other.real_position, r) {
                out.push(Placement { agent: other.id, position: other.real_position });
            }
        }
        if observer.is_coerced() {
            for i in self.claimed.candidates(viewpoint, r) {
                let other = &self.agents[i as usize];
                if other.id != observer.id && viewpoint.within(&other.claimed_position, r) {
                    out.push(Placement { agent: other.id, position: other.claimed_position });
                }
            }
        }
        out.sort_unstable_by_key(|p| p.agent);
        out
    }
}

/// Whether `observer` attests to `subject` at its claimed position.
fn perceives(observer: &Agent, subject: &Agent) -> bool {
    subject.is_honest() || observer.is_coerced()
}

/// A child approves a parent when both stand where they claim to be, each
/// perceives the other there, and they are within range of sight.
pub fn approves(child: &Agent, child_at: &Position, parent: &Agent, parent_at: &Position, range: f64) -> bool {
    *child_at == child.claimed_position
        && *parent_at == parent.claimed_position
        && perceives(parent, child)
        && perceives(child, parent)
        && child_at.within(parent_at, range)
}

impl WitnessSource for PopulationIndex {
    fn neighbours(&self, observer: &Placement) -> Vec<Placement> {
        self.perceived_neighbours(self.agent(observer.agent), &observer.position)
    }

    fn approves(&self, child: &Placement, parent: &Placement) -> bool {
        approves(
            self.agent(child.agent),
            &child.position,
            self.agent(parent.agent),
            &parent.position,
            self.env.range_of_sight,
        )
    }
}

fn uniform_position<R: Rng + ?Sized>(env: &Environment, rng: &mut R) -> Position {
    Position::new(rng.random::<f64>() * env.width, rng.random::<f64>() * env.height)
}

/// Scatters `env.agent_count` agents uniformly, drawing honesty and coercion
/// independently. Dishonest agents get a uniform claimed position, redrawn
/// until it differs from the real one.
pub fn generate_population<R: Rng + ?Sized>(env: &Environment, mix: Mix, rng: &mut R) -> PopulationIndex {
    let agents = (0..env.agent_count)
        .map(|i| {
            let id = AgentId(i as u32);
            let real = uniform_position(env, rng);
            let honest = rng.random_bool(mix.p_h);
            let coerced = rng.random_bool(mix.p_c);
            if honest {
                return Agent::honest(id, coerced, real);
            }
            loop {
                let claimed = uniform_position(env, rng);
                if let Ok(agent) = Agent::dishonest(id, coerced, real, claimed) {
                    return agent;
                }
            }
        })
        .collect();
    PopulationIndex::new(*env, agents)
}
