use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{square_mean_degree, uniqueness_probability, Mix};
use crate::error::{Error, Result};
use crate::protocol::{Placement, WitnessSource};
use crate::simulator::population::{generate_population, PopulationIndex};
use crate::simulator::seeds::{stream_rng, with_jobs, Stream};
use crate::types::{AgentId, Environment, ThetaParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessConfig {
    pub n_values: Vec<usize>,
    pub r: f64,
    pub trees_per_n: usize,
    pub theta: ThetaParams,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessRow {
    pub n_agents: usize,
    pub fraction_unique: f64,
    /// Closed-form value, when the tree shape has one.
    pub theory: Option<f64>,
}

/// Samples one random tree with children drawn with replacement from each
/// parent's neighbours. Returns whether all slots hold distinct agents.
fn sample_unique_tree<R: Rng + ?Sized>(population: &PopulationIndex, theta: &ThetaParams, rng: &mut R) -> bool {
    let root = AgentId(rng.random_range(0..population.len() as u32));
    let mut seen = vec![root];
    let mut frontier = vec![population.prover_placement(root)];
    for depth in 1..=theta.height() {
        let w = theta.branching_at(depth);
        let mut next = Vec::with_capacity(frontier.len() * w);
        for parent in &frontier {
            let candidates: Vec<Placement> = population.neighbours(parent);
            if candidates.is_empty() {
                return false;
            }
            for _ in 0..w {
                let child = candidates[rng.random_range(0..candidates.len())];
                if seen.contains(&child.agent) {
                    return false;
                }
                seen.push(child.agent);
                next.push(child);
            }
        }
        frontier = next;
    }
    true
}

/// Fraction of `trees` random trees over `n_agents` uniform agents in the unit
/// square whose slots all hold distinct agents.
pub fn monte_carlo_uniqueness(theta: &ThetaParams, n_agents: usize, r: f64, trees: usize, seed: u64) -> Result<f64> {
    let env = Environment::new(1.0, 1.0, r, n_agents)?;
    if trees == 0 {
        return Err(Error::InvalidParameter("tree count must be positive".into()));
    }
    let n = n_agents as u64;
    let population = generate_population(
        &env,
        Mix { p_h: 1.0, p_c: 0.0 },
        &mut stream_rng(seed, Stream::UniquenessPopulation, &[n]),
    );
    let unique: usize = (0..trees)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream_rng(seed, Stream::UniquenessTree, &[n, i as u64]);
            sample_unique_tree(&population, theta, &mut rng)
        })
        .count();
    Ok(unique as f64 / trees as f64)
}

/// Empirical and closed-form uniqueness probabilities for each population size.
/// The closed form uses the mean degree of a random geometric graph on the
/// unit square, boundary included.
pub fn uniqueness_experiment(config: &UniquenessConfig, jobs: Option<usize>) -> Result<Vec<UniquenessRow>> {
    if !(config.r > 0.0 && config.r <= 1.0) {
        return Err(Error::InvalidParameter(format!("range must lie in (0, 1], got {}", config.r)));
    }
    with_jobs(jobs, || {
        config
            .n_values
            .iter()
            .map(|&n_agents| {
                let fraction_unique =
                    monte_carlo_uniqueness(&config.theta, n_agents, config.r, config.trees_per_n, config.seed)?;
                let k_mean = square_mean_degree(n_agents, config.r, 1.0);
                let theory = match uniqueness_probability(&config.theta, k_mean, config.r) {
                    Ok(p) => Some(p),
                    Err(Error::UnsupportedShape(_)) => None,
                    Err(e) => return Err(e),
                };
                Ok(UniquenessRow { n_agents, fraction_unique, theory })
            })
            .collect()
    })
}
