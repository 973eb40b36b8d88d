use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::Mix;
use crate::error::{Error, Result};
use crate::simulator::population::generate_population;
use crate::simulator::run::run_prover;
use crate::simulator::seeds::{stream_rng, with_jobs, Stream};
use crate::types::{Environment, ThetaParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramConfig {
    pub env: Environment,
    pub theta: ThetaParams,
    pub mix: Mix,
    /// Fresh populations; every agent proves once in each.
    pub repetitions: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeHistogram {
    /// `counts[e]` trees had `e` confirmed edges.
    pub counts: Vec<u64>,
}

impl EdgeHistogram {
    pub fn trees(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        let weighted: u64 = self.counts.iter().enumerate().map(|(e, &c)| e as u64 * c).sum();
        weighted as f64 / self.trees().max(1) as f64
    }
}

/// Distribution of the number of edges on unbroken approval chains to the
/// root, over every prover of every repetition.
pub fn edge_histogram(config: &HistogramConfig, jobs: Option<usize>) -> Result<EdgeHistogram> {
    config.env.validate()?;
    if config.repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be positive".into()));
    }
    let slots = config.theta.full_tree_size();
    let per_rep: Vec<Vec<u64>> = with_jobs(jobs, || {
        (0..config.repetitions)
            .into_par_iter()
            .map(|rep| {
                let rep = rep as u64;
                let population =
                    generate_population(&config.env, config.mix, &mut stream_rng(config.seed, Stream::Population, &[rep]));
                let mut counts = vec![0u64; slots];
                for agent in population.agents() {
                    let mut rng = stream_rng(config.seed, Stream::Histogram, &[rep, agent.id.0 as u64]);
                    counts[run_prover(agent.id, &population, &config.theta, &mut rng).chain_edges] += 1;
                }
                counts
            })
            .collect()
    });
    let mut counts = vec![0u64; slots];
    for rep in per_rep {
        for (total, c) in counts.iter_mut().zip(rep) {
            *total += c;
        }
    }
    Ok(EdgeHistogram { counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(p_h: f64, p_c: f64) -> HistogramConfig {
        HistogramConfig {
            env: Environment::new(2.0, 2.0, 1.0, 400).unwrap(),
            theta: ThetaParams::wide(1.0),
            mix: Mix::new(p_h, p_c).unwrap(),
            repetitions: 2,
            seed: 9,
        }
    }

    #[test]
    fn extremes() {
        let honest = edge_histogram(&config(1.0, 0.0), None).unwrap();
        assert_eq!(honest.trees(), 800);
        assert_eq!(honest.mean(), 6.0);
        let hopeless = edge_histogram(&config(0.0, 0.0), None).unwrap();
        assert_eq!(hopeless.mean(), 0.0);
    }
}
