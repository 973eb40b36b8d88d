use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::{build_tree, count_approval_chain_edges, verify, Verdict, WitnessTree};
use crate::simulator::population::PopulationIndex;
use crate::types::{AgentId, ThetaParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverRun {
    pub verdict: Verdict,
    /// Edges on unbroken approval chains to the root, duplicates removed.
    pub chain_edges: usize,
}

/// Builds and verifies one tree for `prover`, rooted where it claims to be.
pub fn run_prover<R: Rng + ?Sized>(
    prover: AgentId,
    population: &PopulationIndex,
    theta: &ThetaParams,
    rng: &mut R,
) -> ProverRun {
    let mut tree = prover_tree(prover, population, theta, rng);
    let verdict = verify(&mut tree, theta).expect("built trees are well formed");
    ProverRun { chain_edges: count_approval_chain_edges(&tree), verdict }
}

pub fn prover_tree<R: Rng + ?Sized>(
    prover: AgentId,
    population: &PopulationIndex,
    theta: &ThetaParams,
    rng: &mut R,
) -> WitnessTree {
    build_tree(population.prover_placement(prover), population, theta, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::Mix;
    use crate::simulator::population::generate_population;
    use crate::types::{Agent, Environment, Position};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_honest_population_is_truthful() {
        let env = Environment::new(3.0, 3.0, 1.0, 600).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = generate_population(&env, Mix::new(1.0, 0.0).unwrap(), &mut rng);
        for id in 0..50 {
            let run = run_prover(AgentId(id), &pop, &ThetaParams::wide(1.0), &mut rng);
            assert!(run.verdict.truthful);
            assert_eq!(run.chain_edges, 6);
        }
    }

    #[test]
    fn isolated_prover_fails() {
        let env = Environment::new(10.0, 10.0, 1.0, 2).unwrap();
        let agents = vec![
            Agent::honest(AgentId(0), false, Position::new(1.0, 1.0)),
            Agent::honest(AgentId(1), false, Position::new(8.0, 8.0)),
        ];
        let pop = PopulationIndex::new(env, agents);
        let run = run_prover(AgentId(0), &pop, &ThetaParams::wide(1.0), &mut ChaCha8Rng::seed_from_u64(1));
        assert!(!run.verdict.truthful);
        assert_eq!(run.verdict.failure_level, Some(1));
    }

    #[test]
    fn non_coerced_population_rejects_fake_claims() {
        let env = Environment::new(3.0, 3.0, 1.0, 600).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pop = generate_population(&env, Mix::new(0.5, 0.0).unwrap(), &mut rng);
        for agent in pop.agents().iter().filter(|a| !a.is_honest()).take(50) {
            let run = run_prover(agent.id, &pop, &ThetaParams::deep(1.0), &mut rng);
            assert!(!run.verdict.truthful);
            assert_eq!(run.chain_edges, 0);
        }
    }
}
