use rand::seq::index;
use rand::Rng;

use crate::protocol::tree::{NodeId, WitnessTree};
use crate::types::{AgentId, Position, ThetaParams};

/// An agent as it appears in a tree: who it is and where it was seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub agent: AgentId,
    pub position: Position,
}

/// Supplies perceived neighbourhoods and approval decisions to tree building.
pub trait WitnessSource {
    /// Agents `observer` perceives around its placement, in a deterministic order.
    fn neighbours(&self, observer: &Placement) -> Vec<Placement>;

    /// Whether `child` attests to seeing `parent` where `parent` was placed.
    fn approves(&self, child: &Placement, parent: &Placement) -> bool;
}

/// Builds a prover's tree level by level.
///
/// Every parent at depth `d` names `w_{d+1}` children drawn uniformly without
/// replacement from its perceived neighbours, or all of them when it perceives
/// fewer. The approval of each child is recorded when it is named.
pub fn build_tree<S, R>(root: Placement, source: &S, theta: &ThetaParams, rng: &mut R) -> WitnessTree
where
    S: WitnessSource + ?Sized,
    R: Rng + ?Sized,
{
    let mut tree = WitnessTree::new(root.agent);
    let mut frontier: Vec<(NodeId, Placement)> = vec![(NodeId::ROOT, root)];
    for depth in 1..=theta.height() {
        let wanted = theta.branching_at(depth);
        let mut next = Vec::with_capacity(frontier.len() * wanted);
        for (parent_id, parent) in &frontier {
            let candidates = source.neighbours(parent);
            let picked: Vec<usize> = if candidates.len() <= wanted {
                (0..candidates.len()).collect()
            } else {
                index::sample(rng, candidates.len(), wanted).into_vec()
            };
            for i in picked {
                let child = candidates[i];
                let approves = source.approves(&child, parent);
                let id = tree.add_child(*parent_id, child.agent, approves);
                next.push((id, child));
            }
        }
        frontier = next;
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Everyone sees everyone on a line of `n` agents; approvals by parity.
    struct Line(u32);

    impl WitnessSource for Line {
        fn neighbours(&self, observer: &Placement) -> Vec<Placement> {
            (0..self.0)
                .filter(|&i| AgentId(i) != observer.agent)
                .map(|i| Placement { agent: AgentId(i), position: Position::new(i as f64, 0.0) })
                .collect()
        }

        fn approves(&self, child: &Placement, _parent: &Placement) -> bool {
            child.agent.0.is_multiple_of(2)
        }
    }

    fn root() -> Placement {
        Placement { agent: AgentId(0), position: Position::default() }
    }

    #[test]
    fn isolated_prover_gets_root_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree = build_tree(root(), &Line(1), &ThetaParams::wide(1.0), &mut rng);
        assert_eq!(tree.len(), 1);
    }

    #[test]
    fn dense_population_fills_every_slot() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let theta = ThetaParams::deep(1.0);
        let tree = build_tree(root(), &Line(50), &theta, &mut rng);
        assert_eq!(tree.len(), 7);
        tree.validate(Some(&theta)).unwrap();
        for id in tree.node_ids() {
            let kids: Vec<_> = tree.children(id).iter().map(|c| tree.node(*c).agent).collect();
            let unique: std::collections::HashSet<_> = kids.iter().collect();
            assert_eq!(unique.len(), kids.len(), "no parent names a child twice");
            assert!(!kids.contains(&tree.node(id).agent));
        }
        for node in &tree.nodes()[1..] {
            assert_eq!(node.approves, node.agent.0 % 2 == 0);
        }
    }

    #[test]
    fn short_neighbourhood_names_everyone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree = build_tree(root(), &Line(4), &ThetaParams::wide(1.0), &mut rng);
        assert_eq!(tree.len(), 4);
    }

    #[test]
    fn seeded_determinism() {
        let theta = ThetaParams::new(0.5, vec![3, 2, 2]).unwrap();
        let a = build_tree(root(), &Line(40), &theta, &mut ChaCha8Rng::seed_from_u64(9));
        let b = build_tree(root(), &Line(40), &theta, &mut ChaCha8Rng::seed_from_u64(9));
        let c = build_tree(root(), &Line(40), &theta, &mut ChaCha8Rng::seed_from_u64(10));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
