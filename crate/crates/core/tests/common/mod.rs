//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use tpop_core::protocol::{NodeId, WitnessTree};
use tpop_core::{AgentId, ThetaParams};

/// Selection probabilities written out row by row: parents S1..S6, children S1..S6.
pub fn selection_rows(p_h: f64, p_c: f64) -> [[f64; 6]; 6] {
    let (h, d, c, n) = (p_h, 1.0 - p_h, p_c, 1.0 - p_c);
    let plain = [0.0, d * n, h * n, h * c, 0.0, d * c];
    let coerced = [d * n, 0.0, h * n, h * c, d * c, 0.0];
    let zero = [0.0; 6];
    [plain, zero, plain, coerced, coerced, zero]
}

/// Which child state approves which parent state (child rows, parent columns).
pub const APPROVES: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 1.0, 1.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
];

/// Probability that a prover in state `u` gets an approval from depth `d`,
/// summed over all `6^d` state chains.
pub fn chain_probability(u: usize, d: usize, p_h: f64, p_c: f64) -> f64 {
    let m = selection_rows(p_h, p_c);
    fn walk(m: &[[f64; 6]; 6], from: usize, left: usize) -> f64 {
        if left == 0 {
            return 1.0;
        }
        (0..6).map(|v| m[from][v] * APPROVES[v][from] * walk(m, v, left - 1)).sum()
    }
    walk(&m, u, d)
}

/// Exhaustive sum over every approve/reject pattern of the `n_1 + ... + n_h`
/// witnesses, each approving independently with its level's probability.
pub fn criterion_one_by_patterns(levels: &[usize], probs: &[f64], t: f64) -> f64 {
    let total: usize = levels.iter().sum();
    assert!(total <= 20);
    let need: Vec<usize> = levels.iter().map(|&n| (t * n as f64 - 1e-9).ceil() as usize).collect();
    let mut sum = 0.0;
    for pattern in 0u32..(1 << total) {
        let mut weight = 1.0;
        let mut offset = 0;
        let mut ok = true;
        for (d, &n) in levels.iter().enumerate() {
            let mut hits = 0;
            for k in 0..n {
                if pattern >> (offset + k) & 1 == 1 {
                    hits += 1;
                    weight *= probs[d];
                } else {
                    weight *= 1.0 - probs[d];
                }
            }
            ok &= hits >= need[d];
            offset += n;
        }
        if ok {
            sum += weight;
        }
    }
    sum
}

/// Probability that a prover in state `u` has every witness of a full tree
/// approve along its chain: `g_h = 1`, `g_d(s) = (sum_v MA(s,v) g_{d+1}(v))^{w_{d+1}}`.
pub fn full_tree_acceptance(u: usize, branching: &[usize], p_h: f64, p_c: f64) -> f64 {
    let m = selection_rows(p_h, p_c);
    let mut g = [1.0; 6];
    for &w in branching.iter().rev() {
        let mut next = [0.0; 6];
        for s in 0..6 {
            let inner: f64 = (0..6).map(|v| m[s][v] * APPROVES[v][s] * g[v]).sum();
            next[s] = inner.powi(w as i32);
        }
        g = next;
    }
    g[u]
}

/// Random tree shaped by `theta`: some parents name fewer children than
/// allowed, agents come from a small pool so duplicates occur.
pub fn random_tree<R: Rng>(theta: &ThetaParams, rng: &mut R) -> WitnessTree {
    let pool = rng.random_range(2..=theta.full_tree_size() as u32 + 2);
    let approve_rate = rng.random_range(0.5..1.0);
    let mut tree = WitnessTree::new(AgentId(rng.random_range(0..pool)));
    let mut frontier = vec![NodeId::ROOT];
    for depth in 1..=theta.height() {
        let w = theta.branching_at(depth);
        let mut next = Vec::new();
        for &parent in &frontier {
            let count = if rng.random_bool(0.8) { w } else { rng.random_range(0..=w) };
            for _ in 0..count {
                let agent = AgentId(rng.random_range(0..pool));
                next.push(tree.add_child(parent, agent, rng.random_bool(approve_rate)));
            }
        }
        frontier = next;
    }
    tree
}

pub fn random_theta<R: Rng>(rng: &mut R) -> ThetaParams {
    let h = rng.random_range(1..=3);
    let branching = (0..h).map(|_| rng.random_range(1..=3)).collect();
    let t = match rng.random_range(0..4) {
        0 => 1.0,
        1 => 0.5,
        _ => rng.random_range(0.05..=1.0),
    };
    ThetaParams::new(t, branching).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub truthful: bool,
    pub failure_level: Option<usize>,
    pub confirmed: Vec<usize>,
}

fn quota(t: f64, count: usize) -> usize {
    (t * count as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Verification rules applied one node at a time, scanning the
/// flat node list for every lookup.
pub fn oracle_verify(tree: &WitnessTree, theta: &ThetaParams) -> OracleVerdict {
    let doc = tree.to_document();
    let nodes = &doc.nodes;
    let h = theta.height();
    let n = theta.level_sizes();
    let t = theta.threshold();
    let kids_of = |p: usize| -> Vec<usize> { (0..nodes.len()).filter(|&i| nodes[i].parent == Some(NodeId(p))).collect() };

    let mut pruned = vec![false; nodes.len()];
    let mut confirmed = vec![false; nodes.len()];
    let mut named: HashSet<AgentId> = HashSet::from([doc.root]);
    let mut counts = vec![0; h];
    let mut failure = None;
    for d in (0..h).rev() {
        let w = theta.branching_at(d + 1);
        for p in (0..nodes.len()).filter(|&i| nodes[i].depth == d) {
            if pruned[p] {
                continue;
            }
            let kids = kids_of(p);
            let distinct = kids.iter().map(|&k| nodes[k].id).collect::<HashSet<_>>().len() == kids.len();
            let mut passing = 0;
            for &c in &kids {
                let first = named.insert(nodes[c].id);
                if pruned[c] {
                    continue;
                }
                let live = kids.iter().filter(|&&k| !pruned[k]).count();
                if first && nodes[c].approves && live >= quota(t, w) && distinct {
                    confirmed[c] = true;
                    passing += 1;
                } else if !first {
                    pruned[c] = true;
                }
            }
            if passing < quota(t, w) {
                pruned[p] = true;
            }
        }
        counts[d] = (0..nodes.len())
            .filter(|&c| nodes[c].depth == d + 1)
            .filter(|&c| confirmed[c] && !pruned[c] && !pruned[nodes[c].parent.unwrap().0])
            .count();
        if failure.is_none() && counts[d] < quota(t, n[d]) {
            failure = Some(d + 1);
        }
    }
    OracleVerdict { truthful: failure.is_none(), failure_level: failure, confirmed: counts }
}

/// Small reference tree: g names a1 and a2; a1 names a3 and a4,
/// which approve; a2 names a5 and a6, which do not.
pub fn example_tree() -> WitnessTree {
    let mut tree = WitnessTree::new(AgentId(0));
    let a1 = tree.add_child(NodeId::ROOT, AgentId(1), true);
    let a2 = tree.add_child(NodeId::ROOT, AgentId(2), true);
    tree.add_child(a1, AgentId(3), true);
    tree.add_child(a1, AgentId(4), true);
    tree.add_child(a2, AgentId(5), false);
    tree.add_child(a2, AgentId(6), false);
    tree
}
