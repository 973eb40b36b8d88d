use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AgentId, ThetaParams};

/// Index of a node inside a [`WitnessTree`]. The root is always `NodeId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub agent: AgentId,
    pub depth: usize,
    pub parent: Option<NodeId>,
    /// The child-approves-parent edge into this node. Always false for the root.
    pub approves: bool,
    /// Set by verification when the node fails its quota or is removed as a duplicate.
    pub pruned: bool,
    /// Set by verification when this node's agent had already been named in the tree.
    pub duplicate: bool,
    /// Set by verification when the node passed the checks against its parent.
    pub confirmed: bool,
}

/// Rooted tree of witnesses. Nodes are stored in insertion order; every
/// parent precedes its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTree {
    nodes: Vec<TreeNode>,
    children: Vec<Vec<NodeId>>,
}

impl WitnessTree {
    pub fn new(root: AgentId) -> Self {
        Self {
            nodes: vec![TreeNode {
                agent: root,
                depth: 0,
                parent: None,
                approves: false,
                pruned: false,
                duplicate: false,
                confirmed: false,
            }],
            children: vec![Vec::new()],
        }
    }

    pub fn add_child(&mut self, parent: NodeId, agent: AgentId, approves: bool) -> NodeId {
        let depth = self.nodes[parent.0].depth + 1;
        let id = NodeId(self.nodes.len());
        self.nodes.push(TreeNode {
            agent,
            depth,
            parent: Some(parent),
            approves,
            pruned: false,
            duplicate: false,
            confirmed: false,
        });
        self.children.push(Vec::new());
        self.children[parent.0].push(id);
        id
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        &mut self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.0]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Node ids at `depth`, in insertion order.
    pub fn level(&self, depth: usize) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(move |id| self.nodes[id.0].depth == depth)
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub(crate) fn reset_marks(&mut self) {
        for node in &mut self.nodes {
            node.pruned = false;
            node.duplicate = false;
            node.confirmed = false;
        }
    }

    /// Structural checks: root at depth 0 without parent, depths consistent with
    /// parents, and (when `theta` is given) height and level sizes within bounds.
    pub fn validate(&self, theta: Option<&ThetaParams>) -> Result<()> {
        let root = &self.nodes[0];
        if root.depth != 0 || root.parent.is_some() {
            return Err(Error::MalformedTree("root must have depth 0 and no parent".into()));
        }
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            let parent = node
                .parent
                .ok_or_else(|| Error::MalformedTree(format!("node {i} has no parent")))?;
            if parent.0 >= i {
                return Err(Error::MalformedTree(format!("node {i} precedes its parent {}", parent.0)));
            }
            if node.depth != self.nodes[parent.0].depth + 1 {
                return Err(Error::MalformedTree(format!(
                    "node {i} at depth {} under parent at depth {}",
                    node.depth, self.nodes[parent.0].depth
                )));
            }
        }
        if let Some(theta) = theta {
            let sizes = theta.level_sizes();
            let mut counts = vec![0usize; self.max_depth() + 1];
            for node in &self.nodes {
                counts[node.depth] += 1;
            }
            if counts.len() > sizes.len() + 1 {
                return Err(Error::MalformedTree(format!(
                    "tree has depth {} but height is {}",
                    counts.len() - 1,
                    theta.height()
                )));
            }
            for (d, &count) in counts.iter().enumerate().skip(1) {
                if count > sizes[d - 1] {
                    return Err(Error::MalformedTree(format!(
                        "level {d} holds {count} nodes, at most {} allowed",
                        sizes[d - 1]
                    )));
                }
            }
            for id in self.node_ids() {
                let depth = self.nodes[id.0].depth;
                if depth < theta.height() && self.children(id).len() > theta.branching_at(depth + 1) {
                    return Err(Error::MalformedTree(format!(
                        "node {} names {} children, at most {} allowed",
                        id.0,
                        self.children(id).len(),
                        theta.branching_at(depth + 1)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_document(&self) -> TreeDocument {
        TreeDocument {
            root: self.nodes[0].agent,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.agent,
                    depth: n.depth,
                    parent: n.parent,
                    approves: n.approves,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &TreeDocument) -> Result<Self> {
        let first = doc
            .nodes
            .first()
            .ok_or_else(|| Error::MalformedTree("document has no nodes".into()))?;
        if first.id != doc.root {
            return Err(Error::MalformedTree("first node must be the root".into()));
        }
        let mut tree = WitnessTree::new(doc.root);
        for (i, record) in doc.nodes.iter().enumerate() {
            if i == 0 {
                if record.parent.is_some() || record.depth != 0 {
                    return Err(Error::MalformedTree("root must have depth 0 and no parent".into()));
                }
                continue;
            }
            let parent = record
                .parent
                .ok_or_else(|| Error::MalformedTree(format!("node {i} has no parent")))?;
            if parent.0 >= i {
                return Err(Error::MalformedTree(format!("node {i} precedes its parent {}", parent.0)));
            }
            let id = tree.add_child(parent, record.id, record.approves);
            if tree.node(id).depth != record.depth {
                return Err(Error::MalformedTree(format!(
                    "node {i} declares depth {} but sits at depth {}",
                    record.depth,
                    tree.node(id).depth
                )));
            }
        }
        Ok(tree)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(json)?)
    }
}

/// Serialized form: `{root, nodes: [{id, depth, parent, approves}]}` where
/// `parent` is the index of the parent node in `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub root: AgentId,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: AgentId,
    pub depth: usize,
    pub parent: Option<NodeId>,
    pub approves: bool,
}
