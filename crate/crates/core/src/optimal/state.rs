//! Residual knowledge states and their canonical forms.
//!
//! A residual state is a partial assignment of leaf outcomes plus the
//! AND/OR-propagated resolution of every internal node. The optimizer works
//! on a canonicalized quotient of these states: resolved subtrees collapse
//! away entirely, chains splice, same-label nestings flatten, and siblings
//! sort into a canonical order, so states that differ only in resolved
//! detail or in the arrangement of identically-distributed subtrees share
//! one memo entry. That collapse is what makes 16-leaf instances cheap.

use std::collections::HashMap;

use crate::scalar::Scalar;
use crate::tree::{Label, LeafStatus, Tree};

/// Partial assignment of leaf outcomes with resolution propagation.
#[derive(Debug, Clone)]
pub struct ResidualState<'t> {
    tree: &'t Tree,
    status: Vec<LeafStatus>,
    resolution: Vec<Option<bool>>,
}

impl<'t> ResidualState<'t> {
    pub fn new(tree: &'t Tree) -> Self {
        ResidualState {
            tree,
            status: vec![LeafStatus::Unknown; tree.leaf_count()],
            resolution: vec![None; tree.node_count()],
        }
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn status(&self, leaf: usize) -> LeafStatus {
        self.status[leaf]
    }

    pub fn statuses(&self) -> &[LeafStatus] {
        &self.status
    }

    /// Set one leaf's knowledge and re-propagate resolution.
    pub fn set(&mut self, leaf: usize, status: LeafStatus) {
        self.status[leaf] = status;
        self.resolution = self.tree.resolve(&self.status);
    }

    /// Resolution of a node by node index (`None` = still unknown).
    pub fn node_value(&self, node: usize) -> Option<bool> {
        self.resolution[node]
    }

    pub fn root_value(&self) -> Option<bool> {
        self.resolution[self.tree.root()]
    }

    /// True when every proper ancestor of the leaf is unresolved, i.e.
    /// querying it can still matter.
    pub fn leaf_useful(&self, leaf: usize) -> bool {
        let mut node = self.tree.leaf_node(leaf);
        while let Some(parent) = self.tree.parent(node) {
            if self.resolution[parent].is_some() {
                return false;
            }
            node = parent;
        }
        true
    }

    /// Unknown leaves whose ancestors are all unresolved, ascending.
    pub fn candidates(&self) -> Vec<usize> {
        (0..self.status.len())
            .filter(|&l| self.status[l] == LeafStatus::Unknown && self.leaf_useful(l))
            .collect()
    }

    /// Compact encoding (2 bits per leaf) used as a memo key. Limited to 31
    /// leaves, which the optimizer budget enforces upstream.
    pub fn key(&self) -> u64 {
        debug_assert!(self.status.len() <= 31);
        let mut key = 0u64;
        for (i, s) in self.status.iter().enumerate() {
            let bits = match s {
                LeafStatus::Unknown => 0u64,
                LeafStatus::Zero => 1,
                LeafStatus::One => 2,
            };
            key |= bits << (2 * i);
        }
        key
    }
}

/// Canonical residual tree node. Children of an internal node are interned
/// ids, sorted, with no child carrying the same label (those are flattened
/// in) and none resolved (those are simplified away).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum CanonNode<T: Scalar> {
    Leaf(T),
    Internal(Label, Vec<u32>),
}

/// Either a fully resolved subtree or an interned canonical state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reduced {
    Resolved(bool),
    State(u32),
}

struct Meta {
    leaf_count: usize,
    /// Leaf slots (positions in canonical DFS leaf order) that represent
    /// their symmetry orbit; querying a non-representative slot reaches the
    /// same successor states as its twin.
    representatives: Vec<usize>,
}

/// Hash-consing arena for canonical residual trees.
pub(crate) struct CanonArena<T: Scalar> {
    nodes: Vec<CanonNode<T>>,
    meta: Vec<Meta>,
    intern: HashMap<CanonNode<T>, u32>,
}

impl<T: Scalar> CanonArena<T> {
    pub fn new() -> Self {
        CanonArena {
            nodes: Vec::new(),
            meta: Vec::new(),
            intern: HashMap::new(),
        }
    }

    pub fn node(&self, id: u32) -> &CanonNode<T> {
        &self.nodes[id as usize]
    }

    pub fn leaf_count(&self, id: u32) -> usize {
        self.meta[id as usize].leaf_count
    }

    pub fn representatives(&self, id: u32) -> &[usize] {
        &self.meta[id as usize].representatives
    }

    fn intern(&mut self, node: CanonNode<T>) -> u32 {
        if let Some(&id) = self.intern.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        let meta = self.compute_meta(&node);
        self.nodes.push(node.clone());
        self.meta.push(meta);
        self.intern.insert(node, id);
        id
    }

    fn compute_meta(&self, node: &CanonNode<T>) -> Meta {
        match node {
            CanonNode::Leaf(_) => Meta {
                leaf_count: 1,
                representatives: vec![0],
            },
            CanonNode::Internal(_, children) => {
                let mut leaf_count = 0;
                let mut representatives = Vec::new();
                let mut prev: Option<u32> = None;
                for &c in children {
                    if prev != Some(c) {
                        // First occurrence of this child subtree among its
                        // equal siblings: its representative slots stand for
                        // the whole orbit.
                        for &r in &self.meta[c as usize].representatives {
                            representatives.push(leaf_count + r);
                        }
                    }
                    leaf_count += self.meta[c as usize].leaf_count;
                    prev = Some(c);
                }
                Meta {
                    leaf_count,
                    representatives,
                }
            }
        }
    }

    fn intern_leaf(&mut self, prob: T) -> u32 {
        self.intern(CanonNode::Leaf(prob))
    }

    /// Assemble an internal node from reduced children: apply
    /// short-circuiting, drop neutral children, splice singletons, flatten
    /// same-label children, sort.
    fn simplify(&mut self, label: Label, parts: Vec<Reduced>) -> Reduced {
        let sc = label.short_circuit();
        let mut children: Vec<u32> = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                Reduced::Resolved(v) if v == sc => return Reduced::Resolved(sc),
                Reduced::Resolved(_) => {} // neutral: drop
                Reduced::State(id) => match self.nodes[id as usize] {
                    CanonNode::Internal(l, ref grand) if l == label => {
                        children.extend(grand.iter().copied());
                    }
                    _ => children.push(id),
                },
            }
        }
        match children.len() {
            0 => Reduced::Resolved(!sc),
            1 => Reduced::State(children[0]),
            _ => {
                children.sort_unstable();
                Reduced::State(self.intern(CanonNode::Internal(label, children)))
            }
        }
    }

    /// Canonicalize the residual of `tree` under the given leaf statuses.
    pub fn canonicalize(&mut self, tree: &Tree, probs: &[T], status: &[LeafStatus]) -> Reduced {
        self.reduce_node(tree, probs, status, tree.root())
    }

    fn reduce_node(
        &mut self,
        tree: &Tree,
        probs: &[T],
        status: &[LeafStatus],
        node: usize,
    ) -> Reduced {
        if let Some(leaf) = tree.leaf_index(node) {
            return match status[leaf].value() {
                Some(v) => Reduced::Resolved(v),
                None => Reduced::State(self.intern_leaf(probs[leaf].clone())),
            };
        }
        let label = tree.label(node).expect("internal node");
        let parts: Vec<Reduced> = tree
            .children(node)
            .to_vec()
            .into_iter()
            .map(|c| self.reduce_node(tree, probs, status, c))
            .collect();
        self.simplify(label, parts)
    }

    /// Probability attached to a leaf slot of a canonical state.
    pub fn leaf_prob(&self, id: u32, slot: usize) -> T {
        match self.node(id) {
            CanonNode::Leaf(p) => {
                debug_assert_eq!(slot, 0);
                p.clone()
            }
            CanonNode::Internal(_, children) => {
                let children = children.clone();
                let mut offset = 0;
                for c in children {
                    let n = self.leaf_count(c);
                    if slot < offset + n {
                        return self.leaf_prob(c, slot - offset);
                    }
                    offset += n;
                }
                unreachable!("slot out of range")
            }
        }
    }

    /// Set the leaf at `slot` to `value` and re-canonicalize.
    pub fn assign(&mut self, id: u32, slot: usize, value: bool) -> Reduced {
        match self.node(id).clone() {
            CanonNode::Leaf(_) => {
                debug_assert_eq!(slot, 0);
                Reduced::Resolved(value)
            }
            CanonNode::Internal(label, children) => {
                let mut parts: Vec<Reduced> = Vec::with_capacity(children.len());
                let mut offset = 0;
                let mut hit = false;
                for c in children {
                    let n = self.leaf_count(c);
                    if !hit && slot < offset + n {
                        hit = true;
                        parts.push(self.assign(c, slot - offset, value));
                    } else {
                        parts.push(Reduced::State(c));
                    }
                    offset += n;
                }
                debug_assert!(hit, "slot out of range");
                self.simplify(label, parts)
            }
        }
    }
}
