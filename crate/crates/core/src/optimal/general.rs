//! Minimum expected cost over ALL valid deterministic strategies.
//!
//! Value pass: memoized recursion directly on canonical residual states
//! (resolved subtrees gone, symmetric siblings merged), minimizing over one
//! representative leaf per symmetry orbit.
//!
//! Witness pass: replays the recursion on original-tree status vectors,
//! consulting the canonical memo for subproblem values, trying candidates in
//! leaf-index order with strict improvement so ties break toward the
//! smallest leaf index. Equal knowledge states share strategy nodes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::optimal::state::{CanonArena, Reduced, ResidualState};
use crate::scalar::Scalar;
use crate::strategy::{Strategy, StrategyNode};
use crate::tree::{LeafStatus, Tree};

pub(crate) struct GeneralSolution<T> {
    pub value: T,
    pub witness: Strategy,
    pub states_explored: usize,
}

/// Value without witness extraction; the equilibrium search calls this in
/// its inner loop.
pub(crate) fn optimal_general_value<T: Scalar>(tree: &Tree, probs: &[T]) -> T {
    let mut arena = CanonArena::new();
    let mut memo: HashMap<u32, T> = HashMap::new();
    let status = vec![LeafStatus::Unknown; tree.leaf_count()];
    match arena.canonicalize(tree, probs, &status) {
        Reduced::Resolved(_) => T::zero(),
        Reduced::State(id) => solve(&mut arena, &mut memo, id),
    }
}

pub(crate) fn optimal_general<T: Scalar>(tree: &Tree, probs: &[T]) -> GeneralSolution<T> {
    let mut arena = CanonArena::new();
    let mut memo: HashMap<u32, T> = HashMap::new();
    let status = vec![LeafStatus::Unknown; tree.leaf_count()];
    let value = match arena.canonicalize(tree, probs, &status) {
        Reduced::Resolved(_) => T::zero(),
        Reduced::State(id) => solve(&mut arena, &mut memo, id),
    };
    let states_explored = memo.len();
    let mut ctx = Extractor {
        tree,
        probs,
        arena,
        memo,
        strategies: HashMap::new(),
        reductions: HashMap::new(),
    };
    let mut state = ResidualState::new(tree);
    let witness = ctx.extract(&mut state);
    GeneralSolution {
        value,
        witness: Strategy::from_root(witness),
        states_explored,
    }
}

fn solve<T: Scalar>(arena: &mut CanonArena<T>, memo: &mut HashMap<u32, T>, id: u32) -> T {
    if let Some(v) = memo.get(&id) {
        return v.clone();
    }
    let mut best: Option<T> = None;
    for slot in arena.representatives(id).to_vec() {
        let q = arena.leaf_prob(id, slot);
        let c0 = match arena.assign(id, slot, false) {
            Reduced::Resolved(_) => T::zero(),
            Reduced::State(next) => solve(arena, memo, next),
        };
        let c1 = match arena.assign(id, slot, true) {
            Reduced::Resolved(_) => T::zero(),
            Reduced::State(next) => solve(arena, memo, next),
        };
        let cost = T::one() + q.clone() * c0 + q.complement() * c1;
        best = Some(match best {
            None => cost,
            Some(b) if cost < b => cost,
            Some(b) => b,
        });
    }
    let best = best.expect("an unresolved canonical state always has a leaf");
    memo.insert(id, best.clone());
    best
}

struct Extractor<'t, T: Scalar> {
    tree: &'t Tree,
    probs: &'t [T],
    arena: CanonArena<T>,
    memo: HashMap<u32, T>,
    strategies: HashMap<u64, Arc<StrategyNode>>,
    reductions: HashMap<u64, Reduced>,
}

impl<T: Scalar> Extractor<'_, T> {
    fn reduce(&mut self, state: &ResidualState) -> Reduced {
        let key = state.key();
        if let Some(&r) = self.reductions.get(&key) {
            return r;
        }
        let r = self
            .arena
            .canonicalize(self.tree, self.probs, state.statuses());
        self.reductions.insert(key, r);
        r
    }

    fn value_of(&mut self, state: &ResidualState) -> T {
        match self.reduce(state) {
            Reduced::Resolved(_) => T::zero(),
            Reduced::State(id) => self.memo[&id].clone(),
        }
    }

    fn extract(&mut self, state: &mut ResidualState) -> Arc<StrategyNode> {
        if let Some(v) = state.root_value() {
            return Arc::new(StrategyNode::Terminal(v));
        }
        let key = state.key();
        if let Some(node) = self.strategies.get(&key) {
            return node.clone();
        }
        let mut best: Option<(T, usize)> = None;
        for leaf in state.candidates() {
            let q = self.probs[leaf].clone();
            state.set(leaf, LeafStatus::Zero);
            let c0 = self.value_of(state);
            state.set(leaf, LeafStatus::One);
            let c1 = self.value_of(state);
            state.set(leaf, LeafStatus::Unknown);
            let cost = T::one() + q.clone() * c0 + q.complement() * c1;
            best = Some(match best {
                None => (cost, leaf),
                Some((b, _)) if cost < b => (cost, leaf),
                Some(other) => other,
            });
        }
        let (_, leaf) = best.expect("unresolved state has candidates");
        state.set(leaf, LeafStatus::Zero);
        let on_zero = self.extract(state);
        state.set(leaf, LeafStatus::One);
        let on_one = self.extract(state);
        state.set(leaf, LeafStatus::Unknown);
        let node = Arc::new(StrategyNode::Query {
            leaf,
            on_zero,
            on_one,
        });
        self.strategies.insert(key, node.clone());
        node
    }
}
