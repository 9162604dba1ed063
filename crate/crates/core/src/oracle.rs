//! Independent reference implementations used to cross-check the engines.
//!
//! Everything here is deliberately written the slow, obvious way and shares
//! no code path with the optimizer: probabilities by enumerating all 2^n
//! assignments, expected costs by tracing every assignment, optimal costs by
//! recursion over raw (uncanonicalized, unreduced) leaf-status vectors, and
//! — where the space is small enough — literal enumeration of every valid
//! strategy tree.

// Accumulators stay in the generic `T = T + x` form: the scalar trait
// promises Add, not AddAssign.
#![allow(clippy::assign_op_pattern)]

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::distribution::{CostValue, IndependentDistribution, Marginals, Prob};
use crate::error::Error;
use crate::optimal::ResidualState;
use crate::scalar::{Scalar, F64};
use crate::strategy::{Strategy, StrategyNode};
use crate::tree::{LeafStatus, NodeId, Tree};
use crate::Result;

const ENUMERATION_LIMIT: usize = 20;

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    assert!(n <= ENUMERATION_LIMIT, "enumeration limited to {ENUMERATION_LIMIT} leaves");
    (0u32..(1u32 << n)).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

fn assignment_probability<T: Scalar>(probs: &[T], assignment: &[bool]) -> T {
    let mut p = T::one();
    for (i, &bit) in assignment.iter().enumerate() {
        let q = probs[i].clone();
        p = p * if bit { q.complement() } else { q };
    }
    p
}

/// Probability of `node` evaluating to 0, summed over all assignments.
pub fn node_zero_by_enumeration(d: &IndependentDistribution, node: &NodeId) -> Result<Prob> {
    let tree = d.tree();
    let index = tree.node_index(node)?;
    match d.marginals() {
        Marginals::Exact(v) => {
            let mut total = BigRational::zero();
            for a in assignments(tree.leaf_count()) {
                if !evaluate_node(tree, index, &a) {
                    total = total + assignment_probability(v, &a);
                }
            }
            Prob::exact(total)
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let mut total = F64(0.0);
            for a in assignments(tree.leaf_count()) {
                if !evaluate_node(tree, index, &a) {
                    total = total + assignment_probability(&probs, &a);
                }
            }
            Prob::float(total.0.clamp(0.0, 1.0))
        }
    }
}

fn evaluate_node(tree: &Tree, node: usize, assignment: &[bool]) -> bool {
    if let Some(leaf) = tree.leaf_index(node) {
        return assignment[leaf];
    }
    let label = tree.label(node).expect("internal");
    let mut children = tree.children(node).iter();
    match label {
        crate::tree::Label::And => children.all(|&c| evaluate_node(tree, c, assignment)),
        crate::tree::Label::Or => children.any(|&c| evaluate_node(tree, c, assignment)),
    }
}

/// Expected cost as the sum over all assignments of
/// probability x path query count.
pub fn expected_cost_by_enumeration(
    d: &IndependentDistribution,
    s: &Strategy,
) -> Result<CostValue> {
    let tree = d.tree();
    let n = tree.leaf_count();
    match d.marginals() {
        Marginals::Exact(v) => {
            let mut total = BigRational::zero();
            for a in assignments(n) {
                let count = BigRational::from_ratio(path_queries(s, &a)? as i64, 1);
                total = total + assignment_probability(v, &a) * count;
            }
            Ok(CostValue::Exact(total))
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let mut total = F64(0.0);
            for a in assignments(n) {
                let count = F64(path_queries(s, &a)? as f64);
                total = total + assignment_probability(&probs, &a) * count;
            }
            Ok(CostValue::Float(total.0))
        }
    }
}

fn path_queries(s: &Strategy, assignment: &[bool]) -> Result<u64> {
    let mut node = s.root().clone();
    let mut count = 0u64;
    loop {
        match &*node {
            StrategyNode::Terminal(_) => return Ok(count),
            StrategyNode::Query {
                leaf,
                on_zero,
                on_one,
            } => {
                let bit = *assignment
                    .get(*leaf)
                    .ok_or_else(|| Error::Strategy(format!("unknown leaf index {leaf}")))?;
                count += 1;
                node = if bit { on_one.clone() } else { on_zero.clone() };
                if count > assignment.len() as u64 + 1 {
                    return Err(Error::Strategy("query path longer than leaf count".into()));
                }
            }
        }
    }
}

/// Minimum expected cost over the full valid-strategy space (wasteful
/// queries included) by exhaustive recursion over raw leaf-status vectors.
/// No reduction, no canonicalization, no symmetry: this is the independent
/// oracle for the optimizer.
pub fn min_cost_by_state_recursion(d: &IndependentDistribution) -> Result<CostValue> {
    let tree = d.tree();
    if tree.leaf_count() > ENUMERATION_LIMIT {
        return Err(Error::Budget {
            leaves: tree.leaf_count(),
            budget: ENUMERATION_LIMIT,
        });
    }
    match d.marginals() {
        Marginals::Exact(v) => {
            let mut memo = HashMap::new();
            let mut status = vec![LeafStatus::Unknown; tree.leaf_count()];
            Ok(CostValue::Exact(raw_min(tree, v, &mut status, &mut memo)))
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let mut memo = HashMap::new();
            let mut status = vec![LeafStatus::Unknown; tree.leaf_count()];
            Ok(CostValue::Float(
                raw_min(tree, &probs, &mut status, &mut memo).0,
            ))
        }
    }
}

fn status_key(status: &[LeafStatus]) -> u64 {
    let mut key = 0u64;
    for (i, s) in status.iter().enumerate() {
        let bits = match s {
            LeafStatus::Unknown => 0u64,
            LeafStatus::Zero => 1,
            LeafStatus::One => 2,
        };
        key |= bits << (2 * i);
    }
    key
}

fn raw_min<T: Scalar>(
    tree: &Tree,
    probs: &[T],
    status: &mut Vec<LeafStatus>,
    memo: &mut HashMap<u64, T>,
) -> T {
    if tree.resolve(status)[tree.root()].is_some() {
        return T::zero();
    }
    let key = status_key(status);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut best: Option<T> = None;
    for leaf in 0..status.len() {
        if status[leaf] != LeafStatus::Unknown {
            continue;
        }
        status[leaf] = LeafStatus::Zero;
        let c0 = raw_min(tree, probs, status, memo);
        status[leaf] = LeafStatus::One;
        let c1 = raw_min(tree, probs, status, memo);
        status[leaf] = LeafStatus::Unknown;
        let q = probs[leaf].clone();
        let cost = T::one() + q.clone() * c0 + q.complement() * c1;
        best = Some(match best {
            None => cost,
            Some(b) => {
                if cost < b {
                    cost
                } else {
                    b
                }
            }
        });
    }
    let best = best.expect("unresolved root always has an unknown leaf");
    memo.insert(key, best.clone());
    best
}

/// Number of distinct valid strategy trees in the warning-free space
/// (candidates are unknown leaves with all ancestors unresolved).
pub fn count_strategies(tree: &Tree) -> BigUint {
    fn rec(state: &mut ResidualState, memo: &mut HashMap<u64, BigUint>) -> BigUint {
        if state.root_value().is_some() {
            return BigUint::one();
        }
        let key = state.key();
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        for leaf in state.candidates() {
            state.set(leaf, LeafStatus::Zero);
            let n0 = rec(state, memo);
            state.set(leaf, LeafStatus::One);
            let n1 = rec(state, memo);
            state.set(leaf, LeafStatus::Unknown);
            total += n0 * n1;
        }
        memo.insert(key, total.clone());
        total
    }
    let mut state = ResidualState::new(tree);
    rec(&mut state, &mut HashMap::new())
}

/// Materialize every warning-free valid strategy, or `None` when the space
/// exceeds `cap`.
pub fn enumerate_strategies(tree: &Tree, cap: usize) -> Option<Vec<Strategy>> {
    if count_strategies(tree) > BigUint::from(cap) {
        return None;
    }
    type Memo = HashMap<u64, Arc<Vec<Arc<StrategyNode>>>>;
    fn rec(state: &mut ResidualState, memo: &mut Memo) -> Arc<Vec<Arc<StrategyNode>>> {
        if let Some(v) = state.root_value() {
            return Arc::new(vec![Arc::new(StrategyNode::Terminal(v))]);
        }
        let key = state.key();
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut all = Vec::new();
        for leaf in state.candidates() {
            state.set(leaf, LeafStatus::Zero);
            let zeros = rec(state, memo);
            state.set(leaf, LeafStatus::One);
            let ones = rec(state, memo);
            state.set(leaf, LeafStatus::Unknown);
            for z in zeros.iter() {
                for o in ones.iter() {
                    all.push(Arc::new(StrategyNode::Query {
                        leaf,
                        on_zero: z.clone(),
                        on_one: o.clone(),
                    }));
                }
            }
        }
        let all = Arc::new(all);
        memo.insert(key, all.clone());
        all
    }
    let mut state = ResidualState::new(tree);
    let roots = rec(&mut state, &mut HashMap::new());
    Some(roots.iter().map(|r| Strategy::from_root(r.clone())).collect())
}

/// Minimum engine-priced cost over the literally enumerated strategy space.
pub fn min_cost_by_strategy_enumeration(
    d: &IndependentDistribution,
    cap: usize,
) -> Result<Option<CostValue>> {
    let strategies = match enumerate_strategies(d.tree(), cap) {
        Some(s) => s,
        None => return Ok(None),
    };
    let mut best: Option<CostValue> = None;
    for s in &strategies {
        let c = crate::strategy::expected_cost(d, s)?;
        best = Some(match best {
            None => c,
            Some(b) => match (&c, &b) {
                (CostValue::Exact(x), CostValue::Exact(y)) => {
                    if x < y {
                        c
                    } else {
                        b
                    }
                }
                (CostValue::Float(x), CostValue::Float(y)) => {
                    if x < y {
                        c
                    } else {
                        b
                    }
                }
                _ => return Err(Error::Backend("mixed cost backends".into())),
            },
        });
    }
    match best {
        Some(b) => Ok(Some(b)),
        None => Err(Error::Internal("no strategies enumerated".into())),
    }
}

/// Exhaustive lattice scan of `f` over the unit cube with the given step
/// count per axis (steps+1 points per axis). Returns the best point and
/// value.
pub fn grid_max(n: usize, steps: usize, mut f: impl FnMut(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let mut point = vec![0.0f64; n];
    let mut best_point = point.clone();
    let mut best = f64::NEG_INFINITY;
    let mut counters = vec![0usize; n];
    loop {
        for (i, &c) in counters.iter().enumerate() {
            point[i] = c as f64 / steps as f64;
        }
        let v = f(&point);
        if v > best {
            best = v;
            best_point = point.clone();
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return (best_point, best);
            }
            counters[i] += 1;
            if counters[i] <= steps {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Label;

    #[test]
    fn strategy_counts_on_small_trees() {
        // Hand-counted: 2-leaf AND has 2 strategies, AND(l,l,l) has 6,
        // the 4-leaf uniform tree has 48, AND(OR(l,l),OR(l,l,l)) has 576.
        let t2 = Tree::uniform(Label::And, 2, 1).unwrap();
        assert_eq!(count_strategies(&t2), BigUint::from(2u32));
        let t3 = Tree::uniform(Label::And, 3, 1).unwrap();
        assert_eq!(count_strategies(&t3), BigUint::from(6u32));
        let t4 = Tree::uniform(Label::And, 2, 2).unwrap();
        assert_eq!(count_strategies(&t4), BigUint::from(48u32));
        let t5 = Tree::parse("AND(OR(l,l),OR(l,l,l))").unwrap();
        assert_eq!(count_strategies(&t5), BigUint::from(576u32));
    }

    #[test]
    fn eight_leaf_strategy_space_is_astronomical() {
        let t = Tree::uniform(Label::Or, 2, 3).unwrap();
        let count = count_strategies(&t);
        assert!(count > BigUint::from(10u64).pow(12));
    }

    #[test]
    fn enumerated_strategies_all_validate() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let all = enumerate_strategies(&tree, 100).unwrap();
        assert_eq!(all.len(), 48);
        for s in &all {
            let report = crate::strategy::validate(&tree, s);
            assert!(report.is_ok());
            assert!(report.warnings.is_empty());
        }
    }
}
