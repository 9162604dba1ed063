//! Deterministic query strategies as explicit decision trees.
//!
//! A strategy node either queries a leaf and branches on the observed value
//! or terminates with a claimed root value. Validity requires that terminals
//! appear exactly when the revealed leaf values logically force the root:
//! stopping earlier is under-determined, querying past that point is an
//! error. Querying a leaf whose (non-root) ancestor is already resolved is
//! wasteful but meaningful and is reported as a warning only.
//!
//! Structural sharing is allowed (nodes are `Arc`s and may form diamonds);
//! all path-based checks run on the unfolding.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::{CostValue, IndependentDistribution, Marginals, Prob};
use crate::error::Error;
use crate::optimal::ResidualState;
use crate::scalar::{Scalar, F64};
use crate::tree::{LeafStatus, NodeId, Tree};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyNode {
    /// Stop and claim the root value.
    Terminal(bool),
    /// Query a leaf (by leaf index) and branch on its value.
    Query {
        leaf: usize,
        on_zero: Arc<StrategyNode>,
        on_one: Arc<StrategyNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    root: Arc<StrategyNode>,
}

impl Strategy {
    pub fn terminal(value: bool) -> Strategy {
        Strategy {
            root: Arc::new(StrategyNode::Terminal(value)),
        }
    }

    pub fn query(leaf: usize, on_zero: Strategy, on_one: Strategy) -> Strategy {
        Strategy {
            root: Arc::new(StrategyNode::Query {
                leaf,
                on_zero: on_zero.root,
                on_one: on_one.root,
            }),
        }
    }

    pub fn root(&self) -> &Arc<StrategyNode> {
        &self.root
    }

    pub(crate) fn from_root(root: Arc<StrategyNode>) -> Strategy {
        Strategy { root }
    }

    /// Compile a strategy from a state policy: given the current residual
    /// knowledge, the policy names the next leaf to query. Compilation stops
    /// each branch exactly when the root resolves, so the result never
    /// under- or over-queries at the root. Equal states share structure.
    pub fn from_policy<F>(tree: &Tree, mut policy: F) -> Result<Strategy>
    where
        F: FnMut(&ResidualState) -> Option<usize>,
    {
        let mut state = ResidualState::new(tree);
        let mut memo: HashMap<u64, Arc<StrategyNode>> = HashMap::new();
        let root = compile(&mut state, &mut policy, &mut memo)?;
        Ok(Strategy { root })
    }

    /// The directional strategy with skipping for a fixed leaf order: always
    /// query the first leaf in `order` that is unknown and still useful.
    pub fn directional(tree: &Tree, order: &[usize]) -> Result<Strategy> {
        if order.len() != tree.leaf_count() {
            return Err(Error::Strategy(format!(
                "order covers {} leaves, tree has {}",
                order.len(),
                tree.leaf_count()
            )));
        }
        let mut seen = vec![false; tree.leaf_count()];
        for &l in order {
            if l >= tree.leaf_count() || seen[l] {
                return Err(Error::Strategy("order is not a permutation of leaves".into()));
            }
            seen[l] = true;
        }
        let order = order.to_vec();
        Strategy::from_policy(tree, move |state| {
            order
                .iter()
                .copied()
                .find(|&l| state.status(l) == LeafStatus::Unknown && state.leaf_useful(l))
        })
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = HashSet::new();
        fn rec(node: &Arc<StrategyNode>, seen: &mut HashSet<*const StrategyNode>) {
            if !seen.insert(Arc::as_ptr(node)) {
                return;
            }
            if let StrategyNode::Query { on_zero, on_one, .. } = &**node {
                rec(on_zero, seen);
                rec(on_one, seen);
            }
        }
        rec(&self.root, &mut seen);
        seen.len()
    }

    /// Canonical JSON: leaf paths as node-id strings, keys sorted, no
    /// whitespace. Byte-stable across round trips.
    pub fn to_canonical_json(&self, tree: &Tree) -> String {
        fn value(node: &StrategyNode, tree: &Tree) -> serde_json::Value {
            match node {
                StrategyNode::Terminal(v) => serde_json::json!({ "terminal": *v as u8 }),
                StrategyNode::Query {
                    leaf,
                    on_zero,
                    on_one,
                } => serde_json::json!({
                    "query": tree.render_leaf_id(*leaf),
                    "on_zero": value(on_zero, tree),
                    "on_one": value(on_one, tree),
                }),
            }
        }
        value(&self.root, tree).to_string()
    }

    pub fn from_json(tree: &Tree, text: &str) -> Result<Strategy> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: 0,
            msg: format!("bad strategy JSON: {e}"),
        })?;
        fn build(value: &serde_json::Value, tree: &Tree) -> Result<Arc<StrategyNode>> {
            let obj = value.as_object().ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "strategy JSON nodes must be objects".into(),
            })?;
            if let Some(t) = obj.get("terminal") {
                let v = match t {
                    serde_json::Value::Number(n) if n.as_u64() == Some(0) => false,
                    serde_json::Value::Number(n) if n.as_u64() == Some(1) => true,
                    serde_json::Value::Bool(b) => *b,
                    other => {
                        return Err(Error::Parse {
                            pos: 0,
                            msg: format!("terminal must be 0 or 1, got {other}"),
                        })
                    }
                };
                return Ok(Arc::new(StrategyNode::Terminal(v)));
            }
            let leaf_text = obj
                .get("query")
                .and_then(|q| q.as_str())
                .ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: "query node needs a \"query\" leaf path".into(),
                })?;
            let id = tree.parse_node_id(leaf_text)?;
            let node = tree.node_index(&id)?;
            let leaf = tree
                .leaf_index(node)
                .ok_or_else(|| Error::Strategy(format!("{leaf_text:?} is not a leaf")))?;
            let on_zero = obj.get("on_zero").ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "query node needs \"on_zero\"".into(),
            })?;
            let on_one = obj.get("on_one").ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "query node needs \"on_one\"".into(),
            })?;
            Ok(Arc::new(StrategyNode::Query {
                leaf,
                on_zero: build(on_zero, tree)?,
                on_one: build(on_one, tree)?,
            }))
        }
        Ok(Strategy {
            root: build(&value, tree)?,
        })
    }
}

fn compile<F>(
    state: &mut ResidualState,
    policy: &mut F,
    memo: &mut HashMap<u64, Arc<StrategyNode>>,
) -> Result<Arc<StrategyNode>>
where
    F: FnMut(&ResidualState) -> Option<usize>,
{
    if let Some(v) = state.root_value() {
        return Ok(Arc::new(StrategyNode::Terminal(v)));
    }
    let key = state.key();
    if let Some(node) = memo.get(&key) {
        return Ok(node.clone());
    }
    let leaf = policy(state).ok_or_else(|| {
        Error::Strategy("policy returned no leaf while the root is unresolved".into())
    })?;
    if state.status(leaf) != LeafStatus::Unknown {
        return Err(Error::Strategy(format!(
            "policy returned already-known leaf {leaf}"
        )));
    }
    state.set(leaf, LeafStatus::Zero);
    let on_zero = compile(state, policy, memo)?;
    state.set(leaf, LeafStatus::One);
    let on_one = compile(state, policy, memo)?;
    state.set(leaf, LeafStatus::Unknown);
    let node = Arc::new(StrategyNode::Query {
        leaf,
        on_zero,
        on_one,
    });
    memo.insert(key, node.clone());
    Ok(node)
}

/// One step of a strategy run on a concrete assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOutcome {
    pub assignment: Vec<bool>,
    /// Leaves queried, in order, as node ids.
    pub queries: Vec<NodeId>,
    pub root_value: bool,
    /// Probability of this assignment under the distribution.
    pub probability: Prob,
}

/// Run a strategy on a full assignment, recording the query sequence.
pub fn trace(
    d: &IndependentDistribution,
    s: &Strategy,
    assignment: &[bool],
) -> Result<TraceOutcome> {
    let tree = d.tree();
    if assignment.len() != tree.leaf_count() {
        return Err(Error::Assignment(format!(
            "assignment covers {} leaves, tree has {}",
            assignment.len(),
            tree.leaf_count()
        )));
    }
    let mut queries = Vec::new();
    let mut node = s.root().clone();
    loop {
        match &*node {
            StrategyNode::Terminal(_) => break,
            StrategyNode::Query {
                leaf,
                on_zero,
                on_one,
            } => {
                if *leaf >= tree.leaf_count() {
                    return Err(Error::Strategy(format!("unknown leaf index {leaf}")));
                }
                queries.push(tree.leaf_id(*leaf).clone());
                node = if assignment[*leaf] {
                    on_one.clone()
                } else {
                    on_zero.clone()
                };
            }
        }
    }
    let probability = match d.marginals() {
        Marginals::Exact(v) => {
            let mut p = num_rational::BigRational::from_ratio(1, 1);
            for (i, &bit) in assignment.iter().enumerate() {
                let q = v[i].clone();
                p *= if bit { q.complement() } else { q };
            }
            Prob::Exact(p)
        }
        Marginals::Float(v) => {
            let mut p = 1.0;
            for (i, &bit) in assignment.iter().enumerate() {
                p *= if bit { 1.0 - v[i] } else { v[i] };
            }
            Prob::Float(p)
        }
    };
    Ok(TraceOutcome {
        assignment: assignment.to_vec(),
        queries,
        root_value: tree.evaluate(assignment)?,
        probability,
    })
}

/// Why a strategy is invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// References a leaf index outside the tree.
    UnknownLeaf { leaf: usize },
    /// Queries a leaf twice on one path.
    DuplicateQuery { leaf: NodeId },
    /// Terminal claims a root value the revealed leaves do not force.
    UnforcedTerminal { claimed: bool },
    /// Terminal claims the opposite of the forced root value.
    WrongTerminal { claimed: bool, forced: bool },
    /// Keeps querying after the root is already forced.
    QueryAfterRootForced { leaf: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The failing root-to-terminal prefix as (leaf, observed value) pairs.
    pub path: Vec<(NodeId, bool)>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let path: Vec<String> = self
            .path
            .iter()
            .map(|(id, v)| format!("{}={}", id.render(true), *v as u8))
            .collect();
        write!(f, "{:?} on path [{}]", self.kind, path.join(","))
    }
}

/// A wasteful but legal query: the leaf sits under an already-resolved
/// internal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub leaf: NodeId,
    pub resolved_ancestor: NodeId,
    pub path: Vec<(NodeId, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

const MAX_WARNINGS: usize = 100;

/// Check the strategy invariants, reporting the first violating path and
/// any wasteful-query warnings.
pub fn validate(tree: &Tree, s: &Strategy) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut state = ResidualState::new(tree);
    let mut path: Vec<(usize, bool)> = Vec::new();
    walk_validate(tree, s.root(), &mut state, &mut path, &mut report);
    report
}

fn render_path(tree: &Tree, path: &[(usize, bool)]) -> Vec<(NodeId, bool)> {
    path.iter()
        .map(|&(leaf, v)| (tree.leaf_id(leaf).clone(), v))
        .collect()
}

fn walk_validate(
    tree: &Tree,
    node: &Arc<StrategyNode>,
    state: &mut ResidualState,
    path: &mut Vec<(usize, bool)>,
    report: &mut ValidationReport,
) {
    if report.violation.is_some() {
        return;
    }
    match &**node {
        StrategyNode::Terminal(claimed) => match state.root_value() {
            None => {
                report.violation = Some(Violation {
                    kind: ViolationKind::UnforcedTerminal { claimed: *claimed },
                    path: render_path(tree, path),
                });
            }
            Some(forced) if forced != *claimed => {
                report.violation = Some(Violation {
                    kind: ViolationKind::WrongTerminal {
                        claimed: *claimed,
                        forced,
                    },
                    path: render_path(tree, path),
                });
            }
            Some(_) => {}
        },
        StrategyNode::Query {
            leaf,
            on_zero,
            on_one,
        } => {
            if *leaf >= tree.leaf_count() {
                report.violation = Some(Violation {
                    kind: ViolationKind::UnknownLeaf { leaf: *leaf },
                    path: render_path(tree, path),
                });
                return;
            }
            if state.root_value().is_some() {
                report.violation = Some(Violation {
                    kind: ViolationKind::QueryAfterRootForced {
                        leaf: tree.leaf_id(*leaf).clone(),
                    },
                    path: render_path(tree, path),
                });
                return;
            }
            if state.status(*leaf) != LeafStatus::Unknown {
                report.violation = Some(Violation {
                    kind: ViolationKind::DuplicateQuery {
                        leaf: tree.leaf_id(*leaf).clone(),
                    },
                    path: render_path(tree, path),
                });
                return;
            }
            if !state.leaf_useful(*leaf) && report.warnings.len() < MAX_WARNINGS {
                // Find the resolved ancestor for the report.
                let mut anc = tree.leaf_node(*leaf);
                let mut resolved = anc;
                while let Some(p) = tree.parent(anc) {
                    if state.node_value(p).is_some() {
                        resolved = p;
                        break;
                    }
                    anc = p;
                }
                report.warnings.push(Warning {
                    leaf: tree.leaf_id(*leaf).clone(),
                    resolved_ancestor: tree.node_id(resolved).clone(),
                    path: render_path(tree, path),
                });
            }
            for (value, branch) in [(false, on_zero), (true, on_one)] {
                state.set(*leaf, LeafStatus::from_value(value));
                path.push((*leaf, value));
                walk_validate(tree, branch, state, path, report);
                path.pop();
                state.set(*leaf, LeafStatus::Unknown);
                if report.violation.is_some() {
                    return;
                }
            }
        }
    }
}

/// Witness for a depth-first violation: while `node` was entered and still
/// unresolved, the strategy queried `interrupting_leaf` outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFirstWitness {
    pub path: Vec<(NodeId, bool)>,
    pub node: NodeId,
    pub interrupting_leaf: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFirstReport {
    pub depth_first: bool,
    pub witness: Option<DepthFirstWitness>,
}

/// Depth-first check: on every path, once a leaf below an internal node `x`
/// is queried, queries stay below `x` until the revealed values force `x`.
/// "Finds the value" is read as logical forcing from revealed leaves.
pub fn is_depth_first(tree: &Tree, s: &Strategy) -> DepthFirstReport {
    let mut state = ResidualState::new(tree);
    let mut path: Vec<(usize, bool)> = Vec::new();
    let mut witness = None;
    walk_depth_first(tree, s.root(), &mut state, &mut path, None, &mut witness);
    DepthFirstReport {
        depth_first: witness.is_none(),
        witness,
    }
}

fn walk_depth_first(
    tree: &Tree,
    node: &Arc<StrategyNode>,
    state: &mut ResidualState,
    path: &mut Vec<(usize, bool)>,
    last_leaf: Option<usize>,
    witness: &mut Option<DepthFirstWitness>,
) {
    if witness.is_some() {
        return;
    }
    if let StrategyNode::Query {
        leaf,
        on_zero,
        on_one,
    } = &**node
    {
        if *leaf >= tree.leaf_count() || state.status(*leaf) != LeafStatus::Unknown {
            return; // invalid strategies are the validator's business
        }
        if let Some(prev) = last_leaf {
            // Deepest unresolved ancestor of the previous query constrains
            // where the next query may go.
            let mut anc = tree.leaf_node(prev);
            let mut engaged = None;
            while let Some(p) = tree.parent(anc) {
                if state.node_value(p).is_none() {
                    engaged = Some(p);
                    break;
                }
                anc = p;
            }
            if let Some(x) = engaged {
                let inside = tree
                    .node_id(x)
                    .is_prefix_of(tree.node_id(tree.leaf_node(*leaf)));
                if !inside {
                    *witness = Some(DepthFirstWitness {
                        path: render_path(tree, path),
                        node: tree.node_id(x).clone(),
                        interrupting_leaf: tree.leaf_id(*leaf).clone(),
                    });
                    return;
                }
            }
        }
        for (value, branch) in [(false, on_zero), (true, on_one)] {
            state.set(*leaf, LeafStatus::from_value(value));
            path.push((*leaf, value));
            walk_depth_first(tree, branch, state, path, Some(*leaf), witness);
            path.pop();
            state.set(*leaf, LeafStatus::Unknown);
            if witness.is_some() {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionalReport {
    pub directional: bool,
    /// A witness linear order (leaf indices) consistent with every path.
    pub order: Option<Vec<usize>>,
    /// A two-cycle witness when one exists.
    pub conflict: Option<(NodeId, NodeId)>,
}

/// Directional check: does a fixed linear leaf order exist that every
/// execution's query sequence respects? Implemented as a precedence-graph
/// cycle check; the witness order is the smallest-leaf-first topological
/// order.
pub fn is_directional(tree: &Tree, s: &Strategy) -> DirectionalReport {
    let n = tree.leaf_count();
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let mut sequence: Vec<usize> = Vec::new();
    fn walk(
        node: &Arc<StrategyNode>,
        sequence: &mut Vec<usize>,
        edges: &mut HashSet<(usize, usize)>,
        n: usize,
    ) {
        if let StrategyNode::Query {
            leaf,
            on_zero,
            on_one,
        } = &**node
        {
            if *leaf >= n {
                return;
            }
            for &earlier in sequence.iter() {
                edges.insert((earlier, *leaf));
            }
            sequence.push(*leaf);
            walk(on_zero, sequence, edges, n);
            walk(on_one, sequence, edges, n);
            sequence.pop();
        }
    }
    walk(s.root(), &mut sequence, &mut edges, n);

    let mut indegree = vec![0usize; n];
    for &(_, v) in &edges {
        indegree[v] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for _ in 0..n {
        let next = (0..n).find(|&v| !placed[v] && indegree[v] == 0);
        match next {
            Some(v) => {
                placed[v] = true;
                order.push(v);
                for &(a, b) in &edges {
                    if a == v {
                        indegree[b] -= 1;
                    }
                }
            }
            None => {
                let conflict = edges
                    .iter()
                    .find(|&&(a, b)| edges.contains(&(b, a)))
                    .map(|&(a, b)| (tree.leaf_id(a).clone(), tree.leaf_id(b).clone()));
                return DirectionalReport {
                    directional: false,
                    order: None,
                    conflict,
                };
            }
        }
    }
    DirectionalReport {
        directional: true,
        order: Some(order),
        conflict: None,
    }
}

/// Exact expected query count: terminals cost 0, a query costs
/// 1 + q * cost(on_zero) + (1-q) * cost(on_one). Assumes `validate` passed;
/// shared nodes are priced once.
pub fn expected_cost(d: &IndependentDistribution, s: &Strategy) -> Result<CostValue> {
    match d.marginals() {
        Marginals::Exact(v) => {
            let mut memo = HashMap::new();
            Ok(CostValue::Exact(cost_rec(s.root(), v, &mut memo)?))
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let mut memo = HashMap::new();
            Ok(CostValue::Float(cost_rec(s.root(), &probs, &mut memo)?.0))
        }
    }
}

pub(crate) fn cost_rec<T: Scalar>(
    node: &Arc<StrategyNode>,
    probs: &[T],
    memo: &mut HashMap<*const StrategyNode, T>,
) -> Result<T> {
    let ptr = Arc::as_ptr(node);
    if let Some(v) = memo.get(&ptr) {
        return Ok(v.clone());
    }
    let value = match &**node {
        StrategyNode::Terminal(_) => T::zero(),
        StrategyNode::Query {
            leaf,
            on_zero,
            on_one,
        } => {
            let q = probs
                .get(*leaf)
                .cloned()
                .ok_or_else(|| Error::Strategy(format!("unknown leaf index {leaf}")))?;
            let c0 = cost_rec(on_zero, probs, memo)?;
            let c1 = cost_rec(on_one, probs, memo)?;
            T::one() + q.clone() * c0 + q.complement() * c1
        }
    };
    memo.insert(ptr, value.clone());
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

const SHARD: u64 = 1 << 16;

/// Unbiased sample mean of query counts over independently sampled
/// assignments. Sampling is sharded with per-shard derived RNG streams, so
/// the estimate is reproducible for a given seed regardless of thread count.
pub fn monte_carlo_cost(
    d: &IndependentDistribution,
    s: &Strategy,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::Assignment("samples must be >= 1".into()));
    }
    let probs = d.float_marginals()?.to_vec();
    let shards: Vec<(u64, u64)> = (0..samples.div_ceil(SHARD))
        .map(|i| (i, SHARD.min(samples - i * SHARD)))
        .collect();
    let root = s.root().clone();
    let stats: Vec<(u64, u128)> = shards
        .par_iter()
        .map(|&(shard, count)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let mut sum = 0u64;
            let mut sumsq = 0u128;
            for _ in 0..count {
                let mut queries = 0u64;
                let mut node = &root;
                loop {
                    match &**node {
                        StrategyNode::Terminal(_) => break,
                        StrategyNode::Query {
                            leaf,
                            on_zero,
                            on_one,
                        } => {
                            queries += 1;
                            let zero = rng.random::<f64>() < probs[*leaf];
                            node = if zero { on_zero } else { on_one };
                        }
                    }
                }
                sum += queries;
                sumsq += (queries as u128) * (queries as u128);
            }
            (sum, sumsq)
        })
        .collect();
    let sum: u64 = stats.iter().map(|s| s.0).sum();
    let sumsq: u128 = stats.iter().map(|s| s.1).sum();
    let n = samples as f64;
    let mean = sum as f64 / n;
    let std_error = if samples > 1 {
        let var = (sumsq as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::separating_distribution;
    use crate::tree::Label;
    use num_rational::BigRational;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use proptest::strategy::Strategy as PropStrategy;
    use std::sync::Arc as StdArc;

    fn and22() -> Tree {
        Tree::uniform(Label::And, 2, 2).unwrap()
    }

    fn solve_strategy(tree: &Tree) -> Strategy {
        let order: Vec<usize> = (0..tree.leaf_count()).collect();
        Strategy::directional(tree, &order).unwrap()
    }

    fn exact_iid(tree: &Tree, num: i64, den: i64) -> IndependentDistribution {
        IndependentDistribution::iid(
            StdArc::new(tree.clone()),
            Prob::Exact(BigRational::from_ratio(num, den)),
        )
        .unwrap()
    }

    #[test]
    fn bare_terminal_is_underdetermined() {
        let tree = and22();
        let report = validate(&tree, &Strategy::terminal(true));
        assert!(!report.is_ok());
        assert!(matches!(
            report.violation.as_ref().unwrap().kind,
            ViolationKind::UnforcedTerminal { claimed: true }
        ));
    }

    #[test]
    fn solve_is_valid_depth_first_directional() {
        let tree = and22();
        let s = solve_strategy(&tree);
        let report = validate(&tree, &s);
        assert!(report.is_ok(), "{:?}", report.violation);
        assert!(report.warnings.is_empty());
        assert!(is_depth_first(&tree, &s).depth_first);
        let dir = is_directional(&tree, &s);
        assert!(dir.directional);
        assert_eq!(dir.order.unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn duplicate_query_is_reported() {
        let tree = and22();
        // Query x00 twice on the zero path.
        let inner = Strategy::query(0, Strategy::terminal(false), Strategy::terminal(false));
        let s = Strategy::query(0, inner, Strategy::terminal(true));
        let report = validate(&tree, &s);
        assert!(matches!(
            report.violation.as_ref().unwrap().kind,
            ViolationKind::DuplicateQuery { .. }
        ));
    }

    #[test]
    fn query_after_root_forced_is_reported() {
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        // After x0 = 0 the root is forced; querying x1 is an error.
        let wasteful = Strategy::query(1, Strategy::terminal(false), Strategy::terminal(false));
        let cont = Strategy::query(1, Strategy::terminal(false), Strategy::terminal(true));
        let s = Strategy::query(0, wasteful, cont);
        let report = validate(&tree, &s);
        assert!(matches!(
            report.violation.as_ref().unwrap().kind,
            ViolationKind::QueryAfterRootForced { .. }
        ));
    }

    #[test]
    fn wasteful_query_is_a_warning_not_an_error() {
        let tree = and22();
        // x00 = 1 resolves x0; querying x01 afterwards is wasteful but ok.
        fn resolve_right() -> Strategy {
            Strategy::query(
                2,
                Strategy::query(3, Strategy::terminal(false), Strategy::terminal(true)),
                Strategy::terminal(true),
            )
        }
        let wasteful_branch = Strategy::query(1, resolve_right(), resolve_right());
        let zero_branch = Strategy::query(
            1,
            Strategy::terminal(false),
            Strategy::query(
                2,
                Strategy::query(3, Strategy::terminal(false), Strategy::terminal(true)),
                Strategy::terminal(true),
            ),
        );
        let s = Strategy::query(0, zero_branch, wasteful_branch);
        let report = validate(&tree, &s);
        assert!(report.is_ok(), "{:?}", report.violation);
        assert!(!report.warnings.is_empty());
        assert_eq!(report.warnings[0].leaf.render(false), "01");
        assert_eq!(report.warnings[0].resolved_ancestor.render(false), "0");
    }

    #[test]
    fn crossing_order_is_not_depth_first() {
        let tree = and22();
        let s = Strategy::directional(&tree, &[0, 2, 3, 1]).unwrap();
        assert!(validate(&tree, &s).is_ok());
        let report = is_depth_first(&tree, &s);
        assert!(!report.depth_first);
        let w = report.witness.unwrap();
        assert_eq!(w.node.render(false), "0");
        assert_eq!(w.interrupting_leaf.render(false), "10");
        // Still directional by construction.
        assert!(is_directional(&tree, &s).directional);
    }

    #[test]
    fn conflicting_paths_are_not_directional() {
        let tree = and22();
        // x00=0: query x01 then x10...; x00=1: query x10 then x01 (wasteful
        // but valid), creating a 2-cycle between x01 and x10.
        let finish_right = Strategy::query(
            3,
            Strategy::terminal(false),
            Strategy::terminal(true),
        );
        let zero_branch = Strategy::query(
            1,
            Strategy::terminal(false),
            Strategy::query(2, finish_right.clone(), Strategy::terminal(true)),
        );
        let one_branch = Strategy::query(
            2,
            Strategy::query(
                1,
                Strategy::query(3, Strategy::terminal(false), Strategy::terminal(true)),
                Strategy::query(3, Strategy::terminal(false), Strategy::terminal(true)),
            ),
            Strategy::terminal(true),
        );
        let s = Strategy::query(0, zero_branch, one_branch);
        let report = validate(&tree, &s);
        assert!(report.is_ok(), "{:?}", report.violation);
        let dir = is_directional(&tree, &s);
        assert!(!dir.directional);
        let (a, b) = dir.conflict.unwrap();
        let pair: Vec<String> = vec![a.render(false), b.render(false)];
        assert!(pair.contains(&"01".to_string()) && pair.contains(&"10".to_string()));
    }

    #[test]
    fn single_query_cost_with_sure_zero_leaf() {
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let d = IndependentDistribution::exact(
            StdArc::new(tree.clone()),
            vec![BigRational::from_ratio(1, 1), BigRational::from_ratio(1, 2)],
        )
        .unwrap();
        let s = Strategy::query(
            0,
            Strategy::terminal(false),
            Strategy::query(1, Strategy::terminal(false), Strategy::terminal(true)),
        );
        assert!(validate(&tree, &s).is_ok());
        let cost = expected_cost(&d, &s).unwrap();
        assert_eq!(cost.as_exact().unwrap(), &BigRational::from_ratio(1, 1));
    }

    #[test]
    fn solve_cost_on_separating_distribution_closed_form() {
        // cost(SOLVE, d_eps) = (1+3/4)(1+1/2)(1+(1+eps)/2)
        for (num, den) in [(1i64, 1000i64), (1, 100), (1, 10), (1, 3), (1, 1)] {
            let eps = BigRational::from_ratio(num, den);
            let d = separating_distribution(&Prob::Exact(eps.clone())).unwrap();
            let s = solve_strategy(d.tree());
            let cost = expected_cost(&d, &s).unwrap();
            let closed = BigRational::from_ratio(7, 4)
                * BigRational::from_ratio(3, 2)
                * (BigRational::from_ratio(1, 1)
                    + (BigRational::from_ratio(1, 1) + eps) / BigRational::from_ratio(2, 1));
            assert_eq!(cost.as_exact().unwrap(), &closed);
        }
    }

    #[test]
    fn trace_records_queries_and_probability() {
        let tree = and22();
        let d = exact_iid(&tree, 1, 2);
        let s = solve_strategy(&tree);
        let t = trace(&d, &s, &[true, false, true, false]).unwrap();
        // x00=1 resolves x0, jump to x10=1 which resolves the root.
        let q: Vec<String> = t.queries.iter().map(|id| id.render(false)).collect();
        assert_eq!(q, vec!["00", "10"]);
        assert!(t.root_value);
        assert_eq!(
            t.probability.as_exact().unwrap(),
            &BigRational::from_ratio(1, 16)
        );
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let d = separating_distribution(&Prob::Float(0.01)).unwrap();
        let exact = separating_distribution(&Prob::Exact(BigRational::from_ratio(1, 100))).unwrap();
        let s = solve_strategy(d.tree());
        let mc1 = monte_carlo_cost(&d, &s, 100_000, 7).unwrap();
        let mc2 = monte_carlo_cost(&d, &s, 100_000, 7).unwrap();
        assert_eq!(mc1, mc2);
        let truth = expected_cost(&exact, &s).unwrap().to_f64();
        assert!(
            (mc1.mean - truth).abs() <= 5.0 * mc1.std_error,
            "mean {} vs exact {} (stderr {})",
            mc1.mean,
            truth,
            mc1.std_error
        );
    }

    #[test]
    fn monte_carlo_single_sample_bounds() {
        let tree = and22();
        let d = IndependentDistribution::float(StdArc::new(tree.clone()), vec![0.5; 4]).unwrap();
        let s = solve_strategy(&tree);
        let mc = monte_carlo_cost(&d, &s, 1, 3).unwrap();
        assert_eq!(mc.std_error, 0.0);
        assert!(mc.mean >= 1.0 && mc.mean <= 4.0);
        assert_eq!(mc.mean.fract(), 0.0);
    }

    #[test]
    fn canonical_json_round_trips_byte_stable() {
        let tree = and22();
        let s = solve_strategy(&tree);
        let json = s.to_canonical_json(&tree);
        assert!(!json.contains(' '));
        let back = Strategy::from_json(&tree, &json).unwrap();
        assert_eq!(back.to_canonical_json(&tree), json);
        // keys sorted: on_one < on_zero < query
        let i1 = json.find("\"on_one\"").unwrap();
        let i2 = json.find("\"on_zero\"").unwrap();
        let i3 = json.find("\"query\"").unwrap();
        assert!(i1 < i2 && i2 < i3);
    }

    fn arb_valid_strategy_and_probs(
    ) -> impl PropStrategy<Value = (Tree, Strategy, Vec<BigRational>)> {
        (any::<u64>(), 0usize..4).prop_map(|(seed, which)| {
            let tree = match which {
                0 => Tree::uniform(Label::And, 2, 2).unwrap(),
                1 => Tree::uniform(Label::And, 3, 1).unwrap(),
                2 => Tree::parse("AND(l,OR(l,l))").unwrap(),
                _ => Tree::uniform(Label::Or, 2, 2).unwrap(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Strategy::from_policy(&tree, |state| {
                let c = state.candidates();
                if c.is_empty() {
                    None
                } else {
                    Some(c[rng.random_range(0..c.len())])
                }
            })
            .unwrap();
            let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
            let probs: Vec<BigRational> = (0..tree.leaf_count())
                .map(|_| BigRational::from_ratio(rng2.random_range(0..=16), 16))
                .collect();
            (tree, s, probs)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_policy_strategies_validate((tree, s, _probs) in arb_valid_strategy_and_probs()) {
            let report = validate(&tree, &s);
            prop_assert!(report.is_ok());
            prop_assert!(report.warnings.is_empty());
        }

        #[test]
        fn expected_cost_matches_path_enumeration(
            (tree, s, probs) in arb_valid_strategy_and_probs()
        ) {
            let d = IndependentDistribution::exact(StdArc::new(tree.clone()), probs).unwrap();
            let fast = expected_cost(&d, &s).unwrap();
            let brute = crate::oracle::expected_cost_by_enumeration(&d, &s).unwrap();
            prop_assert_eq!(fast.as_exact().unwrap(), brute.as_exact().unwrap());
            // 1 <= cost <= n for strategies that query at least once.
            if matches!(&**s.root(), StrategyNode::Query { .. }) {
                let c = fast.as_exact().unwrap();
                prop_assert!(c >= &BigRational::from_ratio(1, 1));
                prop_assert!(c <= &BigRational::from_ratio(tree.leaf_count() as i64, 1));
            }
        }

        #[test]
        fn strategy_json_round_trip((tree, s, _p) in arb_valid_strategy_and_probs()) {
            let json = s.to_canonical_json(&tree);
            let back = Strategy::from_json(&tree, &json).unwrap();
            prop_assert_eq!(back.to_canonical_json(&tree), json);
        }
    }
}
