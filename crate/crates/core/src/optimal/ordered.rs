//! Minimum expected cost over depth-first strategies.
//!
//! Once a strategy is depth-first, independence decomposes the problem per
//! node: resolving a child costs that child's own optimal depth-first cost,
//! and between children the only live knowledge is "not short-circuited
//! yet", so the per-node decision is a sequencing problem over children with
//! known costs and short-circuit probabilities.
//!
//! Two deliberately separate routes compute the per-node optimum:
//!
//! - `SubsetDp` (the depth-first-adaptive optimizer): Bellman recursion over
//!   subsets of remaining children, which prices every adaptive visit
//!   policy;
//! - `Permutations` (the directional optimizer): explicit minimization over
//!   fixed child orders, exhaustive up to the permutation budget and an
//!   exchange-ratio sort with adjacent-swap verification (flagged
//!   `heuristic`) beyond it.
//!
//! Their agreement on every instance is a tested claim, not an assumption.

use itertools::Itertools;

use crate::distribution::node_zero;
use crate::error::Error;
use crate::scalar::Scalar;
use crate::strategy::Strategy;
use crate::tree::{Label, Tree};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OrderMode {
    SubsetDp,
    Permutations,
}

pub(crate) struct OrderedSolution<T> {
    pub value: T,
    pub witness: Strategy,
    pub heuristic: bool,
    pub states_explored: usize,
}

pub(crate) fn optimal_ordered<T: Scalar>(
    tree: &Tree,
    probs: &[T],
    mode: OrderMode,
    permutation_budget: usize,
) -> Result<OrderedSolution<T>> {
    let mut orders: Vec<Vec<usize>> = vec![Vec::new(); tree.node_count()];
    let mut heuristic = false;
    let mut states = 0usize;
    let value = eval_node(
        tree,
        probs,
        tree.root(),
        mode,
        permutation_budget,
        &mut orders,
        &mut heuristic,
        &mut states,
    );
    let mut leaf_order = Vec::with_capacity(tree.leaf_count());
    flatten(tree, tree.root(), &orders, &mut leaf_order);
    let witness = Strategy::directional(tree, &leaf_order)?;
    Ok(OrderedSolution {
        value,
        witness,
        heuristic,
        states_explored: states,
    })
}

/// Value without witness compilation; the equilibrium search calls this in
/// its inner loop.
pub(crate) fn optimal_ordered_value<T: Scalar>(
    tree: &Tree,
    probs: &[T],
    mode: OrderMode,
    permutation_budget: usize,
) -> T {
    let mut orders: Vec<Vec<usize>> = vec![Vec::new(); tree.node_count()];
    let mut heuristic = false;
    let mut states = 0usize;
    eval_node(
        tree,
        probs,
        tree.root(),
        mode,
        permutation_budget,
        &mut orders,
        &mut heuristic,
        &mut states,
    )
}

/// Cost of resolving `node` with the chosen per-node child orders; fills
/// `orders[node]` with positions into the children array.
#[allow(clippy::too_many_arguments)]
fn eval_node<T: Scalar>(
    tree: &Tree,
    probs: &[T],
    node: usize,
    mode: OrderMode,
    permutation_budget: usize,
    orders: &mut Vec<Vec<usize>>,
    heuristic: &mut bool,
    states: &mut usize,
) -> T {
    if tree.leaf_index(node).is_some() {
        return T::one();
    }
    let label = tree.label(node).expect("internal node");
    let children = tree.children(node).to_vec();
    let mut costs = Vec::with_capacity(children.len());
    let mut shortcut = Vec::with_capacity(children.len());
    for &c in &children {
        costs.push(eval_node(
            tree,
            probs,
            c,
            mode,
            permutation_budget,
            orders,
            heuristic,
            states,
        ));
        let q = node_zero(tree, probs, c);
        // Probability the child's value short-circuits this node.
        shortcut.push(match label {
            Label::And => q,
            Label::Or => q.complement(),
        });
    }
    let (cost, order) = match mode {
        OrderMode::SubsetDp => subset_dp(&costs, &shortcut, states),
        OrderMode::Permutations => {
            if children.len() <= permutation_budget {
                best_permutation(&costs, &shortcut, states)
            } else {
                *heuristic = true;
                ratio_order(&costs, &shortcut, states)
            }
        }
    };
    orders[node] = order;
    cost
}

/// Sequencing cost of a fixed visit order.
fn order_cost<T: Scalar>(costs: &[T], shortcut: &[T], order: &[usize]) -> T {
    let mut total = T::zero();
    for &i in order.iter().rev() {
        // survive = no short-circuit at child i
        total = costs[i].clone() + shortcut[i].complement() * total;
    }
    total
}

/// Bellman recursion over subsets of remaining children. V(S) = min over
/// i in S of C_i + (1 - shortcut_i) * V(S \ {i}).
fn subset_dp<T: Scalar>(costs: &[T], shortcut: &[T], states: &mut usize) -> (T, Vec<usize>) {
    let m = costs.len();
    let full = (1usize << m) - 1;
    let mut table: Vec<Option<T>> = vec![None; full + 1];
    table[0] = Some(T::zero());
    for mask in 1..=full {
        let mut best: Option<T> = None;
        for i in 0..m {
            if mask & (1 << i) == 0 {
                continue;
            }
            *states += 1;
            let rest = table[mask & !(1 << i)].clone().expect("smaller mask filled");
            let cost = costs[i].clone() + shortcut[i].complement() * rest;
            best = Some(match best {
                None => cost,
                Some(b) if cost < b => cost,
                Some(b) => b,
            });
        }
        table[mask] = best;
    }
    // Greedy order extraction: at each step take the first child attaining
    // the Bellman minimum.
    let mut order = Vec::with_capacity(m);
    let mut mask = full;
    while mask != 0 {
        let target = table[mask].clone().expect("filled");
        for i in 0..m {
            if mask & (1 << i) == 0 {
                continue;
            }
            let rest = table[mask & !(1 << i)].clone().expect("filled");
            let cost = costs[i].clone() + shortcut[i].complement() * rest;
            if cost == target {
                order.push(i);
                mask &= !(1 << i);
                break;
            }
        }
    }
    (table[full].clone().expect("filled"), order)
}

/// Exhaustive minimum over fixed child orders, lexicographic tie-break.
fn best_permutation<T: Scalar>(costs: &[T], shortcut: &[T], states: &mut usize) -> (T, Vec<usize>) {
    let m = costs.len();
    let mut best: Option<(T, Vec<usize>)> = None;
    for perm in (0..m).permutations(m) {
        *states += 1;
        let cost = order_cost(costs, shortcut, &perm);
        best = Some(match best {
            None => (cost, perm),
            Some((b, _)) if cost < b => (cost, perm),
            Some(other) => other,
        });
    }
    best.expect("internal nodes have children")
}

/// Exchange-ratio sort (i before j iff C_i * s_j <= C_j * s_i) followed by
/// adjacent-swap local verification. This is the folklore sequencing rule;
/// beyond the permutation budget its global optimality is only checked
/// locally, hence the `heuristic` flag upstream.
fn ratio_order<T: Scalar>(costs: &[T], shortcut: &[T], states: &mut usize) -> (T, Vec<usize>) {
    let m = costs.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        let left = costs[i].clone() * shortcut[j].clone();
        let right = costs[j].clone() * shortcut[i].clone();
        left.cmp(&right).then(i.cmp(&j))
    });
    loop {
        let mut improved = false;
        for k in 0..m.saturating_sub(1) {
            *states += 1;
            let mut swapped = order.clone();
            swapped.swap(k, k + 1);
            if order_cost(costs, shortcut, &swapped) < order_cost(costs, shortcut, &order) {
                order = swapped;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    (order_cost(costs, shortcut, &order), order)
}

/// Per-node child orders to a global leaf order (depth-first concatenation).
fn flatten(tree: &Tree, node: usize, orders: &[Vec<usize>], out: &mut Vec<usize>) {
    if let Some(leaf) = tree.leaf_index(node) {
        out.push(leaf);
        return;
    }
    let children = tree.children(node);
    for &pos in &orders[node] {
        flatten(tree, children[pos], orders, out);
    }
}

/// Guard for the subset-DP mask width.
pub(crate) fn check_arity(tree: &Tree) -> Result<()> {
    for node in 0..tree.node_count() {
        if tree.children(node).len() > 24 {
            return Err(Error::Shape(
                "internal nodes with more than 24 children are not supported".into(),
            ));
        }
    }
    Ok(())
}
