//! Optimal expected-cost computation over three strategy classes.
//!
//! - general: all valid deterministic strategies (memoized search over
//!   canonical residual states);
//! - depth-first adaptive: strategies that stay inside a subtree until its
//!   root is known (per-node subset DP);
//! - directional: depth-first with a fixed leaf order (per-node permutation
//!   minimization).
//!
//! Each optimizer returns an [`OptimumReport`] carrying the value, a witness
//! strategy whose expected cost reproduces the value, and the class.

mod general;
mod ordered;
mod state;

pub use state::ResidualState;
pub(crate) use general::optimal_general_value;
pub(crate) use ordered::{optimal_ordered_value, OrderMode};

use std::collections::HashMap;

use crate::distribution::{CostValue, IndependentDistribution, Marginals};
use crate::error::Error;
use crate::scalar::F64;
use crate::strategy::{cost_rec, Strategy};
use crate::tree::Tree;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmClass {
    General,
    DepthFirstAdaptive,
    Directional,
}

impl AlgorithmClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmClass::General => "general",
            AlgorithmClass::DepthFirstAdaptive => "depth_first_adaptive",
            AlgorithmClass::Directional => "directional",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Hard cap on tree size; exceeding it is an error, never a silent
    /// fallback.
    pub leaf_budget: usize,
    /// Exhaustive child-order search up to this arity; the exchange-ratio
    /// sort beyond it is flagged `heuristic` in the report.
    pub permutation_budget: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            leaf_budget: 16,
            permutation_budget: 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimumReport {
    pub value: CostValue,
    pub witness: Strategy,
    pub class: AlgorithmClass,
    pub states_explored: usize,
    /// True when a child order came from the exchange-ratio sort rather
    /// than exhaustive search.
    pub heuristic: bool,
}

impl OptimumReport {
    pub fn to_json(&self, tree: &Tree) -> String {
        let witness: serde_json::Value =
            serde_json::from_str(&self.witness.to_canonical_json(tree))
                .expect("canonical strategy JSON is valid");
        serde_json::json!({
            "value": self.value.render(),
            "witness": witness,
            "class": self.class.as_str(),
            "states_explored": self.states_explored,
            "heuristic": self.heuristic,
        })
        .to_string()
    }
}

/// Status-vector encoding limit (2 bits per leaf in a u64 memo key).
const HARD_LEAF_CAP: usize = 31;

fn check_budget(d: &IndependentDistribution, config: &OptimizerConfig) -> Result<()> {
    let leaves = d.tree().leaf_count();
    let budget = config.leaf_budget.min(HARD_LEAF_CAP);
    if leaves > budget {
        return Err(Error::Budget { leaves, budget });
    }
    ordered::check_arity(d.tree())
}

/// Reported values always equal the witness's expected cost (recomputed
/// through the strategy pricer), so witness soundness holds on both
/// backends; on the exact backend this is identical to the DP value.
fn priced_report(
    d: &IndependentDistribution,
    witness: Strategy,
    class: AlgorithmClass,
    states_explored: usize,
    heuristic: bool,
) -> Result<OptimumReport> {
    let value = match d.marginals() {
        Marginals::Exact(v) => {
            CostValue::Exact(cost_rec(witness.root(), v, &mut HashMap::new())?)
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            CostValue::Float(cost_rec(witness.root(), &probs, &mut HashMap::new())?.0)
        }
    };
    Ok(OptimumReport {
        value,
        witness,
        class,
        states_explored,
        heuristic,
    })
}

/// Minimum over all valid deterministic strategies.
pub fn optimal_cost_general(
    d: &IndependentDistribution,
    config: &OptimizerConfig,
) -> Result<OptimumReport> {
    check_budget(d, config)?;
    let tree = d.tree();
    match d.marginals() {
        Marginals::Exact(v) => {
            let sol = general::optimal_general(tree, v);
            let report = priced_report(
                d,
                sol.witness,
                AlgorithmClass::General,
                sol.states_explored,
                false,
            )?;
            debug_assert_eq!(report.value.as_exact()?, &sol.value);
            Ok(report)
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let sol = general::optimal_general(tree, &probs);
            priced_report(
                d,
                sol.witness,
                AlgorithmClass::General,
                sol.states_explored,
                false,
            )
        }
    }
}

/// Minimum over depth-first strategies (adaptive child choice allowed),
/// by per-node subset DP.
pub fn optimal_cost_depth_first(
    d: &IndependentDistribution,
    config: &OptimizerConfig,
) -> Result<OptimumReport> {
    check_budget(d, config)?;
    ordered_report(d, config, ordered::OrderMode::SubsetDp, AlgorithmClass::DepthFirstAdaptive)
}

/// Minimum over directional depth-first strategies (fixed per-node child
/// orders), by explicit permutation search.
pub fn optimal_cost_directional(
    d: &IndependentDistribution,
    config: &OptimizerConfig,
) -> Result<OptimumReport> {
    check_budget(d, config)?;
    ordered_report(d, config, ordered::OrderMode::Permutations, AlgorithmClass::Directional)
}

fn ordered_report(
    d: &IndependentDistribution,
    config: &OptimizerConfig,
    mode: ordered::OrderMode,
    class: AlgorithmClass,
) -> Result<OptimumReport> {
    let tree = d.tree();
    match d.marginals() {
        Marginals::Exact(v) => {
            let sol = ordered::optimal_ordered(tree, v, mode, config.permutation_budget)?;
            let report =
                priced_report(d, sol.witness, class, sol.states_explored, sol.heuristic)?;
            debug_assert_eq!(report.value.as_exact()?, &sol.value);
            Ok(report)
        }
        Marginals::Float(v) => {
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let sol = ordered::optimal_ordered(tree, &probs, mode, config.permutation_budget)?;
            priced_report(d, sol.witness, class, sol.states_explored, sol.heuristic)
        }
    }
}

/// The lexicographic depth-first directional strategy with short-circuit
/// skipping: leaves are probed in node-name order, and any leaf under an
/// already-resolved node is skipped.
pub fn make_solve(tree: &Tree) -> Strategy {
    let order: Vec<usize> = (0..tree.leaf_count()).collect();
    Strategy::directional(tree, &order).expect("identity order is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{
        separating_distribution, separating_distribution_limit, IndependentDistribution, Prob,
    };
    use crate::oracle;
    use crate::scalar::Scalar;
    use crate::strategy::{expected_cost, is_depth_first, is_directional, validate};
    use crate::tree::Label;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn exact_dist(tree: Tree, probs: Vec<BigRational>) -> IndependentDistribution {
        IndependentDistribution::exact(Arc::new(tree), probs).unwrap()
    }

    #[test]
    fn two_leaf_and_prefers_likelier_zero() {
        // q = (1/2, 3/4): probing x1 first costs 1 + 1/4 = 5/4; probing x0
        // first costs 3/2. All three classes agree on 5/4 here.
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let d = exact_dist(tree, vec![rat(1, 2), rat(3, 4)]);
        type Optimizer = fn(&IndependentDistribution, &OptimizerConfig) -> crate::Result<OptimumReport>;
        let optimizers: [Optimizer; 3] = [
            optimal_cost_general,
            optimal_cost_depth_first,
            optimal_cost_directional,
        ];
        for f in optimizers {
            let report = f(&d, &cfg()).unwrap();
            assert_eq!(report.value.as_exact().unwrap(), &rat(5, 4));
            // Witness queries x1 first.
            match &**report.witness.root() {
                crate::strategy::StrategyNode::Query { leaf, .. } => assert_eq!(*leaf, 1),
                other => panic!("expected query, got {other:?}"),
            }
        }
    }

    #[test]
    fn iid_zero_costs() {
        // All leaves are surely 1. On a height-1 AND tree every leaf must be
        // confirmed (no node can short-circuit), so the value is n.
        let flat = Tree::uniform(Label::And, 3, 1).unwrap();
        let d = IndependentDistribution::iid(
            Arc::new(flat),
            Prob::Exact(BigRational::from_ratio(0, 1)),
        )
        .unwrap();
        let report = optimal_cost_general(&d, &cfg()).unwrap();
        assert_eq!(report.value.as_exact().unwrap(), &rat(3, 1));
        assert!(validate(d.tree(), &report.witness).is_ok());

        // At height 2 the OR layer short-circuits on sure-1 leaves: one
        // query per OR child confirms the root, so the value is 2, not 4.
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let d = IndependentDistribution::iid(
            Arc::new(tree),
            Prob::Exact(BigRational::from_ratio(0, 1)),
        )
        .unwrap();
        let report = optimal_cost_general(&d, &cfg()).unwrap();
        assert_eq!(report.value.as_exact().unwrap(), &rat(2, 1));
        let slow = oracle::min_cost_by_state_recursion(&d).unwrap();
        assert_eq!(report.value.as_exact().unwrap(), slow.as_exact().unwrap());
        assert!(validate(d.tree(), &report.witness).is_ok());
    }

    #[test]
    fn limit_distribution_optima() {
        // Depth-first optimum 63/16. The unrestricted optimum is 15/4:
        // deferring BOTH sure-zero white leaves (the known 31/8 strategy
        // defers only one) saves a further 1/8. Cross-checked against the
        // raw-state oracle.
        let d = separating_distribution_limit();
        let df = optimal_cost_depth_first(&d, &cfg()).unwrap();
        assert_eq!(df.value.as_exact().unwrap(), &rat(63, 16));
        let dir = optimal_cost_directional(&d, &cfg()).unwrap();
        assert_eq!(dir.value.as_exact().unwrap(), &rat(63, 16));
        let general = optimal_cost_general(&d, &cfg()).unwrap();
        assert_eq!(general.value.as_exact().unwrap(), &rat(15, 4));
        let slow = oracle::min_cost_by_state_recursion(&d).unwrap();
        assert_eq!(slow.as_exact().unwrap(), &rat(15, 4));
        // The general witness must actually be non-depth-first here.
        assert!(!is_depth_first(d.tree(), &general.witness).depth_first);
    }

    #[test]
    fn witnesses_are_sound_and_classed() {
        let d = separating_distribution(&Prob::Exact(rat(1, 100))).unwrap();
        let general = optimal_cost_general(&d, &cfg()).unwrap();
        let df = optimal_cost_depth_first(&d, &cfg()).unwrap();
        let dir = optimal_cost_directional(&d, &cfg()).unwrap();
        for (report, must_be_depth_first) in [(&general, false), (&df, true), (&dir, true)] {
            assert!(validate(d.tree(), &report.witness).is_ok());
            let cost = expected_cost(&d, &report.witness).unwrap();
            assert_eq!(cost.as_exact().unwrap(), report.value.as_exact().unwrap());
            if must_be_depth_first {
                assert!(is_depth_first(d.tree(), &report.witness).depth_first);
                assert!(is_directional(d.tree(), &report.witness).directional);
            }
        }
        // Domination chain, strictly separated in the middle on this
        // instance.
        let solve_cost = expected_cost(&d, &make_solve(d.tree())).unwrap();
        let g = general.value.as_exact().unwrap();
        let a = df.value.as_exact().unwrap();
        let b = dir.value.as_exact().unwrap();
        let s = solve_cost.as_exact().unwrap();
        assert!(g < a, "general {g} < depth-first {a}");
        assert_eq!(a, b);
        assert!(b <= s);
    }

    #[test]
    fn solve_is_depth_first_directional_everywhere() {
        for tree in [
            Tree::uniform(Label::And, 2, 2).unwrap(),
            Tree::uniform(Label::Or, 2, 3).unwrap(),
            Tree::uniform(Label::And, 3, 2).unwrap(),
            Tree::parse("AND(OR(l,l),OR(l,l,l))").unwrap(),
        ] {
            let s = make_solve(&tree);
            assert!(validate(&tree, &s).is_ok());
            assert!(is_depth_first(&tree, &s).depth_first);
            let dir = is_directional(&tree, &s);
            assert!(dir.directional);
            assert_eq!(dir.order.unwrap(), (0..tree.leaf_count()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn symmetric_iid_ties_reproduce_solve_order() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let d = IndependentDistribution::iid(Arc::new(tree), Prob::Exact(rat(1, 2))).unwrap();
        let report = optimal_cost_directional(&d, &cfg()).unwrap();
        let solve = make_solve(d.tree());
        assert_eq!(
            report.witness.to_canonical_json(d.tree()),
            solve.to_canonical_json(d.tree())
        );
    }

    #[test]
    fn budget_is_enforced() {
        let tree = Tree::uniform(Label::And, 2, 3).unwrap();
        let d = IndependentDistribution::iid(Arc::new(tree), Prob::Exact(rat(1, 2))).unwrap();
        let tight = OptimizerConfig {
            leaf_budget: 4,
            permutation_budget: 6,
        };
        assert!(matches!(
            optimal_cost_general(&d, &tight),
            Err(Error::Budget { leaves: 8, budget: 4 })
        ));
    }

    #[test]
    fn general_matches_raw_state_oracle_on_random_instances() {
        let trees = [
            Tree::uniform(Label::And, 2, 2).unwrap(),
            Tree::uniform(Label::And, 3, 1).unwrap(),
            Tree::parse("AND(OR(l,l),OR(l,l,l))").unwrap(),
            Tree::uniform(Label::Or, 2, 2).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for tree in trees {
            for _ in 0..25 {
                let probs: Vec<BigRational> = (0..tree.leaf_count())
                    .map(|_| rat(rng.random_range(0..=32), 32))
                    .collect();
                let d = exact_dist(tree.clone(), probs);
                let fast = optimal_cost_general(&d, &cfg()).unwrap();
                let slow = oracle::min_cost_by_state_recursion(&d).unwrap();
                assert_eq!(
                    fast.value.as_exact().unwrap(),
                    slow.as_exact().unwrap(),
                    "tree {}",
                    tree.render()
                );
            }
        }
    }

    #[test]
    fn general_matches_literal_enumeration_on_tiny_trees() {
        let trees = [
            Tree::uniform(Label::And, 2, 2).unwrap(),
            Tree::uniform(Label::And, 3, 1).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for tree in trees {
            for _ in 0..10 {
                let probs: Vec<BigRational> = (0..tree.leaf_count())
                    .map(|_| rat(rng.random_range(1..16), 16))
                    .collect();
                let d = exact_dist(tree.clone(), probs);
                let fast = optimal_cost_general(&d, &cfg()).unwrap();
                let listed = oracle::min_cost_by_strategy_enumeration(&d, 10_000)
                    .unwrap()
                    .expect("small space");
                assert_eq!(fast.value.as_exact().unwrap(), listed.as_exact().unwrap());
            }
        }
    }

    #[test]
    fn depth_first_equals_directional_on_random_instances() {
        // Two independent routes to the per-node sequencing optimum.
        let trees = [
            Tree::uniform(Label::And, 2, 2).unwrap(),
            Tree::uniform(Label::Or, 2, 3).unwrap(),
            Tree::uniform(Label::And, 3, 2).unwrap(),
            Tree::parse("AND(OR(l,l),OR(l,l,l))").unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for tree in trees {
            for _ in 0..25 {
                let probs: Vec<BigRational> = (0..tree.leaf_count())
                    .map(|_| rat(rng.random_range(0..=20), 20))
                    .collect();
                let d = exact_dist(tree.clone(), probs);
                let a = optimal_cost_depth_first(&d, &cfg()).unwrap();
                let b = optimal_cost_directional(&d, &cfg()).unwrap();
                assert_eq!(a.value.as_exact().unwrap(), b.value.as_exact().unwrap());
                assert!(!a.heuristic && !b.heuristic);
            }
        }
    }

    #[test]
    fn domination_chain_on_random_instances() {
        let tree = Tree::uniform(Label::Or, 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for _ in 0..20 {
            let probs: Vec<BigRational> = (0..8)
                .map(|_| rat(rng.random_range(0..=24), 24))
                .collect();
            let d = exact_dist(tree.clone(), probs);
            let g = optimal_cost_general(&d, &cfg()).unwrap();
            let a = optimal_cost_depth_first(&d, &cfg()).unwrap();
            let b = optimal_cost_directional(&d, &cfg()).unwrap();
            let s = expected_cost(&d, &make_solve(d.tree())).unwrap();
            assert!(g.value.as_exact().unwrap() <= a.value.as_exact().unwrap());
            assert!(a.value.as_exact().unwrap() <= b.value.as_exact().unwrap());
            assert!(b.value.as_exact().unwrap() <= s.as_exact().unwrap());
        }
    }

    #[test]
    fn heuristic_flag_set_beyond_permutation_budget() {
        let tree = Tree::uniform(Label::And, 7, 1).unwrap();
        let probs: Vec<BigRational> = (1..=7).map(|i| rat(i, 10)).collect();
        let d = exact_dist(tree, probs);
        let small_budget = OptimizerConfig {
            leaf_budget: 16,
            permutation_budget: 6,
        };
        let report = optimal_cost_directional(&d, &small_budget).unwrap();
        assert!(report.heuristic);
        // The subset DP is exact regardless; the ratio rule should match it
        // on a height-1 node (it is provably optimal there).
        let exact = optimal_cost_depth_first(&d, &small_budget).unwrap();
        assert_eq!(
            report.value.as_exact().unwrap(),
            exact.value.as_exact().unwrap()
        );
    }

    #[test]
    fn zero_probability_leaves_keep_valid_zero_weight_branches() {
        // d = (0, 1) on a 2-leaf AND: querying the sure-0 leaf resolves the
        // root at cost exactly 1, but the probability-0 branch still needs a
        // valid sub-strategy.
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let d = exact_dist(tree, vec![rat(0, 1), rat(1, 1)]);
        let report = optimal_cost_general(&d, &cfg()).unwrap();
        assert_eq!(report.value.as_exact().unwrap(), &rat(1, 1));
        assert!(validate(d.tree(), &report.witness).is_ok());
    }

    #[test]
    fn report_json_shape() {
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let d = exact_dist(tree, vec![rat(1, 2), rat(3, 4)]);
        let report = optimal_cost_general(&d, &cfg()).unwrap();
        let json = report.to_json(d.tree());
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["value"], "5/4");
        assert_eq!(value["class"], "general");
        assert!(value["states_explored"].as_u64().unwrap() > 0);
    }
}
