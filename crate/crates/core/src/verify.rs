//! Named verification batteries driven by `andor verify`.
//!
//! Each suite runs a fixed, seeded battery of exact or numeric checks and
//! returns a machine-readable report (one case per named check). The suite
//! names are part of the CLI contract.

use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{
    crossing_cost_arguments, crossing_cost_polynomial, crossing_strategy, deferring_strategy,
    CrossingFamily, CrossingId,
};
use crate::distribution::{
    separating_distribution, separating_distribution_limit, IndependentDistribution, Prob,
};
use crate::equilibrium::{
    iid_line_search, search_constrained, search_unconstrained, EquilibriumClass,
    EquilibriumProblem, SearchConfig,
};
use crate::error::Error;
use crate::optimal::{
    make_solve, optimal_cost_depth_first, optimal_cost_directional, optimal_cost_general,
    OptimizerConfig,
};
use crate::oracle;
use crate::scalar::Scalar;
use crate::strategy::{expected_cost, is_depth_first, Strategy};
use crate::tree::{Label, Tree};
use crate::Result;

pub const SUITES: [&str; 5] = ["prop31", "prop32", "tarsi", "theorem41", "corollary42"];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Override the per-case battery sizes (None = full defaults).
    pub trials: Option<usize>,
    /// Multi-start budget for the equilibrium suites.
    pub starts: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            trials: None,
            starts: 16,
        }
    }
}

impl VerifyConfig {
    fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    pub time_seconds: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub tests: usize,
    pub failures: usize,
    pub passed: bool,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    fn from_cases(suite: &str, cases: Vec<CaseResult>) -> SuiteReport {
        let failures = cases.iter().filter(|c| !c.passed).count();
        SuiteReport {
            suite: suite.to_string(),
            tests: cases.len(),
            failures,
            passed: failures == 0,
            cases,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn case(name: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CaseResult {
    let start = Instant::now();
    let (passed, message) = match body() {
        Ok(outcome) => outcome,
        Err(e) => (false, format!("error: {e}")),
    };
    CaseResult {
        name: name.to_string(),
        passed,
        time_seconds: start.elapsed().as_secs_f64(),
        message,
    }
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    match name {
        "prop31" => Ok(vec![prop31(cfg)]),
        "prop32" => Ok(vec![prop32(cfg)]),
        "tarsi" => Ok(vec![tarsi(cfg)]),
        "theorem41" => Ok(vec![theorem41(cfg)]),
        "corollary42" => Ok(vec![corollary42(cfg)]),
        "all" => Ok(vec![
            prop31(cfg),
            prop32(cfg),
            tarsi(cfg),
            theorem41(cfg),
            corollary42(cfg),
        ]),
        other => Err(Error::Parse {
            pos: 0,
            msg: format!(
                "unknown suite {other:?}; expected one of {:?} or \"all\"",
                SUITES
            ),
        }),
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::from_ratio(n, d)
}

fn height2_tree() -> Arc<Tree> {
    Arc::new(Tree::uniform(Label::And, 2, 2).unwrap())
}

fn random_height2(tree: &Arc<Tree>, rng: &mut ChaCha8Rng, open: bool) -> IndependentDistribution {
    let probs: Vec<BigRational> = (0..4)
        .map(|_| {
            let n = if open {
                rng.random_range(1..1000i64)
            } else {
                rng.random_range(0..=1000i64)
            };
            rat(n, 1000)
        })
        .collect();
    IndependentDistribution::exact(tree.clone(), probs).unwrap()
}

/// Sort within subtree pairs, then order the pairs by product: the
/// height-2 analysis works up to this relabeling.
fn normalize_height2(mut q: [BigRational; 4]) -> [BigRational; 4] {
    if q[0] > q[1] {
        q.swap(0, 1);
    }
    if q[2] > q[3] {
        q.swap(2, 3);
    }
    if q[0].clone() * q[1].clone() < q[2].clone() * q[3].clone() {
        q.swap(0, 2);
        q.swap(1, 3);
    }
    q
}

// ---------------------------------------------------------------------
// prop31: the height-2 collapse and the sixteen crossing strategies
// ---------------------------------------------------------------------

fn prop31(cfg: &VerifyConfig) -> SuiteReport {
    let opt = OptimizerConfig::default();
    let tree = height2_tree();
    let mut cases = Vec::new();

    let trials = cfg.trials_or(1000);
    let seed = cfg.seed;
    cases.push(case("height2_general_equals_depth_first", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instances: Vec<IndependentDistribution> = (0..trials)
            .map(|_| random_height2(&tree, &mut rng, true))
            .collect();
        let failures: Vec<String> = instances
            .par_iter()
            .enumerate()
            .filter_map(|(t, d)| {
                let g = optimal_cost_general(d, &opt).ok()?;
                let df = optimal_cost_depth_first(d, &opt).ok()?;
                let g = g.value.as_exact().ok()?.clone();
                let df = df.value.as_exact().ok()?.clone();
                let min16 = CrossingId::all()
                    .into_iter()
                    .map(|id| {
                        let s = crossing_strategy(id, d).unwrap();
                        expected_cost(d, &s).unwrap().as_exact().unwrap().clone()
                    })
                    .min()
                    .unwrap();
                if g != df {
                    return Some(format!("instance {t}: general {g} != depth-first {df}"));
                }
                if min16 < g {
                    return Some(format!(
                        "instance {t}: crossing minimum {min16} below optimum {g}"
                    ));
                }
                None
            })
            .collect();
        let passed = failures.is_empty();
        let message = if passed {
            format!("{trials} instances: general == depth-first, crossing min >= optimum")
        } else {
            failures[0].clone()
        };
        Ok((passed, message))
    }));

    let trials_rule = cfg.trials_or(1000);
    cases.push(case("selection_rule", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e1ec7);
        let instances: Vec<[BigRational; 4]> = (0..trials_rule)
            .map(|_| {
                normalize_height2(std::array::from_fn(|_| {
                    rat(rng.random_range(0..=1000i64), 1000)
                }))
            })
            .collect();
        let failures: Vec<String> = instances
            .par_iter()
            .enumerate()
            .filter_map(|(t, q)| {
                let d = IndependentDistribution::exact(tree.clone(), q.to_vec()).unwrap();
                let costs: Vec<(CrossingId, BigRational)> = CrossingId::all()
                    .into_iter()
                    .map(|id| {
                        let s = crossing_strategy(id, &d).unwrap();
                        (
                            id,
                            expected_cost(&d, &s).unwrap().as_exact().unwrap().clone(),
                        )
                    })
                    .collect();
                let min_cost = costs.iter().map(|(_, c)| c.clone()).min().unwrap();
                // Rule keyed on q01 vs q11.
                let picked = if q[1] <= q[3] {
                    CrossingId {
                        family: CrossingFamily::Complete,
                        i: false,
                        j: false,
                        k: false,
                    }
                } else {
                    CrossingId {
                        family: CrossingFamily::Complete,
                        i: true,
                        j: false,
                        k: false,
                    }
                };
                let picked_cost = costs
                    .iter()
                    .find(|(id, _)| *id == picked)
                    .map(|(_, c)| c.clone())
                    .unwrap();
                if picked_cost != min_cost {
                    return Some(format!(
                        "instance {t}: rule picked {picked} at {picked_cost}, minimum is {min_cost}"
                    ));
                }
                None
            })
            .collect();
        let passed = failures.is_empty();
        let message = if passed {
            format!("{trials_rule} normalized instances: the keyed pick attains the minimum")
        } else {
            failures[0].clone()
        };
        Ok((passed, message))
    }));

    let trials_f = cfg.trials_or(500);
    cases.push(case("crossing_polynomial_agreement", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
        let instances: Vec<IndependentDistribution> = (0..trials_f)
            .map(|_| random_height2(&tree, &mut rng, false))
            .collect();
        let failures: Vec<String> = instances
            .par_iter()
            .enumerate()
            .filter_map(|(t, d)| {
                for id in CrossingId::all() {
                    let s = crossing_strategy(id, d).unwrap();
                    let cost = expected_cost(d, &s).unwrap().as_exact().unwrap().clone();
                    let [x, y, z, w] = crossing_cost_arguments(id, d).unwrap();
                    let poly = crossing_cost_polynomial(x, y, z, w);
                    if cost != poly {
                        return Some(format!(
                            "instance {t}, {id}: cost {cost} != polynomial {poly}"
                        ));
                    }
                }
                None
            })
            .collect();
        let passed = failures.is_empty();
        let message = if passed {
            format!("{trials_f} instances x 16 strategies priced by the polynomial")
        } else {
            failures[0].clone()
        };
        Ok((passed, message))
    }));

    cases.push(case("polynomial_monotone_in_x", || {
        for y in 0..=10i64 {
            for z in 0..=10i64 {
                for w in 0..=20i64 {
                    for x in 0..10i64 {
                        let f1 = crossing_cost_polynomial(
                            rat(x, 10),
                            rat(y, 10),
                            rat(z, 10),
                            rat(w, 10),
                        );
                        let f2 = crossing_cost_polynomial(
                            rat(x + 1, 10),
                            rat(y, 10),
                            rat(z, 10),
                            rat(w, 10),
                        );
                        if f1 > f2 {
                            return Ok((
                                false,
                                format!(
                                    "monotonicity fails at x={x}/10, y={y}/10, z={z}/10, w={w}/10"
                                ),
                            ));
                        }
                    }
                }
            }
        }
        Ok((true, "monotone in x on the 11x11x21 grid".into()))
    }));

    let trials_c1 = cfg.trials_or(500);
    cases.push(case("crossing_class_is_complete", || {
        // The sixteen strategies attain the minimum over ALL enumerated
        // non-depth-first valid strategies, and the overall minimum equals
        // the unrestricted optimum.
        let all = oracle::enumerate_strategies(&tree, 100).expect("48 strategies");
        let classified: Vec<(Strategy, bool)> = all
            .into_iter()
            .map(|s| {
                let df = is_depth_first(&tree, &s).depth_first;
                (s, df)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1a55);
        let instances: Vec<IndependentDistribution> = (0..trials_c1)
            .map(|_| random_height2(&tree, &mut rng, false))
            .collect();
        let failures: Vec<String> = instances
            .par_iter()
            .enumerate()
            .filter_map(|(t, d)| {
                let min16 = CrossingId::all()
                    .into_iter()
                    .map(|id| {
                        let s = crossing_strategy(id, d).unwrap();
                        expected_cost(d, &s).unwrap().as_exact().unwrap().clone()
                    })
                    .min()
                    .unwrap();
                let min_non_df = classified
                    .iter()
                    .filter(|(_, df)| !df)
                    .map(|(s, _)| expected_cost(d, s).unwrap().as_exact().unwrap().clone())
                    .min()
                    .unwrap();
                let min_all = classified
                    .iter()
                    .map(|(s, _)| expected_cost(d, s).unwrap().as_exact().unwrap().clone())
                    .min()
                    .unwrap();
                let general = optimal_cost_general(d, &OptimizerConfig::default())
                    .unwrap()
                    .value
                    .as_exact()
                    .unwrap()
                    .clone();
                if min16 != min_non_df {
                    return Some(format!(
                        "instance {t}: crossing min {min16} != enumerated non-depth-first min {min_non_df}"
                    ));
                }
                if min_all != general {
                    return Some(format!(
                        "instance {t}: enumerated min {min_all} != optimizer {general}"
                    ));
                }
                None
            })
            .collect();
        let passed = failures.is_empty();
        let message = if passed {
            format!("{trials_c1} instances against the 48-strategy enumeration")
        } else {
            failures[0].clone()
        };
        Ok((passed, message))
    }));

    SuiteReport::from_cases("prop31", cases)
}

// ---------------------------------------------------------------------
// prop32: the height-3 separation
// ---------------------------------------------------------------------

fn prop32(cfg: &VerifyConfig) -> SuiteReport {
    let opt = OptimizerConfig::default();
    let mut cases = Vec::new();
    let _ = cfg;

    cases.push(case("limit_depth_first_63_16", || {
        let limit = separating_distribution_limit();
        let df = optimal_cost_depth_first(&limit, &opt)?;
        let expected = rat(63, 16);
        let got = df.value.as_exact()?.clone();
        Ok((got == expected, format!("depth-first optimum {got}")))
    }));

    cases.push(case("limit_deferring_cost_31_8", || {
        let limit = separating_distribution_limit();
        let s = deferring_strategy(&limit)?;
        let got = expected_cost(&limit, &s)?.as_exact()?.clone();
        Ok((got == rat(31, 8), format!("deferring strategy costs {got}")))
    }));

    cases.push(case("limit_general_optimum_15_4", || {
        // The unrestricted optimum at the limit distribution; 31/8 is only
        // the deferring strategy's cost, an upper bound. Cross-checked
        // against the raw-state oracle.
        let limit = separating_distribution_limit();
        let g = optimal_cost_general(&limit, &opt)?.value.as_exact()?.clone();
        let slow = oracle::min_cost_by_state_recursion(&limit)?
            .as_exact()?
            .clone();
        let ok = g == rat(15, 4) && slow == g;
        Ok((ok, format!("general optimum {g}, oracle {slow}")))
    }));

    cases.push(case("deferring_not_depth_first", || {
        let d = separating_distribution(&Prob::Exact(rat(1, 100)))?;
        let s = deferring_strategy(&d)?;
        let report = is_depth_first(d.tree(), &s);
        let witness = report
            .witness
            .as_ref()
            .map(|w| {
                format!(
                    "{} interrupted by {}",
                    w.node.render(false),
                    w.interrupting_leaf.render(false)
                )
            })
            .unwrap_or_default();
        Ok((!report.depth_first, witness))
    }));

    for (name, den) in [
        ("separation_eps_1_100", 100i64),
        ("separation_eps_1_1000", 1000),
    ] {
        cases.push(case(name, || {
            let d = separating_distribution(&Prob::Exact(rat(1, den)))?;
            let s = deferring_strategy(&d)?;
            let deferring = expected_cost(&d, &s)?.as_exact()?.clone();
            let df = optimal_cost_depth_first(&d, &opt)?.value.as_exact()?.clone();
            let general = optimal_cost_general(&d, &opt)?.value.as_exact()?.clone();
            let ok = deferring < df && general < df && general <= deferring;
            Ok((
                ok,
                format!("general {general} <= deferring {deferring} < depth-first {df}"),
            ))
        }));
    }

    cases.push(case("solve_closed_form", || {
        for (n, den) in [(1i64, 1000i64), (1, 100), (1, 10), (1, 3), (1, 1)] {
            let eps = rat(n, den);
            let d = separating_distribution(&Prob::Exact(eps.clone()))?;
            let solve = make_solve(d.tree());
            let got = expected_cost(&d, &solve)?.as_exact()?.clone();
            let closed = rat(7, 4) * rat(3, 2) * (rat(1, 1) + (rat(1, 1) + eps) / rat(2, 1));
            if got != closed {
                return Ok((
                    false,
                    format!("eps {n}/{den}: cost {got} != closed form {closed}"),
                ));
            }
        }
        Ok((
            true,
            "five epsilon values match (1+3/4)(1+1/2)(1+(1+eps)/2)".into(),
        ))
    }));

    SuiteReport::from_cases("prop32", cases)
}

// ---------------------------------------------------------------------
// tarsi: IID balanced trees need no non-depth-first search
// ---------------------------------------------------------------------

fn tarsi(cfg: &VerifyConfig) -> SuiteReport {
    let opt = OptimizerConfig::default();
    let mut cases = Vec::new();
    let trials = cfg.trials_or(200);
    for (arity, heights) in [(2usize, vec![1usize, 2, 3, 4]), (3, vec![1, 2])] {
        for height in heights {
            let name = format!("iid_general_equals_directional_{arity}ary_h{height}");
            let seed = cfg.seed ^ ((arity as u64) << 8) ^ height as u64;
            cases.push(case(&name, || {
                let tree = Arc::new(Tree::uniform(Label::And, arity, height)?);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let ps: Vec<BigRational> = (0..trials)
                    .map(|_| rat(rng.random_range(11..=989), 1000))
                    .collect();
                let failures: Vec<String> = ps
                    .par_iter()
                    .filter_map(|p| {
                        let d = IndependentDistribution::iid(tree.clone(), Prob::Exact(p.clone()))
                            .ok()?;
                        let g = optimal_cost_general(&d, &opt).unwrap();
                        let dir = optimal_cost_directional(&d, &opt).unwrap();
                        let g = g.value.as_exact().unwrap().clone();
                        let dir = dir.value.as_exact().unwrap().clone();
                        if g != dir {
                            return Some(format!("p={p}: general {g} != directional {dir}"));
                        }
                        None
                    })
                    .collect();
                let passed = failures.is_empty();
                let message = if passed {
                    format!("{trials} IIDs: general == directional exactly")
                } else {
                    failures[0].clone()
                };
                Ok((passed, message))
            }));
        }
    }
    SuiteReport::from_cases("tarsi", cases)
}

// ---------------------------------------------------------------------
// theorem41: unconstrained equilibria are IID with depth-first optima
// ---------------------------------------------------------------------

fn theorem41(cfg: &VerifyConfig) -> SuiteReport {
    let mut cases = Vec::new();
    for (tname, label) in [("and22", Label::And), ("or22", Label::Or)] {
        let name = format!("unconstrained_equilibrium_{tname}");
        cases.push(case(&name, || {
            let tree = Arc::new(Tree::uniform(label, 2, 2)?);
            let search_cfg = SearchConfig {
                starts: cfg.starts,
                seed: cfg.seed,
                ..SearchConfig::default()
            };
            let mut values = Vec::new();
            let mut message = String::new();
            for class in [EquilibriumClass::General, EquilibriumClass::DepthFirst] {
                let problem =
                    EquilibriumProblem::new(tree.clone(), class, None, search_cfg.clone())?;
                let report = search_unconstrained(&problem)?;
                if report.iid_deviation > 1e-6 {
                    return Ok((
                        false,
                        format!("{class:?}: iid deviation {}", report.iid_deviation),
                    ));
                }
                let (_, line_value) = iid_line_search(&tree, class);
                if (report.value - line_value).abs() > 1e-8 {
                    return Ok((
                        false,
                        format!("{class:?}: search {} vs line {line_value}", report.value),
                    ));
                }
                values.push(report.value);
                message.push_str(&format!("{}={:.10} ", class.as_str(), report.value));
            }
            if (values[0] - values[1]).abs() > 1e-8 {
                return Ok((false, format!("class values differ: {values:?}")));
            }
            Ok((true, message.trim().to_string()))
        }));
    }
    SuiteReport::from_cases("theorem41", cases)
}

// ---------------------------------------------------------------------
// corollary42: constrained equilibria and the degenerate boundary
// ---------------------------------------------------------------------

fn corollary42(cfg: &VerifyConfig) -> SuiteReport {
    let mut cases = Vec::new();
    for (tname, arity, height) in [("and22", 2usize, 2usize), ("and31", 3, 1)] {
        for r_pct in [30u32, 50, 70] {
            let name = format!("constrained_equilibrium_{tname}_r{r_pct}");
            cases.push(case(&name, || {
                let tree = Arc::new(Tree::uniform(Label::And, arity, height)?);
                let r = r_pct as f64 / 100.0;
                let search_cfg = SearchConfig {
                    starts: cfg.starts,
                    seed: cfg.seed,
                    ..SearchConfig::default()
                };
                let mut message = String::new();
                for class in [EquilibriumClass::General, EquilibriumClass::DepthFirst] {
                    let problem =
                        EquilibriumProblem::new(tree.clone(), class, Some(r), search_cfg.clone())?;
                    let report = search_constrained(&problem)?;
                    if report.iid_deviation > 1e-6 {
                        return Ok((
                            false,
                            format!("{class:?}: iid deviation {}", report.iid_deviation),
                        ));
                    }
                    if (report.root_probability - r).abs() > 1e-12 {
                        return Ok((
                            false,
                            format!("{class:?}: root probability {}", report.root_probability),
                        ));
                    }
                    message.push_str(&format!("{}={:.10} ", class.as_str(), report.value));
                }
                Ok((true, message.trim().to_string()))
            }));
        }
    }

    let trials = cfg.trials_or(50);
    let seed = cfg.seed;
    cases.push(case("degenerate_root_probability_cost_equality", || {
        // Root probability exactly 0 or 1: a depth-first directional
        // strategy still attains the unrestricted optimum.
        let opt = OptimizerConfig::default();
        let tree = height2_tree();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead);
        for t in 0..trials {
            let mut probs = vec![rat(0, 1); 4];
            let root_one = t % 2 == 0;
            if root_one {
                // Some OR child surely 0: both its leaves have probability 1.
                let side = rng.random_range(0..2usize);
                for j in 0..2 {
                    probs[2 * side + j] = rat(1, 1);
                    probs[2 * (1 - side) + j] = rat(rng.random_range(0..=1000), 1000);
                }
            } else {
                // Every OR child surely 1: one leaf per child has
                // probability 0.
                for i in 0..2usize {
                    let zero = rng.random_range(0..2usize);
                    probs[2 * i + zero] = rat(0, 1);
                    probs[2 * i + 1 - zero] = rat(rng.random_range(0..=1000), 1000);
                }
            }
            let d = IndependentDistribution::exact(tree.clone(), probs)?;
            let root = d.root_zero_probability().as_exact()?.clone();
            let expected_root = if root_one { rat(1, 1) } else { rat(0, 1) };
            if root != expected_root {
                return Ok((false, format!("instance {t}: root probability {root}")));
            }
            let g = optimal_cost_general(&d, &opt)?.value.as_exact()?.clone();
            let dir = optimal_cost_directional(&d, &opt)?;
            let dv = dir.value.as_exact()?.clone();
            if g != dv {
                return Ok((
                    false,
                    format!("instance {t}: general {g} != directional {dv}"),
                ));
            }
            // The directional witness is depth-first and attains it.
            if !is_depth_first(d.tree(), &dir.witness).depth_first {
                return Ok((false, format!("instance {t}: witness not depth-first")));
            }
        }
        Ok((
            true,
            format!("{trials} degenerate instances: depth-first attains the optimum"),
        ))
    }));

    SuiteReport::from_cases("corollary42", cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            seed: 1,
            trials: Some(25),
            starts: 6,
        }
    }

    #[test]
    fn all_suites_pass_at_reduced_trial_counts() {
        let reports = run_suite("all", &quick()).unwrap();
        assert_eq!(reports.len(), 5);
        for report in &reports {
            for case in &report.cases {
                assert!(
                    case.passed,
                    "{}::{}: {}",
                    report.suite, case.name, case.message
                );
            }
            assert!(report.passed);
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(
            run_suite("nope", &quick()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn report_json_is_junit_shaped() {
        let reports = run_suite("prop32", &quick()).unwrap();
        let json = reports[0].to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["suite"], "prop32");
        assert!(v["tests"].as_u64().unwrap() >= 5);
        assert_eq!(v["failures"], 0);
        assert!(v["cases"][0]["name"].is_string());
    }
}
