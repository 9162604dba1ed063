//! Max-min equilibrium search over independent distributions.
//!
//! The adversary picks leaf marginals to maximize the cost of the best
//! algorithm in a class (all strategies, or depth-first only), optionally
//! restricted to distributions with a fixed root zero-probability. The
//! objective is piecewise-multilinear with kinks where the optimal strategy
//! switches, so the search is derivative-free: multi-start cyclic coordinate
//! ascent, each 1-D maximization seeded by a grid scan and refined by
//! golden-section search. Floats throughout, with a final exact-rational
//! re-evaluation at a rationalized maximizer recorded in the report.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{IndependentDistribution, Marginals, Prob};
use crate::error::Error;
use crate::optimal::{
    optimal_cost_depth_first, optimal_cost_general, optimal_general_value, optimal_ordered_value,
    OptimizerConfig, OrderMode,
};
use crate::scalar::{rational_string, rationalize, F64};
use crate::tree::Tree;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumClass {
    General,
    DepthFirst,
}

impl EquilibriumClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquilibriumClass::General => "general",
            EquilibriumClass::DepthFirst => "depth_first",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    /// Stop when a full coordinate cycle improves the value by less.
    pub tol_value: f64,
    /// Width at which the golden-section refinement stops.
    pub tol_coordinate: f64,
    pub max_cycles: usize,
    /// Points in the 1-D seeding grid scan.
    pub grid_points: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 16,
            seed: 0,
            tol_value: 1e-10,
            tol_coordinate: 1e-12,
            max_cycles: 200,
            grid_points: 33,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumProblem {
    pub tree: Arc<Tree>,
    pub class: EquilibriumClass,
    /// Fixed root zero-probability, strictly inside (0, 1) when present.
    pub constraint: Option<f64>,
    pub config: SearchConfig,
}

impl EquilibriumProblem {
    pub fn new(
        tree: Arc<Tree>,
        class: EquilibriumClass,
        constraint: Option<f64>,
        config: SearchConfig,
    ) -> Result<Self> {
        if let Some(r) = constraint {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Infeasible(format!(
                    "root probability constraint must satisfy 0 < r < 1, got {r}"
                )));
            }
        }
        Ok(EquilibriumProblem {
            tree,
            class,
            constraint,
            config,
        })
    }
}

const CONSTRAINT_TOL: f64 = 1e-12;
const NEAR_BEST_TOL: f64 = 1e-8;
const DEGENERATE_TOL: f64 = 1e-9;
const RATIONALIZE_DEN: u64 = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct StartSummary {
    pub index: usize,
    pub initial: Vec<f64>,
    pub value: f64,
    pub cycles: usize,
    pub converged: bool,
    /// Value after the initial evaluation and after each cycle.
    pub trajectory: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub class: &'static str,
    pub constraint: Option<f64>,
    pub maximizer: Vec<f64>,
    pub value: f64,
    /// Max pairwise distance between leaf marginals at the maximizer.
    pub iid_deviation: f64,
    pub root_probability: f64,
    /// Root probability within DEGENERATE_TOL of 0 or 1; flagged because
    /// IID-ness of unconstrained maximizers is only guaranteed away from
    /// the degenerate boundary on multi-branching trees.
    pub degenerate_root_probability: bool,
    /// Nearest fractions (denominator <= 10^6) to the maximizer, and the
    /// exact class optimum re-evaluated there.
    pub rationalized_leaves: Vec<String>,
    pub rationalized_value: String,
    pub rationalized_root_probability: String,
    pub best_start: usize,
    pub starts_within_tolerance: Vec<usize>,
    pub converged: bool,
    pub seed: u64,
    pub starts: Vec<StartSummary>,
}

/// Class optimum under `d`, float backend, after checking the constraint.
pub fn objective(problem: &EquilibriumProblem, d: &IndependentDistribution) -> Result<f64> {
    if **d.tree() != *problem.tree {
        return Err(Error::Constraint(
            "distribution is over a different tree than the problem".into(),
        ));
    }
    let d = match d.marginals() {
        Marginals::Float(_) => d.clone(),
        Marginals::Exact(_) => d.to_float(),
    };
    if let Some(r) = problem.constraint {
        let root = d.root_zero_probability().to_f64();
        if (root - r).abs() > CONSTRAINT_TOL {
            return Err(Error::Constraint(format!(
                "root probability {root} violates the constraint r = {r}"
            )));
        }
    }
    let cfg = OptimizerConfig::default();
    let report = match problem.class {
        EquilibriumClass::General => optimal_cost_general(&d, &cfg)?,
        EquilibriumClass::DepthFirst => optimal_cost_depth_first(&d, &cfg)?,
    };
    Ok(report.value.to_f64())
}

/// Inner-loop evaluation: value only, no witness, no constraint check.
fn eval_point(tree: &Tree, class: EquilibriumClass, point: &[f64]) -> f64 {
    let probs: Vec<F64> = point.iter().map(|&x| F64(x)).collect();
    match class {
        EquilibriumClass::General => optimal_general_value(tree, &probs).0,
        EquilibriumClass::DepthFirst => {
            optimal_ordered_value(tree, &probs, OrderMode::SubsetDp, 6).0
        }
    }
}

/// Root zero-probability of `point` with one coordinate overridden.
fn root_prob_with(tree: &Tree, point: &[f64], overrides: &[(usize, f64)]) -> f64 {
    let mut p = point.to_vec();
    for &(i, v) in overrides {
        p[i] = v;
    }
    let probs: Vec<F64> = p.iter().map(|&x| F64(x)).collect();
    crate::distribution::node_zero(tree, &probs, tree.root()).0
}

/// Solve the free leaf (float, affine) so the root probability equals `r`.
/// Returns None when infeasible.
fn solve_free(tree: &Tree, point: &[f64], free: usize, r: f64) -> Option<f64> {
    let at0 = root_prob_with(tree, point, &[(free, 0.0)]);
    let at1 = root_prob_with(tree, point, &[(free, 1.0)]);
    let slope = at1 - at0;
    if slope.abs() < 1e-15 {
        if (at0 - r).abs() <= CONSTRAINT_TOL {
            return Some(0.5);
        }
        return None;
    }
    let q = (r - at0) / slope;
    if !(-1e-9..=1.0 + 1e-9).contains(&q) {
        return None;
    }
    Some(q.clamp(0.0, 1.0))
}

/// Feasible interval for moving coordinate `coord` while the free leaf can
/// still absorb the constraint. Both boundary conditions are affine in the
/// coordinate.
fn feasible_interval(tree: &Tree, point: &[f64], coord: usize, free: usize, r: f64) -> (f64, f64) {
    // Q(x, free=0) <= r (lower attainable root prob must not exceed r)
    let a0 = root_prob_with(tree, point, &[(coord, 0.0), (free, 0.0)]);
    let b0 = root_prob_with(tree, point, &[(coord, 1.0), (free, 0.0)]);
    // Q(x, free=1) >= r
    let a1 = root_prob_with(tree, point, &[(coord, 0.0), (free, 1.0)]);
    let b1 = root_prob_with(tree, point, &[(coord, 1.0), (free, 1.0)]);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    // Affine g(x) = a + (b-a) x; monotone either way in principle, though
    // tree monotonicity makes both nondecreasing.
    let clip_le = |a: f64, b: f64, lo: &mut f64, hi: &mut f64| {
        // need a + (b-a) x <= r
        let s = b - a;
        if s.abs() < 1e-15 {
            if a > r + CONSTRAINT_TOL {
                *lo = 1.0;
                *hi = 0.0;
            }
        } else if s > 0.0 {
            *hi = hi.min((r - a) / s);
        } else {
            *lo = lo.max((r - a) / s);
        }
    };
    let clip_ge = |a: f64, b: f64, lo: &mut f64, hi: &mut f64| {
        // need a + (b-a) x >= r
        let s = b - a;
        if s.abs() < 1e-15 {
            if a < r - CONSTRAINT_TOL {
                *lo = 1.0;
                *hi = 0.0;
            }
        } else if s > 0.0 {
            *lo = lo.max((r - a) / s);
        } else {
            *hi = hi.min((r - a) / s);
        }
    };
    clip_le(a0, b0, &mut lo, &mut hi);
    clip_ge(a1, b1, &mut lo, &mut hi);
    (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0))
}

struct Ascent {
    point: Vec<f64>,
    value: f64,
    cycles: usize,
    converged: bool,
    trajectory: Vec<f64>,
}

/// Cyclic coordinate ascent from one start. For constrained problems
/// `free` names the solved leaf and `point[free]` is kept consistent.
fn ascend(
    tree: &Tree,
    class: EquilibriumClass,
    mut point: Vec<f64>,
    constraint: Option<(f64, usize)>,
    cfg: &SearchConfig,
) -> Ascent {
    let n = point.len();
    let coords: Vec<usize> = match constraint {
        Some((_, free)) => (0..n).filter(|&c| c != free).collect(),
        None => (0..n).collect(),
    };
    let eval_with = |point: &mut Vec<f64>, coord: usize, x: f64| -> Option<f64> {
        let saved_coord = point[coord];
        point[coord] = x;
        let mut saved_free = None;
        if let Some((r, free)) = constraint {
            match solve_free(tree, point, free, r) {
                Some(q) => {
                    saved_free = Some((free, point[free]));
                    point[free] = q;
                }
                None => {
                    point[coord] = saved_coord;
                    return None;
                }
            }
        }
        let v = eval_point(tree, class, point);
        point[coord] = saved_coord;
        if let Some((free, old)) = saved_free {
            point[free] = old;
        }
        Some(v)
    };
    let commit = |point: &mut Vec<f64>, coord: usize, x: f64| {
        point[coord] = x;
        if let Some((r, free)) = constraint {
            if let Some(q) = solve_free(tree, point, free, r) {
                point[free] = q;
            }
        }
    };

    let mut value = eval_point(tree, class, &point);
    let mut trajectory = vec![value];
    let mut converged = false;
    let mut cycles = 0;
    for _ in 0..cfg.max_cycles {
        cycles += 1;
        let before = value;
        let mut moved = 0.0f64;
        for &coord in &coords {
            let (lo, hi) = match constraint {
                Some((r, free)) => feasible_interval(tree, &point, coord, free, r),
                None => (0.0, 1.0),
            };
            if lo > hi {
                continue;
            }
            let mut best_x = point[coord].clamp(lo, hi);
            let mut best_v = value;
            // Grid scan: unimodality is not assumed.
            let gp = cfg.grid_points.max(2);
            for g in 0..gp {
                let x = lo + (hi - lo) * g as f64 / (gp - 1) as f64;
                if let Some(v) = eval_with(&mut point, coord, x) {
                    if v > best_v {
                        best_v = v;
                        best_x = x;
                    }
                }
            }
            // Golden-section refinement around the grid winner.
            let h = (hi - lo) / (gp - 1) as f64;
            let mut a = (best_x - h).max(lo);
            let mut b = (best_x + h).min(hi);
            let phi = 0.618_033_988_749_894_9_f64;
            while b - a > cfg.tol_coordinate {
                let x1 = b - phi * (b - a);
                let x2 = a + phi * (b - a);
                let v1 = eval_with(&mut point, coord, x1);
                let v2 = eval_with(&mut point, coord, x2);
                match (v1, v2) {
                    (Some(v1), Some(v2)) => {
                        if v1 > best_v {
                            best_v = v1;
                            best_x = x1;
                        }
                        if v2 > best_v {
                            best_v = v2;
                            best_x = x2;
                        }
                        if v1 >= v2 {
                            b = x2;
                        } else {
                            a = x1;
                        }
                    }
                    _ => break,
                }
            }
            if best_v > value {
                moved = moved.max((best_x - point[coord]).abs());
                commit(&mut point, coord, best_x);
                value = best_v;
            }
        }
        trajectory.push(value);
        // A sub-tolerance cycle only counts as converged if the point also
        // stopped moving: a hairline improvement can relocate a coordinate
        // and unlock a large gain for the NEXT cycle's earlier coordinates.
        if value - before < cfg.tol_value && moved <= cfg.tol_coordinate {
            converged = true;
            break;
        }
    }
    Ascent {
        point,
        value,
        cycles,
        converged,
        trajectory,
    }
}

/// Starting points: the IID ridge seed first, then a seeded sample of
/// corners (at most half the budget) and Latin-hypercube fill.
///
/// The objective is kinked along the identical-marginals diagonal: strategy
/// ties make every IID point a coordinate-wise local maximum, so cyclic
/// coordinate ascent cannot travel along that ridge. Seeding one start at
/// the 1-D line optimum covers the ridge top; the remaining starts probe
/// the rest of the cube and can still beat it, so a non-IID maximizer would
/// surface in the report rather than be assumed away.
fn make_starts(n: usize, cfg: &SearchConfig, ridge_seed: Vec<f64>) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts = cfg.starts.max(1);
    let mut seeded = vec![ridge_seed];
    let starts = starts.saturating_sub(seeded.len()).max(1);
    let corner_budget = (starts.div_ceil(2)).min(1 << n.min(20));
    let mut corners: Vec<usize> = (0..(1usize << n.min(20))).collect();
    // Seeded shuffle, then take the first corner_budget entries.
    for i in (1..corners.len()).rev() {
        let j = rng.random_range(0..=i);
        corners.swap(i, j);
    }
    let mut points: Vec<Vec<f64>> = corners
        .into_iter()
        .take(corner_budget)
        .map(|bits| {
            (0..n)
                .map(|d| if bits >> d & 1 == 1 { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let fill = starts - points.len();
    if fill > 0 {
        // Latin hypercube over the remaining starts.
        let mut strata: Vec<Vec<usize>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut perm: Vec<usize> = (0..fill).collect();
            for i in (1..perm.len()).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            strata.push(perm);
        }
        for sample in 0..fill {
            let point = strata
                .iter()
                .map(|perm| (perm[sample] as f64 + rng.random::<f64>()) / fill as f64)
                .collect();
            points.push(point);
        }
    }
    seeded.extend(points);
    seeded
}

/// IID marginal p with root zero-probability r (bisection; the map is
/// continuous and increasing from 0 to 1).
fn iid_for_root_probability(tree: &Tree, r: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let point = vec![mid; tree.leaf_count()];
        if root_prob_with(tree, &point, &[]) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Project a sampled start onto the constraint surface: scale toward the
/// origin until the free leaf can absorb r, falling back to the IID point.
fn project_start(tree: &Tree, mut point: Vec<f64>, free: usize, r: f64) -> Vec<f64> {
    point[free] = 0.0;
    let feasible = |t: f64, point: &[f64]| -> bool {
        let scaled: Vec<f64> = point.iter().map(|&x| t * x).collect();
        solve_free(tree, &scaled, free, r).is_some()
    };
    let mut t = 1.0;
    if !feasible(t, &point) {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        // The all-zeros point leaves the whole [0,1] range to the free leaf
        // on AND-rooted trees; if even that fails, use the IID point.
        if !feasible(0.0, &point) {
            let p = iid_for_root_probability(tree, r);
            let mut out = vec![p; point.len()];
            if let Some(q) = solve_free(tree, &out, free, r) {
                out[free] = q;
            }
            return out;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid, &point) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t = lo;
    }
    let mut out: Vec<f64> = point.iter().map(|&x| t * x).collect();
    if let Some(q) = solve_free(tree, &out, free, r) {
        out[free] = q;
    }
    out
}

fn run_search(problem: &EquilibriumProblem) -> Result<EquilibriumReport> {
    let tree = &problem.tree;
    let n = tree.leaf_count();
    let cfg = &problem.config;
    let constraint = problem.constraint.map(|r| (r, n - 1));
    let ridge_seed = match constraint {
        // On the constraint surface the ridge seed is the IID point with
        // root probability r (projection is the identity there).
        Some((r, _)) => vec![iid_for_root_probability(tree, r); n],
        None => {
            let (p_star, _) = iid_line_search(tree, problem.class);
            vec![p_star; n]
        }
    };
    let raw_starts = make_starts(n, cfg, ridge_seed);
    let starts: Vec<Vec<f64>> = raw_starts
        .into_iter()
        .map(|p| match constraint {
            Some((r, free)) => project_start(tree, p, free, r),
            None => p,
        })
        .collect();
    let results: Vec<(usize, Vec<f64>, Ascent)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(index, start)| {
            let ascent = ascend(tree, problem.class, start.clone(), constraint, cfg);
            (index, start, ascent)
        })
        .collect();

    let best_start = results
        .iter()
        .max_by(|a, b| a.2.value.total_cmp(&b.2.value).then(b.0.cmp(&a.0)))
        .map(|r| r.0)
        .ok_or_else(|| Error::Internal("no starts".into()))?;
    let best = &results[best_start].2;
    let maximizer = best.point.clone();

    let max_coord = maximizer.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_coord = maximizer.iter().cloned().fold(f64::INFINITY, f64::min);
    let iid_deviation = max_coord - min_coord;
    let root_probability = root_prob_with(tree, &maximizer, &[]);

    // Exact re-evaluation at the rationalized maximizer.
    let rational_leaves: Vec<_> = maximizer
        .iter()
        .map(|&x| rationalize(x, RATIONALIZE_DEN))
        .collect();
    let rational_dist =
        IndependentDistribution::exact(tree.clone(), rational_leaves.clone())?;
    let opt_cfg = OptimizerConfig::default();
    let rational_report = match problem.class {
        EquilibriumClass::General => optimal_cost_general(&rational_dist, &opt_cfg)?,
        EquilibriumClass::DepthFirst => optimal_cost_depth_first(&rational_dist, &opt_cfg)?,
    };
    let rational_root = rational_dist.root_zero_probability();

    // The reported value is the objective recomputed at the maximizer.
    let final_dist = IndependentDistribution::float(tree.clone(), maximizer.clone())?;
    let value = objective(problem, &final_dist)?;

    let starts_within_tolerance = results
        .iter()
        .filter(|r| (r.2.value - best.value).abs() <= NEAR_BEST_TOL)
        .map(|r| r.0)
        .collect();

    Ok(EquilibriumReport {
        class: problem.class.as_str(),
        constraint: problem.constraint,
        maximizer,
        value,
        iid_deviation,
        root_probability,
        degenerate_root_probability: !(DEGENERATE_TOL..=1.0 - DEGENERATE_TOL)
            .contains(&root_probability),
        rationalized_leaves: rational_leaves.iter().map(rational_string).collect(),
        rationalized_value: rational_report.value.render(),
        rationalized_root_probability: match rational_root {
            Prob::Exact(r) => rational_string(&r),
            Prob::Float(x) => x.to_string(),
        },
        best_start,
        starts_within_tolerance,
        converged: best.converged,
        seed: cfg.seed,
        starts: results
            .into_iter()
            .map(|(index, initial, a)| StartSummary {
                index,
                initial,
                value: a.value,
                cycles: a.cycles,
                converged: a.converged,
                trajectory: a.trajectory,
            })
            .collect(),
    })
}

/// Maximize the class objective over all independent distributions.
pub fn search_unconstrained(problem: &EquilibriumProblem) -> Result<EquilibriumReport> {
    if problem.constraint.is_some() {
        return Err(Error::Constraint(
            "unconstrained search called on a constrained problem".into(),
        ));
    }
    run_search(problem)
}

/// Maximize over distributions whose root zero-probability equals r: the
/// last leaf is solved for r after every coordinate move, so every iterate
/// sits exactly on the constraint surface.
pub fn search_constrained(problem: &EquilibriumProblem) -> Result<EquilibriumReport> {
    let r = problem.constraint.ok_or_else(|| {
        Error::Constraint("constrained search needs a root-probability constraint".into())
    })?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Infeasible(format!(
            "root probability constraint must satisfy 0 < r < 1, got {r}"
        )));
    }
    run_search(problem)
}

/// Maximize the class objective along the one-parameter IID family:
/// 1001-point grid scan plus golden-section refinement.
pub fn iid_line_search(tree: &Tree, class: EquilibriumClass) -> (f64, f64) {
    let eval = |p: f64| eval_point(tree, class, &vec![p; tree.leaf_count()]);
    let mut best_p = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    for g in 0..=1000 {
        let p = g as f64 / 1000.0;
        let v = eval(p);
        if v > best_v {
            best_v = v;
            best_p = p;
        }
    }
    let mut a = (best_p - 1e-3).max(0.0);
    let mut b = (best_p + 1e-3).min(1.0);
    let phi = 0.618_033_988_749_894_9_f64;
    while b - a > 1e-12 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        let v1 = eval(x1);
        let v2 = eval(x2);
        if v1 > best_v {
            best_v = v1;
            best_p = x1;
        }
        if v2 > best_v {
            best_v = v2;
            best_p = x2;
        }
        if v1 >= v2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    (best_p, best_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::tree::Label;

    fn quick_config(starts: usize, seed: u64) -> SearchConfig {
        SearchConfig {
            starts,
            seed,
            ..SearchConfig::default()
        }
    }

    fn problem(
        tree: Tree,
        class: EquilibriumClass,
        constraint: Option<f64>,
        starts: usize,
    ) -> EquilibriumProblem {
        EquilibriumProblem::new(Arc::new(tree), class, constraint, quick_config(starts, 7))
            .unwrap()
    }

    #[test]
    fn objective_matches_exact_engine_cast() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let p = problem(tree.clone(), EquilibriumClass::General, None, 4);
        let d = IndependentDistribution::float(Arc::new(tree), vec![0.5; 4]).unwrap();
        let v = objective(&p, &d).unwrap();
        let exact = {
            use crate::scalar::Scalar;
            let d = IndependentDistribution::iid(
                p.tree.clone(),
                Prob::Exact(num_rational::BigRational::from_ratio(1, 2)),
            )
            .unwrap();
            optimal_cost_general(&d, &OptimizerConfig::default())
                .unwrap()
                .value
                .to_f64()
        };
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn objective_is_defined_on_the_boundary() {
        // d = (0, 1) on a 2-leaf AND tree: query the sure-zero leaf.
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let p = problem(tree.clone(), EquilibriumClass::General, None, 4);
        let d = IndependentDistribution::float(Arc::new(tree), vec![0.0, 1.0]).unwrap();
        assert_eq!(objective(&p, &d).unwrap(), 1.0);
    }

    #[test]
    fn objective_rejects_constraint_violations() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let p = problem(tree.clone(), EquilibriumClass::General, Some(0.5), 4);
        let d = IndependentDistribution::float(Arc::new(tree), vec![0.9; 4]).unwrap();
        assert!(matches!(objective(&p, &d), Err(Error::Constraint(_))));
    }

    #[test]
    fn constraint_outside_open_interval_is_rejected() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        assert!(matches!(
            EquilibriumProblem::new(
                Arc::new(tree),
                EquilibriumClass::General,
                Some(0.0),
                SearchConfig::default(),
            ),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn two_leaf_and_maximizer_is_all_zeros() {
        // Objective is 2 - max(q0, q1): maximum 2.0 at (0, 0). Cross-check
        // the searched value against a dense grid oracle.
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let p = problem(tree.clone(), EquilibriumClass::General, None, 8);
        let report = search_unconstrained(&p).unwrap();
        assert!((report.value - 2.0).abs() < 1e-9);
        assert!(report.maximizer.iter().all(|&q| q < 1e-9));
        let (_, grid_best) =
            oracle::grid_max(2, 100, |point| eval_point(&tree, EquilibriumClass::General, point));
        assert!(report.value >= grid_best - 1e-9);
    }

    #[test]
    fn height2_unconstrained_maximizer_is_iid() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        for class in [EquilibriumClass::General, EquilibriumClass::DepthFirst] {
            let p = problem(tree.clone(), class, None, 8);
            let report = search_unconstrained(&p).unwrap();
            assert!(
                report.iid_deviation <= 1e-6,
                "{class:?}: deviation {}",
                report.iid_deviation
            );
            let (p_star, line_value) = iid_line_search(&tree, class);
            assert!((report.value - line_value).abs() <= 1e-8);
            // The 1-D stationarity condition puts p* at (sqrt(7)-1)/3 for
            // the depth-first class (and the general class coincides at
            // height 2).
            let expected = (7.0f64.sqrt() - 1.0) / 3.0;
            assert!((p_star - expected).abs() < 1e-6, "p* = {p_star}");
        }
    }

    #[test]
    fn height2_constrained_maximizer_is_iid_half() {
        // r = 7/16 is the root probability of the IID 1/2 point.
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let p = problem(tree.clone(), EquilibriumClass::General, Some(7.0 / 16.0), 8);
        let report = search_constrained(&p).unwrap();
        assert!((report.root_probability - 7.0 / 16.0).abs() <= 1e-12);
        assert!(report.iid_deviation <= 1e-6, "dev {}", report.iid_deviation);
        for q in &report.maximizer {
            assert!((q - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn and_or_duality_mirrors_the_iid_maximizer() {
        let and_tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let or_tree = Tree::uniform(Label::Or, 2, 2).unwrap();
        let (p_and, v_and) = iid_line_search(&and_tree, EquilibriumClass::General);
        let (p_or, v_or) = iid_line_search(&or_tree, EquilibriumClass::General);
        assert!((v_and - v_or).abs() < 1e-8);
        assert!((p_and - (1.0 - p_or)).abs() < 1e-6);
    }

    #[test]
    fn reports_are_reproducible_byte_for_byte() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let p = problem(tree, EquilibriumClass::DepthFirst, None, 6);
        let a = search_unconstrained(&p).unwrap();
        let b = search_unconstrained(&p).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn iid_dominance_across_small_shapes() {
        // The full search never beats the 1-D identical-marginals line by
        // more than the float tolerance, on binary heights 1..=3 and
        // ternary heights 1..=2, both classes.
        for (label, arity, height) in [
            (Label::And, 2usize, 1usize),
            (Label::And, 2, 2),
            (Label::And, 2, 3),
            (Label::And, 3, 1),
            (Label::And, 3, 2),
        ] {
            let tree = Tree::uniform(label, arity, height).unwrap();
            for class in [EquilibriumClass::DepthFirst, EquilibriumClass::General] {
                // Keep the expensive general-class searches small.
                let starts = if class == EquilibriumClass::General && tree.leaf_count() > 4 {
                    4
                } else {
                    6
                };
                let p = problem(tree.clone(), class, None, starts);
                let report = search_unconstrained(&p).unwrap();
                let (_, line) = iid_line_search(&tree, class);
                assert!(
                    (report.value - line).abs() <= 1e-8,
                    "{arity}-ary h{height} {class:?}: search {} vs line {line}",
                    report.value
                );
            }
        }
    }

    #[test]
    fn constrained_search_beats_surface_grid_oracle() {
        // Dense grid over the three free coordinates of the r = 7/16
        // constraint surface at step 1/50; the search must not be below it.
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let r = 7.0 / 16.0;
        let p = problem(tree.clone(), EquilibriumClass::DepthFirst, Some(r), 8);
        let report = search_constrained(&p).unwrap();
        let (_, grid_best) = oracle::grid_max(3, 50, |free| {
            let mut point = vec![free[0], free[1], free[2], 0.0];
            match solve_free(&tree, &point, 3, r) {
                Some(q) => {
                    point[3] = q;
                    eval_point(&tree, EquilibriumClass::DepthFirst, &point)
                }
                None => f64::NEG_INFINITY,
            }
        });
        assert!(
            report.value >= grid_best - 1e-9,
            "search {} below surface grid {grid_best}",
            report.value
        );
    }

    #[test]
    fn exhausted_cycle_cap_is_flagged_not_an_error() {
        // One cycle is not enough for interior starts; they must be flagged
        // non-converged while the search still returns its best value.
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let config = SearchConfig {
            starts: 6,
            seed: 3,
            max_cycles: 1,
            ..SearchConfig::default()
        };
        let p = EquilibriumProblem::new(
            Arc::new(tree),
            EquilibriumClass::DepthFirst,
            None,
            config,
        )
        .unwrap();
        let report = search_unconstrained(&p).unwrap();
        assert!(report.starts.iter().any(|s| !s.converged));
        assert!(report.starts.iter().all(|s| s.cycles <= 1));
        assert!(report.value.is_finite());
    }

    #[test]
    fn degenerate_boundary_is_flagged() {
        // The 2-leaf AND maximizer is all-zeros: root probability 0.
        let tree = Tree::uniform(Label::And, 2, 1).unwrap();
        let p = problem(tree, EquilibriumClass::General, None, 8);
        let report = search_unconstrained(&p).unwrap();
        assert!(report.degenerate_root_probability);
        assert!(report.root_probability < 1e-9);
    }

    #[test]
    fn first_order_local_maximality_of_reported_maximizer() {
        let tree = Tree::uniform(Label::And, 2, 2).unwrap();
        let p = problem(tree.clone(), EquilibriumClass::General, None, 8);
        let report = search_unconstrained(&p).unwrap();
        for c in 0..4 {
            for delta in [-1e-3, 1e-3] {
                let mut moved = report.maximizer.clone();
                moved[c] = (moved[c] + delta).clamp(0.0, 1.0);
                let v = eval_point(&tree, EquilibriumClass::General, &moved);
                assert!(v <= report.value + 1e-9);
            }
        }
    }
}
