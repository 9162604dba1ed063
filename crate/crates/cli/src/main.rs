//! Command-line interface for the andor engine.
//!
//! Every command prints a JSON envelope `{"manifest": ..., "result": ...}`
//! to stdout; the manifest echoes the resolved configuration and carries a
//! SHA-256 digest of the result payload, so identical manifests imply
//! identical results. `--human` renders a terse text summary instead.
//!
//! Exit codes: 0 success, 2 parse errors, 3 validation failures, 4 budget
//! exceeded, 5 infeasible root probability, 1 internal errors or failed
//! verification suites.

use std::fs;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use andor_core::catalog::{self, CrossingId};
use andor_core::distribution::{separating_distribution, IndependentDistribution, Prob};
use andor_core::equilibrium::{
    search_constrained, search_unconstrained, EquilibriumClass, EquilibriumProblem, SearchConfig,
};
use andor_core::optimal::{
    make_solve, optimal_cost_depth_first, optimal_cost_directional, optimal_cost_general,
    OptimizerConfig,
};
use andor_core::strategy::{
    expected_cost, is_depth_first, is_directional, monte_carlo_cost, validate, Strategy,
};
use andor_core::tree::Tree;
use andor_core::verify::{run_suite, VerifyConfig};
use andor_core::Error;

#[derive(Parser)]
#[command(
    name = "andor",
    version,
    about = "Expected-cost analysis of AND-OR tree evaluation under independent leaf distributions"
)]
struct Cli {
    /// Print a human-readable summary instead of the JSON envelope.
    #[arg(long, global = true)]
    human: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    General,
    Depth,
    Directional,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EqClassArg {
    General,
    Depth,
}

#[derive(Subcommand)]
enum Command {
    /// Price a strategy against a distribution: expected cost, validity,
    /// depth-first and directional flags, optional Monte Carlo cross-check.
    Cost {
        /// Tree spec: "uniform:LABEL:ARITY:HEIGHT" or "AND(OR(l,l),...)".
        #[arg(long)]
        tree: String,
        /// Distribution JSON file ({"leaves": [...]} or {"iid": "p"}).
        #[arg(long, conflicts_with = "eps")]
        dist: Option<String>,
        /// Use the separating distribution with this eps (rational like
        /// "1/100" for exact, decimal for float); tree must be
        /// uniform:OR:2:3.
        #[arg(long)]
        eps: Option<String>,
        /// Strategy JSON file.
        #[arg(long)]
        strategy: String,
        /// Force a numeric backend (default: the distribution's own).
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Also estimate the cost by Monte Carlo with this many samples.
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimal expected cost over a strategy class, with a witness.
    Optimal {
        #[arg(long)]
        tree: String,
        #[arg(long, conflicts_with = "eps")]
        dist: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Hard cap on tree size.
        #[arg(long, default_value_t = 16)]
        budget_leaves: usize,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Write the witness strategy JSON here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a named verification suite (prop31, prop32, tarsi, theorem41,
    /// corollary42, all).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the per-case battery sizes (default: full batteries).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Search for a max-min equilibrium over independent distributions.
    Equilibrium {
        #[arg(long)]
        tree: String,
        #[arg(long, value_enum)]
        class: EqClassArg,
        /// Fix the root zero-probability to this value (rational or
        /// decimal), strictly inside (0,1).
        #[arg(long)]
        r: Option<String>,
        /// JSON file with {starts, seed, tol_value, tol_coordinate,
        /// max_cycles}; flags override.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        starts: Option<usize>,
        /// tol_value: stop when a full cycle improves by less.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        tol_coordinate: Option<f64>,
        #[arg(long)]
        max_cycles: Option<usize>,
        /// Write per-start trajectories as CSV here.
        #[arg(long)]
        out: Option<String>,
    },
    /// List the named strategies, or emit one as a strategy JSON file.
    Catalog {
        /// Emit this strategy ("solve", "solve-swapped", "deferring", or a
        /// crossing key like "complete-010").
        #[arg(long)]
        emit: Option<String>,
        #[arg(long)]
        tree: Option<String>,
        #[arg(long, conflicts_with = "eps")]
        dist: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ANDOR_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Shape(_)
        | Error::UnknownNode(_)
        | Error::Assignment(_)
        | Error::Probability(_)
        | Error::Backend(_) => 2,
        Error::Strategy(_) => 3,
        Error::Budget { .. } => 4,
        Error::Infeasible(_) | Error::Constraint(_) => 5,
        Error::Internal(_) => 1,
    }
}

struct Envelope {
    command: &'static str,
    config: serde_json::Value,
    seed: u64,
    started: Instant,
}

impl Envelope {
    fn new(command: &'static str, config: serde_json::Value, seed: u64) -> Envelope {
        Envelope {
            command,
            config,
            seed,
            started: Instant::now(),
        }
    }

    fn emit(self, result: serde_json::Value, human: bool, human_summary: String) {
        let payload = result.to_string();
        let mut hasher = Sha256::new();
        hasher.update(payload.as_bytes());
        let digest = format!("{:x}", hasher.finalize());
        if human {
            println!("{human_summary}");
            println!("(digest {digest})");
            return;
        }
        let envelope = serde_json::json!({
            "manifest": {
                "command": self.command,
                "config": self.config,
                "version": env!("CARGO_PKG_VERSION"),
                "seed": self.seed,
                "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
                "results_digest": digest,
            },
            "result": result,
        });
        println!("{envelope}");
    }
}

fn load_tree(spec: &str) -> Result<Arc<Tree>, Error> {
    Ok(Arc::new(Tree::parse(spec)?))
}

fn load_distribution(
    tree: &Arc<Tree>,
    dist: &Option<String>,
    eps: &Option<String>,
    backend: Option<BackendArg>,
) -> Result<IndependentDistribution, Error> {
    let d = match (dist, eps) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse {
                pos: 0,
                msg: format!("cannot read {path}: {e}"),
            })?;
            IndependentDistribution::from_json(tree.clone(), &text)?
        }
        (None, Some(eps)) => {
            let eps = Prob::parse(eps)?;
            let built = separating_distribution(&eps)?;
            if **tree != **built.tree() {
                return Err(Error::Shape("--eps needs the tree uniform:OR:2:3".into()));
            }
            let probs = (0..tree.leaf_count()).map(|l| built.leaf_prob(l)).collect();
            IndependentDistribution::new(tree.clone(), probs)?
        }
        (None, None) => {
            return Err(Error::Parse {
                pos: 0,
                msg: "either --dist or --eps is required".into(),
            })
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    match backend {
        None => Ok(d),
        Some(BackendArg::Float) => Ok(d.to_float()),
        Some(BackendArg::Exact) => {
            if d.exact_marginals().is_err() {
                return Err(Error::Backend(
                    "--backend exact needs an exact (rational) distribution".into(),
                ));
            }
            Ok(d)
        }
    }
}

fn parse_r(text: &str) -> Result<f64, Error> {
    Ok(Prob::parse(text)?.to_f64())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Cost {
            tree,
            dist,
            eps,
            strategy,
            backend,
            mc_samples,
            seed,
        } => {
            let config = serde_json::json!({
                "tree": tree, "dist": dist, "eps": eps, "strategy": strategy,
                "mc_samples": mc_samples, "seed": seed,
            });
            let envelope = Envelope::new("cost", config, seed);
            let tree = load_tree(&tree)?;
            let d = load_distribution(&tree, &dist, &eps, backend)?;
            let text = fs::read_to_string(&strategy).map_err(|e| Error::Parse {
                pos: 0,
                msg: format!("cannot read {strategy}: {e}"),
            })?;
            let s = Strategy::from_json(&tree, &text)?;
            let report = validate(&tree, &s);
            let warnings: Vec<String> = report
                .warnings
                .iter()
                .map(|w| {
                    format!(
                        "leaf {} queried under resolved node {}",
                        w.leaf.render(tree.wide_ids()),
                        w.resolved_ancestor.render(tree.wide_ids())
                    )
                })
                .collect();
            if let Some(violation) = &report.violation {
                let result = serde_json::json!({
                    "valid": false,
                    "violation": violation.to_string(),
                    "warnings": warnings,
                });
                let summary = format!("INVALID strategy: {violation}");
                envelope.emit(result, cli.human, summary);
                return Ok(ExitCode::from(3));
            }
            let cost = expected_cost(&d, &s)?;
            let (exact_cost, float_cost) = match &cost {
                andor_core::distribution::CostValue::Exact(_) => {
                    (Some(cost.render()), cost.to_f64())
                }
                andor_core::distribution::CostValue::Float(x) => (None, *x),
            };
            let df = is_depth_first(&tree, &s);
            let dir = is_directional(&tree, &s);
            let order: Option<Vec<String>> = dir
                .order
                .as_ref()
                .map(|o| o.iter().map(|&l| tree.render_leaf_id(l)).collect());
            let monte_carlo = match mc_samples {
                Some(samples) => {
                    let est = monte_carlo_cost(&d.to_float(), &s, samples, seed)?;
                    Some(serde_json::json!({
                        "mean": est.mean,
                        "std_error": est.std_error,
                        "samples": est.samples,
                    }))
                }
                None => None,
            };
            let result = serde_json::json!({
                "valid": true,
                "warnings": warnings,
                "exact_cost": exact_cost,
                "float_cost": float_cost,
                "depth_first": df.depth_first,
                "directional": dir.directional,
                "order": order,
                "monte_carlo": monte_carlo,
            });
            let summary = format!(
                "cost {} (float {float_cost}); depth-first {}; directional {}",
                exact_cost.clone().unwrap_or_else(|| "-".into()),
                df.depth_first,
                dir.directional
            );
            envelope.emit(result, cli.human, summary);
            Ok(ExitCode::SUCCESS)
        }

        Command::Optimal {
            tree,
            dist,
            eps,
            class,
            budget_leaves,
            backend,
            out,
        } => {
            let class_name = match class {
                ClassArg::General => "general",
                ClassArg::Depth => "depth",
                ClassArg::Directional => "directional",
            };
            let config = serde_json::json!({
                "tree": tree, "dist": dist, "eps": eps, "class": class_name,
                "budget_leaves": budget_leaves, "out": out,
            });
            let envelope = Envelope::new("optimal", config, 0);
            let tree = load_tree(&tree)?;
            let d = load_distribution(&tree, &dist, &eps, backend)?;
            let opt = OptimizerConfig {
                leaf_budget: budget_leaves,
                ..OptimizerConfig::default()
            };
            let report = match class {
                ClassArg::General => optimal_cost_general(&d, &opt)?,
                ClassArg::Depth => optimal_cost_depth_first(&d, &opt)?,
                ClassArg::Directional => optimal_cost_directional(&d, &opt)?,
            };
            if let Some(path) = &out {
                fs::write(path, report.witness.to_canonical_json(&tree))
                    .map_err(|e| Error::Internal(format!("cannot write {path}: {e}")))?;
            }
            let result: serde_json::Value =
                serde_json::from_str(&report.to_json(&tree)).expect("report JSON");
            let summary = format!(
                "{} optimum {} ({} states explored)",
                report.class.as_str(),
                report.value,
                report.states_explored
            );
            envelope.emit(result, cli.human, summary);
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            suite,
            seed,
            trials,
            starts,
        } => {
            let config = serde_json::json!({
                "suite": suite, "seed": seed, "trials": trials, "starts": starts,
            });
            let envelope = Envelope::new("verify", config, seed);
            let vcfg = VerifyConfig {
                seed,
                trials,
                starts,
            };
            let reports = run_suite(&suite, &vcfg)?;
            let all_passed = reports.iter().all(|r| r.passed);
            let mut summary = String::new();
            for report in &reports {
                summary.push_str(&format!(
                    "{}: {}/{} passed\n",
                    report.suite,
                    report.tests - report.failures,
                    report.tests
                ));
                for case in &report.cases {
                    summary.push_str(&format!(
                        "  [{}] {} ({:.2}s) {}\n",
                        if case.passed { "PASS" } else { "FAIL" },
                        case.name,
                        case.time_seconds,
                        case.message
                    ));
                }
            }
            let result = serde_json::json!({
                "passed": all_passed,
                "suites": serde_json::to_value(&reports).expect("suite reports"),
            });
            envelope.emit(result, cli.human, summary.trim_end().to_string());
            if all_passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }

        Command::Equilibrium {
            tree,
            class,
            r,
            config,
            seed,
            starts,
            tol,
            tol_coordinate,
            max_cycles,
            out,
        } => {
            let mut search = SearchConfig::default();
            if let Some(path) = &config {
                let text = fs::read_to_string(path).map_err(|e| Error::Parse {
                    pos: 0,
                    msg: format!("cannot read {path}: {e}"),
                })?;
                let v: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| Error::Parse {
                        pos: 0,
                        msg: format!("bad config JSON: {e}"),
                    })?;
                if let Some(x) = v.get("starts").and_then(|x| x.as_u64()) {
                    search.starts = x as usize;
                }
                if let Some(x) = v.get("seed").and_then(|x| x.as_u64()) {
                    search.seed = x;
                }
                if let Some(x) = v.get("tol_value").and_then(|x| x.as_f64()) {
                    search.tol_value = x;
                }
                if let Some(x) = v.get("tol_coordinate").and_then(|x| x.as_f64()) {
                    search.tol_coordinate = x;
                }
                if let Some(x) = v.get("max_cycles").and_then(|x| x.as_u64()) {
                    search.max_cycles = x as usize;
                }
            }
            if let Some(x) = seed {
                search.seed = x;
            }
            if let Some(x) = starts {
                search.starts = x;
            }
            if let Some(x) = tol {
                search.tol_value = x;
            }
            if let Some(x) = tol_coordinate {
                search.tol_coordinate = x;
            }
            if let Some(x) = max_cycles {
                search.max_cycles = x;
            }
            let class_name = match class {
                EqClassArg::General => "general",
                EqClassArg::Depth => "depth_first",
            };
            let constraint = match &r {
                Some(text) => Some(parse_r(text)?),
                None => None,
            };
            let cfg_echo = serde_json::json!({
                "tree": tree, "class": class_name, "r": constraint,
                "starts": search.starts, "seed": search.seed,
                "tol_value": search.tol_value, "tol_coordinate": search.tol_coordinate,
                "max_cycles": search.max_cycles, "out": out,
            });
            let envelope = Envelope::new("equilibrium", cfg_echo, search.seed);
            let tree = load_tree(&tree)?;
            let eq_class = match class {
                EqClassArg::General => EquilibriumClass::General,
                EqClassArg::Depth => EquilibriumClass::DepthFirst,
            };
            let problem = EquilibriumProblem::new(tree, eq_class, constraint, search)?;
            let report = if constraint.is_some() {
                search_constrained(&problem)?
            } else {
                search_unconstrained(&problem)?
            };
            if let Some(path) = &out {
                let mut csv = String::from("start,cycle,value\n");
                for start in &report.starts {
                    for (cycle, value) in start.trajectory.iter().enumerate() {
                        csv.push_str(&format!("{},{},{}\n", start.index, cycle, value));
                    }
                }
                fs::write(path, csv)
                    .map_err(|e| Error::Internal(format!("cannot write {path}: {e}")))?;
            }
            let summary = format!(
                "value {:.12}; iid deviation {:.3e}; root probability {:.12}; converged {}",
                report.value, report.iid_deviation, report.root_probability, report.converged
            );
            let result = serde_json::to_value(&report).expect("report serializes");
            envelope.emit(result, cli.human, summary);
            Ok(ExitCode::SUCCESS)
        }

        Command::Catalog {
            emit,
            tree,
            dist,
            eps,
            out,
        } => {
            let config = serde_json::json!({
                "emit": emit, "tree": tree, "dist": dist, "eps": eps, "out": out,
            });
            let envelope = Envelope::new("catalog", config, 0);
            match emit {
                None => {
                    let entries: Vec<serde_json::Value> = CrossingId::all()
                        .into_iter()
                        .map(|id| {
                            let skeleton: Vec<String> = id
                                .skeleton()
                                .iter()
                                .map(|&l| format!("{}{}", l / 2, l % 2))
                                .collect();
                            serde_json::json!({
                                "key": id.key(),
                                "display": id.to_string(),
                                "skeleton": skeleton,
                            })
                        })
                        .collect();
                    let mut summary = String::from("named strategies:\n");
                    summary.push_str(
                        "  solve (any tree), solve-swapped (binary root), deferring (uniform:OR:2:3)\n",
                    );
                    for e in &entries {
                        summary.push_str(&format!("  {}\n", e["display"].as_str().unwrap()));
                    }
                    let result = serde_json::json!({
                        "named": ["solve", "solve-swapped", "deferring"],
                        "crossings": entries,
                    });
                    envelope.emit(result, cli.human, summary.trim_end().to_string());
                    Ok(ExitCode::SUCCESS)
                }
                Some(key) => {
                    let tree_spec = tree.ok_or_else(|| Error::Parse {
                        pos: 0,
                        msg: "--emit needs --tree".into(),
                    })?;
                    let tree = load_tree(&tree_spec)?;
                    let strategy = match key.as_str() {
                        "solve" => make_solve(&tree),
                        "solve-swapped" => catalog::swapped_solve(&tree)?,
                        "deferring" => {
                            let d = default_distribution(&tree, &dist, &eps)?;
                            catalog::deferring_strategy(&d)?
                        }
                        other => {
                            let id = CrossingId::from_key(other)?;
                            let d = default_distribution(&tree, &dist, &eps)?;
                            catalog::crossing_strategy(id, &d)?
                        }
                    };
                    let json = strategy.to_canonical_json(&tree);
                    if let Some(path) = &out {
                        fs::write(path, &json)
                            .map_err(|e| Error::Internal(format!("cannot write {path}: {e}")))?;
                    }
                    let result: serde_json::Value =
                        serde_json::from_str(&json).expect("canonical JSON");
                    let summary = format!("emitted {key} ({} bytes)", json.len());
                    envelope.emit(result, cli.human, summary);
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    }
}

/// Distribution for catalog emission: the given one, or exact IID 1/2
/// (which makes continuation tie-breaks lexicographic).
fn default_distribution(
    tree: &Arc<Tree>,
    dist: &Option<String>,
    eps: &Option<String>,
) -> Result<IndependentDistribution, Error> {
    if dist.is_none() && eps.is_none() {
        return IndependentDistribution::iid(tree.clone(), Prob::parse("1/2")?);
    }
    load_distribution(tree, dist, eps, None)
}
