//! Subcommand implementations. Each returns a [`RunReport`]; the binary
//! prints it to stdout and maps errors to the fixed exit-code table.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use submod::analysis::{check_monotone, check_submodular, shapley_exact, shapley_sampled, CheckMode};
use submod::info::q_cluster;
use submod::maximize::{greedy_cardinality, CardinalityConstraint, GreedyOptions};
use submod::minimize::{min_norm_point, queyranne_minimize};
use submod::norms::{check_norm_axioms, norm_eval, NormHandle};
use submod::zoo::{self, io};
use submod::{derive_transform, SetFunctionHandle, Subset, Transform};

use crate::dataset::{ingest, DataFormat, DatasetTable};
use crate::kernel::{build_kernel, KernelSpec};
use crate::report::RunReport;
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "submod",
    version,
    about = "Batch submodular optimization: summarization, clustering, minimization, and function analysis",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a diverse subset by greedy submodular maximization.
    Summarize(SummarizeArgs),
    /// Recursive bisection clustering via symmetric minimization.
    Cluster(ClusterArgs),
    /// Unconstrained (or symmetric proper-subset) minimization.
    Minimize(MinimizeArgs),
    /// Verify submodularity and monotonicity claims.
    Check(CheckArgs),
    /// Exact or sampled Shapley values.
    Shapley(ShapleyArgs),
    /// Evaluate the submodular norm of a vector.
    Norm(NormArgs),
    /// Uncertainty + diversity batch selection for labeling.
    ActiveBatch(ActiveBatchArgs),
}

/// How to obtain the set function. `facility-location` and `graph-cut`
/// build from `--data` + `--kernel`; `file:<path>` loads a JSON layered
/// spec or a dense CSV matrix; `config` reads the spec from `--config`.
#[derive(Debug, Args)]
pub struct FunctionArgs {
    #[arg(long)]
    pub function: String,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Dataset format: csv or json.
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Column holding row identifiers.
    #[arg(long)]
    pub id_column: Option<String>,
    /// rbf:<bandwidth>, cosine, dot, or precomputed:<path>.
    #[arg(long)]
    pub kernel: Option<String>,
    /// JSON config that may carry a function spec under "function".
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Redundancy weight for graph-cut objectives.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Saturation fraction for graph-cut objectives.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Role of a dense CSV matrix: graph-cut, similarity, or log-det.
    #[arg(long)]
    pub matrix_kind: Option<String>,
}

pub struct ResolvedFunction {
    pub handle: SetFunctionHandle,
    pub ids: Vec<String>,
    pub config_echo: serde_json::Value,
}

impl FunctionArgs {
    fn load_table(&self) -> CliResult<DatasetTable> {
        let path = self
            .data
            .as_ref()
            .ok_or_else(|| CliError::Usage("this function source requires --data".into()))?;
        let format: DataFormat = self.format.parse()?;
        ingest(path, format, self.id_column.as_deref())
    }

    fn kernel_spec(&self) -> CliResult<KernelSpec> {
        self.kernel
            .as_deref()
            .ok_or_else(|| CliError::Usage("this function source requires --kernel".into()))?
            .parse()
    }

    /// Resolve to a handle; `default_matrix_kind` decides how a bare CSV
    /// matrix is interpreted for the calling subcommand.
    pub fn resolve(&self, default_matrix_kind: &str) -> CliResult<ResolvedFunction> {
        let echo_base = json!({
            "function": self.function,
            "data": self.data.as_ref().map(|p| p.display().to_string()),
            "kernel": self.kernel,
            "id_column": self.id_column,
            "lambda": self.lambda,
            "alpha": self.alpha,
        });
        match self.function.as_str() {
            "facility-location" => {
                let table = self.load_table()?;
                let sim = build_kernel(&table, &self.kernel_spec()?)?;
                let handle = zoo::build_facility_location(sim).map_err(CliError::from)?;
                Ok(ResolvedFunction {
                    handle,
                    ids: table.ids,
                    config_echo: echo_base,
                })
            }
            "graph-cut" => {
                let table = self.load_table()?;
                let sim = build_kernel(&table, &self.kernel_spec()?)?;
                let n = sim.size();
                let mut weights: Vec<Vec<f64>> =
                    (0..n).map(|i| (0..n).map(|j| sim.get(i, j)).collect()).collect();
                for (i, row) in weights.iter_mut().enumerate() {
                    row[i] = 0.0;
                }
                let spec = zoo::GraphCutSpec {
                    edge_weights: weights,
                    lambda: self.lambda.unwrap_or(1.0),
                    alpha: self.alpha.unwrap_or(1.0),
                };
                let handle = zoo::build_graph_cut(spec).map_err(CliError::from)?;
                Ok(ResolvedFunction {
                    handle,
                    ids: table.ids,
                    config_echo: echo_base,
                })
            }
            other if other.starts_with("file:") => {
                let path = PathBuf::from(&other[5..]);
                self.resolve_file(&path, default_matrix_kind, echo_base)
            }
            "config" => {
                let path = self.config.as_ref().ok_or_else(|| {
                    CliError::Usage("--function config requires --config <path>".into())
                })?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                let doc: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| CliError::Input(format!("config JSON: {e}")))?;
                let spec = doc.get("function").ok_or_else(|| {
                    CliError::Input("config JSON has no \"function\" member".into())
                })?;
                let layered: io::LayeredSpecFile = serde_json::from_value(spec.clone())
                    .map_err(|e| CliError::Input(format!("function spec: {e}")))?;
                let handle = build_layered(layered)?;
                let ids = index_ids(handle.size_n());
                Ok(ResolvedFunction {
                    handle,
                    ids,
                    config_echo: echo_base,
                })
            }
            other => Err(CliError::Usage(format!(
                "unknown function source {other:?}; expected facility-location, graph-cut, file:<path>, or config"
            ))),
        }
    }

    fn resolve_file(
        &self,
        path: &std::path::Path,
        default_matrix_kind: &str,
        echo: serde_json::Value,
    ) -> CliResult<ResolvedFunction> {
        let is_json = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false);
        let handle = if is_json {
            build_layered(io::load_layered_json(path).map_err(CliError::from)?)?
        } else {
            let kind = self
                .matrix_kind
                .clone()
                .unwrap_or_else(|| default_matrix_kind.to_string());
            match kind.as_str() {
                "graph-cut" => {
                    let mut spec = io::load_graph_cut_csv(path).map_err(CliError::from)?;
                    if let Some(l) = self.lambda {
                        spec.lambda = l;
                    }
                    if let Some(a) = self.alpha {
                        spec.alpha = a;
                    }
                    zoo::build_graph_cut(spec).map_err(CliError::from)?
                }
                "similarity" => {
                    let sim = io::load_similarity_csv(path).map_err(CliError::from)?;
                    zoo::build_facility_location(sim).map_err(CliError::from)?
                }
                "log-det" => {
                    let spec = io::load_log_det_csv(path).map_err(CliError::from)?;
                    zoo::build_log_det(spec).map_err(CliError::from)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown matrix kind {other:?}; expected graph-cut, similarity, or log-det"
                    )))
                }
            }
        };
        let ids = index_ids(handle.size_n());
        Ok(ResolvedFunction {
            handle,
            ids,
            config_echo: echo,
        })
    }
}

fn build_layered(spec: io::LayeredSpecFile) -> CliResult<SetFunctionHandle> {
    match spec {
        io::LayeredSpecFile::FeatureBased(s) => {
            zoo::build_feature_based(s).map_err(CliError::from)
        }
        io::LayeredSpecFile::Dsf(s) => zoo::build_dsf(s).map_err(CliError::from),
    }
}

fn index_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

// ─── summarize ───────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Summary size.
    #[arg(long)]
    pub k: usize,
    /// Lazy (priority-queue) greedy; identical output, fewer evaluations.
    #[arg(long)]
    pub lazy: bool,
    /// Condition the objective on already-selected ids (update
    /// summarization); picks come from the remaining elements.
    #[arg(long, value_delimiter = ',')]
    pub update_given: Vec<String>,
}

pub fn run_summarize(args: &SummarizeArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let resolved = args.function.resolve("similarity")?;
    let f = &resolved.handle;
    let n = f.size_n();
    let opts = GreedyOptions {
        lazy: args.lazy,
        ..Default::default()
    };

    let payload = if args.update_given.is_empty() {
        let result = greedy_cardinality(f, CardinalityConstraint { k: args.k }, &opts)
            .map_err(CliError::from)?;
        let ids: Vec<&str> = result.order.iter().map(|&v| resolved.ids[v].as_str()).collect();
        json!({
            "selected_ids": ids,
            "order": result.order,
            "gains": result.gains,
            "value": result.value,
            "certificate": result.certificate,
        })
    } else {
        let given = lookup_ids(&resolved.ids, &args.update_given)?;
        let b = Subset::from_indices(f.ground(), given.iter().copied()).map_err(CliError::from)?;
        let conditioned = derive_transform(f, Transform::Condition(b.clone()))
            .map_err(CliError::from)?;
        let rest = b.complement();
        let members = rest.indices();
        if args.k > members.len() {
            return Err(CliError::Toolkit(submod::SubmodError::Infeasible(format!(
                "k = {} picks requested but only {} elements remain outside the given set",
                args.k,
                members.len()
            ))));
        }
        let restricted = derive_transform(&conditioned, Transform::Restrict(rest))
            .map_err(CliError::from)?;
        let result = greedy_cardinality(&restricted, CardinalityConstraint { k: args.k }, &opts)
            .map_err(CliError::from)?;
        let order: Vec<usize> = result.order.iter().map(|&local| members[local]).collect();
        let ids: Vec<&str> = order.iter().map(|&v| resolved.ids[v].as_str()).collect();
        let given_ids: Vec<&str> = given.iter().map(|&v| resolved.ids[v].as_str()).collect();
        json!({
            "selected_ids": ids,
            "order": order,
            "gains": result.gains,
            "value": result.value,
            "certificate": result.certificate,
            "given": given_ids,
        })
    };

    let mut config = resolved.config_echo;
    config["k"] = json!(args.k);
    config["lazy"] = json!(args.lazy);
    config["update_given"] = json!(args.update_given);
    config["n"] = json!(n);
    Ok(RunReport::new(
        "summarize",
        config,
        None,
        payload,
        f.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

fn lookup_ids(ids: &[String], wanted: &[String]) -> CliResult<Vec<usize>> {
    wanted
        .iter()
        .map(|w| {
            ids.iter()
                .position(|id| id == w)
                .ok_or_else(|| CliError::Input(format!("unknown element id {w:?}")))
        })
        .collect()
}

// ─── cluster ─────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
}

pub fn run_cluster(args: &ClusterArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let resolved = args.function.resolve("similarity")?;
    let f = &resolved.handle;
    let tree = q_cluster(f, args.k).map_err(CliError::from)?;
    let leaves: Vec<Vec<&str>> = tree
        .leaves()
        .iter()
        .map(|s| s.iter().map(|v| resolved.ids[v].as_str()).collect())
        .collect();
    let splits: Vec<serde_json::Value> = (0..tree.len())
        .filter_map(|id| {
            let node = tree.node(id);
            node.split_value.map(|value| {
                json!({
                    "members": node.members.indices(),
                    "split_value": value,
                })
            })
        })
        .collect();
    let mut config = resolved.config_echo;
    config["k"] = json!(args.k);
    Ok(RunReport::new(
        "cluster",
        config,
        None,
        json!({ "leaves": leaves, "splits": splits }),
        f.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

// ─── minimize ────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Use Queyranne's proper-subset minimizer for a symmetric function.
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

pub fn run_minimize(args: &MinimizeArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let resolved = args.function.resolve("graph-cut")?;
    let f = &resolved.handle;
    let cert = if args.symmetric {
        queyranne_minimize(f).map_err(CliError::from)?
    } else {
        min_norm_point(f, args.tolerance).map_err(CliError::from)?
    };
    let min_ids: Vec<&str> = cert.min_set.iter().map(|&v| resolved.ids[v].as_str()).collect();
    let mut config = resolved.config_echo;
    config["symmetric"] = json!(args.symmetric);
    config["tolerance"] = json!(args.tolerance);
    Ok(RunReport::new(
        "minimize",
        config,
        None,
        json!({ "certificate": cert, "min_ids": min_ids }),
        f.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

// ─── check ───────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// exhaustive or sampled.
    #[arg(long, default_value = "exhaustive")]
    pub mode: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Required in sampled mode.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run_check(args: &CheckArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let resolved = args.function.resolve("graph-cut")?;
    let f = &resolved.handle;
    let mode = match args.mode.as_str() {
        "exhaustive" => CheckMode::Exhaustive,
        "sampled" => {
            let seed = args
                .seed
                .ok_or_else(|| CliError::Usage("sampled mode requires --seed".into()))?;
            CheckMode::Sampled {
                samples: args.samples,
                seed,
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown check mode {other:?}; expected exhaustive or sampled"
            )))
        }
    };
    let submodular = check_submodular(f, mode).map_err(CliError::from)?;
    let monotone = check_monotone(f, mode).map_err(CliError::from)?;
    let flags = f.flags();
    let mut config = resolved.config_echo;
    config["mode"] = json!(args.mode);
    config["samples"] = json!(args.samples);
    Ok(RunReport::new(
        "check",
        config,
        args.seed,
        json!({
            "submodular": submodular,
            "monotone": monotone,
            "claims": {
                "monotone": flags.claims_monotone,
                "normalized": flags.claims_normalized,
                "symmetric": flags.claims_symmetric,
                "nonneg": flags.claims_nonneg,
            },
        }),
        f.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

// ─── shapley ─────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct ShapleyArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// exact or sampled.
    #[arg(long, default_value = "exact")]
    pub mode: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Required in sampled mode.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run_shapley(args: &ShapleyArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let resolved = args.function.resolve("similarity")?;
    let f = &resolved.handle;
    let payload = match args.mode.as_str() {
        "exact" => {
            let values = shapley_exact(f).map_err(CliError::from)?;
            json!({ "ids": resolved.ids, "values": values })
        }
        "sampled" => {
            let seed = args
                .seed
                .ok_or_else(|| CliError::Usage("sampled mode requires --seed".into()))?;
            let sample = shapley_sampled(f, args.samples, seed).map_err(CliError::from)?;
            json!({
                "ids": resolved.ids,
                "values": sample.values,
                "std_err": sample.std_err,
                "samples": sample.samples,
            })
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown shapley mode {other:?}; expected exact or sampled"
            )))
        }
    };
    let mut config = resolved.config_echo;
    config["mode"] = json!(args.mode);
    config["samples"] = json!(args.samples);
    Ok(RunReport::new(
        "shapley",
        config,
        args.seed,
        payload,
        f.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

// ─── norm ────────────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Comma-separated coordinates, or file:<path> with one CSV row.
    #[arg(long)]
    pub vector: String,
    /// Also run seeded norm-axiom trials.
    #[arg(long)]
    pub check_axioms: bool,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Required with --check-axioms.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run_norm(args: &NormArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    let resolved = args.function.resolve("similarity")?;
    let handle = NormHandle::new(resolved.handle.clone()).map_err(CliError::from)?;
    let x = parse_vector(&args.vector, handle.size_n())?;
    let value = norm_eval(&handle, &x).map_err(CliError::from)?;
    let axioms = if args.check_axioms {
        let seed = args
            .seed
            .ok_or_else(|| CliError::Usage("--check-axioms requires --seed".into()))?;
        Some(check_norm_axioms(&handle, args.trials, seed).map_err(CliError::from)?)
    } else {
        None
    };
    let mut config = resolved.config_echo;
    config["vector"] = json!(args.vector);
    config["check_axioms"] = json!(args.check_axioms);
    config["trials"] = json!(args.trials);
    Ok(RunReport::new(
        "norm",
        config,
        args.seed,
        json!({ "norm": value, "axioms": axioms }),
        resolved.handle.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

fn parse_vector(spec: &str, n: usize) -> CliResult<Vec<f64>> {
    let text = if let Some(path) = spec.strip_prefix("file:") {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?
    } else {
        spec.to_string()
    };
    let x: Vec<f64> = text
        .split([',', '\n'])
        .map(|c| c.trim())
        .filter(|c| !c.is_empty())
        .map(|c| {
            c.parse::<f64>()
                .map_err(|e| CliError::Input(format!("vector entry {c:?}: {e}")))
        })
        .collect::<CliResult<_>>()?;
    if x.len() != n {
        return Err(CliError::Input(format!(
            "vector has {} coordinates, ground set has {n}",
            x.len()
        )));
    }
    Ok(x)
}

// ─── active-batch ────────────────────────────────────────────────────────

#[derive(Debug, Args)]
pub struct ActiveBatchArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Dataset column holding per-element uncertainty scores.
    #[arg(long)]
    pub scores: String,
    /// Batch size.
    #[arg(long)]
    pub k: usize,
    /// Weight of the diversity term against the score term.
    #[arg(long, default_value_t = 1.0)]
    pub diversity_weight: f64,
}

/// Greedily maximizes `m(A) + w f(A)`: modular uncertainty scores plus a
/// submodular diversity objective.
pub fn run_active_batch(args: &ActiveBatchArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    if args.diversity_weight < 0.0 {
        return Err(CliError::Usage("diversity weight must be non-negative".into()));
    }
    let table = args.function.load_table()?;
    let score_col = table.column_index(&args.scores)?;
    let scores = table.column_values(score_col);
    let resolved = args.function.resolve("similarity")?;
    let f = &resolved.handle;
    if f.size_n() != scores.len() {
        return Err(CliError::Input(format!(
            "diversity objective has {} elements, score column {}",
            f.size_n(),
            scores.len()
        )));
    }
    let uncertainty = zoo::build_modular(submod::ModularWeights::new(scores.clone(), 0.0))
        .map_err(CliError::from)?;
    let objective = derive_transform(
        f,
        Transform::Mixture(vec![
            (1.0, uncertainty),
            (args.diversity_weight, f.clone()),
        ]),
    )
    .map_err(CliError::from)?;
    let result = greedy_cardinality(
        &objective,
        CardinalityConstraint { k: args.k },
        &GreedyOptions::default(),
    )
    .map_err(CliError::from)?;
    let ids: Vec<&str> = result.order.iter().map(|&v| resolved.ids[v].as_str()).collect();
    let picked_scores: Vec<f64> = result.order.iter().map(|&v| scores[v]).collect();
    let mut config = resolved.config_echo;
    config["scores"] = json!(args.scores);
    config["k"] = json!(args.k);
    config["diversity_weight"] = json!(args.diversity_weight);
    Ok(RunReport::new(
        "active-batch",
        config,
        None,
        json!({
            "selected_ids": ids,
            "order": result.order,
            "gains": result.gains,
            "scores": picked_scores,
            "value": result.value,
            "certificate": result.certificate,
        }),
        objective.eval_count(),
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

/// Dispatch a parsed command.
pub fn run(cli: &Cli) -> CliResult<RunReport> {
    match &cli.command {
        Command::Summarize(args) => run_summarize(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Minimize(args) => run_minimize(args),
        Command::Check(args) => run_check(args),
        Command::Shapley(args) => run_shapley(args),
        Command::Norm(args) => run_norm(args),
        Command::ActiveBatch(args) => run_active_batch(args),
    }
}
