use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use serde_json::json;

use tilinglab::absorbing::{
    absorb, build_absorbing_set, valid_remainder_sizes, AbsorberConfig, CliqueAbsorbers, FamilyBuilder,
    GeneralAbsorbers,
};
use tilinglab::exact::{find_factor_exact, FactorOutcome, DEFAULT_FACTOR_BUDGET};
use tilinglab::generate;
use tilinglab::harness::{
    run_sweep, verify_certificate, write_csv, ExperimentSpec, GenParams, Generator, HarnessError, TilingCertificate,
    WitnessCertificate, WITNESS_SCHEMA,
};
use tilinglab::invariants::{param_report, AlphaStarMode, AlphaStarResult, ParamRequest, DEFAULT_ALPHA_BUDGET};
use tilinglab::pipeline::{desk_beta, find_factor_absorbing, Mode, PipelineConfig, CSV_HEADER};
use tilinglab::{seed, Graph, Pattern, VertexSet};

#[derive(Parser)]
#[command(name = "tilinglab", version, about = "H-factor search, absorbers and tiling experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, env = "TILINGLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Record wall-clock milliseconds (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Edgelist,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    General,
    Clique,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Exact,
    Pipeline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StarMode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph.
    Gen {
        #[arg(long, visible_alias = "construction", value_enum)]
        generator: Generator,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Graph parameters as JSON.
    Params {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "ell", default_values_t = [2])]
        ells: Vec<usize>,
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long, value_enum, default_value = "sampled")]
        alpha_star: StarMode,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Write a failure witness for the largest refuted s.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Find an H-factor.
    Factor {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_enum, default_value = "pipeline")]
        solver: Solver,
        /// Emit the one-line CSV summary (same as --format csv).
        #[arg(long)]
        csv: bool,
    },
    /// Build an absorbing structure and run absorption trials.
    Absorb {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
        #[arg(long, default_value_t = 0.06)]
        q: f64,
        /// Defaults to 3h - 4.
        #[arg(long)]
        beta: Option<f64>,
        /// Use the unscaled constants instead of the desk overrides.
        #[arg(long)]
        paper_constants: bool,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Structure JSON output path.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Check a serialized certificate against a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        /// Pattern for bare tiling files (`K<r>` or an edge-list path).
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Run a seeded parameter sweep and write CSV.
    Sweep {
        /// JSON experiment spec; the flags below are ignored when given.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "gnp")]
        generator: Generator,
        #[arg(long, value_delimiter = ',', default_values_t = [30, 60])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.7])]
        p: Vec<f64>,
        #[arg(long, default_value = "K3")]
        pattern: String,
        #[arg(long, value_enum, default_value = "clique")]
        mode: ModeArg,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon_prime: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Args)]
struct Problem {
    #[arg(long)]
    graph: PathBuf,
    /// `K<r>` or a path to an edge-list file.
    #[arg(long, default_value = "K3")]
    pattern: String,
    #[arg(long, value_enum, default_value = "clique")]
    mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon_prime: f64,
}

/// Exit 2: bad input. Exit 1: a check or solver failed.
enum Failure {
    Usage(anyhow::Error),
    Failed(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn failed(msg: impl Into<String>) -> Failure {
    Failure::Failed(anyhow::anyhow!(msg.into()))
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_pattern(spec: &str) -> anyhow::Result<Pattern> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(Pattern::general(read_graph(path)?)?);
    }
    Pattern::parse_spec(spec).with_context(|| format!("pattern {spec:?}"))
}

fn mode_for(arg: ModeArg, pattern: &Pattern, ell: usize) -> Mode {
    match arg {
        ModeArg::General => Mode::General,
        ModeArg::Clique => Mode::Clique { r: pattern.h(), ell },
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_gen(c: &Common, generator: Generator, params: GenParams) -> Result<(), Failure> {
    let g = generator.build(params, c.seed)?;
    let text = match c.format.unwrap_or(Format::Edgelist) {
        Format::Edgelist => g.to_edge_list(),
        Format::Json => {
            let mut doc = json!({
                "schema": "tilinglab.graph/v1",
                "generator": generator,
                "n": g.n(),
                "seed": c.seed,
                "edges": g.edges().collect::<Vec<_>>(),
            });
            if generator == Generator::LowerBound {
                let lb = generate::lower_bound_construction(
                    params.r.unwrap_or_default(),
                    params.ell.unwrap_or_default(),
                    params.n,
                    c.seed,
                )?;
                doc["part_sizes"] = json!(lb.part_sizes);
            }
            pretty(&doc)
        }
        Format::Csv => return Err(anyhow::anyhow!("gen writes edgelist or json").into()),
    };
    emit(&c.out, &text)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_params(
    c: &Common,
    graph: &Path,
    ells: Vec<usize>,
    pattern: Option<String>,
    star: StarMode,
    trials: usize,
    witness_out: Option<PathBuf>,
) -> Result<(), Failure> {
    let g = read_graph(graph)?;
    let pattern = pattern.as_deref().map(read_pattern).transpose()?;
    let mode = match star {
        StarMode::Exhaustive => {
            AlphaStarMode::Exhaustive { cap: c.budget_nodes.unwrap_or(tilinglab::invariants::DEFAULT_FAMILY_CAP) }
        }
        StarMode::Sampled => AlphaStarMode::Sampled { trials, seed: c.seed },
    };
    let req = ParamRequest {
        ells,
        pattern: pattern.clone(),
        alpha_star: pattern.as_ref().map(|_| mode),
        alpha_budget: c.budget_nodes.unwrap_or(DEFAULT_ALPHA_BUDGET),
    };
    let report = param_report(&g, &req)?;
    if let (Some(path), Some(p), Some(est)) = (witness_out, &pattern, &report.alpha_star) {
        let refuted = est.verdicts.iter().rev().find_map(|v| match &v.result {
            AlphaStarResult::Fails { witness } => Some((v.s, witness.clone())),
            AlphaStarResult::Holds => None,
        });
        if let Some((s, witness)) = refuted {
            let cert =
                WitnessCertificate { schema: WITNESS_SCHEMA.into(), pattern: p.graph().to_edge_list(), s, witness };
            fs::write(&path, pretty(&cert)).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    emit(&c.out, &serde_json::to_string_pretty(&report.to_json()).expect("json"))?;
    Ok(())
}

fn pipeline_config(c: &Common, p: &Problem, pattern: &Pattern) -> anyhow::Result<PipelineConfig> {
    let mut config = PipelineConfig::desk(pattern, mode_for(p.mode, pattern, p.ell))?;
    config.epsilon = p.epsilon;
    config.epsilon_prime = p.epsilon_prime;
    config.timing = c.timing;
    if let Some(b) = c.budget_nodes {
        config.exact_budget = b;
    }
    Ok(config)
}

fn cmd_factor(c: &Common, p: &Problem, solver: Solver, csv: bool) -> Result<(), Failure> {
    let g = read_graph(&p.graph)?;
    let pattern = read_pattern(&p.pattern)?;
    match solver {
        Solver::Exact => {
            let search = find_factor_exact(&g, &pattern, c.budget_nodes.unwrap_or(DEFAULT_FACTOR_BUDGET));
            let nodes = search.nodes;
            match search.outcome {
                FactorOutcome::Factor { tiling } => {
                    emit(&c.out, &pretty(&TilingCertificate::new(&pattern, tiling, true)))?;
                    Ok(())
                }
                FactorOutcome::NoFactor => {
                    emit(
                        &c.out,
                        &pretty(&json!({"schema": "tilinglab.exact/v1", "outcome": "no_factor", "nodes": nodes})),
                    )?;
                    Ok(())
                }
                FactorOutcome::BudgetExhausted => Err(failed(format!("budget exhausted after {nodes} nodes"))),
            }
        }
        Solver::Pipeline => {
            let config = pipeline_config(c, p, &pattern)?;
            let report = find_factor_absorbing(&g, &pattern, &config, c.seed).map_err(|e| Failure::Failed(e.into()))?;
            let text = if csv || c.format == Some(Format::Csv) {
                format!("{CSV_HEADER}\n{}\n", report.csv_row())
            } else {
                report.to_json()
            };
            emit(&c.out, &text)?;
            if report.factor_found() || report.factor_exists == Some(false) {
                Ok(())
            } else {
                Err(failed("pipeline found no factor and could not rule one out"))
            }
        }
    }
}

struct AbsorbArgs {
    gamma: f64,
    q: f64,
    beta: Option<f64>,
    paper_constants: bool,
    trials: usize,
    structure: Option<PathBuf>,
}

fn cmd_absorb(c: &Common, p: &Problem, a: AbsorbArgs) -> Result<(), Failure> {
    let g = read_graph(&p.graph)?;
    let pattern = read_pattern(&p.pattern)?;
    let h = pattern.h();
    let builder = match mode_for(p.mode, &pattern, p.ell) {
        Mode::General => FamilyBuilder::General(GeneralAbsorbers::new(pattern.clone(), p.epsilon)),
        Mode::Clique { r, ell } => {
            if !pattern.is_clique() {
                return Err(anyhow::anyhow!("clique mode needs a clique pattern").into());
            }
            FamilyBuilder::Clique(CliqueAbsorbers::new(r, ell)?)
        }
    };
    let mut config = if a.paper_constants {
        AbsorberConfig::paper(h, builder.t(), a.gamma)?
    } else {
        AbsorberConfig::desk(h, builder.t(), a.gamma, a.q, a.beta.unwrap_or(desk_beta(h)))?
    };
    if let Some(b) = c.budget_nodes {
        config.factor_budget = b;
        config.absorb_budget = b;
    }
    let st = build_absorbing_set(&g, &builder, &config, c.seed).map_err(|e| Failure::Failed(e.into()))?;
    if let Some(path) = &a.structure {
        fs::write(path, st.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    let sizes = valid_remainder_sizes(&st);
    let outside: Vec<usize> = (0..g.n()).filter(|&v| !st.a.contains(v)).collect();
    let mut rng = seed::rng(seed::derive(c.seed, "absorb-trials", 0));
    let mut passed = 0;
    let mut failures = Vec::new();
    for trial in 0..a.trials {
        let size = *sizes.choose(&mut rng).expect("the empty remainder or a multiple of h fits");
        let r = VertexSet::collect_from(outside.choose_multiple(&mut rng, size).copied());
        match absorb(&g, &pattern, &st, &r) {
            Ok(_) => passed += 1,
            Err(e) => failures.push(json!({"trial": trial, "remainder": r, "error": e.to_string()})),
        }
    }
    let summary = json!({
        "schema": "tilinglab.absorb-trials/v1",
        "structure": a.structure.as_ref().map(|p| p.display().to_string()),
        "a": st.a.len(),
        "m": st.m(),
        "template_edges": st.template.edges.len(),
        "paper_constants": st.ledger.paper_constants,
        "within_gamma_n": st.ledger.within_gamma_n,
        "remainder_sizes": sizes,
        "trials": a.trials,
        "passed": passed,
        "failures": failures,
    });
    emit(&c.out, &pretty(&summary))?;
    if passed == a.trials {
        Ok(())
    } else {
        Err(failed(format!("{} of {} absorption trials failed", a.trials - passed, a.trials)))
    }
}

fn cmd_verify(c: &Common, graph: &Path, certificate: &Path, pattern: Option<String>) -> Result<(), Failure> {
    let g = read_graph(graph)?;
    let pattern = pattern.as_deref().map(read_pattern).transpose()?;
    let text = fs::read_to_string(certificate).with_context(|| format!("reading {}", certificate.display()))?;
    match verify_certificate(&g, &text, pattern.as_ref()) {
        Ok(summary) => {
            emit(&c.out, &summary)?;
            Ok(())
        }
        Err(e @ HarnessError::Invalid(_)) => Err(Failure::Failed(e.into())),
        Err(e) => Err(e.into()),
    }
}

fn cmd_sweep(c: &Common, spec: ExperimentSpec) -> Result<(), Failure> {
    let rows = run_sweep(&spec, c.threads)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    emit(&c.out, &String::from_utf8(buf).expect("utf-8 CSV"))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    match cli.cmd {
        Cmd::Gen { generator, n, p, r, ell } => cmd_gen(c, generator, GenParams { n, p, r, ell }),
        Cmd::Params { graph, ells, pattern, alpha_star, trials, witness_out } => {
            cmd_params(c, &graph, ells, pattern, alpha_star, trials, witness_out)
        }
        Cmd::Factor { problem, solver, csv } => cmd_factor(c, &problem, solver, csv),
        Cmd::Absorb { problem, gamma, q, beta, paper_constants, trials, structure } => {
            cmd_absorb(c, &problem, AbsorbArgs { gamma, q, beta, paper_constants, trials, structure })
        }
        Cmd::Verify { graph, certificate, pattern } => cmd_verify(c, &graph, &certificate, pattern),
        Cmd::Sweep { spec, generator, n, p, pattern, mode, ell, r, epsilon, epsilon_prime, trials } => {
            let spec = match spec {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let mut s: ExperimentSpec = serde_json::from_str(&text)?;
                    s.timing |= c.timing;
                    s
                }
                None => {
                    let pat = read_pattern(&pattern)?;
                    ExperimentSpec {
                        generator,
                        n,
                        p,
                        r,
                        ell: Some(ell),
                        pattern,
                        mode: mode_for(mode, &pat, ell),
                        epsilon,
                        epsilon_prime,
                        trials,
                        seed_base: c.seed,
                        budget_nodes: c.budget_nodes,
                        timing: c.timing,
                    }
                }
            };
            cmd_sweep(c, spec)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(e)) => {
            eprintln!("failed: {e:#}");
            ExitCode::from(1)
        }
    }
}
