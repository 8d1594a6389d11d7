//! Seeded experiment sweeps and certificate files.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::absorbing::{is_st_absorber, verify_absorber, verify_structure, Absorber, AbsorbingStructure};
use crate::exact::{verify_factor, verify_tiling, Tiling};
use crate::generate;
use crate::graph::{Graph, GraphError, Pattern, VertexSet};
use crate::hypotheses::Status;
use crate::invariants::verify_alpha_star_witness;
use crate::pipeline::{find_factor_absorbing, Mode, Path, PipelineConfig, PipelineError, PipelineReport};
use crate::seed;

pub const SWEEP_SCHEMA: &str = "tilinglab.sweep/v1";
pub const TILING_SCHEMA: &str = "tilinglab.tiling/v1";
pub const ABSORBER_SCHEMA: &str = "tilinglab.absorber/v1";
pub const WITNESS_SCHEMA: &str = "tilinglab.alpha-star-witness/v1";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    /// A certificate that parsed but failed verification.
    #[error("invalid certificate: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Gnp,
    Complete,
    TwoCliques,
    HsTripartite,
    Gamma,
    LowerBound,
}

/// Parameters a generator may consume; unused fields are ignored.
#[derive(Clone, Copy, Debug, Default)]
pub struct GenParams {
    pub n: usize,
    pub p: Option<f64>,
    pub r: Option<usize>,
    pub ell: Option<usize>,
}

impl Generator {
    pub fn uses_p(self) -> bool {
        self == Generator::Gnp
    }

    pub fn build(self, params: GenParams, seed: u64) -> Result<Graph, HarnessError> {
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| HarnessError::Spec(format!("{self:?} needs {name}")));
        let n = params.n;
        Ok(match self {
            Generator::Gnp => {
                let p = params.p.ok_or_else(|| HarnessError::Spec("gnp needs p".into()))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(HarnessError::Spec(format!("p = {p} outside [0, 1]")));
                }
                generate::gnp(n, p, seed)
            }
            Generator::Complete => Graph::complete(n),
            Generator::TwoCliques => generate::two_cliques(n)?,
            Generator::HsTripartite => generate::complete_multipartite(&generate::hs_tripartite_sizes(n)?)?,
            Generator::Gamma => generate::gamma(need(params.ell, "ell")?, n, seed)?.graph,
            Generator::LowerBound => {
                generate::lower_bound_construction(need(params.r, "r")?, need(params.ell, "ell")?, n, seed)?.graph
            }
        })
    }
}

fn default_eps() -> f64 {
    0.1
}

/// A parameter grid with a fixed number of seeded trials per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub generator: Generator,
    pub n: Vec<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub ell: Option<usize>,
    /// `K<r>` or an edge-list document.
    pub pattern: String,
    pub mode: Mode,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    #[serde(default = "default_eps")]
    pub epsilon_prime: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default)]
    pub budget_nodes: Option<u64>,
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema: String,
    pub cell: usize,
    pub generator: Generator,
    pub n: usize,
    pub p: Option<f64>,
    pub pattern: String,
    pub mode: String,
    pub trial: usize,
    pub seed: u64,
    pub hypothesis: String,
    pub absorbing_set: String,
    pub a_size: Option<usize>,
    pub cover_leftover: Option<usize>,
    pub absorbed: bool,
    pub path: String,
    pub factor_found: bool,
    pub factor_exists: Option<bool>,
    pub leftover: usize,
    pub nodes: u64,
    pub millis: u64,
}

impl ExperimentSpec {
    /// Cells in `n`-major order; `p` varies fastest.
    pub fn cells(&self) -> Vec<Cell> {
        let ps: Vec<Option<f64>> =
            if self.generator.uses_p() { self.p.iter().copied().map(Some).collect() } else { vec![None] };
        let mut out = Vec::new();
        for &n in &self.n {
            for &p in &ps {
                out.push(Cell { index: out.len(), n, p });
            }
        }
        out
    }

    fn validate(&self) -> Result<Pattern, HarnessError> {
        if self.n.is_empty() || self.trials == 0 {
            return Err(HarnessError::Spec("grid needs at least one n and one trial".into()));
        }
        if self.generator.uses_p() && self.p.is_empty() {
            return Err(HarnessError::Spec("gnp grid needs at least one p".into()));
        }
        Ok(Pattern::parse_spec(&self.pattern)?)
    }

    fn pipeline_config(&self, pattern: &Pattern) -> Result<PipelineConfig, HarnessError> {
        let mut c = PipelineConfig::desk(pattern, self.mode)?;
        c.epsilon = self.epsilon;
        c.epsilon_prime = self.epsilon_prime;
        c.timing = self.timing;
        if let Some(b) = self.budget_nodes {
            c.exact_budget = b;
        }
        Ok(c)
    }
}

fn status_label(s: Option<Status>) -> String {
    match s {
        Some(Status::Held) => "held",
        Some(Status::Violated) => "violated",
        Some(Status::Unverified) => "unverified",
        None => "",
    }
    .into()
}

fn path_label(p: Path) -> String {
    serde_json::to_value(p).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn sweep_row(spec: &ExperimentSpec, cell: Cell, trial: usize, seed: u64, rep: &PipelineReport) -> SweepRow {
    let absorbing_set = rep
        .stages
        .iter()
        .find(|s| s.stage == "absorbing-set")
        .map_or("skipped", |s| if s.ok { "ok" } else { "failed" })
        .to_string();
    SweepRow {
        schema: SWEEP_SCHEMA.into(),
        cell: cell.index,
        generator: spec.generator,
        n: cell.n,
        p: cell.p,
        pattern: rep.pattern.clone(),
        mode: rep.mode.label(),
        trial,
        seed,
        hypothesis: status_label(rep.hypothesis_status),
        absorbing_set,
        a_size: rep.absorbing_set.as_ref().map(VertexSet::len),
        cover_leftover: rep.cover_leftover,
        absorbed: rep.absorbed,
        path: path_label(rep.path),
        factor_found: rep.factor_found(),
        factor_exists: rep.factor_exists,
        leftover: if rep.factor_found() { 0 } else { rep.cover_leftover.unwrap_or(rep.n) },
        nodes: rep.nodes,
        millis: rep.millis,
    }
}

/// Runs every `(cell, trial)` on a pool of `threads` workers (0 picks the
/// default); rows come back in cell-then-trial order.
pub fn run_sweep(spec: &ExperimentSpec, threads: usize) -> Result<Vec<SweepRow>, HarnessError> {
    let pattern = spec.validate()?;
    let config = spec.pipeline_config(&pattern)?;
    let jobs: Vec<(Cell, usize)> =
        spec.cells().into_iter().flat_map(|c| (0..spec.trials).map(move |t| (c, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Spec(format!("thread pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, trial)| {
                let seed = seed::trial_seed(spec.seed_base, cell.index as u64, trial as u64);
                let params = GenParams {
                    n: cell.n,
                    p: cell.p,
                    r: spec.r.or(match spec.mode {
                        Mode::Clique { r, .. } => Some(r),
                        Mode::General => None,
                    }),
                    ell: spec.ell.or(match spec.mode {
                        Mode::Clique { ell, .. } => Some(ell),
                        Mode::General => None,
                    }),
                };
                let g = spec.generator.build(params, seed::derive(seed, "graph", 0))?;
                let rep = find_factor_absorbing(&g, &pattern, &config, seed::derive(seed, "pipeline", 0))?;
                Ok(sweep_row(spec, cell, trial, seed, &rep))
            })
            .collect()
    })
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(SWEEP_COLUMNS)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const SWEEP_COLUMNS: [&str; 20] = [
    "schema",
    "cell",
    "generator",
    "n",
    "p",
    "pattern",
    "mode",
    "trial",
    "seed",
    "hypothesis",
    "absorbing_set",
    "a_size",
    "cover_leftover",
    "absorbed",
    "path",
    "factor_found",
    "factor_exists",
    "leftover",
    "nodes",
    "millis",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingCertificate {
    pub schema: String,
    /// Edge-list text of the pattern.
    pub pattern: String,
    /// True when the tiling claims to cover every vertex.
    pub factor: bool,
    pub tiling: Tiling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorberCertificate {
    pub schema: String,
    pub pattern: String,
    pub absorber: Absorber,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub schema: String,
    pub pattern: String,
    pub s: usize,
    pub witness: Vec<VertexSet>,
}

impl TilingCertificate {
    pub fn new(pattern: &Pattern, tiling: Tiling, factor: bool) -> Self {
        TilingCertificate { schema: TILING_SCHEMA.into(), pattern: pattern.graph().to_edge_list(), factor, tiling }
    }
}

impl AbsorberCertificate {
    pub fn new(pattern: &Pattern, absorber: Absorber) -> Self {
        AbsorberCertificate { schema: ABSORBER_SCHEMA.into(), pattern: pattern.graph().to_edge_list(), absorber }
    }
}

fn pattern_from(text: &str) -> Result<Pattern, HarnessError> {
    Ok(Pattern::general(Graph::parse(text)?)?)
}

fn invalid(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Invalid(e.to_string())
}

/// Checks any serialized certificate against `g`, dispatching on its schema
/// tag. A bare list of vertex lists is a tiling of `pattern`. Returns a
/// one-line summary.
pub fn verify_certificate(g: &Graph, text: &str, pattern: Option<&Pattern>) -> Result<String, HarnessError> {
    let value: Value = serde_json::from_str(text)?;
    if value.is_array() {
        let p = pattern.ok_or_else(|| HarnessError::Spec("a bare tiling needs a pattern".into()))?;
        let tiling: Tiling = serde_json::from_value(value)?;
        verify_tiling(g, p, &tiling).map_err(invalid)?;
        let kind = if tiling.covered_count() == g.n() { "factor" } else { "tiling" };
        return Ok(format!("valid {}-{kind} with {} copies", p.name(), tiling.len()));
    }
    let schema = value.get("schema").and_then(Value::as_str).unwrap_or_default().to_string();
    match schema.as_str() {
        TILING_SCHEMA => {
            let c: TilingCertificate = serde_json::from_value(value)?;
            let p = pattern_from(&c.pattern)?;
            if c.factor {
                verify_factor(g, &p, &c.tiling, &VertexSet::all(g.n())).map_err(invalid)?;
                Ok(format!("valid {}-factor with {} copies", p.name(), c.tiling.len()))
            } else {
                verify_tiling(g, &p, &c.tiling).map_err(invalid)?;
                Ok(format!("valid {}-tiling with {} copies", p.name(), c.tiling.len()))
            }
        }
        ABSORBER_SCHEMA => {
            let c: AbsorberCertificate = serde_json::from_value(value)?;
            let p = pattern_from(&c.pattern)?;
            let a = &c.absorber;
            verify_absorber(g, &p, a).map_err(invalid)?;
            if !is_st_absorber(g, &p, &a.s, &a.set, a.t, crate::exact::DEFAULT_FACTOR_BUDGET).map_err(invalid)? {
                return Err(HarnessError::Invalid("exact solver rejects the absorber".into()));
            }
            Ok(format!("valid ({:?}, {})-absorber on {} vertices", a.s, a.t, a.set.len()))
        }
        crate::absorbing::STRUCTURE_SCHEMA => {
            let st: AbsorbingStructure = serde_json::from_value(value)?;
            verify_structure(g, &st).map_err(invalid)?;
            Ok(format!(
                "valid absorbing structure: |A| = {}, m = {}, {} template edges",
                st.a.len(),
                st.m(),
                st.template.edges.len()
            ))
        }
        WITNESS_SCHEMA => {
            let c: WitnessCertificate = serde_json::from_value(value)?;
            let p = pattern_from(&c.pattern)?;
            verify_alpha_star_witness(g, &p, c.s, &c.witness).map_err(HarnessError::Invalid)?;
            Ok(format!("valid witness: alpha*_H > {}", c.s))
        }
        crate::pipeline::REPORT_SCHEMA => {
            let rep: PipelineReport = serde_json::from_value(value)?;
            if rep.n != g.n() {
                return Err(HarnessError::Invalid(format!("report is for n = {}, graph has {}", rep.n, g.n())));
            }
            match &rep.tiling {
                Some(t) => {
                    let p = pattern_from(&rep.pattern_edges)?;
                    verify_factor(g, &p, t, &VertexSet::all(g.n())).map_err(invalid)?;
                    Ok(format!("valid {}-factor with {} copies", p.name(), t.len()))
                }
                None => Ok("report claims no factor; nothing to verify".into()),
            }
        }
        other => Err(HarnessError::Invalid(format!("unknown schema {other:?}"))),
    }
}
