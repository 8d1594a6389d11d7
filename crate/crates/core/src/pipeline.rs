//! End-to-end factor finding: absorbing set, greedy cover, absorption, with
//! an exact fallback and verification of every emitted factor.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::absorbing::{
    absorb, absorb_capacity, build_absorbing_set, AbsorbError, AbsorberConfig, CliqueAbsorbers, FamilyBuilder,
    GeneralAbsorbers,
};
use crate::exact::{
    copies_through, find_copy, find_factor_exact, greedy_max_tiling, verify_factor, FactorOutcome, Tiling,
};
use crate::graph::{Graph, Pattern, VertexSet};
use crate::hypotheses::{check_clique, check_general, HypothesisCheck, Status};
use crate::invariants::{AlphaStarMode, InvariantError};
use crate::seed;

pub const REPORT_SCHEMA: &str = "tilinglab.pipeline/v1";
pub const CSV_HEADER: &str = "schema,n,h,mode,seed,hypothesis,absorbing_set,a_size,cover_leftover,leftover_bound,absorbed,path,factor_found,leftover,nodes,millis";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("pattern K_{r} does not match a pattern on {h} vertices")]
    ModeMismatch { r: usize, h: usize },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Absorb(#[from] AbsorbError),
    #[error("emitted tiling failed verification: {0}")]
    CertificateBug(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    General,
    Clique { r: usize, ell: usize },
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::General => "general".into(),
            Mode::Clique { r, ell } => format!("clique-{r}-{ell}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub absorber: AbsorberConfig,
    /// `|N_w|` override for the general builder.
    pub nbhd_size: Option<usize>,
    pub alpha_budget: u64,
    pub alpha_star: AlphaStarMode,
    /// The exact solver runs only when `n` is at most this.
    pub fallback_cap: usize,
    pub exact_budget: u64,
    pub local_improvement: bool,
    /// Greedy covers tried, each with its own seed, before the fallbacks.
    pub cover_attempts: usize,
    pub timing: bool,
}

/// `3h - 4`: the smallest `beta` at `m = 1` that leaves a nonempty admissible
/// remainder size for `h = 2, 3`.
pub fn desk_beta(h: usize) -> f64 {
    (3 * h).saturating_sub(4).max(1) as f64
}

impl PipelineConfig {
    /// Desk-scale defaults: `q = 0.06`, `beta = 3h - 4`, staircase templates.
    pub fn desk(pattern: &Pattern, mode: Mode) -> Result<Self, PipelineError> {
        let h = pattern.h();
        let t = match mode {
            Mode::General => h,
            Mode::Clique { r, .. } if r == h && pattern.is_clique() => r,
            Mode::Clique { r, .. } => return Err(PipelineError::ModeMismatch { r, h }),
        };
        let absorber = AbsorberConfig::desk(h, t, 0.2, 0.06, desk_beta(h))?;
        Ok(PipelineConfig {
            mode,
            epsilon: 0.1,
            epsilon_prime: 0.1,
            absorber,
            nbhd_size: None,
            alpha_budget: crate::invariants::DEFAULT_ALPHA_BUDGET,
            alpha_star: AlphaStarMode::Sampled { trials: 200, seed: 0 },
            fallback_cap: 30,
            exact_budget: crate::exact::DEFAULT_FACTOR_BUDGET,
            local_improvement: true,
            cover_attempts: 5,
            timing: false,
        })
    }

    fn builder(&self, pattern: &Pattern, check: Option<&HypothesisCheck>) -> Result<FamilyBuilder, PipelineError> {
        Ok(match self.mode {
            Mode::General => {
                let mut b = GeneralAbsorbers::new(pattern.clone(), self.epsilon);
                b.nbhd_size = self.nbhd_size;
                if let Some(c) = check {
                    b = b.with_hypotheses(c);
                }
                FamilyBuilder::General(b)
            }
            Mode::Clique { r, ell } => {
                let mut b = CliqueAbsorbers::new(r, ell)?;
                if let Some(c) = check {
                    b = b.with_hypotheses(c);
                }
                FamilyBuilder::Clique(b)
            }
        })
    }
}

/// Greedy cover of `G - A` with an optional local-improvement pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub tiling: Tiling,
    pub leftover: VertexSet,
    pub bound: f64,
    pub within_bound: bool,
    pub improvements: usize,
}

/// Two disjoint copies inside `within`, if any.
fn two_copies(g: &Graph, pattern: &Pattern, within: &FixedBitSet) -> Option<(Vec<usize>, Vec<usize>)> {
    for u in within.ones() {
        for c in copies_through(g, pattern, u, within) {
            let mut rest = within.clone();
            for &x in &c {
                rest.set(x, false);
            }
            if let Some(d) = find_copy(g, pattern, &rest) {
                return Some((c, d));
            }
        }
    }
    None
}

pub fn cover_check(g: &Graph, pattern: &Pattern, a: &VertexSet, xi: f64, improve: bool, seed: u64) -> CoverReport {
    let greedy = greedy_max_tiling(g, pattern, a, seed);
    let mut copies = greedy.tiling.into_copies();
    let mut left = greedy.leftover.to_bitset(g.n());
    let mut improvements = 0;
    // Break one tile T and re-tile T ∪ L with two copies.
    'outer: while improve && left.count_ones(..) >= pattern.h() {
        for i in 0..copies.len() {
            let mut w = left.clone();
            for &x in &copies[i] {
                w.insert(x);
            }
            if let Some((c, d)) = two_copies(g, pattern, &w) {
                for &x in c.iter().chain(&d) {
                    left.set(x, false);
                }
                for &x in &copies[i] {
                    if !c.contains(&x) && !d.contains(&x) {
                        left.insert(x);
                    }
                }
                copies[i] = c;
                copies.push(d);
                improvements += 1;
                continue 'outer;
            }
        }
        break;
    }
    let leftover = VertexSet::from_bitset(&left);
    let bound = xi * g.n() as f64;
    CoverReport {
        tiling: Tiling::new(copies),
        within_bound: leftover.len() as f64 <= bound,
        leftover,
        bound,
        improvements,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    Absorbing,
    GreedyCover,
    ExactFallback,
    Divisibility,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: String,
    pub n: usize,
    pub h: usize,
    pub pattern: String,
    /// Edge-list text of the pattern, so the tiling can be re-verified.
    pub pattern_edges: String,
    pub mode: Mode,
    pub seed: u64,
    pub hypotheses: Option<HypothesisCheck>,
    pub hypothesis_status: Option<Status>,
    pub paper_constants: bool,
    pub stages: Vec<StageOutcome>,
    pub absorbing_set: Option<VertexSet>,
    pub cover_leftover: Option<usize>,
    pub leftover_bound: Option<usize>,
    pub absorbed: bool,
    pub path: Path,
    /// `Some(false)` only when the exact solver proved that no factor exists.
    pub factor_exists: Option<bool>,
    pub tiling: Option<Tiling>,
    pub nodes: u64,
    pub millis: u64,
    pub warnings: Vec<String>,
}

impl PipelineReport {
    pub fn factor_found(&self) -> bool {
        self.tiling.is_some()
    }

    fn stage(&mut self, stage: &str, ok: bool, detail: impl Into<String>) {
        self.stages.push(StageOutcome { stage: stage.into(), ok, detail: detail.into() });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
        let stage_ok = |name: &str| {
            self.stages.iter().find(|s| s.stage == name).map_or("skipped", |s| if s.ok { "ok" } else { "failed" })
        };
        let hyp = match self.hypothesis_status {
            Some(Status::Held) => "held",
            Some(Status::Violated) => "violated",
            Some(Status::Unverified) => "unverified",
            None => "",
        };
        let leftover = if self.factor_found() { 0 } else { self.cover_leftover.unwrap_or(self.n) };
        [
            REPORT_SCHEMA.to_string(),
            self.n.to_string(),
            self.h.to_string(),
            self.mode.label(),
            self.seed.to_string(),
            hyp.to_string(),
            stage_ok("absorbing-set").to_string(),
            opt(self.absorbing_set.as_ref().map(VertexSet::len)),
            opt(self.cover_leftover),
            opt(self.leftover_bound),
            self.absorbed.to_string(),
            serde_json::to_value(self.path).expect("path").as_str().expect("string").to_string(),
            self.factor_found().to_string(),
            leftover.to_string(),
            self.nodes.to_string(),
            self.millis.to_string(),
        ]
        .join(",")
    }
}

fn check_hypotheses(g: &Graph, pattern: &Pattern, config: &PipelineConfig) -> Result<HypothesisCheck, InvariantError> {
    match config.mode {
        Mode::General => check_general(g, pattern, config.epsilon, config.epsilon_prime, config.alpha_star),
        Mode::Clique { r, ell } => check_clique(g, r, ell, config.epsilon, config.epsilon_prime, config.alpha_budget),
    }
}

fn certify(g: &Graph, pattern: &Pattern, tiling: &Tiling) -> Result<(), PipelineError> {
    verify_factor(g, pattern, tiling, &VertexSet::all(g.n())).map_err(|e| PipelineError::CertificateBug(e.to_string()))
}

/// Absorbing set, greedy cover of the rest, absorption of the leftover.
/// Stage failures are recorded; the whole-graph greedy cover and then the
/// exact solver (for `n <= fallback_cap`) are tried before giving up.
pub fn find_factor_absorbing(
    g: &Graph,
    pattern: &Pattern,
    config: &PipelineConfig,
    seed: u64,
) -> Result<PipelineReport, PipelineError> {
    let start = Instant::now();
    let n = g.n();
    let h = pattern.h();
    if let Mode::Clique { r, .. } = config.mode {
        if r != h || !pattern.is_clique() {
            return Err(PipelineError::ModeMismatch { r, h });
        }
    }
    let mut report = PipelineReport {
        schema: REPORT_SCHEMA.into(),
        n,
        h,
        pattern: pattern.name(),
        pattern_edges: pattern.graph().to_edge_list(),
        mode: config.mode,
        seed,
        hypotheses: None,
        hypothesis_status: None,
        paper_constants: !config.absorber.overrides,
        stages: Vec::new(),
        absorbing_set: None,
        cover_leftover: None,
        leftover_bound: None,
        absorbed: false,
        path: Path::None,
        factor_exists: None,
        tiling: None,
        nodes: 0,
        millis: 0,
        warnings: Vec::new(),
    };
    let finish = |mut report: PipelineReport| {
        if config.timing {
            report.millis = start.elapsed().as_millis() as u64;
        }
        report
    };
    if !n.is_multiple_of(h) {
        report.stage("divisibility", false, format!("{h} does not divide {n}"));
        report.path = Path::Divisibility;
        report.factor_exists = Some(false);
        return Ok(finish(report));
    }
    if n == 0 {
        report.tiling = Some(Tiling::default());
        report.factor_exists = Some(true);
        report.path = Path::GreedyCover;
        return Ok(finish(report));
    }

    let check = check_hypotheses(g, pattern, config)?;
    report.hypothesis_status = Some(check.status());
    report.warnings.extend(check.warnings());
    report.stage("hypotheses", check.status() != Status::Violated, format!("{:?}", check.status()));
    let builder = config.builder(pattern, Some(&check))?;
    report.hypotheses = Some(check);

    match build_absorbing_set(g, &builder, &config.absorber, seed::derive(seed, "absorbing", 0)) {
        Err(e) => report.stage("absorbing-set", false, e.to_string()),
        Ok(st) => {
            report.stage("absorbing-set", true, format!("|A| = {}", st.a.len()));
            report.absorbing_set = Some(st.a.clone());
            let limit = absorb_capacity(&st);
            report.leftover_bound = Some(limit);
            for attempt in 0..config.cover_attempts.max(1) {
                let cover = cover_check(
                    g,
                    pattern,
                    &st.a,
                    config.absorber.xi,
                    config.local_improvement,
                    seed::derive(seed, "cover", attempt as u64),
                );
                let left = cover.leftover.len();
                if report.cover_leftover.is_none_or(|best| left < best) {
                    report.cover_leftover = Some(left);
                }
                let fits = left <= limit;
                report.stage("cover", fits, format!("attempt {attempt}: leftover {left} against limit {limit}"));
                if !fits {
                    continue;
                }
                match absorb(g, pattern, &st, &cover.leftover) {
                    Ok(part) => {
                        let mut tiling = cover.tiling;
                        tiling.append(part);
                        certify(g, pattern, &tiling)?;
                        report.cover_leftover = Some(left);
                        report.stage("absorb", true, format!("{} copies", tiling.len()));
                        report.absorbed = true;
                        report.tiling = Some(tiling);
                        report.factor_exists = Some(true);
                        report.path = Path::Absorbing;
                        return Ok(finish(report));
                    }
                    Err(AbsorbError::Certificate(msg)) => return Err(PipelineError::CertificateBug(msg)),
                    Err(e) => report.stage("absorb", false, e.to_string()),
                }
            }
        }
    }

    let whole = cover_check(
        g,
        pattern,
        &VertexSet::default(),
        0.0,
        config.local_improvement,
        seed::derive(seed, "whole-cover", 0),
    );
    if whole.leftover.is_empty() {
        certify(g, pattern, &whole.tiling)?;
        report.stage("greedy-cover", true, format!("{} copies", whole.tiling.len()));
        report.tiling = Some(whole.tiling);
        report.factor_exists = Some(true);
        report.path = Path::GreedyCover;
        return Ok(finish(report));
    }
    report.stage("greedy-cover", false, format!("leftover {}", whole.leftover.len()));

    if n <= config.fallback_cap {
        let search = find_factor_exact(g, pattern, config.exact_budget);
        report.nodes = search.nodes;
        report.path = Path::ExactFallback;
        match search.outcome {
            FactorOutcome::Factor { tiling } => {
                certify(g, pattern, &tiling)?;
                report.stage("exact", true, format!("{} nodes", search.nodes));
                report.tiling = Some(tiling);
                report.factor_exists = Some(true);
            }
            FactorOutcome::NoFactor => {
                report.stage("exact", false, "no factor exists");
                report.factor_exists = Some(false);
            }
            FactorOutcome::BudgetExhausted => {
                report.stage("exact", false, format!("budget exhausted after {} nodes", search.nodes));
            }
        }
    } else {
        report.stage("exact", false, format!("skipped: n = {n} above cap {}", config.fallback_cap));
    }
    Ok(finish(report))
}
