//! Assembly of a `xi`-absorbing set `A = X ∪ Y ∪ Z ∪ ⋃ A_e`.

use std::collections::HashSet;
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::absorb::assignment;
use super::absorber::{verify_absorber, Absorber, FamilyBuilder};
use super::template::{build_template, TemplateCertificate, TemplateGraph, TemplateMode};
use super::{is_st_absorber, AbsorbError, AbsorberConfig};
use crate::exact::{copies_through, find_copy};
use crate::graph::{Graph, Pattern, PatternKind, VertexSet};
use crate::invariants::for_each_clique;
use crate::seed;

pub const STRUCTURE_SCHEMA: &str = "tilinglab.absorbing/v1";

/// Sizes of the assembled set against the budget `gamma n` and the
/// intermediate bounds `124 h t m` and `240 h t n q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeLedger {
    pub a: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub template_edges: usize,
    pub absorber_size: usize,
    pub absorbers_total: usize,
    pub gamma_n: f64,
    pub within_gamma_n: bool,
    pub bound_124htm: f64,
    pub bound_240htnq: f64,
    pub paper_constants: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemainderCheck {
    pub size: usize,
    pub checked: u64,
    /// True when every `size`-subset outside `X` was tried.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingStructure {
    pub schema: String,
    pub n: usize,
    pub h: usize,
    /// Edge-list text of the pattern.
    pub pattern: String,
    pub config: AbsorberConfig,
    pub seed: u64,
    pub a: VertexSet,
    /// `phi_1(X_m[j]) = x[j]`.
    pub x: Vec<usize>,
    /// `phi_1(Y_m[j]) = y[j]`.
    pub y: Vec<usize>,
    pub z: VertexSet,
    /// `phi_2(Z_m[i]) = z_parts[i]`.
    pub z_parts: Vec<Vec<usize>>,
    pub template: TemplateGraph,
    pub template_certificate: TemplateCertificate,
    /// `A_e` for the template edge with the same index.
    pub edge_absorbers: Vec<Absorber>,
    /// `H'_v`: `(h-1)`-subsets of `X` completing `v` to a copy; empty for `v` in `X`.
    pub copy_families: Vec<Vec<Vec<usize>>>,
    /// `|H_v|` from the harvesting stage.
    pub harvest_sizes: Vec<usize>,
    pub x_attempts: usize,
    /// Rounds of stages 2 to 7 used; later rounds rerun them on fresh seeds.
    pub assembly_attempts: usize,
    /// Remainders tried against `X` before it was accepted, per admissible size.
    pub remainder_checks: Vec<RemainderCheck>,
    pub ledger: SizeLedger,
    pub warnings: Vec<String>,
}

impl AbsorbingStructure {
    pub fn m(&self) -> usize {
        self.template.m
    }

    pub fn pattern(&self) -> Result<Pattern, AbsorbError> {
        let g = Graph::parse(&self.pattern).map_err(|e| AbsorbError::Certificate(format!("pattern: {e}")))?;
        Pattern::general(g).map_err(|e| AbsorbError::Certificate(format!("pattern: {e}")))
    }

    /// `phi_1` on the template's left side.
    pub fn phi1(&self, left: usize) -> usize {
        if left < self.x.len() {
            self.x[left]
        } else {
            self.y[left - self.x.len()]
        }
    }

    /// `phi_1(w_1) ∪ phi_2(w_2)` for template edge `e`.
    pub fn edge_set(&self, e: usize) -> VertexSet {
        let (l, r) = self.template.edges[e];
        VertexSet::collect_from(std::iter::once(self.phi1(l)).chain(self.z_parts[r].iter().copied()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, AbsorbError> {
        let st: AbsorbingStructure =
            serde_json::from_str(text).map_err(|e| AbsorbError::Certificate(format!("structure JSON: {e}")))?;
        if st.schema != STRUCTURE_SCHEMA {
            return Err(AbsorbError::Certificate(format!("unknown schema {:?}", st.schema)));
        }
        Ok(st)
    }
}

fn bits(n: usize, vs: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for v in vs {
        b.insert(v);
    }
    b
}

/// All `(h-1)`-subsets of `x` that form a copy of `H` together with `v`.
fn family_in(g: &Graph, pattern: &Pattern, v: usize, x: &FixedBitSet) -> Vec<Vec<usize>> {
    match pattern.kind() {
        PatternKind::Clique(r) => {
            let mut nb = g.neighbors(v).clone();
            nb.intersect_with(x);
            let mut out = Vec::new();
            let _ = for_each_clique(g, r - 1, Some(&nb), |c| {
                out.push(c.to_vec());
                ControlFlow::Continue(())
            });
            out
        }
        PatternKind::General => {
            let mut within = x.clone();
            within.insert(v);
            let mut out: Vec<Vec<usize>> = copies_through(g, pattern, v, &within)
                .into_iter()
                .map(|c| {
                    let mut s: Vec<usize> = c.into_iter().filter(|&u| u != v).collect();
                    s.sort_unstable();
                    s
                })
                .collect();
            out.sort_unstable();
            out
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Tries remainders of every admissible size against `X`: exhaustively when
/// there are at most `certify_cap` of them, else `certify_cap` random ones.
fn certify_remainders(
    g: &Graph,
    pattern: &Pattern,
    config: &AbsorberConfig,
    families: &[Vec<Vec<usize>>],
    x: &[usize],
    m: usize,
    seed: u64,
) -> Result<Vec<RemainderCheck>, String> {
    let (n, h) = (g.n(), pattern.h());
    let surplus = x.len() - m;
    let xi_n = (config.xi * n as f64 + 1e-9).floor() as usize;
    let limit = xi_n.min(surplus / (h - 1));
    let xb = bits(n, x.iter().copied());
    let outside: Vec<usize> = (0..n).filter(|&v| !xb.contains(v)).collect();
    let mut rng = seed::rng(seed);
    let mut checks = Vec::new();
    // |A| ≡ |X| - m (mod h).
    for size in (0..=limit.min(outside.len())).filter(|s| (surplus + s).is_multiple_of(h)) {
        let try_one = |r: &[usize]| {
            let mut r = r.to_vec();
            r.sort_unstable();
            assignment(g, pattern, families, x, m, &r, config.absorb_budget)
                .map(|_| ())
                .map_err(|e| format!("remainder {r:?}: {e}"))
        };
        let exhaustive = binomial(outside.len(), size) <= config.certify_cap as u128;
        let mut checked = 0u64;
        if exhaustive {
            let mut c: Vec<usize> = (0..size).collect();
            loop {
                let r: Vec<usize> = c.iter().map(|&i| outside[i]).collect();
                try_one(&r)?;
                checked += 1;
                if !next_combination(&mut c, outside.len()) {
                    break;
                }
            }
        } else {
            for _ in 0..config.certify_cap {
                let r: Vec<usize> = outside.choose_multiple(&mut rng, size).copied().collect();
                try_one(&r)?;
                checked += 1;
            }
        }
        checks.push(RemainderCheck { size, checked, exhaustive });
    }
    Ok(checks)
}

/// Builds an absorbing structure following the seven stages: copy families,
/// the `q`-sample `X`, the template, `Y` and `Z`, the maps, greedy edge
/// absorbers, assembly.
pub fn build_absorbing_set(
    g: &Graph,
    builder: &FamilyBuilder,
    config: &AbsorberConfig,
    seed: u64,
) -> Result<AbsorbingStructure, AbsorbError> {
    let pattern = builder.pattern();
    let n = g.n();
    let h = pattern.h();
    if config.h != h || config.t != builder.t() {
        return Err(AbsorbError::Config(format!(
            "config has h = {}, t = {}; builder has h = {h}, t = {}",
            config.h,
            config.t,
            builder.t()
        )));
    }
    if n < h {
        return Err(AbsorbError::Config(format!("graph has {n} < h vertices")));
    }

    // (1) H_v: copies through v harvested from absorbers for S = {v, v+1, ...}.
    let empty = FixedBitSet::with_capacity(n);
    let mut harvest_sizes = Vec::with_capacity(n);
    for v in 0..n {
        let s = VertexSet::collect_from((0..h).map(|i| (v + i) % n));
        let found = match builder.build(g, &s, &empty, config.family_target, seed::derive(seed, "harvest", v as u64)) {
            Ok(f) => f,
            Err(AbsorbError::Shortfall { found, .. }) => found,
            Err(e) => {
                return Err(AbsorbError::Stage { stage: "copy-families", blocking: Some(s), reason: e.to_string() })
            }
        };
        if found.is_empty() {
            return Err(AbsorbError::Stage {
                stage: "copy-families",
                blocking: Some(s),
                reason: format!("no copy of H through vertex {v}"),
            });
        }
        harvest_sizes.push(found.len());
    }

    let mut last = None;
    for round in 0..config.assembly_attempts.max(1) {
        let rs = if round == 0 { seed } else { seed::derive(seed, "assembly", round as u64) };
        match assemble(g, builder, config, seed, rs, &harvest_sizes) {
            Ok(mut st) => {
                st.assembly_attempts = round + 1;
                return Ok(st);
            }
            Err(e @ AbsorbError::Stage { stage: "edge-absorbers" | "yz", .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one assembly round"))
}

/// Stages 2 to 7 for one round seed `rs`.
fn assemble(
    g: &Graph,
    builder: &FamilyBuilder,
    config: &AbsorberConfig,
    seed: u64,
    rs: u64,
    harvest_sizes: &[usize],
) -> Result<AbsorbingStructure, AbsorbError> {
    let pattern = builder.pattern();
    let n = g.n();
    let h = pattern.h();

    // (2) X: q-sample with |X| <= 2nq and |H'_v| >= max(1, q^(h-1) |H_v| / 2).
    let mut sampled = None;
    let mut remainder_checks = Vec::new();
    let mut last_reason = String::from("no attempt made");
    for attempt in 0..config.x_attempts {
        let mut rng = seed::rng(seed::derive(rs, "x-sample", attempt as u64));
        let raw: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < config.q).collect();
        if raw.len() as f64 > 2.0 * n as f64 * config.q {
            last_reason = format!("|X| = {} exceeds 2nq = {:.2}", raw.len(), 2.0 * n as f64 * config.q);
            continue;
        }
        let m = config.scale_for(raw.len());
        if m == 0 {
            last_reason = format!("|X| = {} too small for m >= 1", raw.len());
            continue;
        }
        let x: Vec<usize> = raw[..config.x_size(m)].to_vec();
        let xb = bits(n, x.iter().copied());
        let mut families = vec![Vec::new(); n];
        let mut short = None;
        for v in (0..n).filter(|&v| !xb.contains(v)) {
            let fam = family_in(g, pattern, v, &xb);
            let need = ((config.q.powi(h as i32 - 1) * harvest_sizes[v] as f64) / 2.0).ceil().max(1.0) as usize;
            if fam.len() < need {
                short = Some((v, fam.len(), need));
                break;
            }
            families[v] = fam;
        }
        if let Some((v, got, need)) = short {
            last_reason = format!("vertex {v} has {got} < {need} copies completed inside X");
            continue;
        }
        match certify_remainders(g, pattern, config, &families, &x, m, seed::derive(rs, "certify", attempt as u64)) {
            Ok(checks) => remainder_checks = checks,
            Err(reason) => {
                last_reason = reason;
                continue;
            }
        }
        sampled = Some((attempt + 1, m, x, families));
        break;
    }
    let Some((x_attempts, m, x, copy_families)) = sampled else {
        return Err(AbsorbError::Stage {
            stage: "x-sample",
            blocking: None,
            reason: format!("{} attempts: {last_reason}", config.x_attempts),
        });
    };

    // (3) template B_m.
    let mode = match config.template {
        TemplateMode::Auto { seed: s } => TemplateMode::Auto { seed: seed::derive(rs ^ s, "template", 0) },
        TemplateMode::RandomRegular { seed: s } => {
            TemplateMode::RandomRegular { seed: seed::derive(rs ^ s, "template", 0) }
        }
        other => other,
    };
    let (template, template_certificate) =
        build_template(m, config.beta, mode, config.template_verify, config.template_attempts)
            .map_err(|e| AbsorbError::Stage { stage: "template", blocking: None, reason: e.to_string() })?;

    // (4) Y and Z outside X; Z split into (h-1)-sets in index order.
    let xb = bits(n, x.iter().copied());
    let mut rest: Vec<usize> = (0..n).filter(|&v| !xb.contains(v)).collect();
    rest.shuffle(&mut seed::rng(seed::derive(rs, "yz", 0)));
    let (ny, nz) = (2 * m, 3 * m * (h - 1));
    if rest.len() < ny + nz {
        return Err(AbsorbError::Stage {
            stage: "yz",
            blocking: None,
            reason: format!("{} vertices outside X, need {}", rest.len(), ny + nz),
        });
    }
    let mut y = rest[..ny].to_vec();
    y.sort_unstable();
    let mut zs = rest[ny..ny + nz].to_vec();
    zs.sort_unstable();
    // (5) phi_2 maps Z_m[i] to the i-th chunk.
    let z_parts: Vec<Vec<usize>> = zs.chunks(h - 1).map(<[usize]>::to_vec).collect();
    let z = VertexSet::collect_from(zs);

    // (6) greedy pairwise-disjoint edge absorbers.
    let mut used = xb.clone();
    for v in y.iter().copied().chain(z.iter()) {
        used.insert(v);
    }
    let phi1 = |l: usize| if l < x.len() { x[l] } else { y[l - x.len()] };
    let mut edge_absorbers = Vec::with_capacity(template.edges.len());
    for (e, &(l, r)) in template.edges.iter().enumerate() {
        let s = VertexSet::collect_from(std::iter::once(phi1(l)).chain(z_parts[r].iter().copied()));
        let mut avoid = used.clone();
        for v in s.iter() {
            avoid.set(v, false);
        }
        let mut found = builder.build(g, &s, &avoid, 1, seed::derive(rs, "edge", e as u64)).map_err(|err| {
            AbsorbError::Stage { stage: "edge-absorbers", blocking: Some(s.clone()), reason: err.to_string() }
        })?;
        let a = found.swap_remove(0);
        for v in a.set.iter() {
            used.insert(v);
        }
        edge_absorbers.push(a);
    }

    // (7) assemble.
    let a = VertexSet::from_bitset(&used);
    let t = config.t;
    let gamma_n = config.gamma * n as f64;
    let ledger = SizeLedger {
        a: a.len(),
        x: x.len(),
        y: y.len(),
        z: z.len(),
        template_edges: template.edges.len(),
        absorber_size: h * t,
        absorbers_total: h * t * template.edges.len(),
        gamma_n,
        within_gamma_n: a.len() as f64 <= gamma_n,
        bound_124htm: 124.0 * (h * t * m) as f64,
        bound_240htnq: 240.0 * (h * t) as f64 * n as f64 * config.q,
        paper_constants: !config.overrides,
    };
    Ok(AbsorbingStructure {
        schema: STRUCTURE_SCHEMA.to_string(),
        n,
        h,
        pattern: pattern.graph().to_edge_list(),
        config: config.clone(),
        seed,
        a,
        x,
        y,
        z,
        z_parts,
        template,
        template_certificate,
        edge_absorbers,
        copy_families,
        harvest_sizes: harvest_sizes.to_vec(),
        assembly_attempts: 1,
        x_attempts,
        remainder_checks,
        ledger,
        warnings: builder.warnings().to_vec(),
    })
}

/// Independent re-check of every structural invariant. Absorbers are
/// re-verified from their certificates and again by the exact solver.
pub fn verify_structure(g: &Graph, st: &AbsorbingStructure) -> Result<(), AbsorbError> {
    let fail = |msg: String| Err(AbsorbError::Certificate(msg));
    if st.schema != STRUCTURE_SCHEMA {
        return fail(format!("unknown schema {:?}", st.schema));
    }
    if st.n != g.n() {
        return fail(format!("structure is for n = {}, graph has {}", st.n, g.n()));
    }
    let pattern = st.pattern()?;
    let h = pattern.h();
    if h != st.h {
        return fail(format!("pattern has {h} vertices, structure records {}", st.h));
    }
    let n = g.n();
    let tp = &st.template;
    tp.verify(st.template_certificate.verify)?;
    let m = tp.m;
    if st.x.len() != tp.x_len() || st.y.len() != tp.y_len() {
        return fail(format!("|X| = {}, |Y| = {} do not match the template", st.x.len(), st.y.len()));
    }
    if st.z_parts.len() != tp.z_len() || st.z_parts.iter().any(|p| p.len() != h - 1) {
        return fail("Z must split into 3m sets of size h - 1".into());
    }
    if st.z.len() != 3 * m * (h - 1) {
        return fail(format!("|Z| = {}, expected {}", st.z.len(), 3 * m * (h - 1)));
    }
    let mut core = FixedBitSet::with_capacity(n);
    for &v in st.x.iter().chain(&st.y).chain(st.z_parts.iter().flatten()) {
        if v >= n {
            return fail(format!("vertex {v} out of range"));
        }
        if core.put(v) {
            return fail(format!("vertex {v} repeated across X, Y, Z"));
        }
    }
    if VertexSet::collect_from(st.z_parts.iter().flatten().copied()) != st.z {
        return fail("Z differs from the union of its parts".into());
    }
    if st.edge_absorbers.len() != tp.edges.len() {
        return fail(format!("{} absorbers for {} template edges", st.edge_absorbers.len(), tp.edges.len()));
    }
    let mut all = core.clone();
    for (e, a) in st.edge_absorbers.iter().enumerate() {
        if a.s != st.edge_set(e) {
            return fail(format!("absorber {e} is for {:?}, edge needs {:?}", a.s, st.edge_set(e)));
        }
        if a.t != st.config.t {
            return fail(format!("absorber {e} has t = {}", a.t));
        }
        for v in a.set.iter() {
            if v >= n || all.put(v) {
                return fail(format!("absorber {e} reuses vertex {v}"));
            }
        }
        verify_absorber(g, &pattern, a)?;
        if !is_st_absorber(g, &pattern, &a.s, &a.set, a.t, st.config.factor_budget)? {
            return fail(format!("absorber {e} fails the exact (S, t) check"));
        }
    }
    if VertexSet::from_bitset(&all) != st.a {
        return fail("A differs from X ∪ Y ∪ Z ∪ absorbers".into());
    }
    if st.copy_families.len() != n {
        return fail("copy families must be indexed by every vertex".into());
    }
    let xb = bits(n, st.x.iter().copied());
    for (v, fam) in st.copy_families.iter().enumerate() {
        let mut seen = HashSet::new();
        for member in fam {
            if member.len() != h - 1 || member.iter().any(|&u| !xb.contains(u) || u == v) || !seen.insert(member) {
                return fail(format!("copy family of {v} has a bad member {member:?}"));
            }
            let within = bits(n, member.iter().copied().chain([v]));
            if find_copy(g, &pattern, &within).is_none() {
                return fail(format!("{member:?} does not form H with {v}"));
            }
        }
    }
    Ok(())
}
