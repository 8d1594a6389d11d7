use std::collections::BTreeMap;

use num_rational::Ratio;
use serde_json::{json, Map, Value};

use super::{
    alpha_ell, alpha_star_upper, d_h, max_clique, min_degree, AlphaEll, AlphaStarEstimate, AlphaStarMode,
    AlphaStarResult, InvariantError,
};
use crate::graph::{Graph, Pattern};

#[derive(Clone, Debug)]
pub struct ParamRequest {
    pub ells: Vec<usize>,
    pub pattern: Option<Pattern>,
    pub alpha_star: Option<AlphaStarMode>,
    pub alpha_budget: u64,
}

#[derive(Clone, Debug)]
pub struct ParamReport {
    pub n: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub max_clique: usize,
    pub alpha_ell: BTreeMap<usize, AlphaEll>,
    pub pattern: Option<String>,
    pub alpha_star: Option<AlphaStarEstimate>,
    pub d_h: Option<Ratio<usize>>,
}

pub fn param_report(g: &Graph, req: &ParamRequest) -> Result<ParamReport, InvariantError> {
    let mut alphas = BTreeMap::new();
    for &ell in &req.ells {
        alphas.insert(ell, alpha_ell(g, ell, req.alpha_budget)?);
    }
    let (alpha_star, density) = match &req.pattern {
        Some(p) => {
            let star = match req.alpha_star {
                Some(mode) => Some(alpha_star_upper(g, p, mode)?),
                None => None,
            };
            (star, Some(d_h(p)))
        }
        None => (None, None),
    };
    Ok(ParamReport {
        n: g.n(),
        edges: g.edge_count(),
        min_degree: min_degree(g)?,
        max_degree: g.max_degree(),
        max_clique: max_clique(g),
        alpha_ell: alphas,
        pattern: req.pattern.as_ref().map(Pattern::name),
        alpha_star,
        d_h: density,
    })
}

impl ParamReport {
    /// Flat key/value document; failure witnesses are lists of vertex lists.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!("tilinglab.params/v1"));
        m.insert("n".into(), json!(self.n));
        m.insert("edges".into(), json!(self.edges));
        m.insert("min_degree".into(), json!(self.min_degree));
        m.insert("max_degree".into(), json!(self.max_degree));
        m.insert("max_clique".into(), json!(self.max_clique));
        for (ell, a) in &self.alpha_ell {
            m.insert(format!("alpha_{ell}"), json!(a.value));
            m.insert(format!("alpha_{ell}_exact"), json!(a.exact));
            m.insert(format!("alpha_{ell}_witness"), json!(a.witness));
        }
        if let Some(p) = &self.pattern {
            m.insert("pattern".into(), json!(p));
        }
        if let Some(d) = self.d_h {
            m.insert("d_h".into(), json!(format!("{}/{}", d.numer(), d.denom())));
        }
        if let Some(est) = &self.alpha_star {
            m.insert(
                "alpha_star".into(),
                match est.value {
                    Some(s) => json!(s),
                    None => json!("inf"),
                },
            );
            m.insert("alpha_star_exact".into(), json!(est.exact));
            let witnesses: Vec<Value> = est
                .verdicts
                .iter()
                .filter_map(|v| match &v.result {
                    AlphaStarResult::Fails { witness } => Some(json!({ "s": v.s, "sets": witness })),
                    AlphaStarResult::Holds => None,
                })
                .collect();
            m.insert("alpha_star_witnesses".into(), Value::Array(witnesses));
        }
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_flat() {
        let req = ParamRequest {
            ells: vec![2, 3],
            pattern: Some(Pattern::clique(3).unwrap()),
            alpha_star: Some(AlphaStarMode::Exhaustive { cap: 10_000 }),
            alpha_budget: 10_000,
        };
        let r = param_report(&Graph::complete(6), &req).unwrap();
        let j = r.to_json();
        assert_eq!(j["min_degree"], 6 - 1);
        assert_eq!(j["alpha_2"], 1);
        assert_eq!(j["alpha_3"], 2);
        assert_eq!(j["d_h"], "3/2");
        assert_eq!(j["alpha_star"], 1);
        assert!(j.as_object().unwrap().values().all(|v| !v.is_object()));
    }
}
