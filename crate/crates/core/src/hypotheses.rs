//! Checks of the two factor theorems' hypotheses on a concrete graph.
//!
//! Clique form: `delta(G) >= ((r - ell)/(r - ell + 1) + eps) n` and
//! `alpha_ell(G) <= eps' n`. General form: `delta(G) >= eps n` and
//! `alpha*_H(G) <= eps' n`.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Pattern};
use crate::invariants::{alpha_ell, alpha_star_upper, min_degree, AlphaStarMode, InvariantError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Held,
    Violated,
    /// The measured value meets the bound but is not exact (budget cut or sampled).
    Unverified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum Theorem {
    Clique { r: usize, ell: usize },
    General { h: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    #[serde(flatten)]
    pub theorem: Theorem,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub n: usize,
    pub min_degree: usize,
    pub degree_threshold: f64,
    pub degree: Status,
    /// `alpha_ell` or `alpha*_H`; `None` is the infinity sentinel.
    pub alpha_value: Option<usize>,
    pub alpha_exact: bool,
    pub alpha_threshold: f64,
    pub alpha: Status,
}

impl HypothesisCheck {
    pub fn status(&self) -> Status {
        match (self.degree, self.alpha) {
            (Status::Violated, _) | (_, Status::Violated) => Status::Violated,
            (Status::Held, Status::Held) => Status::Held,
            _ => Status::Unverified,
        }
    }

    pub fn violated(&self) -> bool {
        self.status() == Status::Violated
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.degree == Status::Violated {
            out.push(format!("minimum degree {} below {:.2}", self.min_degree, self.degree_threshold));
        }
        let name = match self.theorem {
            Theorem::Clique { ell, .. } => format!("alpha_{ell}"),
            Theorem::General { .. } => "alpha*_H".to_string(),
        };
        let shown = self.alpha_value.map_or("inf".to_string(), |v| v.to_string());
        match self.alpha {
            Status::Violated => out.push(format!("{name} = {shown} above {:.2}", self.alpha_threshold)),
            Status::Unverified => {
                out.push(format!("{name} = {shown} is not exact; bound {:.2} unverified", self.alpha_threshold))
            }
            Status::Held => {}
        }
        out
    }
}

fn alpha_status(value: Option<usize>, exact: bool, threshold: f64) -> Status {
    match value {
        None => Status::Violated,
        Some(v) if v as f64 > threshold => Status::Violated,
        Some(_) if exact => Status::Held,
        Some(_) => Status::Unverified,
    }
}

/// A lower bound above the threshold certifies a violation even when the
/// branch and bound was cut short.
pub fn check_clique(
    g: &Graph,
    r: usize,
    ell: usize,
    epsilon: f64,
    epsilon_prime: f64,
    alpha_budget: u64,
) -> Result<HypothesisCheck, InvariantError> {
    if !(r > ell && ell >= 2) {
        return Err(InvariantError::InvalidParameter(format!("need r > ell >= 2, got r = {r}, ell = {ell}")));
    }
    let n = g.n();
    let delta = min_degree(g)?;
    let frac = (r - ell) as f64 / (r - ell + 1) as f64;
    let degree_threshold = (frac + epsilon) * n as f64;
    let a = alpha_ell(g, ell, alpha_budget)?;
    let alpha_threshold = epsilon_prime * n as f64;
    Ok(HypothesisCheck {
        theorem: Theorem::Clique { r, ell },
        epsilon,
        epsilon_prime,
        n,
        min_degree: delta,
        degree_threshold,
        degree: if delta as f64 >= degree_threshold { Status::Held } else { Status::Violated },
        alpha_value: Some(a.value),
        alpha_exact: a.exact,
        alpha_threshold,
        alpha: alpha_status(Some(a.value), a.exact, alpha_threshold),
    })
}

/// In sampled mode every `s` below the estimate carries a failure witness, so
/// an estimate above the threshold is a certified violation.
pub fn check_general(
    g: &Graph,
    pattern: &Pattern,
    epsilon: f64,
    epsilon_prime: f64,
    mode: AlphaStarMode,
) -> Result<HypothesisCheck, InvariantError> {
    let n = g.n();
    let delta = min_degree(g)?;
    let degree_threshold = epsilon * n as f64;
    let est = alpha_star_upper(g, pattern, mode)?;
    let alpha_threshold = epsilon_prime * n as f64;
    Ok(HypothesisCheck {
        theorem: Theorem::General { h: pattern.h() },
        epsilon,
        epsilon_prime,
        n,
        min_degree: delta,
        degree_threshold,
        degree: if delta as f64 >= degree_threshold { Status::Held } else { Status::Violated },
        alpha_value: est.value,
        alpha_exact: est.exact,
        alpha_threshold,
        alpha: alpha_status(est.value, est.exact, alpha_threshold),
    })
}
