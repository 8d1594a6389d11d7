use serde::{Deserialize, Serialize};

use super::template::{ceil_beta_m, TemplateMode, TemplateVerify};
use super::AbsorbError;

/// Constants of the absorbing-set construction.
///
/// The defaults bind `q = gamma / (500 h t)`, `beta = q^(h-1) gamma / 4` and
/// `xi = beta / (h - 1)`. Desk configurations override `q` and `beta`; `xi`
/// is always rederived from `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorberConfig {
    pub gamma: f64,
    pub t: usize,
    pub q: f64,
    pub beta: f64,
    pub xi: f64,
    pub h: usize,
    /// True when `q` or `beta` are desk-scale choices rather than the defaults.
    pub overrides: bool,
    /// Absorbers requested per set `S` when harvesting copy families.
    pub family_target: usize,
    pub template: TemplateMode,
    pub template_verify: TemplateVerify,
    pub x_attempts: usize,
    pub template_attempts: usize,
    /// Rounds of stages 2 to 7 tried when the greedy edge-absorber stage blocks.
    #[serde(default = "default_assembly_attempts")]
    pub assembly_attempts: usize,
    /// Node budget for each exact-factor certification.
    pub factor_budget: u64,
    /// Node budget for the remainder assignment during absorption.
    pub absorb_budget: u64,
    /// Remainders checked per admissible size while accepting `X`; sizes
    /// with at most this many subsets are checked exhaustively.
    #[serde(default = "default_certify_cap")]
    pub certify_cap: u64,
}

fn default_assembly_attempts() -> usize {
    10
}

fn default_certify_cap() -> u64 {
    20_000
}

fn check_fraction(name: &str, v: f64) -> Result<(), AbsorbError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(AbsorbError::Config(format!("{name} = {v} must lie in (0, 1)")))
    }
}

impl AbsorberConfig {
    pub fn paper(h: usize, t: usize, gamma: f64) -> Result<Self, AbsorbError> {
        if h < 2 || t < 1 {
            return Err(AbsorbError::Config(format!("need h >= 2 and t >= 1, got h = {h}, t = {t}")));
        }
        check_fraction("gamma", gamma)?;
        let q = gamma / (500.0 * h as f64 * t as f64);
        let beta = q.powi(h as i32 - 1) * gamma / 4.0;
        Ok(AbsorberConfig {
            gamma,
            t,
            q,
            beta,
            xi: beta / (h - 1) as f64,
            h,
            overrides: false,
            family_target: 1,
            template: TemplateMode::Auto { seed: 0 },
            template_verify: TemplateVerify::Sampled { trials: 1000, seed: 0 },
            x_attempts: 50,
            template_attempts: 20,
            assembly_attempts: default_assembly_attempts(),
            factor_budget: 1_000_000,
            absorb_budget: 1_000_000,
            certify_cap: default_certify_cap(),
        })
    }

    /// Desk-scale constants: explicit `q` and `beta` (any `beta > 0`), staircase templates.
    pub fn desk(h: usize, t: usize, gamma: f64, q: f64, beta: f64) -> Result<Self, AbsorbError> {
        let mut c = AbsorberConfig::paper(h, t, gamma)?;
        check_fraction("q", q)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(AbsorbError::Config(format!("beta = {beta} must be positive")));
        }
        c.q = q;
        c.beta = beta;
        c.xi = beta / (h - 1) as f64;
        c.overrides = true;
        c.family_target = 2;
        c.template = TemplateMode::Staircase;
        c.template_verify = TemplateVerify::Exhaustive { cap: 100_000 };
        Ok(c)
    }

    /// `m + ceil(beta m)`: the size `X` is trimmed to for scale `m`.
    pub fn x_size(&self, m: usize) -> usize {
        m + ceil_beta_m(self.beta, m)
    }

    /// Largest `m` with `m + ceil(beta m) <= available`.
    pub fn scale_for(&self, available: usize) -> usize {
        let mut m = 0;
        while self.x_size(m + 1) <= available {
            m += 1;
        }
        m
    }
}
