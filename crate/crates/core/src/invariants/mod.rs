//! Graph parameters: minimum degree, clique structure, `alpha_ell`, the
//! traversing-copy parameter and the density `d(H)`.

mod alpha;
mod alpha_star;
mod cliques;
mod density;
mod report;

use thiserror::Error;

pub use alpha::{alpha_ell, is_k_free, AlphaEll, DEFAULT_ALPHA_BUDGET};
pub use alpha_star::{
    alpha_star_check, alpha_star_upper, family_count, verify_alpha_star_witness, AlphaStarEstimate, AlphaStarMode,
    AlphaStarResult, AlphaStarVerdict, DEFAULT_FAMILY_CAP,
};
pub use cliques::{enumerate_cliques, find_clique, for_each_clique, max_clique, maximum_clique};
pub use density::d_h;
pub use report::{param_report, ParamReport, ParamRequest};

use crate::exact::ExactError;
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exhaustive mode would examine {families} families, above the cap of {cap}")]
    CapExceeded { families: u128, cap: u64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub fn min_degree(g: &Graph) -> Result<usize, InvariantError> {
    (0..g.n()).map(|v| g.degree(v)).min().ok_or(InvariantError::EmptyGraph)
}
