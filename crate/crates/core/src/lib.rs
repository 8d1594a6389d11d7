//! Graph tiling laboratory: exact H-factor search, absorbers, template
//! graphs, absorbing-set assembly and the extremal constructions.

pub mod absorbing;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod hypotheses;
pub mod invariants;
pub mod matching;
pub mod pipeline;
pub mod seed;

pub use exact::{find_factor_exact, greedy_max_tiling, verify_factor, verify_tiling, FactorOutcome, Tiling};
pub use graph::{Graph, GraphError, Pattern, PatternKind, VertexSet};
