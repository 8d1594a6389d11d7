//! Absorbers, robust templates, absorbing-set assembly and absorption.

mod absorb;
mod absorber;
mod config;
mod structure;
mod template;

use thiserror::Error;

pub use absorb::{absorb, absorb_capacity, valid_remainder_sizes};
pub use absorber::{
    certify_absorber, is_st_absorber, verify_absorber, Absorber, CliqueAbsorbers, FamilyBuilder, GeneralAbsorbers,
};
pub use config::AbsorberConfig;
pub use structure::{build_absorbing_set, verify_structure, AbsorbingStructure, SizeLedger, STRUCTURE_SCHEMA};
pub use template::{
    build_template, ceil_beta_m, TemplateCertificate, TemplateGraph, TemplateMode, TemplateVerify, MAX_TEMPLATE_DEGREE,
};

use crate::graph::VertexSet;

#[derive(Debug, Error)]
pub enum AbsorbError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid vertex set: {0}")]
    InvalidSet(String),
    #[error("vertex {w}: {available} free neighbours, need {needed}")]
    Neighbourhood { w: usize, available: usize, needed: usize },
    #[error("{stage}: found {} of {target} disjoint absorbers", found.len())]
    Shortfall { stage: &'static str, target: usize, found: Vec<Absorber> },
    #[error("exact solver ran out of budget after {nodes} nodes")]
    Budget { nodes: u64 },
    #[error("template: {0}")]
    Template(String),
    #[error("template has no perfect matching for X' = {x_prime:?}")]
    TemplateFalsified { x_prime: Vec<usize> },
    #[error("stage {stage} failed at S = {blocking:?}: {reason}")]
    Stage { stage: &'static str, blocking: Option<VertexSet>, reason: String },
    #[error("remainder of {size} vertices exceeds the limit of {limit}")]
    RemainderTooLarge { size: usize, limit: usize },
    #[error("|A| + |R| = {total} is not divisible by h = {h}")]
    Divisibility { total: usize, h: usize },
    #[error("no disjoint choice of copies covers the remainder: {0}")]
    NoAssignment(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}
