//! Formula transformations: desugaring, extraction of downwards closed atoms,
//! occurrence splitting, the team encoding of relations and the put-back
//! constructions, the maximality sentences and the constancy definition
//! from maximal relations.

mod desugar;
mod extract;
mod maximal;
mod pipeline;
mod putback;
mod relativize;

pub use desugar::desugar;
pub use extract::{extract_atoms, split_occurrences, Binding, ExtractionResult};
pub use maximal::{build_eq1, build_phi_r, build_theta_t, Eq1Branch};
pub use pipeline::{identity_translation, safety_pipeline, Pipeline};
pub use putback::{assemble_putback, build_dep_union, put_back_qfree, PutbackGroup, QfreePutback};
pub use relativize::{build_nt_relativized, relativize_closed_world};

use thiserror::Error;

use crate::deps::DepError;
use crate::syntax::FormulaError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("`{0}` is not certified downwards closed")]
    NotDownwardsClosed(String),
    #[error("`{0}` is not certified closed-world")]
    NotClosedWorld(String),
    #[error("`{0}` has no defining first-order sentence")]
    NoDefiningSentence(String),
    #[error("input must be a sentence; free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("translation step failed: {0}")]
    Translation(String),
    #[error("translation output: {0}")]
    TranslationOutput(FormulaError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Dependency(#[from] DepError),
}
