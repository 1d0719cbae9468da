//! Evaluators: Tarskian truth for classical formulas and lax team semantics
//! for team formulas.

mod engine;
mod tarski;
mod trace;

pub use engine::{
    evaluate, sentence_true, team_eval, Compiled, Disjunction, EvalConfig, Existential, Outcome,
};
pub use tarski::{select_team, tarski_eval, tarski_sentence};
pub use trace::{EvalTrace, TraceWitness};

use thiserror::Error;

use crate::deps::DepError;
use crate::model::{ModelError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Var),
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{sym}` has arity {expected} in the model but is applied to {got} arguments")]
    Arity {
        sym: String,
        expected: usize,
        got: usize,
    },
    #[error("free variables {0:?} are not in the team domain")]
    FreeVariables(Vec<Var>),
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<Var>),
    #[error("partition disjunction needs downwards-closed disjuncts; `{0}` is not certified")]
    PartitionNotAdmissible(String),
    #[error("{what} search over {rows} rows is too large")]
    SearchTooLarge { what: &'static str, rows: usize },
    #[error("{0}")]
    Formula(String),
    #[error(transparent)]
    Dependency(#[from] DepError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
