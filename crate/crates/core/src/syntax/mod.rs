//! Formula syntax: the team-semantics AST (negation normal form with sugar
//! nodes), the classical first-order AST, parser, printer and analyses.

mod analysis;
mod ast;
mod nnf;
mod parser;
mod printer;

pub use analysis::{
    check_positive, check_positive_classical, count_classical, count_occurrences, dep_atoms,
    free_vars, free_vars_classical, has_sugar, is_first_order, is_prenex, is_quantifier_free,
    is_quantifier_free_classical, prenex_parts, relation_symbols, relation_symbols_classical,
    rename_vars_classical, require_first_order, substitute_relation, to_prenex, to_prenex_team,
    FormulaError, FreshGen, Quant,
};
pub use ast::{Classical, DepAtom, Formula};
pub use nnf::{classical_nnf, classical_to_nnf, to_classical};
pub use parser::{parse_classical, parse_formula, ParseError};

/// `to_nnf` under its usual name.
pub fn to_nnf(c: &Classical) -> Formula {
    classical_to_nnf(c)
}
