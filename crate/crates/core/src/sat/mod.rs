//! CNF formulas and SAT machinery: DIMACS io, incremental flip state,
//! a small complete solver, and instance generators.

mod cnf;
mod dpll;
mod gen;
mod state;

pub use cnf::CnfFormula;
pub use dpll::{dpll_sat, dpll_sat_capped, DEFAULT_VAR_CAP};
pub use gen::{
    encode_clique, encode_color, encode_domset, gen_filtered, gen_filtered_budget, gen_rand3,
    CnfDist,
};
pub use state::{break_make_of, SatState};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("bad distribution spec: {0}")]
    InvalidSpec(String),
    #[error("{0} variables exceeds the complete-solver cap of {1}")]
    VarCap(usize, usize),
    #[error("kept {accepted} of {wanted} satisfiable instances after {attempts} attempts")]
    RejectionBudget {
        accepted: usize,
        wanted: usize,
        attempts: u64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
