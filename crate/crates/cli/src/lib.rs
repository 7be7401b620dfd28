//! A small language for writing Fock-space states, and the `fockpart`
//! command line that classifies them.
//!
//! ```text
//! let phi = sum n=0..4: (0.5^n) * adag(ket(0))^n |vac>;
//! classify phi stats=boson;
//! ```

pub mod ast;
pub mod cli;
pub mod error;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod report;

pub use error::{EvalError, LangError};
pub use eval::{build, evaluate, Built, Classified, EvalConfig};
pub use parser::parse;
pub use printer::{print_expr, print_program};
