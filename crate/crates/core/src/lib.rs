//! Structural parameters of disjunctive answer set programs and the
//! reductions that bound them.

pub mod error;
pub mod generate;
pub mod graphs;
pub mod kernel;
pub mod oracle;
pub mod program;
pub mod reductions;
pub mod structparams;

pub use error::{Error, Result};
pub use program::{parse_program, AtomId, Interpretation, Program, Rule};
