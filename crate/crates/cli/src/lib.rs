//! Front end for the transmuted-heat-polynomial solver: expression parsing
//! with exact symbolic derivatives, a flat problem-file format, and the
//! command runners behind the `transheat` binary.

pub mod expr;
pub mod problem;
pub mod runner;

pub use expr::{parse_expr, Expr, Func, ParseError, Var};
pub use problem::{parse_problem_file, FileError, ProblemFile, ProblemKind};
pub use runner::{run, thread_cap_from_env, Command, RunConfig};
