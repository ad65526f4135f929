//! Text front end for `imp-core`: a declaration format, a kernel-expression
//! parser, a seeded model generator, reports and the `impcheck` CLI.

pub mod ast;
pub mod cli;
pub mod commands;
pub mod document;
pub mod error;
pub mod gen;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod report;

pub use cli::{run_command, Outcome};
pub use document::{parse_spec, SpecDocument};
pub use error::{ErrorKind, ParseError, Pos, ShellError};
pub use gen::{generate_model, GenConfig, GeneratedModel};
pub use parser::{parse_decls, parse_kernel_expr};
pub use printer::print_decls;
pub use report::{Check, CheckStatus, Report};
