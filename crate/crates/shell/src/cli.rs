//! The `impcheck` command line.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use imp_core::finsys::set_element_cap;
use imp_core::kernelcat::Flavor;

use crate::commands::{self, load, CmdResult};
use crate::gen::GenConfig;
use crate::printer::print_decls;
use crate::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Rel,
    Stoch,
}

#[derive(Debug, Parser)]
#[command(name = "impcheck", version, about = "Check models of finite dynamical systems")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Largest set the tool will build.
    #[arg(long, global = true)]
    pub max_states: Option<usize>,
    /// Worker threads for seed suites.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Named {
    pub file: PathBuf,
    #[arg(long, visible_alias = "map")]
    pub name: String,
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Validate a system declaration.
    System(Named),
    /// Check the commuting square of a map.
    Map(Named),
    /// Check the model conditions of a map.
    Model(Named),
}

#[derive(Debug, Subcommand)]
pub enum ImpCmd {
    /// Run the internal-model pipeline on a regulation problem.
    Verify {
        file: PathBuf,
        #[arg(long)]
        problem: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum InterpCmd {
    /// Derive and check the reasoner induced by a model.
    Derive {
        file: PathBuf,
        #[arg(long)]
        map: String,
        /// Write the derived reasoner as a document.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check a declared reasoner.
    Check {
        file: PathBuf,
        #[arg(long)]
        reasoner: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// Evaluate a kernel expression against a document.
    Eval {
        file: PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value_t = FlavorArg::Rel)]
        flavor: FlavorArg,
        /// Compare with a second expression.
        #[arg(long)]
        against: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCmd {
    /// Generate one random model.
    Model {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        states_m: usize,
        #[arg(long)]
        max_fibre: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the model, indexed-model and consistency checks on many seeds.
    Suite {
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[arg(long, default_value_t = 3)]
        max_fibre: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check systems, maps and models.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Run the regulation pipeline on a problem.
    #[command(subcommand)]
    Imp(ImpCmd),
    /// Derive or check filtering interpretations.
    #[command(subcommand)]
    Interp(InterpCmd),
    /// Evaluate kernel expressions.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Generate random models and run seed suites.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Print a document in canonical form.
    Print { file: PathBuf },
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Output {
    Report(Report),
    Text(String),
}

fn dispatch(cli: &Cli) -> CmdResult<Output> {
    use Command::*;
    Ok(match &cli.command {
        Check(c) => Output::Report(match c {
            CheckCmd::System(n) => commands::check_system(&load(&n.file)?, &n.name)?,
            CheckCmd::Map(n) => commands::check_map(&load(&n.file)?, &n.name)?,
            CheckCmd::Model(n) => commands::check_model(&load(&n.file)?, &n.name)?,
        }),
        Imp(ImpCmd::Verify { file, problem }) => Output::Report(commands::imp_verify(&load(file)?, problem)?),
        Interp(InterpCmd::Derive { file, map, emit }) => {
            Output::Report(commands::interp_derive(&load(file)?, map, emit.as_deref())?)
        }
        Interp(InterpCmd::Check { file, reasoner }) => {
            Output::Report(commands::interp_check(&load(file)?, reasoner)?)
        }
        Kernel(KernelCmd::Eval {
            file,
            expr,
            flavor,
            against,
        }) => {
            let flavor = match flavor {
                FlavorArg::Rel => Flavor::Rel,
                FlavorArg::Stoch => Flavor::Stoch,
            };
            Output::Report(commands::kernel_eval(&load(file)?, expr, flavor, against.as_deref())?)
        }
        Gen(GenCmd::Model {
            seed,
            states_m,
            max_fibre,
            out,
        }) => {
            let cfg = GenConfig::new(*seed, *states_m, *max_fibre)?;
            let (mut report, text) = commands::gen_model(cfg, out.as_deref())?;
            match (out, cli.format) {
                (None, Format::Text) if report.passed => Output::Text(text),
                (None, _) => {
                    report.fact("document", text);
                    Output::Report(report)
                }
                _ => Output::Report(report),
            }
        }
        Gen(GenCmd::Suite {
            start,
            seeds,
            max_fibre,
        }) => Output::Report(commands::gen_suite(*start, *seeds, *max_fibre, cli.jobs)?),
        Print { file } => Output::Text(print_decls(&load(file)?.decls)),
    })
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    if let Some(cap) = cli.max_states {
        set_element_cap(cap);
    }
    match dispatch(&cli) {
        Ok(Output::Report(r)) => Outcome {
            code: r.exit_code(),
            stdout: match cli.format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json() + "\n",
            },
            stderr: String::new(),
        },
        Ok(Output::Text(t)) => Outcome {
            code: 0,
            stdout: t,
            stderr: String::new(),
        },
        Err(e) => {
            let code = e.exit_code();
            let stderr = match cli.format {
                Format::Text => format!("error: {e}\n"),
                Format::Json => serde_json::json!({ "error": e.to_string(), "exit": code }).to_string() + "\n",
            };
            Outcome {
                code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}
