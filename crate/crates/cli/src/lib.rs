//! Front end for the creamkit engine: the `creamkit` command, the HTTP API
//! behind the analyst console, and project-file persistence.

pub mod api;
pub mod commands;
pub mod projects;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use api::{router, AppState, Problem, TAXONOMY_VERSION_HEADER};
pub use projects::{Project, ProjectStore, StoreError};

#[derive(Debug, Parser)]
#[command(name = "creamkit", version, about = "CREAM human reliability analysis for task trees")]
pub struct Cli {
    /// Taxonomy JSON to use instead of the built-in default.
    #[arg(long, global = true, env = "CREAMKIT_TAXONOMY", value_name = "PATH")]
    pub taxonomy: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a `.hta` file and check it against the taxonomy.
    Validate { hta: PathBuf },
    /// Control mode and HEP interval for an assessment.
    Screen {
        #[arg(long, value_name = "PATH")]
        assessment: PathBuf,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Per-assignment failure probabilities.
    Analyze {
        #[command(flatten)]
        input: AnalysisInput,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Only the k most critical assignments (text output).
        #[arg(long, value_name = "K")]
        top: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Cognitive demand profile per top-level step.
    Profile {
        hta: PathBuf,
        /// Write the SVG figure here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Single-CPC sensitivity sweep.
    Whatif {
        #[command(flatten)]
        input: AnalysisInput,
        #[arg(long, value_name = "K")]
        top: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Write report.json, report.csv, report.md and profile.svg.
    Report {
        #[command(flatten)]
        input: AnalysisInput,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "K", default_value_t = 10)]
        top: usize,
        /// Skip the what-if section.
        #[arg(long)]
        no_whatif: bool,
        /// Provenance timestamp. Defaults to SOURCE_DATE_EPOCH, then the
        /// assessment's own timestamp.
        #[arg(long)]
        timestamp: Option<String>,
    },
    /// Serve the HTTP API and console.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, env = "CREAMKIT_PROJECTS", value_name = "DIR", default_value = "projects")]
        projects: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct AnalysisInput {
    pub hta: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub assessment: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Parses `argv` and runs the command. Returns the process exit code:
/// 0 success, 1 validation failure, 2 I/O, parse or usage error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match commands::execute(cli, out) {
        Ok(()) => 0,
        Err(failure) => {
            for line in failure.lines() {
                let _ = writeln!(err, "creamkit: {line}");
            }
            failure.exit_code()
        }
    }
}
