//! Argument handling. [`run`] returns the exit code and both output streams
//! so the driver can be tested without spawning a process.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{run_stage, Options, Stage, MAX_ORDER};

#[derive(Parser, Debug)]
#[command(name = "nilcenter", version, about = "Center problem at nilpotent singular points of 3D polynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Center manifold, monodromy, obstructions and verdict.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Also compute the normal form.
        #[arg(long)]
        nf: bool,
        /// Also run the numerical return map.
        #[arg(long)]
        focal: bool,
    },
    /// Center manifold jet and the restricted planar system.
    Cm {
        #[command(flatten)]
        common: Common,
    },
    /// Obstruction constants omega_n.
    Omega {
        #[command(flatten)]
        common: Common,
    },
    /// Normal form x' = y + x P1(x), y' = Q2(x) + y P1(x), z' = -lambda z + z R1(x).
    Nf {
        #[command(flatten)]
        common: Common,
    },
    /// Numerical displacement map compared with the exact verdict.
    Focal {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Input system file.
    file: PathBuf,
    /// Jet order N of the analysis.
    #[arg(long)]
    order: Option<u32>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Parameter values, e.g. --numeric a=1,d=-3/2.
    #[arg(long, value_delimiter = ',')]
    numeric: Vec<String>,
    /// Sign assumption on a parameter expression: expr<0, expr>0 or expr!=0.
    #[arg(long, allow_hyphen_values = true)]
    assume: Vec<String>,
    #[arg(long, env = "NILCENTER_MAX_ORDER", default_value_t = MAX_ORDER, hide = true)]
    max_order: u32,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (stage, common, nf, focal) = match cli.command {
        Command::Analyze { common, nf, focal } => (Stage::Analyze, common, nf, focal),
        Command::Cm { common } => (Stage::Cm, common, false, false),
        Command::Omega { common } => (Stage::Omega, common, false, false),
        Command::Nf { common } => (Stage::Nf, common, false, false),
        Command::Focal { common } => (Stage::Focal, common, false, false),
    };
    let file = common.file.display().to_string();
    let text = match std::fs::read_to_string(&common.file) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("{}: {}", file, e)),
    };
    let opts = Options {
        order: common.order,
        numeric: common.numeric,
        assume: common.assume,
        max_order: Some(common.max_order),
        nf,
        focal,
    };
    match run_stage(stage, &file, &text, &opts) {
        Ok(out) => {
            let stdout = if common.json { out.report.to_json() + "\n" } else { out.report.to_text() };
            Output { code: out.exit_code, stdout, stderr: String::new() }
        }
        Err(e) => fail(e.exit_code(), format!("{}: {}", file, e)),
    }
}

fn fail(code: i32, msg: String) -> Output {
    Output { code, stdout: String::new(), stderr: format!("error: {}\n", msg) }
}
