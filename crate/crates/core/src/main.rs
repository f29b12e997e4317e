use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rbac_verifier::cli::{dump_tables, run, Format, RunConfig, EXIT_IO_ERROR};

/// Static verifier for role-based access control in Java programs.
#[derive(Parser)]
#[command(name = "rbac-verifier", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a program against a policy.
    Verify {
        #[arg(long)]
        policy: PathBuf,
        /// Root directory; every `.java` file below it is checked.
        #[arg(long)]
        src: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Also require the model/controller/view/session package layout.
        #[arg(long)]
        strict_packages: bool,
        /// On rejection, print call paths to unauthorized actions.
        #[arg(long)]
        explain: bool,
    },
    /// Print the Resources and Roles tables of a policy.
    Tables {
        #[arg(long)]
        policy: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_IO_ERROR } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = match args.command {
        Command::Verify {
            policy,
            src,
            format,
            strict_packages,
            explain,
        } => {
            let config = RunConfig {
                policy_path: policy,
                source_root: src,
                format: match format {
                    FormatArg::Text => Format::Text,
                    FormatArg::Json => Format::Json,
                },
                strict_packages,
                explain,
            };
            run(&config, &mut out, &mut err)
        }
        Command::Tables { policy } => dump_tables(&RunConfig::new(policy, ""), &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
