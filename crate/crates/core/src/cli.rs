//! Command-line driver.
//!
//! `verify` prints one line per diagnostic on stdout,
//!
//! ```text
//! <file>:<line>: <kind>: <message>
//! ```
//!
//! with `<file>` relative to the source root (`<policy>` for diagnostics
//! about the policy as a whole) and `warning: ` in front of the kind for
//! warnings. A one-line summary goes to stderr. With `--format json` the
//! whole report is a single JSON object on stdout.
//!
//! `tables` prints the Resources and Roles tables:
//!
//! ```text
//! Resources
//!   Nhspatient: getFirstName
//!
//! Roles
//!   Admin
//!     [Nhspatient, getFirstName]
//!   Senior subsumes Admin
//!     [Nhspatient, getFirstName] (inherited)
//! ```
//!
//! A role without permissions shows `(none)`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use walkdir::WalkDir;

use crate::checker::{verify_program_with, CheckOptions, Diagnostic, Verdict};
use crate::frontend::{parse_sources, FrontendError};
use crate::jpol::{load_policy, Policy};
use crate::oracle::{simulate_sessions, unauthorized, Step};

pub const EXIT_ACCEPTED: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_POLICY_ERROR: i32 = 2;
pub const EXIT_SOURCE_ERROR: i32 = 3;
pub const EXIT_IO_ERROR: i32 = 4;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub policy_path: PathBuf,
    pub source_root: PathBuf,
    pub format: Format,
    pub strict_packages: bool,
    /// On rejection, also dump reachable unauthorized accesses with paths.
    pub explain: bool,
}

impl RunConfig {
    pub fn new(policy_path: impl Into<PathBuf>, source_root: impl Into<PathBuf>) -> Self {
        RunConfig {
            policy_path: policy_path.into(),
            source_root: source_root.into(),
            format: Format::Text,
            strict_packages: false,
            explain: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Explanation {
    pub role: String,
    pub resource: String,
    pub action: String,
    /// `Class.method` steps from the role's entry point to the action.
    pub path: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report<'a> {
    schema_version: u32,
    accepted: bool,
    diagnostics: &'a [Diagnostic],
    #[serde(skip_serializing_if = "Option::is_none")]
    explain: Option<&'a [Explanation]>,
}

/// Failure before a verdict could be reached.
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read_policy(path: &Path) -> Result<Policy, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_IO_ERROR, format!("{}: {e}", path.display())))?;
    load_policy(&text).map_err(|e| fail(EXIT_POLICY_ERROR, format!("{}: {e}", path.display())))
}

/// Every `.java` file below `root`, sorted, with its path relative to `root`.
pub fn collect_sources(root: &Path) -> io::Result<Vec<(PathBuf, PathBuf)>> {
    if !root.is_dir() {
        return Err(io::Error::new(
            io::ErrorKind::NotFound,
            format!("{}: not a directory", root.display()),
        ));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(io::Error::other)?;
        let path = entry.path();
        if entry.file_type().is_file() && path.extension().is_some_and(|e| e == "java") {
            let relative = path.strip_prefix(root).unwrap_or(path).to_path_buf();
            files.push((path.to_path_buf(), relative));
        }
    }
    files.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(files)
}

fn step_name((class, method): &Step) -> String {
    format!("{class}.{method}")
}

/// Reachable accesses the policy does not grant, with their call paths.
pub fn explain(policy: &Policy, program: &crate::frontend::ProgramModel) -> Vec<Explanation> {
    let sim = simulate_sessions(policy, program);
    unauthorized(policy, &sim.accesses)
        .into_iter()
        .map(|a| Explanation {
            role: a.role.clone(),
            resource: a.resource.clone(),
            action: a.action.clone(),
            path: a.path.iter().map(step_name).collect(),
        })
        .collect()
}

fn verify(config: &RunConfig) -> Result<(Verdict, Vec<Explanation>), Failure> {
    let policy = read_policy(&config.policy_path)?;
    let files =
        collect_sources(&config.source_root).map_err(|e| fail(EXIT_IO_ERROR, e.to_string()))?;
    let mut sources = Vec::with_capacity(files.len());
    for (path, relative) in files {
        let text = fs::read_to_string(&path)
            .map_err(|e| fail(EXIT_IO_ERROR, format!("{}: {e}", path.display())))?;
        sources.push((relative, text));
    }
    let program = parse_sources(sources).map_err(|e| match e {
        FrontendError::Io { .. } => fail(EXIT_IO_ERROR, e.to_string()),
        _ => fail(EXIT_SOURCE_ERROR, e.to_string()),
    })?;
    let verdict = verify_program_with(
        &policy,
        &program,
        CheckOptions {
            strict_packages: config.strict_packages,
        },
    );
    let explanations = if config.explain && !verdict.accepted {
        explain(&policy, &program)
    } else {
        Vec::new()
    };
    Ok((verdict, explanations))
}

fn render_text(verdict: &Verdict, explanations: &[Explanation], explain: bool) -> String {
    let mut out = String::new();
    for d in &verdict.diagnostics {
        let _ = writeln!(out, "{d}");
    }
    if explain {
        for e in explanations {
            let _ = writeln!(
                out,
                "explain: role `{}` reaches [{}, {}] via {}",
                e.role,
                e.resource,
                e.action,
                e.path.join(" -> ")
            );
        }
    }
    out
}

fn render_json(verdict: &Verdict, explanations: &[Explanation], explain: bool) -> String {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        accepted: verdict.accepted,
        diagnostics: &verdict.diagnostics,
        explain: explain.then_some(explanations),
    };
    let mut text = serde_json::to_string_pretty(&report).unwrap_or_default();
    text.push('\n');
    text
}

fn summary(verdict: &Verdict) -> String {
    let errors = verdict.errors().count();
    let warnings = verdict.diagnostics.len() - errors;
    let state = if verdict.accepted {
        "accepted"
    } else {
        "rejected"
    };
    format!(
        "{state}: {errors} error(s), {warnings} warning(s), {} call(s) examined",
        verdict.calls_examined
    )
}

/// Runs `verify` and returns the exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match verify(config) {
        Ok((verdict, explanations)) => {
            let text = match config.format {
                Format::Text => render_text(&verdict, &explanations, config.explain),
                Format::Json => render_json(&verdict, &explanations, config.explain),
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_IO_ERROR;
            }
            let _ = writeln!(err, "{}", summary(&verdict));
            if verdict.accepted {
                EXIT_ACCEPTED
            } else {
                EXIT_REJECTED
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// The tables in the layout documented at the top of this module.
pub fn render_tables(policy: &Policy) -> String {
    let mut out = String::from("Resources\n");
    for r in policy.resources.values() {
        let _ = writeln!(out, "  {}: {}", r.name, r.actions.join(", "));
    }
    out.push_str("\nRoles\n");
    for role in policy.roles.values() {
        match &role.subsumes {
            Some(junior) => {
                let _ = writeln!(out, "  {} subsumes {junior}", role.name);
            }
            None => {
                let _ = writeln!(out, "  {}", role.name);
            }
        }
        if role.effective_permissions.is_empty() {
            out.push_str("    (none)\n");
        }
        for p in &role.effective_permissions {
            if role.declared_permissions.contains(p) {
                let _ = writeln!(out, "    {p}");
            } else {
                let _ = writeln!(out, "    {p} (inherited)");
            }
        }
    }
    out
}

/// Runs `tables`; only the policy path of `config` is used.
pub fn dump_tables(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match read_policy(&config.policy_path) {
        Ok(policy) => {
            if out.write_all(render_tables(&policy).as_bytes()).is_err() {
                return EXIT_IO_ERROR;
            }
            EXIT_ACCEPTED
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
