//! Parsing of the target program.
//!
//! The accepted language is a small Java subset: a package declaration,
//! imports, and one top-level class or interface per file with fields,
//! constructors and methods. Method bodies may contain local declarations,
//! assignments, expression statements, `return`, `throw`, `if`/`else`,
//! `while`, `do`, `for` (classic and for-each), `break`, `continue` and
//! blocks. Expressions cover literals, names, field access, the three
//! invocation forms (`Class.m()`, `x.m()`, `x.m().n()`), unqualified and
//! `this.` calls, object and array creation, simple casts and the usual
//! operators. Generics, lambdas, nested and anonymous classes, annotations,
//! `super`, `switch` and `try` are rejected.

mod lexer;
mod model;
mod parser;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::Position;

pub use model::{
    CallSite, CalledClass, CalledMethod, ClassKind, ClassModel, FieldDecl, MethodKind, MethodModel,
    Param, Receiver, ReceiverForm, Visibility, FIELD_INIT, VOID,
};
pub use parser::parse_class;

use model::{resolve_with, ClassLookup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}:{position}: {message}", path.display())]
pub struct SourceParseError {
    pub path: PathBuf,
    pub position: Position,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<SourceParseError>),
    #[error("class `{name}` is declared in both {} and {}", first.display(), second.display())]
    DuplicateClass {
        name: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// All classes of a program in one global namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProgramModel {
    pub classes: BTreeMap<String, ClassModel>,
    pub source_index: BTreeMap<String, PathBuf>,
}

impl ClassLookup for ProgramModel {
    fn class(&self, name: &str) -> Option<&ClassModel> {
        self.classes.get(name)
    }
}

impl ProgramModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a class that has already been resolved (or built by hand).
    pub fn insert(&mut self, class: ClassModel, path: PathBuf) -> Result<(), FrontendError> {
        if let Some(first) = self.source_index.get(&class.name) {
            return Err(FrontendError::DuplicateClass {
                name: class.name,
                first: first.clone(),
                second: path,
            });
        }
        self.source_index.insert(class.name.clone(), path);
        self.classes.insert(class.name.clone(), class);
        Ok(())
    }

    pub fn class(&self, name: &str) -> Option<&ClassModel> {
        self.classes.get(name)
    }

    pub fn path_of(&self, class: &str) -> Option<&Path> {
        self.source_index.get(class).map(PathBuf::as_path)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn call_count(&self) -> usize {
        self.classes.values().map(ClassModel::call_count).sum()
    }
}

/// Resolves every call site of `class` against the whole program: variable
/// receivers by their declared type, chained receivers by the declared
/// return type of the previous call. Lookups that fail yield
/// [`CalledClass::Unresolved`].
pub fn resolve_calls(class: &ClassModel, program: &ProgramModel) -> ClassModel {
    resolve_with(class, program)
}

/// Parses in-memory sources and resolves all calls.
pub fn parse_sources(sources: Vec<(PathBuf, String)>) -> Result<ProgramModel, FrontendError> {
    let mut parsed = Vec::new();
    let mut errors = Vec::new();
    for (path, text) in sources {
        match parse_class(&text, &path) {
            Ok(class) => parsed.push((class, path)),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(FrontendError::Parse(errors));
    }
    let mut unresolved = ProgramModel::new();
    for (class, path) in parsed {
        unresolved.insert(class, path)?;
    }
    let classes = unresolved
        .classes
        .values()
        .map(|c| (c.name.clone(), resolve_calls(c, &unresolved)))
        .collect();
    Ok(ProgramModel {
        classes,
        source_index: unresolved.source_index,
    })
}

/// Reads, parses and resolves every file in `paths`.
pub fn parse_program(paths: &[PathBuf]) -> Result<ProgramModel, FrontendError> {
    let sources = paths
        .iter()
        .map(|p| {
            fs::read_to_string(p)
                .map(|text| (p.clone(), text))
                .map_err(|source| FrontendError::Io {
                    path: p.clone(),
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    parse_sources(sources)
}
