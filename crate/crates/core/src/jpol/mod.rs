//! The JPol policy language.
//!
//! ```text
//! stmts          ::= (stmt ';')+
//! stmt           ::= decRole | decRoleSubsume | decRes | addActRes | addPermRole
//! decRole        ::= 'Role' ID '=' 'new' 'Role' name
//! decRoleSubsume ::= 'Role' ID '=' 'new' 'Role' name 'subsumes' ID
//! decRes         ::= 'Resource' ID '=' 'new' 'Resource' name
//! addActRes      ::= ID '.' 'addAction' name
//! addPermRole    ::= ID '.' 'addPermission' permission
//! name           ::= '(' ID ')'
//! permission     ::= '(' ID ',' ID ')'
//! ```
//!
//! Arguments of `name` and `permission` may be written bare or quoted with
//! `'X'`, `` `X' `` or typographic quotes. `//` starts a line comment.

mod ast;
mod lexer;
mod parser;
mod tables;

use thiserror::Error;

use crate::Position;

pub use ast::{PolicyAst, Statement};
pub use lexer::is_identifier;
pub use parser::parse_policy;
pub use tables::{build_tables, Permission, Policy, Resource, Role};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: expected {expected}, found {found}")]
pub struct PolicyParseError {
    pub position: Position,
    pub found: String,
    pub expected: String,
}

impl PolicyParseError {
    pub(crate) fn new(
        position: Position,
        found: impl Into<String>,
        expected: impl Into<String>,
    ) -> Self {
        PolicyParseError {
            position,
            found: found.into(),
            expected: expected.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticErrorKind {
    #[error("identifier `{0}` is bound more than once")]
    DuplicateId(String),
    #[error("role '{0}' is declared more than once")]
    DuplicateRole(String),
    #[error("resource '{0}' is declared more than once")]
    DuplicateResource(String),
    #[error("'{0}' is declared both as a resource and as a role")]
    NameClash(String),
    #[error("`{0}` is not a declared resource")]
    UndeclaredResourceId(String),
    #[error("`{0}` is not a declared role")]
    UndeclaredRoleId(String),
    #[error("subsumed role `{0}` is not declared")]
    UndeclaredParentRole(String),
    #[error("permission names unknown resource '{0}'")]
    UnknownResource(String),
    #[error("permission {0} names an action the resource does not declare")]
    UnknownAction(Permission),
    #[error("action {0} is added more than once")]
    DuplicateAction(Permission),
    #[error("permission {permission} is granted to role '{role}' more than once")]
    DuplicatePermission {
        role: String,
        permission: Permission,
    },
    #[error("subsumption cycle: {}", .0.join(" -> "))]
    SubsumptionCycle(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct PolicySemanticError {
    pub position: Position,
    pub kind: SemanticErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown role '{0}'")]
pub struct UnknownRole(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("policy syntax error at {0}")]
    Parse(#[from] PolicyParseError),
    #[error("policy error at {0}")]
    Semantic(#[from] PolicySemanticError),
}

/// Parses and builds the tables in one step.
pub fn load_policy(text: &str) -> Result<Policy, PolicyError> {
    let ast = parse_policy(text)?;
    Ok(build_tables(&ast)?)
}
