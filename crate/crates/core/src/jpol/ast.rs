use std::fmt;

use crate::Position;

/// One JPol statement. `id` fields are policy-level binding variables;
/// `name` fields are the quoted names that key the tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    DecRole {
        id: String,
        name: String,
    },
    DecRoleSubsume {
        id: String,
        name: String,
        parent: String,
    },
    DecRes {
        id: String,
        name: String,
    },
    AddActRes {
        resource_id: String,
        action: String,
    },
    AddPermRole {
        role_id: String,
        resource: String,
        action: String,
    },
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::DecRole { id, name } => write!(f, "Role {id} = new Role('{name}')"),
            Statement::DecRoleSubsume { id, name, parent } => {
                write!(f, "Role {id} = new Role('{name}') subsumes {parent}")
            }
            Statement::DecRes { id, name } => write!(f, "Resource {id} = new Resource('{name}')"),
            Statement::AddActRes {
                resource_id,
                action,
            } => write!(f, "{resource_id}.addAction('{action}')"),
            Statement::AddPermRole {
                role_id,
                resource,
                action,
            } => write!(f, "{role_id}.addPermission('{resource}', '{action}')"),
        }
    }
}

/// Statements in source order, each with the position where it starts.
#[derive(Debug, Clone, Default)]
pub struct PolicyAst {
    statements: Vec<Statement>,
    positions: Vec<Position>,
}

impl PolicyAst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, statement: Statement, position: Position) {
        self.statements.push(statement);
        self.positions.push(position);
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Statement, Position)> {
        self.statements.iter().zip(self.positions.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

/// Structural equality; source positions are ignored.
impl PartialEq for PolicyAst {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

impl Eq for PolicyAst {}

/// Pretty-prints one statement per line with ASCII quotes.
impl fmt::Display for PolicyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for stmt in &self.statements {
            writeln!(f, "{stmt};")?;
        }
        Ok(())
    }
}
