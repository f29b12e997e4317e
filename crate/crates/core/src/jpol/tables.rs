use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use crate::Position;

use super::ast::{PolicyAst, Statement};
use super::{PolicySemanticError, SemanticErrorKind, UnknownRole};

/// A `[resource, action]` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Permission {
    pub resource: String,
    pub action: String,
}

impl Permission {
    pub fn new(resource: impl Into<String>, action: impl Into<String>) -> Self {
        Permission {
            resource: resource.into(),
            action: action.into(),
        }
    }
}

impl fmt::Display for Permission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.resource, self.action)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    pub name: String,
    /// Actions in declaration order.
    pub actions: Vec<String>,
}

impl Resource {
    pub fn has_action(&self, action: &str) -> bool {
        self.actions.iter().any(|a| a == action)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub name: String,
    pub declared_permissions: BTreeSet<Permission>,
    /// Name of the directly subsumed (junior) role.
    pub subsumes: Option<String>,
    /// Declared permissions plus everything inherited through `subsumes`.
    pub effective_permissions: BTreeSet<Permission>,
}

impl Role {
    pub fn inherited_permissions(&self) -> impl Iterator<Item = &Permission> {
        self.effective_permissions
            .iter()
            .filter(|p| !self.declared_permissions.contains(p))
    }
}

/// The Resources and Roles tables, keyed by quoted names in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Policy {
    pub resources: IndexMap<String, Resource>,
    pub roles: IndexMap<String, Role>,
}

impl Policy {
    pub fn resource(&self, name: &str) -> Option<&Resource> {
        self.resources.get(name)
    }

    pub fn role(&self, name: &str) -> Option<&Role> {
        self.roles.get(name)
    }

    pub fn is_action(&self, resource: &str, action: &str) -> bool {
        self.resources
            .get(resource)
            .is_some_and(|r| r.has_action(action))
    }

    /// Closed-world check: anything not granted is denied.
    pub fn is_permitted(&self, role: &str, resource: &str, action: &str) -> bool {
        self.roles.get(role).is_some_and(|r| {
            r.effective_permissions
                .iter()
                .any(|p| p.resource == resource && p.action == action)
        })
    }

    pub fn effective_permissions(&self, role: &str) -> Result<&BTreeSet<Permission>, UnknownRole> {
        self.roles
            .get(role)
            .map(|r| &r.effective_permissions)
            .ok_or_else(|| UnknownRole(role.to_string()))
    }
}

enum Binding {
    Role(String),
    Resource(String),
}

fn err(position: Position, kind: SemanticErrorKind) -> PolicySemanticError {
    PolicySemanticError { position, kind }
}

/// Builds the Resources and Roles tables from a parsed policy.
///
/// Statement order does not matter: declarations are collected first, then
/// actions, then permissions, then the role hierarchy is linked and
/// flattened. All name references are checked against the declarations.
pub fn build_tables(ast: &PolicyAst) -> Result<Policy, PolicySemanticError> {
    let mut policy = Policy::default();
    let mut bindings: HashMap<&str, Binding> = HashMap::new();
    let mut parents: Vec<(String, &str, Position)> = Vec::new();

    for (stmt, pos) in ast.iter() {
        let (id, name, is_role) = match stmt {
            Statement::DecRole { id, name } => (id, name, true),
            Statement::DecRoleSubsume { id, name, parent } => {
                parents.push((name.clone(), parent.as_str(), pos));
                (id, name, true)
            }
            Statement::DecRes { id, name } => (id, name, false),
            _ => continue,
        };
        if bindings.contains_key(id.as_str()) {
            return Err(err(pos, SemanticErrorKind::DuplicateId(id.clone())));
        }
        if policy.roles.contains_key(name) {
            return Err(err(pos, SemanticErrorKind::DuplicateRole(name.clone())));
        }
        if policy.resources.contains_key(name) {
            let kind = if is_role {
                SemanticErrorKind::NameClash(name.clone())
            } else {
                SemanticErrorKind::DuplicateResource(name.clone())
            };
            return Err(err(pos, kind));
        }
        if is_role {
            bindings.insert(id, Binding::Role(name.clone()));
            policy.roles.insert(
                name.clone(),
                Role {
                    name: name.clone(),
                    declared_permissions: BTreeSet::new(),
                    subsumes: None,
                    effective_permissions: BTreeSet::new(),
                },
            );
        } else {
            bindings.insert(id, Binding::Resource(name.clone()));
            policy.resources.insert(
                name.clone(),
                Resource {
                    name: name.clone(),
                    actions: Vec::new(),
                },
            );
        }
    }

    for (stmt, pos) in ast.iter() {
        let Statement::AddActRes {
            resource_id,
            action,
        } = stmt
        else {
            continue;
        };
        let Some(Binding::Resource(name)) = bindings.get(resource_id.as_str()) else {
            return Err(err(
                pos,
                SemanticErrorKind::UndeclaredResourceId(resource_id.clone()),
            ));
        };
        let resource = &mut policy.resources[name];
        if resource.has_action(action) {
            return Err(err(
                pos,
                SemanticErrorKind::DuplicateAction(Permission::new(name.as_str(), action.as_str())),
            ));
        }
        resource.actions.push(action.clone());
    }

    for (stmt, pos) in ast.iter() {
        let Statement::AddPermRole {
            role_id,
            resource,
            action,
        } = stmt
        else {
            continue;
        };
        let Some(Binding::Role(role_name)) = bindings.get(role_id.as_str()) else {
            return Err(err(
                pos,
                SemanticErrorKind::UndeclaredRoleId(role_id.clone()),
            ));
        };
        let Some(res) = policy.resources.get(resource) else {
            return Err(err(
                pos,
                SemanticErrorKind::UnknownResource(resource.clone()),
            ));
        };
        let permission = Permission::new(resource.as_str(), action.as_str());
        if !res.has_action(action) {
            return Err(err(pos, SemanticErrorKind::UnknownAction(permission)));
        }
        let role = &mut policy.roles[role_name];
        if !role.declared_permissions.insert(permission.clone()) {
            return Err(err(
                pos,
                SemanticErrorKind::DuplicatePermission {
                    role: role_name.clone(),
                    permission,
                },
            ));
        }
    }

    for (role_name, parent_id, pos) in &parents {
        let Some(Binding::Role(parent)) = bindings.get(parent_id) else {
            return Err(err(
                *pos,
                SemanticErrorKind::UndeclaredParentRole(parent_id.to_string()),
            ));
        };
        policy.roles[role_name].subsumes = Some(parent.clone());
    }

    // Each role has at most one parent, so a cycle shows up as a revisit
    // while walking up from some role.
    for (role_name, _, pos) in &parents {
        let mut chain = vec![role_name.clone()];
        let mut current = policy.roles[role_name].subsumes.clone();
        while let Some(next) = current {
            if let Some(start) = chain.iter().position(|r| *r == next) {
                let mut cycle = chain.split_off(start);
                cycle.push(next);
                return Err(err(*pos, SemanticErrorKind::SubsumptionCycle(cycle)));
            }
            current = policy.roles[&next].subsumes.clone();
            chain.push(next);
        }
    }

    let names: Vec<String> = policy.roles.keys().cloned().collect();
    for name in names {
        let mut effective = BTreeSet::new();
        let mut current = Some(name.clone());
        while let Some(role) = current {
            let role = &policy.roles[&role];
            effective.extend(role.declared_permissions.iter().cloned());
            current = role.subsumes.clone();
        }
        policy.roles[&name].effective_permissions = effective;
    }

    Ok(policy)
}
