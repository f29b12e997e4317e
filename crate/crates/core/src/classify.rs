//! Grouping of program classes by naming rules.
//!
//! Rules, first match wins:
//!
//! 1. the class name equals a resource name: resource class;
//! 2. the name starts with `Session`: session class;
//! 3. `<Role>Model`: role model of `Role`;
//! 4. `<Role>Controller`: role controller of `Role`;
//! 5. `<Role>View<tail>` (tail possibly empty): role view of `Role`;
//! 6. anything else.
//!
//! When several role names fit, the longest one owns the class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::frontend::ProgramModel;
use crate::jpol::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GroupKind {
    Resource,
    Session,
    RoleModel,
    RoleController,
    RoleView,
    Other,
}

impl GroupKind {
    pub fn is_role_group(self) -> bool {
        matches!(
            self,
            GroupKind::RoleModel | GroupKind::RoleController | GroupKind::RoleView
        )
    }

    fn suffix(self) -> Option<&'static str> {
        match self {
            GroupKind::RoleModel => Some("Model"),
            GroupKind::RoleController => Some("Controller"),
            GroupKind::RoleView => Some("View"),
            _ => None,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Resource => "resource",
            GroupKind::Session => "session",
            GroupKind::RoleModel => "role model",
            GroupKind::RoleController => "role controller",
            GroupKind::RoleView => "role view",
            GroupKind::Other => "other",
        })
    }
}

/// Group of one class together with its owning role, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group<'a> {
    pub kind: GroupKind,
    pub role: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("class `{class}` matches role views of several roles: {}", roles.join(", "))]
    AmbiguousClassification { class: String, roles: Vec<String> },
    #[error("class `{class}` does not name a declared role as a {group}")]
    NoSuchRole { class: String, group: GroupKind },
}

/// Partition of all program classes into the six groups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupTables {
    pub resource_classes: BTreeSet<String>,
    pub role_model_classes: BTreeMap<String, String>,
    pub role_controller_classes: BTreeMap<String, String>,
    pub role_view_classes: BTreeMap<String, String>,
    pub session_classes: BTreeSet<String>,
    pub other_classes: BTreeSet<String>,
    /// Roles declared in the policy with no model or no controller class.
    pub incomplete_roles: Vec<(String, Vec<GroupKind>)>,
}

impl GroupTables {
    /// Group of a program class; `None` for classes outside the program.
    pub fn group_of(&self, class: &str) -> Option<Group<'_>> {
        fn role_group<'t>(
            kind: GroupKind,
            table: &'t BTreeMap<String, String>,
            class: &str,
        ) -> Option<Group<'t>> {
            table.get(class).map(|role| Group {
                kind,
                role: Some(role.as_str()),
            })
        }
        let plain = |kind| Some(Group { kind, role: None });
        if self.resource_classes.contains(class) {
            plain(GroupKind::Resource)
        } else if self.session_classes.contains(class) {
            plain(GroupKind::Session)
        } else if let Some(g) = role_group(GroupKind::RoleModel, &self.role_model_classes, class) {
            Some(g)
        } else if let Some(g) = role_group(
            GroupKind::RoleController,
            &self.role_controller_classes,
            class,
        ) {
            Some(g)
        } else if let Some(g) = role_group(GroupKind::RoleView, &self.role_view_classes, class) {
            Some(g)
        } else if self.other_classes.contains(class) {
            plain(GroupKind::Other)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.resource_classes.len()
            + self.role_model_classes.len()
            + self.role_controller_classes.len()
            + self.role_view_classes.len()
            + self.session_classes.len()
            + self.other_classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Roles `r` such that `class` starts with `r` + "View"; the tail after
/// `View` is always an identifier tail since `class` is an identifier.
fn view_owners<'p>(class: &str, policy: &'p Policy) -> Vec<&'p str> {
    policy
        .roles
        .keys()
        .filter(|role| {
            class
                .strip_prefix(role.as_str())
                .is_some_and(|rest| rest.starts_with("View"))
        })
        .map(String::as_str)
        .collect()
}

/// Owning role of a class known to be in a role group: the suffix
/// (`Model`, `Controller`, or `View` and everything after it) is removed
/// and the rest must be a declared role. For views the longest declared
/// role name wins.
pub fn owning_role<'p>(
    class: &str,
    group: GroupKind,
    policy: &'p Policy,
) -> Result<&'p str, ClassifyError> {
    let no_such_role = || ClassifyError::NoSuchRole {
        class: class.to_string(),
        group,
    };
    match group {
        GroupKind::RoleModel | GroupKind::RoleController => {
            let suffix = group.suffix().unwrap_or_default();
            let role = class.strip_suffix(suffix).ok_or_else(no_such_role)?;
            policy
                .roles
                .get_key_value(role)
                .map(|(k, _)| k.as_str())
                .ok_or_else(no_such_role)
        }
        GroupKind::RoleView => {
            let owners = view_owners(class, policy);
            let longest = owners
                .iter()
                .map(|r| r.len())
                .max()
                .ok_or_else(no_such_role)?;
            let best: Vec<&str> = owners.into_iter().filter(|r| r.len() == longest).collect();
            match best.as_slice() {
                [one] => Ok(one),
                _ => Err(ClassifyError::AmbiguousClassification {
                    class: class.to_string(),
                    roles: best.iter().map(|r| r.to_string()).collect(),
                }),
            }
        }
        _ => Err(no_such_role()),
    }
}

/// Classifies a single class name.
pub fn classify_class<'p>(
    class: &str,
    policy: &'p Policy,
) -> Result<(GroupKind, Option<&'p str>), ClassifyError> {
    if policy.resources.contains_key(class) {
        return Ok((GroupKind::Resource, None));
    }
    if class.starts_with("Session") {
        return Ok((GroupKind::Session, None));
    }
    for kind in [GroupKind::RoleModel, GroupKind::RoleController] {
        if let Ok(role) = owning_role(class, kind, policy) {
            return Ok((kind, Some(role)));
        }
    }
    match owning_role(class, GroupKind::RoleView, policy) {
        Ok(role) => Ok((GroupKind::RoleView, Some(role))),
        Err(e @ ClassifyError::AmbiguousClassification { .. }) => Err(e),
        Err(ClassifyError::NoSuchRole { .. }) => Ok((GroupKind::Other, None)),
    }
}

/// Builds the group tables for every class of the program.
pub fn classify(program: &ProgramModel, policy: &Policy) -> Result<GroupTables, ClassifyError> {
    let mut tables = GroupTables::default();
    for name in program.classes.keys() {
        let (kind, role) = classify_class(name, policy)?;
        let owned = |role: Option<&str>| role.unwrap_or_default().to_string();
        match kind {
            GroupKind::Resource => {
                tables.resource_classes.insert(name.clone());
            }
            GroupKind::Session => {
                tables.session_classes.insert(name.clone());
            }
            GroupKind::RoleModel => {
                tables.role_model_classes.insert(name.clone(), owned(role));
            }
            GroupKind::RoleController => {
                tables
                    .role_controller_classes
                    .insert(name.clone(), owned(role));
            }
            GroupKind::RoleView => {
                tables.role_view_classes.insert(name.clone(), owned(role));
            }
            GroupKind::Other => {
                tables.other_classes.insert(name.clone());
            }
        }
    }
    for role in policy.roles.keys() {
        let mut missing = Vec::new();
        if !tables.role_model_classes.values().any(|r| r == role) {
            missing.push(GroupKind::RoleModel);
        }
        if !tables.role_controller_classes.values().any(|r| r == role) {
            missing.push(GroupKind::RoleController);
        }
        if !missing.is_empty() {
            tables.incomplete_roles.push((role.clone(), missing));
        }
    }
    Ok(tables)
}
