//! Per-group check suites and the program verdict.
//!
//! Every call site of every class is examined by the suite of the class's
//! group. Calls to classes outside the program (library code) are exempt
//! from group checks; calls whose receiver could not be resolved are errors
//! everywhere except in other classes, where they are warnings.

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::classify::{classify, GroupKind, GroupTables};
use crate::frontend::{
    CallSite, CalledClass, CalledMethod, ClassModel, MethodModel, ProgramModel, Visibility,
};
use crate::jpol::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DiagnosticKind {
    NonPublicAction,
    NonPrivateAuxiliary,
    ForbiddenCalleeGroup,
    CrossRoleCall,
    PermissionDenied,
    ResourceInstantiationOutsideRoleModel,
    UnresolvedReceiver,
    ClassificationError,
    MissingRoleComponent,
    PackageLayout,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Callee {
    pub class: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostic {
    pub class_name: String,
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
    pub kind: DiagnosticKind,
    pub severity: Severity,
    pub message: String,
    pub callee: Option<Callee>,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `<file>:<line>: <kind>: <message>`; warnings are marked as such.
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}: ", file.display(), self.line)?,
            None => write!(f, "<policy>:{}: ", self.line)?,
        }
        if self.severity == Severity::Warning {
            f.write_str("warning: ")?;
        }
        write!(f, "{}: {}", self.kind, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub diagnostics: Vec<Diagnostic>,
    /// Number of call sites examined; equals the program's call count.
    pub calls_examined: usize,
}

impl Verdict {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Also require the package layout of the design patterns.
    pub strict_packages: bool,
}

struct Suite<'a> {
    class: &'a ClassModel,
    policy: &'a Policy,
    groups: &'a GroupTables,
    out: Vec<Diagnostic>,
}

/// What the group suite says about one call into a program class.
enum Outcome {
    Allowed,
    Violation(DiagnosticKind, String),
}

use Outcome::{Allowed, Violation};

fn forbidden(group: GroupKind, caller: GroupKind) -> Outcome {
    Violation(
        DiagnosticKind::ForbiddenCalleeGroup,
        format!("a {caller} class may not call a {group} class"),
    )
}

fn cross_role(group: GroupKind, callee_role: &str, own_role: &str) -> Outcome {
    Violation(
        DiagnosticKind::CrossRoleCall,
        format!("call into the {group} of role `{callee_role}` from a class of role `{own_role}`"),
    )
}

impl<'a> Suite<'a> {
    fn new(class: &'a ClassModel, policy: &'a Policy, groups: &'a GroupTables) -> Self {
        Suite {
            class,
            policy,
            groups,
            out: Vec::new(),
        }
    }

    fn push(
        &mut self,
        line: usize,
        column: usize,
        kind: DiagnosticKind,
        severity: Severity,
        message: String,
        callee: Option<Callee>,
    ) {
        self.out.push(Diagnostic {
            class_name: self.class.name.clone(),
            file: None,
            line,
            column,
            kind,
            severity,
            message,
            callee,
        });
    }

    fn method_visibility(&mut self) {
        let Some(resource) = self.policy.resource(&self.class.name) else {
            return;
        };
        let methods: Vec<&MethodModel> = self
            .class
            .methods
            .iter()
            .filter(|m| m.is_ordinary())
            .collect();
        for m in methods {
            if resource.has_action(&m.name) {
                if m.modifier != Visibility::Public {
                    self.push(
                        m.line,
                        1,
                        DiagnosticKind::NonPublicAction,
                        Severity::Error,
                        format!("action `{}` must be public, found {}", m.name, m.modifier),
                        None,
                    );
                }
            } else if m.modifier != Visibility::Private {
                self.push(
                    m.line,
                    1,
                    DiagnosticKind::NonPrivateAuxiliary,
                    Severity::Error,
                    format!(
                        "`{}` is not an action of `{}` and must be private, found {}",
                        m.name, resource.name, m.modifier
                    ),
                    None,
                );
            }
        }
    }

    /// Runs `rule` on every call into a program class.
    fn calls(
        &mut self,
        caller: GroupKind,
        rule: impl Fn(&Self, &CallSite, &str, GroupKind, Option<&str>) -> Outcome,
    ) {
        let class = self.class;
        for (_, call) in class.calls() {
            let callee = Callee {
                class: call.called_class.to_string(),
                method: call.called_method.to_string(),
            };
            let CalledClass::Class(target) = &call.called_class else {
                let severity = if caller == GroupKind::Other {
                    Severity::Warning
                } else {
                    Severity::Error
                };
                self.push(
                    call.line,
                    call.column,
                    DiagnosticKind::UnresolvedReceiver,
                    severity,
                    format!(
                        "cannot resolve the class of the receiver of `{}`",
                        call.called_method
                    ),
                    Some(callee),
                );
                continue;
            };
            let Some(group) = self.groups.group_of(target) else {
                continue;
            };
            let outcome = if group.kind == GroupKind::Resource
                && call.called_method == CalledMethod::Constructor
            {
                if matches!(caller, GroupKind::RoleModel | GroupKind::Resource) {
                    Allowed
                } else {
                    Violation(
                        DiagnosticKind::ResourceInstantiationOutsideRoleModel,
                        format!(
                            "resource `{target}` may only be instantiated in role model classes"
                        ),
                    )
                }
            } else {
                rule(self, call, target, group.kind, group.role)
            };
            if let Violation(kind, message) = outcome {
                self.push(
                    call.line,
                    call.column,
                    kind,
                    Severity::Error,
                    message,
                    Some(callee),
                );
            }
        }
    }

    /// Permission check for a call into a resource class.
    fn permission(&self, role: &str, call: &CallSite, resource: &str) -> Outcome {
        let Some(action) = call.called_method.name() else {
            return Allowed;
        };
        if !self.policy.is_action(resource, action)
            || self.policy.is_permitted(role, resource, action)
        {
            return Allowed;
        }
        Violation(
            DiagnosticKind::PermissionDenied,
            format!(
                "Invocation not permitted: role `{role}` has no permission [{resource}, {action}]"
            ),
        )
    }

    fn own_role(&self, kind: GroupKind) -> &'a str {
        let table = match kind {
            GroupKind::RoleModel => &self.groups.role_model_classes,
            GroupKind::RoleController => &self.groups.role_controller_classes,
            _ => &self.groups.role_view_classes,
        };
        table
            .get(&self.class.name)
            .map(String::as_str)
            .unwrap_or_default()
    }
}

pub fn check_resource_class(
    c: &ClassModel,
    policy: &Policy,
    groups: &GroupTables,
) -> Vec<Diagnostic> {
    let mut suite = Suite::new(c, policy, groups);
    suite.method_visibility();
    suite.calls(GroupKind::Resource, |_, _, _, group, _| match group {
        GroupKind::RoleModel
        | GroupKind::RoleController
        | GroupKind::RoleView
        | GroupKind::Session => forbidden(group, GroupKind::Resource),
        GroupKind::Resource | GroupKind::Other => Allowed,
    });
    suite.out
}

pub fn check_role_model_class(
    c: &ClassModel,
    policy: &Policy,
    groups: &GroupTables,
) -> Vec<Diagnostic> {
    let mut suite = Suite::new(c, policy, groups);
    let role = suite.own_role(GroupKind::RoleModel);
    suite.calls(
        GroupKind::RoleModel,
        |s, call, target, group, callee_role| match group {
            GroupKind::Resource => s.permission(role, call, target),
            GroupKind::RoleModel if target == c.name => Allowed,
            GroupKind::RoleModel => cross_role(group, callee_role.unwrap_or_default(), role),
            GroupKind::RoleController | GroupKind::RoleView | GroupKind::Session => {
                forbidden(group, GroupKind::RoleModel)
            }
            GroupKind::Other => Allowed,
        },
    );
    suite.out
}

pub fn check_role_controller_class(
    c: &ClassModel,
    policy: &Policy,
    groups: &GroupTables,
) -> Vec<Diagnostic> {
    let mut suite = Suite::new(c, policy, groups);
    let role = suite.own_role(GroupKind::RoleController);
    suite.calls(
        GroupKind::RoleController,
        |s, call, target, group, callee_role| {
            let callee_role = callee_role.unwrap_or_default();
            match group {
                GroupKind::Resource => s.permission(role, call, target),
                GroupKind::RoleModel | GroupKind::RoleView if callee_role == role => Allowed,
                GroupKind::RoleController if target == c.name => Allowed,
                GroupKind::RoleModel | GroupKind::RoleController | GroupKind::RoleView => {
                    cross_role(group, callee_role, role)
                }
                GroupKind::Session => forbidden(group, GroupKind::RoleController),
                GroupKind::Other => Allowed,
            }
        },
    );
    suite.out
}

pub fn check_role_view_class(
    c: &ClassModel,
    policy: &Policy,
    groups: &GroupTables,
) -> Vec<Diagnostic> {
    let mut suite = Suite::new(c, policy, groups);
    let role = suite.own_role(GroupKind::RoleView);
    suite.calls(
        GroupKind::RoleView,
        |s, call, target, group, callee_role| {
            let callee_role = callee_role.unwrap_or_default();
            match group {
                GroupKind::Resource => s.permission(role, call, target),
                GroupKind::RoleModel | GroupKind::Session => forbidden(group, GroupKind::RoleView),
                GroupKind::RoleController | GroupKind::RoleView if callee_role == role => Allowed,
                GroupKind::RoleController | GroupKind::RoleView => {
                    cross_role(group, callee_role, role)
                }
                GroupKind::Other => Allowed,
            }
        },
    );
    suite.out
}

pub fn check_session_class(
    c: &ClassModel,
    policy: &Policy,
    groups: &GroupTables,
) -> Vec<Diagnostic> {
    let mut suite = Suite::new(c, policy, groups);
    suite.calls(GroupKind::Session, |_, _, _, group, _| match group {
        GroupKind::Resource | GroupKind::RoleModel => forbidden(group, GroupKind::Session),
        _ => Allowed,
    });
    suite.out
}

pub fn check_other_class(c: &ClassModel, policy: &Policy, groups: &GroupTables) -> Vec<Diagnostic> {
    let mut suite = Suite::new(c, policy, groups);
    suite.calls(GroupKind::Other, |_, _, _, group, _| match group {
        GroupKind::Other => Allowed,
        _ => forbidden(group, GroupKind::Other),
    });
    suite.out
}

/// Runs the suite for the class's group. Diagnostics depend only on the
/// class, the tables and the policy.
pub fn check_class(c: &ClassModel, policy: &Policy, groups: &GroupTables) -> Vec<Diagnostic> {
    let kind = groups
        .group_of(&c.name)
        .map(|g| g.kind)
        .unwrap_or(GroupKind::Other);
    match kind {
        GroupKind::Resource => check_resource_class(c, policy, groups),
        GroupKind::RoleModel => check_role_model_class(c, policy, groups),
        GroupKind::RoleController => check_role_controller_class(c, policy, groups),
        GroupKind::RoleView => check_role_view_class(c, policy, groups),
        GroupKind::Session => check_session_class(c, policy, groups),
        GroupKind::Other => check_other_class(c, policy, groups),
    }
}

/// Package-name lint for the layout of the design patterns. Other classes
/// are not constrained.
pub fn check_package_layout(c: &ClassModel, groups: &GroupTables) -> Option<Diagnostic> {
    let group = groups.group_of(&c.name)?.kind;
    let segments: Vec<&str> = c.package.split('.').filter(|s| !s.is_empty()).collect();
    let (ok, expected) = match group {
        GroupKind::Resource | GroupKind::RoleModel => (
            segments.iter().any(|s| s.contains("model")),
            "a package containing `model`",
        ),
        GroupKind::RoleController => (
            segments.iter().any(|s| s.contains("controller")),
            "a package containing `controller`",
        ),
        GroupKind::RoleView => (
            segments
                .iter()
                .take(segments.len().saturating_sub(1))
                .any(|s| s.contains("view")),
            "a package containing `view.<name>`",
        ),
        GroupKind::Session => (segments.contains(&"session"), "the `session` package"),
        GroupKind::Other => (true, ""),
    };
    (!ok).then(|| Diagnostic {
        class_name: c.name.clone(),
        file: None,
        line: 1,
        column: 1,
        kind: DiagnosticKind::PackageLayout,
        severity: Severity::Error,
        message: format!(
            "{group} class `{}` must be in {expected}, found package `{}`",
            c.name, c.package
        ),
        callee: None,
    })
}

fn sort_diagnostics(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by(|a, b| {
        (
            a.file.is_none(),
            &a.file,
            a.line,
            a.column,
            &a.class_name,
            a.kind,
        )
            .cmp(&(
                b.file.is_none(),
                &b.file,
                b.line,
                b.column,
                &b.class_name,
                b.kind,
            ))
    });
}

pub fn verify_program(policy: &Policy, program: &ProgramModel) -> Verdict {
    verify_program_with(policy, program, CheckOptions::default())
}

/// Classifies the program and runs every suite. The program is accepted
/// iff no error-severity diagnostic is produced.
pub fn verify_program_with(
    policy: &Policy,
    program: &ProgramModel,
    options: CheckOptions,
) -> Verdict {
    let groups = match classify(program, policy) {
        Ok(groups) => groups,
        Err(e) => {
            let class = match &e {
                crate::classify::ClassifyError::AmbiguousClassification { class, .. }
                | crate::classify::ClassifyError::NoSuchRole { class, .. } => class.clone(),
            };
            return Verdict {
                accepted: false,
                diagnostics: vec![Diagnostic {
                    file: program.path_of(&class).map(|p| p.to_path_buf()),
                    class_name: class,
                    line: 1,
                    column: 1,
                    kind: DiagnosticKind::ClassificationError,
                    severity: Severity::Error,
                    message: e.to_string(),
                    callee: None,
                }],
                calls_examined: 0,
            };
        }
    };

    let mut diagnostics = Vec::new();
    let mut calls_examined = 0;
    for class in program.classes.values() {
        calls_examined += class.call_count();
        let file = program.path_of(&class.name).map(|p| p.to_path_buf());
        let mut found = check_class(class, policy, &groups);
        if options.strict_packages {
            found.extend(check_package_layout(class, &groups));
        }
        for mut d in found {
            d.file = file.clone();
            diagnostics.push(d);
        }
    }
    for (role, missing) in &groups.incomplete_roles {
        let missing: Vec<String> = missing.iter().map(|g| g.to_string()).collect();
        diagnostics.push(Diagnostic {
            class_name: role.clone(),
            file: None,
            line: 0,
            column: 0,
            kind: DiagnosticKind::MissingRoleComponent,
            severity: Severity::Warning,
            message: format!("role `{role}` has no {} class", missing.join(" or ")),
            callee: None,
        });
    }
    sort_diagnostics(&mut diagnostics);
    Verdict {
        accepted: !diagnostics.iter().any(Diagnostic::is_error),
        diagnostics,
        calls_examined,
    }
}
