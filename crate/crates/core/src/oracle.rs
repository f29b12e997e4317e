//! Independent semantic validators.
//!
//! [`naive_ok`] evaluates the OK-program predicate by direct enumeration,
//! sharing no code with [`crate::classify`] or [`crate::checker`], and is
//! used to cross-check the verifier. [`simulate_sessions`] computes, per
//! role, every action reachable from that role's controller and views, and
//! [`check_satisfaction`] tests the result against the policy.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::classify::{classify, GroupKind, GroupTables};
use crate::frontend::{
    CalledClass, CalledMethod, ClassModel, MethodKind, MethodModel, ProgramModel, Visibility,
};
use crate::jpol::{Permission, Policy};

// ----- naive OK(P) -----

#[derive(Debug, Clone, PartialEq, Eq)]
enum NaiveGroup {
    Res,
    Sess,
    Model(String),
    Ctrl(String),
    View(String),
    Other,
}

/// Group by the naming rules; `None` when two roles tie for a view.
fn naive_group(name: &str, policy: &Policy) -> Option<NaiveGroup> {
    if policy.resources.keys().any(|r| r == name) {
        return Some(NaiveGroup::Res);
    }
    if name.len() >= 7 && &name.as_bytes()[..7] == b"Session" {
        return Some(NaiveGroup::Sess);
    }
    for role in policy.roles.keys() {
        if format!("{role}Model") == name {
            return Some(NaiveGroup::Model(role.clone()));
        }
    }
    for role in policy.roles.keys() {
        if format!("{role}Controller") == name {
            return Some(NaiveGroup::Ctrl(role.clone()));
        }
    }
    let mut best: Vec<&String> = Vec::new();
    for role in policy.roles.keys() {
        if name.starts_with(&format!("{role}View")) {
            match best.first() {
                Some(b) if b.len() > role.len() => {}
                Some(b) if b.len() == role.len() => best.push(role),
                _ => best = vec![role],
            }
        }
    }
    match best.len() {
        0 => Some(NaiveGroup::Other),
        1 => Some(NaiveGroup::View(best[0].clone())),
        _ => None,
    }
}

/// Permission lookup that walks the hierarchy itself instead of using the
/// flattened sets.
fn naive_permitted(policy: &Policy, role: &str, resource: &str, action: &str) -> bool {
    let mut current = Some(role.to_string());
    let mut steps = 0;
    while let Some(r) = current {
        let Some(role) = policy.roles.get(&r) else {
            return false;
        };
        if role
            .declared_permissions
            .contains(&Permission::new(resource, action))
        {
            return true;
        }
        steps += 1;
        if steps > policy.roles.len() {
            return false;
        }
        current = role.subsumes.clone();
    }
    false
}

fn is_action(policy: &Policy, resource: &str, method: &str) -> bool {
    policy
        .resources
        .get(resource)
        .is_some_and(|r| r.actions.iter().any(|a| a == method))
}

/// Decides whether one call from `caller` (in group `from`) is acceptable.
fn naive_call_ok(
    policy: &Policy,
    program: &ProgramModel,
    caller: &str,
    from: &NaiveGroup,
    class: &CalledClass,
    method: &CalledMethod,
) -> bool {
    let CalledClass::Class(callee) = class else {
        return *from == NaiveGroup::Other;
    };
    if !program.classes.contains_key(callee) {
        return true;
    }
    let Some(to) = naive_group(callee, policy) else {
        return false;
    };
    let action_ok = |role: &str| match method {
        CalledMethod::Method(m) if is_action(policy, callee, m) => {
            naive_permitted(policy, role, callee, m)
        }
        _ => true,
    };
    if to == NaiveGroup::Res && *method == CalledMethod::Constructor {
        return matches!(from, NaiveGroup::Model(_) | NaiveGroup::Res);
    }
    match (from, &to) {
        (NaiveGroup::Res, t) => matches!(t, NaiveGroup::Res | NaiveGroup::Other),
        (NaiveGroup::Model(r), NaiveGroup::Res) => action_ok(r),
        (NaiveGroup::Model(_), NaiveGroup::Model(_)) => callee == caller,
        (NaiveGroup::Model(_), NaiveGroup::Other) => true,
        (NaiveGroup::Model(_), _) => false,
        (NaiveGroup::Ctrl(r), NaiveGroup::Res) => action_ok(r),
        (NaiveGroup::Ctrl(r), NaiveGroup::Model(s)) => r == s,
        (NaiveGroup::Ctrl(_), NaiveGroup::Ctrl(_)) => callee == caller,
        (NaiveGroup::Ctrl(r), NaiveGroup::View(s)) => r == s,
        (NaiveGroup::Ctrl(_), NaiveGroup::Sess) => false,
        (NaiveGroup::Ctrl(_), NaiveGroup::Other) => true,
        (NaiveGroup::View(r), NaiveGroup::Res) => action_ok(r),
        (NaiveGroup::View(_), NaiveGroup::Model(_) | NaiveGroup::Sess) => false,
        (NaiveGroup::View(r), NaiveGroup::Ctrl(s) | NaiveGroup::View(s)) => r == s,
        (NaiveGroup::View(_), NaiveGroup::Other) => true,
        (NaiveGroup::Sess, t) => !matches!(t, NaiveGroup::Res | NaiveGroup::Model(_)),
        (NaiveGroup::Other, t) => *t == NaiveGroup::Other,
    }
}

/// Evaluates the OK-program predicate clause by clause.
pub fn naive_ok(policy: &Policy, program: &ProgramModel) -> bool {
    let mut groups = Vec::new();
    for (name, class) in &program.classes {
        match naive_group(name, policy) {
            Some(g) => groups.push((class, g)),
            None => return false,
        }
    }

    let resource_methods = || {
        groups
            .iter()
            .filter(|(_, g)| *g == NaiveGroup::Res)
            .flat_map(|(c, _)| c.methods.iter().map(move |m| (*c, m)))
            .filter(|(_, m)| m.kind == MethodKind::Method)
    };
    let actions_public = resource_methods()
        .filter(|(c, m)| is_action(policy, &c.name, &m.name))
        .all(|(_, m)| m.modifier == Visibility::Public);
    let auxiliaries_private = resource_methods()
        .filter(|(c, m)| !is_action(policy, &c.name, &m.name))
        .all(|(_, m)| m.modifier == Visibility::Private);
    let calls_ok = groups.iter().all(|(c, g)| {
        c.methods.iter().all(|m| {
            m.calls.iter().all(|call| {
                naive_call_ok(
                    policy,
                    program,
                    &c.name,
                    g,
                    &call.called_class,
                    &call.called_method,
                )
            })
        })
    });

    actions_public && auxiliaries_private && calls_ok
}

// ----- session simulation -----

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("role `{0}` was not retrieved for this user")]
pub struct NotRetrieved(pub String);

/// Roles of an authenticated user and the one currently activated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionState {
    retrieved_roles: Vec<String>,
    active_role: Option<String>,
}

impl SessionState {
    pub fn new(retrieved_roles: Vec<String>) -> Self {
        SessionState {
            retrieved_roles,
            active_role: None,
        }
    }

    pub fn retrieved_roles(&self) -> &[String] {
        &self.retrieved_roles
    }

    pub fn active_role(&self) -> Option<&str> {
        self.active_role.as_deref()
    }

    pub fn activate(&mut self, role: &str) -> Result<(), NotRetrieved> {
        if !self.retrieved_roles.iter().any(|r| r == role) {
            return Err(NotRetrieved(role.to_string()));
        }
        self.active_role = Some(role.to_string());
        Ok(())
    }

    pub fn deactivate(&mut self) {
        self.active_role = None;
    }
}

/// A `(class, method)` node of the call graph. Constructors use the class
/// name as method name.
pub type Step = (String, String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReachableAccess {
    pub role: String,
    pub resource: String,
    pub action: String,
    /// From an entry method of the role's controller or a view to the
    /// action itself.
    pub path: Vec<Step>,
}

/// A call the simulator could not follow because its receiver is unresolved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gap {
    pub role: String,
    pub class: String,
    pub method: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Simulation {
    /// One entry per reachable (role, resource, action), with a shortest path.
    pub accesses: Vec<ReachableAccess>,
    pub gaps: Vec<Gap>,
}

fn bodies<'c>(class: &'c ClassModel, method: &'c str) -> impl Iterator<Item = &'c MethodModel> {
    let constructor = method == class.name;
    class.methods.iter().filter(move |m| match m.kind {
        MethodKind::Method => m.name == method,
        MethodKind::Constructor | MethodKind::FieldInit => constructor,
    })
}

fn entry_points(class: &ClassModel) -> BTreeSet<String> {
    class
        .methods
        .iter()
        .filter(|m| m.kind != MethodKind::Method || m.modifier == Visibility::Public)
        .map(|m| match m.kind {
            MethodKind::Method => m.name.clone(),
            _ => class.name.clone(),
        })
        .collect()
}

fn closure(
    role: &str,
    policy: &Policy,
    program: &ProgramModel,
    groups: &GroupTables,
    sim: &mut Simulation,
) {
    let mut queue: VecDeque<Vec<Step>> = VecDeque::new();
    let mut visited: BTreeSet<Step> = BTreeSet::new();
    let entries = groups
        .role_controller_classes
        .iter()
        .chain(groups.role_view_classes.iter())
        .filter(|(_, owner)| *owner == role)
        .map(|(class, _)| class);
    for class in entries {
        for method in entry_points(&program.classes[class]) {
            let step = (class.clone(), method);
            if visited.insert(step.clone()) {
                queue.push_back(vec![step]);
            }
        }
    }

    let mut found: BTreeMap<(String, String), Vec<Step>> = BTreeMap::new();
    while let Some(path) = queue.pop_front() {
        let (class_name, method) = path.last().cloned().unwrap_or_default();
        let class = &program.classes[&class_name];
        for body in bodies(class, &method) {
            for call in &body.calls {
                let CalledClass::Class(target) = &call.called_class else {
                    sim.gaps.push(Gap {
                        role: role.to_string(),
                        class: class_name.clone(),
                        method: call.called_method.to_string(),
                        line: call.line,
                    });
                    continue;
                };
                let Some(callee) = program.classes.get(target) else {
                    continue;
                };
                let next_method = match &call.called_method {
                    CalledMethod::Method(m) => m.clone(),
                    CalledMethod::Constructor => target.clone(),
                };
                let mut next = path.clone();
                next.push((target.clone(), next_method.clone()));
                match groups.group_of(target).map(|g| g.kind) {
                    // action bodies and session classes are trusted
                    Some(GroupKind::Resource) => {
                        if policy.is_action(target, &next_method) {
                            found.entry((target.clone(), next_method)).or_insert(next);
                        }
                    }
                    Some(GroupKind::Session) | None => {}
                    Some(_) => {
                        if bodies(callee, &next_method).next().is_some()
                            && visited.insert((target.clone(), next_method))
                        {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    sim.accesses.extend(
        found
            .into_iter()
            .map(|((resource, action), path)| ReachableAccess {
                role: role.to_string(),
                resource,
                action,
                path,
            }),
    );
}

/// For every role, activates it in a session holding all declared roles
/// and computes every action reachable from the role's controller and view
/// classes, assuming every call may execute.
pub fn simulate_sessions(policy: &Policy, program: &ProgramModel) -> Simulation {
    let mut sim = Simulation::default();
    let Ok(groups) = classify(program, policy) else {
        return sim;
    };
    let mut session = SessionState::new(policy.roles.keys().cloned().collect());
    for role in policy.roles.keys() {
        if session.activate(role).is_err() {
            continue;
        }
        if let Some(active) = session.active_role().map(str::to_string) {
            closure(&active, policy, program, &groups, &mut sim);
        }
        session.deactivate();
    }
    sim.accesses.sort();
    sim.gaps.sort();
    sim.gaps.dedup();
    sim
}

/// Accesses whose role lacks the permission.
pub fn unauthorized<'s>(
    policy: &Policy,
    reachable: &'s [ReachableAccess],
) -> Vec<&'s ReachableAccess> {
    reachable
        .iter()
        .filter(|a| !policy.is_permitted(&a.role, &a.resource, &a.action))
        .collect()
}

/// True iff every reachable access is granted to its role.
pub fn check_satisfaction(policy: &Policy, reachable: &[ReachableAccess]) -> bool {
    unauthorized(policy, reachable).is_empty()
}

/// Owner role of each role class, for confinement checks.
pub fn role_class_owners(groups: &GroupTables) -> HashMap<&str, &str> {
    groups
        .role_model_classes
        .iter()
        .chain(&groups.role_controller_classes)
        .chain(&groups.role_view_classes)
        .map(|(c, r)| (c.as_str(), r.as_str()))
        .collect()
}
