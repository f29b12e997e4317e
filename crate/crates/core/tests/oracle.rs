mod common;

use std::fs;

use common::{fixture_dir, gp_policy, gp_tree, load_tree, program};
use rbac_verifier::checker::verify_program;
use rbac_verifier::frontend::{parse_sources, ProgramModel};
use rbac_verifier::oracle::{
    check_satisfaction, naive_ok, simulate_sessions, unauthorized, ReachableAccess,
};

fn accesses_of<'a>(all: &'a [ReachableAccess], role: &str) -> Vec<(&'a str, &'a str)> {
    all.iter()
        .filter(|a| a.role == role)
        .map(|a| (a.resource.as_str(), a.action.as_str()))
        .collect()
}

/// The fixture tree with one file replaced.
fn gp_with(path: &str, text: &str) -> ProgramModel {
    let root = fixture_dir().join("gp_surgery/src");
    let sources = rbac_verifier::cli::collect_sources(&root)
        .unwrap()
        .into_iter()
        .map(|(full, rel)| {
            let text = if rel.to_str() == Some(path) {
                text.to_string()
            } else {
                fs::read_to_string(full).unwrap()
            };
            (rel, text)
        })
        .collect();
    parse_sources(sources).unwrap()
}

#[test]
fn naive_evaluator_examples() {
    let policy = gp_policy();
    assert!(naive_ok(&policy, &ProgramModel::new()));
    assert!(naive_ok(&policy, &gp_tree()));
    let cross = gp_with(
        "surgery/model/AdminModel.java",
        "package surgery.model;\nimport surgery.controller.NHSDoctorController;\n\
         public class AdminModel {\n    private NHSDoctorController other;\n\
         public String[] allNames() { other.start(); return new String[0]; }\n}\n",
    );
    assert!(!naive_ok(&policy, &cross));
    assert!(!verify_program(&policy, &cross).accepted);
}

#[test]
fn fixture_reachability() {
    let policy = gp_policy();
    let sim = simulate_sessions(&policy, &gp_tree());
    assert_eq!(
        accesses_of(&sim.accesses, "NHSDoctor"),
        [("Nhspatient", "getFirstName")]
    );
    assert_eq!(
        accesses_of(&sim.accesses, "PrivateDoctor"),
        [("Privatepatient", "getFirstName")]
    );
    assert_eq!(
        accesses_of(&sim.accesses, "Admin"),
        [
            ("Nhspatient", "getFirstName"),
            ("Privatepatient", "getFirstName")
        ]
    );
    assert!(sim.gaps.is_empty());
    assert!(check_satisfaction(&policy, &sim.accesses));

    let nhs = sim.accesses.iter().find(|a| a.role == "NHSDoctor").unwrap();
    let path: Vec<String> = nhs.path.iter().map(|(c, m)| format!("{c}.{m}")).collect();
    assert_eq!(
        path,
        [
            "NHSDoctorController.start",
            "NHSDoctorModel.patientName",
            "Nhspatient.getFirstName"
        ]
    );
}

#[test]
fn role_without_controller_or_views_reaches_nothing() {
    let policy = gp_policy();
    let p = program(&[
        (
            "Nhspatient",
            "public String getFirstName() { return \"a\"; }",
        ),
        (
            "NHSDoctorModel",
            "private Nhspatient p;\npublic String n() { return p.getFirstName(); }",
        ),
    ]);
    assert!(simulate_sessions(&policy, &p).accesses.is_empty());
}

#[test]
fn injected_access_breaks_satisfaction() {
    let policy = gp_policy();
    let violating = load_tree(&fixture_dir().join("gp_surgery/violating"));
    // otherName is never called from the controller, so nothing unauthorized is reachable
    assert!(check_satisfaction(
        &policy,
        &simulate_sessions(&policy, &violating).accesses
    ));

    let reached = gp_with(
        "surgery/model/NHSDoctorModel.java",
        "package surgery.model;\npublic class NHSDoctorModel {\n\
         private Privatepatient other = new Privatepatient(\"Bob\");\n\
         public String patientName() { return other.getFirstName(); }\n}\n",
    );
    let sim = simulate_sessions(&policy, &reached);
    assert!(!check_satisfaction(&policy, &sim.accesses));
    let bad: Vec<_> = unauthorized(&policy, &sim.accesses)
        .into_iter()
        .map(|a| (a.role.as_str(), a.resource.as_str(), a.action.as_str()))
        .collect();
    assert_eq!(bad, [("NHSDoctor", "Privatepatient", "getFirstName")]);
    assert!(!verify_program(&policy, &reached).accepted);
}

#[test]
fn unresolved_calls_are_reported_as_gaps() {
    let policy = gp_policy();
    let p = program(&[("AdminController", "public void start() { ghost.run(); }")]);
    let sim = simulate_sessions(&policy, &p);
    assert_eq!(sim.gaps.len(), 1);
    assert_eq!(
        (sim.gaps[0].class.as_str(), sim.gaps[0].line),
        ("AdminController", 2)
    );
}
