//! Compile-time enforcement of hierarchical RBAC policies.
//!
//! A policy written in JPol declares resources with their actions and roles
//! with their permissions. A program written in a small Java-like subset is
//! parsed into per-class models, the classes are grouped by naming rules
//! (resources, role model/controller/view classes, session classes, others),
//! and every call site is checked against the rules for its group. A program
//! passing all checks never lets a role reach an action it was not granted,
//! so no run-time access checks are needed.
//!
//! ```
//! use rbac_verifier::{jpol, frontend, checker};
//!
//! let policy = jpol::load_policy(
//!     "Resource r = new Resource('Ledger'); r.addAction('read');
//!      Role a = new Role('Auditor'); a.addPermission('Ledger', 'read');",
//! ).unwrap();
//! let program = frontend::parse_sources(vec![(
//!     "AuditorModel.java".into(),
//!     "public class AuditorModel { public void audit(Ledger l) { l.read(); } }".to_string(),
//! )]).unwrap();
//! assert!(checker::verify_program(&policy, &program).accepted);
//! ```

pub mod checker;
pub mod classify;
pub mod cli;
pub mod frontend;
pub mod jpol;
pub mod oracle;
mod position;

pub use position::Position;
