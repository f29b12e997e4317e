//! Random policies and programs for the differential and reachability
//! suites. Programs are emitted as Java source so that every generated case
//! also goes through the real frontend.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rbac_verifier::frontend::{parse_sources, ProgramModel, ReceiverForm};
use rbac_verifier::jpol::{load_policy, Policy};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn gp_policy_path() -> PathBuf {
    fixture_dir().join("gp_surgery/policy.jpol")
}

/// Parses every `.java` file below `dir`, paths relative to `dir`.
pub fn load_tree(dir: &Path) -> ProgramModel {
    let sources = rbac_verifier::cli::collect_sources(dir)
        .unwrap()
        .into_iter()
        .map(|(path, relative)| (relative, fs::read_to_string(path).unwrap()))
        .collect();
    parse_sources(sources).unwrap()
}

pub fn gp_tree() -> ProgramModel {
    load_tree(&fixture_dir().join("gp_surgery/src"))
}

pub fn gp_policy() -> Policy {
    load_policy(&fs::read_to_string(gp_policy_path()).unwrap()).unwrap()
}

/// Classes given as `(name, members)`, wrapped in `public class <name> { }`
/// so that the first member line is line 2.
pub fn program(classes: &[(&str, &str)]) -> ProgramModel {
    let sources = classes
        .iter()
        .map(|(name, members)| {
            (
                PathBuf::from(format!("{name}.java")),
                format!("public class {name} {{\n{members}\n}}\n"),
            )
        })
        .collect();
    parse_sources(sources).unwrap()
}

pub type Row = (String, String, String, usize, ReceiverForm);

/// `(enclosing method, called class, called method, line, form)` per call.
pub fn rows(program: &ProgramModel, class: &str) -> Vec<Row> {
    program
        .class(class)
        .unwrap()
        .calls()
        .map(|(m, c)| {
            (
                m.name.clone(),
                c.called_class.to_string(),
                c.called_method.to_string(),
                c.line,
                c.receiver_form,
            )
        })
        .collect()
}

pub fn row(m: &str, class: &str, method: &str, line: usize, form: ReceiverForm) -> Row {
    (m.into(), class.into(), method.into(), line, form)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every call follows the design patterns and the policy.
    Conforming,
    /// A conforming program plus one random call.
    Injected,
    /// Random calls and visibilities throughout.
    Random,
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub roles: (usize, usize),
    pub resources: (usize, usize),
    pub actions: (usize, usize),
    pub max_classes: usize,
    /// Calls per method, upper bound.
    pub density: usize,
}

/// Roughly 500 classes.
pub const LARGE: Shape = Shape {
    roles: (180, 180),
    resources: (20, 20),
    actions: (1, 4),
    max_classes: 500,
    density: 3,
};

pub const SMALL: Shape = Shape {
    roles: (1, 6),
    resources: (1, 4),
    actions: (1, 4),
    max_classes: 30,
    density: 3,
};

pub struct Generated {
    pub policy_text: String,
    pub sources: Vec<(PathBuf, String)>,
}

impl Generated {
    pub fn load(&self) -> (Policy, ProgramModel) {
        let policy = load_policy(&self.policy_text).expect("generated policy is valid");
        let program = parse_sources(self.sources.clone()).expect("generated source parses");
        (policy, program)
    }
}

const ROLE_NAMES: &[&str] = &[
    "Admin",
    "Nurse",
    "Doctor",
    "Clerk",
    "AdminSenior",
    "Auditor",
    "Porter",
];
const RESOURCE_NAMES: &[&str] = &["Record", "Ledger", "Chart", "Invoice", "Prescription"];
const ACTION_NAMES: &[&str] = &["read", "write", "open", "close", "sign"];
const VIEW_TAILS: &[&str] = &["", "Main", "List", "Edit"];
const SESSION_NAMES: &[&str] = &["SessionModel", "SessionController", "SessionViewLogin"];
const OTHER_NAMES: &[&str] = &["Helper", "Formatter", "Clock"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum G {
    Res(usize),
    Model(usize),
    Ctrl(usize),
    View(usize),
    Sess,
    Other,
}

struct Class {
    name: String,
    group: G,
    fields: Vec<(String, String)>,
    methods: Vec<Method>,
}

struct Method {
    name: String,
    visibility: &'static str,
    is_static: bool,
    returns: String,
    body: Vec<String>,
}

struct Role {
    name: String,
    parent: Option<usize>,
    permissions: BTreeSet<(usize, usize)>,
}

struct Resource {
    name: String,
    actions: Vec<String>,
}

struct Gen {
    rng: ChaCha8Rng,
    roles: Vec<Role>,
    resources: Vec<Resource>,
    classes: Vec<Class>,
    fresh: usize,
}

fn names(pool: &[&str], prefix: &str, n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    if n <= pool.len() {
        let mut v: Vec<String> = pool.iter().map(|s| s.to_string()).collect();
        v.shuffle(rng);
        v.truncate(n);
        v
    } else {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl Gen {
    fn new(seed: u64, shape: &Shape) -> Gen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_roles = rng.gen_range(shape.roles.0..=shape.roles.1);
        let n_res = rng.gen_range(shape.resources.0..=shape.resources.1);
        let role_names = names(ROLE_NAMES, "Dept", n_roles, &mut rng);
        let res_names = names(RESOURCE_NAMES, "Store", n_res, &mut rng);
        let resources: Vec<Resource> = res_names
            .into_iter()
            .map(|name| {
                let k = rng.gen_range(shape.actions.0..=shape.actions.1);
                Resource {
                    name,
                    actions: names(ACTION_NAMES, "act", k, &mut rng),
                }
            })
            .collect();
        let mut roles = Vec::new();
        for (i, name) in role_names.into_iter().enumerate() {
            let parent = (i > 0 && rng.gen_bool(0.4)).then(|| rng.gen_range(0..i));
            let mut permissions = BTreeSet::new();
            for (ri, r) in resources.iter().enumerate() {
                for ai in 0..r.actions.len() {
                    if rng.gen_bool(0.4) {
                        permissions.insert((ri, ai));
                    }
                }
            }
            roles.push(Role {
                name,
                parent,
                permissions,
            });
        }
        Gen {
            rng,
            roles,
            resources,
            classes: Vec::new(),
            fresh: 0,
        }
    }

    fn permitted(&self, role: usize, res: usize, action: usize) -> bool {
        let mut cur = Some(role);
        while let Some(r) = cur {
            if self.roles[r].permissions.contains(&(res, action)) {
                return true;
            }
            cur = self.roles[r].parent;
        }
        false
    }

    fn policy_text(&mut self) -> String {
        let mut out = String::from("// generated\n");
        let quote = |rng: &mut ChaCha8Rng, s: &str| {
            if rng.gen_bool(0.5) {
                format!("'{s}'")
            } else {
                format!("`{s}'")
            }
        };
        for (i, r) in self.resources.iter().enumerate() {
            let q = quote(&mut self.rng, &r.name);
            let _ = writeln!(out, "Resource res{i} = new Resource({q});");
            for a in &r.actions {
                let q = quote(&mut self.rng, a);
                let _ = writeln!(out, "res{i}.addAction({q});");
            }
        }
        for (i, role) in self.roles.iter().enumerate() {
            let q = quote(&mut self.rng, &role.name);
            match role.parent {
                Some(p) => {
                    let _ = writeln!(out, "Role role{i} = new Role({q}) subsumes role{p};");
                }
                None => {
                    let _ = writeln!(out, "Role role{i} = new Role({q});");
                }
            }
            for &(ri, ai) in &role.permissions {
                let r = quote(&mut self.rng, &self.resources[ri].name);
                let a = quote(&mut self.rng, &self.resources[ri].actions[ai]);
                let _ = writeln!(out, "role{i}.addPermission({r}, {a});");
            }
        }
        out
    }

    fn add_class(&mut self, name: String, group: G) {
        let methods = match group {
            G::Res(ri) => {
                let mut m: Vec<Method> = self.resources[ri]
                    .actions
                    .iter()
                    .map(|a| Method {
                        name: a.clone(),
                        visibility: "public",
                        is_static: false,
                        returns: "void".into(),
                        body: Vec::new(),
                    })
                    .collect();
                m.push(Method {
                    name: "audit".into(),
                    visibility: "private",
                    is_static: false,
                    returns: "void".into(),
                    body: Vec::new(),
                });
                m
            }
            _ => vec![
                Method {
                    name: "run".into(),
                    visibility: "public",
                    is_static: false,
                    returns: "void".into(),
                    body: Vec::new(),
                },
                Method {
                    name: "step".into(),
                    visibility: "public",
                    is_static: false,
                    returns: "void".into(),
                    body: Vec::new(),
                },
                Method {
                    name: "me".into(),
                    visibility: "public",
                    is_static: false,
                    returns: name.clone(),
                    body: vec!["return this;".into()],
                },
                Method {
                    name: "util".into(),
                    visibility: "public",
                    is_static: true,
                    returns: "void".into(),
                    body: Vec::new(),
                },
            ],
        };
        self.classes.push(Class {
            name,
            group,
            fields: Vec::new(),
            methods,
        });
    }

    fn build_classes(&mut self, shape: &Shape) {
        let mut planned: Vec<(String, G)> = Vec::new();
        for ri in 0..self.resources.len() {
            if self.rng.gen_bool(0.9) {
                planned.push((self.resources[ri].name.clone(), G::Res(ri)));
            }
        }
        for r in 0..self.roles.len() {
            let name = self.roles[r].name.clone();
            if self.rng.gen_bool(0.9) {
                planned.push((format!("{name}Model"), G::Model(r)));
            }
            if self.rng.gen_bool(0.9) {
                planned.push((format!("{name}Controller"), G::Ctrl(r)));
            }
            let mut tails = VIEW_TAILS.to_vec();
            tails.shuffle(&mut self.rng);
            for tail in tails.iter().take(self.rng.gen_range(0..=2)) {
                planned.push((format!("{name}View{tail}"), G::View(r)));
            }
        }
        for s in SESSION_NAMES {
            if self.rng.gen_bool(0.5) {
                planned.push((s.to_string(), G::Sess));
            }
        }
        for o in OTHER_NAMES {
            if self.rng.gen_bool(0.5) {
                planned.push((o.to_string(), G::Other));
            }
        }
        if planned.len() > shape.max_classes {
            // keep resources and the first classes of each kind
            planned.truncate(shape.max_classes);
        }
        for (name, group) in planned {
            self.add_class(name, group);
        }
    }

    /// Whether the design patterns allow a call from `from` to a method of
    /// `to`; `Some(action)` is a resource action.
    fn allowed(&self, from: usize, to: usize, action: Option<usize>, ctor: bool) -> bool {
        let (a, b) = (self.classes[from].group, self.classes[to].group);
        let perm = |role: usize| match (b, action) {
            (G::Res(ri), Some(ai)) => self.permitted(role, ri, ai),
            _ => true,
        };
        if let G::Res(_) = b {
            if ctor {
                return matches!(a, G::Model(_) | G::Res(_));
            }
        }
        match (a, b) {
            (G::Res(_), G::Res(_) | G::Other) => true,
            (G::Res(_), _) => false,
            (G::Model(r), G::Res(_)) => perm(r),
            (G::Model(_), G::Model(_)) => from == to,
            (G::Model(_), G::Other) => true,
            (G::Model(_), _) => false,
            (G::Ctrl(r), G::Res(_)) => perm(r),
            (G::Ctrl(r), G::Model(s) | G::View(s)) => r == s,
            (G::Ctrl(_), G::Ctrl(_)) => from == to,
            (G::Ctrl(_), G::Sess) => false,
            (G::Ctrl(_), G::Other) => true,
            (G::View(r), G::Res(_)) => perm(r),
            (G::View(_), G::Model(_) | G::Sess) => false,
            (G::View(r), G::Ctrl(s) | G::View(s)) => r == s,
            (G::View(_), G::Other) => true,
            (G::Sess, G::Res(_) | G::Model(_)) => false,
            (G::Sess, _) => true,
            (G::Other, G::Other) => true,
            (G::Other, _) => false,
        }
    }

    fn field_for(&mut self, from: usize, to: usize) -> String {
        let ty = self.classes[to].name.clone();
        if let Some((_, name)) = self.classes[from].fields.iter().find(|(t, _)| *t == ty) {
            return name.clone();
        }
        let name = format!("f{}", self.classes[from].fields.len());
        self.classes[from].fields.push((ty, name.clone()));
        name
    }

    fn fresh(&mut self) -> usize {
        self.fresh += 1;
        self.fresh
    }

    /// Emits one call from a random method of `from` to `to`.
    fn emit(&mut self, from: usize, to: usize, method: Option<String>, ctor: bool) {
        let target = self.classes[to].name.clone();
        let is_res = matches!(self.classes[to].group, G::Res(_));
        let stmt = if ctor {
            let v = self.fresh();
            format!("{target} v{v} = new {target}();")
        } else {
            let m = method.unwrap_or_else(|| "run".into());
            let form = self.rng.gen_range(0..4);
            match form {
                0 if !is_res => format!("{target}.util();"),
                1 => {
                    let v = self.fresh();
                    let f = self.field_for(from, to);
                    format!("{target} v{v} = {f};\n        v{v}.{m}();")
                }
                2 if !is_res => {
                    let f = self.field_for(from, to);
                    format!("{f}.me().{m}();")
                }
                _ => {
                    let f = self.field_for(from, to);
                    format!("{f}.{m}();")
                }
            }
        };
        let instance: Vec<usize> = (0..self.classes[from].methods.len())
            .filter(|&i| !self.classes[from].methods[i].is_static)
            .collect();
        let mi = *instance.choose(&mut self.rng).unwrap_or(&0);
        let body = &mut self.classes[from].methods[mi].body;
        // keep `return this;` last
        let at = if body.last().is_some_and(|s| s.starts_with("return")) {
            body.len() - 1
        } else {
            body.len()
        };
        body.insert(at, stmt);
    }

    fn random_target(&mut self, to: usize) -> (Option<String>, Option<usize>, bool) {
        if self.rng.gen_bool(0.15) {
            return (None, None, true);
        }
        match self.classes[to].group {
            G::Res(ri) => {
                let k = self.resources[ri].actions.len();
                let pick = self.rng.gen_range(0..=k);
                if pick == k {
                    (Some("audit".into()), None, false)
                } else {
                    (
                        Some(self.resources[ri].actions[pick].clone()),
                        Some(pick),
                        false,
                    )
                }
            }
            _ => {
                let m = ["run", "step"][self.rng.gen_range(0..2)];
                (Some(m.to_string()), None, false)
            }
        }
    }

    fn index_of(&self, group: G) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].group == group)
            .collect()
    }

    /// The main flow of each role: views call the controller, the
    /// controller calls the model, the model calls permitted actions.
    fn pattern_calls(&mut self) {
        for r in 0..self.roles.len() {
            let models = self.index_of(G::Model(r));
            let controllers = self.index_of(G::Ctrl(r));
            let views = self.index_of(G::View(r));
            for &c in &controllers {
                for &m in &models {
                    self.emit(c, m, Some("run".into()), false);
                }
                if let Some(&v) = views.first() {
                    self.emit(c, v, Some("step".into()), true);
                }
            }
            for &v in &views {
                for &c in &controllers {
                    self.emit(v, c, Some("step".into()), false);
                }
            }
            let granted: Vec<(usize, usize)> = (0..self.classes.len())
                .filter_map(|i| match self.classes[i].group {
                    G::Res(ri) => Some((i, ri)),
                    _ => None,
                })
                .flat_map(|(i, ri)| {
                    (0..self.resources[ri].actions.len()).map(move |ai| (i, ri, ai))
                })
                .filter(|&(_, ri, ai)| self.permitted(r, ri, ai))
                .map(|(i, _, ai)| (i, ai))
                .collect();
            for &m in &models {
                for &(i, ai) in granted
                    .iter()
                    .filter(|_| self.rng.gen_bool(0.7))
                    .collect::<Vec<_>>()
                {
                    let G::Res(ri) = self.classes[i].group else {
                        continue;
                    };
                    let action = self.resources[ri].actions[ai].clone();
                    self.emit(m, i, Some(action), false);
                }
            }
        }
    }

    fn conforming_calls(&mut self, shape: &Shape) {
        self.pattern_calls();
        let n = self.classes.len();
        for from in 0..n {
            let k = self.rng.gen_range(0..=shape.density * 2);
            for _ in 0..k {
                let to = self.rng.gen_range(0..n);
                let (method, action, ctor) = self.random_target(to);
                if self.allowed(from, to, action, ctor) {
                    self.emit(from, to, method, ctor);
                }
            }
            if self.rng.gen_bool(0.3) {
                self.library_call(from);
            }
        }
    }

    fn random_calls(&mut self, shape: &Shape) {
        let n = self.classes.len();
        for from in 0..n {
            let k = self.rng.gen_range(0..=shape.density);
            for _ in 0..k {
                let to = self.rng.gen_range(0..n);
                let (method, _, ctor) = self.random_target(to);
                self.emit(from, to, method, ctor);
            }
            if self.rng.gen_bool(0.05) {
                let mi = self.rng.gen_range(0..self.classes[from].methods.len());
                self.classes[from].methods[mi]
                    .body
                    .insert(0, "ghost.run();".into());
            }
            if let G::Res(_) = self.classes[from].group {
                for m in &mut self.classes[from].methods {
                    if self.rng.gen_bool(0.08) {
                        m.visibility = if m.visibility == "public" {
                            "private"
                        } else {
                            "public"
                        };
                    }
                }
            }
        }
    }

    fn library_call(&mut self, from: usize) {
        let mi = self.rng.gen_range(0..self.classes[from].methods.len());
        self.classes[from].methods[mi]
            .body
            .insert(0, "String s = \"x\";\n        s.length();".into());
    }

    fn sources(&self) -> Vec<(PathBuf, String)> {
        self.classes
            .iter()
            .map(|c| {
                let mut text = String::from("package gen;\n\n");
                let _ = writeln!(text, "public class {} {{", c.name);
                for (ty, name) in &c.fields {
                    let _ = writeln!(text, "    private {ty} {name};");
                }
                for m in &c.methods {
                    let stat = if m.is_static { "static " } else { "" };
                    let _ = writeln!(
                        text,
                        "\n    {} {stat}{} {}() {{",
                        m.visibility, m.returns, m.name
                    );
                    for s in &m.body {
                        let _ = writeln!(text, "        {s}");
                    }
                    text.push_str("    }\n");
                }
                text.push_str("}\n");
                (PathBuf::from(format!("gen/{}.java", c.name)), text)
            })
            .collect()
    }
}

pub fn generate(seed: u64, mode: Mode, shape: &Shape) -> Generated {
    let mut g = Gen::new(seed, shape);
    g.build_classes(shape);
    match mode {
        Mode::Conforming => g.conforming_calls(shape),
        Mode::Injected => {
            g.conforming_calls(shape);
            if !g.classes.is_empty() {
                let n = g.classes.len();
                let (from, to) = (g.rng.gen_range(0..n), g.rng.gen_range(0..n));
                let (method, _, ctor) = g.random_target(to);
                g.emit(from, to, method, ctor);
            }
        }
        Mode::Random => g.random_calls(shape),
    }
    Generated {
        policy_text: g.policy_text(),
        sources: g.sources(),
    }
}

/// Mode for the i-th case of a mixed suite.
pub fn mixed_mode(i: u64) -> Mode {
    match i % 10 {
        0..=3 => Mode::Conforming,
        4..=6 => Mode::Injected,
        _ => Mode::Random,
    }
}

// ----- token-level call counting -----

const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

fn strip_comments_and_literals(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            i += 2;
        } else if c == '"' || c == '\'' {
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            out.push_str(" 0 ");
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

/// Counts `IDENT (` occurrences that are invocations or creations: the
/// identifier is not a keyword and is not preceded by a type (which would
/// make it a declaration).
pub fn count_invocations(text: &str) -> usize {
    let text = strip_comments_and_literals(text);
    let mut tokens: Vec<String> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                i += 1;
            }
            tokens.push(chars[start..i].iter().collect());
        } else {
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
            i += 1;
        }
    }
    let is_word = |t: &str| {
        t.chars()
            .next()
            .is_some_and(|c| c.is_alphabetic() || c == '_')
    };
    let mut count = 0;
    for k in 0..tokens.len().saturating_sub(1) {
        let t = &tokens[k];
        if tokens[k + 1] != "(" || !is_word(t) || JAVA_KEYWORDS.contains(&t.as_str()) {
            continue;
        }
        let declaration = k > 0 && {
            let prev = tokens[k - 1].as_str();
            prev == "]"
                || (is_word(prev) && !["new", "return", "throw", "else", "do"].contains(&prev))
        };
        if !declaration {
            count += 1;
        }
    }
    count
}
