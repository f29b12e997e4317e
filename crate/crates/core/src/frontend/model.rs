use std::fmt;

use serde::Serialize;

/// Name of the synthetic method that owns calls made in field initializers.
pub const FIELD_INIT: &str = "<fieldinit>";

/// Marker for primitive and `void` return types.
pub const VOID: &str = "void";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
    Protected,
    /// No visibility keyword.
    Package,
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Protected => "protected",
            Visibility::Package => "default",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub declared_type: String,
    pub modifier: Visibility,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub declared_type: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Method,
    Constructor,
    /// The synthetic [`FIELD_INIT`] method.
    FieldInit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodModel {
    pub name: String,
    pub kind: MethodKind,
    pub modifier: Visibility,
    pub return_type: String,
    pub params: Vec<Param>,
    pub calls: Vec<CallSite>,
    /// Line of the method header.
    pub line: usize,
    /// Line of the closing brace (equal to `line` for bodiless methods).
    pub end_line: usize,
}

impl MethodModel {
    /// A plain method with no parameters and no calls.
    pub fn new(name: impl Into<String>, modifier: Visibility, line: usize) -> Self {
        MethodModel {
            name: name.into(),
            kind: MethodKind::Method,
            modifier,
            return_type: VOID.to_string(),
            params: Vec::new(),
            calls: Vec::new(),
            line,
            end_line: line,
        }
    }

    pub fn is_ordinary(&self) -> bool {
        self.kind == MethodKind::Method
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum CalledClass {
    Class(String),
    Unresolved,
}

impl CalledClass {
    pub fn name(&self) -> Option<&str> {
        match self {
            CalledClass::Class(c) => Some(c),
            CalledClass::Unresolved => None,
        }
    }
}

impl fmt::Display for CalledClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalledClass::Class(c) => f.write_str(c),
            CalledClass::Unresolved => f.write_str("<unresolved>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CalledMethod {
    Method(String),
    Constructor,
}

impl CalledMethod {
    pub fn name(&self) -> Option<&str> {
        match self {
            CalledMethod::Method(m) => Some(m),
            CalledMethod::Constructor => None,
        }
    }
}

impl fmt::Display for CalledMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalledMethod::Method(m) => f.write_str(m),
            CalledMethod::Constructor => f.write_str("<init>"),
        }
    }
}

/// The syntactic shape of an invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReceiverForm {
    /// `ClassName.m()`
    StaticClass,
    /// `x.m()`, `x.f.m()`
    Variable,
    /// `x.m1().m2()`, `new T().m()`, `(expr).m()`
    Chained,
    /// `new T()`
    New,
    /// `m()`, `this.m()`
    SelfRef,
}

/// Type expression for the receiver of a call, evaluated against the
/// classes that are known at resolution time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Receiver {
    /// Statically known type name.
    Type(String),
    /// `this`: the enclosing class.
    This,
    /// A bare identifier that is not a parameter or local: a field of the
    /// enclosing class if one exists, otherwise a class name.
    Name(String),
    /// Type of field `.1` of the receiver `.0`.
    Field(Box<Receiver>, String),
    /// Return type of method `.1` called on receiver `.0`.
    Returned(Box<Receiver>, String),
    Unknown,
}

impl Receiver {
    pub(crate) fn field(self, name: impl Into<String>) -> Self {
        Receiver::Field(Box::new(self), name.into())
    }

    pub(crate) fn returned(self, name: impl Into<String>) -> Self {
        Receiver::Returned(Box::new(self), name.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub called_class: CalledClass,
    pub called_method: CalledMethod,
    /// Line of the opening parenthesis.
    pub line: usize,
    pub column: usize,
    pub receiver_form: ReceiverForm,
    pub receiver: Receiver,
}

impl CallSite {
    /// An already-resolved call; used when building models by hand.
    pub fn to(
        class: impl Into<String>,
        method: impl Into<String>,
        line: usize,
        form: ReceiverForm,
    ) -> Self {
        let class = class.into();
        CallSite {
            called_class: CalledClass::Class(class.clone()),
            called_method: CalledMethod::Method(method.into()),
            line,
            column: 1,
            receiver_form: form,
            receiver: Receiver::Type(class),
        }
    }

    pub fn constructor(class: impl Into<String>, line: usize) -> Self {
        let class = class.into();
        CallSite {
            called_class: CalledClass::Class(class.clone()),
            called_method: CalledMethod::Constructor,
            line,
            column: 1,
            receiver_form: ReceiverForm::New,
            receiver: Receiver::Type(class),
        }
    }

    pub fn unresolved(method: impl Into<String>, line: usize) -> Self {
        CallSite {
            called_class: CalledClass::Unresolved,
            called_method: CalledMethod::Method(method.into()),
            line,
            column: 1,
            receiver_form: ReceiverForm::Variable,
            receiver: Receiver::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassModel {
    pub name: String,
    /// Dotted package path, empty for the default package.
    pub package: String,
    pub kind: ClassKind,
    pub modifier: Visibility,
    pub extends: Option<String>,
    pub implements: Vec<String>,
    pub imports: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodModel>,
}

impl ClassModel {
    pub fn new(name: impl Into<String>) -> Self {
        ClassModel {
            name: name.into(),
            package: String::new(),
            kind: ClassKind::Class,
            modifier: Visibility::Public,
            extends: None,
            implements: Vec::new(),
            imports: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// First declared ordinary method with this name (overloads share
    /// resolution by name).
    pub fn method(&self, name: &str) -> Option<&MethodModel> {
        self.methods
            .iter()
            .find(|m| m.is_ordinary() && m.name == name)
    }

    pub fn calls(&self) -> impl Iterator<Item = (&MethodModel, &CallSite)> {
        self.methods
            .iter()
            .flat_map(|m| m.calls.iter().map(move |c| (m, c)))
    }

    pub fn call_count(&self) -> usize {
        self.methods.iter().map(|m| m.calls.len()).sum()
    }
}

/// Strips a package qualifier and array brackets: `a.b.Foo[]` -> `Foo`.
pub(crate) fn simple_type_name(ty: &str) -> &str {
    let ty = ty.trim_end_matches("[]");
    ty.rsplit('.').next().unwrap_or(ty)
}

/// Anything that can answer class lookups during receiver evaluation.
pub(crate) trait ClassLookup {
    fn class(&self, name: &str) -> Option<&ClassModel>;
}

/// Lookup that only knows the class being parsed.
pub(crate) struct OwnClass<'a>(pub &'a ClassModel);

impl ClassLookup for OwnClass<'_> {
    fn class(&self, name: &str) -> Option<&ClassModel> {
        (self.0.name == name).then_some(self.0)
    }
}

fn looks_like_class(name: &str, lookup: &impl ClassLookup) -> bool {
    name.chars().next().is_some_and(char::is_uppercase) || lookup.class(name).is_some()
}

/// Evaluates a receiver to a type name. Field and method lookups only
/// succeed on classes `lookup` knows and never traverse inheritance.
pub(crate) fn evaluate(
    receiver: &Receiver,
    enclosing: &ClassModel,
    lookup: &impl ClassLookup,
) -> Option<String> {
    match receiver {
        Receiver::Type(t) => Some(t.clone()),
        Receiver::This => Some(enclosing.name.clone()),
        Receiver::Unknown => None,
        Receiver::Name(n) => match enclosing.field(n) {
            Some(f) => Some(f.declared_type.clone()),
            None if looks_like_class(n, lookup) => Some(n.clone()),
            None => None,
        },
        Receiver::Field(base, field) => {
            let base = evaluate(base, enclosing, lookup)?;
            if base.ends_with("[]") {
                return None;
            }
            let class = lookup.class(simple_type_name(&base))?;
            class.field(field).map(|f| f.declared_type.clone())
        }
        Receiver::Returned(base, method) => {
            let base = evaluate(base, enclosing, lookup)?;
            if base.ends_with("[]") {
                return None;
            }
            let class = lookup.class(simple_type_name(&base))?;
            let ret = &class.method(method)?.return_type;
            (ret != VOID).then(|| ret.clone())
        }
    }
}

/// Form of a call whose receiver is `receiver`, given the form recorded by
/// the parser. Only bare-name receivers depend on context.
pub(crate) fn receiver_form(
    receiver: &Receiver,
    parsed: ReceiverForm,
    enclosing: &ClassModel,
    lookup: &impl ClassLookup,
) -> ReceiverForm {
    match receiver {
        Receiver::Name(n)
            if parsed == ReceiverForm::Variable || parsed == ReceiverForm::StaticClass =>
        {
            if enclosing.field(n).is_none() && looks_like_class(n, lookup) {
                ReceiverForm::StaticClass
            } else {
                ReceiverForm::Variable
            }
        }
        _ => parsed,
    }
}

const OBJECT_METHODS: &[&str] = &[
    "clone",
    "equals",
    "finalize",
    "getClass",
    "hashCode",
    "notify",
    "notifyAll",
    "toString",
    "wait",
];

/// Whether `method` is known to be the one declared in `class`: declared
/// there, or an `Object` method of a class without a superclass. Anything
/// else may be inherited from an unknown class.
fn declares(class: &ClassModel, method: &str) -> bool {
    class.method(method).is_some() || (class.extends.is_none() && OBJECT_METHODS.contains(&method))
}

/// Re-resolves every call of `class` against `lookup`. A call of a method
/// that the receiver's class does not declare is unresolved.
pub(crate) fn resolve_with(class: &ClassModel, lookup: &impl ClassLookup) -> ClassModel {
    let mut resolved = class.clone();
    for method in &mut resolved.methods {
        for call in &mut method.calls {
            call.called_class = called_class_of(evaluate(&call.receiver, class, lookup));
            call.receiver_form = receiver_form(&call.receiver, call.receiver_form, class, lookup);
            if let (CalledClass::Class(target), CalledMethod::Method(m)) =
                (&call.called_class, &call.called_method)
            {
                if lookup.class(target).is_some_and(|c| !declares(c, m)) {
                    call.called_class = CalledClass::Unresolved;
                }
            }
        }
    }
    resolved
}

/// Turns an evaluated receiver type into the called class.
pub(crate) fn called_class_of(ty: Option<String>) -> CalledClass {
    match ty {
        Some(t) if t.ends_with("[]") => CalledClass::Class(format!("{}[]", simple_type_name(&t))),
        Some(t) => CalledClass::Class(simple_type_name(&t).to_string()),
        None => CalledClass::Unresolved,
    }
}
