use std::collections::HashMap;
use std::path::Path;

use crate::Position;

use super::lexer::{is_keyword, tokenize, Tok, Token, PRIMITIVES};
use super::model::{
    resolve_with, CallSite, CalledClass, CalledMethod, ClassKind, ClassModel, FieldDecl,
    MethodKind, MethodModel, OwnClass, Param, Receiver, ReceiverForm, Visibility, FIELD_INIT, VOID,
};
use super::SourceParseError;

type PResult<T> = Result<T, SourceParseError>;

/// How an expression may act as a call receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hint {
    /// Bare identifier not bound to a parameter or local.
    Name,
    /// Parameter, local, or a field path rooted at one.
    Var,
    This,
    Other,
}

#[derive(Debug, Clone)]
struct Expr {
    receiver: Receiver,
    hint: Hint,
}

impl Expr {
    fn unknown() -> Self {
        Expr {
            receiver: Receiver::Unknown,
            hint: Hint::Other,
        }
    }
}

struct Modifiers {
    visibility: Visibility,
}

/// Parses one source file of the supported Java subset. Calls are resolved
/// as far as the class itself allows; [`super::resolve_calls`] completes
/// resolution against the whole program.
pub fn parse_class(text: &str, path: &Path) -> Result<ClassModel, SourceParseError> {
    let tokens = tokenize(text).map_err(|e| SourceParseError {
        path: path.to_path_buf(),
        position: e.pos,
        message: e.message,
    })?;
    let end = tokens
        .last()
        .map(|t| Position::new(t.pos.line, t.pos.column + 1))
        .unwrap_or(Position::new(1, 1));
    let mut parser = Parser {
        tokens,
        index: 0,
        path,
        end,
        class_name: String::new(),
        scopes: Vec::new(),
        calls: Vec::new(),
    };
    let class = parser.compilation_unit()?;

    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        if !stem.is_empty() && stem != class.name {
            return Err(SourceParseError {
                path: path.to_path_buf(),
                position: Position::new(1, 1),
                message: format!(
                    "class `{}` must be declared in a file named `{}.java`",
                    class.name, class.name
                ),
            });
        }
    }
    Ok(resolve_with(&class, &OwnClass(&class)))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    index: usize,
    path: &'a Path,
    end: Position,
    class_name: String,
    scopes: Vec<HashMap<String, String>>,
    calls: Vec<CallSite>,
}

impl Parser<'_> {
    fn pos(&self) -> Position {
        self.tokens
            .get(self.index)
            .map(|t| t.pos)
            .unwrap_or(self.end)
    }

    fn error_at(&self, position: Position, message: impl Into<String>) -> SourceParseError {
        SourceParseError {
            path: self.path.to_path_buf(),
            position,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> SourceParseError {
        self.error_at(self.pos(), message)
    }

    fn expected(&self, what: &str) -> SourceParseError {
        let found = match self.tokens.get(self.index).map(|t| &t.tok) {
            None => "end of file".to_string(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Punct(p)) => format!("`{p}`"),
            Some(Tok::Number) => "number".to_string(),
            Some(Tok::Str) => "string literal".to_string(),
            Some(Tok::Char) => "character literal".to_string(),
        };
        self.error(format!("expected {what}, found {found}"))
    }

    fn tok_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.index + offset).map(|t| &t.tok)
    }

    fn is_punct_at(&self, offset: usize, p: &str) -> bool {
        matches!(self.tok_at(offset), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_punct(&self, p: &str) -> bool {
        self.is_punct_at(0, p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.index += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Position> {
        let pos = self.pos();
        if self.eat_punct(p) {
            Ok(pos)
        } else {
            Err(self.expected(&format!("`{p}`")))
        }
    }

    fn is_kw_at(&self, offset: usize, kw: &str) -> bool {
        matches!(self.tok_at(offset), Some(Tok::Ident(s)) if s == kw)
    }

    fn is_kw(&self, kw: &str) -> bool {
        self.is_kw_at(0, kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.index += 1;
            true
        } else {
            false
        }
    }

    fn is_name_at(&self, offset: usize) -> bool {
        matches!(self.tok_at(offset), Some(Tok::Ident(s)) if !is_keyword(s))
    }

    fn ident(&mut self) -> PResult<String> {
        match self.tok_at(0) {
            Some(Tok::Ident(s)) if !is_keyword(s) => {
                let s = s.clone();
                self.index += 1;
                Ok(s)
            }
            _ => Err(self.expected("an identifier")),
        }
    }

    fn unsupported(&self, what: &str) -> SourceParseError {
        self.error(format!("{what} is outside the supported language subset"))
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is_punct(".") && self.is_name_at(1) {
            self.index += 1;
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    // ----- declarations -----

    fn compilation_unit(&mut self) -> PResult<ClassModel> {
        let mut package = String::new();
        if self.eat_kw("package") {
            package = self.qualified_name()?;
            self.expect_punct(";")?;
        }
        let mut imports = Vec::new();
        while self.eat_kw("import") {
            if self.is_kw("static") {
                return Err(self.unsupported("static import"));
            }
            let mut name = self.qualified_name()?;
            if self.eat_punct(".") {
                self.expect_punct("*")?;
                name.push_str(".*");
            }
            self.expect_punct(";")?;
            imports.push(name);
        }

        let mods = self.modifiers()?;
        let kind = if self.eat_kw("class") {
            ClassKind::Class
        } else if self.eat_kw("interface") {
            ClassKind::Interface
        } else if self.is_kw("enum") {
            return Err(self.unsupported("enum declaration"));
        } else {
            return Err(self.expected("`class` or `interface`"));
        };
        let name = self.ident()?;
        if self.is_punct("<") {
            return Err(self.unsupported("generic class"));
        }
        self.class_name = name.clone();

        let mut class = ClassModel::new(name);
        class.package = package;
        class.imports = imports;
        class.kind = kind;
        class.modifier = mods.visibility;

        if self.eat_kw("extends") {
            let first = self.type_name()?;
            if kind == ClassKind::Interface {
                class.implements.push(first);
                while self.eat_punct(",") {
                    class.implements.push(self.type_name()?);
                }
            } else {
                class.extends = Some(first);
            }
        }
        if self.eat_kw("implements") {
            loop {
                class.implements.push(self.type_name()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }

        self.expect_punct("{")?;
        let mut field_init = MethodModel {
            kind: MethodKind::FieldInit,
            ..MethodModel::new(FIELD_INIT, Visibility::Private, 0)
        };
        while !self.eat_punct("}") {
            if self.index >= self.tokens.len() {
                return Err(self.expected("`}`"));
            }
            self.member(&mut class, &mut field_init)?;
        }
        if self.index < self.tokens.len() {
            return Err(self.error("only one top-level class per file is supported"));
        }
        if !field_init.calls.is_empty() {
            class.methods.push(field_init);
        }

        let mut seen = HashMap::new();
        for m in class
            .methods
            .iter()
            .filter(|m| m.kind != MethodKind::FieldInit)
        {
            if let Some(first) = seen.insert((m.name.as_str(), m.params.len()), m.line) {
                return Err(self.error_at(
                    Position::new(m.line, 1),
                    format!(
                        "method `{}` with {} parameter(s) is already declared at line {first}",
                        m.name,
                        m.params.len()
                    ),
                ));
            }
        }
        Ok(class)
    }

    fn modifiers(&mut self) -> PResult<Modifiers> {
        let mut visibility = None;
        loop {
            if self.is_punct("@") {
                return Err(self.unsupported("annotation"));
            }
            let pos = self.pos();
            let vis = if self.eat_kw("public") {
                Some(Visibility::Public)
            } else if self.eat_kw("private") {
                Some(Visibility::Private)
            } else if self.eat_kw("protected") {
                Some(Visibility::Protected)
            } else if [
                "static",
                "final",
                "abstract",
                "synchronized",
                "native",
                "transient",
                "volatile",
                "strictfp",
            ]
            .iter()
            .any(|m| self.eat_kw(m))
            {
                None
            } else {
                break;
            };
            if let Some(v) = vis {
                if visibility.replace(v).is_some() {
                    return Err(self.error_at(pos, "conflicting visibility modifiers"));
                }
            }
        }
        Ok(Modifiers {
            visibility: visibility.unwrap_or(Visibility::Package),
        })
    }

    /// Class or interface type in an `extends` / `implements` clause.
    fn type_name(&mut self) -> PResult<String> {
        let name = self.qualified_name()?;
        if self.is_punct("<") {
            return Err(self.unsupported("generic type"));
        }
        Ok(name)
    }

    fn parse_type(&mut self) -> PResult<String> {
        let mut ty = match self.tok_at(0) {
            Some(Tok::Ident(s)) if PRIMITIVES.contains(&s.as_str()) || s == VOID => {
                let s = s.clone();
                self.index += 1;
                s
            }
            _ => self.qualified_name()?,
        };
        if self.is_punct("<") {
            return Err(self.unsupported("generic type"));
        }
        while self.is_punct("[") && self.is_punct_at(1, "]") {
            self.index += 2;
            ty.push_str("[]");
        }
        Ok(ty)
    }

    /// Length in tokens of a type starting at `offset`, without consuming.
    fn type_len_at(&self, offset: usize) -> Option<usize> {
        let mut k = offset;
        match self.tok_at(k) {
            Some(Tok::Ident(s)) if PRIMITIVES.contains(&s.as_str()) => k += 1,
            Some(Tok::Ident(s)) if !is_keyword(s) => {
                k += 1;
                while self.is_punct_at(k, ".") && self.is_name_at(k + 1) {
                    k += 2;
                }
            }
            _ => return None,
        }
        while self.is_punct_at(k, "[") && self.is_punct_at(k + 1, "]") {
            k += 2;
        }
        Some(k - offset)
    }

    /// `Type name` followed by `=`, `;`, `,` or `:`.
    fn at_local_decl(&self) -> bool {
        let Some(len) = self.type_len_at(0) else {
            return false;
        };
        self.is_name_at(len)
            && [";", "=", ",", ":"]
                .iter()
                .any(|p| self.is_punct_at(len + 1, p))
    }

    fn member(&mut self, class: &mut ClassModel, field_init: &mut MethodModel) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        let line = self.pos().line;
        let mods = self.modifiers()?;
        if self.is_punct("{") {
            return Err(self.unsupported("initializer block"));
        }
        if ["class", "interface", "enum"].iter().any(|k| self.is_kw(k)) {
            return Err(self.unsupported("nested type"));
        }
        if self.is_punct("<") {
            return Err(self.unsupported("generic method"));
        }
        let default_vis = match class.kind {
            ClassKind::Interface if mods.visibility == Visibility::Package => Visibility::Public,
            _ => mods.visibility,
        };

        if self.is_kw(&self.class_name.clone()) && self.is_punct_at(1, "(") {
            self.index += 1;
            let method = self.method_rest(
                class.name.clone(),
                MethodKind::Constructor,
                default_vis,
                VOID.to_string(),
                line,
            )?;
            class.methods.push(method);
            return Ok(());
        }

        let ty = self.parse_type()?;
        let name = self.ident()?;
        if self.is_punct("(") {
            let method = self.method_rest(name, MethodKind::Method, default_vis, ty, line)?;
            class.methods.push(method);
            return Ok(());
        }

        let mut name = name;
        loop {
            let field_line = self.pos().line;
            class.fields.push(FieldDecl {
                name,
                declared_type: ty.clone(),
                modifier: mods.visibility,
                line: field_line,
            });
            if self.eat_punct("=") {
                let before = field_init.calls.len();
                self.scopes = vec![HashMap::new()];
                let start = self.pos().line;
                self.calls = std::mem::take(&mut field_init.calls);
                self.expression()?;
                field_init.calls = std::mem::take(&mut self.calls);
                if field_init.calls.len() > before {
                    if field_init.line == 0 {
                        field_init.line = start;
                    }
                    field_init.end_line = self.tokens[self.index - 1].pos.line;
                }
            }
            if !self.eat_punct(",") {
                break;
            }
            name = self.ident()?;
        }
        self.expect_punct(";")?;
        Ok(())
    }

    fn method_rest(
        &mut self,
        name: String,
        kind: MethodKind,
        modifier: Visibility,
        return_type: String,
        line: usize,
    ) -> PResult<MethodModel> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                self.eat_kw("final");
                if self.is_punct("@") {
                    return Err(self.unsupported("annotation"));
                }
                let mut declared_type = self.parse_type()?;
                if self.eat_punct("...") {
                    declared_type.push_str("[]");
                }
                let name = self.ident()?;
                params.push(Param {
                    name,
                    declared_type,
                });
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        if self.eat_kw("throws") {
            loop {
                self.type_name()?;
                if !self.eat_punct(",") {
                    break;
                }
            }
        }

        let mut method = MethodModel {
            kind,
            return_type,
            ..MethodModel::new(name, modifier, line)
        };
        if self.eat_punct(";") {
            method.params = params;
            return Ok(method);
        }
        self.scopes = vec![params
            .iter()
            .map(|p| (p.name.clone(), p.declared_type.clone()))
            .collect()];
        self.calls.clear();
        self.expect_punct("{")?;
        method.end_line = self.block_rest()?;
        method.params = params;
        method.calls = std::mem::take(&mut self.calls);
        Ok(method)
    }

    // ----- statements -----

    fn lookup(&self, name: &str) -> Option<&String> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare(&mut self, name: String, ty: String) {
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name, ty);
        }
    }

    /// Statements up to and including the closing brace; returns its line.
    fn block_rest(&mut self) -> PResult<usize> {
        self.scopes.push(HashMap::new());
        loop {
            let pos = self.pos();
            if self.eat_punct("}") {
                self.scopes.pop();
                return Ok(pos.line);
            }
            if self.index >= self.tokens.len() {
                return Err(self.expected("`}`"));
            }
            self.statement()?;
        }
    }

    /// A statement in its own scope (branch or loop body).
    fn scoped_statement(&mut self) -> PResult<()> {
        self.scopes.push(HashMap::new());
        let result = self.statement();
        self.scopes.pop();
        result
    }

    fn statement(&mut self) -> PResult<()> {
        if self.eat_punct("{") {
            self.block_rest()?;
            return Ok(());
        }
        if self.eat_punct(";") {
            return Ok(());
        }
        if self.eat_kw("if") {
            self.paren_expression()?;
            self.scoped_statement()?;
            if self.eat_kw("else") {
                self.scoped_statement()?;
            }
            return Ok(());
        }
        if self.eat_kw("while") {
            self.paren_expression()?;
            return self.scoped_statement();
        }
        if self.eat_kw("do") {
            self.scoped_statement()?;
            if !self.eat_kw("while") {
                return Err(self.expected("`while`"));
            }
            self.paren_expression()?;
            self.expect_punct(";")?;
            return Ok(());
        }
        if self.eat_kw("for") {
            return self.for_statement();
        }
        if self.eat_kw("return") || self.eat_kw("throw") {
            if !self.eat_punct(";") {
                self.expression()?;
                self.expect_punct(";")?;
            }
            return Ok(());
        }
        if self.eat_kw("break") || self.eat_kw("continue") {
            if self.is_name_at(0) {
                self.index += 1;
            }
            self.expect_punct(";")?;
            return Ok(());
        }
        for kw in [
            "try",
            "switch",
            "synchronized",
            "assert",
            "class",
            "interface",
            "enum",
        ] {
            if self.is_kw(kw) {
                return Err(self.unsupported(&format!("`{kw}` statement")));
            }
        }
        if self.is_punct("@") {
            return Err(self.unsupported("annotation"));
        }
        if self.eat_kw("final") || self.at_local_decl() {
            self.local_decl()?;
            self.expect_punct(";")?;
            return Ok(());
        }
        self.expression()?;
        self.expect_punct(";")?;
        Ok(())
    }

    fn local_decl(&mut self) -> PResult<()> {
        let ty = self.parse_type()?;
        loop {
            let name = self.ident()?;
            let mut declared = ty.clone();
            while self.is_punct("[") && self.is_punct_at(1, "]") {
                self.index += 2;
                declared.push_str("[]");
            }
            if self.eat_punct("=") {
                if self.is_punct("{") {
                    return Err(self.unsupported("array initializer"));
                }
                self.expression()?;
            }
            self.declare(name, declared);
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    fn for_statement(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        self.scopes.push(HashMap::new());
        self.eat_kw("final");
        let foreach = self
            .type_len_at(0)
            .is_some_and(|len| self.is_name_at(len) && self.is_punct_at(len + 1, ":"));
        if foreach {
            let ty = self.parse_type()?;
            let name = self.ident()?;
            self.expect_punct(":")?;
            self.expression()?;
            self.declare(name, ty);
        } else {
            if self.at_local_decl() {
                self.local_decl()?;
            } else if !self.is_punct(";") {
                self.expression_list()?;
            }
            self.expect_punct(";")?;
            if !self.is_punct(";") {
                self.expression()?;
            }
            self.expect_punct(";")?;
            if !self.is_punct(")") {
                self.expression_list()?;
            }
        }
        self.expect_punct(")")?;
        let result = self.scoped_statement();
        self.scopes.pop();
        result
    }

    fn expression_list(&mut self) -> PResult<()> {
        loop {
            self.expression()?;
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    fn paren_expression(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        self.expression()?;
        self.expect_punct(")")?;
        Ok(())
    }

    // ----- expressions -----

    fn expression(&mut self) -> PResult<Expr> {
        let lhs = self.ternary()?;
        const ASSIGN: &[&str] = &[
            "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
        ];
        if ASSIGN.iter().any(|op| self.is_punct(op)) {
            self.index += 1;
            self.expression()?;
            return Ok(Expr::unknown());
        }
        if self.is_punct("->") || self.is_punct("::") {
            return Err(self.unsupported("lambda or method reference"));
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if self.eat_punct("?") {
            self.expression()?;
            self.expect_punct(":")?;
            self.ternary()?;
            return Ok(Expr::unknown());
        }
        Ok(cond)
    }

    fn binary_precedence(&self) -> Option<u8> {
        let Some(Tok::Punct(p)) = self.tok_at(0) else {
            return self.is_kw("instanceof").then_some(7);
        };
        Some(match *p {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | ">" | "<=" | ">=" => 7,
            "<<" | ">>" | ">>>" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        })
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(prec) = self.binary_precedence() {
            if prec <= min {
                break;
            }
            if self.eat_kw("instanceof") {
                self.parse_type()?;
            } else {
                self.index += 1;
                self.binary(prec)?;
            }
            lhs = Expr::unknown();
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        for op in ["!", "~", "-", "+", "++", "--"] {
            if self.eat_punct(op) {
                self.unary()?;
                return Ok(Expr::unknown());
            }
        }
        let primary = self.primary()?;
        self.postfix(primary)
    }

    fn record_call(
        &mut self,
        receiver: Receiver,
        method: CalledMethod,
        form: ReceiverForm,
        at: Position,
    ) {
        self.calls.push(CallSite {
            called_class: CalledClass::Unresolved,
            called_method: method,
            line: at.line,
            column: at.column,
            receiver_form: form,
            receiver,
        });
    }

    fn arguments(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        if self.eat_punct(")") {
            return Ok(());
        }
        loop {
            self.expression()?;
            if self.eat_punct(")") {
                return Ok(());
            }
            self.expect_punct(",")?;
        }
    }

    fn starts_operand(&self) -> bool {
        match self.tok_at(0) {
            Some(Tok::Ident(s)) => {
                !is_keyword(s) || ["this", "new", "true", "false", "null"].contains(&s.as_str())
            }
            Some(Tok::Number | Tok::Str | Tok::Char) => true,
            Some(Tok::Punct(p)) => *p == "(" || *p == "!" || *p == "~",
            None => false,
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.tok_at(0).cloned() {
            Some(Tok::Number | Tok::Char) => {
                self.index += 1;
                Ok(Expr::unknown())
            }
            Some(Tok::Str) => {
                self.index += 1;
                Ok(Expr {
                    receiver: Receiver::Type("String".into()),
                    hint: Hint::Other,
                })
            }
            Some(Tok::Punct("(")) => {
                self.index += 1;
                let inner = self.expression()?;
                self.expect_punct(")")?;
                // `(T) expr` is a cast when an operand follows.
                if let (Hint::Name | Hint::Var, Receiver::Name(ty)) = (inner.hint, &inner.receiver)
                {
                    if self.starts_operand() {
                        let ty = ty.clone();
                        self.unary()?;
                        return Ok(Expr {
                            receiver: Receiver::Type(ty),
                            hint: Hint::Other,
                        });
                    }
                }
                Ok(Expr {
                    receiver: inner.receiver,
                    hint: Hint::Other,
                })
            }
            Some(Tok::Ident(word)) => match word.as_str() {
                "this" => {
                    self.index += 1;
                    if self.is_punct("(") {
                        return Err(self.unsupported("constructor chaining"));
                    }
                    Ok(Expr {
                        receiver: Receiver::This,
                        hint: Hint::This,
                    })
                }
                "true" | "false" | "null" => {
                    self.index += 1;
                    Ok(Expr::unknown())
                }
                "new" => {
                    self.index += 1;
                    self.creation()
                }
                "super" => Err(self.unsupported("`super`")),
                w if is_keyword(w) => Err(self.expected("an expression")),
                _ => {
                    self.index += 1;
                    if self.is_punct("(") {
                        let at = self.pos();
                        self.record_call(
                            Receiver::This,
                            CalledMethod::Method(word.clone()),
                            ReceiverForm::SelfRef,
                            at,
                        );
                        self.arguments()?;
                        return Ok(Expr {
                            receiver: Receiver::This.returned(word),
                            hint: Hint::Other,
                        });
                    }
                    Ok(match self.lookup(&word) {
                        Some(ty) => Expr {
                            receiver: Receiver::Type(ty.clone()),
                            hint: Hint::Var,
                        },
                        None => Expr {
                            receiver: Receiver::Name(word),
                            hint: Hint::Name,
                        },
                    })
                }
            },
            _ => Err(self.expected("an expression")),
        }
    }

    fn creation(&mut self) -> PResult<Expr> {
        let mut ty = match self.tok_at(0) {
            Some(Tok::Ident(s)) if PRIMITIVES.contains(&s.as_str()) => {
                let s = s.clone();
                self.index += 1;
                s
            }
            _ => self.qualified_name()?,
        };
        if self.is_punct("<") {
            return Err(self.unsupported("generic type"));
        }
        if self.is_punct("[") {
            while self.eat_punct("[") {
                if !self.is_punct("]") {
                    self.expression()?;
                }
                self.expect_punct("]")?;
                ty.push_str("[]");
            }
            if self.is_punct("{") {
                return Err(self.unsupported("array initializer"));
            }
            return Ok(Expr {
                receiver: Receiver::Type(ty),
                hint: Hint::Other,
            });
        }
        let at = self.pos();
        if !self.is_punct("(") {
            return Err(self.expected("`(`"));
        }
        self.record_call(
            Receiver::Type(ty.clone()),
            CalledMethod::Constructor,
            ReceiverForm::New,
            at,
        );
        self.arguments()?;
        if self.is_punct("{") {
            return Err(self.unsupported("anonymous class"));
        }
        Ok(Expr {
            receiver: Receiver::Type(ty),
            hint: Hint::Other,
        })
    }

    fn postfix(&mut self, mut expr: Expr) -> PResult<Expr> {
        loop {
            if self.eat_punct(".") {
                if ["this", "class", "new", "super"]
                    .iter()
                    .any(|k| self.is_kw(k))
                {
                    return Err(self.unsupported("qualified `this`/`class`/`new`/`super`"));
                }
                if self.is_punct("<") {
                    return Err(self.unsupported("explicit type arguments"));
                }
                let name = self.ident()?;
                if self.is_punct("(") {
                    let at = self.pos();
                    let form = match expr.hint {
                        Hint::This => ReceiverForm::SelfRef,
                        Hint::Name | Hint::Var => ReceiverForm::Variable,
                        Hint::Other => ReceiverForm::Chained,
                    };
                    self.record_call(
                        expr.receiver.clone(),
                        CalledMethod::Method(name.clone()),
                        form,
                        at,
                    );
                    self.arguments()?;
                    expr = Expr {
                        receiver: expr.receiver.returned(name),
                        hint: Hint::Other,
                    };
                } else {
                    let hint = match expr.hint {
                        Hint::Other => Hint::Other,
                        _ => Hint::Var,
                    };
                    expr = Expr {
                        receiver: expr.receiver.field(name),
                        hint,
                    };
                }
            } else if self.eat_punct("[") {
                self.expression()?;
                self.expect_punct("]")?;
                expr = Expr::unknown();
            } else if self.is_punct("++") || self.is_punct("--") {
                self.index += 1;
                expr = Expr::unknown();
            } else {
                return Ok(expr);
            }
        }
    }
}
