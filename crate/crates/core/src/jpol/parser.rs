use crate::Position;

use super::ast::{PolicyAst, Statement};
use super::lexer::{tokenize, Token, TokenKind};
use super::PolicyParseError;

const KEYWORDS: &[&str] = &["Role", "Resource", "new", "subsumes"];

/// Parses JPol source text. Only syntax is checked here; name resolution
/// happens in [`super::build_tables`].
pub fn parse_policy(text: &str) -> Result<PolicyAst, PolicyParseError> {
    let tokens = tokenize(text)?;
    let end = tokens
        .last()
        .map(|t| Position::new(t.pos.line, t.pos.column + 1))
        .unwrap_or(Position::new(1, 1));
    let mut parser = Parser {
        tokens,
        index: 0,
        end,
    };
    let mut ast = PolicyAst::default();
    loop {
        let pos = parser.pos();
        let stmt = parser.statement()?;
        parser.expect(&TokenKind::Semi, "`;`")?;
        ast.push(stmt, pos);
        if parser.at_end() {
            break;
        }
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    index: usize,
    end: Position,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index)
    }

    fn pos(&self) -> Position {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn error(&self, expected: &str) -> PolicyParseError {
        let found = match self.peek() {
            Some(t) => t.kind.to_string(),
            None => "end of input".to_string(),
        };
        PolicyParseError::new(self.pos(), found, expected)
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> Result<(), PolicyParseError> {
        match self.peek() {
            Some(t) if &t.kind == kind => {
                self.index += 1;
                Ok(())
            }
            _ => Err(self.error(expected)),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), PolicyParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(s),
                ..
            }) if s == word => {
                self.index += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("`{word}`"))),
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Ident(s), .. }) if s == word)
    }

    /// A bare identifier that is not a keyword.
    fn id(&mut self) -> Result<String, PolicyParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(s),
                ..
            }) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.index += 1;
                Ok(s)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    /// An argument inside `name` / `permission`: quoted or bare.
    fn arg(&mut self) -> Result<String, PolicyParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Quoted(s) | TokenKind::Ident(s),
                ..
            }) => {
                let s = s.clone();
                self.index += 1;
                Ok(s)
            }
            _ => Err(self.error("a quoted identifier")),
        }
    }

    fn name(&mut self) -> Result<String, PolicyParseError> {
        self.expect(&TokenKind::LParen, "`(`")?;
        let name = self.arg()?;
        self.expect(&TokenKind::RParen, "`)`")?;
        Ok(name)
    }

    fn permission(&mut self) -> Result<(String, String), PolicyParseError> {
        self.expect(&TokenKind::LParen, "`(`")?;
        let resource = self.arg()?;
        self.expect(&TokenKind::Comma, "`,`")?;
        let action = self.arg()?;
        self.expect(&TokenKind::RParen, "`)`")?;
        Ok((resource, action))
    }

    fn statement(&mut self) -> Result<Statement, PolicyParseError> {
        if self.is_keyword("Role") {
            self.index += 1;
            let id = self.id()?;
            self.expect(&TokenKind::Equals, "`=`")?;
            self.keyword("new")?;
            self.keyword("Role")?;
            let name = self.name()?;
            if self.is_keyword("subsumes") {
                self.index += 1;
                let parent = self.id()?;
                return Ok(Statement::DecRoleSubsume { id, name, parent });
            }
            return Ok(Statement::DecRole { id, name });
        }
        if self.is_keyword("Resource") {
            self.index += 1;
            let id = self.id()?;
            self.expect(&TokenKind::Equals, "`=`")?;
            self.keyword("new")?;
            self.keyword("Resource")?;
            let name = self.name()?;
            return Ok(Statement::DecRes { id, name });
        }
        let target = self
            .id()
            .map_err(|_| self.error("`Role`, `Resource` or an identifier"))?;
        self.expect(&TokenKind::Dot, "`.`")?;
        if self.is_keyword("addAction") {
            self.index += 1;
            let action = self.name()?;
            Ok(Statement::AddActRes {
                resource_id: target,
                action,
            })
        } else if self.is_keyword("addPermission") {
            self.index += 1;
            let (resource, action) = self.permission()?;
            Ok(Statement::AddPermRole {
                role_id: target,
                resource,
                action,
            })
        } else {
            Err(self.error("`addAction` or `addPermission`"))
        }
    }
}
