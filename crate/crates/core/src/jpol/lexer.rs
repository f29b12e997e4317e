use std::fmt;

use crate::Position;

use super::PolicyParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    /// A quoted identifier. The quotes are not part of the value.
    Quoted(String),
    Equals,
    LParen,
    RParen,
    Comma,
    Dot,
    Semi,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Quoted(s) => write!(f, "'{s}'"),
            TokenKind::Equals => f.write_str("`=`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Semi => f.write_str("`;`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// True if `s` belongs to the ID lexical class.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_continue)
}

fn is_open_quote(c: char) -> bool {
    matches!(c, '\'' | '`' | '\u{2018}')
}

fn is_close_quote(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn pos(&self) -> Position {
        Position::new(self.line, self.column)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, PolicyParseError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' {
            cur.bump();
            if cur.peek() == Some('/') {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                continue;
            }
            return Err(PolicyParseError::new(pos, "/", "a statement"));
        }
        let kind = match c {
            '=' => TokenKind::Equals,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            ';' => TokenKind::Semi,
            c if is_open_quote(c) => {
                cur.bump();
                let mut value = String::new();
                loop {
                    match cur.peek() {
                        Some(c) if is_close_quote(c) => {
                            cur.bump();
                            break;
                        }
                        Some('\n') | None => {
                            return Err(PolicyParseError::new(
                                pos,
                                format!("{c}{value}"),
                                "a closing quote",
                            ));
                        }
                        Some(c) => {
                            value.push(c);
                            cur.bump();
                        }
                    }
                }
                if !is_identifier(&value) {
                    return Err(PolicyParseError::new(
                        pos,
                        format!("'{value}'"),
                        "a quoted identifier",
                    ));
                }
                tokens.push(Token {
                    kind: TokenKind::Quoted(value),
                    pos,
                });
                continue;
            }
            c if is_ident_start(c) => {
                let mut value = String::new();
                while let Some(c) = cur.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    value.push(c);
                    cur.bump();
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(value),
                    pos,
                });
                continue;
            }
            other => {
                return Err(PolicyParseError::new(pos, other.to_string(), "a token"));
            }
        };
        cur.bump();
        tokens.push(Token { kind, pos });
    }
    Ok(tokens)
}
