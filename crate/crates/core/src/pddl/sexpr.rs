//! S-expression reader for PDDL sources.
//!
//! Symbols are lowercased on the way in and `;` comments run to end of line.

use super::error::{Diagnostic, DiagnosticKind, Pos};

#[derive(Debug, Clone)]
pub(crate) enum SExpr {
    Symbol { text: String, pos: Pos },
    List { items: Vec<SExpr>, pos: Pos },
}

impl SExpr {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub(crate) fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub(crate) fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Symbol { .. } => None,
        }
    }

    /// Short human-readable rendering used in diagnostics.
    pub(crate) fn describe(&self) -> String {
        match self {
            SExpr::Symbol { text, .. } => format!("`{text}`"),
            SExpr::List { items, .. } => match items.first().and_then(SExpr::as_symbol) {
                Some(head) => format!("`({head} ...)`"),
                None => "a list".to_string(),
            },
        }
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Symbol(String),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn next_token(&mut self) -> Option<(Token, Pos)> {
        loop {
            match self.chars.peek().copied() {
                None => return None,
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('(') => {
                    let pos = self.pos();
                    self.bump();
                    return Some((Token::Open, pos));
                }
                Some(')') => {
                    let pos = self.pos();
                    self.bump();
                    return Some((Token::Close, pos));
                }
                Some(_) => {
                    let pos = self.pos();
                    let mut text = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                            break;
                        }
                        text.extend(c.to_lowercase());
                        self.bump();
                    }
                    return Some((Token::Symbol(text), pos));
                }
            }
        }
    }
}

/// Reads exactly one top-level list from `text`.
pub(crate) fn read_document(text: &str) -> Result<SExpr, Diagnostic> {
    let mut lexer = Lexer::new(text);
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut done: Option<SExpr> = None;

    while let Some((token, pos)) = lexer.next_token() {
        if done.is_some() {
            return Err(syntax(pos, "end of input", &token_text(&token)));
        }
        match token {
            Token::Open => stack.push((Vec::new(), pos)),
            Token::Close => {
                let Some((items, open_pos)) = stack.pop() else {
                    return Err(syntax(pos, "`(`", "`)`"));
                };
                let list = SExpr::List { items, pos: open_pos };
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => done = Some(list),
                }
            }
            Token::Symbol(text) => match stack.last_mut() {
                Some((parent, _)) => parent.push(SExpr::Symbol { text, pos }),
                None => return Err(syntax(pos, "`(`", &format!("`{text}`"))),
            },
        }
    }

    match (done, stack.is_empty()) {
        (Some(expr), true) => Ok(expr),
        _ => Err(syntax(lexer.pos(), "`)`", "end of input")),
    }
}

fn token_text(token: &Token) -> String {
    match token {
        Token::Open => "`(`".into(),
        Token::Close => "`)`".into(),
        Token::Symbol(s) => format!("`{s}`"),
    }
}

pub(crate) fn syntax(pos: Pos, expected: &str, found: &str) -> Diagnostic {
    Diagnostic::new(
        pos,
        DiagnosticKind::Syntax {
            expected: expected.to_string(),
            found: found.to_string(),
        },
    )
}
