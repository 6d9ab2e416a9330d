//! Concrete syntax for terms.
//!
//! ```text
//! term  ::= app | '\' ident+ '.' term
//! app   ::= atom+                      (left associative)
//! atom  ::= ident | elem | '(' term ')'
//! elem  ::= '#' digits | '#' pair | digits | '*'
//! pair  ::= '(' comp ',' comp ')'      comp ::= digits | pair | '#' comp
//! ```
//!
//! Capitalized identifiers are looked up as named constants; other
//! identifiers are variables. `λ` may stand for `\`.

use thiserror::Error;

use crate::nat::Nat;
use crate::pca::{Element, Pca, Term};
use crate::toolkit::abstract_term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Surface syntax before constants are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Name(String),
    Lit(Nat),
    /// The single element of the trivial structure.
    Star,
    Lam(Vec<String>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Parser {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (mut line, mut column) = (1, 1);
        for ch in self.chars.iter().take(pos) {
            if *ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_space(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_space();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(ch) if ch == want => {
                self.pos += 1;
                Ok(())
            }
            Some(ch) => Err(self.error_at(self.pos, format!("expected `{want}`, found `{ch}`"))),
            None => Err(self.error_at(self.pos, format!("expected `{want}`, found end of input"))),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let ch = self.chars[self.pos];
            let ok = if self.pos == start {
                ch.is_alphabetic() || ch == '_'
            } else {
                ch.is_alphanumeric() || ch == '_' || ch == '\''
            };
            if !ok {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn digits(&mut self) -> Result<Nat, ParseError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_at(start, "expected a number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<u64>() {
            Ok(n) if n < (1 << 62) => Ok(Nat::small(n)),
            _ => Err(self.error_at(start, format!("{text} is too large; write it as #(x,y)"))),
        }
    }

    fn component(&mut self) -> Result<Nat, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let x = self.component()?;
                self.expect(',')?;
                let y = self.component()?;
                self.expect(')')?;
                Ok(Nat::pair(&x, &y))
            }
            Some('#') => {
                self.pos += 1;
                self.component()
            }
            _ => self.digits(),
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some('\\') | Some('λ')) {
            let at = self.pos;
            self.pos += 1;
            let mut vars = Vec::new();
            while let Some(x) = self.ident() {
                if x.starts_with(|ch: char| ch.is_uppercase()) {
                    return Err(self.error_at(self.pos - x.chars().count(), format!("`{x}` names a constant, not a variable")));
                }
                vars.push(x);
            }
            if vars.is_empty() {
                return Err(self.error_at(at, "abstraction binds no variables"));
            }
            self.expect('.')?;
            let body = self.term()?;
            return Ok(Expr::Lam(vars, Box::new(body)));
        }
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                None | Some(')') => return Ok(acc),
                Some('\\') | Some('λ') => {
                    let arg = self.term()?;
                    return Ok(Expr::App(Box::new(acc), Box::new(arg)));
                }
                _ => {
                    let arg = self.atom()?;
                    acc = Expr::App(Box::new(acc), Box::new(arg));
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.term()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some('#') => {
                self.pos += 1;
                Ok(Expr::Lit(self.component()?))
            }
            Some('*') => {
                self.pos += 1;
                Ok(Expr::Star)
            }
            Some(ch) if ch.is_ascii_digit() => Ok(Expr::Lit(self.digits()?)),
            Some(ch) if ch.is_alphabetic() || ch == '_' => {
                let name = self.ident().expect("identifier start");
                if name.starts_with(|ch: char| ch.is_uppercase()) {
                    Ok(Expr::Name(name))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(ch) => Err(self.error_at(at, format!("unexpected `{ch}`"))),
            None => Err(self.error_at(self.pos, "unexpected end of input")),
        }
    }
}

/// Parses a complete term.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser::new(text);
    let expr = parser.term()?;
    if let Some(ch) = parser.peek() {
        return Err(parser.error_at(parser.pos, format!("unexpected `{ch}`")));
    }
    Ok(expr)
}

/// Parses an element literal such as `#(3,#(1,2))` or `17`.
pub fn parse_element(text: &str) -> Result<Nat, ParseError> {
    let mut parser = Parser::new(text);
    if parser.peek() == Some('#') {
        parser.pos += 1;
    }
    let n = parser.component()?;
    if let Some(ch) = parser.peek() {
        return Err(parser.error_at(parser.pos, format!("unexpected `{ch}`")));
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown constant `{0}`")]
    UnknownName(String),
    #[error("`*` only denotes in the trivial structure")]
    Star,
}

/// Replaces names by their elements and abstractions by bracket
/// abstraction in `p`.
pub fn resolve(
    p: &dyn Pca,
    expr: &Expr,
    lookup: &dyn Fn(&str) -> Option<Element>,
) -> Result<Term, ResolveError> {
    Ok(match expr {
        Expr::Var(x) => Term::Var(x.clone()),
        Expr::Name(n) => Term::Const(lookup(n).ok_or_else(|| ResolveError::UnknownName(n.clone()))?),
        Expr::Lit(n) => Term::Const(n.clone()),
        Expr::Star => {
            if p.render(&p.k()) == "*" {
                Term::Const(p.k())
            } else {
                return Err(ResolveError::Star);
            }
        }
        Expr::Lam(vars, body) => {
            let body = resolve(p, body, lookup)?;
            let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
            abstract_term(p, &body, &refs)
        }
        Expr::App(f, a) => Term::app(resolve(p, f, lookup)?, resolve(p, a, lookup)?),
    })
}
