//! Concrete text syntax for MDL terms.
//!
//! ```text
//! term     ::= symbol | "$" ident | "{" body "}" | "(:" body ":)"
//! body     ::= [element ("," element)*] ["|" "$" ident]
//! element  ::= label ["(" guard ")"] ":" term
//! guard    ::= and ("||" and)*
//! and      ::= unary ("&&" unary)*
//! unary    ::= "!" unary | "(" guard ")" | "true" | "false" | ident
//! ```
//!
//! Rendering is canonical: elements come out label-sorted, a `true` guard is
//! omitted, and guards are parenthesised only where precedence requires.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::term::{BoolExpr, Collection, Element, Kind, Label, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: duplicate label `{label}`")]
    DuplicateLabel {
        line: usize,
        column: usize,
        label: String,
    },
}

impl SyntaxError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            SyntaxError::Syntax { line, column, .. }
            | SyntaxError::DuplicateLabel { line, column, .. } => (*line, *column),
        }
    }

    /// Shifts the reported position as if `self` came from a text starting at `line`.
    pub fn offset_line(self, line: usize) -> Self {
        match self {
            SyntaxError::Syntax {
                line: l,
                column,
                message,
            } => SyntaxError::Syntax {
                line: l + line - 1,
                column,
                message,
            },
            SyntaxError::DuplicateLabel {
                line: l,
                column,
                label,
            } => SyntaxError::DuplicateLabel {
                line: l + line - 1,
                column,
                label,
            },
        }
    }
}

/// Parses a complete MDL term; trailing non-whitespace is an error.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

/// Parses a guard expression on its own.
pub fn parse_bool_expr(text: &str) -> Result<BoolExpr, SyntaxError> {
    let mut p = Parser::new(text);
    let e = p.guard()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses `<term> <= <term>`, the textual form of a seniority constraint.
pub fn parse_seniority(text: &str) -> Result<(Term, Term), SyntaxError> {
    let mut p = Parser::new(text);
    let junior = p.term()?;
    p.skip_ws();
    p.expect("<=")?;
    let senior = p.term()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok((junior, senior))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before
            .rfind('\n')
            .map_or(before.chars().count(), |i| before[i + 1..].chars().count())
            + 1;
        (line, column)
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let (line, column) = self.location(self.pos);
        SyntaxError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn peek(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(token)
    }

    fn expect(&mut self, token: &str) -> Result<(), SyntaxError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Result<Label, SyntaxError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_alphabetic() || c == '_' || (i > 0 && c.is_ascii_digit()))
            })
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected identifier"));
        }
        self.pos += len;
        Ok(Label::new(&rest[..len]).expect("scanned identifier"))
    }

    fn variable(&mut self) -> Result<Label, SyntaxError> {
        self.expect("$")?;
        if self.rest().starts_with(char::is_whitespace) {
            return Err(self.error("expected variable name after `$`"));
        }
        self.ident()
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        if self.peek("(:") {
            self.pos += 2;
            return self.body(Kind::Choice, ":)");
        }
        if self.eat("{") {
            return self.body(Kind::Record, "}");
        }
        if self.peek("$") {
            return self.variable().map(Term::Var);
        }
        if self.at_end() {
            return Err(self.error("expected term, found end of input"));
        }
        self.ident()
            .map(Term::Symbol)
            .map_err(|_| self.error("expected term"))
    }

    fn body(&mut self, kind: Kind, close: &str) -> Result<Term, SyntaxError> {
        let mut elements = BTreeMap::new();
        let mut tail = None;
        if !self.peek(close) && !self.peek("|") {
            loop {
                self.skip_ws();
                let start = self.pos;
                let (label, element) = self.element()?;
                if elements.contains_key(&label) {
                    let (line, column) = self.location(start);
                    return Err(SyntaxError::DuplicateLabel {
                        line,
                        column,
                        label: label.to_string(),
                    });
                }
                elements.insert(label, element);
                if !self.eat(",") {
                    break;
                }
            }
        }
        if self.eat("|") {
            tail = Some(self.variable()?);
        }
        self.expect(close)?;
        Ok(Term::Collection(Collection {
            kind,
            elements,
            tail,
        }))
    }

    fn element(&mut self) -> Result<(Label, Element), SyntaxError> {
        let label = self.ident()?;
        let guard = if self.eat("(") {
            let g = self.guard()?;
            self.expect(")")?;
            g
        } else {
            BoolExpr::TRUE
        };
        // `(: a :)` must not read `:)` as the element separator
        if self.peek(":)") {
            return Err(self.error(format!("expected `:` and a term after label `{label}`")));
        }
        self.expect(":")?;
        let term = self.term()?;
        Ok((label, Element { guard, term }))
    }

    fn guard(&mut self) -> Result<BoolExpr, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while self.eat("||") {
            let rhs = self.conjunction()?;
            lhs = BoolExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<BoolExpr, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat("&&") {
            let rhs = self.unary()?;
            lhs = BoolExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<BoolExpr, SyntaxError> {
        if self.eat("!") {
            return Ok(BoolExpr::not(self.unary()?));
        }
        if self.eat("(") {
            let e = self.guard()?;
            self.expect(")")?;
            return Ok(e);
        }
        let name = self.ident()?;
        Ok(match name.as_str() {
            "true" => BoolExpr::TRUE,
            "false" => BoolExpr::FALSE,
            _ => BoolExpr::Var(name),
        })
    }
}

/// Renders a term in canonical form.
pub fn render_term(t: &Term) -> String {
    t.to_string()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Symbol(s) => write!(f, "{s}"),
            Term::Var(v) => write!(f, "${v}"),
            Term::Collection(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, close) = match self.kind {
            Kind::Record => ("{", "}"),
            Kind::Choice => ("(: ", " :)"),
        };
        if self.elements.is_empty() && self.tail.is_none() {
            return f.write_str(match self.kind {
                Kind::Record => "{}",
                Kind::Choice => "(: :)",
            });
        }
        f.write_str(open)?;
        for (i, (label, e)) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{label}")?;
            if e.guard != BoolExpr::TRUE {
                write!(f, "({})", e.guard)?;
            }
            write!(f, ": {}", e.term)?;
        }
        if let Some(tail) = &self.tail {
            if self.elements.is_empty() {
                write!(f, "| ${tail}")?;
            } else {
                write!(f, " | ${tail}")?;
            }
        }
        f.write_str(close)
    }
}

// binding strength: or < and < unary
fn precedence(e: &BoolExpr) -> u8 {
    match e {
        BoolExpr::Or(..) => 0,
        BoolExpr::And(..) => 1,
        _ => 2,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &BoolExpr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Const(b) => write!(f, "{b}"),
            BoolExpr::Var(v) => write!(f, "{v}"),
            BoolExpr::Not(e) => {
                f.write_char('!')?;
                write_operand(f, e, 2)
            }
            BoolExpr::And(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" && ")?;
                write_operand(f, b, 2)
            }
            BoolExpr::Or(a, b) => {
                write_operand(f, a, 0)?;
                f.write_str(" || ")?;
                write_operand(f, b, 1)
            }
        }
    }
}
