//! Interface bundle files (`.ifc`).
//!
//! ```text
//! service Seller
//! in1 = (: request: {title: string} | $b :)
//! out1 = (: response: {title: string, money: int}
//!         | $b :)
//! constraint $a <= $d
//! ```
//!
//! A term may span several lines while its brackets are open. `#` starts a
//! comment. Without a `service` line the caller supplies the name.

use std::fmt::Write as _;

use thiserror::Error;

use crate::derivation::DerivedService;
use crate::mdl::{parse_seniority, parse_term, Label, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Term { line: usize, source: SyntaxError },
    #[error("line {line}: port `{port}` defined twice")]
    DuplicatePort { line: usize, port: String },
    #[error("no service name: add a `service <name>` line")]
    MissingService,
}

/// Parses a bundle; `default_name` is used when the file has no `service` line.
pub fn parse_bundle(text: &str, default_name: Option<&str>) -> Result<DerivedService, BundleError> {
    let mut name: Option<Label> = None;
    let mut d = DerivedService::new(Label::from_static("_"));

    for (line, stmt) in statements(text) {
        let syntax = |message: String| BundleError::Syntax { line, message };
        if let Some(rest) = keyword(&stmt, "service") {
            name = Some(Label::new(rest.trim()).ok_or_else(|| syntax(format!("invalid service name `{}`", rest.trim())))?);
            continue;
        }
        if let Some(rest) = keyword(&stmt, "constraint") {
            let (j, s) = parse_seniority(rest).map_err(|source| BundleError::Term { line, source })?;
            match (j, s) {
                (Term::Var(j), Term::Var(s)) => d.intra_constraints.push((j, s)),
                _ => return Err(syntax("intra-service constraints relate two variables".into())),
            }
            continue;
        }
        let (lhs, rhs) = stmt
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `<port> = <term>`, found `{stmt}`")))?;
        let lhs = lhs.trim();
        let (map, index) = if let Some(i) = lhs.strip_prefix("out") {
            (&mut d.output_ifaces, i)
        } else if let Some(i) = lhs.strip_prefix("in") {
            (&mut d.input_ifaces, i)
        } else {
            return Err(syntax(format!("expected `in<k>` or `out<k>`, found `{lhs}`")));
        };
        let port = match index.parse::<u32>() {
            Ok(p) if p >= 1 => p,
            _ => return Err(syntax(format!("invalid port `{lhs}`"))),
        };
        let term = parse_term(rhs).map_err(|source| BundleError::Term {
            line,
            source: source.offset_line(line),
        })?;
        if map.insert(port, term).is_some() {
            return Err(BundleError::DuplicatePort {
                line,
                port: lhs.to_string(),
            });
        }
    }

    d.name = match (name, default_name) {
        (Some(n), _) => n,
        (None, Some(n)) => Label::new(n).ok_or(BundleError::MissingService)?,
        (None, None) => return Err(BundleError::MissingService),
    };
    Ok(d)
}

pub fn render_bundle(d: &DerivedService) -> String {
    let mut out = format!("service {}\n", d.name);
    for (p, t) in &d.input_ifaces {
        writeln!(out, "in{p} = {t}").unwrap();
    }
    for (p, t) in &d.output_ifaces {
        writeln!(out, "out{p} = {t}").unwrap();
    }
    for (j, s) in &d.intra_constraints {
        writeln!(out, "constraint ${j} <= ${s}").unwrap();
    }
    out
}

fn keyword<'a>(stmt: &'a str, kw: &str) -> Option<&'a str> {
    stmt.strip_prefix(kw)
        .filter(|r| r.starts_with(char::is_whitespace))
}

/// Joins physical lines into statements while brackets are unbalanced.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current: Option<(usize, String, i64)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split_once('#').map_or(raw, |(h, _)| h);
        let depth_delta: i64 = content
            .chars()
            .map(|c| match c {
                '{' | '(' => 1,
                '}' | ')' => -1,
                _ => 0,
            })
            .sum();
        match current.as_mut() {
            Some((_, buf, depth)) => {
                buf.push('\n');
                buf.push_str(content);
                *depth += depth_delta;
            }
            None => {
                if content.trim().is_empty() {
                    continue;
                }
                current = Some((idx + 1, content.to_string(), depth_delta));
            }
        }
        if let Some((line, buf, depth)) = current.take() {
            if depth > 0 {
                current = Some((line, buf, depth));
            } else {
                out.push((line, buf.trim().to_string()));
            }
        }
    }
    if let Some((line, buf, _)) = current {
        out.push((line, buf.trim().to_string()));
    }
    out
}
