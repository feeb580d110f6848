//! Declarative service stubs.
//!
//! ```text
//! service Seller
//! in 1 request(title: string)
//! in 1 payment(title: string, money: int)
//! salvo 1 response(title: string, money: int) from request
//! salvo 1 invoice(id: int) from payment
//! salvo 2 error(msg: string) from request, payment
//! ```
//!
//! Blank lines and `#` comments are ignored.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::mdl::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Label,
    pub ty: Label,
}

/// A processing function bound to an input port.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessingFn {
    pub name: Label,
    pub port: u32,
    pub params: Vec<Param>,
}

/// An output-emitting function bound to an output port.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Salvo {
    pub name: Label,
    pub port: u32,
    pub params: Vec<Param>,
    /// Processing functions that call this salvo, in declaration order.
    pub callers: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceStub {
    pub name: Label,
    pub inputs: Vec<ProcessingFn>,
    pub salvos: Vec<Salvo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StubError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: port index must be a positive integer, found `{found}`")]
    BadPort { line: usize, found: String },
    #[error("line {line}: duplicate processing function `{name}`")]
    DuplicateFunction { line: usize, name: String },
    #[error("line {line}: duplicate salvo `{name}` on output port {port}")]
    DuplicateSalvo { line: usize, name: String, port: u32 },
    #[error("line {line}: duplicate parameter `{name}`")]
    DuplicateParam { line: usize, name: String },
    #[error("line {line}: salvo `{salvo}` names unknown caller `{caller}`")]
    UnknownCaller {
        line: usize,
        salvo: String,
        caller: String,
    },
    #[error("missing `service <name>` header")]
    MissingService,
}

pub fn parse_stub(text: &str) -> Result<ServiceStub, StubError> {
    let mut name = None;
    let mut inputs: Vec<ProcessingFn> = Vec::new();
    // callers are resolved once all functions are known
    let mut salvos: Vec<(usize, Salvo)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = split_word(content);
        match keyword {
            "service" => {
                if name.is_some() {
                    return Err(syntax(line, "duplicate `service` header"));
                }
                name = Some(ident(rest.trim(), line)?);
            }
            "in" => {
                let (port, rest) = split_word(rest);
                let port = parse_port(port, line)?;
                let (fname, params, rest) = signature(rest, line)?;
                if !rest.trim().is_empty() {
                    return Err(syntax(line, "unexpected text after parameter list"));
                }
                if inputs.iter().any(|f| f.name == fname) {
                    return Err(StubError::DuplicateFunction {
                        line,
                        name: fname.to_string(),
                    });
                }
                inputs.push(ProcessingFn {
                    name: fname,
                    port,
                    params,
                });
            }
            "salvo" => {
                let (port, rest) = split_word(rest);
                let port = parse_port(port, line)?;
                let (sname, params, rest) = signature(rest, line)?;
                let (kw, callers_text) = split_word(rest);
                if kw != "from" {
                    return Err(syntax(line, "expected `from <caller>[, <caller>...]`"));
                }
                let mut callers = Vec::new();
                for c in callers_text.split(',') {
                    let c = ident(c.trim(), line)?;
                    if !callers.contains(&c) {
                        callers.push(c);
                    }
                }
                if salvos
                    .iter()
                    .any(|(_, s)| s.name == sname && s.port == port)
                {
                    return Err(StubError::DuplicateSalvo {
                        line,
                        name: sname.to_string(),
                        port,
                    });
                }
                salvos.push((
                    line,
                    Salvo {
                        name: sname,
                        port,
                        params,
                        callers,
                    },
                ));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let name = name.ok_or(StubError::MissingService)?;
    for (line, s) in &salvos {
        for c in &s.callers {
            if !inputs.iter().any(|f| &f.name == c) {
                return Err(StubError::UnknownCaller {
                    line: *line,
                    salvo: s.name.to_string(),
                    caller: c.to_string(),
                });
            }
        }
    }
    Ok(ServiceStub {
        name,
        inputs,
        salvos: salvos.into_iter().map(|(_, s)| s).collect(),
    })
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

fn syntax(line: usize, message: impl Into<String>) -> StubError {
    StubError::Syntax {
        line,
        message: message.into(),
    }
}

fn ident(s: &str, line: usize) -> Result<Label, StubError> {
    Label::new(s).ok_or_else(|| syntax(line, format!("invalid identifier `{s}`")))
}

fn parse_port(s: &str, line: usize) -> Result<u32, StubError> {
    match s.parse::<u32>() {
        Ok(p) if p >= 1 => Ok(p),
        _ => Err(StubError::BadPort {
            line,
            found: s.to_string(),
        }),
    }
}

/// Parses `name(p: ty, ...)` and returns the text after the closing paren.
fn signature(s: &str, line: usize) -> Result<(Label, Vec<Param>, &str), StubError> {
    let s = s.trim_start();
    let open = s.find('(').ok_or_else(|| syntax(line, "expected `(`"))?;
    let close = s.find(')').ok_or_else(|| syntax(line, "expected `)`"))?;
    if close < open {
        return Err(syntax(line, "mismatched parentheses"));
    }
    let name = ident(s[..open].trim(), line)?;
    let mut params = Vec::new();
    let mut seen = BTreeSet::new();
    let inner = s[open + 1..close].trim();
    if !inner.is_empty() {
        for p in inner.split(',') {
            let (pname, pty) = p
                .split_once(':')
                .ok_or_else(|| syntax(line, format!("expected `name: type`, found `{}`", p.trim())))?;
            let pname = ident(pname.trim(), line)?;
            let pty = ident(pty.trim(), line)?;
            if !seen.insert(pname.clone()) {
                return Err(StubError::DuplicateParam {
                    line,
                    name: pname.to_string(),
                });
            }
            params.push(Param {
                name: pname,
                ty: pty,
            });
        }
    }
    Ok((name, params, &s[close + 1..]))
}
