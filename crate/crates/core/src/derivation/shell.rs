//! Shells: routing between a service core and its external channels.
//!
//! ```text
//! shell Calc
//! merge 1,2 -> in 1
//! route out 1 -> 1 rename result=factorial
//! route out 1 -> 2 rename result=square
//! ```
//!
//! Core ports not mentioned by the shell keep identity routing.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::DerivedService;
use crate::mdl::{Label, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputRoute {
    pub core_port: u32,
    pub channel: u32,
    pub renames: BTreeMap<Label, Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShellSpec {
    pub service: Option<Label>,
    /// Core input port → external channels merged into it.
    pub input_merges: BTreeMap<u32, Vec<u32>>,
    pub output_routes: Vec<OutputRoute>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShellError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: rename map is not injective (`{label}` is targeted twice)")]
    NotInjective { line: usize, label: String },
    #[error("shell is for service `{shell}`, not `{service}`")]
    WrongService { shell: String, service: String },
    #[error("core {direction} port {port} does not exist")]
    UnknownPort { direction: &'static str, port: u32 },
    #[error("external {direction} channel {channel} is assigned twice")]
    DuplicateChannel {
        direction: &'static str,
        channel: u32,
    },
    #[error("rename of `{label}` on core output port {port}: no such label")]
    UnknownLabel { port: u32, label: String },
    #[error("rename to `{label}` on core output port {port} collides with an existing label")]
    RenameCollision { port: u32, label: String },
}

pub fn parse_shell(text: &str) -> Result<ShellSpec, ShellError> {
    let mut spec = ShellSpec::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split_once('#').map_or(raw, |(h, _)| h).trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: &str| ShellError::Syntax {
            line,
            message: message.to_string(),
        };
        let (kw, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match kw {
            "shell" => {
                spec.service = Some(Label::new(rest.trim()).ok_or_else(|| err("invalid service name"))?);
            }
            "merge" => {
                let (chans, target) = rest.split_once("->").ok_or_else(|| err("expected `->`"))?;
                let target = target
                    .trim()
                    .strip_prefix("in")
                    .ok_or_else(|| err("expected `in <core-port>`"))?;
                let core = port(target, line)?;
                let channels = chans
                    .split(',')
                    .map(|c| port(c, line))
                    .collect::<Result<Vec<_>, _>>()?;
                spec.input_merges.entry(core).or_default().extend(channels);
            }
            "route" => {
                let rest = rest
                    .trim()
                    .strip_prefix("out")
                    .ok_or_else(|| err("expected `route out <core-port> -> <channel>`"))?;
                let (core, target) = rest.split_once("->").ok_or_else(|| err("expected `->`"))?;
                let core_port = port(core, line)?;
                let target = target.trim();
                let (chan, renames_text) = match target.split_once(char::is_whitespace) {
                    Some((c, r)) => (c, Some(r.trim())),
                    None => (target, None),
                };
                let channel = port(chan, line)?;
                let mut renames = BTreeMap::new();
                if let Some(r) = renames_text {
                    let r = r
                        .strip_prefix("rename")
                        .ok_or_else(|| err("expected `rename <old>=<new>,...`"))?;
                    let mut targets = BTreeSet::new();
                    for pair in r.split(',') {
                        let (old, new) = pair.split_once('=').ok_or_else(|| err("expected `<old>=<new>`"))?;
                        let old = Label::new(old.trim()).ok_or_else(|| err("invalid label"))?;
                        let new = Label::new(new.trim()).ok_or_else(|| err("invalid label"))?;
                        if !targets.insert(new.clone()) {
                            return Err(ShellError::NotInjective {
                                line,
                                label: new.to_string(),
                            });
                        }
                        if renames.insert(old, new).is_some() {
                            return Err(err("label renamed twice"));
                        }
                    }
                }
                spec.output_routes.push(OutputRoute {
                    core_port,
                    channel,
                    renames,
                });
            }
            other => {
                return Err(ShellError::Syntax {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    Ok(spec)
}

fn port(s: &str, line: usize) -> Result<u32, ShellError> {
    match s.trim().parse::<u32>() {
        Ok(p) if p >= 1 => Ok(p),
        _ => Err(ShellError::Syntax {
            line,
            message: format!("invalid port `{}`", s.trim()),
        }),
    }
}

/// Re-expresses a derived service's ports in terms of its external channels.
pub fn apply_shell(d: &DerivedService, sh: &ShellSpec) -> Result<DerivedService, ShellError> {
    if let Some(name) = &sh.service {
        if name != &d.name {
            return Err(ShellError::WrongService {
                shell: name.to_string(),
                service: d.name.to_string(),
            });
        }
    }

    let mut inputs = BTreeMap::new();
    for (core, term) in &d.input_ifaces {
        let channels = sh.input_merges.get(core).cloned().unwrap_or_else(|| vec![*core]);
        for ch in channels {
            if inputs.insert(ch, term.clone()).is_some() {
                return Err(ShellError::DuplicateChannel {
                    direction: "input",
                    channel: ch,
                });
            }
        }
    }
    if let Some(&core) = sh.input_merges.keys().find(|p| !d.input_ifaces.contains_key(p)) {
        return Err(ShellError::UnknownPort {
            direction: "input",
            port: core,
        });
    }

    let mut outputs = BTreeMap::new();
    for route in &sh.output_routes {
        let term = d.output_ifaces.get(&route.core_port).ok_or(ShellError::UnknownPort {
            direction: "output",
            port: route.core_port,
        })?;
        let renamed = rename_labels(term, route)?;
        if outputs.insert(route.channel, renamed).is_some() {
            return Err(ShellError::DuplicateChannel {
                direction: "output",
                channel: route.channel,
            });
        }
    }
    for (core, term) in &d.output_ifaces {
        if sh.output_routes.iter().any(|r| r.core_port == *core) {
            continue;
        }
        if outputs.insert(*core, term.clone()).is_some() {
            return Err(ShellError::DuplicateChannel {
                direction: "output",
                channel: *core,
            });
        }
    }

    Ok(DerivedService {
        name: d.name.clone(),
        input_ifaces: inputs,
        output_ifaces: outputs,
        intra_constraints: d.intra_constraints.clone(),
    })
}

fn rename_labels(term: &Term, route: &OutputRoute) -> Result<Term, ShellError> {
    if route.renames.is_empty() {
        return Ok(term.clone());
    }
    let unknown = |label: &Label| ShellError::UnknownLabel {
        port: route.core_port,
        label: label.to_string(),
    };
    let Term::Collection(c) = term else {
        let first = route.renames.keys().next().expect("nonempty");
        return Err(unknown(first));
    };
    let mut out = c.clone();
    out.elements.clear();
    for old in route.renames.keys() {
        if !c.elements.contains_key(old) {
            return Err(unknown(old));
        }
    }
    for (label, e) in &c.elements {
        let new = route.renames.get(label).unwrap_or(label);
        if out.elements.insert(new.clone(), e.clone()).is_some() {
            return Err(ShellError::RenameCollision {
                port: route.core_port,
                label: new.to_string(),
            });
        }
    }
    Ok(Term::Collection(out))
}
