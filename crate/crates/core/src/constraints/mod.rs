//! Constraint generation from a topology and service interfaces.
//!
//! Every channel `out -> in` contributes `iface(out) ⊑ iface(in)`; every
//! intra-service pair `(a, b)` contributes `$a ⊑ $b`. Unwired ports
//! contribute nothing.

mod bundle;
mod topology;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::derivation::{DerivedService, Direction};
use crate::mdl::{parse_seniority, Label, SyntaxError, Term};

pub use bundle::{parse_bundle, render_bundle, BundleError};
pub use topology::{load_topology, Channel, PortRef, Topology, TopologyError};

/// Where a constraint came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Channel { id: usize, from: PortRef, to: PortRef },
    Intra { service: Label, index: usize },
    Other(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Channel { id, from, to } => write!(f, "channel {id}: {from} -> {to}"),
            Origin::Intra { service, index } => write!(f, "intra {service} {index}"),
            Origin::Other(s) => f.write_str(s),
        }
    }
}

impl Origin {
    /// Inverse of `Display`; unrecognised text becomes `Other`.
    pub fn parse(text: &str) -> Origin {
        let text = text.trim();
        let channel = || -> Option<Origin> {
            let rest = text.strip_prefix("channel ")?;
            let (id, ports) = rest.split_once(':')?;
            let (from, to) = ports.split_once("->")?;
            Some(Origin::Channel {
                id: id.trim().parse().ok()?,
                from: from.parse().ok()?,
                to: to.parse().ok()?,
            })
        };
        let intra = || -> Option<Origin> {
            let rest = text.strip_prefix("intra ")?;
            let (svc, idx) = rest.trim().split_once(' ')?;
            Some(Origin::Intra {
                service: Label::new(svc)?,
                index: idx.trim().parse().ok()?,
            })
        };
        channel()
            .or_else(intra)
            .unwrap_or_else(|| Origin::Other(text.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub junior: Term,
    pub senior: Term,
    pub origin: Origin,
}

/// A set of seniority constraints together with their variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    pub constraints: Vec<Constraint>,
    pub bool_vars: BTreeSet<Label>,
    pub term_vars: BTreeSet<Label>,
}

impl ConstraintSet {
    /// Sorts by origin and collects the free variables.
    pub fn new(mut constraints: Vec<Constraint>) -> Self {
        constraints.sort_by(|a, b| a.origin.cmp(&b.origin));
        let mut bool_vars = BTreeSet::new();
        let mut term_vars = BTreeSet::new();
        for c in &constraints {
            for t in [&c.junior, &c.senior] {
                let fv = t.free_vars();
                bool_vars.extend(fv.bool_vars);
                term_vars.extend(fv.term_vars);
            }
        }
        ConstraintSet {
            constraints,
            bool_vars,
            term_vars,
        }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("channel {channel}: no interface for port {port}")]
    UnresolvedPort { channel: usize, port: String },
}

pub fn generate(
    top: &Topology,
    services: &BTreeMap<Label, DerivedService>,
) -> Result<ConstraintSet, GenerateError> {
    let resolve = |id: usize, p: &PortRef| {
        services
            .get(&p.service)
            .and_then(|s| s.interface(p.direction, p.port))
            .cloned()
            .ok_or_else(|| GenerateError::UnresolvedPort {
                channel: id,
                port: p.to_string(),
            })
    };
    let mut out = Vec::new();
    for (id, ch) in top.channels.iter().enumerate() {
        debug_assert_eq!(ch.from.direction, Direction::Out);
        out.push(Constraint {
            junior: resolve(id, &ch.from)?,
            senior: resolve(id, &ch.to)?,
            origin: Origin::Channel {
                id,
                from: ch.from.clone(),
                to: ch.to.clone(),
            },
        });
    }
    for (name, svc) in services {
        for (index, (j, s)) in svc.intra_constraints.iter().enumerate() {
            out.push(Constraint {
                junior: Term::Var(j.clone()),
                senior: Term::Var(s.clone()),
                origin: Origin::Intra {
                    service: name.clone(),
                    index,
                },
            });
        }
    }
    Ok(ConstraintSet::new(out))
}

/// One `[origin] junior <= senior` line per constraint.
pub fn render_constraints(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    for c in &cs.constraints {
        writeln!(out, "[{}] {} <= {}", c.origin, c.junior, c.senior).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintFileError {
    #[error("line {line}: expected `[origin] <term> <= <term>`")]
    Malformed { line: usize },
    #[error("line {line}: {source}")]
    Term { line: usize, source: SyntaxError },
}

pub fn parse_constraints(text: &str) -> Result<ConstraintSet, ConstraintFileError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let rest = content
            .strip_prefix('[')
            .ok_or(ConstraintFileError::Malformed { line })?;
        let (origin, body) = rest
            .split_once(']')
            .ok_or(ConstraintFileError::Malformed { line })?;
        let (junior, senior) =
            parse_seniority(body).map_err(|source| ConstraintFileError::Term { line, source })?;
        out.push(Constraint {
            junior,
            senior,
            origin: Origin::parse(origin),
        });
    }
    Ok(ConstraintSet::new(out))
}
