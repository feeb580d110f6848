//! Topology files: one `channel <svc>.out<k> -> <svc>.in<m>` per line.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::derivation::Direction;
use crate::mdl::Label;

/// A port of a named service.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub service: Label,
    pub direction: Direction,
    pub port: u32,
}

impl PortRef {
    pub fn new(service: &str, direction: Direction, port: u32) -> Self {
        PortRef {
            service: Label::from_static(service),
            direction,
            port,
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::In => "in",
            Direction::Out => "out",
        };
        write!(f, "{}.{dir}{}", self.service, self.port)
    }
}

impl FromStr for PortRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (svc, port) = s
            .rsplit_once('.')
            .ok_or_else(|| format!("expected `<service>.in<k>` or `<service>.out<k>`, found `{s}`"))?;
        let service = Label::new(svc).ok_or_else(|| format!("invalid service name `{svc}`"))?;
        let (direction, index) = if let Some(i) = port.strip_prefix("out") {
            (Direction::Out, i)
        } else if let Some(i) = port.strip_prefix("in") {
            (Direction::In, i)
        } else {
            return Err(format!("expected `in<k>` or `out<k>`, found `{port}`"));
        };
        match index.parse::<u32>() {
            Ok(port) if port >= 1 => Ok(PortRef {
                service,
                direction,
                port,
            }),
            _ => Err(format!("invalid port index in `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub from: PortRef,
    pub to: PortRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Topology {
    pub channels: Vec<Channel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: port {port} is already connected")]
    DuplicateEndpoint { line: usize, port: String },
    #[error("line {line}: channel connects port {port} of `{service}` to itself")]
    SelfLoop {
        line: usize,
        service: String,
        port: u32,
    },
}

pub fn load_topology(text: &str) -> Result<Topology, TopologyError> {
    let mut top = Topology::default();
    let mut used = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split_once('#').map_or(raw, |(h, _)| h).trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| TopologyError::Syntax { line, message };
        let rest = content
            .strip_prefix("channel")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax(format!("expected `channel`, found `{content}`")))?;
        let (from, to) = rest
            .split_once("->")
            .ok_or_else(|| syntax("expected `->`".to_string()))?;
        let from: PortRef = from.parse().map_err(syntax)?;
        let to: PortRef = to.parse().map_err(syntax)?;
        if from.direction != Direction::Out {
            return Err(syntax(format!("channel source {from} must be an output port")));
        }
        if to.direction != Direction::In {
            return Err(syntax(format!("channel target {to} must be an input port")));
        }
        if from.service == to.service && from.port == to.port {
            return Err(TopologyError::SelfLoop {
                line,
                service: from.service.to_string(),
                port: from.port,
            });
        }
        for end in [&from, &to] {
            if !used.insert(end.clone()) {
                return Err(TopologyError::DuplicateEndpoint {
                    line,
                    port: end.to_string(),
                });
            }
        }
        top.channels.push(Channel { from, to });
    }
    Ok(top)
}
