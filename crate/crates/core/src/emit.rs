//! Per-service configuration from a solution.
//!
//! Every Boolean variable of a service becomes a flag. Every record-tail
//! variable becomes two text fragments that splice the extra fields into
//! generated code: a declaration list (`, string author`) and a use list
//! (`, author`). Fields are in label order; `nil` gives empty text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::derivation::DerivedService;
use crate::mdl::{Kind, Label, Term};
use crate::solver::Solution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub service: Label,
    pub bool_defs: BTreeMap<Label, bool>,
    pub tail_decl_texts: BTreeMap<Label, String>,
    pub tail_use_texts: BTreeMap<Label, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("service {service}: no value for `{var}` in the solution")]
    Missing { service: Label, var: String },
    #[error("service {service}: `${var}` = `{value}` is not a record of symbols")]
    NotFlat {
        service: Label,
        var: Label,
        value: String,
    },
}

pub fn emit_config(svc: &DerivedService, sol: &Solution) -> Result<ServiceConfig, EmitError> {
    let mut bools = BTreeSet::new();
    let mut record_tails = BTreeSet::new();
    for t in svc.interfaces() {
        bools.extend(t.free_vars().bool_vars);
        t.for_each_tail(&mut |v, k| {
            if k == Kind::Record {
                record_tails.insert(v.clone());
            }
        });
    }

    let missing = |var: &Label| EmitError::Missing {
        service: svc.name.clone(),
        var: var.to_string(),
    };
    let mut cfg = ServiceConfig {
        service: svc.name.clone(),
        bool_defs: BTreeMap::new(),
        tail_decl_texts: BTreeMap::new(),
        tail_use_texts: BTreeMap::new(),
    };
    for b in bools {
        let v = *sol.booleans.get(&b).ok_or_else(|| missing(&b))?;
        cfg.bool_defs.insert(b, v);
    }
    for r in record_tails {
        let value = sol.terms.get(&r).ok_or_else(|| missing(&r))?;
        let (decl, uses) = field_texts(value).ok_or_else(|| EmitError::NotFlat {
            service: svc.name.clone(),
            var: r.clone(),
            value: value.to_string(),
        })?;
        cfg.tail_decl_texts.insert(r.clone(), decl);
        cfg.tail_use_texts.insert(r, uses);
    }
    Ok(cfg)
}

fn field_texts(value: &Term) -> Option<(String, String)> {
    let c = value.as_collection().filter(|c| c.kind == Kind::Record && c.tail.is_none())?;
    let mut decl = String::new();
    let mut uses = String::new();
    for (label, e) in &c.elements {
        if e.guard.is_const() != Some(true) {
            return None;
        }
        let Term::Symbol(ty) = &e.term else {
            return None;
        };
        write!(decl, ", {ty} {label}").unwrap();
        write!(uses, ", {label}").unwrap();
    }
    Some((decl, uses))
}

/// `key = value` lines, sorted by key.
pub fn render_cfg(cfg: &ServiceConfig) -> String {
    let mut lines = BTreeMap::new();
    for (b, v) in &cfg.bool_defs {
        lines.insert(format!("BV_{b}"), v.to_string());
    }
    for (r, text) in &cfg.tail_decl_texts {
        lines.insert(format!("TV_{r}_decl"), quote(text));
    }
    for (r, text) in &cfg.tail_use_texts {
        lines.insert(format!("TV_{r}_use"), quote(text));
    }
    lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A C preprocessor header: true flags are defined, tails become macros.
pub fn render_cpp_header(cfg: &ServiceConfig) -> String {
    let guard = format!("MDLCONF_{}_H", cfg.service.as_str().to_uppercase());
    let mut out = format!("#ifndef {guard}\n#define {guard}\n\n");
    for (b, v) in &cfg.bool_defs {
        if *v {
            writeln!(out, "#define BV_{b}").unwrap();
        }
    }
    for (r, text) in &cfg.tail_decl_texts {
        writeln!(out, "#define TV_{r}_decl {text}").unwrap();
    }
    for (r, text) in &cfg.tail_use_texts {
        writeln!(out, "#define TV_{r}_use {text}").unwrap();
    }
    writeln!(out, "\n#endif").unwrap();
    out
}
