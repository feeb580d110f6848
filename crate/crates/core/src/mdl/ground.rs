//! Substitution and grounding.

use std::collections::BTreeMap;

use thiserror::Error;

use super::term::{BoolExpr, Collection, Element, Kind, Label, Term};

/// Values for Boolean and term variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub booleans: BTreeMap<Label, bool>,
    pub terms: BTreeMap<Label, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_bool(mut self, name: &str, value: bool) -> Self {
        self.booleans.insert(Label::from_static(name), value);
        self
    }

    pub fn with_term(mut self, name: &str, value: Term) -> Self {
        self.terms.insert(Label::from_static(name), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("term variable `${0}` has no value")]
    UncoveredTermVar(String),
    #[error("Boolean variable `{0}` has no value")]
    UncoveredBoolVar(String),
    #[error("value of `${0}` is not ground")]
    NonGroundValue(String),
    #[error("tail `${var}` of a {expected} is assigned `{found}`")]
    TailKind {
        var: String,
        expected: Kind,
        found: String,
    },
    #[error("label `{label}` supplied by tail `${var}` is already present")]
    LabelCollision { label: String, var: String },
}

/// Grounds `t` under `s`.
///
/// Elements with a false guard are dropped, tail values are spliced into the
/// enclosing collection, and the remaining variables are replaced by their
/// values. The result has only `true` guards.
pub fn ground(t: &Term, s: &Substitution) -> Result<Term, GroundError> {
    match t {
        Term::Symbol(_) => Ok(t.clone()),
        Term::Var(v) => {
            let value = lookup_term(v, s)?;
            normalize(value)
        }
        Term::Collection(c) => {
            let mut out = eval_collection(c, &|v| lookup_bool(v, s), &mut |t| ground(t, s))?;
            if let Some(tail) = &c.tail {
                let value = normalize(lookup_term(tail, s)?)?;
                splice(&mut out, tail, value)?;
            }
            Ok(Term::Collection(out))
        }
    }
}

/// Evaluates guards and drops false elements, leaving variables in place.
pub fn eval_guards(t: &Term, booleans: &BTreeMap<Label, bool>) -> Result<Term, GroundError> {
    match t {
        Term::Symbol(_) | Term::Var(_) => Ok(t.clone()),
        Term::Collection(c) => {
            let lookup = |v: &Label| {
                booleans
                    .get(v)
                    .copied()
                    .ok_or_else(|| GroundError::UncoveredBoolVar(v.to_string()))
            };
            let mut out = eval_collection(c, &lookup, &mut |t| eval_guards(t, booleans))?;
            out.tail = c.tail.clone();
            Ok(Term::Collection(out))
        }
    }
}

/// Splices the elements of `value` into `target` as the value of tail `var`.
pub fn splice(target: &mut Collection, var: &Label, value: Term) -> Result<(), GroundError> {
    let Term::Collection(value) = value else {
        return Err(GroundError::TailKind {
            var: var.to_string(),
            expected: target.kind,
            found: value.to_string(),
        });
    };
    if value.kind != target.kind {
        return Err(GroundError::TailKind {
            var: var.to_string(),
            expected: target.kind,
            found: value.to_string(),
        });
    }
    for (label, e) in value.elements {
        if target.elements.contains_key(&label) {
            return Err(GroundError::LabelCollision {
                label: label.to_string(),
                var: var.to_string(),
            });
        }
        target.elements.insert(label, e);
    }
    Ok(())
}

fn eval_collection(
    c: &Collection,
    lookup: &impl Fn(&Label) -> Result<bool, GroundError>,
    sub: &mut impl FnMut(&Term) -> Result<Term, GroundError>,
) -> Result<Collection, GroundError> {
    let mut out = Collection::new(c.kind);
    for (label, e) in &c.elements {
        if !eval_guard(&e.guard, lookup)? {
            continue;
        }
        out.elements.insert(
            label.clone(),
            Element {
                guard: BoolExpr::TRUE,
                term: sub(&e.term)?,
            },
        );
    }
    Ok(out)
}

fn eval_guard(
    g: &BoolExpr,
    lookup: &impl Fn(&Label) -> Result<bool, GroundError>,
) -> Result<bool, GroundError> {
    Ok(match g {
        BoolExpr::Const(b) => *b,
        BoolExpr::Var(v) => lookup(v)?,
        BoolExpr::Not(e) => !eval_guard(e, lookup)?,
        BoolExpr::And(a, b) => eval_guard(a, lookup)? & eval_guard(b, lookup)?,
        BoolExpr::Or(a, b) => eval_guard(a, lookup)? | eval_guard(b, lookup)?,
    })
}

fn lookup_term<'s>(v: &Label, s: &'s Substitution) -> Result<&'s Term, GroundError> {
    let value = s
        .terms
        .get(v)
        .ok_or_else(|| GroundError::UncoveredTermVar(v.to_string()))?;
    if !value.is_ground() {
        return Err(GroundError::NonGroundValue(v.to_string()));
    }
    Ok(value)
}

fn lookup_bool(v: &Label, s: &Substitution) -> Result<bool, GroundError> {
    s.booleans
        .get(v)
        .copied()
        .ok_or_else(|| GroundError::UncoveredBoolVar(v.to_string()))
}

// drops constant-false elements from an already ground value
fn normalize(t: &Term) -> Result<Term, GroundError> {
    ground(t, &Substitution::default())
}
