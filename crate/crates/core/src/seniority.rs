//! The seniority order on ground terms and its partial meet and join.
//!
//! `leq(a, b)` reads "a is junior to b": a producer emitting `a` may be wired
//! to a consumer accepting `b`. Records grow more junior as they gain labels,
//! choices as they lose them; both are covariant in their element terms.
//! `nil` (the empty record) sits above every symbol and record. Symbols are
//! atoms with no order among themselves.
//!
//! Only elements whose guard is the constant `true` are considered present;
//! variables are never junior or senior to anything.

use std::collections::BTreeMap;

use crate::mdl::{BoolExpr, Collection, Element, Kind, Label, Term};

/// `t1 ⊑ t2` on ground terms.
pub fn leq(t1: &Term, t2: &Term) -> bool {
    match (t1, t2) {
        (Term::Symbol(a), Term::Symbol(b)) => a == b,
        (Term::Symbol(_), Term::Collection(c)) => is_nil(c),
        (Term::Collection(c1), Term::Collection(c2)) if c1.kind == c2.kind => match c1.kind {
            Kind::Record => present(c2).all(|(l, s)| lookup(c1, l).is_some_and(|j| leq(j, s))),
            Kind::Choice => present(c1).all(|(l, j)| lookup(c2, l).is_some_and(|s| leq(j, s))),
        },
        _ => false,
    }
}

/// Greatest lower bound, `None` when the terms have no common junior.
pub fn meet(t1: &Term, t2: &Term) -> Option<Term> {
    match (t1, t2) {
        (Term::Symbol(a), Term::Symbol(b)) => (a == b).then(|| t1.clone()),
        (Term::Symbol(_), Term::Collection(c)) if is_nil(c) => Some(t1.clone()),
        (Term::Collection(c), Term::Symbol(_)) if is_nil(c) => Some(t2.clone()),
        (Term::Collection(c1), Term::Collection(c2)) if c1.kind == c2.kind => {
            let mut out = BTreeMap::new();
            match c1.kind {
                Kind::Record => {
                    // union of labels; a clash on a shared label has no junior
                    for (l, a) in present(c1) {
                        let v = match lookup(c2, l) {
                            Some(b) => meet(a, b)?,
                            None => a.clone(),
                        };
                        out.insert(l.clone(), v);
                    }
                    for (l, b) in present(c2) {
                        out.entry(l.clone()).or_insert_with(|| b.clone());
                    }
                }
                Kind::Choice => {
                    // shared labels only; a clash just drops the alternative
                    for (l, a) in present(c1) {
                        if let Some(m) = lookup(c2, l).and_then(|b| meet(a, b)) {
                            out.insert(l.clone(), m);
                        }
                    }
                }
            }
            Some(build(c1.kind, out))
        }
        _ => None,
    }
}

/// Least upper bound, `None` when the terms have no common senior.
pub fn join(t1: &Term, t2: &Term) -> Option<Term> {
    match (t1, t2) {
        (Term::Symbol(a), Term::Symbol(b)) => Some(if a == b { t1.clone() } else { Term::nil() }),
        (Term::Symbol(_), Term::Collection(c)) | (Term::Collection(c), Term::Symbol(_))
            if c.kind == Kind::Record =>
        {
            Some(Term::nil())
        }
        (Term::Collection(c1), Term::Collection(c2)) if c1.kind == c2.kind => {
            let mut out = BTreeMap::new();
            match c1.kind {
                Kind::Record => {
                    for (l, a) in present(c1) {
                        if let Some(j) = lookup(c2, l).and_then(|b| join(a, b)) {
                            out.insert(l.clone(), j);
                        }
                    }
                }
                Kind::Choice => {
                    for (l, a) in present(c1) {
                        let v = match lookup(c2, l) {
                            Some(b) => join(a, b)?,
                            None => a.clone(),
                        };
                        out.insert(l.clone(), v);
                    }
                    for (l, b) in present(c2) {
                        out.entry(l.clone()).or_insert_with(|| b.clone());
                    }
                }
            }
            Some(build(c1.kind, out))
        }
        _ => None,
    }
}

fn is_nil(c: &Collection) -> bool {
    c.kind == Kind::Record && present(c).next().is_none()
}

fn present(c: &Collection) -> impl Iterator<Item = (&Label, &Term)> {
    c.present()
}

fn lookup<'c>(c: &'c Collection, l: &Label) -> Option<&'c Term> {
    c.get(l)
        .filter(|e| e.guard == BoolExpr::TRUE)
        .map(|e| &e.term)
}

fn build(kind: Kind, elements: BTreeMap<Label, Term>) -> Term {
    Term::Collection(Collection {
        kind,
        elements: elements
            .into_iter()
            .map(|(l, term)| {
                (
                    l,
                    Element {
                        guard: BoolExpr::TRUE,
                        term,
                    },
                )
            })
            .collect(),
        tail: None,
    })
}
