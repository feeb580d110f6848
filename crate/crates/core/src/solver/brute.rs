//! Exhaustive search over a bounded universe of ground terms.
//!
//! Used as a reference for the real solver on small instances. Boolean
//! assignments are tried from "all true" downwards in lexicographic variable
//! order, so the first hit is the lexicographically greatest assignment that
//! has a witness inside the universe.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Solution, Verdict};
use crate::constraints::ConstraintSet;
use crate::mdl::{eval_guards, ground, Collection, Element, BoolExpr, Kind, Label, Substitution, Term};
use crate::seniority::leq;

const MAX_BOOL_VARS: usize = 10;
const MAX_TERM_ASSIGNMENTS: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub labels: Vec<Label>,
    pub symbols: Vec<Label>,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteError {
    #[error("{0} Boolean variables is too many to enumerate")]
    TooManyBoolVars(usize),
    #[error("{terms} terms for {vars} variables is too many to enumerate")]
    UniverseTooLarge { terms: usize, vars: usize },
}

/// Symbols and empty collections have depth 1.
pub fn term_depth(t: &Term) -> usize {
    match t {
        Term::Symbol(_) | Term::Var(_) => 1,
        Term::Collection(c) => 1 + c.elements.values().map(|e| term_depth(&e.term)).max().unwrap_or(0),
    }
}

/// All ground terms of depth at most `u.max_depth`.
pub fn enumerate_terms(u: &Universe) -> Vec<Term> {
    let mut layer: Vec<Term> = Vec::new();
    for d in 1..=u.max_depth {
        let mut next: Vec<Term> = u.symbols.iter().map(|s| Term::Symbol(s.clone())).collect();
        for kind in [Kind::Record, Kind::Choice] {
            collections(kind, &u.labels, &layer, &mut next);
        }
        layer = next;
        debug_assert!(layer.iter().all(|t| term_depth(t) <= d));
    }
    layer
}

fn collections(kind: Kind, labels: &[Label], children: &[Term], out: &mut Vec<Term>) {
    fn go(kind: Kind, labels: &[Label], children: &[Term], acc: &mut Collection, out: &mut Vec<Term>) {
        let Some((first, rest)) = labels.split_first() else {
            out.push(Term::Collection(acc.clone()));
            return;
        };
        go(kind, rest, children, acc, out);
        for child in children {
            acc.elements.insert(
                first.clone(),
                Element {
                    guard: BoolExpr::TRUE,
                    term: child.clone(),
                },
            );
            go(kind, rest, children, acc, out);
        }
        acc.elements.remove(first);
    }
    go(kind, labels, children, &mut Collection::new(kind), out);
}

pub fn brute_solve(cs: &ConstraintSet, u: &Universe) -> Result<Verdict, BruteError> {
    let bools: Vec<&Label> = cs.bool_vars.iter().collect();
    if bools.len() > MAX_BOOL_VARS {
        return Err(BruteError::TooManyBoolVars(bools.len()));
    }
    let vars: Vec<&Label> = cs.term_vars.iter().collect();
    let terms = enumerate_terms(u);
    let total = (terms.len() as u128).checked_pow(vars.len() as u32);
    if total.map_or(true, |t| t > MAX_TERM_ASSIGNMENTS) {
        return Err(BruteError::UniverseTooLarge {
            terms: terms.len(),
            vars: vars.len(),
        });
    }

    let position: BTreeMap<&Label, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // each constraint is checked as soon as its last variable is assigned
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); vars.len() + 1];
    for (i, c) in cs.constraints.iter().enumerate() {
        let mut fv = c.junior.free_vars();
        fv.extend(c.senior.free_vars());
        let ready = fv.term_vars.iter().map(|v| position[v] + 1).max().unwrap_or(0);
        checks[ready].push(i);
    }

    let n = bools.len();
    for mask in (0..1u32 << n).rev() {
        let booleans: BTreeMap<Label, bool> = bools
            .iter()
            .enumerate()
            .map(|(i, v)| ((*v).clone(), mask >> (n - 1 - i) & 1 == 1))
            .collect();
        let Ok(pairs) = cs
            .constraints
            .iter()
            .map(|c| Ok((eval_guards(&c.junior, &booleans)?, eval_guards(&c.senior, &booleans)?)))
            .collect::<Result<Vec<_>, crate::mdl::GroundError>>()
        else {
            continue;
        };
        let mut s = Substitution {
            booleans: booleans.clone(),
            terms: BTreeMap::new(),
        };
        if assign(0, &vars, &terms, &pairs, &checks, &mut s) {
            return Ok(Verdict::Sat(Solution {
                booleans,
                terms: s.terms,
            }));
        }
    }
    Ok(Verdict::Unsat(Vec::new()))
}

fn assign(
    depth: usize,
    vars: &[&Label],
    terms: &[Term],
    pairs: &[(Term, Term)],
    checks: &[Vec<usize>],
    s: &mut Substitution,
) -> bool {
    let ok = checks[depth].iter().all(|&i| {
        let (j, t) = &pairs[i];
        matches!((ground(j, s), ground(t, s)), (Ok(j), Ok(t)) if leq(&j, &t))
    });
    if !ok {
        return false;
    }
    let Some(v) = vars.get(depth) else {
        return true;
    };
    for t in terms {
        s.terms.insert((*v).clone(), t.clone());
        if assign(depth + 1, vars, terms, pairs, checks, s) {
            return true;
        }
    }
    s.terms.remove(*v);
    false
}

/// Labels and symbols mentioned anywhere in `cs`.
pub fn vocabulary(cs: &ConstraintSet) -> (BTreeSet<Label>, BTreeSet<Label>) {
    fn walk(t: &Term, labels: &mut BTreeSet<Label>, symbols: &mut BTreeSet<Label>) {
        match t {
            Term::Symbol(s) => {
                symbols.insert(s.clone());
            }
            Term::Var(_) => {}
            Term::Collection(c) => {
                for (l, e) in &c.elements {
                    labels.insert(l.clone());
                    walk(&e.term, labels, symbols);
                }
            }
        }
    }
    let (mut labels, mut symbols) = (BTreeSet::new(), BTreeSet::new());
    for c in &cs.constraints {
        walk(&c.junior, &mut labels, &mut symbols);
        walk(&c.senior, &mut labels, &mut symbols);
    }
    (labels, symbols)
}
