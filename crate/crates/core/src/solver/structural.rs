//! Boolean conditions implied by the explicit structure of a constraint.
//!
//! For a junior choice element `l(g1)` the senior must offer `l` whenever
//! `g1` holds: without a senior tail, an explicit `l(g2)` gives `g1 -> g2`
//! and a missing `l` gives `!g1`. Records are the mirror image.
//! Nested constraints are conditioned on both guards. Shape clashes that no
//! variable can repair (a symbol against a choice, mismatched symbols)
//! forbid the enclosing condition.
//!
//! These clauses are necessary for any solution; they never exclude one.

use crate::mdl::{BoolExpr, Kind, Term};

pub fn structural_clauses(junior: &Term, senior: &Term) -> Vec<BoolExpr> {
    let mut out = Vec::new();
    collect(junior, senior, &BoolExpr::TRUE, &mut out);
    out.retain(|c| c != &BoolExpr::TRUE);
    out
}

fn forbid(cond: &BoolExpr) -> BoolExpr {
    match cond {
        BoolExpr::Const(b) => BoolExpr::Const(!b),
        other => BoolExpr::not(other.clone()),
    }
}

fn implies(cond: &BoolExpr, conclusion: &BoolExpr) -> BoolExpr {
    match (cond, conclusion) {
        (_, BoolExpr::Const(true)) | (BoolExpr::Const(false), _) => BoolExpr::TRUE,
        (BoolExpr::Const(true), c) => c.clone(),
        (c, BoolExpr::Const(false)) => forbid(c),
        (a, b) if a == b => BoolExpr::TRUE,
        (a, b) => BoolExpr::or(forbid(a), b.clone()),
    }
}

fn collect(junior: &Term, senior: &Term, cond: &BoolExpr, out: &mut Vec<BoolExpr>) {
    if cond == &BoolExpr::FALSE {
        return;
    }
    match (junior, senior) {
        (Term::Var(_), _) | (_, Term::Var(_)) => {}
        (Term::Symbol(a), Term::Symbol(b)) => {
            if a != b {
                out.push(forbid(cond));
            }
        }
        (Term::Symbol(_), Term::Collection(s)) => match s.kind {
            // must ground to nil
            Kind::Record => {
                for e in s.elements.values() {
                    out.push(forbid(&BoolExpr::and_simplified(cond.clone(), e.guard.clone())));
                }
            }
            Kind::Choice => out.push(forbid(cond)),
        },
        (Term::Collection(_), Term::Symbol(_)) => out.push(forbid(cond)),
        (Term::Collection(j), Term::Collection(s)) => {
            if j.kind != s.kind {
                out.push(forbid(cond));
                return;
            }
            let (required, offered, open) = match j.kind {
                Kind::Record => (s, j, j.tail.is_some()),
                Kind::Choice => (j, s, s.tail.is_some()),
            };
            for (label, need) in &required.elements {
                let need_cond = BoolExpr::and_simplified(cond.clone(), need.guard.clone());
                match offered.elements.get(label) {
                    Some(have) => {
                        // with a tail, a disabled explicit label can still come from it
                        if !open {
                            out.push(implies(&need_cond, &have.guard));
                        }
                        let both = BoolExpr::and_simplified(need_cond, have.guard.clone());
                        let (jt, st) = match j.kind {
                            Kind::Record => (&have.term, &need.term),
                            Kind::Choice => (&need.term, &have.term),
                        };
                        collect(jt, st, &both, out);
                    }
                    None if !open => out.push(forbid(&need_cond)),
                    None => {}
                }
            }
        }
    }
}
