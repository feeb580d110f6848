//! Term-variable bounds for a fixed Boolean assignment.
//!
//! With guards evaluated, each constraint is decomposed structurally into
//! atoms `v ⊒ P` (lower) and `v ⊑ P` (upper), where `P` is a term pattern
//! that may mention other variables:
//!
//! * a variable on either side bounds it by the other side;
//! * a junior choice label missing from the senior goes to the senior tail
//!   as `tail ⊒ (: l: t :)`; the junior tail is bounded above by the rest of
//!   the senior choice;
//! * a senior record label missing from the junior goes to the junior tail
//!   as `tail ⊑ {l: t}`; the senior tail is bounded below by the rest of the
//!   junior record.
//!
//! Lower bounds combine with join and upper bounds with meet. Patterns are
//! evaluated with the current estimate of each variable (see
//! `Bounds::estimate`) and iterated to a fixed point. Variables left
//! without an estimate get a default of the right kind and iteration resumes.

use std::collections::{BTreeMap, BTreeSet};

use crate::mdl::{ground, Collection, Kind, Label, Substitution, Term};
use crate::seniority::{join, leq, meet};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Pattern {
    term: Term,
    /// Labels removed from the top level of the evaluated pattern.
    exclude: BTreeSet<Label>,
}

impl Pattern {
    fn plain(term: Term) -> Self {
        Pattern {
            term,
            exclude: BTreeSet::new(),
        }
    }

    /// The pattern as a term, dropping excluded explicit elements.
    fn materialize(&self) -> Term {
        match &self.term {
            Term::Collection(c) if !self.exclude.is_empty() => {
                let mut c = c.clone();
                c.elements.retain(|l, _| !self.exclude.contains(l));
                Term::Collection(c)
            }
            t => t.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
struct Atom {
    var: Label,
    side: Side,
    pattern: Pattern,
    origin: usize,
}

/// Why no term assignment was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsFailure {
    /// Indices of the constraints that could not be satisfied.
    Conflict(Vec<usize>),
    Diverged(usize),
}

/// Finds ground values for every variable in `vars`, given guard-free
/// constraints `(junior, senior)`.
///
/// The result is a candidate; callers verify it.
pub fn solve_terms(
    constraints: &[(Term, Term)],
    vars: &BTreeSet<Label>,
    max_rounds: usize,
) -> Result<BTreeMap<Label, Term>, BoundsFailure> {
    let mut atoms = Vec::new();
    for (i, (j, s)) in constraints.iter().enumerate() {
        if !decompose(j, s, i, &mut atoms) {
            return Err(BoundsFailure::Conflict(vec![i]));
        }
    }

    close(&mut atoms)?;

    let mut kinds: BTreeMap<Label, Kind> = BTreeMap::new();
    let mut siblings: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    for (j, s) in constraints {
        for t in [j, s] {
            t.for_each_tail(&mut |v, k| {
                kinds.entry(v.clone()).or_insert(k);
            });
            explicit_siblings(t, &mut siblings);
        }
    }
    // A tail never repeats the labels written next to it. Dropping them
    // keeps a record above its lower bound and a choice below its upper one.
    for atom in &mut atoms {
        let strip = matches!(
            (kinds.get(&atom.var), atom.side),
            (Some(Kind::Record), Side::Lower) | (Some(Kind::Choice), Side::Upper)
        );
        if let (true, Some(labels)) = (strip, siblings.get(&atom.var)) {
            atom.pattern.exclude.extend(labels.iter().cloned());
        }
    }

    // An unbounded variable that sits opposite a term in two bounds of the
    // same side defaults to that term, so the bounds combine.
    let mut hints: BTreeMap<Label, Term> = BTreeMap::new();
    for (i, a) in atoms.iter().enumerate() {
        for b in &atoms[i + 1..] {
            if a.var == b.var && a.side == b.side {
                collect_hints(&a.pattern.term, &b.pattern.term, &mut hints);
            }
        }
    }

    let mut state = Bounds {
        kinds,
        ..Bounds::default()
    };
    let mut rounds = 0;
    loop {
        loop {
            rounds += 1;
            if rounds > max_rounds {
                return Err(BoundsFailure::Diverged(rounds - 1));
            }
            if !state.round(&atoms)? {
                break;
            }
        }
        let missing: Vec<&Label> = vars.iter().filter(|v| state.estimate(v).is_none()).collect();
        if missing.is_empty() {
            break;
        }
        let mut chosen = Vec::new();
        for v in missing {
            let hinted = hints
                .get(v)
                .and_then(|h| state.eval(&Pattern::plain(h.clone())))
                .and_then(Result::ok);
            let default = hinted.unwrap_or_else(|| match state.kinds.get(v) {
                Some(Kind::Choice) => Term::empty_choice(),
                _ => Term::nil(),
            });
            chosen.push((v.clone(), default));
        }
        state.defaults.extend(chosen);
    }

    Ok(vars
        .iter()
        .map(|v| (v.clone(), state.estimate(v).cloned().expect("estimated")))
        .collect())
}

#[derive(Debug, Default)]
struct Bounds {
    lower: BTreeMap<Label, Term>,
    upper: BTreeMap<Label, Term>,
    defaults: BTreeMap<Label, Term>,
    kinds: BTreeMap<Label, Kind>,
}

impl Bounds {
    /// The value `v` would get now: the least one allowed by its lower
    /// bounds. Without lower bounds a choice tail takes the empty choice,
    /// which is below everything of its kind; other variables take their
    /// upper bound.
    fn estimate(&self, v: &Label) -> Option<&Term> {
        static EMPTY_CHOICE: std::sync::OnceLock<Term> = std::sync::OnceLock::new();
        if let Some(t) = self.lower.get(v) {
            return Some(t);
        }
        if self.kinds.get(v) == Some(&Kind::Choice) {
            return Some(EMPTY_CHOICE.get_or_init(Term::empty_choice));
        }
        self.upper.get(v).or_else(|| self.defaults.get(v))
    }

    fn eval(&self, p: &Pattern) -> Option<Result<Term, ()>> {
        let fv = p.term.free_vars();
        let mut s = Substitution::new();
        for v in fv.term_vars {
            s.terms.insert(v.clone(), self.estimate(&v)?.clone());
        }
        Some(match ground(&p.term, &s) {
            Ok(Term::Collection(mut c)) => {
                c.elements.retain(|l, _| !p.exclude.contains(l));
                Ok(Term::Collection(c))
            }
            Ok(t) => Ok(t),
            Err(_) => Err(()),
        })
    }

    /// One pass over all atoms; `Ok(true)` if any bound moved.
    fn round(&mut self, atoms: &[Atom]) -> Result<bool, BoundsFailure> {
        let mut changed = false;
        for atom in atoms {
            let value = match self.eval(&atom.pattern) {
                None => continue,
                Some(Ok(v)) => v,
                Some(Err(())) => return Err(BoundsFailure::Conflict(vec![atom.origin])),
            };
            let (map, combine): (_, fn(&Term, &Term) -> Option<Term>) = match atom.side {
                Side::Lower => (&mut self.lower, join),
                Side::Upper => (&mut self.upper, meet),
            };
            let next = match map.get(&atom.var) {
                None => value,
                Some(old) => {
                    let next = combine(old, &value)
                        .ok_or_else(|| BoundsFailure::Conflict(vec![atom.origin]))?;
                    match atom.side {
                        Side::Lower => debug_assert!(leq(old, &next), "lower bound decreased"),
                        Side::Upper => debug_assert!(leq(&next, old), "upper bound increased"),
                    }
                    if &next == old {
                        continue;
                    }
                    next
                }
            };
            map.insert(atom.var.clone(), next);
            changed = true;
        }
        Ok(changed)
    }
}

const MAX_ATOMS: usize = 4096;

/// Adds `P ⊑ Q` for every lower bound `P` and upper bound `Q` of the same
/// variable, decomposed, until nothing new appears.
fn close(atoms: &mut Vec<Atom>) -> Result<(), BoundsFailure> {
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    loop {
        let mut fresh = Vec::new();
        for (li, lo) in atoms.iter().enumerate().filter(|(_, a)| a.side == Side::Lower) {
            for (ui, up) in atoms.iter().enumerate().filter(|(_, a)| a.side == Side::Upper) {
                if lo.var != up.var || !done.insert((li, ui)) {
                    continue;
                }
                if !decompose(&lo.pattern.materialize(), &up.pattern.materialize(), lo.origin, &mut fresh) {
                    let mut blame = vec![lo.origin, up.origin];
                    blame.sort_unstable();
                    blame.dedup();
                    return Err(BoundsFailure::Conflict(blame));
                }
            }
        }
        let before = atoms.len();
        for a in fresh {
            let known = atoms
                .iter()
                .any(|b| b.var == a.var && b.side == a.side && b.pattern == a.pattern);
            if !known {
                atoms.push(a);
            }
        }
        if atoms.len() == before {
            return Ok(());
        }
        if atoms.len() > MAX_ATOMS {
            return Err(BoundsFailure::Diverged(0));
        }
    }
}

/// Structural decomposition; `false` when the shapes can never match.
fn decompose(junior: &Term, senior: &Term, origin: usize, out: &mut Vec<Atom>) -> bool {
    if junior == senior {
        return true;
    }
    let mut push = |var: &Label, side, pattern| {
        out.push(Atom {
            var: var.clone(),
            side,
            pattern,
            origin,
        })
    };
    match (junior, senior) {
        (_, Term::Var(v)) => {
            push(v, Side::Lower, Pattern::plain(junior.clone()));
            if let Term::Var(u) = junior {
                push(u, Side::Upper, Pattern::plain(senior.clone()));
            }
            true
        }
        (Term::Var(u), _) => {
            push(u, Side::Upper, Pattern::plain(senior.clone()));
            true
        }
        (Term::Symbol(a), Term::Symbol(b)) => a == b,
        (Term::Symbol(_), Term::Collection(s)) => {
            if s.kind != Kind::Record || !s.elements.is_empty() {
                return false;
            }
            if let Some(r) = &s.tail {
                push(r, Side::Lower, Pattern::plain(Term::nil()));
            }
            true
        }
        (Term::Collection(j), Term::Collection(s)) if j.kind == s.kind => match j.kind {
            Kind::Record => {
                for (l, need) in &s.elements {
                    match (j.elements.get(l), &j.tail) {
                        (Some(have), _) => {
                            if !decompose(&have.term, &need.term, origin, out) {
                                return false;
                            }
                        }
                        (None, Some(r)) => out.push(Atom {
                            var: r.clone(),
                            side: Side::Upper,
                            pattern: Pattern::plain(singleton(Kind::Record, l, &need.term)),
                            origin,
                        }),
                        (None, None) => return false,
                    }
                }
                if let Some(r) = &s.tail {
                    out.push(Atom {
                        var: r.clone(),
                        side: Side::Lower,
                        pattern: Pattern {
                            term: Term::Collection(j.clone()),
                            exclude: s.elements.keys().cloned().collect(),
                        },
                        origin,
                    });
                }
                true
            }
            Kind::Choice => {
                for (l, offer) in &j.elements {
                    match (s.elements.get(l), &s.tail) {
                        (Some(accept), _) => {
                            if !decompose(&offer.term, &accept.term, origin, out) {
                                return false;
                            }
                        }
                        (None, Some(c)) => out.push(Atom {
                            var: c.clone(),
                            side: Side::Lower,
                            pattern: Pattern::plain(singleton(Kind::Choice, l, &offer.term)),
                            origin,
                        }),
                        (None, None) => return false,
                    }
                }
                if let Some(c) = &j.tail {
                    out.push(Atom {
                        var: c.clone(),
                        side: Side::Upper,
                        pattern: Pattern {
                            term: Term::Collection(s.clone()),
                            exclude: j.elements.keys().cloned().collect(),
                        },
                        origin,
                    });
                }
                true
            }
        },
        _ => false,
    }
}

fn collect_hints(a: &Term, b: &Term, out: &mut BTreeMap<Label, Term>) {
    match (a, b) {
        (Term::Var(_), Term::Var(_)) => {}
        (Term::Var(v), t) | (t, Term::Var(v)) => {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        (Term::Collection(x), Term::Collection(y)) if x.kind == y.kind => {
            for (l, e) in &x.elements {
                if let Some(f) = y.elements.get(l) {
                    collect_hints(&e.term, &f.term, out);
                }
            }
        }
        _ => {}
    }
}

fn explicit_siblings(t: &Term, out: &mut BTreeMap<Label, BTreeSet<Label>>) {
    if let Term::Collection(c) = t {
        if let Some(v) = &c.tail {
            out.entry(v.clone()).or_default().extend(c.elements.keys().cloned());
        }
        for e in c.elements.values() {
            explicit_siblings(&e.term, out);
        }
    }
}

fn singleton(kind: Kind, label: &Label, term: &Term) -> Term {
    let mut c = Collection::new(kind);
    c.elements.insert(
        label.clone(),
        crate::mdl::Element {
            guard: crate::mdl::BoolExpr::TRUE,
            term: term.clone(),
        },
    );
    Term::Collection(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdl::parse_term;

    fn run(pairs: &[(&str, &str)]) -> Result<BTreeMap<Label, Term>, BoundsFailure> {
        let cs: Vec<(Term, Term)> = pairs
            .iter()
            .map(|(j, s)| (parse_term(j).unwrap(), parse_term(s).unwrap()))
            .collect();
        let mut vars = BTreeSet::new();
        for (j, s) in &cs {
            vars.extend(j.free_vars().term_vars);
            vars.extend(s.free_vars().term_vars);
        }
        solve_terms(&cs, &vars, 64)
    }

    fn value(m: &BTreeMap<Label, Term>, v: &str) -> String {
        m[&Label::from_static(v)].to_string()
    }

    #[test]
    fn senior_choice_tail_collects_extra_alternatives() {
        let m = run(&[("(: a: int, b: string :)", "(: a: int | $t :)")]).unwrap();
        assert_eq!(value(&m, "t"), "(: b: string :)");
    }

    #[test]
    fn junior_record_tail_supplies_missing_fields() {
        let m = run(&[("{a: int | $r}", "{a: int, b: string}")]).unwrap();
        assert_eq!(value(&m, "r"), "{b: string}");
    }

    #[test]
    fn senior_record_tail_keeps_the_rest() {
        let m = run(&[("{a: int, b: string}", "{a: int | $r}")]).unwrap();
        assert_eq!(value(&m, "r"), "{b: string}");
    }

    #[test]
    fn junior_choice_tail_defaults_to_empty() {
        let m = run(&[("(: a: int | $c :)", "(: a: int :)")]).unwrap();
        assert_eq!(value(&m, "c"), "(: :)");
    }

    #[test]
    fn variables_flow_through_chains() {
        let m = run(&[("{x: int}", "$a"), ("$a", "$b"), ("$b", "{x: int}")]).unwrap();
        assert_eq!(value(&m, "a"), "{x: int}");
        assert_eq!(value(&m, "b"), "{x: int}");
    }

    #[test]
    fn structural_conflict() {
        assert_eq!(
            run(&[("(: f: {} :)", "(: g: {} :)")]),
            Err(BoundsFailure::Conflict(vec![0]))
        );
        assert_eq!(run(&[("int", "$v"), ("(: :)", "$v")]), Err(BoundsFailure::Conflict(vec![1])));
    }

    #[test]
    fn runaway_growth_diverges() {
        let r = run(&[("(: b: int :)", "$v"), ("(: a: $v :)", "$v")]);
        assert!(matches!(r, Err(BoundsFailure::Diverged(64))));
    }
}
