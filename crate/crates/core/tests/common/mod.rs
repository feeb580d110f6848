//! Term generators shared by the property tests.
#![allow(dead_code)]

use proptest::prelude::*;

use mdlconf_core::mdl::{BoolExpr, Collection, Element, Kind, Label, Term};

pub const LABELS: [&str; 3] = ["a", "b", "c"];
pub const SYMBOLS: [&str; 2] = ["int", "string"];

fn label() -> impl Strategy<Value = Label> {
    prop::sample::select(LABELS.to_vec()).prop_map(Label::from_static)
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Record), Just(Kind::Choice)]
}

pub fn guard() -> impl Strategy<Value = BoolExpr> {
    let leaf = prop_oneof![
        Just(BoolExpr::TRUE),
        Just(BoolExpr::FALSE),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(BoolExpr::var),
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(BoolExpr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolExpr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| BoolExpr::or(a, b)),
        ]
    })
}

/// Ground terms with `true` guards only, depth at most `depth + 1`.
pub fn ground_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(SYMBOLS.to_vec()).prop_map(Term::symbol),
        Just(Term::nil()),
        Just(Term::empty_choice()),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        (kind(), prop::collection::btree_map(label(), inner, 0..=3)).prop_map(|(kind, elems)| {
            let mut c = Collection::new(kind);
            for (l, t) in elems {
                c.elements.insert(l, Element { guard: BoolExpr::TRUE, term: t });
            }
            Term::Collection(c)
        })
    })
}

/// Arbitrary terms: guards, variables and tails included.
pub fn any_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(SYMBOLS.to_vec()).prop_map(Term::symbol),
        prop::sample::select(vec!["v", "w", "tail_1"]).prop_map(Term::var),
        Just(Term::nil()),
        Just(Term::empty_choice()),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        (
            kind(),
            prop::collection::btree_map(label(), (guard(), inner), 0..=3),
            prop::option::of(prop::sample::select(vec!["r", "s"])),
        )
            .prop_map(|(kind, elems, tail)| {
                let mut c = Collection::new(kind);
                for (l, (g, t)) in elems {
                    c.elements.insert(l, Element { guard: g, term: t });
                }
                c.tail = tail.map(Label::from_static);
                Term::Collection(c)
            })
    })
}

/// A term junior to `t`, built by widening records, narrowing choices and
/// replacing `nil` by a symbol, steered by `bits`.
pub fn weaken(t: &Term, bits: &mut impl Iterator<Item = u8>) -> Term {
    match t {
        Term::Symbol(_) | Term::Var(_) => t.clone(),
        Term::Collection(c) => {
            if t.is_nil() && bits.next().unwrap_or(0) % 4 == 0 {
                return Term::symbol("int");
            }
            let mut out = Collection::new(c.kind);
            for (l, e) in &c.elements {
                if c.kind == Kind::Choice && bits.next().unwrap_or(0) % 3 == 0 {
                    continue;
                }
                let child = weaken(&e.term, bits);
                out.elements.insert(l.clone(), Element { guard: BoolExpr::TRUE, term: child });
            }
            if c.kind == Kind::Record {
                for l in LABELS {
                    let l = Label::from_static(l);
                    if !out.elements.contains_key(&l) && bits.next().unwrap_or(1) % 3 == 0 {
                        out.elements.insert(l, Element { guard: BoolExpr::TRUE, term: Term::symbol("string") });
                    }
                }
            }
            Term::Collection(out)
        }
    }
}
