//! The MDL term algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// An identifier naming a label, symbol, or variable.
///
/// Valid identifiers match `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        is_identifier(&name).then_some(Label(name))
    }

    /// Builds a label without validation. Panics on an invalid identifier.
    pub fn from_static(name: &str) -> Self {
        Label::new(name).unwrap_or_else(|| panic!("invalid identifier `{name}`"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A guard over Boolean variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoolExpr {
    Const(bool),
    Var(Label),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub const TRUE: BoolExpr = BoolExpr::Const(true);
    pub const FALSE: BoolExpr = BoolExpr::Const(false);

    pub fn var(name: &str) -> Self {
        BoolExpr::Var(Label::from_static(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction that folds away constant operands.
    pub fn and_simplified(a: BoolExpr, b: BoolExpr) -> Self {
        match (a, b) {
            (BoolExpr::Const(true), e) | (e, BoolExpr::Const(true)) => e,
            (BoolExpr::Const(false), _) | (_, BoolExpr::Const(false)) => BoolExpr::FALSE,
            (a, b) => BoolExpr::and(a, b),
        }
    }

    /// Disjunction of all operands, `false` when empty. Operand order is kept.
    pub fn any(operands: impl IntoIterator<Item = BoolExpr>) -> Self {
        operands
            .into_iter()
            .reduce(BoolExpr::or)
            .unwrap_or(BoolExpr::FALSE)
    }

    pub fn is_const(&self) -> Option<bool> {
        match self {
            BoolExpr::Const(b) => Some(*b),
            _ => None,
        }
    }

    /// Evaluates under `lookup`; `None` if a variable is unassigned.
    pub fn eval_with(&self, lookup: &impl Fn(&Label) -> Option<bool>) -> Option<bool> {
        Some(match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(v) => lookup(v)?,
            BoolExpr::Not(e) => !e.eval_with(lookup)?,
            BoolExpr::And(a, b) => a.eval_with(lookup)? & b.eval_with(lookup)?,
            BoolExpr::Or(a, b) => a.eval_with(lookup)? | b.eval_with(lookup)?,
        })
    }

    pub fn eval(&self, assignment: &BTreeMap<Label, bool>) -> Option<bool> {
        self.eval_with(&|v| assignment.get(v).copied())
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Label>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(v) => {
                out.insert(v.clone());
            }
            BoolExpr::Not(e) => e.collect_vars(out),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Label) -> Label) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Var(v) => BoolExpr::Var(f(v)),
            BoolExpr::Not(e) => BoolExpr::not(e.map_vars(f)),
            BoolExpr::And(a, b) => BoolExpr::and(a.map_vars(f), b.map_vars(f)),
            BoolExpr::Or(a, b) => BoolExpr::or(a.map_vars(f), b.map_vars(f)),
        }
    }
}

/// Whether a labelled collection is a record or a choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Record,
    Choice,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Record => "record",
            Kind::Choice => "choice",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub guard: BoolExpr,
    pub term: Term,
}

/// A record or choice: label-keyed elements plus an optional tail variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collection {
    pub kind: Kind,
    pub elements: BTreeMap<Label, Element>,
    pub tail: Option<Label>,
}

impl Collection {
    pub fn new(kind: Kind) -> Self {
        Collection {
            kind,
            elements: BTreeMap::new(),
            tail: None,
        }
    }

    pub fn with(mut self, label: &str, term: Term) -> Self {
        self.elements.insert(
            Label::from_static(label),
            Element {
                guard: BoolExpr::TRUE,
                term,
            },
        );
        self
    }

    pub fn with_guarded(mut self, label: &str, guard: BoolExpr, term: Term) -> Self {
        self.elements
            .insert(Label::from_static(label), Element { guard, term });
        self
    }

    pub fn with_tail(mut self, var: &str) -> Self {
        self.tail = Some(Label::from_static(var));
        self
    }

    pub fn get(&self, label: &Label) -> Option<&Element> {
        self.elements.get(label)
    }

    /// Elements whose guard is the constant `true`.
    pub fn present(&self) -> impl Iterator<Item = (&Label, &Term)> {
        self.elements
            .iter()
            .filter(|(_, e)| e.guard == BoolExpr::TRUE)
            .map(|(l, e)| (l, &e.term))
    }
}

/// An MDL term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Symbol(Label),
    Var(Label),
    Collection(Collection),
}

impl Term {
    /// The empty record.
    pub fn nil() -> Self {
        Term::Collection(Collection::new(Kind::Record))
    }

    pub fn empty_choice() -> Self {
        Term::Collection(Collection::new(Kind::Choice))
    }

    pub fn symbol(name: &str) -> Self {
        Term::Symbol(Label::from_static(name))
    }

    pub fn var(name: &str) -> Self {
        Term::Var(Label::from_static(name))
    }

    pub fn record() -> Collection {
        Collection::new(Kind::Record)
    }

    pub fn choice() -> Collection {
        Collection::new(Kind::Choice)
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Collection(c)
            if c.kind == Kind::Record && c.elements.is_empty() && c.tail.is_none())
    }

    pub fn kind(&self) -> Option<Kind> {
        match self {
            Term::Collection(c) => Some(c.kind),
            _ => None,
        }
    }

    pub fn as_collection(&self) -> Option<&Collection> {
        match self {
            Term::Collection(c) => Some(c),
            _ => None,
        }
    }

    /// No variables anywhere and every guard is a constant.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Symbol(_) => true,
            Term::Var(_) => false,
            Term::Collection(c) => {
                c.tail.is_none()
                    && c.elements
                        .values()
                        .all(|e| e.guard.is_const().is_some() && e.term.is_ground())
            }
        }
    }

    pub fn free_vars(&self) -> FreeVars {
        let mut fv = FreeVars::default();
        self.collect_free_vars(&mut fv);
        fv
    }

    pub fn collect_free_vars(&self, fv: &mut FreeVars) {
        match self {
            Term::Symbol(_) => {}
            Term::Var(v) => {
                fv.term_vars.insert(v.clone());
            }
            Term::Collection(c) => {
                if let Some(t) = &c.tail {
                    fv.term_vars.insert(t.clone());
                }
                for e in c.elements.values() {
                    e.guard.collect_vars(&mut fv.bool_vars);
                    e.term.collect_free_vars(fv);
                }
            }
        }
    }

    /// Visits every tail variable together with the kind of its collection.
    pub fn for_each_tail(&self, f: &mut impl FnMut(&Label, Kind)) {
        if let Term::Collection(c) = self {
            if let Some(t) = &c.tail {
                f(t, c.kind);
            }
            for e in c.elements.values() {
                e.term.for_each_tail(f);
            }
        }
    }

    /// Renames term variables with `terms` and Boolean variables with `bools`.
    pub fn rename_vars(
        &self,
        terms: &mut impl FnMut(&Label) -> Label,
        bools: &mut impl FnMut(&Label) -> Label,
    ) -> Term {
        match self {
            Term::Symbol(s) => Term::Symbol(s.clone()),
            Term::Var(v) => Term::Var(terms(v)),
            Term::Collection(c) => {
                let mut elements = BTreeMap::new();
                for (l, e) in &c.elements {
                    let guard = e.guard.map_vars(bools);
                    let term = e.term.rename_vars(terms, bools);
                    elements.insert(l.clone(), Element { guard, term });
                }
                Term::Collection(Collection {
                    kind: c.kind,
                    elements,
                    tail: c.tail.as_ref().map(|t| terms(t)),
                })
            }
        }
    }
}

impl From<Collection> for Term {
    fn from(c: Collection) -> Self {
        Term::Collection(c)
    }
}

/// Free variables of a term, split by sort.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub term_vars: BTreeSet<Label>,
    pub bool_vars: BTreeSet<Label>,
}

impl FreeVars {
    pub fn extend(&mut self, other: FreeVars) {
        self.term_vars.extend(other.term_vars);
        self.bool_vars.extend(other.bool_vars);
    }
}
