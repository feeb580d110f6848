//! Interface derivation from service stubs, and shell routing.
//!
//! Each processing function `f` on input port `p` becomes an element
//! `f(<svc>_f): {params... | $<svc>_in_f}` of the choice on input port `p`.
//! Each salvo `s` becomes `s(G): {params... | $<svc>_out<k>_s}` on its output
//! port `k`, where `G` is the disjunction of its callers' Boolean variables.
//! Input port 1 and output port 1 share the flow-inheritance tail
//! `$<svc>_flow`. Every caller `f` of a salvo `s` contributes the intra-service
//! constraint `$<svc>_in_f ⊑ $<svc>_out<k>_s`.

mod shell;
mod stub;

use std::collections::BTreeMap;

use crate::mdl::{BoolExpr, Collection, Element, Kind, Label, Term};

pub use shell::{apply_shell, parse_shell, OutputRoute, ShellError, ShellSpec};
pub use stub::{parse_stub, Param, ProcessingFn, Salvo, ServiceStub, StubError};

/// The interfaces of one service plus its intra-service constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedService {
    pub name: Label,
    pub input_ifaces: BTreeMap<u32, Term>,
    pub output_ifaces: BTreeMap<u32, Term>,
    /// Pairs `(junior, senior)` of term variables.
    pub intra_constraints: Vec<(Label, Label)>,
}

impl DerivedService {
    pub fn new(name: Label) -> Self {
        DerivedService {
            name,
            input_ifaces: BTreeMap::new(),
            output_ifaces: BTreeMap::new(),
            intra_constraints: Vec::new(),
        }
    }

    pub fn interface(&self, direction: Direction, port: u32) -> Option<&Term> {
        match direction {
            Direction::In => self.input_ifaces.get(&port),
            Direction::Out => self.output_ifaces.get(&port),
        }
    }

    /// All interface terms, inputs first, each side in port order.
    pub fn interfaces(&self) -> impl Iterator<Item = &Term> {
        self.input_ifaces.values().chain(self.output_ifaces.values())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

pub fn bool_var_name(service: &Label, function: &Label) -> Label {
    fresh(format!("{service}_{function}"))
}

pub fn input_tail_name(service: &Label, function: &Label) -> Label {
    fresh(format!("{service}_in_{function}"))
}

pub fn output_tail_name(service: &Label, port: u32, salvo: &Label) -> Label {
    fresh(format!("{service}_out{port}_{salvo}"))
}

pub fn flow_tail_name(service: &Label) -> Label {
    fresh(format!("{service}_flow"))
}

fn fresh(name: String) -> Label {
    Label::new(name).expect("composed from identifiers")
}

/// Derives the choice-of-records interfaces of `stub`.
pub fn derive_interfaces(stub: &ServiceStub) -> DerivedService {
    let svc = &stub.name;
    let flow = flow_tail_name(svc);
    let mut out = DerivedService::new(svc.clone());

    let empty_port = |port: u32| Collection {
        kind: Kind::Choice,
        elements: BTreeMap::new(),
        tail: (port == 1).then(|| flow.clone()),
    };
    let mut inputs: BTreeMap<u32, Collection> = BTreeMap::from([(1, empty_port(1))]);
    let mut outputs: BTreeMap<u32, Collection> = BTreeMap::from([(1, empty_port(1))]);

    for f in &stub.inputs {
        let body = record_of(&f.params, input_tail_name(svc, &f.name));
        inputs.entry(f.port).or_insert_with(|| empty_port(f.port)).elements.insert(
            f.name.clone(),
            Element {
                guard: BoolExpr::Var(bool_var_name(svc, &f.name)),
                term: body,
            },
        );
    }

    for s in &stub.salvos {
        let tail = output_tail_name(svc, s.port, &s.name);
        let guard = BoolExpr::any(s.callers.iter().map(|c| BoolExpr::Var(bool_var_name(svc, c))));
        outputs.entry(s.port).or_insert_with(|| empty_port(s.port)).elements.insert(
            s.name.clone(),
            Element {
                guard,
                term: record_of(&s.params, tail.clone()),
            },
        );
        for c in &s.callers {
            out.intra_constraints
                .push((input_tail_name(svc, c), tail.clone()));
        }
    }

    out.input_ifaces = inputs.into_iter().map(|(p, c)| (p, c.into())).collect();
    out.output_ifaces = outputs.into_iter().map(|(p, c)| (p, c.into())).collect();
    out
}

fn record_of(params: &[Param], tail: Label) -> Term {
    let mut c = Collection::new(Kind::Record);
    for p in params {
        c.elements.insert(
            p.name.clone(),
            Element {
                guard: BoolExpr::TRUE,
                term: Term::Symbol(p.ty.clone()),
            },
        );
    }
    c.tail = Some(tail);
    c.into()
}

/// Checks that every interface is a choice whose elements are all records.
pub fn is_choice_of_records(t: &Term) -> bool {
    match t {
        Term::Collection(c) if c.kind == Kind::Choice => c
            .elements
            .values()
            .all(|e| e.term.kind() == Some(Kind::Record)),
        _ => false,
    }
}

/// Renames variables to `v0, v1, …` (terms) and `g0, g1, …` (Booleans) in
/// order of first occurrence, walking inputs then outputs by port, and
/// sorts the intra-service constraints. Two derivations that differ only in
/// fresh-variable names have equal canonical forms.
pub fn canonical_rename(d: &DerivedService) -> DerivedService {
    fn walk(t: &Term, terms: &mut Vec<Label>, bools: &mut Vec<Label>) {
        fn guard(e: &BoolExpr, bools: &mut Vec<Label>) {
            match e {
                BoolExpr::Const(_) => {}
                BoolExpr::Var(v) => {
                    if !bools.contains(v) {
                        bools.push(v.clone());
                    }
                }
                BoolExpr::Not(a) => guard(a, bools),
                BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                    guard(a, bools);
                    guard(b, bools);
                }
            }
        }
        let note = |v: &Label, terms: &mut Vec<Label>| {
            if !terms.contains(v) {
                terms.push(v.clone());
            }
        };
        match t {
            Term::Symbol(_) => {}
            Term::Var(v) => note(v, terms),
            Term::Collection(c) => {
                for e in c.elements.values() {
                    guard(&e.guard, bools);
                    walk(&e.term, terms, bools);
                }
                if let Some(v) = &c.tail {
                    note(v, terms);
                }
            }
        }
    }

    let (mut terms, mut bools) = (Vec::new(), Vec::new());
    for t in d.interfaces() {
        walk(t, &mut terms, &mut bools);
    }
    for (j, s) in &d.intra_constraints {
        walk(&Term::Var(j.clone()), &mut terms, &mut bools);
        walk(&Term::Var(s.clone()), &mut terms, &mut bools);
    }
    let index = |names: &[Label], prefix: &str, v: &Label| {
        let i = names.iter().position(|n| n == v).expect("visited");
        fresh(format!("{prefix}{i}"))
    };
    let mut rt = |v: &Label| index(&terms, "v", v);
    let mut rb = |v: &Label| index(&bools, "g", v);

    let mut out = DerivedService::new(d.name.clone());
    for (p, t) in &d.input_ifaces {
        out.input_ifaces.insert(*p, t.rename_vars(&mut rt, &mut rb));
    }
    for (p, t) in &d.output_ifaces {
        out.output_ifaces.insert(*p, t.rename_vars(&mut rt, &mut rb));
    }
    let mut intra: Vec<(Label, Label)> = d.intra_constraints.iter().map(|(j, s)| (rt(j), rt(s))).collect();
    intra.sort_by(|a, b| {
        let key = |l: &Label| l.as_str()[1..].parse::<usize>().unwrap_or(usize::MAX);
        (key(&a.0), key(&a.1)).cmp(&(key(&b.0), key(&b.1)))
    });
    intra.dedup();
    out.intra_constraints = intra;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdl::{parse_term, render_term};

    const SELLER: &str = "\
service Seller
in 1 request(title: string)
in 1 payment(title: string, money: int)
salvo 1 response(title: string, money: int) from request
salvo 1 invoice(id: int) from payment
salvo 2 error(msg: string) from request, payment
";

    fn derive(src: &str) -> DerivedService {
        derive_interfaces(&parse_stub(src).unwrap())
    }

    #[test]
    fn seller_interfaces() {
        let d = derive(SELLER);
        assert_eq!(
            d.input_ifaces[&1],
            parse_term(
                "(: request(Seller_request): {title: string | $Seller_in_request}, \
                 payment(Seller_payment): {title: string, money: int | $Seller_in_payment} \
                 | $Seller_flow :)"
            )
            .unwrap()
        );
        assert_eq!(
            render_term(&d.output_ifaces[&2]),
            "(: error(Seller_request || Seller_payment): {msg: string | $Seller_out2_error} :)"
        );
        assert_eq!(d.output_ifaces[&1].as_collection().unwrap().tail.as_ref().unwrap().as_str(), "Seller_flow");
        assert_eq!(d.intra_constraints.len(), 4);
        assert!(d.interfaces().all(is_choice_of_records));
    }

    #[test]
    fn single_function_no_salvos() {
        let d = derive("service S\nin 1 f(a: int)\n");
        assert_eq!(
            d.input_ifaces[&1],
            parse_term("(: f(S_f): {a: int | $S_in_f} | $S_flow :)").unwrap()
        );
        assert_eq!(d.output_ifaces[&1], parse_term("(: | $S_flow :)").unwrap());
        assert_eq!(d.output_ifaces.len(), 1);
        assert!(d.intra_constraints.is_empty());
    }

    #[test]
    fn two_callers() {
        let d = derive("service S\nin 1 p()\nin 1 q()\nsalvo 1 r() from p, q\n");
        let out = d.output_ifaces[&1].as_collection().unwrap();
        let r = out.get(&Label::from_static("r")).unwrap();
        assert_eq!(r.guard, BoolExpr::or(BoolExpr::var("S_p"), BoolExpr::var("S_q")));
        assert_eq!(
            d.intra_constraints,
            vec![
                (Label::from_static("S_in_p"), Label::from_static("S_out1_r")),
                (Label::from_static("S_in_q"), Label::from_static("S_out1_r")),
            ]
        );
    }

    #[test]
    fn auxiliary_ports_have_no_flow_tail() {
        let d = derive("service S\nin 2 p()\nsalvo 3 r() from p\n");
        assert_eq!(d.input_ifaces[&2].as_collection().unwrap().tail, None);
        assert_eq!(d.output_ifaces[&3].as_collection().unwrap().tail, None);
        assert_eq!(d.input_ifaces[&1], parse_term("(: | $S_flow :)").unwrap());
    }

    #[test]
    fn derivation_is_deterministic() {
        assert_eq!(derive(SELLER), derive(SELLER));
    }
}
