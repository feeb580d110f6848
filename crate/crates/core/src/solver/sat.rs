//! A small DPLL satisfiability procedure with unit propagation and
//! assumptions, plus Tseitin encoding of guard formulas.

use std::collections::BTreeMap;

use crate::mdl::{BoolExpr, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        Lit((var as u32) << 1 | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        debug_assert!(clause.iter().all(|l| l.var() < self.num_vars));
        self.clauses.push(clause);
    }

    /// Finds a model extending `assumptions`, or `None` if there is none.
    pub fn solve(&self, assumptions: &[Lit]) -> Option<Vec<bool>> {
        let mut assign = vec![None; self.num_vars];
        for &a in assumptions {
            match assign[a.var()] {
                Some(v) if v != a.positive() => return None,
                _ => assign[a.var()] = Some(a.positive()),
            }
        }
        if self.search(&mut assign) {
            Some(assign.into_iter().map(|v| v.unwrap_or(false)).collect())
        } else {
            None
        }
    }

    fn search(&self, assign: &mut Vec<Option<bool>>) -> bool {
        if !self.propagate(assign) {
            return false;
        }
        let Some(var) = assign.iter().position(Option::is_none) else {
            return true;
        };
        for value in [true, false] {
            let mut trial = assign.clone();
            trial[var] = Some(value);
            if self.search(&mut trial) {
                *assign = trial;
                return true;
            }
        }
        false
    }

    /// Unit propagation to a fixed point; `false` on a conflict.
    fn propagate(&self, assign: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for clause in &self.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &lit in clause {
                    match assign[lit.var()] {
                        Some(v) if v == lit.positive() => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open += 1;
                            unassigned = Some(lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, unassigned) {
                    (0, _) => return false,
                    (1, Some(lit)) => {
                        assign[lit.var()] = Some(lit.positive());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

/// Named Boolean variables over a CNF, with formulas asserted via Tseitin.
#[derive(Debug, Clone)]
pub struct Formula {
    cnf: Cnf,
    names: BTreeMap<Label, usize>,
    true_var: usize,
}

impl Formula {
    /// Creates the formula with `vars` allocated first, in iteration order.
    pub fn new<'a>(vars: impl IntoIterator<Item = &'a Label>) -> Self {
        let mut cnf = Cnf::default();
        let mut names = BTreeMap::new();
        for v in vars {
            let idx = cnf.new_var();
            names.insert(v.clone(), idx);
        }
        let true_var = cnf.new_var();
        cnf.add_clause(vec![Lit::new(true_var, true)]);
        Formula {
            cnf,
            names,
            true_var,
        }
    }

    pub fn lit(&self, name: &Label, positive: bool) -> Option<Lit> {
        self.names.get(name).map(|&v| Lit::new(v, positive))
    }

    pub fn assert(&mut self, e: &BoolExpr) {
        match e {
            BoolExpr::Const(true) => {}
            BoolExpr::And(a, b) => {
                self.assert(a);
                self.assert(b);
            }
            _ => {
                let l = self.encode(e);
                self.cnf.add_clause(vec![l]);
            }
        }
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        self.cnf.add_clause(clause);
    }

    fn encode(&mut self, e: &BoolExpr) -> Lit {
        match e {
            BoolExpr::Const(b) => Lit::new(self.true_var, *b),
            BoolExpr::Var(v) => match self.names.get(v) {
                Some(&i) => Lit::new(i, true),
                None => {
                    let i = self.cnf.new_var();
                    self.names.insert(v.clone(), i);
                    Lit::new(i, true)
                }
            },
            BoolExpr::Not(inner) => self.encode(inner).negate(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                let la = self.encode(a);
                let lb = self.encode(b);
                let out = Lit::new(self.cnf.new_var(), true);
                if matches!(e, BoolExpr::And(..)) {
                    // out <-> la & lb
                    self.cnf.add_clause(vec![out.negate(), la]);
                    self.cnf.add_clause(vec![out.negate(), lb]);
                    self.cnf.add_clause(vec![out, la.negate(), lb.negate()]);
                } else {
                    // out <-> la | lb
                    self.cnf.add_clause(vec![out.negate(), la, lb]);
                    self.cnf.add_clause(vec![out, la.negate()]);
                    self.cnf.add_clause(vec![out, lb.negate()]);
                }
                out
            }
        }
    }

    /// A model as values of the named variables.
    pub fn solve(&self, assumptions: &[Lit]) -> Option<BTreeMap<Label, bool>> {
        let model = self.cnf.solve(assumptions)?;
        Some(
            self.names
                .iter()
                .map(|(n, &i)| (n.clone(), model[i]))
                .collect(),
        )
    }
}
