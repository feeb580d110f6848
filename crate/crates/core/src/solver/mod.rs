//! Solving seniority constraints.
//!
//! Boolean variables are handled by a SAT search over the structural
//! clauses of each constraint. For each Boolean model the guards are
//! evaluated and term variables are solved by bound propagation; the
//! candidate is then checked against the original constraints. A model that
//! fails is blocked and the search continues, so the loop is complete over
//! Boolean assignments.
//!
//! With `prefer_true`, Boolean variables are fixed one at a time in order,
//! each to `true` whenever some solution still allows it.

mod bounds;
mod brute;
mod sat;
mod structural;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::constraints::{ConstraintSet, Origin};
use crate::mdl::{eval_guards, ground, parse_term, GroundError, Label, Substitution, SyntaxError, Term};
use crate::seniority::leq;

pub use bounds::{solve_terms, BoundsFailure};
pub use brute::{brute_solve, enumerate_terms, term_depth, vocabulary, BruteError, Universe};
pub use sat::{Cnf, Formula, Lit};
pub use structural::structural_clauses;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariableOrder {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Bound-propagation rounds per Boolean model before giving up.
    pub max_rounds: usize,
    pub prefer_true: bool,
    pub variable_order: VariableOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_rounds: 64,
            prefer_true: true,
            variable_order: VariableOrder::Lexicographic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub booleans: BTreeMap<Label, bool>,
    pub terms: BTreeMap<Label, Term>,
}

impl Solution {
    pub fn substitution(&self) -> Substitution {
        Substitution {
            booleans: self.booleans.clone(),
            terms: self.terms.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Solution),
    /// Constraints involved in the conflict.
    Unsat(Vec<Origin>),
    /// Term propagation did not settle within this many rounds.
    Diverged(usize),
}

enum Found {
    Sat(Solution),
    /// Constraint indices blamed by the first rejected model, if any.
    Unsat(Option<Vec<usize>>),
    Diverged(usize),
}

struct Search<'a> {
    cs: &'a ConstraintSet,
    base: Formula,
    max_rounds: usize,
}

impl<'a> Search<'a> {
    fn new(cs: &'a ConstraintSet, max_rounds: usize) -> Self {
        let mut base = Formula::new(&cs.bool_vars);
        for c in &cs.constraints {
            for clause in structural_clauses(&c.junior, &c.senior) {
                base.assert(&clause);
            }
        }
        Search {
            cs,
            base,
            max_rounds,
        }
    }

    fn find(&self, assumptions: &[Lit]) -> Found {
        let mut formula = self.base.clone();
        let mut blame = None;
        loop {
            let Some(model) = formula.solve(assumptions) else {
                return Found::Unsat(blame);
            };
            let booleans: BTreeMap<Label, bool> = self
                .cs
                .bool_vars
                .iter()
                .map(|v| (v.clone(), model[v]))
                .collect();
            let failed = match self.terms_for(&booleans) {
                Ok(terms) => {
                    let sol = Solution { booleans, terms };
                    let failed = self.failing_indices(&sol);
                    if failed.is_empty() {
                        return Found::Sat(sol);
                    }
                    failed
                }
                Err(BoundsFailure::Conflict(ix)) => ix,
                Err(BoundsFailure::Diverged(n)) => return Found::Diverged(n),
            };
            blame.get_or_insert(failed);
            let block = self
                .cs
                .bool_vars
                .iter()
                .map(|v| formula.lit(v, !model[v]).expect("allocated"))
                .collect();
            formula.add_clause(block);
        }
    }

    fn terms_for(&self, booleans: &BTreeMap<Label, bool>) -> Result<BTreeMap<Label, Term>, BoundsFailure> {
        let mut pairs = Vec::with_capacity(self.cs.len());
        for (i, c) in self.cs.constraints.iter().enumerate() {
            let j = eval_guards(&c.junior, booleans);
            let s = eval_guards(&c.senior, booleans);
            match (j, s) {
                (Ok(j), Ok(s)) => pairs.push((j, s)),
                _ => return Err(BoundsFailure::Conflict(vec![i])),
            }
        }
        solve_terms(&pairs, &self.cs.term_vars, self.max_rounds)
    }

    fn failing_indices(&self, sol: &Solution) -> Vec<usize> {
        let s = sol.substitution();
        (0..self.cs.len())
            .filter(|&i| !holds(&self.cs.constraints[i], &s).unwrap_or(false))
            .collect()
    }

    fn origins(&self, ix: &[usize]) -> Vec<Origin> {
        ix.iter().map(|&i| self.cs.constraints[i].origin.clone()).collect()
    }

    /// Constraints whose own structural clauses are contradictory.
    fn self_contradictory(&self) -> Vec<usize> {
        (0..self.cs.len())
            .filter(|&i| {
                let c = &self.cs.constraints[i];
                let mut f = Formula::new(&self.cs.bool_vars);
                for clause in structural_clauses(&c.junior, &c.senior) {
                    f.assert(&clause);
                }
                f.solve(&[]).is_none()
            })
            .collect()
    }
}

fn holds(c: &crate::constraints::Constraint, s: &Substitution) -> Result<bool, GroundError> {
    let j = ground(&c.junior, s)?;
    let t = ground(&c.senior, s)?;
    Ok(leq(&j, &t))
}

pub fn solve(cs: &ConstraintSet, config: &SolverConfig) -> Verdict {
    let search = Search::new(cs, config.max_rounds);
    let mut best = match search.find(&[]) {
        Found::Sat(sol) => sol,
        Found::Diverged(n) => return Verdict::Diverged(n),
        Found::Unsat(blame) => {
            let mut ix = search.self_contradictory();
            if ix.is_empty() {
                ix = blame.unwrap_or_default();
            }
            let origins = if ix.is_empty() {
                cs.constraints.iter().map(|c| c.origin.clone()).collect()
            } else {
                search.origins(&ix)
            };
            return Verdict::Unsat(origins);
        }
    };
    if !config.prefer_true {
        return Verdict::Sat(best);
    }

    let mut order: Vec<&Label> = cs.bool_vars.iter().collect();
    if config.variable_order == VariableOrder::ReverseLexicographic {
        order.reverse();
    }
    let mut committed = Vec::with_capacity(order.len());
    for v in order {
        let yes = search.base.lit(v, true).expect("allocated");
        if best.booleans[v] {
            committed.push(yes);
            continue;
        }
        committed.push(yes);
        match search.find(&committed) {
            Found::Sat(sol) => best = sol,
            // a divergent branch is treated like an impossible one
            Found::Unsat(_) | Found::Diverged(_) => {
                committed.pop();
                committed.push(yes.negate());
            }
        }
    }
    Verdict::Sat(best)
}

/// Outcome of checking a solution against every constraint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub failures: Vec<Origin>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Grounds each constraint under `sol` and checks it.
///
/// Missing variables are an error; shape errors while grounding (a tail of
/// the wrong kind, a duplicated label) count as failed constraints.
pub fn verify(cs: &ConstraintSet, sol: &Solution) -> Result<VerifyReport, GroundError> {
    let s = sol.substitution();
    let mut report = VerifyReport::default();
    for c in &cs.constraints {
        match holds(c, &s) {
            Ok(true) => {}
            Ok(false) => report.failures.push(c.origin.clone()),
            Err(e @ (GroundError::UncoveredBoolVar(_) | GroundError::UncoveredTermVar(_))) => {
                return Err(e)
            }
            Err(_) => report.failures.push(c.origin.clone()),
        }
    }
    Ok(report)
}

/// `bool <name> = <value>` lines followed by `term <name> = <term>` lines.
pub fn render_solution(sol: &Solution) -> String {
    let mut out = String::new();
    for (v, b) in &sol.booleans {
        writeln!(out, "bool {v} = {b}").unwrap();
    }
    for (v, t) in &sol.terms {
        writeln!(out, "term {v} = {t}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionFileError {
    #[error("line {line}: expected `bool <name> = true|false` or `term <name> = <term>`")]
    Malformed { line: usize },
    #[error("line {line}: {source}")]
    Term { line: usize, source: SyntaxError },
    #[error("line {line}: `{name}` assigned twice")]
    Duplicate { line: usize, name: String },
}

pub fn parse_solution(text: &str) -> Result<Solution, SolutionFileError> {
    let mut sol = Solution::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let malformed = SolutionFileError::Malformed { line };
        let (head, value) = content.split_once('=').ok_or(malformed.clone())?;
        let mut words = head.split_whitespace();
        let (Some(sort), Some(name), None) = (words.next(), words.next(), words.next()) else {
            return Err(malformed);
        };
        let name = Label::new(name).ok_or(malformed.clone())?;
        let fresh = match sort {
            "bool" => {
                let b = match value.trim() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(malformed),
                };
                sol.booleans.insert(name.clone(), b).is_none()
            }
            "term" => {
                let t = parse_term(value).map_err(|source| SolutionFileError::Term { line, source })?;
                sol.terms.insert(name.clone(), t).is_none()
            }
            _ => return Err(malformed),
        };
        if !fresh {
            return Err(SolutionFileError::Duplicate {
                line,
                name: name.to_string(),
            });
        }
    }
    Ok(sol)
}
