//! Branch-and-reduce driver.
//!
//! Every node is first simplified to a fixed point. Branching then follows
//! the remaining lines in priority order: a variable in three or more
//! 3-literal clauses (line 10), a pair of clauses sharing at least two
//! variables (line 12), a heavy variable (line 13), and finally the
//! polynomial endgame for formulas of maximum degree 2 (line 14).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analysis::MeasureLog;
use crate::error::{Error, Result};
use crate::formula::{Clause, ClauseId, Formula, Literal, Model, Subclause, TrailEntry, VariableId};
use crate::measure::formula_measure;
use crate::polytime::deg2_assignment;
use crate::simplify::{
    cascade_with, line10_candidates, rewrite_1j, shared_pairs, CascadeObserver, RuleId,
    SimplificationOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Sat,
    Unsat,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Sat => "SATISFIABLE",
            Decision::Unsat => "UNSATISFIABLE",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub max_depth: u64,
    /// Keyed by simplification rule (`L1` .. `L12a`) or branch kind.
    pub rule_fires: BTreeMap<String, u64>,
    /// Measure of the input formula.
    pub mu_initial: f64,
    /// Filled only by instrumented runs.
    pub measure: MeasureLog,
    /// Nodes where a lower-priority branch was taken although a
    /// higher-priority trigger existed. Instrumented runs only.
    pub priority_violations: u64,
    /// Branch children that did not lose a live variable. Instrumented runs
    /// only.
    pub progress_violations: u64,
}

impl SearchStats {
    fn fire(&mut self, key: &str) {
        *self.rule_fires.entry(key.to_string()).or_default() += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub decision: Decision,
    pub model: Option<Model>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Use the pattern branches on a variable `s` in two 3-literal clauses.
    pub case21: bool,
    /// Record measure drops and check the per-node invariants.
    pub instrument: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            case21: true,
            instrument: false,
        }
    }
}

/// Where a pattern branch was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case21Context {
    Overlap { first: ClauseId, second: ClauseId },
    Heavy(VariableId),
}

/// A variable `s` outside the context clauses whose two 3-literal clauses
/// connect variables of the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case21Pattern {
    pub context: Case21Context,
    pub s: VariableId,
    pub s_clauses: [ClauseId; 2],
    /// Literal to branch on: `s` itself, or for a heavy variable whose
    /// clauses are linked through one shared clause, the literal of that
    /// clause in the first clause of `s`.
    pub branch: Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchDecision {
    Line10Var(Literal),
    /// Two 3-literal clauses of a line-10 variable share two variables.
    Line10Simplify { first: ClauseId, second: ClauseId },
    Line12Sub {
        delta: Subclause,
        first: ClauseId,
        second: ClauseId,
    },
    Line13Var(Literal),
    Case21Var(Case21Pattern),
    PolyCase,
}

impl BranchDecision {
    pub fn label(&self) -> &'static str {
        match self {
            BranchDecision::Line10Var(_) => "L10",
            BranchDecision::Line10Simplify { .. } => "L10simplify",
            BranchDecision::Line12Sub { .. } => "L12",
            BranchDecision::Line13Var(_) => "L13",
            BranchDecision::Case21Var(_) => "case2.1",
            BranchDecision::PolyCase => "L14",
        }
    }
}

fn three_literal_clauses(f: &Formula, var: VariableId) -> Vec<&Clause> {
    f.clauses_of(var)
        .into_iter()
        .map(|id| f.clause(id).expect("indexed clause exists"))
        .filter(|c| c.len() == 3)
        .collect()
}

fn literal_of(clause: &Clause, var: VariableId) -> Literal {
    clause
        .literals()
        .find(|l| l.var() == var)
        .expect("variable occurs in clause")
}

/// Heavy variable with the largest degree, then the largest total length of
/// its clauses, then the smallest id.
fn heaviest(f: &Formula) -> Option<VariableId> {
    f.live_vars()
        .filter(|&v| f.is_heavy(v))
        .max_by_key(|&v| {
            let total: usize = f
                .clauses_of(v)
                .iter()
                .map(|&id| f.clause(id).expect("indexed clause exists").len())
                .sum();
            (f.degree(v), total, std::cmp::Reverse(v))
        })
}

/// Searches the pattern in which a variable `s` outside the context sits in
/// exactly two 3-literal clauses that connect context variables. The
/// smallest such `s` is returned.
pub fn detect_case21(f: &Formula, context: Case21Context) -> Option<Case21Pattern> {
    match context {
        Case21Context::Overlap { first, second } => detect_overlap(f, first, second),
        Case21Context::Heavy(x) => detect_heavy(f, x),
    }
    .map(|(s, s_clauses, branch)| Case21Pattern {
        context,
        s,
        s_clauses,
        branch,
    })
}

/// Variables outside `inside` that share a 3-literal clause with one of
/// `seeds`, ascending.
fn outside_candidates(
    f: &Formula,
    seeds: &BTreeSet<VariableId>,
    inside: &BTreeSet<VariableId>,
) -> BTreeSet<VariableId> {
    let mut out = BTreeSet::new();
    for &v in seeds {
        for c in three_literal_clauses(f, v) {
            out.extend(c.vars().into_iter().filter(|u| !inside.contains(u)));
        }
    }
    out
}

fn detect_overlap(
    f: &Formula,
    first: ClauseId,
    second: ClauseId,
) -> Option<(VariableId, [ClauseId; 2], Literal)> {
    let v1 = f.clause(first).ok()?.vars();
    let v2 = f.clause(second).ok()?.vars();
    let left: BTreeSet<VariableId> = v1.difference(&v2).copied().collect();
    let right: BTreeSet<VariableId> = v2.difference(&v1).copied().collect();
    let inside: BTreeSet<VariableId> = v1.union(&v2).copied().collect();
    for s in outside_candidates(f, &left, &inside) {
        let threes = three_literal_clauses(f, s);
        if threes.len() != 2 {
            continue;
        }
        let connects = threes.iter().all(|c| {
            let others: Vec<VariableId> = c.vars().into_iter().filter(|&u| u != s).collect();
            others.len() == 2
                && ((left.contains(&others[0]) && right.contains(&others[1]))
                    || (left.contains(&others[1]) && right.contains(&others[0])))
        });
        if connects {
            return Some((s, [threes[0].id(), threes[1].id()], literal_of(threes[0], s)));
        }
    }
    None
}

fn detect_heavy(f: &Formula, x: VariableId) -> Option<(VariableId, [ClauseId; 2], Literal)> {
    let x_clauses = f.clauses_of(x);
    let mut home: BTreeMap<VariableId, usize> = BTreeMap::new();
    for (i, &id) in x_clauses.iter().enumerate() {
        for v in f.clause(id).ok()?.vars() {
            if v != x {
                home.entry(v).or_insert(i);
            }
        }
    }
    let seeds: BTreeSet<VariableId> = home.keys().copied().collect();
    let mut inside = seeds.clone();
    inside.insert(x);
    for s in outside_candidates(f, &seeds, &inside) {
        let threes = three_literal_clauses(f, s);
        if threes.len() != 2 {
            continue;
        }
        let spans: Option<Vec<BTreeSet<usize>>> = threes
            .iter()
            .map(|c| {
                let homes: Vec<usize> = c
                    .vars()
                    .into_iter()
                    .filter(|&u| u != s)
                    .map(|u| home.get(&u).copied())
                    .collect::<Option<Vec<usize>>>()?;
                let span: BTreeSet<usize> = homes.iter().copied().collect();
                (homes.len() == 2 && span.len() == 2).then_some(span)
            })
            .collect();
        let Some(spans) = spans else { continue };
        let ids = [threes[0].id(), threes[1].id()];
        let common: Vec<usize> = spans[0].intersection(&spans[1]).copied().collect();
        match common.as_slice() {
            [_, _] => return Some((s, ids, literal_of(threes[0], s))),
            [shared] => {
                let b1 = threes[0]
                    .literals()
                    .find(|l| l.var() != s && home.get(&l.var()) == Some(shared))
                    .expect("span contains the shared clause");
                return Some((s, ids, b1));
            }
            _ => {}
        }
    }
    None
}

/// Branching decision for a formula at a cascade fixed point, with the
/// pattern branches enabled.
pub fn choose_branch(f: &Formula) -> BranchDecision {
    choose_branch_with(f, true)
}

pub fn choose_branch_with(f: &Formula, case21: bool) -> BranchDecision {
    if let Some(&x) = line10_candidates(f).first() {
        let threes = three_literal_clauses(f, x);
        for (i, a) in threes.iter().enumerate() {
            for b in &threes[i + 1..] {
                if a.vars().intersection(&b.vars()).count() == 2 {
                    return BranchDecision::Line10Simplify {
                        first: a.id(),
                        second: b.id(),
                    };
                }
            }
        }
        return BranchDecision::Line10Var(literal_of(threes[0], x));
    }
    if let Some((&(first, second), _)) = shared_pairs(f, 2).iter().next() {
        if case21 {
            if let Some(p) = detect_case21(f, Case21Context::Overlap { first, second }) {
                return BranchDecision::Case21Var(p);
            }
        }
        let profile = f
            .overlap_profile(first, second)
            .expect("pair comes from the formula");
        return BranchDecision::Line12Sub {
            delta: profile.shared,
            first,
            second,
        };
    }
    if let Some(x) = heaviest(f) {
        if case21 {
            if let Some(p) = detect_case21(f, Case21Context::Heavy(x)) {
                return BranchDecision::Case21Var(p);
            }
        }
        let first = f.clause(f.clauses_of(x)[0]).expect("heavy variable has clauses");
        return BranchDecision::Line13Var(literal_of(first, x));
    }
    BranchDecision::PolyCase
}

/// The two children `lit = 1` and `lit = 0`, before simplification.
pub fn branch_literal(f: &Formula, lit: Literal) -> Result<(Formula, Formula)> {
    Ok((f.apply_assign(lit, true)?, f.apply_assign(lit, false)?))
}

/// The two children `x = 1` and `x = 0`, before simplification.
pub fn branch_variable(f: &Formula, x: VariableId) -> Result<(Formula, Formula)> {
    branch_literal(f, Literal::positive(x))
}

/// The two children `δ = 1` and `δ = 0` of the shared subclause of `c1` and
/// `c2`, before simplification. `δ = 1` zeroes every literal of both clauses
/// outside `δ`; `δ = 0` zeroes `δ`.
pub fn branch_subclause(
    f: &Formula,
    delta: &Subclause,
    c1: ClauseId,
    c2: ClauseId,
) -> Result<(Formula, Formula)> {
    if delta.literals.len() < 2 {
        return Err(Error::InvalidSubclause(format!(
            "subclause of size {} cannot be branched",
            delta.literals.len()
        )));
    }
    let (a, b) = (f.clause(c1)?, f.clause(c2)?);
    for l in &delta.literals {
        if !a.contains(*l) || !b.contains(*l) {
            return Err(Error::InvalidSubclause(format!("{l} is not shared by {c1} and {c2}")));
        }
    }
    let outside: BTreeSet<Literal> = a
        .literals()
        .chain(b.literals())
        .filter(|l| !delta.literals.contains(l))
        .collect();
    let zero = |lits: &BTreeSet<Literal>| -> Result<Formula> {
        let mut g = f.clone();
        for &l in lits {
            if !g.is_eliminated(l.var()) {
                g.assign(l, false)?;
            }
        }
        Ok(g)
    };
    Ok((zero(&outside)?, zero(&delta.literals)?))
}

/// Extends values of the variables left at a leaf to all input variables by
/// replaying `trail` backwards. Variables neither in `partial` nor on the
/// trail are free and take 0.
pub fn reconstruct_model(
    trail: &[TrailEntry],
    partial: &BTreeMap<VariableId, bool>,
    num_vars: usize,
) -> Result<Model> {
    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    let on_trail: BTreeSet<VariableId> = trail.iter().map(TrailEntry::var).collect();
    for (&v, &b) in partial {
        *values
            .get_mut(v.index())
            .ok_or(Error::UnknownVariable(v))? = Some(b);
    }
    for (i, slot) in values.iter_mut().enumerate() {
        if slot.is_none() && !on_trail.contains(&VariableId(i as u32)) {
            *slot = Some(false);
        }
    }
    let lookup = |values: &[Option<bool>], l: Literal| -> Result<bool> {
        values
            .get(l.var().index())
            .copied()
            .flatten()
            .map(|v| l.eval(v))
            .ok_or(Error::UnknownVariable(l.var()))
    };
    for entry in trail.iter().rev() {
        let value = match entry {
            TrailEntry::Assign { value, .. } => *value,
            TrailEntry::Link { definition, .. } => lookup(&values, *definition)?,
            TrailEntry::Resolve { partner, .. } => {
                let mut all_false = true;
                for &l in partner {
                    all_false &= !lookup(&values, l)?;
                }
                all_false
            }
        };
        let var = entry.var();
        *values
            .get_mut(var.index())
            .ok_or(Error::UnknownVariable(var))? = Some(value);
    }
    Ok(Model::new(
        values.into_iter().map(|v| v.unwrap_or(false)).collect(),
    ))
}

struct Tracker<'a> {
    stats: &'a mut SearchStats,
    instrument: bool,
    min_mu: Option<f64>,
}

impl CascadeObserver for Tracker<'_> {
    fn before_rule(&mut self, rule: RuleId, f: &Formula) {
        self.stats.fire(&rule.to_string());
        if self.instrument && !f.has_constants() {
            let mu = formula_measure(f).mu;
            self.min_mu = Some(self.min_mu.map_or(mu, |m| m.min(mu)));
        }
    }
}

struct Search<'a> {
    opts: &'a SolverOptions,
    stats: SearchStats,
}

impl Search<'_> {
    /// Cascades `f`; `start_mu` is the measure of a constant-free state that
    /// the caller already changed.
    fn simplify(&mut self, f: Formula, start_mu: Option<f64>) -> (SimplificationOutcome, Formula) {
        let mut tracker = Tracker {
            stats: &mut self.stats,
            instrument: self.opts.instrument,
            min_mu: start_mu,
        };
        let (outcome, g) = cascade_with(f, &mut tracker);
        let min_mu = tracker.min_mu;
        if self.opts.instrument && outcome == SimplificationOutcome::FixedPoint {
            if let Some(before) = min_mu {
                self.stats.measure.record_cascade(before, formula_measure(&g).mu);
            }
        }
        (outcome, g)
    }

    fn check_priority(&mut self, f: &Formula, decision: &BranchDecision) {
        let line10 = !line10_candidates(f).is_empty();
        let violated = match decision {
            BranchDecision::Line12Sub { .. } => line10,
            BranchDecision::Line13Var(_) => line10 || !shared_pairs(f, 2).is_empty(),
            BranchDecision::Case21Var(p) => match p.context {
                Case21Context::Overlap { .. } => line10,
                Case21Context::Heavy(_) => line10 || !shared_pairs(f, 2).is_empty(),
            },
            BranchDecision::PolyCase => f.live_vars().any(|v| f.degree(v) > 2),
            _ => false,
        };
        if violated {
            self.stats.priority_violations += 1;
        }
    }

    fn node(&mut self, mut f: Formula, depth: u64) -> Result<Option<Model>> {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        loop {
            if f.is_empty() {
                self.stats.leaves += 1;
                return reconstruct_model(f.trail(), &BTreeMap::new(), f.num_vars()).map(Some);
            }
            let decision = choose_branch_with(&f, self.opts.case21);
            self.stats.fire(decision.label());
            if self.opts.instrument {
                self.check_priority(&f, &decision);
            }
            let (one, zero) = match &decision {
                BranchDecision::PolyCase => {
                    self.stats.leaves += 1;
                    return match deg2_assignment(&f)? {
                        Some(partial) => {
                            reconstruct_model(f.trail(), &partial, f.num_vars()).map(Some)
                        }
                        None => Ok(None),
                    };
                }
                BranchDecision::Line10Simplify { first, second } => {
                    let profile = f.overlap_profile(*first, *second)?;
                    let g = rewrite_1j(&f, *first, *second, &profile)?;
                    let start = self.opts.instrument.then(|| formula_measure(&f).mu);
                    match self.simplify(g, start) {
                        (SimplificationOutcome::Unsat, _) => {
                            self.stats.leaves += 1;
                            return Ok(None);
                        }
                        (_, h) => {
                            f = h;
                            continue;
                        }
                    }
                }
                BranchDecision::Line10Var(l) | BranchDecision::Line13Var(l) => {
                    branch_literal(&f, *l)?
                }
                BranchDecision::Case21Var(p) => branch_literal(&f, p.branch)?,
                BranchDecision::Line12Sub {
                    delta,
                    first,
                    second,
                } => branch_subclause(&f, delta, *first, *second)?,
            };
            let parent_mu = self.opts.instrument.then(|| formula_measure(&f).mu);
            for child in [one, zero] {
                let (outcome, g) = self.simplify(child, None);
                if outcome == SimplificationOutcome::Unsat {
                    self.stats.nodes += 1;
                    self.stats.leaves += 1;
                    self.stats.max_depth = self.stats.max_depth.max(depth + 1);
                    continue;
                }
                if let Some(parent) = parent_mu {
                    self.stats
                        .measure
                        .record_branch(parent, &[formula_measure(&g).mu]);
                    if g.num_live_vars() >= f.num_live_vars() {
                        self.stats.progress_violations += 1;
                    }
                }
                if let Some(model) = self.node(g, depth + 1)? {
                    return Ok(Some(model));
                }
            }
            return Ok(None);
        }
    }
}

/// Decides `f` with the default options.
pub fn solve(f: &Formula) -> SolveResult {
    solve_with(f, &SolverOptions::default())
}

pub fn solve_with(f: &Formula, opts: &SolverOptions) -> SolveResult {
    let mut search = Search {
        opts,
        stats: SearchStats {
            mu_initial: formula_measure(f).mu,
            ..SearchStats::default()
        },
    };
    let start = (opts.instrument && !f.has_constants()).then(|| search.stats.mu_initial);
    let model = match search.simplify(f.clone(), start) {
        (SimplificationOutcome::Unsat, _) => {
            search.stats.nodes = 1;
            search.stats.leaves = 1;
            None
        }
        (_, g) => search
            .node(g, 0)
            .unwrap_or_else(|e| panic!("search reached an inconsistent state: {e}")),
    };
    SolveResult {
        decision: if model.is_some() {
            Decision::Sat
        } else {
            Decision::Unsat
        },
        model,
        stats: search.stats,
    }
}
