//! Weighted variable count used to instrument the search.
//!
//! A live variable weighs [`W3`] when it sits on a 3-literal clause whose
//! variables have no common neighbour outside that clause, and 1 otherwise.
//! Neighbourhood ignores polarity. The solver never consults these weights
//! when making decisions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Clause, ClauseId, Formula, VariableId};

pub const W3: f64 = 0.8823;

/// Weight lost by a variable when it moves off a qualifying 3-literal clause.
pub const D: f64 = 1.0 - W3;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub weights: BTreeMap<VariableId, f64>,
    pub mu: f64,
}

impl MeasureReport {
    pub fn d(&self) -> f64 {
        D
    }
}

type Neighbours = BTreeMap<VariableId, BTreeSet<VariableId>>;

fn neighbours(f: &Formula) -> Neighbours {
    let mut nb: Neighbours = BTreeMap::new();
    for clause in f.clauses() {
        let vars = clause.vars();
        for &v in &vars {
            nb.entry(v)
                .or_default()
                .extend(vars.iter().copied().filter(|&u| u != v));
        }
    }
    nb
}

fn common_outside(nb: &Neighbours, clause: &Clause) -> Option<VariableId> {
    let vars = clause.vars();
    let mut iter = vars.iter();
    let first = iter.next()?;
    let mut common: BTreeSet<VariableId> = nb.get(first).cloned().unwrap_or_default();
    for v in iter {
        let other = nb.get(v).cloned().unwrap_or_default();
        common.retain(|u| other.contains(u));
    }
    common.into_iter().find(|u| !vars.contains(u))
}

fn is_three_literal(clause: &Clause) -> bool {
    clause.literal_count() == 3
}

/// Smallest variable outside the 3-literal clause `clause` that neighbours all
/// of its variables.
pub fn common_outside_neighbour(f: &Formula, clause: ClauseId) -> Result<Option<VariableId>> {
    let c = f.clause(clause)?;
    if !is_three_literal(c) {
        return Err(Error::NotThreeLiteral {
            clause,
            len: c.literal_count(),
        });
    }
    Ok(common_outside(&neighbours(f), c))
}

/// Weight of a live variable.
pub fn variable_weight(f: &Formula, x: VariableId) -> Result<f64> {
    if f.is_eliminated(x) {
        return Err(Error::VariableEliminated(x));
    }
    if f.degree(x) == 0 {
        return Err(Error::UnknownVariable(x));
    }
    let nb = neighbours(f);
    let light = f.clauses_of(x).into_iter().any(|id| {
        let c = f.clause(id).expect("indexed clause exists");
        is_three_literal(c) && common_outside(&nb, c).is_none()
    });
    Ok(if light { W3 } else { 1.0 })
}

/// Weights of all live variables and their sum. Constant tokens are ignored
/// when measuring clause length.
pub fn formula_measure(f: &Formula) -> MeasureReport {
    let nb = neighbours(f);
    let mut weights: BTreeMap<VariableId, f64> = f.live_vars().map(|v| (v, 1.0)).collect();
    for clause in f.clauses().filter(|c| is_three_literal(c)) {
        if common_outside(&nb, clause).is_none() {
            for v in clause.vars() {
                weights.insert(v, W3);
            }
        }
    }
    let mu = weights.values().sum();
    MeasureReport { weights, mu }
}
