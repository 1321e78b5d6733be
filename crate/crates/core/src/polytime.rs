//! Endgame for formulas in which every variable has degree at most 2.
//!
//! A literal shared by two clauses is an edge of the clause graph: setting it
//! true satisfies both endpoints at once. A literal that occurs in a single
//! clause is a pendant of that clause. An assignment exists iff some matching
//! of the clause graph covers every clause that has no pendant, with the
//! remaining clauses each taking one pendant. That is decided as a perfect
//! matching question on an extended graph: every pendant-bearing clause gets
//! an auxiliary partner, the auxiliaries form a clique, and one dummy vertex
//! fixes the parity when needed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{ClauseId, Formula, Literal, VariableId};
use crate::matching::maximum_matching;
use crate::search::{reconstruct_model, Decision, SearchStats, SolveResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseEdge {
    pub literal: Literal,
    pub ends: (ClauseId, ClauseId),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClauseGraph {
    pub vertices: Vec<ClauseId>,
    pub edges: Vec<ClauseEdge>,
    /// Literals occurring in one clause only, for clauses that have any.
    pub pendants: BTreeMap<ClauseId, Vec<Literal>>,
    /// Literals repeated inside one clause; they can only be false.
    pub forced_false: Vec<Literal>,
}

pub fn build_clause_graph(f: &Formula) -> Result<ClauseGraph> {
    let mut graph = ClauseGraph {
        vertices: f.clause_ids(),
        ..ClauseGraph::default()
    };
    for clause in f.clauses() {
        if clause.has_constants() {
            return Err(Error::ConstantsPresent(clause.id()));
        }
    }
    for var in f.live_vars() {
        let occ = f.occurrences(var);
        if occ.len() > 2 {
            return Err(Error::DegreeTooHigh {
                var,
                degree: occ.len(),
            });
        }
        if occ.iter().any(|o| o.positive != occ[0].positive) {
            return Err(Error::MixedPolarity(var));
        }
        let literal = Literal::new(var, occ[0].positive);
        match occ {
            [only] => graph.pendants.entry(only.clause).or_default().push(literal),
            [a, b] if a.clause == b.clause => graph.forced_false.push(literal),
            [a, b] => graph.edges.push(ClauseEdge {
                literal,
                ends: (a.clause, b.clause),
            }),
            _ => unreachable!("live variables occur at least once"),
        }
    }
    Ok(graph)
}

/// Values for the live variables of a degree-2 formula, or `None` when it
/// has no exact model.
pub(crate) fn deg2_assignment(f: &Formula) -> Result<Option<BTreeMap<VariableId, bool>>> {
    let graph = build_clause_graph(f)?;
    let m = graph.vertices.len();
    let index: BTreeMap<ClauseId, usize> = graph
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_literal: BTreeMap<(usize, usize), Literal> = BTreeMap::new();
    for e in &graph.edges {
        let (u, v) = (index[&e.ends.0], index[&e.ends.1]);
        let key = (u.min(v), u.max(v));
        edge_literal.entry(key).or_insert(e.literal);
        edges.push(key);
    }
    let aux_of: BTreeMap<usize, usize> = graph
        .pendants
        .keys()
        .enumerate()
        .map(|(k, c)| (index[c], m + k))
        .collect();
    let aux: Vec<usize> = aux_of.values().copied().collect();
    for (&c, &a) in &aux_of {
        edges.push((c, a));
    }
    for (i, &a) in aux.iter().enumerate() {
        for &b in &aux[i + 1..] {
            edges.push((a, b));
        }
    }
    let mut n = m + aux.len();
    if !aux.is_empty() && n % 2 == 1 {
        for &a in &aux {
            edges.push((a, n));
        }
        n += 1;
    }

    let mate = maximum_matching(n, &edges);
    if mate.iter().any(Option::is_none) {
        return Ok(None);
    }

    let mut truth: BTreeMap<Literal, bool> = BTreeMap::new();
    for (c, mc) in mate.iter().enumerate().take(m) {
        let partner = mc.expect("perfect matching");
        if partner < m {
            if c < partner {
                truth.insert(edge_literal[&(c, partner)], true);
            }
        } else {
            let pendant = graph.pendants[&graph.vertices[c]][0];
            truth.insert(pendant, true);
        }
    }
    let assignment = f
        .live_vars()
        .map(|var| {
            let occ = f.occurrences(var);
            let lit = Literal::new(var, occ[0].positive);
            let value = truth.get(&lit).copied().unwrap_or(false);
            (var, value == lit.is_positive())
        })
        .collect();
    Ok(Some(assignment))
}

/// Decides a formula whose variables all have degree at most 2.
pub fn solve_deg2(f: &Formula) -> Result<SolveResult> {
    let stats = SearchStats {
        nodes: 1,
        leaves: 1,
        ..SearchStats::default()
    };
    Ok(match deg2_assignment(f)? {
        Some(partial) => SolveResult {
            decision: Decision::Sat,
            model: Some(reconstruct_model(f.trail(), &partial, f.num_vars())?),
            stats,
        },
        None => SolveResult {
            decision: Decision::Unsat,
            model: None,
            stats,
        },
    })
}
