//! Exact satisfiability: decide whether some assignment makes exactly one
//! literal true in every clause.
//!
//! [`search::solve`] runs a branch-and-reduce procedure: [`simplify`] rewrites
//! a formula to a fixed point of prioritised reduction rules, [`search`]
//! branches on variables or shared subclauses, and [`polytime`] settles
//! formulas whose variables occur at most twice by a matching argument.
//! [`measure`] and [`analysis`] instrument the search and evaluate its
//! branching factors; [`testkit`] holds the seeded generator and the
//! exhaustive oracle.

pub mod analysis;
pub mod cli;
pub mod dimacs;
pub mod error;
pub mod formula;
pub mod matching;
pub mod measure;
pub mod polytime;
pub mod search;
pub mod simplify;
pub mod testkit;

pub use error::{Error, Result};
pub use formula::{Clause, ClauseId, Formula, Literal, Model, Token, TrailEntry, VariableId};
pub use search::{solve, solve_with, Decision, SolveResult, SolverOptions};
