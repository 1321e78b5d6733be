//! Formula representation shared by the simplifier, the search and the
//! analysis tools.
//!
//! Clauses are ordered multisets of [`Token`]s. A token is either a literal or
//! a transient constant produced by an assignment; the simplification cascade
//! removes constants again before any branching decision is taken. Every
//! variable that leaves the formula through an assignment, a link or a
//! resolution is recorded on the [`TrailEntry`] trail so a model of the reduced
//! formula can be extended back to the input variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(pub u32);

impl VariableId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A signed variable, packed as `var << 1 | negative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    #[inline]
    pub fn new(var: VariableId, positive: bool) -> Literal {
        Literal(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn positive(var: VariableId) -> Literal {
        Literal::new(var, true)
    }

    #[inline]
    pub fn negative(var: VariableId) -> Literal {
        Literal::new(var, false)
    }

    #[inline]
    pub fn var(self) -> VariableId {
        VariableId(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Truth value of the literal when its variable takes `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }

    /// Converts a 1-based signed DIMACS integer. Returns `None` for 0.
    pub fn from_dimacs(lit: i32) -> Option<Literal> {
        if lit == 0 {
            return None;
        }
        let var = VariableId(lit.unsigned_abs() - 1);
        Some(Literal::new(var, lit > 0))
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().0 as i32 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Literal {
    type Output = Literal;

    #[inline]
    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.var())
        } else {
            write!(f, "¬{}", self.var())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Lit(Literal),
    Const(bool),
}

impl Token {
    pub fn literal(self) -> Option<Literal> {
        match self {
            Token::Lit(l) => Some(l),
            Token::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    id: ClauseId,
    tokens: Vec<Token>,
}

impl Clause {
    pub fn id(&self) -> ClauseId {
        self.id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Number of tokens, constants included.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.tokens.iter().filter_map(|t| t.literal())
    }

    pub fn literal_count(&self) -> usize {
        self.literals().count()
    }

    pub fn literal_set(&self) -> BTreeSet<Literal> {
        self.literals().collect()
    }

    pub fn vars(&self) -> BTreeSet<VariableId> {
        self.literals().map(Literal::var).collect()
    }

    pub fn has_constants(&self) -> bool {
        self.tokens.iter().any(|t| matches!(t, Token::Const(_)))
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals().any(|l| l == lit)
    }

    pub fn contains_var(&self, var: VariableId) -> bool {
        self.literals().any(|l| l.var() == var)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            match t {
                Token::Lit(l) => write!(f, "{l}")?,
                Token::Const(b) => write!(f, "{}", u8::from(*b))?,
            }
        }
        write!(f, ")")
    }
}

/// A set of literals drawn from one or more parent clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subclause {
    pub literals: BTreeSet<Literal>,
    pub parents: Vec<ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapProfile {
    /// Number of shared variables.
    pub k: usize,
    /// Variables of the first clause missing from the second.
    pub i: usize,
    /// Variables of the second clause missing from the first.
    pub j: usize,
    pub shared: Subclause,
}

impl OverlapProfile {
    pub fn outside(&self) -> usize {
        self.i + self.j
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrailEntry {
    Assign { var: VariableId, value: bool },
    /// `var` takes the value of `definition`.
    Link { var: VariableId, definition: Literal },
    /// `var` is true iff every literal of `partner` is false.
    Resolve { var: VariableId, partner: Vec<Literal> },
}

impl TrailEntry {
    pub fn var(&self) -> VariableId {
        match self {
            TrailEntry::Assign { var, .. }
            | TrailEntry::Link { var, .. }
            | TrailEntry::Resolve { var, .. } => *var,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub clause: ClauseId,
    pub positive: bool,
}

/// A total assignment over the variables of a formula's input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Model {
        Model(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, var: VariableId) -> bool {
        self.0[var.index()]
    }

    pub fn literal(&self, lit: Literal) -> bool {
        lit.eval(self.value(lit.var()))
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// Signed DIMACS literals, one per variable.
    pub fn to_dimacs(&self) -> Vec<i32> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &v)| Literal::new(VariableId(i as u32), v).to_dimacs())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Formula {
    clauses: BTreeMap<ClauseId, Clause>,
    occurrence: BTreeMap<VariableId, Vec<Occurrence>>,
    trail: Vec<TrailEntry>,
    eliminated: BTreeSet<VariableId>,
    original: Arc<Vec<Vec<Literal>>>,
    num_vars: usize,
    next_clause: u32,
}

impl Formula {
    /// Builds a formula whose variable count is one past the largest id used.
    pub fn from_clauses(clauses: &[Vec<Literal>]) -> Formula {
        let num_vars = clauses
            .iter()
            .flatten()
            .map(|l| l.var().index() + 1)
            .max()
            .unwrap_or(0);
        Formula::with_num_vars(num_vars, clauses)
    }

    /// Builds a formula over `num_vars` variables; unused ids are free.
    pub fn with_num_vars(num_vars: usize, clauses: &[Vec<Literal>]) -> Formula {
        let num_vars = clauses
            .iter()
            .flatten()
            .map(|l| l.var().index() + 1)
            .fold(num_vars, usize::max);
        let mut f = Formula {
            clauses: BTreeMap::new(),
            occurrence: BTreeMap::new(),
            trail: Vec::new(),
            eliminated: BTreeSet::new(),
            original: Arc::new(clauses.to_vec()),
            num_vars,
            next_clause: 0,
        };
        for lits in clauses {
            f.push_clause(lits.iter().copied().map(Token::Lit).collect());
        }
        f
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn original(&self) -> &[Vec<Literal>] {
        &self.original
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.values()
    }

    pub fn clause_ids(&self) -> Vec<ClauseId> {
        self.clauses.keys().copied().collect()
    }

    pub fn clause(&self, id: ClauseId) -> Result<&Clause> {
        self.clauses.get(&id).ok_or(Error::UnknownClause(id))
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn occurrences(&self, var: VariableId) -> &[Occurrence] {
        self.occurrence.get(&var).map_or(&[], Vec::as_slice)
    }

    /// Distinct clauses containing `var`, ascending.
    pub fn clauses_of(&self, var: VariableId) -> Vec<ClauseId> {
        let mut ids: Vec<ClauseId> = self.occurrences(var).iter().map(|o| o.clause).collect();
        ids.dedup();
        ids
    }

    /// Variables that occur in at least one clause.
    pub fn live_vars(&self) -> impl Iterator<Item = VariableId> + '_ {
        self.occurrence.keys().copied()
    }

    pub fn num_live_vars(&self) -> usize {
        self.occurrence.len()
    }

    pub fn is_eliminated(&self, var: VariableId) -> bool {
        self.eliminated.contains(&var)
    }

    pub fn eliminated(&self) -> &BTreeSet<VariableId> {
        &self.eliminated
    }

    pub fn has_constants(&self) -> bool {
        self.clauses.values().any(Clause::has_constants)
    }

    /// Total occurrences of `x` and `¬x`.
    pub fn degree(&self, var: VariableId) -> usize {
        self.occurrences(var).len()
    }

    pub fn is_heavy(&self, var: VariableId) -> bool {
        self.degree(var) >= 3
    }

    pub fn token_count(&self) -> usize {
        self.clauses.values().map(Clause::len).sum()
    }

    pub fn overlap_profile(&self, c1: ClauseId, c2: ClauseId) -> Result<OverlapProfile> {
        if c1 == c2 {
            return Err(Error::InvalidSubclause(format!(
                "overlap of {c1} with itself"
            )));
        }
        let first = self.clause(c1)?;
        let second = self.clause(c2)?;
        let v1 = first.vars();
        let v2 = second.vars();
        let shared_vars: BTreeSet<VariableId> = v1.intersection(&v2).copied().collect();
        let literals = first
            .literals()
            .filter(|l| shared_vars.contains(&l.var()))
            .collect();
        Ok(OverlapProfile {
            k: shared_vars.len(),
            i: v1.len() - shared_vars.len(),
            j: v2.len() - shared_vars.len(),
            shared: Subclause {
                literals,
                parents: vec![c1, c2],
            },
        })
    }

    /// `φ[lit = bit]`: replaces the variable's tokens by constants without
    /// simplifying further.
    pub fn apply_assign(&self, lit: Literal, bit: bool) -> Result<Formula> {
        let mut f = self.clone();
        f.assign(lit, bit)?;
        Ok(f)
    }

    /// Replaces `x` by `definition` (and `¬x` by `¬definition`).
    pub fn apply_link(&self, x: VariableId, definition: Literal) -> Result<Formula> {
        let mut f = self.clone();
        f.link(x, definition)?;
        Ok(f)
    }

    /// True iff every input clause has exactly one true literal under `m`.
    pub fn check_model(&self, m: &Model) -> Result<bool> {
        if m.len() != self.num_vars {
            return Err(Error::PartialModel {
                expected: self.num_vars,
                got: m.len(),
            });
        }
        Ok(self
            .original
            .iter()
            .all(|c| c.iter().filter(|&&l| m.literal(l)).count() == 1))
    }

    /// Rebuilds the occurrence index from the clause contents.
    pub fn rebuilt_index(&self) -> BTreeMap<VariableId, Vec<Occurrence>> {
        let mut index: BTreeMap<VariableId, Vec<Occurrence>> = BTreeMap::new();
        for clause in self.clauses.values() {
            for lit in clause.literals() {
                index.entry(lit.var()).or_default().push(Occurrence {
                    clause: clause.id,
                    positive: lit.is_positive(),
                });
            }
        }
        for occ in index.values_mut() {
            occ.sort();
        }
        index
    }

    pub fn index_is_coherent(&self) -> bool {
        self.rebuilt_index() == self.occurrence
    }

    fn check_present(&self, var: VariableId) -> Result<()> {
        if var.index() >= self.num_vars {
            return Err(Error::UnknownVariable(var));
        }
        if self.eliminated.contains(&var) {
            return Err(Error::VariableEliminated(var));
        }
        Ok(())
    }

    pub(crate) fn assign(&mut self, lit: Literal, bit: bool) -> Result<()> {
        let var = lit.var();
        self.check_present(var)?;
        let value = bit == lit.is_positive();
        self.substitute(var, |l| Token::Const(l.eval(value)));
        self.eliminated.insert(var);
        self.trail.push(TrailEntry::Assign { var, value });
        Ok(())
    }

    pub(crate) fn link(&mut self, x: VariableId, definition: Literal) -> Result<()> {
        if x == definition.var() {
            return Err(Error::SelfLink(x));
        }
        self.check_present(x)?;
        self.check_present(definition.var())?;
        self.substitute(x, |l| {
            Token::Lit(if l.is_positive() {
                definition
            } else {
                !definition
            })
        });
        self.eliminated.insert(x);
        self.trail.push(TrailEntry::Link { var: x, definition });
        Ok(())
    }

    /// Links `a = b`, eliminating whichever variable has the larger id.
    pub(crate) fn link_literals(&mut self, a: Literal, b: Literal) -> Result<()> {
        if a.var() == b.var() {
            return if a == b {
                Ok(())
            } else {
                Err(Error::SelfLink(a.var()))
            };
        }
        let (gone, keep) = if a.var() > b.var() { (a, b) } else { (b, a) };
        let definition = if gone.is_positive() { keep } else { !keep };
        self.link(gone.var(), definition)
    }

    /// Replaces every token of `var` using `map` and updates the index.
    fn substitute(&mut self, var: VariableId, map: impl Fn(Literal) -> Token) {
        for id in self.clauses_of(var) {
            let tokens = self.clauses[&id]
                .tokens
                .iter()
                .map(|&t| match t {
                    Token::Lit(l) if l.var() == var => map(l),
                    other => other,
                })
                .collect();
            self.replace_tokens(id, tokens);
        }
    }

    pub(crate) fn push_trail(&mut self, entry: TrailEntry) {
        self.eliminated.insert(entry.var());
        self.trail.push(entry);
    }

    pub(crate) fn push_clause(&mut self, tokens: Vec<Token>) -> ClauseId {
        let id = ClauseId(self.next_clause);
        self.next_clause += 1;
        self.clauses.insert(id, Clause { id, tokens: Vec::new() });
        self.replace_tokens(id, tokens);
        id
    }

    pub(crate) fn drop_clause(&mut self, id: ClauseId) -> Result<Clause> {
        if !self.clauses.contains_key(&id) {
            return Err(Error::UnknownClause(id));
        }
        let tokens = self.clauses[&id].tokens.clone();
        self.replace_tokens(id, Vec::new());
        let mut clause = self.clauses.remove(&id).expect("clause checked above");
        clause.tokens = tokens;
        Ok(clause)
    }

    pub(crate) fn replace_tokens(&mut self, id: ClauseId, tokens: Vec<Token>) {
        let clause = self.clauses.get_mut(&id).expect("clause exists");
        let old_vars: BTreeSet<VariableId> = clause.literals().map(Literal::var).collect();
        for var in old_vars {
            if let Some(occ) = self.occurrence.get_mut(&var) {
                occ.retain(|o| o.clause != id);
                if occ.is_empty() {
                    self.occurrence.remove(&var);
                }
            }
        }
        for lit in tokens.iter().filter_map(|t| t.literal()) {
            let occ = self.occurrence.entry(lit.var()).or_default();
            let o = Occurrence {
                clause: id,
                positive: lit.is_positive(),
            };
            let at = occ.partition_point(|x| *x <= o);
            occ.insert(at, o);
        }
        clause.tokens = tokens;
    }
}
