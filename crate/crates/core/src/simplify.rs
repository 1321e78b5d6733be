//! Prioritised simplification rules and the cascade that applies them to a
//! fixed point.
//!
//! Rules are numbered after the lines of the branch-and-reduce procedure they
//! implement; a lower number always wins. Lines 10, 12 (branching half) and
//! 13 are branching rules and live in [`crate::search`]. Because line 10 sits
//! between lines 9 and 11, resolution (11) and the 1-j rewrite (12a) are held
//! back while some variable occurs in three or more 3-literal clauses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{
    Clause, ClauseId, Formula, Literal, OverlapProfile, Token, TrailEntry, VariableId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
    L11,
    L12a,
}

impl RuleId {
    pub const ALL: [RuleId; 11] = [
        RuleId::L1,
        RuleId::L2,
        RuleId::L3,
        RuleId::L4,
        RuleId::L5,
        RuleId::L6,
        RuleId::L7,
        RuleId::L8,
        RuleId::L9,
        RuleId::L11,
        RuleId::L12a,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RuleId::L1 => "1",
            RuleId::L2 => "2",
            RuleId::L3 => "3",
            RuleId::L4 => "4",
            RuleId::L5 => "5",
            RuleId::L6 => "6",
            RuleId::L7 => "7",
            RuleId::L8 => "8",
            RuleId::L9 => "9",
            RuleId::L11 => "11",
            RuleId::L12a => "12a",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.label())
    }
}

/// Where a rule applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Clause(ClauseId),
    Duplicate { clause: ClauseId, literal: Literal },
    /// Two clauses with `x, y` in `first`; `second` holds `x, ¬y` (line 7)
    /// or `¬x, ¬y` (line 8).
    Crossing {
        first: ClauseId,
        second: ClauseId,
        x: Literal,
        y: Literal,
    },
    Subsumption { sub: ClauseId, sup: ClauseId },
    Resolution {
        var: VariableId,
        positive: ClauseId,
        negative: ClauseId,
    },
    Overlap { first: ClauseId, second: ClauseId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplificationOutcome {
    Progress(RuleId),
    FixedPoint,
    Unsat,
}

/// Hooks for instrumenting a cascade.
pub trait CascadeObserver {
    fn before_rule(&mut self, _rule: RuleId, _f: &Formula) {}
    fn finished(&mut self, _outcome: SimplificationOutcome, _f: &Formula) {}
}

impl CascadeObserver for () {}

fn not_applicable(rule: RuleId, reason: impl Into<String>) -> Error {
    Error::NotApplicable {
        rule: rule.to_string(),
        reason: reason.into(),
    }
}

/// Can some assignment of the clause's own variables make exactly one token
/// true? Each variable contributes the count of its positive or of its
/// negative tokens, and the contributions must add up to `1 - #true`.
fn locally_satisfiable(clause: &Clause) -> bool {
    let ones = clause
        .tokens()
        .iter()
        .filter(|t| matches!(t, Token::Const(true)))
        .count();
    if ones >= 2 {
        return false;
    }
    let target = 1 - ones;
    let mut counts: BTreeMap<VariableId, (usize, usize)> = BTreeMap::new();
    for lit in clause.literals() {
        let e = counts.entry(lit.var()).or_default();
        if lit.is_positive() {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let forced: Vec<(usize, usize)> = counts
        .values()
        .copied()
        .filter(|&(p, n)| p.min(n) > 0)
        .collect();
    match (target, forced.as_slice()) {
        (0, []) => true,
        (0, _) => false,
        (_, []) => counts.values().any(|&(p, n)| p == 1 || n == 1),
        (_, [(p, n)]) => (*p).min(*n) == 1,
        _ => false,
    }
}

fn complementary_var(clause: &Clause) -> Option<VariableId> {
    let lits = clause.literal_set();
    lits.iter()
        .find(|l| l.is_positive() && lits.contains(&!**l))
        .map(|l| l.var())
}

fn duplicated_literal(clause: &Clause) -> Option<Literal> {
    let mut seen = BTreeSet::new();
    let mut dups = BTreeSet::new();
    for l in clause.literals() {
        if !seen.insert(l) {
            dups.insert(l);
        }
    }
    dups.into_iter().next()
}

/// Highest-priority single-clause rule (lines 1-6) for `clause`.
fn clause_rule(clause: &Clause) -> Option<(RuleId, Target)> {
    let id = clause.id();
    if !locally_satisfiable(clause) {
        return Some((RuleId::L1, Target::Clause(id)));
    }
    let tokens = clause.tokens();
    if tokens.contains(&Token::Const(true)) || complementary_var(clause).is_some() {
        return Some((RuleId::L2, Target::Clause(id)));
    }
    if tokens.contains(&Token::Const(false)) {
        return Some((RuleId::L3, Target::Clause(id)));
    }
    match tokens.len() {
        1 => return Some((RuleId::L4, Target::Clause(id))),
        2 => return Some((RuleId::L5, Target::Clause(id))),
        _ => {}
    }
    duplicated_literal(clause).map(|literal| (RuleId::L6, Target::Duplicate { clause: id, literal }))
}

/// Shared variables of a clause pair, as (literal in first, literal in second).
pub(crate) type SharedPairs = BTreeMap<(ClauseId, ClauseId), Vec<(Literal, Literal)>>;

/// All clause pairs `(a, b)`, `a < b`, that share at least `min_shared`
/// variables. Clauses are assumed to be duplicate free.
pub(crate) fn shared_pairs(f: &Formula, min_shared: usize) -> SharedPairs {
    let mut pairs: SharedPairs = BTreeMap::new();
    for clause in f.clauses() {
        let a = clause.id();
        for la in clause.literals() {
            for occ in f.occurrences(la.var()) {
                if occ.clause > a {
                    let lb = Literal::new(la.var(), occ.positive);
                    pairs.entry((a, occ.clause)).or_default().push((la, lb));
                }
            }
        }
    }
    pairs.retain(|_, shared| shared.len() >= min_shared);
    pairs
}

/// Variables in at least three 3-literal clauses, ascending.
pub fn line10_candidates(f: &Formula) -> Vec<VariableId> {
    let mut counts: BTreeMap<VariableId, usize> = BTreeMap::new();
    for clause in f.clauses().filter(|c| c.len() == 3) {
        for v in clause.vars() {
            *counts.entry(v).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, n)| n >= 3)
        .map(|(v, _)| v)
        .collect()
}

fn find_crossing(pairs: &SharedPairs) -> Option<(RuleId, Target)> {
    let mut line8 = None;
    for (&(first, second), shared) in pairs {
        let same: Vec<Literal> = shared.iter().filter(|(a, b)| a == b).map(|p| p.0).collect();
        let opposite: Vec<Literal> = shared.iter().filter(|(a, b)| a != b).map(|p| p.0).collect();
        if let (Some(&x), Some(&y)) = (same.first(), opposite.first()) {
            return Some((RuleId::L7, Target::Crossing { first, second, x, y }));
        }
        if line8.is_none() && opposite.len() >= 2 {
            line8 = Some((
                RuleId::L8,
                Target::Crossing {
                    first,
                    second,
                    x: opposite[0],
                    y: opposite[1],
                },
            ));
        }
    }
    line8
}

fn find_subsumption(f: &Formula, pairs: &SharedPairs) -> Option<(RuleId, Target)> {
    for &(a, b) in pairs.keys() {
        let la = f.clause(a).ok()?.literal_set();
        let lb = f.clause(b).ok()?.literal_set();
        if la.is_subset(&lb) {
            return Some((RuleId::L9, Target::Subsumption { sub: a, sup: b }));
        }
        if lb.is_subset(&la) {
            return Some((RuleId::L9, Target::Subsumption { sub: b, sup: a }));
        }
    }
    None
}

fn find_resolution(f: &Formula) -> Option<(RuleId, Target)> {
    for var in f.live_vars() {
        let occ = f.occurrences(var);
        let positive = occ.iter().find(|o| o.positive).map(|o| o.clause);
        let negative = occ.iter().find(|o| !o.positive).map(|o| o.clause);
        if let (Some(positive), Some(negative)) = (positive, negative) {
            return Some((
                RuleId::L11,
                Target::Resolution {
                    var,
                    positive,
                    negative,
                },
            ));
        }
    }
    None
}

fn find_one_sided_overlap(f: &Formula) -> Option<(RuleId, Target)> {
    let pairs = shared_pairs(f, 2);
    for &(first, second) in pairs.keys() {
        let p = f.overlap_profile(first, second).ok()?;
        if p.i == 1 || p.j == 1 {
            return Some((RuleId::L12a, Target::Overlap { first, second }));
        }
    }
    None
}

/// Highest-priority applicable simplification rule and its target.
pub fn find_applicable(f: &Formula) -> Option<(RuleId, Target)> {
    let local = f
        .clauses()
        .filter_map(clause_rule)
        .min_by_key(|(rule, _)| *rule);
    if local.is_some() {
        return local;
    }
    let pairs = shared_pairs(f, 2);
    if let Some(hit) = find_crossing(&pairs).or_else(|| find_subsumption(f, &pairs)) {
        return Some(hit);
    }
    if !line10_candidates(f).is_empty() {
        return None;
    }
    find_resolution(f).or_else(|| find_one_sided_overlap(f))
}

/// Assigns 0 to each literal, skipping variables that are already gone.
fn zero_all(f: &mut Formula, lits: impl IntoIterator<Item = Literal>) -> Result<()> {
    for lit in lits {
        if !f.is_eliminated(lit.var()) {
            f.assign(lit, false)?;
        }
    }
    Ok(())
}

/// Applies `rule` at `target`, without cascading.
pub fn apply_rule(
    f: &Formula,
    rule: RuleId,
    target: &Target,
) -> Result<(SimplificationOutcome, Formula)> {
    let mut g = f.clone();
    match (rule, target) {
        (RuleId::L1, Target::Clause(id)) => {
            if locally_satisfiable(f.clause(*id)?) {
                return Err(not_applicable(rule, format!("{id} can be exactly satisfied")));
            }
            return Ok((SimplificationOutcome::Unsat, g));
        }
        (RuleId::L2, Target::Clause(id)) => {
            let clause = f.clause(*id)?;
            let mut rest: Vec<Literal> = clause.literals().collect();
            if !clause.tokens().contains(&Token::Const(true)) {
                let v = complementary_var(clause)
                    .ok_or_else(|| not_applicable(rule, "no true constant or complementary pair"))?;
                for lit in [Literal::positive(v), Literal::negative(v)] {
                    let at = rest.iter().position(|&l| l == lit).expect("pair present");
                    rest.remove(at);
                }
            }
            g.drop_clause(*id)?;
            zero_all(&mut g, rest)?;
        }
        (RuleId::L3, Target::Clause(id)) => {
            let mut tokens = f.clause(*id)?.tokens().to_vec();
            let at = tokens
                .iter()
                .position(|t| *t == Token::Const(false))
                .ok_or_else(|| not_applicable(rule, "no false constant"))?;
            tokens.remove(at);
            g.replace_tokens(*id, tokens);
        }
        (RuleId::L4, Target::Clause(id)) => {
            let clause = f.clause(*id)?;
            let lit = match clause.tokens() {
                [Token::Lit(l)] => *l,
                _ => return Err(not_applicable(rule, format!("{id} is not a unit clause"))),
            };
            g.drop_clause(*id)?;
            g.assign(lit, true)?;
        }
        (RuleId::L5, Target::Clause(id)) => {
            let clause = f.clause(*id)?;
            let (a, b) = match clause.tokens() {
                [Token::Lit(a), Token::Lit(b)] if a.var() != b.var() => (*a, *b),
                _ => return Err(not_applicable(rule, format!("{id} is not a binary clause"))),
            };
            g.drop_clause(*id)?;
            g.link_literals(a, !b)?;
        }
        (RuleId::L6, Target::Duplicate { clause, literal }) => {
            if f.clause(*clause)?.literals().filter(|l| l == literal).count() < 2 {
                return Err(not_applicable(rule, format!("{literal} is not repeated")));
            }
            g.assign(*literal, false)?;
        }
        (RuleId::L7, Target::Crossing { first, second, x, y }) => {
            let (c1, c2) = (f.clause(*first)?, f.clause(*second)?);
            if !(c1.contains(*x) && c1.contains(*y) && c2.contains(*x) && c2.contains(!*y)) {
                return Err(not_applicable(rule, "clauses do not match (α∨x∨y),(β∨x∨¬y)"));
            }
            g.assign(*x, false)?;
        }
        (RuleId::L8, Target::Crossing { first, second, x, y }) => {
            let (c1, c2) = (f.clause(*first)?, f.clause(*second)?);
            if !(c1.contains(*x) && c1.contains(*y) && c2.contains(!*x) && c2.contains(!*y)) {
                return Err(not_applicable(rule, "clauses do not match (α∨x∨y),(β∨¬x∨¬y)"));
            }
            g.link_literals(*x, !*y)?;
        }
        (RuleId::L9, Target::Subsumption { sub, sup }) => {
            let small = f.clause(*sub)?.literal_set();
            let big = f.clause(*sup)?.literal_set();
            if sub == sup || !small.is_subset(&big) {
                return Err(not_applicable(rule, format!("{sub} is not contained in {sup}")));
            }
            g.drop_clause(*sup)?;
            zero_all(&mut g, big.difference(&small).copied())?;
        }
        (
            RuleId::L11,
            Target::Resolution {
                var,
                positive,
                negative,
            },
        ) => {
            g = resolve(f, *var, *positive, *negative)?;
        }
        (RuleId::L12a, Target::Overlap { first, second }) => {
            let profile = f.overlap_profile(*first, *second)?;
            g = rewrite_1j(f, *first, *second, &profile)?;
        }
        _ => return Err(not_applicable(rule, format!("target {target:?} has the wrong shape"))),
    }
    Ok((SimplificationOutcome::Progress(rule), g))
}

/// Resolution on `x` between `c1 = (C ∨ x)` and `c2 = (C' ∨ ¬x)`.
///
/// Every `x` token is replaced by the literals of `C'`, every `¬x` token by
/// the literals of `C`, and the literals of `C ∩ C'` are set to 0.
pub fn resolve(f: &Formula, x: VariableId, c1: ClauseId, c2: ClauseId) -> Result<Formula> {
    let pos = Literal::positive(x);
    let neg = Literal::negative(x);
    let first = f.clause(c1)?;
    let second = f.clause(c2)?;
    if !first.contains(pos) || !second.contains(neg) || c1 == c2 {
        return Err(not_applicable(
            RuleId::L11,
            format!("{c1} must contain {pos} and {c2} must contain {neg}"),
        ));
    }
    let without = |c: &Clause, l: Literal| -> Vec<Literal> {
        let mut lits: Vec<Literal> = c.literals().collect();
        let at = lits.iter().position(|&m| m == l).expect("literal present");
        lits.remove(at);
        lits
    };
    let partner = without(first, pos);
    let co_partner = without(second, neg);

    let mut g = f.clone();
    for id in f.clauses_of(x) {
        let mut tokens = Vec::new();
        for &t in f.clause(id)?.tokens() {
            match t {
                Token::Lit(l) if l == pos => tokens.extend(co_partner.iter().map(|&m| Token::Lit(m))),
                Token::Lit(l) if l == neg => tokens.extend(partner.iter().map(|&m| Token::Lit(m))),
                other => tokens.push(other),
            }
        }
        g.replace_tokens(id, tokens);
    }
    g.push_trail(TrailEntry::Resolve {
        var: x,
        partner: partner.clone(),
    });
    let common: BTreeSet<Literal> = partner
        .iter()
        .copied()
        .filter(|l| co_partner.contains(l))
        .collect();
    zero_all(&mut g, common)?;
    Ok(g)
}

/// Simplifies two clauses sharing `k ≥ 2` variables where one side has a
/// single outside variable.
///
/// For `(x ∨ δ), (y ∨ δ)` the outside literals are linked `x = y` and the
/// second clause is dropped. For `(x ∨ δ), (δ ∨ R)` with `|R| ≥ 2` the second
/// clause becomes `(¬x ∨ R)`.
pub fn rewrite_1j(
    f: &Formula,
    c1: ClauseId,
    c2: ClauseId,
    profile: &OverlapProfile,
) -> Result<Formula> {
    if profile.k < 2 || (profile.i != 1 && profile.j != 1) {
        return Err(not_applicable(
            RuleId::L12a,
            format!("orientation {}-{} with k={}", profile.i, profile.j, profile.k),
        ));
    }
    let first = f.clause(c1)?;
    let second = f.clause(c2)?;
    let shared: BTreeSet<VariableId> = profile.shared.literals.iter().map(|l| l.var()).collect();
    for l in &profile.shared.literals {
        if !second.contains(*l) || !first.contains(*l) {
            return Err(not_applicable(
                RuleId::L12a,
                format!("shared literal {l} differs in polarity"),
            ));
        }
    }
    let outside = |c: &Clause| -> Vec<Literal> {
        c.literals().filter(|l| !shared.contains(&l.var())).collect()
    };
    let left = outside(first);
    let right = outside(second);
    let mut g = f.clone();
    match (left.as_slice(), right.as_slice()) {
        ([x], [y]) => {
            g.drop_clause(c2)?;
            g.link_literals(*x, *y)?;
        }
        ([x], rest) => {
            let tokens = std::iter::once(!*x).chain(rest.iter().copied()).map(Token::Lit).collect();
            g.replace_tokens(c2, tokens);
        }
        (rest, [y]) => {
            let tokens = std::iter::once(!*y).chain(rest.iter().copied()).map(Token::Lit).collect();
            g.replace_tokens(c1, tokens);
        }
        _ => unreachable!("one side has a single outside variable"),
    }
    Ok(g)
}

/// Applies rules until none is applicable or a clause is refuted.
pub fn cascade(f: Formula) -> (SimplificationOutcome, Formula) {
    cascade_with(f, &mut ())
}

pub fn cascade_with(
    mut f: Formula,
    observer: &mut dyn CascadeObserver,
) -> (SimplificationOutcome, Formula) {
    loop {
        let Some((rule, target)) = find_applicable(&f) else {
            observer.finished(SimplificationOutcome::FixedPoint, &f);
            return (SimplificationOutcome::FixedPoint, f);
        };
        observer.before_rule(rule, &f);
        if rule == RuleId::L1 {
            observer.finished(SimplificationOutcome::Unsat, &f);
            return (SimplificationOutcome::Unsat, f);
        }
        let (_, next) = apply_rule(&f, rule, &target)
            .unwrap_or_else(|e| panic!("selected rule {rule} failed to apply: {e}"));
        f = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i32) -> Literal {
        Literal::from_dimacs(v).unwrap()
    }

    fn formula(clauses: &[&[i32]]) -> Formula {
        let cs: Vec<Vec<Literal>> = clauses
            .iter()
            .map(|c| c.iter().map(|&v| lit(v)).collect())
            .collect();
        Formula::from_clauses(&cs)
    }

    fn lits(f: &Formula, id: u32) -> BTreeSet<Literal> {
        f.clause(ClauseId(id)).unwrap().literal_set()
    }

    #[test]
    fn local_satisfiability() {
        let f = formula(&[&[1, -1, 1], &[1, -1, 1, -1], &[1, 1], &[2, 3, 4]]);
        assert!(locally_satisfiable(f.clause(ClauseId(0)).unwrap()));
        assert!(!locally_satisfiable(f.clause(ClauseId(1)).unwrap()));
        assert!(!locally_satisfiable(f.clause(ClauseId(2)).unwrap()));
        assert!(locally_satisfiable(f.clause(ClauseId(3)).unwrap()));
    }

    #[test]
    fn line2_wins_over_line3() {
        let f = formula(&[&[1, 2, 3], &[4, 5, 6, 7]]);
        let f = f.apply_assign(lit(4), false).unwrap();
        let f = f.apply_assign(lit(1), true).unwrap();
        // (0 ∨ 5 ∨ 6 ∨ 7) has the lower id, (1 ∨ 2 ∨ 3) the higher priority
        let f = {
            let mut g = f.clone();
            let c0 = g.drop_clause(ClauseId(0)).unwrap();
            g.push_clause(c0.tokens().to_vec());
            g
        };
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L2);
        assert_eq!(target, Target::Clause(ClauseId(2)));
    }

    #[test]
    fn clean_formula_has_no_applicable_rule() {
        let f = formula(&[&[1, 2, 3], &[4, 5, 6], &[1, 4, 7, 8]]);
        assert_eq!(find_applicable(&f), None);
    }

    #[test]
    fn duplicate_literal_triggers_line6() {
        let f = formula(&[&[1, 1, 2, 3]]);
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L6);
        assert_eq!(target, Target::Duplicate { clause: ClauseId(0), literal: lit(1) });
        let (_, g) = apply_rule(&f, rule, &target).unwrap();
        assert_eq!(g.trail(), &[TrailEntry::Assign { var: VariableId(0), value: false }]);
    }

    #[test]
    fn true_constant_zeroes_the_rest() {
        let f = formula(&[&[1, 2, 3]]).apply_assign(lit(1), true).unwrap();
        let (outcome, g) = apply_rule(&f, RuleId::L2, &Target::Clause(ClauseId(0))).unwrap();
        assert_eq!(outcome, SimplificationOutcome::Progress(RuleId::L2));
        assert!(g.is_empty());
        assert_eq!(g.trail().len(), 3);
        assert!(g.trail()[1..]
            .iter()
            .all(|e| matches!(e, TrailEntry::Assign { value: false, .. })));
    }

    #[test]
    fn false_constant_then_link() {
        // (0 ∨ x ∨ y): drop the constant, then link x = ¬y
        let f = formula(&[&[3, 1, 2], &[1, 4, 5]]).apply_assign(lit(3), false).unwrap();
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L3);
        let (_, g) = apply_rule(&f, rule, &target).unwrap();
        let (rule, target) = find_applicable(&g).unwrap();
        assert_eq!(rule, RuleId::L5);
        let (_, h) = apply_rule(&g, rule, &target).unwrap();
        assert_eq!(
            h.trail().last(),
            Some(&TrailEntry::Link { var: VariableId(1), definition: lit(-1) })
        );
        assert_eq!(h.num_clauses(), 1);
    }

    #[test]
    fn crossing_rules() {
        // (a ∨ x ∨ y), (b ∨ x ∨ ¬y) → x = 0
        let f = formula(&[&[3, 1, 2], &[4, 1, -2]]);
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L7);
        let (_, g) = apply_rule(&f, rule, &target).unwrap();
        assert_eq!(g.trail(), &[TrailEntry::Assign { var: VariableId(0), value: false }]);

        // (a ∨ x ∨ y), (b ∨ ¬x ∨ ¬y) → x = ¬y
        let f = formula(&[&[3, 1, 2], &[4, -1, -2]]);
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L8);
        let (_, g) = apply_rule(&f, rule, &target).unwrap();
        assert_eq!(
            g.trail(),
            &[TrailEntry::Link { var: VariableId(1), definition: lit(-1) }]
        );
    }

    #[test]
    fn subsumption_zeroes_the_difference() {
        let f = formula(&[&[1, 2, 3], &[1, 2, 3, 4]]);
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L9);
        assert_eq!(target, Target::Subsumption { sub: ClauseId(0), sup: ClauseId(1) });
        let (_, g) = apply_rule(&f, rule, &target).unwrap();
        assert_eq!(g.num_clauses(), 1);
        assert_eq!(g.trail(), &[TrailEntry::Assign { var: VariableId(3), value: false }]);

        // duplicates merge
        let f = formula(&[&[1, 2, 3], &[3, 2, 1]]);
        let (_, g) = apply_rule(&f, RuleId::L9, &find_applicable(&f).unwrap().1).unwrap();
        assert_eq!(g.clause_ids(), vec![ClauseId(0)]);
        assert!(g.trail().is_empty());
    }

    #[test]
    fn resolution_merges_partner_clauses() {
        let f = formula(&[&[1, 2, 5], &[3, 4, -5]]);
        let g = resolve(&f, VariableId(4), ClauseId(0), ClauseId(1)).unwrap();
        let expected: BTreeSet<Literal> = [1, 2, 3, 4].into_iter().map(lit).collect();
        assert_eq!(lits(&g, 0), expected);
        assert_eq!(lits(&g, 1), expected);
        assert_eq!(g.degree(VariableId(4)), 0);
        assert_eq!(
            g.trail(),
            &[TrailEntry::Resolve { var: VariableId(4), partner: vec![lit(1), lit(2)] }]
        );
        let (_, h) = cascade(g);
        assert_eq!(h.num_clauses(), 1);
    }

    #[test]
    fn resolution_zeroes_the_intersection() {
        let f = formula(&[&[1, 2, 5], &[1, 3, -5]]);
        let g = resolve(&f, VariableId(4), ClauseId(0), ClauseId(1)).unwrap();
        assert!(g
            .trail()
            .contains(&TrailEntry::Assign { var: VariableId(0), value: false }));
        assert!(resolve(&f, VariableId(4), ClauseId(1), ClauseId(0)).is_err());
    }

    #[test]
    fn resolution_only_after_line10() {
        // x in three 3-literal clauses and in ¬x: line 10 blocks resolution
        let f = formula(&[&[1, 2, 3], &[1, 4, 5], &[1, 6, 7], &[-1, 8, 9, 10]]);
        assert_eq!(find_applicable(&f), None);
        let f = formula(&[&[1, 2, 3], &[1, 4, 5], &[-1, 8, 9, 10]]);
        assert_eq!(find_applicable(&f).unwrap().0, RuleId::L11);
    }

    #[test]
    fn one_one_orientation_links() {
        // x=1 y=2 d=3 e=4
        let f = formula(&[&[1, 3, 4], &[2, 3, 4], &[1, 5, 6, 7]]);
        let (rule, target) = find_applicable(&f).unwrap();
        assert_eq!(rule, RuleId::L12a);
        let (_, g) = apply_rule(&f, rule, &target).unwrap();
        assert_eq!(g.num_clauses(), 2);
        assert_eq!(
            g.trail(),
            &[TrailEntry::Link { var: VariableId(1), definition: lit(1) }]
        );
    }

    #[test]
    fn one_j_orientation_rewrites() {
        // x=1 d=3 e=4 f=5 g=6
        let f = formula(&[&[1, 3, 4], &[3, 4, 5, 6]]);
        let profile = f.overlap_profile(ClauseId(0), ClauseId(1)).unwrap();
        let g = rewrite_1j(&f, ClauseId(0), ClauseId(1), &profile).unwrap();
        let expected: BTreeSet<Literal> = [-1, 5, 6].into_iter().map(lit).collect();
        assert_eq!(lits(&g, 1), expected);

        let f = formula(&[&[1, 2, 3, 4], &[3, 4, 5, 6]]);
        let profile = f.overlap_profile(ClauseId(0), ClauseId(1)).unwrap();
        assert!(rewrite_1j(&f, ClauseId(0), ClauseId(1), &profile).is_err());
    }

    #[test]
    fn cascade_examples() {
        let f = formula(&[&[1, 2, 3]]).apply_assign(lit(1), true).unwrap();
        let (outcome, g) = cascade(f);
        assert_eq!(outcome, SimplificationOutcome::FixedPoint);
        assert!(g.is_empty());
        assert_eq!(g.trail().len(), 3);

        let (outcome, _) = cascade(formula(&[&[1, 2, 3], &[-1, 2, 3]]));
        assert_eq!(outcome, SimplificationOutcome::Unsat);

        let clean = formula(&[&[1, 2, 3], &[4, 5, 6]]);
        let (outcome, g) = cascade(clean.clone());
        assert_eq!(outcome, SimplificationOutcome::FixedPoint);
        assert_eq!(g.clause_ids(), clean.clause_ids());
        assert!(g.trail().is_empty());
    }

    #[test]
    fn empty_clause_is_refuted() {
        let f = Formula::from_clauses(&[vec![]]);
        assert_eq!(find_applicable(&f).unwrap().0, RuleId::L1);
        assert_eq!(cascade(f).0, SimplificationOutcome::Unsat);
    }

    #[test]
    fn inapplicable_rules_are_rejected() {
        let f = formula(&[&[1, 2, 3]]);
        assert!(apply_rule(&f, RuleId::L1, &Target::Clause(ClauseId(0))).is_err());
        assert!(apply_rule(&f, RuleId::L4, &Target::Clause(ClauseId(0))).is_err());
        assert!(apply_rule(&f, RuleId::L3, &Target::Clause(ClauseId(0))).is_err());
        assert!(apply_rule(&f, RuleId::L7, &Target::Clause(ClauseId(0))).is_err());
    }
}
