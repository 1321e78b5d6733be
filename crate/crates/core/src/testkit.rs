//! Seeded instance generator and exhaustive oracle.
//!
//! The generator draws every random number from SplitMix64:
//!
//! ```text
//! state += 0x9e3779b97f4a7c15
//! z = state
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! next_u64 = z ^ (z >> 31)
//! ```
//!
//! starting from `state = seed`. Derived draws are `below(n) = next_u64 % n`
//! and `unit() = (next_u64 >> 11) * 2^-53`. Without a degree cap, each clause
//! draws its length `len_min + below(len_max - len_min + 1)`, then picks its
//! variables by a partial Fisher-Yates shuffle of `0..n` (step `i` swaps
//! position `i` with `i + below(n - i)`), then negates each literal when
//! `unit() < neg_probability`. With a degree cap, every variable first draws
//! its polarity once, in id order; the shuffle then runs over the variables
//! that still have spare occurrences, in id order.

use std::collections::{BTreeMap, BTreeSet};

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Model, Token, VariableId};
use crate::search::{reconstruct_model, Decision};
use crate::simplify::{cascade, SimplificationOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_vars: usize,
    pub n_clauses: usize,
    pub len_min: usize,
    pub len_max: usize,
    pub neg_probability: f64,
    pub degree_cap: Option<usize>,
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleConfig(m));
        if self.len_min == 0 || self.len_min > self.len_max {
            return bad(format!("length range {}..{}", self.len_min, self.len_max));
        }
        if self.len_min > self.n_vars {
            return bad(format!(
                "clauses of length {} need more than {} variables",
                self.len_min, self.n_vars
            ));
        }
        if !(0.0..=1.0).contains(&self.neg_probability) {
            return bad(format!("negation probability {}", self.neg_probability));
        }
        if let Some(cap) = self.degree_cap {
            if cap == 0 || self.n_clauses * self.len_min > cap * self.n_vars {
                return bad(format!(
                    "{} clauses of length >= {} exceed {} occurrences",
                    self.n_clauses,
                    self.len_min,
                    cap * self.n_vars
                ));
            }
        }
        Ok(())
    }
}

struct Draw(SplitMix64);

impl Draw {
    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// First `k` entries of a partial Fisher-Yates shuffle of `pool`.
    fn pick(&mut self, mut pool: Vec<usize>, k: usize) -> Vec<usize> {
        for i in 0..k {
            let j = i + self.below(pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

/// Deterministic random instance as a list of DIMACS-style clauses.
pub fn generate_clauses(cfg: &GeneratorConfig) -> Result<Vec<Vec<Literal>>> {
    cfg.validate()?;
    let mut rng = Draw(SplitMix64::seed_from_u64(cfg.seed));
    let n = cfg.n_vars;
    let span = cfg.len_max - cfg.len_min + 1;
    let mut clauses = Vec::with_capacity(cfg.n_clauses);
    match cfg.degree_cap {
        None => {
            for _ in 0..cfg.n_clauses {
                let len = (cfg.len_min + rng.below(span)).min(n);
                let vars = rng.pick((0..n).collect(), len);
                let clause = vars
                    .into_iter()
                    .map(|v| Literal::new(VariableId(v as u32), rng.unit() >= cfg.neg_probability))
                    .collect();
                clauses.push(clause);
            }
        }
        Some(cap) => {
            let positive: Vec<bool> = (0..n).map(|_| rng.unit() >= cfg.neg_probability).collect();
            let mut spare = vec![cap; n];
            for _ in 0..cfg.n_clauses {
                let pool: Vec<usize> = (0..n).filter(|&v| spare[v] > 0).collect();
                let len = (cfg.len_min + rng.below(span)).min(pool.len());
                if len < cfg.len_min {
                    return Err(Error::InfeasibleConfig(format!(
                        "ran out of occurrences after {} clauses",
                        clauses.len()
                    )));
                }
                let vars = rng.pick(pool, len);
                let clause = vars
                    .into_iter()
                    .map(|v| {
                        spare[v] -= 1;
                        Literal::new(VariableId(v as u32), positive[v])
                    })
                    .collect();
                clauses.push(clause);
            }
        }
    }
    Ok(clauses)
}

pub fn generate(cfg: &GeneratorConfig) -> Result<Formula> {
    Ok(Formula::with_num_vars(cfg.n_vars, &generate_clauses(cfg)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub decision: Decision,
    pub model_count: u64,
    pub witness: Option<Model>,
}

pub const ORACLE_LIMIT: usize = 26;

/// A clause as bit masks; literals repeated inside the clause are kept aside.
struct MaskClause {
    pos: u32,
    neg: u32,
    extra: Vec<Literal>,
}

impl MaskClause {
    fn new(lits: &[Literal]) -> MaskClause {
        let mut c = MaskClause {
            pos: 0,
            neg: 0,
            extra: Vec::new(),
        };
        for &l in lits {
            let bit = 1u32 << l.var().0;
            let mask = if l.is_positive() { &mut c.pos } else { &mut c.neg };
            if *mask & bit != 0 {
                c.extra.push(l);
            } else {
                *mask |= bit;
            }
        }
        c
    }

    fn exactly_one(&self, a: u32) -> bool {
        let mut count = (a & self.pos).count_ones() + (!a & self.neg).count_ones();
        for l in &self.extra {
            count += u32::from(l.eval(a >> l.var().0 & 1 == 1));
        }
        count == 1
    }
}

fn to_model(a: u64, n: usize) -> Model {
    Model::new((0..n).map(|i| a >> i & 1 == 1).collect())
}

/// Enumerates all assignments of the input variables of `f`.
pub fn brute_force(f: &Formula) -> Result<OracleResult> {
    count_models(f.num_vars(), f.original())
}

/// Exact model count of `clauses` over `n` variables; the witness is the
/// model with the smallest bit pattern (variable 0 is the low bit).
pub fn count_models(n: usize, clauses: &[Vec<Literal>]) -> Result<OracleResult> {
    if n > ORACLE_LIMIT {
        return Err(Error::TooManyVariables {
            vars: n,
            limit: ORACLE_LIMIT,
        });
    }
    let masks: Vec<MaskClause> = clauses.iter().map(|c| MaskClause::new(c)).collect();
    let mut count = 0u64;
    let mut witness = None;
    for a in 0..(1u64 << n) {
        if masks.iter().all(|c| c.exactly_one(a as u32)) {
            count += 1;
            if witness.is_none() {
                witness = Some(to_model(a, n));
            }
        }
    }
    Ok(OracleResult {
        decision: if count > 0 {
            Decision::Sat
        } else {
            Decision::Unsat
        },
        model_count: count,
        witness,
    })
}

/// Models of a simplified formula pushed back through its trail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrailCount {
    /// Models of the simplified formula over its remaining variables.
    pub reduced: u64,
    /// Distinct extensions that satisfy the input formula.
    pub extended: u64,
    /// Extensions that do not.
    pub invalid: u64,
}

/// Simplifies `f` to a fixed point, enumerates the models of the result
/// over every variable not on the trail, and extends each one.
pub fn trail_model_count(f: &Formula) -> Result<TrailCount> {
    if f.num_vars() > ORACLE_LIMIT {
        return Err(Error::TooManyVariables {
            vars: f.num_vars(),
            limit: ORACLE_LIMIT,
        });
    }
    let (outcome, g) = cascade(f.clone());
    if outcome == SimplificationOutcome::Unsat {
        return Ok(TrailCount::default());
    }
    let free: Vec<VariableId> = (0..f.num_vars() as u32)
        .map(VariableId)
        .filter(|v| !g.is_eliminated(*v))
        .collect();
    let mut result = TrailCount::default();
    let mut seen = BTreeSet::new();
    for a in 0..(1u64 << free.len()) {
        let partial: BTreeMap<VariableId, bool> = free
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, a >> i & 1 == 1))
            .collect();
        let ok = g.clauses().all(|c| {
            c.tokens()
                .iter()
                .filter(|t| match t {
                    Token::Lit(l) => l.eval(partial[&l.var()]),
                    Token::Const(b) => *b,
                })
                .count()
                == 1
        });
        if !ok {
            continue;
        }
        result.reduced += 1;
        let model = reconstruct_model(g.trail(), &partial, f.num_vars())?;
        if f.check_model(&model)? {
            if seen.insert(model) {
                result.extended += 1;
            }
        } else {
            result.invalid += 1;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_xoshiro::rand_core::RngCore;

    fn formula(clauses: &[&[i32]]) -> Formula {
        let cs: Vec<Vec<Literal>> = clauses
            .iter()
            .map(|c| c.iter().map(|&v| Literal::from_dimacs(v).unwrap()).collect())
            .collect();
        Formula::from_clauses(&cs)
    }

    fn cfg(seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            seed,
            n_vars: 20,
            n_clauses: 40,
            len_min: 3,
            len_max: 6,
            neg_probability: 0.5,
            degree_cap: None,
        }
    }

    #[test]
    fn oracle_examples() {
        let r = brute_force(&formula(&[&[1, 2, 3]])).unwrap();
        assert_eq!((r.decision, r.model_count), (Decision::Sat, 3));
        let r = brute_force(&formula(&[&[1, 2, 3], &[-1, 2, 3]])).unwrap();
        assert_eq!((r.decision, r.model_count), (Decision::Unsat, 0));
        assert!(r.witness.is_none());
        let r = brute_force(&Formula::from_clauses(&[])).unwrap();
        assert_eq!((r.decision, r.model_count), (Decision::Sat, 1));
        let big = Formula::with_num_vars(27, &[]);
        assert!(matches!(brute_force(&big), Err(Error::TooManyVariables { .. })));
    }

    #[test]
    fn repeated_literals_count_twice() {
        let r = brute_force(&formula(&[&[1, 1, 2]])).unwrap();
        assert_eq!(r.model_count, 1);
        assert_eq!(r.witness.unwrap().values(), &[false, true]);
    }

    #[test]
    fn splitmix_reference_values() {
        // reference outputs for seed 1234567
        let mut rng = SplitMix64::seed_from_u64(1234567);
        let expected = [
            6457827717110365317u64,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ];
        for e in expected {
            assert_eq!(rng.next_u64(), e);
        }
    }

    #[test]
    fn generator_is_deterministic_and_in_range() {
        let a = generate_clauses(&cfg(7)).unwrap();
        let b = generate_clauses(&cfg(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_clauses(&cfg(8)).unwrap());
        assert!(a.iter().all(|c| (3..=6).contains(&c.len())));
        for c in &a {
            let vars: BTreeSet<_> = c.iter().map(|l| l.var()).collect();
            assert_eq!(vars.len(), c.len());
        }
    }

    #[test]
    fn degree_cap_is_respected() {
        let c = GeneratorConfig {
            degree_cap: Some(2),
            n_clauses: 10,
            len_min: 2,
            len_max: 4,
            ..cfg(3)
        };
        let f = generate(&c).unwrap();
        assert!(f.live_vars().all(|v| f.degree(v) <= 2));

        let too_many = GeneratorConfig {
            n_clauses: 30,
            ..c
        };
        assert!(matches!(generate(&too_many), Err(Error::InfeasibleConfig(_))));
    }

    #[test]
    fn trail_count_matches_oracle() {
        let f = formula(&[&[1, 2, 3], &[3, 4, 5], &[-1, 4, 6, 7]]);
        let t = trail_model_count(&f).unwrap();
        assert_eq!(t.invalid, 0);
        assert_eq!(t.extended, brute_force(&f).unwrap().model_count);
    }

    proptest! {
        #[test]
        fn capped_instances_never_exceed_the_cap(seed in any::<u64>(), n in 4usize..30) {
            let c = GeneratorConfig {
                seed,
                n_vars: n,
                n_clauses: n / 2,
                len_min: 1,
                len_max: 4,
                neg_probability: 0.3,
                degree_cap: Some(2),
            };
            let f = generate(&c).unwrap();
            prop_assert!(f.live_vars().all(|v| f.degree(v) <= 2));
            for v in f.live_vars() {
                let occ = f.occurrences(v);
                prop_assert!(occ.iter().all(|o| o.positive == occ[0].positive));
            }
        }
    }
}
