//! Executable checks of the metatheory on finite instances.
//!
//! Each driver evaluates a program under many type substitutions drawn
//! from a [`SubstVocabulary`] and compares outcomes. Running out of fuel
//! never counts as a failure; such cases are counted as inconclusive.

mod gen;
mod oracles;

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dti::{TermDti, TypeArg};
use crate::subst::TypeSubstitution;
use crate::types::{BaseType, GradualType, TyVar};

pub use gen::{generate_well_typed, weaken, GenError, Generator};
pub use oracles::{
    check_cast_preservation, check_completeness, check_conservative, check_gradual_guarantee, check_safety,
    check_soundness, match_value, run_suite, Property, SuiteOptions,
};

/// All static types with at most `depth` arrows over `bases`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstVocabulary {
    pub depth: usize,
    pub bases: Vec<BaseType>,
}

impl SubstVocabulary {
    pub fn new(depth: usize, bases: Vec<BaseType>) -> Self {
        SubstVocabulary { depth, bases }
    }

    /// Over `int` and `bool`.
    pub fn standard(depth: usize) -> Self {
        SubstVocabulary::new(depth, vec![BaseType::Int, BaseType::Bool])
    }

    /// Types ordered by arrow count, then structurally.
    pub fn types(&self) -> Vec<GradualType> {
        let mut by_arrows: Vec<Vec<GradualType>> = Vec::with_capacity(self.depth + 1);
        by_arrows.push(self.bases.iter().map(|b| GradualType::Base(*b)).collect());
        for n in 1..=self.depth {
            let mut level = Vec::new();
            for k in 0..n {
                for a in &by_arrows[k] {
                    for b in &by_arrows[n - 1 - k] {
                        level.push(GradualType::arrow(a.clone(), b.clone()));
                    }
                }
            }
            by_arrows.push(level);
        }
        by_arrows.concat()
    }

    /// Every substitution from `vars` into the vocabulary, or `limit` of
    /// them sampled without replacement when there are more.
    pub fn groundings(&self, vars: &[TyVar], limit: usize, seed: u64) -> Groundings {
        let types = self.types();
        let total = (types.len() as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
        let decode = |mut i: u128| {
            let mut s = TypeSubstitution::empty();
            for x in vars {
                let k = (i % types.len() as u128) as usize;
                i /= types.len() as u128;
                s.insert(x.clone(), types[k].clone());
            }
            s
        };
        if total <= limit as u128 {
            Groundings { substs: (0..total).map(decode).collect(), exhaustive: true }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picks: Vec<u128> = if total <= usize::MAX as u128 {
                sample(&mut rng, total as usize, limit).into_iter().map(|i| i as u128).collect()
            } else {
                use rand::Rng;
                (0..limit).map(|_| rng.gen::<u128>() % total).collect()
            };
            picks.sort_unstable();
            Groundings { substs: picks.into_iter().map(decode).collect(), exhaustive: false }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Groundings {
    pub substs: Vec<TypeSubstitution>,
    /// Whether every substitution was enumerated.
    pub exhaustive: bool,
}

/// Applies `s` and replaces every `nu` by `filler`, yielding a term the
/// baseline evaluator accepts when `s` covers its free type variables.
pub fn ground_term(f: &TermDti, s: &TypeSubstitution, filler: &GradualType) -> TermDti {
    erase_nu(&f.apply_subst(s), filler)
}

fn erase_nu(f: &TermDti, filler: &GradualType) -> TermDti {
    use TermDti as F;
    let b = |t: &TermDti| Box::new(erase_nu(t, filler));
    match f {
        F::Var { name, args } => F::Var {
            name: name.clone(),
            args: args
                .iter()
                .map(|a| match a {
                    TypeArg::Nu => TypeArg::Ty(filler.clone()),
                    a => a.clone(),
                })
                .collect(),
        },
        F::Const(_) | F::Blame(_) => f.clone(),
        F::Op { op, lhs, rhs } => F::Op { op: *op, lhs: b(lhs), rhs: b(rhs) },
        F::Lam { param, ty, body } => F::Lam { param: param.clone(), ty: ty.clone(), body: b(body) },
        F::App { fun, arg } => F::App { fun: b(fun), arg: b(arg) },
        F::Cast { term, from, to, label } => F::Cast { term: b(term), from: from.clone(), to: to.clone(), label: *label },
        F::Let { name, binders, value, body } => {
            F::Let { name: name.clone(), binders: binders.clone(), value: b(value), body: b(body) }
        }
        F::If { cond, then_branch, else_branch } => {
            F::If { cond: b(cond), then_branch: b(then_branch), else_branch: b(else_branch) }
        }
        F::Fix { name, param, param_ty, ret_ty, body } => F::Fix {
            name: name.clone(),
            param: param.clone(),
            param_ty: param_ty.clone(),
            ret_ty: ret_ty.clone(),
            body: b(body),
        },
    }
}

/// A failing case, with enough information to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub case: usize,
    pub program: String,
    pub subst: String,
    pub detail: String,
}

/// Result of running a property over a batch of cases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub cases: usize,
    pub failures: usize,
    pub inconclusive: usize,
    pub seed: u64,
    /// Programs skipped because they did not meet the suite's filter.
    pub skipped: usize,
    pub counterexample: Option<Counterexample>,
    /// Outcome counts, e.g. how many programs produced a value.
    pub outcomes: BTreeMap<String, usize>,
}

impl PropertyReport {
    pub fn new(property: impl Into<String>, seed: u64) -> Self {
        PropertyReport {
            property: property.into(),
            cases: 0,
            failures: 0,
            inconclusive: 0,
            seed,
            skipped: 0,
            counterexample: None,
            outcomes: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn pass(&mut self) {
        self.cases += 1;
    }

    pub fn inconclusive(&mut self) {
        self.cases += 1;
        self.inconclusive += 1;
    }

    pub fn fail(&mut self, program: &str, subst: &TypeSubstitution, detail: impl Into<String>) {
        let case = self.cases;
        self.cases += 1;
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample =
                Some(Counterexample { case, program: program.to_string(), subst: subst.to_string(), detail: detail.into() });
        }
    }

    pub fn count(&mut self, outcome: &str) {
        *self.outcomes.entry(outcome.to_string()).or_default() += 1;
    }

    /// Adds the counts of `other`, which ran after `self`.
    pub fn absorb(&mut self, other: PropertyReport) {
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample.map(|mut c| {
                c.case += self.cases;
                c
            });
        }
        self.cases += other.cases;
        self.failures += other.failures;
        self.inconclusive += other.inconclusive;
        self.skipped += other.skipped;
        for (k, v) in other.outcomes {
            *self.outcomes.entry(k).or_default() += v;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(n: usize) -> usize {
        (0..n).fold(1, |c, k| c * 2 * (2 * k + 1) / (k + 2))
    }

    #[test]
    fn vocabulary_size_matches_the_closed_form() {
        // with n arrows there are catalan(n) tree shapes and n + 1 leaves
        for bases in 1..=3usize {
            for depth in 0..=3 {
                let v = SubstVocabulary::new(depth, [BaseType::Int, BaseType::Bool, BaseType::Unit][..bases].to_vec());
                let expected: usize = (0..=depth).map(|n| catalan(n) * bases.pow(n as u32 + 1)).sum();
                let types = v.types();
                assert_eq!(types.len(), expected);
                let distinct: std::collections::BTreeSet<String> = types.iter().map(|t| t.to_string()).collect();
                assert_eq!(distinct.len(), expected);
                assert!(types.iter().all(|t| t.is_static() && t.arrow_count() <= depth && t.ftv().is_empty()));
            }
        }
        assert_eq!(SubstVocabulary::standard(2).types().len(), 22);
    }

    #[test]
    fn groundings_enumerate_or_sample() {
        let v = SubstVocabulary::standard(2);
        let xs = [TyVar::new("X"), TyVar::new("Y")];
        let all = v.groundings(&xs, 1000, 0);
        assert!(all.exhaustive);
        assert_eq!(all.substs.len(), 22 * 22);
        let some = v.groundings(&xs, 50, 7);
        assert!(!some.exhaustive);
        assert_eq!(some.substs.len(), 50);
        assert_eq!(some.substs, v.groundings(&xs, 50, 7).substs);
        let none = v.groundings(&[], 10, 0);
        assert_eq!(none.substs, vec![TypeSubstitution::empty()]);
    }

    #[test]
    fn report_counts_and_serializes() {
        let mut r = PropertyReport::new("p", 3);
        r.pass();
        r.inconclusive();
        r.fail("1 + 1", &TypeSubstitution::empty(), "boom");
        assert_eq!((r.cases, r.failures, r.inconclusive), (3, 1, 1));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["property", "cases", "failures", "inconclusive", "seed"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["counterexample"]["case"], 2);
    }
}
