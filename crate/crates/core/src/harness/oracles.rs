//! Property drivers: soundness and completeness of dynamic type
//! inference, conservative extension, type safety, cast insertion and the
//! dynamic gradual guarantee.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cast::insert_casts;
use crate::dti::{TermDti, TypeArg};
use crate::eval::{canonicalize, EvalResult, Evaluator, Mode, Outcome, RunOptions, StepResult, TraceMode};
use crate::frontend::{print_dti, print_itgl, PrintOptions};
use crate::infer::{check_itgl, infer_principal};
use crate::itgl::TermItgl;
use crate::pipeline::compile_term;
use crate::precision::{infer_term_prec_dti, infer_term_prec_itgl};
use crate::subst::TypeSubstitution;
use crate::typecheck::{check_dti, typecheck_dti};
use crate::types::{GradualType, TyVar};

use super::{gen, ground_term, PropertyReport, SubstVocabulary};

/// Upper bound on the substitutions tried per program; beyond it the
/// groundings are sampled.
const GROUNDING_LIMIT: usize = 1000;

fn run(f: &TermDti, mode: Mode, fuel: usize) -> Result<EvalResult, crate::eval::StuckError> {
    Evaluator::new(mode).run(f, RunOptions { max_steps: fuel, trace: TraceMode::Off })
}

fn show(f: &TermDti) -> String {
    print_dti(f, PrintOptions::default())
}

fn describe(o: &Outcome) -> String {
    match o {
        Outcome::Value(v) => show(v),
        Outcome::Blame(l) => format!("blame {l}"),
        Outcome::Timeout => "timeout".to_string(),
    }
}

fn kind(o: &Outcome) -> &'static str {
    match o {
        Outcome::Value(_) => "value",
        Outcome::Blame(_) => "blame",
        Outcome::Timeout => "timeout",
    }
}

/// Soundness of dynamic type inference for one closed, well-typed term.
///
/// If `f` produces a value under `S`, every grounding `S'` of `S(f)`
/// produces `S'(w)` up to the names of run-time variables. If `f` blames,
/// every grounding of `f` blames. If `f` runs out of fuel, no grounding
/// of `f` produces a value.
pub fn check_soundness(f: &TermDti, vocab: &SubstVocabulary, fuel: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("soundness", 0);
    let program = show(f);
    let r = match run(f, Mode::Dti, fuel) {
        Ok(r) => r,
        Err(e) => {
            rep.fail(&program, &TypeSubstitution::empty(), format!("stuck: {e}"));
            return rep;
        }
    };
    rep.count(kind(&r.outcome));
    let base = match &r.outcome {
        Outcome::Value(_) => f.apply_subst(&r.subst),
        _ => f.clone(),
    };
    let vars = base.ftv_ordered();
    let gs = vocab.groundings(&vars, GROUNDING_LIMIT, 0);
    let verdicts: Vec<Verdict> = gs
        .substs
        .par_iter()
        .map(|s| {
            let g = base.apply_subst(s);
            let got = match run(&g, Mode::Dti, fuel) {
                Ok(got) => got.outcome,
                Err(e) => return Verdict::Fail(format!("grounded term stuck: {e}")),
            };
            match (&r.outcome, &got) {
                (Outcome::Value(w), Outcome::Value(v)) => {
                    if canonicalize(v) == canonicalize(&w.apply_subst(s)) {
                        Verdict::Pass
                    } else {
                        Verdict::Fail(format!("expected {}, got {}", show(&w.apply_subst(s)), show(v)))
                    }
                }
                (Outcome::Value(_), Outcome::Timeout) => Verdict::Inconclusive,
                (Outcome::Value(w), Outcome::Blame(l)) => {
                    Verdict::Fail(format!("expected {}, got blame {l}", show(&w.apply_subst(s))))
                }
                (Outcome::Blame(_), Outcome::Blame(_)) => Verdict::Pass,
                (Outcome::Blame(_), Outcome::Timeout) => Verdict::Inconclusive,
                (Outcome::Blame(l), Outcome::Value(v)) => {
                    Verdict::Fail(format!("original blamed {l}, grounding produced {}", show(v)))
                }
                (Outcome::Timeout, Outcome::Blame(_)) => Verdict::Pass,
                (Outcome::Timeout, _) => Verdict::Inconclusive,
            }
        })
        .collect();
    for (s, v) in gs.substs.iter().zip(verdicts) {
        v.record(&mut rep, &program, s);
    }
    rep
}

/// Completeness of dynamic type inference for one closed, well-typed
/// term: whenever a grounding `S(f)` produces `w`, `f` itself produces
/// some `w'` with `S'''(w') = w`; whenever `S(f)` runs out of fuel, so
/// does `f`.
pub fn check_completeness(f: &TermDti, vocab: &SubstVocabulary, fuel: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("completeness", 0);
    let program = show(f);
    let own = match run(f, Mode::Dti, fuel) {
        Ok(r) => r.outcome,
        Err(e) => {
            rep.fail(&program, &TypeSubstitution::empty(), format!("stuck: {e}"));
            return rep;
        }
    };
    rep.count(kind(&own));
    let gs = vocab.groundings(&f.ftv_ordered(), GROUNDING_LIMIT, 0);
    let verdicts: Vec<Verdict> = gs
        .substs
        .par_iter()
        .map(|s| {
            let got = match run(&f.apply_subst(s), Mode::Dti, fuel) {
                Ok(got) => got.outcome,
                Err(e) => return Verdict::Fail(format!("grounded term stuck: {e}")),
            };
            match (&got, &own) {
                (Outcome::Value(w), Outcome::Value(w2)) => match match_value(w2, w) {
                    Some(_) => Verdict::Pass,
                    None => Verdict::Fail(format!("{} is not an instance of {}", show(w), show(w2))),
                },
                (Outcome::Value(w), Outcome::Blame(l)) => {
                    Verdict::Fail(format!("grounding produced {}, original blamed {l}", show(w)))
                }
                (Outcome::Value(_), Outcome::Timeout) => Verdict::Inconclusive,
                (Outcome::Timeout, Outcome::Timeout) => Verdict::Pass,
                (Outcome::Timeout, _) => Verdict::Inconclusive,
                (Outcome::Blame(_), _) => Verdict::Pass,
            }
        })
        .collect();
    for (s, v) in gs.substs.iter().zip(verdicts) {
        v.record(&mut rep, &program, s);
    }
    rep
}

enum Verdict {
    Pass,
    Inconclusive,
    Fail(String),
}

impl Verdict {
    fn record(self, rep: &mut PropertyReport, program: &str, s: &TypeSubstitution) {
        match self {
            Verdict::Pass => rep.pass(),
            Verdict::Inconclusive => rep.inconclusive(),
            Verdict::Fail(d) => rep.fail(program, s, d),
        }
    }
}

/// A substitution `S` with `S(pattern) = target`, if there is one. Let
/// binders are matched positionally.
pub fn match_value(pattern: &TermDti, target: &TermDti) -> Option<TypeSubstitution> {
    let mut s = TypeSubstitution::empty();
    match_term(pattern, target, &mut s).then_some(s)
}

fn match_type(p: &GradualType, t: &GradualType, s: &mut TypeSubstitution) -> bool {
    match (p, t) {
        (GradualType::Var(x), _) => match s.get(x) {
            Some(u) => u == t,
            None if t.is_static() => {
                s.insert(x.clone(), t.clone());
                true
            }
            None => false,
        },
        (GradualType::Arrow(a1, a2), GradualType::Arrow(b1, b2)) => match_type(a1, b1, s) && match_type(a2, b2, s),
        _ => p == t,
    }
}

fn match_term(p: &TermDti, t: &TermDti, s: &mut TypeSubstitution) -> bool {
    use TermDti as F;
    match (p, t) {
        (F::Var { name: x, args: a }, F::Var { name: y, args: b }) => {
            x == y
                && a.len() == b.len()
                && a.iter().zip(b).all(|pair| match pair {
                    (TypeArg::Nu, TypeArg::Nu) => true,
                    (TypeArg::Ty(u), TypeArg::Ty(v)) => match_type(u, v, s),
                    _ => false,
                })
        }
        (F::Const(a), F::Const(b)) => a == b,
        (F::Blame(a), F::Blame(b)) => a == b,
        (F::Op { op: o1, lhs: l1, rhs: r1 }, F::Op { op: o2, lhs: l2, rhs: r2 }) => {
            o1 == o2 && match_term(l1, l2, s) && match_term(r1, r2, s)
        }
        (F::Lam { param: x, ty: u, body: b }, F::Lam { param: y, ty: v, body: c }) => {
            x == y && match_type(u, v, s) && match_term(b, c, s)
        }
        (F::App { fun: f1, arg: a1 }, F::App { fun: f2, arg: a2 }) => match_term(f1, f2, s) && match_term(a1, a2, s),
        (F::Cast { term: t1, from: u1, to: v1, label: l1 }, F::Cast { term: t2, from: u2, to: v2, label: l2 }) => {
            l1 == l2 && match_type(u1, u2, s) && match_type(v1, v2, s) && match_term(t1, t2, s)
        }
        (F::Let { name: x, binders: xs, value: w1, body: b1 }, F::Let { name: y, binders: ys, value: w2, body: b2 }) => {
            if x != y || xs.len() != ys.len() {
                return false;
            }
            let rename = TypeSubstitution::try_from_pairs(ys.iter().cloned().zip(xs.iter().cloned().map(GradualType::Var)));
            let Ok(rename) = rename else { return false };
            let w2 = w2.apply_subst(&rename);
            let saved: Vec<(TyVar, Option<GradualType>)> = xs.iter().map(|x| (x.clone(), s.remove(x))).collect();
            for x in xs {
                s.insert(x.clone(), GradualType::Var(x.clone()));
            }
            let ok = match_term(w1, &w2, s);
            for (x, old) in saved {
                s.remove(&x);
                if let Some(u) = old {
                    s.insert(x, u);
                }
            }
            ok && match_term(b1, b2, s)
        }
        (
            F::If { cond: c1, then_branch: t1, else_branch: e1 },
            F::If { cond: c2, then_branch: t2, else_branch: e2 },
        ) => match_term(c1, c2, s) && match_term(t1, t2, s) && match_term(e1, e2, s),
        (
            F::Fix { name: g1, param: x1, param_ty: u1, ret_ty: r1, body: b1 },
            F::Fix { name: g2, param: x2, param_ty: u2, ret_ty: r2, body: b2 },
        ) => g1 == g2 && x1 == x2 && match_type(u1, u2, s) && match_type(r1, r2, s) && match_term(b1, b2, s),
        _ => false,
    }
}

/// Runs a term without type variables or `nu` in both modes and checks
/// that the two runs take the same steps.
pub fn check_conservative(f: &TermDti, fuel: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("conservative", 0);
    let program = show(f);
    let empty = TypeSubstitution::empty();
    if !f.ftv().is_empty() || f.has_nu() {
        rep.fail(&program, &empty, "term has type variables or nu");
        return rep;
    }
    let mut dti = Evaluator::new(Mode::Dti);
    let mut base = Evaluator::new(Mode::Baseline);
    let mut cur = f.clone();
    for step in 0..fuel {
        let a = dti.step(&cur);
        let b = base.step(&cur);
        match (a, b) {
            (Ok(a), Ok(b)) if a != b => {
                rep.fail(&program, &empty, format!("step {step}: dti {a:?}, baseline {b:?}"));
                return rep;
            }
            (Ok(StepResult::Stepped { next, subst, rule }), Ok(_)) => {
                if !subst.is_empty() {
                    rep.fail(&program, &empty, format!("step {step}: {rule} produced {subst}"));
                    return rep;
                }
                cur = next;
            }
            (Ok(StepResult::IsValue), Ok(_)) => {
                rep.count("value");
                rep.pass();
                return rep;
            }
            (Ok(StepResult::Aborted(_)), Ok(_)) => {
                rep.count("blame");
                rep.pass();
                return rep;
            }
            (a, b) => {
                rep.fail(&program, &empty, format!("step {step}: dti {a:?}, baseline {b:?}"));
                return rep;
            }
        }
    }
    rep.count("timeout");
    rep.pass();
    rep
}

/// Progress and preservation along the whole run of a closed term: every
/// configuration is a value, blame, or steps, and after a step with
/// substitution `S` the new term has type `S(U)`.
pub fn check_safety(f: &TermDti, fuel: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("safety", 0);
    let program = show(f);
    let empty = TypeSubstitution::empty();
    let mut ty = match typecheck_dti(&[], f) {
        Ok(t) => t,
        Err(e) => {
            rep.fail(&program, &empty, format!("initial term ill typed: {e}"));
            return rep;
        }
    };
    let mut ev = Evaluator::new(Mode::Dti);
    ev.avoid_names_in(f);
    let mut cur = f.clone();
    let mut acc = TypeSubstitution::empty();
    for step in 0..fuel {
        match ev.step(&cur) {
            Ok(StepResult::IsValue) => {
                rep.count("value");
                rep.pass();
                return rep;
            }
            Ok(StepResult::Aborted(_)) => {
                rep.count("blame");
                rep.pass();
                return rep;
            }
            Ok(StepResult::Stepped { next, subst, rule }) => {
                ty = subst.apply(&ty);
                acc = subst.compose(&acc);
                if let Err(e) = check_dti(&[], &next, &ty) {
                    rep.fail(&show(&next), &acc, format!("step {step} ({rule}) of {program} broke preservation: {e}"));
                    return rep;
                }
                cur = next;
            }
            Err(e) => {
                rep.fail(&show(&cur), &acc, format!("step {step} of {program}: no progress: {e}"));
                return rep;
            }
        }
    }
    rep.count("timeout");
    rep.pass();
    rep
}

/// Inference produces a term the declarative checker accepts, and cast
/// insertion produces a term whose type is the inferred type.
pub fn check_cast_preservation(e: &TermItgl) -> PropertyReport {
    let mut rep = PropertyReport::new("cast-preservation", 0);
    let program = print_itgl(e, PrintOptions::default());
    let empty = TypeSubstitution::empty();
    let inf = match infer_principal(&[], e) {
        Ok(inf) => inf,
        Err(err) => {
            rep.fail(&program, &empty, format!("inference failed: {err}"));
            return rep;
        }
    };
    match check_itgl(&[], &inf.term) {
        Ok(t) if t == inf.ty => {}
        Ok(t) => {
            rep.fail(&program, &inf.subst, format!("checker says {t}, inference says {}", inf.ty));
            return rep;
        }
        Err(err) => {
            rep.fail(&program, &inf.subst, format!("inferred term rejected: {err}"));
            return rep;
        }
    }
    match insert_casts(&[], &inf.term) {
        Ok(tr) => match typecheck_dti(&[], &tr.term) {
            Ok(t) if t == inf.ty && tr.ty == inf.ty => rep.pass(),
            Ok(t) => rep.fail(&program, &inf.subst, format!("translation has type {t}, expected {}", inf.ty)),
            Err(err) => rep.fail(&program, &inf.subst, format!("translation ill typed: {err}")),
        },
        Err(err) => rep.fail(&program, &inf.subst, format!("cast insertion failed: {err}")),
    }
    rep
}

/// The dynamic gradual guarantee for `e ⊑ e2`.
///
/// A value on the precise side needs a related value on the imprecise
/// side. A value on the imprecise side needs a related value or blame on
/// the precise side. Blame on the imprecise side needs blame on the
/// precise side. Running out of fuel on one side against anything but a
/// value on the other is inconclusive.
pub fn check_gradual_guarantee(e: &TermItgl, e2: &TermItgl, fuel: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("gradual-guarantee", 0);
    let program = format!("{}  <=  {}", print_itgl(e, PrintOptions::default()), print_itgl(e2, PrintOptions::default()));
    let empty = TypeSubstitution::empty();
    let Some(s0) = infer_term_prec_itgl(e, e2) else {
        rep.fail(&program, &empty, "the programs are not related by precision");
        return rep;
    };
    let precise = match compile_term(e) {
        Ok(c) => c,
        Err(err) => {
            rep.fail(&program, &s0, format!("precise side rejected: {err}"));
            return rep;
        }
    };
    let imprecise = match compile_term(e2) {
        Ok(c) => c,
        Err(err) => {
            rep.fail(&program, &s0, format!("static guarantee broken, imprecise side rejected: {err}"));
            return rep;
        }
    };
    let (r, r2) = match (run(&precise.translation.term, Mode::Dti, fuel), run(&imprecise.translation.term, Mode::Dti, fuel)) {
        (Ok(r), Ok(r2)) => (r.outcome, r2.outcome),
        (Err(err), _) | (_, Err(err)) => {
            rep.fail(&program, &s0, format!("stuck: {err}"));
            return rep;
        }
    };
    rep.count(&format!("{}/{}", kind(&r), kind(&r2)));
    let detail = || format!("precise {} but imprecise {}", describe(&r), describe(&r2));
    match (&r, &r2) {
        (Outcome::Value(w), Outcome::Value(w2)) => match infer_term_prec_dti(&[], w, w2, &[]) {
            Some(_) => rep.pass(),
            None => rep.fail(&program, &s0, format!("values not related: {}", detail())),
        },
        (Outcome::Value(_), _) => rep.fail(&program, &s0, detail()),
        (Outcome::Blame(_), _) | (Outcome::Timeout, Outcome::Timeout) => rep.pass(),
        // the precise side may only be slower than the fuel allows
        (Outcome::Timeout, _) => rep.inconclusive(),
    }
    rep
}

/// The properties the suite runner knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Soundness,
    Completeness,
    Conservative,
    Safety,
    CastPreservation,
    GradualGuarantee,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Soundness,
        Property::Completeness,
        Property::Conservative,
        Property::Safety,
        Property::CastPreservation,
        Property::GradualGuarantee,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Soundness => "soundness",
            Property::Completeness => "completeness",
            Property::Conservative => "conservative",
            Property::Safety => "safety",
            Property::CastPreservation => "cast-preservation",
            Property::GradualGuarantee => "gg",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property `{s}`; expected one of soundness, completeness, conservative, safety, cast-preservation, gg"))
    }
}

/// Parameters of a generated-program suite.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Number of programs to check.
    pub cases: usize,
    pub vocab: SubstVocabulary,
    pub fuel: usize,
    /// Programs whose translation has more free type variables are skipped.
    pub max_vars: usize,
    /// Size budget handed to the generator.
    pub size: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, cases: 100, vocab: SubstVocabulary::standard(2), fuel: 10_000, max_vars: 2, size: 20 }
    }
}

struct Candidate {
    source: TermItgl,
    term: TermDti,
}

fn candidate(prop: Property, seed: u64, opts: &SuiteOptions) -> Option<Candidate> {
    let mut g = gen::Generator::new(seed);
    // conditionals need equal branch types, which the static half of the
    // gradual guarantee does not survive
    g.conditionals = prop != Property::GradualGuarantee;
    let source = g.generate(opts.size).ok()?;
    let c = compile_term(&source).ok()?;
    Some(Candidate { source, term: c.translation.term })
}

/// Generates programs from consecutive seeds starting at `opts.seed` and
/// checks `prop` on each. Results are merged in seed order.
pub fn run_suite(prop: Property, opts: &SuiteOptions) -> PropertyReport {
    let keep = |c: &Candidate| match prop {
        Property::Soundness | Property::Completeness => c.term.ftv().len() <= opts.max_vars,
        _ => true,
    };
    let mut chosen: Vec<(u64, Candidate)> = Vec::with_capacity(opts.cases);
    let mut skipped = 0;
    let mut next = opts.seed;
    let chunk = opts.cases.max(16) as u64;
    while chosen.len() < opts.cases && next - opts.seed < chunk * 50 {
        let batch: Vec<(u64, Option<Candidate>)> =
            (next..next + chunk).into_par_iter().map(|seed| (seed, candidate(prop, seed, opts))).collect();
        next += chunk;
        for (seed, c) in batch {
            match c {
                Some(c) if keep(&c) && chosen.len() < opts.cases => chosen.push((seed, c)),
                Some(_) if chosen.len() < opts.cases => skipped += 1,
                None if chosen.len() < opts.cases => skipped += 1,
                _ => {}
            }
        }
    }
    let reports: Vec<PropertyReport> = chosen
        .par_iter()
        .map(|(seed, c)| {
            let mut r = check_one(prop, *seed, c, opts);
            if let Some(cx) = &mut r.counterexample {
                cx.detail = format!("seed {seed}: {}", cx.detail);
            }
            r
        })
        .collect();
    let mut total = PropertyReport::new(prop.name(), opts.seed);
    total.skipped = skipped;
    for r in reports {
        let failed = r.failures > 0;
        let inconclusive = r.inconclusive > 0;
        let mut summary = PropertyReport::new(prop.name(), opts.seed);
        summary.cases = 1;
        summary.failures = usize::from(failed);
        summary.inconclusive = usize::from(inconclusive && !failed);
        summary.counterexample = r.counterexample;
        summary.outcomes = r.outcomes;
        total.absorb(summary);
    }
    total
}

fn check_one(prop: Property, seed: u64, c: &Candidate, opts: &SuiteOptions) -> PropertyReport {
    match prop {
        Property::Soundness => check_soundness(&c.term, &opts.vocab, opts.fuel),
        Property::Completeness => check_completeness(&c.term, &opts.vocab, opts.fuel),
        Property::Conservative => {
            let types = opts.vocab.types();
            let vars = c.term.ftv_ordered();
            let s = TypeSubstitution::try_from_pairs(
                vars.iter().enumerate().map(|(i, x)| (x.clone(), types[(seed as usize + i) % types.len()].clone())),
            )
            .expect("distinct variables");
            check_conservative(&ground_term(&c.term, &s, &GradualType::INT), opts.fuel)
        }
        Property::Safety => check_safety(&c.term, opts.fuel),
        Property::CastPreservation => check_cast_preservation(&c.source),
        Property::GradualGuarantee => {
            let weaker = gen::weaken(&c.source, seed, 0.4);
            check_gradual_guarantee(&c.source, &weaker, opts.fuel)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_dti, parse_itgl};

    fn dti(src: &str) -> TermDti {
        parse_dti(src).unwrap()
    }

    fn translate(src: &str) -> TermDti {
        compile_term(&parse_itgl(src).unwrap()).unwrap().translation.term
    }

    const SUCCESS: &str = "(fun (x : ?) -> x 2) (fun y -> y)";
    const BLAME: &str = "(fun (x : ? -> ? -> ?) -> x 2 true) (fun y1 -> fun y2 -> if true then y1 else y2)";

    #[test]
    fn soundness_on_the_introductory_programs() {
        let v = SubstVocabulary::standard(2);
        let rep = check_soundness(&translate(SUCCESS), &v, 1000);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.cases, 1);
        let rep = check_soundness(&translate(BLAME), &v, 1000);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.cases, 22);
        let rep = check_soundness(&dti("(fun (x : int) -> x + 1) 2"), &v, 1000);
        assert!(rep.passed() && rep.cases == 1);
    }

    #[test]
    fn completeness_on_small_terms() {
        let v = SubstVocabulary::standard(2);
        let f = dti("2 : int =>[1+] ? =>[2+] 'X");
        let rep = check_completeness(&f, &v, 100);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.cases, 22);
        let rep = check_completeness(&dti("fun (x : int) -> x"), &v, 100);
        assert!(rep.passed() && rep.cases == 1);
        let rep = check_completeness(&translate(SUCCESS), &v, 1000);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn matching_values() {
        let w = dti("(fun (y : 'X) -> y) : 'X -> 'X =>[3+] ?");
        let target = dti("(fun (y : int) -> y) : int -> int =>[3+] ?");
        let s = match_value(&w, &target).unwrap();
        assert_eq!(s.to_string(), "['X := int]");
        let bad = dti("(fun (y : int) -> y) : int -> int =>[4+] ?");
        assert!(match_value(&w, &bad).is_none());
        let mixed = dti("fun (y : int) -> (fun (z : bool) -> z) : bool -> bool =>[3+] ?");
        assert!(match_value(&dti("fun (y : 'X) -> (fun (z : 'X) -> z) : 'X -> 'X =>[3+] ?"), &mixed).is_none());
    }

    #[test]
    fn conservative_extension_on_a_ground_term() {
        let rep = check_conservative(&translate("(fun (x : ?) -> x + 1) 2"), 1000);
        assert!(rep.passed(), "{rep:?}");
        let rep = check_conservative(&dti("2 : int =>[1+] ? =>[2+] 'X"), 1000);
        assert!(!rep.passed());
    }

    #[test]
    fn safety_follows_every_step() {
        for src in [SUCCESS, BLAME, "let g = fun x -> ((fun y -> y) : ? -> ?) x in let a = g 2 in g true"] {
            let rep = check_safety(&translate(src), 1000);
            assert!(rep.passed(), "{src}: {rep:?}");
        }
    }

    #[test]
    fn gradual_guarantee_on_the_annotation_example() {
        let e2 = parse_itgl("(fun (x : ?) -> x 2) (fun (y : ?) -> y)").unwrap();
        for (dom, expect) in [("?", "value/value"), ("int", "value/value"), ("bool", "blame/value")] {
            let e = parse_itgl(&format!("(fun (x : ? -> ?) -> x 2) (fun (y : {dom}) -> y)")).unwrap();
            let rep = check_gradual_guarantee(&e, &e2, 1000);
            assert!(rep.passed(), "{dom}: {rep:?}");
            assert_eq!(rep.outcomes.keys().next().map(String::as_str), Some(expect));
        }
        let e = parse_itgl("(fun (x : ?) -> x 2) (fun (y : ?) -> y)").unwrap();
        let rep = check_gradual_guarantee(&e2, &parse_itgl("(fun (x : ? -> ?) -> x 2) (fun y -> y)").unwrap(), 1000);
        assert!(!rep.passed());
        assert!(check_gradual_guarantee(&e, &e, 1000).passed());
    }

    #[test]
    fn small_suites_pass() {
        let opts = SuiteOptions { cases: 30, ..SuiteOptions::default() };
        for p in Property::ALL {
            let rep = run_suite(p, &opts);
            assert_eq!(rep.cases, 30, "{p}");
            assert!(rep.passed(), "{p}: {rep:#?}");
        }
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>(), Ok(p));
        }
        assert!("nope".parse::<Property>().is_err());
    }
}
