//! End-to-end acceptance checks. Each test prints one `PASS` or `FAIL`
//! line and then asserts, so a failing criterion is visible in the log
//! even when the run is captured.

use std::time::{Duration, Instant};

use gradualhm::eval::{eval, Mode, Outcome, Rule, RunOptions};
use gradualhm::frontend::{parse_dti, parse_itgl, print_dti, PrintOptions};
use gradualhm::harness::{check_gradual_guarantee, ground_term, run_suite, Property, SubstVocabulary, SuiteOptions};
use gradualhm::pipeline::run_source;
use gradualhm::{BaseType, GradualType, Polarity, TyVar};

const SUCCESS: &str = "(fun (x : ?) -> x 2) (fun y -> y)";
const SUCCESS_MAX_STEPS: usize = 20;
const SUCCESS_MAX_TIME: Duration = Duration::from_millis(10);

const BLAME: &str = "(fun (x : ? -> ? -> ?) -> x 2 true) (fun y1 -> fun y2 -> if true then y1 else y2)";
const BLAME_MAX_STEPS: usize = 30;

const ARROW_CHAIN: &str =
    "((fun (y : int) -> y + 1) : int -> int =>[1+] ? =>[2+] 'X =>[3+] ? =>[4+] ? -> ?) (3 : int =>[5+] ?)";

const LET_POLY: &str = "let g = fun x -> ((fun y -> y) : ? -> ?) x in let a = g 2 in g true";

const DIVERGES: &str = "((fun (x : 'X) -> (x : 'X =>[1+] ? =>[2+] ? -> ?) (x : 'X =>[3+] ?)) : 'X -> ? =>[4+] ? -> ?) \
                        ((fun (x : ?) -> (x : ? =>[5+] ? -> ?) x) : ? -> ? =>[6+] ?)";
const DIVERGES_DTI_FUEL: usize = 10_000;
const DIVERGES_BASELINE_FUEL: usize = 1_000;
const DIVERGES_MAX_TIME: Duration = Duration::from_secs(30);

const SUITE_CASES: usize = 1_000;
const ORACLE_CASES: usize = 200;
const ORACLE_FUEL: usize = 10_000;
const ORACLE_MAX_VARS: usize = 2;
const ORACLE_MAX_TIME: Duration = Duration::from_secs(300);

fn report(n: u32, name: &str, result: Result<String, String>) {
    match result {
        Ok(detail) => println!("PASS [{n}] {name}: {detail}"),
        Err(detail) => {
            println!("FAIL [{n}] {name}: {detail}");
            panic!("criterion {n} ({name}) failed: {detail}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int() -> GradualType {
    GradualType::Base(BaseType::Int)
}

fn bool_() -> GradualType {
    GradualType::Base(BaseType::Bool)
}

#[test]
fn c01_intro_success_trace() {
    let go = || -> Result<String, String> {
        let start = Instant::now();
        let (c, r) = run_source(SUCCESS, Mode::Dti, RunOptions::fuel(1000)).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let Outcome::Value(w) = &r.outcome else { return Err(format!("outcome {:?}", r.outcome)) };
        let shown = print_dti(w, PrintOptions::display());
        ensure(shown == "2 : int => ?", || format!("value printed {shown}"))?;
        let residual: Vec<TyVar> = c.inference.residual().into_iter().collect();
        ensure(residual.len() == 1, || format!("residual variables {residual:?}"))?;
        let bound = r.subst.get(&residual[0]);
        ensure(bound == Some(&int()), || format!("{} bound to {bound:?}", residual[0]))?;
        let rules = r.rules();
        let golden = [Rule::AppCast, Rule::InstBase, Rule::Beta];
        ensure(rules.ends_with(&golden), || format!("rules {rules:?}"))?;
        ensure(r.steps <= SUCCESS_MAX_STEPS, || format!("{} steps", r.steps))?;
        ensure(elapsed < SUCCESS_MAX_TIME, || format!("took {elapsed:?}"))?;
        Ok(format!("{shown} where {} in {} steps, {elapsed:?}", r.subst, r.steps))
    };
    report(1, "intro success trace", go());
}

#[test]
fn c02_intro_blame_trace() {
    let go = || -> Result<String, String> {
        let (_, r) = run_source(BLAME, Mode::Dti, RunOptions::fuel(1000)).map_err(|e| e.to_string())?;
        let Outcome::Blame(l) = r.outcome else { return Err(format!("outcome {:?}", r.outcome)) };
        ensure(l.id == 3 && l.polarity == Polarity::Negative, || format!("blame {l}"))?;
        ensure(r.steps <= BLAME_MAX_STEPS, || format!("{} steps", r.steps))?;
        Ok(format!("blame {l} in {} steps", r.steps))
    };
    report(2, "intro blame trace", go());
}

#[test]
fn c03_arrow_instantiation_chain() {
    let go = || -> Result<String, String> {
        let f = parse_dti(ARROW_CHAIN).map_err(|e| e.to_string())?;
        let r = eval(&f, Mode::Dti, 1000).map_err(|e| e.to_string())?;
        let Outcome::Value(w) = &r.outcome else { return Err(format!("outcome {:?}", r.outcome)) };
        let shown = print_dti(w, PrintOptions::default());
        ensure(shown == "4 : int =>[4+] ?", || format!("value {shown}"))?;
        let x = TyVar::new("X");
        let inst = r
            .trace
            .iter()
            .find(|e| e.rule == Rule::InstArrow)
            .and_then(|e| e.subst.get(&x).cloned())
            .ok_or("no arrow instantiation of X")?;
        let GradualType::Arrow(a, b) = &inst else { return Err(format!("X := {inst}")) };
        let (GradualType::Var(ra), GradualType::Var(rb)) = (&**a, &**b) else { return Err(format!("X := {inst}")) };
        ensure(ra != rb, || format!("X := {inst}"))?;
        for v in [ra, rb] {
            ensure(r.subst.get(v) == Some(&int()), || format!("{v} := {:?}", r.subst.get(v)))?;
        }
        ensure(r.subst.get(&x) == Some(&GradualType::arrow(int(), int())), || format!("accumulated {}", r.subst))?;
        Ok(format!("{shown}, X := {inst}, accumulated {}", r.subst))
    };
    report(3, "arrow instantiation chain", go());
}

#[test]
fn c04_let_polymorphism_with_nu() {
    let go = || -> Result<String, String> {
        let (_, r) = run_source(LET_POLY, Mode::Dti, RunOptions::fuel(1000)).map_err(|e| e.to_string())?;
        ensure(r.outcome.is_value(), || format!("outcome {:?}", r.outcome))?;
        let insts: Vec<(TyVar, GradualType)> = r
            .trace
            .iter()
            .filter(|e| e.rule == Rule::InstBase)
            .flat_map(|e| e.subst.iter().map(|(x, t)| (x.clone(), t.clone())).collect::<Vec<_>>())
            .collect();
        let to_int = insts.iter().find(|(_, t)| *t == int()).ok_or_else(|| format!("instantiations {insts:?}"))?;
        let to_bool = insts.iter().find(|(_, t)| *t == bool_()).ok_or_else(|| format!("instantiations {insts:?}"))?;
        ensure(to_int.0 != to_bool.0, || format!("shared variable {}", to_int.0))?;
        Ok(format!("{} := int, {} := bool", to_int.0, to_bool.0))
    };
    report(4, "let polymorphism with nu", go());
}

#[test]
fn c05_divergence_witness() {
    let go = || -> Result<String, String> {
        let start = Instant::now();
        let f = parse_dti(DIVERGES).map_err(|e| e.to_string())?;
        let r = eval(&f, Mode::Dti, DIVERGES_DTI_FUEL).map_err(|e| e.to_string())?;
        ensure(r.outcome.is_timeout(), || format!("dti outcome {:?} after {} steps", r.outcome, r.steps))?;
        let vars = f.ftv_ordered();
        ensure(vars.len() == 1, || format!("type variables {vars:?}"))?;
        let gs = SubstVocabulary::standard(2).groundings(&vars, usize::MAX, 0);
        ensure(gs.exhaustive && gs.substs.len() == 22, || format!("{} groundings", gs.substs.len()))?;
        for s in &gs.substs {
            let g = ground_term(&f, s, &int());
            let r = eval(&g, Mode::Baseline, DIVERGES_BASELINE_FUEL).map_err(|e| format!("{s}: {e}"))?;
            ensure(r.outcome.is_blame(), || format!("under {s}: {:?}", r.outcome))?;
        }
        let elapsed = start.elapsed();
        ensure(elapsed < DIVERGES_MAX_TIME, || format!("took {elapsed:?}"))?;
        Ok(format!("dti timeout, {} groundings blame, {elapsed:?}", gs.substs.len()))
    };
    report(5, "divergence witness", go());
}

fn suite(n: u32, name: &str, prop: Property, opts: SuiteOptions, limit: Option<Duration>) {
    let start = Instant::now();
    let rep = run_suite(prop, &opts);
    let elapsed = start.elapsed();
    let result = (|| {
        ensure(rep.cases == opts.cases, || format!("only {} cases", rep.cases))?;
        ensure(rep.passed(), || format!("{} failures, first {:?}", rep.failures, rep.counterexample))?;
        if let Some(limit) = limit {
            ensure(elapsed < limit, || format!("took {elapsed:?}"))?;
        }
        Ok(format!(
            "{} cases, 0 failures, {} inconclusive, outcomes {:?}, {elapsed:?}",
            rep.cases, rep.inconclusive, rep.outcomes
        ))
    })();
    report(n, name, result);
}

#[test]
fn c06_conservative_extension() {
    let opts = SuiteOptions { cases: SUITE_CASES, ..SuiteOptions::default() };
    suite(6, "conservative extension", Property::Conservative, opts, None);
}

#[test]
fn c07_soundness_and_completeness() {
    let opts = SuiteOptions {
        cases: ORACLE_CASES,
        fuel: ORACLE_FUEL,
        max_vars: ORACLE_MAX_VARS,
        vocab: SubstVocabulary::standard(2),
        ..SuiteOptions::default()
    };
    let start = Instant::now();
    suite(7, "soundness", Property::Soundness, opts.clone(), Some(ORACLE_MAX_TIME));
    let left = ORACLE_MAX_TIME.saturating_sub(start.elapsed());
    suite(7, "completeness", Property::Completeness, opts, Some(left));
}

#[test]
fn c08_type_safety() {
    let opts = SuiteOptions { cases: SUITE_CASES, ..SuiteOptions::default() };
    suite(8, "type safety", Property::Safety, opts, None);
}

#[test]
fn c09_cast_insertion_preserves_types() {
    let opts = SuiteOptions { cases: SUITE_CASES, ..SuiteOptions::default() };
    suite(9, "cast insertion preserves types", Property::CastPreservation, opts, None);
}

#[test]
fn c10_gradual_guarantee_triple() {
    let go = || -> Result<String, String> {
        let imprecise = parse_itgl("(fun (x : ?) -> x 2) (fun (y : ?) -> y)").map_err(|e| e.to_string())?;
        let mut seen = Vec::new();
        for (dom, expected) in [("?", "value/value"), ("int", "value/value"), ("bool", "blame/value")] {
            let precise =
                parse_itgl(&format!("(fun (x : ? -> ?) -> x 2) (fun (y : {dom}) -> y)")).map_err(|e| e.to_string())?;
            let rep = check_gradual_guarantee(&precise, &imprecise, 1000);
            ensure(rep.passed() && rep.inconclusive == 0, || format!("{dom}: {rep:?}"))?;
            let got: Vec<&String> = rep.outcomes.keys().collect();
            ensure(got == [expected], || format!("{dom}: outcomes {got:?}"))?;
            seen.push(format!("{dom} {expected}"));
        }
        Ok(seen.join(", "))
    };
    report(10, "gradual guarantee triple", go());
}
