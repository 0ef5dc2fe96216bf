use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

use gradualhm::eval::{eval, Evaluator, Mode, RunOptions, TraceMode};
use gradualhm::frontend::parse_dti;
use gradualhm::harness::{generate_well_typed, run_suite, Property, SuiteOptions};
use gradualhm::pipeline::{compile, compile_term};

const SUCCESS: &str = "(fun (x : ?) -> x 2) (fun y -> y)";
const LET_POLY: &str = "let g = fun x -> ((fun y -> y) : ? -> ?) x in let a = g 2 in g true";

// grows a new arrow instantiation every round, so each step is more work
const DIVERGES: &str = "((fun (x : 'X) -> (x : 'X =>[1+] ? =>[2+] ? -> ?) (x : 'X =>[3+] ?)) : 'X -> ? =>[4+] ? -> ?) \
                        ((fun (x : ?) -> (x : ? =>[5+] ? -> ?) x) : ? -> ? =>[6+] ?)";

fn compile_and_run(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    for (name, src) in [("success", SUCCESS), ("let_poly", LET_POLY)] {
        g.bench_function(format!("compile/{name}"), |b| b.iter(|| compile(black_box(src)).unwrap()));
        let f = compile(src).unwrap().translation.term;
        g.bench_function(format!("run/{name}"), |b| b.iter(|| eval(black_box(&f), Mode::Dti, 1000).unwrap()));
    }
    let programs: Vec<_> = (0..50).map(|seed| generate_well_typed(seed, 20).unwrap()).collect();
    g.bench_function("compile/generated_50", |b| {
        b.iter(|| {
            for e in &programs {
                black_box(compile_term(e).unwrap());
            }
        })
    });
    g.finish();
}

fn divergence(c: &mut Criterion) {
    let f = parse_dti(DIVERGES).unwrap();
    let mut g = c.benchmark_group("divergence");
    g.sample_size(10);
    for fuel in [500, 2000] {
        g.bench_function(format!("machine/{fuel}"), |b| {
            b.iter_batched(
                || Evaluator::new(Mode::Dti),
                |mut ev| ev.run(&f, RunOptions { max_steps: fuel, trace: TraceMode::Off }).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    // the reference stepper re-traverses the term on every step
    g.bench_function("by_steps/500", |b| {
        b.iter_batched(
            || Evaluator::new(Mode::Dti),
            |mut ev| ev.run_by_steps(&f, RunOptions { max_steps: 500, trace: TraceMode::Off }).unwrap(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    for prop in [Property::Safety, Property::Soundness] {
        let opts = SuiteOptions { cases: 20, ..SuiteOptions::default() };
        g.bench_function(prop.name(), |b| b.iter(|| run_suite(prop, &opts)));
    }
    g.finish();
}

criterion_group!(benches, compile_and_run, divergence, suites);
criterion_main!(benches);
