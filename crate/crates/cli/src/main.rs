use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gradualhm::eval::{Mode, RunOptions, TraceMode, DEFAULT_MAX_STEPS};
use gradualhm::harness::{run_suite, Property, SubstVocabulary, SuiteOptions};
use gradualhm::precision::{infer_term_prec_dti, infer_term_prec_itgl};

mod repl;
mod session;

/// Exit code for static errors: bad input, type errors, I/O.
const EXIT_STATIC: u8 = 1;

#[derive(Parser)]
#[command(name = "gradualhm", version, about = "Gradual Hindley-Milner with dynamic type inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dti,
    Baseline,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Dti => Mode::Dti,
            ModeArg::Baseline => Mode::Baseline,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceArg {
    /// Rule names and substitutions.
    Rules,
    /// Also the whole term after each step.
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session.
    Repl {
        #[arg(long, value_enum, default_value = "dti")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Compile and run a program. Exits 0 on a value, 2 on blame, 3 when
    /// the step budget runs out and 1 on a static error.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dti")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Print one line per reduction step.
        #[arg(long, value_enum, num_args = 0..=1, require_equals = true, default_missing_value = "rules")]
        trace: Option<TraceArg>,
        /// Accepted for symmetry with `prop`; evaluation is deterministic.
        #[arg(long, env = "GRADUALHM_SEED")]
        seed: Option<u64>,
        /// Print a JSON object instead of text.
        #[arg(long)]
        json: bool,
        /// Print the program with inferred annotations.
        #[arg(long)]
        dump_types: bool,
        /// Print the cast calculus translation.
        #[arg(long)]
        dump_cast: bool,
    },
    /// Find a substitution under which FILE1 is less precise than FILE2.
    /// Exits 0 if one exists and 1 otherwise.
    Prec {
        file1: PathBuf,
        file2: PathBuf,
        /// Also print a derivation relating the two translations.
        #[arg(long)]
        derivation: bool,
    },
    /// Check a property on generated programs.
    Prop {
        property: Property,
        /// Number of programs.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        /// Arrow depth of the types substituted for type variables.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// First generator seed.
        #[arg(long, env = "GRADUALHM_SEED", default_value_t = 0)]
        seed: u64,
        /// Size budget of each generated program.
        #[arg(long, default_value_t = 20)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        max_vars: usize,
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn run_file(
    file: &Path,
    mode: Mode,
    max_steps: usize,
    trace: Option<TraceArg>,
    json: bool,
    dump_types: bool,
    dump_cast: bool,
) -> Result<u8> {
    let src = read(file)?;
    let (c, notes) = session::compile_src(&src)?;
    for n in &notes {
        let (line, col) = n.span.line_col(&src);
        eprintln!("note: {}:{line}:{col}: {}", file.display(), n.message);
    }
    if dump_types {
        println!("{}", session::show_types(&c));
    }
    if dump_cast {
        println!("{}", session::show_casts(&c));
    }
    let trace_mode = match trace {
        None => TraceMode::Off,
        Some(TraceArg::Rules) => TraceMode::Rules,
        Some(TraceArg::Full) => TraceMode::Full,
    };
    let r = session::run(&c, mode, RunOptions { max_steps, trace: trace_mode })?;
    if trace.is_some() {
        if r.trace_dropped > 0 {
            println!("... {} earlier steps not kept", r.trace_dropped);
        }
        for (k, e) in r.trace.iter().enumerate() {
            println!("{}", session::render_trace_entry(r.trace_dropped + k + 1, e));
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&session::result_json(&c, &r, &src))?);
    } else {
        println!("{}", session::render_result(&c, &r, &src));
    }
    Ok(session::exit_code(&r.outcome))
}

fn prec(file1: &Path, file2: &Path, derivation: bool) -> Result<u8> {
    let (c1, _) = session::compile_src(&read(file1)?)?;
    let (c2, _) = session::compile_src(&read(file2)?)?;
    let Some(s) = infer_term_prec_itgl(&c1.inference.term, &c2.inference.term) else {
        println!("unrelated");
        return Ok(1);
    };
    println!("{s}");
    if derivation {
        match infer_term_prec_dti(&[], &c1.translation.term, &c2.translation.term, &[]) {
            Some(w) => print!("translations related under {}\n{}", w.subst, w.derivation),
            None => println!("translations unrelated"),
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn prop(property: Property, seeds: usize, depth: usize, fuel: usize, seed: u64, size: usize, max_vars: usize, json: bool) -> u8 {
    let opts = SuiteOptions { seed, cases: seeds, vocab: SubstVocabulary::standard(depth), fuel, max_vars, size };
    let rep = run_suite(property, &opts);
    if json {
        println!("{}", rep.to_json());
    } else {
        println!(
            "{}: {} cases, {} failures, {} inconclusive, {} skipped",
            rep.property, rep.cases, rep.failures, rep.inconclusive, rep.skipped
        );
        for (k, v) in &rep.outcomes {
            println!("  {k}: {v}");
        }
        if let Some(cx) = &rep.counterexample {
            println!("counterexample (case {}): {}\n  under {}\n  {}", cx.case, cx.program, cx.subst, cx.detail);
        }
    }
    if rep.passed() {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own code 2 would read as blame
            return ExitCode::from(if e.use_stderr() { EXIT_STATIC } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Repl { mode, max_steps } => repl::main(mode.into(), max_steps).map(|()| 0),
        Command::Run { file, mode, max_steps, trace, seed: _, json, dump_types, dump_cast } => {
            run_file(&file, mode.into(), max_steps, trace, json, dump_types, dump_cast)
        }
        Command::Prec { file1, file2, derivation } => prec(&file1, &file2, derivation),
        Command::Prop { property, seeds, depth, fuel, seed, size, max_vars, json } => {
            Ok(prop(property, seeds, depth, fuel, seed, size, max_vars, json))
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_STATIC)
        }
    }
}
