//! Turning source files and REPL input into closed programs, and showing
//! what running them produced.

use std::collections::BTreeSet;

use anyhow::{anyhow, Result};
use serde_json::json;

use gradualhm::eval::{EvalResult, Evaluator, Mode, Outcome, RunOptions, TraceEntry};
use gradualhm::frontend::{parse_program, print_dti, print_itgl, Note, PrintOptions, Program};
use gradualhm::pipeline::{compile_term, Compiled};
use gradualhm::{BlameLabel, GradualType, Polarity, TermItgl, TyVar, TypeSubstitution};

/// A parsed program closed into a single term.
pub struct Closed {
    pub term: TermItgl,
    pub notes: Vec<Note>,
}

/// Wraps the declarations of `prog` around its body as nested lets. A
/// program without a body evaluates to its last declaration.
pub fn close(prog: Program, mut notes: Vec<Note>) -> Result<Closed> {
    let mut body = match (prog.body, prog.decls.last()) {
        (Some(b), _) => b,
        (None, Some(last)) => TermItgl::var(last.name.clone()),
        (None, None) => return Err(anyhow!("empty program")),
    };
    for d in prog.decls.into_iter().rev() {
        body = if d.rhs.is_value() {
            TermItgl::let_in(d.name, d.rhs, body)
        } else {
            // recursive functions are monomorphic anyway
            if !matches!(d.rhs, TermItgl::Fix { .. }) {
                notes.push(Note {
                    span: d.span,
                    message: format!("`let {}` binds a non-value; treated as an application and not generalized", d.name),
                });
            }
            TermItgl::App { fun: Box::new(TermItgl::lam(d.name, body)), arg: Box::new(d.rhs), span: d.span }
        };
    }
    Ok(Closed { term: body, notes })
}

pub fn parse_closed(src: &str) -> Result<Closed> {
    let (prog, notes) = parse_program(src).map_err(|e| anyhow!("parse error at {e}"))?;
    close(prog, notes)
}

pub fn compile_src(src: &str) -> Result<(Compiled, Vec<Note>)> {
    let closed = parse_closed(src)?;
    // the pipeline errors already include their cause in the message
    let c = compile_term(&closed.term).map_err(|e| anyhow!("{e}"))?;
    Ok((c, closed.notes))
}

pub fn run(c: &Compiled, mode: Mode, opts: RunOptions) -> Result<EvalResult> {
    Evaluator::new(mode).run(&c.translation.term, opts).map_err(|e| anyhow!("evaluation failed: {e}"))
}

/// Bindings the run made for the type variables inference left open.
pub fn residual_bindings(c: &Compiled, r: &EvalResult) -> TypeSubstitution {
    let mut vars: BTreeSet<TyVar> = c.translation.term.ftv();
    vars.extend(c.translation.ty.ftv());
    let mut s = TypeSubstitution::empty();
    for x in vars {
        let t = r.subst.apply(&GradualType::Var(x.clone()));
        if t != GradualType::Var(x.clone()) {
            s.insert(x, t);
        }
    }
    s
}

pub fn render_blame(l: &BlameLabel, src: &str) -> String {
    let p = match l.polarity {
        Polarity::Positive => '+',
        Polarity::Negative => '-',
    };
    let at = match l.span {
        Some(sp) if src.is_char_boundary(sp.start.min(src.len())) => {
            let (line, col) = sp.line_col(src);
            format!(" at {line}:{col}")
        }
        _ => String::new(),
    };
    format!("blame {}{at} (polarity {p})", l.id)
}

pub fn render_trace_entry(k: usize, e: &TraceEntry) -> String {
    let mut line = format!("{k}: {}", e.rule);
    if !e.subst.is_empty() {
        line.push_str(&format!(" {}", e.subst));
    }
    if let Some(t) = &e.term {
        line.push(' ');
        line.push_str(&print_dti(t, PrintOptions::default()));
    }
    line
}

/// The text shown for a finished run: `- : U = w`, a blame message or a
/// timeout notice, followed by the residual bindings.
pub fn render_result(c: &Compiled, r: &EvalResult, src: &str) -> String {
    let s = residual_bindings(c, r);
    let ty = r.subst.apply(&c.translation.ty);
    let mut out = match &r.outcome {
        Outcome::Value(w) => format!("- : {ty} = {}", print_dti(w, PrintOptions::display())),
        Outcome::Blame(l) => render_blame(l, src),
        Outcome::Timeout => format!("timeout after {} steps", r.steps),
    };
    if !s.is_empty() {
        out.push_str(&format!("\nwhere {}", bindings(&s)));
    }
    out
}

fn bindings(s: &TypeSubstitution) -> String {
    s.iter().map(|(x, t)| format!("{x} := {t}")).collect::<Vec<_>>().join(", ")
}

pub fn result_json(c: &Compiled, r: &EvalResult, src: &str) -> serde_json::Value {
    let ty = r.subst.apply(&c.translation.ty);
    let (outcome, value, blame) = match &r.outcome {
        Outcome::Value(w) => ("value", Some(print_dti(w, PrintOptions::display())), None),
        Outcome::Blame(l) => ("blame", None, Some(json!({ "label": l.to_string(), "message": render_blame(l, src) }))),
        Outcome::Timeout => ("timeout", None, None),
    };
    let subst: serde_json::Map<String, serde_json::Value> =
        residual_bindings(c, r).iter().map(|(x, t)| (x.to_string(), json!(t.to_string()))).collect();
    json!({
        "type": ty.to_string(),
        "outcome": outcome,
        "value": value,
        "blame": blame,
        "subst": subst,
        "steps": r.steps,
    })
}

pub fn exit_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Value(_) => 0,
        Outcome::Blame(_) => 2,
        Outcome::Timeout => 3,
    }
}

pub fn show_types(c: &Compiled) -> String {
    format!("{}\n: {}", print_itgl(&c.inference.term, PrintOptions::default()), c.inference.ty)
}

pub fn show_casts(c: &Compiled) -> String {
    format!("{}\n: {}", print_dti(&c.translation.term, PrintOptions::default()), c.translation.ty)
}
