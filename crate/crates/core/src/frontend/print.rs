use std::fmt::Write;

use crate::dti::{TermDti, TypeArg};
use crate::itgl::{Annotation, TermItgl};
use crate::syntax::Op;
use crate::types::GradualType;

/// Printer settings.
#[derive(Clone, Copy, Debug)]
pub struct PrintOptions {
    /// Print blame labels on casts. Without them the output is for
    /// people, not for the parser.
    pub labels: bool,
    /// Print annotations filled in by inference.
    pub inferred: bool,
}

impl Default for PrintOptions {
    fn default() -> Self {
        PrintOptions { labels: true, inferred: true }
    }
}

impl PrintOptions {
    pub fn display() -> Self {
        PrintOptions { labels: false, inferred: true }
    }
}

const TOP: u8 = 0;
const APP: u8 = 4;
const ATOM: u8 = 5;

fn op_sides(op: Op) -> (u8, u8, u8) {
    let l = op.level();
    match op {
        Op::Eq | Op::Lt => (l, l + 1, l + 1),
        _ => (l, l, l + 1),
    }
}

pub fn print_itgl(t: &TermItgl, opts: PrintOptions) -> String {
    let mut out = String::new();
    itgl(&mut out, t, TOP, opts);
    out
}

fn itgl_level(t: &TermItgl) -> u8 {
    match t {
        TermItgl::Var { .. } | TermItgl::Const(_) | TermItgl::Ascribe { .. } => ATOM,
        TermItgl::App { .. } => APP,
        TermItgl::Op { op, .. } => op.level(),
        _ => TOP,
    }
}

fn param(out: &mut String, x: &str, annot: &Annotation, opts: PrintOptions) {
    match annot {
        Annotation::Explicit(t) => write!(out, "({x} : {t})").unwrap(),
        Annotation::Inferred(t) if opts.inferred => write!(out, "({x} : {t})").unwrap(),
        _ => out.push_str(x),
    }
}

fn itgl(out: &mut String, t: &TermItgl, ctx: u8, opts: PrintOptions) {
    let paren = itgl_level(t) < ctx;
    if paren {
        out.push('(');
    }
    match t {
        TermItgl::Var { name, .. } => out.push_str(name),
        TermItgl::Const(c) => write!(out, "{c}").unwrap(),
        TermItgl::Op { op, lhs, rhs, .. } => {
            let (_, l, r) = op_sides(*op);
            itgl(out, lhs, l, opts);
            write!(out, " {} ", op.symbol()).unwrap();
            itgl(out, rhs, r, opts);
        }
        TermItgl::Lam { param: x, annot, body } => {
            out.push_str("fun ");
            param(out, x, annot, opts);
            out.push_str(" -> ");
            itgl(out, body, TOP, opts);
        }
        TermItgl::App { fun, arg, .. } => {
            itgl(out, fun, APP, opts);
            out.push(' ');
            itgl(out, arg, ATOM, opts);
        }
        TermItgl::Let { name, value, body, .. } => {
            write!(out, "let {name} = ").unwrap();
            itgl(out, value, TOP, opts);
            out.push_str(" in ");
            itgl(out, body, TOP, opts);
        }
        TermItgl::If { cond, then_branch, else_branch, .. } => {
            out.push_str("if ");
            itgl(out, cond, TOP, opts);
            out.push_str(" then ");
            itgl(out, then_branch, TOP, opts);
            out.push_str(" else ");
            itgl(out, else_branch, TOP, opts);
        }
        TermItgl::Ascribe { term, ty, .. } => {
            out.push('(');
            itgl(out, term, TOP, opts);
            write!(out, " : {ty})").unwrap();
        }
        TermItgl::Fix { name, param: x, annot, body, .. } => {
            write!(out, "fix {name} ").unwrap();
            param(out, x, annot, opts);
            out.push_str(" -> ");
            itgl(out, body, TOP, opts);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_dti(t: &TermDti, opts: PrintOptions) -> String {
    let mut out = String::new();
    dti(&mut out, t, TOP, opts);
    out
}

fn dti_level(t: &TermDti) -> u8 {
    match t {
        TermDti::Var { .. } | TermDti::Const(_) | TermDti::Blame(_) => ATOM,
        TermDti::App { .. } => APP,
        TermDti::Op { op, .. } => op.level(),
        _ => TOP,
    }
}

fn type_args(out: &mut String, args: &[TypeArg]) {
    if args.is_empty() {
        return;
    }
    out.push('[');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match a {
            TypeArg::Ty(t) => write!(out, "{t}").unwrap(),
            TypeArg::Nu => out.push_str("nu"),
        }
    }
    out.push(']');
}

fn cast_chain(out: &mut String, t: &TermDti, opts: PrintOptions) {
    let TermDti::Cast { term, from, to, label } = t else { unreachable!() };
    match &**term {
        TermDti::Cast { to: inner_to, .. } if inner_to == from => cast_chain(out, term, opts),
        _ => {
            dti(out, term, 1, opts);
            write!(out, " : {from}").unwrap();
        }
    }
    if opts.labels {
        write!(out, " =>[{label}] {to}").unwrap();
    } else {
        write!(out, " => {to}").unwrap();
    }
}

fn dti(out: &mut String, t: &TermDti, ctx: u8, opts: PrintOptions) {
    let paren = dti_level(t) < ctx;
    if paren {
        out.push('(');
    }
    match t {
        TermDti::Var { name, args } => {
            out.push_str(name);
            type_args(out, args);
        }
        TermDti::Const(c) => write!(out, "{c}").unwrap(),
        TermDti::Blame(l) => write!(out, "blame {l}").unwrap(),
        TermDti::Op { op, lhs, rhs } => {
            let (_, l, r) = op_sides(*op);
            dti(out, lhs, l, opts);
            write!(out, " {} ", op.symbol()).unwrap();
            dti(out, rhs, r, opts);
        }
        TermDti::Lam { param, ty, body } => {
            write!(out, "fun ({param} : {ty}) -> ").unwrap();
            dti(out, body, TOP, opts);
        }
        TermDti::App { fun, arg } => {
            dti(out, fun, APP, opts);
            out.push(' ');
            dti(out, arg, ATOM, opts);
        }
        TermDti::Cast { .. } => cast_chain(out, t, opts),
        TermDti::Let { name, binders, value, body } => {
            write!(out, "let {name} = ").unwrap();
            if !binders.is_empty() {
                out.push_str("/\\");
                for b in binders {
                    write!(out, " {b}").unwrap();
                }
                out.push_str(". ");
            }
            dti(out, value, TOP, opts);
            out.push_str(" in ");
            dti(out, body, TOP, opts);
        }
        TermDti::If { cond, then_branch, else_branch } => {
            out.push_str("if ");
            dti(out, cond, TOP, opts);
            out.push_str(" then ");
            dti(out, then_branch, TOP, opts);
            out.push_str(" else ");
            dti(out, else_branch, TOP, opts);
        }
        TermDti::Fix { name, param, param_ty, ret_ty, body } => {
            write!(out, "fix {name} ({param} : {param_ty}) : {ret_ty} = ").unwrap();
            dti(out, body, TOP, opts);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_type(t: &GradualType) -> String {
    t.to_string()
}
