//! Random well-typed surface programs.
//!
//! Generation is directed by a static goal type. Parameters are left
//! unannotated, annotated with a static type, or annotated with `?`;
//! subterms in positions that only need consistency are sometimes hidden
//! behind `(e : ?)`. Both make inference leave variables for the
//! evaluator to fill in. Candidates are kept only if inference accepts
//! them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::infer::infer_principal;
use crate::itgl::{Annotation, TermItgl};
use crate::syntax::{Const, Op};
use crate::types::GradualType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no well-typed program for seed {seed} after {attempts} attempts")]
pub struct GenError {
    pub seed: u64,
    pub attempts: usize,
}

const ATTEMPTS: usize = 100;

/// A closed program accepted by inference, built from `seed`.
pub fn generate_well_typed(seed: u64, size_budget: usize) -> Result<TermItgl, GenError> {
    Generator::new(seed).generate(size_budget)
}

#[derive(Clone, Debug)]
enum Binding {
    Mono(GradualType),
    /// `fun x -> x` bound by a let, usable at any `T -> T`.
    Identity,
}

pub struct Generator {
    rng: ChaCha8Rng,
    seed: u64,
    /// Probability of a `?` annotation or a `(e : ?)` injection.
    pub dyn_prob: f64,
    /// Whether to emit `if`.
    pub conditionals: bool,
    next_name: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), seed, dyn_prob: 0.3, conditionals: true, next_name: 0 }
    }

    pub fn generate(&mut self, size_budget: usize) -> Result<TermItgl, GenError> {
        for _ in 0..ATTEMPTS {
            self.next_name = 0;
            let goal = if size_budget == 0 || self.rng.gen_bool(0.85) { self.base() } else { self.small_type(1) };
            let e = self.term(&mut Vec::new(), &goal, size_budget, false);
            if infer_principal(&[], &e).is_ok() {
                return Ok(e);
            }
        }
        Err(GenError { seed: self.seed, attempts: ATTEMPTS })
    }

    fn base(&mut self) -> GradualType {
        if self.rng.gen_bool(0.6) {
            GradualType::INT
        } else {
            GradualType::BOOL
        }
    }

    fn small_type(&mut self, arrows: usize) -> GradualType {
        if arrows == 0 || self.rng.gen_bool(0.7) {
            self.base()
        } else {
            let a = self.small_type(arrows - 1);
            let b = self.small_type(arrows - 1);
            GradualType::arrow(a, b)
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next_name += 1;
        format!("{prefix}{}", self.next_name)
    }

    fn constant(&mut self, ty: &GradualType) -> Option<TermItgl> {
        match ty {
            GradualType::Base(crate::types::BaseType::Int) => Some(TermItgl::int(self.rng.gen_range(-3..10))),
            GradualType::Base(crate::types::BaseType::Bool) => Some(TermItgl::bool(self.rng.gen())),
            GradualType::Base(crate::types::BaseType::Unit) => Some(TermItgl::Const(Const::Unit)),
            _ => None,
        }
    }

    fn annotation(&mut self, dom: &GradualType) -> (Annotation, GradualType) {
        if self.rng.gen_bool(self.dyn_prob) {
            (Annotation::Explicit(GradualType::Dyn), GradualType::Dyn)
        } else if self.rng.gen_bool(0.5) {
            (Annotation::Omitted, dom.clone())
        } else {
            (Annotation::Explicit(dom.clone()), dom.clone())
        }
    }

    /// A term of type `ty`. With `loose`, the context only needs a type
    /// consistent with `ty`.
    fn term(&mut self, env: &mut Vec<(String, Binding)>, ty: &GradualType, budget: usize, loose: bool) -> TermItgl {
        if loose && budget > 0 && self.rng.gen_bool(self.dyn_prob) {
            let e = self.term(env, ty, budget - 1, false);
            return TermItgl::ascribe(e, GradualType::Dyn);
        }
        if budget == 0 {
            return self.leaf(env, ty);
        }
        let sub = budget - 1;
        match self.rng.gen_range(0..10) {
            0 => self.leaf(env, ty),
            1 | 2 => self.operator(env, ty, sub).unwrap_or_else(|| self.leaf(env, ty)),
            3..=5 => {
                let arg_ty = self.small_type(1);
                let fun_ty = GradualType::arrow(arg_ty.clone(), ty.clone());
                let f = self.function(env, &fun_ty, sub / 2);
                let a = self.term(env, &arg_ty, sub / 2, true);
                TermItgl::app(f, a)
            }
            6 if self.conditionals => {
                let c = self.term(env, &GradualType::BOOL, sub / 3, true);
                let t = self.term(env, ty, sub / 3, false);
                let e = self.term(env, ty, sub / 3, false);
                TermItgl::if_(c, t, e)
            }
            7 => self.let_in(env, ty, sub),
            8 if ty.is_static() => {
                let e = self.term(env, ty, sub, false);
                TermItgl::ascribe(TermItgl::ascribe(e, GradualType::Dyn), ty.clone())
            }
            _ => match ty {
                GradualType::Arrow(..) => self.function(env, ty, sub),
                _ => self.operator(env, ty, sub).unwrap_or_else(|| self.leaf(env, ty)),
            },
        }
    }

    fn operator(&mut self, env: &mut Vec<(String, Binding)>, ty: &GradualType, sub: usize) -> Option<TermItgl> {
        let op = match ty {
            GradualType::Base(crate::types::BaseType::Int) => [Op::Add, Op::Sub, Op::Mul][self.rng.gen_range(0..3)],
            GradualType::Base(crate::types::BaseType::Bool) => [Op::Eq, Op::Lt][self.rng.gen_range(0..2)],
            _ => return None,
        };
        let l = self.term(env, &GradualType::INT, sub / 2, true);
        let r = self.term(env, &GradualType::INT, sub / 2, true);
        Some(TermItgl::op(op, l, r))
    }

    fn function(&mut self, env: &mut Vec<(String, Binding)>, ty: &GradualType, budget: usize) -> TermItgl {
        let GradualType::Arrow(dom, cod) = ty else { return self.term(env, ty, budget, false) };
        if budget > 0 && self.rng.gen_bool(0.2) {
            return self.term(env, ty, budget, false);
        }
        let x = self.fresh("x");
        let (annot, seen) = self.annotation(dom);
        env.push((x.clone(), Binding::Mono(seen)));
        let body = self.term(env, cod, budget.saturating_sub(1), false);
        env.pop();
        TermItgl::Lam { param: x, annot, body: Box::new(body) }
    }

    fn let_in(&mut self, env: &mut Vec<(String, Binding)>, ty: &GradualType, sub: usize) -> TermItgl {
        let f = self.fresh("f");
        let (value, binding) = if self.rng.gen_bool(0.4) {
            let x = self.fresh("x");
            (TermItgl::lam(x.clone(), TermItgl::var(x)), Binding::Identity)
        } else {
            let vty = GradualType::arrow(self.small_type(0), self.small_type(1));
            let mut v = self.function(env, &vty, sub / 2);
            if !v.is_value() {
                v = self.function(env, &vty, 0);
            }
            let seen = match (&v, &vty) {
                (TermItgl::Lam { annot: Annotation::Explicit(GradualType::Dyn), .. }, GradualType::Arrow(_, c)) => {
                    GradualType::arrow(GradualType::Dyn, (**c).clone())
                }
                _ => vty,
            };
            (v, Binding::Mono(seen))
        };
        env.push((f.clone(), binding));
        let body = self.term(env, ty, sub / 2, false);
        env.pop();
        TermItgl::let_in(f, value, body)
    }

    fn leaf(&mut self, env: &mut Vec<(String, Binding)>, ty: &GradualType) -> TermItgl {
        let mut candidates: Vec<TermItgl> = Vec::new();
        for (x, b) in env.iter() {
            match b {
                Binding::Mono(t) if t == ty => candidates.push(TermItgl::var(x)),
                Binding::Mono(GradualType::Dyn) => candidates.push(TermItgl::ascribe(TermItgl::var(x), ty.clone())),
                Binding::Identity => match ty {
                    GradualType::Arrow(a, b) if a == b => candidates.push(TermItgl::var(x)),
                    GradualType::Base(_) => {
                        if let Some(c) = self.constant(ty) {
                            candidates.push(TermItgl::app(TermItgl::var(x), c));
                        }
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        if !candidates.is_empty() && self.rng.gen_bool(0.6) {
            let k = self.rng.gen_range(0..candidates.len());
            return candidates.swap_remove(k);
        }
        match self.constant(ty) {
            Some(c) => c,
            None => self.function(env, ty, 0),
        }
    }
}

/// A less precisely annotated variant of `e`: annotations are dropped or
/// replaced by `?`, each with probability `p`.
///
/// Branches of conditionals are left alone. Their types must be equal,
/// so making one branch less precise can make a well-typed program
/// ill-typed, and the gradual guarantee says nothing about them.
pub fn weaken(e: &TermItgl, seed: u64, p: f64) -> TermItgl {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    weaken_with(e, &mut rng, p)
}

fn weaken_type(t: &GradualType, rng: &mut ChaCha8Rng, p: f64) -> GradualType {
    if rng.gen_bool(p) {
        return GradualType::Dyn;
    }
    match t {
        GradualType::Arrow(a, b) => GradualType::arrow(weaken_type(a, rng, p), weaken_type(b, rng, p)),
        t => t.clone(),
    }
}

fn weaken_annot(a: &Annotation, rng: &mut ChaCha8Rng, p: f64) -> Annotation {
    match a {
        Annotation::Omitted | Annotation::Inferred(_) => {
            if rng.gen_bool(p) {
                Annotation::Explicit(GradualType::Dyn)
            } else {
                Annotation::Omitted
            }
        }
        Annotation::Explicit(t) if t.is_static() && rng.gen_bool(p / 2.0) => Annotation::Omitted,
        Annotation::Explicit(t) => Annotation::Explicit(weaken_type(t, rng, p)),
    }
}

fn weaken_with(e: &TermItgl, rng: &mut ChaCha8Rng, p: f64) -> TermItgl {
    use TermItgl as E;
    let mut w = |t: &TermItgl| Box::new(weaken_with(t, rng, p));
    match e {
        E::Var { .. } | E::Const(_) => e.clone(),
        E::Op { op, lhs, rhs, span } => E::Op { op: *op, lhs: w(lhs), rhs: w(rhs), span: *span },
        E::Lam { param, annot, body } => {
            let annot = weaken_annot(annot, rng, p);
            E::Lam { param: param.clone(), annot, body: Box::new(weaken_with(body, rng, p)) }
        }
        E::App { fun, arg, span } => E::App { fun: w(fun), arg: w(arg), span: *span },
        E::Let { name, binders, value, body } => {
            E::Let { name: name.clone(), binders: binders.clone(), value: w(value), body: w(body) }
        }
        E::If { cond, then_branch, else_branch, span } => {
            E::If { cond: w(cond), then_branch: then_branch.clone(), else_branch: else_branch.clone(), span: *span }
        }
        E::Ascribe { term, ty, span } => {
            let term = w(term);
            E::Ascribe { term, ty: weaken_type(ty, rng, p), span: *span }
        }
        E::Fix { name, param, annot, ret, body, span } => {
            let annot = weaken_annot(annot, rng, p);
            E::Fix {
                name: name.clone(),
                param: param.clone(),
                annot,
                ret: ret.clone(),
                body: Box::new(weaken_with(body, rng, p)),
                span: *span,
            }
        }
    }
}
