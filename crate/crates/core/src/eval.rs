//! Small-step evaluation of the cast calculus.
//!
//! Each step finds the redex in evaluation position, contracts it and, if
//! the rule produced a type substitution, applies that substitution to the
//! whole resulting term. Steps in baseline mode never instantiate type
//! variables, which makes them the ordinary blame calculus.

use std::cell::OnceCell;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dti::{TermDti, TypeArg};
use crate::fresh::NameSupply;
use crate::subst::TypeSubstitution;
use crate::syntax::{BlameLabel, Op};
use crate::types::{ground_of, GradualType, GroundType, TyVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum Mode {
    /// Dynamic type inference: casts from `?` to a type variable
    /// instantiate the variable.
    #[default]
    Dti,
    /// The blame calculus without type variables.
    Baseline,
}

/// Reduction and evaluation rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Op,
    Beta,
    IdBase,
    IdStar,
    Succeed,
    Fail,
    AppCast,
    Ground,
    Expand,
    InstBase,
    InstArrow,
    LetP,
    IfTrue,
    IfFalse,
    Fix,
    Abort,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Op => "R_Op",
            Rule::Beta => "R_Beta",
            Rule::IdBase => "R_IdBase",
            Rule::IdStar => "R_IdStar",
            Rule::Succeed => "R_Succeed",
            Rule::Fail => "R_Fail",
            Rule::AppCast => "R_AppCast",
            Rule::Ground => "R_Ground",
            Rule::Expand => "R_Expand",
            Rule::InstBase => "R_InstBase",
            Rule::InstArrow => "R_InstArrow",
            Rule::LetP => "R_LetP",
            Rule::IfTrue => "R_IfTrue",
            Rule::IfFalse => "R_IfFalse",
            Rule::Fix => "R_Fix",
            Rule::Abort => "E_Abort",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StuckError {
    #[error("free variable `{0}`")]
    FreeVariable(String),
    #[error("`{name}` applied to {found} types, expected {expected}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("stuck term: {0}")]
    Stuck(String),
    #[error("baseline evaluation needs a term without type variables or nu, found {0}")]
    BaselinePrecondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Stepped { next: TermDti, subst: TypeSubstitution, rule: Rule },
    IsValue,
    /// The term is `blame l`.
    Aborted(BlameLabel),
}

enum Red {
    Value,
    Blame(BlameLabel),
    Step(TermDti, TypeSubstitution, Rule),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraceMode {
    Off,
    /// Keep the rule and substitution of the last steps.
    #[default]
    Rules,
    /// Keep every step, including the intermediate terms.
    Full,
}

/// How many steps a `Rules` trace keeps.
pub const TRACE_WINDOW: usize = 1000;

/// Diverging terms can build values thousands of casts deep, and every
/// traversal of a term recurses, so evaluation runs on a stack of this size.
const STACK_SIZE: usize = 512 << 20;
const STACK_RED_ZONE: usize = 64 << 20;

/// Default step budget.
pub const DEFAULT_MAX_STEPS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub rule: Rule,
    pub subst: TypeSubstitution,
    pub term: Option<TermDti>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(TermDti),
    Blame(BlameLabel),
    Timeout,
}

impl Outcome {
    pub fn is_value(&self) -> bool {
        matches!(self, Outcome::Value(_))
    }

    pub fn is_blame(&self) -> bool {
        matches!(self, Outcome::Blame(_))
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self, Outcome::Timeout)
    }
}

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub outcome: Outcome,
    /// Composition of every substitution produced, latest outermost.
    pub subst: TypeSubstitution,
    pub steps: usize,
    pub trace: VecDeque<TraceEntry>,
    /// Trace entries dropped from the front of a bounded trace.
    pub trace_dropped: usize,
}

impl EvalResult {
    pub fn rules(&self) -> Vec<Rule> {
        self.trace.iter().map(|e| e.rule).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub max_steps: usize,
    pub trace: TraceMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_steps: DEFAULT_MAX_STEPS, trace: TraceMode::Rules }
    }
}

impl RunOptions {
    pub fn fuel(max_steps: usize) -> Self {
        RunOptions { max_steps, ..Self::default() }
    }
}

/// A stepper with its own supply of run-time type variables `'r0`, `'r1`, ...
#[derive(Clone, Debug)]
pub struct Evaluator {
    mode: Mode,
    names: NameSupply,
}

impl Evaluator {
    pub fn new(mode: Mode) -> Self {
        Evaluator { mode, names: NameSupply::new("r") }
    }

    /// Starts the counter at `k`.
    pub fn with_counter(mode: Mode, k: usize) -> Self {
        Evaluator { mode, names: NameSupply::starting_at("r", k) }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Makes sure fresh names do not clash with any name in `f`.
    pub fn avoid_names_in(&mut self, f: &TermDti) {
        self.names.avoid_all(&f.all_tyvars());
        self.names.skip_past_used();
    }

    pub fn next_counter(&self) -> usize {
        self.names.next_index()
    }

    pub fn check_precondition(&self, f: &TermDti) -> Result<(), StuckError> {
        if self.mode == Mode::Baseline {
            if let Some(x) = f.ftv_ordered().first() {
                return Err(StuckError::BaselinePrecondition(format!("type variable {x}")));
            }
            if f.has_nu() {
                return Err(StuckError::BaselinePrecondition("nu".to_string()));
            }
        }
        Ok(())
    }

    /// One step of evaluation.
    pub fn step(&mut self, f: &TermDti) -> Result<StepResult, StuckError> {
        match self.reduce(f)? {
            Red::Value => Ok(StepResult::IsValue),
            Red::Blame(l) if f.is_blame() => Ok(StepResult::Aborted(l)),
            Red::Blame(l) => {
                Ok(StepResult::Stepped { next: TermDti::Blame(l), subst: TypeSubstitution::empty(), rule: Rule::Abort })
            }
            Red::Step(next, subst, rule) => {
                let next = if subst.is_empty() { next } else { next.apply_subst(&subst) };
                Ok(StepResult::Stepped { next, subst, rule })
            }
        }
    }

    /// Runs until a value, blame, or the step budget runs out.
    ///
    /// Keeps the evaluation context as a stack instead of re-decomposing
    /// the whole term at every step. With a full trace the whole term is
    /// needed anyway, so that mode goes through [`Evaluator::run_by_steps`].
    pub fn run(&mut self, f: &TermDti, opts: RunOptions) -> Result<EvalResult, StuckError> {
        if opts.trace == TraceMode::Full {
            return self.run_by_steps(f, opts);
        }
        stacker::maybe_grow(STACK_RED_ZONE, STACK_SIZE, || self.run_machine(f, opts))
    }

    fn run_machine(&mut self, f: &TermDti, opts: RunOptions) -> Result<EvalResult, StuckError> {
        self.check_precondition(f)?;
        self.avoid_names_in(f);
        let mut stack: Vec<Frame> = Vec::new();
        let mut focus = Focus::Eval(f.clone());
        let mut acc = TypeSubstitution::empty();
        let mut trace = VecDeque::new();
        let mut dropped = 0;
        let mut steps = 0;
        let none = TypeSubstitution::empty;
        loop {
            let (next, subst, rule) = match focus {
                Focus::Eval(t) => match t {
                    TermDti::Const(_) | TermDti::Lam { .. } | TermDti::Fix { .. } => {
                        focus = Focus::Ret(t);
                        continue;
                    }
                    TermDti::Blame(l) => {
                        if stack.is_empty() {
                            let outcome = Outcome::Blame(l);
                            return Ok(EvalResult { outcome, subst: acc, steps, trace, trace_dropped: dropped });
                        }
                        stack.clear();
                        (Focus::Eval(TermDti::Blame(l)), none(), Rule::Abort)
                    }
                    TermDti::Var { name, .. } => return Err(StuckError::FreeVariable(name)),
                    TermDti::Op { op, lhs, rhs } => {
                        stack.push(Frame::OpL(op, *rhs));
                        focus = Focus::Eval(*lhs);
                        continue;
                    }
                    TermDti::App { fun, arg } => {
                        stack.push(Frame::AppL(*arg));
                        focus = Focus::Eval(*fun);
                        continue;
                    }
                    TermDti::Cast { term, from, to, label } => {
                        stack.push(Frame::Cast(from, to, label));
                        focus = Focus::Eval(*term);
                        continue;
                    }
                    TermDti::If { cond, then_branch, else_branch } => {
                        stack.push(Frame::If(*then_branch, *else_branch));
                        focus = Focus::Eval(*cond);
                        continue;
                    }
                    TermDti::Let { name, binders, value, body } => {
                        if !value.is_value() {
                            return Err(stuck(&plug_all(&stack, TermDti::Let { name, binders, value, body })));
                        }
                        let next = subst_poly(&body, &name, &binders, &value, &mut self.names)?;
                        (Focus::Eval(next), none(), Rule::LetP)
                    }
                },
                Focus::Ret(v) => match stack.pop() {
                    None => {
                        let outcome = Outcome::Value(v);
                        return Ok(EvalResult { outcome, subst: acc, steps, trace, trace_dropped: dropped });
                    }
                    Some(Frame::OpL(op, rhs)) => {
                        stack.push(Frame::OpR(op, v));
                        focus = Focus::Eval(rhs);
                        continue;
                    }
                    Some(Frame::OpR(op, lhs)) => match (&lhs, &v) {
                        (TermDti::Const(a), TermDti::Const(b)) if op.apply(*a, *b).is_some() => {
                            let c = op.apply(*a, *b).expect("checked");
                            (Focus::Ret(TermDti::Const(c)), none(), Rule::Op)
                        }
                        _ => return Err(stuck(&plug_all(&stack, TermDti::op(op, lhs, v)))),
                    },
                    Some(Frame::AppL(arg)) => {
                        stack.push(Frame::AppR(v));
                        focus = Focus::Eval(arg);
                        continue;
                    }
                    Some(Frame::AppR(fun)) => {
                        let whole = || plug_all(&stack, TermDti::app(fun.clone(), v.clone()));
                        let red = self.apply(&whole, &fun, &v)?;
                        refocus(red, &mut stack)
                    }
                    Some(Frame::Cast(from, to, label)) => {
                        let wrapped = matches!(from, GradualType::Arrow(..)) && matches!(to, GradualType::Arrow(..));
                        if wrapped || (from.is_ground() && to.is_dyn()) {
                            focus = Focus::Ret(TermDti::cast(v, from, to, label));
                            continue;
                        }
                        let whole = || plug_all(&stack, TermDti::cast(v.clone(), from.clone(), to.clone(), label));
                        let red = self.cast(&whole, &v, &from, &to, label)?;
                        refocus(red, &mut stack)
                    }
                    Some(Frame::If(then_branch, else_branch)) => match v {
                        TermDti::Const(crate::syntax::Const::Bool(true)) => (Focus::Eval(then_branch), none(), Rule::IfTrue),
                        TermDti::Const(crate::syntax::Const::Bool(false)) => {
                            (Focus::Eval(else_branch), none(), Rule::IfFalse)
                        }
                        v => return Err(stuck(&plug_all(&stack, TermDti::if_(v, then_branch, else_branch)))),
                    },
                },
            };
            if steps >= opts.max_steps {
                return Ok(EvalResult { outcome: Outcome::Timeout, subst: acc, steps, trace, trace_dropped: dropped });
            }
            steps += 1;
            focus = next;
            if !subst.is_empty() {
                focus = match focus {
                    Focus::Eval(t) => Focus::Eval(t.apply_subst(&subst)),
                    Focus::Ret(t) => Focus::Ret(t.apply_subst(&subst)),
                };
                for frame in &mut stack {
                    frame.apply_subst(&subst);
                }
                acc = subst.compose(&acc);
            }
            if opts.trace == TraceMode::Rules {
                if trace.len() == TRACE_WINDOW {
                    trace.pop_front();
                    dropped += 1;
                }
                trace.push_back(TraceEntry { rule, subst, term: None });
            }
        }
    }

    /// Runs by iterating [`Evaluator::step`] on the whole term. Slower than
    /// [`Evaluator::run`] but a direct reading of the reduction relation.
    pub fn run_by_steps(&mut self, f: &TermDti, opts: RunOptions) -> Result<EvalResult, StuckError> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_SIZE, || self.run_steps(f, opts))
    }

    fn run_steps(&mut self, f: &TermDti, opts: RunOptions) -> Result<EvalResult, StuckError> {
        self.check_precondition(f)?;
        self.avoid_names_in(f);
        let mut cur = f.clone();
        let mut acc = TypeSubstitution::empty();
        let mut trace = VecDeque::new();
        let mut dropped = 0;
        let mut steps = 0;
        loop {
            match self.step(&cur)? {
                StepResult::IsValue => {
                    return Ok(EvalResult { outcome: Outcome::Value(cur), subst: acc, steps, trace, trace_dropped: dropped })
                }
                StepResult::Aborted(l) => {
                    return Ok(EvalResult { outcome: Outcome::Blame(l), subst: acc, steps, trace, trace_dropped: dropped })
                }
                StepResult::Stepped { next, subst, rule } => {
                    if steps >= opts.max_steps {
                        return Ok(EvalResult { outcome: Outcome::Timeout, subst: acc, steps, trace, trace_dropped: dropped });
                    }
                    steps += 1;
                    if !subst.is_empty() {
                        acc = subst.compose(&acc);
                    }
                    match opts.trace {
                        TraceMode::Off => {}
                        TraceMode::Rules => {
                            if trace.len() == TRACE_WINDOW {
                                trace.pop_front();
                                dropped += 1;
                            }
                            trace.push_back(TraceEntry { rule, subst, term: None });
                        }
                        TraceMode::Full => trace.push_back(TraceEntry { rule, subst, term: Some(next.clone()) }),
                    }
                    cur = next;
                }
            }
        }
    }

    fn reduce(&mut self, f: &TermDti) -> Result<Red, StuckError> {
        match f {
            TermDti::Const(_) | TermDti::Lam { .. } | TermDti::Fix { .. } => Ok(Red::Value),
            TermDti::Blame(l) => Ok(Red::Blame(*l)),
            TermDti::Var { name, .. } => Err(StuckError::FreeVariable(name.clone())),
            TermDti::Op { op, lhs, rhs } => {
                match self.reduce(lhs)? {
                    Red::Value => {}
                    Red::Blame(l) => return Ok(Red::Blame(l)),
                    Red::Step(l2, s, r) => return Ok(Red::Step(TermDti::Op { op: *op, lhs: Box::new(l2), rhs: rhs.clone() }, s, r)),
                }
                match self.reduce(rhs)? {
                    Red::Value => {}
                    Red::Blame(l) => return Ok(Red::Blame(l)),
                    Red::Step(r2, s, r) => return Ok(Red::Step(TermDti::Op { op: *op, lhs: lhs.clone(), rhs: Box::new(r2) }, s, r)),
                }
                match (&**lhs, &**rhs) {
                    (TermDti::Const(a), TermDti::Const(b)) => match op.apply(*a, *b) {
                        Some(c) => Ok(Red::Step(TermDti::Const(c), TypeSubstitution::empty(), Rule::Op)),
                        None => Err(stuck(f)),
                    },
                    _ => Err(stuck(f)),
                }
            }
            TermDti::App { fun, arg } => {
                match self.reduce(fun)? {
                    Red::Value => {}
                    Red::Blame(l) => return Ok(Red::Blame(l)),
                    Red::Step(f2, s, r) => return Ok(Red::Step(TermDti::App { fun: Box::new(f2), arg: arg.clone() }, s, r)),
                }
                match self.reduce(arg)? {
                    Red::Value => {}
                    Red::Blame(l) => return Ok(Red::Blame(l)),
                    Red::Step(a2, s, r) => return Ok(Red::Step(TermDti::App { fun: fun.clone(), arg: Box::new(a2) }, s, r)),
                }
                self.apply(&|| f.clone(), fun, arg)
            }
            TermDti::Cast { term, from, to, label } => {
                match self.reduce(term)? {
                    Red::Value => {}
                    Red::Blame(l) => return Ok(Red::Blame(l)),
                    Red::Step(t2, s, r) => {
                        return Ok(Red::Step(
                            TermDti::Cast { term: Box::new(t2), from: from.clone(), to: to.clone(), label: *label },
                            s,
                            r,
                        ))
                    }
                }
                // the operand is a value, so only the shape of this cast matters
                let wrapped = matches!(from, GradualType::Arrow(..)) && matches!(to, GradualType::Arrow(..));
                if wrapped || (from.is_ground() && to.is_dyn()) {
                    return Ok(Red::Value);
                }
                self.cast(&|| f.clone(), term, from, to, *label)
            }
            TermDti::Let { name, binders, value, body } => {
                if !value.is_value() {
                    return Err(stuck(f));
                }
                let next = subst_poly(body, name, binders, value, &mut self.names)?;
                Ok(Red::Step(next, TypeSubstitution::empty(), Rule::LetP))
            }
            TermDti::If { cond, then_branch, else_branch } => match self.reduce(cond)? {
                Red::Value => match &**cond {
                    TermDti::Const(crate::syntax::Const::Bool(true)) => {
                        Ok(Red::Step((**then_branch).clone(), TypeSubstitution::empty(), Rule::IfTrue))
                    }
                    TermDti::Const(crate::syntax::Const::Bool(false)) => {
                        Ok(Red::Step((**else_branch).clone(), TypeSubstitution::empty(), Rule::IfFalse))
                    }
                    _ => Err(stuck(f)),
                },
                Red::Blame(l) => Ok(Red::Blame(l)),
                Red::Step(c2, s, r) => Ok(Red::Step(
                    TermDti::If { cond: Box::new(c2), then_branch: then_branch.clone(), else_branch: else_branch.clone() },
                    s,
                    r,
                )),
            },
        }
    }

    fn apply(&mut self, f: &dyn Fn() -> TermDti, fun: &TermDti, arg: &TermDti) -> Result<Red, StuckError> {
        let none = TypeSubstitution::empty;
        match fun {
            TermDti::Lam { param, body, .. } => Ok(Red::Step(subst_poly(body, param, &[], arg, &mut self.names)?, none(), Rule::Beta)),
            TermDti::Fix { name, param, body, .. } => {
                let b = if name == param {
                    subst_poly(body, param, &[], arg, &mut self.names)?
                } else {
                    let b = subst_poly(body, name, &[], fun, &mut self.names)?;
                    subst_poly(&b, param, &[], arg, &mut self.names)?
                };
                Ok(Red::Step(b, none(), Rule::Fix))
            }
            TermDti::Cast { term: w, from: GradualType::Arrow(d1, c1), to: GradualType::Arrow(d2, c2), label } => {
                let inner_arg = TermDti::cast(arg.clone(), (**d2).clone(), (**d1).clone(), label.negate());
                let next = TermDti::cast(TermDti::app((**w).clone(), inner_arg), (**c1).clone(), (**c2).clone(), *label);
                Ok(Red::Step(next, none(), Rule::AppCast))
            }
            _ => Err(stuck(&f())),
        }
    }

    fn cast(
        &mut self,
        f: &dyn Fn() -> TermDti,
        w: &TermDti,
        from: &GradualType,
        to: &GradualType,
        label: BlameLabel,
    ) -> Result<Red, StuckError> {
        let none = TypeSubstitution::empty;
        match (from, to) {
            (GradualType::Base(a), GradualType::Base(b)) if a == b => Ok(Red::Step(w.clone(), none(), Rule::IdBase)),
            (GradualType::Dyn, GradualType::Dyn) => Ok(Red::Step(w.clone(), none(), Rule::IdStar)),
            (GradualType::Dyn, target) => {
                let TermDti::Cast { term: inner, from: g1, to: GradualType::Dyn, .. } = w else {
                    return Err(stuck(&f()));
                };
                let Some(g1) = g1.as_ground() else {
                    return Err(stuck(&f()));
                };
                if let Some(g2) = target.as_ground() {
                    return if g1 == g2 {
                        Ok(Red::Step((**inner).clone(), none(), Rule::Succeed))
                    } else {
                        Ok(Red::Step(TermDti::Blame(label), none(), Rule::Fail))
                    };
                }
                match target {
                    GradualType::Var(x) => {
                        if self.mode == Mode::Baseline {
                            return Err(stuck(&f()));
                        }
                        match g1 {
                            GroundType::Base(b) => Ok(Red::Step(
                                (**inner).clone(),
                                TypeSubstitution::singleton(x.clone(), GradualType::Base(b)),
                                Rule::InstBase,
                            )),
                            GroundType::DynArrow => {
                                let arrow = GradualType::arrow(self.names.fresh_type(), self.names.fresh_type());
                                let next = TermDti::cast(
                                    TermDti::cast(w.clone(), GradualType::Dyn, GradualType::dyn_arrow(), label),
                                    GradualType::dyn_arrow(),
                                    arrow.clone(),
                                    label,
                                );
                                Ok(Red::Step(next, TypeSubstitution::singleton(x.clone(), arrow), Rule::InstArrow))
                            }
                        }
                    }
                    GradualType::Arrow(..) => {
                        let g: GradualType = ground_of(target).expect("arrow").into();
                        let next = TermDti::cast(
                            TermDti::cast(w.clone(), GradualType::Dyn, g.clone(), label),
                            g,
                            target.clone(),
                            label,
                        );
                        Ok(Red::Step(next, none(), Rule::Expand))
                    }
                    _ => Err(stuck(&f())),
                }
            }
            (source @ GradualType::Arrow(..), GradualType::Dyn) => {
                let g: GradualType = ground_of(source).expect("arrow").into();
                let next = TermDti::cast(TermDti::cast(w.clone(), source.clone(), g.clone(), label), g, GradualType::Dyn, label);
                Ok(Red::Step(next, none(), Rule::Ground))
            }
            _ => Err(stuck(&f())),
        }
    }
}

/// One layer of an evaluation context.
enum Frame {
    OpL(Op, TermDti),
    OpR(Op, TermDti),
    AppL(TermDti),
    AppR(TermDti),
    Cast(GradualType, GradualType, BlameLabel),
    If(TermDti, TermDti),
}

impl Frame {
    fn plug(&self, t: TermDti) -> TermDti {
        match self {
            Frame::OpL(op, rhs) => TermDti::op(*op, t, rhs.clone()),
            Frame::OpR(op, lhs) => TermDti::op(*op, lhs.clone(), t),
            Frame::AppL(arg) => TermDti::app(t, arg.clone()),
            Frame::AppR(fun) => TermDti::app(fun.clone(), t),
            Frame::Cast(from, to, label) => TermDti::cast(t, from.clone(), to.clone(), *label),
            Frame::If(a, b) => TermDti::if_(t, a.clone(), b.clone()),
        }
    }

    fn apply_subst(&mut self, s: &TypeSubstitution) {
        match self {
            Frame::OpL(_, t) | Frame::OpR(_, t) | Frame::AppL(t) | Frame::AppR(t) => *t = t.apply_subst(s),
            Frame::Cast(from, to, _) => {
                *from = s.apply(from);
                *to = s.apply(to);
            }
            Frame::If(a, b) => {
                *a = a.apply_subst(s);
                *b = b.apply_subst(s);
            }
        }
    }
}

enum Focus {
    /// A term to decompose.
    Eval(TermDti),
    /// A value to return to the innermost frame.
    Ret(TermDti),
}

fn plug_all(stack: &[Frame], t: TermDti) -> TermDti {
    stack.iter().rev().fold(t, |t, frame| frame.plug(t))
}

/// Where to continue after a redex fired. Results that are known to be
/// values, or casts wrapped around one, are not decomposed again.
fn refocus(red: Red, stack: &mut Vec<Frame>) -> (Focus, TypeSubstitution, Rule) {
    let Red::Step(next, subst, rule) = red else { unreachable!("redexes step") };
    match rule {
        Rule::IdBase | Rule::IdStar | Rule::Succeed | Rule::InstBase => (Focus::Ret(next), subst, rule),
        Rule::Ground | Rule::Expand | Rule::InstArrow => {
            let TermDti::Cast { term: inner, from: b, to: c, label: l2 } = next else { unreachable!("two casts") };
            let TermDti::Cast { term: w, from: a, to: b1, label: l1 } = *inner else { unreachable!("two casts") };
            stack.push(Frame::Cast(b, c, l2));
            stack.push(Frame::Cast(a, b1, l1));
            (Focus::Ret(*w), subst, rule)
        }
        _ => (Focus::Eval(next), subst, rule),
    }
}

fn stuck(f: &TermDti) -> StuckError {
    StuckError::Stuck(crate::frontend::print_dti(f, crate::frontend::PrintOptions::default()))
}

/// Substitutes the polymorphic value `/\ binders. w` for `x` in `body`.
///
/// An occurrence `x[T1, .., Tn]` becomes `w` with each binder replaced by
/// its argument, where every `nu` is replaced by its own fresh variable.
/// `w` must be closed at the term level.
pub fn subst_poly(
    body: &TermDti,
    x: &str,
    binders: &[TyVar],
    w: &TermDti,
    names: &mut NameSupply,
) -> Result<TermDti, StuckError> {
    // only needed to rename let binders, and types can be large
    let wftv = OnceCell::new();
    go(body, x, binders, w, &wftv, names)
}

fn go(
    t: &TermDti,
    x: &str,
    binders: &[TyVar],
    w: &TermDti,
    wftv: &OnceCell<BTreeSet<TyVar>>,
    names: &mut NameSupply,
) -> Result<TermDti, StuckError> {
    let rec = |t: &TermDti, names: &mut NameSupply| go(t, x, binders, w, wftv, names);
    Ok(match t {
        TermDti::Var { name, args } if name == x => {
            if args.len() != binders.len() {
                return Err(StuckError::Arity { name: name.clone(), expected: binders.len(), found: args.len() });
            }
            let mut s = TypeSubstitution::empty();
            for (b, a) in binders.iter().zip(args) {
                let ty = match a {
                    TypeArg::Ty(ty) => ty.clone(),
                    TypeArg::Nu => names.fresh_type(),
                };
                s.insert(b.clone(), ty);
            }
            w.apply_subst(&s)
        }
        TermDti::Var { .. } | TermDti::Const(_) | TermDti::Blame(_) => t.clone(),
        TermDti::Op { op, lhs, rhs } => TermDti::Op { op: *op, lhs: Box::new(rec(lhs, names)?), rhs: Box::new(rec(rhs, names)?) },
        TermDti::Lam { param, .. } if param == x => t.clone(),
        TermDti::Lam { param, ty, body } => TermDti::Lam { param: param.clone(), ty: ty.clone(), body: Box::new(rec(body, names)?) },
        TermDti::Fix { name, param, .. } if name == x || param == x => t.clone(),
        TermDti::Fix { name, param, param_ty, ret_ty, body } => TermDti::Fix {
            name: name.clone(),
            param: param.clone(),
            param_ty: param_ty.clone(),
            ret_ty: ret_ty.clone(),
            body: Box::new(rec(body, names)?),
        },
        TermDti::App { fun, arg } => TermDti::App { fun: Box::new(rec(fun, names)?), arg: Box::new(rec(arg, names)?) },
        TermDti::Cast { term, from, to, label } => {
            TermDti::Cast { term: Box::new(rec(term, names)?), from: from.clone(), to: to.clone(), label: *label }
        }
        TermDti::Let { name, binders: inner, value, body } => {
            let wftv = wftv.get_or_init(|| w.ftv());
            let (inner, value) = if inner.iter().any(|b| wftv.contains(b)) {
                let mut local = NameSupply::new("");
                local.avoid_all(&value.all_tyvars());
                local.avoid_all(wftv);
                local.avoid_all(inner);
                let mut rename = TypeSubstitution::empty();
                let mut renamed = Vec::with_capacity(inner.len());
                for b in inner {
                    if wftv.contains(b) {
                        let nb = local.fresh_like(b);
                        names.avoid(&nb);
                        rename.insert(b.clone(), GradualType::Var(nb.clone()));
                        renamed.push(nb);
                    } else {
                        renamed.push(b.clone());
                    }
                }
                (renamed, value.apply_subst(&rename))
            } else {
                (inner.clone(), (**value).clone())
            };
            let value = rec(&value, names)?;
            let body = if name == x { (**body).clone() } else { rec(body, names)? };
            TermDti::Let { name: name.clone(), binders: inner, value: Box::new(value), body: Box::new(body) }
        }
        TermDti::If { cond, then_branch, else_branch } => TermDti::If {
            cond: Box::new(rec(cond, names)?),
            then_branch: Box::new(rec(then_branch, names)?),
            else_branch: Box::new(rec(else_branch, names)?),
        },
    })
}

/// Evaluates with a fresh evaluator.
pub fn eval(f: &TermDti, mode: Mode, max_steps: usize) -> Result<EvalResult, StuckError> {
    Evaluator::new(mode).run(f, RunOptions::fuel(max_steps))
}

/// Renames run-time variables `'rN` in order of first occurrence, so that
/// results can be compared independently of the counter.
pub fn canonicalize(f: &TermDti) -> TermDti {
    let mut s = TypeSubstitution::empty();
    let mut k = 0;
    for x in f.ftv_ordered() {
        if is_runtime_var(&x) {
            s.insert(x, GradualType::var(format!("c{k}")));
            k += 1;
        }
    }
    f.apply_subst(&s)
}

pub fn is_runtime_var(x: &TyVar) -> bool {
    x.0.strip_prefix('r').is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_dti, print_dti, PrintOptions};

    fn run(src: &str) -> EvalResult {
        eval(&parse_dti(src).unwrap(), Mode::Dti, 1000).unwrap()
    }

    fn show(r: &EvalResult) -> String {
        match &r.outcome {
            Outcome::Value(v) => print_dti(v, PrintOptions::default()),
            Outcome::Blame(l) => format!("blame {l}"),
            Outcome::Timeout => "timeout".into(),
        }
    }

    #[test]
    fn inst_base_then_beta() {
        let r = run("(fun (y : 'Y) -> y) (2 : int =>[1+] ? =>[2-] 'Y)");
        assert_eq!(show(&r), "2");
        assert_eq!(r.rules(), vec![Rule::InstBase, Rule::Beta]);
        assert_eq!(r.subst.get(&TyVar::new("Y")), Some(&GradualType::INT));
    }

    #[test]
    fn inst_arrow_introduces_fresh_variables() {
        let r = run("(fun (f : 'X) -> 0) ((fun (z : ?) -> z) : ? -> ? =>[1+] ? =>[2+] 'X)");
        assert_eq!(show(&r), "0");
        assert_eq!(r.rules()[0], Rule::InstArrow);
        assert_eq!(r.subst.get(&TyVar::new("X")).unwrap().to_string(), "'r0 -> 'r1");
    }

    #[test]
    fn fail_blames_projection_label() {
        let r = run("true : bool =>[1+] ? =>[2+] int");
        assert_eq!(show(&r), "blame 2+");
    }

    #[test]
    fn abort_is_a_step() {
        let r = run("(true : bool =>[1+] ? =>[2+] int) + 1");
        assert_eq!(r.rules(), vec![Rule::Fail, Rule::Abort]);
    }

    #[test]
    fn recursion() {
        let r = run("(fix f (n : int) : int = if n < 1 then 0 else n + f (n - 1)) 4");
        assert_eq!(show(&r), "10");
    }

    #[test]
    fn nu_is_fresh_per_occurrence() {
        let r = run(
            "let g = /\\ 'y. fun (x : int) -> (fun (z : 'y) -> 0) (x : int =>[1+] ? =>[2+] 'y) in \
             (fun (a : int) -> g[nu] 2) (g[nu] 1)",
        );
        assert_eq!(show(&r), "0");
        let vars: Vec<String> = r.subst.iter().map(|(x, t)| format!("{x}:={t}")).collect();
        assert_eq!(vars, vec!["'r0:=int", "'r1:=int"]);
    }

    #[test]
    fn baseline_rejects_type_variables() {
        let f = parse_dti("(fun (y : 'Y) -> y) (2 : int =>[1+] ? =>[2-] 'Y)").unwrap();
        assert!(matches!(eval(&f, Mode::Baseline, 10), Err(StuckError::BaselinePrecondition(_))));
    }

    #[test]
    fn timeout_after_budget() {
        let r = run("(fix f (n : int) : int = f n) 0");
        assert!(r.outcome.is_timeout());
        assert_eq!(r.steps, 1000);
    }
}
