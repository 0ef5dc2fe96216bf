//! Terms of the blame calculus with dynamic type inference.

use std::collections::BTreeSet;

use crate::fresh::NameSupply;
use crate::subst::TypeSubstitution;
use crate::syntax::{BlameLabel, Const, Op};
use crate::types::{GradualType, TyVar};

/// An argument of a type application: a static type, or `nu`, which asks
/// for a fresh type variable each time the occurrence is instantiated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeArg {
    Ty(GradualType),
    Nu,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermDti {
    Var { name: String, args: Vec<TypeArg> },
    Const(Const),
    Op { op: Op, lhs: Box<TermDti>, rhs: Box<TermDti> },
    Lam { param: String, ty: GradualType, body: Box<TermDti> },
    App { fun: Box<TermDti>, arg: Box<TermDti> },
    Cast { term: Box<TermDti>, from: GradualType, to: GradualType, label: BlameLabel },
    Blame(BlameLabel),
    /// `let x = /\ X1 .. Xn. w in f`.
    Let { name: String, binders: Vec<TyVar>, value: Box<TermDti>, body: Box<TermDti> },
    If { cond: Box<TermDti>, then_branch: Box<TermDti>, else_branch: Box<TermDti> },
    /// `fix f (x : U1) : U2 = body`.
    Fix { name: String, param: String, param_ty: GradualType, ret_ty: GradualType, body: Box<TermDti> },
}

impl TermDti {
    pub fn var(name: impl Into<String>) -> Self {
        TermDti::Var { name: name.into(), args: Vec::new() }
    }

    pub fn int(n: i64) -> Self {
        TermDti::Const(Const::Int(n))
    }

    pub fn bool(b: bool) -> Self {
        TermDti::Const(Const::Bool(b))
    }

    pub fn op(op: Op, lhs: TermDti, rhs: TermDti) -> Self {
        TermDti::Op { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn lam(param: impl Into<String>, ty: GradualType, body: TermDti) -> Self {
        TermDti::Lam { param: param.into(), ty, body: Box::new(body) }
    }

    pub fn app(fun: TermDti, arg: TermDti) -> Self {
        TermDti::App { fun: Box::new(fun), arg: Box::new(arg) }
    }

    pub fn cast(term: TermDti, from: GradualType, to: GradualType, label: BlameLabel) -> Self {
        TermDti::Cast { term: Box::new(term), from, to, label }
    }

    pub fn if_(c: TermDti, t: TermDti, e: TermDti) -> Self {
        TermDti::If { cond: Box::new(c), then_branch: Box::new(t), else_branch: Box::new(e) }
    }

    pub fn let_in(name: impl Into<String>, binders: Vec<TyVar>, value: TermDti, body: TermDti) -> Self {
        TermDti::Let { name: name.into(), binders, value: Box::new(value), body: Box::new(body) }
    }

    pub fn is_value(&self) -> bool {
        match self {
            TermDti::Const(_) | TermDti::Lam { .. } | TermDti::Fix { .. } => true,
            TermDti::Cast { term, from, to, .. } => {
                let wrapped = matches!(from, GradualType::Arrow(..)) && matches!(to, GradualType::Arrow(..));
                let injected = from.is_ground() && to.is_dyn();
                (wrapped || injected) && term.is_value()
            }
            _ => false,
        }
    }

    pub fn is_blame(&self) -> bool {
        matches!(self, TermDti::Blame(_))
    }

    /// True when some type application uses `nu`.
    pub fn has_nu(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t| {
            if let TermDti::Var { args, .. } = t {
                found |= args.iter().any(|a| matches!(a, TypeArg::Nu));
            }
        });
        found
    }

    pub fn ftv(&self) -> BTreeSet<TyVar> {
        self.ftv_ordered().into_iter().collect()
    }

    /// Free type variables in order of first occurrence.
    pub fn ftv_ordered(&self) -> Vec<TyVar> {
        let mut out = Vec::new();
        self.collect_ftv(&mut out);
        out
    }

    fn collect_ftv(&self, out: &mut Vec<TyVar>) {
        match self {
            TermDti::Var { args, .. } => {
                for a in args {
                    if let TypeArg::Ty(t) = a {
                        t.collect_ftv(out);
                    }
                }
            }
            TermDti::Const(_) | TermDti::Blame(_) => {}
            TermDti::Op { lhs, rhs, .. } => {
                lhs.collect_ftv(out);
                rhs.collect_ftv(out);
            }
            TermDti::Lam { ty, body, .. } => {
                ty.collect_ftv(out);
                body.collect_ftv(out);
            }
            TermDti::App { fun, arg } => {
                fun.collect_ftv(out);
                arg.collect_ftv(out);
            }
            TermDti::Cast { term, from, to, .. } => {
                term.collect_ftv(out);
                from.collect_ftv(out);
                to.collect_ftv(out);
            }
            TermDti::Let { binders, value, body, .. } => {
                let mut inner = Vec::new();
                value.collect_ftv(&mut inner);
                for x in inner {
                    if !binders.contains(&x) && !out.contains(&x) {
                        out.push(x);
                    }
                }
                body.collect_ftv(out);
            }
            TermDti::If { cond, then_branch, else_branch } => {
                cond.collect_ftv(out);
                then_branch.collect_ftv(out);
                else_branch.collect_ftv(out);
            }
            TermDti::Fix { param_ty, ret_ty, body, .. } => {
                param_ty.collect_ftv(out);
                ret_ty.collect_ftv(out);
                body.collect_ftv(out);
            }
        }
    }

    /// Every type variable name in the term, bound or free.
    pub fn all_tyvars(&self) -> BTreeSet<TyVar> {
        let mut out = Vec::new();
        self.walk(&mut |t| match t {
            TermDti::Var { args, .. } => {
                for a in args {
                    if let TypeArg::Ty(t) = a {
                        t.collect_ftv(&mut out);
                    }
                }
            }
            TermDti::Lam { ty, .. } => ty.collect_ftv(&mut out),
            TermDti::Cast { from, to, .. } => {
                from.collect_ftv(&mut out);
                to.collect_ftv(&mut out);
            }
            TermDti::Let { binders, .. } => out.extend(binders.iter().cloned()),
            TermDti::Fix { param_ty, ret_ty, .. } => {
                param_ty.collect_ftv(&mut out);
                ret_ty.collect_ftv(&mut out);
            }
            _ => {}
        });
        out.into_iter().collect()
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&TermDti)) {
        f(self);
        match self {
            TermDti::Var { .. } | TermDti::Const(_) | TermDti::Blame(_) => {}
            TermDti::Op { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            TermDti::Lam { body, .. } | TermDti::Fix { body, .. } => body.walk(f),
            TermDti::App { fun, arg } => {
                fun.walk(f);
                arg.walk(f);
            }
            TermDti::Cast { term, .. } => term.walk(f),
            TermDti::Let { value, body, .. } => {
                value.walk(f);
                body.walk(f);
            }
            TermDti::If { cond, then_branch, else_branch } => {
                cond.walk(f);
                then_branch.walk(f);
                else_branch.walk(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn cast_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |t| {
            if matches!(t, TermDti::Cast { .. }) {
                n += 1
            }
        });
        n
    }

    /// Applies a type substitution, renaming let binders that would
    /// capture variables of its codomain.
    pub fn apply_subst(&self, s: &TypeSubstitution) -> TermDti {
        if s.is_empty() {
            return self.clone();
        }
        let mut names = NameSupply::new("");
        // fresh names are only needed to rename let binders
        let mut has_let = false;
        self.walk(&mut |t| has_let |= matches!(t, TermDti::Let { .. }));
        if has_let {
            names.avoid_all(&self.all_tyvars());
        }
        names.avoid_all(s.domain());
        names.avoid_all(&s.range_ftv());
        self.subst_types(s, &mut names)
    }

    pub(crate) fn subst_types(&self, s: &TypeSubstitution, names: &mut NameSupply) -> TermDti {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            TermDti::Var { name, args } => TermDti::Var {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|a| match a {
                        TypeArg::Ty(t) => TypeArg::Ty(s.apply(t)),
                        TypeArg::Nu => TypeArg::Nu,
                    })
                    .collect(),
            },
            TermDti::Const(c) => TermDti::Const(*c),
            TermDti::Blame(l) => TermDti::Blame(*l),
            TermDti::Op { op, lhs, rhs } => TermDti::Op {
                op: *op,
                lhs: Box::new(lhs.subst_types(s, names)),
                rhs: Box::new(rhs.subst_types(s, names)),
            },
            TermDti::Lam { param, ty, body } => {
                TermDti::Lam { param: param.clone(), ty: s.apply(ty), body: Box::new(body.subst_types(s, names)) }
            }
            TermDti::App { fun, arg } => TermDti::App {
                fun: Box::new(fun.subst_types(s, names)),
                arg: Box::new(arg.subst_types(s, names)),
            },
            TermDti::Cast { term, from, to, label } => TermDti::Cast {
                term: Box::new(term.subst_types(s, names)),
                from: s.apply(from),
                to: s.apply(to),
                label: *label,
            },
            TermDti::Let { name, binders, value, body } => {
                let inner = s.without(binders);
                let range = inner.range_ftv();
                let mut rename = TypeSubstitution::empty();
                let mut new_binders = Vec::with_capacity(binders.len());
                for b in binders {
                    if range.contains(b) {
                        let nb = names.fresh_like(b);
                        rename.insert(b.clone(), GradualType::Var(nb.clone()));
                        new_binders.push(nb);
                    } else {
                        new_binders.push(b.clone());
                    }
                }
                let value = value.subst_types(&rename, names).subst_types(&inner, names);
                TermDti::Let {
                    name: name.clone(),
                    binders: new_binders,
                    value: Box::new(value),
                    body: Box::new(body.subst_types(s, names)),
                }
            }
            TermDti::If { cond, then_branch, else_branch } => TermDti::If {
                cond: Box::new(cond.subst_types(s, names)),
                then_branch: Box::new(then_branch.subst_types(s, names)),
                else_branch: Box::new(else_branch.subst_types(s, names)),
            },
            TermDti::Fix { name, param, param_ty, ret_ty, body } => TermDti::Fix {
                name: name.clone(),
                param: param.clone(),
                param_ty: s.apply(param_ty),
                ret_ty: s.apply(ret_ty),
                body: Box::new(body.subst_types(s, names)),
            },
        }
    }

    /// Free term variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            TermDti::Var { name, .. } => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            TermDti::Const(_) | TermDti::Blame(_) => {}
            TermDti::Op { lhs, rhs, .. } => {
                lhs.collect_free(bound, out);
                rhs.collect_free(bound, out);
            }
            TermDti::Lam { param, body, .. } => {
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            TermDti::Fix { name, param, body, .. } => {
                bound.push(name.clone());
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            TermDti::App { fun, arg } => {
                fun.collect_free(bound, out);
                arg.collect_free(bound, out);
            }
            TermDti::Cast { term, .. } => term.collect_free(bound, out),
            TermDti::Let { name, value, body, .. } => {
                value.collect_free(bound, out);
                bound.push(name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            TermDti::If { cond, then_branch, else_branch } => {
                cond.collect_free(bound, out);
                then_branch.collect_free(bound, out);
                else_branch.collect_free(bound, out);
            }
        }
    }
}
