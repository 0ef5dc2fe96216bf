//! Terms of the implicitly typed surface language.

use std::collections::BTreeSet;

use crate::syntax::{Const, Op, Span};
use crate::types::{GradualType, TyVar};

/// The annotation on a lambda parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Annotation {
    /// No annotation in the source.
    Omitted,
    /// Written by the programmer.
    Explicit(GradualType),
    /// Filled in by inference; always static.
    Inferred(GradualType),
}

impl Annotation {
    pub fn explicit(&self) -> Option<&GradualType> {
        match self {
            Annotation::Explicit(t) => Some(t),
            _ => None,
        }
    }

    pub fn ty(&self) -> Option<&GradualType> {
        match self {
            Annotation::Omitted => None,
            Annotation::Explicit(t) | Annotation::Inferred(t) => Some(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermItgl {
    /// A variable. `inst` is empty until inference records the static
    /// types its scheme was instantiated with.
    Var { name: String, inst: Vec<GradualType> },
    Const(Const),
    Op { op: Op, lhs: Box<TermItgl>, rhs: Box<TermItgl>, span: Span },
    Lam { param: String, annot: Annotation, body: Box<TermItgl> },
    App { fun: Box<TermItgl>, arg: Box<TermItgl>, span: Span },
    /// `let x = v in e` with `v` a value. `binders` holds the generalized
    /// variables once inference has run.
    Let { name: String, binders: Vec<TyVar>, value: Box<TermItgl>, body: Box<TermItgl> },
    If { cond: Box<TermItgl>, then_branch: Box<TermItgl>, else_branch: Box<TermItgl>, span: Span },
    Ascribe { term: Box<TermItgl>, ty: GradualType, span: Span },
    /// A recursive function. `ret` is the inferred static result type.
    Fix { name: String, param: String, annot: Annotation, ret: Option<GradualType>, body: Box<TermItgl>, span: Span },
}

impl TermItgl {
    pub fn var(name: impl Into<String>) -> Self {
        TermItgl::Var { name: name.into(), inst: Vec::new() }
    }

    pub fn int(n: i64) -> Self {
        TermItgl::Const(Const::Int(n))
    }

    pub fn bool(b: bool) -> Self {
        TermItgl::Const(Const::Bool(b))
    }

    pub fn op(op: Op, lhs: TermItgl, rhs: TermItgl) -> Self {
        TermItgl::Op { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span: Span::default() }
    }

    pub fn lam(param: impl Into<String>, body: TermItgl) -> Self {
        TermItgl::Lam { param: param.into(), annot: Annotation::Omitted, body: Box::new(body) }
    }

    pub fn lam_ann(param: impl Into<String>, ty: GradualType, body: TermItgl) -> Self {
        TermItgl::Lam { param: param.into(), annot: Annotation::Explicit(ty), body: Box::new(body) }
    }

    pub fn app(fun: TermItgl, arg: TermItgl) -> Self {
        TermItgl::App { fun: Box::new(fun), arg: Box::new(arg), span: Span::default() }
    }

    pub fn let_in(name: impl Into<String>, value: TermItgl, body: TermItgl) -> Self {
        TermItgl::Let { name: name.into(), binders: Vec::new(), value: Box::new(value), body: Box::new(body) }
    }

    pub fn if_(c: TermItgl, t: TermItgl, e: TermItgl) -> Self {
        TermItgl::If { cond: Box::new(c), then_branch: Box::new(t), else_branch: Box::new(e), span: Span::default() }
    }

    pub fn ascribe(term: TermItgl, ty: GradualType) -> Self {
        TermItgl::Ascribe { term: Box::new(term), ty, span: Span::default() }
    }

    pub fn fix(name: impl Into<String>, param: impl Into<String>, annot: Annotation, body: TermItgl) -> Self {
        TermItgl::Fix {
            name: name.into(),
            param: param.into(),
            annot,
            ret: None,
            body: Box::new(body),
            span: Span::default(),
        }
    }

    /// Syntactic values: constants and lambdas.
    pub fn is_value(&self) -> bool {
        matches!(self, TermItgl::Const(_) | TermItgl::Lam { .. })
    }

    /// Type variables in programmer-written annotations.
    pub fn explicit_ftv(&self) -> BTreeSet<TyVar> {
        let mut out = Vec::new();
        self.walk(&mut |t| match t {
            TermItgl::Lam { annot: Annotation::Explicit(u), .. }
            | TermItgl::Fix { annot: Annotation::Explicit(u), .. }
            | TermItgl::Ascribe { ty: u, .. } => u.collect_ftv(&mut out),
            _ => {}
        });
        out.into_iter().collect()
    }

    /// Every type variable name mentioned anywhere in the term.
    pub fn all_tyvars(&self) -> BTreeSet<TyVar> {
        let mut out = Vec::new();
        self.walk(&mut |t| match t {
            TermItgl::Lam { annot, .. } => {
                if let Some(u) = annot.ty() {
                    u.collect_ftv(&mut out)
                }
            }
            TermItgl::Fix { annot, ret, .. } => {
                if let Some(u) = annot.ty() {
                    u.collect_ftv(&mut out)
                }
                if let Some(u) = ret {
                    u.collect_ftv(&mut out)
                }
            }
            TermItgl::Ascribe { ty, .. } => ty.collect_ftv(&mut out),
            TermItgl::Var { inst, .. } => inst.iter().for_each(|u| u.collect_ftv(&mut out)),
            TermItgl::Let { binders, .. } => out.extend(binders.iter().cloned()),
            _ => {}
        });
        out.into_iter().collect()
    }

    /// Free type variables of an annotated term, with let binders
    /// treated as bound in the let-bound value.
    pub fn ftv(&self) -> BTreeSet<TyVar> {
        let mut out = BTreeSet::new();
        self.collect_ftv(&mut out);
        out
    }

    fn collect_ftv(&self, out: &mut BTreeSet<TyVar>) {
        match self {
            TermItgl::Var { inst, .. } => inst.iter().for_each(|u| out.extend(u.ftv())),
            TermItgl::Const(_) => {}
            TermItgl::Op { lhs, rhs, .. } => {
                lhs.collect_ftv(out);
                rhs.collect_ftv(out);
            }
            TermItgl::Lam { annot, body, .. } => {
                if let Some(u) = annot.ty() {
                    out.extend(u.ftv());
                }
                body.collect_ftv(out);
            }
            TermItgl::App { fun, arg, .. } => {
                fun.collect_ftv(out);
                arg.collect_ftv(out);
            }
            TermItgl::Let { binders, value, body, .. } => {
                let mut inner = BTreeSet::new();
                value.collect_ftv(&mut inner);
                for b in binders {
                    inner.remove(b);
                }
                out.extend(inner);
                body.collect_ftv(out);
            }
            TermItgl::If { cond, then_branch, else_branch, .. } => {
                cond.collect_ftv(out);
                then_branch.collect_ftv(out);
                else_branch.collect_ftv(out);
            }
            TermItgl::Ascribe { term, ty, .. } => {
                out.extend(ty.ftv());
                term.collect_ftv(out);
            }
            TermItgl::Fix { annot, ret, body, .. } => {
                if let Some(u) = annot.ty() {
                    out.extend(u.ftv());
                }
                if let Some(u) = ret {
                    out.extend(u.ftv());
                }
                body.collect_ftv(out);
            }
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&TermItgl)) {
        f(self);
        match self {
            TermItgl::Var { .. } | TermItgl::Const(_) => {}
            TermItgl::Op { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            TermItgl::Lam { body, .. } | TermItgl::Fix { body, .. } => body.walk(f),
            TermItgl::App { fun, arg, .. } => {
                fun.walk(f);
                arg.walk(f);
            }
            TermItgl::Let { value, body, .. } => {
                value.walk(f);
                body.walk(f);
            }
            TermItgl::If { cond, then_branch, else_branch, .. } => {
                cond.walk(f);
                then_branch.walk(f);
                else_branch.walk(f);
            }
            TermItgl::Ascribe { term, .. } => term.walk(f),
        }
    }

    /// Rewrites every type in the term through `f`. Let binders are left
    /// alone; callers make sure `f` does not touch them.
    pub fn map_types(&self, f: &mut impl FnMut(&GradualType) -> GradualType) -> TermItgl {
        let annot = |a: &Annotation, f: &mut dyn FnMut(&GradualType) -> GradualType| match a {
            Annotation::Omitted => Annotation::Omitted,
            Annotation::Explicit(t) => Annotation::Explicit(f(t)),
            Annotation::Inferred(t) => Annotation::Inferred(f(t)),
        };
        match self {
            TermItgl::Var { name, inst } => TermItgl::Var { name: name.clone(), inst: inst.iter().map(&mut *f).collect() },
            TermItgl::Const(c) => TermItgl::Const(*c),
            TermItgl::Op { op, lhs, rhs, span } => TermItgl::Op {
                op: *op,
                lhs: Box::new(lhs.map_types(f)),
                rhs: Box::new(rhs.map_types(f)),
                span: *span,
            },
            TermItgl::Lam { param, annot: a, body } => {
                TermItgl::Lam { param: param.clone(), annot: annot(a, f), body: Box::new(body.map_types(f)) }
            }
            TermItgl::App { fun, arg, span } => {
                TermItgl::App { fun: Box::new(fun.map_types(f)), arg: Box::new(arg.map_types(f)), span: *span }
            }
            TermItgl::Let { name, binders, value, body } => TermItgl::Let {
                name: name.clone(),
                binders: binders.clone(),
                value: Box::new(value.map_types(f)),
                body: Box::new(body.map_types(f)),
            },
            TermItgl::If { cond, then_branch, else_branch, span } => TermItgl::If {
                cond: Box::new(cond.map_types(f)),
                then_branch: Box::new(then_branch.map_types(f)),
                else_branch: Box::new(else_branch.map_types(f)),
                span: *span,
            },
            TermItgl::Ascribe { term, ty, span } => {
                TermItgl::Ascribe { term: Box::new(term.map_types(f)), ty: f(ty), span: *span }
            }
            TermItgl::Fix { name, param, annot: a, ret, body, span } => TermItgl::Fix {
                name: name.clone(),
                param: param.clone(),
                annot: annot(a, f),
                ret: ret.as_ref().map(&mut *f),
                body: Box::new(body.map_types(f)),
                span: *span,
            },
        }
    }

    /// Forgets everything inference filled in.
    pub fn erase_inferred(&self) -> TermItgl {
        match self {
            TermItgl::Var { name, .. } => TermItgl::var(name.clone()),
            TermItgl::Const(c) => TermItgl::Const(*c),
            TermItgl::Op { op, lhs, rhs, span } => TermItgl::Op {
                op: *op,
                lhs: Box::new(lhs.erase_inferred()),
                rhs: Box::new(rhs.erase_inferred()),
                span: *span,
            },
            TermItgl::Lam { param, annot, body } => TermItgl::Lam {
                param: param.clone(),
                annot: match annot {
                    Annotation::Inferred(_) => Annotation::Omitted,
                    a => a.clone(),
                },
                body: Box::new(body.erase_inferred()),
            },
            TermItgl::App { fun, arg, span } => TermItgl::App {
                fun: Box::new(fun.erase_inferred()),
                arg: Box::new(arg.erase_inferred()),
                span: *span,
            },
            TermItgl::Let { name, value, body, .. } => TermItgl::Let {
                name: name.clone(),
                binders: Vec::new(),
                value: Box::new(value.erase_inferred()),
                body: Box::new(body.erase_inferred()),
            },
            TermItgl::If { cond, then_branch, else_branch, span } => TermItgl::If {
                cond: Box::new(cond.erase_inferred()),
                then_branch: Box::new(then_branch.erase_inferred()),
                else_branch: Box::new(else_branch.erase_inferred()),
                span: *span,
            },
            TermItgl::Ascribe { term, ty, span } => {
                TermItgl::Ascribe { term: Box::new(term.erase_inferred()), ty: ty.clone(), span: *span }
            }
            TermItgl::Fix { name, param, annot, body, span, .. } => TermItgl::Fix {
                name: name.clone(),
                param: param.clone(),
                annot: match annot {
                    Annotation::Inferred(_) => Annotation::Omitted,
                    a => a.clone(),
                },
                ret: None,
                body: Box::new(body.erase_inferred()),
                span: *span,
            },
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}
