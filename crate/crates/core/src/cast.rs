//! Translation of inferred surface terms into the cast calculus.
//!
//! Casts are inserted wherever the surface typing rules use consistency.
//! Casts between identical types are never emitted, and labels are
//! numbered in the order the casts are created: subterms first, then the
//! operator cast before the operand cast.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dti::{TermDti, TypeArg};
use crate::itgl::{Annotation, TermItgl};
use crate::syntax::{LabelSupply, Span};
use crate::types::{consistent, matching, GradualType, TyVar, TypeScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CastInsertError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("parameter `{0}` has no type; run inference first")]
    MissingAnnotation(String),
    #[error("`{name}` is instantiated with {found} types but its scheme has {expected} binders")]
    Arity { name: String, expected: usize, found: usize },
    #[error("cannot cast from {from} to {to}")]
    Inconsistent { from: GradualType, to: GradualType },
    #[error("type {0} is not a function type")]
    NotMatchable(GradualType),
    #[error("branches have different types {0} and {1}")]
    BranchMismatch(GradualType, GradualType),
    #[error("`fix {0}` has no result type; run inference first")]
    MissingReturn(String),
}

/// A cast calculus term with its type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub term: TermDti,
    pub ty: GradualType,
}

/// Translates an inferred term, numbering labels from 1.
pub fn insert_casts(env: &[(String, TypeScheme)], e: &TermItgl) -> Result<Translation, CastInsertError> {
    insert_casts_with(env, e, &mut LabelSupply::default())
}

/// Translates an inferred term, drawing labels from `labels`.
pub fn insert_casts_with(
    env: &[(String, TypeScheme)],
    e: &TermItgl,
    labels: &mut LabelSupply,
) -> Result<Translation, CastInsertError> {
    let mut ci = Inserter { env: env.to_vec(), labels };
    let (term, ty) = ci.translate(e)?;
    Ok(Translation { term, ty })
}

struct Inserter<'l> {
    env: Vec<(String, TypeScheme)>,
    labels: &'l mut LabelSupply,
}

impl Inserter<'_> {
    fn cast(&mut self, f: TermDti, from: GradualType, to: &GradualType, span: Span) -> Result<TermDti, CastInsertError> {
        if &from == to {
            return Ok(f);
        }
        if !consistent(&from, to) {
            return Err(CastInsertError::Inconsistent { from, to: to.clone() });
        }
        let label = self.labels.fresh(Some(span));
        Ok(TermDti::cast(f, from, to.clone(), label))
    }

    fn param_type(param: &str, annot: &Annotation) -> Result<GradualType, CastInsertError> {
        annot.ty().cloned().ok_or_else(|| CastInsertError::MissingAnnotation(param.to_string()))
    }

    fn env_ftv(&self) -> BTreeSet<TyVar> {
        self.env.iter().flat_map(|(_, s)| s.ftv()).collect()
    }

    fn translate(&mut self, e: &TermItgl) -> Result<(TermDti, GradualType), CastInsertError> {
        match e {
            TermItgl::Var { name, inst } => {
                let sc = self
                    .env
                    .iter()
                    .rev()
                    .find(|(y, _)| y == name)
                    .map(|(_, s)| s.clone())
                    .ok_or_else(|| CastInsertError::Unbound(name.clone()))?;
                if inst.len() > sc.binders.len() {
                    return Err(CastInsertError::Arity {
                        name: name.clone(),
                        expected: sc.binders.len(),
                        found: inst.len(),
                    });
                }
                let mut args: Vec<TypeArg> = inst.iter().cloned().map(TypeArg::Ty).collect();
                args.resize(sc.binders.len(), TypeArg::Nu);
                let s = crate::subst::TypeSubstitution::try_from_pairs(
                    sc.binders.iter().cloned().zip(inst.iter().cloned()),
                )
                .map_err(|_| CastInsertError::Arity {
                    name: name.clone(),
                    expected: sc.binders.len(),
                    found: inst.len(),
                })?;
                Ok((TermDti::Var { name: name.clone(), args }, s.apply(&sc.body)))
            }
            TermItgl::Const(c) => Ok((TermDti::Const(*c), c.ty())),
            TermItgl::Op { op, lhs, rhs, span } => {
                let (a, b, r) = op.signature();
                let (f1, u1) = self.translate(lhs)?;
                let (f2, u2) = self.translate(rhs)?;
                let f1 = self.cast(f1, u1, &GradualType::Base(a), *span)?;
                let f2 = self.cast(f2, u2, &GradualType::Base(b), *span)?;
                Ok((TermDti::op(*op, f1, f2), GradualType::Base(r)))
            }
            TermItgl::Lam { param, annot, body } => {
                let dom = Self::param_type(param, annot)?;
                self.env.push((param.clone(), TypeScheme::mono(dom.clone())));
                let r = self.translate(body);
                self.env.pop();
                let (body, cod) = r?;
                Ok((TermDti::lam(param.clone(), dom.clone(), body), GradualType::arrow(dom, cod)))
            }
            TermItgl::App { fun, arg, span } => {
                let (f1, u1) = self.translate(fun)?;
                let (f2, u2) = self.translate(arg)?;
                let (dom, cod) = matching(&u1).map_err(|_| CastInsertError::NotMatchable(u1.clone()))?;
                let f1 = self.cast(f1, u1, &GradualType::arrow(dom.clone(), cod.clone()), *span)?;
                let f2 = self.cast(f2, u2, &dom, *span)?;
                Ok((TermDti::app(f1, f2), cod))
            }
            TermItgl::Let { name, binders, value, body } => {
                let (w1, u1) = self.translate(value)?;
                let mut blocked = self.env_ftv();
                blocked.extend(u1.ftv());
                blocked.extend(value.explicit_ftv());
                let extra: Vec<TyVar> = w1
                    .ftv_ordered()
                    .into_iter()
                    .filter(|x| !blocked.contains(x) && !binders.contains(x))
                    .collect();
                let mut all = binders.clone();
                all.extend(extra);
                self.env.push((name.clone(), TypeScheme::new(all.clone(), u1)));
                let r = self.translate(body);
                self.env.pop();
                let (f2, u2) = r?;
                Ok((TermDti::let_in(name.clone(), all, w1, f2), u2))
            }
            TermItgl::If { cond, then_branch, else_branch, span } => {
                let (f1, u1) = self.translate(cond)?;
                let f1 = self.cast(f1, u1, &GradualType::BOOL, *span)?;
                let (f2, u2) = self.translate(then_branch)?;
                let (f3, u3) = self.translate(else_branch)?;
                if u2 != u3 {
                    return Err(CastInsertError::BranchMismatch(u2, u3));
                }
                Ok((TermDti::if_(f1, f2, f3), u2))
            }
            TermItgl::Ascribe { term, ty, span } => {
                let (f, u) = self.translate(term)?;
                Ok((self.cast(f, u, ty, *span)?, ty.clone()))
            }
            TermItgl::Fix { name, param, annot, ret, body, span } => {
                let dom = Self::param_type(param, annot)?;
                let ret = ret.clone().ok_or_else(|| CastInsertError::MissingReturn(name.clone()))?;
                let fty = GradualType::arrow(dom.clone(), ret.clone());
                self.env.push((name.clone(), TypeScheme::mono(fty.clone())));
                self.env.push((param.clone(), TypeScheme::mono(dom.clone())));
                let r = self.translate(body);
                self.env.pop();
                self.env.pop();
                let (fb, ub) = r?;
                let fb = self.cast(fb, ub, &ret, *span)?;
                Ok((
                    TermDti::Fix {
                        name: name.clone(),
                        param: param.clone(),
                        param_ty: dom,
                        ret_ty: ret,
                        body: Box::new(fb),
                    },
                    fty,
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_itgl, print_dti, PrintOptions};
    use crate::infer::infer_principal;
    use crate::typecheck::typecheck_dti;

    fn translate(src: &str) -> Translation {
        let inf = infer_principal(&[], &parse_itgl(src).unwrap()).unwrap();
        let tr = insert_casts(&[], &inf.term).unwrap();
        assert_eq!(tr.ty, inf.ty);
        assert_eq!(typecheck_dti(&[], &tr.term).unwrap(), tr.ty);
        tr
    }

    #[test]
    fn operator_argument_and_application_casts() {
        let tr = translate("(fun (x : int) -> 1 + (fun (y : ?) -> y) x) 2");
        assert_eq!(
            print_dti(&tr.term, PrintOptions::default()),
            "(fun (x : int) -> 1 + ((fun (y : ?) -> y) (x : int =>[1+] ?) : ? =>[2+] int)) 2"
        );
    }

    #[test]
    fn dynamic_application_labels() {
        let tr = translate("(fun (x : ?) -> x 2) (fun y -> y)");
        let s = print_dti(&tr.term, PrintOptions::default());
        assert!(s.starts_with("(fun (x : ?) -> (x : ? =>[1+] ? -> ?) (2 : int =>[2+] ?))"), "{s}");
        assert!(s.ends_with("-> y) : 'a0 -> 'a0 =>[3+] ?)"), "{s}");
    }

    #[test]
    fn let_generalizes_variables_only_in_the_body() {
        let tr = translate("let g = fun x -> ((fun y -> y) : ? -> ?) x in g");
        let TermDti::Let { binders, .. } = &tr.term else { panic!() };
        assert_eq!(binders.len(), 2);
        let TermDti::Let { body, .. } = &tr.term else { panic!() };
        let TermDti::Var { args, .. } = &**body else { panic!() };
        assert!(matches!(args[1], TypeArg::Nu));
    }
}
