//! Type checking for the cast calculus.

use thiserror::Error;

use crate::dti::{TermDti, TypeArg};
use crate::subst::TypeSubstitution;
use crate::types::{consistent, GradualType, TyVar, TypeScheme};

/// Typing environment of the cast calculus. Later entries shadow earlier
/// ones.
pub type DtiEnv = Vec<(String, TypeScheme)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DtiTypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("expected type {expected}, found {found}")]
    Mismatch { expected: GradualType, found: GradualType },
    #[error("cast between inconsistent types {from} and {to}")]
    InconsistentCast { from: GradualType, to: GradualType },
    #[error("`{name}` applied to {found} types, expected {expected}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{name}` instantiates {var} with non-static type {ty}")]
    NonStatic { name: String, var: TyVar, ty: GradualType },
    #[error("`{name}` instantiates {var} with nu, but {var} occurs in its type")]
    NuForUsedBinder { name: String, var: TyVar },
    #[error("type {0} is not a function type")]
    NotAFunction(GradualType),
    #[error("the right-hand side of `let {0}` is not a value")]
    NotAValue(String),
    #[error("let binder {0} is free in the environment")]
    Capture(TyVar),
    #[error("term has no unique type")]
    Ambiguous,
}

const HOLE: &str = "%blame";

pub(crate) fn hole() -> GradualType {
    GradualType::var(HOLE)
}

pub(crate) fn is_hole(t: &GradualType) -> bool {
    matches!(t, GradualType::Var(x) if x.0 == HOLE)
}

pub(crate) fn has_hole(t: &GradualType) -> bool {
    match t {
        GradualType::Arrow(a, b) => has_hole(a) || has_hole(b),
        t => is_hole(t),
    }
}

/// Equality where the type of `blame` matches anything.
pub(crate) fn compatible(a: &GradualType, b: &GradualType) -> bool {
    match (a, b) {
        _ if is_hole(a) || is_hole(b) => true,
        (GradualType::Arrow(a1, a2), GradualType::Arrow(b1, b2)) => compatible(a1, b1) && compatible(a2, b2),
        _ => a == b,
    }
}

fn consistent_h(a: &GradualType, b: &GradualType) -> bool {
    match (a, b) {
        _ if is_hole(a) || is_hole(b) => true,
        (GradualType::Arrow(a1, a2), GradualType::Arrow(b1, b2)) => consistent_h(a1, b1) && consistent_h(a2, b2),
        _ => consistent(a, b),
    }
}

pub(crate) fn merge(a: &GradualType, b: &GradualType) -> GradualType {
    match (a, b) {
        _ if is_hole(a) => b.clone(),
        _ if is_hole(b) => a.clone(),
        (GradualType::Arrow(a1, a2), GradualType::Arrow(b1, b2)) => GradualType::arrow(merge(a1, b1), merge(a2, b2)),
        _ => a.clone(),
    }
}

fn lookup<'e>(env: &'e [(String, TypeScheme)], x: &str) -> Option<&'e TypeScheme> {
    env.iter().rev().find(|(y, _)| y == x).map(|(_, s)| s)
}

/// The type of a closed or open term. Fails with `Ambiguous` when the
/// type depends on an uninhabited `blame`.
pub fn typecheck_dti(env: &[(String, TypeScheme)], f: &TermDti) -> Result<GradualType, DtiTypeError> {
    let t = synth(&mut env.to_vec(), f)?;
    if has_hole(&t) {
        Err(DtiTypeError::Ambiguous)
    } else {
        Ok(t)
    }
}

/// Checks a term against a type; `blame` checks against every type.
pub fn check_dti(env: &[(String, TypeScheme)], f: &TermDti, expected: &GradualType) -> Result<(), DtiTypeError> {
    let t = synth(&mut env.to_vec(), f)?;
    if compatible(&t, expected) {
        Ok(())
    } else {
        Err(DtiTypeError::Mismatch { expected: expected.clone(), found: t })
    }
}

fn expect(found: GradualType, expected: &GradualType) -> Result<GradualType, DtiTypeError> {
    if compatible(&found, expected) {
        Ok(merge(&found, expected))
    } else {
        Err(DtiTypeError::Mismatch { expected: expected.clone(), found })
    }
}

fn env_ftv(env: &[(String, TypeScheme)]) -> std::collections::BTreeSet<TyVar> {
    env.iter().flat_map(|(_, s)| s.ftv()).collect()
}

pub(crate) fn synth(env: &mut Vec<(String, TypeScheme)>, f: &TermDti) -> Result<GradualType, DtiTypeError> {
    match f {
        TermDti::Var { name, args } => {
            let sc = lookup(env, name).ok_or_else(|| DtiTypeError::Unbound(name.clone()))?;
            if args.len() != sc.binders.len() {
                return Err(DtiTypeError::Arity { name: name.clone(), expected: sc.binders.len(), found: args.len() });
            }
            let used = sc.body.ftv();
            let mut s = TypeSubstitution::empty();
            for (x, a) in sc.binders.iter().zip(args) {
                match a {
                    TypeArg::Ty(t) if !t.is_static() => {
                        return Err(DtiTypeError::NonStatic { name: name.clone(), var: x.clone(), ty: t.clone() })
                    }
                    TypeArg::Ty(t) => s.insert(x.clone(), t.clone()),
                    TypeArg::Nu if used.contains(x) => {
                        return Err(DtiTypeError::NuForUsedBinder { name: name.clone(), var: x.clone() })
                    }
                    TypeArg::Nu => {}
                }
            }
            Ok(s.apply(&sc.body))
        }
        TermDti::Const(c) => Ok(c.ty()),
        TermDti::Blame(_) => Ok(hole()),
        TermDti::Op { op, lhs, rhs } => {
            let (a, b, r) = op.signature();
            expect(synth(env, lhs)?, &GradualType::Base(a))?;
            expect(synth(env, rhs)?, &GradualType::Base(b))?;
            Ok(GradualType::Base(r))
        }
        TermDti::Lam { param, ty, body } => {
            env.push((param.clone(), TypeScheme::mono(ty.clone())));
            let cod = synth(env, body);
            env.pop();
            Ok(GradualType::arrow(ty.clone(), cod?))
        }
        TermDti::App { fun, arg } => {
            let ft = synth(env, fun)?;
            let at = synth(env, arg)?;
            match ft {
                GradualType::Arrow(dom, cod) => {
                    expect(at, &dom)?;
                    Ok((*cod).clone())
                }
                t if is_hole(&t) => Ok(hole()),
                t => Err(DtiTypeError::NotAFunction(t)),
            }
        }
        TermDti::Cast { term, from, to, .. } => {
            expect(synth(env, term)?, from)?;
            if !consistent_h(from, to) {
                return Err(DtiTypeError::InconsistentCast { from: from.clone(), to: to.clone() });
            }
            Ok(to.clone())
        }
        TermDti::Let { name, binders, value, body } => {
            if !value.is_value() {
                return Err(DtiTypeError::NotAValue(name.clone()));
            }
            let free = env_ftv(env);
            if let Some(x) = binders.iter().find(|x| free.contains(x)) {
                return Err(DtiTypeError::Capture(x.clone()));
            }
            let u1 = synth(env, value)?;
            env.push((name.clone(), TypeScheme::new(binders.clone(), u1)));
            let u2 = synth(env, body);
            env.pop();
            u2
        }
        TermDti::If { cond, then_branch, else_branch } => {
            expect(synth(env, cond)?, &GradualType::BOOL)?;
            let u2 = synth(env, then_branch)?;
            let u3 = synth(env, else_branch)?;
            expect(u3, &u2)
        }
        TermDti::Fix { name, param, param_ty, ret_ty, body } => {
            let fty = GradualType::arrow(param_ty.clone(), ret_ty.clone());
            env.push((name.clone(), TypeScheme::mono(fty.clone())));
            env.push((param.clone(), TypeScheme::mono(param_ty.clone())));
            let ub = synth(env, body);
            env.pop();
            env.pop();
            expect(ub?, ret_ty)?;
            Ok(fty)
        }
    }
}
