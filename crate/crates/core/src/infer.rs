//! Constraint generation, solving and principal type inference for the
//! surface language, plus a checker for the declarative typing rules.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::fresh::NameSupply;
use crate::itgl::{Annotation, TermItgl};
use crate::subst::TypeSubstitution;
use crate::types::{consistent, matching, GradualType, TyVar, TypeScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InferError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("type {0} is incompatible with {1}")]
    Clash(GradualType, GradualType),
    #[error("occurs check failed: {0} occurs in {1}")]
    Occurs(TyVar, GradualType),
    #[error("type {0} is not a function type")]
    NotMatchable(GradualType),
    #[error("ill-typed term: {0}")]
    IllTyped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// The two types must become consistent.
    Consist(GradualType, GradualType),
    /// The two types must become equal.
    Equal(GradualType, GradualType),
}

/// Solves constraints one at a time, keeping an idempotent substitution.
#[derive(Clone, Debug)]
pub struct Solver {
    subst: TypeSubstitution,
    names: NameSupply,
}

impl Solver {
    pub fn new(names: NameSupply) -> Self {
        Solver { subst: TypeSubstitution::empty(), names }
    }

    pub fn subst(&self) -> &TypeSubstitution {
        &self.subst
    }

    pub fn into_subst(self) -> TypeSubstitution {
        self.subst
    }

    pub fn names(&mut self) -> &mut NameSupply {
        &mut self.names
    }

    pub fn apply(&self, t: &GradualType) -> GradualType {
        self.subst.apply(t)
    }

    fn bind(&mut self, x: &TyVar, t: GradualType) -> Result<(), InferError> {
        if t == GradualType::Var(x.clone()) {
            return Ok(());
        }
        if t.occurs(x) {
            return Err(InferError::Occurs(x.clone(), t));
        }
        let s = TypeSubstitution::singleton(x.clone(), t);
        self.subst = s.compose(&self.subst);
        Ok(())
    }

    pub fn solve(&mut self, c: Constraint) -> Result<(), InferError> {
        let mut work = VecDeque::from([c]);
        while let Some(c) = work.pop_front() {
            match c {
                Constraint::Consist(a, b) => self.consist(self.apply(&a), self.apply(&b), &mut work)?,
                Constraint::Equal(a, b) => self.equal(self.apply(&a), self.apply(&b), &mut work)?,
            }
        }
        Ok(())
    }

    fn consist(&mut self, a: GradualType, b: GradualType, work: &mut VecDeque<Constraint>) -> Result<(), InferError> {
        use GradualType::*;
        match (a, b) {
            (Dyn, _) | (_, Dyn) => Ok(()),
            (Base(x), Base(y)) if x == y => Ok(()),
            (Var(x), Var(y)) if x == y => Ok(()),
            (Var(x), t) | (t, Var(x)) => {
                if t.is_static() {
                    return self.bind(&x, t);
                }
                if t.occurs(&x) {
                    return Err(InferError::Occurs(x, t));
                }
                let arrow = GradualType::arrow(self.names.fresh_type(), self.names.fresh_type());
                self.bind(&x, arrow.clone())?;
                work.push_front(Constraint::Consist(arrow, t));
                Ok(())
            }
            (Arrow(a1, a2), Arrow(b1, b2)) => {
                work.push_front(Constraint::Consist(Arc::unwrap_or_clone(a2), Arc::unwrap_or_clone(b2)));
                work.push_front(Constraint::Consist(Arc::unwrap_or_clone(a1), Arc::unwrap_or_clone(b1)));
                Ok(())
            }
            (a, b) => Err(InferError::Clash(a, b)),
        }
    }

    fn equal(&mut self, a: GradualType, b: GradualType, work: &mut VecDeque<Constraint>) -> Result<(), InferError> {
        use GradualType::*;
        if a == b {
            return Ok(());
        }
        match (a, b) {
            (Var(x), t) | (t, Var(x)) if t.is_static() => self.bind(&x, t),
            (Arrow(a1, a2), Arrow(b1, b2)) => {
                work.push_front(Constraint::Equal(Arc::unwrap_or_clone(a2), Arc::unwrap_or_clone(b2)));
                work.push_front(Constraint::Equal(Arc::unwrap_or_clone(a1), Arc::unwrap_or_clone(b1)));
                Ok(())
            }
            (a, b) => Err(InferError::Clash(a, b)),
        }
    }
}

/// Solves a set of constraints from scratch.
pub fn solve(constraints: impl IntoIterator<Item = Constraint>) -> Result<TypeSubstitution, InferError> {
    let cs: Vec<Constraint> = constraints.into_iter().collect();
    let mut names = NameSupply::new("a");
    for c in &cs {
        let (Constraint::Consist(a, b) | Constraint::Equal(a, b)) = c;
        names.avoid_all(&a.ftv());
        names.avoid_all(&b.ftv());
    }
    let mut solver = Solver::new(names);
    for c in cs {
        solver.solve(c)?;
    }
    Ok(solver.into_subst())
}

/// Typing environment of the surface language. Later entries shadow
/// earlier ones.
pub type ItglEnv = Vec<(String, TypeScheme)>;

fn lookup<'e>(env: &'e [(String, TypeScheme)], x: &str) -> Option<&'e TypeScheme> {
    env.iter().rev().find(|(y, _)| y == x).map(|(_, s)| s)
}

fn env_ftv(env: &[(String, TypeScheme)], s: &TypeSubstitution) -> BTreeSet<TyVar> {
    let mut out = BTreeSet::new();
    for (_, sc) in env {
        let body = s.without(&sc.binders).apply(&sc.body);
        for x in body.ftv() {
            if !sc.binders.contains(&x) {
                out.insert(x);
            }
        }
    }
    out
}

/// The result of inference: the term with its omitted annotations and
/// instantiations filled in, its type, and the substitution found.
#[derive(Clone, Debug)]
pub struct Inference {
    pub term: TermItgl,
    pub ty: GradualType,
    pub subst: TypeSubstitution,
}

impl Inference {
    /// Type variables left undetermined by inference. Dynamic type
    /// inference settles them at run time.
    pub fn residual(&self) -> BTreeSet<TyVar> {
        let mut r = self.ty.ftv();
        r.extend(self.term.ftv());
        r
    }
}

/// Infers a principal type and the substitution that goes with it.
pub fn infer_principal(env: &[(String, TypeScheme)], e: &TermItgl) -> Result<Inference, InferError> {
    let mut names = NameSupply::new("a");
    names.avoid_all(&e.all_tyvars());
    for (_, sc) in env {
        names.avoid_all(&sc.body.ftv());
        names.avoid_all(&sc.binders);
    }
    infer_with(env, e, names)
}

/// Like [`infer_principal`] with a caller-provided name supply.
pub fn infer_with(env: &[(String, TypeScheme)], e: &TermItgl, names: NameSupply) -> Result<Inference, InferError> {
    let mut inf = Inferencer { solver: Solver::new(names), env: env.to_vec() };
    let (term, ty) = inf.infer(e)?;
    let s = inf.solver.into_subst();
    let term = term.map_types(&mut |t| s.apply(t));
    Ok(Inference { ty: s.apply(&ty), term, subst: s })
}

struct Inferencer {
    solver: Solver,
    env: ItglEnv,
}

impl Inferencer {
    fn fresh(&mut self) -> GradualType {
        self.solver.names().fresh_type()
    }

    fn with_binding<T>(&mut self, x: &str, sc: TypeScheme, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((x.to_string(), sc));
        let r = f(self);
        self.env.pop();
        r
    }

    fn infer(&mut self, e: &TermItgl) -> Result<(TermItgl, GradualType), InferError> {
        match e {
            TermItgl::Var { name, .. } => {
                let sc = lookup(&self.env, name).ok_or_else(|| InferError::Unbound(name.clone()))?.clone();
                let inst: Vec<GradualType> = sc.binders.iter().map(|_| self.fresh()).collect();
                let s = TypeSubstitution::try_from_pairs(sc.binders.iter().cloned().zip(inst.iter().cloned()))
                    .expect("fresh instantiation");
                let ty = s.apply(&sc.body);
                Ok((TermItgl::Var { name: name.clone(), inst }, ty))
            }
            TermItgl::Const(c) => Ok((e.clone(), c.ty())),
            TermItgl::Op { op, lhs, rhs, span } => {
                let (a, b, r) = op.signature();
                let (lhs, u1) = self.infer(lhs)?;
                self.solver.solve(Constraint::Consist(u1, GradualType::Base(a)))?;
                let (rhs, u2) = self.infer(rhs)?;
                self.solver.solve(Constraint::Consist(u2, GradualType::Base(b)))?;
                Ok((TermItgl::Op { op: *op, lhs: Box::new(lhs), rhs: Box::new(rhs), span: *span }, GradualType::Base(r)))
            }
            TermItgl::Lam { param, annot, body } => {
                let (annot, dom) = match annot {
                    Annotation::Explicit(u) => (annot.clone(), u.clone()),
                    _ => {
                        let x = self.fresh();
                        (Annotation::Inferred(x.clone()), x)
                    }
                };
                let (body, cod) = self.with_binding(param, TypeScheme::mono(dom.clone()), |s| s.infer(body))?;
                Ok((TermItgl::Lam { param: param.clone(), annot, body: Box::new(body) }, GradualType::arrow(dom, cod)))
            }
            TermItgl::App { fun, arg, span } => {
                let (fun, u1) = self.infer(fun)?;
                let (arg, u2) = self.infer(arg)?;
                let u1 = self.solver.apply(&u1);
                let (dom, cod) = match u1 {
                    GradualType::Var(_) => {
                        let arrow = GradualType::arrow(self.fresh(), self.fresh());
                        self.solver.solve(Constraint::Equal(u1, arrow.clone()))?;
                        matching(&arrow).expect("arrow")
                    }
                    u => matching(&u).map_err(|_| InferError::NotMatchable(u.clone()))?,
                };
                self.solver.solve(Constraint::Consist(u2, dom))?;
                Ok((TermItgl::App { fun: Box::new(fun), arg: Box::new(arg), span: *span }, cod))
            }
            TermItgl::Let { name, value, body, .. } => {
                let (value, u1) = self.infer(value)?;
                let s = self.solver.subst().clone();
                let u1 = s.apply(&u1);
                let mut blocked = env_ftv(&self.env, &s);
                for t in value.explicit_annotations() {
                    blocked.extend(s.apply(&t).ftv());
                }
                let binders: Vec<TyVar> = u1.ftv_ordered().into_iter().filter(|x| !blocked.contains(x)).collect();
                let sc = TypeScheme::new(binders.clone(), u1);
                let (body, u2) = self.with_binding(name, sc, |s| s.infer(body))?;
                Ok((
                    TermItgl::Let { name: name.clone(), binders, value: Box::new(value), body: Box::new(body) },
                    u2,
                ))
            }
            TermItgl::If { cond, then_branch, else_branch, span } => {
                let (cond, u1) = self.infer(cond)?;
                self.solver.solve(Constraint::Consist(u1, GradualType::BOOL))?;
                let (then_branch, u2) = self.infer(then_branch)?;
                let (else_branch, u3) = self.infer(else_branch)?;
                self.solver.solve(Constraint::Equal(u2.clone(), u3))?;
                Ok((
                    TermItgl::If {
                        cond: Box::new(cond),
                        then_branch: Box::new(then_branch),
                        else_branch: Box::new(else_branch),
                        span: *span,
                    },
                    u2,
                ))
            }
            TermItgl::Ascribe { term, ty, span } => {
                let (term, u) = self.infer(term)?;
                self.solver.solve(Constraint::Consist(u, ty.clone()))?;
                Ok((TermItgl::Ascribe { term: Box::new(term), ty: ty.clone(), span: *span }, ty.clone()))
            }
            TermItgl::Fix { name, param, annot, body, span, .. } => {
                let (annot, dom) = match annot {
                    Annotation::Explicit(u) => (annot.clone(), u.clone()),
                    _ => {
                        let x = self.fresh();
                        (Annotation::Inferred(x.clone()), x)
                    }
                };
                let ret = self.fresh();
                let fty = GradualType::arrow(dom.clone(), ret.clone());
                self.env.push((name.clone(), TypeScheme::mono(fty.clone())));
                let r = self.with_binding(param, TypeScheme::mono(dom), |s| s.infer(body));
                self.env.pop();
                let (body, ub) = r?;
                self.solver.solve(Constraint::Consist(ub, ret.clone()))?;
                Ok((
                    TermItgl::Fix {
                        name: name.clone(),
                        param: param.clone(),
                        annot,
                        ret: Some(ret),
                        body: Box::new(body),
                        span: *span,
                    },
                    fty,
                ))
            }
        }
    }
}

impl TermItgl {
    /// The types of all programmer-written annotations, in order.
    pub fn explicit_annotations(&self) -> Vec<GradualType> {
        let mut out = Vec::new();
        self.walk(&mut |t| match t {
            TermItgl::Lam { annot: Annotation::Explicit(u), .. }
            | TermItgl::Fix { annot: Annotation::Explicit(u), .. }
            | TermItgl::Ascribe { ty: u, .. } => out.push(u.clone()),
            _ => {}
        });
        out
    }
}

/// Checks an annotated term against the declarative typing rules of the
/// surface language and returns its type. Every implicit parameter must
/// carry an inferred static type and every variable its instantiation.
pub fn check_itgl(env: &[(String, TypeScheme)], e: &TermItgl) -> Result<GradualType, InferError> {
    let mut env = env.to_vec();
    check(&mut env, e)
}

fn ill(msg: String) -> InferError {
    InferError::IllTyped(msg)
}

fn check(env: &mut ItglEnv, e: &TermItgl) -> Result<GradualType, InferError> {
    match e {
        TermItgl::Var { name, inst } => {
            let sc = lookup(env, name).ok_or_else(|| InferError::Unbound(name.clone()))?;
            if inst.len() != sc.binders.len() {
                return Err(ill(format!("`{name}` instantiated with {} types, expected {}", inst.len(), sc.binders.len())));
            }
            if let Some(t) = inst.iter().find(|t| !t.is_static()) {
                return Err(ill(format!("`{name}` instantiated with non-static type {t}")));
            }
            let s = TypeSubstitution::try_from_pairs(sc.binders.iter().cloned().zip(inst.iter().cloned()))
                .map_err(|e| ill(e.to_string()))?;
            Ok(s.apply(&sc.body))
        }
        TermItgl::Const(c) => Ok(c.ty()),
        TermItgl::Op { op, lhs, rhs, .. } => {
            let (a, b, r) = op.signature();
            let u1 = check(env, lhs)?;
            let u2 = check(env, rhs)?;
            if !consistent(&u1, &GradualType::Base(a)) || !consistent(&u2, &GradualType::Base(b)) {
                return Err(ill(format!("operands of `{}` have types {u1} and {u2}", op.symbol())));
            }
            Ok(GradualType::Base(r))
        }
        TermItgl::Lam { param, annot, body } => {
            let dom = match annot {
                Annotation::Omitted => return Err(ill(format!("parameter `{param}` has no type"))),
                Annotation::Inferred(t) if !t.is_static() => {
                    return Err(ill(format!("implicit parameter `{param}` has non-static type {t}")))
                }
                Annotation::Explicit(t) | Annotation::Inferred(t) => t.clone(),
            };
            env.push((param.clone(), TypeScheme::mono(dom.clone())));
            let cod = check(env, body);
            env.pop();
            Ok(GradualType::arrow(dom, cod?))
        }
        TermItgl::App { fun, arg, .. } => {
            let u1 = check(env, fun)?;
            let u2 = check(env, arg)?;
            let (dom, cod) = matching(&u1).map_err(|_| InferError::NotMatchable(u1.clone()))?;
            if !consistent(&u2, &dom) {
                return Err(ill(format!("argument of type {u2} passed where {dom} is expected")));
            }
            Ok(cod)
        }
        TermItgl::Let { name, binders, value, body } => {
            if !value.is_value() {
                return Err(ill(format!("`let {name}` binds a non-value")));
            }
            let u1 = check(env, value)?;
            let mut blocked = env_ftv(env, &TypeSubstitution::empty());
            for t in value.explicit_annotations() {
                blocked.extend(t.ftv());
            }
            let expected: BTreeSet<TyVar> = u1.ftv().into_iter().filter(|x| !blocked.contains(x)).collect();
            let got: BTreeSet<TyVar> = binders.iter().cloned().collect();
            if expected != got || got.len() != binders.len() {
                return Err(ill(format!("`let {name}` generalizes the wrong variables")));
            }
            env.push((name.clone(), TypeScheme::new(binders.clone(), u1)));
            let u2 = check(env, body);
            env.pop();
            u2
        }
        TermItgl::If { cond, then_branch, else_branch, .. } => {
            let u1 = check(env, cond)?;
            if !consistent(&u1, &GradualType::BOOL) {
                return Err(ill(format!("condition has type {u1}")));
            }
            let u2 = check(env, then_branch)?;
            let u3 = check(env, else_branch)?;
            if u2 != u3 {
                return Err(ill(format!("branches have types {u2} and {u3}")));
            }
            Ok(u2)
        }
        TermItgl::Ascribe { term, ty, .. } => {
            let u = check(env, term)?;
            if !consistent(&u, ty) {
                return Err(ill(format!("cannot ascribe {ty} to a term of type {u}")));
            }
            Ok(ty.clone())
        }
        TermItgl::Fix { name, param, annot, ret, body, .. } => {
            let dom = match annot {
                Annotation::Omitted => return Err(ill(format!("parameter `{param}` has no type"))),
                Annotation::Inferred(t) if !t.is_static() => {
                    return Err(ill(format!("implicit parameter `{param}` has non-static type {t}")))
                }
                Annotation::Explicit(t) | Annotation::Inferred(t) => t.clone(),
            };
            let ret = match ret {
                Some(t) if t.is_static() => t.clone(),
                _ => return Err(ill(format!("`fix {name}` has no static result type"))),
            };
            let fty = GradualType::arrow(dom.clone(), ret.clone());
            env.push((name.clone(), TypeScheme::mono(fty.clone())));
            env.push((param.clone(), TypeScheme::mono(dom)));
            let ub = check(env, body);
            env.pop();
            env.pop();
            let ub = ub?;
            if !consistent(&ub, &ret) {
                return Err(ill(format!("body of `fix {name}` has type {ub}, expected {ret}")));
            }
            Ok(fty)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_itgl;

    fn infer_src(src: &str) -> Inference {
        infer_principal(&[], &parse_itgl(src).unwrap()).unwrap()
    }

    fn v(n: &str) -> GradualType {
        GradualType::var(n)
    }

    #[test]
    fn solve_spec_constraints() {
        let s = solve([
            Constraint::Consist(v("X"), GradualType::arrow(GradualType::INT, v("Y"))),
            Constraint::Consist(v("Y"), GradualType::Dyn),
        ])
        .unwrap();
        assert_eq!(s.apply(&v("X")), GradualType::arrow(GradualType::INT, v("Y")));
        assert_eq!(s.apply(&v("Y")), v("Y"));
    }

    #[test]
    fn solve_clash() {
        let r = solve([Constraint::Equal(GradualType::INT, GradualType::BOOL)]);
        assert!(matches!(r, Err(InferError::Clash(..))));
    }

    #[test]
    fn solve_occurs() {
        let r = solve([Constraint::Equal(v("X"), GradualType::arrow(v("X"), GradualType::INT))]);
        assert!(matches!(r, Err(InferError::Occurs(..))));
    }

    #[test]
    fn var_consistent_with_dyn_arrow_is_split() {
        let s = solve([Constraint::Consist(v("X"), GradualType::arrow(GradualType::Dyn, GradualType::INT))]).unwrap();
        let t = s.apply(&v("X"));
        let GradualType::Arrow(a, b) = t else { panic!("{t}") };
        assert!(matches!(*a, GradualType::Var(_)));
        assert_eq!(*b, GradualType::INT);
    }

    #[test]
    fn identity_is_polymorphic_at_each_use() {
        let r = infer_src("let id = fun x -> x in if id true then id 1 else 2");
        assert_eq!(r.ty, GradualType::INT);
        check_itgl(&[], &r.term).unwrap();
    }

    #[test]
    fn dynamic_parameter_leaves_residual() {
        let r = infer_src("(fun (x : ?) -> x 2) (fun y -> y)");
        assert_eq!(r.ty, GradualType::Dyn);
        let res = r.residual();
        assert_eq!(res.len(), 1);
        check_itgl(&[], &r.term).unwrap();
    }

    #[test]
    fn self_application_fails_occurs_check() {
        let r = infer_principal(&[], &parse_itgl("fun x -> x x").unwrap());
        assert!(matches!(r, Err(InferError::Occurs(..))));
    }

    #[test]
    fn base_type_application_not_matchable() {
        let r = infer_principal(&[], &parse_itgl("1 2").unwrap());
        assert!(matches!(r, Err(InferError::NotMatchable(_))));
    }

    #[test]
    fn explicit_annotation_variables_not_generalized() {
        let r = infer_src("let f = fun (x : 'a) -> x in f");
        let TermItgl::Let { binders, .. } = &r.term else { panic!() };
        assert!(binders.is_empty());
        assert_eq!(r.ty, GradualType::arrow(v("a"), v("a")));
    }

    #[test]
    fn recursive_function() {
        let r = infer_src("let rec fact n = if n < 1 then 1 else n * fact (n - 1) in fact 5");
        assert_eq!(r.ty, GradualType::INT);
        check_itgl(&[], &r.term).unwrap();
    }

    #[test]
    fn checker_rejects_wrong_instantiation() {
        let r = infer_src("let id = fun x -> x in id 1");
        let bad = r.term.map_types(&mut |t| if *t == GradualType::INT { GradualType::BOOL } else { t.clone() });
        assert!(check_itgl(&[], &bad).is_err());
    }
}
