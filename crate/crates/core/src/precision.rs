//! Precision: when one type or term is more precisely annotated than
//! another.
//!
//! Every judgment carries a substitution `S` for the type variables of the
//! less precise side. A variable `X` on the right relates only to `S(X)`,
//! so all occurrences of `X` must be matched by one static type. The
//! checkers take `S` as input; the `infer_*` functions search for one,
//! binding right-hand variables the first time they are met.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::dti::TermDti;
use crate::fresh::NameSupply;
use crate::itgl::{Annotation, TermItgl};
use crate::subst::TypeSubstitution;
use crate::typecheck::{compatible, has_hole, hole, is_hole, merge, synth};
use crate::types::{consistent, GradualType, TyVar, TypeScheme};

/// No substitution makes the two types related.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("the types are not related by precision under any substitution")]
pub struct Unsat;

/// A derivation of term precision, kept for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: &'static str) -> Self {
        Derivation { rule, premises: Vec::new() }
    }

    fn node(rule: &'static str, premises: Vec<Derivation>) -> Self {
        Derivation { rule, premises }
    }

    /// Number of rule applications in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        writeln!(f, "{:width$}{}", "", self.rule, width = depth * 2)?;
        for p in &self.premises {
            p.fmt_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

/// A substitution under which two terms are related, and the derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionWitness {
    pub subst: TypeSubstitution,
    pub derivation: Derivation,
}

/// `u ⊑S u2`.
pub fn type_prec(u: &GradualType, u2: &GradualType, s: &TypeSubstitution) -> bool {
    Prec::checking(s.clone()).ty(u, u2)
}

/// The least substitution relating `u` to `u2`.
pub fn infer_prec_subst(u: &GradualType, u2: &GradualType) -> Result<TypeSubstitution, Unsat> {
    let mut p = Prec::inferring();
    if p.ty(u, u2) {
        Ok(p.s)
    } else {
        Err(Unsat)
    }
}

/// `e ⊑S e2` on surface terms. Parameters must have the same names on
/// both sides. Annotations filled in by inference count as omitted.
pub fn term_prec_itgl(e: &TermItgl, e2: &TermItgl, s: &TypeSubstitution) -> bool {
    Prec::checking(s.clone()).itgl(e, e2)
}

/// Searches for a substitution relating two surface terms.
pub fn infer_term_prec_itgl(e: &TermItgl, e2: &TermItgl) -> Option<TypeSubstitution> {
    let mut p = Prec::inferring();
    p.itgl(e, e2).then_some(p.s)
}

/// `env ⊢ f : u ⊑S u2 : f2 ⊣ env2`.
pub fn term_prec_dti(
    env: &[(String, TypeScheme)],
    f: &TermDti,
    u: &GradualType,
    s: &TypeSubstitution,
    u2: &GradualType,
    f2: &TermDti,
    env2: &[(String, TypeScheme)],
) -> bool {
    let mut p = Prec::checking(s.clone());
    match p.dti(&mut env.to_vec(), f, &mut env2.to_vec(), f2) {
        Some((t, t2, _)) => compatible(&t, u) && compatible(&t2, u2) && p.ty(u, u2),
        None => false,
    }
}

/// Searches for a substitution relating two cast calculus terms. When a
/// cast could be matched by more than one rule, the first rule that
/// succeeds locally is kept, in the order: both sides, left only, right
/// only.
pub fn infer_term_prec_dti(
    env: &[(String, TypeScheme)],
    f: &TermDti,
    f2: &TermDti,
    env2: &[(String, TypeScheme)],
) -> Option<PrecisionWitness> {
    let mut p = Prec::inferring();
    let (t, t2, derivation) = p.dti(&mut env.to_vec(), f, &mut env2.to_vec(), f2)?;
    p.ty(&t, &t2).then_some(PrecisionWitness { subst: p.s, derivation })
}

type Rel = (GradualType, GradualType, Derivation);

#[derive(Clone)]
struct Prec {
    s: TypeSubstitution,
    /// Bind any unbound right-hand variable on first use.
    infer: bool,
    /// Right-hand let binders, which may be bound locally in either mode.
    flex: BTreeSet<TyVar>,
}

impl Prec {
    fn checking(s: TypeSubstitution) -> Self {
        Prec { s, infer: false, flex: BTreeSet::new() }
    }

    fn inferring() -> Self {
        Prec { s: TypeSubstitution::empty(), infer: true, flex: BTreeSet::new() }
    }

    /// Type precision. The type of `blame` relates to anything.
    fn ty(&mut self, u: &GradualType, u2: &GradualType) -> bool {
        if is_hole(u) || is_hole(u2) {
            return true;
        }
        match (u, u2) {
            (_, GradualType::Dyn) => true,
            (_, GradualType::Var(x)) => match self.s.get(x) {
                Some(t) => t == u,
                None if (self.infer || self.flex.contains(x)) && u.is_static() => {
                    if !has_hole(u) {
                        self.s.insert(x.clone(), u.clone());
                    }
                    true
                }
                None => false,
            },
            (GradualType::Base(a), GradualType::Base(b)) => a == b,
            (GradualType::Arrow(a1, a2), GradualType::Arrow(b1, b2)) => self.ty(a1, b1) && self.ty(a2, b2),
            _ => false,
        }
    }

    fn itgl(&mut self, e: &TermItgl, e2: &TermItgl) -> bool {
        use TermItgl as E;
        match (e, e2) {
            (E::Var { name: x, .. }, E::Var { name: y, .. }) => x == y,
            (E::Const(a), E::Const(b)) => a == b,
            (E::Op { op: o1, lhs: l1, rhs: r1, .. }, E::Op { op: o2, lhs: l2, rhs: r2, .. }) => {
                o1 == o2 && self.itgl(l1, l2) && self.itgl(r1, r2)
            }
            (E::Lam { param: x, annot: a, body: b }, E::Lam { param: y, annot: a2, body: b2 }) => {
                x == y && self.annot(a, a2) && self.itgl(b, b2)
            }
            (E::App { fun: f1, arg: a1, .. }, E::App { fun: f2, arg: a2, .. }) => {
                self.itgl(f1, f2) && self.itgl(a1, a2)
            }
            (E::Let { name: x, value: v, body: b, .. }, E::Let { name: y, value: v2, body: b2, .. }) => {
                x == y && self.itgl(v, v2) && self.itgl(b, b2)
            }
            (
                E::If { cond: c, then_branch: t, else_branch: f, .. },
                E::If { cond: c2, then_branch: t2, else_branch: f2, .. },
            ) => self.itgl(c, c2) && self.itgl(t, t2) && self.itgl(f, f2),
            (E::Ascribe { term: t, ty: u, .. }, E::Ascribe { term: t2, ty: u2, .. }) => {
                self.ty(u, u2) && self.itgl(t, t2)
            }
            (
                E::Fix { name: g, param: x, annot: a, body: b, .. },
                E::Fix { name: g2, param: x2, annot: a2, body: b2, .. },
            ) => g == g2 && x == x2 && self.annot(a, a2) && self.itgl(b, b2),
            _ => false,
        }
    }

    /// The four lambda rules.
    fn annot(&mut self, a: &Annotation, a2: &Annotation) -> bool {
        match (a.explicit(), a2.explicit()) {
            (None, None) => true,
            (None, Some(u2)) => u2.is_dyn(),
            (Some(t), None) => t.is_static(),
            (Some(u), Some(u2)) => self.ty(u, u2),
        }
    }

    fn dti(
        &mut self,
        env: &mut Vec<(String, TypeScheme)>,
        f: &TermDti,
        env2: &mut Vec<(String, TypeScheme)>,
        f2: &TermDti,
    ) -> Option<Rel> {
        use TermDti as F;
        if let F::Blame(_) = f {
            let u2 = synth(env2, f2).ok()?;
            return Some((hole(), u2, Derivation::leaf("P_Blame")));
        }
        match (f, f2) {
            (F::Cast { .. }, F::Cast { .. }) => {
                for rule in [Self::p_cast, Self::p_cast_l, Self::p_cast_r] {
                    let saved = self.clone();
                    if let Some(r) = rule(self, env, f, env2, f2) {
                        return Some(r);
                    }
                    *self = saved;
                }
                None
            }
            (F::Cast { .. }, _) => self.p_cast_l(env, f, env2, f2),
            (_, F::Cast { .. }) => self.p_cast_r(env, f, env2, f2),
            (F::Var { name: x, .. }, F::Var { name: y, .. }) if x == y => {
                let u = synth(env, f).ok()?;
                let u2 = synth(env2, f2).ok()?;
                self.ty(&u, &u2).then(|| (u, u2, Derivation::leaf("P_VarP")))
            }
            (F::Const(a), F::Const(b)) if a == b => Some((a.ty(), b.ty(), Derivation::leaf("P_Const"))),
            (F::Op { op: o1, lhs: l1, rhs: r1 }, F::Op { op: o2, lhs: l2, rhs: r2 }) if o1 == o2 => {
                let (a, b, r) = o1.signature();
                let (a, b) = (GradualType::Base(a), GradualType::Base(b));
                let (tl, tl2, dl) = self.dti(env, l1, env2, l2)?;
                let (tr, tr2, dr) = self.dti(env, r1, env2, r2)?;
                let typed = compatible(&tl, &a) && compatible(&tl2, &a) && compatible(&tr, &b) && compatible(&tr2, &b);
                typed.then(|| (GradualType::Base(r), GradualType::Base(r), Derivation::node("P_Op", vec![dl, dr])))
            }
            (F::Lam { param: x, ty: u, body: b }, F::Lam { param: y, ty: u2, body: b2 }) if x == y => {
                if !self.ty(u, u2) {
                    return None;
                }
                env.push((x.clone(), TypeScheme::mono(u.clone())));
                env2.push((y.clone(), TypeScheme::mono(u2.clone())));
                let r = self.dti(env, b, env2, b2);
                env.pop();
                env2.pop();
                let (c, c2, d) = r?;
                Some((GradualType::arrow(u.clone(), c), GradualType::arrow(u2.clone(), c2), Derivation::node("P_Abs", vec![d])))
            }
            (F::App { fun: g, arg: a }, F::App { fun: g2, arg: a2 }) => {
                let (tg, tg2, dg) = self.dti(env, g, env2, g2)?;
                let (ta, ta2, da) = self.dti(env, a, env2, a2)?;
                let c = apply_type(&tg, &ta)?;
                let c2 = apply_type(&tg2, &ta2)?;
                Some((c, c2, Derivation::node("P_App", vec![dg, da])))
            }
            (
                F::If { cond: c, then_branch: t, else_branch: e },
                F::If { cond: c2, then_branch: t2, else_branch: e2 },
            ) => {
                let (tc, tc2, dc) = self.dti(env, c, env2, c2)?;
                if !compatible(&tc, &GradualType::BOOL) || !compatible(&tc2, &GradualType::BOOL) {
                    return None;
                }
                let (tt, tt2, dt) = self.dti(env, t, env2, t2)?;
                let (te, te2, de) = self.dti(env, e, env2, e2)?;
                if !compatible(&tt, &te) || !compatible(&tt2, &te2) {
                    return None;
                }
                Some((merge(&tt, &te), merge(&tt2, &te2), Derivation::node("P_If", vec![dc, dt, de])))
            }
            (
                F::Fix { name: g, param: x, param_ty: u, ret_ty: r, body: b },
                F::Fix { name: g2, param: x2, param_ty: u2, ret_ty: r2, body: b2 },
            ) if g == g2 && x == x2 => {
                if !self.ty(u, u2) || !self.ty(r, r2) {
                    return None;
                }
                let ft = GradualType::arrow(u.clone(), r.clone());
                let ft2 = GradualType::arrow(u2.clone(), r2.clone());
                env.push((g.clone(), TypeScheme::mono(ft.clone())));
                env.push((x.clone(), TypeScheme::mono(u.clone())));
                env2.push((g2.clone(), TypeScheme::mono(ft2.clone())));
                env2.push((x2.clone(), TypeScheme::mono(u2.clone())));
                let res = self.dti(env, b, env2, b2);
                env.truncate(env.len() - 2);
                env2.truncate(env2.len() - 2);
                let (tb, tb2, d) = res?;
                (compatible(&tb, r) && compatible(&tb2, r2)).then(|| (ft, ft2, Derivation::node("P_Fix", vec![d])))
            }
            (
                F::Let { name: x, binders: xs, value: w, body: b },
                F::Let { name: y, binders: ys, value: w2, body: b2 },
            ) if x == y => self.p_let(env, (x, xs, w, b), env2, (ys, w2, b2)),
            _ => None,
        }
    }

    fn p_cast(
        &mut self,
        env: &mut Vec<(String, TypeScheme)>,
        f: &TermDti,
        env2: &mut Vec<(String, TypeScheme)>,
        f2: &TermDti,
    ) -> Option<Rel> {
        let TermDti::Cast { term, from, to, .. } = f else { return None };
        let TermDti::Cast { term: term2, from: from2, to: to2, .. } = f2 else { return None };
        if !consistent(from, to) || !consistent(from2, to2) {
            return None;
        }
        let (t, t2, d) = self.dti(env, term, env2, term2)?;
        let ok = compatible(&t, from) && compatible(&t2, from2) && self.ty(from, from2) && self.ty(to, to2);
        ok.then(|| (to.clone(), to2.clone(), Derivation::node("P_Cast", vec![d])))
    }

    fn p_cast_l(
        &mut self,
        env: &mut Vec<(String, TypeScheme)>,
        f: &TermDti,
        env2: &mut Vec<(String, TypeScheme)>,
        f2: &TermDti,
    ) -> Option<Rel> {
        let TermDti::Cast { term, from, to, .. } = f else { return None };
        if !consistent(from, to) {
            return None;
        }
        let (t, t2, d) = self.dti(env, term, env2, f2)?;
        let ok = compatible(&t, from) && self.ty(from, &t2) && self.ty(to, &t2);
        ok.then(|| (to.clone(), t2, Derivation::node("P_CastL", vec![d])))
    }

    fn p_cast_r(
        &mut self,
        env: &mut Vec<(String, TypeScheme)>,
        f: &TermDti,
        env2: &mut Vec<(String, TypeScheme)>,
        f2: &TermDti,
    ) -> Option<Rel> {
        let TermDti::Cast { term: term2, from: from2, to: to2, .. } = f2 else { return None };
        if !consistent(from2, to2) {
            return None;
        }
        let (t, t2, d) = self.dti(env, f, env2, term2)?;
        let ok = compatible(&t2, from2) && self.ty(&t, from2) && self.ty(&t, to2);
        ok.then(|| (t, to2.clone(), Derivation::node("P_CastR", vec![d])))
    }

    /// Polymorphic let. The right binders may be bound to types of the
    /// left side while the values are compared; the left binders are
    /// renamed first when `S` mentions them.
    fn p_let(
        &mut self,
        env: &mut Vec<(String, TypeScheme)>,
        (x, xs, w, b): (&String, &Vec<TyVar>, &TermDti, &TermDti),
        env2: &mut Vec<(String, TypeScheme)>,
        (ys, w2, b2): (&Vec<TyVar>, &TermDti, &TermDti),
    ) -> Option<Rel> {
        if !w.is_value() || !w2.is_value() {
            return None;
        }
        let (xs, w) = self.rename_captured(xs, w);
        let outer: Vec<(TyVar, Option<GradualType>)> = ys.iter().map(|y| (y.clone(), self.s.remove(y))).collect();
        let outer_flex = self.flex.clone();
        self.flex.extend(ys.iter().cloned());
        let r = self.dti(env, &w, env2, w2);
        for (y, old) in outer {
            self.s.remove(&y);
            if let Some(t) = old {
                self.s.insert(y, t);
            }
        }
        self.flex = outer_flex;
        let (u1, u1b, dv) = r?;
        let range = self.s.range_ftv();
        if xs.iter().any(|x| range.contains(x)) {
            return None;
        }
        env.push((x.clone(), TypeScheme::new(xs, u1)));
        env2.push((x.clone(), TypeScheme::new(ys.clone(), u1b)));
        let r = self.dti(env, b, env2, b2);
        env.pop();
        env2.pop();
        let (t, t2, db) = r?;
        Some((t, t2, Derivation::node("P_LetP", vec![dv, db])))
    }

    fn rename_captured(&self, xs: &[TyVar], w: &TermDti) -> (Vec<TyVar>, TermDti) {
        let range = self.s.range_ftv();
        if !xs.iter().any(|x| range.contains(x)) {
            return (xs.to_vec(), w.clone());
        }
        let mut names = NameSupply::new("");
        names.avoid_all(&range);
        names.avoid_all(&w.all_tyvars());
        names.avoid_all(self.s.domain());
        let mut rename = TypeSubstitution::empty();
        let fresh = xs
            .iter()
            .map(|x| {
                if range.contains(x) {
                    let nx = names.fresh_like(x);
                    rename.insert(x.clone(), GradualType::Var(nx.clone()));
                    nx
                } else {
                    x.clone()
                }
            })
            .collect();
        (fresh, w.apply_subst(&rename))
    }
}

/// Result type of applying a function of type `tf` to an argument of
/// type `ta`, as the typing rule for application demands.
fn apply_type(tf: &GradualType, ta: &GradualType) -> Option<GradualType> {
    match tf {
        GradualType::Arrow(d, c) if compatible(ta, d) => Some((**c).clone()),
        t if is_hole(t) => Some(hole()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cast::insert_casts;
    use crate::frontend::{parse_dti, parse_itgl, parse_type};
    use crate::infer::infer_principal;

    fn t(src: &str) -> GradualType {
        parse_type(src).unwrap()
    }

    fn s(pairs: &[(&str, &str)]) -> TypeSubstitution {
        TypeSubstitution::try_from_pairs(pairs.iter().map(|(x, u)| (TyVar::new(*x), t(u)))).unwrap()
    }

    #[test]
    fn type_variable_instantiated_once() {
        assert!(type_prec(&t("int -> 'X"), &t("'X -> ?"), &s(&[("X", "int")])));
        assert!(!type_prec(&t("int -> 'X"), &t("'X -> ?"), &s(&[])));
        assert!(!type_prec(&t("bool -> 'X"), &t("'X -> ?"), &s(&[("X", "int")])));
        assert!(type_prec(&GradualType::Dyn, &GradualType::Dyn, &s(&[])));
        assert!(type_prec(&t("'X"), &t("'X"), &s(&[("X", "'X")])));
    }

    #[test]
    fn no_substitution_relates_to_a_repeated_variable() {
        assert_eq!(infer_prec_subst(&t("int -> bool"), &t("'X -> 'X")), Err(Unsat));
        for u in ["int", "bool", "int -> bool", "'X"] {
            assert!(!type_prec(&t("int -> bool"), &t("'X -> 'X"), &s(&[("X", u)])));
        }
    }

    #[test]
    fn inferred_substitution_is_least() {
        let got = infer_prec_subst(&t("int -> bool"), &t("'X -> 'Y")).unwrap();
        assert_eq!(got, s(&[("X", "int"), ("Y", "bool")]));
        assert!(type_prec(&t("int -> bool"), &t("'X -> 'Y"), &got));
        assert_eq!(infer_prec_subst(&GradualType::INT, &GradualType::Dyn).unwrap(), s(&[]));
        assert_eq!(infer_prec_subst(&t("? -> int"), &t("'X -> int")), Err(Unsat));
        assert_eq!(infer_prec_subst(&t("?"), &t("int")), Err(Unsat));
    }

    #[test]
    fn lambda_rules() {
        let e = |src| parse_itgl(src).unwrap();
        let empty = s(&[]);
        // implicit parameter against a dynamic one, and static against implicit
        assert!(term_prec_itgl(&e("fun x -> x"), &e("fun (x : ?) -> x"), &empty));
        assert!(term_prec_itgl(&e("fun (x : int) -> x"), &e("fun x -> x"), &empty));
        assert!(!term_prec_itgl(&e("fun x -> x"), &e("fun (x : int) -> x"), &empty));
        assert!(!term_prec_itgl(&e("fun (x : ?) -> x"), &e("fun x -> x"), &empty));
        assert!(!term_prec_itgl(&e("fun x -> x"), &e("fun y -> y"), &empty));
        assert!(term_prec_itgl(&e("fun (x : int) -> x"), &e("fun (x : 'X) -> x"), &s(&[("X", "int")])));
        assert_eq!(infer_term_prec_itgl(&e("fun (x : int) -> x"), &e("fun (x : 'X) -> x")), Some(s(&[("X", "int")])));
    }

    #[test]
    fn replacing_an_annotation_with_dynamic() {
        let e = parse_itgl("(fun (x : ? -> ?) -> x 2) (fun (y : int) -> y)").unwrap();
        let e2 = parse_itgl("(fun (x : ?) -> x 2) (fun (y : ?) -> y)").unwrap();
        assert_eq!(infer_term_prec_itgl(&e, &e2), Some(s(&[])));
        assert!(infer_term_prec_itgl(&e2, &e).is_none());
    }

    #[test]
    fn unannotated_terms_are_related_to_themselves() {
        let e = parse_itgl("let f = fun x -> x in if f true then f 1 else 2 + 3").unwrap();
        assert!(term_prec_itgl(&e, &e, &s(&[])));
    }

    fn translated(src: &str) -> Translation {
        let inf = infer_principal(&[], &parse_itgl(src).unwrap()).unwrap();
        insert_casts(&[], &inf.term).unwrap()
    }
    use crate::cast::Translation;

    #[test]
    fn translations_of_related_programs_are_related() {
        let a = translated("(fun (x : ? -> ?) -> x 2) (fun (y : int) -> y)");
        let b = translated("(fun (x : ?) -> x 2) (fun (y : ?) -> y)");
        let c = translated("(fun (x : ?) -> x 2) (fun y -> y)");
        let w = infer_term_prec_dti(&[], &a.term, &b.term, &[]).expect("related");
        assert!(term_prec_dti(&[], &a.term, &a.ty, &w.subst, &b.ty, &b.term, &[]));
        let w = infer_term_prec_dti(&[], &a.term, &c.term, &[]).expect("related");
        assert_eq!(w.subst, s(&[("a0", "int")]));
        assert!(w.derivation.size() > 5);
    }

    #[test]
    fn blame_is_below_everything() {
        let w2 = parse_dti("(fun (x : int) -> x) 3").unwrap();
        let b = parse_dti("blame 1+").unwrap();
        assert!(term_prec_dti(&[], &b, &GradualType::INT, &s(&[]), &GradualType::INT, &w2, &[]));
        assert!(!term_prec_dti(&[], &w2, &GradualType::INT, &s(&[]), &GradualType::INT, &b, &[]));
        let ill = parse_dti("1 + true").unwrap();
        assert!(!term_prec_dti(&[], &b, &GradualType::INT, &s(&[]), &GradualType::INT, &ill, &[]));
    }

    #[test]
    fn cast_rules() {
        let f = parse_dti("1 : int =>[1+] ?").unwrap();
        let one = parse_dti("1").unwrap();
        let f2 = parse_dti("1 : int =>[1+] ? =>[2+] int =>[3+] ?").unwrap();
        let empty = s(&[]);
        // cast only on the left: int <= ? fails the P_CastL premise ? <= int
        assert!(!term_prec_dti(&[], &f, &GradualType::Dyn, &empty, &GradualType::INT, &one, &[]));
        assert!(term_prec_dti(&[], &one, &GradualType::INT, &empty, &GradualType::Dyn, &f, &[]));
        assert!(term_prec_dti(&[], &f, &GradualType::Dyn, &empty, &GradualType::Dyn, &f2, &[]));
    }

    #[test]
    fn let_binders_on_the_right_are_local() {
        let f = parse_dti("let i = fun (x : int) -> x in i 1").unwrap();
        let f2 = parse_dti("let i = /\\ 'a. fun (x : 'a) -> x in i[int] 1").unwrap();
        let empty = s(&[]);
        assert!(term_prec_dti(&[], &f, &GradualType::INT, &empty, &GradualType::INT, &f2, &[]));
        let w = infer_term_prec_dti(&[], &f, &f2, &[]).unwrap();
        assert!(w.subst.is_empty());
        assert!(!term_prec_dti(&[], &f2, &GradualType::INT, &empty, &GradualType::INT, &f, &[]));
    }

    #[test]
    fn left_binders_are_renamed_away_from_the_substitution() {
        let f = parse_dti("(fun (y : 'a) -> let i = /\\ 'a. fun (x : 'a) -> x in i[int] 1) : 'a -> int =>[1+] ?").unwrap();
        let f2 = parse_dti("(fun (y : 'b) -> let i = /\\ 'a. fun (x : 'a) -> x in i[int] 1) : 'b -> int =>[1+] ?").unwrap();
        let sub = s(&[("b", "'a")]);
        assert!(term_prec_dti(&[], &f, &GradualType::Dyn, &sub, &GradualType::Dyn, &f2, &[]));
    }
}
