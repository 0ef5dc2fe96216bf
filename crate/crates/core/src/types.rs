//! Gradual types, ground types and the relations between them.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Base types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseType {
    Int,
    Bool,
    Unit,
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseType::Int => "int",
            BaseType::Bool => "bool",
            BaseType::Unit => "unit",
        })
    }
}

/// A type variable. The name is stored without the leading quote.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TyVar(pub String);

impl TyVar {
    pub fn new(name: impl Into<String>) -> Self {
        TyVar(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}", self.0)
    }
}

/// Gradual types: the dynamic type, type variables, base types and arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GradualType {
    Dyn,
    Var(TyVar),
    Base(BaseType),
    // shared, since evaluation copies the same large types into many casts
    Arrow(Arc<GradualType>, Arc<GradualType>),
}

/// Ground types: base types and `? -> ?`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroundType {
    Base(BaseType),
    DynArrow,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("type {0} has no ground type")]
    NoGround(GradualType),
    #[error("type {0} is not a function type")]
    NotMatchable(GradualType),
}

impl GradualType {
    pub const INT: GradualType = GradualType::Base(BaseType::Int);
    pub const BOOL: GradualType = GradualType::Base(BaseType::Bool);
    pub const UNIT: GradualType = GradualType::Base(BaseType::Unit);

    pub fn var(name: impl Into<String>) -> Self {
        GradualType::Var(TyVar::new(name))
    }

    pub fn arrow(dom: GradualType, cod: GradualType) -> Self {
        GradualType::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn dyn_arrow() -> Self {
        GradualType::arrow(GradualType::Dyn, GradualType::Dyn)
    }

    /// True when the type contains no occurrence of `?`.
    pub fn is_static(&self) -> bool {
        match self {
            GradualType::Dyn => false,
            GradualType::Var(_) | GradualType::Base(_) => true,
            GradualType::Arrow(a, b) => a.is_static() && b.is_static(),
        }
    }

    pub fn is_dyn(&self) -> bool {
        matches!(self, GradualType::Dyn)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            GradualType::Base(_) => true,
            GradualType::Arrow(a, b) => a.is_dyn() && b.is_dyn(),
            _ => false,
        }
    }

    pub fn as_ground(&self) -> Option<GroundType> {
        match self {
            GradualType::Base(b) => Some(GroundType::Base(*b)),
            GradualType::Arrow(a, b) if a.is_dyn() && b.is_dyn() => Some(GroundType::DynArrow),
            _ => None,
        }
    }

    /// Free type variables in order of first occurrence.
    pub fn ftv_ordered(&self) -> Vec<TyVar> {
        let mut out = Vec::new();
        self.collect_ftv(&mut out);
        out
    }

    pub fn ftv(&self) -> BTreeSet<TyVar> {
        self.ftv_ordered().into_iter().collect()
    }

    pub(crate) fn collect_ftv(&self, out: &mut Vec<TyVar>) {
        match self {
            GradualType::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            GradualType::Arrow(a, b) => {
                a.collect_ftv(out);
                b.collect_ftv(out);
            }
            _ => {}
        }
    }

    pub fn occurs(&self, x: &TyVar) -> bool {
        match self {
            GradualType::Var(y) => x == y,
            GradualType::Arrow(a, b) => a.occurs(x) || b.occurs(x),
            _ => false,
        }
    }

    /// Number of arrow constructors.
    pub fn arrow_count(&self) -> usize {
        match self {
            GradualType::Arrow(a, b) => 1 + a.arrow_count() + b.arrow_count(),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GradualType::Arrow(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Renames variables through `f`, leaving the rest of the type alone.
    pub fn map_vars(&self, f: &mut impl FnMut(&TyVar) -> GradualType) -> GradualType {
        match self {
            GradualType::Var(x) => f(x),
            GradualType::Arrow(a, b) => GradualType::arrow(a.map_vars(f), b.map_vars(f)),
            t => t.clone(),
        }
    }
}

impl From<GroundType> for GradualType {
    fn from(g: GroundType) -> Self {
        match g {
            GroundType::Base(b) => GradualType::Base(b),
            GroundType::DynArrow => GradualType::dyn_arrow(),
        }
    }
}

impl fmt::Display for GroundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        GradualType::from(*self).fmt(f)
    }
}

impl fmt::Display for GradualType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradualType::Dyn => f.write_str("?"),
            GradualType::Var(x) => x.fmt(f),
            GradualType::Base(b) => b.fmt(f),
            GradualType::Arrow(a, b) => {
                if matches!(**a, GradualType::Arrow(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

/// Type consistency. Reflexive and symmetric but not transitive; a type
/// variable is only consistent with itself and `?`.
pub fn consistent(a: &GradualType, b: &GradualType) -> bool {
    use GradualType::*;
    match (a, b) {
        (Dyn, _) | (_, Dyn) => true,
        (Base(x), Base(y)) => x == y,
        (Var(x), Var(y)) => x == y,
        (Arrow(a1, a2), Arrow(b1, b2)) => consistent(a1, b1) && consistent(a2, b2),
        _ => false,
    }
}

/// The ground type a non-dynamic, non-variable type is tagged with.
pub fn ground_of(u: &GradualType) -> Result<GroundType, TypeError> {
    match u {
        GradualType::Base(b) => Ok(GroundType::Base(*b)),
        GradualType::Arrow(..) => Ok(GroundType::DynArrow),
        _ => Err(TypeError::NoGround(u.clone())),
    }
}

/// Views a type as a function type: `?` matches `? -> ?`.
pub fn matching(u: &GradualType) -> Result<(GradualType, GradualType), TypeError> {
    match u {
        GradualType::Dyn => Ok((GradualType::Dyn, GradualType::Dyn)),
        GradualType::Arrow(a, b) => Ok(((**a).clone(), (**b).clone())),
        _ => Err(TypeError::NotMatchable(u.clone())),
    }
}

/// A type scheme `forall X1 .. Xn. U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeScheme {
    pub binders: Vec<TyVar>,
    pub body: GradualType,
}

impl TypeScheme {
    pub fn mono(body: GradualType) -> Self {
        TypeScheme { binders: Vec::new(), body }
    }

    pub fn new(binders: Vec<TyVar>, body: GradualType) -> Self {
        TypeScheme { binders, body }
    }

    pub fn ftv(&self) -> BTreeSet<TyVar> {
        let mut s = self.body.ftv();
        for b in &self.binders {
            s.remove(b);
        }
        s
    }
}

impl fmt::Display for TypeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.binders.is_empty() {
            return self.body.fmt(f);
        }
        f.write_str("forall")?;
        for b in &self.binders {
            write!(f, " {b}")?;
        }
        write!(f, ". {}", self.body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> GradualType {
        GradualType::var("X")
    }

    #[test]
    fn consistency_examples() {
        let ii = GradualType::arrow(GradualType::INT, GradualType::INT);
        let di = GradualType::arrow(GradualType::Dyn, GradualType::INT);
        assert!(consistent(&ii, &di));
        assert!(!consistent(&x(), &GradualType::INT));
        assert!(consistent(&x(), &GradualType::Dyn));
        assert!(consistent(&x(), &x()));
        assert!(!consistent(&x(), &GradualType::var("Y")));
    }

    #[test]
    fn consistency_is_not_transitive() {
        let a = GradualType::INT;
        let b = GradualType::Dyn;
        let c = GradualType::BOOL;
        assert!(consistent(&a, &b) && consistent(&b, &c));
        assert!(!consistent(&a, &c));
    }

    #[test]
    fn ground_of_examples() {
        let t = GradualType::arrow(GradualType::INT, GradualType::BOOL);
        assert_eq!(ground_of(&t), Ok(GroundType::DynArrow));
        assert_eq!(ground_of(&GradualType::INT), Ok(GroundType::Base(BaseType::Int)));
        assert!(ground_of(&x()).is_err());
        assert!(ground_of(&GradualType::Dyn).is_err());
    }

    #[test]
    fn matching_examples() {
        assert_eq!(matching(&GradualType::Dyn), Ok((GradualType::Dyn, GradualType::Dyn)));
        assert!(matching(&GradualType::INT).is_err());
        assert!(matching(&x()).is_err());
    }

    #[test]
    fn display_arrows_associate_right() {
        let t = GradualType::arrow(
            GradualType::arrow(GradualType::INT, GradualType::Dyn),
            GradualType::arrow(x(), GradualType::BOOL),
        );
        assert_eq!(t.to_string(), "(int -> ?) -> 'X -> bool");
    }

    #[test]
    fn ftv_in_first_occurrence_order() {
        let t = GradualType::arrow(GradualType::var("b"), GradualType::arrow(GradualType::var("a"), GradualType::var("b")));
        assert_eq!(t.ftv_ordered(), vec![TyVar::new("b"), TyVar::new("a")]);
    }
}
