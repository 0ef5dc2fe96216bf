//! Finite maps from type variables to static types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{GradualType, TyVar, TypeScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("substitutions overlap on {0}")]
    Overlap(TyVar),
    #[error("substitution codomain must be static, got {var} := {ty}")]
    NotStatic { var: TyVar, ty: GradualType },
}

/// A type substitution. Codomain types are always static.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSubstitution {
    map: BTreeMap<TyVar, GradualType>,
}

impl TypeSubstitution {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(x: TyVar, t: GradualType) -> Self {
        let mut s = Self::empty();
        s.insert(x, t);
        s
    }

    pub fn try_from_pairs(
        pairs: impl IntoIterator<Item = (TyVar, GradualType)>,
    ) -> Result<Self, SubstError> {
        let mut s = Self::empty();
        for (x, t) in pairs {
            if !t.is_static() {
                return Err(SubstError::NotStatic { var: x, ty: t });
            }
            if s.map.contains_key(&x) {
                return Err(SubstError::Overlap(x));
            }
            s.map.insert(x, t);
        }
        Ok(s)
    }

    /// Panics in debug builds when `t` is not static.
    pub fn insert(&mut self, x: TyVar, t: GradualType) {
        debug_assert!(t.is_static(), "non-static codomain {x} := {t}");
        self.map.insert(x, t);
    }

    pub fn remove(&mut self, x: &TyVar) -> Option<GradualType> {
        self.map.remove(x)
    }

    pub fn get(&self, x: &TyVar) -> Option<&GradualType> {
        self.map.get(x)
    }

    pub fn contains(&self, x: &TyVar) -> bool {
        self.map.contains_key(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = &TyVar> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TyVar, &GradualType)> {
        self.map.iter()
    }

    /// Free variables of the codomain.
    pub fn range_ftv(&self) -> BTreeSet<TyVar> {
        self.map.values().flat_map(|t| t.ftv()).collect()
    }

    pub fn apply(&self, t: &GradualType) -> GradualType {
        if self.map.is_empty() {
            return t.clone();
        }
        self.apply_changed(t).unwrap_or_else(|| t.clone())
    }

    /// `None` when `t` is unchanged, so untouched subtrees stay shared.
    fn apply_changed(&self, t: &GradualType) -> Option<GradualType> {
        match t {
            GradualType::Var(x) => self.map.get(x).cloned(),
            GradualType::Arrow(a, b) => match (self.apply_changed(a), self.apply_changed(b)) {
                (None, None) => None,
                (a2, b2) => Some(GradualType::Arrow(
                    a2.map(Arc::new).unwrap_or_else(|| Arc::clone(a)),
                    b2.map(Arc::new).unwrap_or_else(|| Arc::clone(b)),
                )),
            },
            _ => None,
        }
    }

    /// Applies the substitution under a scheme, renaming binders that
    /// would capture variables of the codomain.
    pub fn apply_scheme(&self, s: &TypeScheme, avoid: &mut crate::fresh::NameSupply) -> TypeScheme {
        let mut inner = self.clone();
        for b in &s.binders {
            inner.map.remove(b);
        }
        let range = inner.range_ftv();
        let mut binders = Vec::with_capacity(s.binders.len());
        let mut rename = TypeSubstitution::empty();
        for b in &s.binders {
            if range.contains(b) {
                let nb = avoid.fresh_like(b);
                rename.map.insert(b.clone(), GradualType::Var(nb.clone()));
                binders.push(nb);
            } else {
                binders.push(b.clone());
            }
        }
        let body = inner.apply(&rename.apply(&s.body));
        TypeScheme { binders, body }
    }

    /// `self` after `first`: `(self . first)(X) = self(first(X))`.
    pub fn compose(&self, first: &TypeSubstitution) -> TypeSubstitution {
        let mut map: BTreeMap<TyVar, GradualType> =
            first.map.iter().map(|(x, t)| (x.clone(), self.apply(t))).collect();
        for (x, t) in &self.map {
            map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        TypeSubstitution { map }
    }

    pub fn disjoint_union(&self, other: &TypeSubstitution) -> Result<TypeSubstitution, SubstError> {
        let mut map = self.map.clone();
        for (x, t) in &other.map {
            if map.insert(x.clone(), t.clone()).is_some() {
                return Err(SubstError::Overlap(x.clone()));
            }
        }
        Ok(TypeSubstitution { map })
    }

    pub fn restrict(&self, vars: &BTreeSet<TyVar>) -> TypeSubstitution {
        TypeSubstitution {
            map: self.map.iter().filter(|(x, _)| vars.contains(*x)).map(|(x, t)| (x.clone(), t.clone())).collect(),
        }
    }

    pub fn without(&self, vars: &[TyVar]) -> TypeSubstitution {
        let mut s = self.clone();
        for v in vars {
            s.map.remove(v);
        }
        s
    }
}

impl fmt::Display for TypeSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} := {t}")?;
        }
        f.write_str("]")
    }
}
