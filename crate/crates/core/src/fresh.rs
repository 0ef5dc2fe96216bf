//! Fresh type variable names.

use std::collections::BTreeSet;

use crate::types::{GradualType, TyVar};

/// Hands out names `prefix0`, `prefix1`, ... skipping every name it has
/// been told about.
#[derive(Clone, Debug)]
pub struct NameSupply {
    prefix: String,
    next: usize,
    used: BTreeSet<String>,
}

impl NameSupply {
    pub fn new(prefix: impl Into<String>) -> Self {
        NameSupply { prefix: prefix.into(), next: 0, used: BTreeSet::new() }
    }

    pub fn starting_at(prefix: impl Into<String>, next: usize) -> Self {
        NameSupply { prefix: prefix.into(), next, used: BTreeSet::new() }
    }

    pub fn avoid(&mut self, x: &TyVar) {
        self.used.insert(x.0.clone());
    }

    pub fn avoid_all<'a>(&mut self, xs: impl IntoIterator<Item = &'a TyVar>) {
        for x in xs {
            self.avoid(x);
        }
    }

    /// Moves the counter past every `prefix<n>` already in use.
    pub fn skip_past_used(&mut self) {
        for name in &self.used {
            if let Some(rest) = name.strip_prefix(&self.prefix) {
                if let Ok(n) = rest.parse::<usize>() {
                    self.next = self.next.max(n + 1);
                }
            }
        }
    }

    pub fn next_index(&self) -> usize {
        self.next
    }

    pub fn fresh(&mut self) -> TyVar {
        loop {
            let name = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if self.used.insert(name.clone()) {
                return TyVar(name);
            }
        }
    }

    pub fn fresh_type(&mut self) -> GradualType {
        GradualType::Var(self.fresh())
    }

    /// A fresh variant of an existing name, used when renaming binders.
    pub fn fresh_like(&mut self, x: &TyVar) -> TyVar {
        let mut k = 1;
        loop {
            let name = format!("{}_{}", x.0, k);
            k += 1;
            if self.used.insert(name.clone()) {
                return TyVar(name);
            }
        }
    }
}
