//! Pieces of syntax shared by the surface language and the cast calculus.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::types::{BaseType, GradualType};

/// Byte range in the source text.
///
/// Spans never distinguish terms: any two spans compare equal, so terms
/// that differ only in where they came from are equal.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }

    /// One-based line and column of the start of the span.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let upto = &src[..self.start.min(src.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A blame label: a cast id plus a polarity. Negating a label flips the
/// polarity so that blame for a function argument lands on the context.
///
/// The source span is only for error messages and is ignored by equality.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BlameLabel {
    pub id: u32,
    pub polarity: Polarity,
    #[serde(skip)]
    pub span: Option<Span>,
}

impl PartialEq for BlameLabel {
    fn eq(&self, other: &Self) -> bool {
        (self.id, self.polarity) == (other.id, other.polarity)
    }
}

impl Eq for BlameLabel {}

impl std::hash::Hash for BlameLabel {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.id, self.polarity).hash(state)
    }
}

impl BlameLabel {
    pub fn new(id: u32) -> Self {
        BlameLabel { id, polarity: Polarity::Positive, span: None }
    }

    pub fn with_span(id: u32, span: Span) -> Self {
        BlameLabel { id, polarity: Polarity::Positive, span: Some(span) }
    }

    pub fn negate(self) -> Self {
        BlameLabel { polarity: self.polarity.flip(), ..self }
    }
}

impl fmt::Display for BlameLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.polarity {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        };
        write!(f, "{}{}", self.id, p)
    }
}

/// Hands out blame labels in increasing id order.
#[derive(Clone, Debug)]
pub struct LabelSupply {
    next: u32,
}

impl Default for LabelSupply {
    fn default() -> Self {
        LabelSupply { next: 1 }
    }
}

impl LabelSupply {
    pub fn starting_at(next: u32) -> Self {
        LabelSupply { next }
    }

    pub fn next_id(&self) -> u32 {
        self.next
    }

    pub fn fresh(&mut self, span: Option<Span>) -> BlameLabel {
        let id = self.next;
        self.next += 1;
        BlameLabel { id, polarity: Polarity::Positive, span }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Const {
    Int(i64),
    Bool(bool),
    Unit,
}

impl Const {
    pub fn base_type(&self) -> BaseType {
        match self {
            Const::Int(_) => BaseType::Int,
            Const::Bool(_) => BaseType::Bool,
            Const::Unit => BaseType::Unit,
        }
    }

    pub fn ty(&self) -> GradualType {
        GradualType::Base(self.base_type())
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(n) if *n < 0 => write!(f, "(-{})", n.unsigned_abs()),
            Const::Int(n) => write!(f, "{n}"),
            Const::Bool(b) => write!(f, "{b}"),
            Const::Unit => f.write_str("()"),
        }
    }
}

/// Binary operators on base values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Eq,
    Lt,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Eq => "=",
            Op::Lt => "<",
        }
    }

    /// Argument and result base types.
    pub fn signature(self) -> (BaseType, BaseType, BaseType) {
        match self {
            Op::Add | Op::Sub | Op::Mul => (BaseType::Int, BaseType::Int, BaseType::Int),
            Op::Eq | Op::Lt => (BaseType::Int, BaseType::Int, BaseType::Bool),
        }
    }

    pub fn result_type(self) -> GradualType {
        GradualType::Base(self.signature().2)
    }

    /// Applies the operator to constants of the right base types.
    pub fn apply(self, a: Const, b: Const) -> Option<Const> {
        let (Const::Int(x), Const::Int(y)) = (a, b) else {
            return None;
        };
        Some(match self {
            Op::Add => Const::Int(x.wrapping_add(y)),
            Op::Sub => Const::Int(x.wrapping_sub(y)),
            Op::Mul => Const::Int(x.wrapping_mul(y)),
            Op::Eq => Const::Bool(x == y),
            Op::Lt => Const::Bool(x < y),
        })
    }

    /// Binding strength in the concrete syntax.
    pub(crate) fn level(self) -> u8 {
        match self {
            Op::Eq | Op::Lt => 1,
            Op::Add | Op::Sub => 2,
            Op::Mul => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negated_label_flips_polarity() {
        let l = BlameLabel::new(3);
        assert_eq!(l.negate().to_string(), "3-");
        assert_eq!(l.negate().negate(), l);
    }

    #[test]
    fn arithmetic_wraps() {
        assert_eq!(Op::Add.apply(Const::Int(i64::MAX), Const::Int(1)), Some(Const::Int(i64::MIN)));
        assert_eq!(Op::Lt.apply(Const::Int(1), Const::Int(2)), Some(Const::Bool(true)));
        assert_eq!(Op::Add.apply(Const::Bool(true), Const::Int(2)), None);
    }

    #[test]
    fn line_col_counts_from_one() {
        let src = "ab\ncd";
        assert_eq!(Span::new(4, 5).line_col(src), (2, 2));
    }
}
