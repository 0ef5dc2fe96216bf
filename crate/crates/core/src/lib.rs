//! An implicitly typed gradual language with let-polymorphism, and the
//! blame calculus with dynamic type inference it compiles to.

pub mod cast;
pub mod dti;
pub mod eval;
pub mod fresh;
pub mod frontend;
pub mod harness;
pub mod infer;
pub mod itgl;
pub mod subst;
pub mod syntax;
pub mod typecheck;
pub mod types;
pub mod pipeline;
pub mod precision;

pub use dti::{TermDti, TypeArg};
pub use itgl::{Annotation, TermItgl};
pub use subst::TypeSubstitution;
pub use syntax::{BlameLabel, Const, Op, Polarity, Span};
pub use types::{consistent, ground_of, matching, BaseType, GradualType, GroundType, TyVar, TypeScheme};
