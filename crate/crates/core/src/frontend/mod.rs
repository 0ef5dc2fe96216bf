//! Lexing, parsing and printing for both languages.
//!
//! Surface programs use `fun x -> e`, `fun (x : U) -> e`, `let x = e in e`,
//! `let rec f x = e in e`, `if`, `fix f x -> e` and ascriptions `(e : U)`.
//! Cast calculus terms additionally have casts `f : U =>[1+] U'`,
//! `blame 1-`, type applications `x[int, nu]` and polymorphic lets
//! `let x = /\ 'a. w in f`, and recursive functions are written
//! `fix f (x : U) : U' = f`. Line comments start with `--`.
//!
//! A program is a list of top-level `let x = e` declarations followed by
//! an optional expression. A declaration directly followed by an
//! expression must end in `;;`.

mod lexer;
mod parser;
mod print;

use thiserror::Error;

use crate::dti::TermDti;
use crate::itgl::TermItgl;
use crate::syntax::Span;
use crate::types::GradualType;

pub use print::{print_dti, print_itgl, print_type, PrintOptions};

use parser::Parser;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    ValueRestriction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub line: usize,
    pub col: usize,
    pub span: Span,
}

impl ParseError {
    pub(crate) fn at(src: &str, span: Span, message: impl Into<String>) -> Self {
        let (line, col) = span.line_col(src);
        ParseError { kind: ParseErrorKind::Syntax, message: message.into(), line, col, span }
    }
}

/// A warning produced while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Note {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Reject `let x = e in e'` when `e` is not a value instead of
    /// reading it as `(fun x -> e') e`.
    pub strict_value_restriction: bool,
}

/// A top-level `let x = e` without `in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: String,
    pub rhs: TermItgl,
    pub span: Span,
}

/// A sequence of declarations, optionally followed by an expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Option<TermItgl>,
}

pub fn parse_itgl(src: &str) -> Result<TermItgl, ParseError> {
    parse_itgl_with(src, ParseOptions::default()).map(|(t, _)| t)
}

pub fn parse_itgl_with(src: &str, opts: ParseOptions) -> Result<(TermItgl, Vec<Note>), ParseError> {
    let mut p = Parser::new(src, opts)?;
    let t = p.expr()?;
    p.expect_eof()?;
    Ok((t, p.notes))
}

pub fn parse_program(src: &str) -> Result<(Program, Vec<Note>), ParseError> {
    parse_program_with(src, ParseOptions::default())
}

pub fn parse_program_with(src: &str, opts: ParseOptions) -> Result<(Program, Vec<Note>), ParseError> {
    let mut p = Parser::new(src, opts)?;
    let prog = p.program()?;
    Ok((prog, p.notes))
}

pub fn parse_dti(src: &str) -> Result<TermDti, ParseError> {
    let mut p = Parser::new(src, ParseOptions::default())?;
    let t = p.dti_expr()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<GradualType, ParseError> {
    let mut p = Parser::new(src, ParseOptions::default())?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itgl::Annotation;
    use crate::syntax::{BlameLabel, Op};

    #[test]
    fn parses_annotated_application() {
        let t = parse_itgl("(fun (x : ?) -> x 2) (fun y -> y)").unwrap();
        let expected = TermItgl::app(
            TermItgl::lam_ann("x", GradualType::Dyn, TermItgl::app(TermItgl::var("x"), TermItgl::int(2))),
            TermItgl::lam("y", TermItgl::var("y")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn let_of_non_value_becomes_application() {
        let (t, notes) = parse_itgl_with("let x = 1 + 2 in x", ParseOptions::default()).unwrap();
        assert_eq!(
            t,
            TermItgl::app(TermItgl::lam("x", TermItgl::var("x")), TermItgl::op(Op::Add, TermItgl::int(1), TermItgl::int(2)))
        );
        assert_eq!(notes.len(), 1);
        let strict = ParseOptions { strict_value_restriction: true };
        let err = parse_itgl_with("let x = 1 + 2 in x", strict).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ValueRestriction);
    }

    #[test]
    fn unbalanced_parenthesis_reports_position() {
        let err = parse_itgl("fun x -> (x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!((err.line, err.col), (1, 12));
    }

    #[test]
    fn arithmetic_precedence() {
        let t = parse_itgl("1 + 2 * 3 - 4 < 5").unwrap();
        let expected = TermItgl::op(
            Op::Lt,
            TermItgl::op(
                Op::Sub,
                TermItgl::op(Op::Add, TermItgl::int(1), TermItgl::op(Op::Mul, TermItgl::int(2), TermItgl::int(3))),
                TermItgl::int(4),
            ),
            TermItgl::int(5),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn let_rec_desugars_to_fix() {
        let t = parse_itgl("let rec f x = f x in f").unwrap();
        let TermItgl::App { fun, arg, .. } = t else { panic!() };
        assert!(matches!(*fun, TermItgl::Lam { .. }));
        assert!(matches!(*arg, TermItgl::Fix { annot: Annotation::Omitted, .. }));
    }

    #[test]
    fn program_with_declarations() {
        let (p, _) = parse_program("let id = fun x -> x\nlet k = fun x y -> x;;\nid k").unwrap();
        assert_eq!(p.decls.len(), 2);
        assert_eq!(p.body, Some(TermItgl::app(TermItgl::var("id"), TermItgl::var("k"))));
    }

    #[test]
    fn parses_cast_chain() {
        let t = parse_dti("2 : int =>[1+] ? =>[2-] 'X").unwrap();
        let inner = TermDti::cast(TermDti::int(2), GradualType::INT, GradualType::Dyn, BlameLabel::new(1));
        let expected = TermDti::cast(inner, GradualType::Dyn, GradualType::var("X"), BlameLabel::new(2).negate());
        assert_eq!(t, expected);
    }

    #[test]
    fn dti_round_trip() {
        let src = "let f = /\\ 'a 'b. fun (x : 'a) -> (fun (y : 'b) -> y) : 'b -> 'b =>[1+] ? -> ? in (f[int, nu] 1 : ? =>[2+] int) + blame 3-";
        let t = parse_dti(src).unwrap();
        assert_eq!(print_dti(&t, PrintOptions::default()), src);
        assert_eq!(parse_dti(&print_dti(&t, PrintOptions::default())).unwrap(), t);
    }

    #[test]
    fn negative_constants_round_trip() {
        let t = TermItgl::op(Op::Sub, TermItgl::int(-3), TermItgl::int(4));
        let s = print_itgl(&t, PrintOptions::default());
        assert_eq!(s, "(-3) - 4");
        assert_eq!(parse_itgl(&s).unwrap(), t);
    }
}
