use crate::dti::{TermDti, TypeArg};
use crate::frontend::lexer::{lex, Tok};
use crate::frontend::{Decl, Note, ParseError, ParseErrorKind, ParseOptions, Program};
use crate::itgl::{Annotation, TermItgl};
use crate::syntax::{BlameLabel, Const, Op, Polarity, Span};
use crate::types::{BaseType, GradualType, TyVar};

pub(crate) struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    opts: ParseOptions,
    pub(crate) notes: Vec<Note>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str, opts: ParseOptions) -> PResult<Self> {
        Ok(Parser { src, toks: lex(src)?, pos: 0, opts, notes: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.src, self.span(), msg)
    }

    fn unexpected(&self, what: &str) -> ParseError {
        self.error(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    // Types.

    pub(crate) fn ty(&mut self) -> PResult<GradualType> {
        let dom = self.ty_atom()?;
        if self.eat(&Tok::Arrow) {
            Ok(GradualType::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_atom(&mut self) -> PResult<GradualType> {
        let t = match self.peek().clone() {
            Tok::IntTy => GradualType::Base(BaseType::Int),
            Tok::BoolTy => GradualType::Base(BaseType::Bool),
            Tok::UnitTy => GradualType::Base(BaseType::Unit),
            Tok::Question => GradualType::Dyn,
            Tok::TyVar(x) => GradualType::Var(TyVar(x)),
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                return Ok(t);
            }
            _ => return Err(self.unexpected("a type")),
        };
        self.bump();
        Ok(t)
    }

    // Tokens shared by both languages.

    fn starts_atom(&self, dti: bool) -> bool {
        match self.peek() {
            Tok::Int(_) | Tok::Ident(_) | Tok::True | Tok::False | Tok::LParen => true,
            Tok::Blame => dti,
            _ => false,
        }
    }

    fn binop(&self) -> Option<Op> {
        Some(match self.peek() {
            Tok::Plus => Op::Add,
            Tok::Minus => Op::Sub,
            Tok::Star => Op::Mul,
            Tok::Eq => Op::Eq,
            Tok::Lt => Op::Lt,
            _ => return None,
        })
    }

    /// Recognizes `()` and `(-n)` after the opening parenthesis.
    fn paren_const(&mut self) -> PResult<Option<Const>> {
        if self.peek() == &Tok::RParen {
            self.bump();
            return Ok(Some(Const::Unit));
        }
        if self.peek() == &Tok::Minus {
            if let (Tok::Int(n), Tok::RParen) = (self.peek_at(1).clone(), self.peek_at(2)) {
                self.bump();
                self.bump();
                self.bump();
                return Ok(Some(Const::Int(n.wrapping_neg())));
            }
        }
        Ok(None)
    }

    // Surface language.

    pub(crate) fn program(&mut self) -> PResult<Program> {
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(Program { decls, body: None }),
                Tok::Let => {
                    let start = self.span();
                    let (name, rhs, rec) = self.let_binding()?;
                    if self.eat(&Tok::In) {
                        let body = self.expr()?;
                        self.expect_eof()?;
                        let span = start.to(Span::new(start.start, self.prev_end()));
                        let body = self.build_let(name, rhs, rec, body, span)?;
                        return Ok(Program { decls, body: Some(body) });
                    }
                    decls.push(Decl { name, rhs, span: Span::new(start.start, self.prev_end()) });
                    self.eat(&Tok::SemiSemi);
                }
                _ => {
                    let body = self.expr()?;
                    self.expect_eof()?;
                    return Ok(Program { decls, body: Some(body) });
                }
            }
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<TermItgl> {
        let start = self.span();
        match self.peek() {
            Tok::Fun => {
                self.bump();
                let mut params = vec![self.param()?];
                while self.peek() != &Tok::Arrow {
                    params.push(self.param()?);
                }
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                Ok(wrap_lams(params, body))
            }
            Tok::Let => {
                let (name, rhs, rec) = self.let_binding()?;
                self.expect(Tok::In)?;
                let body = self.expr()?;
                let span = Span::new(start.start, self.prev_end());
                self.build_let(name, rhs, rec, body, span)
            }
            Tok::If => {
                self.bump();
                let cond = self.expr()?;
                self.expect(Tok::Then)?;
                let then_branch = self.expr()?;
                self.expect(Tok::Else)?;
                let else_branch = self.expr()?;
                Ok(TermItgl::If {
                    cond: Box::new(cond),
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                    span: Span::new(start.start, self.prev_end()),
                })
            }
            Tok::Fix => {
                self.bump();
                let name = self.ident()?;
                let (param, annot) = self.param()?;
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                Ok(TermItgl::Fix {
                    name,
                    param,
                    annot,
                    ret: None,
                    body: Box::new(body),
                    span: Span::new(start.start, self.prev_end()),
                })
            }
            _ => self.binary(1),
        }
    }

    fn param(&mut self) -> PResult<(String, Annotation)> {
        if self.eat(&Tok::LParen) {
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let t = self.ty()?;
            self.expect(Tok::RParen)?;
            Ok((x, Annotation::Explicit(t)))
        } else {
            Ok((self.ident()?, Annotation::Omitted))
        }
    }

    /// Parses `let [rec] x params = e` up to, not including, `in`.
    fn let_binding(&mut self) -> PResult<(String, TermItgl, bool)> {
        let start = self.expect(Tok::Let)?;
        let rec = self.eat(&Tok::Rec);
        let name = self.ident()?;
        let mut params = Vec::new();
        while self.peek() != &Tok::Eq {
            params.push(self.param()?);
        }
        self.expect(Tok::Eq)?;
        let body = self.expr()?;
        let span = Span::new(start.start, self.prev_end());
        if rec {
            if params.is_empty() {
                return Err(ParseError::at(self.src, span, "`let rec` needs at least one parameter"));
            }
            let (param, annot) = params.remove(0);
            let body = wrap_lams(params, body);
            let fix = TermItgl::Fix { name: name.clone(), param, annot, ret: None, body: Box::new(body), span };
            Ok((name, fix, true))
        } else {
            Ok((name, wrap_lams(params, body), false))
        }
    }

    /// Builds `let x = rhs in body`. Recursive and non-value bindings
    /// become an application, which is not generalized.
    fn build_let(&mut self, name: String, rhs: TermItgl, rec: bool, body: TermItgl, span: Span) -> PResult<TermItgl> {
        if rhs.is_value() {
            return Ok(TermItgl::let_in(name, rhs, body));
        }
        if !rec {
            if self.opts.strict_value_restriction {
                return Err(ParseError {
                    kind: ParseErrorKind::ValueRestriction,
                    ..ParseError::at(self.src, span, format!("the right-hand side of `let {name}` is not a value"))
                });
            }
            self.notes.push(Note {
                span,
                message: format!("`let {name}` binds a non-value; treated as an application and not generalized"),
            });
        }
        Ok(TermItgl::App {
            fun: Box::new(TermItgl::lam(name, body)),
            arg: Box::new(rhs),
            span,
        })
    }

    fn binary(&mut self, level: u8) -> PResult<TermItgl> {
        if level > 3 {
            return self.app();
        }
        let start = self.span();
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop() {
            if op.level() != level {
                break;
            }
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = TermItgl::Op {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span: Span::new(start.start, self.prev_end()),
            };
            if level == 1 {
                break;
            }
        }
        Ok(lhs)
    }

    fn app(&mut self) -> PResult<TermItgl> {
        let start = self.span();
        let mut f = self.atom()?;
        while self.starts_atom(false) {
            let arg = self.atom()?;
            f = TermItgl::App { fun: Box::new(f), arg: Box::new(arg), span: Span::new(start.start, self.prev_end()) };
        }
        Ok(f)
    }

    fn atom(&mut self) -> PResult<TermItgl> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(TermItgl::int(n))
            }
            Tok::True => {
                self.bump();
                Ok(TermItgl::bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(TermItgl::bool(false))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(TermItgl::var(x))
            }
            Tok::LParen => {
                self.bump();
                if let Some(c) = self.paren_const()? {
                    return Ok(TermItgl::Const(c));
                }
                let e = self.expr()?;
                if self.eat(&Tok::Colon) {
                    let ty = self.ty()?;
                    self.expect(Tok::RParen)?;
                    return Ok(TermItgl::Ascribe {
                        term: Box::new(e),
                        ty,
                        span: Span::new(start.start, self.prev_end()),
                    });
                }
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    // Cast calculus.

    pub(crate) fn dti_expr(&mut self) -> PResult<TermDti> {
        match self.peek() {
            Tok::Fun => {
                self.bump();
                let mut params = vec![self.dti_param()?];
                while self.peek() != &Tok::Arrow {
                    params.push(self.dti_param()?);
                }
                self.expect(Tok::Arrow)?;
                let mut body = self.dti_expr()?;
                for (x, t) in params.into_iter().rev() {
                    body = TermDti::lam(x, t, body);
                }
                Ok(body)
            }
            Tok::Let => {
                let start = self.bump().1;
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let mut binders = Vec::new();
                if self.eat(&Tok::BigLambda) {
                    while let Tok::TyVar(x) = self.peek().clone() {
                        self.bump();
                        binders.push(TyVar(x));
                    }
                    self.expect(Tok::Dot)?;
                }
                let value = self.dti_expr()?;
                if !value.is_value() {
                    return Err(ParseError {
                        kind: ParseErrorKind::ValueRestriction,
                        ..ParseError::at(
                            self.src,
                            Span::new(start.start, self.prev_end()),
                            format!("the right-hand side of `let {name}` is not a value"),
                        )
                    });
                }
                self.expect(Tok::In)?;
                let body = self.dti_expr()?;
                Ok(TermDti::let_in(name, binders, value, body))
            }
            Tok::If => {
                self.bump();
                let c = self.dti_expr()?;
                self.expect(Tok::Then)?;
                let t = self.dti_expr()?;
                self.expect(Tok::Else)?;
                let e = self.dti_expr()?;
                Ok(TermDti::if_(c, t, e))
            }
            Tok::Fix => {
                self.bump();
                let name = self.ident()?;
                let (param, param_ty) = self.dti_param()?;
                self.expect(Tok::Colon)?;
                let ret_ty = self.ty()?;
                self.expect(Tok::Eq)?;
                let body = self.dti_expr()?;
                Ok(TermDti::Fix { name, param, param_ty, ret_ty, body: Box::new(body) })
            }
            _ => {
                let mut f = self.dti_binary(1)?;
                if self.eat(&Tok::Colon) {
                    let mut from = self.ty()?;
                    if self.peek() != &Tok::FatArrow {
                        return Err(self.unexpected("`=>`"));
                    }
                    while self.eat(&Tok::FatArrow) {
                        self.expect(Tok::LBracket)?;
                        let label = self.label()?;
                        self.expect(Tok::RBracket)?;
                        let to = self.ty()?;
                        f = TermDti::cast(f, from, to.clone(), label);
                        from = to;
                    }
                }
                Ok(f)
            }
        }
    }

    fn dti_param(&mut self) -> PResult<(String, GradualType)> {
        self.expect(Tok::LParen)?;
        let x = self.ident()?;
        self.expect(Tok::Colon)?;
        let t = self.ty()?;
        self.expect(Tok::RParen)?;
        Ok((x, t))
    }

    fn label(&mut self) -> PResult<BlameLabel> {
        let Tok::Int(n) = self.peek().clone() else {
            return Err(self.unexpected("a blame label"));
        };
        let span = self.bump().1;
        let id = u32::try_from(n).map_err(|_| ParseError::at(self.src, span, "blame label out of range"))?;
        let polarity = match self.peek() {
            Tok::Plus => Polarity::Positive,
            Tok::Minus => Polarity::Negative,
            _ => return Err(self.unexpected("`+` or `-` after a blame label")),
        };
        self.bump();
        Ok(BlameLabel { id, polarity, span: None })
    }

    fn dti_binary(&mut self, level: u8) -> PResult<TermDti> {
        if level > 3 {
            return self.dti_app();
        }
        let mut lhs = self.dti_binary(level + 1)?;
        while let Some(op) = self.binop() {
            if op.level() != level {
                break;
            }
            self.bump();
            let rhs = self.dti_binary(level + 1)?;
            lhs = TermDti::op(op, lhs, rhs);
            if level == 1 {
                break;
            }
        }
        Ok(lhs)
    }

    fn dti_app(&mut self) -> PResult<TermDti> {
        let mut f = self.dti_atom()?;
        while self.starts_atom(true) {
            let arg = self.dti_atom()?;
            f = TermDti::app(f, arg);
        }
        Ok(f)
    }

    fn dti_atom(&mut self) -> PResult<TermDti> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(TermDti::int(n))
            }
            Tok::True => {
                self.bump();
                Ok(TermDti::bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(TermDti::bool(false))
            }
            Tok::Blame => {
                self.bump();
                Ok(TermDti::Blame(self.label()?))
            }
            Tok::Ident(x) => {
                self.bump();
                let mut args = Vec::new();
                if self.eat(&Tok::LBracket) {
                    if self.peek() != &Tok::RBracket {
                        loop {
                            if self.eat(&Tok::Nu) {
                                args.push(TypeArg::Nu);
                            } else {
                                args.push(TypeArg::Ty(self.ty()?));
                            }
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBracket)?;
                }
                Ok(TermDti::Var { name: x, args })
            }
            Tok::LParen => {
                self.bump();
                if let Some(c) = self.paren_const()? {
                    return Ok(TermDti::Const(c));
                }
                let e = self.dti_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn wrap_lams(params: Vec<(String, Annotation)>, mut body: TermItgl) -> TermItgl {
    for (param, annot) in params.into_iter().rev() {
        body = TermItgl::Lam { param, annot, body: Box::new(body) };
    }
    body
}
