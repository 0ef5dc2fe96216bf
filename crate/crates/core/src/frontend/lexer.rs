use crate::frontend::ParseError;
use crate::syntax::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    TyVar(String),
    Fun,
    Let,
    Rec,
    In,
    If,
    Then,
    Else,
    True,
    False,
    Fix,
    Blame,
    Nu,
    IntTy,
    BoolTy,
    UnitTy,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Arrow,
    FatArrow,
    Comma,
    Plus,
    Minus,
    Star,
    Eq,
    Lt,
    Question,
    BigLambda,
    Dot,
    SemiSemi,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::TyVar(s) => format!("type variable `'{s}`"),
            Tok::Eof => "end of input".to_string(),
            t => format!("`{}`", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Fun => "fun",
            Tok::Let => "let",
            Tok::Rec => "rec",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Fix => "fix",
            Tok::Blame => "blame",
            Tok::Nu => "nu",
            Tok::IntTy => "int",
            Tok::BoolTy => "bool",
            Tok::UnitTy => "unit",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Colon => ":",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Comma => ",",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::Question => "?",
            Tok::BigLambda => "/\\",
            Tok::Dot => ".",
            Tok::SemiSemi => ";;",
            _ => "",
        }
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "fun" => Tok::Fun,
        "let" => Tok::Let,
        "rec" => Tok::Rec,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "true" => Tok::True,
        "false" => Tok::False,
        "fix" => Tok::Fix,
        "blame" => Tok::Blame,
        "nu" => Tok::Nu,
        "int" => Tok::IntTy,
        "bool" => Tok::BoolTy,
        "unit" => Tok::UnitTy,
        _ => return None,
    })
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let two = |b: u8| bytes.get(i + 1) == Some(&b);
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &src[start..i];
            let n = text
                .parse::<i64>()
                .map_err(|_| ParseError::at(src, Span::new(start, i), format!("integer literal {text} out of range")))?;
            out.push((Tok::Int(n), Span::new(start, i)));
            continue;
        } else if is_ident_start(c) {
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            let text = &src[start..i];
            let tok = keyword(text).unwrap_or_else(|| Tok::Ident(text.to_string()));
            out.push((tok, Span::new(start, i)));
            continue;
        } else if c == b'\'' {
            i += 1;
            if i >= bytes.len() || !is_ident_char(bytes[i]) {
                return Err(ParseError::at(src, Span::new(start, i), "expected a type variable name after `'`"));
            }
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            out.push((Tok::TyVar(src[start + 1..i].to_string()), Span::new(start, i)));
            continue;
        } else if c == b'-' && two(b'>') {
            i += 1;
            Tok::Arrow
        } else if c == b'=' && two(b'>') {
            i += 1;
            Tok::FatArrow
        } else if c == b';' && two(b';') {
            i += 1;
            Tok::SemiSemi
        } else if c == b'/' && two(b'\\') {
            i += 1;
            Tok::BigLambda
        } else {
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b':' => Tok::Colon,
                b',' => Tok::Comma,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'=' => Tok::Eq,
                b'<' => Tok::Lt,
                b'?' => Tok::Question,
                b'.' => Tok::Dot,
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(ParseError::at(
                        src,
                        Span::new(i, i + ch.len_utf8()),
                        format!("unexpected character `{ch}`"),
                    ));
                }
            }
        };
        i += 1;
        out.push((tok, Span::new(start, i)));
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn lexes_casts_and_comments() {
        assert_eq!(
            toks("x : int =>[3+] ? -- trailing\n"),
            vec![
                Tok::Ident("x".into()),
                Tok::Colon,
                Tok::IntTy,
                Tok::FatArrow,
                Tok::LBracket,
                Tok::Int(3),
                Tok::Plus,
                Tok::RBracket,
                Tok::Question,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn lexes_type_variables_and_big_lambda() {
        assert_eq!(
            toks("/\\ 'a0. x[nu]"),
            vec![
                Tok::BigLambda,
                Tok::TyVar("a0".into()),
                Tok::Dot,
                Tok::Ident("x".into()),
                Tok::LBracket,
                Tok::Nu,
                Tok::RBracket,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(lex("1 $ 2").is_err());
    }
}
