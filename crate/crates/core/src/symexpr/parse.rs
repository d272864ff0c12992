//! Expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['-'] INT | '(' ['-'] INT ')'
//! primary := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! FUNC    := sin | cos | exp | log
//! ```
//!
//! Numbers are integers or decimals and are read exactly.

use num_bigint::BigInt;
use num_traits::One;

use super::{Ast, Func, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(Q),
    Ident(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, column: c0 });
            i += 1;
            column += 1;
            continue;
        }
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            let q = parse_decimal(&s).ok_or_else(|| Error::Syntax {
                line: l0,
                column: c0,
                message: format!("malformed number `{s}`"),
            })?;
            out.push(Spanned { tok: Tok::Num(q), line: l0, column: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(Error::Syntax { line: l0, column: c0, message: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(Q::new(n, d))
}

/// Recursive-descent parser over a token stream; also drives the form DSL.
pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self> {
        let toks = lex(text)?;
        let lines: Vec<&str> = text.split('\n').collect();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Ok(Parser { toks, pos: 0, end })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub(crate) fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn back(&mut self) {
        self.pos = self.pos.saturating_sub(1);
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Position of the current token (or end of input).
    pub(crate) fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.column))
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.here();
        Error::Syntax { line, column, message: message.into() }
    }

    pub(crate) fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Ast> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push(negate(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Ast::Add(terms) })
    }

    fn term(&mut self) -> Result<Ast> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = match acc {
                        Ast::Mul(mut fs) => {
                            fs.push(rhs);
                            Ast::Mul(fs)
                        }
                        other => Ast::Mul(vec![other, rhs]),
                    };
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = Ast::Div(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        let k = match self.peek() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let k: i64 = q
                    .numer()
                    .try_into()
                    .map_err(|_| self.error("exponent out of range"))?;
                self.pos += 1;
                k
            }
            _ => return Err(self.error("exponent must be an integer literal")),
        };
        if paren {
            self.expect(Tok::RParen, "`)` after exponent")?;
        }
        Ok(Ast::Pow(Box::new(base), if neg { -k } else { k }))
    }

    fn primary(&mut self) -> Result<Ast> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Ast::Num(q))
            }
            Some(Tok::Ident(name)) => {
                let at = self.here();
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::from_name(&name).ok_or(Error::Syntax {
                        line: at.0,
                        column: at.1,
                        message: format!("unknown function `{name}`"),
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)` closing function call")?;
                    Ok(Ast::Call(func, Box::new(arg)))
                } else {
                    Ok(Ast::Var(name))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(_) => Err(self.error("expected a number, identifier or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn negate(a: Ast) -> Ast {
    match a {
        Ast::Num(q) => Ast::Num(-q),
        other => Ast::Mul(vec![Ast::Num(-Q::one()), other]),
    }
}

/// Parse text into an unsimplified tree.
pub fn parse_ast(text: &str) -> Result<Ast> {
    let mut p = Parser::new(text)?;
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("1.25"), Some(Q::new(5.into(), 4.into())));
        assert_eq!(parse_decimal("3"), Some(Q::from_integer(3.into())));
        assert_eq!(parse_decimal("1.2.3"), None);
        assert!(parse_decimal("0").unwrap().is_zero());
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse_ast("-x^2").unwrap().simplify().unwrap();
        assert_eq!(e, parse_ast("-(x^2)").unwrap().simplify().unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_ast("x +\n  * y") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_ast("foo(x)") {
            Err(Error::Syntax { message, column, .. }) => {
                assert!(message.contains("foo"));
                assert_eq!(column, 1);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_ast("x^y"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_ast("(x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_ast("x $ y"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn negative_exponents() {
        let a = parse_ast("x^-2").unwrap().simplify().unwrap();
        let b = parse_ast("1/x^(2)").unwrap().simplify().unwrap();
        assert_eq!(a, b);
    }
}
