//! Text syntax for forms.
//!
//! ```text
//! form  := ['-'] term (('+' | '-') term)*
//! term  := '(' expr ')' [basis] | basis
//! basis := 'd' COORD ('^' 'd' COORD)*
//! ```
//!
//! Coefficients use the expression grammar of [`crate::symexpr`]. Every term
//! must have the same number of basis factors; `(0)` alone is the zero 0-form.

use crate::error::{Error, Result};
use crate::forms::{Coords, Form};
use crate::symexpr::{Ast, Expr, Parser, Tok};

pub use crate::symexpr::parse_expr;

pub fn parse_form(text: &str, coords: &Coords) -> Result<Form> {
    let mut p = Parser::new(text)?;
    if p.at_end() {
        return Err(p.error("empty form"));
    }
    let mut terms: Vec<(Vec<usize>, Expr)> = Vec::new();
    let mut degree: Option<usize> = None;
    let mut negate = false;
    if p.peek() == Some(&Tok::Minus) {
        p.next();
        negate = true;
    }
    loop {
        let at = p.here();
        let (idx, coeff) = term(&mut p, coords)?;
        match degree {
            None => degree = Some(idx.len()),
            Some(d) if d != idx.len() => {
                return Err(Error::Syntax {
                    line: at.0,
                    column: at.1,
                    message: format!("term of degree {} in a form of degree {d}", idx.len()),
                })
            }
            _ => {}
        }
        terms.push((idx, if negate { -coeff } else { coeff }));
        match p.next() {
            None => break,
            Some(Tok::Plus) => negate = false,
            Some(Tok::Minus) => negate = true,
            Some(_) => {
                p.back();
                return Err(p.error("expected `+`, `-` or end of form"));
            }
        }
    }
    Form::from_terms(coords, degree.unwrap_or(0), terms)
}

fn term(p: &mut Parser, coords: &Coords) -> Result<(Vec<usize>, Expr)> {
    let coeff = match p.peek() {
        Some(Tok::LParen) => {
            p.next();
            let ast: Ast = p.expr()?;
            p.expect(Tok::RParen, "`)` closing coefficient")?;
            Some(ast.simplify()?)
        }
        Some(Tok::Ident(_)) => None,
        _ => return Err(p.error("expected `(coefficient)` or a basis differential")),
    };
    let mut idx = Vec::new();
    if matches!(p.peek(), Some(Tok::Ident(_))) {
        idx.push(basis_factor(p, coords)?);
        while p.peek() == Some(&Tok::Caret) {
            p.next();
            idx.push(basis_factor(p, coords)?);
        }
    }
    Ok((idx, coeff.unwrap_or_else(Expr::one)))
}

fn basis_factor(p: &mut Parser, coords: &Coords) -> Result<usize> {
    let at = p.here();
    match p.next() {
        Some(Tok::Ident(name)) => {
            let coord = name.strip_prefix('d').ok_or_else(|| Error::Syntax {
                line: at.0,
                column: at.1,
                message: format!("`{name}` is not a basis differential (expected d<coordinate>)"),
            })?;
            coords.index_of(coord).ok_or_else(|| Error::UnknownCoordinate(coord.to_string()))
        }
        _ => {
            p.back();
            Err(p.error("expected a basis differential"))
        }
    }
}
