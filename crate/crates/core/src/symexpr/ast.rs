use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Expr, Func, Q, Value};
use crate::error::{Error, Result};

/// Unsimplified expression tree, as parsed or as rendered from an [`Expr`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Num(Q),
    Var(String),
    Add(Vec<Ast>),
    Mul(Vec<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
    Call(Func, Box<Ast>),
}

impl Ast {
    pub fn simplify(&self) -> Result<Expr> {
        Ok(match self {
            Ast::Num(q) => Expr::from_q(q.clone()),
            Ast::Var(v) => Expr::var(v),
            Ast::Add(ts) => {
                let mut acc = Expr::zero();
                for t in ts {
                    acc = &acc + &t.simplify()?;
                }
                acc
            }
            Ast::Mul(fs) => {
                let mut acc = Expr::one();
                for f in fs {
                    acc = &acc * &f.simplify()?;
                }
                acc
            }
            Ast::Div(a, b) => a.simplify()?.checked_div(&b.simplify()?)?,
            Ast::Pow(b, k) => b.simplify()?.pow(*k)?,
            Ast::Call(f, a) => Expr::apply(*f, a.simplify()?),
        })
    }

    /// Evaluate the tree as written: exact unless a function node is hit.
    pub fn eval_at(&self, point: &BTreeMap<String, Q>) -> Result<Value> {
        Ok(match self {
            Ast::Num(q) => Value::Exact(q.clone()),
            Ast::Var(v) => Value::Exact(point.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.clone()))?),
            Ast::Add(ts) => {
                let mut acc = Value::Exact(Q::zero());
                for t in ts {
                    acc = acc.add(&t.eval_at(point)?);
                }
                acc
            }
            Ast::Mul(fs) => {
                let mut acc = Value::Exact(Q::one());
                for f in fs {
                    acc = acc.mul(&f.eval_at(point)?);
                }
                acc
            }
            Ast::Div(a, b) => a.eval_at(point)?.div(&b.eval_at(point)?)?,
            Ast::Pow(b, k) => b.eval_at(point)?.powi(*k)?,
            Ast::Call(f, a) => Value::Float(f.eval_f64(a.eval_at(point)?.to_f64())?),
        })
    }

    fn negated(&self) -> Option<Ast> {
        match self {
            Ast::Num(q) if q.is_negative() => Some(Ast::Num(-q.clone())),
            Ast::Mul(fs) => match fs.first() {
                Some(Ast::Num(q)) if q.is_negative() => {
                    let mut rest = fs.clone();
                    if (-q.clone()).is_one() {
                        rest.remove(0);
                    } else {
                        rest[0] = Ast::Num(-q.clone());
                    }
                    Some(if rest.len() == 1 { rest.pop().unwrap() } else { Ast::Mul(rest) })
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Ast::Add(_) => 1,
            _ if self.negated().is_some() => 2,
            Ast::Num(q) if !q.is_integer() => 3,
            Ast::Mul(_) | Ast::Div(..) => 3,
            Ast::Pow(..) => 4,
            Ast::Num(_) | Ast::Var(_) | Ast::Call(..) => 5,
        }
    }

    fn render(&self, min: u8, out: &mut String) {
        if self.prec() < min {
            out.push('(');
            self.render(0, out);
            out.push(')');
            return;
        }
        if let Some(pos) = self.negated() {
            out.push('-');
            pos.render(3, out);
            return;
        }
        match self {
            Ast::Num(q) => {
                if q.is_integer() {
                    out.push_str(&q.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}", q.numer(), q.denom()));
                }
            }
            Ast::Var(v) => out.push_str(v),
            Ast::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.render(0, out);
                out.push(')');
            }
            Ast::Pow(b, k) => {
                b.render(5, out);
                if *k < 0 {
                    out.push_str(&format!("^({k})"));
                } else {
                    out.push_str(&format!("^{k}"));
                }
            }
            Ast::Mul(fs) => {
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push('*');
                        f.render(4, out);
                    } else {
                        f.render(3, out);
                    }
                }
                if fs.is_empty() {
                    out.push('1');
                }
            }
            Ast::Div(a, b) => {
                a.render(3, out);
                out.push('/');
                b.render(4, out);
            }
            Ast::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    match (i, t.negated()) {
                        (0, _) => t.render(2, out),
                        (_, Some(pos)) => {
                            out.push_str(" - ");
                            pos.render(2, out);
                        }
                        (_, None) => {
                            out.push_str(" + ");
                            t.render(2, out);
                        }
                    }
                }
                if ts.is_empty() {
                    out.push('0');
                }
            }
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_ast;
    use super::*;

    #[test]
    fn permuted_children_share_a_canonical_tree() {
        let a = parse_ast("y*x + sin(b + a) + 3").unwrap().simplify().unwrap();
        let b = parse_ast("3 + sin(a + b) + x*y").unwrap().simplify().unwrap();
        assert_eq!(a.to_ast(), b.to_ast());
    }

    #[test]
    fn printer_parenthesizes() {
        let t = Ast::Mul(vec![
            Ast::Add(vec![Ast::Var("x".into()), Ast::Num(Q::one())]),
            Ast::Pow(Box::new(Ast::Var("y".into())), -2),
        ]);
        assert_eq!(t.to_string(), "(x + 1)*y^(-2)");
        let d = Ast::Div(Box::new(Ast::Var("a".into())), Box::new(Ast::Mul(vec![Ast::Var("b".into()), Ast::Var("c".into())])));
        assert_eq!(d.to_string(), "a/(b*c)");
    }

    #[test]
    fn tree_evaluation_goes_float_on_functions() {
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), Q::one());
        assert_eq!(parse_ast("exp(0) + x").unwrap().eval_at(&p).unwrap(), Value::Float(2.0));
        p.insert("y".to_string(), Q::from_integer(2.into()));
        assert_eq!(parse_ast("x/y").unwrap().eval_at(&p).unwrap(), Value::Exact(Q::new(1.into(), 2.into())));
        p.insert("y".to_string(), Q::zero());
        assert_eq!(parse_ast("x/y").unwrap().eval_at(&p), Err(Error::DivisionByZero));
    }
}
