use std::collections::BTreeMap;
use std::fmt;

use super::interior::{from_mask, to_mask};
use super::{HeytingAlgebra, InteriorAlgebra};
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// A constant naming an element: an explicit point set, or the `k`-th
/// element (canonical order for Heyting algebras, bitmask `k` for interior
/// algebras).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constant {
    Points(Vec<usize>),
    Index(usize),
}

/// Terms over `{0, 1, ∧, ∨, →}` and `{0, 1, ∧, ∨, ¬, ∘}` with variables and
/// constants. Written in prefix form, e.g. `(imp (and x y) 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Zero,
    One,
    Var(String),
    Const(Constant),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Imp(Box<Term>, Box<Term>),
    Not(Box<Term>),
    Int(Box<Term>),
}

pub type Env = BTreeMap<String, PointSet>;

impl Term {
    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Term, b: Term) -> Term {
        Term::Imp(Box::new(a), Box::new(b))
    }

    pub fn not(a: Term) -> Term {
        Term::Not(Box::new(a))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn parse(src: &str) -> Result<Term> {
        let mut p = Parser { src, pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }

    pub fn mentions_interior(&self) -> bool {
        match self {
            Term::Int(_) => true,
            Term::And(a, b) | Term::Or(a, b) | Term::Imp(a, b) => {
                a.mentions_interior() || b.mentions_interior()
            }
            Term::Not(a) => a.mentions_interior(),
            _ => false,
        }
    }

    /// Evaluates in a Heyting algebra; `¬u` is `u → 0`.
    pub fn eval(&self, a: &HeytingAlgebra, env: &Env) -> Result<PointSet> {
        Ok(match self {
            Term::Zero => a.bottom(),
            Term::One => a.top(),
            Term::Var(v) => {
                let x = env.get(v).ok_or_else(|| Error::UnsupportedTerm(format!("unbound variable {v}")))?;
                a.check_element(x)?;
                x.clone()
            }
            Term::Const(Constant::Points(pts)) => {
                if let Some(&bad) = pts.iter().find(|&&p| p >= a.dual_size()) {
                    return Err(Error::NotElement(format!("point {bad} out of range")));
                }
                let s = PointSet::from_points(a.dual_size(), pts.iter().copied());
                a.check_element(&s)?;
                s
            }
            Term::Const(Constant::Index(k)) => {
                if *k >= a.size() {
                    return Err(Error::NotElement(format!("element #{k}")));
                }
                a.element(*k).clone()
            }
            Term::And(x, y) => a.meet(&x.eval(a, env)?, &y.eval(a, env)?),
            Term::Or(x, y) => a.join(&x.eval(a, env)?, &y.eval(a, env)?),
            Term::Imp(x, y) => a.imp(&x.eval(a, env)?, &y.eval(a, env)?),
            Term::Not(x) => a.neg(&x.eval(a, env)?),
            Term::Int(_) => return Err(Error::UnsupportedTerm("∘ in a Heyting algebra".into())),
        })
    }

    /// Evaluates in an interior algebra; `¬` is complement and `→` is not
    /// part of the signature.
    pub fn eval_interior(&self, i: &InteriorAlgebra, env: &Env) -> Result<PointSet> {
        self.eval_mask(i, env).map(|m| from_mask(i.points(), m))
    }

    fn eval_mask(&self, i: &InteriorAlgebra, env: &Env) -> Result<u32> {
        let n = i.points();
        Ok(match self {
            Term::Zero => 0,
            Term::One => i.top(),
            Term::Var(v) => {
                let x = env.get(v).ok_or_else(|| Error::UnsupportedTerm(format!("unbound variable {v}")))?;
                if x.universe() != n {
                    return Err(Error::NotElement(format!("{x:?}")));
                }
                to_mask(x)
            }
            Term::Const(Constant::Points(pts)) => {
                if let Some(&bad) = pts.iter().find(|&&p| p >= n) {
                    return Err(Error::NotElement(format!("point {bad} out of range")));
                }
                pts.iter().fold(0, |m, &p| m | 1 << p)
            }
            Term::Const(Constant::Index(k)) => {
                if *k >= i.size() {
                    return Err(Error::NotElement(format!("element #{k}")));
                }
                *k as u32
            }
            Term::And(x, y) => x.eval_mask(i, env)? & y.eval_mask(i, env)?,
            Term::Or(x, y) => x.eval_mask(i, env)? | y.eval_mask(i, env)?,
            Term::Not(x) => i.neg(x.eval_mask(i, env)?),
            Term::Int(x) => i.interior(x.eval_mask(i, env)?),
            Term::Imp(..) => return Err(Error::UnsupportedTerm("→ in an interior algebra".into())),
        })
    }
}

/// Replaces the constant `1` by `a` and every `¬u` by `¬u ∧ a`. Only the
/// `∘`-free part of the interior signature is translated; `∘` and `→` are
/// rejected.
pub fn translate_star(t: &Term, a: &Term) -> Result<Term> {
    Ok(match t {
        Term::One => a.clone(),
        Term::Not(u) => Term::and(Term::not(translate_star(u, a)?), a.clone()),
        Term::And(x, y) => Term::and(translate_star(x, a)?, translate_star(y, a)?),
        Term::Or(x, y) => Term::or(translate_star(x, a)?, translate_star(y, a)?),
        Term::Int(_) => return Err(Error::UnsupportedTerm("no translation is defined for ∘".into())),
        Term::Imp(..) => return Err(Error::UnsupportedTerm("→ is not an interior-algebra symbol".into())),
        Term::Zero | Term::Var(_) | Term::Const(_) => t.clone(),
    })
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(Constant::Index(k)) => write!(f, "#{k}"),
            Term::Const(Constant::Points(p)) => {
                let s: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", s.join(","))
            }
            Term::And(a, b) => write!(f, "(and {a} {b})"),
            Term::Or(a, b) => write!(f, "(or {a} {b})"),
            Term::Imp(a, b) => write!(f, "(imp {a} {b})"),
            Term::Not(a) => write!(f, "(not {a})"),
            Term::Int(a) => write!(f, "(int {a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::TermParse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> &str {
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Err(self.error("unexpected end of input"));
        }
        if self.src[self.pos..].starts_with('(') {
            self.pos += 1;
            self.skip_ws();
            let op_pos = self.pos;
            let op = self.word().to_string();
            let arity = match op.as_str() {
                "and" | "or" | "imp" => 2,
                "not" | "int" => 1,
                _ => return Err(Error::TermParse { pos: op_pos, msg: format!("unknown operator `{op}`") }),
            };
            let mut args = Vec::new();
            for _ in 0..arity {
                args.push(self.term()?);
            }
            self.skip_ws();
            if !self.src[self.pos..].starts_with(')') {
                return Err(self.error(&format!("`{op}` takes {arity} argument(s)")));
            }
            self.pos += 1;
            let mut it = args.into_iter();
            let mut next = || Box::new(it.next().expect("arity checked"));
            return Ok(match op.as_str() {
                "and" => Term::And(next(), next()),
                "or" => Term::Or(next(), next()),
                "imp" => Term::Imp(next(), next()),
                "not" => Term::Not(next()),
                _ => Term::Int(next()),
            });
        }
        if self.src[self.pos..].starts_with('{') {
            let end = self.src[self.pos..]
                .find('}')
                .ok_or_else(|| self.error("unclosed point set"))?;
            let body = &self.src[self.pos + 1..self.pos + end];
            let mut pts = Vec::new();
            for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                pts.push(part.parse().map_err(|_| self.error(&format!("bad point `{part}`")))?);
            }
            pts.sort_unstable();
            pts.dedup();
            self.pos += end + 1;
            return Ok(Term::Const(Constant::Points(pts)));
        }
        let at = self.pos;
        let w = self.word().to_string();
        match w.as_str() {
            "" => Err(Error::TermParse { pos: at, msg: "expected a term".into() }),
            "0" => Ok(Term::Zero),
            "1" => Ok(Term::One),
            _ if w.starts_with('#') => w[1..]
                .parse()
                .map(|k| Term::Const(Constant::Index(k)))
                .map_err(|_| Error::TermParse { pos: at, msg: format!("bad index `{w}`") }),
            _ if w.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && w.chars().all(|c| c.is_alphanumeric() || c == '_') =>
            {
                Ok(Term::Var(w))
            }
            _ => Err(Error::TermParse { pos: at, msg: format!("bad token `{w}`") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let t = Term::parse("(imp (and x y) 1)").unwrap();
        assert_eq!(t, Term::imp(Term::and(Term::var("x"), Term::var("y")), Term::One));
        assert_eq!(t.to_string(), "(imp (and x y) 1)");
        let c = Term::parse(" (not {2, 0}) ").unwrap();
        assert_eq!(c.to_string(), "(not {0,2})");
        assert!(Term::parse("(and x)").is_err());
        assert!(Term::parse("(xor x y)").is_err());
        assert!(Term::parse("x y").is_err());
    }

    #[test]
    fn star_clauses() {
        let a = Term::var("a");
        assert_eq!(translate_star(&Term::One, &a).unwrap(), a);
        let nx = translate_star(&Term::not(Term::var("x")), &a).unwrap();
        assert_eq!(nx, Term::and(Term::not(Term::var("x")), a.clone()));
        let xy = Term::and(Term::var("x"), Term::var("y"));
        assert_eq!(translate_star(&xy, &a).unwrap(), xy);
        assert!(translate_star(&Term::parse("(int x)").unwrap(), &a).is_err());
    }

    #[test]
    fn eval_in_chain() {
        let c = HeytingAlgebra::chain(3);
        let env = Env::new();
        let t = Term::parse("(imp {0,1} {1})").unwrap();
        assert_eq!(t.eval(&c, &env).unwrap().to_vec(), vec![1]);
        let u = Term::parse("(not {1})").unwrap();
        assert!(u.eval(&c, &env).unwrap().is_empty());
        assert!(Term::parse("{0}").unwrap().eval(&c, &env).is_err());
    }
}
