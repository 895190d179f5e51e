//! Infix expressions over `Q` and `Q(sqrt(d))`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] INT | '^' '(' ['-'] INT ')')?
//! atom  := INT | IDENT | 'sqrt' '(' ['-'] INT ')' | '(' expr ')'
//! ```
//!
//! Division is only defined by a single term, so results stay Laurent
//! polynomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::scalar::{ExactScalar, Field, QuadNum};
use super::ArithError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ArithError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ArithError::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

/// Named subexpressions that shadow variables of the same name.
pub type Definitions = BTreeMap<String, Poly>;

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    defs: &'a Definitions,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ArithError> {
        Err(ArithError::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ArithError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Poly, ArithError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ArithError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.eat('/') {
                let at = self.here();
                let d = self.unary()?;
                acc = acc.div_monomial(&d).map_err(|e| match e {
                    ArithError::NotLaurent => {
                        ArithError::Syntax { pos: at, msg: "division by a non-monomial".into() }
                    }
                    other => other,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ArithError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn signed_int(&mut self) -> Result<i64, ArithError> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let v: i64 = n.try_into().map_err(|_| ArithError::Syntax { pos: self.here(), msg: "integer too large".into() })?;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected an integer"),
        }
    }

    fn power(&mut self) -> Result<Poly, ArithError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = if self.eat('(') {
            let e = self.signed_int()?;
            self.expect(')')?;
            e
        } else {
            self.signed_int()?
        };
        let e: i32 = e.try_into().map_err(|_| ArithError::Syntax { pos: self.here(), msg: "exponent too large".into() })?;
        base.pow_laurent(e)
    }

    fn atom(&mut self) -> Result<Poly, ArithError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Poly::constant(ExactScalar::rational(BigRational::from_integer(n))))
            }
            Some(Tok::Ident(name)) if name == "sqrt" => {
                self.pos += 1;
                self.expect('(')?;
                let at = self.here();
                let d = self.signed_int()?;
                self.expect(')')?;
                let field = Field::quadratic(d).map_err(|_| ArithError::Syntax {
                    pos: at,
                    msg: format!("sqrt({d}) needs a square-free integer other than 0 and 1"),
                })?;
                Ok(Poly::constant(ExactScalar { field, value: QuadNum { a: BigRational::zero(), b: BigRational::one() } }))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(self.defs.get(&name).cloned().unwrap_or_else(|| Poly::var(&name)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses an expression, substituting any named definitions.
pub fn parse_with(src: &str, defs: &Definitions) -> Result<Poly, ArithError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count(), defs };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e.trimmed())
}

pub fn parse(src: &str) -> Result<Poly, ArithError> {
    parse_with(src, &Definitions::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printer_output_parses_back() {
        for s in [
            "x1^3*x2^8 - 2/3*x1 + 5",
            "(2 + 8*sqrt(-3))*w^7 + (-233/3 + 50/3*sqrt(-3))*w^6 - 7",
            "x2^(-1)*x1 + sqrt(-3)",
            "-(x1 - 1)^3/x2",
        ] {
            let p = parse(s).unwrap();
            assert_eq!(parse(&p.to_string()).unwrap(), p, "{s} -> {p}");
        }
    }

    #[test]
    fn definitions_shadow_variables() {
        let mut defs = Definitions::new();
        defs.insert("w".into(), parse("x1*x2^3 - 1").unwrap());
        let p = parse_with("w^2", &defs).unwrap();
        assert_eq!(p, parse("(x1*x2^3 - 1)*(x1*x2^3 - 1)").unwrap());
    }

    #[test]
    fn division_by_binomial_is_rejected() {
        assert!(matches!(parse("1/(x1+1)"), Err(ArithError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn error_position_points_at_offending_character() {
        match parse("x1 + $") {
            Err(ArithError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_roots_fail() {
        assert_eq!(parse("sqrt(-3) + sqrt(2)"), Err(ArithError::MixedFields(-3, 2)));
    }
}
