use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::scalar::{ExactScalar, Field, QuadNum};
use super::ArithError;

/// A polynomial variable. Ordered so that the affine coordinates come first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(name.to_string())
    }

    fn rank(&self) -> usize {
        const KNOWN: [&str; 6] = ["x1", "x2", "w", "t", "alpha", "beta"];
        KNOWN.iter().position(|k| *k == self.0).unwrap_or(KNOWN.len())
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Exponent vector, one entry per variable of the owning polynomial.
pub type Monomial = Vec<i32>;

/// A sparse Laurent polynomial over a [`Field`].
///
/// Terms with zero coefficient are never stored, so structural equality is
/// mathematical equality once the variable lists agree.
#[derive(Clone, Debug)]
pub struct Poly {
    field: Field,
    vars: Vec<Var>,
    terms: BTreeMap<Monomial, QuadNum>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        match align(self, other) {
            Ok((a, b)) => a.terms == b.terms,
            Err(_) => false,
        }
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(field: Field) -> Poly {
        Poly { field, vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: ExactScalar) -> Poly {
        let mut p = Poly::zero(c.field);
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c.value);
        }
        p
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(ExactScalar::int(n))
    }

    pub fn var(v: &str) -> Poly {
        let mut p = Poly::zero(Field::Rational);
        p.vars.push(Var::new(v));
        p.terms.insert(vec![1], QuadNum::one());
        p
    }

    /// `coef * prod(v^e)`, with exponents that may be negative.
    pub fn monomial(coef: ExactScalar, powers: &[(&str, i32)]) -> Poly {
        let mut p = Poly::constant(coef);
        for (v, e) in powers {
            p = p.mul(&Poly::var(v).pow_laurent(*e).expect("variable is invertible")).expect("same field");
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QuadNum)> {
        self.terms.iter()
    }

    /// Variables that actually occur with a nonzero exponent.
    pub fn support_vars(&self) -> Vec<Var> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m[*i] != 0))
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn as_constant(&self) -> Option<ExactScalar> {
        match self.terms.len() {
            0 => Some(ExactScalar { field: self.field, value: QuadNum::zero() }),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|e| *e == 0).then(|| ExactScalar { field: self.field, value: c.clone() })
            }
            _ => None,
        }
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|e| *e >= 0))
    }

    fn disc(&self) -> i64 {
        self.field.disc().unwrap_or(0)
    }

    fn with_vars(&self, vars: &[Var]) -> Poly {
        if vars == self.vars.as_slice() {
            return self.clone();
        }
        let idx: Vec<usize> =
            self.vars.iter().map(|v| vars.iter().position(|w| w == v).expect("superset")).collect();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0; vars.len()];
                for (i, k) in m.iter().enumerate() {
                    e[idx[i]] = *k;
                }
                (e, c.clone())
            })
            .collect();
        Poly { field: self.field, vars: vars.to_vec(), terms }
    }

    fn index_of(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn add(&self, o: &Poly) -> Result<Poly, ArithError> {
        let (mut a, b) = align(self, o)?;
        for (m, c) in b.terms {
            add_term(&mut a.terms, m, c);
        }
        Ok(a)
    }

    pub fn sub(&self, o: &Poly) -> Result<Poly, ArithError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field,
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Result<Poly, ArithError> {
        let (a, b) = align(self, o)?;
        let d = a.disc();
        let mut terms = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                add_term(&mut terms, m, ca.mul(cb, d));
            }
        }
        Ok(Poly { field: a.field, vars: a.vars, terms })
    }

    pub fn scale(&self, c: &ExactScalar) -> Result<Poly, ArithError> {
        self.mul(&Poly::constant(c.clone()))
    }

    pub fn pow(&self, mut e: u32) -> Result<Poly, ArithError> {
        let mut base = self.clone();
        let mut acc = Poly { field: self.field, vars: self.vars.clone(), terms: BTreeMap::new() };
        acc.terms.insert(vec![0; self.vars.len()], QuadNum::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse of a single nonzero term, which stays a Laurent polynomial.
    pub fn inv_monomial(&self) -> Result<Poly, ArithError> {
        if self.terms.len() != 1 {
            return Err(ArithError::NotLaurent);
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let inv = c.inv(self.disc())?;
        let mut terms = BTreeMap::new();
        terms.insert(m.iter().map(|e| -e).collect(), inv);
        Ok(Poly { field: self.field, vars: self.vars.clone(), terms })
    }

    /// Integer power; negative exponents require a single-term base.
    pub fn pow_laurent(&self, e: i32) -> Result<Poly, ArithError> {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inv_monomial()?.pow(e.unsigned_abs())
        }
    }

    /// Division by a single term (a nonzero constant or a monomial).
    pub fn div_monomial(&self, o: &Poly) -> Result<Poly, ArithError> {
        if o.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        self.mul(&o.inv_monomial()?)
    }

    pub fn derivative(&self, v: &Var) -> Poly {
        let Some(i) = self.index_of(v) else {
            return Poly::zero(self.field).with_vars(&self.vars);
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut e = m.clone();
            e[i] -= 1;
            add_term(&mut terms, e, c.scale(&num_rational::BigRational::from_integer(m[i].into())));
        }
        Poly { field: self.field, vars: self.vars.clone(), terms }
    }

    /// Largest total degree of a term (negative exponents count negatively).
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.iter().map(|e| *e as i64).sum()).max()
    }

    /// Largest exponent of `v`; `None` for the zero polynomial.
    pub fn degree_in(&self, v: &Var) -> Option<i32> {
        let i = self.index_of(v);
        self.terms.keys().map(|m| i.map_or(0, |i| m[i])).max()
    }

    /// Smallest exponent of `v` over all terms.
    pub fn order_in(&self, v: &Var) -> Result<i32, ArithError> {
        let i = self.index_of(v);
        self.terms.keys().map(|m| i.map_or(0, |i| m[i])).min().ok_or(ArithError::ZeroPolynomial)
    }

    /// Collects into ascending coefficients of a polynomial in one variable.
    /// Any other variable must be absent.
    pub fn to_univariate(&self, v: &Var) -> Result<Vec<QuadNum>, ArithError> {
        let i = self.index_of(v);
        let mut out: Vec<QuadNum> = Vec::new();
        for (m, c) in &self.terms {
            for (j, e) in m.iter().enumerate() {
                if Some(j) != i && *e != 0 {
                    return Err(ArithError::NotUnivariate(self.vars[j].0.clone()));
                }
            }
            let e = i.map_or(0, |i| m[i]);
            if e < 0 {
                return Err(ArithError::NegativeExponent);
            }
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, QuadNum::zero());
            }
            out[e] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate(field: Field, v: &Var, coeffs: &[QuadNum]) -> Poly {
        let mut terms = BTreeMap::new();
        for (e, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![e as i32], c.clone());
            }
        }
        Poly { field, vars: vec![v.clone()], terms }
    }

    /// Replaces variables by polynomials. Negative powers of a variable are
    /// only allowed when its replacement is a single term.
    pub fn substitute(&self, map: &BTreeMap<Var, Poly>) -> Result<Poly, ArithError> {
        let mut field = self.field;
        for p in map.values() {
            field = field.join(p.field)?;
        }
        let mut acc = Poly::zero(field);
        let mut cache: BTreeMap<(usize, i32), Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(ExactScalar { field: self.field, value: c.clone() });
            for (i, e) in m.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let factor = match cache.get(&(i, *e)) {
                    Some(f) => f.clone(),
                    None => {
                        let base = map.get(&self.vars[i]).cloned().unwrap_or_else(|| Poly::var(&self.vars[i].0));
                        let f = base.pow_laurent(*e)?;
                        cache.insert((i, *e), f.clone());
                        f
                    }
                };
                term = term.mul(&factor)?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc.trimmed())
    }

    /// Drops variables that no longer occur.
    pub fn trimmed(&self) -> Poly {
        let keep = self.support_vars();
        let idx: Vec<usize> = keep.iter().map(|v| self.index_of(v).unwrap()).collect();
        let terms = self.terms.iter().map(|(m, c)| (idx.iter().map(|i| m[*i]).collect(), c.clone())).collect();
        Poly { field: self.field, vars: keep, terms }
    }

    /// If the polynomial is `c * monomial`, returns `c` and the exponent map.
    pub fn as_single_term(&self) -> Option<(ExactScalar, BTreeMap<Var, i32>)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let exps = self.vars.iter().cloned().zip(m.iter().copied()).filter(|(_, e)| *e != 0).collect();
        Some((ExactScalar { field: self.field, value: c.clone() }, exps))
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, QuadNum>, m: Monomial, c: QuadNum) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(old) => {
            *old = old.add(&c);
            if old.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

/// Brings two polynomials to a common field and variable list.
fn align(a: &Poly, b: &Poly) -> Result<(Poly, Poly), ArithError> {
    let field = a.field.join(b.field)?;
    let mut vars = a.vars.clone();
    for v in &b.vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort();
    let mut a = a.with_vars(&vars);
    let mut b = b.with_vars(&vars);
    a.field = field;
    b.field = field;
    Ok((a, b))
}

/// `det [[df/du, df/dv], [dg/du, dg/dv]]` in the two variables spanned by
/// `f` and `g`, taken in canonical variable order.
pub fn jacobian(f: &Poly, g: &Poly) -> Result<Poly, ArithError> {
    let mut vars: Vec<Var> = f.support_vars();
    for v in g.support_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.sort();
    if vars.len() != 2 {
        return Err(ArithError::NotBivariate(vars.len()));
    }
    jacobian_in(f, g, &vars[0], &vars[1])
}

/// Jacobian determinant with an explicit variable order.
pub fn jacobian_in(f: &Poly, g: &Poly, u: &Var, v: &Var) -> Result<Poly, ArithError> {
    let a = f.derivative(u).mul(&g.derivative(v))?;
    let b = f.derivative(v).mul(&g.derivative(u))?;
    Ok(a.sub(&b)?.trimmed())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Monomial, &QuadNum)> = self.terms.iter().collect();
        terms.sort_by(|(ma, _), (mb, _)| {
            let da: i64 = ma.iter().map(|e| *e as i64).sum();
            let db: i64 = mb.iter().map(|e| *e as i64).sum();
            db.cmp(&da).then_with(|| mb.cmp(ma))
        });
        let disc = self.field.disc();
        for (k, (m, c)) in terms.iter().enumerate() {
            let powers: Vec<String> = self
                .vars
                .iter()
                .zip(m.iter())
                .filter(|(_, e)| **e != 0)
                .map(|(v, e)| match *e {
                    1 => v.0.clone(),
                    e if e < 0 => format!("{}^({e})", v.0),
                    e => format!("{}^{e}", v.0),
                })
                .collect();
            let negative = c.b.is_zero() && c.a < num_rational::BigRational::zero();
            let mag = if negative { c.neg() } else { (*c).clone() };
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let coef = if powers.is_empty() {
                mag.render(disc, true)
            } else if mag.is_one() {
                String::new()
            } else {
                format!("{}*", mag.render(disc, true))
            };
            write!(f, "{coef}{}", powers.join("*"))?;
        }
        Ok(())
    }
}
