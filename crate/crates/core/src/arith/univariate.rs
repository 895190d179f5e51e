//! Dense univariate polynomials over a [`Field`], used for gcd and
//! square-free decomposition.

use num_rational::BigRational;

use super::poly::{Poly, Var};
use super::scalar::{Field, QuadNum};
use super::ArithError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub field: Field,
    /// Ascending coefficients, no trailing zeros.
    pub coeffs: Vec<QuadNum>,
}

impl UniPoly {
    pub fn new(field: Field, mut coeffs: Vec<QuadNum>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn from_poly(p: &Poly, v: &Var) -> Result<UniPoly, ArithError> {
        Ok(UniPoly::new(p.field(), p.to_univariate(v)?))
    }

    pub fn to_poly(&self, v: &Var) -> Poly {
        Poly::from_univariate(self.field, v, &self.coeffs)
    }

    fn disc(&self) -> i64 {
        self.field.disc().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&QuadNum> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Result<UniPoly, ArithError> {
        let Some(l) = self.lead() else {
            return Ok(self.clone());
        };
        let inv = l.inv(self.disc())?;
        let d = self.disc();
        Ok(UniPoly::new(self.field, self.coeffs.iter().map(|c| c.mul(&inv, d)).collect()))
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&BigRational::from_integer((i as i64).into())))
            .collect();
        UniPoly::new(self.field, coeffs)
    }

    pub fn mul(&self, o: &UniPoly) -> Result<UniPoly, ArithError> {
        let field = self.field.join(o.field)?;
        let d = field.disc().unwrap_or(0);
        if self.is_zero() || o.is_zero() {
            return Ok(UniPoly::new(field, Vec::new()));
        }
        let mut out = vec![QuadNum::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b, d));
            }
        }
        Ok(UniPoly::new(field, out))
    }

    /// Euclidean division: `self = q*o + r` with `deg r < deg o`.
    pub fn divrem(&self, o: &UniPoly) -> Result<(UniPoly, UniPoly), ArithError> {
        let field = self.field.join(o.field)?;
        let d = field.disc().unwrap_or(0);
        let Some(dq) = o.degree() else {
            return Err(ArithError::DivisionByZero);
        };
        let inv = o.lead().unwrap().inv(d)?;
        let mut r = self.coeffs.clone();
        let mut q = vec![QuadNum::zero(); r.len().saturating_sub(dq).max(1)];
        while r.len() > dq && !r.is_empty() {
            let k = r.len() - 1 - dq;
            let c = r.last().unwrap().mul(&inv, d);
            if !c.is_zero() {
                for (j, oc) in o.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(oc, d));
                }
                q[k] = c;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        Ok((UniPoly::new(field, q), UniPoly::new(field, r)))
    }

    /// Exact quotient; errors when the remainder is nonzero.
    pub fn div_exact(&self, o: &UniPoly) -> Result<UniPoly, ArithError> {
        let (q, r) = self.divrem(o)?;
        if !r.is_zero() {
            return Err(ArithError::InexactDivision);
        }
        Ok(q)
    }
}

/// Monic gcd. `gcd(0, 0) = 0`.
pub fn gcd(a: &UniPoly, b: &UniPoly) -> Result<UniPoly, ArithError> {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.divrem(&y)?;
        x = y;
        y = r.monic()?;
    }
    x.monic()
}

/// Yun's algorithm. Returns `(factor, multiplicity)` for each nonconstant
/// square-free factor, with factors pairwise coprime and monic.
pub fn squarefree_decomposition(f: &UniPoly) -> Result<Vec<(UniPoly, u32)>, ArithError> {
    if f.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let f = f.monic()?;
    let df = f.derivative();
    let a0 = gcd(&f, &df)?;
    let mut b = f.div_exact(&a0)?;
    let mut c = df.div_exact(&a0)?;
    let mut d = c_minus_db(&c, &b)?;
    let mut out = Vec::new();
    let mut i = 1u32;
    loop {
        let a = gcd(&b, &d)?;
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a)?;
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        c = d.div_exact(&a)?;
        d = c_minus_db(&c, &b)?;
        i += 1;
    }
    Ok(out)
}

fn c_minus_db(c: &UniPoly, b: &UniPoly) -> Result<UniPoly, ArithError> {
    let db = b.derivative();
    let n = c.coeffs.len().max(db.coeffs.len());
    let mut out = vec![QuadNum::zero(); n];
    for (i, x) in c.coeffs.iter().enumerate() {
        out[i] = out[i].add(x);
    }
    for (i, x) in db.coeffs.iter().enumerate() {
        out[i] = out[i].sub(x);
    }
    Ok(UniPoly::new(c.field.join(b.field)?, out))
}

/// Root multiplicities over the algebraic closure, as `(multiplicity, count)`
/// pairs with the largest multiplicity first.
pub fn multiplicity_profile(f: &UniPoly) -> Result<Vec<(u32, u32)>, ArithError> {
    if f.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let mut out: Vec<(u32, u32)> = squarefree_decomposition(f)?
        .into_iter()
        .map(|(g, m)| (m, g.degree().unwrap() as u32))
        .collect();
    out.sort_by_key(|t| std::cmp::Reverse(t.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(Field::Rational, c.iter().map(|x| QuadNum::from_int(*x)).collect())
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (t-1)(t+2) and (t-1)(t-3)
        let g = gcd(&up(&[-2, 1, 1]), &up(&[3, -4, 1])).unwrap();
        assert_eq!(g, up(&[-1, 1]));
    }

    #[test]
    fn yun_on_cube_times_square() {
        // t^3 (t-5)^2
        let f = up(&[0, 0, 0, 25, -10, 1]);
        assert_eq!(multiplicity_profile(&f).unwrap(), vec![(3, 1), (2, 1)]);
    }

    #[test]
    fn division_round_trip() {
        let a = up(&[1, 2, 3, 4]);
        let b = up(&[5, 0, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        let back = q.mul(&b).unwrap();
        let n = back.coeffs.len().max(r.coeffs.len());
        let sum: Vec<QuadNum> = (0..n)
            .map(|i| {
                let x = back.coeffs.get(i).cloned().unwrap_or_else(QuadNum::zero);
                x.add(r.coeffs.get(i).unwrap_or(&QuadNum::zero()))
            })
            .collect();
        assert_eq!(UniPoly::new(Field::Rational, sum), a);
    }
}
