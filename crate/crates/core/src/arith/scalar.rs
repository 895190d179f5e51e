use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// The coefficient field of a polynomial: either the rationals or a
/// quadratic extension by the square root of a square-free integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Quadratic(i64),
}

impl Field {
    /// Builds `Q(sqrt(disc))`, rejecting discriminants that are not square-free
    /// or that give back the rationals.
    pub fn quadratic(disc: i64) -> Result<Field, ArithError> {
        if disc == 0 || disc == 1 || !is_square_free(disc) {
            return Err(ArithError::BadDiscriminant(disc));
        }
        Ok(Field::Quadratic(disc))
    }

    /// Smallest field containing both, if one exists.
    pub fn join(self, other: Field) -> Result<Field, ArithError> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Ok(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Ok(self),
            (Field::Quadratic(a), Field::Quadratic(b)) => Err(ArithError::MixedFields(a, b)),
        }
    }

    pub fn disc(self) -> Option<i64> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => Some(d),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

fn is_square_free(n: i64) -> bool {
    let m = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// An element `a + b*sqrt(d)` of a quadratic field, or of `Q` when `b = 0`.
///
/// The discriminant is not stored here; every operation takes it from the
/// surrounding [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadNum {
    pub fn zero() -> QuadNum {
        QuadNum { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> QuadNum {
        QuadNum::from_rational(BigRational::one())
    }

    pub fn from_rational(a: BigRational) -> QuadNum {
        QuadNum { a, b: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> QuadNum {
        QuadNum::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> QuadNum {
        QuadNum::from_rational(BigRational::from_integer(n))
    }

    pub fn sqrt_unit() -> QuadNum {
        QuadNum { a: BigRational::zero(), b: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, o: &QuadNum) -> QuadNum {
        QuadNum { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &QuadNum) -> QuadNum {
        QuadNum { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> QuadNum {
        QuadNum { a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, o: &QuadNum, disc: i64) -> QuadNum {
        if self.b.is_zero() && o.b.is_zero() {
            return QuadNum::from_rational(&self.a * &o.a);
        }
        let d = BigRational::from_integer(BigInt::from(disc));
        QuadNum {
            a: &self.a * &o.a + d * (&self.b * &o.b),
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn scale(&self, r: &BigRational) -> QuadNum {
        QuadNum { a: &self.a * r, b: &self.b * r }
    }

    /// `a^2 - d*b^2`
    pub fn norm(&self, disc: i64) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(disc));
        &self.a * &self.a - d * (&self.b * &self.b)
    }

    pub fn inv(&self, disc: i64) -> Result<QuadNum, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(QuadNum::from_rational(self.a.recip()));
        }
        let n = self.norm(disc);
        Ok(QuadNum { a: &self.a / &n, b: -&self.b / &n })
    }

    pub fn div(&self, o: &QuadNum, disc: i64) -> Result<QuadNum, ArithError> {
        Ok(self.mul(&o.inv(disc)?, disc))
    }

    pub fn pow(&self, mut e: u32, disc: i64) -> QuadNum {
        let mut base = self.clone();
        let mut acc = QuadNum::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, disc);
            }
            base = base.mul(&base, disc);
            e >>= 1;
        }
        acc
    }

    /// Renders the number so that the expression parser reads it back unchanged.
    /// `atomic` requests parentheses around anything that is not a single factor.
    pub fn render(&self, disc: Option<i64>, atomic: bool) -> String {
        let d = disc.unwrap_or(0);
        if self.b.is_zero() {
            let s = render_rational(&self.a);
            return if atomic && (self.a.is_negative() || !self.a.is_integer()) {
                format!("({s})")
            } else {
                s
            };
        }
        let root = format!("sqrt({d})");
        let irr = if self.b.is_one() {
            root
        } else if (-&self.b).is_one() {
            format!("-{root}")
        } else {
            format!("{}*{root}", render_rational(&self.b))
        };
        if self.a.is_zero() {
            return if atomic { format!("({irr})") } else { irr };
        }
        let body = if let Some(rest) = irr.strip_prefix('-') {
            format!("{} - {rest}", render_rational(&self.a))
        } else {
            format!("{} + {irr}", render_rational(&self.a))
        };
        format!("({body})")
    }
}

fn render_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A field element tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactScalar {
    pub field: Field,
    pub value: QuadNum,
}

impl ExactScalar {
    pub fn rational(r: BigRational) -> ExactScalar {
        ExactScalar { field: Field::Rational, value: QuadNum::from_rational(r) }
    }

    pub fn int(n: i64) -> ExactScalar {
        ExactScalar { field: Field::Rational, value: QuadNum::from_int(n) }
    }

    /// `a + b*sqrt(disc)`
    pub fn quadratic(a: BigRational, b: BigRational, disc: i64) -> Result<ExactScalar, ArithError> {
        let field = Field::quadratic(disc)?;
        Ok(ExactScalar { field, value: QuadNum { a, b } })
    }

    fn disc(&self, o: &ExactScalar) -> Result<(Field, i64), ArithError> {
        let f = self.field.join(o.field)?;
        Ok((f, f.disc().unwrap_or(0)))
    }

    pub fn add(&self, o: &ExactScalar) -> Result<ExactScalar, ArithError> {
        let (field, _) = self.disc(o)?;
        Ok(ExactScalar { field, value: self.value.add(&o.value) })
    }

    pub fn sub(&self, o: &ExactScalar) -> Result<ExactScalar, ArithError> {
        let (field, _) = self.disc(o)?;
        Ok(ExactScalar { field, value: self.value.sub(&o.value) })
    }

    pub fn mul(&self, o: &ExactScalar) -> Result<ExactScalar, ArithError> {
        let (field, d) = self.disc(o)?;
        Ok(ExactScalar { field, value: self.value.mul(&o.value, d) })
    }

    pub fn div(&self, o: &ExactScalar) -> Result<ExactScalar, ArithError> {
        let (field, d) = self.disc(o)?;
        Ok(ExactScalar { field, value: self.value.div(&o.value, d)? })
    }

    pub fn inv(&self) -> Result<ExactScalar, ArithError> {
        let d = self.field.disc().unwrap_or(0);
        Ok(ExactScalar { field: self.field, value: self.value.inv(d)? })
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value.render(self.field.disc(), false))
    }
}
