//! Exact arithmetic over `Q` and quadratic fields: scalars, sparse Laurent
//! polynomials, univariate gcd and square-free decomposition, Jacobians.

mod expr;
mod poly;
mod scalar;
mod univariate;

pub use expr::{parse, parse_with, Definitions};
pub use poly::{jacobian, jacobian_in, Monomial, Poly, Var};
pub use scalar::{ExactScalar, Field, QuadNum};
pub use univariate::{gcd, multiplicity_profile, squarefree_decomposition, UniPoly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("cannot mix sqrt({0}) with sqrt({1})")]
    MixedFields(i64, i64),
    #[error("discriminant {0} is not a square-free integer other than 0 and 1")]
    BadDiscriminant(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("inverse is not a Laurent polynomial")]
    NotLaurent,
    #[error("exact division left a remainder")]
    InexactDivision,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("expected a polynomial in one variable, found {0}")]
    NotUnivariate(String),
    #[error("negative exponent where a polynomial was required")]
    NegativeExponent,
    #[error("jacobian needs exactly two variables, found {0}")]
    NotBivariate(usize),
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// Order of vanishing of `f` along `v = 0` after substituting `map`.
pub fn order_in_variable(
    f: &Poly,
    map: &std::collections::BTreeMap<Var, Poly>,
    v: &Var,
) -> Result<i32, ArithError> {
    f.substitute(map)?.order_in(v)
}
