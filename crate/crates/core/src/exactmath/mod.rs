//! Exact rational arithmetic and the small number-theoretic toolkit the rest
//! of the engine is built on: affine parametric coefficients, partitions,
//! Bernoulli numbers and factorial-type products.

mod numbers;
mod param;
mod partition;

pub use numbers::{bernoulli, bernoulli_table, binomial, double_factorial, factorial};
pub use param::ParamExpr;
pub use partition::{partitions_of, Partition, PartitionKind};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rzero() -> Rational {
    Rational::zero()
}

pub fn rone() -> Rational {
    Rational::one()
}

pub fn rabs(r: &Rational) -> Rational {
    r.abs()
}

/// Renders a rational as `p` or `p/q`; never as a decimal.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}
