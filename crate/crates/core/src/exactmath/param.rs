use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::{fmt_rational, Rational};
use crate::error::{Error, Result};

/// Affine expression `constant + sum_i coeff_i * name_i` over the rationals.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// expressions. An expression without parameter terms is called numeric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamExpr {
    constant: Rational,
    terms: BTreeMap<String, Rational>,
}

impl Default for ParamExpr {
    fn default() -> Self {
        Self::zero()
    }
}

impl ParamExpr {
    pub fn zero() -> Self {
        ParamExpr {
            constant: Rational::zero(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from(Rational::one())
    }

    pub fn param(name: impl Into<String>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.into(), Rational::one());
        ParamExpr {
            constant: Rational::zero(),
            terms,
        }
    }

    pub fn from_parts(constant: Rational, terms: impl IntoIterator<Item = (String, Rational)>) -> Self {
        let mut out = ParamExpr::from(constant);
        for (name, c) in terms {
            out.add_term(name, c);
        }
        out
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<String, Rational> {
        &self.terms
    }

    pub fn coefficient_of(&self, name: &str) -> Rational {
        self.terms.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_numeric(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_numeric().then_some(&self.constant)
    }

    fn add_term(&mut self, name: String, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(name) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> ParamExpr {
        if r.is_zero() {
            return ParamExpr::zero();
        }
        ParamExpr {
            constant: &self.constant * r,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * r)).collect(),
        }
    }

    /// Product, defined only when at least one factor is numeric.
    pub fn try_mul(&self, other: &ParamExpr) -> Result<ParamExpr> {
        match (self.as_rational(), other.as_rational()) {
            (Some(a), _) => Ok(other.scale(a)),
            (_, Some(b)) => Ok(self.scale(b)),
            _ => Err(Error::NonlinearParameterProduct(self.to_string(), other.to_string())),
        }
    }

    pub fn try_div(&self, other: &ParamExpr) -> Result<ParamExpr> {
        match other.as_rational() {
            Some(d) if !d.is_zero() => Ok(self.scale(&d.recip())),
            _ => Err(Error::DivisionByZero),
        }
    }

    /// Replaces parameters by affine expressions; unbound names are kept.
    pub fn substitute(&self, bindings: &BTreeMap<String, ParamExpr>) -> ParamExpr {
        let mut out = ParamExpr::from(self.constant.clone());
        for (name, c) in &self.terms {
            match bindings.get(name) {
                Some(value) => out += value.scale(c),
                None => out.add_term(name.clone(), c.clone()),
            }
        }
        out
    }
}

impl From<Rational> for ParamExpr {
    fn from(constant: Rational) -> Self {
        ParamExpr {
            constant,
            terms: BTreeMap::new(),
        }
    }
}

impl From<i64> for ParamExpr {
    fn from(n: i64) -> Self {
        ParamExpr::from(super::int(n))
    }
}

impl AddAssign<&ParamExpr> for ParamExpr {
    fn add_assign(&mut self, rhs: &ParamExpr) {
        self.constant += &rhs.constant;
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), v.clone());
        }
    }
}

impl AddAssign<ParamExpr> for ParamExpr {
    fn add_assign(&mut self, rhs: ParamExpr) {
        *self += &rhs;
    }
}

impl SubAssign<&ParamExpr> for ParamExpr {
    fn sub_assign(&mut self, rhs: &ParamExpr) {
        self.constant -= &rhs.constant;
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), -v.clone());
        }
    }
}

impl SubAssign<ParamExpr> for ParamExpr {
    fn sub_assign(&mut self, rhs: ParamExpr) {
        *self -= &rhs;
    }
}

impl Add for &ParamExpr {
    type Output = ParamExpr;
    fn add(self, rhs: &ParamExpr) -> ParamExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ParamExpr {
    type Output = ParamExpr;
    fn add(mut self, rhs: ParamExpr) -> ParamExpr {
        self += &rhs;
        self
    }
}

impl Sub for &ParamExpr {
    type Output = ParamExpr;
    fn sub(self, rhs: &ParamExpr) -> ParamExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for ParamExpr {
    type Output = ParamExpr;
    fn sub(mut self, rhs: ParamExpr) -> ParamExpr {
        self -= &rhs;
        self
    }
}

impl Neg for &ParamExpr {
    type Output = ParamExpr;
    fn neg(self) -> ParamExpr {
        ParamExpr {
            constant: -self.constant.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }
}

impl Neg for ParamExpr {
    type Output = ParamExpr;
    fn neg(self) -> ParamExpr {
        -&self
    }
}

/// Renders as `1/12*c2 - c4 + 1/3`: parameter terms in name order, then the
/// constant. The output parses back to the same expression.
impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut piece = |f: &mut fmt::Formatter<'_>, c: &Rational, name: Option<&str>| -> fmt::Result {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match name {
                Some(n) if mag.is_one() => write!(f, "{n}"),
                Some(n) => write!(f, "{}*{n}", fmt_rational(&mag)),
                None => write!(f, "{}", fmt_rational(&mag)),
            }
        };
        for (name, c) in &self.terms {
            piece(f, c, Some(name))?;
        }
        if !self.constant.is_zero() {
            piece(f, &self.constant, None)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn rational_sum() {
        let x = ParamExpr::from(rat(1, 2)) + ParamExpr::from(rat(1, 3));
        assert_eq!(x, ParamExpr::from(rat(5, 6)));
    }

    #[test]
    fn scalar_distribution() {
        let c2 = ParamExpr::param("c2") + ParamExpr::from(1);
        let y = c2.try_mul(&ParamExpr::from(rat(1, 12))).unwrap();
        assert_eq!(y.coefficient_of("c2"), rat(1, 12));
        assert_eq!(y.constant(), &rat(1, 12));
        assert_eq!(y.to_string(), "1/12*c2 + 1/12");
    }

    #[test]
    fn nonlinear_product_rejected() {
        let err = ParamExpr::param("c2").try_mul(&ParamExpr::param("c4")).unwrap_err();
        assert!(matches!(err, Error::NonlinearParameterProduct(..)));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = ParamExpr::param("c") + ParamExpr::from(2);
        let b = &a - &ParamExpr::param("c");
        assert!(b.is_numeric());
        assert_eq!(b, ParamExpr::from(2));
    }

    #[test]
    fn substitution_is_affine() {
        let e = ParamExpr::from_parts(rat(1, 2), [("a".to_string(), rat(3, 1)), ("b".to_string(), rat(1, 1))]);
        let mut bind = BTreeMap::new();
        bind.insert("a".to_string(), ParamExpr::param("b").scale(&rat(-1, 3)) + ParamExpr::from(1));
        let s = e.substitute(&bind);
        assert_eq!(s, ParamExpr::from(rat(7, 2)));
    }
}
