//! Text syntax for differential polynomials, local functionals and
//! differential operators.
//!
//! ```text
//! expr    ::= ["+"|"-"] term (("+"|"-") term)*
//! term    ::= power (("*"|"/") power)*
//! power   ::= atom ["^" integer]
//! atom    ::= integer | "u" | "u"digits | "ux" | "uxx" | "uxxx" | "eps" | "D"
//!           | ident | "(" expr ")" | "dx(" expr ")"
//! top     ::= expr | "int(" expr ")"
//! ```
//!
//! `u3` is the third x-derivative and `D` is `dx` acting to the right, so an
//! operator is written with its coefficients on the left: `2*u*D + u1`.
//! Rational coefficients are written as quotients, e.g. `(1/12)*eps^2*u3`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::diffpoly::{Caps, DiffPoly};
use crate::error::{Error, Result};
use crate::exactmath::{ParamExpr, Rational};
use crate::functionals::LocalFunctional;
use crate::operators::DiffOperator;

/// Declared parameters, optionally bound to numeric values.
#[derive(Clone, Debug, Default)]
pub struct ParamTable {
    entries: BTreeMap<String, Option<Rational>>,
}

impl ParamTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, value: Option<Rational>) {
        self.entries.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Option<Rational>> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn bindings(&self) -> BTreeMap<String, Rational> {
        self.entries.iter().filter_map(|(n, v)| v.clone().map(|v| (n.clone(), v))).collect()
    }
}

/// Result of parsing a top-level expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Poly(DiffPoly),
    Functional(LocalFunctional),
    Operator(DiffOperator),
}

/// Polynomial in `D` with coefficients on the left.
type OpValue = BTreeMap<u32, DiffPoly>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    caps: Caps,
    params: &'a ParamTable,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().or_else(|_| self.err("integer too large"))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && is_ident(self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string()
    }

    fn constant(&self, c: ParamExpr) -> OpValue {
        BTreeMap::from([(0, DiffPoly::constant(c, self.caps))])
    }

    fn expr(&mut self) -> Result<OpValue> {
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = op_neg(&acc);
        }
        loop {
            if self.eat(b'+') {
                acc = op_add(&acc, &self.term()?);
            } else if self.eat(b'-') {
                acc = op_add(&acc, &op_neg(&self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OpValue> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.power()?;
                acc = self.op_mul(&acc, &rhs)?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.power()?;
                let divisor = op_scalar(&rhs).filter(|r| !r.is_zero());
                let Some(d) = divisor else {
                    return Err(Error::Syntax { position: at, message: "division by a non-constant or zero".into() });
                };
                let inv = d.recip();
                acc = acc.into_iter().map(|(k, p)| (k, p.scale(&inv))).collect();
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<OpValue> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let n = self.integer()?;
        let n = u32::try_from(n).or_else(|_| self.err("exponent too large"))?;
        let mut out = self.constant(ParamExpr::one());
        for _ in 0..n {
            out = self.op_mul(&out, &base)?;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<OpValue> {
        let Some(c) = self.peek() else { return self.err("unexpected end of input") };
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            self.expect(b')')?;
            return Ok(inner);
        }
        if c.is_ascii_digit() {
            let n = self.integer()?;
            return Ok(self.constant(ParamExpr::from(Rational::from_integer(n.into()))));
        }
        if !is_ident_start(c) {
            return self.err(format!("unexpected `{}`", c as char));
        }
        let start = self.pos;
        let name = self.ident();
        let jet = match name.as_str() {
            "u" => Some(0),
            "ux" => Some(1),
            "uxx" => Some(2),
            "uxxx" => Some(3),
            n if n.len() > 1 && n.starts_with('u') && n[1..].bytes().all(|b| b.is_ascii_digit()) => {
                Some(n[1..].parse::<u32>().or_else(|_| self.err("jet order too large"))?)
            }
            _ => None,
        };
        if let Some(order) = jet {
            return Ok(BTreeMap::from([(0, DiffPoly::jet(order, self.caps))]));
        }
        match name.as_str() {
            "eps" => Ok(BTreeMap::from([(0, DiffPoly::one(self.caps).shift_eps(1))])),
            "D" => Ok(BTreeMap::from([(1, DiffPoly::one(self.caps))])),
            "dx" => {
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                match inner.keys().any(|&k| k > 0) {
                    true => Err(Error::Syntax { position: start, message: "dx(...) of an operator".into() }),
                    false => Ok(BTreeMap::from([(0, inner.get(&0).map(DiffPoly::dx).unwrap_or_else(|| DiffPoly::zero(self.caps)))])),
                }
            }
            "int" => Err(Error::Syntax { position: start, message: "int(...) is only allowed at top level".into() }),
            _ => match self.params.get(&name) {
                Some(Some(v)) => Ok(self.constant(ParamExpr::from(v.clone()))),
                Some(None) => Ok(self.constant(ParamExpr::param(name))),
                None => Err(Error::UnknownParameter(name)),
            },
        }
    }

    /// `(a D^i)(b D^j) = a b D^{i+j}`, which needs `b` constant when `i > 0`.
    fn op_mul(&self, lhs: &OpValue, rhs: &OpValue) -> Result<OpValue> {
        let mut out = OpValue::new();
        for (&i, a) in lhs {
            for (&j, b) in rhs {
                if i > 0 && b.max_u_degree() > 0 {
                    return self.err("operator coefficients must stand to the left of D");
                }
                let prod = a.mul(b)?;
                let slot = out.entry(i + j).or_insert_with(|| DiffPoly::zero(self.caps));
                *slot = slot.add(&prod);
            }
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }
}

fn op_add(a: &OpValue, b: &OpValue) -> OpValue {
    let mut out = a.clone();
    for (k, p) in b {
        let sum = match out.get(k) {
            Some(q) => q.add(p),
            None => p.clone(),
        };
        out.insert(*k, sum);
    }
    out.retain(|_, p| !p.is_zero());
    out
}

fn op_neg(a: &OpValue) -> OpValue {
    a.iter().map(|(k, p)| (*k, p.neg())).collect()
}

fn op_scalar(a: &OpValue) -> Option<Rational> {
    if a.is_empty() {
        return Some(Rational::zero());
    }
    if a.len() != 1 {
        return None;
    }
    let p = a.get(&0)?;
    let mut terms = p.terms();
    let (e, m, c) = terms.next()?;
    if terms.next().is_some() || e != 0 || !m.is_one() {
        return None;
    }
    c.as_rational().cloned()
}

fn run(text: &str, caps: Caps, params: &ParamTable) -> Result<(OpValue, bool)> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, caps, params };
    p.skip_ws();
    let functional = text[p.pos..].starts_with("int") && {
        let save = p.pos;
        p.ident();
        let is_int = p.peek() == Some(b'(');
        p.pos = save;
        is_int
    };
    let value = if functional {
        p.ident();
        p.expect(b'(')?;
        let v = p.expr()?;
        p.expect(b')')?;
        v
    } else {
        p.expr()?
    };
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok((value, functional))
}

/// Parses a differential polynomial, a functional `int(...)` or an operator.
pub fn parse(text: &str, caps: Caps, params: &ParamTable) -> Result<Parsed> {
    let (value, functional) = run(text, caps, params)?;
    let has_d = value.keys().any(|&k| k > 0);
    match (functional, has_d) {
        (true, true) => Err(Error::Syntax { position: 0, message: "int(...) of an operator".into() }),
        (true, false) => Ok(Parsed::Functional(LocalFunctional::integrate(&poly_part(&value, caps)))),
        (false, true) => {
            let order = *value.keys().max().expect("nonempty");
            let coeffs = (0..=order).map(|k| value.get(&k).cloned().unwrap_or_else(|| DiffPoly::zero(caps))).collect();
            Ok(Parsed::Operator(DiffOperator::from_coeffs(coeffs, caps)))
        }
        (false, false) => Ok(Parsed::Poly(poly_part(&value, caps))),
    }
}

fn poly_part(value: &OpValue, caps: Caps) -> DiffPoly {
    value.get(&0).cloned().unwrap_or_else(|| DiffPoly::zero(caps))
}

pub fn parse_poly(text: &str, caps: Caps, params: &ParamTable) -> Result<DiffPoly> {
    match parse(text, caps, params)? {
        Parsed::Poly(p) => Ok(p),
        Parsed::Functional(_) => Err(Error::InvalidInput("expected a differential polynomial, found int(...)".into())),
        Parsed::Operator(_) => Err(Error::InvalidInput("expected a differential polynomial, found an operator".into())),
    }
}

/// Accepts `int(...)` or a bare density.
pub fn parse_functional(text: &str, caps: Caps, params: &ParamTable) -> Result<LocalFunctional> {
    match parse(text, caps, params)? {
        Parsed::Functional(f) => Ok(f),
        Parsed::Poly(p) => Ok(LocalFunctional::integrate(&p)),
        Parsed::Operator(_) => Err(Error::InvalidInput("expected a functional, found an operator".into())),
    }
}

/// Accepts an operator, or a polynomial read as a multiplication operator.
pub fn parse_operator(text: &str, caps: Caps, params: &ParamTable) -> Result<DiffOperator> {
    match parse(text, caps, params)? {
        Parsed::Operator(k) => Ok(k),
        Parsed::Poly(p) => Ok(DiffOperator::multiplication(&p)),
        Parsed::Functional(_) => Err(Error::InvalidInput("expected an operator, found int(...)".into())),
    }
}
