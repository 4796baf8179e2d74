//! Truncated differential polynomials in one dependent variable.
//!
//! A [`DiffPoly`] is a finite sum of terms `c * eps^k * u^p * prod u_n^{e_n}`
//! with affine parametric coefficients. Every value carries its own
//! truncation data ([`Caps`]): terms with `eps^k`, `k > eps`, are dropped on
//! the fly, and the total `u`-degree is bounded by `u`.

mod monomial;

pub use monomial::Monomial;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{fmt_rational, int, ParamExpr, Partition, Rational};

/// How a value reacts when a product exceeds the `u`-degree cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DegreeMode {
    /// Raise [`Error::UDegreeOverflow`].
    #[default]
    Strict,
    /// Drop the offending terms and mark the result as truncated.
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub eps: u32,
    pub u: u32,
    pub mode: DegreeMode,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { eps: 6, u: 64, mode: DegreeMode::Strict }
    }
}

impl Caps {
    pub fn new(eps: u32) -> Self {
        Caps { eps, ..Caps::default() }
    }

    pub fn with_u(self, u: u32) -> Self {
        Caps { u, ..self }
    }

    pub fn with_mode(self, mode: DegreeMode) -> Self {
        Caps { mode, ..self }
    }

    /// Caps for the result of a binary operation.
    pub fn meet(self, other: Caps) -> Caps {
        let mode = if self.mode == DegreeMode::Series && other.mode == DegreeMode::Series {
            DegreeMode::Series
        } else {
            DegreeMode::Strict
        };
        Caps { eps: self.eps.min(other.eps), u: self.u.min(other.u), mode }
    }
}

/// Term key: `(eps power, monomial)`. Map order is the canonical print order.
pub type TermKey = (u32, Monomial);

/// `(eps power, u power, [(jet order, exponent)], coefficient)`.
pub type JsonTerm = (u32, u32, Vec<(u32, u32)>, String);

#[derive(Clone, Debug)]
pub struct DiffPoly {
    terms: BTreeMap<TermKey, ParamExpr>,
    caps: Caps,
    truncated: bool,
}

impl PartialEq for DiffPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for DiffPoly {}

impl DiffPoly {
    pub fn zero(caps: Caps) -> Self {
        DiffPoly { terms: BTreeMap::new(), caps, truncated: false }
    }

    pub fn constant(c: impl Into<ParamExpr>, caps: Caps) -> Self {
        Self::term(0, Monomial::one(), c, caps)
    }

    pub fn one(caps: Caps) -> Self {
        Self::constant(int(1), caps)
    }

    /// `u_n`, with `u_0 = u`.
    pub fn jet(n: u32, caps: Caps) -> Self {
        Self::term(0, Monomial::jet(n), int(1), caps)
    }

    pub fn u(caps: Caps) -> Self {
        Self::jet(0, caps)
    }

    /// `u_lambda = prod u_{lambda_i}`.
    pub fn u_lambda(lambda: &Partition, caps: Caps) -> Self {
        Self::term(0, Monomial::from_partition(0, lambda), int(1), caps)
    }

    pub fn term(eps: u32, mono: Monomial, c: impl Into<ParamExpr>, caps: Caps) -> Self {
        let mut out = Self::zero(caps);
        out.add_term(eps, mono, c.into());
        out
    }

    pub fn from_terms(caps: Caps, terms: impl IntoIterator<Item = (u32, Monomial, ParamExpr)>) -> Self {
        let mut out = Self::zero(caps);
        for (e, m, c) in terms {
            out.add_term(e, m, c);
        }
        out
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn eps_cap(&self) -> u32 {
        self.caps.eps
    }

    /// True when series mode dropped terms above the `u`-degree cap.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Same terms, new caps; terms above the new `eps` cap are dropped.
    pub fn with_caps(&self, caps: Caps) -> Self {
        let mut out = DiffPoly::zero(caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            out.add_term(*e, m.clone(), c.clone());
        }
        out
    }

    pub fn with_eps_cap(&self, eps: u32) -> Self {
        self.with_caps(Caps { eps, ..self.caps })
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Monomial, &ParamExpr)> {
        self.terms.iter().map(|((e, m), c)| (*e, m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, eps: u32, mono: &Monomial) -> ParamExpr {
        self.terms.get(&(eps, mono.clone())).cloned().unwrap_or_default()
    }

    /// Adds `c * eps^e * mono` in place, respecting the `eps` cap.
    pub fn add_term(&mut self, e: u32, mono: Monomial, c: ParamExpr) {
        if e > self.caps.eps || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((e, mono)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.terms.values().all(ParamExpr::is_numeric)
    }

    pub fn params(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .terms
            .values()
            .flat_map(|c| c.params().map(str::to_string))
            .collect();
        names.sort();
        names.dedup();
        names
    }

    pub fn max_eps(&self) -> Option<u32> {
        self.terms.keys().map(|(e, _)| *e).max()
    }

    pub fn min_eps(&self) -> Option<u32> {
        self.terms.keys().map(|(e, _)| *e).min()
    }

    pub fn max_u_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| m.u_degree()).max().unwrap_or(0)
    }

    pub fn max_jet(&self) -> u32 {
        self.terms.keys().map(|(_, m)| m.max_jet()).max().unwrap_or(0)
    }

    /// True when every term satisfies `diff_degree = d + eps_power`.
    pub fn is_homogeneous(&self, d: i64) -> bool {
        self.terms
            .keys()
            .all(|(e, m)| m.diff_degree() as i64 == d + *e as i64)
    }

    /// The degree `d` of a homogeneous element, if it is one (and nonzero).
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let (e, m) = self.terms.keys().next()?;
        let d = m.diff_degree() as i64 - *e as i64;
        self.is_homogeneous(d).then_some(d)
    }

    // --- linear structure -------------------------------------------------

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.with_caps(self.caps.meet(other.caps));
        out.truncated |= other.truncated;
        for ((e, m), c) in &other.terms {
            out.add_term(*e, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffPoly {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, r: &Rational) -> DiffPoly {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn scale_param(&self, p: &ParamExpr) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero(self.caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            out.add_term(*e, m.clone(), c.try_mul(p)?);
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(&ParamExpr) -> ParamExpr) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            out.add_term(*e, m.clone(), f(c));
        }
        out
    }

    /// Multiplies by `eps^k`.
    pub fn shift_eps(&self, k: u32) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            out.add_term(e + k, m.clone(), c.clone());
        }
        out
    }

    /// `P^<d>`: keeps the terms with `eps` power at most `d`.
    pub fn project(&self, d: u32) -> DiffPoly {
        self.filter(|e, _| e <= d)
    }

    /// Coefficient of `eps^k`, returned as an `eps`-free element.
    pub fn eps_part(&self, k: u32) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        for ((e, m), c) in &self.terms {
            if *e == k {
                out.add_term(0, m.clone(), c.clone());
            }
        }
        out
    }

    /// Keeps exactly the terms at `eps^k` (without shifting them).
    pub fn at_eps(&self, k: u32) -> DiffPoly {
        self.filter(|e, _| e == k)
    }

    pub fn filter(&self, keep: impl Fn(u32, &Monomial) -> bool) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            if keep(*e, m) {
                out.add_term(*e, m.clone(), c.clone());
            }
        }
        out
    }

    pub fn substitute_params(&self, bindings: &BTreeMap<String, ParamExpr>) -> DiffPoly {
        self.map_coeffs(|c| c.substitute(bindings))
    }

    // --- ring structure ---------------------------------------------------

    pub fn mul(&self, other: &DiffPoly) -> Result<DiffPoly> {
        let caps = self.caps.meet(other.caps);
        let mut out = DiffPoly::zero(caps);
        out.truncated = self.truncated || other.truncated;
        for ((e1, m1), c1) in &self.terms {
            for ((e2, m2), c2) in &other.terms {
                let e = e1 + e2;
                if e > caps.eps {
                    continue;
                }
                let m = m1.times(m2);
                let deg = m.u_degree();
                if deg > caps.u {
                    match caps.mode {
                        DegreeMode::Strict => return Err(Error::UDegreeOverflow { degree: deg, cap: caps.u }),
                        DegreeMode::Series => {
                            out.truncated = true;
                            continue;
                        }
                    }
                }
                out.add_term(e, m, c1.try_mul(c2)?);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<DiffPoly> {
        let mut acc = DiffPoly::one(self.caps);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    // --- derivations ------------------------------------------------------

    /// Total x-derivative: `u_k -> u_{k+1}` extended by the Leibniz rule.
    pub fn dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            if m.u_power() > 0 {
                let mut nm = m.clone();
                nm.mul_jet(0, -1);
                nm.mul_jet(1, 1);
                out.add_term(*e, nm, c.scale(&int(m.u_power() as i64)));
            }
            for &(o, exp) in m.jets() {
                let mut nm = m.clone();
                nm.mul_jet(o, -1);
                nm.mul_jet(o + 1, 1);
                out.add_term(*e, nm, c.scale(&int(exp as i64)));
            }
        }
        out
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        (0..n).fold(self.clone(), |acc, _| acc.dx())
    }

    /// Formal partial derivative with respect to `u_n`.
    pub fn partial(&self, n: u32) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        out.truncated = self.truncated;
        for ((e, m), c) in &self.terms {
            let exp = m.jet_exponent(n);
            if exp == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.mul_jet(n, -1);
            out.add_term(*e, nm, c.scale(&int(exp as i64)));
        }
        out
    }

    /// `D_P(Q) = sum_n (dx^n P) dQ/du_n`. Called on `P`.
    pub fn evolutionary(&self, q: &DiffPoly) -> Result<DiffPoly> {
        let caps = self.caps.meet(q.caps);
        let mut out = DiffPoly::zero(caps);
        let mut dp = self.clone();
        for n in 0..=q.max_jet() {
            let dq = q.partial(n);
            if !dq.is_zero() {
                out = out.add(&dp.mul(&dq)?);
            }
            dp = dp.dx();
        }
        Ok(out)
    }

    /// `[P, Q] = D_P(Q) - D_Q(P)`, so that `[D_P, D_Q] = D_{[P,Q]}`.
    pub fn flow_bracket(&self, q: &DiffPoly) -> Result<DiffPoly> {
        Ok(self.evolutionary(q)?.sub(&q.evolutionary(self)?))
    }

    /// Formal `u`-antiderivative taken monomial by monomial, with zero
    /// integration constant: `u^p m -> u^{p+1} m / (p+1)`.
    pub fn integrate_u(&self) -> DiffPoly {
        let mut out = DiffPoly::zero(self.caps);
        for ((e, m), c) in &self.terms {
            let p = m.u_power();
            out.add_term(*e, m.with_u_power(p + 1), c.scale(&Rational::new(1.into(), (p as i64 + 1).into())));
        }
        out
    }

    /// True when no term at a positive `eps` power carries a factor of `u`.
    pub fn is_constant_coefficient(&self) -> bool {
        self.terms.keys().all(|(e, m)| *e == 0 || m.u_power() == 0)
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .map(|((e, m), c)| {
                let mut jets: Vec<(u32, u32)> = m.jets().to_vec();
                jets.reverse();
                (*e, m.u_power(), jets, c.to_string())
            })
            .collect()
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, first: bool, eps: u32, m: &Monomial, c: &ParamExpr) -> fmt::Result {
    let mut factors = Vec::new();
    match eps {
        0 => {}
        1 => factors.push("eps".to_string()),
        k => factors.push(format!("eps^{k}")),
    }
    if !m.is_one() {
        factors.push(m.to_string());
    }
    // Single numeric-like coefficient: sign outside, magnitude as a factor.
    let simple = match c.as_rational() {
        Some(r) => Some((r.is_negative(), r.abs(), None)),
        None if c.constant().is_zero() && c.terms().len() == 1 => {
            let (name, r) = c.terms().iter().next().expect("one term");
            Some((r.is_negative(), r.abs(), Some(name.as_str())))
        }
        None => None,
    };
    match simple {
        Some((neg, mag, name)) => {
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut lead = Vec::new();
            if !mag.is_one() || (name.is_none() && factors.is_empty()) {
                lead.push(fmt_rational(&mag));
            }
            if let Some(n) = name {
                lead.push(n.to_string());
            }
            lead.extend(factors);
            write!(f, "{}", lead.join("*"))
        }
        None => {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for fac in factors {
                write!(f, "*{fac}")?;
            }
            Ok(())
        }
    }
}

/// Canonical rendering: ascending `eps` power, then larger `u` power first,
/// then larger jet partition first. Parses back to the same value.
impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((e, m), c)) in self.terms.iter().enumerate() {
            fmt_term(f, i == 0, *e, m, c)?;
        }
        Ok(())
    }
}
