//! Closed-form rational data of rank-one DR hierarchies: coefficient heads,
//! the two-point generating polynomials `P_g(a, b)`, Hodge integral values and
//! the Bernoulli identities behind them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::exactmath::{bernoulli, double_factorial, factorial, fmt_rational, int, ParamExpr, Rational};
use crate::functionals::LocalFunctional;

fn abs_bernoulli(n: u32) -> Rational {
    bernoulli(n as usize).abs()
}

fn ratio(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

fn pow4(g: u32) -> BigInt {
    BigInt::from(4).pow(g)
}

fn require(g: u32, min: u32, what: &str) -> Result<()> {
    if g < min {
        return Err(Error::OutOfRange(format!("{what} needs g >= {min}, got {g}")));
    }
    Ok(())
}

/// `alpha_g = (2g/4^g) / (2g+1)!!`.
pub fn alpha(g: u32) -> Rational {
    ratio(BigInt::from(2 * g), pow4(g) * double_factorial(2 * g as i64 + 1))
}

/// `beta_g = (3g-1)(2g-1)|B_2g| / (2g)!`.
pub fn beta(g: u32) -> Rational {
    int(((3 * g - 1) * (2 * g - 1)) as i64) * abs_bernoulli(2 * g) / Rational::from(factorial(2 * g))
}

/// `gamma_g = (3g-2)|B_2g| / (8 (2g-3)!)`, `g >= 2`.
pub fn gamma(g: u32) -> Result<Rational> {
    require(g, 2, "gamma")?;
    Ok(int((3 * g - 2) as i64) * abs_bernoulli(2 * g) / Rational::from(factorial(2 * g - 3) * 8))
}

/// Leading part `coefficient * r_index` of a coefficient linear in the
/// R-matrix exponents, or a constant when `r_index` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearHead {
    pub coefficient: Rational,
    pub r_index: Option<u32>,
}

impl fmt::Display for LinearHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.r_index {
            Some(i) => write!(f, "{}*r{i}", fmt_rational(&self.coefficient)),
            None => write!(f, "{}", fmt_rational(&self.coefficient)),
        }
    }
}

/// `c_2 = 1/12`; for `g >= 2` the head `alpha_g r_{g-1}` of `c_{2g}`.
pub fn c2g_head(g: u32) -> Result<LinearHead> {
    require(g, 1, "c2g_head")?;
    Ok(if g == 1 {
        LinearHead { coefficient: Rational::new(1.into(), 12.into()), r_index: None }
    } else {
        LinearHead { coefficient: alpha(g), r_index: Some(g - 1) }
    })
}

/// Coefficient of `s_{g-1}` in `a_{(2^g)}`:
/// `(-1)^g (3g-2)|B_{2g-2}||B_2g| / (4g ((2g-2)!)^2)`.
pub fn a_2g_head(g: u32) -> Result<Rational> {
    require(g, 2, "a_2g_head")?;
    let f = Rational::from(factorial(2 * g - 2));
    let v = int((3 * g - 2) as i64) * abs_bernoulli(2 * g - 2) * abs_bernoulli(2 * g) / (int(4 * g as i64) * &f * &f);
    Ok(if g.is_multiple_of(2) { v } else { -v })
}

/// Polynomial in `a`, `b` with rational coefficients keyed by `(deg_a, deg_b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivariatePoly {
    coefficients: BTreeMap<(u32, u32), Rational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Rational::one())
    }

    fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coefficients.entry((i, j)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&(i, j));
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<(u32, u32), Rational> {
        &self.coefficients
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.coefficients.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.coefficients {
            out.add_term(i, j, c * r);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coefficients.iter().all(|(&(i, j), c)| self.coeff(j, i) == *c)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.coefficients.keys().map(|(i, j)| i + j).max()
    }

    /// Substitutes `b = -a`; returns the coefficients of `a^n` by `n`.
    pub fn at_b_minus_a(&self) -> BTreeMap<u32, Rational> {
        let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
        for (&(i, j), c) in &self.coefficients {
            let v = if j % 2 == 0 { c.clone() } else { -c };
            *out.entry(i + j).or_insert_with(Rational::zero) += v;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, other: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.coefficients {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, other: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(i, j), c) in &self.coefficients {
            for (&(k, l), d) in &other.coefficients {
                out.add_term(i + k, j + l, c * d);
            }
        }
        out
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.coefficients.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mut factors = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                factors.push(fmt_rational(&mag));
            }
            for (var, e) in [("a", i), ("b", j)] {
                match e {
                    0 => {}
                    1 => factors.push(var.to_string()),
                    _ => factors.push(format!("{var}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

fn a_plus_b() -> BivariatePoly {
    &BivariatePoly::monomial(1, 0, Rational::one()) + &BivariatePoly::monomial(0, 1, Rational::one())
}

/// `P_g = (a+b)^{2g} / ((2g+1) 24^g g!) + (a^2 - ab + b^2)/(12(2g+1)) P_{g-1}`, `P_0 = 1`.
pub fn bssz_recursive(g: u32) -> BivariatePoly {
    let quad = &(&BivariatePoly::monomial(2, 0, int(1)) + &BivariatePoly::monomial(1, 1, int(-1)))
        + &BivariatePoly::monomial(0, 2, int(1));
    let mut p = BivariatePoly::one();
    for h in 1..=g {
        let head = a_plus_b()
            .pow(2 * h)
            .scale(&ratio(1.into(), BigInt::from(2 * h + 1) * BigInt::from(24).pow(h) * factorial(h)));
        let tail = (&quad * &p).scale(&ratio(1.into(), BigInt::from(12 * (2 * h + 1))));
        p = &head + &tail;
    }
    p
}

/// Coefficient of `z^{2g}` in `exp(z^2 (a+b)^2/24) sum_n (-1)^n z^{2n} (ab/4)^n / (2n+1)!!`.
pub fn bssz_closed(g: u32) -> BivariatePoly {
    let square = a_plus_b().pow(2);
    let mut out = BivariatePoly::zero();
    for n in 0..=g {
        let m = g - n;
        let exp_part = square.pow(m).scale(&ratio(1.into(), BigInt::from(24).pow(m) * factorial(m)));
        let sign: BigInt = if n % 2 == 0 { 1.into() } else { (-1).into() };
        let series = BivariatePoly::monomial(n, n, ratio(sign, pow4(n) * double_factorial(2 * n as i64 + 1)));
        out = &out + &(&exp_part * &series);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HodgeKind {
    /// Coefficient of `a^{2g}` in `int psi_1^{g-1} lambda_g DR_g(a,-a)`.
    PsiDr,
    /// Coefficient of `a^2` in `int lambda_1 DR_1(a,-a)`.
    Dr1,
    /// `int lambda_g lambda_{g-1} lambda_{g-2}`.
    LambdaTriple,
    /// `b_h = int lambda_h psi_1^{2h-2}`, `b_0 = 1`.
    BH,
    /// `sum_{g1+g2=g} b_{g1} b_{g2}`.
    BConvolution,
}

pub fn b_h(h: u32) -> Rational {
    if h == 0 {
        return Rational::one();
    }
    let two = BigInt::from(2).pow(2 * h - 1);
    ratio(&two - 1, two) * abs_bernoulli(2 * h) / Rational::from(factorial(2 * h))
}

/// `(2g-1)|B_2g| / (2g)!`, the closed form of the `b`-convolution.
pub fn b_convolution_closed(g: u32) -> Rational {
    int(2 * g as i64 - 1) * abs_bernoulli(2 * g) / Rational::from(factorial(2 * g))
}

pub fn hodge_value(kind: HodgeKind, g: u32) -> Result<Rational> {
    match kind {
        HodgeKind::PsiDr => {
            require(g, 1, "psi_dr")?;
            Ok(ratio(1.into(), BigInt::from(24).pow(g) * factorial(g)))
        }
        HodgeKind::Dr1 => {
            if g != 1 {
                return Err(Error::OutOfRange(format!("dr1 is a genus 1 value, got g = {g}")));
            }
            Ok(Rational::new(1.into(), 24.into()))
        }
        HodgeKind::LambdaTriple => {
            require(g, 2, "lambda_triple")?;
            let m = 2 * g - 2;
            Ok(ratio(1.into(), factorial(m) * 2) * abs_bernoulli(m) / int(m as i64) * abs_bernoulli(2 * g)
                / int(2 * g as i64))
        }
        HodgeKind::BH => Ok(b_h(g)),
        HodgeKind::BConvolution => Ok((0..=g).map(|i| b_h(i) * b_h(g - i)).sum()),
    }
}

/// `u^2/2 + (G/12) eps^2 u_2`.
pub fn kdv_p1(g: impl Into<ParamExpr>, caps: Caps) -> DiffPoly {
    let c = g.into().scale(&Rational::new(1.into(), 12.into()));
    DiffPoly::term(0, Monomial::u_pow(2), Rational::new(1.into(), 2.into()), caps).add(&DiffPoly::term(
        2,
        Monomial::jet(2),
        c,
        caps,
    ))
}

/// `coefficient/(3k+2) int u u_2^{k+1}`, the correction to `ḡ_1` caused by
/// a term `coefficient * eps^{2k+2} u_2^{k+1}` in `P_1`.
pub fn delta_g1_with(k: u32, coefficient: &Rational, caps: Caps) -> Result<LocalFunctional> {
    require(k, 1, "delta_g1")?;
    let c = coefficient / int(3 * k as i64 + 2);
    Ok(LocalFunctional::integrate(&DiffPoly::term(0, Monomial::new(1, [(2, k + 1)]), c, caps)))
}

/// [`delta_g1_with`] at `coefficient = alpha(k+1)`.
pub fn delta_g1(k: u32, caps: Caps) -> Result<LocalFunctional> {
    delta_g1_with(k, &alpha(k + 1), caps)
}

/// `c D_{dx(u_2^{k+1})}(int u^3/6) + D_{u u_1}(delta)`, which must vanish.
pub fn delta_g1_residual(k: u32, coefficient: &Rational, caps: Caps) -> Result<LocalFunctional> {
    let delta = delta_g1_with(k, coefficient, caps)?;
    let cubic = LocalFunctional::integrate(&DiffPoly::term(0, Monomial::u_pow(3), Rational::new(1.into(), 6.into()), caps));
    let push = DiffPoly::term(0, Monomial::new(0, [(2, k + 1)]), coefficient.clone(), caps).dx();
    let lead = DiffPoly::term(0, Monomial::new(1, [(1, 1)]), int(1), caps);
    Ok(cubic.evolve(&push)?.add(&delta.evolve(&lead)?))
}
