//! Scalar differential operators `K = sum_i K_i dx^i` with coefficients in
//! the truncated differential polynomial ring, and the Poisson structure
//! they induce on local functionals.

use std::fmt;

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::Result;
use crate::exactmath::{binomial, int, partitions_of, PartitionKind, Rational};
use crate::functionals::LocalFunctional;

#[derive(Clone, Debug)]
pub struct DiffOperator {
    /// `coeffs[i]` multiplies `dx^i`; no trailing zeros.
    coeffs: Vec<DiffPoly>,
    caps: Caps,
}

impl PartialEq for DiffOperator {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for DiffOperator {}

fn binom(n: u32, k: u32) -> Rational {
    Rational::from_integer(binomial(n, k))
}

impl DiffOperator {
    pub fn zero(caps: Caps) -> Self {
        DiffOperator { coeffs: Vec::new(), caps }
    }

    pub fn from_coeffs(coeffs: Vec<DiffPoly>, caps: Caps) -> Self {
        let mut out = DiffOperator { coeffs, caps };
        out.trim();
        out
    }

    /// Multiplication by `P`.
    pub fn multiplication(p: &DiffPoly) -> Self {
        DiffOperator::from_coeffs(vec![p.clone()], p.caps())
    }

    pub fn identity(caps: Caps) -> Self {
        DiffOperator::multiplication(&DiffPoly::one(caps))
    }

    /// `dx^n`.
    pub fn dx_pow(n: u32, caps: Caps) -> Self {
        let mut coeffs = vec![DiffPoly::zero(caps); n as usize];
        coeffs.push(DiffPoly::one(caps));
        DiffOperator { coeffs, caps }
    }

    pub fn dx(caps: Caps) -> Self {
        DiffOperator::dx_pow(1, caps)
    }

    /// Linearization `L(P) = sum_n dP/du_n dx^n`.
    pub fn linearize(p: &DiffPoly) -> Self {
        let coeffs = (0..=p.max_jet()).map(|n| p.partial(n)).collect();
        DiffOperator::from_coeffs(coeffs, p.caps())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(DiffPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn coeffs(&self) -> &[DiffPoly] {
        &self.coeffs
    }

    /// Coefficient of `dx^i` (zero beyond the order).
    pub fn coeff(&self, i: usize) -> DiffPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| DiffPoly::zero(self.caps))
    }

    /// Highest power of `dx` present; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn with_caps(&self, caps: Caps) -> Self {
        DiffOperator::from_coeffs(self.coeffs.iter().map(|c| c.with_caps(caps)).collect(), caps)
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> Self {
        DiffOperator::from_coeffs(self.coeffs.iter().map(f).collect(), self.caps)
    }

    pub fn try_map(&self, f: impl Fn(&DiffPoly) -> Result<DiffPoly>) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(DiffOperator::from_coeffs(coeffs, self.caps))
    }

    /// Coefficientwise `eps^k` part, as an `eps`-free operator.
    pub fn eps_part(&self, k: u32) -> Self {
        self.map(|c| c.eps_part(k))
    }

    pub fn shift_eps(&self, k: u32) -> Self {
        self.map(|c| c.shift_eps(k))
    }

    /// Largest `eps` power among the coefficients.
    pub fn max_eps(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(DiffPoly::max_eps).max()
    }

    pub fn add(&self, other: &DiffOperator) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let caps = self.caps.meet(other.caps);
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        DiffOperator::from_coeffs(coeffs, caps)
    }

    pub fn sub(&self, other: &DiffOperator) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(DiffPoly::neg)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    /// `K(Q) = sum_i K_i dx^i Q`.
    pub fn apply(&self, q: &DiffPoly) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero(self.caps.meet(q.caps()));
        let mut dq = q.clone();
        for c in &self.coeffs {
            if !c.is_zero() {
                out = out.add(&c.mul(&dq)?);
            }
            dq = dq.dx();
        }
        Ok(out)
    }

    /// `self o other`, expanded with `dx^i o M = sum_l C(i,l) (dx^l M) dx^{i-l}`.
    pub fn compose(&self, other: &DiffOperator) -> Result<Self> {
        let caps = self.caps.meet(other.caps);
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        let mut coeffs = vec![DiffPoly::zero(caps); len];
        for (j, m) in other.coeffs.iter().enumerate() {
            let mut dm = m.clone();
            let mut derivs = Vec::new();
            for _ in 0..self.coeffs.len() {
                derivs.push(dm.clone());
                dm = dm.dx();
            }
            for (i, k) in self.coeffs.iter().enumerate() {
                if k.is_zero() {
                    continue;
                }
                for (l, d) in derivs.iter().enumerate().take(i + 1) {
                    if d.is_zero() {
                        continue;
                    }
                    let term = k.mul(d)?.scale(&binom(i as u32, l as u32));
                    let slot = i - l + j;
                    coeffs[slot] = coeffs[slot].add(&term);
                }
            }
        }
        Ok(DiffOperator::from_coeffs(coeffs, caps))
    }

    /// Formal adjoint `sum_i (-dx)^i o K_i`.
    pub fn dagger(&self) -> Self {
        let mut coeffs = vec![DiffPoly::zero(self.caps); self.coeffs.len()];
        for (i, k) in self.coeffs.iter().enumerate() {
            let sign = if i % 2 == 0 { int(1) } else { int(-1) };
            let mut dk = k.clone();
            for l in 0..=i {
                let term = dk.scale(&(&sign * binom(i as u32, l as u32)));
                coeffs[i - l] = coeffs[i - l].add(&term);
                dk = dk.dx();
            }
        }
        DiffOperator::from_coeffs(coeffs, self.caps)
    }

    pub fn is_skew(&self) -> bool {
        self.dagger() == self.neg()
    }

    /// `{f̄, ḡ}_K = int (delta f) K (delta g) dx`.
    pub fn bracket(&self, f: &LocalFunctional, g: &LocalFunctional) -> Result<LocalFunctional> {
        let kg = self.apply(&g.var_derivative())?;
        Ok(LocalFunctional::integrate(&f.var_derivative().mul(&kg)?))
    }

    /// Skew-symmetry plus the Jacobi identity on every triple of distinct
    /// samples, all up to the operator's `eps` cap.
    pub fn poisson_check(&self, samples: &[LocalFunctional]) -> Result<PoissonReport> {
        let skew_defect = self.add(&self.dagger());
        if !skew_defect.is_zero() {
            return Ok(PoissonReport {
                skew: false,
                skew_defect: Some(skew_defect),
                jacobi_violation: None,
                triples_checked: 0,
                samples: samples.len(),
            });
        }
        let n = samples.len();
        let deltas: Vec<DiffPoly> = samples.iter().map(LocalFunctional::var_derivative).collect();
        let k_deltas: Vec<DiffPoly> = deltas.iter().map(|d| self.apply(d)).collect::<Result<_>>()?;
        // delta {f_i, f_j} for i < j
        let mut pair = vec![vec![None; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let b = LocalFunctional::integrate(&deltas[i].mul(&k_deltas[j])?);
                pair[i][j] = Some(b.var_derivative());
            }
        }
        let bracket_with = |b: &DiffPoly, k: usize| -> Result<DiffPoly> { b.mul(&k_deltas[k]) };
        let mut checked = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let ij = pair[i][j].as_ref().expect("filled");
                    let jk = pair[j][k].as_ref().expect("filled");
                    let ik = pair[i][k].as_ref().expect("filled");
                    // {{i,j},k} + {{j,k},i} + {{k,i},j} with {k,i} = -{i,k}
                    let dens = bracket_with(ij, k)?
                        .add(&bracket_with(jk, i)?)
                        .sub(&bracket_with(ik, j)?);
                    checked += 1;
                    let jac = LocalFunctional::integrate(&dens);
                    if !jac.is_zero() {
                        return Ok(PoissonReport {
                            skew: true,
                            skew_defect: None,
                            jacobi_violation: Some(JacobiViolation {
                                triple: [samples[i].clone(), samples[j].clone(), samples[k].clone()],
                                jacobiator: jac,
                            }),
                            triples_checked: checked,
                            samples: n,
                        });
                    }
                }
            }
        }
        Ok(PoissonReport { skew: true, skew_defect: None, jacobi_violation: None, triples_checked: checked, samples: n })
    }

    /// `L(ũ) o K o L(ũ)^dagger`, rewritten in the new variable via `to_new`.
    pub fn transform(&self, new_var: &DiffPoly, to_new: impl Fn(&DiffPoly) -> Result<DiffPoly>) -> Result<Self> {
        let l = DiffOperator::linearize(new_var);
        let conj = l.compose(self)?.compose(&l.dagger())?;
        conj.try_map(to_new)
    }
}

#[derive(Clone, Debug)]
pub struct JacobiViolation {
    pub triple: [LocalFunctional; 3],
    pub jacobiator: LocalFunctional,
}

#[derive(Clone, Debug)]
pub struct PoissonReport {
    pub skew: bool,
    pub skew_defect: Option<DiffOperator>,
    pub jacobi_violation: Option<JacobiViolation>,
    pub triples_checked: usize,
    pub samples: usize,
}

impl PoissonReport {
    pub fn is_poisson(&self) -> bool {
        self.skew && self.jacobi_violation.is_none()
    }
}

/// Nonzero canonical classes `int u^p u_lambda dx` with `p + |lambda| <= weight`,
/// deduplicated.
/// Largest `|lambda| + p` in the default Jacobi sample set.
pub const DEFAULT_SAMPLE_WEIGHT: u32 = 6;

pub fn default_samples(weight: u32, caps: Caps) -> Vec<LocalFunctional> {
    let mut out: Vec<LocalFunctional> = Vec::new();
    for size in 0..=weight {
        for lambda in partitions_of(size, PartitionKind::All) {
            for p in 0..=(weight - size) {
                let m = Monomial::from_partition(p, &lambda);
                if m.is_one() || m.u_degree() > caps.u {
                    continue;
                }
                let f = LocalFunctional::integrate(&DiffPoly::term(0, m, int(1), caps));
                if !f.is_zero() && !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// `(K_2)*D^2 + (K_1)*D + (K_0)`, highest order first; unit coefficients
/// print as bare `D^i`.
impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let one = DiffPoly::one(self.caps);
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let d = match i {
                0 => String::new(),
                1 => "D".to_string(),
                _ => format!("D^{i}"),
            };
            if i > 0 && *c == one {
                write!(f, "{d}")?;
            } else if i == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{d}")?;
            }
        }
        Ok(())
    }
}
