//! Local functionals `int h dx` modulo total derivatives and constants.
//!
//! A functional is stored through its unique canonical density: every
//! monomial `f(u) u_lambda` with `lambda` nonempty has `lambda_1 = lambda_2`
//! and at least two parts, and the additive constant is dropped. The
//! reduction moves one x-derivative off the highest jet at a time, which
//! strictly lowers the jet partition in lexicographic order.

use std::collections::BinaryHeap;
use std::fmt;

use num_traits::{One, Zero};

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::Result;
use crate::exactmath::{int, Partition, Rational};
use crate::operators::DiffOperator;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFunctional {
    density: DiffPoly,
}

/// Outcome of reducing a density modulo `Im(dx)`.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Canonical representative, constant term removed.
    pub canonical: DiffPoly,
    /// `W` with `P = canonical + dx W + const`.
    pub witness: DiffPoly,
}

fn is_canonical(m: &Monomial) -> bool {
    let jets = m.jets();
    match jets.first() {
        None => true,
        Some(&(_, e)) => e >= 2,
    }
}

/// Integration by parts down to the canonical shape.
pub fn reduce(p: &DiffPoly) -> Reduction {
    let caps = p.caps();
    let mut work = p.filter(|_, m| !m.is_one());
    let mut witness = DiffPoly::zero(caps);
    // Highest reducible jet partition first; each step only creates strictly
    // smaller partitions of the same weight, so every key is handled once.
    let mut queue: BinaryHeap<(Partition, u32, Monomial)> = work
        .terms()
        .filter(|(_, m, _)| !is_canonical(m))
        .map(|(e, m, _)| (m.partition(), e, m.clone()))
        .collect();
    while let Some((_, e, m)) = queue.pop() {
        let c = work.coeff(e, &m);
        if c.is_zero() {
            continue;
        }
        let top = m.max_jet();
        let mut w = m.clone();
        w.mul_jet(top, -1);
        let below = w.jet_exponent(top - 1);
        w.mul_jet(top - 1, 1);
        let coeff = c.scale(&Rational::new(One::one(), (below as i64 + 1).into()));
        let wpoly = DiffPoly::term(e, w.clone(), coeff.clone(), caps);
        for (e2, m2, c2) in wpoly.dx().terms() {
            if m2.is_one() {
                continue;
            }
            let fresh = work.coeff(e2, m2).is_zero();
            work.add_term(e2, m2.clone(), -c2);
            if fresh && !is_canonical(m2) && !(e2 == e && *m2 == m) {
                queue.push((m2.partition(), e2, m2.clone()));
            }
        }
        witness.add_term(e, w, coeff);
    }
    Reduction { canonical: work, witness }
}

impl LocalFunctional {
    /// `int P dx` in canonical form.
    pub fn integrate(p: &DiffPoly) -> LocalFunctional {
        LocalFunctional { density: reduce(p).canonical }
    }

    pub fn zero(caps: Caps) -> LocalFunctional {
        LocalFunctional { density: DiffPoly::zero(caps) }
    }

    pub fn density(&self) -> &DiffPoly {
        &self.density
    }

    pub fn caps(&self) -> Caps {
        self.density.caps()
    }

    pub fn is_zero(&self) -> bool {
        self.density.is_zero()
    }

    pub fn add(&self, other: &LocalFunctional) -> LocalFunctional {
        LocalFunctional { density: self.density.add(&other.density) }
    }

    pub fn sub(&self, other: &LocalFunctional) -> LocalFunctional {
        LocalFunctional { density: self.density.sub(&other.density) }
    }

    pub fn scale(&self, r: &Rational) -> LocalFunctional {
        LocalFunctional { density: self.density.scale(r) }
    }

    pub fn shift_eps(&self, k: u32) -> LocalFunctional {
        LocalFunctional { density: self.density.shift_eps(k) }
    }

    pub fn with_caps(&self, caps: Caps) -> LocalFunctional {
        LocalFunctional { density: self.density.with_caps(caps) }
    }

    /// `h|_{eps=0}`.
    pub fn leading(&self) -> LocalFunctional {
        LocalFunctional { density: self.density.project(0) }
    }

    /// `delta/delta u = sum_n (-dx)^n d/du_n` applied to the density.
    pub fn var_derivative(&self) -> DiffPoly {
        var_derivative_of(&self.density)
    }

    /// The class of `int dh/du dx`.
    pub fn du(&self) -> LocalFunctional {
        LocalFunctional::integrate(&self.density.partial(0))
    }

    /// `D_P(h̄) = int D_P(h) dx`.
    pub fn evolve(&self, p: &DiffPoly) -> Result<LocalFunctional> {
        Ok(LocalFunctional::integrate(&p.evolutionary(&self.density)?))
    }
}

/// Variational derivative of an arbitrary density.
pub fn var_derivative_of(h: &DiffPoly) -> DiffPoly {
    // Horner form of sum_n (-dx)^n dh/du_n
    let top = h.max_jet();
    let mut acc = h.partial(top);
    for n in (0..top).rev() {
        acc = h.partial(n).sub(&acc.dx());
    }
    acc
}

/// Decides `P in Im(dx)` (up to the constant term); returns `W` with
/// `dx W = P - P(0)`.
pub fn is_total_derivative(p: &DiffPoly) -> Option<DiffPoly> {
    let r = reduce(p);
    r.canonical.is_zero().then_some(r.witness)
}

/// Decides `P in Im(delta/delta u)` through self-adjointness of `L(P)`.
pub fn is_variational(p: &DiffPoly) -> bool {
    let l = DiffOperator::linearize(p);
    l == l.dagger()
}

impl fmt::Display for LocalFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "int({})", self.density)
    }
}

/// `int u^p dx / p!`-style helper used across the crate: `int c u^p dx`.
pub fn power_functional(p: u32, c: Rational, caps: Caps) -> LocalFunctional {
    if c.is_zero() {
        return LocalFunctional::zero(caps);
    }
    LocalFunctional::integrate(&DiffPoly::term(0, Monomial::u_pow(p), c, caps))
}

/// `int u dx`.
pub fn casimir(caps: Caps) -> LocalFunctional {
    power_functional(1, int(1), caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn caps() -> Caps {
        Caps::new(6)
    }

    fn mono(eps: u32, p: u32, jets: &[(u32, u32)], c: Rational) -> DiffPoly {
        DiffPoly::term(eps, Monomial::new(p, jets.iter().copied()), c, caps())
    }

    #[test]
    fn integrate_examples() {
        let f = LocalFunctional::integrate(&mono(0, 0, &[(1, 1), (3, 1)], int(1)));
        assert_eq!(f.density(), &mono(0, 0, &[(2, 2)], int(-1)));
        assert!(LocalFunctional::integrate(&mono(0, 0, &[(2, 1)], int(1))).is_zero());
        // u_3 u_2^2 = dx(u_2^3)/3
        assert!(LocalFunctional::integrate(&mono(0, 0, &[(3, 1), (2, 2)], int(1))).is_zero());
        // u^2 u_2 -> -2 u u_1^2
        let g = LocalFunctional::integrate(&mono(0, 2, &[(2, 1)], int(1)));
        assert_eq!(g.density(), &mono(0, 1, &[(1, 2)], int(-2)));
        // constants are dropped, int u is kept
        let h = LocalFunctional::integrate(&mono(0, 0, &[], int(5)).add(&mono(0, 1, &[], int(2))));
        assert_eq!(h.density(), &mono(0, 1, &[], int(2)));
    }

    #[test]
    fn var_derivative_examples() {
        let cubic = LocalFunctional::integrate(&mono(0, 3, &[], rat(1, 6)));
        assert_eq!(cubic.var_derivative(), mono(0, 2, &[], rat(1, 2)));
        let disp = LocalFunctional::integrate(&mono(0, 0, &[(1, 2)], rat(-1, 24)));
        assert_eq!(disp.var_derivative(), mono(0, 0, &[(2, 1)], rat(1, 12)));
        let q = mono(1, 2, &[(1, 1), (3, 1)], int(3)).add(&mono(0, 0, &[(2, 2)], int(1)));
        assert!(var_derivative_of(&q.dx()).is_zero());
    }

    #[test]
    fn total_derivative_examples() {
        let a = mono(0, 0, &[(1, 2)], int(1)).add(&mono(0, 1, &[(2, 1)], int(1)));
        assert_eq!(is_total_derivative(&a), Some(mono(0, 1, &[(1, 1)], int(1))));
        assert_eq!(is_total_derivative(&mono(0, 1, &[(1, 1)], int(1))), Some(mono(0, 2, &[], rat(1, 2))));
        assert_eq!(is_total_derivative(&mono(0, 0, &[(1, 2)], int(1))), None);
    }

    #[test]
    fn variational_examples() {
        assert!(is_variational(&mono(0, 2, &[], rat(1, 2))));
        assert!(!is_variational(&mono(0, 0, &[(1, 1)], int(1))));
        assert!(is_variational(&mono(0, 0, &[(2, 1)], rat(1, 12))));
    }

    #[test]
    fn du_examples() {
        let cubic = LocalFunctional::integrate(&mono(0, 3, &[], rat(1, 6)));
        assert_eq!(cubic.du(), LocalFunctional::integrate(&mono(0, 2, &[], rat(1, 2))));
        let disp = LocalFunctional::integrate(&mono(0, 0, &[(1, 2)], rat(-1, 24)));
        assert!(disp.du().is_zero());
        let uu22 = LocalFunctional::integrate(&mono(0, 1, &[(2, 2)], int(1)));
        assert_eq!(uu22.du(), LocalFunctional::integrate(&mono(0, 0, &[(2, 2)], int(1))));
    }

    #[test]
    fn du_is_well_defined_on_classes() {
        let h = mono(0, 3, &[(1, 2)], int(2)).add(&mono(2, 1, &[(2, 2)], rat(1, 3)));
        let alt = h.add(&mono(0, 4, &[(1, 1), (2, 1)], int(7)).dx());
        assert_eq!(LocalFunctional::integrate(&h).du(), LocalFunctional::integrate(&alt).du());
    }
}
