#![allow(dead_code)]

use proptest::prelude::*;

use rdeform::diffpoly::{Caps, DiffPoly, Monomial};
use rdeform::exactmath::{rat, Rational};
use rdeform::functionals::LocalFunctional;
use rdeform::miura::{monomial_basis, MiuraTransformation};

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=6, 1i64..=5, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

pub fn monomial(max_u: u32, max_jet: u32) -> impl Strategy<Value = Monomial> {
    (0..=max_u, prop::collection::vec((1..=max_jet, 1..=2u32), 0..=2)).prop_map(|(p, jets)| Monomial::new(p, jets))
}

/// Arbitrary, generally inhomogeneous, polynomial with at most `terms` terms.
pub fn diffpoly(caps: Caps, terms: usize) -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec((0..=caps.eps, monomial(2, 3), nonzero_rational()), 0..=terms).prop_map(move |ts| {
        let mut p = DiffPoly::zero(caps);
        for (e, m, c) in ts {
            p.add_term(e, m, c.into());
        }
        p
    })
}

/// Random eps-free combination of the monomials of degree `degree` with u-degree at most `max_u`.
pub fn homogeneous(degree: u32, max_u: u32, caps: Caps) -> impl Strategy<Value = DiffPoly> {
    let basis = monomial_basis(degree, max_u);
    prop::collection::vec(rational(), basis.len()).prop_map(move |cs| {
        let mut p = DiffPoly::zero(caps);
        for (m, c) in basis.iter().zip(cs) {
            p.add_term(0, m.clone(), c.into());
        }
        p
    })
}

/// `ũ = u + sum_k eps^k f_k` with random `f_k` of degree `k`.
pub fn miura(caps: Caps) -> impl Strategy<Value = MiuraTransformation> {
    let parts: Vec<_> = (1..=caps.eps).map(|k| homogeneous(k, 2, caps).prop_map(move |f| f.shift_eps(k))).collect();
    parts.prop_map(move |fs| {
        let shift = fs.iter().fold(DiffPoly::zero(caps), |acc, f| acc.add(f));
        MiuraTransformation::new(shift).expect("degree-zero shift")
    })
}

pub fn functional(caps: Caps, terms: usize) -> impl Strategy<Value = LocalFunctional> {
    diffpoly(caps, terms).prop_map(|p| LocalFunctional::integrate(&p))
}
