mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use rdeform::diffpoly::{Caps, DiffPoly, Monomial};
use rdeform::exactmath::{int, ParamExpr, Rational};
use rdeform::hierarchy::{
    alm_normal_form, alm_template, check_special, check_tau, dlyz_reduce, extract_constraints, kdv_flow,
    reconstruct_flow, riemann_flow, Hierarchy,
};
use rdeform::miura::MiuraTransformation;
use rdeform::sampling::Sampler;

use common::nonzero_rational;

/// `D_P(Q)` by the chain rule term by term, without the library's evolutionary field.
fn chain_rule(p: &DiffPoly, q: &DiffPoly) -> DiffPoly {
    let caps = p.caps().meet(q.caps());
    let mut out = DiffPoly::zero(caps);
    for (e, m, c) in q.terms() {
        let mut factors: Vec<u32> = vec![0; m.u_power() as usize];
        for &(order, exp) in m.jets() {
            factors.extend(std::iter::repeat_n(order, exp as usize));
        }
        for i in 0..factors.len() {
            let mut term = DiffPoly::term(e, Monomial::one(), c.clone(), caps);
            for (j, &order) in factors.iter().enumerate() {
                let factor = if i == j { p.dx_n(order) } else { DiffPoly::jet(order, caps) };
                term = term.mul(&factor).unwrap();
            }
            out = out.add(&term);
        }
    }
    out
}

#[test]
fn reconstructed_flows_commute_by_independent_expansion() {
    let caps = Caps::new(6);
    let p = kdv_flow(caps);
    for d in 2..=3 {
        let q = reconstruct_flow(&p, &riemann_flow(d, caps)).unwrap();
        let bracket = chain_rule(&p, &q).sub(&chain_rule(&q, &p));
        assert!(bracket.is_zero(), "d = {d}: {bracket}");
    }
}

#[test]
fn solved_coefficients_are_forced() {
    let caps = Caps::new(4);
    let p = kdv_flow(caps);
    let q = reconstruct_flow(&p, &riemann_flow(2, caps)).unwrap();
    for (e, m, _) in q.terms().filter(|(e, _, _)| *e > 0) {
        let bumped = q.add(&DiffPoly::term(e, m.clone(), int(1), caps));
        let residual = p.flow_bracket(&bumped).unwrap();
        assert!(!residual.eps_part(e).is_zero(), "eps^{e} {m}");
    }
}

#[test]
fn extracted_c22_matches_formula() {
    let mut sampler = Sampler::new(29);
    for _ in 0..5 {
        let (c2, c4, c6) = (sampler.nonzero_rational(), sampler.nonzero_rational(), sampler.nonzero_rational());
        let fixed: BTreeMap<String, Rational> =
            [("c2", &c2), ("c4", &c4), ("c6", &c6)].into_iter().map(|(n, v)| (n.to_string(), v.clone())).collect();
        let report = extract_constraints(&alm_template(Caps::new(8), &fixed, false)).unwrap();
        let expected = (int(280) * &c2 * &c6 - int(400) * &c4 * &c4) / (int(144) * &c2 * &c2);
        assert_eq!(report.determined.get("c22"), Some(&ParamExpr::from(expected)));
    }
}

#[test]
fn kdv_hierarchy_is_tau_symmetric() {
    let h = Hierarchy::kdv(3, Caps::new(6)).unwrap();
    assert!(check_special(&h).unwrap().passed());
    let tau = check_tau(&h).unwrap();
    assert!(tau.passed(), "{tau}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dlyz_output_shape(seed in any::<u64>(), steps in 1usize..=3) {
        let caps = Caps::new(6);
        let mut sampler = Sampler::new(seed);
        let h1 = sampler.standard_form_h1(caps, 3);
        let mut scramble = MiuraTransformation::identity(caps);
        for _ in 0..steps {
            scramble = sampler.dx_preserving_step(caps).unwrap().compose(&scramble).unwrap();
        }
        let (phi, gsf, _) = dlyz_reduce(&scramble.apply_to_functional(&h1).unwrap()).unwrap();
        let density = gsf.density();
        prop_assert_eq!(density.eps_part(0), DiffPoly::term(0, Monomial::u_pow(3), rdeform::exactmath::rat(1, 6), caps));
        for (e, m, _) in density.terms().filter(|(e, _, _)| *e > 0) {
            let head = e == 2 && m == &Monomial::new(0, [(1, 2)]);
            prop_assert!(head || (e >= 4 && m.u_power() == 0 && m.partition().is_prime()), "eps^{} {}", e, m);
        }
        prop_assert!(phi.is_normal().is_some());
        prop_assert!(phi.is_dx_preserving().unwrap());
    }

    #[test]
    fn normal_form_removes_u1(seed in any::<u64>()) {
        let caps = Caps::new(4);
        let p = Sampler::new(seed).conservation_flow(caps);
        let (phi, normal) = alm_normal_form(&p).unwrap();
        for k in 2..=caps.eps {
            prop_assert!(normal.eps_part(k).partial(1).is_zero());
        }
        prop_assert_eq!(phi.transform_flow(&p.dx()).unwrap(), normal.dx());
    }

    #[test]
    fn hamiltonian_hierarchies_are_special(a in nonzero_rational(), b in nonzero_rational()) {
        let caps = Caps::new(4);
        let density = DiffPoly::term(0, Monomial::u_pow(3), rdeform::exactmath::rat(1, 6), caps)
            .add(&DiffPoly::term(2, Monomial::new(0, [(1, 2)]), a, caps))
            .add(&DiffPoly::term(4, Monomial::new(0, [(2, 2)]), b, caps));
        let h = Hierarchy::from_h1(&rdeform::functionals::LocalFunctional::integrate(&density), 2).unwrap();
        prop_assert!(check_special(&h).unwrap().passed());
        prop_assert!(check_tau(&h).unwrap().passed());
    }
}
