mod common;

use proptest::prelude::*;

use rdeform::diffpoly::{Caps, DiffPoly};
use rdeform::operators::DiffOperator;

use common::{diffpoly, functional, miura};

fn caps() -> Caps {
    Caps::new(3)
}

fn operator(terms: usize) -> impl Strategy<Value = DiffOperator> {
    prop::collection::vec(diffpoly(caps(), terms), 1..=3).prop_map(|cs| DiffOperator::from_coeffs(cs, caps()))
}

/// `a dx + dx a`, skew for every `a`.
fn skew_operator() -> impl Strategy<Value = DiffOperator> {
    diffpoly(caps(), 3).prop_map(|a| {
        let m = DiffOperator::multiplication(&a);
        let d = DiffOperator::dx(caps());
        m.compose(&d).unwrap().add(&d.compose(&m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dagger_is_an_involution(k in operator(3)) {
        prop_assert_eq!(k.dagger().dagger(), k);
    }

    #[test]
    fn dagger_reverses_products(a in operator(2), b in operator(2)) {
        prop_assert_eq!(a.compose(&b).unwrap().dagger(), b.dagger().compose(&a.dagger()).unwrap());
    }

    #[test]
    fn composition_matches_application(a in operator(2), b in operator(2), q in diffpoly(caps(), 3)) {
        prop_assert_eq!(a.compose(&b).unwrap().apply(&q).unwrap(), a.apply(&b.apply(&q).unwrap()).unwrap());
    }

    #[test]
    fn bracket_of_skew_operator_is_skew(k in skew_operator(), f in functional(caps(), 3), g in functional(caps(), 3)) {
        prop_assert!(k.is_skew());
        prop_assert_eq!(k.bracket(&f, &g).unwrap(), k.bracket(&g, &f).unwrap().scale(&rdeform::exactmath::int(-1)));
    }

    #[test]
    fn dorfman_self_adjointness(h in functional(caps(), 4)) {
        let l = DiffOperator::linearize(&h.var_derivative());
        prop_assert_eq!(l.dagger(), l);
    }

    #[test]
    fn conjugation_is_an_action(phi in miura(caps()), psi in miura(caps()), k in skew_operator()) {
        let both = phi.compose(&psi).unwrap().conjugate(&k).unwrap();
        let stepwise = phi.conjugate(&psi.conjugate(&k).unwrap()).unwrap();
        prop_assert_eq!(both, stepwise);
    }
}

#[test]
fn dx_is_poisson_on_default_samples() {
    let caps = Caps::new(2);
    let samples = rdeform::operators::default_samples(4, caps);
    let report = DiffOperator::dx(caps).poisson_check(&samples).unwrap();
    assert!(report.is_poisson());
    let not_skew = DiffOperator::multiplication(&DiffPoly::u(caps));
    assert!(!not_skew.poisson_check(&samples).unwrap().is_poisson());
}
