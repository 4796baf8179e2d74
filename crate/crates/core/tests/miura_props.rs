mod common;

use proptest::prelude::*;

use rdeform::diffpoly::Caps;
use rdeform::functionals::LocalFunctional;
use rdeform::miura::{ad_apply, normalize_poisson, phi_hamiltonian, MiuraTransformation};
use rdeform::operators::DiffOperator;
use rdeform::sampling::Sampler;

use common::{diffpoly, functional, homogeneous, miura};

fn caps() -> Caps {
    Caps::new(4)
}

/// Admissible `(h̄, k)`: an eps-free functional of degree `k - 1`.
fn hamiltonian(u_free: bool) -> impl Strategy<Value = (LocalFunctional, u32)> {
    (2u32..=4).prop_flat_map(move |k| {
        homogeneous(k - 1, 3, caps()).prop_map(move |h| {
            let h = if u_free { h.filter(|_, m| m.u_power() == 0) } else { h };
            (LocalFunctional::integrate(&h), k)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_is_associative(a in miura(caps()), b in miura(caps()), c in miura(caps())) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverses_are_two_sided(a in miura(caps())) {
        let inv = a.invert().unwrap();
        prop_assert!(a.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&a).unwrap().is_identity());
        let id = MiuraTransformation::identity(caps());
        prop_assert_eq!(a.compose(&id).unwrap(), a.clone());
        prop_assert_eq!(id.compose(&a).unwrap(), a);
    }

    #[test]
    fn apply_respects_composition(a in miura(caps()), b in miura(caps()), p in diffpoly(caps(), 3)) {
        let both = a.compose(&b).unwrap().apply_to_poly(&p).unwrap();
        prop_assert_eq!(both, a.apply_to_poly(&b.apply_to_poly(&p).unwrap()).unwrap());
    }

    #[test]
    fn hamiltonian_transformations_preserve_dx((h, k) in hamiltonian(false)) {
        let phi = phi_hamiltonian(&h, k).unwrap();
        let d = DiffOperator::dx(caps());
        prop_assert_eq!(phi.conjugate(&d).unwrap(), d);
    }

    #[test]
    fn u_free_hamiltonians_are_normal((h, k) in hamiltonian(true)) {
        let phi = phi_hamiltonian(&h, k).unwrap();
        prop_assert!(phi.is_normal().is_some());
    }

    #[test]
    fn ad_series_matches_substitution((h, k) in hamiltonian(false), f in functional(caps(), 3)) {
        let phi = phi_hamiltonian(&h, k).unwrap();
        prop_assert_eq!(ad_apply(&h, k, &f).unwrap(), phi.apply_to_functional(&f).unwrap());
    }

    #[test]
    fn flows_follow_the_variable(a in miura(caps()), q in diffpoly(caps(), 3), p in diffpoly(caps(), 3)) {
        // Brackets of flows are natural under a change of variable.
        let lhs = a.transform_flow(&q.flow_bracket(&p).unwrap()).unwrap();
        let rhs = a.transform_flow(&q).unwrap().flow_bracket(&a.transform_flow(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn poisson_normalization_is_normal(seed in any::<u64>()) {
        let caps = Caps::new(4);
        let psi = Sampler::new(seed).normal_miura(caps).unwrap();
        let d = DiffOperator::dx(caps);
        let k = psi.conjugate(&d).unwrap();
        let (phi, _) = normalize_poisson(&k, 3).unwrap();
        prop_assert!(phi.is_normal().is_some());
        prop_assert_eq!(phi.conjugate(&k).unwrap(), d);
    }
}
