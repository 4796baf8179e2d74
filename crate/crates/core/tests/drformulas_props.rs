use num_traits::Zero;

use rdeform::diffpoly::Caps;
use rdeform::drformulas::{
    a_2g_head, alpha, b_convolution_closed, b_h, bssz_closed, bssz_recursive, delta_g1, delta_g1_residual, gamma,
    hodge_value, HodgeKind,
};
use rdeform::exactmath::{bernoulli, factorial, int, rabs, Rational};

fn inv_factorial(n: u32) -> Rational {
    Rational::from(factorial(n)).recip()
}

#[test]
fn bssz_routes_agree() {
    for g in 1..=8 {
        let closed = bssz_closed(g);
        assert_eq!(bssz_recursive(g), closed, "g = {g}");
        assert!(closed.is_symmetric());
        let top = closed.at_b_minus_a().get(&(2 * g)).cloned().unwrap_or_default();
        assert_eq!(alpha(g), int(2 * g as i64) * top, "g = {g}");
    }
}

#[test]
fn kappa_combination_vanishes() {
    for g in 2..=12u32 {
        let sign = |n: u32| if n.is_multiple_of(2) { int(1) } else { int(-1) };
        let mut total = sign(g - 1) * inv_factorial(g) - inv_factorial(g);
        for i in 1..g {
            let j = g - i;
            total += sign(j + 1) * inv_factorial(i) * inv_factorial(j);
        }
        assert!(total.is_zero(), "g = {g}");
    }
}

#[test]
fn bernoulli_convolution() {
    for g in 1..=8u32 {
        let conv: Rational = (0..=g).map(|i| b_h(i) * b_h(g - i)).sum();
        assert_eq!(conv, b_convolution_closed(g));
        assert_eq!(conv, hodge_value(HodgeKind::BConvolution, g).unwrap());
        assert_eq!(conv, int(2 * g as i64 - 1) * rabs(&bernoulli(2 * g as usize)) / Rational::from(factorial(2 * g)));
    }
}

#[test]
fn gamma_from_a_head() {
    for g in 2..=8u32 {
        let m = 2 * g - 2;
        let rhs = int((g * (g - 1)) as i64) * Rational::from(factorial(m)) / rabs(&bernoulli(m as usize)) * rabs(&a_2g_head(g).unwrap());
        assert_eq!(gamma(g).unwrap(), rhs, "g = {g}");
        let sign_ok = if g % 2 == 0 { a_2g_head(g).unwrap() > int(0) } else { a_2g_head(g).unwrap() < int(0) };
        assert!(sign_ok);
    }
    assert!(gamma(1).is_err());
}

#[test]
fn delta_g1_identity() {
    for k in 1..=3 {
        let caps = Caps::new(2 * k + 2);
        assert!(delta_g1_residual(k, &alpha(k + 1), caps).unwrap().is_zero(), "k = {k}");
        assert!(!delta_g1(k, caps).unwrap().is_zero());
    }
}

#[test]
fn delta_g1_residual_is_linear() {
    let caps = Caps::new(4);
    let one = delta_g1_residual(1, &int(1), caps).unwrap();
    let three = delta_g1_residual(1, &int(3), caps).unwrap();
    assert_eq!(one.scale(&int(3)), three);
}
