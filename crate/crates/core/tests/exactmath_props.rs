mod common;

use num_traits::Zero;
use proptest::prelude::*;

use rdeform::exactmath::{bernoulli, binomial, partitions_of, Partition, PartitionKind, ParamExpr, Rational};

use common::rational;

#[test]
fn bernoulli_recurrence_closes() {
    for n in 1..=40u32 {
        let sum: Rational = (0..=n).map(|k| Rational::from(binomial(n + 1, k)) * bernoulli(k as usize)).sum();
        assert!(sum.is_zero(), "n = {n}");
    }
}

/// Euler's pentagonal recurrence for p(n).
fn partition_numbers(max: usize) -> Vec<u64> {
    let mut p = vec![0i64; max + 1];
    p[0] = 1;
    for n in 1..=max as i64 {
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            p[n as usize] += sign * p[(n - g1) as usize];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                p[n as usize] += sign * p[(n - g2) as usize];
            }
            k += 1;
        }
    }
    p.into_iter().map(|v| v as u64).collect()
}

#[test]
fn partition_counts_match_partition_function() {
    let expected = partition_numbers(12);
    for n in 0..=12u32 {
        let all = partitions_of(n, PartitionKind::All);
        assert_eq!(all.len() as u64, expected[n as usize], "n = {n}");
        assert!(all.iter().all(|l| l.size() == n && l.parts().windows(2).all(|w| w[0] >= w[1])));
    }
}

#[test]
fn lex_order_is_total() {
    for n in 0..=10 {
        let all = partitions_of(n, PartitionKind::All);
        for a in &all {
            for b in &all {
                assert_eq!(a == b, a.cmp(b).is_eq());
                assert_eq!(a.cmp(b), b.cmp(a).reverse());
                for c in &all {
                    if a <= b && b <= c {
                        assert!(a <= c);
                    }
                }
            }
        }
    }
}

#[test]
fn partition_classes() {
    for n in 2..=10 {
        for l in partitions_of(n, PartitionKind::Circ) {
            assert!(l.len() >= 2 && l.parts()[0] == l.parts()[1], "{l}");
        }
        for l in partitions_of(n, PartitionKind::PartsGe2) {
            assert!(l.parts().iter().all(|&p| p >= 2));
        }
        for l in partitions_of(n, PartitionKind::Prime) {
            assert!(l.is_circ() && l.multiplicity(1) == 0);
        }
    }
    assert_eq!(Partition::new(vec![1, 3, 2]).parts(), &[3, 2, 1]);
}

fn param_expr() -> impl Strategy<Value = ParamExpr> {
    (rational(), prop::collection::vec((prop::sample::select(vec!["a", "b", "c"]), rational()), 0..=3)).prop_map(
        |(c, terms)| {
            let mut e = ParamExpr::from(c);
            for (name, v) in terms {
                e += ParamExpr::param(name).scale(&v);
            }
            e
        },
    )
}

proptest! {
    #[test]
    fn param_addition_laws(x in param_expr(), y in param_expr(), z in param_expr()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert!((&x - &x).is_zero());
        prop_assert_eq!(&x + &ParamExpr::zero(), x.clone());
    }

    #[test]
    fn param_scaling_laws(x in param_expr(), y in param_expr(), r in rational(), s in rational()) {
        let rp = ParamExpr::from(r.clone());
        prop_assert_eq!((&x + &y).scale(&r), &x.scale(&r) + &y.scale(&r));
        prop_assert_eq!(x.scale(&(&r * &s)), x.scale(&s).scale(&r));
        prop_assert_eq!(x.try_mul(&rp).unwrap(), rp.try_mul(&x).unwrap());
        prop_assert_eq!(x.scale(&(&r + &s)), &x.scale(&r) + &x.scale(&s));
    }

    #[test]
    fn param_products_of_symbols_are_rejected(x in param_expr(), y in param_expr()) {
        let ok = x.try_mul(&y).is_ok();
        prop_assert_eq!(ok, x.is_numeric() || y.is_numeric());
    }
}
