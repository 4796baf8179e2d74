use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `n!! = n (n-2) (n-4) ...`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Bernoulli numbers `B_0 ..= B_n` with the convention `B_1 = -1/2`.
///
/// Uses the Akiyama-Tanigawa transform, which produces `B_1 = +1/2`; the
/// sign of that single entry is flipped afterwards.
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut row: Vec<Rational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(Rational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * BigInt::from(j);
        }
        out.push(row[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_table(n).pop().expect("table has n+1 entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    /// Independent route: `sum_{k=0}^{n} C(n+1,k) B_k = 0`.
    fn bernoulli_by_recurrence(n: usize) -> Vec<Rational> {
        let mut b = vec![int(1)];
        for m in 1..=n {
            let mut s = Rational::zero();
            for (k, bk) in b.iter().enumerate() {
                s += Rational::from_integer(binomial(m as u32 + 1, k as u32)) * bk;
            }
            b.push(-s / int(m as i64 + 1));
        }
        b
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn matches_recurrence_up_to_40() {
        assert_eq!(bernoulli_table(40), bernoulli_by_recurrence(40));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(double_factorial(7), BigInt::from(105));
        assert_eq!(double_factorial(-1), BigInt::one());
        assert_eq!(binomial(7, 3), BigInt::from(35));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }
}
