use std::cmp::Ordering;
use std::fmt;

use crate::exactmath::Partition;

/// `u^p * prod_k u_k^{e_k}` with `u_k` the k-th x-derivative of `u`, `k >= 1`.
///
/// Jets are kept sorted by decreasing order with positive exponents, so the
/// jet part reads directly as a partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    u_power: u32,
    jets: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn u_pow(p: u32) -> Self {
        Monomial { u_power: p, jets: Vec::new() }
    }

    /// `u_n`; `n = 0` gives `u`.
    pub fn jet(n: u32) -> Self {
        if n == 0 {
            Monomial::u_pow(1)
        } else {
            Monomial { u_power: 0, jets: vec![(n, 1)] }
        }
    }

    pub fn new(u_power: u32, jets: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut m = Monomial::u_pow(u_power);
        for (order, exp) in jets {
            m.mul_jet(order, exp as i64);
        }
        m
    }

    /// `u^p * u_lambda`.
    pub fn from_partition(u_power: u32, lambda: &Partition) -> Self {
        Monomial::new(u_power, lambda.parts().iter().map(|&k| (k, 1)))
    }

    pub fn u_power(&self) -> u32 {
        self.u_power
    }

    /// `(order, exponent)` pairs, highest order first.
    pub fn jets(&self) -> &[(u32, u32)] {
        &self.jets
    }

    pub fn jet_exponent(&self, order: u32) -> u32 {
        if order == 0 {
            return self.u_power;
        }
        self.jets
            .iter()
            .find(|(o, _)| *o == order)
            .map_or(0, |(_, e)| *e)
    }

    pub fn max_jet(&self) -> u32 {
        self.jets.first().map_or(0, |(o, _)| *o)
    }

    /// Sum of `k * e_k`; `deg u = 0`.
    pub fn diff_degree(&self) -> u32 {
        self.jets.iter().map(|(o, e)| o * e).sum()
    }

    /// `p + sum e_k`.
    pub fn u_degree(&self) -> u32 {
        self.u_power + self.jets.iter().map(|(_, e)| e).sum::<u32>()
    }

    pub fn is_one(&self) -> bool {
        self.u_power == 0 && self.jets.is_empty()
    }

    pub fn partition(&self) -> Partition {
        let mut parts = Vec::new();
        for &(o, e) in &self.jets {
            parts.extend(std::iter::repeat_n(o, e as usize));
        }
        Partition::new(parts)
    }

    /// Jet part only, `u^0 * u_lambda`.
    pub fn jet_part(&self) -> Monomial {
        Monomial { u_power: 0, jets: self.jets.clone() }
    }

    pub fn with_u_power(&self, p: u32) -> Monomial {
        Monomial { u_power: p, jets: self.jets.clone() }
    }

    /// Multiplies by `u_order^delta`; `delta` may be negative as long as the
    /// exponent stays non-negative.
    pub fn mul_jet(&mut self, order: u32, delta: i64) {
        if order == 0 {
            let p = self.u_power as i64 + delta;
            assert!(p >= 0, "negative u power");
            self.u_power = p as u32;
            return;
        }
        match self.jets.iter().position(|(o, _)| *o <= order) {
            Some(i) if self.jets[i].0 == order => {
                let e = self.jets[i].1 as i64 + delta;
                assert!(e >= 0, "negative jet exponent");
                if e == 0 {
                    self.jets.remove(i);
                } else {
                    self.jets[i].1 = e as u32;
                }
            }
            Some(i) => {
                assert!(delta >= 0, "negative jet exponent");
                if delta > 0 {
                    self.jets.insert(i, (order, delta as u32));
                }
            }
            None => {
                assert!(delta >= 0, "negative jet exponent");
                if delta > 0 {
                    self.jets.push((order, delta as u32));
                }
            }
        }
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        out.u_power += other.u_power;
        for &(o, e) in &other.jets {
            out.mul_jet(o, e as i64);
        }
        out
    }

    /// Compares the jet parts as partitions (lexicographic on parts).
    fn partition_cmp(&self, other: &Monomial) -> Ordering {
        let a = self.jets.iter().flat_map(|&(o, e)| std::iter::repeat_n(o, e as usize));
        let b = other.jets.iter().flat_map(|&(o, e)| std::iter::repeat_n(o, e as usize));
        a.cmp(b)
    }
}

/// Canonical order: larger `u` power first, then larger jet partition first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .u_power
            .cmp(&self.u_power)
            .then_with(|| other.partition_cmp(self))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `u^2*u1*u3^2`; the empty monomial renders as `1`.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        match self.u_power {
            0 => {}
            1 => factors.push("u".to_string()),
            p => factors.push(format!("u^{p}")),
        }
        for &(o, e) in self.jets.iter().rev() {
            if e == 1 {
                factors.push(format!("u{o}"));
            } else {
                factors.push(format!("u{o}^{e}"));
            }
        }
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_stay_sorted() {
        let m = Monomial::new(2, [(1, 1), (3, 2), (2, 1), (1, 1)]);
        assert_eq!(m.jets(), &[(3, 2), (2, 1), (1, 2)]);
        assert_eq!(m.diff_degree(), 10);
        assert_eq!(m.u_degree(), 7);
        assert_eq!(m.partition(), Partition::new(vec![3, 3, 2, 1, 1]));
        assert_eq!(m.to_string(), "u^2*u1^2*u2*u3^2");
    }

    #[test]
    fn canonical_order() {
        let a = Monomial::new(2, [(1, 1)]);
        let b = Monomial::new(1, [(2, 1)]);
        let c = Monomial::new(1, [(1, 2)]);
        assert!(a < b);
        assert!(b < c);
    }
}
