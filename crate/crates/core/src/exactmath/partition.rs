use std::fmt;

/// Integer partition with parts stored weakly decreasing.
///
/// The derived ordering is the lexicographic one on the part sequence, which
/// on partitions of a fixed size is the order `lambda < mu` iff the first
/// differing part of `lambda` is smaller.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    All,
    /// `l >= 2` and `lambda_1 = lambda_2`.
    Circ,
    /// `Circ` with every part at least 2.
    Prime,
    /// Every part at least 2 (length unrestricted).
    PartsGe2,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parts equal to `k`.
    pub fn multiplicity(&self, k: u32) -> u32 {
        self.0.iter().filter(|&&p| p == k).count() as u32
    }

    /// `(lambda, 1)`.
    pub fn with_one(&self) -> Partition {
        let mut parts = self.0.clone();
        parts.push(1);
        Partition(parts)
    }

    pub fn is_circ(&self) -> bool {
        self.0.len() >= 2 && self.0[0] == self.0[1]
    }

    pub fn is_prime(&self) -> bool {
        self.is_circ() && self.0.iter().all(|&p| p >= 2)
    }

    pub fn is_kind(&self, kind: PartitionKind) -> bool {
        match kind {
            PartitionKind::All => true,
            PartitionKind::Circ => self.is_circ(),
            PartitionKind::Prime => self.is_prime(),
            PartitionKind::PartsGe2 => self.0.iter().all(|&p| p >= 2),
        }
    }

    /// `(k^m)`: the part `k` repeated `m` times.
    pub fn repeated(k: u32, m: usize) -> Partition {
        Partition(vec![k; m])
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n` of the requested kind, in descending lexicographic
/// order.
pub fn partitions_of(n: u32, kind: PartitionKind) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    descend(n, n, &mut current, &mut out);
    out.retain(|p| p.is_kind(kind));
    out
}

fn descend(rest: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    for part in (1..=max_part.min(rest)).rev() {
        current.push(part);
        descend(rest - part, part, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    /// Brute force: every weakly decreasing sequence built by exhaustive search
    /// over compositions, deduplicated.
    fn brute_force_count(n: u32) -> usize {
        fn compositions(n: u32) -> Vec<Vec<u32>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 1..=n {
                for mut rest in compositions(n - first) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        let mut set: Vec<Partition> = compositions(n).into_iter().map(Partition::new).collect();
        set.sort();
        set.dedup();
        set.len()
    }

    #[test]
    fn named_examples() {
        assert_eq!(partitions_of(4, PartitionKind::Prime), vec![p(&[2, 2])]);
        assert_eq!(partitions_of(3, PartitionKind::Circ), vec![p(&[1, 1, 1])]);
        assert_eq!(
            partitions_of(6, PartitionKind::PartsGe2),
            vec![p(&[6]), p(&[4, 2]), p(&[3, 3]), p(&[2, 2, 2])]
        );
    }

    #[test]
    fn cardinality_matches_partition_function() {
        let known = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
        for n in 0..=12u32 {
            let count = partitions_of(n, PartitionKind::All).len();
            assert_eq!(count, known[n as usize]);
            assert_eq!(count, brute_force_count(n));
        }
    }

    #[test]
    fn statistics() {
        assert_eq!(p(&[2, 2, 1]).multiplicity(1), 1);
        assert_eq!(p(&[2, 2]).multiplicity(2), 2);
        assert!(p(&[3, 1]) < p(&[3, 2]));
        assert_eq!(p(&[2, 1]).with_one(), p(&[2, 1, 1]));
    }

    #[test]
    fn lex_order_is_total_and_list_is_descending() {
        for n in 0..=10 {
            let all = partitions_of(n, PartitionKind::All);
            for w in all.windows(2) {
                assert!(w[0] > w[1]);
            }
            for a in &all {
                for b in &all {
                    assert_eq!(a == b, a.cmp(b) == std::cmp::Ordering::Equal);
                    assert_eq!(a < b, b > a);
                    for c in &all {
                        if a < b && b < c {
                            assert!(a < c);
                        }
                    }
                }
            }
        }
    }
}
