//! Seeded random inputs: small rationals, normal Miura transformations,
//! standard-form Hamiltonians, conservation-law flows and expression texts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::Result;
use crate::exactmath::{fmt_rational, partitions_of, rabs, rat, PartitionKind, Rational};
use crate::functionals::LocalFunctional;
use crate::miura::{monomial_basis, phi_hamiltonian, MiuraTransformation};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `p/q` with `0 < |p| <= 5`, `1 <= q <= 4`.
    pub fn nonzero_rational(&mut self) -> Rational {
        let p = self.rng.gen_range(1..=5) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        rat(p, self.rng.gen_range(1..=4))
    }

    /// Up to `count` distinct monomials from `basis` with random coefficients.
    fn combination(&mut self, basis: &[Monomial], count: usize, eps: u32, caps: Caps) -> DiffPoly {
        let mut out = DiffPoly::zero(caps);
        for m in basis.choose_multiple(&mut self.rng, count.min(basis.len())) {
            let c = self.nonzero_rational();
            out.add_term(eps, m.clone(), c.into());
        }
        out
    }

    /// `ũ = u + sum_{k=2}^E eps^k dx^2 f_k` with random `f_k` of degree `k-2`.
    pub fn normal_miura(&mut self, caps: Caps) -> Result<MiuraTransformation> {
        let mut shift = DiffPoly::zero(caps);
        for k in 2..=caps.eps {
            let basis = monomial_basis(k - 2, 2);
            let basis = if k == 2 { vec![Monomial::u_pow(1), Monomial::u_pow(2)] } else { basis };
            let f = self.combination(&basis, 2, 0, caps);
            shift = shift.add(&f.dx_n(2).shift_eps(k));
        }
        MiuraTransformation::new(shift)
    }

    /// `int(u^3/6 + a eps^2 u_1^2 + eps^4 b u_2^2 + eps^6 (...))` with P' terms at
    /// orders 4..E.
    pub fn standard_form_h1(&mut self, caps: Caps, nonzero: usize) -> LocalFunctional {
        let mut slots: Vec<(u32, Monomial)> = vec![(2, Monomial::new(0, [(1, 2)]))];
        for k in 4..=caps.eps {
            for lambda in partitions_of(k, PartitionKind::Prime) {
                slots.push((k, Monomial::from_partition(0, &lambda)));
            }
        }
        let mut density = DiffPoly::term(0, Monomial::u_pow(3), rat(1, 6), caps);
        for (e, m) in slots.choose_multiple(&mut self.rng, nonzero.min(slots.len())) {
            let c = self.nonzero_rational();
            density.add_term(*e, m.clone(), c.into());
        }
        LocalFunctional::integrate(&density)
    }

    /// Random `Φ_{ḡ,dx}` with u-free `ḡ` at a random level in `3..=E`.
    pub fn dx_preserving_step(&mut self, caps: Caps) -> Result<MiuraTransformation> {
        let k = self.rng.gen_range(3..=caps.eps.max(3));
        let basis: Vec<Monomial> =
            partitions_of(k - 1, PartitionKind::Circ).iter().map(|l| Monomial::from_partition(0, l)).collect();
        let g = LocalFunctional::integrate(&self.combination(&basis, 1, 0, caps));
        phi_hamiltonian(&g, k)
    }

    /// `u^2/2 + sum_{k=1}^E eps^k P_k` with one or two random monomials per order.
    pub fn conservation_flow(&mut self, caps: Caps) -> DiffPoly {
        let mut p = DiffPoly::term(0, Monomial::u_pow(2), rat(1, 2), caps);
        for k in 1..=caps.eps {
            let count = self.rng.gen_range(1..=2);
            p = p.add(&self.combination(&monomial_basis(k, 3), count, k, caps));
        }
        p
    }

    /// A random expression text over `u`, jets, `eps` and the given parameters.
    pub fn expression_text(&mut self, params: &[&str]) -> String {
        let terms = self.rng.gen_range(1..=4);
        let mut out = String::new();
        for i in 0..terms {
            let c = self.nonzero_rational();
            let negative = c < Rational::from_integer(0.into());
            match (i > 0, negative) {
                (true, true) => out.push_str(" - "),
                (true, false) => out.push_str(" + "),
                (false, true) => out.push('-'),
                (false, false) => {}
            }
            out.push_str(&format!("({})", fmt_rational(&rabs(&c))));
            if !params.is_empty() && self.rng.gen_bool(0.3) {
                out.push('*');
                out.push_str(params.choose(&mut self.rng).expect("nonempty"));
            }
            let e = self.rng.gen_range(0..=3);
            if e > 0 {
                out.push_str(&format!("*eps^{e}"));
            }
            for _ in 0..self.rng.gen_range(0..=3) {
                match self.rng.gen_range(0..4) {
                    0 => out.push_str("*u"),
                    n => out.push_str(&format!("*u{n}")),
                }
                if self.rng.gen_bool(0.3) {
                    out.push_str(&format!("^{}", self.rng.gen_range(2..=3)));
                }
            }
        }
        out
    }
}
