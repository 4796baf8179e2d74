//! Normal forms of Hamiltonians and first flows: the generalized standard
//! form of `h̄_1`, the normal form of the first flow `P` with
//! `u_t = dx P`, and the relation between the two.

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::exactmath::{int, rat, Partition, PartitionKind, Rational};
use crate::functionals::LocalFunctional;
use crate::miura::{ad_apply, monomial_basis, phi_hamiltonian, MiuraTransformation};
use crate::report::Report;

use super::solve_against;

/// One elimination: the `u_lambda` term at `eps^order` removed by `Φ_{corrector}`.
#[derive(Clone, Debug)]
pub struct DlyzStep {
    pub order: u32,
    pub partition: Partition,
    pub corrector: LocalFunctional,
}

fn cubic(caps: Caps) -> DiffPoly {
    DiffPoly::term(0, Monomial::u_pow(3), rat(1, 6), caps)
}

/// Largest `lambda` containing a 1 among the `u_lambda` terms at `eps^k`.
fn next_reducible(h: &LocalFunctional, k: u32) -> Option<(Partition, crate::exactmath::ParamExpr)> {
    h.density()
        .terms()
        .filter(|(e, m, _)| *e == k && m.u_power() == 0 && m.jet_exponent(1) > 0)
        .map(|(_, m, c)| (m.partition(), c.clone()))
        .max_by(|a, b| a.0.cmp(&b.0))
}

/// Removes every `u_lambda` with a part equal to 1 at orders `eps^3..eps^E`
/// by Hamiltonian Miura transformations of levels `k >= 3`, which preserve
/// `dx` and the normal form. Returns `φ`, `h̄_1` in the new variable and the
/// steps taken.
pub fn dlyz_reduce(h1: &LocalFunctional) -> Result<(MiuraTransformation, LocalFunctional, Vec<DlyzStep>)> {
    let caps = h1.caps();
    let density = h1.density();
    if density.eps_part(0) != cubic(caps) {
        return Err(Error::InvalidInput(format!("expected u^3/6 at eps^0, found {}", density.eps_part(0))));
    }
    if let Some((e, m, _)) = density.terms().find(|(e, m, _)| *e > 0 && m.u_power() > 0) {
        return Err(Error::NotConstantCoefficients(format!("term {m} at eps^{e} depends on u")));
    }
    let mut phi = MiuraTransformation::identity(caps);
    let mut h = h1.clone();
    let mut steps = Vec::new();
    for k in 3..=caps.eps {
        let budget = crate::exactmath::partitions_of(k, PartitionKind::All).len() * 4 + 4;
        for _ in 0..budget {
            let Some((lambda, a)) = next_reducible(&h, k) else { break };
            let parts = lambda.parts();
            let rest = Partition::new(parts[..parts.len() - 1].to_vec());
            let l = rest.len() as i64;
            let divisor = k as i64 + l - lambda.multiplicity(1) as i64 - 1;
            let coeff = a.scale(&Rational::new((-1).into(), divisor.into()));
            let corrector = LocalFunctional::integrate(&DiffPoly::term(0, Monomial::from_partition(0, &rest), coeff, caps));
            let step = phi_hamiltonian(&corrector, k)?;
            h = ad_apply(&corrector, k, &h)?;
            phi = step.compose(&phi)?;
            if next_reducible(&h, k).is_some_and(|(mu, _)| mu == lambda) {
                return Err(Error::NoSolution { order: k, detail: format!("u_{lambda} survives its corrector") });
            }
            steps.push(DlyzStep { order: k, partition: lambda, corrector });
        }
        if let Some((lambda, _)) = next_reducible(&h, k) {
            return Err(Error::NoSolution { order: k, detail: format!("u_{lambda} could not be eliminated") });
        }
        if let Some((_, m, _)) = h.density().terms().find(|(e, m, _)| *e == k && m.u_power() > 0) {
            return Err(Error::NotConstantCoefficients(format!("term {m} at eps^{k} depends on u")));
        }
    }
    Ok((phi, h, steps))
}

/// `T(f) = D_{u u_1}(f) - u dx f`, keeping only the terms containing `u_1`.
fn normal_form_image(f: &DiffPoly) -> Result<DiffPoly> {
    let caps = f.caps();
    let lead = DiffPoly::term(0, Monomial::new(1, [(1, 1)]), int(1), caps);
    let image = lead.evolutionary(f)?.sub(&DiffPoly::u(caps).mul(&f.dx())?);
    Ok(image.filter(|_, m| m.jet_exponent(1) > 0))
}

fn normal_form_of(p: &DiffPoly, f: &DiffPoly) -> Result<(MiuraTransformation, DiffPoly)> {
    let phi = MiuraTransformation::new(f.dx())?;
    let flow = p.dx();
    let moved = phi.apply_to_poly(&p.add(&flow.evolutionary(f)?))?;
    Ok((phi, moved))
}

/// Normal form of a first flow `u_t = dx P` with `P|_{eps=0} = u^2/2`:
/// `ũ = u + dx f` with `f` chosen so that no coefficient of `P̃` at
/// `eps^k`, `k >= 2`, contains `u_1`. Returns `φ` and `P̃`.
pub fn alm_normal_form(p: &DiffPoly) -> Result<(MiuraTransformation, DiffPoly)> {
    let caps = p.caps();
    let half_square = DiffPoly::term(0, Monomial::u_pow(2), rat(1, 2), caps);
    if p.eps_part(0) != half_square {
        return Err(Error::InvalidInput(format!("expected u^2/2 at eps^0, found {}", p.eps_part(0))));
    }
    let free = Caps { eps: 0, ..caps };
    let mut f = DiffPoly::zero(caps);
    for k in 2..=caps.eps {
        let (_, moved) = normal_form_of(p, &f)?;
        let residual = moved.eps_part(k).filter(|_, m| m.jet_exponent(1) > 0);
        if residual.is_zero() {
            continue;
        }
        let basis = monomial_basis(k - 1, residual.max_u_degree());
        let images = basis
            .iter()
            .map(|m| normal_form_image(&DiffPoly::term(0, m.clone(), int(1), free)))
            .collect::<Result<Vec<_>>>()?;
        let sol = solve_against(&images, &residual.with_caps(free));
        if !sol.is_consistent() {
            return Err(Error::NoSolution { order: k, detail: "u_1 terms cannot be removed".into() });
        }
        for (m, v) in basis.into_iter().zip(sol.particular()) {
            f.add_term(k, m, v);
        }
    }
    let (phi, moved) = normal_form_of(p, &f)?;
    if let Some((e, m, _)) = moved.terms().find(|(e, m, _)| *e >= 2 && m.jet_exponent(1) > 0) {
        return Err(Error::NoSolution { order: e, detail: format!("{m} remains") });
    }
    Ok((phi, moved))
}

fn coeff_at(p: &DiffPoly, lambda: &Partition) -> crate::exactmath::ParamExpr {
    p.coeff(lambda.size(), &Monomial::from_partition(0, lambda))
}

/// For `h̄_1` in generalized standard form, checks that `P_1 = delta h̄_1`
/// is in normal form with `P_1^{[2]} = -2a u_2`, `c_{(2^g)} = 0` and
/// `c_{(4,2^{g-2})} = g(g-1) b_{(2^g)}` for `2 <= g <= E/2`.
pub fn gsf_alm_bridge(h1: &LocalFunctional) -> Result<Report> {
    let caps = h1.caps();
    let density = h1.density();
    let mut report = Report::new("standard form to normal form");
    report.push("h1 = int(u^3/6) at eps^0", density.eps_part(0) == cubic(caps), density.eps_part(0).to_string());
    let stray = density.filter(|e, m| {
        e >= 1
            && !(e == 2 && *m == Monomial::new(0, [(1, 2)]))
            && !(e >= 3 && m.u_power() == 0 && m.partition().is_prime())
    });
    report.push("h1 in generalized standard form", stray.is_zero(), stray.to_string());
    let p1 = h1.var_derivative();
    let offending = p1.filter(|e, m| e >= 1 && (m.u_power() > 0 || m.jet_exponent(1) > 0));
    report.push("P1 in normal form", offending.is_zero(), offending.to_string());
    let a = density.coeff(2, &Monomial::new(0, [(1, 2)]));
    let c2 = coeff_at(&p1, &Partition::new(vec![2]));
    report.push("P1 eps^2 coefficient = -2a", c2 == a.scale(&int(-2)), format!("{c2}"));
    for g in 2..=(caps.eps / 2) {
        let twos = Partition::repeated(2, g as usize);
        let c = coeff_at(&p1, &twos);
        report.push(format!("c{twos} = 0"), c.is_zero(), c.to_string());
        let mut parts = vec![4];
        parts.extend(std::iter::repeat_n(2, g as usize - 2));
        let four = Partition::new(parts);
        let lhs = coeff_at(&p1, &four);
        let b = density.coeff(2 * g, &Monomial::from_partition(0, &twos));
        let rhs = b.scale(&int((g * (g - 1)) as i64));
        report.push(format!("c{four} = {} b{twos}", g * (g - 1)), lhs == rhs, format!("{lhs} vs {rhs}"));
    }
    Ok(report)
}
