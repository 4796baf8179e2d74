//! Miura transformations `ũ = u + shift(u_*, eps)` and their action on
//! differential polynomials, functionals and operators.
//!
//! Throughout, `apply_to_poly(φ, P)` expresses `P(u_*)` in the new variable
//! `ũ_*`, i.e. substitutes the inverse transformation. `compose(φ, ψ)` is
//! "ψ first, then φ", so `apply(compose(φ, ψ), P) = apply(φ, apply(ψ, P))`.

use std::collections::HashMap;
use std::fmt;

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::exactmath::{factorial, int, Rational};
use crate::functionals::{is_total_derivative, var_derivative_of, LocalFunctional};
use crate::linsolve::{LinearSystem, SparseRow};
use crate::operators::{default_samples, DiffOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug)]
pub struct MiuraTransformation {
    shift: DiffPoly,
    pub normal: Tri,
    pub dx_preserving: Tri,
}

impl PartialEq for MiuraTransformation {
    fn eq(&self, other: &Self) -> bool {
        self.shift == other.shift
    }
}

impl MiuraTransformation {
    pub fn identity(caps: Caps) -> Self {
        MiuraTransformation { shift: DiffPoly::zero(caps), normal: Tri::Yes, dx_preserving: Tri::Yes }
    }

    /// `ũ = u + shift`; the shift must be `O(eps)` and homogeneous of degree 0.
    pub fn new(shift: DiffPoly) -> Result<Self> {
        if shift.terms().any(|(e, _, _)| e == 0) {
            return Err(Error::DegreeMismatch(format!("Miura shift has an eps^0 part: {shift}")));
        }
        if !shift.is_zero() && !shift.is_homogeneous(0) {
            return Err(Error::DegreeMismatch(format!("Miura shift is not of degree 0: {shift}")));
        }
        let flag = if shift.is_zero() { Tri::Yes } else { Tri::Unknown };
        Ok(MiuraTransformation { shift, normal: flag, dx_preserving: flag })
    }

    /// Elementary transformation `ũ = u + eps^k f`.
    pub fn elementary(k: u32, f: &DiffPoly) -> Result<Self> {
        MiuraTransformation::new(f.shift_eps(k))
    }

    pub fn shift(&self) -> &DiffPoly {
        &self.shift
    }

    pub fn caps(&self) -> Caps {
        self.shift.caps()
    }

    pub fn is_identity(&self) -> bool {
        self.shift.is_zero()
    }

    /// `ũ` as an element of the ring.
    pub fn new_variable(&self) -> DiffPoly {
        DiffPoly::u(self.caps()).add(&self.shift)
    }

    pub fn with_caps(&self, caps: Caps) -> Self {
        MiuraTransformation { shift: self.shift.with_caps(caps), ..self.clone() }
    }

    pub fn invert(&self) -> Result<Self> {
        let caps = self.caps();
        let mut t = DiffPoly::zero(caps);
        for _ in 0..caps.eps {
            t = substitute(&self.shift, &t)?.neg();
        }
        Ok(MiuraTransformation { shift: t, normal: self.normal, dx_preserving: self.dx_preserving })
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &MiuraTransformation) -> Result<Self> {
        let shift = first.shift.add(&substitute(&self.shift, &first.shift)?);
        let both = |a: Tri, b: Tri| if a == Tri::Yes && b == Tri::Yes { Tri::Yes } else { Tri::Unknown };
        Ok(MiuraTransformation {
            shift,
            normal: both(self.normal, first.normal),
            dx_preserving: both(self.dx_preserving, first.dx_preserving),
        })
    }

    /// `P` rewritten in the new variable.
    pub fn apply_to_poly(&self, p: &DiffPoly) -> Result<DiffPoly> {
        if self.is_identity() {
            return Ok(p.clone());
        }
        substitute(p, &self.invert()?.shift)
    }

    /// `f̄` rewritten in the new variable.
    pub fn apply_to_functional(&self, f: &LocalFunctional) -> Result<LocalFunctional> {
        Ok(LocalFunctional::integrate(&self.apply_to_poly(f.density())?))
    }

    /// The flow `u_t = Q` rewritten as `ũ_t = Q̃`.
    pub fn transform_flow(&self, q: &DiffPoly) -> Result<DiffPoly> {
        let lifted = q.add(&q.evolutionary(&self.shift)?);
        self.apply_to_poly(&lifted)
    }

    /// `K_ũ = L(ũ) ∘ K ∘ L(ũ)^dagger` with coefficients in the new variable.
    pub fn conjugate(&self, k: &DiffOperator) -> Result<DiffOperator> {
        if self.is_identity() {
            return Ok(k.clone());
        }
        let inverse = self.invert()?;
        k.transform(&self.new_variable(), |c| substitute(c, &inverse.shift))
    }

    /// Witness `P` with `shift = dx^2 P`, if the transformation is normal.
    pub fn is_normal(&self) -> Option<DiffPoly> {
        normal_witness(&self.shift)
    }

    pub fn is_dx_preserving(&self) -> Result<bool> {
        let d = DiffOperator::dx(self.caps());
        Ok(self.conjugate(&d)? == d)
    }
}

/// `P` with `shift = dx^2 P`, for any element (homogeneous or not).
pub fn normal_witness(shift: &DiffPoly) -> Option<DiffPoly> {
    let first = is_total_derivative(shift)?;
    is_total_derivative(&first)
}

/// `P(u + S)`: every `u_n` is replaced by `u_n + dx^n S`.
pub fn substitute(p: &DiffPoly, s: &DiffPoly) -> Result<DiffPoly> {
    let caps = p.caps().meet(s.caps());
    if s.is_zero() {
        return Ok(p.with_caps(caps));
    }
    let mut derivs: Vec<DiffPoly> = Vec::new();
    let mut powers: HashMap<(u32, u32), DiffPoly> = HashMap::new();
    let mut out = DiffPoly::zero(caps);
    for (e, m, c) in p.terms() {
        let local = Caps { eps: caps.eps - e, ..caps };
        let mut acc = DiffPoly::one(local);
        let factors = std::iter::once((0, m.u_power())).chain(m.jets().iter().copied());
        for (order, exp) in factors {
            if exp == 0 {
                continue;
            }
            while derivs.len() <= order as usize {
                let next = match derivs.last() {
                    None => s.with_caps(caps),
                    Some(d) => d.dx(),
                };
                derivs.push(next);
            }
            let factor = match powers.get(&(order, exp)) {
                Some(f) => f.clone(),
                None => {
                    let base = DiffPoly::jet(order, caps).add(&derivs[order as usize]);
                    let f = base.pow(exp)?;
                    powers.insert((order, exp), f.clone());
                    f
                }
            };
            acc = acc.mul(&factor.with_caps(local))?;
        }
        let piece = acc.scale_param(c)?.with_caps(caps).shift_eps(e);
        out = out.add(&piece);
    }
    Ok(out)
}

/// `Φ_{h̄,dx}`: `ũ = exp(eps^k D_X) u` with `X = dx delta h̄/delta u`.
pub fn phi_hamiltonian(h: &LocalFunctional, k: u32) -> Result<MiuraTransformation> {
    let caps = h.caps();
    check_level(h, k)?;
    let x = var_derivative_of(h.density()).dx();
    let mut shift = DiffPoly::zero(caps);
    let mut power = x.clone();
    let mut i = 1u32;
    while k * i <= caps.eps && !power.is_zero() {
        let coeff = Rational::new(1.into(), factorial(i));
        shift = shift.add(&power.scale(&coeff).shift_eps(k * i));
        power = x.evolutionary(&power)?;
        i += 1;
    }
    let normal = if k >= 2 && h.density().partial(0).is_zero() { Tri::Yes } else { Tri::Unknown };
    Ok(MiuraTransformation { shift, normal, dx_preserving: Tri::Yes })
}

fn check_level(h: &LocalFunctional, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::OutOfRange("level must be at least 1".into()));
    }
    let d = h.density();
    if d.max_eps().unwrap_or(0) > 0 || !(d.is_zero() || d.is_homogeneous(k as i64 - 1)) {
        return Err(Error::DegreeMismatch(format!("{h} is not an eps-free element of degree {}", k - 1)));
    }
    Ok(())
}

/// `f̄` in the variable of `Φ_{h̄,dx}` via `sum_i eps^{ki}/i! Ad^i(f̄)`,
/// `Ad(f̄) = {h̄, f̄}_dx`.
pub fn ad_apply(h: &LocalFunctional, k: u32, f: &LocalFunctional) -> Result<LocalFunctional> {
    check_level(h, k)?;
    let caps = h.caps().meet(f.caps());
    let d = DiffOperator::dx(caps);
    let dh = h.var_derivative().with_caps(caps);
    let mut out = f.with_caps(caps);
    let mut power = f.with_caps(caps);
    let mut i = 1u32;
    while k * i <= caps.eps && !power.is_zero() {
        power = LocalFunctional::integrate(&dh.mul(&d.apply(&power.var_derivative())?)?);
        let coeff = Rational::new(1.into(), factorial(i));
        out = out.add(&power.scale(&coeff).shift_eps(k * i));
        i += 1;
    }
    Ok(out)
}

/// Outcome of [`normalize_poisson`].
#[derive(Clone, Debug)]
pub struct NormalizationReport {
    /// Elementary steps `(i, f_i')` with `ũ = u + eps^i dx^2 f_i'`.
    pub steps: Vec<(u32, DiffPoly)>,
    pub samples_checked: usize,
    /// `conjugate(K, φ)` recomputed from scratch.
    pub result: DiffOperator,
}

/// Sample weight of the Jacobi guard in [`normalize_poisson`]; the full
/// default set has tens of thousands of triples.
pub const GUARD_SAMPLE_WEIGHT: u32 = 4;

/// Builds a normal `φ` with `conjugate(K, φ) = dx` up to the `eps` cap.
/// `sample_weight` bounds the Jacobi precheck samples.
pub fn normalize_poisson(k: &DiffOperator, sample_weight: u32) -> Result<(MiuraTransformation, NormalizationReport)> {
    let caps = k.caps();
    let dx = DiffOperator::dx(caps);
    if k.eps_part(0) != dx {
        return Err(Error::NotPoissonInput(format!("leading term is {} rather than D", k.eps_part(0))));
    }
    if !k.coeff(0).is_zero() {
        return Err(Error::NoDxFactor(k.coeff(0).to_string()));
    }
    let samples = default_samples(sample_weight, caps);
    let report = k.poisson_check(&samples)?;
    if !report.skew {
        return Err(Error::NotPoissonInput("operator is not skew-symmetric".into()));
    }
    if let Some(v) = report.jacobi_violation {
        return Err(Error::NotPoissonInput(format!(
            "Jacobi identity fails on {}, {}, {}: {}",
            v.triple[0], v.triple[1], v.triple[2], v.jacobiator
        )));
    }
    let mut phi = MiuraTransformation::identity(caps);
    let mut current = k.clone();
    let mut steps = Vec::new();
    for i in 1..=caps.eps {
        let target = current.eps_part(i);
        if target.is_zero() {
            continue;
        }
        let ftilde = solve_skew_part(&target, i, caps)?;
        let r = ftilde.integrate_u();
        let mut fprime = DiffPoly::zero(caps);
        for s in 1..=r.max_jet() {
            let mut term = r.partial(s);
            for _ in 1..s {
                term = term.dx().neg();
            }
            fprime = fprime.add(&term);
        }
        let step = MiuraTransformation::elementary(i, &fprime.dx().dx())?;
        let step = MiuraTransformation { normal: Tri::Yes, ..step };
        current = step.conjugate(&current)?;
        if !current.eps_part(i).is_zero() {
            return Err(Error::NoSolution { order: i, detail: format!("residual {} survives", current.eps_part(i)) });
        }
        phi = step.compose(&phi)?;
        steps.push((i, fprime));
    }
    phi.normal = Tri::Yes;
    let result = phi.conjugate(k)?;
    Ok((phi, NormalizationReport { steps, samples_checked: report.triples_checked, result }))
}

/// Finds an eps-free `f̃` of degree `i - 1` with
/// `dx ∘ (L(f̃) - L(f̃)^dagger) ∘ dx = -target`.
fn solve_skew_part(target: &DiffOperator, i: u32, caps: Caps) -> Result<DiffPoly> {
    let free = Caps { eps: 0, ..caps };
    let max_u = target.coeffs().iter().map(DiffPoly::max_u_degree).max().unwrap_or(0) + 1;
    let basis = monomial_basis(i - 1, max_u);
    let dx = DiffOperator::dx(free);
    let image = |m: &Monomial| -> Result<DiffOperator> {
        let f = DiffPoly::term(0, m.clone(), int(1), free);
        let l = DiffOperator::linearize(&f);
        dx.compose(&l.sub(&l.dagger()))?.compose(&dx)
    };
    let images = basis.iter().map(image).collect::<Result<Vec<_>>>()?;
    let order = images.iter().filter_map(DiffOperator::order).max().unwrap_or(0).max(target.order().unwrap_or(0));
    // rows indexed by (dx power, monomial)
    let mut rows: std::collections::BTreeMap<(usize, Monomial), SparseRow> = Default::default();
    for (col, img) in images.iter().enumerate() {
        for (j, c) in img.coeffs().iter().enumerate() {
            for (_, m, v) in c.terms() {
                let v = v.as_rational().expect("numeric basis image").clone();
                rows.entry((j, m.clone())).or_default().insert(col, v);
            }
        }
    }
    let mut rhs: std::collections::BTreeMap<(usize, Monomial), crate::exactmath::ParamExpr> = Default::default();
    for j in 0..=order {
        for (_, m, v) in target.coeff(j).terms() {
            rhs.insert((j, m.clone()), -v);
        }
    }
    let mut sys = LinearSystem::new(basis.len());
    for key in rows.keys().chain(rhs.keys()).cloned().collect::<std::collections::BTreeSet<_>>() {
        sys.push(rows.get(&key).cloned().unwrap_or_default(), rhs.get(&key).cloned().unwrap_or_default());
    }
    let sol = sys.solve();
    if !sol.is_consistent() {
        return Err(Error::NoSolution { order: i, detail: "operator is not of the form dx + dx∘(L-L†)∘dx".into() });
    }
    let values = sol.particular();
    let mut out = DiffPoly::zero(caps);
    for (m, v) in basis.into_iter().zip(values) {
        out.add_term(0, m, v);
    }
    Ok(out)
}

/// All monomials `u^p u_lambda` with `|lambda| = degree` and u-degree in `1..=max_u`
/// (u-degree 0 only for the constant), in canonical order.
pub fn monomial_basis(degree: u32, max_u: u32) -> Vec<Monomial> {
    use crate::exactmath::{partitions_of, PartitionKind};
    let mut out = Vec::new();
    for lambda in partitions_of(degree, PartitionKind::All) {
        let l = lambda.len() as u32;
        if l > max_u {
            continue;
        }
        for p in 0..=(max_u - l) {
            let m = Monomial::from_partition(p, &lambda);
            if !m.is_one() {
                out.push(m);
            }
        }
    }
    out.sort();
    out
}

/// `u -> u + <shift>`.
impl fmt::Display for MiuraTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift.is_zero() {
            write!(f, "u -> u")
        } else {
            let shift = self.shift.to_string();
            match shift.strip_prefix('-') {
                Some(rest) => write!(f, "u -> u - {rest}"),
                None => write!(f, "u -> u + {shift}"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn caps() -> Caps {
        Caps::new(4)
    }

    fn mono(eps: u32, p: u32, jets: &[(u32, u32)], c: Rational) -> DiffPoly {
        DiffPoly::term(eps, Monomial::new(p, jets.iter().copied()), c, caps())
    }

    fn x_shift() -> MiuraTransformation {
        MiuraTransformation::new(mono(1, 0, &[(1, 1)], int(1))).unwrap()
    }

    #[test]
    fn inverse_of_x_shift_alternates() {
        let inv = x_shift().invert().unwrap();
        let mut expect = DiffPoly::zero(caps());
        for k in 1..=4u32 {
            let sign = if k % 2 == 1 { -1 } else { 1 };
            expect = expect.add(&mono(k, 0, &[(k, 1)], int(sign)));
        }
        assert_eq!(inv.shift(), &expect);
        assert_eq!(x_shift().apply_to_poly(&DiffPoly::u(caps())).unwrap(), DiffPoly::u(caps()).add(&expect));
        assert!(x_shift().compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&x_shift()).unwrap().is_identity());
    }

    #[test]
    fn identity_behaviour() {
        let id = MiuraTransformation::identity(caps());
        assert!(id.invert().unwrap().is_identity());
        let p = mono(0, 2, &[(1, 1)], int(1)).add(&mono(2, 0, &[(3, 1)], rat(1, 12)));
        assert_eq!(id.apply_to_poly(&p).unwrap(), p);
    }

    #[test]
    fn rejects_bad_shifts() {
        assert!(MiuraTransformation::new(DiffPoly::u(caps())).is_err());
        assert!(MiuraTransformation::new(mono(1, 1, &[], int(1))).is_err());
    }

    #[test]
    fn action_is_compatible_with_composition() {
        let phi = MiuraTransformation::new(mono(2, 0, &[(2, 1)], int(1)).add(&mono(1, 1, &[(1, 1)], int(2)))).unwrap();
        let psi = MiuraTransformation::new(mono(1, 0, &[(1, 1)], int(-1)).add(&mono(3, 0, &[(1, 1), (2, 1)], int(3)))).unwrap();
        let p = mono(0, 3, &[], int(1)).add(&mono(1, 0, &[(1, 2)], int(1)));
        let lhs = phi.compose(&psi).unwrap().apply_to_poly(&p).unwrap();
        let rhs = phi.apply_to_poly(&psi.apply_to_poly(&p).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hamiltonian_generator_examples() {
        let h = LocalFunctional::integrate(&mono(0, 2, &[], rat(1, 2)));
        let phi = phi_hamiltonian(&h, 1).unwrap();
        let mut expect = DiffPoly::zero(caps());
        for k in 1..=4u32 {
            expect = expect.add(&mono(k, 0, &[(k, 1)], Rational::new(1.into(), factorial(k))));
        }
        assert_eq!(phi.shift(), &expect);
        assert!(phi.is_dx_preserving().unwrap());

        let caps6 = Caps::new(6);
        let h2 = LocalFunctional::integrate(&DiffPoly::term(0, Monomial::new(0, [(1, 2)]), int(1), caps6));
        let phi2 = phi_hamiltonian(&h2, 3).unwrap();
        assert_eq!(phi2.shift().eps_part(3), DiffPoly::term(0, Monomial::jet(3), int(-2), caps6));
        assert_eq!(phi2.normal, Tri::Yes);
        assert!(phi2.is_normal().is_some());
        assert!(phi2.is_dx_preserving().unwrap());
        assert!(phi_hamiltonian(&h2, 2).is_err());
    }

    #[test]
    fn ad_series_matches_substitution() {
        let h = LocalFunctional::integrate(&mono(0, 1, &[(1, 2)], int(1)));
        let phi = phi_hamiltonian(&h, 3).unwrap();
        let f = LocalFunctional::integrate(&mono(0, 3, &[], int(1)).add(&mono(1, 0, &[(1, 2)], int(2))));
        assert_eq!(ad_apply(&h, 3, &f).unwrap(), phi.apply_to_functional(&f).unwrap());
        let g = LocalFunctional::integrate(&mono(0, 4, &[], int(1)));
        let phi1 = phi_hamiltonian(&g, 1).unwrap();
        assert_eq!(ad_apply(&g, 1, &f).unwrap(), phi1.apply_to_functional(&f).unwrap());
        let quad = LocalFunctional::integrate(&mono(0, 2, &[], rat(1, 2)));
        assert_eq!(ad_apply(&h, 3, &quad).unwrap(), quad);
    }

    #[test]
    fn normality_examples() {
        let a = MiuraTransformation::new(mono(2, 0, &[(2, 1)], int(1))).unwrap();
        assert_eq!(a.is_normal(), Some(mono(2, 1, &[], int(1))));
        assert!(x_shift().is_normal().is_none());
        let sq = mono(3, 2, &[], int(1));
        assert_eq!(normal_witness(&sq.dx().dx()), Some(sq));
        let c = MiuraTransformation::new(mono(3, 1, &[(1, 1)], int(1)).dx().dx()).unwrap();
        assert_eq!(c.is_normal(), Some(mono(3, 1, &[(1, 1)], int(1))));
    }

    #[test]
    fn conjugation_examples() {
        let d = DiffOperator::dx(caps());
        // (1 + eps D) D (1 - eps D) = D - eps^2 D^3; only the full shift exp(eps D) preserves D
        let expect = d.sub(&DiffOperator::dx_pow(3, caps()).shift_eps(2));
        assert_eq!(x_shift().conjugate(&d).unwrap(), expect);
        let h = LocalFunctional::integrate(&mono(0, 2, &[], rat(1, 2)));
        assert_eq!(phi_hamiltonian(&h, 1).unwrap().conjugate(&d).unwrap(), d);
        let p = mono(0, 2, &[], int(1)).dx();
        let phi = MiuraTransformation::new(p.dx().shift_eps(2)).unwrap();
        let k = phi.conjugate(&d).unwrap();
        let l = DiffOperator::linearize(&p);
        let expect = d.compose(&l.sub(&l.dagger())).unwrap().compose(&d).unwrap();
        assert_eq!(k.eps_part(2), expect);
        assert!(k.eps_part(1).is_zero());
    }

    #[test]
    fn normalization_round_trip() {
        let d = DiffOperator::dx(caps());
        let (id, _) = normalize_poisson(&d, 3).unwrap();
        assert!(id.is_identity());
        let p = mono(2, 3, &[], int(1)).add(&mono(4, 1, &[(1, 2)], int(1)));
        let psi = MiuraTransformation::new(p.dx().dx()).unwrap();
        let k = psi.conjugate(&d).unwrap();
        let (phi, report) = normalize_poisson(&k, 3).unwrap();
        assert_eq!(report.result, d);
        assert!(phi.is_normal().is_some());
    }

    #[test]
    fn normalization_obstruction() {
        let a = mono(2, 0, &[(2, 1)], int(1));
        let k = DiffOperator::dx(caps()).add(&DiffOperator::from_coeffs(vec![a.dx(), a.scale(&int(2))], caps()));
        assert!(matches!(normalize_poisson(&k, 3), Err(Error::NoDxFactor(_))));
    }
}
