//! Deformations of the Riemann hierarchy `u_{t_d} = u^d/d! u_1`: order by
//! order reconstruction of flows and conserved quantities, and the
//! commutativity, special and tau-symmetry checks.

mod constraints;
mod normal_forms;

pub use constraints::{alm_template, extract_constraints, template_name, ConstraintReport};
pub use normal_forms::{alm_normal_form, dlyz_reduce, gsf_alm_bridge, DlyzStep};

use std::collections::BTreeMap;

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::exactmath::{factorial, int, partitions_of, ParamExpr, PartitionKind, Rational};
use crate::functionals::LocalFunctional;
use crate::linsolve::{LinearSystem, Solution, SparseRow};
use crate::miura::{monomial_basis, normalize_poisson, MiuraTransformation};
use crate::operators::DiffOperator;
use crate::report::Report;

/// `u^d/d! u_1`.
pub fn riemann_flow(d: u32, caps: Caps) -> DiffPoly {
    DiffPoly::term(0, Monomial::new(d, [(1, 1)]), Rational::new(1.into(), factorial(d)), caps)
}

/// `int u^{d+2}/(d+2)! dx`.
pub fn riemann_hamiltonian(d: u32, caps: Caps) -> LocalFunctional {
    LocalFunctional::integrate(&DiffPoly::term(0, Monomial::u_pow(d + 2), Rational::new(1.into(), factorial(d + 2)), caps))
}

/// `u u_1 + eps^2/12 u_3`.
pub fn kdv_flow(caps: Caps) -> DiffPoly {
    riemann_flow(1, caps).add(&DiffPoly::term(2, Monomial::jet(3), Rational::new(1.into(), 12.into()), caps))
}

fn eps_free(caps: Caps) -> Caps {
    Caps { eps: 0, ..caps }
}

/// Solves `sum_m x_m images[m] = -residual` coefficientwise; every image and
/// the residual are eps-free.
pub(crate) fn solve_against(images: &[DiffPoly], residual: &DiffPoly) -> Solution {
    let mut rows: BTreeMap<Monomial, (SparseRow, ParamExpr)> = BTreeMap::new();
    for (col, img) in images.iter().enumerate() {
        for (_, m, c) in img.terms() {
            let v = c.as_rational().expect("numeric image").clone();
            rows.entry(m.clone()).or_default().0.insert(col, v);
        }
    }
    for (_, m, c) in residual.terms() {
        rows.entry(m.clone()).or_default().1 = -c;
    }
    let mut sys = LinearSystem::new(images.len());
    for (_, (row, rhs)) in rows {
        sys.push(row, rhs);
    }
    sys.solve()
}

fn check_first_flow(p: &DiffPoly) -> Result<()> {
    let lead = p.eps_part(0);
    if lead != riemann_flow(1, p.caps()) {
        return Err(Error::InvalidInput(format!("expected u*u1 at eps^0, found {lead}")));
    }
    Ok(())
}

/// The unique `Q` with `Q|_{eps=0} = q0` commuting with `P` up to the `eps` cap.
pub fn reconstruct_flow(p: &DiffPoly, q0: &DiffPoly) -> Result<DiffPoly> {
    let caps = p.caps().meet(q0.caps());
    check_first_flow(p)?;
    if q0.max_eps().unwrap_or(0) > 0 {
        return Err(Error::InvalidInput(format!("seed {q0} depends on eps")));
    }
    let q0 = q0.with_caps(caps);
    if q0 == DiffPoly::jet(1, caps) || q0.is_zero() {
        return Ok(q0);
    }
    let degree = q0
        .homogeneous_degree()
        .ok_or_else(|| Error::DegreeMismatch(format!("seed {q0} is not homogeneous")))?;
    let u0 = q0.max_u_degree();
    let free = eps_free(caps);
    let lead = riemann_flow(1, free);
    let mut q = q0.clone();
    for k in 1..=caps.eps {
        let residual = p.flow_bracket(&q)?.eps_part(k);
        if residual.is_zero() {
            continue;
        }
        let basis = monomial_basis((degree + k as i64) as u32, u0 + k);
        let images = basis
            .iter()
            .map(|m| lead.flow_bracket(&DiffPoly::term(0, m.clone(), int(1), free)))
            .collect::<Result<Vec<_>>>()?;
        let sol = solve_against(&images, &residual);
        if !sol.is_consistent() {
            return Err(Error::NoSolution { order: k, detail: format!("{} consistency equations fail", sol.conditions.len()) });
        }
        for (m, v) in basis.into_iter().zip(sol.particular()) {
            q.add_term(k, m, v);
        }
    }
    let check = p.flow_bracket(&q)?;
    if !check.is_zero() {
        return Err(Error::NoSolution { order: check.min_eps().unwrap_or(0), detail: format!("{check} remains") });
    }
    Ok(q)
}

/// Canonical density basis `u^p u_lambda`, `lambda` in `P_k^circ`, `p + l <= max_u`.
fn canonical_basis(k: u32, max_u: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for lambda in partitions_of(k, PartitionKind::Circ) {
        let l = lambda.len() as u32;
        if l > max_u {
            continue;
        }
        for p in 0..=(max_u - l) {
            out.push(Monomial::from_partition(p, &lambda));
        }
    }
    out
}

/// The unique `h̄` with `h̄|_{eps=0} = h0` conserved by `P` up to the `eps` cap.
pub fn reconstruct_conserved(p: &DiffPoly, h0: &LocalFunctional) -> Result<LocalFunctional> {
    let caps = p.caps().meet(h0.caps());
    check_first_flow(p)?;
    if h0.density().max_eps().unwrap_or(0) > 0 {
        return Err(Error::InvalidInput(format!("seed {h0} depends on eps")));
    }
    let free = eps_free(caps);
    let lead = riemann_flow(1, free);
    let u0 = h0.density().max_u_degree();
    let mut h = h0.density().with_caps(caps);
    for k in 2..=caps.eps {
        let residual = LocalFunctional::integrate(&p.evolutionary(&h)?).density().eps_part(k);
        if residual.is_zero() {
            continue;
        }
        let basis = canonical_basis(k, u0 + k);
        let images: Vec<DiffPoly> = basis
            .iter()
            .map(|m| {
                let d = lead.evolutionary(&DiffPoly::term(0, m.clone(), int(1), free))?;
                Ok(LocalFunctional::integrate(&d).density().clone())
            })
            .collect::<Result<_>>()?;
        let sol = solve_against(&images, &residual);
        if !sol.is_consistent() {
            return Err(Error::NoSolution { order: k, detail: format!("{} consistency equations fail", sol.conditions.len()) });
        }
        for (m, v) in basis.into_iter().zip(sol.particular()) {
            h.add_term(k, m, v);
        }
    }
    let out = LocalFunctional::integrate(&h);
    let check = out.evolve(p)?;
    if !check.is_zero() {
        return Err(Error::NoSolution { order: check.density().min_eps().unwrap_or(0), detail: format!("{check} remains") });
    }
    Ok(out)
}

/// Flows `Q_0..Q_D`, optionally with a Poisson operator and Hamiltonians
/// `h̄_0..h̄_D` (indexed like the flows).
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub flows: Vec<DiffPoly>,
    pub poisson: Option<DiffOperator>,
    pub hamiltonians: Vec<LocalFunctional>,
    pub caps: Caps,
}

impl Hierarchy {
    /// Flows reconstructed from the first flow `P`.
    pub fn from_first_flow(p: &DiffPoly, max_d: u32) -> Result<Self> {
        let caps = p.caps();
        let flows = (0..=max_d)
            .map(|d| if d == 1 { Ok(p.clone()) } else { reconstruct_flow(p, &riemann_flow(d, caps)) })
            .collect::<Result<Vec<_>>>()?;
        Ok(Hierarchy { flows, poisson: None, hamiltonians: Vec::new(), caps })
    }

    /// Adds `K = dx` and the Hamiltonians reconstructed from `int u^{d+2}/(d+2)!`.
    pub fn with_dx_hamiltonians(mut self) -> Result<Self> {
        let p = self.flows[1].clone();
        self.hamiltonians = (0..self.flows.len() as u32)
            .map(|d| reconstruct_conserved(&p, &riemann_hamiltonian(d, self.caps)))
            .collect::<Result<_>>()?;
        self.poisson = Some(DiffOperator::dx(self.caps));
        Ok(self)
    }

    pub fn riemann(max_d: u32, caps: Caps) -> Self {
        Hierarchy {
            flows: (0..=max_d).map(|d| riemann_flow(d, caps)).collect(),
            poisson: Some(DiffOperator::dx(caps)),
            hamiltonians: (0..=max_d).map(|d| riemann_hamiltonian(d, caps)).collect(),
            caps,
        }
    }

    pub fn kdv(max_d: u32, caps: Caps) -> Result<Self> {
        Hierarchy::from_first_flow(&kdv_flow(caps), max_d)?.with_dx_hamiltonians()
    }

    /// Hamiltonian hierarchy of `h̄_1` with respect to `dx`.
    pub fn from_h1(h1: &LocalFunctional, max_d: u32) -> Result<Self> {
        let p = h1.var_derivative().dx();
        Hierarchy::from_first_flow(&p, max_d)?.with_dx_hamiltonians()
    }

    /// Rewrites every piece of structure in the variable of `φ`.
    pub fn transform(&self, phi: &MiuraTransformation) -> Result<Self> {
        Ok(Hierarchy {
            flows: self.flows.iter().map(|q| phi.transform_flow(q)).collect::<Result<_>>()?,
            poisson: self.poisson.as_ref().map(|k| phi.conjugate(k)).transpose()?,
            hamiltonians: self.hamiltonians.iter().map(|h| phi.apply_to_functional(h)).collect::<Result<_>>()?,
            caps: self.caps,
        })
    }

    fn require_structure(&self) -> Result<&DiffOperator> {
        let k = self.poisson.as_ref().ok_or(Error::MissingStructure("Poisson operator"))?;
        if self.hamiltonians.is_empty() {
            return Err(Error::MissingStructure("Hamiltonians"));
        }
        Ok(k)
    }
}

fn lowest_order(p: &DiffPoly) -> String {
    match p.min_eps() {
        Some(k) => format!("eps^{k} residual {}", p.eps_part(k)),
        None => String::new(),
    }
}

/// Pairwise commutativity of all flows up to the `eps` cap.
pub fn commute_certificate(h: &Hierarchy) -> Result<Report> {
    let mut report = Report::new(format!("commutativity of {} flows up to eps^{}", h.flows.len(), h.caps.eps));
    for i in 0..h.flows.len() {
        for j in (i + 1)..h.flows.len() {
            let b = h.flows[i].flow_bracket(&h.flows[j])?;
            report.push(format!("[Q{i}, Q{j}] = 0"), b.is_zero(), lowest_order(&b));
        }
    }
    Ok(report)
}

/// `K = dx`, `h̄_0 = int u^2/2`, `d h̄_d/du = h̄_{d-1}` and `Q_d = K delta h̄_d`.
pub fn check_special(h: &Hierarchy) -> Result<Report> {
    let k = h.require_structure()?;
    let caps = h.caps;
    let mut report = Report::new("special Hamiltonian deformation");
    report.push("K = D", *k == DiffOperator::dx(caps), k.to_string());
    let h0 = riemann_hamiltonian(0, caps);
    report.push("h0 = int(u^2/2)", h.hamiltonians[0] == h0, h.hamiltonians[0].to_string());
    for d in 1..h.hamiltonians.len() {
        let du = h.hamiltonians[d].du();
        let ok = du == h.hamiltonians[d - 1];
        report.push(format!("dh{d}/du = h{}", d - 1), ok, if ok { String::new() } else { du.sub(&h.hamiltonians[d - 1]).to_string() });
    }
    hamiltonian_checks(h, k, &mut report)?;
    Ok(report)
}

fn hamiltonian_checks(h: &Hierarchy, k: &DiffOperator, report: &mut Report) -> Result<()> {
    for (d, hd) in h.hamiltonians.iter().enumerate() {
        if let Some(q) = h.flows.get(d) {
            let diff = k.apply(&hd.var_derivative())?.sub(q);
            report.push(format!("Q{d} = K delta h{d}"), diff.is_zero(), lowest_order(&diff));
        }
    }
    Ok(())
}

/// Tau-symmetry with `h_{p-1} = delta h̄_p/delta u`:
/// `{h_{p-1}, h̄_q}_K = {h_{q-1}, h̄_p}_K` for all available `p, q`.
pub fn check_tau(h: &Hierarchy) -> Result<Report> {
    let k = h.require_structure()?;
    let caps = h.caps;
    let mut report = Report::new("tau-symmetry");
    let densities: Vec<DiffPoly> = h.hamiltonians.iter().map(LocalFunctional::var_derivative).collect();
    let flows: Vec<DiffPoly> = densities.iter().map(|d| k.apply(d)).collect::<Result<_>>()?;
    // {f, h̄_q}_K = D_{K delta h̄_q}(f)
    for p in 0..densities.len() {
        for q in (p + 1)..densities.len() {
            let lhs = flows[q].evolutionary(&densities[p])?;
            let rhs = flows[p].evolutionary(&densities[q])?;
            let diff = lhs.sub(&rhs);
            report.push(format!("{{h{}, h{q}}} = {{h{}, h{p}}}", p as i64 - 1, q as i64 - 1), diff.is_zero(), lowest_order(&diff));
        }
    }
    for (p, d) in densities.iter().enumerate() {
        let diff = d.dx().sub(&flows[p]);
        report.push(format!("dx h{} = K delta h{p}", p as i64 - 1), diff.is_zero(), lowest_order(&diff));
    }
    let u = DiffPoly::u(caps);
    if !flows.is_empty() {
        let diff = flows[0].sub(&DiffPoly::jet(1, caps));
        report.push("{u, h0} = u1", diff.is_zero(), lowest_order(&diff));
    }
    let casimir = k.apply(&DiffPoly::one(caps))?;
    report.push("{u, h_-1} = 0 with h_-1 = u", casimir.is_zero(), casimir.to_string());
    let _ = u;
    hamiltonian_checks(h, k, &mut report)?;
    Ok(report)
}

/// Normalizes the Poisson operator of a tau-symmetric hierarchy and moves
/// all structure along.
pub fn tau_to_special(h: &Hierarchy, sample_weight: u32) -> Result<(MiuraTransformation, Hierarchy)> {
    let k = h.require_structure()?;
    let (phi, _) = normalize_poisson(k, sample_weight)?;
    let moved = h.transform(&phi)?;
    Ok((phi, moved))
}
