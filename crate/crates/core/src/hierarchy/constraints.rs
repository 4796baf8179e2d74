//! Integrability constraints on a parametric normal-form first flow
//! `u_t = dx P`, found by reconstructing the second flow order by order.

use std::collections::BTreeMap;

use crate::diffpoly::{Caps, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::exactmath::{int, rat, ParamExpr, Partition, PartitionKind, Rational};
use crate::linsolve::parameter_system;
use crate::miura::monomial_basis;

use super::solve_against;

/// `c` followed by the parts, e.g. `c42`; parts above 9 are separated by `_`.
pub fn template_name(lambda: &Partition) -> String {
    let parts: Vec<String> = lambda.parts().iter().map(u32::to_string).collect();
    if lambda.parts().iter().any(|&p| p > 9) {
        format!("c{}", parts.join("_"))
    } else {
        format!("c{}", parts.concat())
    }
}

/// `u^2/2 + sum_k eps^k sum_{lambda_i >= 2, |lambda| = k} c_lambda u_lambda`
/// over even `k` (all `k >= 2` when `odd` is set). Coefficients named in
/// `fixed` are numeric, the others are parameters.
pub fn alm_template(caps: Caps, fixed: &BTreeMap<String, Rational>, odd: bool) -> DiffPoly {
    let mut p = DiffPoly::term(0, Monomial::u_pow(2), rat(1, 2), caps);
    for k in 2..=caps.eps {
        if k % 2 == 1 && !odd {
            continue;
        }
        for lambda in crate::exactmath::partitions_of(k, PartitionKind::PartsGe2) {
            let name = template_name(&lambda);
            let c = match fixed.get(&name) {
                Some(v) => ParamExpr::from(v.clone()),
                None => ParamExpr::param(name),
            };
            p.add_term(k, Monomial::from_partition(0, &lambda), c);
        }
    }
    p
}

#[derive(Clone, Debug)]
pub struct ConstraintReport {
    /// Parameters fixed by integrability.
    pub determined: BTreeMap<String, ParamExpr>,
    /// Relations still binding the remaining parameters; a name `a*b`
    /// stands for the product of two parameters.
    pub relations: Vec<ParamExpr>,
    pub free: Vec<String>,
    /// The second flow with all determined parameters substituted.
    pub second_flow: DiffPoly,
}

fn product_name(a: &str, b: &str) -> String {
    if a <= b {
        format!("{a}*{b}")
    } else {
        format!("{b}*{a}")
    }
}

fn is_product(name: &str) -> bool {
    name.contains('*')
}

/// `p = p_0 + sum_a a p_a` with numeric `p_0`, `p_a`.
fn split_params(p: &DiffPoly) -> (DiffPoly, BTreeMap<String, DiffPoly>) {
    let caps = p.caps();
    let mut base = DiffPoly::zero(caps);
    let mut parts: BTreeMap<String, DiffPoly> = BTreeMap::new();
    for (e, m, c) in p.terms() {
        base.add_term(e, m.clone(), ParamExpr::from(c.constant().clone()));
        for (name, v) in c.terms() {
            parts
                .entry(name.clone())
                .or_insert_with(|| DiffPoly::zero(caps))
                .add_term(e, m.clone(), ParamExpr::from(v.clone()));
        }
    }
    (base, parts)
}

fn times_param(p: &DiffPoly, name: &str) -> DiffPoly {
    let unit = ParamExpr::param(name);
    p.map_coeffs(|c| unit.scale(c.constant()))
}

/// `eps^k` part of `[P, Q]` for parametric `P` and `Q`, with each product of
/// two parameters kept as its own symbol.
fn bilinear_bracket(flow: &DiffPoly, q: &DiffPoly, k: u32) -> Result<DiffPoly> {
    let (p0, pa) = split_params(flow);
    let (q0, qb) = split_params(q);
    let mut out = p0.flow_bracket(&q0)?.eps_part(k);
    for (b, qpart) in &qb {
        out = out.add(&times_param(&p0.flow_bracket(qpart)?.eps_part(k), b));
    }
    for (a, ppart) in &pa {
        out = out.add(&times_param(&ppart.flow_bracket(&q0)?.eps_part(k), a));
        for (b, qpart) in &qb {
            if is_product(b) {
                return Err(Error::NonlinearParameterProduct(a.clone(), b.clone()));
            }
            let image = ppart.flow_bracket(qpart)?.eps_part(k);
            if !image.is_zero() {
                out = out.add(&times_param(&image, &product_name(a, b)));
            }
        }
    }
    Ok(out)
}

/// Substitutes numeric parameter values, resolving products with a bound factor.
fn bind(expr: &ParamExpr, values: &BTreeMap<String, Rational>) -> ParamExpr {
    let mut out = ParamExpr::from(expr.constant().clone());
    for (name, c) in expr.terms() {
        let term = match name.split_once('*') {
            Some((a, b)) => match (values.get(a), values.get(b)) {
                (Some(x), Some(y)) => ParamExpr::from(x * y * c),
                (Some(x), None) => ParamExpr::param(b).scale(&(x * c)),
                (None, Some(y)) => ParamExpr::param(a).scale(&(y * c)),
                (None, None) => ParamExpr::param(name.clone()).scale(c),
            },
            None => match values.get(name) {
                Some(x) => ParamExpr::from(x * c),
                None => ParamExpr::param(name.clone()).scale(c),
            },
        };
        out += term;
    }
    out
}

/// Row-reduced form of the relations, one per pivot parameter.
fn reduced_relations(relations: &[ParamExpr], order: &[String]) -> Vec<ParamExpr> {
    let (system, names) = parameter_system(relations, order);
    system
        .solve()
        .pivots
        .iter()
        .map(|row| {
            let mut r = ParamExpr::param(names[row.col].clone()) - row.rhs.clone();
            for (c, a) in &row.free {
                r += ParamExpr::param(names[*c].clone()).scale(a);
            }
            r
        })
        .collect()
}

/// Solves the consistency conditions for a second flow `Q = u^2 u_1/2 + ...`
/// of `u_t = dx P` up to the `eps` cap of the template, substituting
/// determined parameters after every order.
pub fn extract_constraints(template: &DiffPoly) -> Result<ConstraintReport> {
    let caps = template.caps();
    let order: Vec<String> = template.params();
    let free_caps = Caps { eps: 0, ..caps };
    let lead = DiffPoly::term(0, Monomial::new(1, [(1, 1)]), int(1), free_caps);
    let mut flow = template.dx();
    let mut q = DiffPoly::term(0, Monomial::new(2, [(1, 1)]), rat(1, 2), caps);
    let mut determined: BTreeMap<String, Rational> = BTreeMap::new();
    let mut relations: Vec<ParamExpr> = Vec::new();
    for k in 1..=caps.eps {
        let residual = bilinear_bracket(&flow, &q, k)?;
        if residual.is_zero() {
            continue;
        }
        let basis = monomial_basis(1 + k, 3 + k);
        let images = basis
            .iter()
            .map(|m| lead.flow_bracket(&DiffPoly::term(0, m.clone(), int(1), free_caps)))
            .collect::<Result<Vec<_>>>()?;
        let sol = solve_against(&images, &residual.with_caps(free_caps));
        for (m, v) in basis.into_iter().zip(sol.particular()) {
            q.add_term(k, m, v);
        }
        relations.extend(sol.conditions);
        loop {
            let (system, names) = parameter_system(&relations, &order);
            let params = system.solve();
            if !params.is_consistent() {
                return Err(Error::NoSolution { order: k, detail: "integrability conditions are contradictory".into() });
            }
            let fresh: BTreeMap<String, Rational> = params
                .determined()
                .filter(|(col, _)| !is_product(&names[*col]))
                .map(|(col, v)| (names[col].clone(), v.as_rational().expect("numeric right-hand side").clone()))
                .filter(|(n, _)| !determined.contains_key(n))
                .collect();
            if fresh.is_empty() {
                break;
            }
            determined.extend(fresh);
            flow = flow.map_coeffs(|c| bind(c, &determined));
            q = q.map_coeffs(|c| bind(c, &determined));
            relations = relations.iter().map(|r| bind(r, &determined)).filter(|r| !r.is_zero()).collect();
            if let Some(bad) = relations.iter().find(|r| r.is_numeric()) {
                return Err(Error::NoSolution { order: k, detail: format!("condition {bad} = 0 fails") });
            }
        }
    }
    let relations = reduced_relations(&relations, &order);
    let free = order.into_iter().filter(|n| !determined.contains_key(n)).collect();
    let determined = determined.into_iter().map(|(n, v)| (n, ParamExpr::from(v))).collect();
    Ok(ConstraintReport { determined, relations, free, second_flow: q })
}
