//! JSON encodings. Exact values are strings `p/q`; polynomial terms are
//! `[eps_power, u_power, {jet: exponent}, "coefficient"]`.

use serde_json::{json, Map, Value};

use rdeform::diffpoly::DiffPoly;
use rdeform::functionals::LocalFunctional;
use rdeform::miura::MiuraTransformation;
use rdeform::operators::DiffOperator;
use rdeform::report::Report;

pub fn poly(p: &DiffPoly) -> Value {
    let terms: Vec<Value> = p
        .to_json_terms()
        .into_iter()
        .map(|(eps, u, jets, c)| {
            let jets: Map<String, Value> = jets.into_iter().map(|(k, e)| (k.to_string(), json!(e))).collect();
            json!([eps, u, jets, c])
        })
        .collect();
    json!({ "text": p.to_string(), "terms": terms })
}

pub fn functional(f: &LocalFunctional) -> Value {
    json!({ "text": f.to_string(), "density": poly(f.density()) })
}

/// Coefficients indexed by the power of `D`.
pub fn operator(k: &DiffOperator) -> Value {
    let coeffs: Vec<Value> = k.coeffs().iter().map(poly).collect();
    json!({ "text": k.to_string(), "coefficients": coeffs })
}

pub fn transformation(phi: &MiuraTransformation) -> Value {
    json!({ "text": phi.to_string(), "shift": poly(phi.shift()) })
}

pub fn report(r: &Report) -> Value {
    let checks: Vec<Value> =
        r.checks.iter().map(|c| json!({ "label": c.label, "passed": c.passed, "detail": c.detail })).collect();
    json!({ "title": r.title, "passed": r.passed(), "checks": checks })
}
