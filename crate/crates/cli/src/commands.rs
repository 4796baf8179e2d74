use std::collections::BTreeMap;
use std::io::Read;

use serde_json::{json, Value};

use rdeform::diffpoly::{Caps, DegreeMode};
use rdeform::drformulas::{a_2g_head, alpha, b_h, beta, c2g_head, gamma, hodge_value, HodgeKind};
use rdeform::exactmath::{fmt_rational, parse_rational, Rational};
use rdeform::expr::{parse_functional, parse_operator, parse_poly, ParamTable};
use rdeform::hierarchy::{
    alm_normal_form, alm_template, check_special, check_tau, commute_certificate, dlyz_reduce, extract_constraints,
    gsf_alm_bridge, reconstruct_conserved, reconstruct_flow, riemann_flow, riemann_hamiltonian, Hierarchy,
};
use rdeform::miura::normalize_poisson;
use rdeform::operators::{default_samples, DiffOperator};
use rdeform::report::Report;
use rdeform::sampling::Sampler;
use rdeform::{Error, Result};

use crate::args::{Command, GlobalArgs, HierarchyArgs, Mode};
use crate::render;

/// What a command produced, in both encodings.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    /// False when a check ran to completion and failed.
    pub passed: bool,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, passed: true }
    }

    fn from_reports(reports: &[Report]) -> Self {
        let text = reports.iter().map(Report::to_string).collect::<Vec<_>>().join("\n");
        let json = json!({ "passed": reports.iter().all(Report::passed), "reports": reports.iter().map(render::report).collect::<Vec<_>>() });
        Outcome { text, json, passed: reports.iter().all(Report::passed) }
    }
}

pub struct Context {
    pub caps: Caps,
    pub params: ParamTable,
    pub seed: u64,
}

fn parse_binding(spec: &str) -> Result<(String, Option<Rational>)> {
    let (name, value) = match spec.split_once('=') {
        Some((n, v)) => (n.trim(), Some(v.trim())),
        None => (spec.trim(), None),
    };
    let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(Error::InvalidInput(format!("bad parameter name `{name}`")));
    }
    let value = value
        .map(|v| parse_rational(v).ok_or_else(|| Error::InvalidInput(format!("bad value `{v}` for {name}, expected p/q"))))
        .transpose()?;
    Ok((name.to_string(), value))
}

impl Context {
    pub fn new(config: &GlobalArgs) -> Result<Self> {
        let mode = match config.mode {
            Mode::Strict => DegreeMode::Strict,
            Mode::Series => DegreeMode::Series,
        };
        let caps = Caps::new(config.eps_order).with_u(config.u_cap).with_mode(mode);
        let mut params = ParamTable::new();
        for spec in &config.params {
            let (name, value) = parse_binding(spec)?;
            params.declare(name, value);
        }
        Ok(Context { caps, params, seed: config.seed })
    }

    /// The argument itself, or standard input for `-`.
    fn source(&self, arg: &str) -> Result<String> {
        if arg != "-" {
            return Ok(arg.to_string());
        }
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| Error::InvalidInput(format!("reading standard input: {e}")))?;
        Ok(text.trim().to_string())
    }

    fn poly(&self, arg: &str) -> Result<rdeform::diffpoly::DiffPoly> {
        parse_poly(&self.source(arg)?, self.caps, &self.params)
    }

    fn functional(&self, arg: &str) -> Result<rdeform::functionals::LocalFunctional> {
        parse_functional(&self.source(arg)?, self.caps, &self.params)
    }

    fn operator(&self, arg: &str) -> Result<DiffOperator> {
        parse_operator(&self.source(arg)?, self.caps, &self.params)
    }

    fn hierarchy(&self, args: &HierarchyArgs) -> Result<Hierarchy> {
        match args.flows.as_str() {
            "kdv" => Hierarchy::from_first_flow(&rdeform::hierarchy::kdv_flow(self.caps), args.max_d),
            "riemann" => Ok(Hierarchy::riemann(args.max_d, self.caps)),
            text => Hierarchy::from_first_flow(&self.poly(text)?, args.max_d),
        }
    }
}

pub fn run(command: &Command, ctx: &Context) -> Result<Outcome> {
    let caps = ctx.caps;
    match command {
        Command::ReconstructFlow { flow, degree, start } => {
            let p = ctx.poly(flow)?;
            let q0 = match start {
                Some(s) => ctx.poly(s)?,
                None => riemann_flow(*degree, caps),
            };
            let q = reconstruct_flow(&p, &q0)?;
            Ok(Outcome::ok(format!("Q{degree} = {q}"), json!({ "degree": degree, "flow": render::poly(&q) })))
        }
        Command::ReconstructConserved { flow, degree, start } => {
            let p = ctx.poly(flow)?;
            let h0 = match start {
                Some(s) => ctx.functional(s)?,
                None => riemann_hamiltonian(*degree, caps),
            };
            let h = reconstruct_conserved(&p, &h0)?;
            Ok(Outcome::ok(format!("h{degree} = {h}"), json!({ "degree": degree, "functional": render::functional(&h) })))
        }
        Command::Commute { hierarchy } => {
            let h = ctx.hierarchy(hierarchy)?;
            Ok(Outcome::from_reports(&[commute_certificate(&h)?]))
        }
        Command::ReduceDlyz { functional } => {
            let h1 = ctx.functional(functional)?;
            let (phi, gsf, steps) = dlyz_reduce(&h1)?;
            let mut lines = vec![format!("h1 = {gsf}"), format!("transformation: {phi}")];
            for s in &steps {
                lines.push(format!("  eps^{} u_{}: corrector {}", s.order, s.partition, s.corrector));
            }
            let steps_json: Vec<Value> = steps
                .iter()
                .map(|s| json!({ "order": s.order, "partition": s.partition.parts(), "corrector": render::functional(&s.corrector) }))
                .collect();
            Ok(Outcome::ok(
                lines.join("\n"),
                json!({ "functional": render::functional(&gsf), "transformation": render::transformation(&phi), "steps": steps_json }),
            ))
        }
        Command::AlmNormalForm { flow } => {
            let p = ctx.poly(flow)?;
            let (phi, normal) = alm_normal_form(&p)?;
            Ok(Outcome::ok(
                format!("P = {normal}\ntransformation: {phi}"),
                json!({ "flow": render::poly(&normal), "transformation": render::transformation(&phi) }),
            ))
        }
        Command::PoissonCheck { operator, sample_weight } => {
            let k = ctx.operator(operator)?;
            let report = k.poisson_check(&default_samples(*sample_weight, caps))?;
            let mut r = Report::new(format!("Poisson check of {k}"));
            r.push("skew-symmetric", report.skew, report.skew_defect.as_ref().map(|d| format!("K + K^dagger = {d}")).unwrap_or_default());
            let jacobi = match &report.jacobi_violation {
                Some(v) => format!("fails on {}, {}, {}: {}", v.triple[0], v.triple[1], v.triple[2], v.jacobiator),
                None if !report.skew => "not checked".to_string(),
                None => format!("{} triples from {} samples", report.triples_checked, report.samples),
            };
            r.push("Jacobi identity", report.skew && report.jacobi_violation.is_none(), jacobi);
            Ok(Outcome::from_reports(&[r]))
        }
        Command::NormalizePoisson { operator, sample_weight } => {
            let k = match operator {
                Some(text) => ctx.operator(text)?,
                None => Sampler::new(ctx.seed).normal_miura(caps)?.conjugate(&DiffOperator::dx(caps))?,
            };
            let (phi, report) = normalize_poisson(&k, *sample_weight)?;
            let passed = report.result == DiffOperator::dx(caps);
            let mut lines = vec![format!("K = {k}"), format!("transformation: {phi}")];
            for (i, f) in &report.steps {
                lines.push(format!("  eps^{i}: u -> u + eps^{i} dx^2({f})"));
            }
            lines.push(format!("result: {}", report.result));
            lines.push(if passed { "PASS" } else { "FAIL" }.to_string());
            Ok(Outcome {
                text: lines.join("\n"),
                json: json!({
                    "operator": render::operator(&k),
                    "transformation": render::transformation(&phi),
                    "result": render::operator(&report.result),
                    "jacobi_triples": report.samples_checked,
                    "passed": passed,
                }),
                passed,
            })
        }
        Command::TauCheck { hamiltonian, max_d } => {
            let h = match hamiltonian.as_str() {
                "kdv" => Hierarchy::kdv(*max_d, caps)?,
                text => Hierarchy::from_h1(&ctx.functional(text)?, *max_d)?,
            };
            Ok(Outcome::from_reports(&[check_special(&h)?, check_tau(&h)?]))
        }
        Command::Constants { max_g } => constants(*max_g),
        Command::Constraints { fixed, odd } => constraints(ctx, fixed, *odd),
        Command::BridgeCheck { functional } => {
            let h1 = match functional {
                Some(text) => ctx.functional(text)?,
                None => Sampler::new(ctx.seed).standard_form_h1(caps, 3),
            };
            let mut outcome = Outcome::from_reports(&[gsf_alm_bridge(&h1)?]);
            outcome.text = format!("h1 = {h1}\n{}", outcome.text);
            Ok(outcome)
        }
    }
}

fn constants(max_g: u32) -> Result<Outcome> {
    if max_g == 0 {
        return Err(Error::OutOfRange("--max-g must be at least 1".into()));
    }
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    for g in 1..=max_g {
        let mut row: Vec<(String, String)> = vec![
            ("alpha".into(), fmt_rational(&alpha(g))),
            ("beta".into(), fmt_rational(&beta(g))),
            ("b".into(), fmt_rational(&b_h(g))),
            ("c2g_head".into(), c2g_head(g)?.to_string()),
        ];
        if g >= 2 {
            row.push(("gamma".into(), fmt_rational(&gamma(g)?)));
            row.push(("a_2g_head".into(), fmt_rational(&a_2g_head(g)?)));
            row.push(("lambda_triple".into(), fmt_rational(&hodge_value(HodgeKind::LambdaTriple, g)?)));
        }
        for (name, value) in &row {
            lines.push(format!("{name}_{g} = {value}"));
        }
        let mut entry: serde_json::Map<String, Value> = row.into_iter().map(|(n, v)| (n, Value::String(v))).collect();
        entry.insert("g".into(), json!(g));
        rows.push(Value::Object(entry));
    }
    Ok(Outcome::ok(lines.join("\n"), json!({ "constants": rows })))
}

fn constraints(ctx: &Context, fixed: &[String], odd: bool) -> Result<Outcome> {
    let mut values: BTreeMap<String, Rational> = ctx.params.bindings();
    for spec in fixed {
        match parse_binding(spec)? {
            (name, Some(v)) => {
                values.insert(name, v);
            }
            (name, None) => return Err(Error::InvalidInput(format!("--fix {name} needs a value, e.g. {name}=1"))),
        }
    }
    let template = alm_template(ctx.caps, &values, odd);
    let mut known = template.params();
    known.extend(values.keys().cloned());
    // Declared unbound parameters select what to print.
    let selected: Vec<String> =
        ctx.params.names().filter(|n| ctx.params.get(n).is_some_and(Option::is_none)).map(str::to_string).collect();
    if let Some(name) = selected.iter().chain(values.keys()).find(|n| !known.contains(n)) {
        return Err(Error::UnknownParameter(format!("{name} is not a coefficient of the eps^{} template", ctx.caps.eps)));
    }
    let report = extract_constraints(&template)?;
    let shown = |name: &String| selected.is_empty() || selected.contains(name);

    let mut lines = vec![format!("template P = {template}")];
    for name in selected.iter().filter(|n| !report.determined.contains_key(*n)) {
        lines.push(format!("{name} is not determined up to eps^{}", ctx.caps.eps));
    }
    for (name, value) in report.determined.iter().filter(|(n, _)| shown(n)) {
        lines.push(format!("{name} = {value}"));
    }
    if selected.is_empty() {
        for r in &report.relations {
            lines.push(format!("{r} = 0"));
        }
        if !report.free.is_empty() {
            lines.push(format!("free: {}", report.free.join(", ")));
        }
        lines.push(format!("Q2 = {}", report.second_flow));
    }
    let determined: serde_json::Map<String, Value> =
        report.determined.iter().filter(|(n, _)| shown(n)).map(|(n, v)| (n.clone(), Value::String(v.to_string()))).collect();
    let json = json!({
        "template": render::poly(&template),
        "determined": determined,
        "relations": report.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "free": report.free,
        "second_flow": render::poly(&report.second_flow),
    });
    Ok(Outcome::ok(lines.join("\n"), json))
}
