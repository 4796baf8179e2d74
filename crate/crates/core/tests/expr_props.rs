use rdeform::diffpoly::Caps;
use rdeform::expr::{parse, parse_functional, parse_operator, parse_poly, ParamTable, Parsed};
use rdeform::hierarchy::kdv_flow;
use rdeform::sampling::Sampler;

fn table() -> ParamTable {
    let mut t = ParamTable::new();
    t.declare("a", None);
    t.declare("b2", None);
    t
}

#[test]
fn generated_expressions_round_trip() {
    let caps = Caps::new(6);
    let params = table();
    let mut sampler = Sampler::new(2024);
    for _ in 0..100 {
        let text = sampler.expression_text(&["a", "b2"]);
        let p = parse_poly(&text, caps, &params).unwrap_or_else(|e| panic!("{text}: {e}"));
        let rendered = p.to_string();
        assert_eq!(parse_poly(&rendered, caps, &params).unwrap(), p, "{text} -> {rendered}");
        let f = parse_functional(&format!("int({text})"), caps, &params).unwrap();
        assert_eq!(parse_functional(&f.to_string(), caps, &params).unwrap(), f);
    }
}

#[test]
fn documented_inputs() {
    let caps = Caps::new(6);
    let params = table();
    assert_eq!(parse_poly("u*u1 + (1/12)*eps^2*u3", caps, &params).unwrap(), kdv_flow(caps));
    let h1 = parse_functional("int(u^3/6 - (1/24)*eps^2*u1^2)", caps, &params).unwrap();
    assert_eq!(h1.to_string(), "int(1/6*u^3 - 1/24*eps^2*u1^2)");
    assert_eq!(parse_poly("ux*uxx + uxxx", caps, &params).unwrap(), parse_poly("u1*u2 + u3", caps, &params).unwrap());
    assert_eq!(parse_poly("dx(u^2/2)", caps, &params).unwrap(), parse_poly("u*u1", caps, &params).unwrap());
    let k = parse_operator("2*u*D + u1", caps, &params).unwrap();
    assert!(k.is_skew());
    assert_eq!(parse_operator(&k.to_string(), caps, &params).unwrap(), k);
    assert!(matches!(parse("a*eps^2*u2", caps, &params).unwrap(), Parsed::Poly(_)));
}

#[test]
fn rejects_bad_input() {
    let caps = Caps::new(2);
    let params = table();
    for bad in ["u +", "(u", "u^x", "u/u1", "int(D)", "zz*u", "u $ 2"] {
        assert!(parse(bad, caps, &params).is_err(), "{bad} parsed");
    }
}
