use eol_cli::commands::parse_field;
use eol_cli::scenario::{GroupKind, Scenario};
use eol_cli::CliError;
use eol_core::deformations::Gauge;

const MINIMAL: &str = r#"{
  "schema": "eol/1",
  "group": {"kind": "cyclic", "order": 3},
  "orbifold": {"lambda": 1.0, "w_plus": [[0,0,0],[0,0,0],[0,0,0]], "w_minus": [[0,0,0],[0,0,0],[0,0,0]]},
  "bubble": {"h_plus": [[0,0,0],[0,0,0],[0,0,0]], "h_minus": [[0,0,0],[0,0,0],[0,0,0]], "gauge": "cmc"}
}"#;

#[test]
fn defaults_fill_optional_fields() {
    let s = Scenario::parse(MINIMAL).unwrap();
    assert_eq!(s.quadrature_order, 24);
    assert_eq!(s.tolerance, 1e-8);
    assert_eq!(s.group.kind, GroupKind::Cyclic);
    assert_eq!(s.bubble.gauge, Gauge::Cmc);
    assert_eq!(s.group.build().unwrap().order(), 3);
    let back = Scenario::parse(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn parse_errors_carry_the_field_path() {
    let bad = MINIMAL.replace("\"lambda\": 1.0", "\"lambda\": \"one\"");
    match Scenario::parse(&bad) {
        Err(CliError::Input(m)) => assert!(m.starts_with("orbifold.lambda"), "{m}"),
        other => panic!("{other:?}"),
    }
    let bad = MINIMAL.replace("\"tolerance\"", "x").replace("}\n}", "}, \"tolerance\": -1}");
    assert!(matches!(Scenario::parse(&bad), Err(CliError::Input(m)) if m.contains("tolerance")));
    assert!(matches!(Scenario::parse("{"), Err(CliError::Input(_))));
}

#[test]
fn data_validation_is_a_precondition() {
    let bad = MINIMAL.replacen("[[0,0,0]", "[[0,1,0]", 1);
    let s = Scenario::parse(&bad).unwrap();
    let e = s.validate_data().unwrap_err();
    assert_eq!(e.exit_code(), 3);
    assert!(e.to_string().contains("w_plus"));
}

#[test]
fn field_names() {
    for name in ["radial", "y1+", "y2+", "y3+", "y1-", "y2-", "y3-"] {
        assert!(parse_field(name).is_some(), "{name}");
    }
    for name in ["y0+", "y1", "z1+", "y1*", ""] {
        assert!(parse_field(name).is_none(), "{name}");
    }
}
