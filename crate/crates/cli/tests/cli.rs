use std::path::PathBuf;
use std::process::{Command, Output};

use eol_cli::report::{CurvatureReport, ObstructReport, TaubReport, VerifyReport};

fn eol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eol")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_scenario(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

fn spherical_text() -> String {
    std::fs::read_to_string(scenario("spherical_eh.json")).unwrap()
}

#[test]
fn verify_runs_the_full_suite() {
    let o = eol(&["verify", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: VerifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.checks.len() >= 25);
    assert!(r.passed && r.checks.iter().all(|c| c.passed));
    assert_eq!(r.order, 24);
}

#[test]
fn verify_filter_selects_matching_checks() {
    let o = eol(&["verify", "--filter", "taub", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: VerifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r.checks.is_empty());
    assert!(r.checks.iter().all(|c| c.name.contains("taub")));
    assert_eq!(r.filter.as_deref(), Some("taub"));
    let none = eol(&["verify", "--filter", "no-such-check"]);
    assert_eq!(none.status.code(), Some(2));
    assert!(stderr(&none).contains("filter"));
}

#[test]
fn verify_reports_under_resolved_quadrature() {
    let o = eol(&["verify", "--order", "4", "--filter", "quadrature"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    let table = eol(&["verify", "--filter", "jets"]);
    assert_eq!(table.status.code(), Some(0));
    assert!(stdout(&table).contains("jets.bijet_product_rule"));
}

#[test]
fn spherical_eguchi_hanson_is_obstructed() {
    let o = eol(&["obstruct", "--scenario", &scenario("spherical_eh.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: ObstructReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.verdict, "OBSTRUCTED");
    assert!(r.obstruction.radial < 0.0);
    assert_eq!(r.diagnostics.invariant_killing_fields.len(), 6);
    let human = eol(&["obstruct", "--scenario", &scenario("spherical_eh.json")]);
    assert!(stdout(&human).contains("verdict: OBSTRUCTED"));
}

#[test]
fn hyperkahler_scenario_is_not_obstructed() {
    let o = eol(&["obstruct", "--scenario", &scenario("hyperkahler.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: ObstructReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.verdict, "NOT OBSTRUCTED AT FIRST ORDER");
    assert!(r.obstruction.max_value() < 1e-10);
    // defaults are filled in and echoed
    assert_eq!(r.scenario.quadrature_order, 24);
    assert_eq!(r.scenario.tolerance, 1e-8);
}

#[test]
fn structured_output_is_deterministic_and_round_trips() {
    for name in ["z3_axial.json", "cmc.json"] {
        let a = stdout(&eol(&["obstruct", "--scenario", &scenario(name), "--json"]));
        let b = stdout(&eol(&["obstruct", "--scenario", &scenario(name), "--json"]));
        assert_eq!(a, b);
        let r: ObstructReport = serde_json::from_str(&a).unwrap();
        assert_eq!(eol_cli::report::to_json(&r) + "\n", a);
    }
    let z3: ObstructReport =
        serde_json::from_str(&stdout(&eol(&["obstruct", "--scenario", &scenario("z3_axial.json"), "--json"]))).unwrap();
    assert!(z3.obstruction.killing_plus[1].is_none() && z3.obstruction.killing_plus[2].is_none());
}

#[test]
fn reports_reject_unknown_keys() {
    let a = stdout(&eol(&["obstruct", "--scenario", &scenario("cmc.json"), "--json"]));
    let mut v: serde_json::Value = serde_json::from_str(&a).unwrap();
    v["extra"] = serde_json::json!(1);
    assert!(serde_json::from_value::<ObstructReport>(v).is_err());
}

#[test]
fn malformed_gauge_names_the_field() {
    let f = write_scenario(&spherical_text().replace("\"volume\"", "\"harmonic\""));
    let o = eol(&["obstruct", "--scenario", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bubble.gauge"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_and_bad_headers_are_input_errors() {
    let cases = [
        (spherical_text().replace("\"tolerance\"", "\"tolerence\""), "tolerence"),
        (spherical_text().replace("eol/1", "eol/0"), "schema"),
        (spherical_text().replace("\"cyclic\"", "\"dihedral\""), "group.kind"),
        (spherical_text().replace("\"order\": 2", "\"order\": 0"), "group.order"),
        (spherical_text().replace("\"quadrature_order\": 24", "\"quadrature_order\": 0"), "quadrature_order"),
        (spherical_text().replace("[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]\n  },\n  \"bubble\"", "[0.0, 0.0]]\n  },\n  \"bubble\""), "orbifold.w_minus"),
    ];
    for (text, field) in cases {
        let f = write_scenario(&text);
        let o = eol(&["obstruct", "--scenario", f.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{field}: {}", stderr(&o));
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }
    let missing = eol(&["obstruct", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn non_traceless_weyl_input_is_a_precondition_violation() {
    let text = spherical_text().replacen("[[0.0, 0.0, 0.0]", "[[1.0, 0.0, 0.0]", 1);
    let f = write_scenario(&text);
    for cmd in ["obstruct", "curvature"] {
        let o = eol(&[cmd, "--scenario", f.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
        assert!(stderr(&o).contains("w_plus"));
    }
}

#[test]
fn curvature_blocks_of_known_bubbles() {
    let eh: CurvatureReport =
        serde_json::from_str(&stdout(&eol(&["curvature", "--scenario", &scenario("spherical_eh.json"), "--json"])))
            .unwrap();
    let target = [[8.0, 0.0, 0.0], [0.0, -4.0, 0.0], [0.0, 0.0, -4.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((eh.bubble.r_minus[i][j] - target[i][j]).abs() < 1e-9);
            assert!(eh.bubble.r_plus[i][j].abs() < 1e-9);
            let round = if i == j { 1.0 } else { 0.0 };
            assert!((eh.orbifold.r_plus[i][j] - round).abs() < 1e-12);
        }
    }
    let cmc: CurvatureReport =
        serde_json::from_str(&stdout(&eol(&["curvature", "--scenario", &scenario("cmc.json"), "--json"]))).unwrap();
    let h = cmc.scenario.bubble.h_plus;
    for i in 0..3 {
        assert!((cmc.bubble.r_minus[i][i] + 24.0 * h[i][i]).abs() < 1e-9);
    }
    let zero: CurvatureReport =
        serde_json::from_str(&stdout(&eol(&["curvature", "--scenario", &scenario("zero_bubble.json"), "--json"])))
            .unwrap();
    assert!(zero.bubble.r_plus.iter().chain(&zero.bubble.r_minus).flatten().all(|v| *v == 0.0));
    let human = stdout(&eol(&["curvature", "--scenario", &scenario("spherical_eh.json")]));
    assert!(human.contains("8.000000") && human.contains("-4.000000"));
}

#[test]
fn taub_flux_is_radius_independent_for_killing_fields() {
    let run = |radius: &str| -> TaubReport {
        let o = eol(&["taub", "--scenario", &scenario("cmc.json"), "--field", "y1-", "--radius", radius, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        serde_json::from_str(&stdout(&o)).unwrap()
    };
    let (a, b) = (run("1"), run("2.5"));
    assert!((a.mixed - b.mixed).abs() < 1e-9 * a.mixed.abs().max(1.0));
    assert!((a.bubble - b.bubble).abs() < 1e-9);
    assert_eq!(a.field, "y1-");
}

#[test]
fn taub_rejects_bad_fields_and_radii() {
    let z3 = scenario("z3_axial.json");
    let o = eol(&["taub", "--scenario", &z3, "--field", "y2+"]);
    assert_eq!(o.status.code(), Some(3));
    let o = eol(&["taub", "--scenario", &z3, "--field", "y4+"]);
    assert_eq!(o.status.code(), Some(2));
    let o = eol(&["taub", "--scenario", &z3, "--field", "radial", "--radius", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("radius"));
    let o = eol(&["taub", "--scenario", &z3, "--field", "y1+"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(H⁴, H₂)"));
}
