//! The four subcommands. Each returns the text to print and an exit code.

use std::fmt::Write as _;
use std::path::Path;

use eol_core::curvature::{block_in_basis, block_variation, PerturbedMetric};
use eol_core::deformations::{h2_from_curvature, h4_from_asymptotics};
use eol_core::flat_model::{
    killing_field, radial_field, theta_forms, vector_field_invariant, Euclidean, FiniteGroup, LinearVectorField,
    Orientation, SymTensorField, ZeroField,
};
use eol_core::obstructions::{desingularization_check, taub_quantity, TaubInput};
use eol_core::tensor::{self, Mat3};

use crate::report::*;
use crate::scenario::Scenario;
use crate::verify;
use crate::{CliError, SCHEMA};

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

/// `y1+`, …, `y3-`, or `radial`.
pub fn field_label(i: usize, o: Orientation) -> String {
    format!("y{}{}", i + 1, o.suffix())
}

pub fn parse_field(name: &str) -> Option<LinearVectorField> {
    if name == "radial" {
        return Some(radial_field());
    }
    let b = name.as_bytes();
    if b.len() != 3 || b[0] != b'y' {
        return None;
    }
    let i = match b[1] {
        b'1'..=b'3' => (b[1] - b'1') as usize,
        _ => return None,
    };
    let o = match b[2] {
        b'+' => Orientation::SelfDual,
        b'-' => Orientation::AntiSelfDual,
        _ => return None,
    };
    Some(killing_field(i, o))
}

fn fmt_matrix(out: &mut String, label: &str, m: &Mat3) {
    for (i, row) in m.iter().enumerate() {
        // adding zero turns −0 into +0
        let row = row.map(|v| v + 0.0);
        let head = if i == 0 { label } else { "" };
        let _ = writeln!(out, "  {head:<14} [{:>12.6} {:>12.6} {:>12.6}]", row[0], row[1], row[2]);
    }
}

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:>+16.9e}"),
        None => format!("{:>16}", "not invariant"),
    }
}

fn elapsed_line(start: std::time::Instant) -> String {
    format!("elapsed {:.2} s\n", start.elapsed().as_secs_f64())
}

pub fn obstruct(path: &Path, json: bool) -> Result<Output, CliError> {
    let start = std::time::Instant::now();
    let s = Scenario::load(path)?;
    s.validate_data()?;
    let group = s.group.build()?;
    let r = desingularization_check(&s.orbifold, &s.bubble, &group, s.tolerance, s.quadrature_order)?;
    let mut labels = Vec::new();
    for o in [Orientation::SelfDual, Orientation::AntiSelfDual] {
        for i in 0..3 {
            if vector_field_invariant(&killing_field(i, o), &group, 1e-12) {
                labels.push(field_label(i, o));
            }
        }
    }
    let report = ObstructReport {
        schema: SCHEMA.into(),
        command: "obstruct".into(),
        scenario: s.clone(),
        verdict: r.verdict.label().into(),
        diagnostics: Diagnostics {
            einstein_residual: r.einstein_residual,
            group_order: group.order(),
            invariant_killing_fields: labels,
        },
        obstruction: r,
    };
    if json {
        return Ok(Output::ok(to_json(&report) + "\n"));
    }
    let r = &report.obstruction;
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}  (|Γ| = {}, order {})", path.display(), group.order(), s.quadrature_order);
    let _ = writeln!(out, "  {:<14} {:>16}", "field", "∫ Ric°⁽²⁾(X, ∂r)");
    let _ = writeln!(out, "  {:<14} {}", "radial", fmt_value(Some(r.radial)));
    for (o, vals) in [(Orientation::SelfDual, &r.killing_plus), (Orientation::AntiSelfDual, &r.killing_minus)] {
        for (i, v) in vals.iter().enumerate() {
            let _ = writeln!(out, "  {:<14} {}", field_label(i, o), fmt_value(*v));
        }
    }
    let _ = writeln!(out, "  {:<14} {}", "radial exact", fmt_value(Some(r.radial_exact)));
    let _ = writeln!(out, "  {:<14} {}", "Λ·tr + ḣ:W", fmt_value(Some(r.closed_form)));
    let _ = writeln!(out, "  {:<14} {:>16.3e}", "Ric° residual", r.einstein_residual);
    let _ = writeln!(out, "  scales: orbifold {:.6e}, bubble {:.6e}; tolerance {:.1e}", r.orbifold_scale, r.bubble_scale, r.tolerance);
    let _ = writeln!(out, "verdict: {}", report.verdict);
    out.push_str(&elapsed_line(start));
    Ok(Output::ok(out))
}

/// Point at which bubble blocks are displayed.
pub const PROBE: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

pub fn curvature(path: &Path, json: bool) -> Result<Output, CliError> {
    let start = std::time::Instant::now();
    let s = Scenario::load(path)?;
    s.validate_data()?;
    let p = PROBE;
    let r6 = tensor::dot(&p, &p).powi(3);
    let bubble = PerturbedMetric::new(Euclidean, h4_from_asymptotics(&s.bubble), ZeroField);
    let (bp, bm) = block_variation(&bubble, &p)?;
    let rotate = |m: &Mat3, o: Orientation| tensor::mat3_scale(&block_in_basis(m, o, &theta_forms(o, &p)), r6);
    let orbifold = PerturbedMetric::new(Euclidean, h2_from_curvature(&s.orbifold), ZeroField);
    let (op, om) = block_variation(&orbifold, &p)?;
    let report = CurvatureReport {
        schema: SCHEMA.into(),
        command: "curvature".into(),
        scenario: s,
        probe: p,
        bubble: BlockPair {
            r_plus: rotate(&bp, Orientation::SelfDual),
            r_minus: rotate(&bm, Orientation::AntiSelfDual),
        },
        orbifold: BlockPair { r_plus: op, r_minus: om },
    };
    if json {
        return Ok(Output::ok(to_json(&report) + "\n"));
    }
    let mut out = String::new();
    let _ = writeln!(out, "bubble H⁴: r⁶R^{{±,(1)}} in the frame θ^±(x), x = {p:?}");
    let _ = writeln!(out, "  (operator normalized by ⟨𝐑ω_i, ω_j⟩/4; Eguchi-Hanson gives r⁶R⁻ = diag(8, −4, −4))");
    fmt_matrix(&mut out, "r⁶R⁺", &report.bubble.r_plus);
    fmt_matrix(&mut out, "r⁶R⁻", &report.bubble.r_minus);
    let _ = writeln!(out, "orbifold H₂: R^{{±,(1)}} in the frame ω^±, equal to Λ/3·Id + W^±");
    fmt_matrix(&mut out, "R⁺", &report.orbifold.r_plus);
    fmt_matrix(&mut out, "R⁻", &report.orbifold.r_minus);
    out.push_str(&elapsed_line(start));
    Ok(Output::ok(out))
}

fn taub_flux<H: SymTensorField, K: SymTensorField>(
    h: H,
    k: K,
    x: LinearVectorField,
    radius: f64,
    group: &FiniteGroup,
    order: usize,
) -> Result<f64, CliError> {
    Ok(taub_quantity(&TaubInput { h, k, x, radius, group: group.clone(), order })?)
}

pub fn taub(path: &Path, field: &str, radius: f64, json: bool) -> Result<Output, CliError> {
    let start = std::time::Instant::now();
    let s = Scenario::load(path)?;
    let x = parse_field(field).ok_or_else(|| CliError::Input(format!("field: unknown field {field:?}")))?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(CliError::Input(format!("radius: must be positive, got {radius}")));
    }
    s.validate_data()?;
    let group = s.group.build()?;
    if !vector_field_invariant(&x, &group, 1e-12) {
        return Err(CliError::Precondition(format!("field {field} is not invariant under the group")));
    }
    let h4 = h4_from_asymptotics(&s.bubble);
    let h2 = h2_from_curvature(&s.orbifold);
    let order = s.quadrature_order;
    let bubble = taub_flux(h4, h4, x, radius, &group, order)?;
    let orbifold = taub_flux(h2, h2, x, radius, &group, order)?;
    let mixed = taub_flux(h4, h2, x, radius, &group, order)?;
    let report = TaubReport {
        schema: SCHEMA.into(),
        command: "taub".into(),
        field: field.into(),
        radius,
        bubble,
        orbifold,
        mixed,
        scenario: s,
    };
    if json {
        return Ok(Output::ok(to_json(&report) + "\n"));
    }
    let mut out = String::new();
    let _ = writeln!(out, "Taub flux ∫ E⁽²⁾(h, k)(X, ∂r) over S³({radius})/Γ, X = {field}");
    let _ = writeln!(out, "  {:<14} {}", "(H⁴, H⁴)", fmt_value(Some(report.bubble)));
    let _ = writeln!(out, "  {:<14} {}", "(H₂, H₂)", fmt_value(Some(report.orbifold)));
    let _ = writeln!(out, "  {:<14} {}", "(H⁴, H₂)", fmt_value(Some(report.mixed)));
    out.push_str(&elapsed_line(start));
    Ok(Output::ok(out))
}

pub fn verify(filter: Option<&str>, order: usize, json: bool) -> Result<Output, CliError> {
    if order == 0 {
        return Err(CliError::Input("order: must be at least 1".into()));
    }
    let start = std::time::Instant::now();
    let checks = verify::run(filter, order)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        schema: SCHEMA.into(),
        command: "verify".into(),
        order,
        filter: filter.map(str::to_owned),
        checks,
        passed,
    };
    let code = if passed { 0 } else { 1 };
    if json {
        return Ok(Output { text: to_json(&report) + "\n", code });
    }
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>10}  {:>9}  status", "check", "residual", "tolerance");
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<width$}  {:>10.3e}  {:>9.1e}  {status}", c.name, c.residual, c.tolerance);
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {} failed (quadrature order {order})", report.checks.len(), failed);
    out.push_str(&elapsed_line(start));
    Ok(Output { text: out, code })
}
