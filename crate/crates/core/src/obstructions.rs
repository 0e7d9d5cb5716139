//! Flux integrals over spheres `S³(s)/Γ` and the first-order
//! desingularization obstructions of an Einstein orbifold glued to a
//! Ricci-flat ALE bubble.
//!
//! Every flux is `∫_{S³(s)/Γ} T(X, ∂_r) dv` for a symmetric tensor `T` built
//! from variations of Euclidean curvature. Second variations use the
//! convention of [`crate::curvature`]: `F⁽²⁾(h,k)` is the `t²`-coefficient
//! normalization, half of the mixed second derivative.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{
    bianchi, divergence, einstein_tensor_variations, lie_derivative_at, traceless_ricci_variations,
    CurvatureError, PerturbedMetric,
};
use crate::deformations::{
    h2_from_curvature, h4_from_asymptotics, rotated_pair_sum, BubbleAsymptotics, DeformationError,
    OrbifoldPointData,
};
use crate::flat_model::{
    killing_field, radial_field, radius_squared, vector_field_invariant, Euclidean, FiniteGroup,
    LinearVectorField, Orientation, Point, SymTensorField, VectorField,
};
use crate::jets::{coordinates, BiJet, Scalar, SpatialJet, SpatialJet1};
use crate::quadrature::{check_invariance, flux_density, unit_normal, QuadratureError, SphereRule};
use crate::tensor::{self, Mat3, Mat4, Vec4};

/// Dimension of the model space.
pub const DIM: f64 = 4.0;

/// Sampled residual above which a precondition counts as violated.
pub const PRECONDITION_TOLERANCE: f64 = 1e-8;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Nodes sampled for precondition checks.
const PRECONDITION_SAMPLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObstructionError {
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error("precondition violated: {condition} (sampled residual {residual:e})")]
    PreconditionViolated { condition: &'static str, residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn flat<H: SymTensorField, K: SymTensorField>(h: H, k: K) -> PerturbedMetric<Euclidean, H, K> {
    PerturbedMetric::new(Euclidean, h, k)
}

/// Fluxes of one tensor field against several vector fields, evaluating the
/// tensor once per node.
pub fn flux_batch<V, F>(
    t: F,
    fields: &[V],
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<Vec<f64>, ObstructionError>
where
    V: VectorField,
    F: Fn(&Point) -> Result<Mat4<f64>, ObstructionError>,
{
    for x in fields {
        let density = |p: &Point| Ok::<f64, ObstructionError>(flux_density(&t(p)?, &x.at(p), p));
        check_invariance(&density, rule, group)??;
    }
    let tensors = rule
        .nodes
        .iter()
        .map(|(p, _)| t(p))
        .collect::<Result<Vec<_>, _>>()?;
    let n = group.order() as f64;
    Ok(fields
        .iter()
        .map(|x| {
            let values: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&tensors)
                .map(|((p, _), m)| flux_density(m, &x.at(p), p))
                .collect();
            rule.weighted_sum(&values) / n
        })
        .collect())
}

fn sampled_max(
    rule: &SphereRule,
    f: impl Fn(&Point) -> Result<f64, ObstructionError>,
) -> Result<f64, ObstructionError> {
    let mut worst = 0.0f64;
    for p in rule.sample_nodes(PRECONDITION_SAMPLES) {
        worst = worst.max(f(&p)?);
    }
    Ok(worst)
}

fn require(condition: &'static str, residual: f64) -> Result<(), ObstructionError> {
    if residual > PRECONDITION_TOLERANCE {
        return Err(ObstructionError::PreconditionViolated { condition, residual });
    }
    Ok(())
}

/// `B_X(h) = ∫ E⁽¹⁾(h)(X, ∂_r)`.
pub fn first_order_flux<H: SymTensorField, V: VectorField>(
    h: &H,
    x: &V,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, ObstructionError> {
    let m = flat(h, h);
    let t = |p: &Point| Ok(einstein_tensor_variations(&m, p)?.order1_h);
    Ok(flux_batch(t, std::slice::from_ref(x), rule, group)?[0])
}

/// Inputs of the Taub-type flux `∫ E⁽²⁾(h,k)(X, ∂_r)` over `S³(radius)/Γ`.
#[derive(Debug, Clone)]
pub struct TaubInput<H, K, V> {
    pub h: H,
    pub k: K,
    pub x: V,
    pub radius: f64,
    pub group: FiniteGroup,
    pub order: usize,
}

pub fn taub_quantity<H, K, V>(input: &TaubInput<H, K, V>) -> Result<f64, ObstructionError>
where
    H: SymTensorField,
    K: SymTensorField,
    V: VectorField,
{
    if !(input.radius > 0.0) {
        return Err(ObstructionError::InvalidInput(format!("radius {} must be positive", input.radius)));
    }
    let rule = SphereRule::new(input.radius, input.order)?;
    let m = flat(&input.h, &input.k);
    let t = |p: &Point| Ok(einstein_tensor_variations(&m, p)?.order2_hk);
    Ok(flux_batch(t, std::slice::from_ref(&input.x), &rule, &input.group)?[0])
}

/// `(δ_e h + d tr h, (δ + d tr)⁽¹⁾(h)(h), tr h)` at `p`, where the middle term
/// is the first variation of `T ↦ δ_g T + d tr_g T` in `g` along `h`, applied
/// to the fixed tensor `T = h`.
pub fn gauge_operator_terms<H: SymTensorField>(h: &H, p: &Point) -> (Vec4<f64>, Vec4<f64>, f64) {
    let x: Vec4<SpatialJet1> = coordinates(p);
    let hv = h.eval(&x);
    type J = BiJet<SpatialJet1>;
    let id: Mat4<SpatialJet1> = tensor::identity();
    let g: Mat4<J> = std::array::from_fn(|i| {
        std::array::from_fn(|j| BiJet::new(id[i][j], hv[i][j], SpatialJet1::zero(), SpatialJet1::zero()))
    });
    let t: Mat4<J> = tensor::map(&hv, |v| BiJet::from_base(*v));
    let div = divergence(&t, &g);
    let (_, inverse) = tensor::det_inverse(&g);
    let tr = tensor::frobenius(&inverse, &t);
    let op: Vec4<BiJet<f64>> = std::array::from_fn(|k| div[k] + tr.derivative(k));
    (op.map(|v| v.c00), op.map(|v| v.c10), tr.c00.value())
}

/// `∫ E⁽¹⁾(h)(r∂_r, ∂_r)`.
pub fn conformal_first<H: SymTensorField>(
    h: &H,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, ObstructionError> {
    first_order_flux(h, &radial_field(), rule, group)
}

/// `∫ E⁽¹⁾(h)(r∂_r, ∂_r) + ((d−2)/2)(−δh − d tr h)(∂_r)`, which vanishes
/// when `R⁽¹⁾(h) = 0` on the enclosed ball.
pub fn conformal_first_corrected<H: SymTensorField>(
    h: &H,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, ObstructionError> {
    let bare = conformal_first(h, rule, group)?;
    let f = |p: &Point| {
        let (op, _, _) = gauge_operator_terms(h, p);
        Ok::<f64, QuadratureError>(-tensor::dot(&op, &unit_normal(p)))
    };
    let correction = crate::quadrature::try_integrate_scalar(f, rule, group)?;
    Ok(bare + 0.5 * (DIM - 2.0) * correction)
}

/// Bulk flux, boundary correction and total of the second conformal quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalSecond {
    pub flux: f64,
    pub correction: f64,
    pub total: f64,
}

/// `∫ E⁽²⁾(h,h)(r∂_r,∂_r) + ((2−d)/4)[(δ+d tr)⁽¹⁾(h)(h) + (tr h/2)(δh + d tr h)](∂_r)`.
///
/// The factor `(2−d)/4` pairs with the `t²`-coefficient normalization of
/// `E⁽²⁾`; with `E⁽²⁾` as the full second derivative it reads `(2−d)/2`.
pub fn conformal_second<H: SymTensorField>(
    h: &H,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<ConformalSecond, ObstructionError> {
    let m = flat(h, h);
    let residual = sampled_max(rule, |p| {
        let e1 = einstein_tensor_variations(&m, p)?.order1_h;
        Ok(tensor::max_abs(&e1) / tensor::max_abs(&h.at(p)).max(1.0))
    })?;
    require("E⁽¹⁾(h) = 0", residual)?;
    let t = |p: &Point| Ok(einstein_tensor_variations(&m, p)?.order2_hk);
    let flux = flux_batch(t, &[radial_field()], rule, group)?[0];
    let f = |p: &Point| {
        let (op, var, tr) = gauge_operator_terms(h, p);
        let v: Vec4<f64> = std::array::from_fn(|k| var[k] + 0.5 * tr * op[k]);
        Ok::<f64, QuadratureError>(tensor::dot(&v, &unit_normal(p)))
    };
    let correction = 0.25 * (2.0 - DIM) * crate::quadrature::try_integrate_scalar(f, rule, group)?;
    Ok(ConformalSecond {
        flux,
        correction,
        total: flux + correction,
    })
}

/// Largest sampled `|Ric°⁽¹⁾|` of `h` and `k`, relative to the field sizes.
pub fn einstein_residual<H: SymTensorField, K: SymTensorField>(
    h: &H,
    k: &K,
    rule: &SphereRule,
) -> Result<f64, ObstructionError> {
    let m = flat(h, k);
    sampled_max(rule, |p| {
        let v = traceless_ricci_variations(&m, p)?;
        let rh = tensor::max_abs(&v.order1_h) / tensor::max_abs(&h.at(p)).max(1.0);
        let rk = tensor::max_abs(&v.order1_k) / tensor::max_abs(&k.at(p)).max(1.0);
        Ok(rh.max(rk))
    })
}

/// `∫ Ric°⁽²⁾(h,k)(X, ∂_r)` for several `X` at once.
pub fn ric2_fluxes<H, K, V>(
    h: &H,
    k: &K,
    fields: &[V],
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<Vec<f64>, ObstructionError>
where
    H: SymTensorField,
    K: SymTensorField,
    V: VectorField,
{
    require("Ric°⁽¹⁾(h) = Ric°⁽¹⁾(k) = 0", einstein_residual(h, k, rule)?)?;
    let m = flat(h, k);
    let t = |p: &Point| Ok(traceless_ricci_variations(&m, p)?.order2_hk);
    flux_batch(t, fields, rule, group)
}

pub fn ric2_flux<H, K, V>(
    h: &H,
    k: &K,
    x: &V,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, ObstructionError>
where
    H: SymTensorField,
    K: SymTensorField,
    V: VectorField,
{
    Ok(ric2_fluxes(h, k, std::slice::from_ref(x), rule, group)?[0])
}

/// `Σ_j R⁺_kj θ_l⁻∘ω_j⁺ / r⁴` with `R⁺ = Λ/3·Id + W⁺`, proposed for
/// `Ric°⁽²⁾(θ_l⁻∘ω_k⁺/r⁴, H₂)`. Indices are zero-based.
///
/// This does not agree with the jet computation; see
/// [`ric2_exact_closed_form`] for the form that does.
pub fn ric2_closed_form(k: usize, l: usize, data: &OrbifoldPointData, p: &Point) -> Mat4<f64> {
    let r_plus = data.curvature_block(Orientation::SelfDual);
    let mut c = tensor::mat3_zero();
    c[l] = r_plus[k];
    let inv_r4 = radius_squared(p).powi(2).recip();
    tensor::scale_f64(&rotated_pair_sum(&c, Orientation::SelfDual, p), inv_r4)
}

/// Coefficients `C` with `Ric°⁽²⁾(H⁴, H₂)·r⁴ = Σ C_ab θ_a^{−σ}∘ω_b^σ` when
/// `H⁴ = Σ h_ab θ_a^{−σ}∘ω_b^σ/r⁴` and `H₂` carries `Λ` and the Weyl block
/// `W = W^σ` of the same orientation:
///
/// `C = −⅔hW − ½hᵀW − ⅙Whᵀ + ⅓tr(h)W + ⅙tr(hW)Id + (Λ/18)(h + hᵀ)`.
pub fn ric2_coefficients(h: &Mat3, w: &Mat3, lambda: f64) -> Mat3 {
    let ht = tensor::mat3_transpose(h);
    let hw = tensor::mat3_mul(h, w);
    let htw = tensor::mat3_mul(&ht, w);
    let wht = tensor::mat3_mul(w, &ht);
    let tr_h = tensor::mat3_trace(h);
    let tr_hw = tensor::mat3_trace(&hw);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let diag = if i == j { tr_hw / 6.0 } else { 0.0 };
            -2.0 / 3.0 * hw[i][j] - 0.5 * htw[i][j] - wht[i][j] / 6.0
                + tr_h * w[i][j] / 3.0
                + diag
                + lambda / 18.0 * (h[i][j] + h[j][i])
        })
    })
}

/// Pointwise `Ric°⁽²⁾(H⁴, H₂)` for a bubble term and Weyl block of one
/// orientation `σ`: `h` is `h^σ` and `data` supplies `Λ` and `W^σ`. Terms
/// mixing opposite orientations are not of this form.
pub fn ric2_exact_closed_form(h: &Mat3, sigma: Orientation, data: &OrbifoldPointData, p: &Point) -> Mat4<f64> {
    let w = match sigma {
        Orientation::SelfDual => &data.w_plus,
        Orientation::AntiSelfDual => &data.w_minus,
    };
    let c = ric2_coefficients(h, w, data.lambda);
    let inv_r4 = radius_squared(p).powi(2).recip();
    tensor::scale_f64(&rotated_pair_sum(&c, sigma, p), inv_r4)
}

const SPHERE_AREA: f64 = 2.0 * PI * PI;

fn coefficient_blocks(o: &OrbifoldPointData, b: &BubbleAsymptotics) -> [Mat3; 2] {
    [
        ric2_coefficients(&b.h_plus, &o.w_plus, o.lambda),
        ric2_coefficients(&b.h_minus, &o.w_minus, o.lambda),
    ]
}

/// Exact value of `∫ Ric°⁽²⁾(H⁴,H₂)(r∂_r, ∂_r)` over any `S³(s)/Γ`:
/// `(2π²/|Γ|) Σ_σ tr C^σ = (2π²/|Γ|) Σ_σ [(Λ/9) tr h^σ − (5/6) tr(h^σ W^σ)]`
/// for symmetric `h^σ`.
pub fn radial_closed_form(o: &OrbifoldPointData, b: &BubbleAsymptotics, group: &FiniteGroup) -> f64 {
    let [cp, cm] = coefficient_blocks(o, b);
    SPHERE_AREA * (tensor::mat3_trace(&cp) + tensor::mat3_trace(&cm)) / group.order() as f64
}

/// Exact value of `∫ Ric°⁽²⁾(H⁴,H₂)(Y_i^σ, ∂_r)`:
/// `−σ(2π²/|Γ|)(C^σ_ab − C^σ_ba)` with `(i, a, b)` cyclic. Mixed-orientation
/// terms integrate to zero.
pub fn killing_closed_form(
    o: &OrbifoldPointData,
    b: &BubbleAsymptotics,
    i: usize,
    sigma: Orientation,
    group: &FiniteGroup,
) -> f64 {
    let c = &coefficient_blocks(o, b)[match sigma {
        Orientation::SelfDual => 0,
        Orientation::AntiSelfDual => 1,
    }];
    let (a, bb) = ((i + 1) % 3, (i + 2) % 3);
    -sigma.sign() * SPHERE_AREA * (c[a][bb] - c[bb][a]) / group.order() as f64
}

/// `Λ(tr h⁺ + tr h⁻) + Σ ḣ⁺_ij W⁺_ji + Σ ḣ⁻_ij W⁻_ji`, with `ḣ` the traceless
/// parts.
pub fn curvature_weyl_combination(o: &OrbifoldPointData, b: &BubbleAsymptotics) -> f64 {
    let pair = |h: &Mat3, w: &Mat3| tensor::mat3_trace(&tensor::mat3_mul(&tensor::mat3_traceless(h), w));
    o.lambda * b.trace_sum() + pair(&b.h_plus, &o.w_plus) + pair(&b.h_minus, &o.w_minus)
}

/// `∫ 3⟨H₂, H⁴⟩ + H⁴(B_e H₂, ∂_r)`, with `L_Y H⁴` in place of `H⁴` when a
/// Killing field is given.
pub fn biq_pairing<A: SymTensorField, B: SymTensorField>(
    h2: &A,
    h4: &B,
    y: Option<&LinearVectorField>,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, ObstructionError> {
    let f = |p: &Point| {
        let x: Vec4<SpatialJet1> = coordinates(p);
        let b = bianchi(&h2.eval(&x), &Euclidean.eval(&x));
        let k = match y {
            Some(y) => lie_derivative_at(h4, y, p),
            None => h4.at(p),
        };
        let v = 3.0 * tensor::frobenius(&h2.at(p), &k) + tensor::bilinear(&k, &b, &unit_normal(p));
        Ok::<f64, QuadratureError>(v)
    };
    Ok(crate::quadrature::try_integrate_scalar(f, rule, group)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Obstructed,
    NotObstructedAtFirstOrder,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Obstructed => "OBSTRUCTED",
            Verdict::NotObstructedAtFirstOrder => "NOT OBSTRUCTED AT FIRST ORDER",
        }
    }
}

/// First-order obstruction values of a gluing, computed on unit-normalized
/// inputs. Killing entries are `None` for fields that are not Γ-invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub radial: f64,
    pub killing_plus: [Option<f64>; 3],
    pub killing_minus: [Option<f64>; 3],
    /// `Λ·(trace sum) + ḣ:W` on the normalized inputs.
    pub closed_form: f64,
    /// Analytic value of `radial`.
    pub radial_exact: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// Factors applied to the orbifold data and the bubble coefficients.
    pub orbifold_scale: f64,
    pub bubble_scale: f64,
    /// Largest sampled `|Ric°⁽¹⁾|` of `H₂` and `H⁴`.
    pub einstein_residual: f64,
}

impl ObstructionReport {
    pub fn max_value(&self) -> f64 {
        self.killing_plus
            .iter()
            .chain(&self.killing_minus)
            .flatten()
            .fold(self.radial.abs(), |m, v| m.max(v.abs()))
    }
}

fn unit_scale(m: f64) -> f64 {
    if m > 0.0 {
        1.0 / m
    } else {
        1.0
    }
}

/// The radial and Killing obstructions `∫ Ric°⁽²⁾(H⁴, H₂)(X, ∂_r)` on the
/// unit sphere, with both inputs rescaled to unit maximal coefficient.
/// Bubble data are used in the gauge they are given in.
pub fn desingularization_check(
    o: &OrbifoldPointData,
    b: &BubbleAsymptotics,
    group: &FiniteGroup,
    tolerance: f64,
    order: usize,
) -> Result<ObstructionReport, ObstructionError> {
    o.validate()?;
    b.validate()?;
    let orbifold_scale = unit_scale(o.max_coefficient());
    let bubble_scale = unit_scale(b.max_coefficient());
    let o = o.scaled(orbifold_scale);
    let b = b.scaled(bubble_scale);
    let h4 = h4_from_asymptotics(&b);
    let h2 = h2_from_curvature(&o);
    let rule = SphereRule::new(1.0, order)?;

    let mut fields = vec![radial_field()];
    let mut slots = Vec::new();
    for (s, orientation) in [Orientation::SelfDual, Orientation::AntiSelfDual].into_iter().enumerate() {
        for i in 0..3 {
            let y = killing_field(i, orientation);
            if vector_field_invariant(&y, group, 1e-12) {
                fields.push(y);
                slots.push((s, i));
            }
        }
    }
    let residual = einstein_residual(&h4, &h2, &rule)?;
    let values = ric2_fluxes(&h4, &h2, &fields, &rule, group)?;
    let mut killing = [[None; 3]; 2];
    for (&(s, i), v) in slots.iter().zip(&values[1..]) {
        killing[s][i] = Some(*v);
    }
    let mut report = ObstructionReport {
        radial: values[0],
        killing_plus: killing[0],
        killing_minus: killing[1],
        closed_form: curvature_weyl_combination(&o, &b),
        radial_exact: radial_closed_form(&o, &b, group),
        verdict: Verdict::NotObstructedAtFirstOrder,
        tolerance,
        orbifold_scale,
        bubble_scale,
        einstein_residual: residual,
    };
    if report.max_value() > tolerance {
        report.verdict = Verdict::Obstructed;
    }
    Ok(report)
}

/// `d⟨𝐑ω, ω⟩ + 2(d−2)·scal` for a curvature operator on `Λ²ℝᵈ`, given as an
/// `N×N` matrix with `N = d(d−1)/2`.
pub fn calabi_obstruction(
    curv_op: &[Vec<f64>],
    omega: &[f64],
    scal: f64,
    dim: usize,
) -> Result<f64, ObstructionError> {
    if dim < 4 || dim % 2 == 1 {
        return Err(ObstructionError::InvalidInput(format!("dimension {dim} must be even and at least 4")));
    }
    let n = dim * (dim - 1) / 2;
    if omega.len() != n || curv_op.len() != n || curv_op.iter().any(|row| row.len() != n) {
        return Err(ObstructionError::InvalidInput(format!("expected {n}×{n} operator and {n}-vector")));
    }
    if omega.iter().all(|v| *v == 0.0) {
        return Err(ObstructionError::InvalidInput("omega must be nonzero".into()));
    }
    let quad: f64 = (0..n)
        .map(|i| omega[i] * (0..n).map(|j| curv_op[i][j] * omega[j]).sum::<f64>())
        .sum();
    Ok(dim as f64 * quad + 2.0 * (dim as f64 - 2.0) * scal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calabi_direct_values() {
        let zero = vec![vec![0.0; 6]; 6];
        let mut w = vec![0.0; 6];
        w[0] = 1.0;
        assert_eq!(calabi_obstruction(&zero, &w, 0.0, 4).unwrap(), 0.0);
        let mut r = zero.clone();
        r[0][0] = 1.0;
        assert_eq!(calabi_obstruction(&r, &w, 0.0, 4).unwrap(), 4.0);
        assert!(calabi_obstruction(&r, &[0.0; 6], 0.0, 4).is_err());
        assert!(calabi_obstruction(&r, &w, 0.0, 5).is_err());
    }

    #[test]
    fn weyl_free_spherical_combination_is_lambda_trace() {
        let o = OrbifoldPointData::spherical();
        let b = BubbleAsymptotics::eguchi_hanson();
        assert_eq!(curvature_weyl_combination(&o, &b), -1.5);
    }
}
