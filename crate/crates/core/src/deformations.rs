//! Concrete metrics and perturbations: the orbifold quadratic term `H₂`, the
//! ALE asymptotic term `H⁴`, the Eguchi-Hanson metric and Lie-derivative
//! gauge fields.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flat_model::{
    killing_field, omega_basis, radius_squared, theta_coefficients, FlatModelError, Orientation, Point,
    SymTensorField, VectorField,
};
use crate::jets::{coordinates, Scalar, SpatialJet2};
use crate::poly::PolyVectorField;
use crate::tensor::{self, Mat3, Mat4, Vec4};

const TRACE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error("{field} must be trace-free (trace {trace:e})")]
    NotTraceless { field: &'static str, trace: f64 },
    #[error("{field} must be symmetric")]
    NotSymmetric { field: &'static str },
    #[error("{field} contains a non-finite entry")]
    NonFinite { field: &'static str },
    #[error("volume gauge requires tr h⁺ + tr h⁻ ≤ 0 (got {0:e})")]
    PositiveTraceSum(f64),
}

fn is_finite(m: &Mat3) -> bool {
    m.iter().flatten().all(|v| v.is_finite())
}

fn asymmetry3(m: &Mat3) -> f64 {
    let mut d = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            d = d.max((m[i][j] - m[j][i]).abs());
        }
    }
    d
}

/// Einstein constant and Weyl blocks at an orbifold point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbifoldPointData {
    pub lambda: f64,
    pub w_plus: Mat3,
    pub w_minus: Mat3,
}

impl OrbifoldPointData {
    pub fn new(lambda: f64, w_plus: Mat3, w_minus: Mat3) -> Result<Self, DeformationError> {
        let d = Self {
            lambda,
            w_plus,
            w_minus,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn spherical() -> Self {
        Self {
            lambda: 3.0,
            w_plus: tensor::mat3_zero(),
            w_minus: tensor::mat3_zero(),
        }
    }

    pub fn validate(&self) -> Result<(), DeformationError> {
        if !self.lambda.is_finite() {
            return Err(DeformationError::NonFinite { field: "lambda" });
        }
        for (name, w) in [("w_plus", &self.w_plus), ("w_minus", &self.w_minus)] {
            if !is_finite(w) {
                return Err(DeformationError::NonFinite { field: name });
            }
            let scale = tensor::mat3_max_abs(w).max(1.0);
            if asymmetry3(w) > TRACE_TOLERANCE * scale {
                return Err(DeformationError::NotSymmetric { field: name });
            }
            let trace = tensor::mat3_trace(w);
            if trace.abs() > TRACE_TOLERANCE * scale {
                return Err(DeformationError::NotTraceless { field: name, trace });
            }
        }
        Ok(())
    }

    /// Largest coefficient magnitude.
    pub fn max_coefficient(&self) -> f64 {
        self.lambda
            .abs()
            .max(tensor::mat3_max_abs(&self.w_plus))
            .max(tensor::mat3_max_abs(&self.w_minus))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            lambda: self.lambda * c,
            w_plus: tensor::mat3_scale(&self.w_plus, c),
            w_minus: tensor::mat3_scale(&self.w_minus, c),
        }
    }

    /// `R^±(H₂) = Λ/3·Id + W^±`.
    pub fn curvature_block(&self, orientation: Orientation) -> Mat3 {
        let w = match orientation {
            Orientation::SelfDual => &self.w_plus,
            Orientation::AntiSelfDual => &self.w_minus,
        };
        tensor::mat3_add(w, &tensor::mat3_scale(&tensor::mat3_identity(), self.lambda / 3.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Cmc,
    Volume,
}

/// Coefficients of the `r⁻⁴` term of an ALE metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleAsymptotics {
    pub h_plus: Mat3,
    pub h_minus: Mat3,
    pub gauge: Gauge,
}

/// `c(Γ)·V`, carried by the volume-gauge trace sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedVolumeSurrogate {
    pub value: f64,
}

impl BubbleAsymptotics {
    pub fn new(h_plus: Mat3, h_minus: Mat3, gauge: Gauge) -> Result<Self, DeformationError> {
        let b = Self {
            h_plus,
            h_minus,
            gauge,
        };
        b.validate()?;
        Ok(b)
    }

    /// `h⁺ = diag(−½, 0, 0)`, `h⁻ = 0`.
    pub fn eguchi_hanson() -> Self {
        let mut h = tensor::mat3_zero();
        h[0][0] = -0.5;
        Self {
            h_plus: h,
            h_minus: tensor::mat3_zero(),
            gauge: Gauge::Volume,
        }
    }

    /// `h⁺_ij = −½⟨ζ_i, ζ_j⟩` for `ζ₁, ζ₂, ζ₃ ∈ ℝᵏ`.
    pub fn kronheimer(zeta: [&[f64]; 3]) -> Self {
        let h_plus = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                -0.5 * zeta[i].iter().zip(zeta[j]).map(|(a, b)| a * b).sum::<f64>()
            })
        });
        Self {
            h_plus,
            h_minus: tensor::mat3_zero(),
            gauge: Gauge::Volume,
        }
    }

    pub fn validate(&self) -> Result<(), DeformationError> {
        for (name, h) in [("h_plus", &self.h_plus), ("h_minus", &self.h_minus)] {
            if !is_finite(h) {
                return Err(DeformationError::NonFinite { field: name });
            }
        }
        let scale = tensor::mat3_max_abs(&self.h_plus).max(tensor::mat3_max_abs(&self.h_minus)).max(1.0);
        match self.gauge {
            Gauge::Cmc => {
                for (name, h) in [("h_plus", &self.h_plus), ("h_minus", &self.h_minus)] {
                    let trace = tensor::mat3_trace(h);
                    if trace.abs() > TRACE_TOLERANCE * scale {
                        return Err(DeformationError::NotTraceless { field: name, trace });
                    }
                }
            }
            Gauge::Volume => {
                let s = self.trace_sum();
                if s > TRACE_TOLERANCE * scale {
                    return Err(DeformationError::PositiveTraceSum(s));
                }
            }
        }
        Ok(())
    }

    pub fn trace_sum(&self) -> f64 {
        tensor::mat3_trace(&self.h_plus) + tensor::mat3_trace(&self.h_minus)
    }

    pub fn reduced_volume_surrogate(&self) -> ReducedVolumeSurrogate {
        ReducedVolumeSurrogate {
            value: self.trace_sum(),
        }
    }

    pub fn max_coefficient(&self) -> f64 {
        tensor::mat3_max_abs(&self.h_plus).max(tensor::mat3_max_abs(&self.h_minus))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            h_plus: tensor::mat3_scale(&self.h_plus, c),
            h_minus: tensor::mat3_scale(&self.h_minus, c),
            gauge: self.gauge,
        }
    }

    pub fn coefficients(&self, orientation: Orientation) -> &Mat3 {
        match orientation {
            Orientation::SelfDual => &self.h_plus,
            Orientation::AntiSelfDual => &self.h_minus,
        }
    }
}

/// `Σ_ij c_ij θ_i^{−σ}∘ω_j^σ`, where `σ` is the orientation of the constant
/// factor. This is homogeneous of degree zero.
pub fn rotated_pair_sum<S: Scalar>(c: &Mat3, sigma: Orientation, x: &Vec4<S>) -> Mat4<S> {
    // θ_i^{−σ} = Σ_k t_ik ω_k^{−σ}, so the sum is Σ_kj (tᵀc)_kj ω_k^{−σ}ω_j^σ
    let t = theta_coefficients(sigma, x);
    let lo = omega_basis(sigma.opposite()).map(|f| f.m);
    let hi = omega_basis(sigma).map(|f| f.m);
    let mut acc = tensor::zeros::<S>();
    for k in 0..3 {
        for j in 0..3 {
            let mut coef = S::zero();
            for i in 0..3 {
                if c[i][j] != 0.0 {
                    coef = coef + t[i][k] * c[i][j];
                }
            }
            tensor::add_scaled_sparse(&mut acc, &tensor::matmul(&lo[k], &hi[j]), coef);
        }
    }
    acc
}

/// `r⁴ g_{S³}` realized globally as `r²e − (x·dx)⊗(x·dx)`.
pub fn r4_sphere_metric<S: Scalar>(x: &Vec4<S>) -> Mat4<S> {
    let r2 = radius_squared(x);
    tensor::sub(&tensor::scale(&tensor::identity(), r2), &tensor::outer(x, x))
}

/// Which representative of the orbifold quadratic term to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum H2Gauge {
    /// `−(Λ/9) r⁴g_{S³}` as the Λ-part.
    Literal,
    /// The literal field plus `L_V e` with `V = −(Λ/18) r² x`, which satisfies
    /// `B_e H₂ = 0` for every `Λ`.
    Bianchi,
}

/// The quadratic term of an Einstein metric in geodesic-type coordinates at
/// an orbifold point,
/// `H₂ = −(Λ/9) r⁴g_{S³} − (r²/12)(Σ W⁺_ij θ_i⁻∘ω_j⁺ + Σ W⁻_ij θ_i⁺∘ω_j⁻)`.
///
/// The Weyl coefficient is normalized so that the curvature blocks of
/// `e + H₂` at the origin are exactly `Λ/3·Id + W^±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2Field {
    pub data: OrbifoldPointData,
    pub gauge: H2Gauge,
}

/// Coefficient of `r²Σ W θ∘ω` in `H₂`.
pub const H2_WEYL_COEFFICIENT: f64 = -1.0 / 12.0;

pub fn h2_from_curvature(data: &OrbifoldPointData) -> H2Field {
    H2Field {
        data: *data,
        gauge: H2Gauge::Literal,
    }
}

pub fn h2_bianchi_gauge(data: &OrbifoldPointData) -> H2Field {
    H2Field {
        data: *data,
        gauge: H2Gauge::Bianchi,
    }
}

impl SymTensorField for H2Field {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let r2 = radius_squared(x);
        let lam = self.data.lambda;
        let mut out = tensor::scale_f64(&r4_sphere_metric(x), -lam / 9.0);
        if self.gauge == H2Gauge::Bianchi {
            let extra = tensor::add(
                &tensor::scale_f64(&tensor::outer(x, x), 2.0),
                &tensor::scale(&tensor::identity(), r2),
            );
            out = tensor::add(&out, &tensor::scale_f64(&extra, -lam / 9.0));
        }
        let weyl = tensor::add(
            &rotated_pair_sum(&self.data.w_plus, Orientation::SelfDual, x),
            &rotated_pair_sum(&self.data.w_minus, Orientation::AntiSelfDual, x),
        );
        tensor::add(&out, &tensor::scale(&weyl, r2 * H2_WEYL_COEFFICIENT))
    }
}

/// `H⁴ = (Σ h⁺_ij θ_i⁻∘ω_j⁺ + Σ h⁻_ij θ_i⁺∘ω_j⁻)/r⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H4Field {
    pub bubble: BubbleAsymptotics,
}

pub fn h4_from_asymptotics(b: &BubbleAsymptotics) -> H4Field {
    H4Field { bubble: *b }
}

impl SymTensorField for H4Field {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let inv_r4 = radius_squared(x).square().recip();
        let sum = tensor::add(
            &rotated_pair_sum(&self.bubble.h_plus, Orientation::SelfDual, x),
            &rotated_pair_sum(&self.bubble.h_minus, Orientation::AntiSelfDual, x),
        );
        tensor::scale(&sum, inv_r4)
    }
}

/// `eh = √(r⁴/(1+r⁴))(dr² + r²α₁²) + √(1+r⁴)(α₂² + α₃²)` with `α_i = α_i⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EguchiHanson;

pub fn eguchi_hanson() -> EguchiHanson {
    EguchiHanson
}

impl SymTensorField for EguchiHanson {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let r2 = radius_squared(x);
        let r4 = r2 * r2;
        let u = (S::one() + r4).sqrt();
        let inv_r2 = r2.recip();
        let y: [Vec4<S>; 3] =
            std::array::from_fn(|i| tensor::matvec(&tensor::lift(&killing_field(i, Orientation::SelfDual).a), x));
        let radial = tensor::add(&tensor::outer(x, x), &tensor::outer(&y[0], &y[0]));
        let sphere = tensor::add(&tensor::outer(&y[1], &y[1]), &tensor::outer(&y[2], &y[2]));
        // √(r⁴/(1+r⁴))/r² = 1/u
        let a = u.recip();
        let b = u * inv_r2 * inv_r2;
        tensor::add(&tensor::scale(&radial, a), &tensor::scale(&sphere, b))
    }
}

/// The 2-jet of `u = √(1+r⁴)`.
pub fn eh_potential(p: &Point) -> Result<SpatialJet2, FlatModelError> {
    if p.iter().all(|&v| v == 0.0) {
        return Err(FlatModelError::OriginEvaluation);
    }
    let x: Vec4<SpatialJet2> = coordinates(p);
    let r2 = radius_squared(&x);
    Ok((SpatialJet2::one() + r2 * r2).sqrt())
}

/// `L_V e`, components `∂_a V_b + ∂_b V_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeField<V>(pub V);

pub fn gauge_field<V: VectorField>(v: V) -> GaugeField<V> {
    GaugeField(v)
}

impl<V: VectorField> SymTensorField for GaugeField<V> {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let j = self.0.jacobian(x);
        std::array::from_fn(|a| std::array::from_fn(|b| j[a][b] + j[b][a]))
    }
}

/// `χ(r²)·P(x)` with a `C³` cutoff: `χ = 1` for `r² ≤ s₀`, `χ = 0` for
/// `r² ≥ s₁`, and the degree-7 smoothstep in between.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactVectorField {
    pub profile: PolyVectorField,
    pub s0: f64,
    pub s1: f64,
}

impl CompactVectorField {
    fn cutoff<S: Scalar>(&self, s: S) -> (S, S) {
        let v = s.value();
        if v <= self.s0 {
            return (S::one(), S::zero());
        }
        if v >= self.s1 {
            return (S::zero(), S::zero());
        }
        let w = self.s1 - self.s0;
        let t = (s - S::constant(self.s0)) * (1.0 / w);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let step = t4 * (S::constant(35.0) + t * (-84.0) + t2 * 70.0 + t3 * (-20.0));
        let dstep = t3 * (S::constant(140.0) + t * (-420.0) + t2 * 420.0 + t3 * (-140.0)) * (1.0 / w);
        (S::one() - step, -dstep)
    }
}

impl VectorField for CompactVectorField {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Vec4<S> {
        let (chi, _) = self.cutoff(radius_squared(x));
        self.profile.eval(x).map(|v| v * chi)
    }
    fn jacobian<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let (chi, dchi) = self.cutoff(radius_squared(x));
        let p = self.profile.eval(x);
        let jp = self.profile.jacobian(x);
        std::array::from_fn(|a| std::array::from_fn(|b| x[a] * dchi * p[b] * 2.0 + jp[a][b] * chi))
    }
}
