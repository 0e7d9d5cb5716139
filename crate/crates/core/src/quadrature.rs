//! Product quadrature on round 3-spheres.
//!
//! Hopf coordinates `x = s(cos η cos ξ₁, cos η sin ξ₁, sin η cos ξ₂, sin η sin ξ₂)`
//! with `t = sin²η` give `dv = ½ s³ dt dξ₁ dξ₂`. A monomial of degree `p` in `x`
//! becomes a polynomial of degree `≤ p/2` in `t` times a trigonometric
//! polynomial of degree `≤ p` in each `ξ`, so Gauss-Legendre in `t` with
//! `⌊p/4⌋+1` nodes and the trapezoid rule with `p+1` nodes per angle are exact
//! up to degree `p`.
//!
//! Integrals over `S³/Γ` are `1/|Γ|` times the integral over `S³`, after a
//! sampled invariance check.

use thiserror::Error;

use crate::flat_model::{FiniteGroup, Point, VectorField};
use crate::tensor::{self, Mat4};

/// Relative deviation above which an integrand is not Γ-invariant.
pub const INVARIANCE_TOLERANCE: f64 = 1e-8;

/// Radial Gauss-Legendre nodes for ball and annulus integrals.
pub const RADIAL_NODES: usize = 32;

pub const DEFAULT_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand is not invariant under the group (deviation {deviation:e} at {point:?})")]
    NonInvariantIntegrand { deviation: f64, point: Point },
    #[error("invalid rule: {0}")]
    InvalidRule(String),
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Nodes and weights with `Σ w = 2π² s³`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub radius: f64,
    pub order: usize,
    pub nodes: Vec<(Point, f64)>,
}

impl SphereRule {
    pub fn new(radius: f64, order: usize) -> Result<Self, QuadratureError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(QuadratureError::InvalidRule(format!("radius {radius} must be positive")));
        }
        if order == 0 {
            return Err(QuadratureError::InvalidRule("order must be at least 1".into()));
        }
        let nt = order / 4 + 1;
        let nxi = order + 1;
        let dxi = 2.0 * std::f64::consts::PI / nxi as f64;
        let s3 = radius * radius * radius;
        let mut nodes = Vec::with_capacity(nt * nxi * nxi);
        for (u, wu) in gauss_legendre(nt) {
            let t = 0.5 * (1.0 + u);
            let (c, s) = ((1.0 - t).sqrt(), t.sqrt());
            let w = 0.5 * s3 * 0.5 * wu * dxi * dxi;
            for m1 in 0..nxi {
                let (s1, c1) = (m1 as f64 * dxi).sin_cos();
                for m2 in 0..nxi {
                    let (s2, c2) = (m2 as f64 * dxi).sin_cos();
                    let p = [radius * c * c1, radius * c * s1, radius * s * c2, radius * s * s2];
                    nodes.push((p, w));
                }
            }
        }
        Ok(Self { radius, order, nodes })
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.nodes.iter().map(|n| n.1).collect::<Vec<_>>())
    }

    /// `Σ w_i v_i` with pairwise summation; `values` follows node order.
    pub fn weighted_sum(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let terms: Vec<f64> = self.nodes.iter().zip(values).map(|(n, v)| n.1 * v).collect();
        pairwise_sum(&terms)
    }

    /// A spread of nodes used for invariance sampling.
    pub fn sample_nodes(&self, count: usize) -> Vec<Point> {
        let n = self.nodes.len();
        let step = (n / count.max(1)).max(1);
        // an odd stride avoids sampling only symmetric positions
        (0..count.min(n)).map(|i| self.nodes[(i * step + i * 7) % n].0).collect()
    }
}

/// Recursive pairwise summation; the order is fixed by the input order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Checks `f(γx) = f(x)` at sampled nodes, relative to the sampled magnitude.
pub fn check_invariance<E>(
    f: &impl Fn(&Point) -> Result<f64, E>,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<Result<(), QuadratureError>, E> {
    if group.is_trivial() {
        return Ok(Ok(()));
    }
    let samples = rule.sample_nodes(12);
    let mut base = Vec::with_capacity(samples.len());
    for p in &samples {
        base.push(f(p)?);
    }
    let scale = base.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (p, v) in samples.iter().zip(&base) {
        for g in &group.elements {
            let gp = tensor::matvec(g, p);
            let dev = (f(&gp)? - v).abs();
            if dev > INVARIANCE_TOLERANCE * scale {
                return Ok(Err(QuadratureError::NonInvariantIntegrand {
                    deviation: dev,
                    point: *p,
                }));
            }
        }
    }
    Ok(Ok(()))
}

/// `(1/|Γ|) ∫_{S³(s)} f` for a fallible integrand.
pub fn try_integrate_scalar<E: From<QuadratureError>>(
    f: impl Fn(&Point) -> Result<f64, E>,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, E> {
    check_invariance(&f, rule, group)??;
    let mut values = Vec::with_capacity(rule.nodes.len());
    for (p, _) in &rule.nodes {
        values.push(f(p)?);
    }
    Ok(rule.weighted_sum(&values) / group.order() as f64)
}

/// `(1/|Γ|) ∫_{S³(s)} f`.
pub fn integrate_scalar(
    f: impl Fn(&Point) -> f64,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, QuadratureError> {
    try_integrate_scalar(|p| Ok::<f64, QuadratureError>(f(p)), rule, group)
}

/// Outward unit normal `p/|p|`.
pub fn unit_normal(p: &Point) -> Point {
    let r = tensor::dot(p, p).sqrt();
    p.map(|v| v / r)
}

/// `T(X, n)` with `n = ∂_r`.
pub fn flux_density(t: &Mat4<f64>, x: &Point, p: &Point) -> f64 {
    tensor::bilinear(t, x, &unit_normal(p))
}

/// `∫_{S³(s)/Γ} T(X, ∂_r) dv` for a fallible tensor integrand.
pub fn try_flux<E: From<QuadratureError>, V: VectorField>(
    t: impl Fn(&Point) -> Result<Mat4<f64>, E>,
    x: &V,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, E> {
    try_integrate_scalar(|p| Ok(flux_density(&t(p)?, &x.at(p), p)), rule, group)
}

/// `∫_{S³(s)/Γ} T(X, ∂_r) dv`.
pub fn flux<V: VectorField>(
    t: impl Fn(&Point) -> Mat4<f64>,
    x: &V,
    rule: &SphereRule,
    group: &FiniteGroup,
) -> Result<f64, QuadratureError> {
    integrate_scalar(|p| flux_density(&t(p), &x.at(p), p), rule, group)
}

/// `∫_{r₀ < |x| < r₁} f` as Gauss-Legendre in the radius of sphere integrals.
pub fn try_annulus_integral<E: From<QuadratureError>>(
    f: impl Fn(&Point) -> Result<f64, E>,
    inner: f64,
    outer: f64,
    order: usize,
    group: &FiniteGroup,
) -> Result<f64, E> {
    if !(outer > inner) || inner < 0.0 {
        return Err(QuadratureError::InvalidRule(format!("bad radii {inner}, {outer}")).into());
    }
    let half = 0.5 * (outer - inner);
    let mid = 0.5 * (outer + inner);
    let mut terms = Vec::with_capacity(RADIAL_NODES);
    for (u, w) in gauss_legendre(RADIAL_NODES) {
        let rule = SphereRule::new(mid + half * u, order)?;
        terms.push(half * w * try_integrate_scalar(&f, &rule, group)?);
    }
    Ok(pairwise_sum(&terms))
}

pub fn ball_integral(
    f: impl Fn(&Point) -> f64,
    radius: f64,
    order: usize,
    group: &FiniteGroup,
) -> Result<f64, QuadratureError> {
    try_annulus_integral(|p| Ok::<f64, QuadratureError>(f(p)), 0.0, radius, order, group)
}

/// `Γ(n/2)` for a positive integer `n`.
fn gamma_half(n: u32) -> f64 {
    let mut acc = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut z = if n % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * z < n as f64 {
        acc *= z;
        z += 1.0;
    }
    acc
}

/// Exact `∫_{S³} x₁^{a₁}x₂^{a₂}x₃^{a₃}x₄^{a₄} dv` on the unit sphere.
pub fn moment_oracle(exponents: [u32; 4]) -> f64 {
    if exponents.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let num: f64 = exponents.iter().map(|&a| gamma_half(a + 1)).product();
    let total: u32 = exponents.iter().map(|&a| a + 1).sum();
    2.0 * num / gamma_half(total)
}
