//! Truncated Taylor arithmetic.
//!
//! Two independent truncations are combined here. The spatial jets
//! [`SpatialJet1`], [`SpatialJet2`] and [`SpatialJet3`] carry exact partial
//! derivatives in the four coordinates up to orders one, two and three. The
//! [`BiJet`] wrapper adds two nilpotent perturbation parameters with
//! `ε₁² = ε₂² = 0`, so that evaluating a formula on `g + ε₁h + ε₂k` yields the
//! value, both first variations and the mixed second variation at once.
//!
//! All arithmetic is generic over [`Scalar`]; curvature code is written once
//! and instantiated at whatever derivative depth a caller needs.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Errors of the checked jet operations.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet whose base value {0:e} is numerically zero")]
    DivisionByZero(f64),
    #[error("square root of a jet with non-positive base value {0:e}")]
    NonPositiveBase(f64),
}

/// Base value below which [`BiJet::inv`] refuses to divide.
pub const DIVISION_FLOOR: f64 = 1e-300;

/// A commutative ring with a distinguished real base value, closed under
/// reciprocal and square root.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    fn constant(c: f64) -> Self;

    /// The ε-free, derivative-free part.
    fn value(&self) -> f64;

    /// Unchecked reciprocal (IEEE semantics on the base value).
    fn recip(self) -> Self;

    /// Unchecked square root (IEEE semantics on the base value).
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// A scalar that carries partial derivatives in the coordinates `x₁..x₄`.
///
/// `derivative(k)` returns `∂f/∂x_k` as a jet of one order less, which is how
/// the curvature pipeline turns metric jets into Christoffel jets and then into
/// curvature values.
pub trait SpatialJet: Scalar {
    type Lower: Scalar;

    /// The coordinate function `x_k` at base value `value`.
    fn variable(value: f64, k: usize) -> Self;

    fn derivative(&self, k: usize) -> Self::Lower;

    /// Drops the highest derivative order.
    fn truncate(&self) -> Self::Lower;
}

/// Coordinate jets `(x₁, x₂, x₃, x₄)` at `p`.
pub fn coordinates<J: SpatialJet>(p: &[f64; 4]) -> [J; 4] {
    std::array::from_fn(|k| J::variable(p[k], k))
}

/// Value and gradient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialJet1 {
    pub value: f64,
    pub gradient: [f64; 4],
}

/// Value, gradient and symmetric Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialJet2 {
    pub value: f64,
    pub gradient: [f64; 4],
    pub hessian: [[f64; 4]; 4],
}

/// Value and symmetric derivatives up to order three.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialJet3 {
    pub value: f64,
    pub gradient: [f64; 4],
    pub hessian: [[f64; 4]; 4],
    pub third: [[[f64; 4]; 4]; 4],
}

impl SpatialJet1 {
    pub fn new(value: f64, gradient: [f64; 4]) -> Self {
        Self { value, gradient }
    }

    /// `φ∘self` given `d = [φ(v), φ'(v)]` at the base value `v`.
    fn compose(&self, d: [f64; 4]) -> Self {
        Self {
            value: d[0],
            gradient: self.gradient.map(|g| d[1] * g),
        }
    }
}

impl SpatialJet2 {
    pub fn new(value: f64, gradient: [f64; 4], hessian: [[f64; 4]; 4]) -> Self {
        Self {
            value,
            gradient,
            hessian,
        }
    }

    /// Largest asymmetry `|H_ij − H_ji|` of the Hessian slot.
    pub fn hessian_asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.hessian[i][j] - self.hessian[j][i]).abs());
            }
        }
        m
    }

    fn compose(&self, d: [f64; 4]) -> Self {
        let g = self.gradient;
        let mut out = Self {
            value: d[0],
            gradient: g.map(|gi| d[1] * gi),
            hessian: [[0.0; 4]; 4],
        };
        for i in 0..4 {
            for j in 0..4 {
                out.hessian[i][j] = d[2] * g[i] * g[j] + d[1] * self.hessian[i][j];
            }
        }
        out
    }
}

impl SpatialJet3 {
    fn compose(&self, d: [f64; 4]) -> Self {
        let g = self.gradient;
        let h = self.hessian;
        let mut out = Self {
            value: d[0],
            gradient: g.map(|gi| d[1] * gi),
            ..Self::default()
        };
        for i in 0..4 {
            for j in 0..4 {
                out.hessian[i][j] = d[2] * g[i] * g[j] + d[1] * h[i][j];
                for k in 0..4 {
                    out.third[i][j][k] = d[3] * g[i] * g[j] * g[k]
                        + d[2] * (h[i][j] * g[k] + h[i][k] * g[j] + h[j][k] * g[i])
                        + d[1] * self.third[i][j][k];
                }
            }
        }
        out
    }
}

fn recip_derivatives(v: f64) -> [f64; 4] {
    let r = 1.0 / v;
    [r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]
}

fn sqrt_derivatives(v: f64) -> [f64; 4] {
    let s = v.sqrt();
    let inv = 1.0 / s;
    [
        s,
        0.5 * inv,
        -0.25 * inv * inv * inv,
        0.375 * inv * inv * inv * inv * inv,
    ]
}

macro_rules! slotwise_linear {
    ($ty:ident { $($field:ident),* }) => {
        impl Add for $ty {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                let mut out = self;
                $( slotwise_linear!(@zip out.$field, o.$field, +); )*
                out
            }
        }
        impl Sub for $ty {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                let mut out = self;
                $( slotwise_linear!(@zip out.$field, o.$field, -); )*
                out
            }
        }
        impl Neg for $ty {
            type Output = Self;
            fn neg(self) -> Self {
                self * -1.0
            }
        }
        impl Mul<f64> for $ty {
            type Output = Self;
            fn mul(self, c: f64) -> Self {
                let mut out = self;
                $( slotwise_linear!(@scale out.$field, c); )*
                out
            }
        }
    };
    (@zip $a:expr, $b:expr, $op:tt) => {
        Elementwise::zip_with(&mut $a, &$b, |x, y| x $op y)
    };
    (@scale $a:expr, $c:expr) => {
        Elementwise::map_in_place(&mut $a, |x| x * $c)
    };
}

/// Elementwise access over the nested fixed-size arrays used as jet slots.
trait Elementwise {
    fn zip_with(&mut self, other: &Self, f: impl Fn(f64, f64) -> f64 + Copy);
    fn map_in_place(&mut self, f: impl Fn(f64) -> f64 + Copy);
}

impl Elementwise for f64 {
    fn zip_with(&mut self, other: &Self, f: impl Fn(f64, f64) -> f64 + Copy) {
        *self = f(*self, *other);
    }
    fn map_in_place(&mut self, f: impl Fn(f64) -> f64 + Copy) {
        *self = f(*self);
    }
}

impl<T: Elementwise, const N: usize> Elementwise for [T; N] {
    fn zip_with(&mut self, other: &Self, f: impl Fn(f64, f64) -> f64 + Copy) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            a.zip_with(b, f);
        }
    }
    fn map_in_place(&mut self, f: impl Fn(f64) -> f64 + Copy) {
        for a in self.iter_mut() {
            a.map_in_place(f);
        }
    }
}

slotwise_linear!(SpatialJet1 { value, gradient });
slotwise_linear!(SpatialJet2 { value, gradient, hessian });
slotwise_linear!(SpatialJet3 { value, gradient, hessian, third });

impl Mul for SpatialJet1 {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self {
            value: a.value * b.value,
            gradient: std::array::from_fn(|i| a.gradient[i] * b.value + a.value * b.gradient[i]),
        }
    }
}

impl Mul for SpatialJet2 {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        let mut out = Self {
            value: a.value * b.value,
            gradient: std::array::from_fn(|i| a.gradient[i] * b.value + a.value * b.gradient[i]),
            hessian: [[0.0; 4]; 4],
        };
        for i in 0..4 {
            for j in i..4 {
                let v = a.hessian[i][j] * b.value
                    + a.gradient[i] * b.gradient[j]
                    + a.gradient[j] * b.gradient[i]
                    + a.value * b.hessian[i][j];
                out.hessian[i][j] = v;
                out.hessian[j][i] = v;
            }
        }
        out
    }
}

impl Mul for SpatialJet3 {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        let mut out = Self {
            value: a.value * b.value,
            gradient: std::array::from_fn(|i| a.gradient[i] * b.value + a.value * b.gradient[i]),
            ..Self::default()
        };
        let (ag, bg, ah, bh) = (a.gradient, b.gradient, a.hessian, b.hessian);
        for i in 0..4 {
            for j in i..4 {
                let v = ah[i][j] * b.value + ag[i] * bg[j] + ag[j] * bg[i] + a.value * bh[i][j];
                out.hessian[i][j] = v;
                out.hessian[j][i] = v;
                for k in j..4 {
                    let t = a.third[i][j][k] * b.value
                        + ah[i][j] * bg[k]
                        + ah[i][k] * bg[j]
                        + ah[j][k] * bg[i]
                        + ag[i] * bh[j][k]
                        + ag[j] * bh[i][k]
                        + ag[k] * bh[i][j]
                        + a.value * b.third[i][j][k];
                    for (p, q, r) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        out.third[p][q][r] = t;
                    }
                }
            }
        }
        out
    }
}

macro_rules! spatial_scalar {
    ($ty:ident) => {
        impl Scalar for $ty {
            fn constant(c: f64) -> Self {
                Self {
                    value: c,
                    ..Self::default()
                }
            }
            fn value(&self) -> f64 {
                self.value
            }
            fn recip(self) -> Self {
                self.compose(recip_derivatives(self.value))
            }
            fn sqrt(self) -> Self {
                self.compose(sqrt_derivatives(self.value))
            }
        }
    };
}

spatial_scalar!(SpatialJet1);
spatial_scalar!(SpatialJet2);
spatial_scalar!(SpatialJet3);

impl SpatialJet for SpatialJet1 {
    type Lower = f64;
    fn variable(value: f64, k: usize) -> Self {
        let mut out = Self::constant(value);
        out.gradient[k] = 1.0;
        out
    }
    fn derivative(&self, k: usize) -> f64 {
        self.gradient[k]
    }
    fn truncate(&self) -> f64 {
        self.value
    }
}

impl SpatialJet for SpatialJet2 {
    type Lower = SpatialJet1;
    fn variable(value: f64, k: usize) -> Self {
        let mut out = Self::constant(value);
        out.gradient[k] = 1.0;
        out
    }
    fn derivative(&self, k: usize) -> SpatialJet1 {
        SpatialJet1 {
            value: self.gradient[k],
            gradient: self.hessian[k],
        }
    }
    fn truncate(&self) -> SpatialJet1 {
        SpatialJet1 {
            value: self.value,
            gradient: self.gradient,
        }
    }
}

impl SpatialJet for SpatialJet3 {
    type Lower = SpatialJet2;
    fn variable(value: f64, k: usize) -> Self {
        let mut out = Self::constant(value);
        out.gradient[k] = 1.0;
        out
    }
    fn derivative(&self, k: usize) -> SpatialJet2 {
        SpatialJet2 {
            value: self.gradient[k],
            gradient: self.hessian[k],
            hessian: self.third[k],
        }
    }
    fn truncate(&self) -> SpatialJet2 {
        SpatialJet2 {
            value: self.value,
            gradient: self.gradient,
            hessian: self.hessian,
        }
    }
}

/// `c00 + c10·ε₁ + c01·ε₂ + c11·ε₁ε₂` with `ε₁² = ε₂² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BiJet<T> {
    pub c00: T,
    pub c10: T,
    pub c01: T,
    pub c11: T,
}

/// The perturbative scalar used by the curvature pipeline.
pub type BiJetScalar = BiJet<SpatialJet2>;

impl<T: Scalar> BiJet<T> {
    pub fn new(c00: T, c10: T, c01: T, c11: T) -> Self {
        Self { c00, c10, c01, c11 }
    }

    /// A perturbation-free value.
    pub fn from_base(c00: T) -> Self {
        Self {
            c00,
            c10: T::zero(),
            c01: T::zero(),
            c11: T::zero(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BiJet<U> {
        BiJet {
            c00: f(&self.c00),
            c10: f(&self.c10),
            c01: f(&self.c01),
            c11: f(&self.c11),
        }
    }

    /// Reciprocal, refusing bases below [`DIVISION_FLOOR`] in magnitude.
    pub fn inv(&self) -> Result<Self, JetError> {
        let v = self.c00.value();
        if !(v.abs() >= DIVISION_FLOOR) {
            return Err(JetError::DivisionByZero(v));
        }
        Ok(self.recip())
    }

    /// Square root, refusing non-positive bases.
    pub fn checked_sqrt(&self) -> Result<Self, JetError> {
        let v = self.c00.value();
        if !(v > 0.0) {
            return Err(JetError::NonPositiveBase(v));
        }
        Ok(Scalar::sqrt(*self))
    }
}

impl<T: Scalar> Add for BiJet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c00 + o.c00, self.c10 + o.c10, self.c01 + o.c01, self.c11 + o.c11)
    }
}

impl<T: Scalar> Sub for BiJet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c00 - o.c00, self.c10 - o.c10, self.c01 - o.c01, self.c11 - o.c11)
    }
}

impl<T: Scalar> Neg for BiJet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c00, -self.c10, -self.c01, -self.c11)
    }
}

impl<T: Scalar> Mul<f64> for BiJet<T> {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self::new(self.c00 * c, self.c10 * c, self.c01 * c, self.c11 * c)
    }
}

impl<T: Scalar> Mul for BiJet<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self {
            c00: a.c00 * b.c00,
            c10: a.c00 * b.c10 + a.c10 * b.c00,
            c01: a.c00 * b.c01 + a.c01 * b.c00,
            c11: a.c00 * b.c11 + a.c10 * b.c01 + a.c01 * b.c10 + a.c11 * b.c00,
        }
    }
}

impl<T: Scalar> Scalar for BiJet<T> {
    fn constant(c: f64) -> Self {
        Self::from_base(T::constant(c))
    }
    fn value(&self) -> f64 {
        self.c00.value()
    }
    fn recip(self) -> Self {
        let b0 = self.c00.recip();
        let b0sq = b0 * b0;
        Self {
            c00: b0,
            c10: -(b0sq * self.c10),
            c01: -(b0sq * self.c01),
            c11: b0sq * b0 * self.c10 * self.c01 * 2.0 - b0sq * self.c11,
        }
    }
    fn sqrt(self) -> Self {
        let s0 = self.c00.sqrt();
        let half_inv = (s0 * 2.0).recip();
        let s1 = self.c10 * half_inv;
        let s2 = self.c01 * half_inv;
        let s3 = (self.c11 - s1 * s2 * 2.0) * half_inv;
        Self::new(s0, s1, s2, s3)
    }
}

impl<T: SpatialJet> SpatialJet for BiJet<T> {
    type Lower = BiJet<T::Lower>;
    fn variable(value: f64, k: usize) -> Self {
        Self::from_base(T::variable(value, k))
    }
    fn derivative(&self, k: usize) -> Self::Lower {
        BiJet {
            c00: self.c00.derivative(k),
            c10: self.c10.derivative(k),
            c01: self.c01.derivative(k),
            c11: self.c11.derivative(k),
        }
    }
    fn truncate(&self) -> Self::Lower {
        BiJet {
            c00: self.c00.truncate(),
            c10: self.c10.truncate(),
            c01: self.c01.truncate(),
            c11: self.c11.truncate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn x(k: usize, p: [f64; 4]) -> SpatialJet2 {
        SpatialJet2::variable(p[k], k)
    }

    #[test]
    fn square_of_coordinate() {
        let p = [2.0, 0.0, 0.0, 0.0];
        let q = x(0, p) * x(0, p);
        assert_eq!(q.value, 4.0);
        assert_eq!(q.gradient, [4.0, 0.0, 0.0, 0.0]);
        let mut h = [[0.0; 4]; 4];
        h[0][0] = 2.0;
        assert_eq!(q.hessian, h);
    }

    #[test]
    fn nilpotent_product() {
        let a = BiJet::new(1.0, 3.0, 0.0, 0.0);
        let b = BiJet::new(1.0, 0.0, 5.0, 0.0);
        assert_eq!(a * b, BiJet::new(1.0, 3.0, 5.0, 15.0));
        let sq = a * a;
        assert_eq!(sq.c11, 0.0);
    }

    #[test]
    fn geometric_series_inverse() {
        let a = BiJet::<SpatialJet2>::new(
            SpatialJet2::constant(2.0),
            SpatialJet2::constant(1.0),
            SpatialJet2::zero(),
            SpatialJet2::zero(),
        );
        let b = a.inv().unwrap();
        assert_eq!(b.c00.value, 0.5);
        assert_eq!(b.c10.value, -0.25);
        assert_eq!(b.c11.value, 0.0);
        assert_eq!(BiJetScalar::one().inv().unwrap(), BiJetScalar::one());
    }

    #[test]
    fn checked_operations_reject_bad_bases() {
        let z = BiJetScalar::zero();
        assert!(matches!(z.inv(), Err(JetError::DivisionByZero(_))));
        let tiny = BiJetScalar::constant(1e-301);
        assert!(tiny.inv().is_err());
        assert!(matches!(
            BiJetScalar::constant(-1.0).checked_sqrt(),
            Err(JetError::NonPositiveBase(_))
        ));
        assert!(z.checked_sqrt().is_err());
        assert_eq!(
            BiJetScalar::constant(4.0).checked_sqrt().unwrap(),
            BiJetScalar::constant(2.0)
        );
    }

    #[test]
    fn sqrt_of_one_plus_r4_squares_back() {
        let p = [1.0, 0.0, 0.0, 0.0];
        let c: [SpatialJet2; 4] = coordinates(&p);
        let r2 = c.iter().fold(SpatialJet2::zero(), |acc, &xi| acc + xi * xi);
        let f = SpatialJet2::one() + r2 * r2;
        let s = f.sqrt();
        let back = s * s;
        assert_relative_eq!(back.value, f.value, max_relative = 1e-14);
        for i in 0..4 {
            assert_relative_eq!(back.gradient[i], f.gradient[i], epsilon = 1e-14);
            for j in 0..4 {
                assert_relative_eq!(back.hessian[i][j], f.hessian[i][j], epsilon = 1e-13);
            }
        }
        // d√(1+r⁴) = 2r³ dr/√(1+r⁴)
        assert_relative_eq!(s.gradient[0], 2.0 / 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn third_order_matches_lowered_hessian_derivative() {
        let p = [0.4, -1.1, 0.7, 0.3];
        let c: [SpatialJet3; 4] = coordinates(&p);
        let f = (c[0] * c[1] * c[2] + c[3] * c[3] * 2.0 + SpatialJet3::one()).recip().sqrt() * c[0];
        let c2: [SpatialJet2; 4] = coordinates(&p);
        let f2 = (c2[0] * c2[1] * c2[2] + c2[3] * c2[3] * 2.0 + SpatialJet2::one()).recip().sqrt() * c2[0];
        assert_eq!(f.truncate().value, f2.value);
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(f.hessian[i][j], f2.hessian[i][j], max_relative = 1e-13);
                for k in 0..4 {
                    assert_relative_eq!(f.third[i][j][k], f.third[k][i][j], max_relative = 1e-13);
                }
            }
        }
        // third derivatives against central differences of the Hessian
        let h = 1e-4;
        for k in 0..4 {
            let mut pp = p;
            let mut pm = p;
            pp[k] += h;
            pm[k] -= h;
            let eval = |q: [f64; 4]| {
                let c: [SpatialJet2; 4] = coordinates(&q);
                (c[0] * c[1] * c[2] + c[3] * c[3] * 2.0 + SpatialJet2::one()).recip().sqrt() * c[0]
            };
            let (a, b) = (eval(pp), eval(pm));
            for i in 0..4 {
                for j in 0..4 {
                    let fd = (a.hessian[i][j] - b.hessian[i][j]) / (2.0 * h);
                    assert_relative_eq!(f.third[k][i][j], fd, epsilon = 1e-5, max_relative = 1e-5);
                }
            }
        }
    }
}
