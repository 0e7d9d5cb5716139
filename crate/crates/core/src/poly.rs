//! Polynomials in four variables and the polynomial tensor and vector fields
//! built from them. Derivatives are exact and symbolic, which makes them the
//! natural random perturbations for identity checks.

use std::collections::BTreeMap;

use rand::Rng;

use crate::flat_model::{SymTensorField, VectorField};
use crate::jets::Scalar;
use crate::tensor::{Mat4, Vec4};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly4 {
    terms: BTreeMap<[u8; 4], f64>,
}

impl Poly4 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, [0; 4])
    }

    pub fn monomial(coef: f64, exps: [u8; 4]) -> Self {
        let mut p = Self::zero();
        p.add_term(coef, exps);
        p
    }

    pub fn coordinate(k: usize) -> Self {
        let mut e = [0u8; 4];
        e[k] = 1;
        Self::monomial(1.0, e)
    }

    fn add_term(&mut self, coef: f64, exps: [u8; 4]) {
        if coef == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(0.0);
        *entry += coef;
        if *entry == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8; 4], &f64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&v| v as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*c, *e);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(v * c, *e);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = std::array::from_fn(|k| ea[k] + eb[k]);
                out.add_term(ca * cb, e);
            }
        }
        out
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut d = *e;
                d[k] -= 1;
                out.add_term(c * e[k] as f64, d);
            }
        }
        out
    }

    pub fn eval<S: Scalar>(&self, x: &Vec4<S>) -> S {
        let deg = self.degree();
        let powers: Vec<Vec<S>> = x
            .iter()
            .map(|&xi| {
                let mut v = Vec::with_capacity(deg + 1);
                let mut acc = S::one();
                for _ in 0..=deg {
                    v.push(acc);
                    acc = acc * xi;
                }
                v
            })
            .collect();
        self.terms.iter().fold(S::zero(), |acc, (e, c)| {
            let mut m = S::constant(*c);
            for k in 0..4 {
                if e[k] > 0 {
                    m = m * powers[k][e[k] as usize];
                }
            }
            acc + m
        })
    }

    /// All monomials of total degree `≤ max_degree` with coefficients drawn
    /// uniformly from `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_degree: u8) -> Self {
        let mut p = Self::zero();
        for a in 0..=max_degree {
            for b in 0..=(max_degree - a) {
                for c in 0..=(max_degree - a - b) {
                    for d in 0..=(max_degree - a - b - c) {
                        p.add_term(rng.gen_range(-1.0..1.0), [a, b, c, d]);
                    }
                }
            }
        }
        p
    }
}

/// A symmetric tensor field with polynomial components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyTensorField {
    pub comps: [[Poly4; 4]; 4],
}

impl PolyTensorField {
    pub fn from_upper(mut f: impl FnMut(usize, usize) -> Poly4) -> Self {
        let mut comps: [[Poly4; 4]; 4] = Default::default();
        for i in 0..4 {
            for j in i..4 {
                let p = f(i, j);
                comps[j][i] = p.clone();
                comps[i][j] = p;
            }
        }
        Self { comps }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_degree: u8) -> Self {
        Self::from_upper(|_, _| Poly4::random(rng, max_degree))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_upper(|i, j| self.comps[i][j].scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_upper(|i, j| self.comps[i][j].add(&other.comps[i][j]))
    }
}

impl SymTensorField for PolyTensorField {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let mut out = [[S::zero(); 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v = self.comps[i][j].eval(x);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }
}

/// A vector field with polynomial components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyVectorField {
    pub comps: [Poly4; 4],
}

impl PolyVectorField {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_degree: u8) -> Self {
        Self {
            comps: std::array::from_fn(|_| Poly4::random(rng, max_degree)),
        }
    }

    /// `L_X e`, components `∂_a X_b + ∂_b X_a`.
    pub fn killing_operator(&self) -> PolyTensorField {
        PolyTensorField::from_upper(|a, b| {
            self.comps[b].derivative(a).add(&self.comps[a].derivative(b))
        })
    }

    /// `L_X h = X^c ∂_c h_ab + h_cb ∂_a X^c + h_ac ∂_b X^c`.
    pub fn lie_derivative(&self, h: &PolyTensorField) -> PolyTensorField {
        PolyTensorField::from_upper(|a, b| {
            let mut acc = Poly4::zero();
            for c in 0..4 {
                acc = acc
                    .add(&self.comps[c].mul(&h.comps[a][b].derivative(c)))
                    .add(&h.comps[c][b].mul(&self.comps[c].derivative(a)))
                    .add(&h.comps[a][c].mul(&self.comps[c].derivative(b)));
            }
            acc
        })
    }
}

impl VectorField for PolyVectorField {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Vec4<S> {
        std::array::from_fn(|k| self.comps[k].eval(x))
    }
    fn jacobian<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        std::array::from_fn(|a| std::array::from_fn(|b| self.comps[b].derivative(a).eval(x)))
    }
}
