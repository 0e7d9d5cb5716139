//! Euclidean ℝ⁴∖{0}: the constant 2-form bases `ω_i^±`, the rotated bases
//! `θ_i^∓`, the frames `Y_i^±` and coframes `α_i^±`, tensor and vector field
//! abstractions, exterior calculus on jets and finite subgroups of SO(4).
//!
//! Matrix convention: a 2-form with components `ω_ab` acts on vectors by
//! `(ω v)_a = ω_ab v_b`, and `ω₁⁺ = dx¹∧dx² + dx³∧dx⁴` has `ω_12 = ω_34 = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::jets::{Scalar, SpatialJet};
use crate::tensor::{self, Mat4, Vec4};

pub type Point = [f64; 4];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlatModelError {
    #[error("evaluation at the origin")]
    OriginEvaluation,
    #[error("composition is not symmetric (defect {0:e}); operands probably share a duality type")]
    NonSymmetricResult(f64),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    SelfDual,
    AntiSelfDual,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::SelfDual => 1.0,
            Orientation::AntiSelfDual => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Orientation::SelfDual => Orientation::AntiSelfDual,
            Orientation::AntiSelfDual => Orientation::SelfDual,
        }
    }

    pub fn suffix(self) -> char {
        match self {
            Orientation::SelfDual => '+',
            Orientation::AntiSelfDual => '-',
        }
    }
}

/// A constant antisymmetric 4×4 matrix, read as a 2-form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTwoForm {
    pub m: Mat4<f64>,
}

impl ConstantTwoForm {
    pub fn apply(&self, v: &Vec4<f64>) -> Vec4<f64> {
        tensor::matvec(&self.m, v)
    }

    pub fn hodge_star(&self) -> Self {
        Self {
            m: hodge_star_2(&self.m),
        }
    }
}

/// `e_ab = dx^a∧dx^b` as a component matrix.
fn elementary(a: usize, b: usize) -> Mat4<f64> {
    let mut m = [[0.0; 4]; 4];
    m[a][b] = 1.0;
    m[b][a] = -1.0;
    m
}

/// `ω₁ = e12 ± e34`, `ω₂ = e13 ± e42`, `ω₃ = e14 ± e23`.
pub fn omega_basis(orientation: Orientation) -> [ConstantTwoForm; 3] {
    let s = orientation.sign();
    let pairs = [((0, 1), (2, 3)), ((0, 2), (3, 1)), ((0, 3), (1, 2))];
    pairs.map(|((a, b), (c, d))| ConstantTwoForm {
        m: tensor::add(&elementary(a, b), &tensor::scale_f64(&elementary(c, d), s)),
    })
}

/// Both bases as plain matrices, indexed `[orientation][i]` with `+` first.
pub fn omega_matrices() -> [[Mat4<f64>; 3]; 2] {
    [
        omega_basis(Orientation::SelfDual).map(|w| w.m),
        omega_basis(Orientation::AntiSelfDual).map(|w| w.m),
    ]
}

pub fn omega(i: usize, orientation: Orientation) -> Mat4<f64> {
    omega_basis(orientation)[i].m
}

/// Levi-Civita symbol with `ε_1234 = 1`.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let p = [a, b, c, d];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] == p[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    let mut q = p;
    for i in 0..4 {
        while q[i] != i {
            let t = q[i];
            q.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// `(*T)_cd = ½ T_ab ε_abcd` for a 2-form.
pub fn hodge_star_2<S: Scalar>(t: &Mat4<S>) -> Mat4<S> {
    let mut out = tensor::zeros::<S>();
    for c in 0..4 {
        for d in 0..4 {
            let mut acc = S::zero();
            for a in 0..4 {
                for b in 0..4 {
                    let e = levi_civita(a, b, c, d);
                    if e != 0.0 {
                        acc = acc + t[a][b] * (0.5 * e);
                    }
                }
            }
            out[c][d] = acc;
        }
    }
    out
}

pub type ThreeForm<S> = [[[S; 4]; 4]; 4];

/// `(*T)_d = (1/6) T_abc ε_abcd` for a 3-form.
pub fn hodge_star_3<S: Scalar>(t: &ThreeForm<S>) -> Vec4<S> {
    std::array::from_fn(|d| {
        let mut acc = S::zero();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let e = levi_civita(a, b, c, d);
                    if e != 0.0 {
                        acc = acc + t[a][b][c] * (e / 6.0);
                    }
                }
            }
        }
        acc
    })
}

/// `(*β)_bcd = β_a ε_abcd` for a 1-form.
pub fn hodge_star_1<S: Scalar>(beta: &Vec4<S>) -> ThreeForm<S> {
    std::array::from_fn(|b| {
        std::array::from_fn(|c| {
            std::array::from_fn(|d| {
                (0..4).fold(S::zero(), |acc, a| {
                    let e = levi_civita(a, b, c, d);
                    if e != 0.0 {
                        acc + beta[a] * e
                    } else {
                        acc
                    }
                })
            })
        })
    })
}

/// `(ω∧β)_abc = ω_ab β_c + ω_bc β_a + ω_ca β_b`.
pub fn wedge_2_1<S: Scalar>(w: &Mat4<S>, beta: &Vec4<S>) -> ThreeForm<S> {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| w[a][b] * beta[c] + w[b][c] * beta[a] + w[c][a] * beta[b])
        })
    })
}

/// `(β∧γ)_ab = β_a γ_b − β_b γ_a`.
pub fn wedge_1_1<S: Scalar>(beta: &Vec4<S>, gamma: &Vec4<S>) -> Mat4<S> {
    std::array::from_fn(|a| std::array::from_fn(|b| beta[a] * gamma[b] - beta[b] * gamma[a]))
}

/// `(dβ)_ab = ∂_a β_b − ∂_b β_a`.
pub fn exterior_d_1<J: SpatialJet>(beta: &Vec4<J>) -> Mat4<J::Lower> {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| beta[b].derivative(a) - beta[a].derivative(b))
    })
}

/// `(dφ)_abc = ∂_a φ_bc + ∂_b φ_ca + ∂_c φ_ab`.
pub fn exterior_d_2<J: SpatialJet>(phi: &Mat4<J>) -> ThreeForm<J::Lower> {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                phi[b][c].derivative(a) + phi[c][a].derivative(b) + phi[a][b].derivative(c)
            })
        })
    })
}

/// `(dλ)_a = ∂_a λ`.
pub fn exterior_d_0<J: SpatialJet>(f: &J) -> Vec4<J::Lower> {
    std::array::from_fn(|a| f.derivative(a))
}

pub fn radius_squared<S: Scalar>(x: &Vec4<S>) -> S {
    tensor::dot(x, x)
}

fn norm(p: &Point) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Rotation coefficients `c_ij = xᵀ(ω_i^σ ω_j^{−σ})x / r²`, where `σ` is the
/// orientation of the rotated form `ω_i^σ`.
pub fn theta_coefficients<S: Scalar>(source: Orientation, x: &Vec4<S>) -> [[S; 3]; 3] {
    let src = omega_basis(source).map(|w| w.m);
    let dst = omega_basis(source.opposite()).map(|w| w.m);
    let xx = tensor::outer(x, x);
    let inv_r2 = radius_squared(x).recip();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| tensor::sparse_frobenius(&tensor::matmul(&src[i], &dst[j]), &xx) * inv_r2)
    })
}

/// `θ_i^{τ}(x) = Σ_j c_ij ω_j^{τ}` for every `i`, where `τ` is `output` and the
/// coefficients rotate the opposite constant basis.
pub fn theta_forms<S: Scalar>(output: Orientation, x: &Vec4<S>) -> [Mat4<S>; 3] {
    let c = theta_coefficients(output.opposite(), x);
    let dst = omega_basis(output).map(|w| w.m);
    std::array::from_fn(|i| {
        let mut acc = tensor::zeros::<S>();
        for (j, w) in dst.iter().enumerate() {
            acc = tensor::add(&acc, &tensor::scale(&tensor::lift(w), c[i][j]));
        }
        acc
    })
}

/// `θ_i^τ(p)` as a plain matrix; `i` is zero-based.
pub fn theta_form(i: usize, output: Orientation, p: &Point) -> Result<Mat4<f64>, FlatModelError> {
    if norm(p) == 0.0 {
        return Err(FlatModelError::OriginEvaluation);
    }
    Ok(theta_forms(output, p)[i])
}

/// Matrix product of two 2-forms of opposite duality, which is a symmetric
/// trace-free 2-tensor.
pub fn compose(a: &Mat4<f64>, b: &Mat4<f64>) -> Result<Mat4<f64>, FlatModelError> {
    let c = tensor::matmul(a, b);
    let defect = tensor::asymmetry(&c);
    let scale = 1.0f64.max(tensor::max_abs(a) * tensor::max_abs(b));
    if defect > 1e-12 * scale {
        return Err(FlatModelError::NonSymmetricResult(defect));
    }
    Ok(c)
}

/// `α_i^σ = ω_i^σ(dr/r)`, components `ω_ab x_b / r²`.
pub fn alpha_coframe<S: Scalar>(i: usize, orientation: Orientation, x: &Vec4<S>) -> Vec4<S> {
    let w = tensor::lift(&omega(i, orientation));
    let inv = radius_squared(x).recip();
    tensor::matvec(&w, x).map(|v| v * inv)
}

/// A vector field with components `V^a(x)` and Jacobian `J[a][b] = ∂_a V^b`,
/// both evaluable over any scalar type.
pub trait VectorField: Sync {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Vec4<S>;
    fn jacobian<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S>;

    fn at(&self, p: &Point) -> Vec4<f64> {
        self.eval(p)
    }
}

impl<V: VectorField> VectorField for &V {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Vec4<S> {
        (**self).eval(x)
    }
    fn jacobian<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        (**self).jacobian(x)
    }
}

/// `V(x) = A x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearVectorField {
    pub a: Mat4<f64>,
}

impl VectorField for LinearVectorField {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Vec4<S> {
        tensor::matvec(&tensor::lift(&self.a), x)
    }
    fn jacobian<S: Scalar>(&self, _x: &Vec4<S>) -> Mat4<S> {
        tensor::lift(&tensor::transpose(&self.a))
    }
}

/// `r∂_r`.
pub fn radial_field() -> LinearVectorField {
    LinearVectorField {
        a: tensor::identity(),
    }
}

/// `Y_i^σ = ω_i^σ(r∂_r)`; `i` is zero-based.
pub fn killing_field(i: usize, orientation: Orientation) -> LinearVectorField {
    LinearVectorField {
        a: omega(i, orientation),
    }
}

/// `∇(r⁻²)/4 = −x/(2r⁴)`, the generator with `L_V e = ½ Hess(r⁻²)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InverseSquareGradient;

impl VectorField for InverseSquareGradient {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Vec4<S> {
        let inv_r4 = radius_squared(x).square().recip();
        x.map(|v| -(v * inv_r4) * 0.5)
    }
    fn jacobian<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        let inv_r2 = radius_squared(x).recip();
        let inv_r4 = inv_r2 * inv_r2;
        let inv_r6 = inv_r4 * inv_r2;
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let diag = if a == b { inv_r4 * 0.5 } else { S::zero() };
                x[a] * x[b] * inv_r6 * 2.0 - diag
            })
        })
    }
}

/// A symmetric 2-tensor field on ℝ⁴∖{0}, evaluable over any scalar type so
/// that coordinate jets propagate exact derivatives.
pub trait SymTensorField: Sync {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S>;

    fn at(&self, p: &Point) -> Mat4<f64> {
        self.eval(p)
    }
}

impl<F: SymTensorField> SymTensorField for &F {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        (**self).eval(x)
    }
}

/// The Euclidean metric `e`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Euclidean;

impl SymTensorField for Euclidean {
    fn eval<S: Scalar>(&self, _x: &Vec4<S>) -> Mat4<S> {
        tensor::identity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZeroField;

impl SymTensorField for ZeroField {
    fn eval<S: Scalar>(&self, _x: &Vec4<S>) -> Mat4<S> {
        tensor::zeros()
    }
}

/// A constant symmetric tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField(pub Mat4<f64>);

impl SymTensorField for ConstantField {
    fn eval<S: Scalar>(&self, _x: &Vec4<S>) -> Mat4<S> {
        tensor::lift(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sum<A, B>(pub A, pub B);

impl<A: SymTensorField, B: SymTensorField> SymTensorField for Sum<A, B> {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        tensor::add(&self.0.eval(x), &self.1.eval(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<A>(pub f64, pub A);

impl<A: SymTensorField> SymTensorField for Scaled<A> {
    fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
        tensor::scale_f64(&self.1.eval(x), self.0)
    }
}

/// `γ*T`: `(γ*T)(x) = γᵀ T(γx) γ` for an orthogonal `γ`.
pub fn pullback_at<F: SymTensorField>(field: &F, gamma: &Mat4<f64>, p: &Point) -> Mat4<f64> {
    let gp = tensor::matvec(gamma, p);
    let t = field.at(&gp);
    tensor::matmul(&tensor::transpose(gamma), &tensor::matmul(&t, gamma))
}

/// A finite subgroup of O(4).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    pub elements: Vec<Mat4<f64>>,
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        Self {
            elements: vec![tensor::identity()],
        }
    }

    /// `ℤ_k` acting on ℂ² = (x₁+ix₂, x₃+ix₄) by `z ↦ e^{2πi/k} z`.
    pub fn cyclic(k: usize) -> Result<Self, FlatModelError> {
        if k == 0 {
            return Err(FlatModelError::InvalidGroup("cyclic order must be positive".into()));
        }
        let elements = (0..k)
            .map(|m| {
                let phi = 2.0 * std::f64::consts::PI * m as f64 / k as f64;
                let (s, c) = phi.sin_cos();
                let mut g = [[0.0; 4]; 4];
                for b in [0, 2] {
                    g[b][b] = c;
                    g[b + 1][b + 1] = c;
                    g[b + 1][b] = s;
                    g[b][b + 1] = -s;
                }
                if k == 2 && m == 1 {
                    g = tensor::scale_f64(&tensor::identity(), -1.0);
                }
                g
            })
            .collect();
        Ok(Self { elements })
    }

    /// Builds a group from an explicit element list after validating it.
    pub fn from_elements(elements: Vec<Mat4<f64>>) -> Result<Self, FlatModelError> {
        let g = Self { elements };
        g.validate()?;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn position(&self, m: &Mat4<f64>) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| tensor::max_abs_diff(e, m) < 1e-9)
    }

    /// Orthogonality, identity, closure under products and inverses.
    pub fn validate(&self) -> Result<(), FlatModelError> {
        if self.elements.is_empty() {
            return Err(FlatModelError::InvalidGroup("no elements".into()));
        }
        for e in &self.elements {
            let ete = tensor::matmul(&tensor::transpose(e), e);
            if tensor::max_abs_diff(&ete, &tensor::identity()) > 1e-9 {
                return Err(FlatModelError::InvalidGroup("element is not orthogonal".into()));
            }
        }
        if self.position(&tensor::identity()).is_none() {
            return Err(FlatModelError::InvalidGroup("identity missing".into()));
        }
        for a in &self.elements {
            if self.position(&tensor::transpose(a)).is_none() {
                return Err(FlatModelError::InvalidGroup("not closed under inverse".into()));
            }
            for b in &self.elements {
                if self.position(&tensor::matmul(a, b)).is_none() {
                    return Err(FlatModelError::InvalidGroup("not closed under products".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

pub fn group_cyclic_z2() -> FiniteGroup {
    FiniteGroup::cyclic(2).expect("order 2 is valid")
}

/// Random points with `lo < |p| < hi` from a seeded generator.
pub fn sample_points(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Point = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let n = norm(&v);
            if n > 1e-3 && n <= 1.0 {
                let r = rng.gen_range(lo..hi);
                break v.map(|c| c * r / n);
            }
        })
        .collect()
}

/// Largest `|γ*T − T|` over seeded sample points.
pub fn group_invariance_defect<F: SymTensorField>(field: &F, group: &FiniteGroup) -> f64 {
    let mut worst = 0.0f64;
    for p in sample_points(0x5eed, 32, 0.5, 2.0) {
        let t = field.at(&p);
        for g in &group.elements {
            worst = worst.max(tensor::max_abs_diff(&pullback_at(field, g, &p), &t));
        }
    }
    worst
}

/// True iff the sampled pullback deviation is below `1e-10`.
pub fn group_invariance_check<F: SymTensorField>(field: &F, group: &FiniteGroup) -> bool {
    group_invariance_defect(field, group) < 1e-10
}

/// True iff `γ_* V = V` at sampled points, i.e. `V(γx) = γ V(x)`.
pub fn vector_field_invariant<V: VectorField>(field: &V, group: &FiniteGroup, tol: f64) -> bool {
    sample_points(0xfeed, 16, 0.5, 2.0).iter().all(|p| {
        let v = field.at(p);
        group.elements.iter().all(|g| {
            let lhs = field.at(&tensor::matvec(g, p));
            let rhs = tensor::matvec(g, &v);
            (0..4).all(|k| (lhs[k] - rhs[k]).abs() < tol)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_elements_are_orthogonal_complex_structures() {
        for o in [Orientation::SelfDual, Orientation::AntiSelfDual] {
            for w in omega_basis(o) {
                let sq = tensor::matmul(&w.m, &w.m);
                assert_eq!(sq, tensor::scale_f64(&tensor::identity(), -1.0));
                assert_eq!(w.hodge_star().m, tensor::scale_f64(&w.m, o.sign()));
            }
        }
    }

    #[test]
    fn omega_one_acts_by_row_convention() {
        let v = omega_basis(Orientation::SelfDual)[0].apply(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(v, [0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn same_duality_composition_is_rejected() {
        let p = omega_basis(Orientation::SelfDual);
        assert!(matches!(
            compose(&p[0].m, &p[1].m),
            Err(FlatModelError::NonSymmetricResult(_))
        ));
        let m = omega_basis(Orientation::AntiSelfDual);
        let c = compose(&p[0].m, &m[0].m).unwrap();
        assert!(tensor::trace(&c).abs() < 1e-14);
    }

    #[test]
    fn theta_at_origin_fails() {
        assert_eq!(
            theta_form(0, Orientation::AntiSelfDual, &[0.0; 4]),
            Err(FlatModelError::OriginEvaluation)
        );
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita(0, 1, 2, 3), 1.0);
        assert_eq!(levi_civita(1, 0, 2, 3), -1.0);
        assert_eq!(levi_civita(1, 2, 3, 0), -1.0);
        assert_eq!(levi_civita(0, 0, 2, 3), 0.0);
    }

    #[test]
    fn cyclic_groups_validate() {
        for k in 1..7 {
            let g = FiniteGroup::cyclic(k).unwrap();
            g.validate().unwrap();
            assert_eq!(g.order(), k);
        }
        assert!(FiniteGroup::cyclic(0).is_err());
        let bad = FiniteGroup::from_elements(vec![tensor::scale_f64(&tensor::identity(), -1.0)]);
        assert!(bad.is_err());
    }
}
