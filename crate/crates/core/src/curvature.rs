//! Christoffel symbols, Riemann, Ricci and scalar curvature of jet-valued
//! metrics, their first and second variations, the curvature operator on
//! 2-forms and the divergence-type operators `δ_g`, `B_g` and `L_X g`.
//!
//! Index conventions:
//!
//! * `Γ^a_bc = ½ g^{ad}(∂_b g_dc + ∂_c g_db − ∂_d g_bc)`;
//! * `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`,
//!   `R_abcd = g_ae R^e_bcd`, `Ric_bd = R^a_bad`, so the unit sphere has
//!   `R_abcd = g_ac g_bd − g_ad g_bc` and `Ric = 3g`;
//! * the curvature operator is `𝐑(ω)_ab = ½ R_ab^{cd} ω_cd`, represented in the
//!   basis `(ω₁⁺, ω₂⁺, ω₃⁺, ω₁⁻, ω₂⁻, ω₃⁻)` by `M_ij = ⟨𝐑ω_i, ω_j⟩/4`, which
//!   is the identity on the unit sphere;
//! * `(δ_g T)_k = −g^{ij}∇_j T_ik` and `B_g = δ_g + ½ d tr_g`.
//!
//! Second variations follow `F(g+h) = Σ F⁽ᵐ⁾(h,…,h)`: `F⁽²⁾(h,k)` is half the
//! `ε₁ε₂` coefficient of `F(g + ε₁h + ε₂k)`.

use thiserror::Error;

use crate::flat_model::{
    self, exterior_d_0, exterior_d_2, hodge_star_3, omega_basis, omega_matrices, wedge_2_1,
    Orientation, Point, SymTensorField, VectorField,
};
use crate::jets::{coordinates, BiJet, Scalar, SpatialJet, SpatialJet1, SpatialJet2, SpatialJet3};
use crate::tensor::{self, Mat3, Mat4, Vec4};

/// Determinant threshold below which a metric counts as degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("degenerate metric: determinant {0:e} at {1:?}")]
    DegenerateMetric(f64, Point),
}

pub type Christoffel<S> = [[[S; 4]; 4]; 4];
pub type Riemann<S> = [[[[S; 4]; 4]; 4]; 4];

/// Two derivative orders below `T`.
pub type Low2<T> = <<T as SpatialJet>::Lower as SpatialJet>::Lower;

/// Curvature data at the derivative level two below the metric jets.
#[derive(Debug, Clone)]
pub struct Geometry<L> {
    pub metric: Mat4<L>,
    pub inverse: Mat4<L>,
    /// `Γ^a_bc` stored as `[a][b][c]`.
    pub christoffel: Christoffel<L>,
    /// `R_abcd`, all indices down.
    pub riemann: Riemann<L>,
    pub ricci: Mat4<L>,
    pub scalar: L,
}

fn truncate_matrix<T: SpatialJet>(m: &Mat4<T>) -> Mat4<T::Lower> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].truncate()))
}

fn christoffel_from<S: Scalar>(inverse: &Mat4<S>, dg: &[Mat4<S>; 4]) -> Christoffel<S> {
    let mut lowered = [[[S::zero(); 4]; 4]; 4];
    for d in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                let v = (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]) * 0.5;
                lowered[d][b][c] = v;
                lowered[d][c][b] = v;
            }
        }
    }
    let mut out = [[[S::zero(); 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                let v = (0..4).fold(S::zero(), |acc, d| acc + inverse[a][d] * lowered[d][b][c]);
                out[a][b][c] = v;
                out[a][c][b] = v;
            }
        }
    }
    out
}

fn check_determinant<S: Scalar>(det: &S, p: &Point) -> Result<(), CurvatureError> {
    let v = det.value();
    if !(v >= DEGENERACY_FLOOR) {
        return Err(CurvatureError::DegenerateMetric(v, *p));
    }
    Ok(())
}

/// Full curvature of a metric given as jets of order at least two; `p` is
/// only used in error reports.
pub fn geometry<T>(g: &Mat4<T>, p: &Point) -> Result<Geometry<Low2<T>>, CurvatureError>
where
    T: SpatialJet,
    T::Lower: SpatialJet,
{
    let g1 = truncate_matrix(g);
    let (det, inverse1) = tensor::det_inverse(&g1);
    check_determinant(&det, p)?;
    let dg: [Mat4<T::Lower>; 4] =
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].derivative(k))));
    let gamma1 = christoffel_from(&inverse1, &dg);

    let zero = Low2::<T>::zero();
    let mut dgamma = [[[[zero; 4]; 4]; 4]; 4];
    let mut gamma = [[[zero; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                let t = gamma1[a][b][c].truncate();
                gamma[a][b][c] = t;
                gamma[a][c][b] = t;
                for k in 0..4 {
                    let d = gamma1[a][b][c].derivative(k);
                    dgamma[k][a][b][c] = d;
                    dgamma[k][a][c][b] = d;
                }
            }
        }
    }

    let metric = truncate_matrix(&g1);
    let inverse = truncate_matrix(&inverse1);

    // R^a_bcd for c < d, antisymmetric in (c, d)
    let mut up = [[[[zero; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in (c + 1)..4 {
                    let mut v = dgamma[c][a][d][b] - dgamma[d][a][c][b];
                    for e in 0..4 {
                        v = v + gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b];
                    }
                    up[a][b][c][d] = v;
                    up[a][b][d][c] = -v;
                }
            }
        }
    }
    let mut riemann = [[[[zero; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in (c + 1)..4 {
                    let v = (0..4).fold(zero, |acc, e| acc + metric[a][e] * up[e][b][c][d]);
                    riemann[a][b][c][d] = v;
                    riemann[a][b][d][c] = -v;
                }
            }
        }
    }
    let mut ricci = [[zero; 4]; 4];
    for b in 0..4 {
        for d in 0..4 {
            ricci[b][d] = (0..4).fold(zero, |acc, a| acc + up[a][b][a][d]);
        }
    }
    // symmetrize away roundoff-level asymmetry
    for b in 0..4 {
        for d in (b + 1)..4 {
            let s = (ricci[b][d] + ricci[d][b]) * 0.5;
            ricci[b][d] = s;
            ricci[d][b] = s;
        }
    }
    let scalar = tensor::frobenius(&inverse, &ricci);
    Ok(Geometry {
        metric,
        inverse,
        christoffel: gamma,
        riemann,
        ricci,
        scalar,
    })
}

impl<L: Scalar> Geometry<L> {
    /// `E = Ric − (R/2) g`.
    pub fn einstein(&self) -> Mat4<L> {
        tensor::sub(&self.ricci, &tensor::scale(&self.metric, self.scalar * 0.5))
    }

    /// `Ric° = Ric − (R/4) g`.
    pub fn traceless_ricci(&self) -> Mat4<L> {
        tensor::sub(&self.ricci, &tensor::scale(&self.metric, self.scalar * 0.25))
    }

    /// `𝐑(ω)_ab = ½ R_ab^{cd} ω_cd` for a constant 2-form `ω`.
    pub fn curvature_operator_on(&self, w: &Mat4<f64>) -> Mat4<L> {
        let raised: Mat4<L> = {
            let gi = &self.inverse;
            std::array::from_fn(|c| {
                std::array::from_fn(|d| {
                    let mut acc = L::zero();
                    for e in 0..4 {
                        for f in 0..4 {
                            if w[e][f] != 0.0 {
                                acc = acc + gi[c][e] * gi[d][f] * w[e][f];
                            }
                        }
                    }
                    acc
                })
            })
        };
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let mut acc = L::zero();
                for c in 0..4 {
                    for d in 0..4 {
                        acc = acc + self.riemann[a][b][c][d] * raised[c][d];
                    }
                }
                acc * 0.5
            })
        })
    }

    /// `M_ij = ⟨𝐑ω_i, ω_j⟩/4` in the basis `(ω₁⁺..ω₃⁺, ω₁⁻..ω₃⁻)`.
    pub fn curvature_operator(&self) -> [[L; 6]; 6] {
        let basis = six_basis();
        let images = basis.map(|w| self.curvature_operator_on(&w));
        std::array::from_fn(|i| {
            std::array::from_fn(|j| tensor::frobenius(&images[i], &tensor::lift(&basis[j])) * 0.25)
        })
    }
}

/// `(ω₁⁺, ω₂⁺, ω₃⁺, ω₁⁻, ω₂⁻, ω₃⁻)`.
pub fn six_basis() -> [Mat4<f64>; 6] {
    let [p, m] = omega_matrices();
    [p[0], p[1], p[2], m[0], m[1], m[2]]
}

/// A background metric `g` with two symmetric perturbations, evaluated as
/// `g + ε₁h + ε₂k`.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedMetric<G, H, K> {
    pub background: G,
    pub h: H,
    pub k: K,
}

impl<G: SymTensorField, H: SymTensorField, K: SymTensorField> PerturbedMetric<G, H, K> {
    pub fn new(background: G, h: H, k: K) -> Self {
        Self { background, h, k }
    }

    pub fn eval_jet<J: SpatialJet>(&self, p: &Point) -> Mat4<BiJet<J>> {
        let x: Vec4<J> = coordinates(p);
        let g0 = self.background.eval(&x);
        let h = self.h.eval(&x);
        let k = self.k.eval(&x);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| BiJet::new(g0[i][j], h[i][j], k[i][j], J::zero()))
        })
    }

    /// Curvature values with all four perturbation slots.
    pub fn geometry(&self, p: &Point) -> Result<Geometry<BiJet<f64>>, CurvatureError> {
        geometry(&self.eval_jet::<SpatialJet2>(p), p)
    }

    /// Curvature together with its first spatial derivatives.
    pub fn geometry_with_gradient(
        &self,
        p: &Point,
    ) -> Result<Geometry<BiJet<SpatialJet1>>, CurvatureError> {
        geometry(&self.eval_jet::<SpatialJet3>(p), p)
    }
}

/// `(F(g), F⁽¹⁾(h), F⁽¹⁾(k), F⁽²⁾(h,k))` of a symmetric-tensor-valued `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationResult {
    pub order0: Mat4<f64>,
    pub order1_h: Mat4<f64>,
    pub order1_k: Mat4<f64>,
    pub order2_hk: Mat4<f64>,
}

impl VariationResult {
    pub fn from_bijet(m: &Mat4<BiJet<f64>>) -> Self {
        Self {
            order0: tensor::map(m, |b| b.c00),
            order1_h: tensor::map(m, |b| b.c10),
            order1_k: tensor::map(m, |b| b.c01),
            order2_hk: tensor::map(m, |b| 0.5 * b.c11),
        }
    }
}

/// First variation in `h` of a jet-valued tensor, keeping its jet type.
pub fn first_variation<T: Scalar>(m: &Mat4<BiJet<T>>) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].c10))
}

/// Bilinear second variation `½·(ε₁ε₂ slot)`, keeping its jet type.
pub fn second_variation<T: Scalar>(m: &Mat4<BiJet<T>>) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].c11 * 0.5))
}

pub fn ricci<G, H, K>(metric: &PerturbedMetric<G, H, K>, p: &Point) -> Result<VariationResult, CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    Ok(VariationResult::from_bijet(&metric.geometry(p)?.ricci))
}

pub fn einstein_tensor_variations<G, H, K>(
    metric: &PerturbedMetric<G, H, K>,
    p: &Point,
) -> Result<VariationResult, CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    Ok(VariationResult::from_bijet(&metric.geometry(p)?.einstein()))
}

pub fn traceless_ricci_variations<G, H, K>(
    metric: &PerturbedMetric<G, H, K>,
    p: &Point,
) -> Result<VariationResult, CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    Ok(VariationResult::from_bijet(&metric.geometry(p)?.traceless_ricci()))
}

/// `(R, R⁽¹⁾(h), R⁽¹⁾(k), R⁽²⁾(h,k))`.
pub fn scalar_variations<G, H, K>(
    metric: &PerturbedMetric<G, H, K>,
    p: &Point,
) -> Result<(f64, f64, f64, f64), CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    let s = metric.geometry(p)?.scalar;
    Ok((s.c00, s.c10, s.c01, 0.5 * s.c11))
}

/// `(δ_g T)_k = −g^{ij}∇_j T_ik`, one derivative order below the inputs.
pub fn divergence<L: SpatialJet>(t: &Mat4<L>, g: &Mat4<L>) -> Vec4<L::Lower> {
    let g0 = truncate_matrix(g);
    let (_, inverse) = tensor::det_inverse(&g0);
    let dg: [Mat4<L::Lower>; 4] =
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].derivative(k))));
    let gamma = christoffel_from(&inverse, &dg);
    let t0 = truncate_matrix(t);
    std::array::from_fn(|k| {
        let mut acc = L::Lower::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut nabla = t[i][k].derivative(j);
                for l in 0..4 {
                    nabla = nabla - gamma[l][j][i] * t0[l][k] - gamma[l][j][k] * t0[i][l];
                }
                acc = acc + inverse[i][j] * nabla;
            }
        }
        -acc
    })
}

/// `B_g T = δ_g T + ½ d(tr_g T)`.
pub fn bianchi<L: SpatialJet>(t: &Mat4<L>, g: &Mat4<L>) -> Vec4<L::Lower> {
    let (_, inverse) = tensor::det_inverse(g);
    let tr = tensor::frobenius(&inverse, t);
    let div = divergence(t, g);
    std::array::from_fn(|k| div[k] + tr.derivative(k) * 0.5)
}

/// `(L_X g)_ab = X^c ∂_c g_ab + g_cb ∂_a X^c + g_ac ∂_b X^c`.
pub fn lie_derivative<L: SpatialJet>(g: &Mat4<L>, x: &Vec4<L>) -> Mat4<L::Lower> {
    let g0 = truncate_matrix(g);
    let x0: Vec4<L::Lower> = x.map(|v| v.truncate());
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let mut acc = L::Lower::zero();
            for c in 0..4 {
                acc = acc
                    + x0[c] * g[a][b].derivative(c)
                    + g0[c][b] * x[c].derivative(a)
                    + g0[a][c] * x[c].derivative(b);
            }
            acc
        })
    })
}

/// Evaluates a field and a vector field on coordinate jets and returns
/// `L_X T` at `p`.
pub fn lie_derivative_at<F: SymTensorField, V: VectorField>(field: &F, x: &V, p: &Point) -> Mat4<f64> {
    let c: Vec4<SpatialJet1> = coordinates(p);
    lie_derivative(&field.eval(&c), &x.eval(&c))
}

/// Blocks of the curvature operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBlocks {
    /// `Ω⁺ → Ω⁺` block in the basis `ω_i⁺`.
    pub r_plus: Mat3,
    /// `Ω⁻ → Ω⁻` block in the basis `ω_i⁻`.
    pub r_minus: Mat3,
    /// Off-diagonal block, rows `ω_i⁺`, columns `ω_j⁻`.
    pub off_diagonal: Mat3,
    pub ric0: Mat4<f64>,
    pub scal: f64,
}

impl CurvatureBlocks {
    pub fn w_plus(&self) -> Mat3 {
        tensor::mat3_traceless(&self.r_plus)
    }

    pub fn w_minus(&self) -> Mat3 {
        tensor::mat3_traceless(&self.r_minus)
    }

    fn from_parts(op: &[[f64; 6]; 6], ric0: Mat4<f64>, scal: f64) -> Self {
        Self {
            r_plus: std::array::from_fn(|i| std::array::from_fn(|j| op[i][j])),
            r_minus: std::array::from_fn(|i| std::array::from_fn(|j| op[i + 3][j + 3])),
            off_diagonal: std::array::from_fn(|i| std::array::from_fn(|j| op[i][j + 3])),
            ric0,
            scal,
        }
    }
}

/// Curvature operator and blocks for all four perturbation slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockVariations {
    pub operator: [[[f64; 6]; 6]; 4],
    pub blocks: [CurvatureBlocks; 4],
}

pub fn block_variations<G, H, K>(
    metric: &PerturbedMetric<G, H, K>,
    p: &Point,
) -> Result<BlockVariations, CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    let geo = metric.geometry(p)?;
    let op = geo.curvature_operator();
    let ric0 = geo.traceless_ricci();
    let slot = |s: usize| -> ([[f64; 6]; 6], Mat4<f64>, f64) {
        let pick = |b: &BiJet<f64>| match s {
            0 => b.c00,
            1 => b.c10,
            2 => b.c01,
            _ => 0.5 * b.c11,
        };
        (
            op.map(|row| row.map(|b| pick(&b))),
            tensor::map(&ric0, pick),
            pick(&geo.scalar),
        )
    };
    let parts = [slot(0), slot(1), slot(2), slot(3)];
    Ok(BlockVariations {
        operator: parts.map(|p| p.0),
        blocks: parts.map(|(o, r, s)| CurvatureBlocks::from_parts(&o, r, s)),
    })
}

pub fn curvature_blocks<G, H, K>(metric: &PerturbedMetric<G, H, K>, p: &Point) -> Result<CurvatureBlocks, CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    Ok(block_variations(metric, p)?.blocks[0])
}

/// `(R^{+,(1)}(h), R^{−,(1)}(h))`.
pub fn block_variation<G, H, K>(metric: &PerturbedMetric<G, H, K>, p: &Point) -> Result<(Mat3, Mat3), CurvatureError>
where
    G: SymTensorField,
    H: SymTensorField,
    K: SymTensorField,
{
    let b = block_variations(metric, p)?.blocks[1];
    Ok((b.r_plus, b.r_minus))
}

/// Re-expresses a diagonal block in another orthogonal basis of the same
/// duality type: `M' = B M Bᵀ` with `B_ik = ⟨b_i, ω_k⟩/4`.
pub fn block_in_basis(block: &Mat3, orientation: Orientation, basis: &[Mat4<f64>; 3]) -> Mat3 {
    let w = omega_basis(orientation).map(|f| f.m);
    let b: Mat3 = std::array::from_fn(|i| std::array::from_fn(|k| tensor::frobenius(&basis[i], &w[k]) * 0.25));
    tensor::mat3_mul(&tensor::mat3_mul(&b, block), &tensor::mat3_transpose(&b))
}

/// `h = λe + Σ_i φ_i⁻∘ω_i⁺` with `λ = tr(h)/4` and
/// `φ_i⁻ = ¼ Σ_j ⟨h°, ω_j⁻∘ω_i⁺⟩ ω_j⁻`.
pub fn selfdual_decomposition_of<S: Scalar>(h: &Mat4<S>) -> (S, [Mat4<S>; 3]) {
    let lambda = tensor::trace(h) * 0.25;
    let h0 = tensor::sub(h, &tensor::scale(&tensor::identity(), lambda));
    let [p, m] = omega_matrices();
    let phi = std::array::from_fn(|i| {
        (0..3).fold(tensor::zeros::<S>(), |acc, j| {
            let pair = tensor::lift(&tensor::matmul(&m[j], &p[i]));
            let c = tensor::frobenius(&h0, &pair) * 0.25;
            tensor::add(&acc, &tensor::scale(&tensor::lift(&m[j]), c))
        })
    });
    (lambda, phi)
}

pub fn selfdual_decomposition<F: SymTensorField>(h: &F, p: &Point) -> (f64, [Mat4<f64>; 3]) {
    selfdual_decomposition_of(&h.at(p))
}

/// `dλ + Σ_i *(ω_i⁺ ∧ *dφ_i⁻)`.
pub fn bianchi_gauge_residual<F: SymTensorField>(h: &F, p: &Point) -> Vec4<f64> {
    let x: Vec4<SpatialJet1> = coordinates(p);
    let (lambda, phi) = selfdual_decomposition_of(&h.eval(&x));
    let plus = flat_model::omega_matrices()[0];
    let mut out = exterior_d_0(&lambda);
    for i in 0..3 {
        let star_d_phi = hodge_star_3(&exterior_d_2(&phi[i]));
        let term = hodge_star_3(&wedge_2_1(&plus[i], &star_d_phi));
        for k in 0..4 {
            out[k] += term[k];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_model::{Euclidean, ZeroField};

    struct RoundSphereChart;

    // stereographic sphere of radius 1: 4/(1+r²)² e
    impl SymTensorField for RoundSphereChart {
        fn eval<S: Scalar>(&self, x: &Vec4<S>) -> Mat4<S> {
            let r2 = tensor::dot(x, x);
            let f = (S::one() + r2).square().recip() * 4.0;
            tensor::scale(&tensor::identity(), f)
        }
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let m = PerturbedMetric::new(Euclidean, ZeroField, ZeroField);
        let r = ricci(&m, &[0.3, 0.1, -0.2, 0.5]).unwrap();
        assert_eq!(tensor::max_abs(&r.order0), 0.0);
    }

    #[test]
    fn round_sphere_normalizations() {
        let m = PerturbedMetric::new(RoundSphereChart, ZeroField, ZeroField);
        let p = [0.3, -0.2, 0.4, 0.1];
        let geo = m.geometry(&p).unwrap();
        let g = tensor::map(&geo.metric, |b| b.c00);
        let ric = tensor::map(&geo.ricci, |b| b.c00);
        assert!(tensor::max_abs_diff(&ric, &tensor::scale_f64(&g, 3.0)) < 1e-12);
        assert!((geo.scalar.c00 - 12.0).abs() < 1e-12);
        let blocks = curvature_blocks(&m, &p).unwrap();
        assert!(tensor::mat3_max_abs_diff(&blocks.r_plus, &tensor::mat3_identity()) < 1e-12);
        assert!(tensor::mat3_max_abs_diff(&blocks.r_minus, &tensor::mat3_identity()) < 1e-12);
        assert!(tensor::mat3_max_abs(&blocks.off_diagonal) < 1e-12);
        assert!(tensor::max_abs(&blocks.ric0) < 1e-12);
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let m = PerturbedMetric::new(ZeroField, ZeroField, ZeroField);
        assert!(matches!(
            ricci(&m, &[1.0, 0.0, 0.0, 0.0]),
            Err(CurvatureError::DegenerateMetric(..))
        ));
    }
}
