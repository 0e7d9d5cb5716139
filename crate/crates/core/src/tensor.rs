//! Small fixed-size linear algebra over any [`Scalar`].

use crate::jets::Scalar;

pub type Mat4<S> = [[S; 4]; 4];
pub type Vec4<S> = [S; 4];

pub fn zeros<S: Scalar>() -> Mat4<S> {
    [[S::zero(); 4]; 4]
}

pub fn identity<S: Scalar>() -> Mat4<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
}

pub fn lift<S: Scalar>(m: &Mat4<f64>) -> Mat4<S> {
    m.map(|row| row.map(S::constant))
}

pub fn values<S: Scalar>(m: &Mat4<S>) -> Mat4<f64> {
    m.map(|row| row.map(|s| s.value()))
}

pub fn map<S: Scalar, T: Scalar>(m: &Mat4<S>, f: impl Fn(&S) -> T) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| f(&m[i][j])))
}

pub fn add<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn sub<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub fn scale<S: Scalar>(a: &Mat4<S>, c: S) -> Mat4<S> {
    a.map(|row| row.map(|x| x * c))
}

pub fn scale_f64<S: Scalar>(a: &Mat4<S>, c: f64) -> Mat4<S> {
    a.map(|row| row.map(|x| x * c))
}

pub fn matmul<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..4).fold(S::zero(), |acc, k| acc + a[i][k] * b[k][j])
        })
    })
}

pub fn transpose<S: Scalar>(a: &Mat4<S>) -> Mat4<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn matvec<S: Scalar>(a: &Mat4<S>, v: &Vec4<S>) -> Vec4<S> {
    std::array::from_fn(|i| (0..4).fold(S::zero(), |acc, k| acc + a[i][k] * v[k]))
}

pub fn dot<S: Scalar>(a: &Vec4<S>, b: &Vec4<S>) -> S {
    (0..4).fold(S::zero(), |acc, k| acc + a[k] * b[k])
}

pub fn outer<S: Scalar>(a: &Vec4<S>, b: &Vec4<S>) -> Mat4<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j]))
}

pub fn trace<S: Scalar>(a: &Mat4<S>) -> S {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

/// `⟨A, B⟩ = tr(AᵀB) = Σ A_ij B_ij`.
pub fn frobenius<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> S {
    let mut acc = S::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc = acc + a[i][j] * b[i][j];
        }
    }
    acc
}

/// `v ↦ vᵀ A w`.
pub fn bilinear<S: Scalar>(a: &Mat4<S>, v: &Vec4<S>, w: &Vec4<S>) -> S {
    dot(v, &matvec(a, w))
}

/// `⟨m, t⟩` skipping the zero entries of the constant matrix `m`.
pub fn sparse_frobenius<S: Scalar>(m: &Mat4<f64>, t: &Mat4<S>) -> S {
    let mut acc = S::zero();
    for i in 0..4 {
        for j in 0..4 {
            if m[i][j] != 0.0 {
                acc = acc + t[i][j] * m[i][j];
            }
        }
    }
    acc
}

/// `acc += c·m` skipping the zero entries of the constant matrix `m`.
pub fn add_scaled_sparse<S: Scalar>(acc: &mut Mat4<S>, m: &Mat4<f64>, c: S) {
    for i in 0..4 {
        for j in 0..4 {
            if m[i][j] != 0.0 {
                acc[i][j] = acc[i][j] + c * m[i][j];
            }
        }
    }
}

pub fn max_abs(a: &Mat4<f64>) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &Mat4<f64>, b: &Mat4<f64>) -> f64 {
    max_abs(&sub(a, b))
}

/// Largest `|A_ij − A_ji|`.
pub fn asymmetry(a: &Mat4<f64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - a[j][i]).abs());
        }
    }
    m
}

/// Determinant and adjugate via 2×2 minors; `A·adj(A) = det(A)·I`.
pub fn det_adjugate<S: Scalar>(m: &Mat4<S>) -> (S, Mat4<S>) {
    let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
    let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
    let det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
    let adj = [
        [
            m[1][1] * c5 - m[1][2] * c4 + m[1][3] * c3,
            -(m[0][1] * c5) + m[0][2] * c4 - m[0][3] * c3,
            m[3][1] * s5 - m[3][2] * s4 + m[3][3] * s3,
            -(m[2][1] * s5) + m[2][2] * s4 - m[2][3] * s3,
        ],
        [
            -(m[1][0] * c5) + m[1][2] * c2 - m[1][3] * c1,
            m[0][0] * c5 - m[0][2] * c2 + m[0][3] * c1,
            -(m[3][0] * s5) + m[3][2] * s2 - m[3][3] * s1,
            m[2][0] * s5 - m[2][2] * s2 + m[2][3] * s1,
        ],
        [
            m[1][0] * c4 - m[1][1] * c2 + m[1][3] * c0,
            -(m[0][0] * c4) + m[0][1] * c2 - m[0][3] * c0,
            m[3][0] * s4 - m[3][1] * s2 + m[3][3] * s0,
            -(m[2][0] * s4) + m[2][1] * s2 - m[2][3] * s0,
        ],
        [
            -(m[1][0] * c3) + m[1][1] * c1 - m[1][2] * c0,
            m[0][0] * c3 - m[0][1] * c1 + m[0][2] * c0,
            -(m[3][0] * s3) + m[3][1] * s1 - m[3][2] * s0,
            m[2][0] * s3 - m[2][1] * s1 + m[2][2] * s0,
        ],
    ];
    (det, adj)
}

/// Returns the determinant alongside the inverse; the caller decides what a
/// degenerate determinant means.
pub fn det_inverse<S: Scalar>(m: &Mat4<S>) -> (S, Mat4<S>) {
    let (det, adj) = det_adjugate(m);
    let inv_det = det.recip();
    (det, scale(&adj, inv_det))
}

pub type Mat3 = [[f64; 3]; 3];

pub fn mat3_zero() -> Mat3 {
    [[0.0; 3]; 3]
}

pub fn mat3_identity() -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

pub fn mat3_trace(a: &Mat3) -> f64 {
    a[0][0] + a[1][1] + a[2][2]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn mat3_add(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn mat3_scale(a: &Mat3, c: f64) -> Mat3 {
    a.map(|row| row.map(|x| x * c))
}

/// Trace-free part `A − (tr A/3)·I`.
pub fn mat3_traceless(a: &Mat3) -> Mat3 {
    let t = mat3_trace(a) / 3.0;
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - if i == j { t } else { 0.0 }))
}

pub fn mat3_max_abs(a: &Mat3) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn mat3_max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}
