mod common;

use eol_core::curvature::*;
use eol_core::deformations::h4_from_asymptotics;
use eol_core::flat_model::{omega_matrices, Euclidean, Point, Scaled, Sum, SymTensorField, VectorField, ZeroField};
use eol_core::jets::{coordinates, SpatialJet1};
use eol_core::poly::{PolyTensorField, PolyVectorField};
use eol_core::tensor::{self, Mat4};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    prop::array::uniform4(-1.2f64..1.2).prop_filter("not tiny", |p| tensor::dot(p, p) > 0.05)
}

fn poly(seed: u64, degree: u8, scale: f64) -> PolyTensorField {
    PolyTensorField::random(&mut common::rng(seed), degree).scale(scale)
}

fn rel_mat(a: &Mat4<f64>, b: &Mat4<f64>) -> f64 {
    tensor::max_abs_diff(a, b) / tensor::max_abs(a).max(tensor::max_abs(b)).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diffeomorphism_covariance(seed in any::<u64>(), p in point()) {
        // d/dt Ric(g + t L_X g) = L_X Ric(g), expanded at g = e + s h to first order in s
        let mut rng = common::rng(seed);
        let h = PolyTensorField::random(&mut rng, 2);
        let x = PolyVectorField::random(&mut rng, 2);
        let mixed = ricci(&PerturbedMetric::new(Euclidean, &h, x.killing_operator()), &p).unwrap().order2_hk;
        let lxh = ricci(&PerturbedMetric::new(Euclidean, x.lie_derivative(&h), ZeroField), &p).unwrap().order1_h;
        let geo = PerturbedMetric::new(Euclidean, &h, ZeroField).geometry_with_gradient(&p).unwrap();
        let rhs = lie_derivative(&first_variation(&geo.ricci), &x.eval(&coordinates::<SpatialJet1>(&p)));
        let lhs = tensor::add(&tensor::scale_f64(&mixed, 2.0), &lxh);
        prop_assert!(rel_mat(&lhs, &rhs) < 1e-11, "{:e}", rel_mat(&lhs, &rhs));
    }

    #[test]
    fn second_variation_is_symmetric_and_bilinear(seed in any::<u64>(), a in -2.0f64..2.0, p in point()) {
        let h = poly(seed, 2, 1.0);
        let k = poly(seed ^ 0xabc, 2, 1.0);
        let hk = ricci(&PerturbedMetric::new(Euclidean, &h, &k), &p).unwrap();
        let kh = ricci(&PerturbedMetric::new(Euclidean, &k, &h), &p).unwrap();
        prop_assert!(rel_mat(&hk.order2_hk, &kh.order2_hk) < 1e-13);
        let scaled = ricci(&PerturbedMetric::new(Euclidean, Scaled(a, &h), &k), &p).unwrap();
        prop_assert!(rel_mat(&scaled.order2_hk, &tensor::scale_f64(&hk.order2_hk, a)) < 1e-13);
        let sum = ricci(&PerturbedMetric::new(Euclidean, Sum(&h, &k), &k), &p).unwrap();
        let kk = ricci(&PerturbedMetric::new(Euclidean, &k, &k), &p).unwrap();
        prop_assert!(rel_mat(&sum.order2_hk, &tensor::add(&hk.order2_hk, &kk.order2_hk)) < 1e-12);
    }

    #[test]
    fn first_order_blocks_carry_a_quarter_of_the_scalar_curvature(seed in any::<u64>(), p in point()) {
        let m = PerturbedMetric::new(Euclidean, poly(seed, 3, 1.0), ZeroField);
        let v = block_variations(&m, &p).unwrap();
        let b = &v.blocks[1];
        let tol = 1e-12 * b.scal.abs().max(1.0);
        prop_assert!((tensor::mat3_trace(&b.r_plus) - b.scal / 4.0).abs() < tol);
        prop_assert!((tensor::mat3_trace(&b.r_minus) - b.scal / 4.0).abs() < tol);
        let op = v.operator[1];
        for i in 0..6 {
            for j in 0..6 {
                prop_assert!((op[i][j] - op[j][i]).abs() < 1e-12 * b.scal.abs().max(1.0));
            }
        }
        prop_assert_eq!(v.blocks[0].scal, 0.0);
    }

    #[test]
    fn selfdual_decomposition_reconstructs(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a: Mat4<f64> = std::array::from_fn(|_| std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)));
        let h = tensor::scale_f64(&tensor::add(&a, &tensor::transpose(&a)), 0.5);
        let (lambda, phi) = selfdual_decomposition_of(&h);
        let plus = omega_matrices()[0];
        let mut back = tensor::scale_f64(&tensor::identity(), lambda);
        for i in 0..3 {
            back = tensor::add(&back, &tensor::matmul(&phi[i], &plus[i]));
        }
        prop_assert!(tensor::max_abs_diff(&back, &h) < 1e-14);
    }

    #[test]
    fn gauge_residual_equals_the_flat_bianchi_operator(seed in any::<u64>(), p in point()) {
        let h = poly(seed, 3, 1.0);
        let r = bianchi_gauge_residual(&h, &p);
        let b = bianchi(&h.eval(&coordinates::<SpatialJet1>(&p)), &tensor::identity());
        for k in 0..4 {
            prop_assert!((r[k] - b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn einstein_trace_is_minus_scalar(seed in any::<u64>(), p in point()) {
        let m = PerturbedMetric::new(Euclidean, poly(seed, 2, 1.0), poly(seed ^ 7, 2, 1.0));
        let e = einstein_tensor_variations(&m, &p).unwrap();
        let (_, s1, _, _) = scalar_variations(&m, &p).unwrap();
        prop_assert!((tensor::trace(&e.order1_h) + s1).abs() < 1e-12 * s1.abs().max(1.0));
        let t = traceless_ricci_variations(&m, &p).unwrap();
        prop_assert!(tensor::trace(&t.order1_h).abs() < 1e-12);
    }

    #[test]
    fn lie_derivative_matches_symbolic_form(seed in any::<u64>(), p in point()) {
        let mut rng = common::rng(seed);
        let h = PolyTensorField::random(&mut rng, 2);
        let x = PolyVectorField::random(&mut rng, 2);
        let jet = lie_derivative_at(&h, &x, &p);
        let sym = x.lie_derivative(&h).at(&p);
        prop_assert!(tensor::max_abs_diff(&jet, &sym) < 1e-12);
    }
}

#[test]
fn volume_and_cmc_potentials_satisfy_the_bianchi_gauge() {
    let mut rng = common::rng(11);
    for b in [common::volume_bubble(&mut rng), common::cmc_bubble(&mut rng)] {
        let h = h4_from_asymptotics(&b);
        for p in eol_core::flat_model::sample_points(3, 10, 0.5, 3.0) {
            let r = bianchi_gauge_residual(&h, &p);
            assert!(r.iter().all(|v| v.abs() < 1e-13), "{r:?}");
        }
    }
}

#[test]
fn block_basis_change_is_orthogonal() {
    let mut rng = common::rng(12);
    let block = common::symmetric(&mut rng);
    let p = [0.2, -0.9, 0.4, 1.3];
    for o in [eol_core::flat_model::Orientation::SelfDual, eol_core::flat_model::Orientation::AntiSelfDual] {
        let th = eol_core::flat_model::theta_forms(o, &p);
        let b = block_in_basis(&block, o, &th);
        assert!((tensor::mat3_trace(&b) - tensor::mat3_trace(&block)).abs() < 1e-14);
        let same = block_in_basis(&block, o, &omega_matrices()[usize::from(o == eol_core::flat_model::Orientation::AntiSelfDual)]);
        assert!(tensor::mat3_max_abs_diff(&same, &block) < 1e-15);
    }
}

#[test]
fn second_einstein_variation_is_symmetric() {
    let h = poly(5, 2, 1.0);
    let e = einstein_tensor_variations(&PerturbedMetric::new(Euclidean, &h, &h), &[0.3, 0.1, -0.4, 0.8]).unwrap();
    assert!(tensor::asymmetry(&e.order2_hk) < 1e-13);
}

#[test]
fn degenerate_background_is_an_error() {
    let m = PerturbedMetric::new(ZeroField, ZeroField, ZeroField);
    assert!(matches!(ricci(&m, &[1.0, 0.0, 0.0, 0.0]), Err(CurvatureError::DegenerateMetric(..))));
}
