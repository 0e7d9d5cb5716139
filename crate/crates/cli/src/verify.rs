//! The identity suite behind `eol verify`.
//!
//! Each check computes one residual from seeded random data and passes when
//! the residual is at most its tolerance. Checks that integrate over spheres
//! use the requested quadrature order, so an order that is too low shows up
//! as failures rather than errors.

use eol_core::curvature::{
    bianchi, bianchi_gauge_residual, block_in_basis, block_variation, divergence, einstein_tensor_variations,
    first_variation, geometry, ricci, second_variation, traceless_ricci_variations, PerturbedMetric,
};
use eol_core::deformations::{
    eguchi_hanson, eh_potential, gauge_field, h2_bianchi_gauge, h2_from_curvature, h4_from_asymptotics,
    BubbleAsymptotics, CompactVectorField, Gauge, OrbifoldPointData,
};
use eol_core::flat_model::{
    exterior_d_1, exterior_d_2, group_cyclic_z2, group_invariance_defect, hodge_star_2, hodge_star_3, killing_field,
    omega, omega_matrices, radial_field, radius_squared, sample_points, theta_forms, Euclidean, FiniteGroup,
    LinearVectorField, Orientation, Point, Scaled, Sum, SymTensorField, ZeroField,
};
use eol_core::jets::{coordinates, BiJet, SpatialJet1, SpatialJet2, SpatialJet3};
use eol_core::obstructions::{
    conformal_first, conformal_first_corrected, conformal_second, desingularization_check, flux_batch,
    killing_closed_form, radial_closed_form, ric2_exact_closed_form, ric2_fluxes, ObstructionError,
};
use eol_core::poly::{Poly4, PolyTensorField, PolyVectorField};
use eol_core::quadrature::{integrate_scalar, moment_oracle, SphereRule};
use eol_core::tensor::{self, Mat3, Mat4, Vec4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::CheckResult;
use crate::CliError;

type Outcome = Result<f64, ObstructionError>;

pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    run: fn(usize) -> Outcome,
}

const ORIENTATIONS: [Orientation; 2] = [Orientation::SelfDual, Orientation::AntiSelfDual];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn symmetric(rng: &mut impl Rng) -> Mat3 {
    let a: Mat3 = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
    tensor::mat3_scale(&tensor::mat3_add(&a, &tensor::mat3_transpose(&a)), 0.5)
}

fn traceless(rng: &mut impl Rng) -> Mat3 {
    tensor::mat3_traceless(&symmetric(rng))
}

fn orbifold(rng: &mut impl Rng, lambda: bool) -> OrbifoldPointData {
    OrbifoldPointData {
        lambda: if lambda { rng.gen_range(-3.0..3.0) } else { 0.0 },
        w_plus: traceless(rng),
        w_minus: traceless(rng),
    }
}

fn cmc_bubble(rng: &mut impl Rng) -> BubbleAsymptotics {
    BubbleAsymptotics {
        h_plus: traceless(rng),
        h_minus: traceless(rng),
        gauge: Gauge::Cmc,
    }
}

fn volume_bubble(rng: &mut impl Rng) -> BubbleAsymptotics {
    let mut h_plus = symmetric(rng);
    let h_minus = symmetric(rng);
    let shift = (tensor::mat3_trace(&h_plus) + tensor::mat3_trace(&h_minus) + rng.gen_range(0.2..1.5)) / 3.0;
    for i in 0..3 {
        h_plus[i][i] -= shift;
    }
    BubbleAsymptotics {
        h_plus,
        h_minus,
        gauge: Gauge::Volume,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn vmax(v: &Vec4<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn all_killing() -> Vec<LinearVectorField> {
    ORIENTATIONS.iter().flat_map(|&o| (0..3).map(move |i| killing_field(i, o))).collect()
}

fn with_radial() -> Vec<LinearVectorField> {
    let mut f = vec![radial_field()];
    f.extend(all_killing());
    f
}

fn unit_rule(order: usize) -> Result<SphereRule, ObstructionError> {
    Ok(SphereRule::new(1.0, order)?)
}

/// `∫ E⁽²⁾(h,k)(X, ∂_r)` over `S³(radius)` for several `X`.
fn taub_fluxes<H: SymTensorField, K: SymTensorField>(
    h: &H,
    k: &K,
    fields: &[LinearVectorField],
    radius: f64,
    order: usize,
) -> Result<Vec<f64>, ObstructionError> {
    let m = PerturbedMetric::new(Euclidean, h, k);
    let t = |p: &Point| Ok(einstein_tensor_variations(&m, p)?.order2_hk);
    flux_batch(t, fields, &SphereRule::new(radius, order)?, &FiniteGroup::trivial())
}

fn fold_max(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// jets ----------------------------------------------------------------------

fn jets_product_rule(_: usize) -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let [a, b, c, d]: [f64; 4] = std::array::from_fn(|_| r.gen_range(-3.0..3.0));
        let z = BiJet::new(a, b, 0.0, 0.0) * BiJet::new(c, 0.0, d, 0.0);
        worst = worst
            .max((z.c00 - a * c).abs())
            .max((z.c10 - b * c).abs())
            .max((z.c01 - a * d).abs())
            .max((z.c11 - b * d).abs());
    }
    Ok(worst)
}

fn jets_third_derivatives(_: usize) -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for p in sample_points(2, 10, 0.2, 1.5) {
        let f = Poly4::random(&mut r, 3);
        let j: SpatialJet3 = f.eval(&coordinates(&p));
        for a in 0..4 {
            let da = f.derivative(a);
            worst = worst.max((j.gradient[a] - da.eval(&p)).abs());
            for b in 0..4 {
                let dab = da.derivative(b);
                worst = worst.max((j.hessian[a][b] - dab.eval(&p)).abs());
                for c in 0..4 {
                    worst = worst.max((j.third[a][b][c] - dab.derivative(c).eval(&p)).abs());
                }
            }
        }
    }
    Ok(worst)
}

// flat model ----------------------------------------------------------------

fn flat_omega_orthonormality(_: usize) -> Outcome {
    let mut worst = 0.0f64;
    let all: Vec<Mat4<f64>> = omega_matrices().into_iter().flatten().collect();
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate() {
            let target = if i == j { 4.0 } else { 0.0 };
            worst = worst.max((tensor::frobenius(a, b) - target).abs());
        }
        let sign = if i < 3 { 1.0 } else { -1.0 };
        worst = worst.max(tensor::max_abs_diff(&hodge_star_2(a), &tensor::scale_f64(a, sign)));
    }
    Ok(worst)
}

fn flat_theta_frames(_: usize) -> Outcome {
    let mut worst = 0.0f64;
    for p in sample_points(3, 20, 0.3, 3.0) {
        for o in ORIENTATIONS {
            let th = theta_forms(o, &p);
            for i in 0..3 {
                let star = hodge_star_2(&th[i]);
                worst = worst.max(tensor::max_abs_diff(&star, &tensor::scale_f64(&th[i], o.sign())));
                for j in 0..3 {
                    let target = if i == j { 4.0 } else { 0.0 };
                    worst = worst.max((tensor::frobenius(&th[i], &th[j]) - target).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn flat_theta_radial_sign(_: usize) -> Outcome {
    // θᵢ⁻(x) = −ωᵢ⁺(x)
    let mut worst = 0.0f64;
    for p in sample_points(4, 20, 0.3, 3.0) {
        let th = theta_forms(Orientation::AntiSelfDual, &p);
        for i in 0..3 {
            let a = tensor::matvec(&th[i], &p);
            let b = tensor::matvec(&omega(i, Orientation::SelfDual), &p);
            worst = worst.max(vmax(&std::array::from_fn(|k| a[k] + b[k])));
        }
    }
    Ok(worst)
}

fn flat_codifferential_of_r2_theta(_: usize) -> Outcome {
    // −d*d(r²θᵢ⁻) = −12ωᵢ⁺
    let mut worst = 0.0f64;
    for p in sample_points(5, 20, 0.3, 3.0) {
        let x = coordinates::<SpatialJet2>(&p);
        let r2 = radius_squared(&x);
        let th = theta_forms(Orientation::AntiSelfDual, &x);
        for i in 0..3 {
            let dd = exterior_d_1(&hodge_star_3(&exterior_d_2(&tensor::scale(&th[i], r2))));
            let target = tensor::scale_f64(&omega(i, Orientation::SelfDual), 12.0);
            worst = worst.max(tensor::max_abs_diff(&dd, &target));
        }
    }
    Ok(worst)
}

fn flat_z2_invariance(_: usize) -> Outcome {
    let mut r = rng(6);
    let z2 = group_cyclic_z2();
    let a = group_invariance_defect(&h4_from_asymptotics(&volume_bubble(&mut r)), &z2);
    let b = group_invariance_defect(&h2_from_curvature(&orbifold(&mut r, true)), &z2);
    Ok(a.max(b))
}

// curvature -----------------------------------------------------------------

fn curvature_euclidean_flat(_: usize) -> Outcome {
    let m = PerturbedMetric::new(Euclidean, ZeroField, ZeroField);
    let mut worst = 0.0f64;
    for p in sample_points(7, 20, 0.3, 5.0) {
        worst = worst.max(tensor::max_abs(&ricci(&m, &p)?.order0));
    }
    Ok(worst)
}

fn curvature_eguchi_hanson_flat(_: usize) -> Outcome {
    let m = PerturbedMetric::new(eguchi_hanson(), ZeroField, ZeroField);
    let mut worst = 0.0f64;
    for p in sample_points(8, 30, 0.3, 5.0) {
        worst = worst.max(tensor::max_abs(&ricci(&m, &p)?.order0));
    }
    Ok(worst)
}

fn curvature_eh_potential_laplacian(_: usize) -> Outcome {
    let mut worst = 0.0f64;
    for p in sample_points(9, 30, 0.3, 5.0) {
        let g = geometry(&eguchi_hanson().eval(&coordinates::<SpatialJet2>(&p)), &p)?;
        let u = eh_potential(&p).map_err(|e| ObstructionError::InvalidInput(e.to_string()))?;
        let mut lap = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut t = u.hessian[i][j];
                for k in 0..4 {
                    t -= g.christoffel[k][i][j] * u.gradient[k];
                }
                lap += g.inverse[i][j] * t;
            }
        }
        worst = worst.max((lap - 8.0).abs());
    }
    Ok(worst)
}

fn curvature_linearized_bianchi(_: usize) -> Outcome {
    let mut r = rng(10);
    let e1: Mat4<SpatialJet1> = tensor::identity();
    let mut worst = 0.0f64;
    for n in 0..8 {
        let h = PolyTensorField::random(&mut r, 3);
        let m = PerturbedMetric::new(Euclidean, &h, ZeroField);
        for p in sample_points(100 + n, 3, 0.5, 1.5) {
            let geo = m.geometry_with_gradient(&p)?;
            worst = worst.max(vmax(&bianchi(&first_variation(&geo.ricci), &e1)));
        }
    }
    Ok(worst)
}

fn curvature_second_einstein_divergence(_: usize) -> Outcome {
    // δ_e E⁽²⁾(h,h) = −Λ δ_e h when Ric⁽¹⁾(h) = Λe
    let mut r = rng(11);
    let e1: Mat4<SpatialJet1> = tensor::identity();
    let mut worst = 0.0f64;
    for n in 0..6 {
        let data = orbifold(&mut r, true);
        let h = Sum(h2_from_curvature(&data), gauge_field(PolyVectorField::random(&mut r, 3)));
        let m = PerturbedMetric::new(Euclidean, &h, &h);
        for p in sample_points(200 + n, 3, 0.5, 1.5) {
            let geo = m.geometry_with_gradient(&p)?;
            let div = divergence(&second_variation(&geo.einstein()), &e1);
            let dh = divergence(&h.eval(&coordinates::<SpatialJet1>(&p)), &e1);
            worst = worst.max(vmax(&std::array::from_fn(|k| div[k] + data.lambda * dh[k])));
        }
    }
    Ok(worst)
}

fn nonlinear_ricci<G: SymTensorField>(g: G, p: &Point) -> Result<Mat4<f64>, ObstructionError> {
    Ok(ricci(&PerturbedMetric::new(g, ZeroField, ZeroField), p)?.order0)
}

/// Relative errors of `Ric⁽¹⁾` and `Ric⁽²⁾` against central differences.
fn fd_errors(second: bool) -> Outcome {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for (n, p) in sample_points(12, 8, 0.6, 1.5).iter().enumerate() {
        let h = PolyTensorField::random(&mut r, 2).scale(0.3);
        let k = PolyTensorField::random(&mut r, 2).scale(0.3);
        let err = if n % 2 == 0 {
            fd_case(Euclidean, &h, &k, p, second)?
        } else {
            fd_case(eguchi_hanson(), &h, &k, p, second)?
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

fn fd_case<G: SymTensorField + Copy>(
    bg: G,
    h: &PolyTensorField,
    k: &PolyTensorField,
    p: &Point,
    second: bool,
) -> Outcome {
    let exact = ricci(&PerturbedMetric::new(bg, h, k), p)?;
    if !second {
        let e = 1e-4;
        let plus = nonlinear_ricci(Sum(bg, Scaled(e, h)), p)?;
        let minus = nonlinear_ricci(Sum(bg, Scaled(-e, h)), p)?;
        let fd = tensor::scale_f64(&tensor::sub(&plus, &minus), 0.5 / e);
        return Ok(tensor::max_abs_diff(&fd, &exact.order1_h) / tensor::max_abs(&exact.order1_h).max(1e-3));
    }
    let e = 1e-3;
    let corner = |a: f64, b: f64| nonlinear_ricci(Sum(Sum(bg, Scaled(a * e, h)), Scaled(b * e, k)), p);
    let mixed = tensor::sub(
        &tensor::add(&corner(1.0, 1.0)?, &corner(-1.0, -1.0)?),
        &tensor::add(&corner(1.0, -1.0)?, &corner(-1.0, 1.0)?),
    );
    // the second variation is half the mixed derivative
    let fd = tensor::scale_f64(&mixed, 0.5 / (4.0 * e * e));
    Ok(tensor::max_abs_diff(&fd, &exact.order2_hk) / tensor::max_abs(&exact.order2_hk).max(1e-3))
}

fn curvature_first_variation_fd(_: usize) -> Outcome {
    fd_errors(false)
}

fn curvature_second_variation_fd(_: usize) -> Outcome {
    fd_errors(true)
}

/// `r⁶R^{∓,(1)}` of the `h^±` part of `H⁴` in the frame `θ^∓(p)`.
fn scaled_block(b: &BubbleAsymptotics, sigma: Orientation, p: &Point) -> Result<Mat3, ObstructionError> {
    let m = PerturbedMetric::new(Euclidean, h4_from_asymptotics(b), ZeroField);
    let (rp, rm) = block_variation(&m, p)?;
    let out = sigma.opposite();
    let block = if sigma == Orientation::SelfDual { rm } else { rp };
    Ok(tensor::mat3_scale(&block_in_basis(&block, out, &theta_forms(out, p)), radius_squared(p).powi(3)))
}

fn curvature_eh_block(_: usize) -> Outcome {
    let target: Mat3 = [[8.0, 0.0, 0.0], [0.0, -4.0, 0.0], [0.0, 0.0, -4.0]];
    let mut worst = 0.0f64;
    for p in sample_points(13, 8, 0.7, 3.0) {
        let b = scaled_block(&BubbleAsymptotics::eguchi_hanson(), Orientation::SelfDual, &p)?;
        worst = worst.max(tensor::mat3_max_abs_diff(&b, &target));
    }
    Ok(worst)
}

fn curvature_traceless_block_law(_: usize) -> Outcome {
    // r⁶R^{∓,(1)} = −24 ḣ^± for CMC data
    let mut r = rng(14);
    let z = tensor::mat3_zero();
    let mut worst = 0.0f64;
    for (n, p) in sample_points(14, 8, 0.7, 3.0).iter().enumerate() {
        let sigma = ORIENTATIONS[n % 2];
        let h = traceless(&mut r);
        let b = match sigma {
            Orientation::SelfDual => BubbleAsymptotics { h_plus: h, h_minus: z, gauge: Gauge::Cmc },
            Orientation::AntiSelfDual => BubbleAsymptotics { h_plus: z, h_minus: h, gauge: Gauge::Cmc },
        };
        let got = scaled_block(&b, sigma, p)?;
        worst = worst.max(tensor::mat3_max_abs_diff(&got, &tensor::mat3_scale(&h, -24.0)));
    }
    Ok(worst)
}

fn curvature_orbifold_blocks(_: usize) -> Outcome {
    // R^{±,(1)}(H₂) = Λ/3·Id + W^±
    let mut r = rng(15);
    let mut worst = 0.0f64;
    for p in sample_points(15, 6, 0.3, 2.0) {
        let o = orbifold(&mut r, true);
        let (rp, rm) = block_variation(&PerturbedMetric::new(Euclidean, h2_from_curvature(&o), ZeroField), &p)?;
        worst = worst
            .max(tensor::mat3_max_abs_diff(&rp, &o.curvature_block(Orientation::SelfDual)))
            .max(tensor::mat3_max_abs_diff(&rm, &o.curvature_block(Orientation::AntiSelfDual)));
    }
    Ok(worst)
}

// quadrature ----------------------------------------------------------------

fn quadrature_moments(order: usize) -> Outcome {
    let rule = SphereRule::new(1.0, order)?;
    let g = FiniteGroup::trivial();
    let mut worst = 0.0f64;
    for a in 0..=8u32 {
        for b in 0..=(8 - a) {
            for c in 0..=(8 - a - b) {
                for d in 0..=(8 - a - b - c) {
                    let e = [a, b, c, d];
                    let f = |p: &Point| (0..4).map(|k| p[k].powi(e[k] as i32)).product::<f64>();
                    worst = worst.max((integrate_scalar(f, &rule, &g)? - moment_oracle(e)).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn quadrature_quotient_volume(order: usize) -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let rule = SphereRule::new(1.5, order)?;
        let v = integrate_scalar(|_| 1.0, &rule, &FiniteGroup::cyclic(k).map_err(|e| ObstructionError::InvalidInput(e.to_string()))?)?;
        worst = worst.max(rel(v, 2.0 * std::f64::consts::PI.powi(2) * 1.5f64.powi(3) / k as f64));
    }
    Ok(worst)
}

// deformations --------------------------------------------------------------

fn deformations_eh_decay(_: usize) -> Outcome {
    // EH − e − H⁴ = O(r⁻⁸): deviation of the fitted exponent from −8
    let h4 = h4_from_asymptotics(&BubbleAsymptotics::eguchi_hanson());
    let dir = [0.3, -0.5, 0.7, 0.4];
    let n = tensor::dot(&dir, &dir).sqrt();
    let rem = |r: f64| {
        let p = dir.map(|v| v * r / n);
        tensor::max_abs(&tensor::sub(&tensor::sub(&eguchi_hanson().at(&p), &tensor::identity()), &h4.at(&p)))
    };
    let (a, b, c) = (rem(4.0), rem(8.0), rem(16.0));
    Ok(((b / a).log2() + 8.0).abs().max(((c / b).log2() + 8.0).abs()))
}

fn deformations_h4_gauge(_: usize) -> Outcome {
    let mut r = rng(16);
    let mut worst = 0.0f64;
    for b in [volume_bubble(&mut r), cmc_bubble(&mut r)] {
        let h = h4_from_asymptotics(&b);
        for p in sample_points(16, 10, 0.5, 3.0) {
            worst = worst.max(vmax(&bianchi_gauge_residual(&h, &p)));
        }
    }
    Ok(worst)
}

fn deformations_h2_gauge(_: usize) -> Outcome {
    let mut r = rng(17);
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let h = h2_bianchi_gauge(&orbifold(&mut r, true));
        for p in sample_points(17, 6, 0.3, 2.0) {
            worst = worst.max(vmax(&bianchi_gauge_residual(&h, &p)));
        }
    }
    Ok(worst)
}

// taub ----------------------------------------------------------------------

fn radius_spread<H: SymTensorField, K: SymTensorField>(h: &H, k: &K, order: usize) -> Outcome {
    let fields = all_killing();
    let v: Vec<Vec<f64>> = [0.8, 1.0, 1.25]
        .iter()
        .map(|&r| taub_fluxes(h, k, &fields, r, order))
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for i in 0..fields.len() {
        worst = worst.max(rel(v[0][i], v[1][i])).max(rel(v[1][i], v[2][i]));
    }
    Ok(worst)
}

fn taub_bubble_radius(order: usize) -> Outcome {
    let h = h4_from_asymptotics(&volume_bubble(&mut rng(18)));
    radius_spread(&h, &h, order)
}

fn taub_orbifold_radius(order: usize) -> Outcome {
    let h = h2_from_curvature(&orbifold(&mut rng(19), false));
    radius_spread(&h, &h, order)
}

fn taub_mixed_radius(order: usize) -> Outcome {
    let mut r = rng(20);
    let h4 = h4_from_asymptotics(&volume_bubble(&mut r));
    let h2 = h2_from_curvature(&orbifold(&mut r, true));
    radius_spread(&h4, &h2, order)
}

fn taub_gauge_invariance(order: usize) -> Outcome {
    let mut r = rng(21);
    let mix = Sum(h4_from_asymptotics(&cmc_bubble(&mut r)), h2_from_curvature(&orbifold(&mut r, false)));
    let y = CompactVectorField {
        profile: PolyVectorField::random(&mut r, 2),
        s0: 1.3f64.powi(2),
        s1: 1.45f64.powi(2),
    };
    let gauged = Sum(&mix, gauge_field(y));
    let fields = all_killing();
    let a = taub_fluxes(&gauged, &gauged, &fields, 1.0, order)?;
    let b = taub_fluxes(&mix, &mix, &fields, 1.0, order)?;
    Ok(a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max(rel(*x, *y))))
}

fn taub_selfdual_vanishing(order: usize) -> Outcome {
    let mut r = rng(22);
    let z = tensor::mat3_zero();
    let mut worst = 0.0f64;
    for b in [
        BubbleAsymptotics { h_plus: traceless(&mut r), h_minus: z, gauge: Gauge::Cmc },
        BubbleAsymptotics { h_minus: z, ..volume_bubble(&mut r) },
    ] {
        let h = h4_from_asymptotics(&b);
        worst = worst.max(fold_max(&taub_fluxes(&h, &h, &all_killing(), 1.0, order)?));
    }
    Ok(worst)
}

// conformal -----------------------------------------------------------------

fn conformal_first_identity(order: usize) -> Outcome {
    let mut r = rng(23);
    let rule = unit_rule(order)?;
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let h = h2_from_curvature(&orbifold(&mut r, true));
        worst = worst.max(conformal_first_corrected(&h, &rule, &FiniteGroup::trivial())?.abs());
    }
    Ok(worst)
}

fn conformal_first_bare(order: usize) -> Outcome {
    let mut r = rng(24);
    let rule = unit_rule(order)?;
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let h = h2_from_curvature(&orbifold(&mut r, false));
        worst = worst.max(conformal_first(&h, &rule, &FiniteGroup::trivial())?.abs());
    }
    Ok(worst)
}

fn conformal_second_selfdual(order: usize) -> Outcome {
    let mut r = rng(25);
    let rule = unit_rule(order)?;
    let z = tensor::mat3_zero();
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let h = h4_from_asymptotics(&BubbleAsymptotics { h_plus: traceless(&mut r), h_minus: z, gauge: Gauge::Cmc });
        worst = worst.max(conformal_second(&h, &rule, &FiniteGroup::trivial())?.total.abs());
    }
    Ok(worst)
}

// ric2 ----------------------------------------------------------------------

fn ric2_pointwise_law(_: usize) -> Outcome {
    let mut r = rng(26);
    let z = tensor::mat3_zero();
    let mut worst = 0.0f64;
    for n in 0..6 {
        let sigma = ORIENTATIONS[n % 2];
        let h: Mat3 = std::array::from_fn(|_| std::array::from_fn(|_| r.gen_range(-1.0..1.0)));
        let mut data = orbifold(&mut r, true);
        let b = match sigma {
            Orientation::SelfDual => {
                data.w_minus = z;
                BubbleAsymptotics { h_plus: h, h_minus: z, gauge: Gauge::Cmc }
            }
            Orientation::AntiSelfDual => {
                data.w_plus = z;
                BubbleAsymptotics { h_plus: z, h_minus: h, gauge: Gauge::Cmc }
            }
        };
        let m = PerturbedMetric::new(Euclidean, h4_from_asymptotics(&b), h2_from_curvature(&data));
        for p in sample_points(260 + n as u64, 3, 0.6, 2.0) {
            let jet = traceless_ricci_variations(&m, &p)?.order2_hk;
            let cf = ric2_exact_closed_form(&h, sigma, &data, &p);
            worst = worst.max(tensor::max_abs_diff(&jet, &cf) / tensor::max_abs(&jet).max(1.0));
        }
    }
    Ok(worst)
}

/// Largest deviations of the radial and Killing fluxes from their closed forms.
fn ric2_flux_errors(order: usize) -> Result<(f64, f64), ObstructionError> {
    let mut r = rng(27);
    let g = FiniteGroup::trivial();
    let rule = unit_rule(order)?;
    let fields = with_radial();
    let (mut wr, mut wk) = (0.0f64, 0.0f64);
    for n in 0..4 {
        let o = orbifold(&mut r, true);
        let b = if n % 2 == 0 { cmc_bubble(&mut r) } else { volume_bubble(&mut r) };
        let v = ric2_fluxes(&h4_from_asymptotics(&b), &h2_from_curvature(&o), &fields, &rule, &g)?;
        wr = wr.max(rel(v[0], radial_closed_form(&o, &b, &g)));
        for (m, value) in v[1..].iter().enumerate() {
            wk = wk.max(rel(*value, killing_closed_form(&o, &b, m % 3, ORIENTATIONS[m / 3], &g)));
        }
    }
    Ok((wr, wk))
}

fn ric2_radial_flux(order: usize) -> Outcome {
    Ok(ric2_flux_errors(order)?.0)
}

fn ric2_killing_flux(order: usize) -> Outcome {
    Ok(ric2_flux_errors(order)?.1)
}

fn ric2_cmc_pairs(order: usize) -> Outcome {
    let mut r = rng(28);
    let z = tensor::mat3_zero();
    let rule = unit_rule(order)?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let hp = h4_from_asymptotics(&BubbleAsymptotics { h_plus: traceless(&mut r), h_minus: z, gauge: Gauge::Cmc });
        let hm = h4_from_asymptotics(&BubbleAsymptotics { h_plus: z, h_minus: traceless(&mut r), gauge: Gauge::Cmc });
        worst = worst.max(fold_max(&ric2_fluxes(&hp, &hm, &with_radial(), &rule, &FiniteGroup::trivial())?));
    }
    Ok(worst)
}

// obstructions --------------------------------------------------------------

fn obstruction_spherical_negative(order: usize) -> Outcome {
    // residual is the largest radial value clipped at zero
    let mut r = rng(29);
    let g = FiniteGroup::cyclic(2).map_err(|e| ObstructionError::InvalidInput(e.to_string()))?;
    let mut worst = f64::NEG_INFINITY;
    for b in [BubbleAsymptotics::eguchi_hanson(), volume_bubble(&mut r), volume_bubble(&mut r)] {
        let rep = desingularization_check(&OrbifoldPointData::spherical(), &b, &g, 1e-8, order)?;
        worst = worst.max(rep.radial);
    }
    Ok(worst.max(0.0))
}

fn obstruction_hyperkahler(order: usize) -> Outcome {
    let mut r = rng(30);
    let o = OrbifoldPointData {
        lambda: 0.0,
        w_plus: tensor::mat3_zero(),
        w_minus: traceless(&mut r),
    };
    let b = BubbleAsymptotics::kronheimer([&[1.0, 0.5], &[0.0, 1.0], &[0.3, -0.2]]);
    let g = FiniteGroup::cyclic(2).map_err(|e| ObstructionError::InvalidInput(e.to_string()))?;
    Ok(desingularization_check(&o, &b, &g, 1e-8, order)?.max_value())
}

fn obstruction_refinement(order: usize) -> Outcome {
    let mut r = rng(31);
    let (o, b) = (orbifold(&mut r, true), volume_bubble(&mut r));
    let g = FiniteGroup::trivial();
    let lo = desingularization_check(&o, &b, &g, 1e-8, order)?;
    let hi = desingularization_check(&o, &b, &g, 1e-8, 2 * order)?;
    let values = |rep: &eol_core::obstructions::ObstructionReport| {
        let mut v = vec![rep.radial];
        v.extend(rep.killing_plus.iter().chain(&rep.killing_minus).flatten());
        v
    };
    Ok(values(&lo).iter().zip(&values(&hi)).fold(0.0f64, |m, (x, y)| m.max(rel(*x, *y))))
}

pub fn suite() -> Vec<Check> {
    macro_rules! check {
        ($name:literal, $tol:expr, $f:ident) => {
            Check { name: $name, tolerance: $tol, run: $f }
        };
    }
    vec![
        check!("jets.bijet_product_rule", 1e-15, jets_product_rule),
        check!("jets.third_order_derivatives", 1e-11, jets_third_derivatives),
        check!("flat.omega_orthonormal_and_dual", 1e-15, flat_omega_orthonormality),
        check!("flat.theta_frames_orthonormal_and_dual", 1e-12, flat_theta_frames),
        check!("flat.theta_minus_on_radius", 1e-12, flat_theta_radial_sign),
        check!("flat.codifferential_of_r2_theta", 1e-10, flat_codifferential_of_r2_theta),
        check!("flat.z2_invariance_of_h2_h4", 1e-12, flat_z2_invariance),
        check!("curvature.euclidean_ricci_flat", 0.0, curvature_euclidean_flat),
        check!("curvature.eguchi_hanson_ricci_flat", 1e-9, curvature_eguchi_hanson_flat),
        check!("curvature.eguchi_hanson_potential_laplacian", 1e-9, curvature_eh_potential_laplacian),
        check!("curvature.linearized_bianchi", 1e-10, curvature_linearized_bianchi),
        check!("curvature.second_einstein_divergence", 1e-9, curvature_second_einstein_divergence),
        check!("curvature.first_variation_vs_differences", 1e-5, curvature_first_variation_fd),
        check!("curvature.second_variation_vs_differences", 1e-5, curvature_second_variation_fd),
        check!("curvature.eguchi_hanson_block", 1e-9, curvature_eh_block),
        check!("curvature.traceless_bubble_block", 1e-9, curvature_traceless_block_law),
        check!("curvature.orbifold_blocks", 1e-10, curvature_orbifold_blocks),
        check!("quadrature.moments_up_to_degree_8", 1e-12, quadrature_moments),
        check!("quadrature.quotient_volume", 1e-13, quadrature_quotient_volume),
        check!("deformations.eguchi_hanson_decay_rate", 0.5, deformations_eh_decay),
        check!("deformations.h4_bianchi_gauge", 1e-12, deformations_h4_gauge),
        check!("deformations.h2_bianchi_gauge", 1e-11, deformations_h2_gauge),
        check!("taub.bubble_radius_invariance", 1e-9, taub_bubble_radius),
        check!("taub.orbifold_radius_invariance", 1e-9, taub_orbifold_radius),
        check!("taub.mixed_radius_invariance", 1e-9, taub_mixed_radius),
        check!("taub.compact_gauge_invariance", 1e-9, taub_gauge_invariance),
        check!("taub.selfdual_bubble_vanishes", 1e-9, taub_selfdual_vanishing),
        check!("conformal.first_corrected_identity", 1e-9, conformal_first_identity),
        check!("conformal.first_bare_weyl_only", 1e-10, conformal_first_bare),
        check!("conformal.second_selfdual_bubble", 1e-9, conformal_second_selfdual),
        check!("ric2.pointwise_closed_form", 1e-9, ric2_pointwise_law),
        check!("ric2.radial_flux_closed_form", 1e-9, ric2_radial_flux),
        check!("ric2.killing_flux_closed_form", 1e-9, ric2_killing_flux),
        check!("ric2.cmc_pair_vanishes", 1e-9, ric2_cmc_pairs),
        check!("obstruction.spherical_radial_negative", 0.0, obstruction_spherical_negative),
        check!("obstruction.hyperkahler_unobstructed", 1e-10, obstruction_hyperkahler),
        check!("obstruction.order_refinement", 1e-10, obstruction_refinement),
    ]
}

/// Runs the checks whose names contain `filter`, one thread per check, and
/// returns results in suite order.
pub fn run(filter: Option<&str>, order: usize) -> Result<Vec<CheckResult>, CliError> {
    let selected: Vec<Check> = suite()
        .into_iter()
        .filter(|c| filter.is_none_or(|f| c.name.contains(f)))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Input(format!("filter: no check matches {:?}", filter.unwrap_or_default())));
    }
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = selected.iter().map(|c| s.spawn(move || (c.run)(order))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(ObstructionError::InvalidInput("check panicked".into()))))
            .collect()
    });
    selected
        .iter()
        .zip(outcomes)
        .map(|(c, o)| {
            let residual = o.map_err(|e| CliError::Internal(format!("{}: {e}", c.name)))?;
            Ok(CheckResult {
                name: c.name.into(),
                residual,
                tolerance: c.tolerance,
                passed: residual <= c.tolerance,
            })
        })
        .collect()
}
