use approx::assert_relative_eq;
use num_complex::Complex64;
use pointspec::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_c<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn one_point_sample<R: Rng>(ext: &OnePointExtension, rng: &mut R) -> OnePointBoundaryData {
    match *ext {
        OnePointExtension::Delta { c } => {
            let y = random_c(rng);
            let dy = random_c(rng);
            OnePointBoundaryData {
                y_minus: y,
                y_plus: y,
                dy_minus: dy,
                dy_plus: dy + y * c,
            }
        }
        OnePointExtension::DeltaPrime { .. } => {
            let a = ext.value_from_derivative().unwrap();
            let (dm, dp) = (random_c(rng), random_c(rng));
            OnePointBoundaryData {
                y_minus: dm * a[0][0] + dp * a[0][1],
                y_plus: dm * a[1][0] + dp * a[1][1],
                dy_minus: dm,
                dy_plus: dp,
            }
        }
    }
}

#[test]
fn boundary_form_vanishes_across_the_default_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    for (alpha, beta, h) in default_sweep() {
        let ext = build_two_point(alpha, beta, h).unwrap();
        for _ in 0..100 {
            let y = ext.sample_interface_data(&mut rng);
            let z = ext.sample_interface_data(&mut rng);
            assert!(ext.satisfies_interface(&y, INTERFACE_TOL));
            let scale = y.max_abs().max(1.0) * z.max_abs().max(1.0);
            worst = worst.max(boundary_form_two_point(&y, &z).norm() / scale);
        }
    }
    assert!(worst < 1e-12, "worst boundary form {worst:e}");
}

#[test]
fn boundary_form_vanishes_for_one_point_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut kinds = vec![OnePointExtension::delta(-2.0).unwrap(), OnePointExtension::delta(1.5).unwrap()];
    for a in [0.5, 1.0, 2.0, 4.0] {
        for b in [0.5, 1.0, 2.0, 4.0] {
            kinds.push(OnePointExtension::delta_prime(a, b).unwrap());
        }
    }
    for ext in kinds {
        for _ in 0..100 {
            let y = one_point_sample(&ext, &mut rng);
            let z = one_point_sample(&ext, &mut rng);
            assert!(ext.satisfies_conditions(&y, INTERFACE_TOL));
            let scale = y.max_abs().max(1.0) * z.max_abs().max(1.0);
            assert!(boundary_form_one_point(&y, &z).norm() < 1e-12 * scale, "{ext:?}");
        }
    }
}

#[test]
fn non_symmetric_coupling_breaks_the_boundary_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b = CouplingMatrix { b11: -1.0, b12: 0.3, b21: -0.2, b22: -1.0 };
    assert!(CouplingMatrix::new(-1.0, 0.3, -0.2, -1.0).is_err());
    let mut max = 0.0f64;
    for _ in 0..20 {
        let mut sample = || {
            let d = [random_c(&mut rng), random_c(&mut rng)];
            let outer = [random_c(&mut rng), random_c(&mut rng)];
            let j = b.apply(d);
            BoundaryData {
                y_left_minus: outer[0],
                y_left_plus: outer[0] + j[0],
                y_right_minus: outer[1],
                y_right_plus: outer[1] + j[1],
                dy_left_minus: d[0],
                dy_left_plus: d[0],
                dy_right_minus: d[1],
                dy_right_plus: d[1],
            }
        };
        let (y, z) = (sample(), sample());
        max = max.max(boundary_form_two_point(&y, &z).norm());
    }
    assert!(max > 1e-3);
}

#[test]
fn entanglement_ratio_follows_the_closed_form() {
    for alpha in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for h in [0.1, 0.5, 1.0, 3.0] {
            let ext = build_two_point(alpha, alpha, h).unwrap();
            let r = ext.entanglement_ratio().unwrap();
            assert_relative_eq!(r, -(-2.0 * alpha * h).exp(), max_relative = 1e-13);
        }
    }
    let far = build_two_point(50.0, 50.0, 1.0).unwrap().entanglement_ratio().unwrap();
    assert!(far.abs() < 1e-40);
    let near = build_two_point(1e-6, 1e-6, 1.0).unwrap().entanglement_ratio().unwrap();
    assert!((near + 1.0).abs() < 1e-5);
}

#[test]
fn coupling_entries_match_frozen_values() {
    // independent 40-digit evaluation
    let b = *build_two_point(1.0, 1.0, 0.5).unwrap().coupling();
    assert_relative_eq!(b.b11, -2.313_035_285_499_331_3, max_relative = 1e-14);
    assert_relative_eq!(b.b12, 0.850_918_128_239_321_5, max_relative = 1e-14);
    assert!(b.is_parity_symmetric());
    assert_relative_eq!(local_beta_for(2.0, 0.5).unwrap(), 1.382_378_892_510_099_7, max_relative = 1e-14);
}

#[test]
fn local_beta_makes_the_coupling_local() {
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        for h in [0.1, 0.5, 1.0] {
            let beta = local_beta_for(alpha, h).unwrap();
            assert!(beta > 0.0 && beta < alpha);
            let residual = beta * (1.0 + (-2.0 * beta * h).exp()) - alpha * -(-2.0 * alpha * h).exp_m1();
            assert!(residual.abs() < 1e-12);
            let ext = build_two_point(alpha, beta, h).unwrap();
            assert!(ext.is_local(LOCALITY_TOL));
        }
    }
    assert!(!build_two_point(2.0, 1.0, 0.5).unwrap().is_local(LOCALITY_TOL));
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(build_two_point(0.0, 1.0, 0.5).is_err());
    assert!(build_two_point(1.0, -1.0, 0.5).is_err());
    assert!(build_two_point(1.0, 1.0, f64::NAN).is_err());
    assert!(local_beta_for(-1.0, 0.5).is_err());
    assert!(OnePointExtension::delta(f64::INFINITY).is_err());
    assert!(OnePointExtension::delta_prime(1.0, 0.0).is_err());
}

#[test]
fn equal_rates_decouple_the_half_lines() {
    let ext = OnePointExtension::delta_prime(1.5, 1.5).unwrap();
    assert!(ext.is_decoupled().unwrap());
    let a = ext.value_from_derivative().unwrap();
    assert_eq!(a[0][1], 0.0);
    assert_eq!(a[1][0], 0.0);
    assert!(!OnePointExtension::delta_prime(1.0, 2.0).unwrap().is_decoupled().unwrap());
}

proptest! {
    #[test]
    fn built_couplings_are_symmetric_and_parity_invariant(
        alpha in 0.05f64..20.0, beta in 0.05f64..20.0, h in 0.01f64..5.0
    ) {
        let b = *build_two_point(alpha, beta, h).unwrap().coupling();
        prop_assert_eq!(b.b12, b.b21);
        prop_assert!(b.is_parity_symmetric());
        prop_assert!(b.b11 < 0.0);
    }

    #[test]
    fn local_beta_increases_with_alpha(alpha in 0.05f64..10.0, step in 0.01f64..2.0, h in 0.05f64..3.0) {
        let lo = local_beta_for(alpha, h).unwrap();
        let hi = local_beta_for(alpha + step, h).unwrap();
        prop_assert!(hi > lo);
        // the gap α - β is of order α e^{-2αh} and vanishes in double precision
        prop_assert!(lo <= alpha);
        if alpha * h < 10.0 {
            prop_assert!(lo < alpha);
        }
    }

    #[test]
    fn decoupling_holds_exactly_when_rates_agree(alpha in 0.1f64..10.0, delta in 1e-6f64..1.0) {
        prop_assert!(OnePointExtension::delta_prime(alpha, alpha).unwrap().is_decoupled().unwrap());
        let ext = OnePointExtension::delta_prime(alpha, alpha * (1.0 + delta)).unwrap();
        prop_assert!(!ext.is_decoupled().unwrap());
    }
}
