mod common;

use isopar::curvature::{einstein_defect, willmore_residuals};
use isopar::homogeneous::{
    act, adjoint_orbit_sample, closed_form_subspace, haar_matrix, reference_point, reference_shape,
    verify_reference_p_forms, SkewCase, SkewCoordinates,
};
use isopar::linalg::{compress, sym_eigenvalues};
use isopar::quartic::{focal_frame, second_fundamental_form, verify_cartan_munzner, FocalSign};
use isopar::random::{gaussian_vector, seeded, unit_vector};
use nalgebra::{Complex, DVector};
use proptest::prelude::*;

const CASES: [SkewCase; 2] = [SkewCase::Real, SkewCase::Complex];
const SIGNS: [FocalSign; 2] = [FocalSign::Plus, FocalSign::Minus];

/// `(3/4)(Trace Z Z̄)^2 - 2 Trace (Z Z̄)^2` with complex matrices.
fn trace_form(case: SkewCase, flat: &DVector<f64>) -> f64 {
    let z = SkewCoordinates::new(case).to_matrix(flat).unwrap();
    let w = &z * z.map(|c| c.conj());
    let t: Complex<f64> = w.trace();
    let t2: Complex<f64> = (&w * &w).trace();
    0.75 * t.re * t.re - 2.0 * t2.re
}

/// Row form of the real quartic: `-5/4 Σ|Z_i|^4 + 3/2 Σ_{i<j} |Z_i|^2 |Z_j|^2 - 4 Σ_{i<j} <Z_i, Z_j>^2`.
fn row_form(flat: &DVector<f64>) -> f64 {
    let z = SkewCoordinates::new(SkewCase::Real).realify(flat).unwrap();
    let rows: Vec<DVector<f64>> = (0..5).map(|i| z.row(i).transpose()).collect();
    let mut acc = 0.0;
    for i in 0..5 {
        acc -= 1.25 * rows[i].norm_squared().powi(2);
        for j in i + 1..5 {
            acc += 1.5 * rows[i].norm_squared() * rows[j].norm_squared();
            acc -= 4.0 * rows[i].dot(&rows[j]).powi(2);
        }
    }
    acc
}

#[test]
fn real_polynomial_matches_both_closed_forms() {
    let f = SkewCase::Real.polynomial::<f64>();
    let mut rng = seeded(1);
    for _ in 0..100 {
        let x: DVector<f64> = gaussian_vector(&mut rng, 10);
        let v = f.evaluate(&x).unwrap();
        let scale = 1.0 + v.abs();
        assert!((v - trace_form(SkewCase::Real, &x)).abs() < 1e-12 * scale);
        assert!((v - row_form(&x)).abs() < 1e-12 * scale);
    }
}

#[test]
fn complex_polynomial_matches_the_trace_form() {
    let f = SkewCase::Complex.polynomial::<f64>();
    let mut rng = seeded(2);
    for _ in 0..100 {
        let x: DVector<f64> = gaussian_vector(&mut rng, 20);
        let v = f.evaluate(&x).unwrap();
        assert!((v - trace_form(SkewCase::Complex, &x)).abs() < 1e-12 * (1.0 + v.abs()));
    }
}

#[test]
fn reference_points_have_the_stated_values() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e: DVector<f64> = reference_point(SkewCase::Real, FocalSign::Minus);
    assert_eq!(e[0], 1.0);
    assert_eq!(e.norm(), 1.0);
    let ep: DVector<f64> = reference_point(SkewCase::Real, FocalSign::Plus);
    assert!((ep[0] - h).abs() < 1e-16 && (ep[7] - h).abs() < 1e-16);
    for case in CASES {
        let f = case.polynomial::<f64>();
        assert!((f.evaluate(&reference_point(case, FocalSign::Plus)).unwrap() - 1.0).abs() < 1e-14);
        assert!(
            (f.evaluate(&reference_point(case, FocalSign::Minus))
                .unwrap()
                + 1.0)
                .abs()
                < 1e-14
        );
    }
}

#[test]
fn complex_case_has_multiplicities_four_and_five() {
    let f = SkewCase::Complex.polynomial::<f64>();
    let r = verify_cartan_munzner(&f, 4, 5, 100, 1e-8, &mut seeded(3)).unwrap();
    assert!(r.pass, "{r:?}");
    let mut rng = seeded(4);
    for _ in 0..20 {
        let x: DVector<f64> = gaussian_vector(&mut rng, 20);
        let expected = 8.0 * x.norm_squared();
        assert!((f.laplacian(&x).unwrap() - expected).abs() < 1e-8 * expected);
    }
}

#[test]
fn frame_dimensions_at_reference_points() {
    let expected = [
        (SkewCase::Real, FocalSign::Plus, (6, 3)),
        (SkewCase::Real, FocalSign::Minus, (6, 3)),
        (SkewCase::Complex, FocalSign::Plus, (14, 5)),
        (SkewCase::Complex, FocalSign::Minus, (13, 6)),
    ];
    for (case, sign, dims) in expected {
        let (frame, shape) = reference_shape::<f64>(case, sign).unwrap();
        assert_eq!(
            (frame.dim_tangent(), frame.dim_normal()),
            dims,
            "{case} {sign:?}"
        );
        assert_eq!(shape.len(), dims.1);
        assert!(shape.max_abs_trace() < 1e-8);
    }
}

#[test]
fn explicit_quadratics_are_reproduced() {
    for case in CASES {
        for sign in SIGNS {
            let r = verify_reference_p_forms::<f64>(case, sign).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}

#[test]
fn real_minus_is_einstein_and_real_plus_is_not() {
    let (_, minus) = reference_shape::<f64>(SkewCase::Real, FocalSign::Minus).unwrap();
    let e = einstein_defect(&minus);
    assert!(e.defect < 1e-9);
    assert!((e.mean - 2.0).abs() < 1e-9);
    let (_, plus) = reference_shape::<f64>(SkewCase::Real, FocalSign::Plus).unwrap();
    let e = einstein_defect(&plus);
    let want = [0.0, 0.0, 3.0, 3.0, 3.0, 3.0];
    for (a, b) in e.eigenvalues.iter().zip(want) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((e.mean - 2.0).abs() < 1e-9);
    assert!((e.defect - 2.0).abs() < 1e-9);
}

#[test]
fn complex_plus_square_sum_on_x_directions() {
    let (frame, shape) = reference_shape::<f64>(SkewCase::Complex, FocalSign::Plus).unwrap();
    let (dirs, expected) = closed_form_subspace::<f64>(SkewCase::Complex, FocalSign::Plus);
    let local = frame.tangent().tr_mul(&dirs);
    let restricted = compress(&shape.square_sum(), &local);
    assert!(common::max_abs(&(&restricted - &expected)) < 1e-9);
    let vals = sym_eigenvalues(&restricted);
    assert!(vals[vals.len() - 1] - vals[0] >= 2.0 - 1e-9);
    assert!(einstein_defect(&shape).defect >= 0.5);
}

#[test]
fn complex_minus_has_a_flat_direction_and_a_curved_one() {
    let (frame, shape) = reference_shape::<f64>(SkewCase::Complex, FocalSign::Minus).unwrap();
    let mut y12 = DVector::zeros(20);
    y12[10] = 1.0;
    let c = frame.tangent().tr_mul(&y12);
    assert!((c.norm() - 1.0).abs() < 1e-12, "Y12 is tangent");
    assert!((shape.square_sum() * &c).norm() < 1e-10);
    let r = verify_reference_p_forms::<f64>(SkewCase::Complex, FocalSign::Minus).unwrap();
    assert!(r.max_square_sum > 0.5);
    let v = DVector::from_vec(r.max_direction.clone());
    let cv = frame.tangent().tr_mul(&v);
    assert!((shape.square_sum_at(&cv) - r.max_square_sum).abs() < 1e-9);
    assert!(einstein_defect(&shape).defect >= 0.5);
}

#[test]
fn reference_sets_are_willmore() {
    for case in CASES {
        for sign in SIGNS {
            let (_, shape) = reference_shape::<f64>(case, sign).unwrap();
            let r = willmore_residuals(&shape).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-7), "{case} {sign:?}");
        }
    }
}

#[test]
fn level_sets_are_orbit_invariant() {
    let mut rng = seeded(5);
    for case in CASES {
        let f = case.polynomial::<f64>();
        for _ in 0..100 {
            let g = haar_matrix::<f64, _>(case, &mut rng);
            let z: DVector<f64> = unit_vector(&mut rng, case.dim());
            let gz = act(case, &g, &z).unwrap();
            assert!((gz.norm() - 1.0).abs() < 1e-12);
            assert!((f.evaluate(&gz).unwrap() - f.evaluate(&z).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn einstein_defect_is_constant_along_orbits() {
    let mut rng = seeded(6);
    for case in CASES {
        for sign in SIGNS {
            let form = case.polynomial::<f64>().oriented(sign);
            let base = reference_point::<f64>(case, sign);
            let (_, shape) = reference_shape::<f64>(case, sign).unwrap();
            let at_base = einstein_defect(&shape).defect;
            for _ in 0..50 {
                let p = adjoint_orbit_sample(case, &base, &mut rng).unwrap();
                let frame = focal_frame(&form, &p, 1e-9).unwrap();
                let d = einstein_defect(&second_fundamental_form(&form, &frame).unwrap()).defect;
                assert!(
                    (d - at_base).abs() < 1e-8,
                    "{case} {sign:?}: {d} vs {at_base}"
                );
                if case == SkewCase::Real && sign == FocalSign::Minus {
                    assert!(d < 1e-9);
                }
            }
        }
    }
}

#[test]
fn realification_is_multiplicative() {
    let mut rng = seeded(7);
    for case in CASES {
        let coords = SkewCoordinates::new(case);
        let x: DVector<f64> = gaussian_vector(&mut rng, case.dim());
        let y: DVector<f64> = gaussian_vector(&mut rng, case.dim());
        let prod = coords.to_matrix(&x).unwrap() * coords.to_matrix(&y).unwrap();
        let real = coords.realify(&x).unwrap() * coords.realify(&y).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((real[(i, j)] - prod[(i, j)].re).abs() < 1e-12);
                if case == SkewCase::Complex {
                    assert!((real[(i + 5, j)] - prod[(i, j)].im).abs() < 1e-12);
                }
            }
        }
        if case == SkewCase::Real {
            let r = coords.realify(&x).unwrap();
            assert!(common::max_abs(&(&r + r.transpose())) < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn group_action_preserves_norm_and_value(seed in any::<u64>(), complex in any::<bool>()) {
        let case = if complex { SkewCase::Complex } else { SkewCase::Real };
        let mut rng = seeded(seed);
        let f = case.polynomial::<f64>();
        let z: DVector<f64> = gaussian_vector(&mut rng, case.dim());
        let gz = adjoint_orbit_sample(case, &z, &mut rng).unwrap();
        prop_assert!((gz.norm() - z.norm()).abs() < 1e-10 * (1.0 + z.norm()));
        let (a, b) = (f.evaluate(&z).unwrap(), f.evaluate(&gz).unwrap());
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn flat_coordinates_round_trip(seed in any::<u64>(), complex in any::<bool>()) {
        let case = if complex { SkewCase::Complex } else { SkewCase::Real };
        let coords = SkewCoordinates::new(case);
        let x: DVector<f64> = gaussian_vector(&mut seeded(seed), case.dim());
        let z = coords.to_matrix(&x).unwrap();
        prop_assert_eq!(coords.to_flat(&z).unwrap(), x.clone());
        let half_trace = (z.transpose() * z.map(|c| c.conj())).trace().re * 0.5;
        prop_assert!((half_trace - x.norm_squared()).abs() < 1e-12 * (1.0 + half_trace));
    }
}
