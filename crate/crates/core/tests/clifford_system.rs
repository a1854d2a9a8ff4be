mod common;

use isopar::clifford::{
    build_clifford_system, build_extended_system, clifford_sphere_element, involution_eigenspaces,
    trace_invariant, verify_clifford, CliffordSystem,
};
use isopar::random::{seeded, unit_vector};
use isopar::{CliffordSystem64, ExactCliffordSystem};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const CASES: [(usize, usize); 9] = [
    (1, 3),
    (2, 2),
    (3, 2),
    (4, 2),
    (5, 1),
    (6, 1),
    (7, 2),
    (9, 1),
    (10, 1),
];

#[test]
fn dimensions_follow_the_delta_table() {
    let expect_l = [3, 4, 8, 8, 8, 8, 16, 16, 32];
    for (&(m, k), &l) in CASES.iter().zip(&expect_l) {
        let s = build_clifford_system(m, k, None).unwrap();
        assert_eq!((s.m(), s.l(), s.k()), (m, l, k));
        assert_eq!(s.matrices().len(), m + 1);
        assert!(s.matrices().iter().all(|p| p.nrows() == 2 * l));
    }
}

#[test]
fn m4_systems_are_on_r16() {
    let s = build_clifford_system(4, 2, Some(&[1, 1])).unwrap();
    assert_eq!(s.ambient_dim(), 16);
    assert_eq!(s.matrices().len(), 5);
}

#[test]
fn trace_invariant_is_sixteen_or_zero() {
    let same = trace_invariant(
        &build_clifford_system(4, 2, Some(&[1, 1]))
            .unwrap()
            .cast::<f64>(),
    );
    let flip = trace_invariant(
        &build_clifford_system(4, 2, Some(&[-1, -1]))
            .unwrap()
            .cast::<f64>(),
    );
    let mixed = trace_invariant(
        &build_clifford_system(4, 2, Some(&[-1, 1]))
            .unwrap()
            .cast::<f64>(),
    );
    assert_eq!(same.trace.abs(), 16.0);
    assert_eq!(flip.trace.abs(), 16.0);
    assert_eq!(mixed.trace, 0.0);
    assert_eq!(mixed.q, Some(0.0));
}

#[test]
fn sphere_elements_split_evenly() {
    let mut rng = seeded(21);
    for &(m, k) in &CASES {
        let s: CliffordSystem64 = build_clifford_system(m, k, None).unwrap().cast();
        let c: DVector<f64> = unit_vector(&mut rng, m + 1);
        let p = clifford_sphere_element(&s, c.as_slice()).unwrap();
        let n = s.ambient_dim();
        assert!(common::max_abs(&(&p * &p - DMatrix::identity(n, n))) < 1e-12);
        assert!(p.trace().abs() < 1e-12);
        let (ep, em) = involution_eigenspaces(&p);
        assert_eq!((ep.ncols(), em.ncols()), (s.l(), s.l()));
        assert!(common::max_abs(&ep.tr_mul(&em)) < 1e-10);
    }
}

#[test]
fn unit_coordinate_gives_p0() {
    let s: CliffordSystem64 = build_clifford_system(2, 2, None).unwrap().cast();
    let p = clifford_sphere_element(&s, &[1.0, 0.0, 0.0]).unwrap();
    assert_eq!(p, s.matrices()[0]);
}

#[test]
fn json_round_trip_keeps_integers() {
    let s = build_clifford_system(2, 2, Some(&[1, -1])).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    assert!(!text.contains('.'), "integers must stay integers");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["m", "l", "k", "signs", "matrices"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["matrices"][0][0][0], 1);
    let back: ExactCliffordSystem = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    let as_float: CliffordSystem<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(as_float, s.cast::<f64>());
}

#[test]
fn json_rejects_inconsistent_headers() {
    let s = build_clifford_system(1, 3, None).unwrap();
    let mut v = serde_json::to_value(&s).unwrap();
    v["l"] = serde_json::json!(5);
    assert!(serde_json::from_value::<ExactCliffordSystem>(v).is_err());
    let ragged =
        serde_json::json!({"m": 0, "l": 1, "k": 1, "signs": null, "matrices": [[[1, 0], [0]]]});
    assert!(serde_json::from_value::<ExactCliffordSystem>(ragged).is_err());
}

#[test]
fn extended_system_subsystem_has_m2_seven() {
    let ext = build_extended_system().unwrap();
    let mult = ext.base.multiplicities().unwrap();
    assert_eq!(mult.m2, 16 - 8 - 1);
    let mut all = ext.base.matrices().to_vec();
    all.push(ext.companion.clone());
    let full = CliffordSystem::from_parts(all, 1, None)
        .unwrap()
        .cast::<f64>();
    assert!(verify_clifford(&full, 1e-12).pass);
}

fn any_case() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(CASES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn products_of_two_are_skew_and_of_four_symmetric((m, k) in any_case(), seed in any::<u64>()) {
        let s: CliffordSystem64 = build_clifford_system(m, k, None).unwrap().cast();
        let ps = s.matrices();
        let n = ps.len();
        let mut rng = seeded(seed);
        let pick: DVector<f64> = unit_vector(&mut rng, 4);
        let mut idx: Vec<usize> = (0..4).map(|j| ((pick[j].abs() * 1e6) as usize) % n).collect();
        idx.sort_unstable();
        idx.dedup();
        if idx.len() >= 2 {
            let two = &ps[idx[0]] * &ps[idx[1]];
            prop_assert!(common::max_abs(&(&two + two.transpose())) < 1e-12);
        }
        if n >= 4 {
            let four = &ps[0] * &ps[1] * &ps[n - 2] * &ps[n - 1];
            let rev = &ps[n - 1] * &ps[n - 2] * &ps[1] * &ps[0];
            prop_assert!(common::max_abs(&(four.transpose() - &rev)) < 1e-12);
            prop_assert!(common::max_abs(&(&rev - &four)) < 1e-12);
            let dim = s.ambient_dim();
            prop_assert!(common::max_abs(&(&four * &four - DMatrix::identity(dim, dim))) < 1e-12);
        }
    }

    #[test]
    fn q_is_invariant_under_orthogonal_conjugation(seed in any::<u64>(), mixed in any::<bool>()) {
        let signs: [i8; 2] = if mixed { [1, -1] } else { [1, 1] };
        let s: CliffordSystem64 = build_clifford_system(4, 2, Some(&signs)).unwrap().cast();
        let q0 = trace_invariant(&s).q.unwrap().abs();
        let o = common::random_orthogonal(16, &mut seeded(seed));
        let conj: Vec<DMatrix<f64>> = s.matrices().iter().map(|p| o.transpose() * p * &o).collect();
        let t = CliffordSystem::from_parts(conj, 2, None).unwrap();
        prop_assert!(verify_clifford(&t, 1e-12).pass);
        let q1 = trace_invariant(&t).q.unwrap().abs();
        prop_assert!((q0 - q1).abs() < 1e-10);
        let expected = if mixed { 0.0 } else { 2.0 };
        prop_assert!((q0 - expected).abs() < 1e-12);
    }

    #[test]
    fn sphere_eigenspaces_are_complementary((m, k) in any_case(), seed in any::<u64>()) {
        let s: CliffordSystem64 = build_clifford_system(m, k, None).unwrap().cast();
        let c: DVector<f64> = unit_vector(&mut seeded(seed), m + 1);
        let p = clifford_sphere_element(&s, c.as_slice()).unwrap();
        let (ep, em) = involution_eigenspaces(&p);
        prop_assert_eq!(ep.ncols(), s.l());
        prop_assert_eq!(em.ncols(), s.l());
        let both = isopar::linalg::hstack(&[&ep, &em]);
        prop_assert!(isopar::linalg::gram_identity_residual(&both) < 1e-10);
    }
}
