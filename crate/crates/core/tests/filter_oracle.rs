mod common;

use cipa_core::{
    apply_filter, build_circulant, build_knn, build_path, kron_pair, sym_normalized_laplacian, Cube, FilterSpec,
    MultiPoly, Shift, ShiftFamily,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{dense_apply, rel_diff};

fn random_family(rng: &mut ChaCha8Rng, d: usize) -> ShiftFamily {
    if d == 1 {
        let n = rng.random_range(8..=200);
        let g = if rng.random_bool(0.5) {
            build_circulant(n, &[1, 1 + rng.random_range(1..3)]).unwrap()
        } else {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random(), rng.random()]).collect();
            build_knn(&pts, 4).unwrap()
        };
        ShiftFamily::single(sym_normalized_laplacian(&g).unwrap())
    } else {
        let p = rng.random_range(3..=12);
        let q = rng.random_range(3..=16);
        let left = sym_normalized_laplacian(&build_path(p).unwrap()).unwrap();
        let right = sym_normalized_laplacian(&build_circulant(q.max(5), &[1, 2]).unwrap()).unwrap();
        let (s1, s2) = kron_pair(&left, &right);
        ShiftFamily::new(vec![s1, s2]).unwrap()
    }
}

#[test]
fn apply_filter_matches_dense_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let d = 1 + trial % 2;
        let fam = random_family(&mut rng, d);
        assert!(fam.n() <= 200);
        let degree = rng.random_range(0..=6);
        let coeffs: Vec<f64> = (0..(degree + 1usize).pow(d as u32)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let poly = MultiPoly::new(Cube::uniform(d, 0.0, 2.0).unwrap(), degree, coeffs).unwrap();
        let f = FilterSpec::new(fam.clone(), poly.clone()).unwrap();
        let x: Vec<f64> = (0..fam.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = apply_filter(&f, &x).unwrap();
        let shifts: Vec<&Shift> = fam.shifts().iter().collect();
        let want = dense_apply(&shifts, &poly, &x);
        worst = worst.max(rel_diff(&got, &want));
    }
    assert!(worst < 1e-10, "worst relative deviation {worst:e}");
}

#[test]
fn shift_product_count_matches_schedule() {
    // degree m in d = 2: (m+1)·m + m products
    let left = sym_normalized_laplacian(&build_path(4).unwrap()).unwrap();
    let right = sym_normalized_laplacian(&build_path(3).unwrap()).unwrap();
    let (s1, s2) = kron_pair(&left, &right);
    let fam = ShiftFamily::new(vec![s1, s2]).unwrap();
    let poly = MultiPoly::new(Cube::uniform(2, 0.0, 2.0).unwrap(), 2, (0..9).map(|k| k as f64 - 3.5).collect()).unwrap();
    let f = FilterSpec::new(fam, poly).unwrap();
    assert_eq!(f.shift_products(), 8);
}

#[test]
fn monomial_and_chebyshev_frames_agree_on_matrices() {
    // h(t) = 6.75 − 0.75 t − t² applied through S and S² directly
    let g = build_circulant(30, &[1, 4]).unwrap();
    let s = sym_normalized_laplacian(&g).unwrap();
    let poly = MultiPoly::from_monomial(Cube::uniform(1, 0.0, 2.0).unwrap(), 2, &[6.75, -0.75, -1.0]).unwrap();
    let f = FilterSpec::new(ShiftFamily::single(s.clone()), poly).unwrap();
    let x: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
    let sd = s.to_dense();
    let hd = DMatrix::<f64>::identity(30, 30) * 6.75 - &sd * 0.75 - &sd * &sd;
    let want: Vec<f64> = (hd * DVector::from_column_slice(&x)).iter().copied().collect();
    assert!(rel_diff(&apply_filter(&f, &x).unwrap(), &want) < 1e-13);
}

fn cycle_family() -> ShiftFamily {
    ShiftFamily::single(sym_normalized_laplacian(&build_circulant(12, &[1, 3]).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filter_is_linear(
        coeffs in prop::collection::vec(-2.0f64..2.0, 5),
        x in prop::collection::vec(-1.0f64..1.0, 12),
        z in prop::collection::vec(-1.0f64..1.0, 12),
        a in -3.0f64..3.0,
    ) {
        let f = FilterSpec::new(cycle_family(), MultiPoly::new(Cube::uniform(1, 0.0, 2.0).unwrap(), 4, coeffs).unwrap()).unwrap();
        let combo: Vec<f64> = x.iter().zip(&z).map(|(p, q)| a * p + q).collect();
        let lhs = apply_filter(&f, &combo).unwrap();
        let hx = apply_filter(&f, &x).unwrap();
        let hz = apply_filter(&f, &z).unwrap();
        for i in 0..12 {
            prop_assert!((lhs[i] - (a * hx[i] + hz[i])).abs() < 1e-12 * (1.0 + lhs[i].abs()));
        }
    }

    #[test]
    fn monomial_round_trip_preserves_values(
        mono in prop::collection::vec(-2.0f64..2.0, 9),
        t0 in 0.0f64..2.0,
        t1 in -1.0f64..3.0,
    ) {
        let cube = Cube::from_bounds(&[(0.0, 2.0), (-1.0, 3.0)]).unwrap();
        let p = MultiPoly::from_monomial(cube, 2, &mono).unwrap();
        let direct = cipa_core::poly::eval_monomial(&mono, 2, &[t0, t1]);
        prop_assert!((p.value(&[t0, t1]) - direct).abs() < 1e-11 * (1.0 + direct.abs()));
        let back = p.to_monomial();
        for (a, b) in back.iter().zip(&mono) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }
}
