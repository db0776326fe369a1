//! Dense reference computations shared by the integration tests. Nothing here
//! goes through the library's Clenshaw code.

#![allow(dead_code)]

use cipa_core::{MultiPoly, Shift};
use nalgebra::{DMatrix, DVector};

/// `T_k(Ŝ)` for `k = 0..=degree` by the three-term matrix recurrence, where
/// `Ŝ = (2S − (hi + lo)I)/(hi − lo)`.
pub fn chebyshev_powers(s: &DMatrix<f64>, lo: f64, hi: f64, degree: usize) -> Vec<DMatrix<f64>> {
    let n = s.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let shat = (s * 2.0 - &id * (hi + lo)) / (hi - lo);
    let mut out = vec![id.clone()];
    if degree >= 1 {
        out.push(shat.clone());
    }
    for k in 2..=degree {
        let next = &shat * &out[k - 1] * 2.0 - &out[k - 2];
        out.push(next);
    }
    out
}

/// Dense `h(S_1, …, S_d)` from the tensor Chebyshev coefficients.
pub fn dense_filter(shifts: &[DMatrix<f64>], poly: &MultiPoly) -> DMatrix<f64> {
    let d = shifts.len();
    assert_eq!(d, poly.dims());
    let m = poly.degree();
    let n = shifts[0].nrows();
    let powers: Vec<Vec<DMatrix<f64>>> = shifts
        .iter()
        .zip(poly.cube().intervals())
        .map(|(s, iv)| chebyshev_powers(s, iv.lo, iv.hi, m))
        .collect();
    let mut total = DMatrix::<f64>::zeros(n, n);
    for (flat, &c) in poly.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut idx = vec![0; d];
        let mut rest = flat;
        for k in (0..d).rev() {
            idx[k] = rest % (m + 1);
            rest /= m + 1;
        }
        let mut term = DMatrix::<f64>::identity(n, n);
        for k in 0..d {
            term *= &powers[k][idx[k]];
        }
        total += term * c;
    }
    total
}

pub fn dense_apply(shifts: &[&Shift], poly: &MultiPoly, x: &[f64]) -> Vec<f64> {
    let mats: Vec<DMatrix<f64>> = shifts.iter().map(|s| s.to_dense()).collect();
    let h = dense_filter(&mats, poly);
    (h * DVector::from_column_slice(x)).iter().copied().collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Spectral radius of a symmetric matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `h₁(t) = (9/4 − t)(3 + t)`.
pub fn h1(t: &[f64]) -> f64 {
    (2.25 - t[0]) * (3.0 + t[0])
}
