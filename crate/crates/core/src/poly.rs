//! Tensor-product Chebyshev polynomials on a cube, Chebyshev interpolation
//! and truncated Chebyshev series of reciprocals, and grid certification of
//! the residual `sup |1 − h·C|`.
//!
//! A [`MultiPoly`] stores coefficients `c[n_1, …, n_d]` of
//! `T_{n_1}(u_1)···T_{n_d}(u_d)` where `u_k = (2 t_k − ν_k − μ_k)/(ν_k − μ_k)`,
//! row-major with the last variable fastest. Every variable has the same
//! degree `M`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::BufRead;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::cube::{Cube, Interval};
use crate::error::{Error, Result};

/// Quadrature points per dimension used for Chebyshev series coefficients.
pub const DEFAULT_QUADRATURE: usize = 64;

/// Reciprocal sampling rejects nodes where `|h|` falls below this.
pub const SINGULARITY_THRESHOLD: f64 = 1e-14;

/// Default points per dimension for grid certification.
pub fn default_grid(d: usize) -> usize {
    match d {
        1 => 10001,
        2 => 401,
        3 => 61,
        _ => 21,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    degree: usize,
    cube: Cube,
    coeffs: Vec<f64>,
}

/// Result of a checked evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// The point lies outside the expansion cube.
    pub extrapolated: bool,
}

impl MultiPoly {
    pub fn new(cube: Cube, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = (degree + 1).pow(cube.dims() as u32);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite Chebyshev coefficient".into()));
        }
        Ok(Self { degree, cube, coeffs })
    }

    pub fn constant(cube: Cube, value: f64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![value],
            cube,
        }
    }

    /// `constant + Σ_k linear[k]·t_k`.
    pub fn affine(cube: Cube, constant: f64, linear: &[f64]) -> Result<Self> {
        let d = cube.dims();
        if linear.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: linear.len(),
            });
        }
        let mut coeffs = vec![0.0; 1 << d];
        coeffs[0] = constant;
        for (k, (&g, iv)) in linear.iter().zip(cube.intervals()).enumerate() {
            // t_k = mid + half·u_k
            coeffs[0] += g * iv.mid();
            coeffs[1 << (d - 1 - k)] = g * iv.half_width();
        }
        MultiPoly::new(cube, 1, coeffs)
    }

    /// Converts monomial coefficients `a[p_1, …, p_d]` of `Π t_k^{p_k}`
    /// (same layout as the Chebyshev tensor) into the Chebyshev frame of `cube`.
    pub fn from_monomial(cube: Cube, degree: usize, monomial: &[f64]) -> Result<Self> {
        let d = cube.dims();
        let expected = (degree + 1).pow(d as u32);
        if monomial.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: monomial.len(),
            });
        }
        let mut data = monomial.to_vec();
        for (axis, iv) in cube.intervals().iter().enumerate() {
            let to_mono = chebyshev_to_monomial_matrix(degree, *iv);
            let inv = to_mono
                .lu()
                .try_inverse()
                .expect("Chebyshev to monomial map is triangular with nonzero diagonal");
            data = apply_along_axis(&data, d, degree + 1, axis, &inv);
        }
        MultiPoly::new(cube, degree, data)
    }

    pub fn dims(&self) -> usize {
        self.cube.dims()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at `t` by nested Clenshaw recurrences, innermost (last) variable
    /// first. Points outside the cube are evaluated by extrapolation.
    pub fn value(&self, t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.dims());
        let u = self.cube.to_reference(t);
        clenshaw_nd(&self.coeffs, self.degree + 1, &u)
    }

    pub fn evaluate(&self, t: &[f64]) -> Result<Evaluation> {
        if t.len() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: t.len(),
            });
        }
        Ok(Evaluation {
            value: self.value(t),
            extrapolated: !self.cube.contains(t),
        })
    }

    /// Monomial coefficients in the original variables `t`.
    pub fn to_monomial(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        for (axis, iv) in self.cube.intervals().iter().enumerate() {
            let m = chebyshev_to_monomial_matrix(self.degree, *iv);
            data = apply_along_axis(&data, self.dims(), self.degree + 1, axis, &m);
        }
        data
    }

    /// Text form: header `d M lo_1 hi_1 … lo_d hi_d`, then one coefficient
    /// per line in row-major order, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}", self.dims(), self.degree);
        for iv in self.cube.intervals() {
            let _ = write!(out, " {:.16e} {:.16e}", iv.lo, iv.hi);
        }
        out.push('\n');
        for c in &self.coeffs {
            let _ = writeln!(out, "{c:.16e}");
        }
        out
    }

    pub fn read_text(reader: impl BufRead) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let mut tokens: Vec<(usize, String)> = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("");
            tokens.extend(body.split_whitespace().map(|s| (no + 1, s.to_string())));
        }
        let mut it = tokens.into_iter();
        let mut next_tok = |what: &str| it.next().ok_or_else(|| perr(0, format!("missing {what}")));
        let (l, tok) = next_tok("dimension")?;
        let d: usize = tok.parse().map_err(|e| perr(l, format!("{e}")))?;
        let (l, tok) = next_tok("degree")?;
        let m: usize = tok.parse().map_err(|e| perr(l, format!("{e}")))?;
        let mut bounds = Vec::with_capacity(d);
        for _ in 0..d {
            let (l, lo) = next_tok("interval")?;
            let lo: f64 = lo.parse().map_err(|e| perr(l, format!("{e}")))?;
            let (l, hi) = next_tok("interval")?;
            let hi: f64 = hi.parse().map_err(|e| perr(l, format!("{e}")))?;
            bounds.push((lo, hi));
        }
        let count = (m + 1).pow(d as u32);
        let mut coeffs = Vec::with_capacity(count);
        for _ in 0..count {
            let (l, c) = next_tok("coefficient")?;
            coeffs.push(c.parse().map_err(|e| perr(l, format!("{e}")))?);
        }
        if let Some((l, _)) = it.next() {
            return Err(perr(l, "trailing data after coefficient tensor".into()));
        }
        MultiPoly::new(Cube::from_bounds(&bounds)?, m, coeffs)
    }
}

/// `T_0..T_M` coefficient weights; inner loop over the contiguous last axis.
fn clenshaw_nd(coeffs: &[f64], width: usize, u: &[f64]) -> f64 {
    if u.len() == 1 {
        return clenshaw(coeffs, u[0]);
    }
    let stride = coeffs.len() / width;
    let inner: Vec<f64> = coeffs
        .chunks_exact(stride)
        .map(|c| clenshaw_nd(c, width, &u[1..]))
        .collect();
    clenshaw(&inner, u[0])
}

/// Clenshaw recurrence for `Σ c_k T_k(u)`.
pub(crate) fn clenshaw(c: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + u * b1 - b2
}

/// Matrix whose column `k` holds the monomial (in `t`) coefficients of
/// `T_k(u)`, `u = (2t − hi − lo)/(hi − lo)`.
fn chebyshev_to_monomial_matrix(degree: usize, iv: Interval) -> DMatrix<f64> {
    let w = degree + 1;
    // T_k in powers of u
    let mut tu = vec![vec![0.0; w]; w];
    tu[0][0] = 1.0;
    if w > 1 {
        tu[1][1] = 1.0;
    }
    for k in 2..w {
        for p in 0..w {
            let shifted = if p > 0 { 2.0 * tu[k - 1][p - 1] } else { 0.0 };
            tu[k][p] = shifted - tu[k - 2][p];
        }
    }
    // u = alpha·t + beta
    let alpha = 2.0 / (iv.hi - iv.lo);
    let beta = -(iv.hi + iv.lo) / (iv.hi - iv.lo);
    // powers of (alpha t + beta) in t
    let mut upow = vec![vec![0.0; w]; w];
    upow[0][0] = 1.0;
    for p in 1..w {
        for q in 0..w {
            let from_t = if q > 0 { alpha * upow[p - 1][q - 1] } else { 0.0 };
            upow[p][q] = from_t + beta * upow[p - 1][q];
        }
    }
    let mut m = DMatrix::zeros(w, w);
    for k in 0..w {
        for p in 0..w {
            if tu[k][p] != 0.0 {
                for q in 0..w {
                    m[(q, k)] += tu[k][p] * upow[p][q];
                }
            }
        }
    }
    m
}

/// Applies a square `width × width` matrix along `axis` of a d-dimensional
/// tensor whose every axis has length `width`.
fn apply_along_axis(data: &[f64], d: usize, width: usize, axis: usize, matrix: &DMatrix<f64>) -> Vec<f64> {
    apply_axis_shape(data, &vec![width; d], axis, matrix)
}

/// Applies `matrix` to every fibre along `axis`; the output replaces that
/// axis length with `matrix.nrows()`.
fn apply_axis_shape(data: &[f64], shape: &[usize], axis: usize, matrix: &DMatrix<f64>) -> Vec<f64> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let len_in = shape[axis];
    debug_assert_eq!(data.len(), outer * len_in * inner);
    debug_assert_eq!(matrix.ncols(), len_in);
    let len_out = matrix.nrows();
    let mut out = vec![0.0; outer * len_out * inner];
    for o in 0..outer {
        for r in 0..len_out {
            for j in 0..len_in {
                let a = matrix[(r, j)];
                if a == 0.0 {
                    continue;
                }
                let src = &data[(o * len_in + j) * inner..(o * len_in + j + 1) * inner];
                let dst = &mut out[(o * len_out + r) * inner..(o * len_out + r + 1) * inner];
                for (x, &s) in dst.iter_mut().zip(src) {
                    *x += a * s;
                }
            }
        }
    }
    out
}

/// Chebyshev points of the first kind rescaled to `interval`:
/// `mid + half·cos((j + 1/2)π/(M + 1))`, `j = 0..=M`.
pub fn chebyshev_nodes(degree: usize, interval: Interval) -> Result<Vec<f64>> {
    if interval.lo >= interval.hi {
        return Err(Error::DegenerateInterval(interval.lo, interval.hi));
    }
    Ok(node_angles(degree + 1)
        .into_iter()
        .map(|th| interval.mid() + interval.half_width() * th.cos())
        .collect())
}

fn node_angles(k: usize) -> Vec<f64> {
    (0..k).map(|j| (j as f64 + 0.5) * PI / k as f64).collect()
}

/// Discrete cosine map from `points` samples at first-kind nodes to the first
/// `degree + 1` Chebyshev coefficients, up to the overall factor `1/points`.
fn cosine_matrix(degree: usize, points: usize) -> DMatrix<f64> {
    let angles = node_angles(points);
    DMatrix::from_fn(degree + 1, points, |k, j| {
        if k == 0 {
            1.0
        } else {
            2.0 * (k as f64 * angles[j]).cos()
        }
    })
}

/// Samples `1/h` on the `points^d` tensor grid of rescaled Chebyshev nodes.
fn sample_reciprocal<F>(h: &F, cube: &Cube, points: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = cube.dims();
    let nodes: Vec<Vec<f64>> = cube
        .intervals()
        .iter()
        .map(|iv| {
            node_angles(points)
                .into_iter()
                .map(|th| iv.mid() + iv.half_width() * th.cos())
                .collect()
        })
        .collect();
    let total = points.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut t = vec![0.0; d];
    for flat in 0..total {
        let mut rem = flat;
        for k in (0..d).rev() {
            t[k] = nodes[k][rem % points];
            rem /= points;
        }
        let v = h(&t);
        if v.abs() < SINGULARITY_THRESHOLD || v.is_nan() {
            return Err(Error::ReciprocalSingularity {
                point: t.clone(),
                value: v,
            });
        }
        out.push(1.0 / v);
    }
    Ok(out)
}

fn transform(samples: Vec<f64>, d: usize, points: usize, degree: usize) -> Vec<f64> {
    let mat = cosine_matrix(degree, points);
    let mut shape = vec![points; d];
    let mut data = samples;
    for axis in 0..d {
        data = apply_axis_shape(&data, &shape, axis, &mat);
        shape[axis] = degree + 1;
    }
    let norm = (points as f64).powi(d as i32);
    for c in &mut data {
        *c /= norm;
    }
    let scale = data.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let floor = 8.0 * f64::EPSILON * scale;
    for c in &mut data {
        if c.abs() <= floor {
            *c = 0.0;
        }
    }
    data
}

/// Chebyshev interpolant `C_M` of `1/h`: the degree-`M` tensor polynomial
/// agreeing with `1/h` at every rescaled Chebyshev node of `cube`.
pub fn interpolate_reciprocal<F>(h: F, cube: &Cube, degree: usize) -> Result<MultiPoly>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let samples = sample_reciprocal(&h, cube, degree + 1)?;
    let coeffs = transform(samples, cube.dims(), degree + 1, degree);
    MultiPoly::new(cube.clone(), degree, coeffs)
}

/// Degree-`M` truncation of the Chebyshev expansion of `1/h`, coefficients
/// from Gauss–Chebyshev quadrature with `max(quadrature, 4(M + 1))` points per
/// dimension.
pub fn chebyshev_series_reciprocal<F>(h: F, cube: &Cube, degree: usize, quadrature: usize) -> Result<MultiPoly>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let points = quadrature.max(4 * (degree + 1));
    let samples = sample_reciprocal(&h, cube, points)?;
    let coeffs = transform(samples, cube.dims(), points, degree);
    MultiPoly::new(cube.clone(), degree, coeffs)
}

fn grid_axes(intervals: &[Interval], grid_per_dim: usize) -> Vec<Vec<f64>> {
    let g = grid_per_dim.max(2);
    intervals
        .iter()
        .map(|iv| {
            (0..g)
                .map(|i| {
                    if i == g - 1 {
                        iv.hi
                    } else {
                        iv.lo + (iv.hi - iv.lo) * i as f64 / (g - 1) as f64
                    }
                })
                .collect()
        })
        .collect()
}

/// Folds `f` over a uniform tensor grid (endpoints included), parallel over
/// the first axis with an order-independent reduction.
fn grid_fold<F, T, R>(intervals: &[Interval], grid_per_dim: usize, f: F, init: T, reduce: R) -> T
where
    F: Fn(&[f64]) -> T + Sync,
    T: Copy + Send + Sync,
    R: Fn(T, T) -> T + Sync + Send,
{
    let axes = grid_axes(intervals, grid_per_dim);
    let d = axes.len();
    let g = axes[0].len();
    let inner_total = g.pow(d as u32 - 1);
    axes[0]
        .par_iter()
        .map(|&t0| {
            let mut t = vec![0.0; d];
            t[0] = t0;
            let mut acc = init;
            for flat in 0..inner_total {
                let mut rem = flat;
                for k in (1..d).rev() {
                    t[k] = axes[k][rem % g];
                    rem /= g;
                }
                acc = reduce(acc, f(&t));
            }
            acc
        })
        .reduce(|| init, &reduce)
}

/// `max |1 − h(t)·C(t)|` over a uniform grid with `grid_per_dim` points per
/// dimension. A lower bound for the true supremum that tightens with the grid.
pub fn sup_error<F>(h: F, approx: &MultiPoly, cube: &Cube, grid_per_dim: usize) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid_fold(
        cube.intervals(),
        grid_per_dim,
        |t| {
            let e = (1.0 - h(t) * approx.value(t)).abs();
            if e.is_nan() {
                f64::INFINITY
            } else {
                e
            }
        },
        0.0,
        f64::max,
    )
}

/// `(min, max)` of `f` over the same uniform grid.
pub fn grid_extrema<F>(f: F, cube: &Cube, grid_per_dim: usize) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid_extrema_on(f, cube.intervals(), grid_per_dim)
}

/// [`grid_extrema`] over a box whose sides may be degenerate (`lo == hi`).
pub fn grid_extrema_on<F>(f: F, intervals: &[Interval], grid_per_dim: usize) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid_fold(
        intervals,
        grid_per_dim,
        |t| {
            let v = f(t);
            (v, v)
        },
        (f64::INFINITY, f64::NEG_INFINITY),
        |a, b| (a.0.min(b.0), a.1.max(b.1)),
    )
}

/// Checks `|h| > threshold` on the certification grid. Sign changes between
/// grid points are not detected.
pub fn check_nonvanishing<F>(h: F, cube: &Cube, grid_per_dim: usize, threshold: f64) -> Result<()>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (lo, _) = grid_extrema(|t| h(t).abs(), cube, grid_per_dim);
    if lo > threshold {
        return Ok(());
    }
    let axes = grid_axes(cube.intervals(), grid_per_dim);
    let d = axes.len();
    let g = axes[0].len();
    let mut t = vec![0.0; d];
    for flat in 0..g.pow(d as u32) {
        let mut rem = flat;
        for k in (0..d).rev() {
            t[k] = axes[k][rem % g];
            rem /= g;
        }
        let v = h(&t);
        if v.abs() <= threshold || v.is_nan() {
            return Err(Error::ReciprocalSingularity { point: t, value: v });
        }
    }
    unreachable!("grid minimum below threshold but no witness found")
}

/// Evaluates monomial coefficients (layout of [`MultiPoly::to_monomial`]) by
/// nested Horner.
pub fn eval_monomial(coeffs: &[f64], degree: usize, t: &[f64]) -> f64 {
    if t.len() == 1 {
        return coeffs.iter().rev().fold(0.0, |acc, &c| acc * t[0] + c);
    }
    let stride = coeffs.len() / (degree + 1);
    coeffs
        .chunks_exact(stride)
        .rev()
        .fold(0.0, |acc, c| acc * t[0] + eval_monomial(c, degree, &t[1..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1(t: &[f64]) -> f64 {
        (2.25 - t[0]) * (3.0 + t[0])
    }

    fn unit() -> Cube {
        Cube::uniform(1, 0.0, 2.0).unwrap()
    }

    #[test]
    fn nodes_closed_forms() {
        assert_eq!(chebyshev_nodes(0, Interval { lo: 0.0, hi: 2.0 }).unwrap(), vec![1.0]);
        let n1 = chebyshev_nodes(1, Interval { lo: -1.0, hi: 1.0 }).unwrap();
        assert!((n1[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((n1[1] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let n2 = chebyshev_nodes(2, Interval { lo: 0.0, hi: 2.0 }).unwrap();
        for (a, b) in n2.iter().zip([1.8660254037844386, 1.0, 0.1339745962155614]) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert!(chebyshev_nodes(3, Interval { lo: 1.0, hi: 1.0 }).is_err());
    }

    #[test]
    fn nodes_strictly_inside() {
        for m in 0..20 {
            for t in chebyshev_nodes(m, Interval { lo: -0.5, hi: 3.0 }).unwrap() {
                assert!(t > -0.5 && t < 3.0);
            }
        }
    }

    #[test]
    fn zeroth_interpolant_of_h1() {
        let c0 = interpolate_reciprocal(h1, &unit(), 0).unwrap();
        assert_eq!(c0.coeffs(), &[0.2]);
        assert_eq!(c0.value(&[0.37]), 0.2);
        let b0 = sup_error(h1, &c0, &unit(), default_grid(1));
        assert!((b0 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_reciprocal() {
        for m in 0..6 {
            let c = interpolate_reciprocal(|_: &[f64]| 4.0, &unit(), m).unwrap();
            assert_eq!(c.coeffs()[0], 0.25);
            assert!(c.coeffs()[1..].iter().all(|&x| x == 0.0));
            let s = chebyshev_series_reciprocal(|_: &[f64]| 4.0, &unit(), m, DEFAULT_QUADRATURE).unwrap();
            assert_eq!(sup_error(|_: &[f64]| 4.0, &s, &unit(), 101), 0.0);
        }
    }

    #[test]
    fn bivariate_interpolation_property() {
        let cube = Cube::uniform(2, 0.0, 2.0).unwrap();
        let h = |t: &[f64]| 1.0 + t[0] + t[1];
        let c = interpolate_reciprocal(h, &cube, 1).unwrap();
        let nodes = chebyshev_nodes(1, cube.interval(0)).unwrap();
        for &a in &nodes {
            for &b in &nodes {
                assert!((c.value(&[a, b]) - 1.0 / h(&[a, b])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_node_rejected() {
        // h vanishes at the single node t = 1
        let err = interpolate_reciprocal(|t: &[f64]| t[0] - 1.0, &unit(), 0).unwrap_err();
        assert!(matches!(err, Error::ReciprocalSingularity { .. }));
    }

    #[test]
    fn high_degree_interpolant_is_near_exact() {
        let c = interpolate_reciprocal(h1, &unit(), 50).unwrap();
        assert!(sup_error(h1, &c, &unit(), default_grid(1)) < 1e-10);
    }

    #[test]
    fn series_quadrature_converged() {
        let a = chebyshev_series_reciprocal(h1, &unit(), 4, 64).unwrap();
        let b = chebyshev_series_reciprocal(h1, &unit(), 4, 128).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn corner_of_t1t1() {
        let cube = Cube::from_bounds(&[(0.0, 2.0), (-1.0, 3.0)]).unwrap();
        let p = MultiPoly::new(cube, 1, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.value(&[2.0, 3.0]), 1.0);
        let e = p.evaluate(&[2.5, 3.0]).unwrap();
        assert!(e.extrapolated);
        assert!(p.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn affine_matches_formula() {
        let cube = Cube::from_bounds(&[(0.0, 2.0), (0.5, 1.5)]).unwrap();
        let p = MultiPoly::affine(cube, 1.0, &[0.3, 1.7]).unwrap();
        for t in [[0.0, 0.5], [1.2, 1.1], [2.0, 1.5]] {
            assert!((p.value(&t) - (1.0 + 0.3 * t[0] + 1.7 * t[1])).abs() < 1e-14);
        }
    }

    #[test]
    fn monomial_round_trip_h1() {
        let p = MultiPoly::from_monomial(unit(), 2, &[6.75, -0.75, -1.0]).unwrap();
        for t in [0.0, 0.4, 1.3, 2.0] {
            assert!((p.value(&[t]) - h1(&[t])).abs() < 1e-13);
        }
        let back = p.to_monomial();
        for (a, b) in back.iter().zip([6.75, -0.75, -1.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn text_round_trip() {
        let cube = Cube::from_bounds(&[(0.0, 2.0), (0.0, 1.0)]).unwrap();
        let p = interpolate_reciprocal(|t: &[f64]| 2.0 + t[0] * t[1], &cube, 3).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("2 3 0.0000000000000000e0 2.0000000000000000e0"));
        assert_eq!(MultiPoly::read_text(text.as_bytes()).unwrap(), p);
        assert!(MultiPoly::read_text("1 1 0 2 0.5".as_bytes()).is_err());
    }

    #[test]
    fn nonvanishing_check() {
        assert!(check_nonvanishing(h1, &unit(), 1001, 1e-12).is_ok());
        assert!(check_nonvanishing(|t: &[f64]| t[0] - 1.0, &unit(), 1001, 1e-12).is_err());
    }
}
