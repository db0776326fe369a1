//! Polynomial filters `H = h(S_1, …, S_d)` of commuting shifts.
//!
//! Filters are applied by nested Chebyshev–Clenshaw recurrences in the
//! rescaled shifts `Ŝ_k = (2 S_k − (ν_k + μ_k) I)/(ν_k − μ_k)`, where
//! `[μ_k, ν_k]` is the polynomial's cube. The innermost (last) variable is
//! reduced first. Every step costs one shift-vector product.

use std::sync::Arc;

use crate::cube::{Cube, Interval};
use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::shift::{commutator_norm, Shift};

/// Commutator tolerance applied when a family is assembled.
pub const COMMUTE_TOL: f64 = 1e-10;

/// Slack allowed when checking that a cube contains a shift's interval,
/// absorbing round-off in numerically computed intervals.
pub const CUBE_SLACK: f64 = 1e-9;

/// A list of pairwise commuting shifts of equal dimension, shared by the
/// filters built on it.
#[derive(Debug, Clone)]
pub struct ShiftFamily {
    shifts: Arc<Vec<Shift>>,
}

impl ShiftFamily {
    pub fn new(shifts: Vec<Shift>) -> Result<Self> {
        let Some(first) = shifts.first() else {
            return Err(Error::InvalidInput("shift family is empty".into()));
        };
        let n = first.n();
        if let Some(s) = shifts.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.n(),
            });
        }
        for a in 0..shifts.len() {
            for b in a + 1..shifts.len() {
                let c = commutator_norm(&shifts[a], &shifts[b])?;
                if c > COMMUTE_TOL {
                    return Err(Error::NotCommuting(a, b, c));
                }
            }
        }
        Ok(Self {
            shifts: Arc::new(shifts),
        })
    }

    pub fn single(shift: Shift) -> Self {
        Self {
            shifts: Arc::new(vec![shift]),
        }
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn n(&self) -> usize {
        self.shifts[0].n()
    }

    pub fn shifts(&self) -> &[Shift] {
        &self.shifts
    }

    pub fn shift(&self, k: usize) -> &Shift {
        &self.shifts[k]
    }

    /// Spectral intervals of the members, in order.
    pub fn intervals(&self) -> Vec<Interval> {
        self.shifts.iter().map(Shift::interval).collect()
    }

    pub fn same_as(&self, other: &ShiftFamily) -> bool {
        Arc::ptr_eq(&self.shifts, &other.shifts) || self.shifts == other.shifts
    }
}

/// Something that maps a signal of length `dim()` to another one.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearOperator for Shift {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        Shift::apply(self, x)
    }
}

/// `scale · I`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledIdentity {
    pub n: usize,
    pub scale: f64,
}

impl LinearOperator for ScaledIdentity {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| self.scale * v).collect()
    }
}

/// Adapts a closure into a [`LinearOperator`].
pub struct FnOperator<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

/// `H = h(S_1, …, S_d)`.
#[derive(Debug, Clone)]
pub struct FilterSpec {
    family: ShiftFamily,
    poly: MultiPoly,
}

impl FilterSpec {
    /// Checks that the polynomial has one variable per shift and that its cube
    /// contains every shift's spectral interval.
    pub fn new(family: ShiftFamily, poly: MultiPoly) -> Result<Self> {
        if poly.dims() != family.len() {
            return Err(Error::DimensionMismatch {
                expected: family.len(),
                found: poly.dims(),
            });
        }
        for (k, (s, iv)) in family.shifts().iter().zip(poly.cube().intervals()).enumerate() {
            let slack = CUBE_SLACK * (iv.hi - iv.lo).max(1.0);
            if !iv.encloses(&s.interval(), slack) {
                return Err(Error::CubeMismatch(k));
            }
        }
        Ok(Self { family, poly })
    }

    /// A second filter on the same shifts.
    pub fn sibling(&self, poly: MultiPoly) -> Result<Self> {
        FilterSpec::new(self.family.clone(), poly)
    }

    pub fn family(&self) -> &ShiftFamily {
        &self.family
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    /// Evaluates the scalar response `h(t)`.
    pub fn response(&self, t: &[f64]) -> f64 {
        self.poly.value(t)
    }

    /// Number of shift-vector products in one application.
    pub fn shift_products(&self) -> usize {
        schedule_length(self.poly.degree(), self.poly.dims())
    }
}

/// Shift products used by the nested recurrence for uniform degree `m` in `d`
/// variables: `m` for one variable, `(m + 1)·R(d − 1) + m` otherwise.
pub fn schedule_length(m: usize, d: usize) -> usize {
    if d == 1 {
        m
    } else {
        (m + 1) * schedule_length(m, d - 1) + m
    }
}

struct Rescaled<'a> {
    shift: &'a Shift,
    frame: Interval,
}

impl Rescaled<'_> {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let sv = self.shift.apply(v);
        let (s, w) = (self.frame.hi + self.frame.lo, self.frame.hi - self.frame.lo);
        sv.iter().zip(v).map(|(a, b)| (2.0 * a - s * b) / w).collect()
    }
}

/// Clenshaw with vector-valued coefficients produced lazily from the top
/// index down.
fn clenshaw_vec<F>(degree: usize, shat: &Rescaled<'_>, mut coeff: F) -> Vec<f64>
where
    F: FnMut(usize) -> Vec<f64>,
{
    if degree == 0 {
        return coeff(0);
    }
    let mut b1 = coeff(degree);
    let mut b2 = vec![0.0; b1.len()];
    for k in (1..degree).rev() {
        let v = coeff(k);
        let s = shat.apply(&b1);
        let b0: Vec<f64> = v.iter().zip(&s).zip(&b2).map(|((v, s), b)| v + 2.0 * s - b).collect();
        b2 = std::mem::replace(&mut b1, b0);
    }
    let v = coeff(0);
    let s = shat.apply(&b1);
    v.iter().zip(&s).zip(&b2).map(|((v, s), b)| v + s - b).collect()
}

fn apply_level(shats: &[Rescaled<'_>], coeffs: &[f64], degree: usize, x: &[f64]) -> Vec<f64> {
    let width = degree + 1;
    let stride = coeffs.len() / width;
    if shats.len() == 1 {
        return clenshaw_vec(degree, &shats[0], |k| x.iter().map(|v| coeffs[k] * v).collect());
    }
    clenshaw_vec(degree, &shats[0], |k| {
        apply_level(&shats[1..], &coeffs[k * stride..(k + 1) * stride], degree, x)
    })
}

/// `h(S_1, …, S_d) x`.
pub fn apply_filter(filter: &FilterSpec, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != filter.n() {
        return Err(Error::DimensionMismatch {
            expected: filter.n(),
            found: x.len(),
        });
    }
    let shats: Vec<Rescaled<'_>> = filter
        .family
        .shifts()
        .iter()
        .zip(filter.poly.cube().intervals())
        .map(|(shift, &frame)| Rescaled { shift, frame })
        .collect();
    Ok(apply_level(&shats, filter.poly.coeffs(), filter.poly.degree(), x))
}

impl LinearOperator for FilterSpec {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        apply_filter(self, x).expect("signal length matches filter dimension")
    }
}

/// Chebyshev interpolant of `1/h` of degree `m` on the filter's cube, as a
/// filter on the same shifts.
pub fn interpolation_approximant(h: &FilterSpec, m: usize) -> Result<FilterSpec> {
    let poly = crate::poly::interpolate_reciprocal(|t| h.poly.value(t), h.poly.cube(), m)?;
    h.sibling(poly)
}

/// Truncated Chebyshev series of `1/h` of degree `m` on the filter's cube.
pub fn series_approximant(h: &FilterSpec, m: usize, quadrature: usize) -> Result<FilterSpec> {
    let poly = crate::poly::chebyshev_series_reciprocal(|t| h.poly.value(t), h.poly.cube(), m, quadrature)?;
    h.sibling(poly)
}

/// Cube spanned by the family's spectral intervals, when none is degenerate.
pub fn spectral_cube(family: &ShiftFamily) -> Result<Cube> {
    Cube::new(family.intervals())
}
