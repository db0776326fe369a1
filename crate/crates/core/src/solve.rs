//! Centralized iterative inverse filtering.
//!
//! All polynomial-approximation solvers share one quasi-Newton loop
//!
//! ```text
//! e(m) = H x(m-1) − y,    x(m) = x(m-1) − G e(m)
//! ```
//!
//! with `G` the Chebyshev interpolant (CIPA), the truncated Chebyshev series
//! (CPA) or a scaled identity (OGDA). ARMA solvers use first-order recursions.

use std::fmt::Write as _;

use crate::cube::Interval;
use crate::error::{Error, Result};
use crate::filter::{apply_filter, FilterSpec, LinearOperator, ScaledIdentity};
use crate::poly::{default_grid, grid_extrema_on, sup_error};

/// Abort once the residual exceeds its running minimum by this factor.
pub const DIVERGENCE_GROWTH: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Initial iterate, zero when absent.
    pub x0: Option<Vec<f64>>,
    /// Known solution, enables relative errors.
    pub ground_truth: Option<Vec<f64>>,
    /// Optional early exit once `‖H x − y‖₂ ≤ tol`.
    pub residual_tol: Option<f64>,
}

impl SolveOptions {
    pub fn new(max_iters: usize) -> Self {
        Self {
            max_iters,
            x0: None,
            ground_truth: None,
            residual_tol: None,
        }
    }

    pub fn with_ground_truth(mut self, x: Vec<f64>) -> Self {
        self.ground_truth = Some(x);
        self
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = Some(tol);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceStatus {
    /// Ran all requested iterations.
    Completed,
    /// Stopped early on the residual tolerance.
    Converged,
    /// The iteration is not contractive: either the residual blew up at
    /// `iteration`, or (ARMA) the spectral convergence condition fails.
    Diverged { iteration: usize, growth: f64 },
}

/// Per-iteration record. Index `m` of every vector refers to `x^(m)`,
/// starting with the initial iterate at `m = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterTrace {
    pub algorithm: String,
    pub iterates: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub rel_errors: Option<Vec<f64>>,
    pub status: TraceStatus,
}

impl IterTrace {
    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("trace holds the initial iterate")
    }

    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn diverged(&self) -> bool {
        matches!(self.status, TraceStatus::Diverged { .. })
    }

    /// CSV with a metadata comment line followed by `m,residual_norm,rel_error`.
    pub fn to_csv(&self, seed: Option<u64>, degree: Option<usize>) -> String {
        let mut out = format!("# algorithm={}", self.algorithm);
        if let Some(m) = degree {
            let _ = write!(out, " M={m}");
        }
        if let Some(s) = seed {
            let _ = write!(out, " seed={s}");
        }
        out.push_str("\nm,residual_norm,rel_error\n");
        for (m, r) in self.residual_norms.iter().enumerate() {
            let e = self
                .rel_errors
                .as_ref()
                .map(|v| format!("{:.12e}", v[m]))
                .unwrap_or_default();
            let _ = writeln!(out, "{m},{r:.12e},{e}");
        }
        out
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖x_m − x‖₂ / ‖x‖₂`.
pub fn relative_error(x_m: &[f64], x: &[f64]) -> Result<f64> {
    if x_m.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: x_m.len(),
        });
    }
    let denom = norm2(x);
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num = x_m.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(num / denom)
}

fn check_len(expected: usize, v: &[f64]) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        })
    }
}

struct Recorder<'a> {
    trace: IterTrace,
    truth: Option<&'a [f64]>,
    min_residual: f64,
}

impl<'a> Recorder<'a> {
    fn new(name: &str, opts: &'a SolveOptions) -> Result<Self> {
        Ok(Self {
            trace: IterTrace {
                algorithm: name.to_string(),
                iterates: Vec::new(),
                residual_norms: Vec::new(),
                rel_errors: opts.ground_truth.as_ref().map(|_| Vec::new()),
                status: TraceStatus::Completed,
            },
            truth: opts.ground_truth.as_deref(),
            min_residual: f64::INFINITY,
        })
    }

    fn push_iterate(&mut self, x: Vec<f64>) -> Result<()> {
        if let (Some(t), Some(errs)) = (self.truth, self.trace.rel_errors.as_mut()) {
            errs.push(relative_error(&x, t)?);
        }
        self.trace.iterates.push(x);
        Ok(())
    }

    /// Records the residual of the latest iterate; returns false once the
    /// divergence guard trips.
    fn push_residual(&mut self, r: f64) -> bool {
        self.trace.residual_norms.push(r);
        self.min_residual = self.min_residual.min(r);
        let growth = r / self.min_residual;
        if !r.is_finite() || (self.min_residual > 0.0 && growth > DIVERGENCE_GROWTH) {
            self.trace.status = TraceStatus::Diverged {
                iteration: self.trace.residual_norms.len() - 1,
                growth: if growth.is_finite() { growth } else { f64::INFINITY },
            };
            return false;
        }
        true
    }
}

fn initial(n: usize, opts: &SolveOptions) -> Result<Vec<f64>> {
    if opts.max_iters == 0 {
        return Err(Error::InvalidInput("at least one iteration is required".into()));
    }
    if let Some(t) = &opts.ground_truth {
        check_len(n, t)?;
    }
    match &opts.x0 {
        Some(x0) => {
            check_len(n, x0)?;
            Ok(x0.clone())
        }
        None => Ok(vec![0.0; n]),
    }
}

/// The quasi-Newton loop with an arbitrary approximate inverse `G`. The
/// returned trace may carry a divergence status.
pub fn quasi_newton_trace(
    name: &str,
    h: &dyn LinearOperator,
    g: &dyn LinearOperator,
    y: &[f64],
    opts: &SolveOptions,
) -> Result<IterTrace> {
    let n = h.dim();
    check_len(n, y)?;
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let mut x = initial(n, opts)?;
    let mut rec = Recorder::new(name, opts)?;
    for m in 1..=opts.max_iters + 1 {
        let mut e = h.apply(&x);
        for (ei, yi) in e.iter_mut().zip(y) {
            *ei -= yi;
        }
        let r = norm2(&e);
        rec.push_iterate(x.clone())?;
        if !rec.push_residual(r) {
            break;
        }
        if m > opts.max_iters {
            break;
        }
        if opts.residual_tol.is_some_and(|tol| r <= tol) {
            rec.trace.status = TraceStatus::Converged;
            break;
        }
        let ge = g.apply(&e);
        for (xi, gi) in x.iter_mut().zip(&ge) {
            *xi -= gi;
        }
    }
    Ok(rec.trace)
}

fn into_result(trace: IterTrace) -> Result<IterTrace> {
    match trace.status {
        TraceStatus::Diverged { iteration, growth } => Err(Error::Diverged { iteration, growth }),
        _ => Ok(trace),
    }
}

/// [`quasi_newton_trace`] with divergence reported as an error.
pub fn quasi_newton_solve(
    name: &str,
    h: &dyn LinearOperator,
    g: &dyn LinearOperator,
    y: &[f64],
    opts: &SolveOptions,
) -> Result<IterTrace> {
    into_result(quasi_newton_trace(name, h, g, y, opts)?)
}

fn shared_shifts(h: &FilterSpec, c: &FilterSpec) -> Result<()> {
    if h.family().same_as(c.family()) {
        Ok(())
    } else {
        Err(Error::ShiftFamilyMismatch)
    }
}

/// Chebyshev interpolation polynomial approximation algorithm: the
/// quasi-Newton loop with `G = C_M(S_1, …, S_d)`.
pub fn cipa_solve(h: &FilterSpec, c: &FilterSpec, y: &[f64], opts: &SolveOptions) -> Result<IterTrace> {
    shared_shifts(h, c)?;
    quasi_newton_solve("CIPA", h, c, y, opts)
}

/// Same iteration with `C` the truncated Chebyshev series of `1/h`.
pub fn cpa_solve(h: &FilterSpec, c: &FilterSpec, y: &[f64], opts: &SolveOptions) -> Result<IterTrace> {
    shared_shifts(h, c)?;
    quasi_newton_solve("CPA", h, c, y, opts)
}

/// Richardson step `2/(h_max + h_min)` with the extrema of `h` taken on a grid
/// over the shifts' spectral intervals.
pub fn ogda_step(h: &FilterSpec, grid_per_dim: Option<usize>) -> Result<f64> {
    let intervals: Vec<Interval> = h.family().intervals();
    let grid = grid_per_dim.unwrap_or_else(|| default_grid(intervals.len()));
    let (lo, hi) = grid_extrema_on(|t| h.response(t), &intervals, grid);
    if lo <= 0.0 || lo.is_nan() {
        return Err(Error::IndefiniteFilter(lo));
    }
    Ok(2.0 / (hi + lo))
}

/// Gradient descent with the optimal fixed step for a positive definite `H`.
pub fn ogda_solve(h: &FilterSpec, y: &[f64], opts: &SolveOptions, grid_per_dim: Option<usize>) -> Result<IterTrace> {
    let step = ogda_step(h, grid_per_dim)?;
    let g = ScaledIdentity { n: h.n(), scale: step };
    quasi_newton_solve("OGDA", h, &g, y, opts)
}

/// `sup |T(t)|` over the shifts' spectral box, an upper bound on `ρ(T)`.
pub fn arma_spectral_bound(t: &FilterSpec, grid_per_dim: Option<usize>) -> f64 {
    let intervals = t.family().intervals();
    let grid = grid_per_dim.unwrap_or_else(|| default_grid(intervals.len()));
    let (lo, hi) = grid_extrema_on(|p| t.response(p), &intervals, grid);
    lo.abs().max(hi.abs())
}

/// First-order ARMA recursion `x(m) = y − T x(m−1)` for `(I + T) x = y`.
///
/// Non-convergence is an outcome, not an error: the trace is marked
/// diverged when the spectral bound of `T` is at least one (the recursion is
/// then not a contraction) or when the residual guard trips.
pub fn arma_solve(t: &FilterSpec, y: &[f64], opts: &SolveOptions) -> Result<IterTrace> {
    arma_solve_bounded(t, y, opts, arma_spectral_bound(t, None))
}

/// [`arma_solve`] with the spectral bound of `T` supplied by the caller, for
/// repeated solves with one operator.
pub fn arma_solve_bounded(t: &FilterSpec, y: &[f64], opts: &SolveOptions, bound: f64) -> Result<IterTrace> {
    let n = t.n();
    check_len(n, y)?;
    let mut x = initial(n, opts)?;
    let mut rec = Recorder::new("ARMA", opts)?;
    for m in 0..=opts.max_iters {
        let tx = apply_filter(t, &x)?;
        let r = norm2(
            &x.iter()
                .zip(&tx)
                .zip(y)
                .map(|((a, b), c)| a + b - c)
                .collect::<Vec<_>>(),
        );
        rec.push_iterate(x.clone())?;
        if !rec.push_residual(r) || m == opts.max_iters {
            break;
        }
        if opts.residual_tol.is_some_and(|tol| r <= tol) {
            rec.trace.status = TraceStatus::Converged;
            break;
        }
        x = y.iter().zip(&tx).map(|(a, b)| a - b).collect();
    }
    if bound >= 1.0 && !rec.trace.diverged() {
        rec.trace.status = TraceStatus::Diverged {
            iteration: 0,
            growth: bound,
        };
    }
    Ok(rec.trace)
}

/// Parallel first-order ARMA sections for a univariate filter with real
/// roots, `h(t) = lead · Π (t − r_i)`. Partial fractions give
/// `1/h(t) = Σ A_i/(t − r_i)` with `A_i = 1/h'(r_i)`; section `i` iterates
/// `w_i ← (S w_i − A_i y)/r_i`, which converges iff `ρ(S) < |r_i|`.
pub fn arma_sections_solve(
    h: &FilterSpec,
    lead: f64,
    roots: &[f64],
    y: &[f64],
    opts: &SolveOptions,
) -> Result<IterTrace> {
    if h.family().len() != 1 {
        return Err(Error::InvalidInput("ARMA sections need a single shift".into()));
    }
    if roots.is_empty() || roots.iter().any(|r| *r == 0.0 || !r.is_finite()) {
        return Err(Error::InvalidInput("ARMA sections need finite nonzero roots".into()));
    }
    for (i, a) in roots.iter().enumerate() {
        if roots[..i].contains(a) {
            return Err(Error::InvalidInput("ARMA sections need distinct roots".into()));
        }
    }
    // the factored form must reproduce h
    let cube = h.poly().cube().clone();
    let iv = cube.interval(0);
    for k in 0..=8 {
        let t = iv.lo + (iv.hi - iv.lo) * k as f64 / 8.0;
        let factored = lead * roots.iter().map(|r| t - r).product::<f64>();
        let direct = h.response(&[t]);
        if (factored - direct).abs() > 1e-9 * direct.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "factored form differs from the filter at t = {t}: {factored} vs {direct}"
            )));
        }
    }
    let n = h.n();
    check_len(n, y)?;
    if opts.x0.is_some() {
        return Err(Error::InvalidInput("ARMA sections start from zero state".into()));
    }
    let weights: Vec<f64> = roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let deriv = lead
                * roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| r - q)
                    .product::<f64>();
            1.0 / deriv
        })
        .collect();
    let shift = h.family().shift(0);
    let mut sections = vec![vec![0.0; n]; roots.len()];
    let mut x = initial(n, opts)?;
    let mut rec = Recorder::new("ARMA", opts)?;
    for m in 0..=opts.max_iters {
        let hx = apply_filter(h, &x)?;
        let r = norm2(&hx.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
        rec.push_iterate(x.clone())?;
        if !rec.push_residual(r) || m == opts.max_iters {
            break;
        }
        for ((w, &root), &a) in sections.iter_mut().zip(roots).zip(&weights) {
            let sw = shift.apply(w);
            for ((wi, swi), yi) in w.iter_mut().zip(&sw).zip(y) {
                *wi = (swi - a * yi) / root;
            }
        }
        x = (0..n).map(|i| sections.iter().map(|w| w[i]).sum()).collect();
    }
    let rho = shift.interval().lo.abs().max(shift.interval().hi.abs());
    if let Some(r) = roots.iter().find(|r| rho >= r.abs()) {
        if !rec.trace.diverged() {
            rec.trace.status = TraceStatus::Diverged {
                iteration: 0,
                growth: rho / r.abs(),
            };
        }
    }
    Ok(rec.trace)
}

/// `b̃ = sup |1 − h·C|` on the approximant's cube, which bounds `ρ(I − C H)`.
pub fn contraction_bound(h: &FilterSpec, c: &FilterSpec, grid_per_dim: Option<usize>) -> Result<f64> {
    shared_shifts(h, c)?;
    let cube = c.poly().cube();
    let grid = grid_per_dim.unwrap_or_else(|| default_grid(cube.dims()));
    Ok(sup_error(|t| h.response(t), c.poly(), cube, grid))
}
