//! Tikhonov denoising of time-varying signals on a time × space product graph.
//!
//! Each channel of a `T × n` signal is vectorized time-major (vertex `(t, i)`
//! at `t·n + i`) and denoised independently by solving
//! `(I + γ₁ S₁ + γ₂ S₂) ŵ = w̃`, where `S₁` is the spatial and `S₂` the
//! temporal normalized Laplacian lifted to the product.

use std::fmt::Write as _;
use std::io::BufRead;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cube::Cube;
use crate::error::{Error, Result};
use crate::filter::{interpolation_approximant, FilterSpec, ScaledIdentity, ShiftFamily};
use crate::graph::{build_knn, build_path, Graph};
use crate::poly::MultiPoly;
use crate::shift::{kron_pair, sym_normalized_laplacian, Shift, SpectralMethod, DENSE_EIG_CAP};
use crate::solve::{arma_solve_bounded, arma_spectral_bound, cipa_solve, ogda_step, quasi_newton_solve, SolveOptions};

/// Value reported for exact recovery.
pub const SNR_CAP: f64 = 300.0;
/// Plot floor, also used for diverged runs.
pub const SNR_FLOOR: f64 = -5.0;

/// `T × n × c` real tensor stored channel by channel; each channel is a
/// time-major vector of length `T·n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatioTemporalSignal {
    t_len: usize,
    n: usize,
    channels: usize,
    values: Vec<f64>,
}

impl SpatioTemporalSignal {
    pub fn new(t_len: usize, n: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if t_len == 0 || n == 0 || channels == 0 {
            return Err(Error::InvalidSize("signal dimensions must be positive".into()));
        }
        if values.len() != t_len * n * channels {
            return Err(Error::DimensionMismatch {
                expected: t_len * n * channels,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("signal has non-finite entries".into()));
        }
        Ok(Self {
            t_len,
            n,
            channels,
            values,
        })
    }

    pub fn zeros(t_len: usize, n: usize, channels: usize) -> Self {
        Self {
            t_len,
            n,
            channels,
            values: vec![0.0; t_len * n * channels],
        }
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Length of one vectorized channel.
    pub fn channel_len(&self) -> usize {
        self.t_len * self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn channel(&self, ch: usize) -> &[f64] {
        let len = self.channel_len();
        &self.values[ch * len..(ch + 1) * len]
    }

    pub fn channel_mut(&mut self, ch: usize) -> &mut [f64] {
        let len = self.channel_len();
        &mut self.values[ch * len..(ch + 1) * len]
    }

    /// `W(t, i)` in channel `ch`.
    pub fn get(&self, ch: usize, t: usize, i: usize) -> f64 {
        self.values[ch * self.channel_len() + t * self.n + i]
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Text form: a `T n c` header line, then one value per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.t_len, self.n, self.channels);
        for v in &self.values {
            let _ = writeln!(out, "{v:.17e}");
        }
        out
    }

    pub fn read_text(reader: impl BufRead) -> Result<Self> {
        let tokens = numeric_tokens(reader)?;
        let header = header(&tokens, 3)?;
        let (t_len, n, c) = (header[0], header[1], header[2]);
        let values = tokens[3..].iter().map(|(_, v)| *v).collect();
        Self::new(t_len, n, c, values)
    }
}

fn numeric_tokens(reader: impl BufRead) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: no + 1,
                message: format!("not a number: {tok}"),
            })?;
            out.push((no + 1, v));
        }
    }
    Ok(out)
}

fn header(tokens: &[(usize, f64)], count: usize) -> Result<Vec<usize>> {
    if tokens.len() < count {
        return Err(Error::Parse {
            line: tokens.last().map_or(1, |t| t.0),
            message: format!("expected a header of {count} integers"),
        });
    }
    tokens[..count]
        .iter()
        .map(|&(line, v)| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Parse {
                    line,
                    message: format!("header value {v} is not a count"),
                })
            }
        })
        .collect()
}

/// Point cloud text: an `n d` header, then `n·d` coordinates.
pub fn read_point_cloud(reader: impl BufRead) -> Result<Vec<Vec<f64>>> {
    let tokens = numeric_tokens(reader)?;
    let h = header(&tokens, 2)?;
    let (n, d) = (h[0], h[1]);
    if d == 0 || tokens.len() - 2 != n * d {
        return Err(Error::DimensionMismatch {
            expected: n * d,
            found: tokens.len() - 2,
        });
    }
    Ok(tokens[2..].chunks(d).map(|c| c.iter().map(|t| t.1).collect()).collect())
}

pub fn point_cloud_text(points: &[Vec<f64>]) -> String {
    let d = points.first().map_or(0, Vec::len);
    let mut out = format!("{} {d}\n", points.len());
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Normalized Laplacians of both factors lifted to the product, as the
/// family `(S₁, S₂) = (I ⊗ L_space, L_time ⊗ I)`. Factor intervals are
/// computed by dense eigensolves when the factor is small enough.
pub fn product_family(spatial: &Graph, temporal: &Graph) -> Result<ShiftFamily> {
    let tight = |g: &Graph| -> Result<Shift> {
        let l = sym_normalized_laplacian(g)?;
        if g.n() <= DENSE_EIG_CAP {
            l.with_spectral_method(SpectralMethod::DenseEig)
        } else {
            Ok(l)
        }
    };
    let (s1, s2) = kron_pair(&tight(temporal)?, &tight(spatial)?);
    ShiftFamily::new(vec![s1, s2])
}

fn check_penalty(g: f64) -> Result<()> {
    if g >= 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPenalty(g))
    }
}

/// `h(t₁, t₂) = 1 + γ₁ t₁ + γ₂ t₂` on `[0, 2]²`.
pub fn tikhonov_filterspec(gamma1: f64, gamma2: f64, family: &ShiftFamily) -> Result<FilterSpec> {
    check_penalty(gamma1)?;
    check_penalty(gamma2)?;
    let poly = MultiPoly::affine(Cube::uniform(2, 0.0, 2.0)?, 1.0, &[gamma1, gamma2])?;
    FilterSpec::new(family.clone(), poly)
}

/// `T = γ₁ S₁ + γ₂ S₂`, the feedback operator of the first-order ARMA
/// recursion for the same system.
pub fn tikhonov_feedback(gamma1: f64, gamma2: f64, family: &ShiftFamily) -> Result<FilterSpec> {
    check_penalty(gamma1)?;
    check_penalty(gamma2)?;
    let poly = MultiPoly::affine(Cube::uniform(2, 0.0, 2.0)?, 0.0, &[gamma1, gamma2])?;
    FilterSpec::new(family.clone(), poly)
}

/// Adds `λη` with `η` i.i.d. standard normal and
/// `λ = fraction·‖W‖_F/√(T·n·c)`.
pub fn add_noise(w: &SpatioTemporalSignal, fraction: f64, seed: u64) -> Result<SpatioTemporalSignal> {
    add_noise_stream(w, fraction, seed, 0)
}

/// [`add_noise`] drawing from ChaCha stream `stream` of `seed`, so that
/// trial `k` of an experiment gets an independent reproducible draw.
pub fn add_noise_stream(w: &SpatioTemporalSignal, fraction: f64, seed: u64, stream: u64) -> Result<SpatioTemporalSignal> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("noise fraction {fraction} outside (0, 1]")));
    }
    let norm = w.frobenius();
    if norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let lambda = fraction * norm / (w.values.len() as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let values = w
        .values
        .iter()
        .map(|v| {
            let eta: f64 = rng.sample(StandardNormal);
            v + lambda * eta
        })
        .collect();
    Ok(SpatioTemporalSignal { values, ..w.clone() })
}

/// `−20 log₁₀(‖ŵ − w‖₂/‖w‖₂)`, capped at [`SNR_CAP`].
pub fn snr(w_hat: &[f64], w: &[f64]) -> Result<f64> {
    if w_hat.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: w_hat.len(),
        });
    }
    let ref_norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ref_norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err = w_hat.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if err == 0.0 {
        return Ok(SNR_CAP);
    }
    Ok((-20.0 * (err / ref_norm).log10()).min(SNR_CAP))
}

/// Synthetic data set: points, graphs and the clean signal.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub spatial: Graph,
    pub temporal: Graph,
    pub signal: SpatioTemporalSignal,
}

/// `(I + s L)⁻²` for the normalized Laplacian of `g`, as a dense matrix.
fn smoother(g: &Graph, s: f64) -> Result<DMatrix<f64>> {
    let l = sym_normalized_laplacian(g)?.to_dense();
    let a = DMatrix::identity(g.n(), g.n()) + l * s;
    let lu = a.lu();
    let once = lu
        .solve(&DMatrix::identity(g.n(), g.n()))
        .ok_or_else(|| Error::InvalidInput("smoothing system is singular".into()))?;
    Ok(lu.solve(&once).expect("factorization already succeeded"))
}

/// Uniform random points in `[0, 1]³`, their symmetrized kNN graph, a path in
/// time and a 3-channel signal obtained by low-pass filtering white noise
/// with `(I + s L)⁻²` along both factors, rescaled to the noise's norm.
pub fn synth_dataset(t_len: usize, n_points: usize, k: usize, smoothness: f64, seed: u64) -> Result<Dataset> {
    if t_len < 2 {
        return Err(Error::InvalidSize("time length must be at least 2".into()));
    }
    if n_points <= k {
        return Err(Error::InvalidSize(format!("need more than k = {k} points, got {n_points}")));
    }
    if !(smoothness >= 0.0 && smoothness.is_finite()) {
        return Err(Error::InvalidInput(format!("smoothness {smoothness} must be finite and nonnegative")));
    }
    if n_points > DENSE_EIG_CAP || t_len > DENSE_EIG_CAP {
        return Err(Error::SizeCap {
            n: n_points.max(t_len),
            cap: DENSE_EIG_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n_points)
        .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
        .collect();
    let spatial = build_knn(&points, k)?;
    let temporal = build_path(t_len)?;
    let channels = 3;
    let mut signal = SpatioTemporalSignal::zeros(t_len, n_points, channels);
    let smooth = if smoothness > 0.0 {
        Some((smoother(&temporal, smoothness)?, smoother(&spatial, smoothness)?))
    } else {
        None
    };
    for ch in 0..channels {
        let z = DMatrix::from_fn(t_len, n_points, |_, _| rng.sample::<f64, _>(StandardNormal));
        let w = match &smooth {
            Some((ft, fw)) => {
                let w = ft * &z * fw.transpose();
                let scale = z.norm() / w.norm();
                w * scale
            }
            None => z,
        };
        let out = signal.channel_mut(ch);
        for t in 0..t_len {
            for i in 0..n_points {
                out[t * n_points + i] = w[(t, i)];
            }
        }
    }
    Ok(Dataset {
        points,
        spatial,
        temporal,
        signal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenoiseSolver {
    Cipa,
    Ogda,
    Arma,
}

impl DenoiseSolver {
    pub fn name(self) -> &'static str {
        match self {
            DenoiseSolver::Cipa => "cipa",
            DenoiseSolver::Ogda => "ogda",
            DenoiseSolver::Arma => "arma",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cipa" => Ok(DenoiseSolver::Cipa),
            "ogda" => Ok(DenoiseSolver::Ogda),
            "arma" => Ok(DenoiseSolver::Arma),
            other => Err(Error::InvalidInput(format!("unknown solver {other}"))),
        }
    }
}

enum Prepared {
    Cipa(FilterSpec),
    Ogda(ScaledIdentity),
    Arma { feedback: FilterSpec, bound: f64 },
}

/// One penalty pair and solver, set up once and applied to many signals.
pub struct Denoiser {
    h: FilterSpec,
    prepared: Prepared,
    opts: SolveOptions,
}

impl Denoiser {
    pub fn new(family: &ShiftFamily, gamma: (f64, f64), solver: DenoiseSolver, degree: usize, iters: usize) -> Result<Self> {
        if family.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: family.len(),
            });
        }
        let h = tikhonov_filterspec(gamma.0, gamma.1, family)?;
        let prepared = match solver {
            DenoiseSolver::Cipa => Prepared::Cipa(interpolation_approximant(&h, degree)?),
            DenoiseSolver::Ogda => Prepared::Ogda(ScaledIdentity {
                n: h.n(),
                scale: ogda_step(&h, None)?,
            }),
            DenoiseSolver::Arma => {
                let feedback = tikhonov_feedback(gamma.0, gamma.1, family)?;
                let bound = arma_spectral_bound(&feedback, None);
                Prepared::Arma { feedback, bound }
            }
        };
        Ok(Self {
            h,
            prepared,
            opts: SolveOptions::new(iters),
        })
    }

    /// Denoised signal, or `None` when the solver diverged.
    pub fn run(&self, noisy: &SpatioTemporalSignal) -> Result<Option<SpatioTemporalSignal>> {
        if self.h.n() != noisy.channel_len() {
            return Err(Error::DimensionMismatch {
                expected: noisy.channel_len(),
                found: self.h.n(),
            });
        }
        let mut out = noisy.clone();
        for ch in 0..noisy.channels() {
            let y = noisy.channel(ch);
            let result = match &self.prepared {
                Prepared::Cipa(c) => cipa_solve(&self.h, c, y, &self.opts),
                Prepared::Ogda(g) => quasi_newton_solve("OGDA", &self.h, g, y, &self.opts),
                Prepared::Arma { feedback, bound } => arma_solve_bounded(feedback, y, &self.opts, *bound),
            };
            let trace = match result {
                Ok(t) if t.diverged() => return Ok(None),
                Ok(t) => t,
                Err(Error::Diverged { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            out.channel_mut(ch).copy_from_slice(trace.last());
        }
        Ok(Some(out))
    }
}

/// Denoised signal, or `None` when the solver diverged.
pub fn denoise(
    noisy: &SpatioTemporalSignal,
    family: &ShiftFamily,
    gamma: (f64, f64),
    solver: DenoiseSolver,
    degree: usize,
    iters: usize,
) -> Result<Option<SpatioTemporalSignal>> {
    Denoiser::new(family, gamma, solver, degree, iters)?.run(noisy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub fractions: Vec<f64>,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub solver: DenoiseSolver,
    pub degree: usize,
    pub iters: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma1: f64,
    pub gamma2: f64,
    pub fraction: f64,
    pub solver: DenoiseSolver,
    pub degree: usize,
    pub iters: usize,
    /// Mean over trials of `max(SNR, −5)`; diverged trials count as −5.
    pub mean_snr: f64,
    pub mean_input_snr: f64,
    pub diverged: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Mean floored output SNR over noisy trials for every grid point. Trial `k`
/// uses noise stream `k` of `seed` at every grid point, so rows are
/// comparable across penalties.
pub fn denoise_sweep(clean: &SpatioTemporalSignal, family: &ShiftFamily, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.trials == 0 || cfg.fractions.is_empty() || cfg.gamma1.is_empty() || cfg.gamma2.is_empty() {
        return Err(Error::InvalidInput("sweep grid and trial count must be nonempty".into()));
    }
    for &g in cfg.gamma1.iter().chain(&cfg.gamma2) {
        check_penalty(g)?;
    }
    let mut points = Vec::new();
    for &f in &cfg.fractions {
        for &g1 in &cfg.gamma1 {
            for &g2 in &cfg.gamma2 {
                points.push((f, g1, g2));
            }
        }
    }
    let noisy: Vec<Vec<SpatioTemporalSignal>> = cfg
        .fractions
        .iter()
        .map(|&f| {
            (0..cfg.trials)
                .map(|k| add_noise_stream(clean, f, cfg.seed, k as u64))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    points
        .par_iter()
        .map(|&(f, g1, g2)| {
            let fi = cfg.fractions.iter().position(|&x| x == f).expect("fraction from grid");
            let mut total = 0.0;
            let mut input = 0.0;
            let mut diverged = 0;
            let denoiser = Denoiser::new(family, (g1, g2), cfg.solver, cfg.degree, cfg.iters)?;
            for w_noisy in &noisy[fi] {
                input += snr(w_noisy.values(), clean.values())?;
                let s = match denoiser.run(w_noisy)? {
                    Some(w_hat) => snr(w_hat.values(), clean.values())?.max(SNR_FLOOR),
                    None => {
                        diverged += 1;
                        SNR_FLOOR
                    }
                };
                total += s;
            }
            Ok(SweepRow {
                gamma1: g1,
                gamma2: g2,
                fraction: f,
                solver: cfg.solver,
                degree: cfg.degree,
                iters: cfg.iters,
                mean_snr: total / cfg.trials as f64,
                mean_input_snr: input / cfg.trials as f64,
                diverged,
                trials: cfg.trials,
                seed: cfg.seed,
            })
        })
        .collect()
}

/// CSV with columns `gamma1,gamma2,solver,M,m,mean_snr,trials,seed,fraction,input_snr,diverged`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("gamma1,gamma2,solver,M,m,mean_snr,trials,seed,fraction,input_snr,diverged\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6},{},{},{},{:.6},{}",
            r.gamma1,
            r.gamma2,
            r.solver.name(),
            r.degree,
            r.iters,
            r.mean_snr,
            r.trials,
            r.seed,
            r.fraction,
            r.mean_input_snr,
            r.diverged
        );
    }
    out
}

/// `zᵀ S z` summed over channels.
pub fn quadratic_form(shift: &Shift, w: &SpatioTemporalSignal) -> f64 {
    (0..w.channels())
        .map(|ch| {
            let z = w.channel(ch);
            shift.apply(z).iter().zip(z).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum()
}
