//! The experiments behind each subcommand. Every function returns plain data
//! plus a CSV rendering; writing files is left to [`crate::output`].

use std::fmt::Write as _;

use cipa_core::denoise::{
    denoise_sweep, point_cloud_text, product_family, sweep_csv, synth_dataset, DenoiseSolver, SweepConfig, SweepRow,
};
use cipa_core::distributed::{distribute, sim_cipa};
use cipa_core::filter::{interpolation_approximant, series_approximant};
use cipa_core::shift::circulant_laplacian_interval;
use cipa_core::solve::arma_sections_solve;
use cipa_core::{
    apply_filter, build_circulant, build_knn, build_path, chebyshev_series_reciprocal, cipa_solve, contraction_bound,
    cpa_solve, interpolate_reciprocal, ogda_solve, sup_error, sym_normalized_laplacian, Cube, Error, FilterSpec,
    MultiPoly, Result, ShiftFamily, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConvergenceConfig, DenoiseConfig, DistributedConfig, GraphGenConfig, Table1Config, Table2Config};

/// `h₁(t) = (9/4 − t)(3 + t) = 6.75 − 0.75 t − t²`.
pub const H1_MONOMIAL: [f64; 3] = [6.75, -0.75, -1.0];
/// `h₁ = −(t − 9/4)(t + 3)`.
pub const H1_LEAD: f64 = -1.0;
pub const H1_ROOTS: [f64; 2] = [2.25, -3.0];

pub fn h1(t: f64) -> f64 {
    (2.25 - t) * (3.0 + t)
}

/// Rows of values indexed by a shared column label.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn row(&self, name: &str) -> Option<&[f64]> {
        self.rows.iter().find(|r| r.0 == name).map(|r| r.1.as_slice())
    }

    pub fn to_csv(&self, first: &str) -> String {
        let mut out = format!("{first},{}\n", self.columns.join(","));
        for (name, vals) in &self.rows {
            let cells: Vec<String> = vals.iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(out, "{name},{}", cells.join(","));
        }
        out
    }
}

/// Sup-norm errors `max |1 − h₁ p|` on `[0, 2]` of the truncated Chebyshev
/// series and of the Chebyshev interpolant, for `M = 0..=max_degree`.
pub fn run_table1(cfg: &Table1Config) -> Result<Table> {
    let cube = Cube::uniform(1, 0.0, 2.0)?;
    let h = |t: &[f64]| h1(t[0]);
    let degrees = 0..=cfg.max_degree;
    let series = degrees
        .clone()
        .map(|m| Ok(sup_error(h, &chebyshev_series_reciprocal(h, &cube, m, cfg.quadrature)?, &cube, cfg.grid)))
        .collect::<Result<Vec<_>>>()?;
    let interp = degrees
        .clone()
        .map(|m| Ok(sup_error(h, &interpolate_reciprocal(h, &cube, m)?, &cube, cfg.grid)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: degrees.map(|m| format!("M={m}")).collect(),
        rows: vec![("ChebyPoly".into(), series), ("ChebyInt".into(), interp)],
    })
}

/// `H₁ = h₁(L)` on `C(n, Q)`. The Laplacian carries its exact spectral
/// interval from the circulant eigenvalue formula.
pub fn h1_circulant(n: usize, generators: &[usize]) -> Result<FilterSpec> {
    let g = build_circulant(n, generators)?;
    let s = sym_normalized_laplacian(&g)?.with_certified_interval(circulant_laplacian_interval(n, generators));
    let poly = MultiPoly::from_monomial(Cube::uniform(1, 0.0, 2.0)?, 2, &H1_MONOMIAL)?;
    FilterSpec::new(ShiftFamily::single(s), poly)
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform_signal(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, stream);
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

pub const TABLE2_ROWS: [&str; 4] = ["CPA", "CIPA", "OGDA", "ARMA"];

/// Mean relative errors `E(m)`, `m = 1..=iters`, of the four inverse
/// filtering schemes over `trials` random signals `x` with `y = H₁ x`.
/// Trial `k` draws from ChaCha stream `k` of `seed`.
pub fn run_table2(cfg: &Table2Config, seed: u64) -> Result<Table> {
    if cfg.trials == 0 || cfg.iters == 0 {
        return Err(Error::InvalidInput("table2 needs at least one trial and one iteration".into()));
    }
    let h = h1_circulant(cfg.n, &cfg.generators)?;
    let c_series = series_approximant(&h, cfg.degree, 64)?;
    let c_interp = interpolation_approximant(&h, cfg.degree)?;
    let per_trial: Vec<[Vec<f64>; 4]> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let x = uniform_signal(cfg.n, seed, trial as u64);
            let y = apply_filter(&h, &x)?;
            let opts = SolveOptions::new(cfg.iters).with_ground_truth(x);
            let traces = [
                cpa_solve(&h, &c_series, &y, &opts)?,
                cipa_solve(&h, &c_interp, &y, &opts)?,
                ogda_solve(&h, &y, &opts, None)?,
                arma_sections_solve(&h, H1_LEAD, &H1_ROOTS, &y, &opts)?,
            ];
            Ok(traces.map(|t| t.rel_errors.expect("ground truth was given")[1..].to_vec()))
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![vec![0.0; cfg.iters]; 4];
    for trial in &per_trial {
        for (row, errs) in sums.iter_mut().zip(trial) {
            for (s, e) in row.iter_mut().zip(errs) {
                *s += e;
            }
        }
    }
    let k = cfg.trials as f64;
    Ok(Table {
        columns: (1..=cfg.iters).map(|m| format!("m={m}")).collect(),
        rows: TABLE2_ROWS
            .iter()
            .zip(sums)
            .map(|(name, s)| (name.to_string(), s.into_iter().map(|v| v / k).collect()))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub algorithm: &'static str,
    pub degree: usize,
    pub iteration: usize,
    pub rel_error: f64,
    pub residual: f64,
    /// `b̃_M` of the approximant, the predicted per-iteration contraction.
    pub bound: f64,
}

/// Error and residual curves of CIPA and CPA for several degrees on one
/// random signal.
pub fn run_convergence(cfg: &ConvergenceConfig, seed: u64) -> Result<Vec<ConvergenceRow>> {
    let h = h1_circulant(cfg.n, &cfg.generators)?;
    let x = uniform_signal(cfg.n, seed, 0);
    let y = apply_filter(&h, &x)?;
    let opts = SolveOptions::new(cfg.iters).with_ground_truth(x);
    let mut rows = Vec::new();
    for &m in &cfg.degrees {
        for (name, c) in [
            ("CIPA", interpolation_approximant(&h, m)?),
            ("CPA", series_approximant(&h, m, 64)?),
        ] {
            let bound = contraction_bound(&h, &c, None)?;
            let trace = if name == "CIPA" {
                cipa_solve(&h, &c, &y, &opts)
            } else {
                cpa_solve(&h, &c, &y, &opts)
            };
            let trace = match trace {
                Ok(t) => t,
                Err(Error::Diverged { .. }) => continue,
                Err(e) => return Err(e),
            };
            let errs = trace.rel_errors.as_ref().expect("ground truth was given");
            for (it, (e, r)) in errs.iter().zip(&trace.residual_norms).enumerate() {
                rows.push(ConvergenceRow {
                    algorithm: name,
                    degree: m,
                    iteration: it,
                    rel_error: *e,
                    residual: *r,
                    bound,
                });
            }
        }
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("algorithm,M,m,rel_error,residual_norm,bound\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.12e},{:.12e},{:.12e}",
            r.algorithm, r.degree, r.iteration, r.rel_error, r.residual, r.bound
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedRow {
    pub n: usize,
    pub max_abs_deviation: f64,
    pub rounds: usize,
    pub messages: usize,
    pub per_agent_max_messages: usize,
    pub registers_per_agent: usize,
    pub max_row_entries: usize,
}

/// Vertex-level CIPA against the centralized solver on `C(n, Q)` for each
/// configured `n`. An empty size list yields an empty report.
pub fn run_distributed_check(cfg: &DistributedConfig, seed: u64) -> Result<Vec<DistributedRow>> {
    cfg.sizes
        .iter()
        .map(|&n| {
            let h = h1_circulant(n, &cfg.generators)?;
            let c = interpolation_approximant(&h, cfg.degree)?;
            let x = uniform_signal(n, seed, n as u64);
            let y = apply_filter(&h, &x)?;
            let central = cipa_solve(&h, &c, &y, &SolveOptions::new(cfg.iters))?;
            let mut net = distribute(&h, &c, &y)?;
            let sim = sim_cipa(&mut net, cfg.iters)?;
            let dev = sim
                .x
                .iter()
                .zip(central.last())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(DistributedRow {
                n,
                max_abs_deviation: dev,
                rounds: sim.ledger.rounds,
                messages: sim.ledger.messages,
                per_agent_max_messages: sim.ledger.per_agent_max_messages,
                registers_per_agent: net.registers_per_agent(),
                max_row_entries: net.agents().iter().map(|a| a.row_entries(0)).max().unwrap_or(0),
            })
        })
        .collect()
}

pub fn distributed_csv(rows: &[DistributedRow]) -> String {
    let mut out =
        String::from("n,max_abs_deviation,rounds,messages,per_agent_max_messages,registers_per_agent,max_row_entries\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.3e},{},{},{},{},{}",
            r.n,
            r.max_abs_deviation,
            r.rounds,
            r.messages,
            r.per_agent_max_messages,
            r.registers_per_agent,
            r.max_row_entries
        );
    }
    out
}

/// Denoising sweep on the synthetic product-graph data set, one block of rows
/// per configured solver.
pub fn run_denoise_sweep(cfg: &DenoiseConfig, seed: u64) -> Result<Vec<SweepRow>> {
    let ds = synth_dataset(cfg.t_len, cfg.n_points, cfg.k, cfg.smoothness, seed)?;
    let family = product_family(&ds.spatial, &ds.temporal)?;
    let mut rows = Vec::new();
    for name in &cfg.solvers {
        let sweep = SweepConfig {
            fractions: cfg.fractions.clone(),
            gamma1: cfg.gamma1.clone(),
            gamma2: cfg.gamma2.clone(),
            solver: DenoiseSolver::parse(name)?,
            degree: cfg.degree,
            iters: cfg.iters,
            trials: cfg.trials,
            seed,
        };
        rows.extend(denoise_sweep(&ds.signal, &family, &sweep)?);
    }
    Ok(rows)
}

pub fn denoise_csv(rows: &[SweepRow]) -> String {
    sweep_csv(rows)
}

/// Generated graph as an edge list, plus the point cloud for kNN graphs.
pub fn run_graph_gen(cfg: &GraphGenConfig, seed: u64) -> Result<(String, Option<String>)> {
    match cfg.kind.as_str() {
        "circulant" => Ok((build_circulant(cfg.n, &cfg.generators)?.to_edge_list(), None)),
        "path" => Ok((build_path(cfg.n)?.to_edge_list(), None)),
        "knn" => {
            if cfg.dim == 0 {
                return Err(Error::InvalidInput("point dimension must be positive".into()));
            }
            let mut rng = trial_rng(seed, 0);
            let pts: Vec<Vec<f64>> = (0..cfg.n).map(|_| (0..cfg.dim).map(|_| rng.random::<f64>()).collect()).collect();
            Ok((build_knn(&pts, cfg.k)?.to_edge_list(), Some(point_cloud_text(&pts))))
        }
        other => Err(Error::InvalidInput(format!("unknown graph kind {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_first_column() {
        let t = run_table1(&Table1Config {
            max_degree: 0,
            grid: 101,
            quadrature: 64,
        })
        .unwrap();
        assert!((t.row("ChebyInt").unwrap()[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn table2_is_reproducible() {
        let cfg = Table2Config {
            n: 50,
            trials: 4,
            ..Table2Config::default()
        };
        let a = run_table2(&cfg, 3).unwrap();
        assert_eq!(a, run_table2(&cfg, 3).unwrap());
        assert_ne!(a, run_table2(&cfg, 4).unwrap());
        assert_eq!(a.rows.len(), 4);
    }

    #[test]
    fn empty_distributed_list() {
        let cfg = DistributedConfig {
            sizes: vec![],
            ..DistributedConfig::default()
        };
        assert!(run_distributed_check(&cfg, 1).unwrap().is_empty());
    }

    #[test]
    fn graph_kinds() {
        let cfg = GraphGenConfig {
            kind: "knn".into(),
            n: 30,
            ..GraphGenConfig::default()
        };
        let (edges, pts) = run_graph_gen(&cfg, 1).unwrap();
        assert!(!edges.is_empty() && pts.is_some());
        let bad = GraphGenConfig {
            kind: "star".into(),
            ..GraphGenConfig::default()
        };
        assert!(run_graph_gen(&bad, 1).is_err());
    }
}
