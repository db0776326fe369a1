//! Experiment runner for `cipa-core`: reproduces the approximation and
//! iteration tables, the distributed check and the denoising sweep.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use cipa_core::Result;

use config::ExperimentConfig;
use experiments::{
    convergence_csv, denoise_csv, distributed_csv, run_convergence, run_denoise_sweep, run_distributed_check,
    run_graph_gen, run_table1, run_table2,
};

pub const EXPERIMENTS: [&str; 6] = ["table1", "table2", "convergence", "distributed-check", "denoise-sweep", "graph-gen"];

/// Command line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub degree: Option<usize>,
    pub iters: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(t) = self.trials {
            cfg.table2.trials = t;
            cfg.denoise.trials = t;
        }
        if let Some(m) = self.degree {
            cfg.table1.max_degree = m;
            cfg.table2.degree = m;
            cfg.convergence.degrees = vec![m];
            cfg.distributed.degree = m;
            cfg.denoise.degree = m;
        }
        if let Some(i) = self.iters {
            cfg.table2.iters = i;
            cfg.convergence.iters = i;
            cfg.distributed.iters = i;
            cfg.denoise.iters = i;
        }
    }
}

/// What a run produced: named file contents and a short human summary.
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub warnings: Vec<String>,
}

pub fn run(experiment: &str, cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut warnings = Vec::new();
    let (files, summary) = match experiment {
        "table1" => {
            let csv = run_table1(&cfg.table1)?.to_csv("method");
            (vec![("table1.csv".into(), csv.clone())], csv)
        }
        "table2" => {
            let csv = run_table2(&cfg.table2, cfg.seed)?.to_csv("algorithm");
            (vec![("table2.csv".into(), csv.clone())], csv)
        }
        "convergence" => {
            let rows = run_convergence(&cfg.convergence, cfg.seed)?;
            let summary = format!("{} rows", rows.len());
            (vec![("convergence.csv".into(), convergence_csv(&rows))], summary)
        }
        "distributed-check" => {
            if cfg.distributed.sizes.is_empty() {
                warnings.push("no graph sizes configured, nothing to check".to_string());
            }
            let csv = distributed_csv(&run_distributed_check(&cfg.distributed, cfg.seed)?);
            (vec![("distributed_check.csv".into(), csv.clone())], csv)
        }
        "denoise-sweep" => {
            let rows = run_denoise_sweep(&cfg.denoise, cfg.seed)?;
            let summary = format!("{} grid points", rows.len());
            (vec![("denoise_sweep.csv".into(), denoise_csv(&rows))], summary)
        }
        "graph-gen" => {
            let (edges, points) = run_graph_gen(&cfg.graph, cfg.seed)?;
            let mut files = vec![("graph.edges".to_string(), edges)];
            if let Some(p) = points {
                files.push(("points.txt".into(), p));
            }
            (files, format!("{} graph on {} vertices", cfg.graph.kind, cfg.graph.n))
        }
        other => {
            return Err(cipa_core::Error::InvalidInput(format!("unknown experiment {other}")));
        }
    };
    Ok(RunOutput {
        files,
        summary,
        warnings,
    })
}

/// Process exit status for an error category.
pub fn exit_code(category: &str) -> i32 {
    match category {
        "invalid-input" => 2,
        "dimension" => 3,
        "shift" => 4,
        "size-cap" => 5,
        "numeric" => 6,
        "divergence" => 7,
        "parse" => 8,
        "io" => 9,
        _ => 1,
    }
}
