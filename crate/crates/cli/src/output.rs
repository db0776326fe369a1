//! Writing run artifacts: the CSV outputs, a manifest and a plot script.
//!
//! The manifest records the canonical configuration, the seed, a content hash
//! of the inputs and the hash of every output. It carries no timestamps, so a
//! rerun from the same manifest reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cipa_core::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Git-style blob hash: `sha256("blob <len>\0" ‖ content)`, hex encoded.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub input_hash: String,
    pub outputs: BTreeMap<String, String>,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| cipa_core::Error::Parse {
            line: 0,
            message: e.message().to_string(),
        })
    }
}

/// Writes `files` into `dir` together with `manifest.toml` and, when given,
/// a plot script. Returns the paths written.
pub fn write_run(
    dir: &Path,
    experiment: &str,
    cfg: &ExperimentConfig,
    files: &[(String, String)],
    plot: Option<(String, String)>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut outputs = BTreeMap::new();
    for (name, content) in files.iter().chain(plot.iter()) {
        let path = dir.join(name);
        fs::write(&path, content)?;
        outputs.insert(name.clone(), blob_hash(content.as_bytes()));
        written.push(path);
    }
    let manifest = Manifest {
        experiment: experiment.to_string(),
        seed: cfg.seed,
        input_hash: blob_hash(cfg.to_toml().as_bytes()),
        outputs,
        config: cfg.clone(),
    };
    let path = dir.join("manifest.toml");
    fs::write(&path, toml::to_string(&manifest).expect("manifest serializes"))?;
    written.push(path);
    Ok(written)
}

/// A matplotlib script that redraws the figure from the CSV next to it.
pub fn plot_script(experiment: &str) -> Option<(String, String)> {
    let body = match experiment {
        "table1" => {
            r#"import csv
import matplotlib.pyplot as plt

with open("table1.csv") as f:
    rows = list(csv.reader(f))
degrees = [c.split("=")[1] for c in rows[0][1:]]
for row in rows[1:]:
    plt.semilogy(degrees, [float(v) for v in row[1:]], marker="o", label=row[0])
plt.xlabel("M")
plt.ylabel("max |1 - h p|")
plt.legend()
plt.savefig("table1.png", dpi=150)
"#
        }
        "table2" => {
            r#"import csv
import matplotlib.pyplot as plt

with open("table2.csv") as f:
    rows = list(csv.reader(f))
iters = [c.split("=")[1] for c in rows[0][1:]]
for row in rows[1:]:
    plt.semilogy(iters, [float(v) for v in row[1:]], marker="o", label=row[0])
plt.xlabel("m")
plt.ylabel("mean relative error")
plt.legend()
plt.savefig("table2.png", dpi=150)
"#
        }
        "convergence" => {
            r#"import csv
from collections import defaultdict
import matplotlib.pyplot as plt

curves = defaultdict(list)
with open("convergence.csv") as f:
    for r in csv.DictReader(f):
        curves[(r["algorithm"], r["M"])].append((int(r["m"]), float(r["rel_error"])))
for (alg, m), pts in sorted(curves.items()):
    plt.semilogy([p[0] for p in pts], [p[1] for p in pts], label=f"{alg} M={m}")
plt.xlabel("m")
plt.ylabel("relative error")
plt.legend()
plt.savefig("convergence.png", dpi=150)
"#
        }
        "denoise-sweep" => {
            r#"import csv
from collections import defaultdict
import matplotlib.pyplot as plt

grids = defaultdict(dict)
with open("denoise_sweep.csv") as f:
    for r in csv.DictReader(f):
        grids[(r["solver"], r["fraction"])][(float(r["gamma1"]), float(r["gamma2"]))] = float(r["mean_snr"])
fig, axes = plt.subplots(1, len(grids), figsize=(5 * len(grids), 4), squeeze=False)
for ax, ((solver, frac), cells) in zip(axes[0], sorted(grids.items())):
    g1 = sorted({k[0] for k in cells})
    g2 = sorted({k[1] for k in cells})
    z = [[cells[(a, b)] for a in g1] for b in g2]
    im = ax.imshow(z, origin="lower", extent=(g1[0], g1[-1], g2[0], g2[-1]), vmin=-5)
    ax.set_title(f"{solver}, noise {frac}")
    ax.set_xlabel("gamma1")
    ax.set_ylabel("gamma2")
    fig.colorbar(im, ax=ax)
fig.savefig("denoise_sweep.png", dpi=150)
"#
        }
        _ => return None,
    };
    Some((format!("plot_{}.py", experiment.replace('-', "_")), body.to_string()))
}
