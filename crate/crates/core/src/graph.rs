//! Simple undirected graphs and the generators used by the experiments.
//!
//! Vertices are `0..n`. Adjacency is kept as sorted neighbor lists so that
//! every consumer iterates neighbors in increasing index order.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Unweighted simple graph: no self-loops, no multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicates
    /// (in either orientation) and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("graph needs at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        let mut neighbors = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidEdge(i, j, "endpoint out of range"));
            }
            if i == j {
                return Err(Error::InvalidEdge(i, j, "self-loop"));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidEdge(i, j, "duplicate edge"));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for row in &mut neighbors {
            row.sort_unstable();
        }
        Ok(Self { n, neighbors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, row) in self.neighbors.iter().enumerate() {
            out.extend(row.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Cartesian product with vertex `(a, i)` stored at index `a * right.n() + i`.
    pub fn cartesian_product(left: &Graph, right: &Graph) -> Graph {
        let q = right.n;
        let mut edges = Vec::new();
        for a in 0..left.n {
            for (i, j) in right.edges() {
                edges.push((a * q + i, a * q + j));
            }
        }
        for (a, b) in left.edges() {
            for i in 0..q {
                edges.push((a * q + i, b * q + i));
            }
        }
        Graph::from_edges(left.n * q, edges).expect("product of simple graphs is simple")
    }

    /// Parses the whitespace separated `i j` edge-list format. Lines starting
    /// with `#` (or trailing `# ...`) are comments. When `n` is not given the
    /// vertex count is one more than the largest index seen.
    pub fn read_edge_list(reader: impl BufRead, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut fields = body.split_whitespace();
            let mut next = || -> Result<usize> {
                fields
                    .next()
                    .ok_or_else(|| Error::Parse {
                        line: lineno + 1,
                        message: "expected two vertex indices".into(),
                    })?
                    .parse()
                    .map_err(|e| Error::Parse {
                        line: lineno + 1,
                        message: format!("{e}"),
                    })
            };
            let (i, j) = (next()?, next()?);
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "trailing fields after edge".into(),
                });
            }
            edges.push((i, j));
        }
        let inferred = edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
        let n = n.unwrap_or(inferred);
        Graph::from_edges(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n = {} edges = {}\n", self.n, self.edge_count());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

/// Circulant graph C(N, Q): vertex `i` joined to `i ± q mod N` for each `q`.
pub fn build_circulant(n: usize, generators: &[usize]) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("circulant graph needs N >= 3, got {n}")));
    }
    if generators.is_empty() {
        return Err(Error::InvalidInput("circulant generator set is empty".into()));
    }
    let mut seen = BTreeSet::new();
    for &q in generators {
        if q == 0 || 2 * q >= n {
            return Err(Error::InvalidGenerator {
                n,
                generator: q,
                reason: "generator must lie in [1, N/2)",
            });
        }
        if !seen.insert(q) {
            return Err(Error::InvalidGenerator {
                n,
                generator: q,
                reason: "duplicate generator",
            });
        }
    }
    let edges = (0..n).flat_map(|i| generators.iter().map(move |&q| (i, (i + q) % n)));
    Graph::from_edges(n, edges)
}

/// Path graph on `n` vertices.
pub fn build_path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("path graph needs n >= 2, got {n}")));
    }
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)))
}

/// Symmetrized k-nearest-neighbor graph (edge if either endpoint selects the
/// other). Distance ties are broken towards the lower index.
pub fn build_knn(points: &[Vec<f64>], k: usize) -> Result<Graph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidInput("kNN graph needs at least two points".into()));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("k = {k} must satisfy 1 <= k < {n}")));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    let dist2 = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };

    let mut edges = BTreeSet::new();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i).map(|j| (dist2(&points[i], &points[j]), j)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in order.iter().take(k) {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    Graph::from_edges(n, edges)
}
