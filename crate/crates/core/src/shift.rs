//! Graph shifts: sparse symmetric matrices supported on a graph's vertices
//! and edges, each carrying an interval certified to contain its spectrum.
//!
//! Storage is row-oriented (CSR) so that vertex `i` owns row `i`; the
//! distributed simulator hands these rows to agents unchanged.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::BufRead;

use nalgebra::DMatrix;

use crate::cube::Interval;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest dimension accepted by [`SpectralMethod::DenseEig`].
pub const DENSE_EIG_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    /// `[0, 2]`, valid for symmetric normalized Laplacians (and their
    /// Kronecker lifts).
    AnalyticLaplacian,
    /// Union of Gershgorin discs.
    Gershgorin,
    /// `[λ_min, λ_max]` from a full symmetric eigensolve, `n <= DENSE_EIG_CAP`.
    DenseEig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    interval: Interval,
    normalized_laplacian: bool,
}

impl Shift {
    /// Assembles a shift from `(i, j, value)` triplets. Repeated positions are
    /// summed and explicit zeros dropped. The result must be exactly
    /// symmetric; its interval defaults to the Gershgorin enclosure.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("shift dimension must be positive".into()));
        }
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidEdge(i, j, "entry out of range"));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite entry at ({i}, {j})")));
            }
            *rows[i].entry(j).or_insert(0.0) += v;
        }
        let mut s = Self::from_rows(n, rows);
        for i in 0..n {
            let (cols, vals) = s.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if s.get(j, i) != v {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        s.interval = s.gershgorin();
        Ok(s)
    }

    fn from_rows(n: usize, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
            interval: Interval { lo: 0.0, hi: 0.0 },
            normalized_laplacian: false,
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        Shift::from_triplets(
            n,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j, m[(i, j)]))),
        )
    }

    pub fn identity(n: usize) -> Result<Self> {
        Shift::from_triplets(n, (0..n).map(|i| (i, i, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices (ascending) and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|p| vals[p]).unwrap_or(0.0)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn is_normalized_laplacian(&self) -> bool {
        self.normalized_laplacian
    }

    /// Replaces the stored spectral interval with one the caller has
    /// certified by other means (for example a closed-form spectrum).
    pub fn with_certified_interval(mut self, interval: Interval) -> Self {
        self.interval = interval;
        self
    }

    /// Recomputes and stores the interval with the given method.
    pub fn with_spectral_method(self, method: SpectralMethod) -> Result<Self> {
        let iv = self.spectral_interval(method)?;
        Ok(self.with_certified_interval(iv))
    }

    /// `out = S x`, accumulating each row in ascending column order.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n, "shift/vector dimension mismatch");
        assert_eq!(out.len(), self.n, "shift/output dimension mismatch");
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *o = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// True when every nonzero sits on the diagonal or on an edge of `g`.
    pub fn is_supported_on(&self, g: &Graph) -> bool {
        g.n() == self.n
            && (0..self.n).all(|i| self.row(i).0.iter().all(|&j| j == i || g.has_edge(i, j)))
    }

    fn gershgorin(&self) -> Interval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut diag = 0.0;
            let mut radius = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                if j == i {
                    diag = v;
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        Interval { lo, hi }
    }

    /// Enclosure of the spectrum by the requested method.
    pub fn spectral_interval(&self, method: SpectralMethod) -> Result<Interval> {
        match method {
            SpectralMethod::AnalyticLaplacian => {
                if self.normalized_laplacian {
                    Ok(Interval { lo: 0.0, hi: 2.0 })
                } else {
                    Err(Error::NotLaplacian)
                }
            }
            SpectralMethod::Gershgorin => Ok(self.gershgorin()),
            SpectralMethod::DenseEig => {
                let eig = self.dense_eigenvalues()?;
                let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Ok(Interval { lo, hi })
            }
        }
    }

    /// All eigenvalues, ascending, via a dense symmetric eigensolve.
    pub fn dense_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_EIG_CAP {
            return Err(Error::SizeCap {
                n: self.n,
                cap: DENSE_EIG_CAP,
            });
        }
        let mut eig: Vec<f64> = self.to_dense().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    /// Coordinate-format export: header `n μ ν`, then `i j value` per nonzero.
    pub fn to_coo(&self) -> String {
        let mut out = format!("{} {:.16e} {:.16e}\n", self.n, self.interval.lo, self.interval.hi);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let _ = writeln!(out, "{i} {j} {v:.16e}");
            }
        }
        out
    }

    pub fn read_coo(reader: impl BufRead) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = reader.lines().enumerate();
        let (n, lo, hi) = loop {
            let Some((no, line)) = lines.next() else {
                return Err(parse_err(0, "missing header".into()));
            };
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim().to_string();
            if body.is_empty() {
                continue;
            }
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(no + 1, "header must be `n mu nu`".into()));
            }
            let n: usize = f[0].parse().map_err(|e| parse_err(no + 1, format!("{e}")))?;
            let lo: f64 = f[1].parse().map_err(|e| parse_err(no + 1, format!("{e}")))?;
            let hi: f64 = f[2].parse().map_err(|e| parse_err(no + 1, format!("{e}")))?;
            break (n, lo, hi);
        };
        let mut triplets = Vec::new();
        for (no, line) in lines {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(no + 1, "entry must be `i j value`".into()));
            }
            let i: usize = f[0].parse().map_err(|e| parse_err(no + 1, format!("{e}")))?;
            let j: usize = f[1].parse().map_err(|e| parse_err(no + 1, format!("{e}")))?;
            let v: f64 = f[2].parse().map_err(|e| parse_err(no + 1, format!("{e}")))?;
            triplets.push((i, j, v));
        }
        Ok(Shift::from_triplets(n, triplets)?.with_certified_interval(Interval::new(lo, hi)?))
    }
}

/// `I − D^{-1/2} A D^{-1/2}` for the 0/1 adjacency of `g`, with interval `[0, 2]`.
pub fn sym_normalized_laplacian(g: &Graph) -> Result<Shift> {
    let n = g.n();
    if let Some(i) = (0..n).find(|&i| g.degree(i) == 0) {
        return Err(Error::DegreeZero(i));
    }
    let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for (i, row) in rows.iter_mut().enumerate() {
        row.insert(i, 1.0);
        for &j in g.neighbors(i) {
            row.insert(j, -1.0 / (deg[i] * deg[j]).sqrt());
        }
    }
    let mut s = Shift::from_rows(n, rows);
    s.interval = Interval { lo: 0.0, hi: 2.0 };
    s.normalized_laplacian = true;
    Ok(s)
}

/// Kronecker lifts `(I_p ⊗ right, left ⊗ I_q)` of a `p × p` and a `q × q`
/// shift. Vertex `(a, i)` of the product lives at index `a * q + i`; each
/// lifted shift keeps its factor's spectral interval.
pub fn kron_pair(left: &Shift, right: &Shift) -> (Shift, Shift) {
    let (p, q) = (left.n, right.n);
    let mut s1_rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); p * q];
    let mut s2_rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); p * q];
    for a in 0..p {
        for i in 0..q {
            let r = a * q + i;
            let (cols, vals) = right.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                s1_rows[r].insert(a * q + j, v);
            }
            let (cols, vals) = left.row(a);
            for (&b, &v) in cols.iter().zip(vals) {
                s2_rows[r].insert(b * q + i, v);
            }
        }
    }
    let mut s1 = Shift::from_rows(p * q, s1_rows);
    s1.interval = right.interval;
    s1.normalized_laplacian = right.normalized_laplacian;
    let mut s2 = Shift::from_rows(p * q, s2_rows);
    s2.interval = left.interval;
    s2.normalized_laplacian = left.normalized_laplacian;
    (s1, s2)
}

/// `‖AB − BA‖_F`, computed sparsely.
pub fn commutator_norm(a: &Shift, b: &Shift) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    let mut total = 0.0;
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for i in 0..a.n {
        acc.clear();
        let (ac, av) = a.row(i);
        for (&k, &x) in ac.iter().zip(av) {
            let (bc, bv) = b.row(k);
            for (&j, &y) in bc.iter().zip(bv) {
                *acc.entry(j).or_insert(0.0) += x * y;
            }
        }
        let (bc, bv) = b.row(i);
        for (&k, &x) in bc.iter().zip(bv) {
            let (ac, av) = a.row(k);
            for (&j, &y) in ac.iter().zip(av) {
                *acc.entry(j).or_insert(0.0) -= x * y;
            }
        }
        total += acc.values().map(|v| v * v).sum::<f64>();
    }
    Ok(total.sqrt())
}

pub fn check_commute(a: &Shift, b: &Shift, tol: f64) -> Result<bool> {
    Ok(commutator_norm(a, b)? <= tol)
}

/// Eigenvalues of the normalized Laplacian of C(N, Q) in DFT order:
/// `1 − |Q|^{-1} Σ_q cos(2πkq/N)`, `k = 0..N`.
pub fn circulant_laplacian_spectrum(n: usize, generators: &[usize]) -> Vec<f64> {
    let l = generators.len() as f64;
    (0..n)
        .map(|k| {
            let s: f64 = generators
                .iter()
                .map(|&q| (2.0 * PI * ((k * q) % n) as f64 / n as f64).cos())
                .sum();
            1.0 - s / l
        })
        .collect()
}

/// Tight spectral interval of the normalized Laplacian of C(N, Q).
pub fn circulant_laplacian_interval(n: usize, generators: &[usize]) -> Interval {
    let spec = circulant_laplacian_spectrum(n, generators);
    Interval {
        lo: spec.iter().copied().fold(f64::INFINITY, f64::min),
        hi: spec.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_circulant, build_path};

    fn dft_spectrum_sorted(n: usize, q: &[usize]) -> Vec<f64> {
        let mut v = circulant_laplacian_spectrum(n, q);
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn triangle_laplacian_spectrum() {
        let l = sym_normalized_laplacian(&build_circulant(3, &[1]).unwrap()).unwrap();
        let eig = l.dense_eigenvalues().unwrap();
        for (a, b) in eig.iter().zip([0.0, 1.5, 1.5]) {
            assert!((a - b).abs() < 1e-12, "{eig:?}");
        }
    }

    #[test]
    fn cycle_laplacian_matches_dft() {
        let l = sym_normalized_laplacian(&build_circulant(8, &[1]).unwrap()).unwrap();
        let eig = l.dense_eigenvalues().unwrap();
        let expect: Vec<f64> = {
            let mut v: Vec<f64> = (0..8).map(|k| 1.0 - (2.0 * PI * k as f64 / 8.0).cos()).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for (a, b) in eig.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let iv = l.spectral_interval(SpectralMethod::DenseEig).unwrap();
        assert!(iv.lo.abs() < 1e-12 && (iv.hi - 2.0).abs() < 1e-12);
        assert_eq!(l.spectral_interval(SpectralMethod::AnalyticLaplacian).unwrap(), Interval { lo: 0.0, hi: 2.0 });
    }

    #[test]
    fn circulant_spectrum_formula_matches_dense() {
        let q = [1, 2, 5];
        let l = sym_normalized_laplacian(&build_circulant(40, &q).unwrap()).unwrap();
        let eig = l.dense_eigenvalues().unwrap();
        for (a, b) in eig.iter().zip(dft_spectrum_sorted(40, &q)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_null_vector() {
        let g = build_path(7).unwrap();
        let l = sym_normalized_laplacian(&g).unwrap();
        let v: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).sqrt()).collect();
        let lv = l.apply(&v);
        assert!(lv.iter().all(|x| x.abs() < 1e-14));
        assert!(l.dense_eigenvalues().unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn laplacian_symmetric_and_supported() {
        let g = build_circulant(11, &[1, 4]).unwrap();
        let l = sym_normalized_laplacian(&g).unwrap();
        assert!(l.is_supported_on(&g));
        for i in 0..11 {
            for j in 0..11 {
                assert_eq!(l.get(i, j), l.get(j, i));
            }
        }
    }

    #[test]
    fn isolated_vertex_rejected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(sym_normalized_laplacian(&g), Err(Error::DegreeZero(2)));
    }

    #[test]
    fn gershgorin_identity() {
        let id = Shift::identity(5).unwrap();
        assert_eq!(id.spectral_interval(SpectralMethod::Gershgorin).unwrap(), Interval { lo: 1.0, hi: 1.0 });
        assert_eq!(id.spectral_interval(SpectralMethod::AnalyticLaplacian), Err(Error::NotLaplacian));
    }

    #[test]
    fn dense_eig_size_cap() {
        let big = Shift::identity(DENSE_EIG_CAP + 1).unwrap();
        assert!(matches!(big.spectral_interval(SpectralMethod::DenseEig), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn asymmetric_rejected() {
        assert!(matches!(
            Shift::from_triplets(2, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::NotSymmetric(..))
        ));
    }

    #[test]
    fn kron_of_scalars() {
        let a = Shift::from_triplets(1, [(0, 0, 3.0)]).unwrap();
        let b = Shift::from_triplets(1, [(0, 0, -2.0)]).unwrap();
        let (s1, s2) = kron_pair(&a, &b);
        assert_eq!(s1.get(0, 0), -2.0);
        assert_eq!(s2.get(0, 0), 3.0);
    }

    #[test]
    fn kron_mixed_product_entrywise() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, -0.25, 0.5, 2.0, 0.75, -0.25, 0.75, -1.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.3, -1.2, 0.0, -1.2, 0.7, 2.2, 0.0, 2.2, 1.1]);
        let sa = Shift::from_dense(&a).unwrap();
        let sb = Shift::from_dense(&b).unwrap();
        // left = B, right = A: S1 = I ⊗ A, S2 = B ⊗ I
        let (s1, s2) = kron_pair(&sb, &sa);
        let (d1, d2) = (s1.to_dense(), s2.to_dense());
        let expect = b.kronecker(&a);
        assert!((&d1 * &d2 - &expect).abs().max() < 1e-14);
        assert!((&d2 * &d1 - &expect).abs().max() < 1e-14);
    }

    #[test]
    fn kron_pair_commutes() {
        let lt = sym_normalized_laplacian(&build_path(3).unwrap()).unwrap();
        let lw = sym_normalized_laplacian(&build_circulant(3, &[1]).unwrap()).unwrap();
        let (s1, s2) = kron_pair(&lt, &lw);
        assert_eq!(s1.n(), 9);
        let (d1, d2) = (s1.to_dense(), s2.to_dense());
        assert!((&d1 * &d2 - &d2 * &d1).norm() < 1e-12);
        assert!(commutator_norm(&s1, &s2).unwrap() < 1e-12);
        assert!(check_commute(&s1, &s2, 1e-10).unwrap());
        assert!(check_commute(&s1, &s1, 0.0).unwrap());
        assert_eq!(s1.interval(), lw.interval());
        assert_eq!(s2.interval(), lt.interval());
    }

    #[test]
    fn non_commuting_pair_detected() {
        // path(3) Laplacian against the triangle Laplacian on the same 3 vertices
        let lp = sym_normalized_laplacian(&build_path(3).unwrap()).unwrap();
        let lc = sym_normalized_laplacian(&build_circulant(3, &[1]).unwrap()).unwrap();
        let dense = {
            let (a, b) = (lp.to_dense(), lc.to_dense());
            (&a * &b - &b * &a).norm()
        };
        let sparse = commutator_norm(&lp, &lc).unwrap();
        assert!((dense - sparse).abs() < 1e-12);
        assert!(dense > 1e-3);
        assert!(!check_commute(&lp, &lc, 1e-10).unwrap());
        let other = Shift::identity(4).unwrap();
        assert!(check_commute(&lp, &other, 1.0).is_err());
    }

    #[test]
    fn eigenvalues_inside_intervals() {
        let shifts = [
            sym_normalized_laplacian(&build_circulant(30, &[1, 2, 5]).unwrap()).unwrap(),
            sym_normalized_laplacian(&build_path(17).unwrap()).unwrap(),
            Shift::from_triplets(4, [(0, 1, 2.0), (1, 0, 2.0), (2, 2, -1.0), (3, 3, 0.5)]).unwrap(),
        ];
        for s in &shifts {
            for m in [SpectralMethod::Gershgorin, SpectralMethod::DenseEig] {
                let iv = s.spectral_interval(m).unwrap();
                for e in s.dense_eigenvalues().unwrap() {
                    assert!(e >= iv.lo - 1e-10 && e <= iv.hi + 1e-10);
                }
            }
        }
    }

    #[test]
    fn coo_round_trip() {
        let l = sym_normalized_laplacian(&build_circulant(9, &[2]).unwrap()).unwrap();
        let text = l.to_coo();
        assert!(text.starts_with("9 0.0000000000000000e0 2.0000000000000000e0"));
        let back = Shift::read_coo(text.as_bytes()).unwrap();
        assert_eq!(back.to_dense(), l.to_dense());
        assert_eq!(back.interval(), l.interval());
    }
}
