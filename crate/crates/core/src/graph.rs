//! Sparse graph storage, Laplacians and spectral diagnostics.
//!
//! Graphs are undirected, unweighted and stored in canonical CSR form:
//! every edge appears in both rows, columns within a row are strictly
//! increasing and self-loops are never stored. All products iterate row
//! entries in ascending column order, so results are bitwise reproducible.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest graph `dense_spectrum` accepts unless the caller raises the cap.
pub const DEFAULT_SPECTRUM_CAP: usize = 2000;

/// Node label. Anomalies are the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Normal,
    Anomaly,
    Unknown,
}

impl Label {
    pub fn is_known(self) -> bool {
        self != Label::Unknown
    }

    /// 1.0 for anomalies, 0.0 for normal nodes, `None` when unlabeled.
    pub fn as_target(self) -> Option<f64> {
        match self {
            Label::Normal => Some(0.0),
            Label::Anomaly => Some(1.0),
            Label::Unknown => None,
        }
    }

    pub fn from_binary(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Normal),
            1 => Some(Label::Anomaly),
            _ => None,
        }
    }
}

/// Per-node labels, indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector(pub Vec<Label>);

impl LabelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Label {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.iter().copied()
    }

    /// Builds a fully labeled vector from 0/1 flags.
    pub fn from_flags(flags: &[bool]) -> Self {
        LabelVector(
            flags
                .iter()
                .map(|&a| if a { Label::Anomaly } else { Label::Normal })
                .collect(),
        )
    }

    /// (normal count, anomaly count)
    pub fn class_counts(&self) -> (usize, usize) {
        self.0.iter().fold((0, 0), |(n, a), l| match l {
            Label::Normal => (n + 1, a),
            Label::Anomaly => (n, a + 1),
            Label::Unknown => (n, a),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplacianKind {
    /// D - A
    Unnormalized,
    /// I - D^{-1/2} A D^{-1/2}
    SymNormalized,
}

/// Immutable undirected graph in canonical CSR form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl SparseGraph {
    /// Builds the canonical graph from an arbitrary edge list. Duplicates and
    /// reversed copies collapse into one undirected edge; self-loops are dropped.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{num_nodes}"
                )));
            }
            if u == v {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut row_offsets = Vec::with_capacity(num_nodes + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for mut row in adj {
            row.sort_unstable();
            row.dedup();
            col_indices.extend_from_slice(&row);
            row_offsets.push(col_indices.len());
        }
        Ok(SparseGraph {
            num_nodes,
            row_offsets,
            col_indices,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.col_indices.len() / 2
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row_offsets[v + 1] - self.row_offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_nodes).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Undirected edges as (u, v) with u < v, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Copy of the graph keeping only edges for which `keep(u, v)` holds (u < v).
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> SparseGraph {
        let kept: Vec<(usize, usize)> = self.edges().filter(|&(u, v)| keep(u, v)).collect();
        SparseGraph::from_edges(self.num_nodes, &kept).expect("ids already validated")
    }

    /// Dense 0/1 adjacency, for tests and small diagnostics.
    pub fn to_dense_adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.num_nodes, self.num_nodes));
        for u in 0..self.num_nodes {
            for &v in self.neighbors(u) {
                a[[u, v]] = 1.0;
            }
        }
        a
    }

    /// Sparse Laplacian of the requested kind, diagonal included.
    ///
    /// For the normalized kind an isolated node gets a unit diagonal and no
    /// off-diagonal entries, keeping the spectrum inside [0, 2].
    pub fn laplacian(&self, kind: LaplacianKind) -> SparseMatrix {
        let n = self.num_nodes;
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|v| match self.degree(v) {
                0 => 0.0,
                d => 1.0 / (d as f64).sqrt(),
            })
            .collect();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::with_capacity(self.col_indices.len() + n);
        let mut values = Vec::with_capacity(self.col_indices.len() + n);
        row_offsets.push(0);
        for u in 0..n {
            let deg = self.degree(u);
            let diag = match kind {
                LaplacianKind::Unnormalized => deg as f64,
                LaplacianKind::SymNormalized => 1.0,
            };
            let mut diag_done = false;
            for &v in self.neighbors(u) {
                if !diag_done && v > u {
                    col_indices.push(u);
                    values.push(diag);
                    diag_done = true;
                }
                col_indices.push(v);
                values.push(match kind {
                    LaplacianKind::Unnormalized => -1.0,
                    LaplacianKind::SymNormalized => -inv_sqrt[u] * inv_sqrt[v],
                });
            }
            if !diag_done {
                col_indices.push(u);
                values.push(diag);
            }
            row_offsets.push(col_indices.len());
        }
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Row-normalized adjacency D^{-1} A; isolated nodes get an empty row.
    pub fn mean_adjacency(&self) -> SparseMatrix {
        let mut values = Vec::with_capacity(self.col_indices.len());
        for u in 0..self.num_nodes {
            let w = 1.0 / self.degree(u).max(1) as f64;
            values.extend(std::iter::repeat_n(w, self.degree(u)));
        }
        SparseMatrix {
            nrows: self.num_nodes,
            ncols: self.num_nodes,
            row_offsets: self.row_offsets.clone(),
            col_indices: self.col_indices.clone(),
            values,
        }
    }
}

/// Real-valued CSR matrix. Columns within a row are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from per-row (column, value) lists. Rows are sorted and
    /// duplicate columns summed.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let nrows = rows.len();
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if c >= ncols {
                    return Err(Error::invalid(format!("column {c} out of range {ncols}")));
                }
                if !v.is_finite() {
                    return Err(Error::InvalidValue(format!("sparse entry in column {c}")));
                }
                if col_indices.len() > *row_offsets.last().unwrap()
                    && *col_indices.last().unwrap() == c
                {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.nrows, self.ncols));
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[[i, j]] = v;
            }
        }
        d
    }

    /// `S * M`, accumulating each output row in ascending column order.
    pub fn spmm(&self, m: ArrayView2<f64>) -> Result<Array2<f64>> {
        if m.nrows() != self.ncols {
            return Err(Error::invalid(format!(
                "spmm shape mismatch: {}x{} times {}x{}",
                self.nrows,
                self.ncols,
                m.nrows(),
                m.ncols()
            )));
        }
        let mut out = Array2::zeros((self.nrows, m.ncols()));
        for (i, mut out_row) in out.rows_mut().into_iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out_row.scaled_add(v, &m.row(j));
            }
        }
        Ok(out)
    }

    /// `Sᵀ * M` without materializing the transpose. Rows of `S` are visited in
    /// ascending order, so each output row accumulates in a fixed order.
    pub fn spmm_transpose(&self, m: ArrayView2<f64>) -> Result<Array2<f64>> {
        if m.nrows() != self.nrows {
            return Err(Error::invalid(format!(
                "transposed spmm shape mismatch: ({}x{})ᵀ times {}x{}",
                self.nrows,
                self.ncols,
                m.nrows(),
                m.ncols()
            )));
        }
        let mut out = Array2::zeros((self.ncols, m.ncols()));
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let src = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out.row_mut(j).scaled_add(v, &src);
            }
        }
        Ok(out)
    }

    /// Quadratic form xᵀ S x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                let sx: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
                x[i] * sx
            })
            .sum()
    }
}

/// Per-node and whole-graph heterophily.
#[derive(Debug, Clone, PartialEq)]
pub struct Heterophily {
    /// Fraction of labeled neighbors carrying a different label; `None` when
    /// the node is unlabeled or has no labeled neighbor.
    pub per_node: Vec<Option<f64>>,
    /// Fraction of labeled edges whose endpoints disagree.
    pub graph: f64,
}

/// Heterophily of every node and of the whole graph. Only edges with both
/// endpoints labeled contribute.
pub fn heterophily(g: &SparseGraph, labels: &LabelVector) -> Result<Heterophily> {
    if labels.len() != g.num_nodes() {
        return Err(Error::invalid(format!(
            "{} labels for {} nodes",
            labels.len(),
            g.num_nodes()
        )));
    }
    let per_node = (0..g.num_nodes())
        .map(|v| {
            let lv = labels.get(v);
            if !lv.is_known() {
                return None;
            }
            let (mut total, mut differ) = (0usize, 0usize);
            for &u in g.neighbors(v) {
                let lu = labels.get(u);
                if lu.is_known() {
                    total += 1;
                    differ += usize::from(lu != lv);
                }
            }
            (total > 0).then(|| differ as f64 / total as f64)
        })
        .collect();
    let (mut total, mut differ) = (0usize, 0usize);
    for (u, v) in g.edges() {
        let (lu, lv) = (labels.get(u), labels.get(v));
        if lu.is_known() && lv.is_known() {
            total += 1;
            differ += usize::from(lu != lv);
        }
    }
    if total == 0 {
        return Err(Error::EmptyDenominator(
            "graph has no edge with both endpoints labeled".into(),
        ));
    }
    Ok(Heterophily {
        per_node,
        graph: differ as f64 / total as f64,
    })
}

fn check_signal(g: &SparseGraph, x: &[f64]) -> Result<f64> {
    if x.len() != g.num_nodes() {
        return Err(Error::invalid(format!(
            "signal of length {} on {} nodes",
            x.len(),
            g.num_nodes()
        )));
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::invalid("Rayleigh quotient of a zero signal"));
    }
    Ok(norm2)
}

/// Rayleigh quotient xᵀLx / xᵀx through the sparse quadratic form.
pub fn rayleigh_quotient(g: &SparseGraph, x: &[f64], kind: LaplacianKind) -> Result<f64> {
    let norm2 = check_signal(g, x)?;
    Ok(g.laplacian(kind).quadratic_form(x) / norm2)
}

/// Rayleigh quotient as a sum of squared differences over ordered edge pairs,
/// divided by 2·Σx². For the normalized kind each endpoint is scaled by
/// 1/√deg and isolated nodes contribute their own squared value.
pub fn rayleigh_edge_sum(g: &SparseGraph, x: &[f64], kind: LaplacianKind) -> Result<f64> {
    let norm2 = check_signal(g, x)?;
    let scaled: Vec<f64> = match kind {
        LaplacianKind::Unnormalized => x.to_vec(),
        LaplacianKind::SymNormalized => (0..g.num_nodes())
            .map(|v| match g.degree(v) {
                0 => 0.0,
                d => x[v] / (d as f64).sqrt(),
            })
            .collect(),
    };
    let mut num = 0.0;
    for u in 0..g.num_nodes() {
        for &v in g.neighbors(u) {
            let d = scaled[u] - scaled[v];
            num += d * d;
        }
    }
    let mut isolated = 0.0;
    if kind == LaplacianKind::SymNormalized {
        isolated = (0..g.num_nodes())
            .filter(|&v| g.degree(v) == 0)
            .map(|v| x[v] * x[v])
            .sum();
    }
    Ok(num / (2.0 * norm2) + isolated / norm2)
}

/// Full eigendecomposition of a Laplacian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector of `eigenvalues[i]`.
    pub eigenvectors: Array2<f64>,
}

impl Spectrum {
    /// Graph Fourier transform Uᵀx.
    pub fn transform(&self, x: &[f64]) -> Array1<f64> {
        self.eigenvectors.t().dot(&Array1::from(x.to_vec()))
    }
}

/// Dense symmetric eigendecomposition of the Laplacian. Diagnostic only.
pub fn dense_spectrum(g: &SparseGraph, kind: LaplacianKind, cap: usize) -> Result<Spectrum> {
    let n = g.num_nodes();
    if n > cap {
        return Err(Error::TooLarge(format!(
            "dense spectrum of {n} nodes exceeds cap {cap}"
        )));
    }
    let lap = g.laplacian(kind);
    let dense = DMatrix::from_fn(n, n, |i, j| lap.get(i, j));
    let eig = nalgebra::SymmetricEigen::new(dense);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[[row, col]] = eig.eigenvectors[(row, k)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Cumulative share of signal energy below each eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEnergyProfile {
    pub eigenvalues: Vec<f64>,
    /// η_k = Σ_{i≤k} x̃ᵢ² / Σ x̃ᵢ²; non-decreasing and ending at 1.
    pub cumulative: Vec<f64>,
}

impl SpectralEnergyProfile {
    /// Area under the accumulation curve between λ_1 and λ_N.
    pub fn area(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .zip(&self.cumulative)
            .map(|(w, eta)| (w[1] - w[0]) * eta)
            .sum()
    }

    /// Rayleigh quotient recovered by summation by parts: λ_N − area.
    pub fn rayleigh_quotient(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0) - self.area()
    }
}

pub fn spectral_energy_profile(
    g: &SparseGraph,
    x: &[f64],
    kind: LaplacianKind,
    cap: usize,
) -> Result<SpectralEnergyProfile> {
    check_signal(g, x)?;
    let spectrum = dense_spectrum(g, kind, cap)?;
    Ok(energy_profile_from(&spectrum, x))
}

pub fn energy_profile_from(spectrum: &Spectrum, x: &[f64]) -> SpectralEnergyProfile {
    let coeffs = spectrum.transform(x);
    let total: f64 = coeffs.iter().map(|c| c * c).sum();
    let mut acc = 0.0;
    let mut cumulative: Vec<f64> = coeffs
        .iter()
        .map(|c| {
            acc += c * c;
            (acc / total).min(1.0)
        })
        .collect();
    if let Some(last) = cumulative.last_mut() {
        *last = 1.0;
    }
    SpectralEnergyProfile {
        eigenvalues: spectrum.eigenvalues.clone(),
        cumulative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn path2() -> SparseGraph {
        SparseGraph::from_edges(2, &[(0, 1)]).unwrap()
    }

    fn triangle() -> SparseGraph {
        SparseGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn single_edge_degrees() {
        assert_eq!(path2().degrees(), vec![1, 1]);
    }

    #[test]
    fn canonicalizes_duplicates_and_self_loops() {
        let g = SparseGraph::from_edges(3, &[(0, 1), (1, 0), (2, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 1, 0]);
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn rejects_out_of_range_ids() {
        assert!(matches!(
            SparseGraph::from_edges(2, &[(0, 2)]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn path2_laplacians() {
        let expect = array![[1.0, -1.0], [-1.0, 1.0]];
        assert_eq!(path2().laplacian(LaplacianKind::Unnormalized).to_dense(), expect);
        assert_eq!(path2().laplacian(LaplacianKind::SymNormalized).to_dense(), expect);
    }

    #[test]
    fn isolated_node_gets_unit_normalized_diagonal() {
        let g = SparseGraph::from_edges(3, &[(0, 1)]).unwrap();
        let l = g.laplacian(LaplacianKind::SymNormalized);
        assert_eq!(l.get(2, 2), 1.0);
        assert_eq!(l.row(2).0, &[2]);
        let lu = g.laplacian(LaplacianKind::Unnormalized);
        assert_eq!(lu.get(2, 2), 0.0);
    }

    #[test]
    fn spmm_identity_and_nullspace() {
        let m = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        assert_eq!(SparseMatrix::identity(3).spmm(m.view()).unwrap(), m);
        let l = path2().laplacian(LaplacianKind::Unnormalized);
        let out = l.spmm(array![[1.0], [1.0]].view()).unwrap();
        assert_eq!(out, array![[0.0], [0.0]]);
        assert!(l.spmm(m.view()).is_err());
    }

    #[test]
    fn spmm_transpose_matches_dense() {
        let s = SparseMatrix::from_rows(3, vec![vec![(2, 1.5), (0, -1.0)], vec![], vec![(1, 2.0)]])
            .unwrap();
        let m = array![[1.0, 0.5], [2.0, -1.0], [0.25, 4.0]];
        let expect = s.to_dense().t().dot(&m);
        assert_eq!(s.spmm_transpose(m.view()).unwrap(), expect);
    }

    #[test]
    fn from_rows_sums_duplicate_columns() {
        let s = SparseMatrix::from_rows(2, vec![vec![(1, 1.0), (0, 2.0), (1, 0.5)]]).unwrap();
        assert_eq!(s.row(0), (&[0usize, 1][..], &[2.0, 1.5][..]));
    }

    #[test]
    fn heterophily_examples() {
        let t = triangle();
        let all_normal = LabelVector(vec![Label::Normal; 3]);
        assert_eq!(heterophily(&t, &all_normal).unwrap().graph, 0.0);

        let star = SparseGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let labels = LabelVector::from_flags(&[true, false, false, false, false]);
        let h = heterophily(&star, &labels).unwrap();
        assert_eq!(h.per_node[0], Some(1.0));
        assert_eq!(h.graph, 1.0);
    }

    #[test]
    fn heterophily_skips_unlabeled() {
        let g = SparseGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let labels = LabelVector(vec![Label::Normal, Label::Anomaly, Label::Unknown, Label::Normal]);
        let h = heterophily(&g, &labels).unwrap();
        assert_eq!(h.graph, 1.0);
        assert_eq!(h.per_node[2], None);
        assert_eq!(h.per_node[3], None);
        assert_eq!(h.per_node[1], Some(1.0));

        let iso = SparseGraph::from_edges(2, &[]).unwrap();
        let r = heterophily(&iso, &LabelVector(vec![Label::Normal; 2]));
        assert!(matches!(r, Err(Error::EmptyDenominator(_))));
    }

    #[test]
    fn rayleigh_examples() {
        let t = triangle();
        let q = rayleigh_quotient(&t, &[3.0, 3.0, 3.0], LaplacianKind::Unnormalized).unwrap();
        assert_eq!(q, 0.0);
        let q = rayleigh_quotient(&path2(), &[1.0, -1.0], LaplacianKind::Unnormalized).unwrap();
        assert_eq!(q, 2.0);
        assert!(rayleigh_quotient(&t, &[0.0; 3], LaplacianKind::Unnormalized).is_err());
    }

    #[test]
    fn path2_normalized_spectrum() {
        let s = dense_spectrum(&path2(), LaplacianKind::SymNormalized, 10).unwrap();
        assert!((s.eigenvalues[0] - 0.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-12);
        assert!(matches!(
            dense_spectrum(&triangle(), LaplacianKind::SymNormalized, 2),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn energy_profile_of_constant_signal_sits_at_zero() {
        let p = spectral_energy_profile(&triangle(), &[1.0; 3], LaplacianKind::SymNormalized, 10)
            .unwrap();
        assert!((p.cumulative[0] - 1.0).abs() < 1e-12);
        assert!(p.rayleigh_quotient().abs() < 1e-12);
    }
}
