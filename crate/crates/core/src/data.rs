//! Dataset ingestion, planted-anomaly generation, splits and persistence.
//!
//! File formats:
//!
//! * edges: one `src,dst` pair of 0-based node ids per line.
//! * labels: `node_id,label` lines with label 0 (normal) or 1 (anomaly);
//!   ids that never appear are unlabeled.
//! * features: CSV with one row of decimals per node, or the binary layout
//!   `b"SGFD"`, u64 LE rows, u64 LE cols, then `rows * cols` f32 LE values in
//!   row-major order.
//!
//! Lines starting with `#` are comments in every text format.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Label, LabelVector, SparseGraph};

pub const BINARY_MAGIC: &[u8; 4] = b"SGFD";

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graph: SparseGraph,
    pub features: Array2<f64>,
    pub labels: LabelVector,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        graph: SparseGraph,
        features: Array2<f64>,
        labels: LabelVector,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if features.nrows() != n || labels.len() != n {
            return Err(Error::Schema(format!(
                "graph has {n} nodes, features {} rows, labels {} entries",
                features.nrows(),
                labels.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("feature matrix".into()));
        }
        Ok(Dataset {
            name: name.into(),
            graph,
            features,
            labels,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    /// Binary anomaly flags; unlabeled nodes read as normal.
    pub fn anomaly_flags(&self) -> Vec<bool> {
        self.labels.iter().map(|l| l == Label::Anomaly).collect()
    }
}

/// Share of anomaly edge endpoints whose other end is a normal node, i.e. the
/// degree-weighted heterophily of the anomalies.
pub fn anomaly_side_heterophily(g: &SparseGraph, labels: &LabelVector) -> Option<f64> {
    let (mut stubs, mut hetero) = (0usize, 0usize);
    for v in (0..g.num_nodes()).filter(|&v| labels.get(v) == Label::Anomaly) {
        stubs += g.degree(v);
        hetero += g.neighbors(v).iter().filter(|&&u| labels.get(u) == Label::Normal).count();
    }
    (stubs > 0).then(|| hetero as f64 / stubs as f64)
}

/// Planted-anomaly graph generator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub num_nodes: usize,
    pub anomaly_rate: f64,
    pub feature_dim: usize,
    /// Anomaly features are drawn around `mean_shift · 1`.
    pub mean_shift: f64,
    pub mean_degree: f64,
    /// Probability that an edge started by an anomaly lands on a normal node.
    pub anomaly_heterophily: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_nodes: 2000,
            anomaly_rate: 0.05,
            feature_dim: 16,
            mean_shift: 0.5,
            mean_degree: 10.0,
            anomaly_heterophily: 0.9,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn num_anomalies(&self) -> usize {
        (self.num_nodes as f64 * self.anomaly_rate).floor() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.anomaly_rate > 0.0 && self.anomaly_rate < 0.5) {
            return Err(Error::invalid(format!(
                "anomaly_rate {} outside (0, 0.5)",
                self.anomaly_rate
            )));
        }
        if self.mean_degree < 2.0 {
            return Err(Error::invalid("mean_degree must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.anomaly_heterophily) {
            return Err(Error::invalid("anomaly_heterophily outside [0, 1]"));
        }
        if self.feature_dim == 0 {
            return Err(Error::invalid("feature_dim must be positive"));
        }
        let anomalies = self.num_anomalies();
        if anomalies == 0 {
            return Err(Error::invalid(format!(
                "{} nodes at rate {} yield no anomalies",
                self.num_nodes, self.anomaly_rate
            )));
        }
        if anomalies < 2 && self.anomaly_heterophily < 1.0 {
            return Err(Error::invalid("anomaly-anomaly edges need at least two anomalies"));
        }
        if self.mean_degree >= (self.num_nodes - anomalies) as f64 - 1.0 {
            return Err(Error::invalid(format!(
                "mean degree {} infeasible for {} normal nodes",
                self.mean_degree,
                self.num_nodes - anomalies
            )));
        }
        Ok(())
    }
}

/// Draws a planted-anomaly dataset.
///
/// Edges come from stub matching, so every node gets about `mean_degree`
/// stubs whatever its class. Each anomaly stub is wired to a normal stub with
/// probability `anomaly_heterophily` and to another anomaly stub otherwise;
/// the remaining normal stubs pair among themselves. Self pairs are dropped
/// and parallel pairs merge.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<Dataset> {
    cfg.validate()?;
    let n = cfg.num_nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n_anom = cfg.num_anomalies();
    let mut is_anomaly = vec![false; n];
    for &v in &order[..n_anom] {
        is_anomaly[v] = true;
    }

    let total_stubs = 2 * (n as f64 * cfg.mean_degree / 2.0).round() as usize;
    order.shuffle(&mut rng);
    let mut stubs = vec![total_stubs / n; n];
    for &v in &order[..total_stubs % n] {
        stubs[v] += 1;
    }
    let (mut hetero, mut homo, mut normal) = (Vec::new(), Vec::new(), Vec::new());
    for v in 0..n {
        for _ in 0..stubs[v] {
            if !is_anomaly[v] {
                normal.push(v);
            } else if rng.random::<f64>() < cfg.anomaly_heterophily {
                hetero.push(v);
            } else {
                homo.push(v);
            }
        }
    }
    if homo.len() % 2 == 1 {
        hetero.extend(homo.pop());
    }
    if hetero.len() > normal.len() {
        return Err(Error::invalid("not enough normal stubs for the anomaly edges"));
    }
    hetero.shuffle(&mut rng);
    homo.shuffle(&mut rng);
    normal.shuffle(&mut rng);
    let (cross, rest) = normal.split_at(hetero.len());
    let mut edges: Vec<(usize, usize)> = hetero.iter().copied().zip(cross.iter().copied()).collect();
    edges.extend(homo.chunks_exact(2).map(|p| (p[0], p[1])));
    edges.extend(rest.chunks_exact(2).map(|p| (p[0], p[1])));
    let graph = SparseGraph::from_edges(n, &edges)?;

    let mut features = Array2::zeros((n, cfg.feature_dim));
    for v in 0..n {
        let shift = if is_anomaly[v] { cfg.mean_shift } else { 0.0 };
        for j in 0..cfg.feature_dim {
            let z: f64 = rng.sample(StandardNormal);
            features[[v, j]] = z + shift;
        }
    }
    Dataset::new(
        format!("synthetic-{}-{}", n, cfg.seed),
        graph,
        features,
        LabelVector::from_flags(&is_anomaly),
    )
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_pair(path: &Path, line: usize, text: &str) -> Result<(usize, usize)> {
    let bad = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut parts = text.split(',').map(str::trim);
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(bad(format!("expected two comma-separated fields, got {text:?}")));
    };
    let a = a.parse().map_err(|e| bad(format!("{a:?}: {e}")))?;
    let b = b.parse().map_err(|e| bad(format!("{b:?}: {e}")))?;
    Ok((a, b))
}

pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = read_text(path)?;
    data_lines(&text)
        .map(|(line, l)| parse_pair(path, line, l))
        .collect()
}

/// Raw `(node, label)` entries.
pub fn read_labels(path: &Path) -> Result<Vec<(usize, Label)>> {
    let text = read_text(path)?;
    data_lines(&text)
        .map(|(line, l)| {
            let (node, value) = parse_pair(path, line, l)?;
            let label = u8::try_from(value)
                .ok()
                .and_then(Label::from_binary)
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("label {value} is not 0 or 1"),
                })?;
            Ok((node, label))
        })
        .collect()
}

fn labels_to_vector(entries: &[(usize, Label)], n: usize) -> Result<LabelVector> {
    let mut labels = vec![Label::Unknown; n];
    for &(node, label) in entries {
        if node >= n {
            return Err(Error::Schema(format!(
                "label for node {node} but only {n} nodes"
            )));
        }
        labels[node] = label;
    }
    Ok(LabelVector(labels))
}

/// Reads CSV or binary features, detected from the magic bytes.
pub fn read_features(path: &Path) -> Result<Array2<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(BINARY_MAGIC) {
        return decode_binary_features(path, &bytes);
    }
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: format!("not UTF-8 and no binary magic: {e}"),
    })?;
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, l) in data_lines(&text) {
        let row: Vec<f64> = l
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("{f:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected {c} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    Array2::from_shape_vec((rows, cols.unwrap_or(0)), values)
        .map_err(|e| Error::Internal(format!("feature reshape: {e}")))
}

fn decode_binary_features(path: &Path, bytes: &[u8]) -> Result<Array2<f64>> {
    let header = |at: usize| -> Result<u64> {
        let raw = bytes.get(at..at + 8).ok_or_else(|| {
            Error::Schema(format!("{}: truncated binary header", path.display()))
        })?;
        Ok(u64::from_le_bytes(raw.try_into().expect("8-byte slice")))
    };
    let rows = header(4)? as usize;
    let cols = header(12)? as usize;
    let body = &bytes[20..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::Schema(format!("{}: header size overflows", path.display())))?;
    if body.len() != expected {
        return Err(Error::Schema(format!(
            "{}: {rows}x{cols} f32 payload needs {expected} bytes, found {}",
            path.display(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")) as f64)
        .collect();
    Array2::from_shape_vec((rows, cols), values)
        .map_err(|e| Error::Internal(format!("feature reshape: {e}")))
}

pub fn encode_binary_features(features: &Array2<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + features.len() * 4);
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(features.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(features.ncols() as u64).to_le_bytes());
    for v in features.iter() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn encode_csv_features(features: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in features.outer_iter() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn encode_edges(g: &SparseGraph) -> String {
    g.edges().map(|(u, v)| format!("{u},{v}\n")).collect()
}

pub fn encode_labels(labels: &LabelVector) -> String {
    labels
        .iter()
        .enumerate()
        .filter_map(|(v, l)| match l {
            Label::Normal => Some(format!("{v},0\n")),
            Label::Anomaly => Some(format!("{v},1\n")),
            Label::Unknown => None,
        })
        .collect()
}

/// Loads a dataset. The feature matrix fixes the node count; edge or label ids
/// beyond it are a schema error.
pub fn load_dataset(edges_path: &Path, features_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let features = read_features(features_path)?;
    let n = features.nrows();
    let edges = read_edges(edges_path)?;
    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
        return Err(Error::Schema(format!(
            "edge ({u}, {v}) but the feature file has {n} rows"
        )));
    }
    let labels = labels_to_vector(&read_labels(labels_path)?, n)?;
    let graph = SparseGraph::from_edges(n, &edges)?;
    let name = features_path
        .parent()
        .and_then(|p| p.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, graph, features, labels)
}

/// Loads only structure and labels; the node count is the largest id seen plus one
/// unless given.
pub fn load_graph_and_labels(
    edges_path: &Path,
    labels_path: &Path,
    num_nodes: Option<usize>,
) -> Result<(SparseGraph, LabelVector)> {
    let edges = read_edges(edges_path)?;
    let entries = read_labels(labels_path)?;
    let inferred = edges
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .chain(entries.iter().map(|&(v, _)| v))
        .max()
        .map_or(0, |m| m + 1);
    let n = num_nodes.unwrap_or(inferred);
    if inferred > n {
        return Err(Error::Schema(format!("node id {} beyond {n} nodes", inferred - 1)));
    }
    Ok((SparseGraph::from_edges(n, &edges)?, labels_to_vector(&entries, n)?))
}

/// Writes `edges.csv`, `labels.csv` and `features.csv` (or `features.bin`).
pub fn save_dataset(dataset: &Dataset, dir: &Path, binary_features: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, bytes: &[u8]| {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(path, e))
    };
    write("edges.csv", encode_edges(&dataset.graph).as_bytes())?;
    write("labels.csv", encode_labels(&dataset.labels).as_bytes())?;
    if binary_features {
        write("features.bin", &encode_binary_features(&dataset.features))
    } else {
        write("features.csv", encode_csv_features(&dataset.features).as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMasks {
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub test: Vec<bool>,
}

impl SplitMasks {
    pub fn count(mask: &[bool]) -> usize {
        mask.iter().filter(|&&m| m).count()
    }
}

/// Seeded train/val/test split of the labeled nodes. With `stratified`, each
/// class is split separately with counts rounded to the nearest node; the test
/// split takes the remainder.
pub fn make_split(
    labels: &LabelVector,
    fractions: (f64, f64, f64),
    seed: u64,
    stratified: bool,
) -> Result<SplitMasks> {
    let (ft, fv, fs) = fractions;
    if [ft, fv, fs].iter().any(|f| !(0.0..=1.0).contains(f)) || ((ft + fv + fs) - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "split fractions {fractions:?} must be in [0, 1] and sum to 1"
        )));
    }
    let normals: Vec<usize> = (0..labels.len()).filter(|&v| labels.get(v) == Label::Normal).collect();
    let anomalies: Vec<usize> = (0..labels.len()).filter(|&v| labels.get(v) == Label::Anomaly).collect();
    for (name, members) in [("normal", &normals), ("anomaly", &anomalies)] {
        if members.len() < 3 {
            return Err(Error::invalid(format!(
                "{name} class has {} labeled nodes, need at least 3",
                members.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = labels.len();
    let mut masks = SplitMasks {
        train: vec![false; n],
        val: vec![false; n],
        test: vec![false; n],
    };
    let mut assign = |mut members: Vec<usize>, rng: &mut ChaCha8Rng| {
        members.shuffle(rng);
        let total = members.len();
        let n_train = ((total as f64 * ft).round() as usize).min(total);
        let n_val = ((total as f64 * fv).round() as usize).min(total - n_train);
        for (i, v) in members.into_iter().enumerate() {
            if i < n_train {
                masks.train[v] = true;
            } else if i < n_train + n_val {
                masks.val[v] = true;
            } else {
                masks.test[v] = true;
            }
        }
    };
    if stratified {
        assign(normals, &mut rng);
        assign(anomalies, &mut rng);
    } else {
        let mut all = normals;
        all.extend(anomalies);
        all.sort_unstable();
        assign(all, &mut rng);
    }
    Ok(masks)
}

/// Per-dimension z-score transform fitted on a node subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    /// Fits on the rows selected by `mask`; constant dimensions keep unit scale.
    pub fn fit(features: &Array2<f64>, mask: &[bool]) -> Result<Self> {
        let rows: Vec<usize> = (0..features.nrows()).filter(|&i| mask[i]).collect();
        if rows.is_empty() {
            return Err(Error::invalid("cannot fit scaler on an empty mask"));
        }
        let m = rows.len() as f64;
        let d = features.ncols();
        let mut mean = vec![0.0; d];
        let mut std = vec![0.0; d];
        for j in 0..d {
            mean[j] = rows.iter().map(|&i| features[[i, j]]).sum::<f64>() / m;
            let var = rows
                .iter()
                .map(|&i| (features[[i, j]] - mean[j]).powi(2))
                .sum::<f64>()
                / m;
            std[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Ok(FeatureScaler { mean, std })
    }

    pub fn transform(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        if features.ncols() != self.mean.len() {
            return Err(Error::invalid(format!(
                "scaler fitted on {} dims, got {}",
                self.mean.len(),
                features.ncols()
            )));
        }
        let mut out = features.clone();
        for mut row in out.outer_iter_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.std[j];
            }
        }
        Ok(out)
    }
}

/// Anything persisted as a JSON artifact must hold finite numbers only.
pub trait FiniteCheck {
    /// Name of the first non-finite field, if any.
    fn first_non_finite(&self) -> Option<String>;
}

pub fn to_json<T: Serialize + FiniteCheck>(value: &T) -> Result<String> {
    if let Some(field) = value.first_non_finite() {
        return Err(Error::InvalidValue(field));
    }
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Serde(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn save_json<T: Serialize + FiniteCheck>(value: &T, path: &Path) -> Result<()> {
    let body = to_json(value)?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Serde(format!("{}: {e}", path.display())))
}

pub fn save_report(report: &crate::train::MetricsReport, path: &Path) -> Result<()> {
    save_json(report, path)
}

pub fn load_report(path: &Path) -> Result<crate::train::MetricsReport> {
    load_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels_100_10() -> LabelVector {
        let flags: Vec<bool> = (0..100).map(|i| i % 10 == 3).collect();
        LabelVector::from_flags(&flags)
    }

    #[test]
    fn stratified_split_counts() {
        let labels = labels_100_10();
        let s = make_split(&labels, (0.4, 0.2, 0.4), 1, true).unwrap();
        let anomalies_in_train = (0..100).filter(|&v| s.train[v] && labels.get(v) == Label::Anomaly).count();
        assert_eq!(anomalies_in_train, 4);
        assert_eq!(SplitMasks::count(&s.train) - anomalies_in_train, 36);
        assert_eq!(SplitMasks::count(&s.val), 20);
        assert_eq!(SplitMasks::count(&s.test), 40);
        assert_eq!(s, make_split(&labels, (0.4, 0.2, 0.4), 1, true).unwrap());
    }

    #[test]
    fn all_in_train() {
        let mut labels = labels_100_10();
        labels.0[0] = Label::Unknown;
        let s = make_split(&labels, (1.0, 0.0, 0.0), 5, true).unwrap();
        assert_eq!(SplitMasks::count(&s.train), 99);
        assert!(!s.train[0]);
        assert_eq!(SplitMasks::count(&s.val) + SplitMasks::count(&s.test), 0);
    }

    #[test]
    fn split_rejects_tiny_classes_and_bad_fractions() {
        let labels = LabelVector::from_flags(&[true, true, false, false, false, false]);
        assert!(make_split(&labels, (0.4, 0.2, 0.4), 0, true).is_err());
        assert!(make_split(&labels_100_10(), (0.5, 0.2, 0.4), 0, true).is_err());
    }

    #[test]
    fn synthetic_anomaly_count_and_validation() {
        let d = generate_synthetic(&SyntheticConfig::default()).unwrap();
        assert_eq!(d.labels.class_counts().1, 100);
        let bad = SyntheticConfig {
            num_nodes: 10,
            anomaly_rate: 0.05,
            ..Default::default()
        };
        assert!(generate_synthetic(&bad).is_err());
        let dense = SyntheticConfig {
            num_nodes: 20,
            anomaly_rate: 0.2,
            mean_degree: 16.0,
            ..Default::default()
        };
        assert!(generate_synthetic(&dense).is_err());
    }

    #[test]
    fn full_heterophily_means_no_anomaly_pairs() {
        let cfg = SyntheticConfig {
            num_nodes: 500,
            anomaly_heterophily: 1.0,
            seed: 3,
            ..Default::default()
        };
        let d = generate_synthetic(&cfg).unwrap();
        let aa = d
            .graph
            .edges()
            .filter(|&(u, v)| d.labels.get(u) == Label::Anomaly && d.labels.get(v) == Label::Anomaly)
            .count();
        assert_eq!(aa, 0);
    }

    #[test]
    fn scaler_standardizes_training_rows() {
        let x = Array2::from_shape_vec((4, 2), vec![1.0, 5.0, 3.0, 5.0, 100.0, 5.0, 5.0, 5.0]).unwrap();
        let s = FeatureScaler::fit(&x, &[true, true, false, true]).unwrap();
        assert_eq!(s.mean, vec![3.0, 5.0]);
        assert_eq!(s.std[1], 1.0);
        let t = s.transform(&x).unwrap();
        assert_eq!(t[[1, 0]], 0.0);
        assert_eq!(t[[3, 1]], 0.0);
    }
}
