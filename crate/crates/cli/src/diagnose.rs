//! Spectral diagnostics of a labeled graph.

use serde::Serialize;

use sec_gfd::data::anomaly_side_heterophily;
use sec_gfd::graph::{
    heterophily, rayleigh_quotient, spectral_energy_profile, Label, LabelVector, LaplacianKind,
    SparseGraph, SpectralEnergyProfile,
};
use sec_gfd::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub normal: usize,
    pub anomaly: usize,
    pub unlabeled: usize,
    /// `None` when no edge joins two labeled nodes.
    pub heterophily: Option<f64>,
    pub anomaly_heterophily: Option<f64>,
    /// Rayleigh quotients of the mean-centered label signal; `None` when that
    /// signal is identically zero.
    pub rayleigh_unnormalized: Option<f64>,
    pub rayleigh_sym_normalized: Option<f64>,
}

/// Labels as a signal, centered on the labeled mean; unlabeled nodes sit at 0.
pub fn centered_label_signal(labels: &LabelVector) -> Vec<f64> {
    let known: Vec<f64> = labels.iter().filter_map(Label::as_target).collect();
    let mean = known.iter().sum::<f64>() / known.len().max(1) as f64;
    labels
        .iter()
        .map(|l| l.as_target().map_or(0.0, |y| y - mean))
        .collect()
}

pub fn diagnose(g: &SparseGraph, labels: &LabelVector) -> Result<Diagnostics, Error> {
    let (normal, anomaly) = labels.class_counts();
    if normal + anomaly == 0 {
        return Err(Error::InvalidInput("no labeled nodes to diagnose".into()));
    }
    let het = match heterophily(g, labels) {
        Ok(h) => Some(h.graph),
        Err(Error::EmptyDenominator(_)) => None,
        Err(e) => return Err(e),
    };
    let x = centered_label_signal(labels);
    let rq = |kind| -> Result<Option<f64>, Error> {
        if x.iter().all(|&v| v == 0.0) {
            Ok(None)
        } else {
            rayleigh_quotient(g, &x, kind).map(Some)
        }
    };
    Ok(Diagnostics {
        num_nodes: g.num_nodes(),
        num_edges: g.num_edges(),
        normal,
        anomaly,
        unlabeled: labels.len() - normal - anomaly,
        heterophily: het,
        anomaly_heterophily: anomaly_side_heterophily(g, labels),
        rayleigh_unnormalized: rq(LaplacianKind::Unnormalized)?,
        rayleigh_sym_normalized: rq(LaplacianKind::SymNormalized)?,
    })
}

/// Energy profile of the centered label signal on the normalized Laplacian.
pub fn label_energy_profile(
    g: &SparseGraph,
    labels: &LabelVector,
    cap: usize,
) -> Result<Option<SpectralEnergyProfile>, Error> {
    let x = centered_label_signal(labels);
    if x.iter().all(|&v| v == 0.0) {
        return Ok(None);
    }
    spectral_energy_profile(g, &x, LaplacianKind::SymNormalized, cap).map(Some)
}

pub fn profile_csv(profile: &SpectralEnergyProfile) -> String {
    let mut out = String::from("index,eigenvalue,cumulative_energy\n");
    for (i, (l, c)) in profile.eigenvalues.iter().zip(&profile.cumulative).enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, l, c));
    }
    out
}

fn show(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| format!("{x:.6}"))
}

pub fn render_text(d: &Diagnostics) -> String {
    format!(
        "nodes: {}\nedges: {}\nnormal: {}\nanomaly: {}\nunlabeled: {}\n\
         heterophily: {}\nanomaly heterophily: {}\n\
         rayleigh quotient (unnormalized): {}\nrayleigh quotient (sym normalized): {}\n",
        d.num_nodes,
        d.num_edges,
        d.normal,
        d.anomaly,
        d.unlabeled,
        show(d.heterophily),
        show(d.anomaly_heterophily),
        show(d.rayleigh_unnormalized),
        show(d.rayleigh_sym_normalized),
    )
}
