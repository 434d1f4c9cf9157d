//! Sequential-locality statistics over a (graph, sequence) pair.
//!
//! The general statistic is `Σ_{i<j} A_ij J(|π_i - π_j|)`, with `A_ij` the
//! edge multiplicity. Two normalized versions are provided: `H1` (sequential
//! distance, normalized by `M(N+1)/3`) and `HG` (logarithmic semimetric,
//! normalized by `μ_N M`). Both have null mean 1 under the uniform model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AffinityMetric, Graph, VertexSequence};
use crate::null_er::log_moments;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    H1,
    Hg,
    Hj(AffinityMetric),
}

impl StatisticKind {
    pub fn for_metric(metric: AffinityMetric) -> Self {
        match metric {
            AffinityMetric::Sequential => StatisticKind::H1,
            AffinityMetric::Logarithmic => StatisticKind::Hg,
            other => StatisticKind::Hj(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatValue {
    pub kind: StatisticKind,
    /// Unnormalized sum in metric units.
    pub raw_sum: f64,
    /// `raw_sum / β`.
    pub normalized: f64,
    /// Normalization factor `β`.
    pub beta: f64,
    /// Standardized value when defined (`z1` or `z_G`).
    pub z: Option<f64>,
}

/// `Σ_{i<j} A_ij |π_i - π_j|` in integers.
pub fn raw_distance_sum(g: &Graph, s: &VertexSequence) -> u64 {
    g.edges()
        .iter()
        .map(|e| e.multiplicity * s.position(e.u).abs_diff(s.position(e.v)) as u64)
        .sum()
}

/// `β1 = M(N+1)/3`.
pub fn beta1(n: usize, m: u64) -> f64 {
    m as f64 * (n as f64 + 1.0) / 3.0
}

/// Factor mapping `H1 - 1` to `z1`: `sqrt(2M(N+1)/(N-2))`.
pub fn z1_scale(n: usize, m: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::DegenerateSize(format!("z1 requires N >= 3 (got N = {n})")));
    }
    Ok((2.0 * m as f64 * (n as f64 + 1.0) / (n as f64 - 2.0)).sqrt())
}

pub fn h_stat(g: &Graph, s: &VertexSequence, metric: AffinityMetric) -> Result<StatValue> {
    s.check_matches(g)?;
    let m = g.n_edges();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.n_vertices();
    let raw_sum: f64 = g
        .edges()
        .iter()
        .map(|e| e.multiplicity as f64 * metric.value(s.position(e.u).abs_diff(s.position(e.v)), n))
        .sum();
    let (beta, z) = match metric {
        AffinityMetric::Sequential => {
            let beta = beta1(n, m);
            let z = z1_scale(n, m).ok().map(|k| k * (raw_sum / beta - 1.0));
            (beta, z)
        }
        AffinityMetric::Logarithmic => {
            let (mu, sigma) = log_moments(n)?;
            let beta = mu * m as f64;
            let z = (sigma > 0.0).then(|| mu / sigma * (m as f64).sqrt() * (raw_sum / beta - 1.0));
            (beta, z)
        }
        _ => (1.0, None),
    };
    Ok(StatValue { kind: StatisticKind::for_metric(metric), raw_sum, normalized: raw_sum / beta, beta, z })
}

/// The `H1` statistic.
pub fn h1(g: &Graph, s: &VertexSequence) -> Result<f64> {
    Ok(h_stat(g, s, AffinityMetric::Sequential)?.normalized)
}

/// `z1 = sqrt(2M(N+1)/(N-2)) (H1 - 1)`.
pub fn z1(g: &Graph, s: &VertexSequence) -> Result<f64> {
    let scale = z1_scale(g.n_vertices(), g.n_edges())?;
    Ok(scale * (h1(g, s)? - 1.0))
}

/// The `HG` statistic (logarithmic semimetric).
pub fn hg(g: &Graph, s: &VertexSequence) -> Result<StatValue> {
    h_stat(g, s, AffinityMetric::Logarithmic)
}

/// `z_G = (μ_N/σ_N) sqrt(M) (H_G - 1)`.
pub fn zg(g: &Graph, s: &VertexSequence) -> Result<f64> {
    let n = g.n_vertices();
    if n < 3 {
        return Err(Error::DegenerateSize(format!("z_G requires N >= 3 (got N = {n}); σ_N = 0")));
    }
    let v = hg(g, s)?;
    v.z.ok_or_else(|| Error::DegenerateSize("σ_N = 0".into()))
}

/// Per-vertex median of sequential distances to neighbors; multiedges enter
/// the sample once per copy and even-size samples use the midpoint of the
/// two central values. Isolated vertices yield `None`.
pub fn micro_locality(g: &Graph, s: &VertexSequence) -> Result<Vec<Option<f64>>> {
    s.check_matches(g)?;
    let mut samples: Vec<Vec<usize>> = vec![Vec::new(); g.n_vertices()];
    for e in g.edges() {
        let d = s.position(e.u).abs_diff(s.position(e.v));
        for _ in 0..e.multiplicity {
            samples[e.u].push(d);
            samples[e.v].push(d);
        }
    }
    Ok(samples
        .into_iter()
        .map(|mut xs| {
            if xs.is_empty() {
                return None;
            }
            xs.sort_unstable();
            let k = xs.len();
            Some(if k % 2 == 1 { xs[k / 2] as f64 } else { (xs[k / 2 - 1] + xs[k / 2]) as f64 / 2.0 })
        })
        .collect())
}
