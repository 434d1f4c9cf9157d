//! Fitting a banded ORGM to an observed (graph, sequence) pair, and the
//! tests built on the fit: the in-envelope test, the confidence-interval
//! sweep over `r`, and the four-way classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSequence};
use crate::numeric::{ln_binomial, ln_multiset, normal_quantile, quantile};
use crate::orgm::{omega_sizes, orgm_h1_normal, EnvelopeSpec, OrgmParams, Variant};
use crate::report::{check_alpha, NullDescriptor, Sidedness, TestReport};
use crate::stats::beta1;

/// Outcome of the bandwidth sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub variant: Variant,
    pub r_star: usize,
    /// `(M_out/|Ω_out|)/(M_in/|Ω_in|)` at `r_star`; 0 when `Ω_out` is empty,
    /// absent when `M_in = 0`.
    pub eps_star: Option<f64>,
    pub m_in: u64,
    pub m_out: u64,
    /// Log-count of graphs consistent with each `r` (`None` where infeasible).
    pub objective: Vec<(usize, Option<f64>)>,
}

impl FitResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,objective\n");
        for (r, v) in &self.objective {
            match v {
                Some(v) => out.push_str(&format!("{r},{v}\n")),
                None => out.push_str(&format!("{r},\n")),
            }
        }
        out
    }
}

/// Edge counts (with multiplicity) by sequential distance; index 0 unused.
pub fn distance_histogram(g: &Graph, s: &VertexSequence) -> Result<Vec<u64>> {
    s.check_matches(g)?;
    let mut hist = vec![0u64; g.n_vertices().max(1)];
    for e in g.edges() {
        hist[s.position(e.u).abs_diff(s.position(e.v))] += e.multiplicity;
    }
    Ok(hist)
}

fn check_size(g: &Graph) -> Result<()> {
    if g.n_edges() == 0 {
        return Err(Error::NoEdges);
    }
    if g.n_vertices() < 3 {
        return Err(Error::DegenerateSize(format!("fitting requires N >= 3 (got {})", g.n_vertices())));
    }
    Ok(())
}

/// Log of the number of ORGM graphs with the given counts.
pub fn log_graph_count(w_in: u64, w_out: u64, m_in: u64, m_out: u64, variant: Variant) -> Option<f64> {
    let v = match variant {
        Variant::Simple => ln_binomial(w_in, m_in) + ln_binomial(w_out, m_out),
        Variant::Multigraph => ln_multiset(w_in, m_in) + ln_multiset(w_out, m_out),
    };
    v.is_finite().then_some(v)
}

/// Maximum-likelihood bandwidth: the `r` minimizing the log-count of graphs
/// with the observed split, smallest `r` on ties.
pub fn fit_bandwidth(g: &Graph, s: &VertexSequence, variant: Variant) -> Result<FitResult> {
    check_size(g)?;
    let n = g.n_vertices();
    let m = g.n_edges();
    let hist = distance_histogram(g, s)?;
    let mut cumulative = vec![0u64; n];
    for r in 1..n {
        cumulative[r] = cumulative[r - 1] + hist[r];
    }
    let objective: Vec<(usize, Option<f64>)> = (1..n)
        .into_par_iter()
        .map(|r| {
            let (w_in, w_out) = omega_sizes(n, &EnvelopeSpec::banded(r)).expect("r in range");
            (r, log_graph_count(w_in, w_out, cumulative[r], m - cumulative[r], variant))
        })
        .collect();
    let (r_star, _) = objective
        .iter()
        .filter_map(|&(r, v)| v.map(|v| (r, v)))
        .fold(None, |best: Option<(usize, f64)>, (r, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((r, v)),
        })
        .ok_or_else(|| Error::Infeasible("no bandwidth admits the observed edges".into()))?;
    let m_in = cumulative[r_star];
    let m_out = m - m_in;
    let (w_in, w_out) = omega_sizes(n, &EnvelopeSpec::banded(r_star))?;
    let eps_star = if m_in == 0 {
        None
    } else if w_out == 0 {
        Some(0.0)
    } else {
        Some((m_out as f64 / w_out as f64) / (m_in as f64 / w_in as f64))
    };
    Ok(FitResult { variant, r_star, eps_star, m_in, m_out, objective })
}

/// In-envelope `H1`: edges with `|π_i - π_j| <= r` only, normalized by
/// `β1 = M_in (N+1)/3`. Returns `(H1_in, M_in)`.
pub fn in_envelope_h1(g: &Graph, s: &VertexSequence, r: usize) -> Result<(f64, u64)> {
    let hist = distance_histogram(g, s)?;
    let (raw, m_in) = hist
        .iter()
        .enumerate()
        .take(r + 1)
        .fold((0u64, 0u64), |(raw, m), (d, &c)| (raw + d as u64 * c, m + c));
    if m_in == 0 {
        return Ok((f64::NAN, 0));
    }
    Ok((raw as f64 / beta1(g.n_vertices(), m_in), m_in))
}

fn z_score(observed: f64, mean: f64, std: f64) -> f64 {
    if std > 0.0 {
        (observed - mean) / std
    } else if (observed - mean).abs() <= 1e-12 * mean.abs().max(1.0) {
        0.0
    } else {
        (observed - mean).signum() * f64::INFINITY
    }
}

/// Tests uniformity of the in-envelope edges against `ORGM(N, M_in, 0, r)`
/// with the normal approximation, two-sided.
pub fn in_envelope_test(g: &Graph, s: &VertexSequence, r: usize, variant: Variant, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    check_size(g)?;
    let n = g.n_vertices();
    omega_sizes(n, &EnvelopeSpec::banded(r))?;
    let (observed, m_in) = in_envelope_h1(g, s, r)?;
    if m_in < 2 {
        return Err(Error::InsufficientEdges { m_in });
    }
    let params = OrgmParams::banded(n, r, m_in, 0, variant.is_simple());
    let (mean, std) = orgm_h1_normal(&params)?;
    let null = NullDescriptor::new("orgm", "microcanonical (fixed M_in, M_out = 0)", variant.name())
        .with("n", n as f64)
        .with("r", r as f64)
        .with("m_in", m_in as f64)
        .with("mean", mean)
        .with("std", std)
        .note("in-envelope H1 normalized by beta1 = M_in (N+1)/3")
        .note("normal approximation");
    TestReport::from_z("H1_in", observed, z_score(observed, mean, std), null, alpha, Sidedness::TwoSided)
}

/// One row of the bandwidth sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiRow {
    pub r: usize,
    pub m_in: u64,
    pub feasible: bool,
    pub mean: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub observed: Option<f64>,
}

/// Per-`r` normal `(1 - alpha)` interval of in-envelope `H1` under the
/// flat in-envelope ORGM, next to the observed value.
pub fn ci_sweep(
    g: &Graph,
    s: &VertexSequence,
    r_range: impl IntoIterator<Item = usize>,
    variant: Variant,
    alpha: f64,
) -> Result<Vec<CiRow>> {
    check_alpha(alpha)?;
    check_size(g)?;
    let n = g.n_vertices();
    let q = normal_quantile(1.0 - alpha / 2.0);
    let rs: Vec<usize> = r_range.into_iter().collect();
    for &r in &rs {
        omega_sizes(n, &EnvelopeSpec::banded(r))?;
    }
    rs.into_par_iter()
        .map(|r| {
            let (observed, m_in) = in_envelope_h1(g, s, r)?;
            let params = OrgmParams::banded(n, r, m_in, 0, variant.is_simple());
            let moments = if m_in >= 2 { orgm_h1_normal(&params).ok() } else { None };
            Ok(match moments {
                Some((mean, std)) => CiRow {
                    r,
                    m_in,
                    feasible: true,
                    mean: Some(mean),
                    lower: Some(mean - q * std),
                    upper: Some(mean + q * std),
                    observed: Some(observed),
                },
                None => CiRow {
                    r,
                    m_in,
                    feasible: false,
                    mean: None,
                    lower: None,
                    upper: None,
                    observed: (m_in > 0).then_some(observed),
                },
            })
        })
        .collect()
}

pub fn ci_rows_to_csv(rows: &[CiRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("r,m_in,feasible,mean,lower,upper,observed\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.r,
            row.m_in,
            row.feasible,
            opt(row.mean),
            opt(row.lower),
            opt(row.upper),
            opt(row.observed)
        ));
    }
    out
}

/// Largest possible in-envelope `H1` divided by its ORGM mean:
/// `3r(2N - r - 1) / ((r + 1)(3N - 2r - 1))`.
pub fn max_average_ratio(n: usize, r: usize) -> Result<f64> {
    if r < 1 || r + 1 > n {
        return Err(Error::InvalidParameter(format!("r = {r} outside [1, {}]", n.saturating_sub(1))));
    }
    let (n, r) = (n as f64, r as f64);
    Ok(3.0 * r * (2.0 * n - r - 1.0) / ((r + 1.0) * (3.0 * n - 2.0 * r - 1.0)))
}

/// Distribution of whole-graph `H1` for optimized sequences on ER graphs of
/// matching size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErReference {
    Empirical(Vec<f64>),
    Normal { mean: f64, std: f64 },
}

impl ErReference {
    /// Lower `alpha` quantile.
    pub fn lower_quantile(&self, alpha: f64) -> f64 {
        match self {
            ErReference::Empirical(xs) => {
                let mut sorted = xs.clone();
                sorted.sort_by(f64::total_cmp);
                quantile(&sorted, alpha)
            }
            ErReference::Normal { mean, std } => mean + normal_quantile(alpha) * std,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalityType {
    /// In-envelope edges more local than the ORGM allows.
    I,
    /// Consistent with a uniform envelope.
    II,
    /// Less local than the ORGM inside the envelope, but far more local than
    /// optimized random graphs overall.
    III,
    /// Neither.
    IV,
    /// Above the interval, with no ER reference to split III from IV.
    IIIOrIV,
}

/// Four-way classification from the whole-graph and in-envelope reports.
pub fn classify(report_all: &TestReport, report_in: &TestReport, er_reference: Option<&ErReference>) -> LocalityType {
    if !report_in.rejected() {
        return LocalityType::II;
    }
    if report_in.z < 0.0 {
        return LocalityType::I;
    }
    match er_reference {
        None => LocalityType::IIIOrIV,
        Some(reference) => {
            if report_all.observed < reference.lower_quantile(report_in.alpha) {
                LocalityType::III
            } else {
                LocalityType::IV
            }
        }
    }
}
