//! Power of the unoptimized-sequence test against ORGM alternatives.
//!
//! The test rejects when `H1` falls below the one-sided critical value
//! `E* = 1 + Φ⁻¹(α) sqrt((N-2)/(2M(N+1)))`. Analytic power plugs the ORGM's
//! normal approximation into that cutoff; empirical power samples ORGM
//! graphs and counts rejections.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSequence;
use crate::numeric::{normal_cdf, normal_quantile, rng_for_index};
use crate::orgm::{orgm_h1_normal, sample_orgm_with, OrgmParams, Variant};
use crate::report::check_alpha;
use crate::stats::{h1, zg};

/// One-sided lower critical value of `H1`.
pub fn critical_value(n: usize, m: u64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n < 3 {
        return Err(Error::DegenerateSize(format!("critical value requires N >= 3 (got {n})")));
    }
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(1.0 + normal_quantile(alpha) * ((nf - 2.0) / (2.0 * mf * (nf + 1.0))).sqrt())
}

/// `Φ((E* - mean)/std)` under `ORGM(N, M, r, ε)`.
pub fn analytic_power(n: usize, m: u64, r: usize, eps: f64, alpha: f64, variant: Variant) -> Result<f64> {
    let cutoff = critical_value(n, m, alpha)?;
    let params = OrgmParams::from_density_ratio(n, m, r, eps, variant.is_simple())?;
    let (mean, std) = orgm_h1_normal(&params)?;
    Ok(if std > 0.0 {
        normal_cdf((cutoff - mean) / std)
    } else {
        f64::from(u8::from(mean < cutoff))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerStatistic {
    H1,
    Hg,
}

fn rejects<R: Rng + ?Sized>(
    params: &OrgmParams,
    statistic: PowerStatistic,
    h1_cutoff: f64,
    z_cutoff: f64,
    rng: &mut R,
) -> Result<bool> {
    let g = sample_orgm_with(params, rng)?;
    let s = VertexSequence::identity(params.n);
    Ok(match statistic {
        PowerStatistic::H1 => h1(&g, &s)? < h1_cutoff,
        PowerStatistic::Hg => zg(&g, &s)? < z_cutoff,
    })
}

/// Fraction of `n_samples` ORGM graphs (identity sequence) rejected by the
/// one-sided test. Sample `i` uses stream `i` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_power(
    n: usize,
    m: u64,
    r: usize,
    eps: f64,
    alpha: f64,
    statistic: PowerStatistic,
    variant: Variant,
    n_samples: u64,
    seed: u64,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let h1_cutoff = critical_value(n, m, alpha)?;
    let z_cutoff = normal_quantile(alpha);
    let params = OrgmParams::from_density_ratio(n, m, r, eps, variant.is_simple())?;
    let hits = (0..n_samples)
        .into_par_iter()
        .map(|i| rejects(&params, statistic, h1_cutoff, z_cutoff, &mut rng_for_index(seed, i)).map(u64::from))
        .sum::<Result<u64>>()?;
    Ok(hits as f64 / n_samples as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxes {
    /// `(r/N, ε)` plane at fixed `(N, M)`.
    REps { n: usize, m: u64, r_over_n: Vec<f64>, eps: Vec<f64> },
    /// `(N, 2M/N)` plane at fixed `(r/N, ε)`.
    NDegree { n: Vec<usize>, degree: Vec<f64>, r_over_n: f64, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    Analytic,
    Empirical { statistic: PowerStatistic, n_samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub alpha: f64,
    pub variant: Variant,
    pub mode: PowerMode,
    pub x_axis: String,
    pub y_axis: String,
}

/// Power over a two-parameter plane. `cells[y][x]` is `None` where the
/// parameters are infeasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGrid {
    pub metadata: GridMetadata,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl PowerGrid {
    pub fn cell(&self, x: usize, y: usize) -> Option<f64> {
        self.cells[y][x]
    }

    /// Header row of x values, then one row per y value.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\\{}", self.metadata.y_axis, self.metadata.x_axis);
        for x in &self.x_values {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
        for (y, row) in self.y_values.iter().zip(&self.cells) {
            out.push_str(&y.to_string());
            for c in row {
                out.push(',');
                if let Some(p) = c {
                    out.push_str(&p.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Bandwidth for a relative value `r/N`, clamped to `[1, N-1]`.
pub fn bandwidth_for(n: usize, r_over_n: f64) -> usize {
    ((r_over_n * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1))
}

fn missing(e: &Error) -> bool {
    matches!(e, Error::Infeasible(_) | Error::DegenerateSize(_) | Error::ZeroVariance(_) | Error::NoEdges | Error::InvalidParameter(_))
}

type Cell = (usize, u64, usize, f64);

pub fn power_grid(axes: &GridAxes, alpha: f64, variant: Variant, mode: PowerMode) -> Result<PowerGrid> {
    check_alpha(alpha)?;
    // (n, m, r, eps) per cell, row-major by y
    let (x_axis, y_axis, x_values, y_values, cells): (&str, &str, Vec<f64>, Vec<f64>, Vec<Cell>) = match axes {
        GridAxes::REps { n, m, r_over_n, eps } => (
            "r_over_n",
            "eps",
            r_over_n.clone(),
            eps.clone(),
            eps.iter().flat_map(|&e| r_over_n.iter().map(move |&x| (*n, *m, bandwidth_for(*n, x), e))).collect(),
        ),
        GridAxes::NDegree { n, degree, r_over_n, eps } => (
            "n",
            "degree",
            n.iter().map(|&v| v as f64).collect(),
            degree.clone(),
            degree
                .iter()
                .flat_map(|&d| {
                    n.iter().map(move |&nv| (nv, (d * nv as f64 / 2.0).round() as u64, bandwidth_for(nv, *r_over_n), *eps))
                })
                .collect(),
        ),
    };
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(n, m, r, eps))| {
            let result = match mode {
                PowerMode::Analytic => analytic_power(n, m, r, eps, alpha, variant),
                PowerMode::Empirical { statistic, n_samples, seed } => {
                    // per-cell master seed so cells do not share sample streams
                    let cell_seed = rng_for_index(seed, idx as u64).random::<u64>();
                    empirical_power(n, m, r, eps, alpha, statistic, variant, n_samples, cell_seed)
                }
            };
            match result {
                Ok(p) => Ok(Some(p)),
                Err(e) if missing(&e) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let width = x_values.len();
    let rows = if width == 0 { vec![Vec::new(); y_values.len()] } else { values.chunks(width).map(|c| c.to_vec()).collect() };
    Ok(PowerGrid {
        metadata: GridMetadata { alpha, variant, mode, x_axis: x_axis.into(), y_axis: y_axis.into() },
        x_values,
        y_values,
        cells: rows,
    })
}
