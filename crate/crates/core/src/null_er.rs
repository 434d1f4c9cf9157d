//! Null distributions under the uniform (Erdős–Rényi, fixed `M`) model.
//!
//! Three tabulations of the raw statistic `Σ A_ij J(|π_i - π_j|)` are
//! available:
//!
//! * [`exact_h1_distribution_iid`]: the `M`-fold convolution of the
//!   triangular distance law, which treats edges as ordered i.i.d. draws;
//! * [`exact_h_distribution_multigraph`]: the exact law over uniformly
//!   random multigraphs, counting each multigraph once;
//! * [`canonical_h_distribution`]: the Poisson(`M`) mixture obtained when the
//!   edge count is fixed only on average.
//!
//! Tables are exact (big-integer counts) below a cell cap and fall back to
//! `f64` accumulation of nonnegative terms above it.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::{AffinityMetric, Graph, VertexSequence};
use crate::numeric::{ln_multiset, multiset_big, ratio_to_f64, rng_from_seed};
use crate::report::{NullDescriptor, Sidedness, TestReport};
use crate::slots::{draw_slots, n_pairs, pair_from_index};
use crate::stats;

/// Discrete law of a raw statistic, support ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub support: Vec<u64>,
    pub probabilities: Vec<f64>,
    /// Exact probabilities when the table was built in rational arithmetic.
    #[serde(skip)]
    pub exact: Option<Vec<BigRational>>,
    /// Probability mass dropped by truncation (canonical mixture only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_mass: Option<f64>,
}

impl DistributionTable {
    fn from_exact(entries: Vec<(u64, BigRational)>) -> Self {
        let entries: Vec<_> = entries.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Self {
            support: entries.iter().map(|(s, _)| *s).collect(),
            probabilities: entries.iter().map(|(_, p)| ratio_to_f64(p)).collect(),
            exact: Some(entries.into_iter().map(|(_, p)| p).collect()),
            truncation_mass: None,
        }
    }

    fn from_f64(entries: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let (support, probabilities) = entries.into_iter().filter(|(_, p)| *p > 0.0).unzip();
        Self { support, probabilities, exact: None, truncation_mass: None }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn probability(&self, value: u64) -> f64 {
        self.support.binary_search(&value).map(|i| self.probabilities[i]).unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.probabilities).map(|(&s, &p)| s as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.support.iter().zip(&self.probabilities).map(|(&s, &p)| (s as f64 - mu).powi(2) * p).sum()
    }

    /// `P[X <= value]`.
    pub fn cdf(&self, value: u64) -> f64 {
        self.support.iter().zip(&self.probabilities).take_while(|(&s, _)| s <= value).map(|(_, &p)| p).sum()
    }

    pub fn total_variation(&self, other: &DistributionTable) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.len() || j < other.len() {
            let a = self.support.get(i).copied().unwrap_or(u64::MAX);
            let b = other.support.get(j).copied().unwrap_or(u64::MAX);
            if a == b {
                acc += (self.probabilities[i] - other.probabilities[j]).abs();
                i += 1;
                j += 1;
            } else if a < b {
                acc += self.probabilities[i];
                i += 1;
            } else {
                acc += other.probabilities[j];
                j += 1;
            }
        }
        acc / 2.0
    }

    /// CSV with columns `raw_sum,probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("raw_sum,probability\n");
        for (s, p) in self.support.iter().zip(&self.probabilities) {
            out.push_str(&format!("{s},{p:e}\n"));
        }
        out
    }
}

/// Size limits for the table builders, in DP cells.
#[derive(Debug, Clone, Copy)]
pub struct TableConfig {
    /// Hard cap; above it the builders refuse.
    pub cell_cap: u128,
    /// Up to this size tables are computed in exact integer arithmetic.
    pub exact_cell_cap: u128,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self { cell_cap: 10_000_000, exact_cell_cap: 200_000 }
    }
}

const NORMAL_HINT: &str = "use the normal approximation instead";

/// Discrete triangular law of the distance between two uniformly chosen
/// distinct positions: `P[x] = 2(N - x) / (N(N - 1))`.
pub fn triangular_pmf(n: usize) -> Result<DistributionTable> {
    if n < 2 {
        return Err(Error::DegenerateSize(format!("triangular law requires N >= 2 (got {n})")));
    }
    let denom = BigInt::from(n * (n - 1));
    Ok(DistributionTable::from_exact(
        (1..n).map(|x| (x as u64, BigRational::new(BigInt::from(2 * (n - x)), denom.clone()))).collect(),
    ))
}

pub fn exact_h1_distribution_iid(n: usize, m: u64) -> Result<DistributionTable> {
    exact_h1_distribution_iid_with(n, m, &TableConfig::default())
}

/// Law of `Σ_{k=1}^{M} X_k` with `X_k` i.i.d. triangular on `1..N-1`.
pub fn exact_h1_distribution_iid_with(n: usize, m: u64, cfg: &TableConfig) -> Result<DistributionTable> {
    if n < 2 || m < 1 {
        return Err(Error::DegenerateSize(format!("need N >= 2 and M >= 1 (got N = {n}, M = {m})")));
    }
    let support_len = m as u128 * (n as u128 - 2) + 1;
    let cells = support_len * m as u128;
    if cells > cfg.cell_cap {
        return Err(Error::TooLarge { cells, cap: cfg.cell_cap, hint: NORMAL_HINT });
    }
    let width = n - 2; // per-step growth of the support
    if cells <= cfg.exact_cell_cap {
        // counts of Π (N - x_k) over outcomes; denominator C(N,2)^M... times 2^M
        let mut counts: Vec<BigUint> = vec![BigUint::one()];
        for _ in 0..m {
            let mut next = vec![BigUint::zero(); counts.len() + width];
            for (i, c) in counts.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for x in 1..n {
                    next[i + x - 1] += c * BigUint::from(n - x);
                }
            }
            counts = next;
        }
        let denom = BigInt::from(n_pairs(n)).pow(m as u32);
        Ok(DistributionTable::from_exact(
            counts
                .into_iter()
                .enumerate()
                .map(|(i, c)| (m + i as u64, BigRational::new(BigInt::from(c), denom.clone())))
                .collect(),
        ))
    } else {
        let weights: Vec<f64> = (1..n).map(|x| 2.0 * (n - x) as f64 / (n * (n - 1)) as f64).collect();
        let mut probs = vec![1.0f64];
        for _ in 0..m {
            let mut next = vec![0.0; probs.len() + width];
            for (i, &p) in probs.iter().enumerate() {
                for (k, w) in weights.iter().enumerate() {
                    next[i + k] += p * w;
                }
            }
            probs = next;
        }
        Ok(DistributionTable::from_f64(probs.into_iter().enumerate().map(|(i, p)| (m + i as u64, p))))
    }
}

fn integer_metric_values(n: usize, metric: AffinityMetric) -> Result<Vec<u64>> {
    (1..n)
        .map(|x| {
            metric.integer_value(x).ok_or_else(|| {
                Error::NotSupported(format!("exact tables need an integer-valued metric, not {}", metric.name()))
            })
        })
        .collect()
}

pub fn exact_h_distribution_multigraph(n: usize, m: u64, metric: AffinityMetric) -> Result<DistributionTable> {
    exact_h_distribution_multigraph_with(n, m, metric, &TableConfig::default())
}

/// Exact law of `Σ J_ij A_ij` over uniformly random multigraphs with exactly
/// `M` edges: the coefficient of `z^M t^s` in `Π_x (1 - t^{J(x)} z)^{-(N-x)}`
/// divided by `nHr(C(N,2), M)`.
pub fn exact_h_distribution_multigraph_with(
    n: usize,
    m: u64,
    metric: AffinityMetric,
    cfg: &TableConfig,
) -> Result<DistributionTable> {
    if n < 2 || m < 1 {
        return Err(Error::DegenerateSize(format!("need N >= 2 and M >= 1 (got N = {n}, M = {m})")));
    }
    let values = integer_metric_values(n, metric)?;
    let jmax = *values.iter().max().unwrap();
    let width = (m * jmax + 1) as usize;
    let cells = (m as u128 + 1) * width as u128;
    if cells > cfg.cell_cap {
        return Err(Error::TooLarge { cells, cap: cfg.cell_cap, hint: NORMAL_HINT });
    }
    let m_us = m as usize;
    let classes = (1..n).map(|x| ((n - x) as u64, values[x - 1] as usize));
    if cells <= cfg.exact_cell_cap {
        // dp[e][s]: number of multigraphs on the processed classes with e edges and sum s
        let mut dp = vec![vec![BigUint::zero(); width]; m_us + 1];
        dp[0][0] = BigUint::one();
        for (size, j) in classes {
            let ways: Vec<BigUint> = (0..=m).map(|k| multiset_big(size, k).to_biguint().unwrap()).collect();
            let mut next = vec![vec![BigUint::zero(); width]; m_us + 1];
            for e in 0..=m_us {
                for (s, count) in dp[e].iter().enumerate() {
                    if count.is_zero() {
                        continue;
                    }
                    for k in 0..=(m_us - e) {
                        let t = s + k * j;
                        if t >= width {
                            break;
                        }
                        next[e + k][t] += count * &ways[k];
                    }
                }
            }
            dp = next;
        }
        let total = multiset_big(n_pairs(n), m);
        Ok(DistributionTable::from_exact(
            dp.swap_remove(m_us)
                .into_iter()
                .enumerate()
                .map(|(s, c)| (s as u64, BigRational::new(BigInt::from(c), total.clone())))
                .collect(),
        ))
    } else {
        // rows kept as (log scale, values with max 1)
        let mut rows: Vec<(f64, Vec<f64>)> = vec![(f64::NEG_INFINITY, vec![0.0; width]); m_us + 1];
        rows[0].0 = 0.0;
        rows[0].1[0] = 1.0;
        for (size, j) in classes {
            let ln_ways: Vec<f64> = (0..=m).map(|k| ln_multiset(size, k)).collect();
            let mut next: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m_us + 1);
            for target in 0..=m_us {
                let base = (0..=target)
                    .map(|e| rows[e].0 + ln_ways[target - e])
                    .fold(f64::NEG_INFINITY, f64::max);
                let mut vals = vec![0.0; width];
                if base.is_finite() {
                    for e in 0..=target {
                        let lf = rows[e].0 + ln_ways[target - e];
                        if !lf.is_finite() {
                            continue;
                        }
                        let f = (lf - base).exp();
                        let shift = (target - e) * j;
                        for s in 0..width - shift.min(width) {
                            vals[s + shift] += rows[e].1[s] * f;
                        }
                    }
                }
                let mx = vals.iter().cloned().fold(0.0, f64::max);
                if mx > 0.0 {
                    vals.iter_mut().for_each(|v| *v /= mx);
                    next.push((base + mx.ln(), vals));
                } else {
                    next.push((f64::NEG_INFINITY, vals));
                }
            }
            rows = next;
        }
        let (scale, vals) = rows.swap_remove(m_us);
        let norm = scale - ln_multiset(n_pairs(n), m);
        Ok(DistributionTable::from_f64(vals.into_iter().enumerate().map(|(s, v)| (s as u64, v * norm.exp()))))
    }
}

/// Default Poisson truncation: `M + 12 sqrt(M) + 20`.
pub fn default_k_max(m: u64) -> u64 {
    m + (12.0 * (m as f64).sqrt()).ceil() as u64 + 20
}

fn ln_poisson(k: u64, lambda: f64) -> f64 {
    k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0)
}

/// Law of the raw statistic when each pair receives an independent
/// Poisson(`M / C(N,2)`) number of edges: a Poisson(`M`) mixture over `k` of
/// `k`-fold convolutions of the distance-value population.
pub fn canonical_h_distribution(
    n: usize,
    m: u64,
    metric: AffinityMetric,
    k_max: Option<u64>,
) -> Result<DistributionTable> {
    if n < 2 || m < 1 {
        return Err(Error::DegenerateSize(format!("need N >= 2 and M >= 1 (got N = {n}, M = {m})")));
    }
    let k_max = k_max.unwrap_or_else(|| default_k_max(m));
    if (k_max as f64) < m as f64 + 10.0 * (m as f64).sqrt() {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} is below M + 10 sqrt(M); the Poisson tail would be too heavy"
        )));
    }
    let values = integer_metric_values(n, metric)?;
    let jmax = *values.iter().max().unwrap() as usize;
    let width = k_max as usize * jmax + 1;
    let cells = (k_max as u128 + 1) * width as u128;
    let cfg = TableConfig::default();
    if cells > cfg.cell_cap {
        return Err(Error::TooLarge { cells, cap: cfg.cell_cap, hint: NORMAL_HINT });
    }
    let mut population = vec![0.0; jmax + 1];
    let pairs = n_pairs(n) as f64;
    for x in 1..n {
        population[values[x - 1] as usize] += (n - x) as f64 / pairs;
    }
    let support_pop: Vec<(usize, f64)> =
        population.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(j, &p)| (j, p)).collect();
    let lambda = m as f64;
    let mut mixture = vec![0.0; width];
    let mut conv = vec![1.0f64];
    for k in 0..=k_max {
        let w = ln_poisson(k, lambda).exp();
        for (s, &p) in conv.iter().enumerate() {
            mixture[s] += w * p;
        }
        if k == k_max {
            break;
        }
        let mut next = vec![0.0; conv.len() + jmax];
        for (s, &p) in conv.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &(j, q) in &support_pop {
                next[s + j] += p * q;
            }
        }
        conv = next;
    }
    let mut tail = 0.0;
    let mut k = k_max + 1;
    loop {
        let t = ln_poisson(k, lambda).exp();
        tail += t;
        if t < 1e-300 || (t < tail * 1e-17 && k as f64 > lambda) {
            break;
        }
        k += 1;
    }
    let mut table = DistributionTable::from_f64(mixture.into_iter().enumerate().map(|(s, p)| (s as u64, p)));
    table.truncation_mass = Some(tail);
    Ok(table)
}

/// Mean `μ_N` and standard deviation `σ_N` of `-log(1 - X/N)` for `X`
/// triangular on `1..N-1`.
pub fn log_moments(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::DegenerateSize(format!("log moments require N >= 2 (got {n})")));
    }
    let nf = n as f64;
    let c = 2.0 / (nf * (nf - 1.0));
    let (s1, s2) = (1..n).fold((0.0, 0.0), |(a, b), k| {
        let l = (k as f64).ln();
        (a + k as f64 * l, b + k as f64 * l * l)
    });
    let mu = nf.ln() - c * s1;
    let var = (c * s2 - (c * s1).powi(2)).max(0.0);
    Ok((mu, var.sqrt()))
}

/// Test of an unoptimized sequence against the fixed-`M` uniform model,
/// using the normal approximation of `z1`.
pub fn test_unoptimized(g: &Graph, s: &VertexSequence, alpha: f64, sidedness: Sidedness) -> Result<TestReport> {
    let h1 = stats::h1(g, s)?;
    let z = stats::z1(g, s)?;
    let null = NullDescriptor::new("erdos-renyi", "microcanonical (fixed M)", "iid approximation")
        .with("n", g.n_vertices() as f64)
        .with("m", g.n_edges() as f64);
    TestReport::from_z("H1", h1, z, null, alpha, sidedness)
}

/// Uniform graph with `N` vertices and `M` edges: a uniform `M`-subset of
/// the `C(N,2)` pairs when `simple`, otherwise a uniform `M`-multiset.
pub fn sample_er(n: usize, m: u64, simple: bool, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(seed);
    sample_er_with(n, m, simple, &mut rng)
}

pub fn sample_er_with<R: rand::Rng + ?Sized>(n: usize, m: u64, simple: bool, rng: &mut R) -> Result<Graph> {
    let slots = n_pairs(n);
    if simple && m > slots {
        return Err(Error::Infeasible(format!("M = {m} exceeds C(N,2) = {slots} for a simple graph")));
    }
    let picks = draw_slots(rng, slots, m, simple)?;
    Graph::new(n, picks.into_iter().map(|idx| {
        let (i, j) = pair_from_index(n, idx);
        (i, j, 1)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    fn exact(t: &DistributionTable) -> Vec<(u64, BigRational)> {
        t.support.iter().copied().zip(t.exact.clone().unwrap()).collect()
    }

    #[test]
    fn triangular() {
        let t = triangular_pmf(4).unwrap();
        assert_eq!(exact(&t), vec![(1, rational(1, 2)), (2, rational(1, 3)), (3, rational(1, 6))]);
        assert_eq!(exact(&triangular_pmf(2).unwrap()), vec![(1, rational(1, 1))]);
        assert!(triangular_pmf(1).is_err());
        for n in 2..=50 {
            let t = triangular_pmf(n).unwrap();
            assert!((t.mean() - (n as f64 + 1.0) / 3.0).abs() < 1e-12);
            let second: f64 = t.support.iter().zip(&t.probabilities).map(|(&s, &p)| (s * s) as f64 * p).sum();
            assert!((second - (n * (n + 1)) as f64 / 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn iid_small() {
        let t = exact_h1_distribution_iid(3, 2).unwrap();
        assert_eq!(exact(&t), vec![(2, rational(4, 9)), (3, rational(4, 9)), (4, rational(1, 9))]);
        let one = exact_h1_distribution_iid(7, 1).unwrap();
        assert_eq!(exact(&one), exact(&triangular_pmf(7).unwrap()));
        let t = exact_h1_distribution_iid(10, 7).unwrap();
        assert!((t.mean() - stats::beta1(10, 7)).abs() < 1e-9);
        assert!((t.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iid_float_path_agrees_with_exact() {
        let exact_t = exact_h1_distribution_iid(12, 6).unwrap();
        let cfg = TableConfig { cell_cap: 10_000_000, exact_cell_cap: 0 };
        let float_t = exact_h1_distribution_iid_with(12, 6, &cfg).unwrap();
        assert!(float_t.exact.is_none());
        assert_eq!(exact_t.support, float_t.support);
        for (a, b) in exact_t.probabilities.iter().zip(&float_t.probabilities) {
            assert!((a - b).abs() <= 1e-13 * a.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn iid_cap() {
        let cfg = TableConfig { cell_cap: 100, exact_cell_cap: 10 };
        assert!(matches!(exact_h1_distribution_iid_with(50, 20, &cfg), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn multigraph_small() {
        let t = exact_h_distribution_multigraph(3, 2, AffinityMetric::Sequential).unwrap();
        assert_eq!(exact(&t), vec![(2, rational(1, 2)), (3, rational(1, 3)), (4, rational(1, 6))]);
        assert_eq!(multiset_big(3, 2), BigInt::from(6));
        let one = exact_h_distribution_multigraph(6, 1, AffinityMetric::Sequential).unwrap();
        assert_eq!(exact(&one), exact(&triangular_pmf(6).unwrap()));
        assert!(exact_h_distribution_multigraph(4, 2, AffinityMetric::Logarithmic).is_err());
    }

    #[test]
    fn multigraph_float_path_agrees_with_exact() {
        for metric in [AffinityMetric::Sequential, AffinityMetric::Squared, AffinityMetric::Step(2)] {
            let e = exact_h_distribution_multigraph(7, 5, metric).unwrap();
            let cfg = TableConfig { cell_cap: 10_000_000, exact_cell_cap: 0 };
            let f = exact_h_distribution_multigraph_with(7, 5, metric, &cfg).unwrap();
            assert_eq!(e.support, f.support);
            for (a, b) in e.probabilities.iter().zip(&f.probabilities) {
                assert!((a - b).abs() <= 1e-12 * a, "{metric:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn multigraph_large_normalizes() {
        let t = exact_h_distribution_multigraph(40, 60, AffinityMetric::Sequential).unwrap();
        assert!((t.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn canonical_mixture() {
        let t = canonical_h_distribution(3, 2, AffinityMetric::Sequential, Some(40)).unwrap();
        assert!((t.probability(0) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((t.mean() - 8.0 / 3.0).abs() < 1e-9);
        assert!(t.truncation_mass.unwrap() < 1e-12);
        assert!((t.total_mass() + t.truncation_mass.unwrap() - 1.0).abs() < 1e-12);
        assert!(canonical_h_distribution(3, 100, AffinityMetric::Sequential, Some(101)).is_err());
    }

    #[test]
    fn canonical_variance_exceeds_iid_variance() {
        // Poisson(M) mixing adds M E[X]^2 of variance: Var = M E[X^2]
        // instead of M Var[X]. At N = 20, M = 60 this is 4200 against 1260,
        // so the two tables stay visibly apart (TV about 0.28) rather than
        // within 0.05 of each other.
        let (n, m) = (20usize, 60u64);
        let can = canonical_h_distribution(n, m, AffinityMetric::Sequential, None).unwrap();
        let iid = exact_h1_distribution_iid(n, m).unwrap();
        let ex = (n as f64 + 1.0) / 3.0;
        let ex2 = (n * (n + 1)) as f64 / 6.0;
        assert!((can.mean() - m as f64 * ex).abs() < 1e-6);
        assert!((iid.mean() - m as f64 * ex).abs() < 1e-6);
        assert!((can.variance() - m as f64 * ex2).abs() < 1e-4 * m as f64 * ex2);
        assert!((iid.variance() - m as f64 * (ex2 - ex * ex)).abs() < 1e-6 * iid.variance());
        let tv = can.total_variation(&iid);
        assert!(tv > 0.2 && tv < 0.35, "tv = {tv}");
    }

    #[test]
    fn log_moments_direct() {
        for n in 2..40 {
            let (mu, sigma) = log_moments(n).unwrap();
            let t = triangular_pmf(n).unwrap();
            let f = |x: u64| -(1.0 - x as f64 / n as f64).ln();
            let m1: f64 = t.support.iter().zip(&t.probabilities).map(|(&x, &p)| f(x) * p).sum();
            let m2: f64 = t.support.iter().zip(&t.probabilities).map(|(&x, &p)| f(x).powi(2) * p).sum();
            assert!((mu - m1).abs() < 1e-12);
            assert!((sigma * sigma - (m2 - m1 * m1)).abs() < 1e-10);
        }
        let mu4 = 4f64.ln() - (2.0 * 2f64.ln() + 3.0 * 3f64.ln()) / 6.0;
        assert!((log_moments(4).unwrap().0 - mu4).abs() < 1e-14);
        assert!((mu4 - 0.605939).abs() < 1e-6);
        assert_eq!(log_moments(2).unwrap().1, 0.0);
    }

    #[test]
    fn unoptimized_test_reports() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let r = test_unoptimized(&g, &VertexSequence::identity(3), 0.05, Sidedness::TwoSided).unwrap();
        assert!((r.z + 1.0).abs() < 1e-12);
        assert!(!r.rejected());
        assert_eq!(r.null.variant, "iid approximation");
        let g2 = Graph::from_pairs(2, &[(0, 1)]).unwrap();
        assert!(test_unoptimized(&g2, &VertexSequence::identity(2), 0.05, Sidedness::TwoSided).is_err());
    }

    #[test]
    fn er_sampling() {
        for seed in 0..20 {
            let g = sample_er(3, 3, true, seed).unwrap();
            assert_eq!(g, Graph::from_pairs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap());
            let g = sample_er(2, 2, false, seed).unwrap();
            assert_eq!(g.multiplicity(0, 1), 2);
        }
        assert!(sample_er(4, 7, true, 0).is_err());
        assert_eq!(sample_er(30, 80, true, 5).unwrap(), sample_er(30, 80, true, 5).unwrap());
    }

    #[test]
    fn er_slot_frequencies_are_uniform() {
        let (n, m, draws) = (10usize, 5u64, 100_000u64);
        let slots = n_pairs(n) as usize;
        for simple in [true, false] {
            let mut counts = vec![0u64; slots];
            let mut rng = rng_from_seed(11);
            for _ in 0..draws {
                for idx in draw_slots(&mut rng, slots as u64, m, simple).unwrap() {
                    counts[idx as usize] += 1;
                }
            }
            let p = m as f64 / slots as f64;
            let expected = draws as f64 * p;
            // per-draw count in a slot has variance at most p(1 + m/slots)
            let se = (draws as f64 * p * (1.0 + m as f64 / slots as f64)).sqrt();
            for &c in &counts {
                assert!((c as f64 - expected).abs() < 4.0 * se, "simple={simple}: {c} vs {expected}");
            }
        }
    }
}
