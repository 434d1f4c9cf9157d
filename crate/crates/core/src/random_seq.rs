//! The random-sequence null: the graph is fixed and the vertex sequence is
//! drawn uniformly from all `N!` permutations.
//!
//! Under this null `z1` has mean 0 and a variance that depends on the wedge
//! count `M3`; [`randseq_variance`] gives the closed form for simple graphs
//! and [`randseq_variance_of`] the general value for multigraphs. Small
//! graphs can be enumerated outright with [`exact_seq_distribution`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{parallel_pair_count, wedge_count, Graph, VertexSequence};
use crate::numeric::{normal_cdf, ratio_to_f64, rng_from_seed};
use crate::stats::{beta1, raw_distance_sum, z1, z1_scale};

fn int(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `E[|π_i - π_j| |π_j - π_k|]` for distinct `i, j, k`: `(N+1)(7N+4)/60`.
pub fn wedge_distance_moment(n: usize) -> BigRational {
    let n = n as i128;
    int((n + 1) * (7 * n + 4)) / int(60)
}

/// `E[|π_i - π_j| |π_k - π_l|]` for distinct `i, j, k, l`: `(N+1)(5N+4)/45`.
pub fn disjoint_distance_moment(n: usize) -> BigRational {
    let n = n as i128;
    int((n + 1) * (5 * n + 4)) / int(45)
}

fn closed_form(n: i128, m: i128, m3: BigRational) -> BigRational {
    let bracket = int(5 * n - 8) / int(5 * (n + 1)) + m3 * int(n - 4) / int(5 * m * (n + 1)) - int(2 * m) / int(5 * (n + 1));
    int(n + 1) / int(n - 2) * bracket
}

/// Variance of `z1` over random sequences of a simple graph, exactly:
/// `(N+1)/(N-2) [ (5N-8)/(5(N+1)) + M3(N-4)/(5M(N+1)) - 2M/(5(N+1)) ]`.
pub fn randseq_variance_exact(n: usize, m: u64, m3: u64) -> Result<BigRational> {
    if n <= 3 {
        return Err(Error::EnumerationRequired(n));
    }
    if m == 0 {
        return Err(Error::NoEdges);
    }
    Ok(closed_form(n as i128, m as i128, int(m3 as i128)))
}

pub fn randseq_variance(n: usize, m: u64, m3: u64) -> Result<f64> {
    Ok(ratio_to_f64(&randseq_variance_exact(n, m, m3)?))
}

/// The closed form with a real-valued wedge count, for parametric curves.
pub fn randseq_variance_approx(n: usize, m: u64, m3: f64) -> Result<f64> {
    if n <= 3 {
        return Err(Error::EnumerationRequired(n));
    }
    let (n, m) = (n as f64, m as f64);
    Ok((n + 1.0) / (n - 2.0)
        * ((5.0 * n - 8.0) / (5.0 * (n + 1.0)) + m3 * (n - 4.0) / (5.0 * m * (n + 1.0)) - 2.0 * m / (5.0 * (n + 1.0))))
}

/// Exact variance of `z1` over random sequences of any graph with `N >= 3`.
///
/// Ordered pairs of distinct edge copies fall into three classes: parallel
/// copies (`2P` pairs, `P = Σ C(A_uv, 2)`), wedges (`2 M3`), and disjoint
/// pairs (`2 M4`, `M4 = C(M,2) - M3 - P`). On simple graphs this equals
/// [`randseq_variance_exact`].
pub fn randseq_variance_of(g: &Graph) -> Result<BigRational> {
    let n = g.n_vertices();
    let m = g.n_edges();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    if n < 3 {
        return Err(Error::DegenerateSize(format!("z1 requires N >= 3 (got N = {n})")));
    }
    let (ni, mi) = (n as i128, m as i128);
    let p = parallel_pair_count(g) as i128;
    let m3 = wedge_count(g) as i128;
    let m4 = mi * (mi - 1) / 2 - m3 - p;
    let second = int(mi + 2 * p) * int(ni * (ni + 1)) / int(6)
        + int(2 * m3) * wedge_distance_moment(n)
        + int(2 * m4) * disjoint_distance_moment(n);
    let mean = int(mi * (ni + 1)) / int(3);
    let var_raw = second - mean.clone() * mean;
    Ok(var_raw * int(18) / int(mi * (ni + 1) * (ni - 2)))
}

/// `z1(g, s)` divided by the standard deviation of `z1` over random
/// sequences.
pub fn z1_factor(g: &Graph, s: &VertexSequence) -> Result<f64> {
    let var = randseq_variance_of(g)?;
    if var <= BigRational::zero() {
        return Err(Error::ZeroVariance("z1 is constant over all sequences of this graph".into()));
    }
    Ok(z1(g, s)? / ratio_to_f64(&var).sqrt())
}

/// Distribution of the raw distance sum over sequences, exhaustive or
/// sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceNullSummary {
    pub n: usize,
    pub m: u64,
    pub m3: u64,
    /// Whether all `N!` sequences were evaluated.
    pub exhaustive: bool,
    pub n_sequences: u64,
    pub mean_z1: f64,
    pub var_z1: f64,
    /// Variance of `z1` predicted by the moment formula.
    pub var_z1_formula: f64,
    /// `(raw_sum, count)`, ascending.
    pub histogram: Vec<(u64, u64)>,
    /// Distinct permuted adjacency matrices, `N!/|Aut(G)|` (exhaustive only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinct_matrices: Option<u64>,
}

impl SequenceNullSummary {
    fn build(g: &Graph, hist: BTreeMap<u64, u64>, exhaustive: bool, distinct: Option<u64>) -> Result<Self> {
        let n = g.n_vertices();
        let m = g.n_edges();
        let scale = z1_scale(n, m)?;
        let beta = beta1(n, m);
        let total: u64 = hist.values().sum();
        let zs: Vec<(f64, f64)> = hist.iter().map(|(&raw, &c)| (scale * (raw as f64 / beta - 1.0), c as f64)).collect();
        let mean = zs.iter().map(|(z, c)| z * c).sum::<f64>() / total as f64;
        let var = zs.iter().map(|(z, c)| (z - mean).powi(2) * c).sum::<f64>() / total as f64;
        Ok(Self {
            n,
            m,
            m3: wedge_count(g),
            exhaustive,
            n_sequences: total,
            mean_z1: mean,
            var_z1: var,
            var_z1_formula: ratio_to_f64(&randseq_variance_of(g)?),
            histogram: hist.into_iter().collect(),
            distinct_matrices: distinct,
        })
    }

    pub fn z1_of_raw(&self, raw: u64) -> f64 {
        let scale = z1_scale(self.n, self.m).expect("validated on construction");
        scale * (raw as f64 / beta1(self.n, self.m) - 1.0)
    }

    /// Fraction of sequences with raw sum `<= raw` (equivalently `z1 <=`).
    pub fn p_value_le(&self, raw: u64) -> f64 {
        self.histogram.iter().take_while(|(s, _)| *s <= raw).map(|(_, c)| *c).sum::<u64>() as f64 / self.n_sequences as f64
    }

    /// Fraction of sequences with raw sum `< raw`.
    pub fn p_value_lt(&self, raw: u64) -> f64 {
        self.histogram.iter().take_while(|(s, _)| *s < raw).map(|(_, c)| *c).sum::<u64>() as f64 / self.n_sequences as f64
    }

    /// Binomial standard error of an estimated p-value.
    pub fn standard_error(&self, p: f64) -> f64 {
        if self.exhaustive {
            0.0
        } else {
            (p * (1.0 - p) / self.n_sequences as f64).sqrt()
        }
    }

    pub fn min_z1(&self) -> f64 {
        self.z1_of_raw(self.histogram.first().expect("non-empty histogram").0)
    }

    /// Mean raw sum as an exact rational.
    pub fn exact_mean_raw(&self) -> BigRational {
        let total: BigInt = self.histogram.iter().map(|(_, c)| BigInt::from(*c)).sum();
        let sum: BigInt = self.histogram.iter().map(|(s, c)| BigInt::from(*s) * BigInt::from(*c)).sum();
        BigRational::new(sum, total)
    }

    /// Variance of `z1` over the histogram as an exact rational.
    pub fn exact_var_z1(&self) -> BigRational {
        let total: BigInt = self.histogram.iter().map(|(_, c)| BigInt::from(*c)).sum();
        let second: BigInt = self.histogram.iter().map(|(s, c)| BigInt::from(*s) * BigInt::from(*s) * BigInt::from(*c)).sum();
        let mean = self.exact_mean_raw();
        let var_raw = BigRational::new(second, total) - mean.clone() * mean;
        let (n, m) = (self.n as i128, self.m as i128);
        var_raw * int(18) / int(m * (n + 1) * (n - 2))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("raw_sum,count\n");
        for (s, c) in &self.histogram {
            out.push_str(&format!("{s},{c}\n"));
        }
        out
    }
}

/// Default cap on `N` for exhaustive enumeration (`9! = 362880`).
pub const DEFAULT_ENUMERATION_CAP: usize = 9;

pub fn exact_seq_distribution(g: &Graph) -> Result<SequenceNullSummary> {
    exact_seq_distribution_with_cap(g, DEFAULT_ENUMERATION_CAP)
}

pub(crate) fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&x| x > xs[i]).expect("successor exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// Evaluates every sequence. Work is split by the positions of the first
/// two vertices and the partial histograms are merged, so the result does
/// not depend on scheduling.
pub fn exact_seq_distribution_with_cap(g: &Graph, cap: usize) -> Result<SequenceNullSummary> {
    let n = g.n_vertices();
    if n > cap {
        return Err(Error::InvalidParameter(format!(
            "N = {n} exceeds the enumeration cap {cap}; use sampled_seq_distribution"
        )));
    }
    if g.n_edges() == 0 {
        return Err(Error::NoEdges);
    }
    z1_scale(n, g.n_edges())?;
    let mut matrix = vec![0u64; n * n];
    for e in g.edges() {
        matrix[e.u * n + e.v] = e.multiplicity;
        matrix[e.v * n + e.u] = e.multiplicity;
    }
    let prefixes: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let parts: Vec<(BTreeMap<u64, u64>, u64)> = prefixes
        .into_par_iter()
        .map(|(a, b)| {
            // positions[v] is the 0-based position of vertex v
            let mut rest: Vec<usize> = (0..n).filter(|&x| x != a && x != b).collect();
            let mut positions = vec![0usize; n];
            let mut hist = BTreeMap::new();
            let mut automorphisms = 0u64;
            loop {
                positions[0] = a;
                positions[1] = b;
                positions[2..].copy_from_slice(&rest);
                let mut raw = 0u64;
                let mut fixed = true;
                for e in g.edges() {
                    let (pu, pv) = (positions[e.u], positions[e.v]);
                    raw += e.multiplicity * pu.abs_diff(pv) as u64;
                    fixed &= matrix[pu * n + pv] == e.multiplicity;
                }
                *hist.entry(raw).or_insert(0) += 1;
                automorphisms += u64::from(fixed);
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            (hist, automorphisms)
        })
        .collect();
    let mut hist = BTreeMap::new();
    let mut automorphisms = 0;
    for (part, aut) in parts {
        automorphisms += aut;
        for (k, v) in part {
            *hist.entry(k).or_insert(0) += v;
        }
    }
    let total: u64 = hist.values().sum();
    SequenceNullSummary::build(g, hist, true, Some(total / automorphisms))
}

/// Monte Carlo version of [`exact_seq_distribution`] with uniform shuffles.
pub fn sampled_seq_distribution(g: &Graph, n_samples: u64, seed: u64) -> Result<SequenceNullSummary> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    if g.n_edges() == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.n_vertices();
    z1_scale(n, g.n_edges())?;
    let mut rng = rng_from_seed(seed);
    let mut positions: Vec<usize> = (1..=n).collect();
    let mut hist = BTreeMap::new();
    for _ in 0..n_samples {
        positions.shuffle(&mut rng);
        let s = VertexSequence::new(positions.clone())?;
        *hist.entry(raw_distance_sum(g, &s)).or_insert(0) += 1;
    }
    SequenceNullSummary::build(g, hist, false, None)
}

/// One point of the parametric comparison between the ER and
/// random-sequence nulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub m3_ratio: f64,
    pub z1: f64,
    pub p_er: f64,
    pub p_random: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub n: usize,
    pub m: u64,
    pub points: Vec<CurvePoint>,
    pub notes: Vec<String>,
}

impl Curve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m3_ratio,z1,p_er,p_random\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", p.m3_ratio, p.z1, p.p_er, p.p_random));
        }
        out
    }
}

/// `P(Z < z1)` under both nulls for graphs with `M3 = ratio · cM`, `c = 2M/N`.
pub fn er_vs_random_curve(n: usize, m: u64, m3_ratios: &[f64], z_values: &[f64]) -> Result<Curve> {
    let c = 2.0 * m as f64 / n as f64;
    let mut points = Vec::new();
    for &ratio in m3_ratios {
        let var = randseq_variance_approx(n, m, ratio * c * m as f64)?;
        if var <= 0.0 {
            return Err(Error::ZeroVariance(format!("M3 ratio {ratio} gives variance {var}")));
        }
        for &z in z_values {
            points.push(CurvePoint { m3_ratio: ratio, z1: z, p_er: normal_cdf(z), p_random: normal_cdf(z / var.sqrt()) });
        }
    }
    Ok(Curve {
        n,
        m,
        points,
        notes: vec!["random-sequence probabilities use a normal approximation with the moment-formula variance".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    fn triangle_pendant() -> Graph {
        Graph::from_pairs(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(randseq_variance_exact(4, 4, 5).unwrap(), rational(2, 5));
        assert!(matches!(randseq_variance(3, 2, 1), Err(Error::EnumerationRequired(3))));
        assert_eq!(closed_form(3, 2, rational(1, 1)), rational(1, 2));
        assert_eq!(randseq_variance_of(&path3()).unwrap(), rational(1, 2));
        assert!((randseq_variance_approx(4, 4, 5.0).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn general_variance_reduces_to_closed_form() {
        let g = Graph::from_pairs(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (2, 6), (0, 2)]).unwrap();
        let v = randseq_variance_exact(7, g.n_edges(), wedge_count(&g)).unwrap();
        assert_eq!(randseq_variance_of(&g).unwrap(), v);
    }

    #[test]
    fn path3_enumeration() {
        let s = exact_seq_distribution(&path3()).unwrap();
        assert_eq!(s.histogram, vec![(2, 2), (3, 4)]);
        // raw 2 -> z1 = -1, raw 3 -> z1 = 0.5
        assert!((s.z1_of_raw(2) + 1.0).abs() < 1e-12);
        assert!((s.z1_of_raw(3) - 0.5).abs() < 1e-12);
        assert_eq!(s.exact_var_z1(), rational(1, 2));
        assert_eq!(s.distinct_matrices, Some(3));
    }

    #[test]
    fn triangle_pendant_enumeration() {
        let g = triangle_pendant();
        let s = exact_seq_distribution(&g).unwrap();
        assert_eq!(s.n_sequences, 24);
        assert_eq!(s.distinct_matrices, Some(12));
        assert!((s.min_z1() - 20f64.sqrt() * -0.25).abs() < 1e-12);
        assert_eq!(s.exact_var_z1(), rational(2, 5));
        assert_eq!(s.exact_mean_raw(), rational(20, 3));
        let min_raw = s.histogram[0].0;
        assert_eq!(s.p_value_lt(min_raw), 0.0);
        assert!((s.p_value_le(min_raw) - s.histogram[0].1 as f64 / 24.0).abs() < 1e-15);
        let best = VertexSequence::identity(4);
        assert!((z1_factor(&g, &best).unwrap() - s.min_z1() / 0.4f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cases() {
        let triangle = Graph::from_pairs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(z1_factor(&triangle, &VertexSequence::identity(3)), Err(Error::ZeroVariance(_))));
        let big = Graph::from_pairs(10, &[(0, 9)]).unwrap();
        assert!(exact_seq_distribution(&big).is_err());
        assert!(exact_seq_distribution_with_cap(&big, 10).is_ok());
    }

    #[test]
    fn z1_factor_of_path() {
        let f = z1_factor(&path3(), &VertexSequence::identity(3)).unwrap();
        assert!((f + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sampled_agrees_with_enumeration() {
        let g = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]).unwrap();
        let a = sampled_seq_distribution(&g, 20_000, 9).unwrap();
        assert_eq!(a, sampled_seq_distribution(&g, 20_000, 9).unwrap());
        assert!(a.mean_z1.abs() < 4.0 / (20_000f64).sqrt());
        let e = exact_seq_distribution(&g).unwrap();
        assert!((a.var_z1 / e.var_z1 - 1.0).abs() < 0.05);
        let raw = e.histogram[2].0;
        let p = a.p_value_le(raw);
        assert!((p - e.p_value_le(raw)).abs() < 4.0 * a.standard_error(p).max(1e-3));
    }

    #[test]
    fn curve_properties() {
        let curve = er_vs_random_curve(100, 200, &[0.5, 1.0, 2.0], &[-3.0, -1.0, 0.0]).unwrap();
        for p in &curve.points {
            if p.z1 == 0.0 {
                assert_eq!((p.p_er, p.p_random), (0.5, 0.5));
            }
        }
        let var = randseq_variance_approx(100, 200, 2.0 * 4.0 * 200.0).unwrap();
        assert!(var > 1.0);
        for p in curve.points.iter().filter(|p| p.m3_ratio == 2.0 && p.z1 < 0.0) {
            assert!(p.p_er < p.p_random);
        }
    }

    #[test]
    fn next_permutation_visits_all() {
        let mut xs = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(xs, vec![3, 2, 1, 0]);
    }
}
