//! The ordered random graph model (ORGM): `M_in` edges placed uniformly in
//! the in-envelope region `Ω_in` of the adjacency matrix and `M_out` in the
//! complement `Ω_out`, with the identity as planted sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{ratio_to_f64, rng_from_seed};
use crate::slots::{draw_slots, n_pairs};
use crate::stats::beta1;

/// Shape of `Ω_in`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvelopeSpec {
    /// Pairs with `j - i <= r`.
    Banded { r: usize },
    /// Pairs inside the same block; block sizes in sequence order.
    BlockDiagonal { blocks: Vec<usize> },
}

impl EnvelopeSpec {
    pub fn banded(r: usize) -> Self {
        EnvelopeSpec::Banded { r }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            EnvelopeSpec::Banded { r } => {
                if *r < 1 || *r + 1 > n {
                    return Err(Error::InvalidParameter(format!("bandwidth r = {r} outside [1, {}]", n.saturating_sub(1))));
                }
            }
            EnvelopeSpec::BlockDiagonal { blocks } => {
                if blocks.contains(&0) || blocks.iter().sum::<usize>() != n {
                    return Err(Error::InvalidParameter(format!("block sizes {blocks:?} must be positive and sum to N = {n}")));
                }
            }
        }
        Ok(())
    }

    /// Membership of the 0-based pair `i < j`.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        match self {
            EnvelopeSpec::Banded { r } => j - i <= *r,
            EnvelopeSpec::BlockDiagonal { blocks } => {
                let mut end = 0;
                for &b in blocks {
                    end += b;
                    if i < end {
                        return j < end;
                    }
                }
                false
            }
        }
    }
}

/// `(|Ω_in|, |Ω_out|)`.
pub fn omega_sizes(n: usize, envelope: &EnvelopeSpec) -> Result<(u64, u64)> {
    envelope.validate(n)?;
    let inside = match envelope {
        EnvelopeSpec::Banded { r } => {
            let (n, r) = (n as u64, *r as u64);
            r * (2 * n - r - 1) / 2
        }
        EnvelopeSpec::BlockDiagonal { blocks } => blocks.iter().map(|&b| n_pairs(b)).sum(),
    };
    Ok((inside, n_pairs(n) - inside))
}

/// Graph class an ORGM (or its fit) ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Simple,
    Multigraph,
}

impl Variant {
    pub fn is_simple(self) -> bool {
        self == Variant::Simple
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Simple => "simple",
            Variant::Multigraph => "multigraph",
        }
    }
}

/// Parameters of an ORGM. `ε` is derived from the edge counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrgmParams {
    pub n: usize,
    #[serde(flatten)]
    pub envelope: EnvelopeSpec,
    pub m_in: u64,
    pub m_out: u64,
    pub simple: bool,
}

impl OrgmParams {
    pub fn banded(n: usize, r: usize, m_in: u64, m_out: u64, simple: bool) -> Self {
        Self { n, envelope: EnvelopeSpec::banded(r), m_in, m_out, simple }
    }

    /// Splits `M` edges so that the density ratio is `eps`:
    /// `M_out = round(M ε |Ω_out| / (|Ω_in| + ε |Ω_out|))`.
    pub fn from_density_ratio(n: usize, m: u64, r: usize, eps: f64, simple: bool) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("density ratio must be finite and >= 0, got {eps}")));
        }
        let envelope = EnvelopeSpec::banded(r);
        let (w_in, w_out) = omega_sizes(n, &envelope)?;
        let m_out = (m as f64 * eps * w_out as f64 / (w_in as f64 + eps * w_out as f64)).round() as u64;
        let p = Self { n, envelope, m_in: m - m_out, m_out, simple };
        p.validate()?;
        Ok(p)
    }

    pub fn m(&self) -> u64 {
        self.m_in + self.m_out
    }

    pub fn omega(&self) -> Result<(u64, u64)> {
        omega_sizes(self.n, &self.envelope)
    }

    /// `(M_out/|Ω_out|) / (M_in/|Ω_in|)`; `None` when undefined.
    pub fn eps(&self) -> Option<f64> {
        let (w_in, w_out) = self.omega().ok()?;
        if self.m_in == 0 || w_out == 0 {
            return None;
        }
        Some((self.m_out as f64 / w_out as f64) / (self.m_in as f64 / w_in as f64))
    }

    pub fn validate(&self) -> Result<()> {
        let (w_in, w_out) = self.omega()?;
        for (name, m, w) in [("in", self.m_in, w_in), ("out", self.m_out, w_out)] {
            if (self.simple && m > w) || (w == 0 && m > 0) {
                return Err(Error::Infeasible(format!(
                    "M_{name} = {m} does not fit in |Ω_{name}| = {w}{}",
                    if self.simple { " for a simple graph" } else { "" }
                )));
            }
        }
        Ok(())
    }
}

/// Maps an index within a region to its 0-based vertex pair.
fn region_pair(n: usize, envelope: &EnvelopeSpec, inside: bool, idx: u64) -> (usize, usize) {
    match envelope {
        EnvelopeSpec::Banded { r } => {
            // pairs grouped by distance x, each class listed by row
            let (lo, hi) = if inside { (1, *r) } else { (*r + 1, n - 1) };
            let mut k = idx;
            for x in lo..=hi {
                let size = (n - x) as u64;
                if k < size {
                    return (k as usize, k as usize + x);
                }
                k -= size;
            }
            unreachable!("slot index beyond region")
        }
        EnvelopeSpec::BlockDiagonal { blocks } => {
            let mut k = idx;
            let mut start = 0usize;
            for &b in blocks {
                let end = start + b;
                for i in start..end {
                    let size = if inside { (end - i - 1) as u64 } else { (n - end) as u64 };
                    if k < size {
                        let j = if inside { i + 1 + k as usize } else { end + k as usize };
                        return (i, j);
                    }
                    k -= size;
                }
                start = end;
            }
            unreachable!("slot index beyond region")
        }
    }
}

/// Draws one ORGM graph; vertex `i` sits at position `i + 1` of the planted
/// sequence.
pub fn sample_orgm(p: &OrgmParams, seed: u64) -> Result<Graph> {
    sample_orgm_with(p, &mut rng_from_seed(seed))
}

pub fn sample_orgm_with<R: Rng + ?Sized>(p: &OrgmParams, rng: &mut R) -> Result<Graph> {
    p.validate()?;
    let (w_in, w_out) = p.omega()?;
    let mut triples = Vec::with_capacity(p.m() as usize);
    for (inside, w, m) in [(true, w_in, p.m_in), (false, w_out, p.m_out)] {
        for idx in draw_slots(rng, w, m, p.simple)? {
            let (i, j) = region_pair(p.n, &p.envelope, inside, idx);
            triples.push((i, j, 1));
        }
    }
    Graph::new(p.n, triples)
}

/// Sums of `d` and `d^2` over banded regions, as exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSums {
    pub in1: i128,
    pub in2: i128,
    pub out1: i128,
    pub out2: i128,
}

impl BandSums {
    pub fn new(n: usize, r: usize) -> Self {
        let (n, r) = (n as i128, r as i128);
        let in1 = r * (r + 1) * (3 * n - 2 * r - 1) / 6;
        let in2 = n * r * (r + 1) * (2 * r + 1) / 6 - (r * (r + 1) / 2).pow(2);
        let total1 = (n - 1) * n * (n + 1) / 6;
        let total2 = n * n * (n - 1) * (n + 1) / 12;
        Self { in1, in2, out1: total1 - in1, out2: total2 - in2 }
    }
}

fn big(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `(E[A], E[A^2], E[A A'])` for one slot and two distinct slots of a region
/// holding `m` edges in `w` slots.
fn slot_moments(m: u64, w: u64, simple: bool) -> (BigRational, BigRational, BigRational) {
    if w == 0 || m == 0 {
        return (BigRational::zero(), BigRational::zero(), BigRational::zero());
    }
    let (m, w) = (m as i128, w as i128);
    let first = big(m) / big(w);
    if simple {
        let pair = if w < 2 { BigRational::zero() } else { big(m * (m - 1)) / big(w * (w - 1)) };
        (first.clone(), first, pair)
    } else {
        let second = first.clone() * big(w + 2 * m - 1) / big(w + 1);
        let pair = big(m * (m - 1)) / big(w * (w + 1));
        (first, second, pair)
    }
}

/// Exact mean and variance of `H1` (identity sequence) under a banded ORGM.
pub fn orgm_h1_moments_exact(p: &OrgmParams) -> Result<(BigRational, BigRational)> {
    let r = match p.envelope {
        EnvelopeSpec::Banded { r } => r,
        EnvelopeSpec::BlockDiagonal { .. } => {
            return Err(Error::NotSupported("closed-form H1 moments exist only for banded envelopes".into()))
        }
    };
    if p.n < 3 {
        return Err(Error::DegenerateSize(format!("ORGM moments require N >= 3 (got {})", p.n)));
    }
    p.validate()?;
    let (w_in, w_out) = p.omega()?;
    if w_in < 2 {
        return Err(Error::DegenerateSize(format!("|Ω_in| = {w_in} < 2")));
    }
    if p.m() == 0 {
        return Err(Error::NoEdges);
    }
    let s = BandSums::new(p.n, r);
    let (a_in, a2_in, aa_in) = slot_moments(p.m_in, w_in, p.simple);
    let (a_out, a2_out, aa_out) = slot_moments(p.m_out, w_out, p.simple);
    let raw_mean = a_in.clone() * big(s.in1) + a_out.clone() * big(s.out1);
    let raw_second = a2_in * big(s.in2)
        + aa_in * big(s.in1 * s.in1 - s.in2)
        + a2_out * big(s.out2)
        + aa_out * big(s.out1 * s.out1 - s.out2)
        + big(2) * a_in * a_out * big(s.in1 * s.out1);
    let beta = big(p.m() as i128 * (p.n as i128 + 1)) / big(3);
    let mean = raw_mean.clone() / beta.clone();
    let var = (raw_second - raw_mean.clone() * raw_mean) / (beta.clone() * beta);
    Ok((mean, var))
}

/// Mean and variance of `H1` under a banded ORGM.
pub fn orgm_h1_moments(p: &OrgmParams) -> Result<(f64, f64)> {
    let (mean, var) = orgm_h1_moments_exact(p)?;
    Ok((ratio_to_f64(&mean), ratio_to_f64(&var)))
}

/// Parameters `(mean, std)` of the normal approximation of `H1`.
pub fn orgm_h1_normal(p: &OrgmParams) -> Result<(f64, f64)> {
    let (mean, var) = orgm_h1_moments_exact(p)?;
    if var < BigRational::zero() {
        return Err(Error::ZeroVariance(format!("negative variance {}", ratio_to_f64(&var))));
    }
    Ok((ratio_to_f64(&mean), ratio_to_f64(&var).sqrt()))
}

/// `H1` normalization for the ORGM's total edge count.
pub fn orgm_beta1(p: &OrgmParams) -> f64 {
    beta1(p.n, p.m())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSequence;
    use crate::numeric::{mean_var, rational};
    use crate::stats::{h1, raw_distance_sum};

    #[test]
    fn omega_examples() {
        assert_eq!(omega_sizes(5, &EnvelopeSpec::banded(2)).unwrap(), (7, 3));
        assert_eq!(omega_sizes(50, &EnvelopeSpec::banded(10)).unwrap(), (445, 780));
        assert_eq!(omega_sizes(9, &EnvelopeSpec::banded(8)).unwrap(), (36, 0));
        assert!(omega_sizes(9, &EnvelopeSpec::banded(9)).is_err());
        assert!(omega_sizes(9, &EnvelopeSpec::banded(0)).is_err());
        let blocks = EnvelopeSpec::BlockDiagonal { blocks: vec![2, 3] };
        assert_eq!(omega_sizes(5, &blocks).unwrap(), (4, 6));
    }

    #[test]
    fn omega_counts_match_membership() {
        for n in 2..12 {
            let mut envs: Vec<EnvelopeSpec> = (1..n).map(EnvelopeSpec::banded).collect();
            envs.push(EnvelopeSpec::BlockDiagonal { blocks: vec![1, n - 1] });
            for env in envs {
                let inside = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| env.contains(i, j)).count();
                assert_eq!(omega_sizes(n, &env).unwrap().0, inside as u64);
            }
        }
    }

    #[test]
    fn region_pairs_enumerate_each_region_once() {
        let envs = [EnvelopeSpec::banded(3), EnvelopeSpec::BlockDiagonal { blocks: vec![3, 1, 4] }];
        for env in envs {
            let (w_in, w_out) = omega_sizes(8, &env).unwrap();
            for (inside, w) in [(true, w_in), (false, w_out)] {
                let mut seen: Vec<_> = (0..w).map(|k| region_pair(8, &env, inside, k)).collect();
                assert!(seen.iter().all(|&(i, j)| i < j && env.contains(i, j) == inside));
                seen.sort_unstable();
                seen.dedup();
                assert_eq!(seen.len() as u64, w);
            }
        }
    }

    #[test]
    fn band_sums_match_direct_summation() {
        for n in 2..40 {
            for r in 1..n {
                let (mut s, n_i) = ([0i128; 4], n as i128);
                for x in 1..n_i {
                    let k = if x <= r as i128 { 0 } else { 2 };
                    s[k] += (n_i - x) * x;
                    s[k + 1] += (n_i - x) * x * x;
                }
                assert_eq!(BandSums::new(n, r), BandSums { in1: s[0], in2: s[1], out1: s[2], out2: s[3] });
                if r < n - 1 {
                    // factored forms of the out-of-envelope sums
                    let (n, r) = (n as i128, r as i128);
                    let out1 = n * n * n - n * (3 * r * r + 3 * r + 1) + r * (2 * r * r + 3 * r + 1);
                    assert_eq!(6 * s[2], out1);
                    let t = (2 * n + 2 * r + 1).pow(2) + 8 * r * (r + 1) - 1;
                    assert_eq!(48 * s[3], (n - r) * (n - r - 1) * t);
                }
            }
        }
    }

    #[test]
    fn mean_examples() {
        let p = OrgmParams::banded(5, 2, 3, 0, true);
        assert_eq!(orgm_h1_moments_exact(&p).unwrap().0, rational(5, 7));
        for n in [5, 20, 61] {
            let p = OrgmParams::banded(n, n - 1, 7, 0, true);
            assert_eq!(orgm_h1_moments_exact(&p).unwrap().0, rational(1, 1));
            let p = OrgmParams::banded(n, 1, 3, 0, true);
            let (mean, var) = orgm_h1_moments_exact(&p).unwrap();
            assert_eq!(mean, rational(3, n as i64 + 1));
            assert!(var.is_zero());
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(OrgmParams::banded(5, 2, 8, 0, true).validate().is_err());
        assert!(OrgmParams::banded(5, 2, 8, 0, false).validate().is_ok());
        assert!(OrgmParams::banded(5, 4, 3, 1, false).validate().is_err());
        let p = OrgmParams::from_density_ratio(50, 200, 10, 1.0, true).unwrap();
        assert!((p.eps().unwrap() - 1.0).abs() < 0.02);
        assert_eq!(p.m(), 200);
        let p = OrgmParams::from_density_ratio(50, 200, 10, 0.0, true).unwrap();
        assert_eq!((p.m_in, p.m_out), (200, 0));
        let blocks = OrgmParams { n: 4, envelope: EnvelopeSpec::BlockDiagonal { blocks: vec![2, 2] }, m_in: 1, m_out: 1, simple: true };
        assert!(matches!(orgm_h1_moments(&blocks), Err(Error::NotSupported(_))));
    }

    #[test]
    fn json_field_names() {
        let p = OrgmParams::banded(50, 20, 180, 20, true);
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v, serde_json::json!({"n": 50, "r": 20, "m_in": 180, "m_out": 20, "simple": true}));
        let b: OrgmParams = serde_json::from_str(r#"{"n": 5, "blocks": [2, 3], "m_in": 2, "m_out": 1, "simple": false}"#).unwrap();
        assert_eq!(b.envelope, EnvelopeSpec::BlockDiagonal { blocks: vec![2, 3] });
        assert_eq!(serde_json::from_value::<OrgmParams>(v).unwrap(), p);
    }

    #[test]
    fn sampling_respects_envelope() {
        for seed in 0..50 {
            let p = OrgmParams::banded(30, 4, 60, 0, seed % 2 == 0);
            let g = sample_orgm(&p, seed).unwrap();
            assert_eq!(g.n_edges(), 60);
            assert!(g.edges().iter().all(|e| e.v - e.u <= 4));
            if p.simple {
                assert!(g.is_simple());
            }
            let b = OrgmParams { n: 9, envelope: EnvelopeSpec::BlockDiagonal { blocks: vec![4, 5] }, m_in: 10, m_out: 3, simple: true };
            let g = sample_orgm(&b, seed).unwrap();
            let outside = g.edges().iter().filter(|e| !b.envelope.contains(e.u, e.v)).count();
            assert_eq!(outside, 3);
        }
        assert_eq!(
            sample_orgm(&OrgmParams::banded(40, 5, 50, 10, true), 3).unwrap(),
            sample_orgm(&OrgmParams::banded(40, 5, 50, 10, true), 3).unwrap()
        );
    }

    #[test]
    fn first_moment_of_in_envelope_slots() {
        let p = OrgmParams::banded(12, 3, 8, 4, true);
        let (w_in, _) = p.omega().unwrap();
        let draws = 10_000;
        let mut counts = std::collections::HashMap::new();
        let mut rng = rng_from_seed(1);
        for _ in 0..draws {
            for e in sample_orgm_with(&p, &mut rng).unwrap().edges() {
                *counts.entry((e.u, e.v)).or_insert(0u32) += 1;
            }
        }
        let q = p.m_in as f64 / w_in as f64;
        let se = (q * (1.0 - q) / draws as f64).sqrt();
        for i in 0..12 {
            for j in i + 1..(i + 4).min(12) {
                let freq = *counts.get(&(i, j)).unwrap_or(&0) as f64 / draws as f64;
                assert!((freq - q).abs() < 4.0 * se, "({i},{j}): {freq} vs {q}");
            }
        }
    }

    #[test]
    fn sampled_moments_agree_with_closed_form() {
        for simple in [true, false] {
            let p = OrgmParams::banded(20, 5, 25, 6, simple);
            let (mean, var) = orgm_h1_moments(&p).unwrap();
            let mut rng = rng_from_seed(17);
            let xs: Vec<f64> = (0..20_000)
                .map(|_| h1(&sample_orgm_with(&p, &mut rng).unwrap(), &VertexSequence::identity(20)).unwrap())
                .collect();
            let (m, v) = mean_var(&xs);
            let se = (var / xs.len() as f64).sqrt();
            assert!((m - mean).abs() < 4.0 * se, "simple={simple}: {m} vs {mean}");
            assert!((v / var - 1.0).abs() < 0.05, "simple={simple}: {v} vs {var}");
        }
    }

    #[test]
    fn full_band_without_outside_edges_is_er() {
        // r = N-1: every pair is in the envelope and the simple ORGM is the
        // uniform simple graph, whose H1 variance has the finite-population
        // factor (Ω - M)/(Ω - 1) relative to i.i.d. draws.
        let (n, m) = (12usize, 10u64);
        let (_, var) = orgm_h1_moments_exact(&OrgmParams::banded(n, n - 1, m, 0, true)).unwrap();
        let w = n_pairs(n) as i64;
        let (n, m) = (n as i64, m as i64);
        let iid = rational(n - 2, 2 * m * (n + 1));
        assert_eq!(var, iid * rational(w - m, w - 1));
        let g = sample_orgm(&OrgmParams::banded(n as usize, n as usize - 1, m as u64, 0, true), 0).unwrap();
        assert!(raw_distance_sum(&g, &VertexSequence::identity(n as usize)) >= m as u64);
    }
}
