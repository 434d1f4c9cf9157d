//! Uniform selection of edge slots (upper-triangle cells of the adjacency
//! matrix), with or without repetition.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// Number of unordered vertex pairs, `C(n, 2)`.
pub fn n_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Row-major index into the strict upper triangle of an `n × n` matrix.
pub fn pair_from_index(n: usize, idx: u64) -> (usize, usize) {
    let offset = |i: u64| i * (2 * n as u64 - i - 1) / 2;
    let (mut lo, mut hi) = (0u64, n as u64 - 1);
    // largest i with offset(i) <= idx
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if offset(mid) <= idx {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = lo;
    let j = i + 1 + (idx - offset(i));
    (i as usize, j as usize)
}

/// Draws `m` slot indices out of `n_slots`.
///
/// Without repetition every `m`-subset is equally likely. With repetition
/// every `m`-multiset is equally likely (stars and bars: an `m`-subset of
/// `n_slots + m - 1` cells, sorted, shifted by rank), which matches the
/// `nHr(n_slots, m)` counting of uniform multigraphs.
pub fn draw_slots<R: Rng + ?Sized>(rng: &mut R, n_slots: u64, m: u64, simple: bool) -> Result<Vec<u64>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    if n_slots == 0 {
        return Err(Error::Infeasible(format!("cannot place {m} edges in an empty region")));
    }
    if simple {
        if m > n_slots {
            return Err(Error::Infeasible(format!(
                "{m} edges exceed the {n_slots} available slots of a simple graph"
            )));
        }
        Ok(sample_distinct(rng, n_slots, m))
    } else {
        let mut picks = sample_distinct(rng, n_slots + m - 1, m);
        picks.sort_unstable();
        Ok(picks.into_iter().enumerate().map(|(k, v)| v - k as u64).collect())
    }
}

fn sample_distinct<R: Rng + ?Sized>(rng: &mut R, length: u64, amount: u64) -> Vec<u64> {
    if let (Ok(len), Ok(amt)) = (usize::try_from(length), usize::try_from(amount)) {
        index::sample(rng, len, amt).into_iter().map(|i| i as u64).collect()
    } else {
        // Floyd's algorithm for lengths beyond usize
        let mut chosen = std::collections::BTreeSet::new();
        for j in (length - amount)..length {
            let t = rng.random_range(0..=j);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}
