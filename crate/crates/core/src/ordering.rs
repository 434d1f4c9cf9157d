//! Sequence-producing heuristics: spectral ordering and reversed
//! Cuthill–McKee.
//!
//! Both handle disconnected graphs the same way: each connected component
//! is ordered on its own, components are concatenated by size (largest
//! first, ties by smallest vertex id), so isolated vertices end up last in
//! input order.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingMethod {
    Spectral,
    Rcm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingResult {
    pub sequence: VertexSequence,
    pub method: OrderingMethod,
    /// Second-smallest normalized-Laplacian eigenvalue of the largest
    /// component (spectral only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiedler_value: Option<f64>,
    /// `max |π_i - π_j|` over edges.
    pub bandwidth: usize,
}

/// Matrix bandwidth of `g` under `s`.
pub fn bandwidth(g: &Graph, s: &VertexSequence) -> usize {
    g.edges().iter().map(|e| s.position(e.u).abs_diff(s.position(e.v))).max().unwrap_or(0)
}

/// Connected components, largest first (ties by smallest member), each
/// listed in ascending vertex id.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let n = g.n_vertices();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    // stable sort keeps discovery order (ascending smallest member) on ties
    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    comps
}

fn finish(g: &Graph, order: Vec<usize>, method: OrderingMethod, fiedler_value: Option<f64>) -> Result<OrderingResult> {
    let sequence = VertexSequence::from_order(&order)?;
    let bandwidth = bandwidth(g, &sequence);
    Ok(OrderingResult { sequence, method, fiedler_value, bandwidth })
}

/// Orders one component by its Fiedler vector. Returns the order and the
/// Fiedler value.
fn spectral_component(g: &Graph, comp: &[usize], adj: &[Vec<(usize, u64)>]) -> Result<(Vec<usize>, f64)> {
    let k = comp.len();
    if k == 1 {
        return Ok((comp.to_vec(), 0.0));
    }
    let mut local = vec![usize::MAX; g.n_vertices()];
    for (i, &v) in comp.iter().enumerate() {
        local[v] = i;
    }
    let inv_sqrt: Vec<f64> = comp.iter().map(|&v| 1.0 / (g.degrees()[v] as f64).sqrt()).collect();
    let mut lap = DMatrix::<f64>::identity(k, k);
    for (i, &u) in comp.iter().enumerate() {
        for &(v, w) in &adj[u] {
            let j = local[v];
            lap[(i, j)] -= w as f64 * inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let eig = SymmetricEigen::try_new(lap, 1e-12, 100_000)
        .ok_or_else(|| Error::EigenSolver(format!("no convergence for a component of size {k}")))?;
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let col = idx[1];
    // D^{-1/2} v: the random-walk eigenvector, monotone along paths
    let mut score: Vec<f64> = (0..k).map(|i| eig.eigenvectors[(i, col)] * inv_sqrt[i]).collect();
    let scale = score.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for x in score.iter_mut() {
        *x /= scale;
        if x.abs() < 1e-12 {
            *x = 0.0;
        }
    }
    // sign convention: the lowest-id vertex with a nonzero entry scores negative
    if let Some(first) = score.iter().find(|x| **x != 0.0) {
        if *first > 0.0 {
            score.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(comp[a].cmp(&comp[b])));
    Ok((order.into_iter().map(|i| comp[i]).collect(), eig.eigenvalues[col]))
}

/// Spectral ordering by the second eigenvector of
/// `L = I - D^{-1/2} A D^{-1/2}`, computed per component.
pub fn spectral_ordering(g: &Graph) -> Result<OrderingResult> {
    if g.n_edges() == 0 {
        return Err(Error::NoEdges);
    }
    let adj = g.adjacency();
    let mut order = Vec::with_capacity(g.n_vertices());
    let mut fiedler = None;
    for comp in components(g) {
        let (part, value) = spectral_component(g, &comp, &adj)?;
        if fiedler.is_none() {
            fiedler = Some(value);
        }
        order.extend(part);
    }
    finish(g, order, OrderingMethod::Spectral, fiedler)
}

fn bfs_levels(start: usize, adj: &[Vec<(usize, u64)>], degree: &[u64], local: &mut [usize]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut levels = vec![vec![start]];
    let mut touched = vec![start];
    local[start] = 0;
    loop {
        let mut next = Vec::new();
        for &u in levels.last().unwrap() {
            for &(v, _) in &adj[u] {
                if local[v] == UNSEEN {
                    local[v] = 0;
                    next.push(v);
                    touched.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by_key(|&v| (degree[v], v));
        levels.push(next);
    }
    for v in touched {
        local[v] = UNSEEN;
    }
    levels
}

/// George–Liu pseudo-peripheral vertex, starting from the minimum-degree
/// vertex of the component.
fn pseudo_peripheral(comp: &[usize], adj: &[Vec<(usize, u64)>], degree: &[u64], mark: &mut [usize]) -> usize {
    let mut v = *comp.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
    let mut ecc = bfs_levels(v, adj, degree, mark).len();
    loop {
        let levels = bfs_levels(v, adj, degree, mark);
        let candidate = *levels.last().unwrap().iter().min_by_key(|&&u| (degree[u], u)).unwrap();
        let cand_ecc = bfs_levels(candidate, adj, degree, mark).len();
        if cand_ecc > ecc {
            v = candidate;
            ecc = cand_ecc;
        } else {
            return v;
        }
    }
}

/// Reversed Cuthill–McKee.
pub fn rcm_ordering(g: &Graph) -> Result<OrderingResult> {
    let adj = g.adjacency();
    let degree: Vec<u64> = adj.iter().map(|nb| nb.len() as u64).collect();
    let mut mark = vec![usize::MAX; g.n_vertices()];
    let mut visited = vec![false; g.n_vertices()];
    let mut order = Vec::with_capacity(g.n_vertices());
    for comp in components(g) {
        let start = pseudo_peripheral(&comp, &adj, &degree, &mut mark);
        let mut part = vec![start];
        visited[start] = true;
        let mut head = 0;
        while head < part.len() {
            let u = part[head];
            head += 1;
            let mut nbrs: Vec<usize> = adj[u].iter().map(|&(v, _)| v).filter(|&v| !visited[v]).collect();
            nbrs.sort_by_key(|&v| (degree[v], v));
            for v in nbrs {
                visited[v] = true;
                part.push(v);
            }
        }
        part.reverse();
        order.extend(part);
    }
    finish(g, order, OrderingMethod::Rcm, None)
}
