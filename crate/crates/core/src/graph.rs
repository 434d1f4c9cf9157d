//! Undirected multigraphs, vertex sequences, affinity metrics and the
//! edge-list / sequence file formats.
//!
//! Vertex ids are 0-based everywhere in the API and in files. Positions in a
//! [`VertexSequence`] are 1-based, so `positions[i]` is the place of vertex
//! `i` in the sequence, in `1..=N`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One vertex pair with its multiplicity; always `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub multiplicity: u64,
}

/// Undirected multigraph without self-loops. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    m: u64,
    degrees: Vec<u64>,
}

impl Graph {
    /// Builds a graph from `(u, v, multiplicity)` triples. Duplicate pairs
    /// (in either orientation) are merged.
    pub fn new<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut acc: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (u, v, w) in triples {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if w == 0 {
                continue;
            }
            *acc.entry((u.min(v), u.max(v))).or_insert(0) += w;
        }
        let edges: Vec<Edge> = acc
            .into_iter()
            .map(|((u, v), multiplicity)| Edge { u, v, multiplicity })
            .collect();
        let mut degrees = vec![0u64; n];
        let mut m = 0;
        for e in &edges {
            degrees[e.u] += e.multiplicity;
            degrees[e.v] += e.multiplicity;
            m += e.multiplicity;
        }
        Ok(Self { n, edges, m, degrees })
    }

    /// Simple-edge convenience constructor.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(u, v)| (u, v, 1)))
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Total multiplicity `M`.
    pub fn n_edges(&self) -> u64 {
        self.m
    }

    /// Distinct vertex pairs, sorted, `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| e.multiplicity == 1)
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .map(|i| self.edges[i].multiplicity)
            .unwrap_or(0)
    }

    /// Adjacency lists `(neighbor, multiplicity)`, neighbors ascending.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.multiplicity));
            adj[e.v].push((e.u, e.multiplicity));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Parses the edge-list format: optional first line `%N <int>`, `#`
    /// comments, and lines `u v` or `u v w`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared_n: Option<usize> = None;
        let mut triples = Vec::new();
        let mut max_id: Option<usize> = None;
        let mut seen_content = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('%') {
                let mut toks = rest.split_whitespace();
                let ok = !seen_content && declared_n.is_none() && toks.next() == Some("N");
                let n = toks.next().and_then(|t| t.parse::<usize>().ok());
                match (ok, n, toks.next()) {
                    (true, Some(n), None) => {
                        declared_n = Some(n);
                        continue;
                    }
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("malformed header '{line}' (expected '%N <int>' before any edge)"),
                        })
                    }
                }
            }
            seen_content = true;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 && toks.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 'u v' or 'u v w', found {} fields", toks.len()),
                });
            }
            let parse_id = |t: &str| -> Result<usize> {
                if t.starts_with('-') {
                    return Err(Error::Parse { line: line_no, message: format!("negative vertex id '{t}'") });
                }
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("malformed vertex id '{t}'"),
                })
            };
            let u = parse_id(toks[0])?;
            let v = parse_id(toks[1])?;
            let w = match toks.get(2) {
                None => 1,
                Some(t) => match t.parse::<u64>() {
                    Ok(w) if w >= 1 => w,
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("multiplicity must be a positive integer, found '{t}'"),
                        })
                    }
                },
            };
            if u == v {
                return Err(Error::Parse { line: line_no, message: format!("self-loop at vertex {u}") });
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            triples.push((u, v, w));
        }
        let inferred = max_id.map_or(0, |m| m + 1);
        let n = match declared_n {
            Some(n) if n < inferred => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("header declares N = {n} but vertex id {} appears", inferred - 1),
                })
            }
            Some(n) => n,
            None => inferred,
        };
        Self::new(n, triples)
    }

    pub fn read_edge_list<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::parse_edge_list(&text)
    }

    /// Serializes with an explicit `%N` header so isolated vertices survive.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "%N {}", self.n);
        for e in &self.edges {
            if e.multiplicity == 1 {
                let _ = writeln!(out, "{} {}", e.u, e.v);
            } else {
                let _ = writeln!(out, "{} {} {}", e.u, e.v, e.multiplicity);
            }
        }
        out
    }
}

/// A permutation assigning each vertex a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexSequence {
    positions: Vec<usize>,
}

impl VertexSequence {
    /// `positions[i]` is the 1-based position of vertex `i`.
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut seen = vec![false; n];
        for (i, &p) in positions.iter().enumerate() {
            if p == 0 || p > n {
                return Err(Error::InvalidSequence(format!(
                    "position {p} of vertex {i} is outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::InvalidSequence(format!("position {p} is assigned twice")));
            }
        }
        Ok(Self { positions })
    }

    pub fn identity(n: usize) -> Self {
        Self { positions: (1..=n).collect() }
    }

    /// Builds a sequence from an ordering: `order[k]` is the vertex placed at
    /// position `k + 1`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut positions = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n || positions[v] != 0 {
                return Err(Error::InvalidSequence(format!("vertex {v} is out of range or repeated")));
            }
            positions[v] = k + 1;
        }
        Ok(Self { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn position(&self, vertex: usize) -> usize {
        self.positions[vertex]
    }

    /// Inverse map: the vertex at each position (0-based index).
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.positions.len()];
        for (v, &p) in self.positions.iter().enumerate() {
            order[p - 1] = v;
        }
        order
    }

    /// `π_i -> N + 1 - π_i`.
    pub fn reversed(&self) -> Self {
        let n = self.positions.len();
        Self { positions: self.positions.iter().map(|&p| n + 1 - p).collect() }
    }

    pub fn check_matches(&self, g: &Graph) -> Result<()> {
        if self.len() != g.n_vertices() {
            return Err(Error::LengthMismatch { expected: g.n_vertices(), got: self.len() });
        }
        Ok(())
    }

    /// Sequence file: one 1-based position per line, line `i` for vertex `i`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p = line.parse::<usize>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("malformed position '{line}'"),
            })?;
            positions.push(p);
        }
        Self::new(positions)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.positions.len() * 4);
        for p in &self.positions {
            let _ = writeln!(out, "{p}");
        }
        out
    }
}

impl TryFrom<Vec<usize>> for VertexSequence {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<VertexSequence> for Vec<usize> {
    fn from(s: VertexSequence) -> Self {
        s.positions
    }
}

/// Affinity `J_ab` as a function of the sequential distance `|a - b|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffinityMetric {
    /// `|a - b|`
    Sequential,
    /// `-log(1 - |a - b| / N)`
    Logarithmic,
    /// `(a - b)^2`
    Squared,
    /// `1` when `|a - b| > r`, else `0`.
    Step(usize),
}

impl AffinityMetric {
    pub fn value(&self, distance: usize, n: usize) -> f64 {
        match *self {
            AffinityMetric::Logarithmic => {
                if distance == 0 {
                    0.0
                } else {
                    -(1.0 - distance as f64 / n as f64).ln()
                }
            }
            _ => self.integer_value(distance).expect("integer metric") as f64,
        }
    }

    /// Integer value for integer-valued metrics; `None` for the logarithmic one.
    pub fn integer_value(&self, distance: usize) -> Option<u64> {
        let d = distance as u64;
        match *self {
            AffinityMetric::Sequential => Some(d),
            AffinityMetric::Squared => Some(d * d),
            AffinityMetric::Step(r) => Some(u64::from(distance > r)),
            AffinityMetric::Logarithmic => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            AffinityMetric::Sequential => "sequential".into(),
            AffinityMetric::Logarithmic => "logarithmic".into(),
            AffinityMetric::Squared => "squared".into(),
            AffinityMetric::Step(r) => format!("step({r})"),
        }
    }
}

/// Relabels vertex `i` as `π_i - 1`, giving the graph with adjacency matrix
/// `P^T A P`.
pub fn apply_permutation(g: &Graph, s: &VertexSequence) -> Result<Graph> {
    s.check_matches(g)?;
    Graph::new(
        g.n_vertices(),
        g.edges().iter().map(|e| (s.position(e.u) - 1, s.position(e.v) - 1, e.multiplicity)),
    )
}

/// Number of pairs of distinct edges sharing exactly one endpoint (`M3`).
///
/// Parallel copies of the same pair share both endpoints and are excluded,
/// so for multigraphs this is `Σ_v C(d_v, 2) - 2 Σ_{u<v} C(A_uv, 2)`; on
/// simple graphs it reduces to `Σ_v C(d_v, 2)`.
pub fn wedge_count(g: &Graph) -> u64 {
    let c2 = |x: u64| x * x.saturating_sub(1) / 2;
    let by_vertex: u64 = g.degrees().iter().map(|&d| c2(d)).sum();
    let parallel: u64 = g.edges().iter().map(|e| c2(e.multiplicity)).sum();
    by_vertex - 2 * parallel
}

/// `Σ_{u<v} C(A_uv, 2)`: pairs of edges lying on the same vertex pair.
pub fn parallel_pair_count(g: &Graph) -> u64 {
    g.edges().iter().map(|e| e.multiplicity * (e.multiplicity - 1) / 2).sum()
}
