//! Hypothesis tests for sequential locality of graphs.
//!
//! Given a graph and a vertex sequence, `seqloc` measures how concentrated
//! the edges are near the diagonal of the reordered adjacency matrix and
//! asks whether that concentration is surprising under a null model:
//!
//! * [`stats`]: the `H1`, `z1`, `HG`, `z_G` statistics and per-vertex medians;
//! * [`null_er`]: exact and approximate null tables under the uniform model;
//! * [`orgm`]: the ordered random graph model, its sampler and `H1` moments;
//! * [`fit`]: bandwidth estimation, the in-envelope test and classification;
//! * [`random_seq`]: the random-sequence null and its variance;
//! * [`power`]: analytic and empirical power against ORGM alternatives;
//! * [`ordering`]: spectral and reversed Cuthill–McKee orderings.
//!
//! ```
//! use seqloc::{Graph, VertexSequence};
//!
//! let g = Graph::parse_edge_list("0 1\n1 2\n").unwrap();
//! let s = VertexSequence::identity(3);
//! assert_eq!(seqloc::stats::h1(&g, &s).unwrap(), 0.75);
//! assert_eq!(seqloc::stats::z1(&g, &s).unwrap(), -1.0);
//! ```

pub mod error;
pub mod fit;
pub mod graph;
pub mod null_er;
pub mod numeric;
pub mod ordering;
pub mod orgm;
pub mod power;
pub mod random_seq;
pub mod report;
pub mod slots;
pub mod stats;

pub use error::{Error, Result};
pub use fit::{FitResult, LocalityType};
pub use graph::{AffinityMetric, Edge, Graph, VertexSequence};
pub use null_er::DistributionTable;
pub use orgm::{EnvelopeSpec, OrgmParams, Variant};
pub use report::{Decision, NullDescriptor, Sidedness, TestReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs-and-sequences.md")]
    mod graphs_and_sequences {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/uniform-null.md")]
    mod uniform_null {}
    #[doc = include_str!("../../../book/src/orgm.md")]
    mod orgm {}
    #[doc = include_str!("../../../book/src/random-sequences.md")]
    mod random_sequences {}
    #[doc = include_str!("../../../book/src/power.md")]
    mod power {}
    #[doc = include_str!("../../../book/src/orderings.md")]
    mod orderings {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
