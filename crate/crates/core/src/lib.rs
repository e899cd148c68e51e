//! Spectral clustering of weighted uniform hypergraphs.
//!
//! Generators for weighted stochastic block models, the censored block model,
//! planted cliques and subspace-clustering sketches; the similarity matrix,
//! trimming, eigensolver and k-means stages; local refinement; and recovery
//! metrics. Node ids are 0-based throughout the library.

pub mod combinatorics;
pub mod error;
pub mod generators;
pub mod hypergraph;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use generators::{
    sample_censored_bm, sample_planted_clique, sample_subspace_points, sample_weighted_sbm,
    sketch_hypergraph, CbmParams, PointCloud, SbmParams, SubspaceParams, WeightKind,
};
pub use hypergraph::{
    canonical_edge, EdgeRef, EdgeState, Hyperedge, HypergraphBuilder, Partition, Unlisted,
    WeightedHypergraph,
};
pub use io::{parse_hypergraph, parse_partition, serialize_hypergraph, serialize_partition};
pub use metrics::{error_fraction, worst_cluster_error, AlignmentMethod, AlignmentResult};
pub use pipeline::{
    hamming_objective, hsc, hsclr, hsclr_ml, ml_refine_cbm, refine, split_edges, HscConfig,
    HsclrConfig, StageTimings,
};
pub use spectral::{
    cluster_rows, expected_similarity, similarity_matrix, top_k_eigenvectors, trim, EigenMode,
    Embedding, SimilarityMatrix,
};
