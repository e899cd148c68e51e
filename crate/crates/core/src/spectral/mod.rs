//! Similarity matrices and the spectral part of the clustering pipeline.

mod eigen;
mod expected;
mod kmeans;

pub use eigen::{symmetric_eigen, top_k_eigenvectors, EigenMode, Embedding};
pub use expected::{expected_similarity, BlockMeanMatrix};
pub use kmeans::{cluster_rows, KMeansResult};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;

/// Dense symmetric `n×n` matrix with zero diagonal and nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix(DMatrix<f64>);

impl SimilarityMatrix {
    /// Wraps `m` after checking symmetry, zero diagonal and nonnegativity.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "{}×{} matrix is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "diagonal entry {i} is nonzero"
                )));
            }
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidParams(format!(
                        "entry ({i}, {j}) breaks symmetry"
                    )));
                }
                if !(m[(i, j)] >= 0.0) {
                    return Err(Error::InvalidParams(format!(
                        "entry ({i}, {j}) is negative"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        // column sums read contiguous memory; the matrix is symmetric
        self.0.column_iter().map(|c| c.sum()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// `A[i][j]` is the total weight of stored edges containing both `i` and `j`.
/// Erasures contribute nothing and the diagonal is zero.
pub fn similarity_matrix(h: &WeightedHypergraph) -> SimilarityMatrix {
    let n = h.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for e in h.iter() {
        if !e.observed || e.weight == 0.0 {
            continue;
        }
        for (x, &i) in e.nodes.iter().enumerate() {
            for &j in &e.nodes[x + 1..] {
                a[(i as usize, j as usize)] += e.weight;
                a[(j as usize, i as usize)] += e.weight;
            }
        }
    }
    SimilarityMatrix(a)
}

/// Default trimming constant: 6 for graphs, `3·d²` otherwise.
pub fn default_c_thr(d: usize) -> f64 {
    if d == 2 {
        6.0
    } else {
        3.0 * (d * d) as f64
    }
}

/// Zeroes every row (and column) whose sum exceeds `c_thr` times the average
/// row sum. All decisions are taken against the input matrix. Returns the
/// trimmed matrix and the removed nodes in increasing order.
pub fn trim(a: &SimilarityMatrix, c_thr: f64) -> Result<(SimilarityMatrix, Vec<usize>)> {
    if !(c_thr > 0.0) {
        return Err(Error::InvalidParams(format!(
            "c_thr = {c_thr} must be positive"
        )));
    }
    let n = a.n();
    let sums = a.row_sums();
    let total: f64 = sums.iter().sum();
    let threshold = c_thr * total / n.max(1) as f64;
    let removed: Vec<usize> = (0..n).filter(|&i| sums[i] > threshold).collect();
    let mut m = a.0.clone();
    for &i in &removed {
        m.row_mut(i).fill(0.0);
        m.column_mut(i).fill(0.0);
    }
    Ok((SimilarityMatrix(m), removed))
}
