use nalgebra::DMatrix;

use super::SimilarityMatrix;
use crate::combinatorics::binomial;
use crate::error::Result;
use crate::generators::SbmParams;

/// `k×k` matrix of expected off-diagonal similarities between groups.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMeanMatrix {
    pub b: DMatrix<f64>,
    /// `C(n-2, d-2)·α`
    pub mu: f64,
    /// `C(n-2, d-2)·p·α`
    pub nu: f64,
}

/// Exact `E[A]` off the diagonal, as `P = Z B Zᵀ` with the diagonal zeroed.
///
/// A pair in group `l` lies in `C(n_l-2, d-2)` homogeneous edges and in
/// `C(n-2, d-2) - C(n_l-2, d-2)` heterogeneous ones; a pair split across
/// groups lies only in heterogeneous edges.
pub fn expected_similarity(params: &SbmParams) -> Result<(SimilarityMatrix, BlockMeanMatrix)> {
    params.validate_structure()?;
    let (n, d, k, alpha) = (params.n, params.d, params.k(), params.alpha);
    let through_pair = binomial(n - 2, d - 2);
    let het = params.heterogeneous_mean() * alpha;
    let b = DMatrix::from_fn(k, k, |l, m| {
        if l == m {
            let inside = binomial(params.cluster_sizes[l] - 2, d - 2);
            params.homogeneous_mean(l) * alpha * inside + het * (through_pair - inside)
        } else {
            het * through_pair
        }
    });
    let truth = params.truth()?;
    let p = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            b[(truth.label(i) as usize, truth.label(j) as usize)]
        }
    });
    let block = BlockMeanMatrix {
        b,
        mu: through_pair * alpha,
        nu: through_pair * params.p * alpha,
    };
    Ok((SimilarityMatrix::from_matrix(p)?, block))
}
