use rand::Rng;

use super::{sample_edges, EdgeClass, EdgeModel};
use crate::error::{Error, Result};
use crate::hypergraph::{Partition, Unlisted, WeightedHypergraph};

/// Censored block model with homogeneity measurements (two groups).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbmParams {
    pub n: usize,
    pub d: usize,
    /// Corruption rate in `(0, 1/2)`.
    pub theta: f64,
    /// Observation rate in `[0, 1]`.
    pub alpha: f64,
}

impl CbmParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidParams(format!(
                "edge size d = {} must be at least 2",
                self.d
            )));
        }
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return Err(Error::InvalidParams(format!(
                "theta = {} must lie in (0, 1/2)",
                self.theta
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParams(format!(
                "alpha = {} must lie in [0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `C(n, d)·α` at which maximum likelihood becomes strongly consistent:
    /// `2^(d-2)/d · n log n / (√(1-θ) - √θ)²`.
    pub fn information_limit(n: usize, d: usize, theta: f64) -> f64 {
        let gap = (1.0 - theta).sqrt() - theta.sqrt();
        2f64.powi(d as i32 - 2) / d as f64 * n as f64 * (n as f64).ln() / (gap * gap)
    }
}

struct CbmModel {
    theta: f64,
    alpha: f64,
}

impl EdgeModel for CbmModel {
    fn store_probability(&self, _class: EdgeClass) -> f64 {
        self.alpha
    }

    fn draw_stored<R: Rng>(&self, class: EdgeClass, _nodes: &[u32], rng: &mut R) -> (f64, bool) {
        let p_one = match class {
            EdgeClass::Homogeneous(_) => 1.0 - self.theta,
            EdgeClass::Heterogeneous => self.theta,
        };
        (
            if rng.random::<f64>() < p_one {
                1.0
            } else {
                0.0
            },
            true,
        )
    }
}

/// Samples censored observations of `truth`. Only observed edges (weight 0
/// or 1) are stored; every other edge is an erasure.
pub fn sample_censored_bm(
    params: &CbmParams,
    truth: &Partition,
    seed: u64,
) -> Result<WeightedHypergraph> {
    params.validate()?;
    if truth.k() != 2 {
        return Err(Error::InvalidParams(format!(
            "censored model needs k = 2, got {}",
            truth.k()
        )));
    }
    if truth.n() != params.n {
        return Err(Error::InvalidParams(format!(
            "partition has {} nodes, params say {}",
            truth.n(),
            params.n
        )));
    }
    let model = CbmModel {
        theta: params.theta,
        alpha: params.alpha,
    };
    sample_edges(truth.labels(), 2, params.d, Unlisted::Erased, &model, seed)
}
