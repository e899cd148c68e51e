use rand::Rng;

use super::{sample_edges, EdgeClass, EdgeModel};
use crate::error::{Error, Result};
use crate::hypergraph::{Partition, Unlisted, WeightedHypergraph};

struct CliqueModel;

impl EdgeModel for CliqueModel {
    fn store_probability(&self, class: EdgeClass) -> f64 {
        match class {
            EdgeClass::Homogeneous(0) => 1.0,
            _ => 0.5,
        }
    }

    fn draw_stored<R: Rng>(&self, _class: EdgeClass, _nodes: &[u32], _rng: &mut R) -> (f64, bool) {
        (1.0, true)
    }
}

/// Planted clique: the first `s` nodes form the clique (label 0), the rest
/// get label 1. Edges inside the clique always appear; every other edge
/// appears with probability 1/2.
pub fn sample_planted_clique(
    n: usize,
    d: usize,
    s: usize,
    seed: u64,
) -> Result<(WeightedHypergraph, Partition)> {
    if d < 2 || s < d || s > n {
        return Err(Error::InvalidParams(format!(
            "need 2 ≤ d ≤ s ≤ n, got d = {d}, s = {s}, n = {n}"
        )));
    }
    let labels: Vec<u32> = (0..n).map(|i| u32::from(i >= s)).collect();
    let truth = Partition::new(labels, 2)?;
    let h = sample_edges(truth.labels(), 2, d, Unlisted::Zero, &CliqueModel, seed)?;
    Ok((h, truth))
}
