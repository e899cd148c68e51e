//! Seeded samplers for the generative models.
//!
//! Every sampler classifies an edge as homogeneous in some group or as
//! heterogeneous, and delegates the per-edge law to an [`EdgeModel`]. When the
//! number of candidate edges is at most [`ENUMERATION_LIMIT`] all edges are
//! enumerated and each gets a coin keyed by `(seed, edge)`. Otherwise the
//! number of stored edges per class is drawn from a binomial and that many
//! distinct edges are drawn by rejection.

mod cbm;
mod clique;
mod sbm;
mod subspace;

pub use cbm::{sample_censored_bm, CbmParams};
pub use clique::sample_planted_clique;
pub use sbm::{sample_weighted_sbm, SbmParams, WeightKind};
pub use subspace::{
    default_fitting_scale, fitting_weight, sample_subspace_points, sketch_budget,
    sketch_hypergraph, PointCloud, SubspaceParams,
};

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::combinatorics::{binomial_u64, for_each_combination};
use crate::error::{Error, Result};
use crate::hypergraph::{HypergraphBuilder, Unlisted, WeightedHypergraph};
use crate::rng;

/// Candidate-edge count up to which edges are enumerated one by one.
pub const ENUMERATION_LIMIT: u64 = 100_000_000;

/// Upper bound on the number of edges a sampler may store.
pub const MAX_STORED_EDGES: u64 = 100_000_000;

/// Class of a candidate edge under a labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Homogeneous(u32),
    Heterogeneous,
}

/// Per-edge law shared by the enumerating and the rejection paths.
pub(crate) trait EdgeModel {
    /// Probability that an edge of this class is stored.
    fn store_probability(&self, class: EdgeClass) -> f64;

    /// `(weight, observed)` of an edge conditioned on it being stored.
    fn draw_stored<R: Rng>(&self, class: EdgeClass, nodes: &[u32], rng: &mut R) -> (f64, bool);
}

pub(crate) fn classify(labels: &[u32], nodes: &[u32]) -> EdgeClass {
    let first = labels[nodes[0] as usize];
    if nodes[1..].iter().all(|&v| labels[v as usize] == first) {
        EdgeClass::Homogeneous(first)
    } else {
        EdgeClass::Heterogeneous
    }
}

/// Samples a hypergraph on `labels.len()` nodes from `model`.
pub(crate) fn sample_edges<M: EdgeModel>(
    labels: &[u32],
    k: usize,
    d: usize,
    unlisted: Unlisted,
    model: &M,
    seed: u64,
) -> Result<WeightedHypergraph> {
    let n = labels.len();
    let total = binomial_u64(n as u64, d as u64)
        .ok_or_else(|| Error::BudgetExceeded(format!("C({n}, {d}) overflows")))?;

    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        groups[l as usize].push(v as u32);
    }
    let class_sizes: Vec<u64> = groups
        .iter()
        .map(|g| binomial_u64(g.len() as u64, d as u64).unwrap_or(u64::MAX))
        .collect();
    let homogeneous_total: u64 = class_sizes.iter().fold(0u64, |a, &b| a.saturating_add(b));
    let heterogeneous_size = total.saturating_sub(homogeneous_total);

    let expected: f64 = class_sizes
        .iter()
        .enumerate()
        .map(|(j, &s)| s as f64 * model.store_probability(EdgeClass::Homogeneous(j as u32)))
        .sum::<f64>()
        + heterogeneous_size as f64 * model.store_probability(EdgeClass::Heterogeneous);
    if expected > MAX_STORED_EDGES as f64 {
        return Err(Error::BudgetExceeded(format!(
            "about {expected:.0} stored edges expected, limit {MAX_STORED_EDGES}"
        )));
    }

    let mut builder = HypergraphBuilder::new(n, d)?.unlisted(unlisted);
    builder.reserve(expected.ceil() as usize + 16);

    if total <= ENUMERATION_LIMIT {
        for_each_combination(n, d, |nodes| {
            let class = classify(labels, nodes);
            let mut r = rng::edge_rng(seed, nodes);
            if r.random::<f64>() < model.store_probability(class) {
                let (w, obs) = model.draw_stored(class, nodes, &mut r);
                builder.push_canonical(nodes, w, obs);
            }
        });
        return builder.build();
    }

    // Homogeneous classes: enumerate the small ones, reject-sample the rest.
    let mut buf = vec![0u32; d];
    for (j, group) in groups.iter().enumerate() {
        let class = EdgeClass::Homogeneous(j as u32);
        let size = class_sizes[j];
        let p = model.store_probability(class);
        if size == 0 || p <= 0.0 {
            continue;
        }
        if size <= ENUMERATION_LIMIT {
            for_each_combination(group.len(), d, |idx| {
                for (slot, &i) in buf.iter_mut().zip(idx) {
                    *slot = group[i as usize];
                }
                let mut r = rng::edge_rng(seed, &buf);
                if r.random::<f64>() < p {
                    let (w, obs) = model.draw_stored(class, &buf, &mut r);
                    builder.push_canonical(&buf, w, obs);
                }
            });
        } else {
            let mut stream = rng::stream(rng::derive_seed(seed, &[1, j as u64]));
            let count = draw_count(size, p, &mut stream)?;
            let picked = distinct_edges(count, &mut stream, |r| {
                let mut e: Vec<u32> = index::sample(r, group.len(), d)
                    .into_iter()
                    .map(|i| group[i])
                    .collect();
                e.sort_unstable();
                Some(e)
            });
            for e in picked {
                let (w, obs) = model.draw_stored(class, &e, &mut stream);
                builder.push_canonical(&e, w, obs);
            }
        }
    }

    let p = model.store_probability(EdgeClass::Heterogeneous);
    if heterogeneous_size > 0 && p > 0.0 {
        let mut stream = rng::stream(rng::derive_seed(seed, &[2]));
        let count = draw_count(heterogeneous_size, p, &mut stream)?;
        let picked = distinct_edges(count, &mut stream, |r| {
            let mut e: Vec<u32> = index::sample(r, n, d)
                .into_iter()
                .map(|i| i as u32)
                .collect();
            e.sort_unstable();
            (classify(labels, &e) == EdgeClass::Heterogeneous).then_some(e)
        });
        for e in picked {
            let (w, obs) = model.draw_stored(EdgeClass::Heterogeneous, &e, &mut stream);
            builder.push_canonical(&e, w, obs);
        }
    }
    builder.build()
}

fn draw_count<R: Rng>(size: u64, p: f64, rng: &mut R) -> Result<u64> {
    let count = Binomial::new(size, p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidParams(format!("binomial({size}, {p}): {e}")))?
        .sample(rng);
    // Rejection needs a comfortable margin of unpicked edges.
    if count > MAX_STORED_EDGES || count > size / 2 {
        return Err(Error::BudgetExceeded(format!(
            "{count} of {size} candidate edges requested"
        )));
    }
    Ok(count)
}

/// Draws `count` distinct edges, in the order first drawn.
fn distinct_edges<R, F>(count: u64, rng: &mut R, mut propose: F) -> Vec<Vec<u32>>
where
    R: Rng,
    F: FnMut(&mut R) -> Option<Vec<u32>>,
{
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(count as usize);
    let mut out = Vec::with_capacity(count as usize);
    while (out.len() as u64) < count {
        if let Some(e) = propose(rng) {
            if seen.insert(e.clone()) {
                out.push(e);
            }
        }
    }
    out
}
