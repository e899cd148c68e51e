//! Spectral clustering of hypergraphs, edge splitting, and local refinement.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::combinatorics::binomial_u64;
use crate::error::{Error, Result};
use crate::hypergraph::{Partition, Unlisted, WeightedHypergraph};
use crate::rng;
use crate::spectral::{
    cluster_rows, default_c_thr, similarity_matrix, top_k_eigenvectors, trim, EigenMode, Embedding,
    SimilarityMatrix,
};

const SPLIT_STREAM: u64 = 0x5b11;
const KMEANS_STREAM: u64 = 0x4b3a;

/// Configuration of the spectral stage.
#[derive(Debug, Clone, PartialEq)]
pub struct HscConfig {
    pub k: usize,
    /// Trimming constant; `None` picks [`default_c_thr`] for the edge size.
    pub c_thr: Option<f64>,
    pub restarts: usize,
    pub eigen_mode: EigenMode,
    /// Lloyd iterations stop once the relative cost improvement drops
    /// below this.
    pub epsilon: f64,
}

impl HscConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            c_thr: None,
            restarts: 10,
            eigen_mode: EigenMode::Assortative,
            epsilon: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParams(format!(
                "k = {} must be at least 2",
                self.k
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be at least 1".into()));
        }
        if let Some(c) = self.c_thr {
            if !(c > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "c_thr = {c} must be positive"
                )));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParams(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Configuration of spectral clustering followed by local refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct HsclrConfig {
    pub hsc: HscConfig,
    /// Splitting probability; `None` picks [`default_beta`].
    pub beta: Option<f64>,
}

impl HsclrConfig {
    pub fn new(k: usize) -> Self {
        Self {
            hsc: HscConfig::new(k),
            beta: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hsc.validate()?;
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "beta = {b} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// `ln ln n / ln n`, clipped to `[0.05, 0.5]`.
pub fn default_beta(n: usize) -> f64 {
    let ln = (n as f64).ln();
    let b = ln.ln() / ln;
    if b.is_finite() {
        b.clamp(0.05, 0.5)
    } else {
        0.05
    }
}

/// Wall time spent in each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub build: Duration,
    pub eigen: Duration,
    pub kmeans: Duration,
    pub refine: Duration,
}

#[derive(Debug, Clone)]
pub struct HscOutcome {
    pub partition: Partition,
    /// Nodes zeroed out by trimming.
    pub removed: Vec<usize>,
    pub embedding: Embedding,
    pub kmeans_cost: f64,
    pub timings: StageTimings,
}

/// Spectral clustering of an already trimmed matrix. Nodes in `removed` are
/// left out of k-means and take the label of the nearest center.
pub fn cluster_trimmed(
    a0: &SimilarityMatrix,
    removed: &[usize],
    cfg: &HscConfig,
    seed: u64,
) -> Result<HscOutcome> {
    cfg.validate()?;
    let n = a0.n();
    if n < cfg.k {
        return Err(Error::InvalidParams(format!(
            "{n} nodes cannot form {} clusters",
            cfg.k
        )));
    }
    let t0 = Instant::now();
    let embedding = top_k_eigenvectors(a0, cfg.k, cfg.eigen_mode)?;
    let t_eigen = t0.elapsed();

    let t1 = Instant::now();
    let mut is_removed = vec![false; n];
    removed.iter().for_each(|&i| is_removed[i] = true);
    let mut kept: Vec<usize> = (0..n).filter(|&i| !is_removed[i]).collect();
    if kept.is_empty() {
        kept = (0..n).collect();
    }
    let points = embedding.vectors.select_rows(&kept);
    let km = cluster_rows(
        &points,
        cfg.k,
        cfg.restarts,
        cfg.epsilon,
        rng::derive_seed(seed, &[KMEANS_STREAM]),
    )?;
    let mut labels = vec![0u32; n];
    for (pos, &i) in kept.iter().enumerate() {
        labels[i] = km.partition.label(pos);
    }
    for &i in removed {
        labels[i] = km.nearest(&embedding.row(i));
    }
    let t_kmeans = t1.elapsed();

    Ok(HscOutcome {
        partition: Partition::new(labels, cfg.k)?,
        removed: removed.to_vec(),
        embedding,
        kmeans_cost: km.cost,
        timings: StageTimings {
            eigen: t_eigen,
            kmeans: t_kmeans,
            ..StageTimings::default()
        },
    })
}

/// Hypergraph spectral clustering with stage details.
pub fn hsc_detailed(h: &WeightedHypergraph, cfg: &HscConfig, seed: u64) -> Result<HscOutcome> {
    cfg.validate()?;
    let t0 = Instant::now();
    let a = similarity_matrix(h);
    let (a0, removed) = trim(&a, cfg.c_thr.unwrap_or_else(|| default_c_thr(h.d())))?;
    let build = t0.elapsed();
    let mut out = cluster_trimmed(&a0, &removed, cfg, seed)?;
    out.timings.build = build;
    Ok(out)
}

/// Hypergraph spectral clustering: similarity matrix, trimming, leading
/// eigenvectors, k-means on the rows.
pub fn hsc(h: &WeightedHypergraph, cfg: &HscConfig, seed: u64) -> Result<Partition> {
    Ok(hsc_detailed(h, cfg, seed)?.partition)
}

/// Sends each stored edge to the first child with probability `beta`, keyed
/// by `(seed, edge)`.
pub fn split_edges(
    h: &WeightedHypergraph,
    beta: f64,
    seed: u64,
) -> Result<(WeightedHypergraph, WeightedHypergraph)> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParams(format!(
            "beta = {beta} must lie in [0, 1]"
        )));
    }
    let key = rng::derive_seed(seed, &[SPLIT_STREAM]);
    Ok(h.partition_edges(|e| rng::edge_rng(key, e.nodes).random::<f64>() < beta))
}

fn check_shapes(h: &WeightedHypergraph, phi: &Partition) -> Result<()> {
    if phi.n() != h.n() {
        return Err(Error::ShapeMismatch(format!(
            "partition has {} nodes, hypergraph {}",
            phi.n(),
            h.n()
        )));
    }
    Ok(())
}

/// For every node in an edge whose other members share one label, calls
/// `f(node, label)`.
fn for_each_single_group_member<F: FnMut(u32, u32)>(nodes: &[u32], labels: &[u32], mut f: F) {
    for (pos, &i) in nodes.iter().enumerate() {
        let mut others = nodes
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != pos)
            .map(|(_, &v)| labels[v as usize]);
        let first = others.next().expect("edges have at least two nodes");
        if others.all(|l| l == first) {
            f(i, first);
        }
    }
}

/// One simultaneous refinement pass. Each node moves to the group `j`
/// maximising the average weight of the edges that join it to `d - 1` members
/// of group `j` under `phi`. Unstored edges count as weight-0 members of the
/// average, except in censored hypergraphs where they are erasures and are
/// left out. Groups with no candidate edges are skipped; the current label
/// wins ties, then the lowest index.
pub fn refine(h2: &WeightedHypergraph, phi: &Partition, k: usize) -> Result<Partition> {
    check_shapes(h2, phi)?;
    if phi.k() != k {
        return Err(Error::ShapeMismatch(format!(
            "partition has k = {}, expected {k}",
            phi.k()
        )));
    }
    let n = h2.n();
    let d = h2.d();
    let labels = phi.labels();
    let sizes = phi.sizes();

    let mut sum = vec![0.0f64; n * k];
    let mut observed = vec![0u64; n * k];
    let mut erased = vec![0u64; n * k];
    for e in h2.iter() {
        for_each_single_group_member(e.nodes, labels, |i, j| {
            let slot = i as usize * k + j as usize;
            if e.observed {
                sum[slot] += e.weight;
                observed[slot] += 1;
            } else {
                erased[slot] += 1;
            }
        });
    }

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let current = labels[i] as usize;
        let mut best: Option<f64> = None;
        let mut fitness = vec![None; k];
        for j in 0..k {
            let slot = i * k + j;
            let denom = match h2.unlisted() {
                Unlisted::Zero => {
                    let pool = sizes[j] - usize::from(j == current);
                    binomial_u64(pool as u64, (d - 1) as u64).unwrap_or(u64::MAX) - erased[slot]
                }
                Unlisted::Erased => observed[slot],
            };
            if denom == 0 {
                continue;
            }
            let avg = sum[slot] / denom as f64;
            fitness[j] = Some(avg);
            best = Some(best.map_or(avg, |b: f64| b.max(avg)));
        }
        let label = match best {
            None => current,
            Some(b) if fitness[current] == Some(b) => current,
            Some(b) => fitness
                .iter()
                .position(|&f| f == Some(b))
                .expect("max is attained"),
        };
        out.push(label as u32);
    }
    Partition::new(out, k)
}

#[derive(Debug, Clone)]
pub struct HsclrOutcome {
    pub partition: Partition,
    /// The spectral-stage estimate before refinement.
    pub initial: Partition,
    pub beta: f64,
    pub timings: StageTimings,
}

/// Spectral clustering with local refinement, with stage details.
pub fn hsclr_detailed(
    h: &WeightedHypergraph,
    cfg: &HsclrConfig,
    seed: u64,
) -> Result<HsclrOutcome> {
    cfg.validate()?;
    let beta = cfg.beta.unwrap_or_else(|| default_beta(h.n()));
    let (h1, h2) = split_edges(h, beta, seed)?;
    let first = hsc_detailed(&h1, &cfg.hsc, seed)?;
    let t0 = Instant::now();
    let refined = refine(&h2, &first.partition, cfg.hsc.k)?;
    let mut timings = first.timings;
    timings.refine = t0.elapsed();
    Ok(HsclrOutcome {
        partition: refined,
        initial: first.partition,
        beta,
        timings,
    })
}

/// Splits the edges, clusters the first part spectrally, and refines every
/// node against the held-out part.
pub fn hsclr(h: &WeightedHypergraph, cfg: &HsclrConfig, seed: u64) -> Result<Partition> {
    Ok(hsclr_detailed(h, cfg, seed)?.partition)
}

fn check_binary(h: &WeightedHypergraph, x: &Partition) -> Result<()> {
    check_shapes(h, x)?;
    if x.k() != 2 {
        return Err(Error::InvalidParams(format!(
            "likelihood rule needs k = 2, got {}",
            x.k()
        )));
    }
    if let Some(e) = h
        .iter()
        .find(|e| e.observed && e.weight != 0.0 && e.weight != 1.0)
    {
        return Err(Error::InvalidWeights(e.weight));
    }
    Ok(())
}

fn all_same(nodes: &[u32], labels: &[u32]) -> bool {
    let first = labels[nodes[0] as usize];
    nodes[1..].iter().all(|&v| labels[v as usize] == first)
}

fn count(n: usize, r: usize) -> i64 {
    binomial_u64(n as u64, r as u64).map_or(i64::MAX, |c| c as i64)
}

/// Number of observed edges whose weight disagrees with the homogeneity
/// indicator of `x`. In a non-censored hypergraph unstored edges are observed
/// zeros and take part.
pub fn hamming_objective(h: &WeightedHypergraph, x: &Partition) -> Result<u64> {
    check_binary(h, x)?;
    let labels = x.labels();
    let mut mismatches = 0i64;
    let mut stored_homogeneous = 0i64;
    for e in h.iter() {
        let f = all_same(e.nodes, labels);
        stored_homogeneous += i64::from(f);
        if e.observed && (e.weight == 1.0) != f {
            mismatches += 1;
        }
    }
    if h.unlisted() == Unlisted::Zero {
        let sizes = x.sizes();
        let homogeneous = count(sizes[0], h.d()) + count(sizes[1], h.d());
        mismatches += homogeneous - stored_homogeneous;
    }
    Ok(mismatches as u64)
}

/// Change of [`hamming_objective`] when node `i` alone switches group,
/// computed from the edges containing `i`.
fn flip_delta(
    h: &WeightedHypergraph,
    incident: &[usize],
    labels: &[u32],
    sizes: &[usize],
    i: usize,
) -> i64 {
    let own = labels[i];
    let mut delta = 0i64;
    let (mut stored_own, mut stored_other) = (0i64, 0i64);
    for &idx in incident {
        let e = h.edge(idx);
        let mut others = e
            .nodes
            .iter()
            .filter(|&&v| v as usize != i)
            .map(|&v| labels[v as usize]);
        let first = others.next().expect("edges have at least two nodes");
        let uniform = others.all(|l| l == first);
        let before = uniform && first == own;
        let after = uniform && first != own;
        stored_own += i64::from(before);
        stored_other += i64::from(after);
        if e.observed {
            let w = e.weight == 1.0;
            delta += i64::from(after != w) - i64::from(before != w);
        }
    }
    if h.unlisted() == Unlisted::Zero {
        let d = h.d();
        let own_size = sizes[own as usize];
        let other_size = sizes[1 - own as usize];
        let absent_before = count(own_size - 1, d - 1) - stored_own;
        let absent_after = count(other_size, d - 1) - stored_other;
        delta += absent_after - absent_before;
    }
    delta
}

/// One simultaneous pass of the likelihood rule for the censored model: node
/// `i` keeps its label only if flipping it alone would strictly increase the
/// number of disagreeing observations.
pub fn ml_refine_cbm(h: &WeightedHypergraph, x: &Partition) -> Result<Partition> {
    check_binary(h, x)?;
    let n = h.n();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, e) in h.iter().enumerate() {
        for &v in e.nodes {
            incident[v as usize].push(idx);
        }
    }
    let labels = x.labels();
    let sizes = x.sizes();
    let out = (0..n)
        .map(|i| {
            if flip_delta(h, &incident[i], labels, &sizes, i) > 0 {
                labels[i]
            } else {
                1 - labels[i]
            }
        })
        .collect();
    Partition::new(out, 2)
}

#[derive(Debug, Clone)]
pub struct HsclrMlOutcome {
    pub partition: Partition,
    pub initial: Partition,
    pub timings: StageTimings,
}

/// Censored-model variant: spectral clustering on all observations (erasures
/// read as 0), then one pass of [`ml_refine_cbm`] over all observations.
pub fn hsclr_ml_detailed(
    h: &WeightedHypergraph,
    cfg: &HscConfig,
    seed: u64,
) -> Result<HsclrMlOutcome> {
    if cfg.k != 2 {
        return Err(Error::InvalidParams(format!(
            "likelihood refinement needs k = 2, got {}",
            cfg.k
        )));
    }
    let first = hsc_detailed(h, cfg, seed)?;
    let t0 = Instant::now();
    let refined = ml_refine_cbm(h, &first.partition)?;
    let mut timings = first.timings;
    timings.refine = t0.elapsed();
    Ok(HsclrMlOutcome {
        partition: refined,
        initial: first.partition,
        timings,
    })
}

pub fn hsclr_ml(h: &WeightedHypergraph, cfg: &HscConfig, seed: u64) -> Result<Partition> {
    Ok(hsclr_ml_detailed(h, cfg, seed)?.partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::for_each_combination;
    use crate::hypergraph::{canonical_edge, EdgeState, HypergraphBuilder};
    use crate::metrics::error_fraction;
    use proptest::prelude::*;
    use rand::Rng;

    fn two_complete_blocks(size: usize, d: usize) -> (WeightedHypergraph, Partition) {
        let n = 2 * size;
        let mut b = HypergraphBuilder::new(n, d).unwrap();
        for block in 0..2u32 {
            for_each_combination(size, d, |c| {
                let e: Vec<u32> = c.iter().map(|&v| v + block * size as u32).collect();
                b.add(&e, 1.0).unwrap();
            });
        }
        (
            b.build().unwrap(),
            Partition::from_sizes(&[size, size]).unwrap(),
        )
    }

    #[test]
    fn hsc_recovers_disjoint_blocks() {
        let (h, truth) = two_complete_blocks(6, 3);
        for seed in 0..5 {
            let phi = hsc(&h, &HscConfig::new(2), seed).unwrap();
            assert_eq!(error_fraction(&phi, &truth).unwrap().error_fraction, 0.0);
        }
    }

    #[test]
    fn hsc_on_empty_hypergraph_is_valid() {
        let h = WeightedHypergraph::empty(10, 3).unwrap();
        let phi = hsc(&h, &HscConfig::new(3), 1).unwrap();
        assert_eq!(phi.n(), 10);
        assert_eq!(phi.k(), 3);
    }

    #[test]
    fn split_extremes() {
        let (h, _) = two_complete_blocks(5, 3);
        let (h1, h2) = split_edges(&h, 0.0, 3).unwrap();
        assert!(h1.is_empty());
        assert_eq!(h2, h);
        let (h1, h2) = split_edges(&h, 1.0, 3).unwrap();
        assert_eq!(h1, h);
        assert!(h2.is_empty());
    }

    #[test]
    fn split_rate_matches_beta() {
        // 1000 stored edges: 1000 of the C(20,3) = 1140 triples.
        let mut b = HypergraphBuilder::new(20, 3).unwrap();
        let mut c = 0;
        for_each_combination(20, 3, |e| {
            if c < 1000 {
                b.add(e, 1.0).unwrap();
                c += 1;
            }
        });
        let h = b.build().unwrap();
        let trials = 500;
        let (mut s, mut s2) = (0.0, 0.0);
        for seed in 0..trials {
            let (h1, h2) = split_edges(&h, 0.3, seed).unwrap();
            assert_eq!(h1.len() + h2.len(), 1000);
            let x = h1.len() as f64;
            s += x;
            s2 += x * x;
        }
        let t = trials as f64;
        let mean = s / t;
        let se = ((s2 / t - mean * mean) / t).sqrt();
        assert!((mean - 300.0).abs() <= 3.0 * se, "{mean} (se {se})");
    }

    #[test]
    fn refine_follows_dominant_fitness() {
        // node 0 sits in many heavy edges with group {1,2,3} and few with {4,5,6}
        let mut b = HypergraphBuilder::new(7, 3).unwrap();
        for e in [[0, 1, 2], [0, 1, 3], [0, 2, 3]] {
            b.add(&e, 0.9).unwrap();
        }
        b.add(&[0, 4, 5], 0.1).unwrap();
        let h = b.build().unwrap();
        let phi = Partition::new(vec![1, 0, 0, 0, 1, 1, 1], 2).unwrap();
        let out = refine(&h, &phi, 2).unwrap();
        assert_eq!(out.label(0), 0);
    }

    #[test]
    fn refine_on_empty_keeps_partition() {
        let h = WeightedHypergraph::empty(8, 3).unwrap();
        let phi = Partition::new(vec![0, 1, 0, 1, 1, 0, 0, 1], 2).unwrap();
        assert_eq!(refine(&h, &phi, 2).unwrap(), phi);
    }

    #[test]
    fn refine_skips_groups_too_small() {
        // group 1 has one member, so no edge joins node 0 to two of its members
        let mut b = HypergraphBuilder::new(5, 3).unwrap();
        b.add(&[0, 1, 2], 0.2).unwrap();
        let h = b.build().unwrap();
        let phi = Partition::new(vec![1, 0, 0, 0, 1], 2).unwrap();
        let out = refine(&h, &phi, 2).unwrap();
        assert_eq!(out.label(0), 0);
        assert_eq!(out.label(4), 0);
    }

    /// Exhaustive evaluation of every candidate edge set by enumeration.
    fn refine_oracle(h: &WeightedHypergraph, phi: &Partition, k: usize) -> Vec<u32> {
        let (n, d) = (h.n(), h.d());
        (0..n)
            .map(|i| {
                let mut fit: Vec<Option<f64>> = vec![None; k];
                for (j, slot) in fit.iter_mut().enumerate() {
                    let (mut s, mut c) = (0.0, 0u64);
                    for_each_combination(n, d, |e| {
                        if !e.contains(&(i as u32)) {
                            return;
                        }
                        if e.iter()
                            .any(|&v| v as usize != i && phi.label(v as usize) as usize != j)
                        {
                            return;
                        }
                        match h.state(&canonical_edge(e, n, d).unwrap()) {
                            EdgeState::Observed(w) => {
                                s += w;
                                c += 1;
                            }
                            EdgeState::Erased => {}
                        }
                    });
                    if c > 0 {
                        *slot = Some(s / c as f64);
                    }
                }
                let cur = phi.label(i) as usize;
                let best = fit
                    .iter()
                    .flatten()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                if fit.iter().all(Option::is_none) || fit[cur] == Some(best) {
                    cur as u32
                } else {
                    fit.iter().position(|&f| f == Some(best)).unwrap() as u32
                }
            })
            .collect()
    }

    fn random_instance(
        seed: u64,
        n: usize,
        density: f64,
        erasures: bool,
    ) -> (WeightedHypergraph, Partition) {
        let mut r = rng::stream(seed);
        let unlisted = if erasures && r.random::<bool>() {
            Unlisted::Erased
        } else {
            Unlisted::Zero
        };
        let mut b = HypergraphBuilder::new(n, 3).unwrap().unlisted(unlisted);
        for_each_combination(n, 3, |e| {
            let u: f64 = r.random();
            if u < density {
                b.add(e, r.random()).unwrap();
            } else if erasures && u < density + 0.1 {
                b.add_erased(e).unwrap();
            }
        });
        let labels = (0..n).map(|_| r.random_range(0..2u32)).collect();
        (b.build().unwrap(), Partition::new(labels, 2).unwrap())
    }

    #[test]
    fn refine_matches_enumeration() {
        for seed in 0..60 {
            let n = 5 + (seed as usize % 6);
            let (h, phi) = random_instance(seed, n, 0.4, true);
            assert_eq!(
                refine(&h, &phi, 2).unwrap().labels(),
                refine_oracle(&h, &phi, 2).as_slice()
            );
        }
    }

    #[test]
    fn refine_n8_explicit_table() {
        // weight of edge {a,b,c} is a fixed function of its nodes
        let mut b = HypergraphBuilder::new(8, 3).unwrap();
        for_each_combination(8, 3, |e| {
            let w = f64::from((e[0] * 7 + e[1] * 3 + e[2]) % 11) / 10.0;
            if w > 0.0 && w <= 1.0 {
                b.add(e, w).unwrap();
            }
        });
        let h = b.build().unwrap();
        let phi = Partition::new(vec![0, 0, 1, 1, 0, 1, 0, 1], 2).unwrap();
        assert_eq!(
            refine(&h, &phi, 2).unwrap().labels(),
            refine_oracle(&h, &phi, 2).as_slice()
        );
    }

    #[test]
    fn hsclr_exact_on_noiseless_blocks() {
        let (h, truth) = two_complete_blocks(6, 3);
        for seed in 0..10 {
            let mut cfg = HsclrConfig::new(2);
            cfg.beta = Some(0.3);
            let phi = hsclr(&h, &cfg, seed).unwrap();
            assert_eq!(
                error_fraction(&phi, &truth).unwrap().error_fraction,
                0.0,
                "seed {seed}"
            );
        }
    }

    /// With 40 edges, beta = 0.1 leaves about four for the spectral stage, so
    /// its estimate is often wrong; refinement must keep an exact one exact.
    #[test]
    fn hsclr_keeps_exact_spectral_estimate() {
        let (h, truth) = two_complete_blocks(6, 3);
        let mut exact_starts = 0;
        for seed in 0..100 {
            let mut cfg = HsclrConfig::new(2);
            cfg.beta = Some(0.1);
            let out = hsclr_detailed(&h, &cfg, seed).unwrap();
            if error_fraction(&out.initial, &truth).unwrap().error_fraction == 0.0 {
                exact_starts += 1;
                assert_eq!(
                    error_fraction(&out.partition, &truth)
                        .unwrap()
                        .error_fraction,
                    0.0,
                    "seed {seed}"
                );
            }
        }
        assert!(exact_starts > 0);
    }

    #[test]
    fn refine_keeps_truth_on_noiseless_blocks() {
        let (h, truth) = two_complete_blocks(6, 3);
        assert_eq!(refine(&h, &truth, 2).unwrap(), truth);
    }

    #[test]
    fn hsclr_tiny_beta_gives_valid_output() {
        let (h, _) = two_complete_blocks(6, 3);
        let mut cfg = HsclrConfig::new(2);
        cfg.beta = Some(1e-6);
        let phi = hsclr(&h, &cfg, 0).unwrap();
        assert_eq!(phi.n(), 12);
    }

    #[test]
    fn default_beta_is_clipped() {
        assert_eq!(default_beta(2), 0.05);
        let b = default_beta(200);
        assert!((b - 200f64.ln().ln() / 200f64.ln()).abs() < 1e-15);
        assert!(default_beta(10_usize.pow(9)) >= 0.05);
    }

    fn censored_truth_data(n: usize) -> (WeightedHypergraph, Partition) {
        let half = n / 2;
        let truth = Partition::from_sizes(&[half, n - half]).unwrap();
        let mut b = HypergraphBuilder::new(n, 3)
            .unwrap()
            .unlisted(Unlisted::Erased);
        for_each_combination(n, 3, |e| {
            b.add(e, f64::from(u8::from(all_same(e, truth.labels()))))
                .unwrap();
        });
        (b.build().unwrap(), truth)
    }

    #[test]
    fn hamming_truth_and_complement() {
        let (h, truth) = censored_truth_data(8);
        assert_eq!(hamming_objective(&h, &truth).unwrap(), 0);
        let comp = truth.relabel(&[1, 0]).unwrap();
        assert_eq!(hamming_objective(&h, &comp).unwrap(), 0);
        let x = Partition::new(vec![0, 1, 0, 1, 0, 1, 0, 1], 2).unwrap();
        assert_eq!(
            hamming_objective(&h, &x).unwrap(),
            hamming_objective(&h, &x.relabel(&[1, 0]).unwrap()).unwrap()
        );
    }

    #[test]
    fn hamming_rejects_non_binary() {
        let mut b = HypergraphBuilder::new(4, 3).unwrap();
        b.add(&[0, 1, 2], 0.5).unwrap();
        let x = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(
            hamming_objective(&b.build().unwrap(), &x),
            Err(Error::InvalidWeights(0.5))
        );
    }

    /// Direct count over all C(6,3) = 20 edges.
    #[test]
    fn hamming_matches_exhaustive_count() {
        for seed in 0..20 {
            let mut r = rng::stream(seed);
            for unlisted in [Unlisted::Zero, Unlisted::Erased] {
                let mut b = HypergraphBuilder::new(6, 3).unwrap().unlisted(unlisted);
                for_each_combination(6, 3, |e| match r.random_range(0..4) {
                    0 => b.add(e, 0.0).unwrap(),
                    1 => b.add(e, 1.0).unwrap(),
                    2 => b.add_erased(e).unwrap(),
                    _ => {}
                });
                let h = b.build().unwrap();
                let x = Partition::new((0..6).map(|_| r.random_range(0..2)).collect(), 2).unwrap();
                let mut expect = 0;
                for_each_combination(6, 3, |e| {
                    if let EdgeState::Observed(w) = h.state(&canonical_edge(e, 6, 3).unwrap()) {
                        if (w == 1.0) != all_same(e, x.labels()) {
                            expect += 1;
                        }
                    }
                });
                assert_eq!(hamming_objective(&h, &x).unwrap(), expect);
            }
        }
    }

    #[test]
    fn ml_refine_fixed_point_and_repair() {
        let (h, truth) = censored_truth_data(10);
        assert_eq!(ml_refine_cbm(&h, &truth).unwrap(), truth);
        let mut labels = truth.labels().to_vec();
        labels[2] = 1;
        let wrong = Partition::new(labels, 2).unwrap();
        // before: node 2 disagrees with every observation it touches
        let before = hamming_objective(&h, &wrong).unwrap();
        assert!(before > hamming_objective(&h, &truth).unwrap());
        assert_eq!(ml_refine_cbm(&h, &wrong).unwrap(), truth);
    }

    /// Flip rule computed from the full objective.
    fn ml_refine_full(h: &WeightedHypergraph, x: &Partition) -> Partition {
        let base = hamming_objective(h, x).unwrap();
        let labels = (0..x.n())
            .map(|i| {
                let mut l = x.labels().to_vec();
                l[i] = 1 - l[i];
                let flipped = hamming_objective(h, &Partition::new(l, 2).unwrap()).unwrap();
                if base < flipped {
                    x.label(i)
                } else {
                    1 - x.label(i)
                }
            })
            .collect();
        Partition::new(labels, 2).unwrap()
    }

    #[test]
    fn ml_refine_incremental_matches_full() {
        for seed in 0..80 {
            let mut r = rng::stream(500 + seed);
            let n = 4 + (seed as usize % 7);
            let unlisted = if seed % 2 == 0 {
                Unlisted::Zero
            } else {
                Unlisted::Erased
            };
            let mut b = HypergraphBuilder::new(n, 3).unwrap().unlisted(unlisted);
            for_each_combination(n, 3, |e| match r.random_range(0..4) {
                0 => b.add(e, 0.0).unwrap(),
                1 => b.add(e, 1.0).unwrap(),
                2 => b.add_erased(e).unwrap(),
                _ => {}
            });
            let h = b.build().unwrap();
            let x = Partition::new((0..n).map(|_| r.random_range(0..2)).collect(), 2).unwrap();
            assert_eq!(
                ml_refine_cbm(&h, &x).unwrap(),
                ml_refine_full(&h, &x),
                "seed {seed}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn refine_is_label_equivariant(seed in any::<u64>(), swap in any::<bool>()) {
            let (h, phi) = random_instance(seed, 9, 0.5, false);
            let perm = if swap { [1u32, 0] } else { [0, 1] };
            let a = refine(&h, &phi.relabel(&perm).unwrap(), 2).unwrap();
            let b = refine(&h, &phi, 2).unwrap().relabel(&perm).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn split_children_partition_edges(seed in any::<u64>(), beta in 0.0f64..=1.0) {
            let (h, _) = random_instance(seed, 9, 0.5, true);
            let (h1, h2) = split_edges(&h, beta, seed).unwrap();
            let mut all: Vec<_> = h1.iter().chain(h2.iter()).map(|e| (e.nodes.to_vec(), e.weight.to_bits(), e.observed)).collect();
            all.sort();
            let mut orig: Vec<_> = h.iter().map(|e| (e.nodes.to_vec(), e.weight.to_bits(), e.observed)).collect();
            orig.sort();
            prop_assert_eq!(all, orig);
        }

        #[test]
        fn single_flip_rule_is_locally_greedy(seed in any::<u64>()) {
            let mut r = rng::stream(seed);
            let n = 8;
            let mut b = HypergraphBuilder::new(n, 3).unwrap().unlisted(Unlisted::Erased);
            for_each_combination(n, 3, |e| match r.random_range(0..3) {
                0 => b.add(e, 0.0).unwrap(),
                1 => b.add(e, 1.0).unwrap(),
                _ => {}
            });
            let h = b.build().unwrap();
            let x = Partition::new((0..n).map(|_| r.random_range(0..2)).collect(), 2).unwrap();
            let out = ml_refine_cbm(&h, &x).unwrap();
            let base = hamming_objective(&h, &x).unwrap();
            for i in 0..n {
                let mut l = x.labels().to_vec();
                l[i] = out.label(i);
                let single = hamming_objective(&h, &Partition::new(l, 2).unwrap()).unwrap();
                prop_assert!(single <= base);
            }
        }
    }
}
