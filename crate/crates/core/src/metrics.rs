//! Recovery metrics: permutation-minimised error fraction and worst-cluster error.

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::error::{Error, Result};
use crate::hypergraph::Partition;

/// Largest label count aligned by trying every permutation.
pub const BRUTE_FORCE_MAX_K: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignmentMethod {
    /// Brute force up to [`BRUTE_FORCE_MAX_K`] labels, assignment solver above.
    #[default]
    Auto,
    BruteForce,
    Assignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// `permutation[a]` is the reference label matched to estimated label `a`.
    pub permutation: Vec<u32>,
    pub error_fraction: f64,
    /// `confusion[a][b]` counts nodes with estimated label `a` and reference
    /// label `b`.
    pub confusion: Vec<Vec<u64>>,
}

/// Confusion counts over `max(k_phi, k_psi)` labels.
pub fn confusion_matrix(phi: &Partition, psi: &Partition) -> Result<Vec<Vec<u64>>> {
    if phi.n() != psi.n() {
        return Err(Error::ShapeMismatch(format!(
            "partitions have {} and {} nodes",
            phi.n(),
            psi.n()
        )));
    }
    let k = phi.k().max(psi.k());
    let mut c = vec![vec![0u64; k]; k];
    for (&a, &b) in phi.labels().iter().zip(psi.labels()) {
        c[a as usize][b as usize] += 1;
    }
    Ok(c)
}

/// Visits every permutation of `0..k` (Heap's algorithm).
fn for_each_permutation<F: FnMut(&[u32])>(k: usize, mut f: F) {
    let mut p: Vec<u32> = (0..k as u32).collect();
    let mut c = vec![0usize; k];
    f(&p);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn trace(confusion: &[Vec<u64>], perm: &[u32]) -> u64 {
    perm.iter()
        .enumerate()
        .map(|(a, &b)| confusion[a][b as usize])
        .sum()
}

fn best_by_brute_force(confusion: &[Vec<u64>]) -> Vec<u32> {
    let k = confusion.len();
    let mut best = (0u64, (0..k as u32).collect::<Vec<_>>());
    let mut first = true;
    for_each_permutation(k, |p| {
        let t = trace(confusion, p);
        if first || t > best.0 {
            best = (t, p.to_vec());
            first = false;
        }
    });
    best.1
}

fn best_by_assignment(confusion: &[Vec<u64>]) -> Vec<u32> {
    let k = confusion.len();
    let weights = Matrix::from_fn(k, k, |(a, b)| confusion[a][b] as i64);
    let (_, assignment) = kuhn_munkres(&weights);
    assignment.into_iter().map(|b| b as u32).collect()
}

/// Fraction of nodes on which `phi` and `psi` disagree, minimised over
/// relabelings of `phi`.
pub fn error_fraction(phi: &Partition, psi: &Partition) -> Result<AlignmentResult> {
    error_fraction_with(phi, psi, AlignmentMethod::Auto)
}

pub fn error_fraction_with(
    phi: &Partition,
    psi: &Partition,
    method: AlignmentMethod,
) -> Result<AlignmentResult> {
    let confusion = confusion_matrix(phi, psi)?;
    let k = confusion.len();
    let permutation = match method {
        AlignmentMethod::BruteForce => best_by_brute_force(&confusion),
        AlignmentMethod::Assignment => best_by_assignment(&confusion),
        AlignmentMethod::Auto if k <= BRUTE_FORCE_MAX_K => best_by_brute_force(&confusion),
        AlignmentMethod::Auto => best_by_assignment(&confusion),
    };
    let n = phi.n();
    let error_fraction = if n == 0 {
        0.0
    } else {
        1.0 - trace(&confusion, &permutation) as f64 / n as f64
    };
    Ok(AlignmentResult {
        permutation,
        error_fraction,
        confusion,
    })
}

fn worst_for(confusion: &[Vec<u64>], sizes: &[u64], perm: &[u32]) -> f64 {
    let mut worst = 0.0f64;
    for (b, &size) in sizes.iter().enumerate() {
        if size == 0 {
            continue;
        }
        let a = perm
            .iter()
            .position(|&x| x as usize == b)
            .expect("perm is a bijection");
        let wrong = size - confusion[a][b];
        worst = worst.max(wrong as f64 / size as f64);
    }
    worst
}

/// Largest per-cluster mismatch fraction of `phi` against the clusters of
/// `psi`, minimised over relabelings of `phi`.
///
/// Up to [`BRUTE_FORCE_MAX_K`] labels every permutation is tried; above that
/// the minimax is found by bisecting over the candidate thresholds and
/// checking for a perfect matching among admissible pairs.
pub fn worst_cluster_error(phi: &Partition, psi: &Partition) -> Result<f64> {
    let confusion = confusion_matrix(phi, psi)?;
    let k = confusion.len();
    let mut sizes = vec![0u64; k];
    for row in &confusion {
        for (b, &c) in row.iter().enumerate() {
            sizes[b] += c;
        }
    }
    if k <= BRUTE_FORCE_MAX_K {
        let mut best = f64::INFINITY;
        for_each_permutation(k, |p| best = best.min(worst_for(&confusion, &sizes, p)));
        return Ok(best);
    }
    let cost = |a: usize, b: usize| {
        if sizes[b] == 0 {
            0.0
        } else {
            (sizes[b] - confusion[a][b]) as f64 / sizes[b] as f64
        }
    };
    let mut candidates: Vec<f64> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| cost(a, b))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |t: f64| {
        let m = Matrix::from_fn(k, k, |(a, b)| i64::from(cost(a, b) <= t));
        kuhn_munkres(&m).0 == k as i64
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}
