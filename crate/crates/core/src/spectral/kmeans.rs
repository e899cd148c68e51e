//! k-means with careful seeding and restarts, for clustering embedding rows.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hypergraph::Partition;
use crate::rng;

const MAX_LLOYD_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    /// One center per label; each is the mean of its members (or the
    /// reseeded position if the cluster ended empty).
    pub centers: DMatrix<f64>,
    /// Sum over clusters of squared distances to the cluster mean.
    pub cost: f64,
}

impl KMeansResult {
    /// Label of the center nearest to `row`, lowest label on ties.
    pub fn nearest(&self, row: &[f64]) -> u32 {
        nearest_center(&self.centers, row).0 as u32
    }
}

fn sq_dist_row(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|t| (points[(i, t)] - centers[(c, t)]).powi(2))
        .sum()
}

fn nearest_center(centers: &DMatrix<f64>, row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centers.nrows() {
        let d: f64 = row
            .iter()
            .enumerate()
            .map(|(t, &v)| (v - centers[(c, t)]).powi(2))
            .sum();
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Sum of within-cluster squared deviations from the cluster means.
pub(crate) fn partition_cost(points: &DMatrix<f64>, labels: &[u32], k: usize) -> f64 {
    let dim = points.ncols();
    let mut sums = DMatrix::<f64>::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l as usize] += 1;
        for t in 0..dim {
            sums[(l as usize, t)] += points[(i, t)];
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            for t in 0..dim {
                sums[(c, t)] /= count as f64;
            }
        }
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist_row(points, i, &sums, l as usize))
        .sum()
}

fn seed_centers<R: Rng>(points: &DMatrix<f64>, k: usize, r: &mut R) -> DMatrix<f64> {
    let n = points.nrows();
    let dim = points.ncols();
    let mut centers = DMatrix::<f64>::zeros(k, dim);
    let first = r.random_range(0..n);
    centers.row_mut(0).copy_from(&points.row(first));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist_row(points, i, &centers, 0))
        .collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = r.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            r.random_range(0..n)
        };
        centers.row_mut(c).copy_from(&points.row(pick));
        for (i, slot) in d2.iter_mut().enumerate() {
            *slot = slot.min(sq_dist_row(points, i, &centers, c));
        }
    }
    centers
}

fn lloyd(
    points: &DMatrix<f64>,
    mut centers: DMatrix<f64>,
    rel_tol: f64,
) -> (Vec<u32>, DMatrix<f64>) {
    let n = points.nrows();
    let k = centers.nrows();
    let dim = points.ncols();
    let mut labels = vec![u32::MAX; n];
    let mut prev_cost = f64::INFINITY;
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        let mut cost = 0.0;
        for i in 0..n {
            let row: Vec<f64> = points.row(i).iter().copied().collect();
            let (c, d) = nearest_center(&centers, &row);
            cost += d;
            if labels[i] != c as u32 {
                labels[i] = c as u32;
                changed = true;
            }
        }
        let mut sums = DMatrix::<f64>::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l as usize] += 1;
            for t in 0..dim {
                sums[(l as usize, t)] += points[(i, t)];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for t in 0..dim {
                    centers[(c, t)] = sums[(c, t)] / counts[c] as f64;
                }
            } else {
                // Empty cluster: move its center onto the point farthest from
                // the center it is currently assigned to.
                let far = (0..n)
                    .map(|i| (i, sq_dist_row(points, i, &centers, labels[i] as usize)))
                    .fold(
                        (0, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    )
                    .0;
                centers.row_mut(c).copy_from(&points.row(far));
                changed = true;
            }
        }
        let stalled = prev_cost.is_finite() && prev_cost - cost <= rel_tol * prev_cost;
        if !changed || (stalled && counts.iter().all(|&c| c > 0)) {
            break;
        }
        prev_cost = cost;
    }
    (labels, centers)
}

/// Clusters the rows of `points` into `k` groups: careful seeding followed by
/// Lloyd iterations, best of `restarts` runs by cost. `rel_tol` stops Lloyd
/// once the relative cost improvement falls below it.
pub fn cluster_rows(
    points: &DMatrix<f64>,
    k: usize,
    restarts: usize,
    rel_tol: f64,
    seed: u64,
) -> Result<KMeansResult> {
    let n = points.nrows();
    if restarts == 0 {
        return Err(Error::InvalidParams("restarts must be at least 1".into()));
    }
    if k == 0 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "cannot split {n} rows into {k} clusters"
        )));
    }
    let mut best: Option<KMeansResult> = None;
    for attempt in 0..restarts {
        let mut r = rng::stream(rng::derive_seed(seed, &[attempt as u64]));
        let centers = seed_centers(points, k, &mut r);
        let (labels, centers) = lloyd(points, centers, rel_tol);
        let cost = partition_cost(points, &labels, k);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(KMeansResult {
                partition: Partition::new(labels, k)?,
                centers,
                cost,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}
