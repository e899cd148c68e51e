//! Synthetic subspace clustering and hyperplane-fitting sketches.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};

use super::{sample_edges, EdgeClass, EdgeModel};
use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::hypergraph::{Partition, Unlisted, WeightedHypergraph};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceParams {
    /// Number of subspaces.
    pub k: usize,
    /// Subspace dimension.
    pub m: usize,
    /// Ambient dimension.
    pub ell: usize,
    pub points_per_cluster: usize,
    /// Per-coordinate Gaussian noise standard deviation.
    pub sigma: f64,
    /// Edge size, at least `m + 2`.
    pub d: usize,
    /// Probability that a given edge enters the sketch.
    pub sampling_rate: f64,
    /// Translate each subspace by a random offset.
    pub affine: bool,
}

impl SubspaceParams {
    /// Parameters with `d = m + 2` and the default sampling budget.
    pub fn new(k: usize, m: usize, ell: usize, points_per_cluster: usize, sigma: f64) -> Self {
        let d = m + 2;
        let n = k * points_per_cluster;
        Self {
            k,
            m,
            ell,
            points_per_cluster,
            sigma,
            d,
            sampling_rate: default_sampling_rate(k, n, d),
            affine: false,
        }
    }

    pub fn n(&self) -> usize {
        self.k * self.points_per_cluster
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.k == 0 || self.points_per_cluster == 0 {
            return bad("need at least one cluster and one point per cluster".into());
        }
        if self.m == 0 || self.m >= self.ell {
            return bad(format!(
                "subspace dimension m = {} must lie in [1, ell = {})",
                self.m, self.ell
            ));
        }
        if self.d < self.m + 2 {
            return bad(format!(
                "edge size d = {} must be at least m + 2 = {}",
                self.d,
                self.m + 2
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!(
                "sigma = {} must be a nonnegative number",
                self.sigma
            ));
        }
        if !(0.0..=1.0).contains(&self.sampling_rate) {
            return bad(format!(
                "sampling rate {} outside [0, 1]",
                self.sampling_rate
            ));
        }
        Ok(())
    }
}

/// Expected sketch size `5·k^(d-1)·n·ln n / d`.
pub fn sketch_budget(k: usize, n: usize, d: usize) -> f64 {
    5.0 * (k as f64).powi(d as i32 - 1) * n as f64 * (n as f64).ln() / d as f64
}

/// Sampling rate `s_n` that meets [`sketch_budget`] in expectation, capped at 1.
pub fn default_sampling_rate(k: usize, n: usize, d: usize) -> f64 {
    let total = binomial(n, d);
    if total == 0.0 {
        return 0.0;
    }
    (sketch_budget(k, n, d) / total).min(1.0)
}

/// Scale used for noiseless data: far above the rounding error of a fit
/// through unit-scale points, far below any real misfit.
pub const NOISELESS_FITTING_SCALE: f64 = 1e-8;

/// Default scale `τ` of the fitting weight `exp(-fit/τ)`: `σ·√d`, or
/// [`NOISELESS_FITTING_SCALE`] when `σ = 0`.
pub fn default_fitting_scale(sigma: f64, d: usize) -> f64 {
    if sigma > 0.0 {
        sigma * (d as f64).sqrt()
    } else {
        NOISELESS_FITTING_SCALE
    }
}

/// Points in `ℝ^ell`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    ell: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn new(ell: usize, data: Vec<f64>) -> Result<Self> {
        if ell == 0 || !data.len().is_multiple_of(ell) {
            return Err(Error::InvalidParams(format!(
                "{} coordinates do not split into points of dimension {ell}",
                data.len()
            )));
        }
        Ok(Self { ell, data })
    }

    pub fn dim(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.ell
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.ell..(i + 1) * self.ell]
    }
}

/// Draws `k` random `m`-dimensional subspaces of `ℝ^ell` and
/// `points_per_cluster` noisy points on each.
pub fn sample_subspace_points(
    params: &SubspaceParams,
    seed: u64,
) -> Result<(PointCloud, Partition)> {
    params.validate()?;
    let mut r = rng::stream(seed);
    let coeff = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let noise = Normal::new(0.0, params.sigma).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let (k, m, ell) = (params.k, params.m, params.ell);

    let mut data = Vec::with_capacity(params.n() * ell);
    let mut labels = Vec::with_capacity(params.n());
    for j in 0..k {
        let gauss = DMatrix::<f64>::from_fn(ell, m, |_, _| StandardNormal.sample(&mut r));
        let basis = gauss.qr().q();
        let offset = if params.affine {
            DVector::<f64>::from_fn(ell, |_, _| StandardNormal.sample(&mut r))
        } else {
            DVector::zeros(ell)
        };
        for _ in 0..params.points_per_cluster {
            let c = DVector::<f64>::from_fn(m, |_, _| coeff.sample(&mut r));
            let x = &basis * c + &offset;
            data.extend(x.iter().map(|&v| v + noise.sample(&mut r)));
            labels.push(j as u32);
        }
    }
    Ok((PointCloud::new(ell, data)?, Partition::new(labels, k)?))
}

/// Singular values of the matrix whose rows are `rows`, by one-sided Jacobi
/// rotations (small values keep their relative accuracy).
fn singular_values(mut rows: Vec<Vec<f64>>) -> Vec<f64> {
    let d = rows.len();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                let alpha = dot(&rows[p], &rows[p]);
                let beta = dot(&rows[q], &rows[q]);
                let gamma = dot(&rows[p], &rows[q]);
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = rows.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    rows.iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect()
}

/// Root of the summed squared residuals of `points` to their best-fit
/// `m`-dimensional affine flat, divided by `√d`.
pub fn fitting_error(points: &[&[f64]], m: usize) -> Result<f64> {
    let d = points.len();
    if d < m + 2 {
        return Err(Error::InvalidParams(format!(
            "{d} points cannot overdetermine an {m}-flat"
        )));
    }
    let ell = points[0].len();
    if points.iter().any(|p| p.len() != ell) {
        return Err(Error::InvalidParams("points of differing dimension".into()));
    }
    let mut centroid = vec![0.0; ell];
    for p in points {
        for (c, &v) in centroid.iter_mut().zip(p.iter()) {
            *c += v;
        }
    }
    centroid.iter_mut().for_each(|c| *c /= d as f64);
    let centered: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&centroid).map(|(v, c)| v - c).collect())
        .collect();
    let mut sv = singular_values(centered);
    sv.sort_by(|a, b| b.total_cmp(a));
    let residual: f64 = sv.iter().skip(m).map(|v| v * v).sum();
    Ok(residual.sqrt() / (d as f64).sqrt())
}

/// `exp(-fit/τ)`, clamped away from 0.
pub fn fitting_weight(points: &[&[f64]], m: usize, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParams(format!(
            "fitting scale {tau} must be positive"
        )));
    }
    let fit = fitting_error(points, m)?;
    Ok((-fit / tau).exp().max(f64::MIN_POSITIVE))
}

struct SketchModel<'a> {
    cloud: &'a PointCloud,
    m: usize,
    tau: f64,
    rate: f64,
}

impl EdgeModel for SketchModel<'_> {
    fn store_probability(&self, _class: EdgeClass) -> f64 {
        self.rate
    }

    fn draw_stored<R: Rng>(&self, _class: EdgeClass, nodes: &[u32], _rng: &mut R) -> (f64, bool) {
        let pts: Vec<&[f64]> = nodes
            .iter()
            .map(|&v| self.cloud.point(v as usize))
            .collect();
        let w = fitting_weight(&pts, self.m, self.tau).expect("edge size validated against m");
        (w, true)
    }
}

/// Keeps each of the `C(n, d)` edges independently with probability
/// `params.sampling_rate` and weights kept edges by their fitting weight.
pub fn sketch_hypergraph(
    cloud: &PointCloud,
    params: &SubspaceParams,
    tau: f64,
    seed: u64,
) -> Result<WeightedHypergraph> {
    params.validate()?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParams(format!(
            "fitting scale {tau} must be positive"
        )));
    }
    if cloud.dim() != params.ell {
        return Err(Error::InvalidParams(format!(
            "points have dimension {}, params say {}",
            cloud.dim(),
            params.ell
        )));
    }
    let labels = vec![0u32; cloud.len()];
    let model = SketchModel {
        cloud,
        m: params.m,
        tau,
        rate: params.sampling_rate,
    };
    sample_edges(&labels, 1, params.d, Unlisted::Zero, &model, seed)
}
