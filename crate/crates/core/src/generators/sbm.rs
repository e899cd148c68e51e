use rand::Rng;

use super::{sample_edges, EdgeClass, EdgeModel};
use crate::error::{Error, Result};
use crate::hypergraph::{Partition, Unlisted, WeightedHypergraph};

/// Distribution of a single edge weight given its class mean `μ·α`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `W_e ~ Bernoulli(μ·α)`.
    Bernoulli,
    /// With probability `α`, uniform on `[0, 2μ]`; otherwise 0.
    UniformMixture,
    /// Bernoulli weights with a separate mean per homogeneous group and one
    /// for heterogeneous edges. Overrides `p` and `q`.
    Asymmetric {
        homogeneous: Vec<f64>,
        heterogeneous: f64,
    },
}

/// Configuration of the weighted stochastic block model.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    pub n: usize,
    pub d: usize,
    pub cluster_sizes: Vec<usize>,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub weight_kind: WeightKind,
    pub assortative: bool,
}

impl SbmParams {
    /// Bernoulli, assortative model with equal cluster sizes.
    pub fn symmetric(n: usize, d: usize, k: usize, p: f64, q: f64, alpha: f64) -> Result<Self> {
        if k == 0 || !n.is_multiple_of(k) {
            return Err(Error::InvalidParams(format!(
                "n = {n} not divisible into k = {k} groups"
            )));
        }
        Ok(Self {
            n,
            d,
            cluster_sizes: vec![n / k; k],
            p,
            q,
            alpha,
            weight_kind: WeightKind::Bernoulli,
            assortative: p >= q,
        })
    }

    pub fn k(&self) -> usize {
        self.cluster_sizes.len()
    }

    pub fn truth(&self) -> Result<Partition> {
        Partition::from_sizes(&self.cluster_sizes)
    }

    /// Mean parameter (before scaling by `alpha`) of a homogeneous edge in `group`.
    pub fn homogeneous_mean(&self, group: usize) -> f64 {
        match &self.weight_kind {
            WeightKind::Asymmetric { homogeneous, .. } => homogeneous[group],
            _ => self.p,
        }
    }

    pub fn heterogeneous_mean(&self) -> f64 {
        match &self.weight_kind {
            WeightKind::Asymmetric { heterogeneous, .. } => *heterogeneous,
            _ => self.q,
        }
    }

    /// Checks sizes and that every class mean is a valid `[0, 1]` mean.
    /// Does not check the ordering of homogeneous against heterogeneous means.
    pub fn validate_structure(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.d < 2 {
            return bad(format!("edge size d = {} must be at least 2", self.d));
        }
        if self.cluster_sizes.is_empty() {
            return bad("no clusters".into());
        }
        if self.cluster_sizes.iter().sum::<usize>() != self.n {
            return bad(format!(
                "cluster sizes {:?} do not sum to n = {}",
                self.cluster_sizes, self.n
            ));
        }
        if let Some(s) = self.cluster_sizes.iter().find(|&&s| s < self.d) {
            return bad(format!(
                "cluster of size {s} is smaller than d = {}",
                self.d
            ));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha = {} must lie in (0, 1]", self.alpha));
        }
        if let WeightKind::Asymmetric { homogeneous, .. } = &self.weight_kind {
            if homogeneous.len() != self.k() {
                return bad(format!(
                    "{} homogeneous means for {} clusters",
                    homogeneous.len(),
                    self.k()
                ));
            }
        }
        let means = (0..self.k())
            .map(|j| self.homogeneous_mean(j))
            .chain([self.heterogeneous_mean()]);
        for m in means {
            if !(0.0..=1.0).contains(&m) || m * self.alpha > 1.0 {
                return bad(format!(
                    "mean parameter {m} invalid with alpha = {}",
                    self.alpha
                ));
            }
            if self.weight_kind == WeightKind::UniformMixture && 2.0 * m > 1.0 {
                return bad(format!("uniform mixture needs 2·{m} ≤ 1"));
            }
        }
        Ok(())
    }

    /// Full validation, including assortativity.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        let het = self.heterogeneous_mean();
        let homs: Vec<f64> = (0..self.k()).map(|j| self.homogeneous_mean(j)).collect();
        let ordered = if self.assortative {
            homs.iter().all(|&h| h > het)
        } else {
            homs.iter().all(|&h| h < het)
        };
        if !ordered {
            let want = if self.assortative {
                "exceed"
            } else {
                "fall below"
            };
            return Err(Error::InvalidParams(format!(
                "homogeneous means {homs:?} must all {want} the heterogeneous mean {het}"
            )));
        }
        Ok(())
    }
}

struct SbmModel<'a> {
    params: &'a SbmParams,
}

impl SbmModel<'_> {
    fn mean(&self, class: EdgeClass) -> f64 {
        match class {
            EdgeClass::Homogeneous(j) => self.params.homogeneous_mean(j as usize),
            EdgeClass::Heterogeneous => self.params.heterogeneous_mean(),
        }
    }
}

impl EdgeModel for SbmModel<'_> {
    fn store_probability(&self, class: EdgeClass) -> f64 {
        let alpha = self.params.alpha;
        match self.params.weight_kind {
            WeightKind::UniformMixture if self.mean(class) > 0.0 => alpha,
            WeightKind::UniformMixture => 0.0,
            _ => self.mean(class) * alpha,
        }
    }

    fn draw_stored<R: Rng>(&self, class: EdgeClass, _nodes: &[u32], rng: &mut R) -> (f64, bool) {
        match self.params.weight_kind {
            // (1 - u) lies in (0, 1], so the weight is strictly positive.
            WeightKind::UniformMixture => {
                ((1.0 - rng.random::<f64>()) * 2.0 * self.mean(class), true)
            }
            _ => (1.0, true),
        }
    }
}

/// Samples the weighted SBM. The ground truth assigns the first
/// `cluster_sizes[0]` nodes to group 0, the next block to group 1, and so on.
/// Only nonzero weights are stored.
pub fn sample_weighted_sbm(
    params: &SbmParams,
    seed: u64,
) -> Result<(WeightedHypergraph, Partition)> {
    params.validate()?;
    let truth = params.truth()?;
    let h = sample_edges(
        truth.labels(),
        truth.k(),
        params.d,
        Unlisted::Zero,
        &SbmModel { params },
        seed,
    )?;
    Ok((h, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial;
    use crate::io::serialize_hypergraph;

    fn bern(n: usize, sizes: Vec<usize>, p: f64, q: f64, alpha: f64) -> SbmParams {
        SbmParams {
            n,
            d: 3,
            cluster_sizes: sizes,
            p,
            q,
            alpha,
            weight_kind: WeightKind::Bernoulli,
            assortative: true,
        }
    }

    #[test]
    fn degenerate_p1_q0() {
        let params = bern(6, vec![3, 3], 1.0, 0.0, 1.0);
        let (h, truth) = sample_weighted_sbm(&params, 11).unwrap();
        assert_eq!(h.len(), 2);
        for e in h.iter() {
            assert_eq!(e.weight, 1.0);
            let l = truth.label(e.nodes[0] as usize);
            assert!(e.nodes.iter().all(|&v| truth.label(v as usize) == l));
        }
        assert_eq!(truth.labels(), &[0, 0, 0, 1, 1, 1]);
    }

    /// Monte-Carlo mean of homogeneous and heterogeneous weights against
    /// `p·α` and `q·α`, at three standard errors.
    fn check_means(params: &SbmParams, trials: u64) {
        let truth = params.truth().unwrap();
        let n_hom: f64 = params
            .cluster_sizes
            .iter()
            .map(|&s| binomial(s, params.d))
            .sum();
        let n_het = binomial(params.n, params.d) - n_hom;
        let (mut hom, mut hom2, mut het, mut het2) = (0.0, 0.0, 0.0, 0.0);
        for seed in 0..trials {
            let (h, _) = sample_weighted_sbm(params, seed).unwrap();
            let (mut sh, mut st) = (0.0, 0.0);
            for e in h.iter() {
                match super::super::classify(truth.labels(), e.nodes) {
                    EdgeClass::Homogeneous(_) => sh += e.weight,
                    EdgeClass::Heterogeneous => st += e.weight,
                }
            }
            let (mh, mt) = (sh / n_hom, st / n_het);
            hom += mh;
            hom2 += mh * mh;
            het += mt;
            het2 += mt * mt;
        }
        let t = trials as f64;
        for (sum, sum2, target) in [
            (hom, hom2, params.p * params.alpha),
            (het, het2, params.q * params.alpha),
        ] {
            let mean = sum / t;
            let se = ((sum2 / t - mean * mean).max(0.0) / t).sqrt();
            assert!(
                (mean - target).abs() <= 3.0 * se,
                "mean {mean} vs {target} (se {se})"
            );
        }
    }

    #[test]
    fn bernoulli_means_match() {
        check_means(&bern(30, vec![15, 15], 0.8, 0.2, 0.5), 200);
    }

    #[test]
    fn uniform_mixture_means_match() {
        let mut params = bern(24, vec![12, 12], 0.45, 0.1, 0.6);
        params.weight_kind = WeightKind::UniformMixture;
        check_means(&params, 200);
    }

    #[test]
    fn deterministic_per_seed() {
        let params = bern(30, vec![15, 15], 0.8, 0.2, 0.5);
        let a = serialize_hypergraph(&sample_weighted_sbm(&params, 5).unwrap().0);
        let b = serialize_hypergraph(&sample_weighted_sbm(&params, 5).unwrap().0);
        let c = serialize_hypergraph(&sample_weighted_sbm(&params, 6).unwrap().0);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_params() {
        let mut p = bern(6, vec![3, 3], 0.2, 0.8, 1.0);
        assert!(matches!(
            sample_weighted_sbm(&p, 0),
            Err(Error::InvalidParams(_))
        ));
        p.assortative = false;
        assert!(sample_weighted_sbm(&p, 0).is_ok());
        let p = bern(6, vec![2, 4], 0.8, 0.2, 1.0);
        assert!(p.validate().is_err());
        let p = bern(7, vec![3, 3], 0.8, 0.2, 1.0);
        assert!(p.validate().is_err());
        let mut p = bern(6, vec![3, 3], 0.8, 0.2, 1.0);
        p.weight_kind = WeightKind::UniformMixture;
        assert!(p.validate().is_err());
    }

    #[test]
    fn asymmetric_means_are_ordered() {
        let mut p = bern(9, vec![3, 3, 3], 0.0, 0.0, 1.0);
        p.weight_kind = WeightKind::Asymmetric {
            homogeneous: vec![0.9, 0.5, 0.7],
            heterogeneous: 0.4,
        };
        assert!(p.validate().is_ok());
        p.weight_kind = WeightKind::Asymmetric {
            homogeneous: vec![0.9, 0.3, 0.7],
            heterogeneous: 0.4,
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn large_instances_sample_without_enumeration() {
        // C(2000, 3) > 10^8, so the rejection path runs.
        let params = bern(2000, vec![1000, 1000], 0.9, 0.1, 2e-6);
        let (h, truth) = sample_weighted_sbm(&params, 3).unwrap();
        let expected = 2.0 * binomial(1000, 3) * 0.9 * 2e-6
            + (binomial(2000, 3) - 2.0 * binomial(1000, 3)) * 0.1 * 2e-6;
        let sd = expected.sqrt();
        assert!(
            (h.len() as f64 - expected).abs() < 5.0 * sd,
            "{} vs {expected}",
            h.len()
        );
        let again = sample_weighted_sbm(&params, 3).unwrap().0;
        assert_eq!(h, again);
        assert_eq!(truth.n(), 2000);
    }
}
