//! Model instances, single trials and parameter sweeps.

use std::time::Instant;

use hsc_core::combinatorics::binomial;
use hsc_core::generators::{default_fitting_scale, sketch_budget};
use hsc_core::pipeline::{hsc_detailed, hsclr_detailed, hsclr_ml_detailed};
use hsc_core::rng::derive_seed;
use hsc_core::{
    error_fraction, sample_censored_bm, sample_planted_clique, sample_subspace_points,
    sample_weighted_sbm, sketch_hypergraph, CbmParams, HscConfig, HsclrConfig, Partition,
    SbmParams, StageTimings, SubspaceParams, WeightKind, WeightedHypergraph,
};
use rayon::prelude::*;

use crate::config::{AlgorithmConfig, AlgorithmKind, ExperimentConfig, ModelConfig, ModelKind, Weights};
use crate::error::{CliError, CliResult};

const DATA_STREAM: u64 = 1;
const ALGO_STREAM: u64 = 2;

/// A fully resolved model ready for sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Sbm(SbmParams),
    Cbm { params: CbmParams, truth: Partition },
    Clique { n: usize, d: usize, s: usize },
    Subspace { params: SubspaceParams, tau: f64 },
}

fn need<T: Copy>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("model parameter `{name}` is required")))
}

/// Edge probability from whichever density parameter is set.
fn resolve_alpha(m: &ModelConfig, n: usize, d: usize) -> CliResult<f64> {
    let total = binomial(n, d);
    let nlogn = n as f64 * (n as f64).ln();
    let mut given = Vec::new();
    if let Some(a) = m.alpha {
        given.push(a);
    }
    if let Some(c) = m.c {
        given.push(c * nlogn / total);
    }
    if let Some(c) = m.c_linear {
        given.push(c * n as f64 / total);
    }
    if let Some(x) = m.limit_multiple {
        let theta = need(m.theta, "theta")?;
        given.push(x * CbmParams::information_limit(n, d, theta) / total);
    }
    match given.as_slice() {
        [a] if (0.0..=1.0).contains(a) => Ok(*a),
        [a] => Err(CliError::Config(format!("resolved edge probability {a} lies outside [0, 1]"))),
        [] => Err(CliError::Config(
            "one of alpha, c, c_linear or limit_multiple is required".into(),
        )),
        _ => Err(CliError::Config(
            "give only one of alpha, c, c_linear or limit_multiple".into(),
        )),
    }
}

fn equal_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|j| n / k + usize::from(j < n % k)).collect()
}

impl Instance {
    pub fn from_model(m: &ModelConfig) -> CliResult<Self> {
        match m.kind {
            ModelKind::Sbm => {
                let n = need(m.n, "n")?;
                let d = need(m.d, "d")?;
                let sizes = match &m.sizes {
                    Some(s) => s.clone(),
                    None => equal_sizes(n, m.k.unwrap_or(2)),
                };
                let (p, q) = (need(m.p, "p")?, need(m.q, "q")?);
                let params = SbmParams {
                    n,
                    d,
                    cluster_sizes: sizes,
                    p,
                    q,
                    alpha: resolve_alpha(m, n, d)?,
                    weight_kind: match m.weights {
                        Weights::Bernoulli => WeightKind::Bernoulli,
                        Weights::Mixture => WeightKind::UniformMixture,
                    },
                    assortative: p >= q,
                };
                params.validate()?;
                Ok(Instance::Sbm(params))
            }
            ModelKind::Cbm => {
                let n = need(m.n, "n")?;
                let d = need(m.d, "d")?;
                let params = CbmParams {
                    n,
                    d,
                    theta: need(m.theta, "theta")?,
                    alpha: resolve_alpha(m, n, d)?,
                };
                params.validate()?;
                let truth = Partition::from_sizes(&equal_sizes(n, 2))?;
                Ok(Instance::Cbm { params, truth })
            }
            ModelKind::Clique => Ok(Instance::Clique {
                n: need(m.n, "n")?,
                d: need(m.d, "d")?,
                s: need(m.s, "s")?,
            }),
            ModelKind::Subspace => {
                let mut params = SubspaceParams::new(
                    need(m.k, "k")?,
                    need(m.m, "m")?,
                    need(m.ell, "ell")?,
                    need(m.points_per_cluster, "points_per_cluster")?,
                    need(m.sigma, "sigma")?,
                );
                if let Some(d) = m.d {
                    params.d = d;
                }
                params.affine = m.affine;
                let n = params.n();
                let edges = match (m.budget, m.budget_multiple) {
                    (Some(b), _) => b,
                    (None, mult) => mult.unwrap_or(1.0) * sketch_budget(params.k, n, params.d),
                };
                params.sampling_rate = (edges / binomial(n, params.d)).min(1.0);
                params.validate()?;
                let tau = m.tau.unwrap_or_else(|| default_fitting_scale(params.sigma, params.d));
                Ok(Instance::Subspace { params, tau })
            }
        }
    }

    /// Number of clusters the algorithm should look for.
    pub fn k(&self) -> usize {
        match self {
            Instance::Sbm(p) => p.k(),
            Instance::Cbm { .. } | Instance::Clique { .. } => 2,
            Instance::Subspace { params, .. } => params.k,
        }
    }

    pub fn sample(&self, seed: u64) -> CliResult<(WeightedHypergraph, Partition)> {
        Ok(match self {
            Instance::Sbm(p) => sample_weighted_sbm(p, seed)?,
            Instance::Cbm { params, truth } => (sample_censored_bm(params, truth, seed)?, truth.clone()),
            Instance::Clique { n, d, s } => sample_planted_clique(*n, *d, *s, seed)?,
            Instance::Subspace { params, tau } => {
                let (cloud, truth) = sample_subspace_points(params, derive_seed(seed, &[0]))?;
                (sketch_hypergraph(&cloud, params, *tau, derive_seed(seed, &[1]))?, truth)
            }
        })
    }
}

pub fn hsc_config(a: &AlgorithmConfig, k: usize) -> HscConfig {
    HscConfig {
        k,
        c_thr: a.c_thr,
        restarts: a.restarts,
        eigen_mode: a.eigen_mode.into(),
        epsilon: a.epsilon,
    }
}

/// Runs the configured algorithm; returns the estimate and stage timings.
pub fn solve(
    h: &WeightedHypergraph,
    a: &AlgorithmConfig,
    k: usize,
    seed: u64,
) -> CliResult<(Partition, StageTimings)> {
    let hsc = hsc_config(a, k);
    Ok(match a.kind {
        AlgorithmKind::Hsc => {
            let out = hsc_detailed(h, &hsc, seed)?;
            (out.partition, out.timings)
        }
        AlgorithmKind::Hsclr => {
            let out = hsclr_detailed(h, &HsclrConfig { hsc, beta: a.beta }, seed)?;
            (out.partition, out.timings)
        }
        AlgorithmKind::HsclrMl => {
            let out = hsclr_ml_detailed(h, &hsc, seed)?;
            (out.partition, out.timings)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub error_fraction: f64,
    pub worst_cluster_error: f64,
}

impl Scores {
    pub fn exact(&self) -> bool {
        self.error_fraction == 0.0
    }
}

pub fn score(estimate: &Partition, truth: &Partition) -> CliResult<Scores> {
    Ok(Scores {
        error_fraction: error_fraction(estimate, truth)?.error_fraction,
        worst_cluster_error: hsc_core::worst_cluster_error(estimate, truth)?,
    })
}

/// Result of one trial. A failed trial keeps its message in `outcome`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub point: Vec<(String, f64)>,
    pub trial: usize,
    pub seed: u64,
    pub outcome: Result<Scores, String>,
    pub timings: StageTimings,
}

impl TrialReport {
    pub fn exact(&self) -> bool {
        matches!(&self.outcome, Ok(s) if s.exact())
    }

    pub fn error_fraction(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|s| s.error_fraction)
    }
}

/// `hash(base seed, grid point, trial)`.
pub fn trial_seed(base: u64, point: &[(String, f64)], trial: usize) -> u64 {
    let mut keys: Vec<u64> = point.iter().map(|(_, v)| v.to_bits()).collect();
    keys.push(trial as u64);
    derive_seed(base, &keys)
}

fn run_instance(
    instance: &Instance,
    algorithm: &AlgorithmConfig,
    seed: u64,
    reject_empty: bool,
) -> (Result<Scores, String>, StageTimings) {
    let run = || -> CliResult<(Scores, StageTimings)> {
        let t0 = Instant::now();
        let (h, truth) = instance.sample(derive_seed(seed, &[DATA_STREAM]))?;
        let sampling = t0.elapsed();
        if reject_empty && h.observed_count() == 0 {
            return Err(CliError::Runtime("no edges were sampled".into()));
        }
        let (estimate, mut timings) = solve(&h, algorithm, instance.k(), derive_seed(seed, &[ALGO_STREAM]))?;
        // the weights of a sketch are computed while sampling it
        if matches!(instance, Instance::Subspace { .. }) {
            timings.build += sampling;
        }
        Ok((score(&estimate, &truth)?, timings))
    };
    match run() {
        Ok((s, t)) => (Ok(s), t),
        Err(CliError::Config(m) | CliError::Runtime(m)) => (Err(m), StageTimings::default()),
    }
}

/// One trial of `cfg` at a grid point.
pub fn run_trial(cfg: &ExperimentConfig, point: &[(String, f64)], trial: usize) -> TrialReport {
    let seed = trial_seed(cfg.seed, point, trial);
    let (outcome, timings) = match cfg.at(point).and_then(|c| Ok((Instance::from_model(&c.model)?, c))) {
        Ok((instance, c)) => {
            let empty_is_error = matches!(instance, Instance::Subspace { .. });
            run_instance(&instance, &c.algorithm, seed, empty_is_error)
        }
        Err(CliError::Config(m) | CliError::Runtime(m)) => (Err(m), StageTimings::default()),
    };
    TrialReport {
        point: point.to_vec(),
        trial,
        seed,
        outcome,
        timings,
    }
}

/// Every trial at every grid point, run on up to `jobs` threads. Rows come
/// back ordered by grid point, then trial; failed trials are kept.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Vec<TrialReport>> {
    cfg.validate()?;
    // configuration mistakes at any grid point stop the sweep before it starts
    for point in cfg.grid() {
        Instance::from_model(&cfg.at(&point)?.model)?;
    }
    let tasks: Vec<(Vec<(String, f64)>, usize)> = cfg
        .grid()
        .into_iter()
        .flat_map(|pt| (0..cfg.trials).map(move |t| (pt.clone(), t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(pool.install(|| tasks.par_iter().map(|(pt, t)| run_trial(cfg, pt, *t)).collect()))
}

/// Samples points, sketches them into a hypergraph, runs spectral clustering
/// with refinement, and scores the result. An empty sketch is reported as a
/// failed trial.
pub fn run_subspace_pipeline(params: &SubspaceParams, cfg: &HsclrConfig, tau: f64, seed: u64) -> TrialReport {
    let algorithm = AlgorithmConfig {
        kind: AlgorithmKind::Hsclr,
        restarts: cfg.hsc.restarts,
        c_thr: cfg.hsc.c_thr,
        beta: cfg.beta,
        eigen_mode: match cfg.hsc.eigen_mode {
            hsc_core::EigenMode::Assortative => crate::config::EigenModeName::Assortative,
            hsc_core::EigenMode::Disassortative => crate::config::EigenModeName::Disassortative,
        },
        epsilon: cfg.hsc.epsilon,
    };
    let instance = Instance::Subspace {
        params: params.clone(),
        tau,
    };
    let (outcome, timings) = match params.validate() {
        Ok(()) => run_instance(&instance, &algorithm, seed, true),
        Err(e) => (Err(e.to_string()), StageTimings::default()),
    };
    TrialReport {
        point: Vec::new(),
        trial: 0,
        seed,
        outcome,
        timings,
    }
}
