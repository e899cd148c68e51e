//! Command-line interface.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsc_core::{
    ml_refine_cbm, parse_hypergraph, parse_partition, serialize_hypergraph, serialize_partition,
    Partition, WeightedHypergraph,
};

use crate::config::{
    AlgorithmConfig, AlgorithmKind, EigenModeName, ExperimentConfig, ModelConfig, ModelKind,
};
use crate::error::{CliError, CliResult};
use crate::experiment::{run_sweep, score, solve, Instance};
use crate::report::{summarize, summary_csv, trials_csv};

#[derive(Debug, Parser)]
#[command(name = "hsc", version, about = "Hypergraph spectral clustering experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EigenModeArg {
    Assortative,
    Disassortative,
}

impl From<EigenModeArg> for EigenModeName {
    fn from(m: EigenModeArg) -> Self {
        match m {
            EigenModeArg::Assortative => EigenModeName::Assortative,
            EigenModeArg::Disassortative => EigenModeName::Disassortative,
        }
    }
}

/// Options shared by every command that runs the clustering pipeline.
#[derive(Debug, Clone, Default, Args)]
pub struct AlgorithmArgs {
    /// Trimming constant (default depends on the edge size)
    #[arg(long)]
    pub c_thr: Option<f64>,
    /// Edge-splitting probability for refinement
    #[arg(long)]
    pub beta: Option<f64>,
    /// k-means restarts
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, value_enum)]
    pub eigen_mode: Option<EigenModeArg>,
    /// Relative k-means improvement below which Lloyd iterations stop
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl AlgorithmArgs {
    fn config(&self, kind: AlgorithmKind) -> AlgorithmConfig {
        AlgorithmConfig {
            kind,
            restarts: self.restarts.unwrap_or(10),
            c_thr: self.c_thr,
            beta: self.beta,
            eigen_mode: self.eigen_mode.map(Into::into).unwrap_or_default(),
            epsilon: self.epsilon.unwrap_or(1e-6),
        }
    }

    fn overrides(&self) -> Vec<String> {
        let mut o = Vec::new();
        if let Some(v) = self.c_thr {
            o.push(format!("algorithm.c_thr={v:?}"));
        }
        if let Some(v) = self.beta {
            o.push(format!("algorithm.beta={v:?}"));
        }
        if let Some(v) = self.restarts {
            o.push(format!("algorithm.restarts={v}"));
        }
        if let Some(v) = self.eigen_mode {
            let name = match v {
                EigenModeArg::Assortative => "assortative",
                EigenModeArg::Disassortative => "disassortative",
            };
            o.push(format!("algorithm.eigen_mode=\"{name}\""));
        }
        if let Some(v) = self.epsilon {
            o.push(format!("algorithm.epsilon={v:?}"));
        }
        o
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a model into an edge-list file and a ground-truth partition file
    Generate {
        /// Experiment config; only the model section and seed are used
        config: PathBuf,
        /// Override a config value, e.g. `model.n=200`
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output prefix; writes PREFIX.hg and PREFIX.part
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral clustering of an edge-list file
    Hsc(SolveArgs),
    /// Spectral clustering followed by refinement on held-out edges
    Hsclr(SolveArgs),
    /// Likelihood refinement for the censored block model
    CbmRefine {
        #[command(flatten)]
        solve: SolveArgs,
        /// Refine this partition instead of a spectral estimate
        #[arg(long)]
        init: Option<PathBuf>,
    },
    /// Compare an estimated partition with the ground truth
    Score { estimate: PathBuf, truth: PathBuf },
    /// Run a parameter sweep from a config file
    Sweep {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        algorithm: AlgorithmArgs,
    },
    /// Subspace clustering through hypergraph sketches
    Subspace {
        #[arg(long)]
        k: usize,
        /// Subspace dimension
        #[arg(long)]
        m: usize,
        /// Ambient dimension
        #[arg(long)]
        ell: usize,
        /// Points per subspace (comma-separated values sweep)
        #[arg(long, value_delimiter = ',', required = true)]
        points_per_cluster: Vec<usize>,
        /// Noise level (comma-separated values sweep)
        #[arg(long, value_delimiter = ',', required = true)]
        sigma: Vec<f64>,
        /// Edge size (default m + 2)
        #[arg(long)]
        d: Option<usize>,
        /// Expected number of sketched edges (default 5 k^(d-1) n ln n / d)
        #[arg(long)]
        budget: Option<f64>,
        /// Fitting-error scale of the edge weights
        #[arg(long)]
        tau: Option<f64>,
        /// Use affine flats instead of linear subspaces
        #[arg(long)]
        affine: bool,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        algorithm: AlgorithmArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Edge-list file
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output partition file (stdout if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub algorithm: AlgorithmArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Trial CSV (stdout if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-grid-point summary CSV (stderr if absent)
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn read_hypergraph(path: &Path) -> CliResult<WeightedHypergraph> {
    let f = fs::File::open(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    parse_hypergraph(BufReader::new(f))
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn read_partition(path: &Path, k: Option<usize>) -> CliResult<Partition> {
    let f = fs::File::open(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    parse_partition(BufReader::new(f), k)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn solve_file(args: &SolveArgs, kind: AlgorithmKind) -> CliResult<()> {
    let h = read_hypergraph(&args.input)?;
    let (phi, _) = solve(&h, &args.algorithm.config(kind), args.k, args.seed)?;
    emit(args.out.as_deref(), &serialize_partition(&phi))
}

fn sweep(cfg: ExperimentConfig, run: &RunArgs) -> CliResult<()> {
    let reports = run_sweep(&cfg, run.jobs)?;
    let hash = cfg.hash();
    emit(run.out.as_deref(), &trials_csv(&hash, &reports))?;
    let summary = summary_csv(&hash, &summarize(&reports));
    match &run.summary {
        Some(p) => emit(Some(p), &summary),
        None => {
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn run_overrides(run: &RunArgs) -> Vec<String> {
    let mut o = Vec::new();
    if let Some(s) = run.seed {
        o.push(format!("seed={s}"));
    }
    if let Some(t) = run.trials {
        o.push(format!("trials={t}"));
    }
    o
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate {
            config,
            set,
            seed,
            out,
        } => {
            let mut overrides = set;
            if let Some(s) = seed {
                overrides.push(format!("seed={s}"));
            }
            let cfg = ExperimentConfig::from_toml_with(&read_text(&config)?, &overrides)?;
            let instance = Instance::from_model(&cfg.model)?;
            let (h, truth) = instance.sample(cfg.seed)?;
            emit(Some(&with_suffix(&out, ".hg")), &serialize_hypergraph(&h))?;
            emit(Some(&with_suffix(&out, ".part")), &serialize_partition(&truth))
        }
        Command::Hsc(args) => solve_file(&args, AlgorithmKind::Hsc),
        Command::Hsclr(args) => solve_file(&args, AlgorithmKind::Hsclr),
        Command::CbmRefine { solve: args, init } => match init {
            None => solve_file(&args, AlgorithmKind::HsclrMl),
            Some(p) => {
                let h = read_hypergraph(&args.input)?;
                let x = read_partition(&p, Some(2))?;
                let refined = ml_refine_cbm(&h, &x)?;
                emit(args.out.as_deref(), &serialize_partition(&refined))
            }
        },
        Command::Score { estimate, truth } => {
            let psi = read_partition(&truth, None)?;
            let phi = read_partition(&estimate, None)?;
            let s = score(&phi, &psi)?;
            emit(
                None,
                &format!("{},{},{}\n", s.error_fraction, s.worst_cluster_error, s.exact()),
            )
        }
        Command::Sweep {
            config,
            set,
            run,
            algorithm,
        } => {
            let mut overrides = set;
            overrides.extend(run_overrides(&run));
            overrides.extend(algorithm.overrides());
            let cfg = ExperimentConfig::from_toml_with(&read_text(&config)?, &overrides)?;
            sweep(cfg, &run)
        }
        Command::Subspace {
            k,
            m,
            ell,
            points_per_cluster,
            sigma,
            d,
            budget,
            tau,
            affine,
            run,
            algorithm,
        } => {
            let mut axes = std::collections::BTreeMap::new();
            if points_per_cluster.len() > 1 {
                axes.insert(
                    "points_per_cluster".to_string(),
                    points_per_cluster.iter().map(|&v| v as f64).collect(),
                );
            }
            if sigma.len() > 1 {
                axes.insert("sigma".to_string(), sigma.clone());
            }
            let cfg = ExperimentConfig {
                seed: run.seed.unwrap_or(0),
                trials: run.trials.unwrap_or(20),
                model: ModelConfig {
                    kind: ModelKind::Subspace,
                    n: None,
                    d,
                    k: Some(k),
                    sizes: None,
                    p: None,
                    q: None,
                    alpha: None,
                    c: None,
                    c_linear: None,
                    weights: Default::default(),
                    theta: None,
                    limit_multiple: None,
                    s: None,
                    m: Some(m),
                    ell: Some(ell),
                    points_per_cluster: Some(points_per_cluster[0]),
                    sigma: Some(sigma[0]),
                    budget_multiple: None,
                    budget,
                    tau,
                    affine,
                },
                algorithm: algorithm.config(AlgorithmKind::Hsclr),
                sweep: axes,
            };
            cfg.validate()?;
            sweep(cfg, &run)
        }
    }
}
