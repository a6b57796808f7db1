use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mevdro::adversary::RobustificationMode;
use mevdro::Norm;
use serde::Deserialize;

use crate::Merge;

macro_rules! merge_fields {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            fn merge(self, file: Self) -> Self {
                Self { config: self.config, $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Parser)]
#[command(name = "mevdro", version, about = "Distributionally robust multivariate extreme-value risk")]
pub struct Cli {
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic max-stable dataset or point-process configurations.
    Gen(GenArgs),
    /// Evaluate a robust CDF, rare-set probability, expected count or CVaR.
    Robust(RobustArgs),
    /// Error-versus-budget sweep over robustification modes.
    Sweep(SweepArgs),
    /// Average per-company returns by industry and take block maxima.
    Ingest(IngestArgs),
    /// Run the adversarial min-max training loop and write its trace.
    Train(TrainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenModel {
    /// Symmetric logistic mixture (α = 0.1 w.p. 0.1, α = 0.9 otherwise).
    SlMixture,
    /// Asymmetric logistic mixture sharing one random asymmetry point.
    AslMixture,
    /// Symmetric logistic with `--dependence`.
    Sl,
    /// Power-set asymmetric logistic with random weights and `--dependence`.
    Asl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenFormat {
    /// `dim_1,…,dim_d` max-stable samples.
    Samples,
    /// `replication,n,a,y_1,…,y_d` truncated point-process realizations.
    Configurations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Cdf,
    RareSet,
    Count,
    Cvar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticDataset {
    SlMixture,
    AslMixture,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Dependence model [default: sl-mixture].
    #[arg(long, value_enum)]
    pub model: Option<GenModel>,
    /// Dependence model as JSON (overrides --model).
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Number of samples or configurations [default: 10000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension [default: 2].
    #[arg(long)]
    pub d: Option<usize>,
    /// Dependence parameter α for `sl` / `asl` [default: 0.5].
    #[arg(long)]
    pub dependence: Option<f64>,
    /// Output format [default: samples].
    #[arg(long, value_enum)]
    pub format: Option<GenFormat>,
    /// Atoms per configuration [default: 200].
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
}
merge_fields!(GenArgs { model, model_file, n, d, dependence, format, atoms, seed, output });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Functional to robustify [default: cdf].
    #[arg(long, value_enum)]
    pub functional: Option<Functional>,
    /// Configurations CSV (otherwise configurations are sampled from the model).
    #[arg(long)]
    pub configurations: Option<PathBuf>,
    /// Model used when no configurations file is given [default: sl].
    #[arg(long, value_enum)]
    pub model: Option<GenModel>,
    /// Dependence model as JSON (overrides --model).
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Dimension for --model [default: 2].
    #[arg(long)]
    pub d: Option<usize>,
    /// Dependence parameter α for `sl` / `asl` [default: 0.5].
    #[arg(long)]
    pub dependence: Option<f64>,
    /// Monte Carlo replications [default: 10000].
    #[arg(long)]
    pub replications: Option<usize>,
    /// Atoms per configuration [default: 200].
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Wasserstein budget δ [default: 0].
    #[arg(long)]
    pub delta: Option<f64>,
    /// CVaR level [default: 0.95].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// CDF evaluation vector x, comma separated (the CDF is taken at 1/x) [default: all ones].
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    /// Rare set: `box:l1,l2;u1,u2`, `orthant:l1,l2`, `exceed:t1,t2` or `halfspace:a1,a2;b`.
    #[arg(long)]
    pub set: Option<String>,
    /// Transport norm: l1, l2 or linf [default: l2].
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSON path [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
}
merge_fields!(RobustArgs {
    functional, configurations, model, model_file, d, dependence, replications, atoms, delta,
    alpha, x, set, norm, seed, output
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Synthetic dataset [default: sl-mixture unless --data is given].
    #[arg(long, value_enum)]
    pub dataset: Option<SyntheticDataset>,
    /// Samples CSV to use instead of a synthetic dataset.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Held-out samples CSV defining the true risk (required with --data).
    #[arg(long)]
    pub holdout: Option<PathBuf>,
    /// Base model JSON [default: symmetric logistic fitted to the data].
    #[arg(long)]
    pub base_model: Option<PathBuf>,
    /// Synthetic dataset size [default: 10000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Synthetic dataset dimension [default: 2].
    #[arg(long)]
    pub d: Option<usize>,
    /// Modes, comma separated [default: all three].
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<RobustificationMode>>,
    /// Explicit budget grid, comma separated (overrides the geometric grid).
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Geometric grid lower end [default: 0.001].
    #[arg(long)]
    pub delta_min: Option<f64>,
    /// Geometric grid upper end [default: 10].
    #[arg(long)]
    pub delta_max: Option<f64>,
    /// Geometric grid size [default: 12].
    #[arg(long)]
    pub delta_points: Option<usize>,
    /// Training iterations K [default: 2000].
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Training batch size [default: 256].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Evaluation batch size [default: 512].
    #[arg(long)]
    pub eval_batch_size: Option<usize>,
    /// Adversary mixture components [default: 8].
    #[arg(long)]
    pub components: Option<usize>,
    /// Loss truncation level α [default: 0.95].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Transport norm [default: l2].
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Atoms per configuration [default: 200].
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Monte Carlo size of the synthetic true risk [default: 1000000].
    #[arg(long)]
    pub truth_samples: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
}
merge_fields!(SweepArgs {
    dataset, data, holdout, base_model, n, d, modes, deltas, delta_min, delta_max, delta_points,
    iterations, batch_size, eval_batch_size, components, alpha, norm, atoms, truth_samples, seed,
    output
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Returns CSV with header `date,company,industry,return`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Block length: weekly, annual or a number of periods [default: weekly].
    #[arg(long)]
    pub block: Option<String>,
    /// Write the industry-average table here.
    #[arg(long)]
    pub table_output: Option<PathBuf>,
    /// Block maxima CSV path [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Rank-transform the block maxima to unit Fréchet margins.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub standardize: Option<bool>,
}
merge_fields!(IngestArgs { input, block, table_output, output, standardize });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Synthetic dataset [default: sl-mixture unless --data is given].
    #[arg(long, value_enum)]
    pub dataset: Option<SyntheticDataset>,
    /// Samples CSV to use instead of a synthetic dataset.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Base model JSON [default: symmetric logistic fitted to the data].
    #[arg(long)]
    pub base_model: Option<PathBuf>,
    /// Synthetic dataset size [default: 10000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Synthetic dataset dimension [default: 2].
    #[arg(long)]
    pub d: Option<usize>,
    /// Robustification mode [default: evt-constrained].
    #[arg(long)]
    pub mode: Option<RobustificationMode>,
    /// Wasserstein budget δ [default: 0.1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Training iterations K [default: 2000].
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Training batch size [default: 256].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Evaluation batch size [default: 512].
    #[arg(long)]
    pub eval_batch_size: Option<usize>,
    /// Adversary mixture components [default: 8].
    #[arg(long)]
    pub components: Option<usize>,
    /// Loss truncation level α [default: 0.95].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Transport norm [default: l2].
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Atoms per configuration [default: 200].
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trace CSV (`k,lambda,R,risk`) path [default: stdout].
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the fitted adversary parameters as JSON here.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Write the final risk summary as JSON here [default: stderr].
    #[arg(long)]
    pub summary: Option<PathBuf>,
}
merge_fields!(TrainArgs {
    dataset, data, base_model, n, d, mode, delta, iterations, batch_size, eval_batch_size,
    components, alpha, norm, atoms, seed, trace, family, summary
});
