use std::fs::File;
use std::io::{self as stdio, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use mevdro::adversary::{run_dro_training, RobustificationMode, TrainConfig, TruncatedL1Loss};
use mevdro::duals::{
    robust_cdf, robust_cvar, robust_expected_count, robust_rare_set_probability, RareSet,
    RobustificationConfig,
};
use mevdro::evt::{sample_max_stable_labeled, AsymmetricLogistic, DependenceModel};
use mevdro::experiments::{
    block_maxima, error_vs_delta_sweep, fit_symmetric_logistic, gen_mixture_dataset,
    geometric_grid, industry_average, random_asymmetry_weights, standardize_frechet, BlockLength,
    MixtureSpec, SweepConfig, TrueRiskSource,
};
use mevdro::io;
use mevdro::point_process::{sample_configurations, Truncation};
use mevdro::rng::{derive_seed, seeded};
use mevdro::Norm;
use serde::Serialize;

use crate::args::{
    Functional, GenArgs, GenFormat, GenModel, IngestArgs, RobustArgs, SweepArgs, SyntheticDataset,
    TrainArgs,
};
use crate::{resolve, Status};

const DATA_STREAM: u64 = 1;
const TRUTH_STREAM: u64 = 2;
const MODEL_STREAM: u64 = 3;

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(stdio::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn read_model(path: &Path) -> Result<DependenceModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DependenceModel::from_json(&text).with_context(|| format!("parsing model {}", path.display()))
}

fn read_samples(path: &Path) -> Result<Vec<Vec<f64>>> {
    io::read_samples(open(path)?).with_context(|| format!("reading samples {}", path.display()))
}

fn check_positive(name: &str, v: usize) -> Result<()> {
    ensure!(v > 0, "--{name} must be positive");
    Ok(())
}

fn build_model(
    model: GenModel,
    file: Option<&Path>,
    d: usize,
    dependence: f64,
    seed: u64,
) -> Result<DependenceModel> {
    if let Some(path) = file {
        return read_model(path);
    }
    check_positive("d", d)?;
    let weight_seed = derive_seed(seed, &[MODEL_STREAM]);
    Ok(match model {
        GenModel::SlMixture => MixtureSpec::symmetric(d)?.to_model()?,
        GenModel::AslMixture => MixtureSpec::asymmetric(d, weight_seed)?.to_model()?,
        GenModel::Sl => DependenceModel::symmetric(d, dependence)?,
        GenModel::Asl => {
            let weights = random_asymmetry_weights(&mut seeded(weight_seed), d)?;
            DependenceModel::asymmetric(AsymmetricLogistic::power_set(d, dependence, &weights)?)?
        }
    })
}

pub fn gen(args: GenArgs) -> Result<Status> {
    let a = resolve(args.clone(), args.config.as_deref())?;
    let (n, d, seed) = (a.n.unwrap_or(10_000), a.d.unwrap_or(2), a.seed.unwrap_or(0));
    let atoms = a.atoms.unwrap_or(200);
    check_positive("n", n)?;
    check_positive("atoms", atoms)?;
    let model = build_model(
        a.model.unwrap_or(GenModel::SlMixture),
        a.model_file.as_deref(),
        d,
        a.dependence.unwrap_or(0.5),
        seed,
    )?;
    let d = model.dim();
    let mut out = sink(a.output.as_deref())?;
    match a.format.unwrap_or(GenFormat::Samples) {
        GenFormat::Samples => {
            let (xs, labels) = sample_max_stable_labeled(&mut seeded(seed), &model, n, d)?;
            let rows: Vec<Vec<f64>> = xs.into_iter().map(|x| x.into_vec()).collect();
            io::write_samples(&mut out, &rows, d)?;
            let mut counts = vec![0usize; model.components().len()];
            for l in labels {
                counts[l] += 1;
            }
            eprintln!("n={n} d={d} component_counts={counts:?}");
        }
        GenFormat::Configurations => {
            let cfgs = sample_configurations(seed, &model, n, Truncation::atoms(atoms))?;
            io::write_configurations(&mut out, &cfgs)?;
            eprintln!("n={n} d={d} atoms<={atoms}");
        }
    }
    out.flush()?;
    Ok(Status::Success)
}

pub fn robust(args: RobustArgs) -> Result<Status> {
    let a = resolve(args.clone(), args.config.as_deref())?;
    let functional = a.functional.unwrap_or(Functional::Cdf);
    let config = RobustificationConfig {
        delta: a.delta.unwrap_or(0.0),
        alpha_level: a.alpha.unwrap_or(0.95),
        norm: a.norm.unwrap_or(Norm::L2),
        truncation: Truncation::atoms(a.atoms.unwrap_or(200)),
        mc_replications: a.replications.unwrap_or(10_000),
        seed: a.seed.unwrap_or(0),
    };
    config.validate()?;
    let set = match (functional, &a.set) {
        (Functional::RareSet | Functional::Count, None) => bail!("--set is required for {functional:?}"),
        (_, Some(s)) => Some(s.parse::<RareSet>()?),
        _ => None,
    };
    let configurations = match &a.configurations {
        Some(path) => io::read_configurations(open(path)?)
            .with_context(|| format!("reading configurations {}", path.display()))?,
        None => {
            let model = build_model(
                a.model.unwrap_or(GenModel::Sl),
                a.model_file.as_deref(),
                a.d.unwrap_or(2),
                a.dependence.unwrap_or(0.5),
                config.seed,
            )?;
            sample_configurations(config.seed, &model, config.mc_replications, config.truncation)?
        }
    };
    ensure!(!configurations.is_empty(), "no configurations to evaluate");
    let dim = configurations[0].dim();
    let result = match functional {
        Functional::Cdf => {
            let x = a.x.clone().unwrap_or_else(|| vec![1.0; dim]);
            robust_cdf(&configurations, &x, config.delta)?
        }
        Functional::RareSet => {
            robust_rare_set_probability(&configurations, set.as_ref().unwrap(), config.norm, config.delta)?
        }
        Functional::Count => {
            robust_expected_count(&configurations, set.as_ref().unwrap(), config.norm, config.delta)?
        }
        Functional::Cvar => robust_cvar(&configurations, config.delta, config.alpha_level)?,
    };
    let mut out = sink(a.output.as_deref())?;
    writeln!(out, "{}", result.to_json())?;
    out.flush()?;
    Ok(if result.converged { Status::Success } else { Status::SolverFlag })
}

struct Inputs {
    data: Vec<Vec<f64>>,
    base: DependenceModel,
    truth: Option<TrueRiskSource>,
}

#[allow(clippy::too_many_arguments)]
fn load_inputs(
    dataset: Option<SyntheticDataset>,
    data: Option<&PathBuf>,
    holdout: Option<&PathBuf>,
    base_model: Option<&PathBuf>,
    n: usize,
    d: usize,
    truth_samples: usize,
    seed: u64,
) -> Result<Inputs> {
    let (data, truth) = match (data, dataset) {
        (Some(_), Some(_)) => bail!("--data and --dataset are mutually exclusive"),
        (Some(path), None) => {
            let truth = holdout.map(|h| read_samples(h).map(TrueRiskSource::Samples)).transpose()?;
            (read_samples(path)?, truth)
        }
        (None, dataset) => {
            check_positive("n", n)?;
            check_positive("d", d)?;
            let spec = match dataset.unwrap_or(SyntheticDataset::SlMixture) {
                SyntheticDataset::SlMixture => MixtureSpec::symmetric(d)?,
                SyntheticDataset::AslMixture => {
                    MixtureSpec::asymmetric(d, derive_seed(seed, &[MODEL_STREAM]))?
                }
            };
            let (xs, _) =
                gen_mixture_dataset(&mut seeded(derive_seed(seed, &[DATA_STREAM])), &spec, n)?;
            let truth = TrueRiskSource::Model {
                model: spec.to_model()?,
                samples: truth_samples,
                seed: derive_seed(seed, &[TRUTH_STREAM]),
            };
            (xs.into_iter().map(|x| x.into_vec()).collect(), Some(truth))
        }
    };
    ensure!(!data.is_empty(), "dataset is empty");
    let base = match base_model {
        Some(p) => read_model(p)?,
        None => fit_symmetric_logistic(&data)?,
    };
    Ok(Inputs { data, base, truth })
}

fn train_config(
    iterations: Option<usize>,
    batch_size: Option<usize>,
    eval_batch_size: Option<usize>,
    components: Option<usize>,
) -> TrainConfig {
    let d = TrainConfig::default();
    TrainConfig {
        iterations: iterations.unwrap_or(d.iterations),
        batch_size: batch_size.unwrap_or(d.batch_size),
        eval_batch_size: eval_batch_size.unwrap_or(d.eval_batch_size),
        components: components.unwrap_or(d.components),
        ..d
    }
}

pub fn sweep(args: SweepArgs) -> Result<Status> {
    let a = resolve(args.clone(), args.config.as_deref())?;
    let seed = a.seed.unwrap_or(0);
    let delta_grid = match &a.deltas {
        Some(g) => g.clone(),
        None => geometric_grid(
            a.delta_min.unwrap_or(1e-3),
            a.delta_max.unwrap_or(10.0),
            a.delta_points.unwrap_or(12),
        )?,
    };
    ensure!(!delta_grid.is_empty(), "empty budget grid");
    ensure!(delta_grid.iter().all(|d| *d >= 0.0 && d.is_finite()), "budgets must be finite and >= 0");
    let config = SweepConfig {
        modes: a.modes.clone().unwrap_or_else(|| RobustificationMode::ALL.to_vec()),
        delta_grid,
        robust: RobustificationConfig {
            alpha_level: a.alpha.unwrap_or(0.95),
            norm: a.norm.unwrap_or(Norm::L2),
            truncation: Truncation::atoms(a.atoms.unwrap_or(200)),
            seed,
            ..RobustificationConfig::default()
        },
        train: train_config(a.iterations, a.batch_size, a.eval_batch_size, a.components),
    };
    ensure!(!config.modes.is_empty(), "no modes selected");
    config.robust.validate()?;
    config.train.validate()?;
    if a.data.is_some() && a.holdout.is_none() {
        bail!("--holdout is required with --data");
    }
    let inputs = load_inputs(
        a.dataset,
        a.data.as_ref(),
        a.holdout.as_ref(),
        a.base_model.as_ref(),
        a.n.unwrap_or(10_000),
        a.d.unwrap_or(2),
        a.truth_samples.unwrap_or(1_000_000),
        seed,
    )?;
    let truth = inputs.truth.expect("checked above");
    let records = error_vs_delta_sweep(&inputs.data, &inputs.base, &truth, &config)?;
    let mut flagged = false;
    for r in &records {
        eprintln!(
            "delta={:e} mode={} robust_risk={:e} true_risk={:e}{}",
            r.delta,
            r.mode,
            r.robust_risk,
            r.true_risk,
            if r.converged { "" } else { " (not converged)" }
        );
        flagged |= !r.converged;
    }
    let mut out = sink(a.output.as_deref())?;
    io::write_sweep(&mut out, &records)?;
    out.flush()?;
    Ok(if flagged { Status::SolverFlag } else { Status::Success })
}

pub fn ingest(args: IngestArgs) -> Result<Status> {
    let a = resolve(args.clone(), args.config.as_deref())?;
    let input = a.input.as_ref().context("--input is required")?;
    let block: BlockLength = a.block.as_deref().unwrap_or("weekly").parse()?;
    let records = io::read_returns(open(input)?)
        .with_context(|| format!("reading returns {}", input.display()))?;
    let table = industry_average(&records)?;
    if table.dropped_rows > 0 {
        eprintln!("dropped {} periods with missing industries", table.dropped_rows);
    }
    if let Some(path) = &a.table_output {
        let mut out = sink(Some(path))?;
        io::write_table(&mut out, &table)?;
        out.flush()?;
    }
    let mut maxima = block_maxima(&table, block.periods())?;
    if a.standardize.unwrap_or(false) {
        maxima = standardize_frechet(&maxima)?;
    }
    let mut out = sink(a.output.as_deref())?;
    io::write_table(&mut out, &maxima)?;
    out.flush()?;
    eprintln!("periods={} industries={} blocks={}", table.len(), table.dim(), maxima.len());
    Ok(Status::Success)
}

#[derive(Serialize)]
struct TrainSummary {
    mode: RobustificationMode,
    delta: f64,
    risk: f64,
    lambda_star: f64,
    baseline_risk: f64,
    converged: bool,
    flagged_steps: usize,
}

pub fn train(args: TrainArgs) -> Result<Status> {
    let a = resolve(args.clone(), args.config.as_deref())?;
    let seed = a.seed.unwrap_or(0);
    let alpha = a.alpha.unwrap_or(0.95);
    let config = RobustificationConfig {
        delta: a.delta.unwrap_or(0.1),
        alpha_level: alpha,
        norm: a.norm.unwrap_or(Norm::L2),
        truncation: Truncation::atoms(a.atoms.unwrap_or(200)),
        seed,
        ..RobustificationConfig::default()
    };
    config.validate()?;
    let train = train_config(a.iterations, a.batch_size, a.eval_batch_size, a.components);
    train.validate()?;
    let mode = a.mode.unwrap_or(RobustificationMode::EvtConstrained);
    let inputs = load_inputs(
        a.dataset,
        a.data.as_ref(),
        None,
        a.base_model.as_ref(),
        a.n.unwrap_or(10_000),
        a.d.unwrap_or(2),
        0,
        seed,
    )?;
    let loss = TruncatedL1Loss::fit(&inputs.data, alpha)?;
    let outcome = run_dro_training(&inputs.base, &loss, mode, &config, &train)?;
    let mut out = sink(a.trace.as_deref())?;
    io::write_trace(&mut out, &outcome.trace)?;
    out.flush()?;
    if let Some(path) = &a.family {
        std::fs::write(path, outcome.family.to_json() + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = serde_json::to_string(&TrainSummary {
        mode,
        delta: config.delta,
        risk: outcome.risk,
        lambda_star: outcome.lambda_star,
        baseline_risk: outcome.baseline_risk,
        converged: outcome.converged,
        flagged_steps: outcome.flagged_steps,
    })?;
    match &a.summary {
        Some(path) => std::fs::write(path, summary + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => eprintln!("{summary}"),
    }
    Ok(if outcome.converged && outcome.flagged_steps == 0 { Status::Success } else { Status::SolverFlag })
}
