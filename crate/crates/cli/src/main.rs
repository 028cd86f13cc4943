//! `polyraman` command-line entry point.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error, 3 internal error.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use polyraman::augment::generate_augmented;
use polyraman::config::{preset, DataConfig, ExperimentConfig};
use polyraman::dataset::{assemble_train_test, load_library, parse_spectrum_csv, PolymerType, Source};
use polyraman::eval::{run_experiment, write_outputs, ExperimentData};
use polyraman::persist::SavedModel;
use polyraman::preprocess::{build_features, scale_x};
use polyraman::seed::{derive_seed, stream};
use polyraman::synthetic::write_synthetic_libraries;
use polyraman::Error;

#[derive(Parser)]
#[command(name = "polyraman", version, about = "Raman microplastic classification pipeline")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the three libraries and print per-type counts.
    Ingest {
        #[arg(long)]
        slopp: PathBuf,
        #[arg(long)]
        sloppe: PathBuf,
        #[arg(long)]
        mendeley: PathBuf,
        /// Write every accepted and rejected file as JSON lines.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the ensemble size.
        #[arg(long)]
        seeds: Option<usize>,
        /// Output directory (default: the config's `output_dir`, else `runs/<experiment>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify one spectrum CSV with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Export the train and test feature matrices of a config as CSV.
    Features {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a bundled preset config. Relative library paths are resolved
    /// against the current directory.
    Preset {
        /// One of the bundled preset names.
        name: String,
        #[arg(long)]
        slopp: PathBuf,
        #[arg(long)]
        sloppe: PathBuf,
        #[arg(long)]
        mendeley: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write synthetic libraries with the published label counts.
    DemoData {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidInput(_) => 1,
        Error::Format { .. }
        | Error::Io { .. }
        | Error::MissingDirectory(_)
        | Error::Data(_)
        | Error::WidthMismatch { .. }
        | Error::ModelVersion { .. } => 2,
        Error::Serde(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(command: Command) -> polyraman::Result<()> {
    match command {
        Command::Ingest {
            slopp,
            sloppe,
            mendeley,
            report,
        } => ingest(&slopp, &sloppe, &mendeley, report.as_deref()),
        Command::Run {
            config,
            seed,
            seeds,
            out,
        } => run(&config, seed, seeds, out),
        Command::Predict { model, spectrum, json } => predict(&model, &spectrum, json),
        Command::Features { config, seed, out } => features(&config, seed, &out),
        Command::Preset {
            name,
            slopp,
            sloppe,
            mendeley,
            seed,
            seeds,
            out,
        } => {
            let data = DataConfig {
                slopp: absolute(slopp)?,
                sloppe: absolute(sloppe)?,
                mendeley: absolute(mendeley)?,
                synonyms: Default::default(),
            };
            let cfg = preset(&name, data, seed, seeds)?;
            std::fs::write(&out, cfg.to_toml_string()?).map_err(|e| io_err(&out, e))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::DemoData { out, seed } => {
            let libs = write_synthetic_libraries(&out, seed)?;
            println!("slopp    {}", libs.slopp.display());
            println!("sloppe   {}", libs.sloppe.display());
            println!("mendeley {}", libs.mendeley.display());
            Ok(())
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn absolute(path: PathBuf) -> polyraman::Result<PathBuf> {
    if path.is_absolute() {
        return Ok(path);
    }
    Ok(std::env::current_dir().map_err(|e| io_err(&path, e))?.join(path))
}

fn ingest(slopp: &Path, sloppe: &Path, mendeley: &Path, report: Option<&Path>) -> polyraman::Result<()> {
    let table = Default::default();
    let (a, ra) = load_library(slopp, Source::Slopp, &table)?;
    let (b, rb) = load_library(sloppe, Source::SloppE, &table)?;
    let (c, rc) = load_library(mendeley, Source::Mendeley, &table)?;
    let vocabulary = a.vocabulary();

    let (sa, sb, sc) = (a.counts(), b.counts(), c.counts());
    let cell = |m: &std::collections::BTreeMap<PolymerType, usize>, t| {
        m.get(&t).map_or("-".to_string(), |n| n.to_string())
    };
    println!("{:<34} {:>6} {:>8} {:>9}", "polymer type", "SLoPP", "SLoPP-E", "Mendeley");
    for &t in &vocabulary {
        println!("{:<34} {:>6} {:>8} {:>9}", t.name(), cell(&sa, t), cell(&sb, t), cell(&sc, t));
    }
    for r in [&ra, &rb, &rc] {
        println!("{}: {} accepted, {} rejected", r.source, r.accepted, r.rejected.len());
    }
    let (train, test) = assemble_train_test(&a, &c, &b)?;
    println!("train {}  test {}", train.len(), test.len());

    if let Some(path) = report {
        let f = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(f);
        for r in [&ra, &rb, &rc] {
            r.write_jsonl(&mut w).map_err(|e| io_err(path, e))?;
        }
    }
    Ok(())
}

fn load_config(path: &Path, seed: Option<u64>, seeds: Option<usize>) -> polyraman::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = seeds {
        cfg.seeds = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(config: &Path, seed: Option<u64>, seeds: Option<usize>, out: Option<PathBuf>) -> polyraman::Result<()> {
    let cfg = load_config(config, seed, seeds)?;
    let out = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.experiment.name()));
    let out = absolute(out)?;

    let (data, _) = ExperimentData::load(&cfg.data)?;
    info!("train {} / test {}", data.train.len(), data.test.len());
    let outcome = run_experiment(&cfg, &data)?;
    write_outputs(&outcome, &out)?;

    println!("experiment {}  seeds {}", cfg.experiment.name(), cfg.seeds);
    println!("{:<16} {:>9} {:>8}  description", outcome.parameter, "accuracy", "std");
    for p in &outcome.points {
        println!(
            "{:<16} {:>8.2}% {:>7.2}   {}",
            p.key,
            100.0 * p.mean_accuracy,
            100.0 * p.std_accuracy,
            p.description
        );
    }
    if let Some(best) = outcome.best().filter(|_| outcome.points.len() > 1) {
        println!("best: {} at {:.2}%", best.key, 100.0 * best.mean_accuracy);
    }
    println!("outputs in {}", out.display());
    Ok(())
}

fn predict(model: &Path, spectrum: &Path, json: bool) -> polyraman::Result<()> {
    let saved = SavedModel::load(model)?;
    let f = File::open(spectrum).map_err(|e| io_err(spectrum, e))?;
    let s = parse_spectrum_csv(BufReader::new(f))?;
    let p = saved.predict_spectrum(&s)?;
    if json {
        println!("{}", serde_json::to_string(&p).map_err(|e| Error::Serde(e.to_string()))?);
        return Ok(());
    }
    println!("{}", p.polymer);
    let mut votes = p.votes.clone();
    votes.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (class, v) in votes.iter().filter(|(_, v)| *v > 0.0) {
        println!("  {:<34} {:.4}", class.name(), v);
    }
    Ok(())
}

fn features(config: &Path, seed: Option<u64>, out: &Path) -> polyraman::Result<()> {
    let cfg = load_config(config, seed, None)?;
    let (data, _) = ExperimentData::load(&cfg.data)?;
    let p = &cfg.pipeline;
    let mut train = if p.scale_x {
        data.train
            .try_map_spectra(|s| Ok(scale_x(&s.spectrum, p.min_range, p.max_range)?.to_spectrum()))?
    } else {
        data.train.clone()
    };
    if !cfg.augment.targets.is_empty() {
        train = generate_augmented(
            &train,
            &cfg.augment.targets,
            &cfg.augment.params,
            derive_seed(cfg.seed, stream::AUGMENT),
        )?;
    }
    let mut pipeline = p.clone();
    if !pipeline.scale_x && pipeline.raw_length.is_none() {
        pipeline.raw_length = train
            .iter()
            .chain(data.test.iter())
            .map(|(_, s)| s.spectrum.len())
            .min();
    }
    let train_cfg = polyraman::preprocess::PipelineConfig {
        seed: derive_seed(cfg.seed, stream::NOISE),
        ..pipeline.clone()
    };
    let test_cfg = polyraman::preprocess::PipelineConfig {
        noise: false,
        ..pipeline
    };
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    for (name, ds, c) in [("train.csv", &train, &train_cfg), ("test.csv", &data.test, &test_cfg)] {
        let m = build_features(ds, c)?;
        let path = out.join(name);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        m.write_csv(BufWriter::new(f))?;
        println!("{}: {} rows x {} features", path.display(), m.len(), m.width());
    }
    Ok(())
}
