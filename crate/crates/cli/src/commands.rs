use std::collections::hash_map::RandomState;
use std::fs::File;
use std::hash::{BuildHasher, Hasher};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use factscreen_core::screening::{SStep, ScreeningConfig, Strategy};
use factscreen_core::simulation::{
    assign, gen_science_table, replicate_rng, reveal, DesignSpec, RunManifest, SimulationConfig,
};
use factscreen_core::{analyze, AnalysisReport, FactorialDataset, Heredity, TargetSpec};
use serde::Serialize;

use crate::dataset::{parse_dataset, write_dataset};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, clap::Args)]
pub struct AnalyzeArgs {
    /// Dataset CSV with header `y,z1,...,zK`.
    pub input: PathBuf,
    /// Highest interaction level screened [default: min(2, K)].
    #[arg(long)]
    pub levels: Option<u32>,
    /// Screening level, one value for every level or a comma list.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value = "strong")]
    pub heredity: Heredity,
    /// `t` (Bonferroni) or `lasso[:lambda]`.
    #[arg(long = "s-step", default_value = "t")]
    pub s_step: SStep,
    /// `full`, `under:d` or `over:d`.
    #[arg(long, default_value = "full")]
    pub strategy: Strategy,
    /// `arm:101`, `contrast:1,2`, `custom:w1,...,wQ` or `best_arm[:k0[:eta]]`.
    #[arg(long = "target")]
    pub targets: Vec<TargetSpec>,
    /// Level of the reported confidence intervals.
    #[arg(long = "ci-alpha", default_value_t = 0.05)]
    pub ci_alpha: f64,
    /// Report file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

impl AnalyzeArgs {
    pub fn screening_config(&self, k: u32) -> ScreeningConfig {
        ScreeningConfig {
            depth: self.levels.unwrap_or(2.min(k)),
            alphas: self.alpha.clone(),
            heredity: self.heredity,
            s_step: self.s_step,
            strategy: self.strategy,
            alpha_ci: self.ci_alpha,
        }
    }
}

#[derive(Clone, Debug, clap::Args)]
pub struct SimulateArgs {
    /// TOML or JSON configuration; built-in defaults when absent.
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured replicate count.
    #[arg(long)]
    pub replications: Option<usize>,
    /// Metrics CSV; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Run manifest [default: next to the metrics as `<output>.manifest.json`].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, clap::Args)]
pub struct GenerateArgs {
    /// Simulation configuration supplying `k`, the mean and the noise model.
    pub config: Option<PathBuf>,
    /// Units per arm [default: first configured n0].
    #[arg(long)]
    pub n0: Option<usize>,
    /// [default: first configured effect size].
    #[arg(long = "effect-size")]
    pub effect_size: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset CSV; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    #[serde(flatten)]
    run: &'a RunManifest,
    seed_source: &'static str,
}

#[derive(Serialize)]
struct EstimateRow<'a> {
    target: &'a str,
    method: &'static str,
    gamma_hat: f64,
    se: f64,
    ci_lo: f64,
    ci_hi: f64,
    model_size: usize,
    tie: String,
}

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn create_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Internal(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

fn fresh_seed() -> u64 {
    RandomState::new().build_hasher().finish()
}

/// Loads a simulation configuration; the flag reports whether the file set
/// `seed` itself.
pub fn load_config(path: Option<&Path>) -> CliResult<(SimulationConfig, bool)> {
    let Some(path) = path else {
        return Ok((SimulationConfig::default(), false));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bad = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|e| e == "json") {
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e))?;
        let has_seed = value.get("seed").is_some();
        let cfg = serde_json::from_value(value).map_err(|e| bad(&e))?;
        Ok((cfg, has_seed))
    } else {
        let table: toml::Table = toml::from_str(&text).map_err(|e| bad(&e))?;
        let cfg = toml::from_str(&text).map_err(|e| bad(&e))?;
        Ok((cfg, table.contains_key("seed")))
    }
}

pub fn analyze_dataset(dataset: &FactorialDataset, args: &AnalyzeArgs) -> CliResult<AnalysisReport> {
    let config = args.screening_config(dataset.k());
    config.validate(dataset.k())?;
    Ok(analyze(&dataset.summarize(), &config, &args.targets)?)
}

fn write_report_csv(report: &AnalysisReport, out: impl Write) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for e in &report.estimates {
        wtr.serialize(EstimateRow {
            target: &e.target,
            method: e.method.name(),
            gamma_hat: e.gamma_hat,
            se: e.se,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            model_size: e.model.len(),
            tie: String::new(),
        })
        .map_err(internal)?;
    }
    for b in &report.best_arm {
        let est = &b.report.estimate;
        wtr.serialize(EstimateRow {
            target: &b.target,
            method: b.method.name(),
            gamma_hat: est.gamma_hat,
            se: est.se(),
            ci_lo: est.ci_lo,
            ci_hi: est.ci_hi,
            model_size: b.report.model_size,
            tie: b.report.tie_labels.join(" "),
        })
        .map_err(internal)?;
    }
    wtr.flush().map_err(internal)
}

pub fn run_analyze(args: &AnalyzeArgs) -> CliResult<AnalysisReport> {
    let dataset = parse_dataset(open_input(&args.input)?)
        .map_err(|e| CliError::Input(format!("{}: {}", args.input.display(), strip_class(&e))))?;
    let report = analyze_dataset(&dataset, args)?;
    let mut out = create_output(args.output.as_deref())?;
    match args.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(internal)?;
            writeln!(out).map_err(internal)?;
        }
        OutputFormat::Csv => write_report_csv(&report, &mut out)?,
    }
    out.flush().map_err(internal)?;
    Ok(report)
}

fn strip_class(e: &CliError) -> &str {
    match e {
        CliError::Input(m) | CliError::Replication(m) | CliError::Internal(m) => m,
    }
}

pub fn run_simulate(args: &SimulateArgs) -> CliResult<RunManifest> {
    let (mut cfg, has_seed) = load_config(args.config.as_deref())?;
    let seed_source = match args.seed {
        Some(s) => {
            cfg.seed = s;
            "flag"
        }
        None if has_seed => "config",
        None => {
            cfg.seed = fresh_seed();
            "generated"
        }
    };
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    let result = factscreen_core::run_monte_carlo(&cfg)?;

    let mut out = create_output(args.output.as_deref())?;
    let mut wtr = csv::Writer::from_writer(&mut out);
    for row in &result.rows {
        wtr.serialize(row).map_err(internal)?;
    }
    wtr.flush().map_err(internal)?;
    drop(wtr);
    out.flush().map_err(internal)?;

    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| args.output.as_ref().map(|p| p.with_extension("manifest.json")));
    let manifest = Manifest { run: &result.manifest, seed_source };
    match manifest_path {
        Some(p) => {
            let mut m = create_output(Some(&p))?;
            serde_json::to_writer_pretty(&mut m, &manifest).map_err(internal)?;
            writeln!(m).map_err(internal)?;
            m.flush().map_err(internal)?;
        }
        None => eprintln!("seed {} ({seed_source})", cfg.seed),
    }
    Ok(result.manifest)
}

/// Draws one randomized experiment from the configured mean and noise model.
pub fn generate_dataset(cfg: &SimulationConfig, n0: usize, effect_size: f64, seed: u64) -> CliResult<FactorialDataset> {
    let mut rng = replicate_rng(seed, 0, 0);
    let mu = cfg.mean.arm_means(cfg.k, effect_size, cfg.intercept)?;
    let design = DesignSpec::uniform(cfg.k, n0)?;
    let science = gen_science_table(&mu, design.total(), cfg.dgp, cfg.centered, &mut rng)?;
    let assignment = assign(&design, &mut rng)?;
    Ok(reveal(&science, &assignment)?)
}

pub fn run_generate(args: &GenerateArgs) -> CliResult<FactorialDataset> {
    let (cfg, has_seed) = load_config(args.config.as_deref())?;
    let seed = match args.seed {
        Some(s) => s,
        None if has_seed => cfg.seed,
        None => {
            let s = fresh_seed();
            eprintln!("seed {s} (generated)");
            s
        }
    };
    let n0 = args.n0.or(cfg.n0.first().copied()).unwrap_or(2);
    let size = args.effect_size.or(cfg.effect_sizes.first().copied()).unwrap_or(0.0);
    let dataset = generate_dataset(&cfg, n0, size, seed)?;
    let mut out = create_output(args.output.as_deref())?;
    write_dataset(&dataset, &mut out)?;
    out.flush().map_err(internal)?;
    Ok(dataset)
}
