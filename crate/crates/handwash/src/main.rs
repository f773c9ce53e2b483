use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use handwash::config::{ExperimentConfig, ModelConfig, ModelKind, Task};
use handwash::error::{Error, Result};
use handwash::experiment::{
    self, featurize_windows, rebuild_reports, run_experiment, run_mcnemar, run_perf, run_selection, write_bytes,
    ImageFormat, RunOptions,
};
use handwash::io::{read_windows, write_features, write_windows, PgmFormat};
use handwash::pipeline::{load_dataset, prepare_windows, subjects_of};
use handwash::synth::{write_synthetic, SynthOptions};
use handwash_core::evaluation::McNemarVariant;
use handwash_core::features::FeatureGroup;
use handwash_core::ingest::ChannelLayout;
use handwash_core::windowing::FoldStrategy;

/// Handwashing recognition from wrist IMU traces.
#[derive(Parser)]
#[command(name = "handwash", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic three-class dataset and a matching config.
    Synth(SynthArgs),
    /// Load, calibrate and label the traces; write per-subject label counts.
    Ingest(ConfigArgs),
    /// Cut the labeled traces into windows and write them.
    Segment(SegmentArgs),
    /// Compute the feature table of one window size.
    Featurize(FeaturizeArgs),
    /// Write GASF/GADF images of windows.
    Encode(EncodeArgs),
    /// Cross-validate every model at the first window size.
    Cv(RunArgs),
    /// Cross-validate every model at every window size.
    Sweep(RunArgs),
    /// Score every feature-group combination and the greedy forward path.
    Select(SelectArgs),
    /// Pairwise McNemar tests between saved cross-validation reports.
    Mcnemar(McNemarArgs),
    /// Training time, inference latency and model size of every model.
    Perf(PerfArgs),
    /// Re-render reports and the sweep summary from saved cv_report.json files.
    Report(ReportArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (TOML).
    #[arg(long, short)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

/// Command-line values that replace config keys.
#[derive(Args, Default)]
struct Overrides {
    /// Window sizes in seconds, comma separated.
    #[arg(long, value_delimiter = ',')]
    window_s: Option<Vec<f64>>,
    /// Keep only models of these kinds (default parameters if not configured).
    #[arg(long, value_enum, value_delimiter = ',')]
    model: Option<Vec<ModelArg>>,
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
    /// Feature groups, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    groups: Option<Vec<GroupArg>>,
    /// Number of folds.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Fold assignment seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    undersample_seed: Option<u64>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Parallel workers (default: HANDWASH_WORKERS, then CPU count).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Svm,
    Ersknn,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Activity,
    Subject,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Base,
    Hjorth,
    Shape,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    StratifiedWindow,
    SubjectHoldout,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Accel,
    AccelGyro,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImageArg {
    P5,
    P2,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    All,
    Asymptotic,
    MidP,
    Exact,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    subjects: usize,
    /// Seconds of signal per subject.
    #[arg(long, default_value_t = 1800.0)]
    duration_s: f64,
    #[arg(long, value_enum, default_value = "accel-gyro")]
    layout: LayoutArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SegmentArgs {
    #[command(flatten)]
    base: ConfigArgs,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[command(flatten)]
    base: ConfigArgs,
    /// Read windows written by `segment` instead of segmenting the traces.
    #[arg(long)]
    windows: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    base: ConfigArgs,
    #[arg(long)]
    windows: Option<PathBuf>,
    /// Image side after PAA; 0 keeps full resolution.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value = "p5")]
    format: ImageArg,
    /// Number of windows to encode.
    #[arg(long, default_value_t = 16)]
    limit: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    base: ConfigArgs,
    /// Also fit each model on all windows and save it as model.json.
    #[arg(long)]
    save_models: bool,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    base: ConfigArgs,
}

#[derive(Args)]
struct PerfArgs {
    #[command(flatten)]
    base: ConfigArgs,
}

#[derive(Args)]
struct McNemarArgs {
    /// Report directories or cv_report.json files.
    #[arg(required = true, num_args = 2..)]
    reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    variant: VariantArg,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Output directory of a cv or sweep run.
    dir: PathBuf,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(w) = &self.window_s {
            cfg.windowing.window_s = w.clone();
        }
        if let Some(kinds) = &self.model {
            let kinds: Vec<ModelKind> = kinds
                .iter()
                .map(|m| match m {
                    ModelArg::Svm => ModelKind::Svm,
                    ModelArg::Ersknn => ModelKind::Ersknn,
                })
                .collect();
            let mut models = Vec::new();
            for k in kinds {
                let configured: Vec<ModelConfig> = cfg.models.iter().filter(|m| m.kind == k).cloned().collect();
                if configured.is_empty() {
                    models.push(ModelConfig::new(k));
                } else {
                    models.extend(configured);
                }
            }
            cfg.models = models;
        }
        if let Some(t) = self.task {
            cfg.task = match t {
                TaskArg::Activity => Task::Activity,
                TaskArg::Subject => Task::Subject,
            };
        }
        if let Some(g) = &self.groups {
            cfg.features.groups = g
                .iter()
                .map(|g| match g {
                    GroupArg::Base => FeatureGroup::Base,
                    GroupArg::Hjorth => FeatureGroup::Hjorth,
                    GroupArg::Shape => FeatureGroup::Shape,
                })
                .collect();
        }
        if let Some(k) = self.k {
            cfg.cv.k = k;
        }
        if let Some(s) = self.strategy {
            cfg.cv.strategy = match s {
                StrategyArg::StratifiedWindow => FoldStrategy::StratifiedWindow,
                StrategyArg::SubjectHoldout => FoldStrategy::SubjectHoldout,
            };
        }
        if let Some(s) = self.seed {
            cfg.cv.seed = s;
        }
        if let Some(s) = self.undersample_seed {
            cfg.windowing.undersample_seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
    }
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        self.overrides.apply(&mut cfg);
        cfg.validate_inputs()?;
        Ok(cfg)
    }
}

fn first_window(cfg: &ExperimentConfig) -> f64 {
    cfg.windowing.window_s[0]
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn ingest(args: &ConfigArgs) -> Result<()> {
    let cfg = args.load()?;
    let ds = load_dataset(&cfg)?;
    let names = ds.table.names();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["subject".to_string(), "samples".into(), "duration_s".into()];
    header.extend(names.iter().cloned());
    w.write_record(&header).map_err(|e| Error::internal("ingest", e))?;
    for t in &ds.traces {
        let mut rec = vec![
            t.trace.subject_id.clone(),
            t.trace.len().to_string(),
            t.trace.duration_s().to_string(),
        ];
        let counts = t.label_counts();
        rec.extend((0..names.len()).map(|i| counts.get(i).copied().unwrap_or(0).to_string()));
        w.write_record(&rec).map_err(|e| Error::internal("ingest", e))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::internal("ingest", e))?;
    let path = cfg.output.dir.join("ingest_summary.csv");
    write_bytes(&path, &bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn segment(args: &SegmentArgs) -> Result<()> {
    let cfg = args.base.load()?;
    let ds = load_dataset(&cfg)?;
    for &ws in &cfg.windowing.window_s {
        let (windows, table) = prepare_windows(&ds, &cfg, ws)?;
        let dir = cfg.output.dir.join(format!("windows_ws{ws}"));
        write_windows(&dir, &windows, &table)?;
        println!("{}: {} windows", dir.display(), windows.len());
    }
    Ok(())
}

fn windows_for(
    cfg: &ExperimentConfig,
    dir: Option<&Path>,
) -> Result<(Vec<handwash_core::windowing::LabeledWindow>, handwash_core::LabelTable, f64)> {
    match dir {
        Some(d) => {
            let (w, t) = read_windows(d)?;
            let len = w.first().map_or(0, |w| w.len());
            Ok((w, t, len as f64 / cfg.data.sample_rate_hz))
        }
        None => {
            let ds = load_dataset(cfg)?;
            let ws = first_window(cfg);
            let (w, t) = prepare_windows(&ds, cfg, ws)?;
            Ok((w, t, ws))
        }
    }
}

fn featurize(args: &FeaturizeArgs) -> Result<()> {
    let cfg = args.base.load()?;
    let (windows, table, ws) = windows_for(&cfg, args.windows.as_deref())?;
    let data = featurize_windows(&windows, &cfg.feature_config())?;
    let mut buf = Vec::new();
    write_features(&mut buf, &data, &subjects_of(&windows), &table).map_err(|e| Error::internal("featurize", e))?;
    let path = cfg.output.dir.join(format!("features_ws{ws}.csv"));
    write_bytes(&path, &buf)?;
    println!("{}: {} rows x {} features", path.display(), data.len(), data.dim());
    Ok(())
}

fn encode(args: &EncodeArgs) -> Result<()> {
    let mut cfg = args.base.load()?;
    if let Some(s) = args.size {
        cfg.encode.image_size = s;
    }
    let (windows, _, ws) = windows_for(&cfg, args.windows.as_deref())?;
    let format = match args.format {
        ImageArg::P5 => ImageFormat::Pgm(PgmFormat::P5),
        ImageArg::P2 => ImageFormat::Pgm(PgmFormat::P2),
        ImageArg::Csv => ImageFormat::Csv,
    };
    let dir = cfg.output.dir.join(format!("images_ws{ws}"));
    let written = experiment::write_encoded(&dir, &windows, cfg.image_size(), format, args.limit)?;
    println!("{}: {} files", dir.display(), written.len());
    Ok(())
}

fn run(args: &RunArgs, sweep: bool) -> Result<()> {
    let mut cfg = args.base.load()?;
    if !sweep {
        cfg.windowing.window_s.truncate(1);
    }
    let outcome = run_experiment(
        &cfg,
        &RunOptions {
            save_models: args.save_models,
            command: command_line(),
        },
    )?;
    print!("{}", handwash::report::sweep_text(&experiment::sweep_points(&outcome.runs)));
    println!("reports in {}", cfg.output.dir.display());
    Ok(())
}

fn select(args: &SelectArgs) -> Result<()> {
    let cfg = args.base.load()?;
    let ws = first_window(&cfg);
    for m in 0..cfg.models.len() {
        let s = run_selection(&cfg, ws, m)?;
        experiment::write_selection(&cfg.output.dir, &s)?;
        println!("{} at {} s", s.model, ws);
        print!("{}", handwash::report::selection_text(&s.table, &s.greedy));
    }
    Ok(())
}

fn mcnemar(args: &McNemarArgs) -> Result<()> {
    let runs = args
        .reports
        .iter()
        .map(|p| experiment::read_cv_run(p))
        .collect::<Result<Vec<_>>>()?;
    let variants: Vec<McNemarVariant> = match args.variant {
        VariantArg::All => McNemarVariant::ALL.to_vec(),
        VariantArg::Asymptotic => vec![McNemarVariant::Asymptotic],
        VariantArg::MidP => vec![McNemarVariant::MidP],
        VariantArg::Exact => vec![McNemarVariant::ExactConditional],
    };
    let (names, rows) = run_mcnemar(&runs, &variants)?;
    experiment::write_mcnemar(&args.out, &names, &rows)?;
    print!("{}", handwash::report::mcnemar_text(&names, &rows));
    Ok(())
}

fn perf(args: &PerfArgs) -> Result<()> {
    let cfg = args.base.load()?;
    let rows = run_perf(&cfg, first_window(&cfg))?;
    experiment::write_perf(&cfg.output.dir, &rows)?;
    print!("{}", handwash::report::perf_text(&rows));
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let opts = SynthOptions {
        subjects: args.subjects,
        duration_s: args.duration_s,
        layout: match args.layout {
            LayoutArg::Accel => ChannelLayout::Accel,
            LayoutArg::AccelGyro => ChannelLayout::AccelGyro,
        },
        seed: args.seed,
    };
    let written = write_synthetic(&args.out, &opts)?;
    println!("{}", written.last().expect("config is written").display());
    Ok(())
}

fn report(args: &ReportArgs) -> Result<()> {
    let runs = rebuild_reports(&args.dir)?;
    print!("{}", handwash::report::sweep_text(&experiment::sweep_points(&runs)));
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Ingest(a) => ingest(a),
        Command::Segment(a) => segment(a),
        Command::Featurize(a) => featurize(a),
        Command::Encode(a) => encode(a),
        Command::Cv(a) => run(a, false),
        Command::Sweep(a) => run(a, true),
        Command::Select(a) => select(a),
        Command::Mcnemar(a) => mcnemar(a),
        Command::Perf(a) => perf(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("handwash: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

