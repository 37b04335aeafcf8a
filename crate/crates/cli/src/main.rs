mod artifacts;
mod config;
mod diagnose;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sec_gfd::data::{self, Dataset, SplitMasks, SyntheticConfig};
use sec_gfd::experiments::{self, ClipExperimentConfig, ClipMode, ClipVariant, ExperimentConfig, ResultRow};
use sec_gfd::model::{Aggregation, DeltaMode, FilterVariant};
use sec_gfd::train::{self, TrainedModel};
use sec_gfd::Error;

use artifacts::Artifacts;
use config::{parse_list, CliConfig};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Write(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Error::Diverged { .. }) => 3,
            CliError::Core(_) | CliError::Write(_) | CliError::Internal(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Write(m) => write!(f, "cannot write output: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Configuration mistakes are usage errors even when the library reports them.
fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "sec-gfd", version, about = "Spectral graph fraud detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a detector and write its metrics report.
    Train(TrainCmd),
    /// Score a saved model on a dataset split.
    Evaluate(EvaluateCmd),
    /// Heterophily and spectral statistics of a labeled graph.
    Diagnose(DiagnoseCmd),
    /// Write a planted-anomaly dataset to disk.
    SynthGen(SynthCmd),
    /// Train single-filter models on graphs with heterophilic edges removed.
    ClipExperiment(ClipCmd),
    /// Train the full model for several filter orders.
    SweepOrder(SweepCmd),
    /// Train the full model and its three ablations.
    Ablate(AblateCmd),
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `default` or a TOML file of generator settings.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// train,val,test fractions
    #[arg(long)]
    split: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggArg {
    Concat,
    Sum,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DeltaArg {
    InverseFrequency,
    PaperLiteral,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    Hybrid,
    LowPass,
    HighPass,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long, value_enum)]
    agg: Option<AggArg>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    sgc_hops: Option<usize>,
    #[arg(long, value_enum)]
    delta_mode: Option<DeltaArg>,
    #[arg(long, value_enum)]
    filter: Option<FilterArg>,
    #[arg(long)]
    no_band: bool,
    #[arg(long)]
    no_high: bool,
    #[arg(long)]
    no_env: bool,
}

#[derive(Args, Debug, Clone)]
struct TrainArgs {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    /// Early stopping on validation AUC.
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    no_standardize: bool,
    /// Record wall-clock times (outputs then differ between runs).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct TrainCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    train: TrainArgs,
    /// Seed for the split and the initialization.
    #[arg(long)]
    seed: Option<u64>,
    /// Metrics report (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Trained model (JSON).
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MaskArg {
    Train,
    Val,
    Test,
    All,
}

#[derive(Args, Debug)]
struct EvaluateCmd {
    #[command(flatten)]
    data: DataArgs,
    /// Model written by `train --model-out`.
    #[arg(long)]
    model: PathBuf,
    /// Seed of the split to evaluate on.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "test")]
    mask: MaskArg,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiagnoseCmd {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Node count when isolated trailing nodes exist.
    #[arg(long)]
    num_nodes: Option<usize>,
    /// Largest graph for which the dense spectrum is computed.
    #[arg(long, default_value_t = sec_gfd::graph::DEFAULT_SPECTRUM_CAP)]
    spectrum_cap: usize,
    /// Spectral energy profile of the label signal (CSV).
    #[arg(long)]
    profile_out: Option<PathBuf>,
    /// Diagnostics (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthCmd {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    anomaly_rate: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    mean_shift: Option<f64>,
    #[arg(long)]
    mean_degree: Option<f64>,
    #[arg(long)]
    heterophily: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write features in the binary format.
    #[arg(long)]
    binary: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    train: TrainArgs,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// One row per trained cell (CSV).
    #[arg(long)]
    out: PathBuf,
    /// Mean, deviation and median per group (CSV).
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Train,
}

#[derive(Args, Debug)]
struct ClipCmd {
    #[command(flatten)]
    common: ExperimentArgs,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Comma-separated ratios in ascending order.
    #[arg(long)]
    ratios: Option<String>,
    /// Comma-separated subset of low-pass,high-pass,band-pass.
    #[arg(long)]
    variants: Option<String>,
}

#[derive(Args, Debug)]
struct SweepCmd {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Comma-separated filter orders.
    #[arg(long)]
    orders: Option<String>,
}

#[derive(Args, Debug)]
struct AblateCmd {
    #[command(flatten)]
    common: ExperimentArgs,
}

fn apply_data_args(cfg: &mut CliConfig, a: &DataArgs) -> Result<(), CliError> {
    if a.synthetic.is_some() {
        cfg.data = config::DataSection {
            synthetic: a.synthetic.clone(),
            ..Default::default()
        };
    }
    if a.edges.is_some() || a.features.is_some() || a.labels.is_some() {
        if a.synthetic.is_some() {
            return Err(CliError::Usage("--synthetic conflicts with dataset files".into()));
        }
        cfg.data.synthetic = None;
        cfg.data.edges = a.edges.clone().or(cfg.data.edges.take());
        cfg.data.features = a.features.clone().or(cfg.data.features.take());
        cfg.data.labels = a.labels.clone().or(cfg.data.labels.take());
    }
    if let Some(s) = &a.split {
        let f: Vec<f64> = parse_list(s, "split fraction")?;
        let [t, v, te] = f[..] else {
            return Err(CliError::Usage("--split needs three fractions".into()));
        };
        cfg.split.fractions = [t, v, te];
    }
    Ok(())
}

fn apply_model_args(cfg: &mut CliConfig, a: &ModelArgs) {
    let m = &mut cfg.model;
    if let Some(v) = a.order {
        m.order = v;
    }
    if let Some(v) = a.epsilon {
        m.epsilon = v;
    }
    if let Some(v) = a.hidden {
        m.hidden_dim = v;
    }
    if let Some(v) = a.agg {
        m.agg = match v {
            AggArg::Concat => Aggregation::Concat,
            AggArg::Sum => Aggregation::Sum,
        };
    }
    if let Some(v) = a.alpha {
        m.alpha = v;
    }
    if let Some(v) = a.knn_k {
        m.knn_k = v;
    }
    if let Some(v) = a.sgc_hops {
        m.sgc_hops = v;
    }
    if let Some(v) = a.delta_mode {
        m.delta_mode = match v {
            DeltaArg::InverseFrequency => DeltaMode::InverseFrequency,
            DeltaArg::PaperLiteral => DeltaMode::PaperLiteral,
        };
    }
    if let Some(v) = a.filter {
        m.filter = match v {
            FilterArg::Hybrid => FilterVariant::Hybrid,
            FilterArg::LowPass => FilterVariant::LowPass,
            FilterArg::HighPass => FilterVariant::HighPass,
        };
    }
    m.use_band &= !a.no_band;
    m.use_high &= !a.no_high;
    m.use_env &= !a.no_env;
}

fn apply_train_args(cfg: &mut CliConfig, a: &TrainArgs) {
    let t = &mut cfg.train;
    if let Some(v) = a.epochs {
        t.epochs = v;
    }
    if let Some(v) = a.lr {
        t.learning_rate = v;
    }
    if let Some(v) = a.weight_decay {
        t.weight_decay = v;
    }
    if a.patience.is_some() {
        t.patience = a.patience;
    }
    if let Some(v) = a.threshold {
        t.threshold = v;
    }
    t.standardize &= !a.no_standardize;
    t.record_timing |= a.timing;
}

fn validate(cfg: &CliConfig) -> Result<(), CliError> {
    cfg.model.validate().map_err(usage)?;
    cfg.train.validate().map_err(usage)?;
    let sum: f64 = cfg.split.fractions.iter().sum();
    if cfg.split.fractions.iter().any(|f| !(0.0..=1.0).contains(f)) || (sum - 1.0).abs() > 1e-9 {
        return Err(CliError::Usage(format!(
            "split fractions {:?} must lie in [0, 1] and sum to 1",
            cfg.split.fractions
        )));
    }
    Ok(())
}

fn load_data(cfg: &CliConfig) -> Result<Dataset, CliError> {
    if let Some(syn) = cfg.synthetic_source()? {
        return Ok(data::generate_synthetic(&syn)?);
    }
    let d = &cfg.data;
    match (&d.edges, &d.features, &d.labels) {
        (Some(e), Some(f), Some(l)) => Ok(data::load_dataset(e, f, l)?),
        (None, None, None) => Err(CliError::Usage(
            "no dataset: pass --synthetic default or --edges/--features/--labels".into(),
        )),
        _ => Err(CliError::Usage("--edges, --features and --labels go together".into())),
    }
}

fn split(cfg: &CliConfig, dataset: &Dataset) -> Result<SplitMasks, CliError> {
    Ok(data::make_split(
        &dataset.labels,
        cfg.split.tuple(),
        cfg.split.seed,
        cfg.split.stratified,
    )?)
}

fn to_json<T: serde::Serialize + data::FiniteCheck>(value: &T) -> Result<String, CliError> {
    Ok(data::to_json(value)?)
}

fn run_train(cmd: TrainCmd) -> Result<(), CliError> {
    let mut cfg = CliConfig::load(cmd.data.config.as_deref())?;
    apply_data_args(&mut cfg, &cmd.data)?;
    apply_model_args(&mut cfg, &cmd.model);
    apply_train_args(&mut cfg, &cmd.train);
    if let Some(seed) = cmd.seed {
        cfg.split.seed = seed;
        cfg.train.seed = seed;
    }
    validate(&cfg)?;
    let mut out = Artifacts::new();
    out.declare(&cmd.out)?;
    if let Some(p) = &cmd.model_out {
        out.declare(p)?;
    }

    let dataset = load_data(&cfg)?;
    let splits = split(&cfg, &dataset)?;
    let (model, report) = train::train(&dataset, &splits, &cfg.model, &cfg.train)?;
    out.set(&cmd.out, to_json(&report)?)?;
    if let Some(p) = &cmd.model_out {
        out.set(p, to_json(&model)?)?;
    }
    out.commit()?;
    println!(
        "{} ({} split, {} nodes): f1_macro {:.4} auc {:.4}",
        report.dataset, report.split, report.num_evaluated, report.f1_macro, report.auc
    );
    Ok(())
}

fn run_evaluate(cmd: EvaluateCmd) -> Result<(), CliError> {
    let mut cfg = CliConfig::load(cmd.data.config.as_deref())?;
    apply_data_args(&mut cfg, &cmd.data)?;
    if let Some(seed) = cmd.seed {
        cfg.split.seed = seed;
    }
    if let Some(t) = cmd.threshold {
        cfg.train.threshold = t;
    }
    validate(&cfg)?;
    let mut out = Artifacts::new();
    out.declare(&cmd.out)?;

    let model: TrainedModel = data::load_json(&cmd.model)?;
    let dataset = load_data(&cfg)?;
    let mask = match cmd.mask {
        MaskArg::All => vec![true; dataset.num_nodes()],
        m => {
            let s = split(&cfg, &dataset)?;
            match m {
                MaskArg::Train => s.train,
                MaskArg::Val => s.val,
                _ => s.test,
            }
        }
    };
    let mut report = train::evaluate(&model, &dataset, &mask, cfg.train.threshold)?;
    report.seed = cfg.split.seed;
    report.split = format!("{:?}", cmd.mask).to_lowercase();
    out.set(&cmd.out, to_json(&report)?)?;
    out.commit()?;
    println!(
        "{} ({} split, {} nodes): f1_macro {:.4} auc {:.4}",
        report.dataset, report.split, report.num_evaluated, report.f1_macro, report.auc
    );
    Ok(())
}

impl data::FiniteCheck for diagnose::Diagnostics {
    fn first_non_finite(&self) -> Option<String> {
        [
            ("heterophily", self.heterophily),
            ("anomaly_heterophily", self.anomaly_heterophily),
            ("rayleigh_unnormalized", self.rayleigh_unnormalized),
            ("rayleigh_sym_normalized", self.rayleigh_sym_normalized),
        ]
        .iter()
        .find(|(_, v)| v.is_some_and(|x| !x.is_finite()))
        .map(|(n, _)| n.to_string())
    }
}

fn run_diagnose(cmd: DiagnoseCmd) -> Result<(), CliError> {
    let mut out = Artifacts::new();
    for p in [&cmd.out, &cmd.profile_out].into_iter().flatten() {
        out.declare(p)?;
    }
    let (g, labels) = data::load_graph_and_labels(&cmd.edges, &cmd.labels, cmd.num_nodes)?;
    let diag = diagnose::diagnose(&g, &labels)?;
    if let Some(p) = &cmd.profile_out {
        match diagnose::label_energy_profile(&g, &labels, cmd.spectrum_cap) {
            Ok(Some(profile)) => out.set(p, diagnose::profile_csv(&profile))?,
            Ok(None) => eprintln!("label signal is constant; no energy profile written"),
            Err(Error::TooLarge(m)) => eprintln!("energy profile skipped: {m}"),
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(p) = &cmd.out {
        out.set(p, to_json(&diag)?)?;
    }
    out.commit()?;
    print!("{}", diagnose::render_text(&diag));
    Ok(())
}

fn run_synth(cmd: SynthCmd) -> Result<(), CliError> {
    let mut syn: SyntheticConfig = match &cmd.config {
        Some(p) => CliConfig::load(Some(p))?.synthetic,
        None => SyntheticConfig::default(),
    };
    if let Some(v) = cmd.nodes {
        syn.num_nodes = v;
    }
    if let Some(v) = cmd.anomaly_rate {
        syn.anomaly_rate = v;
    }
    if let Some(v) = cmd.dim {
        syn.feature_dim = v;
    }
    if let Some(v) = cmd.mean_shift {
        syn.mean_shift = v;
    }
    if let Some(v) = cmd.mean_degree {
        syn.mean_degree = v;
    }
    if let Some(v) = cmd.heterophily {
        syn.anomaly_heterophily = v;
    }
    if let Some(v) = cmd.seed {
        syn.seed = v;
    }
    let dir = &cmd.out_dir;
    let features = dir.join(if cmd.binary { "features.bin" } else { "features.csv" });
    let (edges, labels) = (dir.join("edges.csv"), dir.join("labels.csv"));
    let mut out = Artifacts::new();
    for p in [&edges, &labels, &features] {
        out.declare(p)?;
    }
    let d = data::generate_synthetic(&syn).map_err(|e| match e {
        Error::InvalidInput(_) => usage(e),
        other => other.into(),
    })?;
    out.set(&edges, data::encode_edges(&d.graph))?;
    out.set(&labels, data::encode_labels(&d.labels))?;
    if cmd.binary {
        out.set(&features, data::encode_binary_features(&d.features))?;
    } else {
        out.set(&features, data::encode_csv_features(&d.features))?;
    }
    out.commit()?;
    let (normal, anomaly) = d.labels.class_counts();
    println!(
        "{} nodes ({anomaly} anomalies, {normal} normal), {} edges -> {}",
        d.num_nodes(),
        d.graph.num_edges(),
        dir.display()
    );
    Ok(())
}

/// Shared setup of the three experiment commands.
fn experiment_setup(a: &ExperimentArgs) -> Result<(CliConfig, ExperimentConfig), CliError> {
    let mut cfg = CliConfig::load(a.data.config.as_deref())?;
    apply_data_args(&mut cfg, &a.data)?;
    apply_model_args(&mut cfg, &a.model);
    apply_train_args(&mut cfg, &a.train);
    if let Some(s) = &a.seeds {
        cfg.experiment.seeds = parse_list(s, "seed")?;
    }
    validate(&cfg)?;
    if cfg.experiment.seeds.is_empty() {
        return Err(CliError::Usage("at least one seed is required".into()));
    }
    let exp = ExperimentConfig {
        seeds: cfg.experiment.seeds.clone(),
        split: cfg.split.tuple(),
        model: cfg.model.clone(),
        train: cfg.train.clone(),
    };
    Ok((cfg, exp))
}

fn finish_experiment(a: &ExperimentArgs, rows: &[ResultRow], mut out: Artifacts) -> Result<(), CliError> {
    let summary = experiments::summarize(rows);
    if rows.iter().any(|r| !(r.auc.is_finite() && r.f1_macro.is_finite())) {
        return Err(Error::InvalidValue("experiment metrics".into()).into());
    }
    out.set(&a.out, experiments::csv_string(rows)?)?;
    if let Some(p) = &a.summary_out {
        out.set(p, experiments::csv_string(&summary)?)?;
    }
    out.commit()?;
    for s in &summary {
        println!(
            "{:<14} ratio {:<4} C {}: auc {:.4} ± {:.4} (median {:.4}), f1 {:.4} ± {:.4}",
            s.variant, s.ratio, s.order, s.auc_mean, s.auc_sd, s.auc_median, s.f1_mean, s.f1_sd
        );
    }
    Ok(())
}

fn declare_experiment_outputs(a: &ExperimentArgs) -> Result<Artifacts, CliError> {
    let mut out = Artifacts::new();
    out.declare(&a.out)?;
    if let Some(p) = &a.summary_out {
        out.declare(p)?;
    }
    Ok(out)
}

fn parse_variant(s: &str) -> Result<ClipVariant, CliError> {
    ClipVariant::ALL
        .into_iter()
        .find(|v| v.name() == s.trim())
        .ok_or_else(|| CliError::Usage(format!("unknown variant {s:?}")))
}

fn run_clip(cmd: ClipCmd) -> Result<(), CliError> {
    let (mut cfg, base) = experiment_setup(&cmd.common)?;
    if let Some(m) = cmd.mode {
        cfg.experiment.mode = match m {
            ModeArg::Full => ClipMode::FullGraph,
            ModeArg::Train => ClipMode::TrainGraph,
        };
    }
    if let Some(r) = &cmd.ratios {
        cfg.experiment.ratios = parse_list(r, "ratio")?;
    }
    if let Some(v) = &cmd.variants {
        cfg.experiment.variants = v.split(',').map(parse_variant).collect::<Result<_, _>>()?;
    }
    let ratios = &cfg.experiment.ratios;
    if ratios.is_empty() || ratios.windows(2).any(|w| w[0] > w[1]) || ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(CliError::Usage("ratios must be ascending values in [0, 1]".into()));
    }
    let out = declare_experiment_outputs(&cmd.common)?;
    let dataset = load_data(&cfg)?;
    let clip = ClipExperimentConfig {
        mode: cfg.experiment.mode,
        ratios: cfg.experiment.ratios.clone(),
        variants: cfg.experiment.variants.clone(),
        base,
    };
    let rows = experiments::run_clip_experiment(&dataset, &clip)?;
    finish_experiment(&cmd.common, &rows, out)
}

fn run_sweep(cmd: SweepCmd) -> Result<(), CliError> {
    let (mut cfg, base) = experiment_setup(&cmd.common)?;
    if let Some(o) = &cmd.orders {
        cfg.experiment.orders = parse_list(o, "order")?;
    }
    for &order in &cfg.experiment.orders {
        sec_gfd::ModelConfig {
            order,
            ..cfg.model.clone()
        }
        .validate()
        .map_err(usage)?;
    }
    let out = declare_experiment_outputs(&cmd.common)?;
    let dataset = load_data(&cfg)?;
    let rows = experiments::run_order_sweep(&dataset, &cfg.experiment.orders, &base)?;
    finish_experiment(&cmd.common, &rows, out)
}

fn run_ablate(cmd: AblateCmd) -> Result<(), CliError> {
    let (cfg, base) = experiment_setup(&cmd.common)?;
    for name in experiments::ABLATIONS {
        experiments::ablation_config(name, &cfg.model)
            .and_then(|m| m.validate())
            .map_err(usage)?;
    }
    let out = declare_experiment_outputs(&cmd.common)?;
    let dataset = load_data(&cfg)?;
    let rows = experiments::run_ablation(&dataset, &base)?;
    finish_experiment(&cmd.common, &rows, out)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SEC_GFD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SEC_GFD_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Train(c) => run_train(c),
        Command::Evaluate(c) => run_evaluate(c),
        Command::Diagnose(c) => run_diagnose(c),
        Command::SynthGen(c) => run_synth(c),
        Command::ClipExperiment(c) => run_clip(c),
        Command::SweepOrder(c) => run_sweep(c),
        Command::Ablate(c) => run_ablate(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sec-gfd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
