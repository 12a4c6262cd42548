//! Command-line front end.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use frictionnet::bn::io::LoadError;
use frictionnet::bn::{posterior_ve, BnError, Evidence};
use frictionnet::eval::{self, EvalError, EvalOptions, EvalSpec, SensorSubset};
use frictionnet::replay::{self, ObserverGate, ReplayConfig, ReplayError};
use frictionnet::roadnet::{ModelError, RoadModel};
use frictionnet::sim::{self, Scenario, SimConfig, SimError};

#[derive(Parser, Debug)]
#[command(name = "frictionnet", version, about = "Road-condition sensor fusion with a discrete Bayesian network")]
pub struct Cli {
    /// Model file (JSON). Defaults to the bundled road model.
    #[arg(long, global = true, env = "FRICTIONNET_MODEL")]
    pub model: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load and check a model; report rescaled CPT rows.
    Validate,
    /// Print posterior distributions given evidence.
    Infer(InferArgs),
    /// Score every sensor subset over the whole domain.
    EvalDomain(EvalArgs),
    /// Generate a synthetic drive from a scenario.
    Simulate(SimulateArgs),
    /// Run a sensor log through the network.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct InferArgs {
    /// Observation as VAR=STATE; repeatable.
    #[arg(long = "evidence", value_name = "VAR=STATE")]
    pub evidence: Vec<String>,
    /// Variable to query; repeatable.
    #[arg(long = "query", value_name = "VAR", required = true)]
    pub query: Vec<String>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Report CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sensor subset such as `S_C+S_RCS1` (`;` also separates); repeatable.
    /// All 32 subsets when omitted.
    #[arg(long = "subsets", value_name = "SUBSET")]
    pub subsets: Vec<String>,
    /// Add a probability-weighted mean column.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sensor log CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth CSV; defaults to `<out>.truth.csv`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 10.0)]
    pub rate: f64,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// Sensor log CSV.
    #[arg(long)]
    pub log: PathBuf,
    /// Posterior CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth CSV; enables the accuracy report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Report CSV; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Camera look-ahead distance in metres.
    #[arg(long, default_value_t = replay::DEFAULT_CAMERA_DISTANCE)]
    pub camera_distance: f64,
    /// Friction observer sensitivity threshold.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
}

/// Failure with its exit status: 1 for bad input, 2 for I/O.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl fmt::Display) -> Self {
        CliError { code: 1, message: message.to_string() }
    }

    fn io(message: impl fmt::Display) -> Self {
        CliError { code: 2, message: message.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Load(LoadError::Io { .. }) => CliError::io(e),
            _ => CliError::invalid(e),
        }
    }
}

impl From<BnError> for CliError {
    fn from(e: BnError) -> Self {
        CliError::invalid(e)
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io { .. } => CliError::io(e),
            _ => CliError::invalid(e),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io { .. } => CliError::io(e),
            SimError::Model(m) => m.into(),
            _ => CliError::invalid(e),
        }
    }
}

impl From<ReplayError> for CliError {
    fn from(e: ReplayError) -> Self {
        match e {
            ReplayError::Io { .. } => CliError::io(e),
            ReplayError::Model(m) => m.into(),
            _ => CliError::invalid(e),
        }
    }
}

fn load_model(path: Option<&Path>) -> Result<RoadModel, CliError> {
    match path {
        Some(p) => Ok(RoadModel::load(p)?),
        None => Ok(RoadModel::bundled()),
    }
}

fn load_road_model(path: Option<&Path>) -> Result<RoadModel, CliError> {
    let model = load_model(path)?;
    model.ensure_road_network()?;
    Ok(model)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let model_path = cli.model.as_deref();
    match cli.command {
        Command::Validate => validate(model_path),
        Command::Infer(args) => infer(model_path, &args),
        Command::EvalDomain(args) => eval_domain(model_path, &args),
        Command::Simulate(args) => simulate(model_path, &args),
        Command::Replay(args) => run_replay(model_path, &args),
    }
}

fn validate(model_path: Option<&Path>) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    for w in &model.warnings {
        eprintln!("warning: {w}");
    }
    let net = &model.network;
    println!(
        "ok: {} variables, {} edges, {} rescaled rows",
        net.len(),
        net.edge_count(),
        model.warnings.len()
    );
    Ok(())
}

fn parse_evidence(model: &RoadModel, items: &[String]) -> Result<Evidence, CliError> {
    let pairs = items
        .iter()
        .map(|item| {
            item.split_once('=')
                .map(|(v, s)| (v.trim(), s.trim()))
                .ok_or_else(|| CliError::invalid(format!("evidence `{item}` is not VAR=STATE")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Evidence::from_labels(&model.network, pairs)?)
}

fn infer(model_path: Option<&Path>, args: &InferArgs) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let evidence = parse_evidence(&model, &args.evidence)?;
    let mut out = String::new();
    for q in &args.query {
        let post = posterior_ve(&model.network, q, &evidence)?;
        let states = model.network.variable_by_name(q)?.states();
        for (label, p) in states.iter().zip(post.probabilities()) {
            out.push_str(&format!("{q}={label} {p:.6}\n"));
        }
    }
    print!("{out}");
    Ok(())
}

fn eval_domain(model_path: Option<&Path>, args: &EvalArgs) -> Result<(), CliError> {
    let model = load_road_model(model_path)?;
    let spec = EvalSpec::road();
    let subsets = if args.subsets.is_empty() {
        SensorSubset::power_set(spec.sensors.len())
    } else {
        args.subsets.iter().map(|s| SensorSubset::parse(s, &spec.sensors)).collect::<Result<_, _>>()?
    };
    let options = EvalOptions { memoize: true, weighted: args.weighted, ..Default::default() };
    let result = eval::evaluate_subsets(&model.network, &spec, &subsets, &options)?;
    write_output(args.out.as_deref(), &eval::render_report(&result))?;

    let single = SensorSubset::parse(frictionnet::roadnet::names::RCS1, &spec.sensors)?;
    if result.get(single, frictionnet::roadnet::names::WEATHER).is_some() {
        let check = eval::check_rcs_reference(&model.network)?;
        if let Some(report) = check.report {
            eprintln!("discrepancy report:\n{report}");
        }
    }
    Ok(())
}

fn simulate(model_path: Option<&Path>, args: &SimulateArgs) -> Result<(), CliError> {
    let model = load_road_model(model_path)?;
    let scenario = Scenario::read(&args.scenario)?;
    let config = SimConfig { wetness: model.wetness, ..Default::default() };
    let drive = sim::generate_drive(&model.network, &scenario, args.rate, args.seed, &config)?;
    let truth_path = args.truth.clone().unwrap_or_else(|| args.out.with_extension("truth.csv"));
    replay::write_log(&drive.records, &args.out)?;
    replay::write_truth(&drive.truth, &truth_path)?;
    eprintln!("wrote {} records to {} and {}", drive.records.len(), args.out.display(), truth_path.display());
    Ok(())
}

fn run_replay(model_path: Option<&Path>, args: &ReplayArgs) -> Result<(), CliError> {
    let model = load_road_model(model_path)?;
    let log = replay::read_log(&args.log)?;
    let config = ReplayConfig {
        camera_distance: args.camera_distance,
        gate: ObserverGate::new(args.threshold)?,
        wetness: model.wetness,
    };
    let series = replay::run_replay(&model.network, &log, &config)?;
    replay::write_posteriors(&series, &args.out)?;

    let Some(truth_path) = &args.truth else {
        eprintln!("notice: no ground truth given; report skipped");
        return Ok(());
    };
    if !truth_path.exists() {
        eprintln!("notice: ground truth {} not found; report skipped", truth_path.display());
        return Ok(());
    }
    let truth = replay::read_truth(truth_path)?;
    let report = replay::replay_report(&series, &truth)?;
    write_output(args.report.as_deref(), &replay::render_report(&report))
}
