//! Command-line front end.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufReader;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sgdst_core::augment::{self, ExpansionProvider, ProviderKind};
use sgdst_core::corpus::{self, Examples, Task};
use sgdst_core::encoder::{Backend, BaselineEncoder, Encoder, EncoderConfig, DEFAULT_DIM};
use sgdst_core::metrics::{self, EvalOptions};
use sgdst_core::mrc;
use sgdst_core::optim::TrainConfig;
use sgdst_core::tracker::{self, LearnedModels, OracleModels, ResetRule};
use sgdst_core::wd::{self, WdTrainOptions};

use crate::checkpoint::{self, Checkpoint, HeadKind};
use crate::{io, repl, sidecar};

const SIDECAR_HELP: &str = "`baseline`, `tcp:host:port` or `cmd:program args`";

#[derive(Debug, Parser)]
#[command(name = "sgdst", version, about = "Schema-guided dialogue state tracking")]
pub struct Cli {
    /// Log verbosity (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and write the training examples of one head as JSON lines.
    Ingest(IngestArgs),
    /// Train one head and write its checkpoint.
    Train(TrainArgs),
    /// Track every dialogue and write predicted frame states.
    Predict(PredictArgs),
    /// Score predictions against gold dialogues.
    Evaluate(EvaluateArgs),
    /// Build a synonym lexicon from provider caches.
    AugmentLexicon(AugmentArgs),
    /// Step through a dialogue turn by turn.
    Repl(ReplArgs),
    /// Serve the baseline encoder over the sidecar protocol.
    #[command(hide = true)]
    ServeEncoder(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Mrc,
    Wd,
    Intent,
    Reqslot,
}

impl TaskArg {
    fn task(self) -> Task {
        match self {
            TaskArg::Mrc => Task::Mrc,
            TaskArg::Wd => Task::Wd,
            TaskArg::Intent => Task::Intent,
            TaskArg::Reqslot => Task::ReqSlot,
        }
    }

    fn head(self) -> HeadKind {
        match self {
            TaskArg::Mrc => HeadKind::Mrc,
            TaskArg::Wd => HeadKind::Wd,
            TaskArg::Intent => HeadKind::Intent,
            TaskArg::Reqslot => HeadKind::Reqslot,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Dialogue file or directory of dialogue files.
    #[arg(long)]
    pub dialogues: PathBuf,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncoderArgs {
    /// Encoder backend.
    #[arg(long, env = sidecar::ENV_ADDRESS, default_value = "baseline", help = SIDECAR_HELP)]
    pub encoder: String,
    #[arg(long, default_value_t = DEFAULT_DIM)]
    pub dim: usize,
}

impl EncoderArgs {
    fn config(&self, seed: u64) -> EncoderConfig {
        let backend = if self.encoder == "baseline" { Backend::Baseline } else { Backend::Sidecar(self.encoder.clone()) };
        EncoderConfig { dim: self.dim, seed, backend }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub dialogues: PathBuf,
    /// Checkpoint path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Lexicon for the wide features (ranker only).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[command(flatten)]
    pub encoder: EncoderArgs,
    /// Hidden width of the head.
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Start from the fine-tuning defaults instead of the desk-scale ones.
    #[arg(long)]
    pub pretrained_defaults: bool,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    /// Negatives sampled per ranking decision and epoch.
    #[arg(long, default_value_t = wd::DEFAULT_NEGATIVES)]
    pub negatives: usize,
    /// Train the ranker without its wide input.
    #[arg(long)]
    pub deep_only: bool,
}

impl TrainArgs {
    fn train_config(&self) -> TrainConfig {
        let base = if self.pretrained_defaults { TrainConfig::pretrained() } else { TrainConfig::default() };
        TrainConfig {
            epochs: self.epochs.unwrap_or(base.epochs),
            batch_size: self.batch_size.unwrap_or(base.batch_size),
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
            beta1: self.beta1.unwrap_or(base.beta1),
            beta2: self.beta2.unwrap_or(base.beta2),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
            weight_decay: self.weight_decay.unwrap_or(base.weight_decay),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub dialogues: PathBuf,
    /// Model manifest, or `oracle` to read gold annotations.
    #[arg(long)]
    pub models: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// JSON list of reset rules.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Overrides the encoder backend recorded in the models.
    #[arg(long, env = sidecar::ENV_ADDRESS, help = SIDECAR_HELP)]
    pub encoder: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    /// Score a frame 1 only when every slot matches exactly.
    #[arg(long)]
    pub strict_binary: bool,
    /// Services seen in training; enables the seen/unseen breakdown.
    #[arg(long, value_delimiter = ',')]
    pub seen: Option<Vec<String>>,
    /// Also write the full report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Provider caches as `name:kind:path`, kind `synonym-api` or `back-translation`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub providers: Vec<String>,
    #[arg(long, default_value_t = augment::DEFAULT_K)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Mark the lexicon symmetric.
    #[arg(long)]
    pub symmetric: bool,
}

#[derive(Debug, Args)]
pub struct ReplArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Model manifest loaded at start; `:load` works too.
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Service to track; defaults to the first one in the schema.
    #[arg(long)]
    pub service: Option<String>,
    #[arg(long, env = sidecar::ENV_ADDRESS, help = SIDECAR_HELP)]
    pub encoder: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = DEFAULT_DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Listen on this TCP port instead of standard streams.
    #[arg(long)]
    pub tcp: Option<u16>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<sgdst_core::Error> for Failure {
    fn from(e: sgdst_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn require(flag: &str, path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{flag}: no such file or directory: {}", path.display())))
    }
}

/// Fully resolved settings of one invocation, echoed to standard error.
#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    encoder: Option<&'a EncoderConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    train: Option<&'a TrainConfig>,
    paths: BTreeMap<&'a str, &'a Path>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    options: BTreeMap<&'a str, serde_json::Value>,
}

impl<'a> RunConfig<'a> {
    fn new(command: &'a str) -> Self {
        RunConfig { command, seed: None, encoder: None, train: None, paths: BTreeMap::new(), options: BTreeMap::new() }
    }

    fn echo(&self) {
        match serde_json::to_string(self) {
            Ok(s) => eprintln!("config {s}"),
            Err(e) => log::warn!("cannot print config: {e}"),
        }
    }
}

/// Opens the encoder described by `config`.
pub fn open_encoder(config: &EncoderConfig) -> anyhow::Result<Box<dyn Encoder>> {
    config.validate()?;
    Ok(match &config.backend {
        Backend::Baseline => Box::new(BaselineEncoder::new(config.clone())?),
        Backend::Sidecar(addr) => {
            let enc = sidecar::SidecarEncoder::connect(addr, config.dim, sidecar::DEFAULT_TIMEOUT)
                .with_context(|| format!("connecting to encoder sidecar `{addr}`"))?;
            log::info!("using sidecar encoder `{}`", enc.name());
            Box::new(enc)
        }
    })
}

fn override_backend(config: &mut EncoderConfig, encoder: Option<&str>) {
    match encoder {
        None => {}
        Some("baseline") => config.backend = Backend::Baseline,
        Some(addr) => config.backend = Backend::Sidecar(addr.to_string()),
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Ingest(a) => ingest(&a),
        Command::Train(a) => train(&a),
        Command::Predict(a) => predict(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::AugmentLexicon(a) => augment_lexicon(&a),
        Command::Repl(a) => run_repl(&a),
        Command::ServeEncoder(a) => serve_encoder(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn ingest(a: &IngestArgs) -> CmdResult {
    require("schema", &a.schema)?;
    require("dialogues", &a.dialogues)?;
    let mut cfg = RunConfig::new("ingest");
    cfg.paths.extend([("schema", a.schema.as_path()), ("dialogues", &a.dialogues), ("out", &a.out)]);
    cfg.options.insert("task", serde_json::json!(a.task.head().name()));
    cfg.echo();

    let schema = io::load_schema(&a.schema)?;
    let dialogues = io::load_dialogues(&a.dialogues, &schema)?;
    let examples = corpus::make_training_examples(&dialogues, &schema, a.task.task())?;
    let lines: Vec<String> = match &examples {
        Examples::Mrc(v) => v.iter().map(serde_json::to_string).collect::<Result<_, _>>(),
        Examples::Wd(v) => v.iter().map(serde_json::to_string).collect::<Result<_, _>>(),
        Examples::Classifier(v) => v.iter().map(serde_json::to_string).collect::<Result<_, _>>(),
    }
    .map_err(anyhow::Error::from)?;
    let mut text = lines.join("\n");
    text.push('\n');
    io::write_text(&a.out, &text)?;
    log::info!("{} dialogues, {} examples", dialogues.len(), examples.len());
    println!("dialogues={} examples={}", dialogues.len(), examples.len());
    Ok(())
}

fn train(a: &TrainArgs) -> CmdResult {
    require("schema", &a.schema)?;
    require("dialogues", &a.dialogues)?;
    if let Some(l) = &a.lexicon {
        require("lexicon", l)?;
    }
    if a.task == TaskArg::Wd && a.lexicon.is_none() {
        return Err(Failure::Usage("--lexicon is required to train the ranker".into()));
    }
    let config = a.train_config();
    let enc_config = a.encoder.config(a.seed);
    let hidden = a.hidden.unwrap_or(match a.task {
        TaskArg::Mrc => mrc::DEFAULT_HIDDEN,
        _ => wd::DEFAULT_DEEP,
    });
    let mut cfg = RunConfig::new("train");
    cfg.seed = Some(a.seed);
    cfg.encoder = Some(&enc_config);
    cfg.train = Some(&config);
    cfg.paths.extend([("schema", a.schema.as_path()), ("dialogues", &a.dialogues), ("out", &a.out)]);
    if let Some(l) = &a.lexicon {
        cfg.paths.insert("lexicon", l);
    }
    cfg.options.insert("task", serde_json::json!(a.task.head().name()));
    cfg.options.insert("hidden", serde_json::json!(hidden));
    if a.task == TaskArg::Wd {
        cfg.options.insert("negatives", serde_json::json!(a.negatives));
        cfg.options.insert("use_wide", serde_json::json!(!a.deep_only));
    }
    cfg.echo();

    let schema = io::load_schema(&a.schema)?;
    let dialogues = io::load_dialogues(&a.dialogues, &schema)?;
    let encoder = open_encoder(&enc_config)?;
    let started = Instant::now();
    let log_epoch = |epoch: usize, loss: f64| eprintln!("epoch {:>4} loss {loss:.6}", epoch + 1);
    let examples = corpus::make_training_examples(&dialogues, &schema, a.task.task())?;
    log::info!("{} training examples", examples.len());

    let checkpoint = match (a.task, examples) {
        (TaskArg::Mrc, Examples::Mrc(ex)) => {
            let (params, log) = mrc::train(&ex, encoder.as_ref(), hidden, &config, log_epoch)?;
            Checkpoint::mrc(params, config.clone(), enc_config.clone(), log.epoch_loss)
        }
        (TaskArg::Wd, Examples::Wd(ex)) => {
            let lexicon = io::load_lexicon(a.lexicon.as_deref().expect("checked"))?;
            let items = wd::featurize(&ex, &dialogues, &schema, &lexicon, encoder.as_ref())?;
            let options = WdTrainOptions { deep: hidden, use_wide: !a.deep_only, negatives: Some(a.negatives) };
            let (params, log) = wd::train(&items, enc_config.dim, &options, &config, log_epoch)?;
            log::info!("training candidate accuracy {:.4}", wd::candidate_accuracy(&items, &params)?);
            Checkpoint::wd(HeadKind::Wd, params, config.clone(), enc_config.clone(), log.epoch_loss)
        }
        (task @ (TaskArg::Intent | TaskArg::Reqslot), Examples::Classifier(ex)) => {
            let items = wd::featurize_classifier(&ex, encoder.as_ref())?;
            let options = WdTrainOptions { deep: hidden, ..WdTrainOptions::deep_only() };
            let (params, log) = wd::train(&items, enc_config.dim, &options, &config, log_epoch)?;
            log::info!(
                "training accuracy {:.4}",
                wd::binary_accuracy(&items, &params, tracker::INTENT_THRESHOLD)?
            );
            Checkpoint::wd(task.head(), params, config.clone(), enc_config.clone(), log.epoch_loss)
        }
        _ => return Err(anyhow!("example kind does not match the task").into()),
    };
    checkpoint.save(&a.out)?;
    log::info!("trained in {:.1?}", started.elapsed());
    Ok(())
}

fn load_rules(path: Option<&Path>, schema: &sgdst_core::schema::Schema) -> anyhow::Result<Vec<ResetRule>> {
    Ok(match path {
        Some(p) => io::load_rules(p, schema)?,
        None => Vec::new(),
    })
}

fn predict(a: &PredictArgs) -> CmdResult {
    require("schema", &a.schema)?;
    require("dialogues", &a.dialogues)?;
    if let Some(r) = &a.rules {
        require("rules", r)?;
    }
    let oracle = a.models == "oracle";
    if !oracle {
        require("models", Path::new(&a.models))?;
    }
    let bundle = if oracle {
        None
    } else {
        let mut b = checkpoint::load_bundle(Path::new(&a.models))?;
        override_backend(&mut b.encoder, a.encoder.as_deref());
        Some(b)
    };
    let mut cfg = RunConfig::new("predict");
    cfg.seed = Some(a.seed);
    cfg.encoder = bundle.as_ref().map(|b| &b.encoder);
    cfg.paths.extend([("schema", a.schema.as_path()), ("dialogues", &a.dialogues), ("out", &a.out)]);
    if let Some(r) = &a.rules {
        cfg.paths.insert("rules", r);
    }
    cfg.options.insert("models", serde_json::json!(a.models));
    cfg.echo();

    let schema = io::load_schema(&a.schema)?;
    let dialogues = io::load_dialogues(&a.dialogues, &schema)?;
    let rules = load_rules(a.rules.as_deref(), &schema)?;
    let started = Instant::now();
    let predictions = match &bundle {
        None => tracker::predict_corpus(&OracleModels, &dialogues, &schema, &rules)?,
        Some(b) => {
            let encoder = open_encoder(&b.encoder)?;
            let models = LearnedModels::new(encoder.as_ref(), b)?;
            tracker::predict_corpus(&models, &dialogues, &schema, &rules)?
        }
    };
    io::write_dialogues(&a.out, &predictions)?;
    log::info!("tracked {} dialogues in {:.1?}", predictions.len(), started.elapsed());
    Ok(())
}

fn evaluate(a: &EvaluateArgs) -> CmdResult {
    require("gold", &a.gold)?;
    require("pred", &a.pred)?;
    require("schema", &a.schema)?;
    let mut cfg = RunConfig::new("evaluate");
    cfg.paths.extend([("gold", a.gold.as_path()), ("pred", &a.pred), ("schema", &a.schema)]);
    cfg.options.insert("strict_binary", serde_json::json!(a.strict_binary));
    if let Some(s) = &a.seen {
        cfg.options.insert("seen", serde_json::json!(s));
    }
    if let Some(r) = &a.report {
        cfg.paths.insert("report", r);
    }
    cfg.echo();

    let schema = io::load_schema(&a.schema)?;
    let gold = io::load_dialogues(&a.gold, &schema)?;
    let pred = io::load_dialogues(&a.pred, &schema)?;
    let seen: Option<BTreeSet<String>> = a.seen.as_ref().map(|s| s.iter().cloned().collect());
    let report = metrics::evaluate(&pred, &gold, &schema, EvalOptions { strict_binary: a.strict_binary }, seen.as_ref())?;
    print!("{}\n{}", report.table(), report.key_values());
    if let Some(r) = &a.report {
        io::write_json(r, &report)?;
    }
    Ok(())
}

fn parse_provider(spec: &str) -> Result<(String, ProviderKind, PathBuf), Failure> {
    let mut parts = spec.splitn(3, ':');
    let (Some(name), Some(kind), Some(path)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Failure::Usage(format!("--providers: `{spec}` is not name:kind:path")));
    };
    let kind = match kind {
        "synonym-api" => ProviderKind::SynonymApi,
        "back-translation" => ProviderKind::BackTranslation,
        other => {
            return Err(Failure::Usage(format!(
                "--providers: unknown kind `{other}`, expected synonym-api or back-translation"
            )))
        }
    };
    let path = PathBuf::from(path);
    require("providers", &path)?;
    Ok((name.to_string(), kind, path))
}

fn augment_lexicon(a: &AugmentArgs) -> CmdResult {
    require("schema", &a.schema)?;
    let specs = a.providers.iter().map(|s| parse_provider(s)).collect::<Result<Vec<_>, _>>()?;
    let mut cfg = RunConfig::new("augment-lexicon");
    cfg.paths.extend([("schema", a.schema.as_path()), ("out", &a.out)]);
    cfg.options.insert("providers", serde_json::json!(a.providers));
    cfg.options.insert("k", serde_json::json!(a.k));
    cfg.options.insert("symmetric", serde_json::json!(a.symmetric));
    cfg.echo();

    let schema = io::load_schema(&a.schema)?;
    let providers = specs
        .iter()
        .map(|(name, kind, path)| io::load_provider(path, name, *kind))
        .collect::<crate::Result<Vec<_>>>()?;
    let refs: Vec<&dyn ExpansionProvider> = providers.iter().map(|p| p as &dyn ExpansionProvider).collect();
    let mut lexicon = augment::build_lexicon(&schema, &refs, a.k)?;
    lexicon.set_symmetric(a.symmetric);
    io::write_lexicon(&a.out, &lexicon)?;
    log::info!("{} lexicon entries", lexicon.len());
    Ok(())
}

fn run_repl(a: &ReplArgs) -> CmdResult {
    require("schema", &a.schema)?;
    if let Some(m) = &a.models {
        require("models", m)?;
    }
    if let Some(r) = &a.rules {
        require("rules", r)?;
    }
    let mut cfg = RunConfig::new("repl");
    cfg.paths.insert("schema", &a.schema);
    if let Some(m) = &a.models {
        cfg.paths.insert("models", m);
    }
    if let Some(r) = &a.rules {
        cfg.paths.insert("rules", r);
    }
    cfg.echo();

    let schema = io::load_schema(&a.schema)?;
    let rules = load_rules(a.rules.as_deref(), &schema)?;
    let mut session = repl::Session::new(schema, rules, a.encoder.clone());
    if let Some(s) = &a.service {
        session.select_service(s).map_err(|e| Failure::Usage(format!("--service: {e}")))?;
    }
    if let Some(m) = &a.models {
        session.load(m)?;
    }
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    session.run(stdin.lock(), stdout.lock()).map_err(anyhow::Error::from)?;
    Ok(())
}

fn serve_encoder(a: &ServeArgs) -> CmdResult {
    let config = EncoderConfig { dim: a.dim, seed: a.seed, backend: Backend::Baseline };
    let encoder = BaselineEncoder::new(config)?;
    let name = "sgdst-baseline";
    match a.tcp {
        None => {
            let stdin = std::io::stdin();
            let stdout = std::io::stdout();
            sidecar::serve(&encoder, name, stdin.lock(), stdout.lock()).map_err(anyhow::Error::from)?;
        }
        Some(port) => {
            let listener = TcpListener::bind(("127.0.0.1", port)).with_context(|| format!("binding port {port}"))?;
            eprintln!("listening on {}", listener.local_addr().map_err(anyhow::Error::from)?);
            std::thread::scope(|s| {
                for stream in listener.incoming() {
                    let Ok(stream) = stream else { continue };
                    let encoder = &encoder;
                    s.spawn(move || {
                        let Ok(reader) = stream.try_clone() else { return };
                        if let Err(e) = sidecar::serve(encoder, name, BufReader::new(reader), stream) {
                            log::warn!("connection ended: {e}");
                        }
                    });
                }
            });
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
    run(cli)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_train_flags() {
        let cli = Cli::try_parse_from([
            "sgdst", "train", "mrc", "--schema", "s.json", "--dialogues=d", "--out", "o.json", "--seed", "3", "--epochs", "7",
        ])
        .unwrap();
        let Command::Train(t) = cli.command else { panic!() };
        let c = t.train_config();
        assert_eq!((c.epochs, c.seed, c.batch_size), (7, 3, 16));
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(Cli::try_parse_from(["sgdst", "predict", "--schema", "s", "--dialogues", "d", "--models", "oracle", "--out", "o"])
            .is_err());
    }

    #[test]
    fn provider_specs() {
        assert!(matches!(parse_provider("a:bogus:x"), Err(Failure::Usage(_))));
        assert!(matches!(parse_provider("a"), Err(Failure::Usage(_))));
    }
}
