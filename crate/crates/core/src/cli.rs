//! Command-line front end: `train`, `predict`, `eval` and `synth`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or model error, 3 solver
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{
    gen_subspace_data, gen_xor_subspaces, load_dataset, save_dataset, train_validation_split,
    LabeledDataset, LoadOptions,
};
use crate::error::Error;
use crate::io::{load_model, save_model};
use crate::model::predict_proba;
use crate::report::{
    evaluate, format_eval_report, format_train_report, GapRequest, DEFAULT_REPORT_ETA,
};
use crate::solvers::{train, SolverConfig, SolverKind, Tradeoff};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sdpm",
    version,
    about = "Semidefinite probabilistic class models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model and write it as an SDPM1 file.
    Train(TrainArgs),
    /// Write the predicted label and class probabilities for every row.
    Predict(PredictArgs),
    /// Report accuracy, margins and loss bounds.
    Eval(EvalArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Maxmargin,
    Bayes,
    Mle,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Maxmargin => SolverKind::MaxMargin,
            SolverArg::Bayes => SolverKind::Bayes,
            SolverArg::Mle => SolverKind::Mle,
        }
    }
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Keep this fraction for training and use the rest as validation.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverArg,
    #[arg(long, conflicts_with = "nu")]
    beta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of classes, when larger than the largest label in the data.
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    split: SplitArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Margin-loss parameter for reporting.
    #[arg(long, default_value_t = DEFAULT_REPORT_ETA)]
    eta: f64,
    /// Two 1-based labels, e.g. `1,2`.
    #[arg(long)]
    gap_classes: Option<String>,
    /// Ascending comma-separated thresholds in [0, 1].
    #[arg(long, requires = "gap_classes")]
    gap_thresholds: Option<String>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    split: SplitArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SynthKind {
    Xor,
    Subspace,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Points per class.
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Eigenvalue spread of the ground truth (subspace kind only).
    #[arg(long, default_value_t = 0.0)]
    spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Where to write the generating model (subspace kind only).
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn usage_from(err: Error) -> Self {
        Failure::usage(err.to_string())
    }

    fn data(err: Error) -> Self {
        Failure {
            code: EXIT_DATA,
            message: err.to_string(),
        }
    }

    fn solver(err: Error) -> Self {
        Failure {
            code: EXIT_SOLVER,
            message: err.to_string(),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against the given output streams and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_split(
    path: &Path,
    options: &LoadOptions,
    split: &SplitArgs,
    keep_train: bool,
) -> std::result::Result<LabeledDataset, Failure> {
    let data = load_dataset(path, options).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    match split.split {
        None => Ok(data),
        Some(fraction) => {
            let (train, validation) =
                train_validation_split(&data, fraction, split.split_seed).map_err(Failure::data)?;
            Ok(if keep_train { train } else { validation })
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    std::fs::write(path, contents).map_err(|e| Failure::data(e.into()))
}

fn cmd_train(args: TrainArgs) -> CliResult {
    let kind = SolverKind::from(args.solver);
    let tradeoff = match (args.beta, args.nu) {
        (Some(_), Some(_)) => return Err(Failure::usage("--beta and --nu are mutually exclusive")),
        (Some(b), None) => Some(Tradeoff::Beta(b)),
        (None, Some(v)) => Some(Tradeoff::Nu(v)),
        (None, None) => None,
    };
    if kind == SolverKind::MaxMargin && tradeoff.is_none() {
        return Err(Failure::usage(
            "maxmargin needs exactly one of --beta or --nu",
        ));
    }
    if !(args.step > 0.0) {
        return Err(Failure::usage("--step must be positive"));
    }
    let options = LoadOptions {
        num_classes: args.classes,
    };
    let data = load_split(&args.data, &options, &args.split, true)?;
    let cfg = SolverConfig {
        tradeoff,
        step0: args.step,
        max_iters: args.iters,
        seed: args.seed,
        ..Default::default()
    };
    let (params, report) = train(kind, &data, &cfg).map_err(Failure::solver)?;
    save_model(&params, &args.out).map_err(Failure::data)?;
    if let Some(path) = &args.report {
        write_file(path, &format_train_report(&report))?;
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> CliResult {
    let params = load_model(&args.model).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", args.model.display()),
    })?;
    let options = LoadOptions::default();
    let data = load_split(
        &args.data,
        &options,
        &SplitArgs {
            split: None,
            split_seed: 0,
        },
        true,
    )?;
    if data.dim() != params.dim() {
        return Err(Failure {
            code: EXIT_DATA,
            message: format!(
                "model dimension {} does not match data dimension {}",
                params.dim(),
                data.dim()
            ),
        });
    }
    let mut text = String::new();
    for ex in data.examples() {
        let probs = predict_proba(&params, &ex.x).map_err(Failure::data)?;
        let label = crate::model::argmax(&probs) + 1;
        text.push_str(&label.to_string());
        for p in probs {
            // clamp for display only; +0.0 turns -0.0 into 0.0
            text.push_str(&format!(",{:.9}", p.clamp(0.0, 1.0) + 0.0));
        }
        text.push('\n');
    }
    write_file(&args.out, &text)
}

fn parse_list(text: &str, flag: &str) -> std::result::Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("{flag}: {t:?} is not a number")))
        })
        .collect()
}

fn cmd_eval(args: EvalArgs, out: &mut dyn Write) -> CliResult {
    if !(args.eta > 0.0) {
        return Err(Failure::usage("--eta must be positive"));
    }
    let gap = match &args.gap_classes {
        None => None,
        Some(classes) => {
            let labels: Vec<usize> = classes
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Failure::usage("--gap-classes takes two labels, e.g. 1,2"))?;
            let [a, b] = labels[..] else {
                return Err(Failure::usage("--gap-classes takes two labels, e.g. 1,2"));
            };
            let thresholds = match &args.gap_thresholds {
                Some(t) => parse_list(t, "--gap-thresholds")?,
                None => (0..=10).map(|i| i as f64 / 10.0).collect(),
            };
            if thresholds.iter().any(|t| !(0.0..=1.0).contains(t))
                || thresholds.windows(2).any(|w| w[0] > w[1])
            {
                return Err(Failure::usage(
                    "--gap-thresholds must be ascending within [0, 1]",
                ));
            }
            if a == 0 || b == 0 {
                return Err(Failure::data(Error::invalid(
                    "gap classes are 1-based labels",
                )));
            }
            Some(GapRequest {
                class_a: a - 1,
                class_b: b - 1,
                thresholds,
            })
        }
    };

    let params = load_model(&args.model).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", args.model.display()),
    })?;
    let data = load_split(&args.data, &LoadOptions::default(), &args.split, false)?;
    let report = evaluate(&params, &data, args.eta, gap.as_ref()).map_err(Failure::data)?;
    let text = format_eval_report(&report);
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::data(e.into()))?;
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> CliResult {
    match args.kind {
        SynthKind::Xor => {
            if args.d.is_some_and(|d| d != 2) || args.k.is_some_and(|k| k != 2) {
                return Err(Failure::usage("--kind xor fixes d = 2 and k = 2"));
            }
            if args.truth.is_some() {
                return Err(Failure::usage(
                    "--truth is only available for --kind subspace",
                ));
            }
            if args.spread != 0.0 {
                return Err(Failure::usage(
                    "--spread is only available for --kind subspace",
                ));
            }
            let data =
                gen_xor_subspaces(args.n, args.noise, args.seed).map_err(Failure::usage_from)?;
            save_dataset(&data, &args.out).map_err(Failure::data)
        }
        SynthKind::Subspace => {
            let d = args.d.unwrap_or(4);
            let k = args.k.unwrap_or(2);
            let (data, truth) = gen_subspace_data(d, k, args.n, args.spread, args.noise, args.seed)
                .map_err(Failure::usage_from)?;
            save_dataset(&data, &args.out).map_err(Failure::data)?;
            if let Some(path) = &args.truth {
                save_model(&truth, path).map_err(Failure::data)?;
            }
            Ok(())
        }
    }
}
