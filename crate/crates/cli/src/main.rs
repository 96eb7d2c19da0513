//! Command-line front end: build and validate POVMs, evaluate closed forms,
//! run estimators on count data, and execute the canned figure experiments.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags, malformed
//! files, unphysical inputs), 2 on numerical failures (boundary states,
//! degenerate determinants).

mod figures;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use qst::analytic::{
    covariant_blue_figures, covariant_canonical_figures, covariant_params, minimal_ic_bound,
    pure_state_limits, qubit_closed_forms, ClosedForm, QubitFigure, QubitMeasurement, QubitRecon,
};
use qst::estimators::{blue, cle, mle, BlueMode, Frequencies, MleOptions};
use qst::metrics::WeightSpec;
use qst::opspace::HermitianBasis;
use qst::povm::{BlochVector, Povm};
use qst::simulate::{
    aggregate, builtin_povm, run_experiment, write_aggregate_csv, write_trials_csv,
    ExperimentConfig,
};

#[derive(Parser)]
#[command(
    name = "qst",
    version,
    about = "Quantum state tomography: POVMs, estimators, figures of merit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect, validate, and export measurements.
    Povm {
        #[command(subcommand)]
        action: PovmAction,
    },
    /// Evaluate closed-form expressions.
    Analytic {
        #[command(subcommand)]
        action: AnalyticAction,
    },
    /// Estimate a state from measured counts.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment described by a JSON config.
    Simulate(SimulateArgs),
    /// Reproduce the canned figure datasets.
    Figures(FiguresArgs),
}

#[derive(Subcommand)]
enum PovmAction {
    /// Validate a measurement and print its frame diagnostics.
    Check {
        /// `builtin:<name>` (e.g. builtin:tetrahedron, builtin:sic-3,
        /// builtin:mub-5) or a POVM JSON file.
        source: String,
    },
    /// Write a measurement to a POVM JSON file.
    Export {
        /// `builtin:<name>` or a POVM JSON file.
        source: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AnalyticAction {
    /// Print the value of a named closed form.
    Eval(EvalArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// One of: sic_mse, mub_mse, covariant_mse, covariant_msb,
    /// covariant_chernoff, covariant_volume, covariant_log_volume,
    /// covariant_params, canonical_covariant_mse, canonical_covariant_msb,
    /// pure_state_limits, qubit_mse, qubit_msb, qubit_volume, qubit_avg_mse,
    /// qubit_avg_msb, qubit_avg_log_volume.
    #[arg(long)]
    formula: String,
    /// Hilbert-space dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Purity tr(rho^2) for the SIC/MUB forms.
    #[arg(long)]
    purity: Option<f64>,
    /// Rank of the projector family.
    #[arg(long)]
    r: Option<usize>,
    /// Mixing parameter of the projector family.
    #[arg(long)]
    s: Option<f64>,
    /// Qubit Bloch vector `x,y,z`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    bloch: Option<Vec<f64>>,
    /// Eigenvalue list for the canonical covariant forms, e.g. `0.5,0.3,0.2`.
    #[arg(long, value_delimiter = ',')]
    eigenvalues: Option<Vec<f64>>,
    /// Measurement for the qubit catalogue.
    #[arg(long)]
    measurement: Option<QubitMeasurementArg>,
    /// Reconstruction for the qubit catalogue.
    #[arg(long, default_value = "optimal")]
    recon: QubitReconArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum QubitMeasurementArg {
    Sic,
    Mub,
    Cube,
    Covariant,
    IsoCanonical,
}

impl From<QubitMeasurementArg> for QubitMeasurement {
    fn from(v: QubitMeasurementArg) -> Self {
        match v {
            QubitMeasurementArg::Sic => QubitMeasurement::Sic,
            QubitMeasurementArg::Mub => QubitMeasurement::Mub,
            QubitMeasurementArg::Cube => QubitMeasurement::Cube,
            QubitMeasurementArg::Covariant => QubitMeasurement::Covariant,
            QubitMeasurementArg::IsoCanonical => QubitMeasurement::IsoCanonical,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QubitReconArg {
    Canonical,
    Optimal,
}

impl From<QubitReconArg> for QubitRecon {
    fn from(v: QubitReconArg) -> Self {
        match v {
            QubitReconArg::Canonical => QubitRecon::Canonical,
            QubitReconArg::Optimal => QubitRecon::Optimal,
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// `builtin:<name>` or a POVM JSON file.
    #[arg(long)]
    povm: String,
    /// JSON file with the outcome counts, e.g. `[12, 7, 0, 31]`.
    #[arg(long)]
    counts: PathBuf,
    /// Which estimator to run.
    #[arg(long)]
    estimator: EstimatorArg,
    /// Plug-in flavour for the BLUE.
    #[arg(long, default_value = "plugin")]
    blue_mode: BlueModeArg,
    /// Density-matrix JSON file for the oracle BLUE.
    #[arg(long)]
    true_state: Option<PathBuf>,
    /// Maximum-likelihood iteration cap.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Maximum-likelihood stopping tolerance on the log-likelihood gain.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Cle,
    Blue,
    Mle,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlueModeArg {
    Oracle,
    Plugin,
    Twostep,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment description; see the README for the schema.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (falls back to the config's `output`, then
    /// `QST_OUT_DIR`, then the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Which canned dataset to produce.
    which: FigureId,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Repetitions per data point (fig1/fig3); defaults to the reduced 100
    /// (fig1) or 300 (fig3).
    #[arg(long)]
    reps: Option<u64>,
    /// Haar samples per point for fig4; default 2000.
    #[arg(long)]
    samples: Option<usize>,
    /// Restore the paper-scale repetition counts (1000 repetitions for fig1,
    /// 100000 Haar samples for fig4).
    #[arg(long)]
    paper_scale: bool,
    /// Output directory (falls back to `QST_OUT_DIR`, then the working
    /// directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureId {
    Fig1,
    Fig3,
    Fig4,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // usage problems are validation errors: exit 1
            let _ = err.print();
            std::process::exit(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err.downcast_ref::<qst::Error>() {
                Some(e) if e.is_numerical() => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Povm { action } => match action {
            PovmAction::Check { source } => povm_check(&source),
            PovmAction::Export { source, out } => povm_export(&source, out.as_deref()),
        },
        Command::Analytic { action } => match action {
            AnalyticAction::Eval(args) => analytic_eval(&args),
        },
        Command::Estimate(args) => estimate(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Figures(args) => figures::run(&args.into()),
    }
}

fn resolve_povm(source: &str) -> anyhow::Result<Povm> {
    if let Some(name) = source.strip_prefix("builtin:") {
        Ok(builtin_povm(name)?)
    } else {
        Ok(Povm::from_json_file(source.as_ref())?)
    }
}

fn povm_check(source: &str) -> anyhow::Result<()> {
    let povm = resolve_povm(source)?;
    let basis = HermitianBasis::gell_mann(povm.dim());
    let frame = povm.frame_superop(&basis)?;
    let ic = frame.rank(frame.default_rtol()) == povm.dim() * povm.dim();
    let (tight, residual) = povm.is_tight_ic();
    println!("family: {}", povm.family());
    println!("dim: {}", povm.dim());
    println!("outcomes: {}", povm.len());
    println!("IC: {ic}");
    if tight {
        println!("tight-IC: true (residual {residual:.3e})");
    } else if residual.is_finite() {
        println!("tight-IC: false (residual {residual:.3e})");
    } else {
        println!("tight-IC: false (outcomes not rank one)");
    }
    let spectrum: Vec<String> = frame
        .eigenvalues()
        .iter()
        .map(|e| format!("{}", sig6(*e)))
        .collect();
    println!("frame spectrum: [{}]", spectrum.join(", "));
    Ok(())
}

fn povm_export(source: &str, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let povm = resolve_povm(source)?;
    let text = povm.to_json();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Round to six significant digits for human-readable output.
fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mag = v.abs().log10().floor();
    let scale = 10f64.powf(5.0 - mag);
    (v * scale).round() / scale
}

fn analytic_eval(args: &EvalArgs) -> anyhow::Result<()> {
    let need = |opt: Option<f64>, name: &str| -> anyhow::Result<f64> {
        opt.ok_or_else(|| anyhow::anyhow!("--{name} is required for --formula {}", args.formula))
    };
    let need_usize = |opt: Option<usize>, name: &str| -> anyhow::Result<usize> {
        opt.ok_or_else(|| anyhow::anyhow!("--{name} is required for --formula {}", args.formula))
    };
    let covariant = |spec: &WeightSpec| -> anyhow::Result<qst::analytic::CovariantFigures> {
        let d = need_usize(args.d, "d")?;
        let r = need_usize(args.r, "r")?;
        let s = need(args.s, "s")?;
        Ok(covariant_blue_figures(d, r, s, spec)?)
    };
    let qubit = |figure: QubitFigure| -> anyhow::Result<f64> {
        let m = args
            .measurement
            .ok_or_else(|| anyhow::anyhow!("--measurement is required for qubit formulas"))?;
        let b = args
            .bloch
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("--bloch is required for qubit formulas"))?;
        let bloch = BlochVector::new(b[0], b[1], b[2]);
        match qubit_closed_forms(m.into(), &bloch, args.recon.into(), figure)? {
            ClosedForm::Value(v) => Ok(v),
            ClosedForm::NumericOnly => Err(anyhow::anyhow!(
                "no printed formula for this combination; use the numeric pipeline"
            )),
        }
    };

    match args.formula.as_str() {
        "sic_mse" | "minimal_ic_bound" => {
            let d = need_usize(args.d, "d")?;
            let t = need(args.purity, "purity")?;
            println!("{}", sig6(minimal_ic_bound(d, t)?));
        }
        "mub_mse" => {
            let d = need_usize(args.d, "d")? as f64;
            let t = need(args.purity, "purity")?;
            println!("{}", sig6((d + 1.0) * (d - t)));
        }
        "covariant_mse" => println!("{}", sig6(covariant(&WeightSpec::Hs)?.mse)),
        "covariant_msb" => println!("{}", sig6(covariant(&WeightSpec::Bures)?.msb)),
        "covariant_chernoff" => println!("{}", sig6(covariant(&WeightSpec::Chernoff)?.wmse)),
        "covariant_volume" => println!("{}", sig6(covariant(&WeightSpec::Hs)?.volume)),
        "covariant_log_volume" => println!("{}", sig6(covariant(&WeightSpec::Hs)?.log_volume)),
        "covariant_params" => {
            let d = need_usize(args.d, "d")?;
            let r = need_usize(args.r, "r")?;
            let s = need(args.s, "s")?;
            let p = covariant_params(d, r, s)?;
            println!(
                "{{\"a\": {}, \"b\": {}, \"c\": {}, \"beta\": {}}}",
                p.a, p.b, p.c, p.beta
            );
        }
        "canonical_covariant_mse" | "canonical_covariant_msb" => {
            let eigs = args
                .eigenvalues
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("--eigenvalues is required"))?;
            let f = covariant_canonical_figures(eigs, &WeightSpec::Bures)?;
            let v = if args.formula.ends_with("mse") {
                f.mse
            } else {
                f.msb
            };
            println!("{}", sig6(v));
        }
        "pure_state_limits" => {
            let d = need_usize(args.d, "d")?;
            let l = pure_state_limits(d)?;
            println!(
                "{{\"covariant_mse\": {}, \"covariant_mean_trace\": {}, \"covariant_mean_hs\": {}, \"minimal_mse\": {}, \"minimal_trace_factor\": {}}}",
                l.covariant_mse,
                l.covariant_mean_trace,
                l.covariant_mean_hs,
                l.minimal_mse,
                l.minimal_trace_factor
            );
        }
        "qubit_mse" => println!("{}", sig6(qubit(QubitFigure::Mse)?)),
        "qubit_msb" => println!("{}", sig6(qubit(QubitFigure::Msb)?)),
        "qubit_volume" => println!("{}", sig6(qubit(QubitFigure::Volume)?)),
        "qubit_avg_mse" => println!("{}", sig6(qubit(QubitFigure::AvgMse)?)),
        "qubit_avg_msb" => println!("{}", sig6(qubit(QubitFigure::AvgMsb)?)),
        "qubit_avg_log_volume" => println!("{}", sig6(qubit(QubitFigure::AvgLogVolume)?)),
        other => anyhow::bail!("unknown formula `{other}`"),
    }
    Ok(())
}

fn load_state(path: &std::path::Path) -> anyhow::Result<qst::opspace::HermitianMatrix> {
    let spec = qst::simulate::StateSpec::File(path.to_path_buf());
    Ok(spec.resolve()?)
}

fn estimate(args: &EstimateArgs) -> anyhow::Result<()> {
    let povm = resolve_povm(&args.povm)?;
    let counts: Vec<u64> = serde_json::from_str(&std::fs::read_to_string(&args.counts)?)?;
    if counts.len() != povm.len() {
        anyhow::bail!(
            "counts file has {} entries but the POVM has {} outcomes",
            counts.len(),
            povm.len()
        );
    }
    let freqs = Frequencies::new(counts)?;
    let basis = HermitianBasis::gell_mann(povm.dim());
    let result = match args.estimator {
        EstimatorArg::Cle => cle(&povm, &freqs, &basis)?,
        EstimatorArg::Blue => {
            let mode = match args.blue_mode {
                BlueModeArg::Plugin => BlueMode::Plugin,
                BlueModeArg::Twostep => BlueMode::TwoStep,
                BlueModeArg::Oracle => {
                    let path = args.true_state.as_ref().ok_or_else(|| {
                        anyhow::anyhow!("--true-state is required for --blue-mode oracle")
                    })?;
                    let rho = load_state(path)?;
                    let r = blue(&povm, &freqs, BlueMode::Oracle(&rho), &basis)?;
                    return print_estimate(&r);
                }
            };
            blue(&povm, &freqs, mode, &basis)?
        }
        EstimatorArg::Mle => mle(
            &povm,
            &freqs,
            MleOptions {
                max_iter: args.max_iter,
                tol: args.tol,
                ..MleOptions::default()
            },
        )?,
    };
    print_estimate(&result)
}

fn print_estimate(result: &qst::estimators::EstimationResult) -> anyhow::Result<()> {
    let rho = &result.estimate;
    let d = rho.dim();
    let matrix: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let z = rho.entries()[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let mut doc = serde_json::json!({
        "estimator": result.mode.to_string(),
        "dim": d,
        "estimate": matrix,
        "trace": rho.trace(),
        "purity": rho.purity(),
        "eigenvalues": rho.eigenvalues(),
    });
    if let Some(diag) = &result.diagnostics {
        doc["diagnostics"] = serde_json::json!({
            "iterations": diag.iterations,
            "final_residual": diag.final_residual,
            "converged": diag.converged,
        });
    }
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

/// Output directory resolution: flag, then config, then `QST_OUT_DIR`, then
/// the working directory.
fn out_dir(flag: Option<&std::path::Path>, config: Option<&std::path::Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = config {
        return p.to_path_buf();
    }
    if let Ok(p) = std::env::var("QST_OUT_DIR") {
        return PathBuf::from(p);
    }
    PathBuf::from(".")
}

fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig::from_json_file(&args.config)?;
    let dir = out_dir(args.out.as_deref(), config.output.as_deref());
    std::fs::create_dir_all(&dir)?;
    let records = run_experiment(&config)?;
    let mut trials = Vec::new();
    write_trials_csv(&records, &mut trials)?;
    std::fs::write(dir.join("trials.csv"), trials)?;
    let mut agg = Vec::new();
    write_aggregate_csv(&aggregate(&records), &mut agg)?;
    std::fs::write(dir.join("aggregate.csv"), agg)?;
    println!(
        "wrote {} and {}",
        dir.join("trials.csv").display(),
        dir.join("aggregate.csv").display()
    );
    Ok(())
}

pub(crate) struct FigureRequest {
    pub which: FigureKind,
    pub seed: u64,
    pub reps: Option<u64>,
    pub samples: Option<usize>,
    pub paper_scale: bool,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum FigureKind {
    EstimatorComparison,
    UncertaintyEllipses,
    HaarAverages,
}

impl From<FiguresArgs> for FigureRequest {
    fn from(args: FiguresArgs) -> Self {
        FigureRequest {
            which: match args.which {
                FigureId::Fig1 => FigureKind::EstimatorComparison,
                FigureId::Fig3 => FigureKind::UncertaintyEllipses,
                FigureId::Fig4 => FigureKind::HaarAverages,
            },
            seed: args.seed,
            reps: args.reps,
            samples: args.samples,
            paper_scale: args.paper_scale,
            out: out_dir(args.out.as_deref(), None),
            threads: args.threads,
        }
    }
}
