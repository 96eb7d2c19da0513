//! Canned figure-reproduction experiments.
//!
//! * `fig1`: scaled MSEs of the CLE, both BLUE flavours, and the MLE for the
//!   cube measurement on a fixed qubit state, over a logarithmic grid of
//!   sample sizes, with pairwise estimator deviations.
//! * `fig3`: scatter of Bloch-plane estimates from repeated mutually
//!   unbiased measurements on a family of states, comparing canonical and
//!   optimal reconstruction (the uncertainty-ellipse data).
//! * `fig4`: Haar averages of the optimal-reconstruction MSE, MSB, and log
//!   ellipsoid volume for the SIC, MUB, and cube measurements against the
//!   covariant and isotropic-canonical closed forms.

use std::io::Write as _;
use std::path::Path;

use qst::analytic::{qubit_closed_forms, QubitFigure, QubitMeasurement, QubitRecon};
use qst::estimators::{blue, cle, BlueMode, Frequencies};
use qst::metrics::{ellipsoid_volume, weight_superop, wmse, WeightSpec};
use qst::opspace::HermitianBasis;
use qst::povm::{BlochVector, Povm, Solid, BOUNDARY_EPS};
use qst::simulate::{
    aggregate, haar_unitary, rotated_state, run_experiment, sample_counts, trial_seed,
    write_aggregate_csv, write_trials_csv, EstimatorSpec, ExperimentConfig, FigureSpec, PovmSpec,
    StateSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{FigureKind, FigureRequest};

/// The random Bloch vector used throughout the estimator-comparison figure.
pub const COMPARISON_BLOCH: [f64; 3] = [0.6886, 0.1137, -0.5025];

/// Logarithmic sample-size grid `10^2 .. 10^5` in half-decade steps.
pub fn default_n_grid() -> Vec<u64> {
    (0..7).map(|k| 10f64.powf(2.0 + 0.5 * k as f64).round() as u64).collect()
}

pub fn run(request: &FigureRequest) -> anyhow::Result<()> {
    std::fs::create_dir_all(&request.out)?;
    match request.which {
        FigureKind::EstimatorComparison => estimator_comparison(request),
        FigureKind::UncertaintyEllipses => uncertainty_ellipses(request),
        FigureKind::HaarAverages => haar_averages(request),
    }
}

/// Build the fig1 experiment config so tests can run it in-process.
pub fn comparison_config(seed: u64, reps: u64, threads: Option<usize>) -> ExperimentConfig {
    ExperimentConfig {
        povm: PovmSpec::Builtin("cube".into()),
        state: StateSpec::Bloch(COMPARISON_BLOCH),
        estimators: vec![
            EstimatorSpec::Cle,
            EstimatorSpec::BlueOracle,
            EstimatorSpec::BluePlugin,
            EstimatorSpec::Mle,
        ],
        n_grid: default_n_grid(),
        repetitions: reps,
        seed,
        figures: vec![FigureSpec::ScaledMse],
        threads,
        output: None,
    }
}

fn estimator_comparison(request: &FigureRequest) -> anyhow::Result<()> {
    let reps = request
        .reps
        .unwrap_or(if request.paper_scale { 1000 } else { 100 });
    let config = comparison_config(request.seed, reps, request.threads);
    let records = run_experiment(&config)?;
    write_csv_pair(&request.out, "fig1", &records)?;
    Ok(())
}

fn write_csv_pair(
    dir: &Path,
    stem: &str,
    records: &[qst::simulate::TrialRecord],
) -> anyhow::Result<()> {
    let mut trials = Vec::new();
    write_trials_csv(records, &mut trials)?;
    let trials_path = dir.join(format!("{stem}_trials.csv"));
    std::fs::write(&trials_path, trials)?;
    let mut agg = Vec::new();
    write_aggregate_csv(&aggregate(records), &mut agg)?;
    let agg_path = dir.join(format!("{stem}_aggregate.csv"));
    std::fs::write(&agg_path, agg)?;
    println!("wrote {} and {}", trials_path.display(), agg_path.display());
    Ok(())
}

fn uncertainty_ellipses(request: &FigureRequest) -> anyhow::Result<()> {
    let reps = request.reps.unwrap_or(300);
    let shots = 300u64;
    // quarter arc of radius 0.8 in the x-z plane
    let states: Vec<[f64; 2]> = (0..5)
        .map(|k| {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 4.0;
            [0.8 * theta.sin(), 0.8 * theta.cos()]
        })
        .collect();
    let povm = Povm::platonic(Solid::Octahedron);
    let basis = HermitianBasis::gell_mann(2);

    let cells: Vec<(usize, u64)> = (0..states.len())
        .flat_map(|si| (0..reps).map(move |rep| (si, rep)))
        .collect();
    let seed = request.seed;
    let run_cells = || -> Vec<(usize, u64, f64, f64, f64, f64)> {
        cells
            .par_iter()
            .map(|&(si, rep)| {
                let [sx, sz] = states[si];
                let rho = BlochVector::new(sx, 0.0, sz).state().expect("in ball");
                let probs = povm.probabilities(&rho).expect("qubit state");
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, si as u64, rep));
                let counts = sample_counts(&probs, shots, &mut rng).expect("valid probs");
                let freqs = Frequencies::new(counts).expect("nonzero shots");
                let canonical = cle(&povm, &freqs, &basis).expect("octahedron is IC");
                let optimal = blue(&povm, &freqs, BlueMode::Plugin, &basis)
                    .expect("regularized plugin frame");
                let bc = BlochVector::from_state(&canonical.estimate).expect("qubit");
                let bo = BlochVector::from_state(&optimal.estimate).expect("qubit");
                (si, rep, bc.x, bc.z, bo.x, bo.z)
            })
            .collect()
    };
    let mut rows = match request.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(run_cells),
        None => run_cells(),
    };
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let mut out = Vec::new();
    writeln!(out, "state_x,state_z,rep,estimator,est_x,est_z")?;
    for (si, rep, cx, cz, ox, oz) in rows {
        let [sx, sz] = states[si];
        writeln!(out, "{sx},{sz},{rep},cle,{cx},{cz}")?;
        writeln!(out, "{sx},{sz},{rep},blue_plugin,{ox},{oz}")?;
    }
    let path = request.out.join("fig3_points.csv");
    std::fs::write(&path, out)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Haar-orbit means of the optimal-reconstruction figures for one
/// measurement at fixed spectrum, with the standard error of each mean.
/// Sampling is deterministic in `(seed, lane)` regardless of thread count.
pub fn haar_blue_figures(
    povm: &Povm,
    s: f64,
    samples: usize,
    seed: u64,
    lane: u64,
) -> ([f64; 3], [f64; 3]) {
    let basis = HermitianBasis::gell_mann(2);
    let eigenvalues = [(1.0 + s) / 2.0, (1.0 - s) / 2.0];
    let values: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, lane, i as u64));
            let u = haar_unitary(2, &mut rng);
            let rho = rotated_state(&eigenvalues, &u);
            let f = povm
                .frame_superop_at(&rho, &basis, BOUNDARY_EPS)
                .expect("interior state");
            let fbar = f.bar_restrict();
            let c = fbar.pinv(fbar.default_rtol());
            let mse = c.trace();
            let w = weight_superop(&rho, &WeightSpec::Bures, &basis).expect("interior state");
            let msb = wmse(&c, &w);
            let log_volume = ellipsoid_volume(&c, 2).expect("positive determinant").ln();
            [mse, msb, log_volume]
        })
        .collect();
    let mut mean = [0.0f64; 3];
    for v in &values {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= samples as f64;
    }
    let mut stderr = [0.0f64; 3];
    if samples > 1 {
        for v in &values {
            for k in 0..3 {
                stderr[k] += (v[k] - mean[k]) * (v[k] - mean[k]);
            }
        }
        for e in &mut stderr {
            *e = (*e / (samples as f64 - 1.0) / samples as f64).sqrt();
        }
    }
    (mean, stderr)
}

fn haar_averages(request: &FigureRequest) -> anyhow::Result<()> {
    let samples = request
        .samples
        .unwrap_or(if request.paper_scale { 100_000 } else { 2000 });
    let s_grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let measured: Vec<(&str, QubitMeasurement, Povm)> = vec![
        ("sic", QubitMeasurement::Sic, Povm::platonic(Solid::Tetrahedron)),
        ("mub", QubitMeasurement::Mub, Povm::platonic(Solid::Octahedron)),
        ("cube", QubitMeasurement::Cube, Povm::platonic(Solid::Cube)),
    ];
    let figure_names = ["avg_mse", "avg_msb", "avg_log_volume"];
    let figures = [
        QubitFigure::AvgMse,
        QubitFigure::AvgMsb,
        QubitFigure::AvgLogVolume,
    ];

    let mut out = Vec::new();
    writeln!(out, "s,measurement,figure,mc_mean,mc_stderr,closed_form")?;
    let body = || -> anyhow::Result<Vec<u8>> {
        let mut out = Vec::new();
        for (si, &s) in s_grid.iter().enumerate() {
            let bloch = BlochVector::new(0.0, 0.0, s);
            for (mi, (name, tag, povm)) in measured.iter().enumerate() {
                let lane = (si * measured.len() + mi) as u64;
                let (mean, stderr) = haar_blue_figures(povm, s, samples, request.seed, lane);
                for k in 0..3 {
                    let closed =
                        qubit_closed_forms(*tag, &bloch, QubitRecon::Optimal, figures[k])?;
                    let closed_text = match closed.value() {
                        Some(v) => format!("{v}"),
                        None => String::new(),
                    };
                    writeln!(
                        out,
                        "{s},{name},{},{},{},{closed_text}",
                        figure_names[k], mean[k], stderr[k]
                    )?;
                }
            }
            // closed-form-only reference curves
            for (name, tag) in [
                ("covariant", QubitMeasurement::Covariant),
                ("iso_canonical", QubitMeasurement::IsoCanonical),
            ] {
                for k in 0..3 {
                    let closed = qubit_closed_forms(tag, &bloch, QubitRecon::Optimal, figures[k])?;
                    let closed_text = match closed.value() {
                        Some(v) => format!("{v}"),
                        None => String::new(),
                    };
                    writeln!(out, "{s},{name},{},,,{closed_text}", figure_names[k])?;
                }
            }
        }
        Ok(out)
    };
    let rows = match request.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(body)?,
        None => body()?,
    };
    out.extend(rows);
    let path = request.out.join("fig4_averages.csv");
    std::fs::write(&path, out)?;
    println!("wrote {}", path.display());
    Ok(())
}
