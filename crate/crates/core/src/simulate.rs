//! Seeded Monte Carlo harness: multinomial sampling, repeated-trial
//! experiments over a grid of sample sizes, and Haar-orbit averaging.
//!
//! Determinism contract: the master seed fully determines every random draw.
//! Each `(N index, repetition)` pair gets its own stream seed by a
//! counter-based mix, so trials are independent of execution order and the
//! emitted CSV is byte-identical however many threads run them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::estimators::{blue, cle, mle, BlueMode, Frequencies, MleOptions};
use crate::metrics::{weight_superop, WeightSpec};
use crate::opspace::{HermitianBasis, HermitianMatrix};
use crate::povm::{BlochVector, Povm, Solid};

/// One step of the SplitMix64 sequence; a cheap statistically solid mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for the `(lane, index)` cell of a seeded computation.
/// Order independent, so parallel trials reproduce exactly.
pub fn trial_seed(master: u64, lane: u64, index: u64) -> u64 {
    let a = splitmix64(master ^ lane.wrapping_mul(0xA076_1D64_78BD_642F));
    splitmix64(a ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// the `R` diagonal folded back into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix from the Hilbert-Schmidt ensemble, `G G^dag`
/// normalised.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    HermitianMatrix::hermitian_part(&(m / Complex64::new(tr, 0.0))).expect("square matrix")
}

/// Random state kept away from the boundary: a Hilbert-Schmidt draw mixed
/// with 10% of the completely mixed state.
pub fn random_interior(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    random_density(dim, rng)
        .scale(0.9)
        .add(&HermitianMatrix::maximally_mixed(dim).scale(0.1))
}

/// `U diag(eigenvalues) U^dag`.
pub fn rotated_state(eigenvalues: &[f64], u: &DMatrix<Complex64>) -> HermitianMatrix {
    let d = eigenvalues.len();
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(eigenvalues[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianMatrix::hermitian_part(&(u * diag * u.adjoint())).expect("square matrix")
}

/// Multinomial counts by the sequential conditional-binomial method:
/// exact, and O(outcomes) per draw independent of `n`.
pub fn sample_counts(probs: &[f64], n: u64, rng: &mut impl Rng) -> Result<Vec<u64>> {
    if probs.is_empty() {
        return Err(Error::InvalidProbabilities("empty vector".into()));
    }
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!(
            "entries must be nonnegative and sum to 1 (sum = {sum})"
        )));
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_n = n;
    let mut remaining_p = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining_n == 0 {
            break;
        }
        if i == probs.len() - 1 {
            counts[i] = remaining_n;
            break;
        }
        let cond = (p / remaining_p).clamp(0.0, 1.0);
        let draw = if cond >= 1.0 {
            remaining_n
        } else {
            Binomial::new(remaining_n, cond)
                .expect("valid binomial")
                .sample(rng)
        };
        counts[i] = draw;
        remaining_n -= draw;
        remaining_p = (remaining_p - p).max(0.0);
    }
    Ok(counts)
}

/// Which estimators an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    Cle,
    #[serde(alias = "blue1")]
    BlueOracle,
    #[serde(alias = "blue2")]
    BluePlugin,
    BlueTwostep,
    Mle,
}

impl EstimatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorSpec::Cle => "cle",
            EstimatorSpec::BlueOracle => "blue_oracle",
            EstimatorSpec::BluePlugin => "blue_plugin",
            EstimatorSpec::BlueTwostep => "blue_twostep",
            EstimatorSpec::Mle => "mle",
        }
    }
}

/// Per-trial figures of merit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureSpec {
    /// `N ||rho_hat - rho||_HS^2`
    ScaledMse,
    /// `N <<delta| W_Bures(rho) |delta>>`
    ScaledMsb,
    /// Same with the quantum Chernoff weighting.
    ScaledChernoff,
}

impl FigureSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FigureSpec::ScaledMse => "scaled_mse",
            FigureSpec::ScaledMsb => "scaled_msb",
            FigureSpec::ScaledChernoff => "scaled_chernoff",
        }
    }
}

/// Measurement selector: a built-in name (`"cube"`, `"sic-3"`, `"mub-5"`) or
/// a POVM JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PovmSpec {
    Builtin(String),
    File { file: PathBuf },
}

impl PovmSpec {
    pub fn resolve(&self) -> Result<Povm> {
        match self {
            PovmSpec::Builtin(name) => builtin_povm(name),
            PovmSpec::File { file } => Povm::from_json_file(file),
        }
    }
}

/// Parse a built-in measurement name: a platonic solid, `sic-<d>`, or
/// `mub-<d>`.
pub fn builtin_povm(name: &str) -> Result<Povm> {
    let name = name.trim();
    if let Some(d) = name.strip_prefix("sic-") {
        let dim: usize = d
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad SIC dimension in `{name}`")))?;
        return Povm::sic(dim, None);
    }
    if let Some(d) = name.strip_prefix("mub-") {
        let dim: usize = d
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad MUB dimension in `{name}`")))?;
        return Povm::mub(dim);
    }
    let solid: Solid = name.parse()?;
    Ok(Povm::platonic(solid))
}

/// True-state selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    /// Qubit Bloch vector `[x, y, z]`.
    Bloch([f64; 3]),
    /// The projector family `rho_r(s)`.
    Family { d: usize, r: usize, s: f64 },
    /// JSON file holding a `[[ [re, im], .. ], ..]` density matrix.
    File(PathBuf),
}

impl StateSpec {
    pub fn resolve(&self) -> Result<HermitianMatrix> {
        let rho = match self {
            StateSpec::Bloch([x, y, z]) => BlochVector::new(*x, *y, *z).state()?,
            StateSpec::Family { d, r, s } => crate::analytic::FamilyState::new(*d, *r, *s)?.state(),
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)?;
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidParameter(format!(
                        "state file {} is not a square matrix",
                        path.display()
                    )));
                }
                let m = DMatrix::from_fn(dim, dim, |i, j| {
                    Complex64::new(rows[i][j][0], rows[i][j][1])
                });
                HermitianMatrix::new(m)?
            }
        };
        rho.validate_state()?;
        Ok(rho)
    }
}

/// A complete, seeded description of a repeated-trial experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub povm: PovmSpec,
    pub state: StateSpec,
    pub estimators: Vec<EstimatorSpec>,
    pub n_grid: Vec<u64>,
    pub repetitions: u64,
    pub seed: u64,
    #[serde(default = "default_figures")]
    pub figures: Vec<FigureSpec>,
    /// Cap on worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Output directory for the CSV writers; `None` leaves it to the caller.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_figures() -> Vec<FigureSpec> {
    vec![FigureSpec::ScaledMse]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    fn validate(&self) -> Result<()> {
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter("no estimators configured".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter("n_grid must be nonempty, N >= 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
        }
        Ok(())
    }
}

/// One `(N, repetition, estimator-or-pair)` outcome: figure values plus the
/// wall time spent in the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub n: u64,
    pub rep: u64,
    /// Estimator name, or `"a:b"` for a pairwise-deviation record.
    pub estimator: String,
    pub figures: Vec<(String, f64)>,
    pub wall_time_s: f64,
}

/// Aggregated statistics of one `(N, estimator, figure)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub n: u64,
    pub estimator: String,
    pub figure: String,
    pub mean: f64,
    pub stderr: f64,
    pub reps: u64,
}

/// Run every `(N, repetition)` trial of the experiment: sample counts, run
/// each configured estimator, and record scaled figures of merit plus the
/// pairwise scaled deviations among estimators.
///
/// Estimator failures are recorded as an `error` figure on the offending row
/// and never abort the run. Records come back sorted by
/// `(N, repetition, estimator)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let povm = config.povm.resolve()?;
    let rho = config.state.resolve()?;
    let basis = HermitianBasis::gell_mann(povm.dim());
    let probs = povm.probabilities(&rho)?;
    if probs.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidProbabilities(
            "true state gives negative Born probabilities".into(),
        ));
    }

    // metric weights are fixed by the true state; build them once
    let mut weights = Vec::new();
    for fig in &config.figures {
        let spec = match fig {
            FigureSpec::ScaledMse => None,
            FigureSpec::ScaledMsb => Some(WeightSpec::Bures),
            FigureSpec::ScaledChernoff => Some(WeightSpec::Chernoff),
        };
        let w = match spec {
            None => None,
            Some(s) => Some(weight_superop(&rho, &s, &basis)?),
        };
        weights.push((*fig, w));
    }

    let cells: Vec<(usize, u64)> = (0..config.n_grid.len())
        .flat_map(|ni| (0..config.repetitions).map(move |rep| (ni, rep)))
        .collect();

    let run_cells = |cells: &[(usize, u64)]| -> Vec<TrialRecord> {
        cells
            .par_iter()
            .map(|&(ni, rep)| {
                run_trial(config, &povm, &rho, &basis, &probs, &weights, ni, rep)
            })
            .reduce(Vec::new, |mut a, mut b| {
                a.append(&mut b);
                a
            })
    };

    let mut records = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| run_cells(&cells)),
        None => run_cells(&cells),
    };
    records.sort_by(|a, b| {
        (a.n, a.rep, &a.estimator).cmp(&(b.n, b.rep, &b.estimator))
    });
    Ok(records)
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    config: &ExperimentConfig,
    povm: &Povm,
    rho: &HermitianMatrix,
    basis: &HermitianBasis,
    probs: &[f64],
    weights: &[(FigureSpec, Option<crate::opspace::Superoperator>)],
    ni: usize,
    rep: u64,
) -> Vec<TrialRecord> {
    let n = config.n_grid[ni];
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, ni as u64, rep));
    let counts = sample_counts(probs, n, &mut rng).expect("validated probabilities");
    let freqs = Frequencies::new(counts).expect("N >= 1");

    let mut records = Vec::new();
    let mut estimates: Vec<(EstimatorSpec, Option<HermitianMatrix>)> = Vec::new();
    for est in &config.estimators {
        let start = Instant::now();
        let outcome = match est {
            EstimatorSpec::Cle => cle(povm, &freqs, basis).map(|r| r.estimate),
            EstimatorSpec::BlueOracle => {
                blue(povm, &freqs, BlueMode::Oracle(rho), basis).map(|r| r.estimate)
            }
            EstimatorSpec::BluePlugin => {
                blue(povm, &freqs, BlueMode::Plugin, basis).map(|r| r.estimate)
            }
            EstimatorSpec::BlueTwostep => {
                blue(povm, &freqs, BlueMode::TwoStep, basis).map(|r| r.estimate)
            }
            EstimatorSpec::Mle => mle(povm, &freqs, MleOptions::default()).map(|r| r.estimate),
        };
        let wall = start.elapsed().as_secs_f64();
        match outcome {
            Ok(estimate) => {
                let delta = estimate.sub(rho);
                let mut figures = Vec::new();
                for (fig, w) in weights {
                    let value = match w {
                        None => n as f64 * delta.purity(),
                        Some(w) => {
                            let ket = basis.vectorize(&delta).expect("matching dimension");
                            n as f64 * ket.coords().dot(&(w.matrix() * ket.coords()))
                        }
                    };
                    figures.push((fig.name().to_string(), value));
                }
                records.push(TrialRecord {
                    n,
                    rep,
                    estimator: est.name().to_string(),
                    figures,
                    wall_time_s: wall,
                });
                estimates.push((*est, Some(estimate)));
            }
            Err(err) => {
                records.push(TrialRecord {
                    n,
                    rep,
                    estimator: est.name().to_string(),
                    figures: vec![("error".to_string(), 1.0)],
                    wall_time_s: wall,
                });
                // failures are rare; keep the message out of the hot path
                let _ = err;
                estimates.push((*est, None));
            }
        }
    }

    // pairwise scaled deviations among successful estimators
    for i in 0..estimates.len() {
        for j in (i + 1)..estimates.len() {
            if let (Some(a), Some(b)) = (&estimates[i].1, &estimates[j].1) {
                let dev = n as f64 * a.sub(b).purity();
                records.push(TrialRecord {
                    n,
                    rep,
                    estimator: format!("{}:{}", estimates[i].0.name(), estimates[j].0.name()),
                    figures: vec![("pairwise_scaled_mse".to_string(), dev)],
                    wall_time_s: 0.0,
                });
            }
        }
    }
    records
}

/// Group records by `(N, estimator, figure)` and report mean and standard
/// error of the mean.
pub fn aggregate(records: &[TrialRecord]) -> Vec<AggregateRow> {
    use std::collections::BTreeMap;
    let mut cells: BTreeMap<(u64, String, String), Vec<f64>> = BTreeMap::new();
    for r in records {
        for (figure, value) in &r.figures {
            cells
                .entry((r.n, r.estimator.clone(), figure.clone()))
                .or_default()
                .push(*value);
        }
    }
    cells
        .into_iter()
        .map(|((n, estimator, figure), values)| {
            let reps = values.len() as u64;
            let mean = values.iter().sum::<f64>() / reps as f64;
            let stderr = if reps > 1 {
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (reps as f64 - 1.0);
                (var / reps as f64).sqrt()
            } else {
                0.0
            };
            AggregateRow {
                n,
                estimator,
                figure,
                mean,
                stderr,
                reps,
            }
        })
        .collect()
}

/// Write per-trial rows as CSV with header `N,rep,estimator,figure,value`.
/// Floats print in shortest round-trip form, so identical runs are
/// byte-identical.
pub fn write_trials_csv(records: &[TrialRecord], writer: &mut impl Write) -> Result<()> {
    writeln!(writer, "N,rep,estimator,figure,value")?;
    for r in records {
        for (figure, value) in &r.figures {
            writeln!(writer, "{},{},{},{},{}", r.n, r.rep, r.estimator, figure, value)?;
        }
    }
    Ok(())
}

/// Write aggregate rows as CSV with header
/// `N,estimator,figure,mean,stderr,R`.
pub fn write_aggregate_csv(rows: &[AggregateRow], writer: &mut impl Write) -> Result<()> {
    writeln!(writer, "N,estimator,figure,mean,stderr,R")?;
    for r in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            r.n, r.estimator, r.figure, r.mean, r.stderr, r.reps
        )?;
    }
    Ok(())
}

/// Monte Carlo Haar average of a state functional over the unitary orbit of
/// a fixed spectrum. Returns `(mean, standard error)`; deterministic in the
/// seed regardless of thread count.
pub fn haar_average<F>(
    quantity: F,
    eigenvalues: &[f64],
    samples: usize,
    seed: u64,
) -> (f64, f64)
where
    F: Fn(&HermitianMatrix) -> f64 + Sync,
{
    assert!(samples >= 1, "need at least one sample");
    let dim = eigenvalues.len();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, 0x4841_4152, i as u64));
            let u = haar_unitary(dim, &mut rng);
            quantity(&rotated_state(eigenvalues, &u))
        })
        .collect();
    let mean = values.iter().sum::<f64>() / samples as f64;
    let stderr = if samples > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (samples as f64 - 1.0);
        (var / samples as f64).sqrt()
    } else {
        0.0
    };
    (mean, stderr)
}
