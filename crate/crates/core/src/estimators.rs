//! State estimators: canonical linear, best linear unbiased, and maximum
//! likelihood, with their scaled MSE matrices and Fisher information.
//!
//! All estimators share the linear form `rho_hat = sum_xi f_xi Theta_xi`; they
//! differ in the reconstruction operators. The canonical choice
//! `|Theta_xi>> = d F^{-1} |Pi_xi>> / tr(Pi_xi)` is statistics independent;
//! the optimal choice `|Theta_xi>> = p_xi^{-1} F(rho)^{-1} |Pi_xi>>` depends
//! on the true state and attains the Cramer-Rao bound, so plugging in the
//! true state (oracle), the observed frequencies (plugin), or a first-pass
//! estimate (two-step) yields three practical variants of the best linear
//! unbiased estimator. The maximum-likelihood estimator is found by a diluted
//! fixed-point iteration and is the only one guaranteed positive.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::opspace::{HermitianBasis, HermitianMatrix, Superoperator};
use crate::povm::{Povm, BOUNDARY_EPS};

/// Minimum eigenvalue required of the reference state in oracle mode.
pub const ORACLE_BOUNDARY_TOL: f64 = 1e-10;
/// Probability floor for the two-step plug-in reference; the first-pass
/// estimate is mixed toward the completely mixed state until every outcome
/// clears this, keeping the plugged frame well conditioned.
const TWOSTEP_FLOOR: f64 = 1e-6;

/// Measurement record: outcome counts from `N` independent shots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frequencies {
    counts: Vec<u64>,
    total: u64,
}

impl Frequencies {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParameter(
                "frequency record has zero total shots".into(),
            ));
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Relative frequencies `f_xi = n_xi / N`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Shrunk frequencies `(n_xi + 1/2) / (N + K/2)`; strictly positive even
    /// with empty outcomes, summing to one.
    pub fn regularized(&self) -> Vec<f64> {
        let k = self.counts.len() as f64;
        let denom = self.total as f64 + k / 2.0;
        self.counts
            .iter()
            .map(|&c| (c as f64 + 0.5) / denom)
            .collect()
    }
}

/// How the reconstruction operators were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconMode {
    Canonical,
    BlueOracle,
    BluePlugin,
    BlueTwostep,
    Restricted,
}

impl std::fmt::Display for ReconMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ReconMode::Canonical => "canonical",
            ReconMode::BlueOracle => "blue_oracle",
            ReconMode::BluePlugin => "blue_plugin",
            ReconMode::BlueTwostep => "blue_twostep",
            ReconMode::Restricted => "restricted",
        };
        write!(f, "{s}")
    }
}

/// A set of reconstruction operators `Theta_xi`.
#[derive(Debug, Clone)]
pub struct ReconstructionSet {
    mode: ReconMode,
    operators: Vec<HermitianMatrix>,
}

impl ReconstructionSet {
    pub fn mode(&self) -> ReconMode {
        self.mode
    }

    pub fn operators(&self) -> &[HermitianMatrix] {
        &self.operators
    }

    pub fn operator(&self, xi: usize) -> &HermitianMatrix {
        &self.operators[xi]
    }

    /// Linear estimate `sum_xi f_xi Theta_xi`.
    pub fn estimate(&self, freqs: &Frequencies) -> Result<HermitianMatrix> {
        if freqs.len() != self.operators.len() {
            return Err(Error::DimensionMismatch(freqs.len(), self.operators.len()));
        }
        let dim = self.operators[0].dim();
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        let n = freqs.total() as f64;
        for (theta, &c) in self.operators.iter().zip(freqs.counts()) {
            if c > 0 {
                acc += theta.entries() * Complex64::new(c as f64 / n, 0.0);
            }
        }
        HermitianMatrix::new(acc)
    }

    /// Maximum deviation of `sum_xi |Theta_xi>><<Pi_xi|` from the identity
    /// superoperator; zero for an unbiased set.
    pub fn unbiasedness_residual(&self, povm: &Povm, basis: &HermitianBasis) -> Result<f64> {
        let mut s = Superoperator::zeros(povm.dim());
        for (theta, pi) in self.operators.iter().zip(povm.outcomes()) {
            let kt = basis.vectorize(theta)?;
            let kp = basis.vectorize(pi)?;
            s.add_outer(1.0, &kt, &kp);
        }
        let diff = s.sub(&Superoperator::identity(povm.dim()));
        Ok(diff.matrix().abs().max())
    }
}

/// Canonical reconstruction operators
/// `|Theta_xi>> = d F^{-1} |Pi_xi>> / tr(Pi_xi)`.
///
/// Fails when the measurement is not informationally complete (singular
/// frame superoperator).
pub fn canonical_recon(povm: &Povm, basis: &HermitianBasis) -> Result<ReconstructionSet> {
    let f = povm.frame_superop(basis)?;
    let f_inv = f.try_inverse()?;
    let d = povm.dim() as f64;
    let mut operators = Vec::with_capacity(povm.len());
    for (pi, &w) in povm.outcomes().iter().zip(povm.weights()) {
        let ket = basis.vectorize(pi)?;
        let theta_ket = f_inv.apply(&ket);
        let theta = basis.devectorize(&theta_ket)?.scale(d / w);
        operators.push(theta);
    }
    Ok(ReconstructionSet {
        mode: ReconMode::Canonical,
        operators,
    })
}

/// Optimal reconstruction operators at a reference state,
/// `|Theta_xi>> = p_xi^{-1} F(rho)^{-1} |Pi_xi>>`.
pub fn optimal_recon(
    povm: &Povm,
    rho_ref: &HermitianMatrix,
    basis: &HermitianBasis,
) -> Result<ReconstructionSet> {
    let probs = povm.probabilities(rho_ref)?;
    optimal_recon_from_probs(povm, &probs, basis, ReconMode::BlueOracle)
}

/// Optimal reconstruction from explicit plug-in probabilities.
pub fn optimal_recon_from_probs(
    povm: &Povm,
    probs: &[f64],
    basis: &HermitianBasis,
    mode: ReconMode,
) -> Result<ReconstructionSet> {
    let f = povm.frame_superop_from_probs(probs, basis, BOUNDARY_EPS)?;
    let f_inv = f.try_inverse()?;
    let mut operators = Vec::with_capacity(povm.len());
    for (pi, &p) in povm.outcomes().iter().zip(probs) {
        let ket = basis.vectorize(pi)?;
        let theta = basis.devectorize(&f_inv.apply(&ket))?.scale(1.0 / p);
        operators.push(theta);
    }
    Ok(ReconstructionSet { mode, operators })
}

/// Diagnostics attached to a maximum-likelihood run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleDiagnostics {
    pub iterations: usize,
    /// Log-likelihood gain of the last accepted step.
    pub final_residual: f64,
    pub converged: bool,
}

/// An estimate together with its provenance.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub estimate: HermitianMatrix,
    pub mode: EstimatorKind,
    /// Scaled MSE matrix when the mode admits one analytically: the true
    /// state's `bar F(rho)^+` in oracle mode, its plug-in counterpart for the
    /// plugin and two-step modes. `None` for the CLE and MLE.
    pub scaled_mse_matrix: Option<Superoperator>,
    pub diagnostics: Option<MleDiagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Cle,
    BlueOracle,
    BluePlugin,
    BlueTwostep,
    Mle,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EstimatorKind::Cle => "cle",
            EstimatorKind::BlueOracle => "blue_oracle",
            EstimatorKind::BluePlugin => "blue_plugin",
            EstimatorKind::BlueTwostep => "blue_twostep",
            EstimatorKind::Mle => "mle",
        };
        write!(f, "{s}")
    }
}

/// Canonical linear estimator. Unit trace but possibly non-positive.
pub fn cle(povm: &Povm, freqs: &Frequencies, basis: &HermitianBasis) -> Result<EstimationResult> {
    let recon = canonical_recon(povm, basis)?;
    let estimate = recon.estimate(freqs)?;
    Ok(EstimationResult {
        estimate,
        mode: EstimatorKind::Cle,
        scaled_mse_matrix: None,
        diagnostics: None,
    })
}

/// Which state the optimal reconstruction operators are built from.
#[derive(Debug, Clone, Copy)]
pub enum BlueMode<'a> {
    /// Use the true state (available in simulations only).
    Oracle(&'a HermitianMatrix),
    /// Plug the observed frequencies into the frame superoperator.
    Plugin,
    /// Build a canonical first-pass estimate and plug its probabilities in.
    TwoStep,
}

/// How plugin mode treats frequencies that cannot back a frame directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroFrequencyPolicy {
    /// Replace `f_xi` with `(n_xi + 1/2)/(N + K/2)` before building the
    /// frame. Applied unconditionally, which also smooths small counts.
    #[default]
    Regularize,
    /// Use raw frequencies and fail on an empty outcome.
    Error,
}

/// Best linear unbiased estimator in one of its three plug-in flavours.
pub fn blue(
    povm: &Povm,
    freqs: &Frequencies,
    mode: BlueMode,
    basis: &HermitianBasis,
) -> Result<EstimationResult> {
    blue_with(povm, freqs, mode, basis, ZeroFrequencyPolicy::default())
}

/// [`blue`] with an explicit zero-frequency policy for plugin mode.
pub fn blue_with(
    povm: &Povm,
    freqs: &Frequencies,
    mode: BlueMode,
    basis: &HermitianBasis,
    policy: ZeroFrequencyPolicy,
) -> Result<EstimationResult> {
    let (probs, kind) = match mode {
        BlueMode::Oracle(rho_true) => {
            let min_eig = rho_true.eigenvalues()[0];
            if min_eig <= ORACLE_BOUNDARY_TOL {
                return Err(Error::BoundaryEigenvalue(min_eig));
            }
            (povm.probabilities(rho_true)?, EstimatorKind::BlueOracle)
        }
        BlueMode::Plugin => {
            let probs = match policy {
                ZeroFrequencyPolicy::Regularize => freqs.regularized(),
                ZeroFrequencyPolicy::Error => freqs.frequencies(),
            };
            (probs, EstimatorKind::BluePlugin)
        }
        BlueMode::TwoStep => {
            let pre = cle(povm, freqs, basis)?.estimate;
            let probs = interior_probabilities(povm, &pre)?;
            (probs, EstimatorKind::BlueTwostep)
        }
    };
    let recon_mode = match kind {
        EstimatorKind::BlueOracle => ReconMode::BlueOracle,
        EstimatorKind::BluePlugin => ReconMode::BluePlugin,
        _ => ReconMode::BlueTwostep,
    };
    let recon = optimal_recon_from_probs(povm, &probs, basis, recon_mode)?;
    let raw = recon.estimate(freqs)?;
    // Plugged-in probabilities of an overcomplete measurement are generally
    // not Born consistent, so tr(Theta_xi) = 1 only holds approximately and
    // the raw estimate can miss unit trace by O(1/N). Project back onto the
    // unit-trace hyperplane along the identity; the traceless coordinates,
    // which carry all the information, are untouched.
    let dim = povm.dim();
    let excess = raw.trace() - 1.0;
    let estimate = raw.sub(&HermitianMatrix::identity(dim).scale(excess / dim as f64));
    let f = povm.frame_superop_from_probs(&probs, basis, BOUNDARY_EPS)?;
    let c = f.bar_restrict().pinv(f.default_rtol());
    Ok(EstimationResult {
        estimate,
        mode: kind,
        scaled_mse_matrix: Some(c),
        diagnostics: None,
    })
}

/// Probabilities of a first-pass estimate, mixed toward the completely mixed
/// state just enough that every outcome probability clears [`TWOSTEP_FLOOR`].
fn interior_probabilities(povm: &Povm, pre: &HermitianMatrix) -> Result<Vec<f64>> {
    let raw = povm.probabilities(pre)?;
    let d = povm.dim() as f64;
    let mut t = 0.0f64;
    for (&q, &w) in raw.iter().zip(povm.weights()) {
        let mixed = w / d;
        if q < TWOSTEP_FLOOR && mixed > TWOSTEP_FLOOR {
            t = t.max((TWOSTEP_FLOOR - q) / (mixed - q));
        }
    }
    let t = t.min(1.0);
    Ok(raw
        .iter()
        .zip(povm.weights())
        .map(|(&q, &w)| (1.0 - t) * q + t * w / d)
        .collect())
}

/// Options for the diluted maximum-likelihood iteration.
#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Stop once the accepted log-likelihood gain drops below this.
    pub tol: f64,
    /// Initial dilution parameter; halved whenever a step would decrease the
    /// likelihood.
    pub dilution: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            tol: 1e-12,
            dilution: 1.0,
        }
    }
}

/// Maximum-likelihood estimator via the diluted `R rho R` fixed point:
/// `rho <- (1 + eps R) rho (1 + eps R) / (normalisation)` with
/// `R = sum_xi (f_xi / p_xi) Pi_xi`.
///
/// Starts from the completely mixed state, so every iterate is strictly
/// positive; accepted steps never decrease the log-likelihood. Failure to
/// converge within `max_iter` flags the result instead of erroring.
pub fn mle(povm: &Povm, freqs: &Frequencies, opts: MleOptions) -> Result<EstimationResult> {
    if freqs.len() != povm.len() {
        return Err(Error::DimensionMismatch(freqs.len(), povm.len()));
    }
    let dim = povm.dim();
    let counts = freqs.counts();
    let n = freqs.total() as f64;
    let log_likelihood = |probs: &[f64]| -> f64 {
        probs
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&p, &c)| c as f64 * p.max(f64::MIN_POSITIVE).ln())
            .sum()
    };

    let mut rho = HermitianMatrix::maximally_mixed(dim);
    let mut ll = log_likelihood(&povm.probabilities(&rho)?);
    let mut iterations = 0;
    let mut gain = f64::INFINITY;
    let mut converged = false;

    while iterations < opts.max_iter {
        let probs = povm.probabilities(&rho)?;
        // R = sum_xi (f_xi / p_xi) Pi_xi over observed outcomes
        let mut r = DMatrix::<Complex64>::zeros(dim, dim);
        for ((pi, &c), &p) in povm.outcomes().iter().zip(counts).zip(&probs) {
            if c > 0 {
                let w = (c as f64 / n) / p.max(f64::MIN_POSITIVE);
                r += pi.entries() * Complex64::new(w, 0.0);
            }
        }

        let mut eps = opts.dilution;
        let mut accepted = None;
        for _ in 0..64 {
            let a = DMatrix::<Complex64>::identity(dim, dim) + &r * Complex64::new(eps, 0.0);
            let cand = &a * rho.entries() * &a;
            let tr: f64 = (0..dim).map(|i| cand[(i, i)].re).sum();
            let cand = HermitianMatrix::hermitian_part(&(cand / Complex64::new(tr, 0.0)))?;
            let cand_ll = log_likelihood(&povm.probabilities(&cand)?);
            if cand_ll >= ll {
                accepted = Some((cand, cand_ll));
                break;
            }
            eps *= 0.5;
        }
        let Some((cand, cand_ll)) = accepted else {
            // no step length improves the likelihood: treat as converged
            converged = true;
            gain = 0.0;
            break;
        };
        gain = cand_ll - ll;
        rho = cand;
        ll = cand_ll;
        iterations += 1;
        if gain < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(EstimationResult {
        estimate: rho,
        mode: EstimatorKind::Mle,
        scaled_mse_matrix: None,
        diagnostics: Some(MleDiagnostics {
            iterations,
            final_residual: gain,
            converged,
        }),
    })
}

/// Scaled MSE matrix of a linear estimator by error propagation:
/// `C(rho) = sum_xi |Theta_xi>> p_xi <<Theta_xi| - |rho>><<rho|`.
pub fn mse_matrix(
    povm: &Povm,
    recon: &ReconstructionSet,
    rho: &HermitianMatrix,
    basis: &HermitianBasis,
) -> Result<Superoperator> {
    let probs = povm.probabilities(rho)?;
    let mut c = Superoperator::zeros(povm.dim());
    for (theta, &p) in recon.operators().iter().zip(&probs) {
        let ket = basis.vectorize(theta)?;
        c.add_outer(p, &ket, &ket);
    }
    let rho_ket = basis.vectorize(rho)?;
    c.add_outer(-1.0, &rho_ket, &rho_ket);
    Ok(c)
}

/// Fisher information matrix in the traceless operator basis,
/// `I_jk = sum_xi tr(E_j Pi_xi) tr(Pi_xi E_k) / p_xi`, a
/// `(d^2-1) x (d^2-1)` matrix equal to the traceless block of `F(rho)`.
pub fn fisher_matrix(
    povm: &Povm,
    rho: &HermitianMatrix,
    basis: &HermitianBasis,
) -> Result<DMatrix<f64>> {
    let f = povm.frame_superop_at(rho, basis, BOUNDARY_EPS)?;
    let n = povm.dim() * povm.dim();
    Ok(f.matrix().view((1, 1), (n - 1, n - 1)).into_owned())
}

/// Optimal reconstruction for a measurement that need not be informationally
/// complete: `|Theta_xi>> = p_xi^{-1} F(rho)^+ |Pi_xi>>`, restricted to the
/// reconstruction subspace, along with the restricted scaled MSE matrix
/// `C_R = bar F(rho)^+`.
pub fn incomplete_recon(
    povm: &Povm,
    rho: &HermitianMatrix,
    basis: &HermitianBasis,
) -> Result<(ReconstructionSet, Superoperator)> {
    let probs = povm.probabilities(rho)?;
    let f = povm.frame_superop_from_probs(&probs, basis, BOUNDARY_EPS)?;
    let f_pinv = f.pinv(f.default_rtol());
    let mut operators = Vec::with_capacity(povm.len());
    for (pi, &p) in povm.outcomes().iter().zip(&probs) {
        let ket = basis.vectorize(pi)?;
        operators.push(basis.devectorize(&f_pinv.apply(&ket))?.scale(1.0 / p));
    }
    let c_restricted = {
        let fb = f.bar_restrict();
        fb.pinv(fb.default_rtol())
    };
    Ok((
        ReconstructionSet {
            mode: ReconMode::Restricted,
            operators,
        },
        c_restricted,
    ))
}
