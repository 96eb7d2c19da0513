//! Closed-form evaluators for the covariant measurement and the qubit
//! catalogue, used both standalone and as oracles against the numeric
//! pipeline.
//!
//! The covariant measurement averages rank-one outcomes over the Haar
//! measure, so it has no finite outcome list; its frame superoperator on the
//! family of states `rho_r(s) = (s/r) P_r + (1-s)/d` is diagonalised by four
//! numbers `a, b, c, beta`, each a one-dimensional integral with an explicit
//! antiderivative. Everything else here is a printed formula: scaled MSE,
//! Bures MSB, monotone-metric WMSEs, ellipsoid volumes, their averages over
//! unitarily equivalent states, and the pure-state limits.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::metrics::{ball_volume, WeightSpec};
use crate::opspace::{HermitianBasis, HermitianMatrix, Superoperator};
use crate::povm::BlochVector;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A state of the form `rho_r(s) = (s/r) sum_{j<r} |j><j| + (1-s)/d`:
/// a rank-`r` projector mixed with white noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyState {
    pub d: usize,
    pub r: usize,
    pub s: f64,
}

impl FamilyState {
    pub fn new(d: usize, r: usize, s: f64) -> Result<Self> {
        if d < 2 || r == 0 || r > d - 1 {
            return Err(Error::InvalidParameter(format!(
                "rank {r} out of range for dimension {d}"
            )));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "mixing parameter s = {s} outside [0, 1]"
            )));
        }
        Ok(Self { d, r, s })
    }

    /// The larger eigenvalue `s/r + (1-s)/d`, multiplicity `r`.
    pub fn lambda1(&self) -> f64 {
        self.s / self.r as f64 + (1.0 - self.s) / self.d as f64
    }

    /// The smaller eigenvalue `(1-s)/d`, multiplicity `d-r`.
    pub fn lambda2(&self) -> f64 {
        (1.0 - self.s) / self.d as f64
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![self.lambda1(); self.r];
        v.extend(std::iter::repeat(self.lambda2()).take(self.d - self.r));
        v
    }

    /// The diagonal density matrix itself.
    pub fn state(&self) -> HermitianMatrix {
        let eigs = self.eigenvalues();
        let m = DMatrix::from_fn(self.d, self.d, |i, j| {
            if i == j {
                Complex64::new(eigs[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        HermitianMatrix::new(m).expect("diagonal matrix is Hermitian")
    }
}

/// The eigenvalues `a, b, c, beta` of the covariant Fisher superoperator on
/// the family `rho_r(s)`, with multiplicities `r^2-1`, `2r(d-r)`,
/// `(d-r)^2-1`, and `1`.
///
/// At `s = 1` the parameters take their documented limits: `a = r/(r+1)`,
/// `b = 1`, and `c = r/(r-1)`, which for `r = 1` means `c` (and with it
/// `beta`) is flagged infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantParams {
    pub d: usize,
    pub r: usize,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub beta: f64,
}

impl CovariantParams {
    pub fn c_is_finite(&self) -> bool {
        self.c.is_finite()
    }
}

/// Evaluate `a = g_20`, `b = g_11`, `c = g_02`, and `beta` for the covariant
/// measurement at `rho_r(s)`.
pub fn covariant_params(d: usize, r: usize, s: f64) -> Result<CovariantParams> {
    let family = FamilyState::new(d, r, s)?;
    let (d, r, s) = (family.d, family.r, family.s);
    let (a, b, c) = if s == 1.0 {
        let a = r as f64 / (r as f64 + 1.0);
        let b = 1.0;
        let c = if r >= 2 {
            r as f64 / (r as f64 - 1.0)
        } else {
            f64::INFINITY
        };
        (a, b, c)
    } else {
        (
            g_jk(d, r, s, 2, 0),
            g_jk(d, r, s, 1, 1),
            g_jk(d, r, s, 0, 2),
        )
    };
    let beta = ((r as f64 + 1.0) * (d - r) as f64 * a + r as f64 * (d - r + 1) as f64 * c
        - 2.0 * (r * (d - r)) as f64 * b)
        / d as f64;
    Ok(CovariantParams {
        d,
        r,
        s,
        a,
        b,
        c,
        beta,
    })
}

/// The integral
/// `g_jk = [2 d r Gamma(d+1) / (Gamma(r+j) Gamma(d-r+k))]
///  int_0^{pi/2} cos^{2r-1+2j} sin^{2(d-r)-1+2k} / (d s cos^2 + r(1-s))`,
/// evaluated through the closed-form antiderivative of
/// `int cos sin^{2m+1} / (cos^2 + u)`.
pub fn g_jk(d: usize, r: usize, s: f64, j: usize, k: usize) -> f64 {
    let a_exp = r + j; // cos power is 2 a_exp - 1
    let b_exp = d - r + k; // sin power is 2 b_exp - 1
    if s < 1e-12 {
        // denominator reduces to r(1-s); the integral is a beta function
        return d as f64 * gamma_ratio(d + 1, d + j + k);
    }
    let prefactor =
        2.0 * (d * r) as f64 * gamma_ratio(d + 1, a_exp) / int_gamma(b_exp);
    let u = r as f64 * (1.0 - s) / (d as f64 * s);
    // expand cos^{2(A-1)} = (1 - sin^2)^{A-1} binomially; each term is the
    // tabulated integral with m = B - 1 + i
    let mut integral = 0.0;
    let mut binom = 1.0f64;
    for i in 0..a_exp {
        let term = binom * j_integral(b_exp - 1 + i, u);
        if i % 2 == 0 {
            integral += term;
        } else {
            integral -= term;
        }
        binom *= (a_exp - 1 - i) as f64 / (i + 1) as f64;
    }
    prefactor * integral / (d as f64 * s)
}

/// `J(m, u) = int_0^{pi/2} cos sin^{2m+1} / (cos^2 + u) d alpha`.
///
/// For `u >= 1` the closed form `(1/2)[(1+u)^m ln((1+u)/u) - sum]` cancels
/// catastrophically, so a geometric series in `1/(1+u)` is used instead.
fn j_integral(m: usize, u: f64) -> f64 {
    let v = 1.0 + u;
    if u >= 1.0 {
        let mut acc = 0.0;
        let mut pow = 1.0 / v;
        for i in 0..512 {
            let term = pow / (m as f64 + i as f64 + 1.0);
            acc += term;
            if term < 1e-18 * acc {
                break;
            }
            pow /= v;
        }
        0.5 * acc
    } else {
        let mut sum = 0.0;
        let mut pow = 1.0f64;
        for n in 0..m {
            sum += pow / (m - n) as f64;
            pow *= v;
        }
        // pow is now v^m
        0.5 * (pow * (v / u).ln() - sum)
    }
}

/// `Gamma(n) / Gamma(k)` for positive integers.
fn gamma_ratio(n: usize, k: usize) -> f64 {
    if n >= k {
        ((k.max(1))..n).map(|i| i as f64).product()
    } else {
        1.0 / gamma_ratio(k, n)
    }
}

/// `Gamma(n) = (n-1)!` for positive integer `n`.
fn int_gamma(n: usize) -> f64 {
    (1..n).map(|i| i as f64).product()
}

/// Figures of merit of the covariant measurement under optimal
/// reconstruction on `rho_r(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantFigures {
    /// Scaled Hilbert-Schmidt MSE.
    pub mse: f64,
    /// Scaled mean-square Bures distance; infinite at `s = 1`.
    pub msb: f64,
    /// Scaled WMSE for the requested weighting; equals `mse` for HS.
    pub wmse: f64,
    /// Volume of the scaled uncertainty ellipsoid (HS metric).
    pub volume: f64,
    /// Its logarithm, `-inf` when the volume vanishes.
    pub log_volume: f64,
}

/// Evaluate the covariant closed forms
/// `E = (r^2-1)/a + 2r(d-r)/b + ((d-r)^2-1)/c + 1/beta`, the matching MSB,
/// the monotone-metric WMSE for `spec`, and the ellipsoid volume.
///
/// Figures that diverge at the boundary come back infinite rather than as
/// errors, matching their mathematical limits.
pub fn covariant_blue_figures(
    d: usize,
    r: usize,
    s: f64,
    spec: &WeightSpec,
) -> Result<CovariantFigures> {
    let params = covariant_params(d, r, s)?;
    let family = FamilyState::new(d, r, s)?;
    let (a, b, c, beta) = (params.a, params.b, params.c, params.beta);
    let df = d as f64;
    let rf = r as f64;
    let qf = (d - r) as f64; // d - r

    let mse = (rf * rf - 1.0) / a + 2.0 * rf * qf / b + (qf * qf - 1.0) / c + 1.0 / beta;

    let l1 = family.lambda1();
    let l2 = family.lambda2();
    let msb = 0.25
        * ((rf * rf - 1.0) / (a * l1)
            + 4.0 * rf * qf / (b * (l1 + l2))
            + (qf * qf - 1.0) / (c * l2)
            + qf / (df * beta * l1)
            + rf / (df * beta * l2));

    let wmse = match spec {
        WeightSpec::Hs => mse,
        _ => {
            let kernel = |x: f64, y: f64| -> Result<f64> {
                spec.kernel(x, y).expect("metric kind has a kernel")
            };
            let t1 = ((rf * rf - rf) * kernel(l1, l1)? + (rf - 1.0) / l1) / (4.0 * a);
            let t2 = 2.0 * rf * qf * kernel(l1, l2)? / (4.0 * b);
            let t3 = ((qf * qf - qf) * kernel(l2, l2)? + (qf - 1.0) / l2) / (4.0 * c);
            let tb = (qf / (df * l1) + rf / (df * l2)) / (4.0 * beta);
            t1 + t2 + t3 + tb
        }
    };

    let exp_a = (r * r - 1) as f64;
    let exp_b = (2 * r * (d - r)) as f64;
    let exp_c = ((d - r) * (d - r) - 1) as f64;
    let log_volume = ball_volume(d * d - 1).ln()
        - 0.5 * (exp_a * a.ln() + exp_b * b.ln() + exp_c * c.ln() + beta.ln());
    let volume = log_volume.exp();

    Ok(CovariantFigures {
        mse,
        msb,
        wmse,
        volume,
        log_volume,
    })
}

/// Figures of merit of the covariant (or any isotropic) measurement under
/// canonical reconstruction, for an arbitrary spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalCovariantFigures {
    pub mse: f64,
    pub msb: f64,
    pub wmse: f64,
}

/// Canonical-reconstruction covariant figures:
/// `E = d^2 + d - 1 - tr(rho^2)` and the monotone WMSE
/// `(2d^2-d-2)/(4(d+2)) + d/(4(d+2)) sum 1/lambda
///  + (d+1)/(4(d+2)) sum_{j!=k} (1 + lambda_j + lambda_k) c(lambda_j, lambda_k)`.
pub fn covariant_canonical_figures(
    eigenvalues: &[f64],
    spec: &WeightSpec,
) -> Result<CanonicalCovariantFigures> {
    let d = eigenvalues.len();
    if d < 2 {
        return Err(Error::InvalidParameter("need at least two eigenvalues".into()));
    }
    let trace: f64 = eigenvalues.iter().sum();
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitTrace(trace));
    }
    let df = d as f64;
    let purity: f64 = eigenvalues.iter().map(|l| l * l).sum();
    let mse = df * df + df - 1.0 - purity;

    let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let metric_sum = |kernel: &dyn Fn(f64, f64) -> Result<f64>| -> Result<f64> {
        let mut inv = 0.0;
        for &l in eigenvalues {
            inv += 1.0 / l;
        }
        let mut cross = 0.0;
        for (j, &lj) in eigenvalues.iter().enumerate() {
            for (k, &lk) in eigenvalues.iter().enumerate() {
                if j != k {
                    cross += (1.0 + lj + lk) * kernel(lj, lk)?;
                }
            }
        }
        Ok((2.0 * df * df - df - 2.0) / (4.0 * (df + 2.0))
            + df / (4.0 * (df + 2.0)) * inv
            + (df + 1.0) / (4.0 * (df + 2.0)) * cross)
    };

    let boundary_check = || -> Result<()> {
        if min <= 1e-12 {
            return Err(Error::BoundaryEigenvalue(min));
        }
        Ok(())
    };

    boundary_check()?;
    let msb = metric_sum(&|x, y| Ok(2.0 / (x + y)))?;
    let wmse = match spec {
        WeightSpec::Hs => mse,
        _ => metric_sum(&|x, y| spec.kernel(x, y).expect("metric kind has a kernel"))?,
    };
    Ok(CanonicalCovariantFigures { mse, msb, wmse })
}

/// The exact scaled MSE matrix of an isotropic measurement under canonical
/// reconstruction at a diagonal state, expressed in `basis`.
///
/// Diagonal block `Q_jk`, off-diagonal planes with eigenvalue
/// `(d+1)(1 + lambda_j + lambda_k)/(d+2)`.
pub fn covariant_canonical_mse_superop(
    eigenvalues: &[f64],
    basis: &HermitianBasis,
) -> Result<Superoperator> {
    let d = eigenvalues.len();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch(basis.dim(), d));
    }
    let df = d as f64;
    let mut c = Superoperator::zeros(d);
    // diagonal sector
    let mut diag_kets = Vec::with_capacity(d);
    for j in 0..d {
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        m[(j, j)] = Complex64::new(1.0, 0.0);
        diag_kets.push(basis.vectorize(&HermitianMatrix::new(m)?)?);
    }
    for j in 0..d {
        for k in 0..d {
            let delta = if j == k { 1.0 } else { 0.0 };
            let q = ((df + 1.0) * (1.0 + 2.0 * eigenvalues[j]) * delta
                - 1.0
                - eigenvalues[j]
                - eigenvalues[k]
                - (df + 2.0) * eigenvalues[j] * eigenvalues[k])
                / (df + 2.0);
            c.add_outer(q, &diag_kets[j], &diag_kets[k]);
        }
    }
    // off-diagonal planes
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i_s = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    for j in 0..d {
        for k in (j + 1)..d {
            let weight = (df + 1.0) * (1.0 + eigenvalues[j] + eigenvalues[k]) / (df + 2.0);
            let mut cross = DMatrix::<Complex64>::zeros(d, d);
            cross[(j, k)] = Complex64::new(1.0, 0.0);
            let sym = HermitianMatrix::new((&cross + cross.adjoint()) * s)?;
            let asym = HermitianMatrix::new((&cross - cross.adjoint()) * (-i_s))?;
            let ket_s = basis.vectorize(&sym)?;
            let ket_a = basis.vectorize(&asym)?;
            c.add_outer(weight, &ket_s, &ket_s);
            c.add_outer(weight, &ket_a, &ket_a);
        }
    }
    Ok(c)
}

/// Which qubit measurement a closed form refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitMeasurement {
    Sic,
    Mub,
    Cube,
    Covariant,
    /// Any isotropic measurement under canonical linear reconstruction (the
    /// "Iso" reference curve); the reconstruction argument is ignored.
    IsoCanonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitRecon {
    Canonical,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitFigure {
    Mse,
    Msb,
    Volume,
    AvgMse,
    AvgMsb,
    AvgLogVolume,
}

/// A closed-form value, or a signal that the combination has no printed
/// formula and must go through the numeric pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Value(f64),
    NumericOnly,
}

impl ClosedForm {
    pub fn value(self) -> Option<f64> {
        match self {
            ClosedForm::Value(v) => Some(v),
            ClosedForm::NumericOnly => None,
        }
    }

    /// Unwrap a value, panicking on `NumericOnly`; test convenience.
    pub fn expect_value(self) -> f64 {
        self.value().expect("combination has a closed form")
    }
}

/// `b` parameter of the qubit covariant measurement,
/// `[2s - (1-s^2) ln((1+s)/(1-s))] / (2 s^3)`, via a series below `s = 1/2`
/// where the closed form cancels catastrophically.
pub fn qubit_covariant_b(s: f64) -> f64 {
    if s >= 1.0 {
        return 1.0;
    }
    if s < 0.5 {
        // b = 2 sum_{i>=1} s^{2i-2} / (4i^2 - 1)
        let s2 = s * s;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for i in 1..200 {
            let term = 2.0 * pow / ((4 * i * i - 1) as f64);
            acc += term;
            if term < 1e-17 {
                break;
            }
            pow *= s2;
        }
        acc
    } else {
        let l = ((1.0 + s) / (1.0 - s)).ln();
        (2.0 * s - (1.0 - s * s) * l) / (2.0 * s * s * s)
    }
}

/// `beta` parameter of the qubit covariant measurement,
/// `[-2s + ln((1+s)/(1-s))] / s^3`, with the same series treatment.
pub fn qubit_covariant_beta(s: f64) -> f64 {
    if s >= 1.0 {
        return f64::INFINITY;
    }
    if s < 0.5 {
        // beta = 2 sum_{i>=1} s^{2i-2} / (2i + 1)
        let s2 = s * s;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for i in 1..200 {
            let term = 2.0 * pow / ((2 * i + 1) as f64);
            acc += term;
            if term < 1e-17 {
                break;
            }
            pow *= s2;
        }
        acc
    } else {
        let l = ((1.0 + s) / (1.0 - s)).ln();
        (-2.0 * s + l) / (s * s * s)
    }
}

/// `(1/s) ln((1+s)/(1-s))`, continued to `2` at `s = 0`.
fn log_ratio_over_s(s: f64) -> f64 {
    if s < 0.5 {
        let s2 = s * s;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for i in 0..200 {
            let term = 2.0 * pow / ((2 * i + 1) as f64);
            acc += term;
            if term < 1e-17 {
                break;
            }
            pow *= s2;
        }
        acc
    } else {
        ((1.0 + s) / (1.0 - s)).ln() / s
    }
}

/// Evaluate a printed qubit closed form. Pointwise figures use the full
/// Bloch vector; averaged figures depend only on its length.
///
/// Combinations without a printed formula (everything involving the
/// icosahedron or dodecahedron, plus the SIC average log volume) return
/// [`ClosedForm::NumericOnly`].
pub fn qubit_closed_forms(
    measurement: QubitMeasurement,
    bloch: &BlochVector,
    recon: QubitRecon,
    figure: QubitFigure,
) -> Result<ClosedForm> {
    let s2 = bloch.x * bloch.x + bloch.y * bloch.y + bloch.z * bloch.z;
    if s2 > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "Bloch vector has norm {} > 1",
            s2.sqrt()
        )));
    }
    let s = s2.sqrt();
    let (x, y, z) = (bloch.x, bloch.y, bloch.z);
    let q4 = x.powi(4) + y.powi(4) + z.powi(4);
    let q6 = x.powi(6) + y.powi(6) + z.powi(6);
    let xyz = x * y * z;
    let pi = std::f64::consts::PI;
    use ClosedForm::{NumericOnly, Value};
    use QubitFigure as F;
    use QubitMeasurement as M;
    use QubitRecon as R;

    // the SIC measurement is minimal IC: optimal and canonical coincide;
    // the Iso curve is canonical by definition
    let recon = match measurement {
        M::Sic => R::Canonical,
        M::IsoCanonical => R::Canonical,
        _ => recon,
    };

    let canonical_msb_iso = 9.0 / 4.0 + s2 / (2.0 * (1.0 - s2));
    let canonical_volume_iso = pi * (2.0 * (3.0 - s2)).sqrt();

    let value = match (measurement, recon, figure) {
        // --- canonical reconstruction -------------------------------------
        (M::Sic, R::Canonical, F::Mse) => Value((9.0 - s2) / 2.0),
        (M::Sic, R::Canonical, F::Msb) => Value(
            9.0 / 4.0 + (s2 + 3.0 * 3f64.sqrt() * xyz) / (2.0 * (1.0 - s2)),
        ),
        (M::Sic, R::Canonical, F::Volume) => Value(
            (2.0f64 / 3.0).sqrt()
                * pi
                * (2.0 * q4 + 8.0 * 3f64.sqrt() * xyz - s2 * s2 - 6.0 * s2 + 9.0).sqrt(),
        ),
        (M::Sic, R::Canonical, F::AvgMse) => Value((9.0 - s2) / 2.0),
        (M::Sic, R::Canonical, F::AvgMsb) => Value(canonical_msb_iso),
        (M::Sic, R::Canonical, F::AvgLogVolume) => NumericOnly,

        (M::Mub | M::Cube | M::Covariant | M::IsoCanonical, R::Canonical, F::Mse) => {
            Value((9.0 - s2) / 2.0)
        }
        (M::Mub | M::Cube | M::Covariant | M::IsoCanonical, R::Canonical, F::Msb) => {
            Value(canonical_msb_iso)
        }
        (M::Mub | M::Cube | M::Covariant | M::IsoCanonical, R::Canonical, F::Volume) => {
            Value(canonical_volume_iso)
        }
        (M::Mub | M::Cube | M::Covariant | M::IsoCanonical, R::Canonical, F::AvgMse) => {
            Value((9.0 - s2) / 2.0)
        }
        (M::Mub | M::Cube | M::Covariant | M::IsoCanonical, R::Canonical, F::AvgMsb) => {
            Value(canonical_msb_iso)
        }
        (M::Mub | M::Cube | M::Covariant | M::IsoCanonical, R::Canonical, F::AvgLogVolume) => {
            Value(canonical_volume_iso.ln())
        }

        // --- optimal reconstruction ---------------------------------------
        (M::Mub, R::Optimal, F::Mse) => Value(3.0 * (3.0 - s2) / 2.0),
        (M::Mub, R::Optimal, F::Msb) => Value(
            3.0 * (3.0 - s2) / 4.0 + 3.0 * (s2 - q4) / (4.0 * (1.0 - s2)),
        ),
        (M::Mub, R::Optimal, F::Volume) => Value(
            pi * (6.0 * (1.0 - x * x) * (1.0 - y * y) * (1.0 - z * z)).sqrt(),
        ),
        (M::Mub, R::Optimal, F::AvgMse) => Value(3.0 * (3.0 - s2) / 2.0),
        (M::Mub, R::Optimal, F::AvgMsb) => {
            Value(9.0 / 4.0 + 3.0 * s2 * s2 / (10.0 * (1.0 - s2)))
        }
        (M::Mub, R::Optimal, F::AvgLogVolume) => Value(
            (6f64.sqrt() * pi).ln() - 3.0
                + 1.5 * ((1.0 - s2).ln() + log_ratio_over_s(s)),
        ),

        (M::Cube, R::Optimal, F::Mse) => Value(
            (27.0 - 18.0 * s2 + s2 * s2 + 2.0 * q4) / (2.0 * (3.0 - s2)),
        ),
        (M::Cube, R::Optimal, F::Msb) => Value(
            (27.0 - 27.0 * s2 - 2.0 * s2 * s2) / (12.0 * (1.0 - s2))
                + (6.0 * q4 - 2.0 * q6 - 21.0 * (x * y * z) * (x * y * z))
                    / (3.0 * (3.0 - s2) * (1.0 - s2)),
        ),
        (M::Cube, R::Optimal, F::Volume) => {
            let t = |w: f64| 3.0 - w * w;
            Value(
                pi / 3.0
                    * (2.0 * t(x + y - z) * t(x - y + z) * t(-x + y + z) * t(x + y + z)
                        / (3.0 - s2))
                        .sqrt(),
            )
        }
        (M::Cube, R::Optimal, F::AvgMse) => Value(
            (135.0 - 90.0 * s2 + 11.0 * s2 * s2) / (10.0 * (3.0 - s2)),
        ),
        (M::Cube, R::Optimal, F::AvgMsb) => Value(
            (945.0 - 1260.0 * s2 + 413.0 * s2 * s2 - 26.0 * s2 * s2 * s2)
                / (140.0 * (3.0 - s2) * (1.0 - s2)),
        ),
        (M::Cube, R::Optimal, F::AvgLogVolume) => Value(
            (3.0 * 2f64.sqrt() * pi).ln() - 4.0
                + ((1.0 - s2) * (1.0 - s2) / (3.0 - s2).sqrt()).ln()
                + 2.0 * log_ratio_over_s(s),
        ),

        (M::Covariant, R::Optimal, F::Mse | F::AvgMse) => {
            let b = qubit_covariant_b(s);
            let beta = qubit_covariant_beta(s);
            Value(2.0 / b + 1.0 / beta)
        }
        (M::Covariant, R::Optimal, F::Msb | F::AvgMsb) => {
            let b = qubit_covariant_b(s);
            let beta = qubit_covariant_beta(s);
            Value(1.0 / b + 1.0 / (2.0 * beta * (1.0 - s2)))
        }
        (M::Covariant, R::Optimal, F::Volume) => {
            let b = qubit_covariant_b(s);
            let beta = qubit_covariant_beta(s);
            Value(4.0 * pi / (3.0 * b * beta.sqrt()))
        }
        (M::Covariant, R::Optimal, F::AvgLogVolume) => {
            let b = qubit_covariant_b(s);
            let beta = qubit_covariant_beta(s);
            Value((4.0 * pi / (3.0 * b * beta.sqrt())).ln())
        }

        // unreachable: Sic and IsoCanonical were canonicalised above
        (M::Sic | M::IsoCanonical, R::Optimal, _) => unreachable!(),
    };
    Ok(value)
}

/// Pure-state limit quantities for the covariant measurement and its minimal
/// counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateLimits {
    /// Scaled MSE `2(d-1)` of the covariant measurement at a pure state.
    pub covariant_mse: f64,
    /// Scaled mean trace-distance error, `Gamma(d - 1/2) / Gamma(d - 1)`.
    pub covariant_mean_trace: f64,
    /// Scaled mean HS-distance error, `sqrt(2)` times the trace one.
    pub covariant_mean_hs: f64,
    /// Scaled MSE `d^2 + d - 2` achievable with minimal tomography.
    pub minimal_mse: f64,
    /// Large-`d` ratio of minimal to covariant mean trace distance,
    /// `4d / (3 pi)`.
    pub minimal_trace_factor: f64,
}

pub fn pure_state_limits(d: usize) -> Result<PureStateLimits> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension {d} below 2"
        )));
    }
    let df = d as f64;
    let mean_trace = gamma(df - 0.5) / gamma(df - 1.0);
    Ok(PureStateLimits {
        covariant_mse: 2.0 * (df - 1.0),
        covariant_mean_trace: mean_trace,
        covariant_mean_hs: 2f64.sqrt() * mean_trace,
        minimal_mse: df * df + df - 2.0,
        minimal_trace_factor: 4.0 * df / (3.0 * std::f64::consts::PI),
    })
}

/// Lower bound `d^2 + d - 1 - tr(rho^2)` on the average scaled MSE of any
/// minimal informationally complete measurement; attained exactly by SIC.
pub fn minimal_ic_bound(d: usize, purity: f64) -> Result<f64> {
    let df = d as f64;
    if !(1.0 / df - 1e-12..=1.0 + 1e-12).contains(&purity) {
        return Err(Error::InvalidParameter(format!(
            "purity {purity} outside [1/{d}, 1]"
        )));
    }
    Ok(df * df + df - 1.0 - purity)
}
