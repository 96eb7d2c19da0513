//! Figures of merit: weighted mean-square errors and the uncertainty-ellipsoid
//! volume.
//!
//! A weighting matrix `W` turns a scaled MSE matrix `C` into a single number
//! `Tr(W C)`. The identity weight gives the Hilbert-Schmidt MSE; monotone
//! Riemannian metrics give state-dependent weights built from a
//! Morozova-Chentsov kernel `c(x, y)` acting on the eigenvalues of the state:
//! `1/(4 lambda_j)` on diagonal directions and `c(lambda_j, lambda_k)/4` on
//! the `(j, k)` off-diagonal plane. The Bures metric has `c(x,y) = 2/(x+y)`,
//! the quantum Chernoff metric `c(x,y) = 4/(sqrt(x)+sqrt(y))^2`.

use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::opspace::{HermitianBasis, HermitianMatrix, Superoperator};

/// Eigenvalue floor below which metric weights are refused.
pub const METRIC_BOUNDARY_TOL: f64 = 1e-12;

/// Which weighting to use for a WMSE.
#[derive(Clone)]
pub enum WeightSpec {
    /// Identity weight: the plain Hilbert-Schmidt scaled MSE.
    Hs,
    /// Bures metric, `c(x,y) = 2/(x+y)`.
    Bures,
    /// Quantum Chernoff metric, `c(x,y) = 4/(sqrt(x)+sqrt(y))^2`.
    Chernoff,
    /// A custom Morozova-Chentsov kernel. Symmetry and positivity are checked
    /// pointwise at evaluation; operator monotonicity of the underlying mean
    /// is the caller's responsibility.
    CustomMc(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Hs => write!(f, "Hs"),
            WeightSpec::Bures => write!(f, "Bures"),
            WeightSpec::Chernoff => write!(f, "Chernoff"),
            WeightSpec::CustomMc(_) => write!(f, "CustomMc(..)"),
        }
    }
}

impl WeightSpec {
    /// The Morozova-Chentsov kernel; `None` for the Hilbert-Schmidt weight.
    pub fn kernel(&self, x: f64, y: f64) -> Option<Result<f64>> {
        match self {
            WeightSpec::Hs => None,
            WeightSpec::Bures => Some(Ok(2.0 / (x + y))),
            WeightSpec::Chernoff => {
                let s = x.sqrt() + y.sqrt();
                Some(Ok(4.0 / (s * s)))
            }
            WeightSpec::CustomMc(c) => {
                let v = c(x, y);
                let w = c(y, x);
                if !(v > 0.0) || (v - w).abs() > 1e-12 * v.abs().max(1.0) {
                    return Some(Err(Error::InvalidParameter(format!(
                        "Morozova-Chentsov kernel must be symmetric positive; c({x},{y}) = {v}, c({y},{x}) = {w}"
                    ))));
                }
                Some(Ok(v))
            }
        }
    }
}

/// Weighting superoperator of a monotone metric at the state `rho`,
/// expressed in `basis`.
///
/// For the Hilbert-Schmidt kind this is the identity everywhere; metric kinds
/// require an interior state and weight the eigendirections of `rho` by
/// `1/(4 lambda_j)` (diagonal) and `c(lambda_j, lambda_k)/4` (off-diagonal).
pub fn weight_superop(
    rho: &HermitianMatrix,
    spec: &WeightSpec,
    basis: &HermitianBasis,
) -> Result<Superoperator> {
    let d = rho.dim();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch(basis.dim(), d));
    }
    if matches!(spec, WeightSpec::Hs) {
        return Ok(Superoperator::identity(d));
    }
    let (eigs, vecs) = rho.eigen();
    if eigs[0] <= METRIC_BOUNDARY_TOL {
        return Err(Error::BoundaryEigenvalue(eigs[0]));
    }
    let mut w = Superoperator::zeros(d);
    // diagonal directions |v_j><v_j| with weight 1/(4 lambda_j)
    for j in 0..d {
        let vj = vecs.column(j).into_owned();
        let op = HermitianMatrix::pure(&vj);
        let ket = basis.vectorize(&op)?;
        w.add_outer(1.0 / (4.0 * eigs[j]), &ket, &ket);
    }
    // off-diagonal planes spanned by the symmetric and antisymmetric
    // combinations of |v_j><v_k|
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i_s = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    for j in 0..d {
        for k in (j + 1)..d {
            let weight = match spec.kernel(eigs[j], eigs[k]) {
                Some(r) => r? / 4.0,
                None => unreachable!("Hs handled above"),
            };
            let vj = vecs.column(j);
            let vk = vecs.column(k);
            let cross = vj * vk.adjoint();
            let sym = HermitianMatrix::new((&cross + cross.adjoint()) * s)?;
            let asym = HermitianMatrix::new((&cross - cross.adjoint()) * (-i_s))?;
            let ket_s = basis.vectorize(&sym)?;
            let ket_a = basis.vectorize(&asym)?;
            w.add_outer(weight, &ket_s, &ket_s);
            w.add_outer(weight, &ket_a, &ket_a);
        }
    }
    Ok(w)
}

/// Scaled weighted mean-square error `Tr(W C)`.
pub fn wmse(c: &Superoperator, w: &Superoperator) -> f64 {
    let n = c.matrix().nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += w.matrix()[(i, j)] * c.matrix()[(j, i)];
        }
    }
    acc
}

/// Volume of the `n`-dimensional unit ball.
pub fn ball_volume(n: usize) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0)
}

/// Volume of the scaled uncertainty ellipsoid,
/// `V_{d^2-1} sqrt(det_bar C)`, for a scaled MSE matrix supported on the
/// traceless subspace.
pub fn ellipsoid_volume(c: &Superoperator, dim: usize) -> Result<f64> {
    let det = c.det_bar();
    if det < -1e-12 {
        return Err(Error::NumericalDegeneracy {
            context: "ellipsoid volume",
            detail: format!("negative determinant {det:.3e} on the traceless subspace"),
        });
    }
    Ok(ball_volume(dim * dim - 1) * det.max(0.0).sqrt())
}

/// The qubit Bures weighting in Bloch coordinates,
/// `W(s) = 1/4 + s s^T / (4 (1 - s^2))`, as a 3x3 matrix. The operator-space
/// weighting equals twice this on the traceless block.
pub fn qubit_bures_bloch_weight(s: [f64; 3]) -> nalgebra::Matrix3<f64> {
    let s2: f64 = s.iter().map(|v| v * v).sum();
    let mut w = nalgebra::Matrix3::identity() * 0.25;
    for i in 0..3 {
        for j in 0..3 {
            w[(i, j)] += s[i] * s[j] / (4.0 * (1.0 - s2));
        }
    }
    w
}
