//! Measurement families and their frame superoperators.
//!
//! A POVM is a list of positive operators `Pi_xi` summing to the identity.
//! Built-in families: the five platonic-solid qubit measurements, SIC
//! measurements from a Weyl-Heisenberg fiducial orbit, and complete sets of
//! mutually unbiased bases in prime dimension. Custom POVMs load from JSON.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::opspace::{HermitianBasis, HermitianMatrix, Superoperator};

/// Minimum eigenvalue tolerated for outcome positivity.
pub const PSD_TOL: f64 = 1e-10;
/// Entrywise tolerance for the completeness sum.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Tolerance on the pairwise-fidelity check at SIC construction.
pub const SIC_TOL: f64 = 1e-9;
/// Default probability floor below which a state counts as boundary.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// A platonic solid inscribed on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solid {
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
}

impl Solid {
    pub fn outcome_count(&self) -> usize {
        match self {
            Solid::Tetrahedron => 4,
            Solid::Octahedron => 6,
            Solid::Cube => 8,
            Solid::Icosahedron => 12,
            Solid::Dodecahedron => 20,
        }
    }

    /// Unit vertex vectors in the standard orientation: the cube is axis
    /// aligned and the tetrahedron consists of four cube vertices including
    /// `(1,1,1)/sqrt(3)`.
    pub fn vertices(&self) -> Vec<[f64; 3]> {
        let t3 = 1.0 / 3f64.sqrt();
        match self {
            Solid::Tetrahedron => vec![
                [t3, t3, t3],
                [t3, -t3, -t3],
                [-t3, t3, -t3],
                [-t3, -t3, t3],
            ],
            Solid::Octahedron => vec![
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
            Solid::Cube => {
                let mut v = Vec::with_capacity(8);
                for &x in &[t3, -t3] {
                    for &y in &[t3, -t3] {
                        for &z in &[t3, -t3] {
                            v.push([x, y, z]);
                        }
                    }
                }
                v
            }
            Solid::Icosahedron => {
                // golden-ratio embedding: cyclic permutations of (0, ±1, ±phi)
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let norm = (1.0 + phi * phi).sqrt();
                let a = 1.0 / norm;
                let b = phi / norm;
                let mut v = Vec::with_capacity(12);
                for &s1 in &[1.0, -1.0] {
                    for &s2 in &[1.0, -1.0] {
                        v.push([0.0, s1 * a, s2 * b]);
                        v.push([s2 * b, 0.0, s1 * a]);
                        v.push([s1 * a, s2 * b, 0.0]);
                    }
                }
                v
            }
            Solid::Dodecahedron => {
                // dual of the icosahedron: cube vertices plus cyclic
                // permutations of (0, ±1/phi, ±phi), all of norm sqrt(3)
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let mut v = Solid::Cube.vertices();
                let a = (1.0 / phi) / 3f64.sqrt();
                let b = phi / 3f64.sqrt();
                for &s1 in &[1.0, -1.0] {
                    for &s2 in &[1.0, -1.0] {
                        v.push([0.0, s1 * a, s2 * b]);
                        v.push([s2 * b, 0.0, s1 * a]);
                        v.push([s1 * a, s2 * b, 0.0]);
                    }
                }
                v
            }
        }
    }
}

impl FromStr for Solid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetrahedron" => Ok(Solid::Tetrahedron),
            "octahedron" => Ok(Solid::Octahedron),
            "cube" => Ok(Solid::Cube),
            "icosahedron" => Ok(Solid::Icosahedron),
            "dodecahedron" => Ok(Solid::Dodecahedron),
            other => Err(Error::UnknownSolid(other.to_string())),
        }
    }
}

impl fmt::Display for Solid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Solid::Tetrahedron => "tetrahedron",
            Solid::Octahedron => "octahedron",
            Solid::Cube => "cube",
            Solid::Icosahedron => "icosahedron",
            Solid::Dodecahedron => "dodecahedron",
        };
        write!(f, "{name}")
    }
}

/// Measurement family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sic,
    Mub,
    Platonic(Solid),
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Sic => write!(f, "sic"),
            Family::Mub => write!(f, "mub"),
            Family::Platonic(s) => write!(f, "{s}"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

/// A qubit Bloch vector; `rho = (1 + s . sigma)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// The qubit state with this Bloch vector. Fails outside the Bloch ball.
    pub fn state(&self) -> Result<HermitianMatrix> {
        if self.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "Bloch vector has norm {} > 1",
                self.norm()
            )));
        }
        let c = Complex64::new;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.5 * (1.0 + self.z), 0.0),
                c(0.5 * self.x, -0.5 * self.y),
                c(0.5 * self.x, 0.5 * self.y),
                c(0.5 * (1.0 - self.z), 0.0),
            ],
        );
        HermitianMatrix::new(m)
    }

    /// Bloch vector of a qubit operator: `s_i = tr(sigma_i A)`.
    pub fn from_state(rho: &HermitianMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch(rho.dim(), 2));
        }
        let e = rho.entries();
        Ok(Self {
            x: 2.0 * e[(0, 1)].re,
            y: -2.0 * e[(0, 1)].im,
            z: (e[(0, 0)] - e[(1, 1)]).re,
        })
    }
}

/// An ordered list of positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    outcomes: Vec<HermitianMatrix>,
    family: Family,
    weights: Vec<f64>,
}

impl Povm {
    /// Validate and wrap a list of outcomes: each PSD within [`PSD_TOL`] and
    /// the sum equal to the identity within [`COMPLETENESS_TOL`] entrywise.
    pub fn new(dim: usize, outcomes: Vec<HermitianMatrix>, family: Family) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidParameter("POVM has no outcomes".into()));
        }
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (index, p) in outcomes.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(p.dim(), dim));
            }
            let min_eig = p.eigenvalues()[0];
            if min_eig < -PSD_TOL {
                return Err(Error::NotPositive { index, min_eig });
            }
            sum += p.entries();
        }
        let mut max_dev = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                max_dev = max_dev.max((sum[(i, j)] - target).norm());
            }
        }
        if max_dev > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm(max_dev));
        }
        let weights = outcomes.iter().map(|p| p.trace()).collect();
        Ok(Self {
            dim,
            outcomes,
            family,
            weights,
        })
    }

    /// The measurement whose outcomes sit at the vertices of a platonic
    /// solid: `Pi_k = (1 + v_k . sigma)/n`.
    pub fn platonic(solid: Solid) -> Povm {
        let vertices = solid.vertices();
        let n = vertices.len() as f64;
        let c = Complex64::new;
        let outcomes = vertices
            .iter()
            .map(|v| {
                let m = DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        c((1.0 + v[2]) / n, 0.0),
                        c(v[0] / n, -v[1] / n),
                        c(v[0] / n, v[1] / n),
                        c((1.0 - v[2]) / n, 0.0),
                    ],
                );
                HermitianMatrix::new(m).expect("platonic outcome is Hermitian")
            })
            .collect();
        Povm::new(2, outcomes, Family::Platonic(solid)).expect("platonic POVM is valid")
    }

    /// SIC measurement: the Weyl-Heisenberg orbit of a fiducial vector,
    /// `Pi_xi = |psi_xi><psi_xi|/d`. Built-in fiducials exist for `d = 2, 3`;
    /// other dimensions need a user-supplied fiducial. The equal-fidelity
    /// condition is verified before returning.
    pub fn sic(dim: usize, fiducial: Option<&[Complex64]>) -> Result<Povm> {
        let fid: DVector<Complex64> = match fiducial {
            Some(f) => {
                if f.len() != dim {
                    return Err(Error::DimensionMismatch(f.len(), dim));
                }
                DVector::from_column_slice(f)
            }
            None => builtin_fiducial(dim)?,
        };
        let norm: f64 = fid.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(Error::InvalidParameter("fiducial vector is zero".into()));
        }
        let fid = fid / Complex64::new(norm, 0.0);

        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / dim as f64);
        let mut vectors = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                // (X^a Z^b psi)_j = omega^{b (j-a)} psi_{j-a}
                let v = DVector::from_fn(dim, |j, _| {
                    let src = (j + dim - a) % dim;
                    omega.powu((b * src) as u32) * fid[src]
                });
                vectors.push(v);
            }
        }

        // Pairwise fidelities must match (d delta + 1)/(d + 1).
        let expected = 1.0 / (dim as f64 + 1.0);
        for i in 0..vectors.len() {
            for j in (i + 1)..vectors.len() {
                let overlap: Complex64 = vectors[i].dotc(&vectors[j]);
                let found = overlap.norm_sqr();
                if (found - expected).abs() > SIC_TOL {
                    return Err(Error::SicConditionViolated {
                        i,
                        j,
                        found,
                        expected,
                    });
                }
            }
        }

        let outcomes = vectors
            .iter()
            .map(|v| HermitianMatrix::pure(v).scale(1.0 / dim as f64))
            .collect();
        Povm::new(dim, outcomes, Family::Sic)
    }

    /// Complete set of mutually unbiased bases in prime dimension: the
    /// `d(d+1)` basis projectors, each scaled by `1/(d+1)` so the union is a
    /// single POVM. Cross-basis transition probabilities are verified to be
    /// `1/d`.
    pub fn mub(dim: usize) -> Result<Povm> {
        if !is_prime(dim) {
            return Err(Error::DimNotPrime(dim));
        }
        let bases = mub_bases(dim);
        // verify unbiasedness across distinct bases
        for a in 0..bases.len() {
            for b in (a + 1)..bases.len() {
                for v in &bases[a] {
                    for w in &bases[b] {
                        let p = v.dotc(w).norm_sqr();
                        if (p - 1.0 / dim as f64).abs() > 1e-10 {
                            return Err(Error::NumericalDegeneracy {
                                context: "mub construction",
                                detail: format!(
                                    "transition probability {p} between bases {a} and {b}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        let scale = 1.0 / (dim as f64 + 1.0);
        let outcomes = bases
            .iter()
            .flatten()
            .map(|v| HermitianMatrix::pure(v).scale(scale))
            .collect();
        Povm::new(dim, outcomes, Family::Mub)
    }

    /// Wrap caller-supplied outcomes as a custom POVM.
    pub fn custom(dim: usize, outcomes: Vec<HermitianMatrix>) -> Result<Povm> {
        Povm::new(dim, outcomes, Family::Custom)
    }

    /// Probabilistic mixture of measurements: outcome lists concatenated with
    /// each part scaled by its sampling probability.
    pub fn mixture(parts: &[(f64, &Povm)]) -> Result<Povm> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        let dim = parts[0].1.dim;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 || parts.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "mixture weights sum to {total}"
            )));
        }
        let mut outcomes = Vec::new();
        for (p, povm) in parts {
            if povm.dim != dim {
                return Err(Error::DimensionMismatch(povm.dim, dim));
            }
            outcomes.extend(povm.outcomes.iter().map(|o| o.scale(*p)));
        }
        Povm::new(dim, outcomes, Family::Custom)
    }

    /// Rotate every outcome by the same unitary.
    pub fn rotate(&self, u: &DMatrix<Complex64>) -> Povm {
        let outcomes: Vec<_> = self.outcomes.iter().map(|o| o.conjugate_by(u)).collect();
        let weights = outcomes.iter().map(|o| o.trace()).collect();
        Povm {
            dim: self.dim,
            outcomes,
            family: self.family,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[HermitianMatrix] {
        &self.outcomes
    }

    pub fn outcome(&self, xi: usize) -> &HermitianMatrix {
        &self.outcomes[xi]
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Cached outcome traces `w_xi = tr(Pi_xi)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Born probabilities `p_xi = tr(Pi_xi rho)`.
    pub fn probabilities(&self, rho: &HermitianMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim));
        }
        Ok(self.outcomes.iter().map(|p| p.inner(rho)).collect())
    }

    /// State-independent frame superoperator
    /// `F = d sum_xi |Pi_xi>><<Pi_xi| / tr(Pi_xi)`.
    pub fn frame_superop(&self, basis: &HermitianBasis) -> Result<Superoperator> {
        let mut f = Superoperator::zeros(self.dim);
        for (index, p) in self.outcomes.iter().enumerate() {
            let trace = self.weights[index];
            if trace <= 0.0 {
                return Err(Error::ZeroTraceOutcome { index, trace });
            }
            let ket = basis.vectorize(p)?;
            f.add_outer(self.dim as f64 / trace, &ket, &ket);
        }
        Ok(f)
    }

    /// State-dependent frame superoperator
    /// `F(rho) = sum_xi |Pi_xi>><<Pi_xi| / p_xi`, failing with a boundary
    /// error (naming the outcome) when some `p_xi <= epsilon`.
    pub fn frame_superop_at(
        &self,
        rho: &HermitianMatrix,
        basis: &HermitianBasis,
        epsilon: f64,
    ) -> Result<Superoperator> {
        let probs = self.probabilities(rho)?;
        self.frame_superop_from_probs(&probs, basis, epsilon)
    }

    /// Frame superoperator built from explicit weights in place of Born
    /// probabilities; used for the plug-in estimators.
    pub fn frame_superop_from_probs(
        &self,
        probs: &[f64],
        basis: &HermitianBasis,
        epsilon: f64,
    ) -> Result<Superoperator> {
        if probs.len() != self.outcomes.len() {
            return Err(Error::DimensionMismatch(probs.len(), self.outcomes.len()));
        }
        let mut f = Superoperator::zeros(self.dim);
        for (index, p) in self.outcomes.iter().enumerate() {
            let probability = probs[index];
            if probability <= epsilon {
                return Err(Error::BoundaryState {
                    index,
                    probability,
                    epsilon,
                });
            }
            let ket = basis.vectorize(p)?;
            f.add_outer(1.0 / probability, &ket, &ket);
        }
        Ok(f)
    }

    /// Whether the frame superoperator has full rank `d^2`.
    pub fn is_informationally_complete(&self, basis: &HermitianBasis) -> Result<bool> {
        let f = self.frame_superop(basis)?;
        Ok(f.rank(f.default_rtol()) == self.dim * self.dim)
    }

    /// Check the weighted-2-design condition
    /// `sum_xi w_xi (psi psi)^{x2} = 2 P_sym / (d+1)` for rank-one POVMs.
    ///
    /// Returns `(is_tight, residual)` where the residual is the maximum
    /// entrywise deviation; POVMs with an outcome of rank above one return
    /// `(false, inf)`.
    pub fn is_tight_ic(&self) -> (bool, f64) {
        let d = self.dim;
        let mut design = DMatrix::<Complex64>::zeros(d * d, d * d);
        for p in &self.outcomes {
            let (eigs, vecs) = p.eigen();
            let max = eigs[d - 1];
            // all but the top eigenvalue must vanish for a rank-one outcome
            if d > 1 && eigs[d - 2].abs() > 1e-9 * max.max(1.0) {
                return (false, f64::INFINITY);
            }
            let psi = vecs.column(d - 1).into_owned();
            let proj = &psi * psi.adjoint();
            design += proj.kronecker(&proj) * Complex64::new(max, 0.0);
        }
        // projector onto the symmetric subspace: (1 + SWAP)/2
        let mut target = DMatrix::<Complex64>::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                target[(i * d + j, i * d + j)] += Complex64::new(0.5, 0.0);
                target[(i * d + j, j * d + i)] += Complex64::new(0.5, 0.0);
            }
        }
        target *= Complex64::new(2.0 / (d as f64 + 1.0), 0.0);
        let mut residual = 0.0f64;
        for i in 0..d * d {
            for j in 0..d * d {
                residual = residual.max((design[(i, j)] - target[(i, j)]).norm());
            }
        }
        (residual < SIC_TOL, residual)
    }

    /// Load a POVM from the JSON schema
    /// `{"dim": d, "outcomes": [[[[re, im], ...], ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Povm> {
        let file: PovmFile = serde_json::from_str(text)?;
        file.into_povm()
    }

    pub fn from_json_file(path: &Path) -> Result<Povm> {
        Povm::from_json(&std::fs::read_to_string(path)?)
    }

    /// Serialise with full double precision; re-importing reproduces the
    /// outcomes bit for bit.
    pub fn to_json(&self) -> String {
        let file = PovmFile {
            dim: self.dim,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| {
                    (0..self.dim)
                        .map(|i| {
                            (0..self.dim)
                                .map(|j| {
                                    let z = o.entries()[(i, j)];
                                    [z.re, z.im]
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("POVM serialises")
    }
}

#[derive(Serialize, Deserialize)]
struct PovmFile {
    dim: usize,
    outcomes: Vec<Vec<Vec<[f64; 2]>>>,
}

impl PovmFile {
    fn into_povm(self) -> Result<Povm> {
        let dim = self.dim;
        let mut outcomes = Vec::with_capacity(self.outcomes.len());
        for (index, rows) in self.outcomes.iter().enumerate() {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::InvalidParameter(format!(
                    "outcome {index} is not a {dim}x{dim} matrix"
                )));
            }
            let m = DMatrix::from_fn(dim, dim, |i, j| {
                Complex64::new(rows[i][j][0], rows[i][j][1])
            });
            outcomes.push(HermitianMatrix::new(m).map_err(|e| match e {
                Error::NotHermitian(dev) => Error::InvalidParameter(format!(
                    "outcome {index} is not Hermitian (deviation {dev:.3e})"
                )),
                other => other,
            })?);
        }
        Povm::new(dim, outcomes, Family::Custom)
    }
}

/// Parse a complex vector from JSON `[[re, im], ...]`, for fiducial files.
pub fn complex_vector_from_json(text: &str) -> Result<Vec<Complex64>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
    Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

fn builtin_fiducial(dim: usize) -> Result<DVector<Complex64>> {
    match dim {
        2 => {
            // Bloch vector (1,1,1)/sqrt(3), so the orbit is the standard
            // tetrahedron.
            let theta = (1.0 / 3f64.sqrt()).acos();
            let phi = std::f64::consts::FRAC_PI_4;
            Ok(DVector::from_column_slice(&[
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]))
        }
        3 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Ok(DVector::from_column_slice(&[
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ]))
        }
        other => Err(Error::NoBuiltinFiducial(other)),
    }
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// The `d+1` mutually unbiased bases in prime dimension `d`: the
/// computational basis plus, for odd primes, the bases with components
/// `omega^{a j^2 + b j}/sqrt(d)`. For `d = 2` the Pauli X and Y eigenbases.
fn mub_bases(dim: usize) -> Vec<Vec<DVector<Complex64>>> {
    let mut bases = Vec::with_capacity(dim + 1);
    let computational: Vec<_> = (0..dim)
        .map(|j| {
            DVector::from_fn(dim, |i, _| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    bases.push(computational);

    if dim == 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        bases.push(vec![
            DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]),
            DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]),
        ]);
        bases.push(vec![
            DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]),
            DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(0.0, -s)]),
        ]);
        return bases;
    }

    let omega = 2.0 * std::f64::consts::PI / dim as f64;
    let norm = 1.0 / (dim as f64).sqrt();
    for a in 0..dim {
        let basis: Vec<_> = (0..dim)
            .map(|b| {
                DVector::from_fn(dim, |j, _| {
                    let phase = omega * ((a * j * j + b * j) % dim) as f64;
                    Complex64::from_polar(norm, phase)
                })
            })
            .collect();
        bases.push(basis);
    }
    bases
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tetrahedron_pairwise_fidelities() {
        let povm = Povm::platonic(Solid::Tetrahedron);
        assert_eq!(povm.len(), 4);
        // Pi = |psi><psi|/2, so |<psi_i|psi_j>|^2 = 4 tr(Pi_i Pi_j) for i != j.
        for i in 0..4 {
            for j in (i + 1)..4 {
                let f = 4.0 * povm.outcome(i).inner(povm.outcome(j));
                assert_abs_diff_eq!(f, 1.0 / 3.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn octahedron_is_qubit_mub() {
        let octa = Povm::platonic(Solid::Octahedron);
        let mub = Povm::mub(2).unwrap();
        assert_eq!(octa.len(), 6);
        assert_eq!(mub.len(), 6);
        // same outcome sets up to ordering
        for o in octa.outcomes() {
            let found = mub.outcomes().iter().any(|m| o.sub(m).purity() < 1e-20);
            assert!(found, "octahedron outcome missing from MUB set");
        }
    }

    #[test]
    fn icosahedron_sums_to_identity() {
        let povm = Povm::platonic(Solid::Icosahedron);
        assert_eq!(povm.len(), 12);
        let mut sum = DMatrix::<Complex64>::zeros(2, 2);
        for o in povm.outcomes() {
            sum += o.entries();
        }
        assert!((sum[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((sum[(1, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(sum[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn unknown_solid_name_errors() {
        assert!(matches!(
            "hexahedron".parse::<Solid>(),
            Err(Error::UnknownSolid(_))
        ));
    }

    #[test]
    fn sic2_matches_tetrahedron() {
        let sic = Povm::sic(2, None).unwrap();
        let tetra = Povm::platonic(Solid::Tetrahedron);
        assert_eq!(sic.len(), 4);
        for o in sic.outcomes() {
            let found = tetra.outcomes().iter().any(|t| o.sub(t).purity() < 1e-20);
            assert!(found, "SIC(2) outcome not a tetrahedron outcome");
        }
    }

    #[test]
    fn sic3_orbit_has_equal_fidelities() {
        let sic = Povm::sic(3, None).unwrap();
        assert_eq!(sic.len(), 9);
        // Pi = |psi><psi|/3, so |<psi_i|psi_j>|^2 = 9 tr(Pi_i Pi_j).
        for i in 0..9 {
            for j in (i + 1)..9 {
                let f = 9.0 * sic.outcome(i).inner(sic.outcome(j));
                assert_abs_diff_eq!(f, 0.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bad_fiducial_violates_sic_condition() {
        let fid = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(
            Povm::sic(2, Some(&fid)),
            Err(Error::SicConditionViolated { .. })
        ));
    }

    #[test]
    fn mub3_is_unbiased() {
        let povm = Povm::mub(3).unwrap();
        assert_eq!(povm.len(), 12);
        // across distinct bases tr(Pi Pi') = (1/16) * (1/3)
        for a in 0..4 {
            for b in (a + 1)..4 {
                for i in 0..3 {
                    for j in 0..3 {
                        let x = povm.outcome(3 * a + i);
                        let y = povm.outcome(3 * b + j);
                        assert_abs_diff_eq!(x.inner(y), 1.0 / 48.0, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn mub_rejects_composite_dimension() {
        assert!(matches!(Povm::mub(4), Err(Error::DimNotPrime(4))));
    }

    #[test]
    fn mub5_constructs() {
        let povm = Povm::mub(5).unwrap();
        assert_eq!(povm.len(), 30);
    }

    #[test]
    fn tetrahedron_frame_spectrum() {
        let basis = HermitianBasis::gell_mann(2);
        let povm = Povm::platonic(Solid::Tetrahedron);
        let f = povm.frame_superop(&basis).unwrap();
        let eigs = f.eigenvalues();
        assert_abs_diff_eq!(eigs[3], 2.0, epsilon = 1e-12);
        for &e in &eigs[..3] {
            assert_abs_diff_eq!(e, 2.0 / 3.0, epsilon = 1e-12);
        }
        // completely mixed case: F|1/d>> = |1>>
        let mixed = basis
            .vectorize(&HermitianMatrix::maximally_mixed(2))
            .unwrap();
        let one = basis.vectorize(&HermitianMatrix::identity(2)).unwrap();
        let image = f.apply(&mixed);
        assert!((image.coords() - one.coords()).abs().max() < 1e-12);
    }

    #[test]
    fn octahedron_traceless_spectrum_matches_tetrahedron() {
        let basis = HermitianBasis::gell_mann(2);
        let tetra = Povm::platonic(Solid::Tetrahedron)
            .frame_superop(&basis)
            .unwrap();
        let octa = Povm::platonic(Solid::Octahedron)
            .frame_superop(&basis)
            .unwrap();
        let et = tetra.bar_restrict().eigenvalues();
        let eo = octa.bar_restrict().eigenvalues();
        for (a, b) in et.iter().zip(eo.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn frame_superop_at_mixed_state_reduces_to_frame_superop() {
        let basis = HermitianBasis::gell_mann(3);
        let povm = Povm::sic(3, None).unwrap();
        let f1 = povm.frame_superop(&basis).unwrap();
        let f2 = povm
            .frame_superop_at(&HermitianMatrix::maximally_mixed(3), &basis, BOUNDARY_EPS)
            .unwrap();
        assert!((f1.matrix() - f2.matrix()).abs().max() < 1e-10);
    }

    #[test]
    fn frame_superop_at_satisfies_reproduction_identity() {
        // F(rho)|rho>> = |1>> at an interior state
        let basis = HermitianBasis::gell_mann(2);
        let povm = Povm::platonic(Solid::Tetrahedron);
        let rho = BlochVector::new(0.6886, 0.1137, -0.5025).state().unwrap();
        let f = povm.frame_superop_at(&rho, &basis, BOUNDARY_EPS).unwrap();
        let image = f.apply(&basis.vectorize(&rho).unwrap());
        let one = basis.vectorize(&HermitianMatrix::identity(2)).unwrap();
        assert!((image.coords() - one.coords()).abs().max() < 1e-10);
    }

    #[test]
    fn boundary_state_is_refused() {
        let basis = HermitianBasis::gell_mann(2);
        let povm = Povm::platonic(Solid::Octahedron);
        let pure_z = BlochVector::new(0.0, 0.0, 1.0).state().unwrap();
        let err = povm
            .frame_superop_at(&pure_z, &basis, BOUNDARY_EPS)
            .unwrap_err();
        assert!(matches!(err, Error::BoundaryState { .. }));
    }

    #[test]
    fn platonic_families_are_tight_ic() {
        for solid in [
            Solid::Tetrahedron,
            Solid::Octahedron,
            Solid::Cube,
            Solid::Icosahedron,
            Solid::Dodecahedron,
        ] {
            let (tight, residual) = Povm::platonic(solid).is_tight_ic();
            assert!(tight, "{solid} not tight (residual {residual:.3e})");
            assert!(residual < 1e-12);
        }
    }

    #[test]
    fn mub3_is_tight_ic() {
        let (tight, _) = Povm::mub(3).unwrap().is_tight_ic();
        assert!(tight);
    }

    #[test]
    fn asymmetric_projector_povm_is_not_tight() {
        // four projectors from only two bases: completeness holds but the
        // 2-design condition fails
        let z = Povm::mub(2).unwrap();
        let outcomes: Vec<_> = z.outcomes()[..4]
            .iter()
            .map(|o| o.scale(6.0 / 4.0))
            .collect();
        let povm = Povm::custom(2, outcomes).unwrap();
        let (tight, _) = povm.is_tight_ic();
        assert!(!tight);
    }

    #[test]
    fn informational_completeness_detects_rank() {
        let basis = HermitianBasis::gell_mann(2);
        let full = Povm::platonic(Solid::Tetrahedron);
        assert!(full.is_informationally_complete(&basis).unwrap());
        // a single projective basis spans only part of operator space
        let z_basis = Povm::custom(
            2,
            vec![
                BlochVector::new(0.0, 0.0, 1.0).state().unwrap(),
                BlochVector::new(0.0, 0.0, -1.0).state().unwrap(),
            ],
        )
        .unwrap();
        assert!(!z_basis.is_informationally_complete(&basis).unwrap());
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let povm = Povm::platonic(Solid::Icosahedron);
        let text = povm.to_json();
        let back = Povm::from_json(&text).unwrap();
        assert_eq!(text, back.to_json());
        for (a, b) in povm.outcomes().iter().zip(back.outcomes()) {
            assert_eq!(a.entries(), b.entries());
        }
    }

    #[test]
    fn json_validation_names_offending_outcome() {
        // outcome 1 made non-PSD
        let text = r#"{
            "dim": 2,
            "outcomes": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.5, 0.0]]],
                [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]]
            ]
        }"#;
        match Povm::from_json(text) {
            Err(Error::NotPositive { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }
}
