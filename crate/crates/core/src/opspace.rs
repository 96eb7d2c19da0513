//! Linear algebra over the real vector space of Hermitian operators.
//!
//! A Hermitian `d x d` operator `A` is treated as a real vector `|A>>` with
//! `d^2` coordinates `tr(E_j A)` in an orthonormal Hermitian basis `{E_j}`,
//! so that `<<A|B>> = tr(AB)`. Linear maps on operators ("superoperators")
//! are then plain real `d^2 x d^2` matrices. By convention the basis element
//! `E_0` is `1/sqrt(d)`; elements `1..d^2-1` are traceless, which makes the
//! projector onto traceless operators a coordinate projection.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A validated `d x d` complex Hermitian matrix.
///
/// Construction symmetrises small numerical noise away but rejects anything
/// farther than [`HERMITICITY_TOL`] from its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(Error::DimensionMismatch(dim, entries.ncols()));
        }
        let mut max_dev = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let dev = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(max_dev));
        }
        // Exact Hermitisation so downstream checks can rely on symmetry.
        let entries = (&entries + entries.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { dim, entries })
    }

    /// Hermitian part of an arbitrary square matrix, `(M + M^dag)/2`.
    pub fn hermitian_part(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim {
            return Err(Error::DimensionMismatch(dim, m.ncols()));
        }
        let entries = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// The completely mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            dim,
            entries: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }

    /// Projector `|psi><psi|` onto a (normalised) pure state.
    pub fn pure(psi: &DVector<Complex64>) -> Self {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let entries = psi * psi.adjoint() / Complex64::new(norm2, 0.0);
        Self {
            dim: psi.len(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[(i, i)].re).sum()
    }

    /// `tr(AB)`, real for Hermitian `A`, `B`.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self.entries[(i, j)] * other.entries[(j, i)]).re;
            }
        }
        acc
    }

    /// `tr(A^2) = ||A||_HS^2`.
    pub fn purity(&self) -> f64 {
        self.inner(self)
    }

    /// Ascending real eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs
    }

    /// Eigendecomposition: ascending eigenvalues and matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let se = SymmetricEigen::new(self.entries.clone());
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
        let eigs: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(self.dim, self.dim);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &se.eigenvectors.column(i));
        }
        (eigs, vectors)
    }

    /// Validate the state refinement: unit trace and eigenvalues `>= -1e-12`.
    pub fn validate_state(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitTrace(tr));
        }
        let min_eig = self.eigenvalues()[0];
        if min_eig < -1e-12 {
            return Err(Error::NotPositive {
                index: 0,
                min_eig,
            });
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: &self.entries * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: &self.entries - &other.entries,
        }
    }

    /// Conjugate by a unitary: `U A U^dag`.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Self {
        Self {
            dim: self.dim,
            entries: u * &self.entries * u.adjoint(),
        }
    }
}

/// An orthonormal Hermitian operator basis with `E_0 = 1/sqrt(d)` and
/// `E_1 .. E_{d^2-1}` traceless: the generalised Gell-Mann basis.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl HermitianBasis {
    /// Generalised Gell-Mann basis: `1/sqrt(d)`, then the symmetric,
    /// antisymmetric, and diagonal families. For `d = 2` the traceless part
    /// is `sigma_x/sqrt(2), sigma_y/sqrt(2), sigma_z/sqrt(2)` in that order.
    pub fn gell_mann(dim: usize) -> Self {
        assert!(dim >= 1, "basis dimension must be positive");
        let mut elements = Vec::with_capacity(dim * dim);
        let inv_sqrt_d = 1.0 / (dim as f64).sqrt();
        elements.push(HermitianMatrix {
            dim,
            entries: DMatrix::identity(dim, dim) * Complex64::new(inv_sqrt_d, 0.0),
        });
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = DMatrix::zeros(dim, dim);
                sym[(j, k)] = Complex64::new(s, 0.0);
                sym[(k, j)] = Complex64::new(s, 0.0);
                elements.push(HermitianMatrix { dim, entries: sym });
                let mut asym = DMatrix::zeros(dim, dim);
                asym[(j, k)] = Complex64::new(0.0, -s);
                asym[(k, j)] = Complex64::new(0.0, s);
                elements.push(HermitianMatrix { dim, entries: asym });
            }
        }
        for l in 1..dim {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = DMatrix::zeros(dim, dim);
            for j in 0..l {
                diag[(j, j)] = Complex64::new(norm, 0.0);
            }
            diag[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            elements.push(HermitianMatrix { dim, entries: diag });
        }
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, j: usize) -> &HermitianMatrix {
        &self.elements[j]
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Coordinates `coords[j] = tr(E_j A)` of an operator in this basis.
    pub fn vectorize(&self, a: &HermitianMatrix) -> Result<OperatorKet> {
        if a.dim != self.dim {
            return Err(Error::DimensionMismatch(a.dim, self.dim));
        }
        let coords = DVector::from_iterator(
            self.elements.len(),
            self.elements.iter().map(|e| e.inner(a)),
        );
        Ok(OperatorKet {
            dim: self.dim,
            coords,
        })
    }

    /// Reassemble the operator `sum_j coords[j] E_j`.
    pub fn devectorize(&self, ket: &OperatorKet) -> Result<HermitianMatrix> {
        if ket.dim != self.dim {
            return Err(Error::DimensionMismatch(ket.dim, self.dim));
        }
        let mut entries = DMatrix::zeros(self.dim, self.dim);
        for (j, e) in self.elements.iter().enumerate() {
            entries += &e.entries * Complex64::new(ket.coords[j], 0.0);
        }
        Ok(HermitianMatrix {
            dim: self.dim,
            entries,
        })
    }
}

/// Real coordinates of a Hermitian operator in a [`HermitianBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKet {
    dim: usize,
    coords: DVector<f64>,
}

impl OperatorKet {
    pub fn from_coords(dim: usize, coords: DVector<f64>) -> Result<Self> {
        if coords.len() != dim * dim {
            return Err(Error::DimensionMismatch(coords.len(), dim * dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// `<<A|B>> = tr(AB)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.coords.dot(&other.coords)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.dot(&self.coords)
    }
}

/// A real `d^2 x d^2` linear map on operator kets.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(matrix.nrows(), n));
        }
        Ok(Self { dim, matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        let n = dim * dim;
        Self {
            dim,
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let n = dim * dim;
        Self {
            dim,
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Projector onto the traceless subspace (coordinates `1..d^2-1`).
    pub fn traceless_projector(dim: usize) -> Self {
        let n = dim * dim;
        let mut matrix = DMatrix::identity(n, n);
        matrix[(0, 0)] = 0.0;
        Self { dim, matrix }
    }

    /// `|a>><<b|`.
    pub fn outer(a: &OperatorKet, b: &OperatorKet) -> Self {
        Self {
            dim: a.dim,
            matrix: &a.coords * b.coords.transpose(),
        }
    }

    /// Rank-one update `self += weight |a>><<b|`.
    pub fn add_outer(&mut self, weight: f64, a: &OperatorKet, b: &OperatorKet) {
        self.matrix.ger(weight, &a.coords, &b.coords, 1.0);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, ket: &OperatorKet) -> OperatorKet {
        OperatorKet {
            dim: self.dim,
            coords: &self.matrix * &ket.coords,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * factor,
        }
    }

    /// Trace over the full operator space.
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn max_symmetry_deviation(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        dev
    }

    /// Default relative rank cutoff for [`Self::pinv`]: `d^2 * eps`.
    pub fn default_rtol(&self) -> f64 {
        (self.dim * self.dim) as f64 * f64::EPSILON
    }

    /// Moore-Penrose pseudoinverse of a symmetric superoperator.
    ///
    /// Eigenvalues with `|lambda| < rtol * max|lambda|` are treated as zero.
    /// Total on symmetric input; callers near boundary states may widen
    /// `rtol`.
    pub fn pinv(&self, rtol: f64) -> Superoperator {
        // Symmetrise first so the eigendecomposition is exact on its input.
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let se = SymmetricEigen::new(sym);
        let max_abs = se
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &l| m.max(l.abs()));
        let cutoff = rtol * max_abs;
        let n = self.matrix.nrows();
        let mut inv = DMatrix::zeros(n, n);
        for (k, &l) in se.eigenvalues.iter().enumerate() {
            if l.abs() > cutoff {
                let v = se.eigenvectors.column(k);
                inv.ger(1.0 / l, &v, &v, 1.0);
            }
        }
        Superoperator {
            dim: self.dim,
            matrix: inv,
        }
    }

    /// Inverse via the pseudoinverse with the default cutoff, failing if the
    /// matrix is rank deficient.
    pub fn try_inverse(&self) -> Result<Superoperator> {
        let n = self.matrix.nrows();
        let rank = self.rank(self.default_rtol());
        if rank < n {
            return Err(Error::NotInformationallyComplete { rank, needed: n });
        }
        Ok(self.pinv(self.default_rtol()))
    }

    /// Numerical rank at a relative eigenvalue cutoff.
    pub fn rank(&self, rtol: f64) -> usize {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let se = SymmetricEigen::new(sym);
        let max_abs = se
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &l| m.max(l.abs()));
        let cutoff = rtol * max_abs;
        se.eigenvalues.iter().filter(|l| l.abs() > cutoff).count()
    }

    /// Ascending eigenvalues of the symmetrised matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let mut eigs: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs
    }

    /// Restriction `P S P` onto the traceless subspace: zeroes the identity
    /// row and column.
    pub fn bar_restrict(&self) -> Superoperator {
        let mut matrix = self.matrix.clone();
        let n = matrix.nrows();
        for i in 0..n {
            matrix[(0, i)] = 0.0;
            matrix[(i, 0)] = 0.0;
        }
        Superoperator {
            dim: self.dim,
            matrix,
        }
    }

    /// Determinant of the restriction to the traceless subspace.
    pub fn det_bar(&self) -> f64 {
        let n = self.matrix.nrows();
        let block = self.matrix.view((1, 1), (n - 1, n - 1)).into_owned();
        block.determinant()
    }

    /// Trace of the restriction to the traceless subspace.
    pub fn trace_bar(&self) -> f64 {
        let n = self.matrix.nrows();
        (1..n).map(|i| self.matrix[(i, i)]).sum()
    }
}
