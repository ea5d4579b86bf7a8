//! Dense complex operators: exact walk evolution, spectral norms, and the
//! commutator check backing the structural commutativity tests.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::{Error, Result, MAX_DENSE_QUBITS, TOL};

pub type C64 = Complex<f64>;

/// Square complex matrix over a power-of-two dimension, at most 2^12.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        let dim = mat.nrows();
        if mat.ncols() != dim {
            return Err(Error::DimMismatch(dim, mat.ncols()));
        }
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!("dimension {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::QubitBudget { requested: n, cap: MAX_DENSE_QUBITS });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("non-finite matrix entry"));
        }
        Ok(DenseOperator { mat })
    }

    pub fn zeros(num_qubits: usize) -> Result<Self> {
        Self::guard(num_qubits)?;
        let dim = 1usize << num_qubits;
        Ok(DenseOperator { mat: DMatrix::zeros(dim, dim) })
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        Self::guard(num_qubits)?;
        let dim = 1usize << num_qubits;
        Ok(DenseOperator { mat: DMatrix::identity(dim, dim) })
    }

    fn guard(num_qubits: usize) -> Result<()> {
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::QubitBudget { requested: num_qubits, cap: MAX_DENSE_QUBITS });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.mat[(row, col)] = value;
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.mat
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        Ok(DenseOperator { mat: &self.mat * &other.mat })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        Ok(DenseOperator { mat: &self.mat - &other.mat })
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { mat: self.mat.adjoint() }
    }

    pub fn scale(&self, factor: C64) -> DenseOperator {
        DenseOperator { mat: self.mat.map(|z| z * factor) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Frobenius distance with the global phase quotiented out: the largest
    /// magnitude entry of `self` is aligned with the matching entry of
    /// `other` before subtracting.
    pub fn frobenius_distance(&self, other: &DenseOperator) -> Result<f64> {
        self.check_dim(other)?;
        let mut best = (0usize, 0usize);
        let mut best_mag = -1.0;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let m = self.mat[(r, c)].norm();
                if m > best_mag {
                    best_mag = m;
                    best = (r, c);
                }
            }
        }
        let phase = if best_mag > TOL && other.mat[best].norm() > TOL {
            let q = other.mat[best] / self.mat[best];
            q / q.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        Ok((self.mat.map(|z| z * phase) - &other.mat).norm())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let dim = self.dim();
        let gram = self.mat.adjoint() * &self.mat;
        (gram - DMatrix::<C64>::identity(dim, dim)).norm() < tol
    }

    /// True when every entry is real and the matrix equals its transpose,
    /// both within `tol`.
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                let z = self.mat[(r, c)];
                if z.im.abs() > tol || (z.re - self.mat[(c, r)].re).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    fn check_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Debug dump as nested arrays of [re, im] pairs.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| [self.mat[(r, c)].re, self.mat[(r, c)].im]).collect())
            .collect();
        serde_json::to_string(&rows).expect("matrix serializes")
    }
}

/// e^{-iAt} for a real symmetric A, via Pade scaling and squaring.
/// The symmetric eigensolver silently loses accuracy on degenerate spectra
/// (matching adjacencies are the worst case, two eigenvalues of multiplicity
/// dim/2), so the exponential is computed without it.
pub fn exact_evolution(a: &DenseOperator, t: f64) -> Result<DenseOperator> {
    if !a.is_real_symmetric(TOL) {
        return Err(Error::NotSymmetric);
    }
    let m = a.matrix() * C64::new(0.0, -t);
    DenseOperator::from_matrix(m.exp())
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.iter().all(|z| z.norm_sqr() == 0.0) {
        return 0.0;
    }
    match m.clone().try_svd(false, false, f64::EPSILON, 0) {
        Some(svd) => svd.singular_values.max(),
        None => {
            // Rare non-convergence: fall back to the largest eigenvalue of
            // the Gram matrix, which is Hermitian positive semidefinite.
            let gram = m.adjoint() * m;
            let eig = SymmetricEigen::new(gram);
            eig.eigenvalues.max().max(0.0).sqrt()
        }
    }
}

/// Largest singular value of U - V.
pub fn spectral_norm_diff(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimMismatch(u.dim(), v.dim()));
    }
    Ok(spectral_norm(&(u.matrix() - v.matrix())))
}

/// Spectral norm of AB - BA.
pub fn commutator_norm(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(spectral_norm(&(ab - ba)))
}
