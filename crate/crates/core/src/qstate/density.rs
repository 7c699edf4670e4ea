use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::DenseState;
use super::{MAX_DENSITY_QUBITS, TOLERANCE};
use crate::error::{Error, Result};

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: u32,
    matrix: DMatrix<Complex64>,
}

fn check_qubits(qubits: u32) -> Result<usize> {
    if qubits > MAX_DENSITY_QUBITS {
        return Err(Error::BudgetExceeded(format!(
            "density matrix on {qubits} qubits exceeds the {MAX_DENSITY_QUBITS}-qubit limit"
        )));
    }
    Ok(1usize << qubits)
}

impl DensityMatrix {
    pub fn new(qubits: u32, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        let rho = Self { qubits, matrix };
        rho.validate()?;
        Ok(rho)
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let herm_err = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm_err})")));
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &DenseState) -> Result<Self> {
        check_qubits(state.qubits())?;
        let v = DMatrix::from_column_slice(state.dim(), 1, state.amplitudes());
        Ok(Self {
            qubits: state.qubits(),
            matrix: &v * v.adjoint(),
        })
    }

    pub fn maximally_mixed(qubits: u32) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        Ok(Self {
            qubits,
            matrix: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues from the Hermitian eigendecomposition, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        eig
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &DenseState) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.dim(),
            });
        }
        let v = DMatrix::from_column_slice(state.dim(), 1, state.amplitudes());
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_dim(other)?;
        Ok((&self.matrix - &other.matrix).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    /// Real and imaginary parts as row-major nested vectors.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.dim();
        let re = (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)].im).collect()).collect();
        (re, im)
    }

    fn same_dim(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

/// `½·Tr|a − b|`, via the eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    a.same_dim(b)?;
    let diff = &a.matrix - &b.matrix;
    let eig = diff.symmetric_eigenvalues();
    Ok((0.5 * eig.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_distance_examples() {
        let zero = DenseState::basis(1, 0).unwrap().to_density().unwrap();
        let one = DenseState::basis(1, 1).unwrap().to_density().unwrap();
        let plus = DenseState::normalized(1, vec![Complex64::new(1.0, 0.0); 2])
            .unwrap()
            .to_density()
            .unwrap();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&zero, &plus).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let m = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        assert!(DensityMatrix::new(1, m).is_ok());
        let neg = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        assert!(DensityMatrix::new(1, neg).is_err());
        assert!(matches!(
            DensityMatrix::maximally_mixed(13),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn expectation_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let psi = DenseState::basis(4, 3).unwrap();
        assert!((rho.expectation(&psi).unwrap() - 1.0 / 16.0).abs() < 1e-12);
    }
}
