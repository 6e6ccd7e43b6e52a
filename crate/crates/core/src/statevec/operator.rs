use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{StateVector, MAX_QUBITS};
use crate::error::{Error, Result};

/// Elementwise tolerance for the unitary/Hermitian/projector checks.
pub const OPERATOR_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Unitary,
    Hermitian,
    Projector,
}

/// A square operator on `k` qubits, validated against its declared kind.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    k_qubits: usize,
    matrix: DMatrix<Complex64>,
    kind: OperatorKind,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<Complex64>, kind: OperatorKind) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.ncols(),
            });
        }
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let k_qubits = dim.trailing_zeros() as usize;
        if k_qubits > MAX_QUBITS {
            return Err(Error::DimensionOverflow(k_qubits));
        }
        let adjoint = matrix.adjoint();
        match kind {
            OperatorKind::Unitary => {
                let dev = max_abs(&(&adjoint * &matrix - DMatrix::identity(dim, dim)));
                if dev > OPERATOR_TOLERANCE {
                    return Err(Error::NotUnitary(dev));
                }
            }
            OperatorKind::Hermitian => {
                let dev = max_abs(&(&matrix - &adjoint));
                if dev > OPERATOR_TOLERANCE {
                    return Err(Error::NotHermitian(dev));
                }
            }
            OperatorKind::Projector => {
                let herm = max_abs(&(&matrix - &adjoint));
                if herm > OPERATOR_TOLERANCE {
                    return Err(Error::NotProjector(herm));
                }
                let idem = max_abs(&(&matrix * &matrix - &matrix));
                if idem > OPERATOR_TOLERANCE {
                    return Err(Error::NotProjector(idem));
                }
            }
        }
        Ok(Self {
            k_qubits,
            matrix,
            kind,
        })
    }

    pub fn unitary(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new(matrix, OperatorKind::Unitary)
    }

    pub fn hermitian(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new(matrix, OperatorKind::Hermitian)
    }

    pub fn projector(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new(matrix, OperatorKind::Projector)
    }

    /// Re-validates the same matrix under a different kind.
    pub fn as_kind(&self, kind: OperatorKind) -> Result<Self> {
        Self::new(self.matrix.clone(), kind)
    }

    pub fn identity(k_qubits: usize) -> Self {
        let dim = 1 << k_qubits;
        Self {
            k_qubits,
            matrix: DMatrix::identity(dim, dim),
            kind: OperatorKind::Unitary,
        }
    }

    fn pauli(entries: [Complex64; 4], kind: OperatorKind) -> Self {
        Self {
            k_qubits: 1,
            matrix: DMatrix::from_row_slice(2, 2, &entries),
            kind,
        }
    }

    pub fn pauli_x(kind: OperatorKind) -> Self {
        Self::pauli([ZERO, ONE, ONE, ZERO], kind)
    }

    pub fn pauli_y(kind: OperatorKind) -> Self {
        Self::pauli([ZERO, -I, I, ZERO], kind)
    }

    pub fn pauli_z(kind: OperatorKind) -> Self {
        Self::pauli([ONE, ZERO, ZERO, -ONE], kind)
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::pauli([h, h, h, -h], OperatorKind::Unitary)
    }

    /// `σ⃗·n̂` for a real 3-vector (not required to be unit length here).
    pub fn pauli_dot(n: [f64; 3]) -> Self {
        let [x, y, z] = n;
        Self::pauli(
            [
                Complex64::new(z, 0.0),
                Complex64::new(x, -y),
                Complex64::new(x, y),
                Complex64::new(-z, 0.0),
            ],
            OperatorKind::Hermitian,
        )
    }

    /// Rank-1 projector `|s><s|`.
    pub fn projector_onto(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            k_qubits: state.n_qubits(),
            matrix: &v * v.adjoint(),
            kind: OperatorKind::Projector,
        }
    }

    /// Kronecker product `self ⊗ other` validated as `kind`.
    pub fn kron(&self, other: &OperatorMatrix, kind: OperatorKind) -> Result<Self> {
        Self::new(self.matrix.kronecker(&other.matrix), kind)
    }

    /// Real multiple of a Hermitian operator.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.matrix.map(|z| z * factor),
            match self.kind {
                OperatorKind::Projector => OperatorKind::Hermitian,
                k => k,
            },
        )
    }

    pub fn k_qubits(&self) -> usize {
        self.k_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> DMatrix<Complex64> {
        self.matrix.adjoint()
    }

    /// `<a| self |b>`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<Complex64> {
        let dim = self.dim();
        for s in [a, b] {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        let mut acc = ZERO;
        for r in 0..dim {
            for c in 0..dim {
                acc += a.amplitudes()[r].conj() * self.matrix[(r, c)] * b.amplitudes()[c];
            }
        }
        Ok(acc)
    }

    /// Spectral decomposition of a Hermitian (or projector) operator.
    ///
    /// Eigenvalues ascend; each eigenvector has its first nonzero component
    /// made real-positive.
    pub fn eigen(&self) -> Result<Spectrum> {
        if self.kind == OperatorKind::Unitary {
            let dev = max_abs(&(&self.matrix - self.matrix.adjoint()));
            if dev > OPERATOR_TOLERANCE {
                return Err(Error::NotHermitian(dev));
            }
        }
        Spectrum::of(&self.matrix)
    }
}

/// Eigen-decomposition of a Hermitian matrix with a fixed phase convention.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl Spectrum {
    fn of(matrix: &DMatrix<Complex64>) -> Result<Self> {
        let eig = nalgebra::SymmetricEigen::new(matrix.clone());
        let dim = matrix.nrows();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vectors = DMatrix::zeros(dim, dim);
        for (col, &src) in order.iter().enumerate() {
            let v = eig.eigenvectors.column(src);
            let pivot = v
                .iter()
                .find(|z| z.norm() > 1e-9)
                .copied()
                .ok_or_else(|| Error::InvalidGenerator("null eigenvector".into()))?;
            let phase = pivot.conj() / pivot.norm();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for r in 0..dim {
                vectors[(r, col)] = v[r] * phase / norm;
            }
        }
        Ok(Self {
            values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            vectors,
        })
    }

    pub fn vector(&self, index: usize) -> StateVector {
        let amps: Vec<Complex64> = self.vectors.column(index).iter().copied().collect();
        StateVector::from_trusted(amps)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// `exp(-i t H)` for a fixed Hermitian generator, via its eigenbasis.
#[derive(Clone, Debug)]
pub struct Propagator {
    generator: OperatorMatrix,
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(generator: &OperatorMatrix) -> Result<Self> {
        let generator = generator.as_kind(OperatorKind::Hermitian)?;
        let spectrum = generator.eigen()?;
        Ok(Self {
            generator,
            spectrum,
        })
    }

    pub fn generator(&self) -> &OperatorMatrix {
        &self.generator
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Raw `exp(-i t H)` matrix.
    pub fn matrix(&self, t: f64) -> DMatrix<Complex64> {
        let v = &self.spectrum.vectors;
        let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            v.nrows(),
            self.spectrum
                .values
                .iter()
                .map(|&lambda| Complex64::from_polar(1.0, -t * lambda)),
        ));
        v * phases * v.adjoint()
    }

    pub fn unitary(&self, t: f64) -> Result<OperatorMatrix> {
        OperatorMatrix::unitary(self.matrix(t))
    }
}
