use nalgebra::DMatrix;

use super::ExtractionError;
use crate::lattice::{reduced_kernel_basis, IntegerMatrix};

/// LLL-reduced integer kernel basis `B` (n×d) with the float copies and
/// the pseudoinverse `(BᵀB)⁻¹Bᵀ` needed on the heuristic path.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    exact: IntegerMatrix,
    rows: Vec<Vec<i64>>,
    rows_f64: Vec<Vec<f64>>,
    pinv: Vec<Vec<f64>>,
}

impl KernelBasis {
    /// Wrap an existing basis; entries must fit in `i64`.
    pub fn new(b: IntegerMatrix) -> Result<Self, ExtractionError> {
        let rows = b.to_i64_rows().ok_or_else(|| {
            ExtractionError::Overflow("kernel basis entries exceed 64 bits".into())
        })?;
        let (n, d) = (b.rows(), b.cols());
        let bf = DMatrix::from_fn(n, d, |i, j| rows[i][j] as f64);
        let gram = bf.transpose() * &bf;
        let chol = gram.cholesky().ok_or(ExtractionError::Lattice(
            crate::lattice::LatticeError::DependentColumns { index: 0 },
        ))?;
        let pinv_m = chol.solve(&bf.transpose());
        let pinv = (0..d)
            .map(|i| (0..n).map(|j| pinv_m[(i, j)]).collect())
            .collect();
        let rows_f64 = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        Ok(Self {
            exact: b,
            rows,
            rows_f64,
            pinv,
        })
    }

    /// HNF kernel basis of `a`, then LLL.
    pub fn for_matrix(a: &IntegerMatrix) -> Result<Self, ExtractionError> {
        Self::new(reduced_kernel_basis(a)?)
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn lattice_dim(&self) -> usize {
        self.exact.cols()
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.exact
    }

    pub(crate) fn rows_f64(&self) -> &[Vec<f64>] {
        &self.rows_f64
    }

    /// `B z` for real `z`.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.rows_f64
            .iter()
            .map(|r| r.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `B z` for integer `z`, `None` on overflow.
    pub fn apply_int(&self, z: &[i64]) -> Option<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                let s: i128 = r.iter().zip(z).map(|(&a, &b)| a as i128 * b as i128).sum();
                i64::try_from(s).ok()
            })
            .collect()
    }

    /// Least-squares coordinates of `g` (float pseudoinverse).
    pub fn coords(&self, g: &[f64]) -> Vec<f64> {
        self.pinv
            .iter()
            .map(|r| r.iter().zip(g).map(|(a, b)| a * b).sum())
            .collect()
    }
}
