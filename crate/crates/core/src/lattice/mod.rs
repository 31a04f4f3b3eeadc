//! Exact integer-lattice algorithms: Hermite normal form, Gram–Schmidt,
//! LLL reduction, and kernel bases.
//!
//! Everything here runs on arbitrary-precision integers (or exact
//! rationals); intermediate entries of the HNF transform can grow quickly
//! and must never wrap.

mod gso;
mod hnf;
mod lll;
mod matrix;

pub use gso::{gram_schmidt, GsoData};
pub use hnf::{hnf, kernel_lattice_basis, HnfResult};
pub use lll::{is_lll_reduced, lll_reduce};
pub use matrix::IntegerMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("matrix has {rows} rows but rank {rank}; drop redundant rows first")]
    RankDeficient { rows: usize, rank: usize },
    #[error("kernel is trivial: A has full column rank {n}")]
    FullRankKernel { n: usize },
    #[error("basis columns are linearly dependent (column {index})")]
    DependentColumns { index: usize },
    #[error("shape error: {0}")]
    Shape(String),
}

/// Kernel basis of `a`, LLL-reduced.
pub fn reduced_kernel_basis(a: &IntegerMatrix) -> Result<IntegerMatrix, LatticeError> {
    lll_reduce(&kernel_lattice_basis(a)?)
}
