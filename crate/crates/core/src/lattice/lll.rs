//! LLL reduction in exact integer arithmetic.
//!
//! Follows the integral (fraction-free) formulation: instead of rational
//! `mu_ij` and `||b_i*||^2` it maintains the Gram determinants `d_i` and
//! `lambda_ij = d_{j+1} mu_ij`, all of which stay integral. The exchange
//! test is the factor-2 condition `||b_{k-1}*||^2 <= 2 ||b_k*||^2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::gso::IntegralGso;
use super::{IntegerMatrix, LatticeError};

struct Reducer {
    basis: Vec<Vec<BigInt>>,
    gso: IntegralGso,
}

impl Reducer {
    /// Size-reduce `b_k` against `b_l`.
    fn reduce(&mut self, k: usize, l: usize) {
        let dl = &self.gso.d[l + 1];
        let lam = &self.gso.lambda[k][l];
        if lam.abs() * 2u32 <= *dl {
            return;
        }
        // nearest integer to lam / dl, halves rounded up
        let q = (lam * 2u32 + dl).div_floor(&(dl * 2u32));
        let (lo, hi) = self.basis.split_at_mut(k);
        for (x, y) in hi[0].iter_mut().zip(&lo[l]) {
            if !y.is_zero() {
                *x -= &q * y;
            }
        }
        let (lo, hi) = self.gso.lambda.split_at_mut(k);
        let row_k = &mut hi[0];
        row_k[l] -= &q * dl;
        for i in 0..l {
            row_k[i] -= &q * &lo[l][i];
        }
    }

    fn should_swap(&self, k: usize) -> bool {
        let d = &self.gso.d;
        &d[k + 1] * &d[k - 1] * 2u32 < &d[k] * &d[k]
    }

    fn swap(&mut self, k: usize) {
        self.basis.swap(k, k - 1);
        {
            let (lo, hi) = self.gso.lambda.split_at_mut(k);
            for j in 0..k - 1 {
                std::mem::swap(&mut hi[0][j], &mut lo[k - 1][j]);
            }
        }
        let d = &self.gso.d;
        let lam = self.gso.lambda[k][k - 1].clone();
        let new_dk = (&d[k - 1] * &d[k + 1] + &lam * &lam) / &d[k];
        for i in k + 1..self.basis.len() {
            let t = self.gso.lambda[i][k].clone();
            let upper = (&d[k + 1] * &self.gso.lambda[i][k - 1] - &lam * &t) / &d[k];
            let lower = (&new_dk * &t + &lam * &upper) / &d[k + 1];
            self.gso.lambda[i][k] = upper;
            self.gso.lambda[i][k - 1] = lower;
        }
        self.gso.d[k] = new_dk;
    }

    fn run(&mut self) {
        let dim = self.basis.len();
        let mut k = 1;
        while k < dim {
            self.reduce(k, k - 1);
            if self.should_swap(k) {
                self.swap(k);
                k = (k - 1).max(1);
            } else {
                for l in (0..k - 1).rev() {
                    self.reduce(k, l);
                }
                k += 1;
            }
        }
    }
}

/// LLL-reduce the columns of `b`. The result spans the same lattice and
/// satisfies [`is_lll_reduced`].
pub fn lll_reduce(b: &IntegerMatrix) -> Result<IntegerMatrix, LatticeError> {
    let basis = b.columns();
    let gso = IntegralGso::compute(&basis)?;
    let mut r = Reducer { basis, gso };
    r.run();
    debug_assert!(r.gso.is_reduced());
    IntegerMatrix::from_columns(&r.basis)
}

/// `|mu_ij| <= 1/2` for all `j < i` and `||B_j*||^2 <= 2 ||B_{j+1}*||^2`,
/// evaluated exactly.
pub fn is_lll_reduced(b: &IntegerMatrix) -> Result<bool, LatticeError> {
    Ok(IntegralGso::compute(&b.columns())?.is_reduced())
}
