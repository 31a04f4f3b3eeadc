//! Column-style Hermite normal form with unimodular transform tracking.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{IntegerMatrix, LatticeError};

/// Output of [`hnf`]: `A·C = (H | 0)` with `C = (D | B)` unimodular.
#[derive(Debug, Clone)]
pub struct HnfResult {
    /// m×m lower-triangular, positive diagonal, `0 <= h_ij < h_ii` for `j < i`.
    pub h: IntegerMatrix,
    /// n×n unimodular transform.
    pub c: IntegerMatrix,
    /// First m columns of `c`.
    pub d: IntegerMatrix,
    /// Last n−m columns of `c`: a basis of the integer kernel of `A`.
    /// `None` when m = n.
    pub b: Option<IntegerMatrix>,
}

/// A column of `A` stacked on top of the matching column of `C`, so that
/// every elementary column operation hits both at once.
#[derive(Clone)]
struct Column {
    a: Vec<BigInt>,
    c: Vec<BigInt>,
}

impl Column {
    fn sub_scaled(&mut self, q: &BigInt, other: &Column) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
        for (x, y) in self.c.iter_mut().zip(&other.c) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
    }

    fn negate(&mut self) {
        for x in self.a.iter_mut().chain(self.c.iter_mut()) {
            *x = -&*x;
        }
    }
}

/// Hermite normal form of a full-row-rank integer matrix.
///
/// Row by row, the entries right of the diagonal are cleared by repeated
/// Euclidean column reduction against the smallest nonzero entry (leftmost
/// on ties), the pivot is made positive, and the entries left of the
/// diagonal are reduced modulo the pivot.
pub fn hnf(a: &IntegerMatrix) -> Result<HnfResult, LatticeError> {
    let m = a.rows();
    let n = a.cols();
    if m > n {
        return Err(LatticeError::RankDeficient { rows: m, rank: a.rank() });
    }

    let mut cols: Vec<Column> = (0..n)
        .map(|j| Column {
            a: a.column(j),
            c: (0..n)
                .map(|i| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect(),
        })
        .collect();

    for i in 0..m {
        loop {
            let pivot = (i..n)
                .filter(|&j| !cols[j].a[i].is_zero())
                .min_by(|&x, &y| cols[x].a[i].abs().cmp(&cols[y].a[i].abs()).then(x.cmp(&y)));
            let Some(p) = pivot else {
                return Err(LatticeError::RankDeficient { rows: m, rank: a.rank() });
            };
            cols.swap(i, p);

            let (head, tail) = cols.split_at_mut(i + 1);
            let pivot_col = &head[i];
            let mut cleared = true;
            for col in tail.iter_mut() {
                if col.a[i].is_zero() {
                    continue;
                }
                let q = col.a[i].div_floor(&pivot_col.a[i]);
                col.sub_scaled(&q, pivot_col);
                if !col.a[i].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                break;
            }
        }

        if cols[i].a[i].is_negative() {
            cols[i].negate();
        }

        // Columns left of the pivot have already been fixed for rows < i and
        // the pivot column is zero there, so this only touches row i onward.
        let (head, tail) = cols.split_at_mut(i);
        let pivot_col = &tail[0];
        for col in head.iter_mut() {
            let q = col.a[i].div_floor(&pivot_col.a[i]);
            if !q.is_zero() {
                col.sub_scaled(&q, pivot_col);
            }
        }
    }

    let h_cols: Vec<Vec<BigInt>> = cols[..m].iter().map(|c| c.a.clone()).collect();
    let c_cols: Vec<Vec<BigInt>> = cols.iter().map(|c| c.c.clone()).collect();
    let h = IntegerMatrix::from_columns(&h_cols)?;
    let c = IntegerMatrix::from_columns(&c_cols)?;
    let d = c.select_columns(0..m)?;
    let b = if m < n {
        Some(c.select_columns(m..n)?)
    } else {
        None
    };
    Ok(HnfResult { h, c, d, b })
}

/// Basis of the integer kernel `{g ∈ Z^n : A g = 0}` as the trailing
/// columns of the HNF transform.
pub fn kernel_lattice_basis(a: &IntegerMatrix) -> Result<IntegerMatrix, LatticeError> {
    let res = hnf(a)?;
    res.b.ok_or(LatticeError::FullRankKernel { n: a.cols() })
}
