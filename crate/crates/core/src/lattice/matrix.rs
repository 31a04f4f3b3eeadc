use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LatticeError;

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, LatticeError> {
        if rows == 0 || cols == 0 {
            return Err(LatticeError::Shape(format!(
                "matrix must have at least one row and column, got {rows}x{cols}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self, LatticeError> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        Ok(m)
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, LatticeError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(LatticeError::Shape(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                m.data[i * c + j] = v.clone().into();
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c)?;
        for (j, col) in columns.iter().enumerate() {
            if col.len() != r {
                return Err(LatticeError::Shape(format!(
                    "column {j} has {} entries, expected {r}",
                    col.len()
                )));
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * c + j] = v.clone();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Columns `range` as a new matrix.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> Result<Self, LatticeError> {
        if range.end > self.cols {
            return Err(LatticeError::Shape(format!(
                "column range {range:?} out of bounds for {} columns",
                self.cols
            )));
        }
        let mut m = Self::zeros(self.rows, range.len())?;
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if v.len() != self.cols {
            return Err(LatticeError::Shape(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn mul_vec_i64(&self, v: &[i64]) -> Result<Vec<BigInt>, LatticeError> {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.mul_vec(&v)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Entries converted to `i64`, or `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|v| v.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        rational_rank(&self.to_rows())
    }

    /// Exact determinant of a square matrix.
    pub fn determinant(&self) -> Result<BigInt, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::Shape(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(BigInt::zero());
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot_row = a[col].clone();
            det *= &pivot_row[col];
            for row in &mut a[col + 1..] {
                if row[col].is_zero() {
                    continue;
                }
                let f = &row[col] / &pivot_row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &f * p;
                }
            }
        }
        Ok(det.to_integer())
    }
}

/// Rank of the row list by rational Gaussian elimination.
fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let pivot_row = a[rank].clone();
        for row in &mut a[rank + 1..] {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &f * p;
            }
        }
        rank += 1;
    }
    rank
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(IntegerMatrix::zeros(0, 3).is_err());
        assert!(IntegerMatrix::from_rows(&[vec![1i64, 2], vec![3]]).is_err());
    }

    #[test]
    fn rank_and_determinant() {
        let a = IntegerMatrix::from_rows(&[vec![3i64, 1], vec![1, 2]]).unwrap();
        assert_eq!(a.rank(), 2);
        assert_eq!(a.determinant().unwrap(), BigInt::from(5));
        let dup = IntegerMatrix::from_rows(&[vec![1i64, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(dup.rank(), 1);
        let z = IntegerMatrix::from_rows(&[vec![0i64, 0], vec![0, 0]]).unwrap();
        assert_eq!(z.rank(), 0);
        assert_eq!(z.determinant().unwrap(), BigInt::zero());
    }

    #[test]
    fn multiply_and_transpose() {
        let a = IntegerMatrix::from_rows(&[vec![1i64, 2], vec![3, 4]]).unwrap();
        let b = IntegerMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, IntegerMatrix::from_rows(&[vec![2i64, 1], vec![4, 3]]).unwrap());
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(
            a.mul_vec_i64(&[1, -1]).unwrap(),
            vec![BigInt::from(-1), BigInt::from(-1)]
        );
    }
}
