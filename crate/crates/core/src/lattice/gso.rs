//! Gram–Schmidt orthogonalization, exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{IntegerMatrix, LatticeError};

/// Rational Gram–Schmidt data for the columns `B_1..B_d` of a basis.
#[derive(Debug, Clone)]
pub struct GsoData {
    /// Orthogonal vectors `B_i*`.
    pub bstar: Vec<Vec<BigRational>>,
    /// `mu[i][j] = <B_i, B_j*> / <B_j*, B_j*>` for `j < i`; `mu[i].len() == i`.
    pub mu: Vec<Vec<BigRational>>,
    /// `||B_i*||^2`.
    pub norms_sq: Vec<BigRational>,
}

impl GsoData {
    pub fn bstar_f64(&self) -> Vec<Vec<f64>> {
        self.bstar
            .iter()
            .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn mu_f64(&self, i: usize, j: usize) -> f64 {
        self.mu[i][j].to_f64().unwrap_or(f64::NAN)
    }
}

fn dot(x: &[BigRational], y: &[BigRational]) -> BigRational {
    x.iter()
        .zip(y)
        .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
}

/// Exact Gram–Schmidt orthogonalization of the columns of `b`.
pub fn gram_schmidt(b: &IntegerMatrix) -> Result<GsoData, LatticeError> {
    let cols: Vec<Vec<BigRational>> = b
        .columns()
        .into_iter()
        .map(|c| c.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(cols.len());
    let mut mu: Vec<Vec<BigRational>> = Vec::with_capacity(cols.len());
    let mut norms_sq: Vec<BigRational> = Vec::with_capacity(cols.len());

    for (i, bi) in cols.iter().enumerate() {
        let mut v = bi.clone();
        let mut row = Vec::with_capacity(i);
        for j in 0..i {
            let coeff = dot(bi, &bstar[j]) / &norms_sq[j];
            for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= &coeff * sk;
            }
            row.push(coeff);
        }
        let nsq = dot(&v, &v);
        if nsq.is_zero() {
            return Err(LatticeError::DependentColumns { index: i });
        }
        bstar.push(v);
        mu.push(row);
        norms_sq.push(nsq);
    }
    Ok(GsoData { bstar, mu, norms_sq })
}

/// Fraction-free Gram–Schmidt data: Gram determinants `d[0] = 1`,
/// `d[i+1] = prod_{j<=i} ||b_j*||^2`, and `lambda[i][j] = d[j+1] * mu_ij`.
/// All entries are integers.
#[derive(Debug, Clone)]
pub(crate) struct IntegralGso {
    pub d: Vec<BigInt>,
    pub lambda: Vec<Vec<BigInt>>,
}

fn int_dot(x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter()
        .zip(y)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .map(|(a, b)| a * b)
        .sum()
}

impl IntegralGso {
    pub fn compute(cols: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let k = cols.len();
        let mut d = Vec::with_capacity(k + 1);
        d.push(BigInt::from(1));
        let mut lambda: Vec<Vec<BigInt>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut row = Vec::with_capacity(i);
            for j in 0..=i {
                let mut u = int_dot(&cols[i], &cols[j]);
                for l in 0..j {
                    let lj = if j < i { &lambda[j][l] } else { &row[l] };
                    u = (&d[l + 1] * &u - &row[l] * lj) / &d[l];
                }
                if j < i {
                    row.push(u);
                } else {
                    if u.is_zero() {
                        return Err(LatticeError::DependentColumns { index: i });
                    }
                    d.push(u);
                }
            }
            lambda.push(row);
        }
        Ok(Self { d, lambda })
    }

    /// Both reduced-basis conditions, checked in integers:
    /// `2|lambda_ij| <= d_{j+1}` and `d_{j+1}^2 <= 2 d_j d_{j+2}`.
    pub fn is_reduced(&self) -> bool {
        let size_reduced = self.lambda.iter().all(|row| {
            row.iter()
                .enumerate()
                .all(|(j, l)| (l.abs() * 2u32) <= self.d[j + 1])
        });
        let k = self.lambda.len();
        let siegel = (0..k.saturating_sub(1))
            .all(|j| &self.d[j + 1] * &self.d[j + 1] <= &self.d[j] * &self.d[j + 2] * 2u32);
        size_reduced && siegel
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn identity_is_its_own_gso() {
        let b = IntegerMatrix::identity(3).unwrap();
        let g = gram_schmidt(&b).unwrap();
        for (i, v) in g.bstar.iter().enumerate() {
            for (k, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == k { q(1) } else { q(0) });
            }
            assert!(g.mu[i].iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn two_vector_example() {
        let b = IntegerMatrix::from_rows(&[vec![1i64, 1], vec![0, 1]]).unwrap();
        let g = gram_schmidt(&b).unwrap();
        assert_eq!(g.bstar[1], vec![q(0), q(1)]);
        assert!(g.mu[1][0].is_one());
    }

    #[test]
    fn dependent_columns_error() {
        let b = IntegerMatrix::from_rows(&[vec![1i64, 2], vec![2, 4]]).unwrap();
        assert!(matches!(
            gram_schmidt(&b),
            Err(LatticeError::DependentColumns { index: 1 })
        ));
    }

    #[test]
    fn reconstruction_and_orthogonality_on_random_basis() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 20 {
            let rows: Vec<Vec<i64>> = (0..5)
                .map(|_| (0..3).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let b = IntegerMatrix::from_rows(&rows).unwrap();
            let Ok(g) = gram_schmidt(&b) else { continue };
            let bs = g.bstar_f64();
            for i in 0..3 {
                for k in 0..5 {
                    let rec = bs[i][k] + (0..i).map(|j| g.mu_f64(i, j) * bs[j][k]).sum::<f64>();
                    let orig = rows[k][i] as f64;
                    assert!((rec - orig).abs() <= 1e-9);
                }
                for j in 0..i {
                    assert!(dot(&g.bstar[i], &g.bstar[j]).is_zero());
                }
            }
            done += 1;
        }
    }

    #[test]
    fn integral_matches_rational() {
        let b = IntegerMatrix::from_rows(&[vec![3i64, 1, 4], vec![1, 5, 9], vec![2, 6, 5], vec![3, 5, 8]])
            .unwrap();
        let g = gram_schmidt(&b).unwrap();
        let ig = IntegralGso::compute(&b.columns()).unwrap();
        let mut prod = q(1);
        for i in 0..3 {
            prod *= &g.norms_sq[i];
            assert_eq!(BigRational::from_integer(ig.d[i + 1].clone()), prod);
            for j in 0..i {
                let expect = &g.mu[i][j] * BigRational::from_integer(ig.d[j + 1].clone());
                assert_eq!(BigRational::from_integer(ig.lambda[i][j].clone()), expect);
            }
        }
    }
}
