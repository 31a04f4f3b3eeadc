//! The conformal order, exact Graver elements by bounded enumeration, and
//! the maps between kernel vectors and their lattice coordinates.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::lattice::{IntegerMatrix, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraverError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("entry does not fit in a 64-bit integer")]
    Overflow,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `x ⊑ y`: same orthant and `|x_i| <= |y_i|` everywhere.
pub fn conforms(x: &[i64], y: &[i64]) -> Result<bool, GraverError> {
    if x.len() != y.len() {
        return Err(GraverError::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(conforms_unchecked(x, y))
}

#[inline]
pub(crate) fn conforms_unchecked(x: &[i64], y: &[i64]) -> bool {
    x.iter().zip(y).all(|(&a, &b)| {
        (a == 0) || ((a > 0) == (b > 0) && b != 0 && a.unsigned_abs() <= b.unsigned_abs())
    })
}

/// Integer box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl SearchBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self, GraverError> {
        if lo.len() != hi.len() {
            return Err(GraverError::LengthMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        Ok(Self { lo, hi })
    }

    /// `[l − u, u − l]`, the box every usable augmentation step lives in.
    pub fn difference_box(l: &[i64], u: &[i64]) -> Self {
        let hi: Vec<i64> = l.iter().zip(u).map(|(&a, &b)| b - a).collect();
        let lo = hi.iter().map(|&x| -x).collect();
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, g: &[i64]) -> bool {
        g.len() == self.lo.len()
            && g
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    /// Number of integer points, saturating.
    pub fn volume(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&lo, &hi)| if hi < lo { 0 } else { (hi - lo) as u128 + 1 })
            .fold(1u128, |acc, w| acc.saturating_mul(w))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    /// Largest ambient dimension accepted.
    pub max_dim: usize,
    /// Search-tree nodes allowed before giving up.
    pub node_budget: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_dim: 14,
            node_budget: 200_000_000,
        }
    }
}

/// Depth-first enumeration of `{x ∈ Z^n : A x = rhs, lo <= x <= hi}` with
/// interval pruning: at depth k, every row's residual must be reachable by
/// the remaining coordinates. Output is lexicographically sorted.
pub fn enumerate_box_solutions(
    a: &[Vec<i64>],
    rhs: &[i64],
    bx: &SearchBox,
    limits: &EnumerationLimits,
) -> Result<Vec<Vec<i64>>, GraverError> {
    let n = bx.dim();
    if n > limits.max_dim {
        return Err(GraverError::TooLarge(format!(
            "dimension {n} exceeds enumeration cap {}",
            limits.max_dim
        )));
    }
    if rhs.len() != a.len() {
        return Err(GraverError::LengthMismatch {
            expected: a.len(),
            got: rhs.len(),
        });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(GraverError::LengthMismatch {
            expected: n,
            got: row.len(),
        });
    }
    if n == 0 || bx.lo.iter().zip(&bx.hi).any(|(lo, hi)| lo > hi) {
        return Ok(Vec::new());
    }

    let search = BoxSearch::new(a, rhs, bx);
    let nodes = AtomicU64::new(0);
    let first: Vec<i64> = (bx.lo[0]..=bx.hi[0]).collect();
    let chunks: Result<Vec<Vec<Vec<i64>>>, GraverError> = first
        .par_iter()
        .map(|&v| {
            let mut out = Vec::new();
            let mut x = vec![0i64; n];
            let mut resid: Vec<i128> = search.rhs.clone();
            x[0] = v;
            for (r, row) in search.a.iter().enumerate() {
                resid[r] -= row[0] as i128 * v as i128;
            }
            search.descend(1, &mut x, &mut resid, &mut out, &nodes, limits.node_budget)?;
            Ok(out)
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

struct BoxSearch<'a> {
    a: Vec<Vec<i64>>,
    rhs: Vec<i128>,
    bx: &'a SearchBox,
    /// `reach_lo[r][k]`, `reach_hi[r][k]`: range of `sum_{j>=k} a_rj x_j`.
    reach_lo: Vec<Vec<i128>>,
    reach_hi: Vec<Vec<i128>>,
}

impl<'a> BoxSearch<'a> {
    fn new(a: &[Vec<i64>], rhs: &[i64], bx: &'a SearchBox) -> Self {
        let n = bx.dim();
        let mut reach_lo = Vec::with_capacity(a.len());
        let mut reach_hi = Vec::with_capacity(a.len());
        for row in a {
            let mut lo = vec![0i128; n + 1];
            let mut hi = vec![0i128; n + 1];
            for k in (0..n).rev() {
                let p = row[k] as i128 * bx.lo[k] as i128;
                let q = row[k] as i128 * bx.hi[k] as i128;
                lo[k] = lo[k + 1] + p.min(q);
                hi[k] = hi[k + 1] + p.max(q);
            }
            reach_lo.push(lo);
            reach_hi.push(hi);
        }
        Self {
            a: a.to_vec(),
            rhs: rhs.iter().map(|&v| v as i128).collect(),
            bx,
            reach_lo,
            reach_hi,
        }
    }

    fn feasible_from(&self, k: usize, resid: &[i128]) -> bool {
        resid
            .iter()
            .enumerate()
            .all(|(r, &s)| self.reach_lo[r][k] <= s && s <= self.reach_hi[r][k])
    }

    fn descend(
        &self,
        k: usize,
        x: &mut [i64],
        resid: &mut [i128],
        out: &mut Vec<Vec<i64>>,
        nodes: &AtomicU64,
        budget: u64,
    ) -> Result<(), GraverError> {
        if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
            return Err(GraverError::TooLarge(format!(
                "search exceeded node budget {budget}"
            )));
        }
        if !self.feasible_from(k, resid) {
            return Ok(());
        }
        if k == x.len() {
            out.push(x.to_vec());
            return Ok(());
        }
        for v in self.bx.lo[k]..=self.bx.hi[k] {
            x[k] = v;
            for (r, row) in self.a.iter().enumerate() {
                resid[r] -= row[k] as i128 * v as i128;
            }
            let res = self.descend(k + 1, x, resid, out, nodes, budget);
            for (r, row) in self.a.iter().enumerate() {
                resid[r] += row[k] as i128 * v as i128;
            }
            res?;
        }
        Ok(())
    }
}

fn matrix_i64(a: &IntegerMatrix) -> Result<Vec<Vec<i64>>, GraverError> {
    a.to_i64_rows().ok_or(GraverError::Overflow)
}

/// All nonzero `g` with `A g = 0` inside `bx`.
pub fn enumerate_kernel_in_box(
    a: &IntegerMatrix,
    bx: &SearchBox,
    limits: &EnumerationLimits,
) -> Result<BTreeSet<Vec<i64>>, GraverError> {
    if bx.dim() != a.cols() {
        return Err(GraverError::LengthMismatch {
            expected: a.cols(),
            got: bx.dim(),
        });
    }
    let rows = matrix_i64(a)?;
    let zeros = vec![0i64; rows.len()];
    Ok(enumerate_box_solutions(&rows, &zeros, bx, limits)?
        .into_iter()
        .filter(|g| g.iter().any(|&v| v != 0))
        .collect())
}

/// Sign pattern of the first 64 coordinates, used as a cheap necessary
/// condition for conformity.
#[derive(Clone, Copy)]
struct SignMask {
    pos: u64,
    neg: u64,
}

impl SignMask {
    fn of(g: &[i64]) -> Self {
        let mut m = SignMask { pos: 0, neg: 0 };
        for (i, &v) in g.iter().take(64).enumerate() {
            if v > 0 {
                m.pos |= 1 << i;
            } else if v < 0 {
                m.neg |= 1 << i;
            }
        }
        m
    }

    fn may_conform_to(self, other: SignMask) -> bool {
        self.pos & !other.pos == 0 && self.neg & !other.neg == 0
    }
}

/// The ⊑-minimal members of a set of nonzero vectors.
///
/// Candidates are visited by increasing ℓ1 norm, so anything that lies
/// conformally below a candidate has already been classified; a candidate
/// is minimal iff no minimal element found so far conforms to it.
pub fn minimal_elements<'a, I>(points: I) -> BTreeSet<Vec<i64>>
where
    I: IntoIterator<Item = &'a Vec<i64>>,
{
    let mut sorted: Vec<(u64, &Vec<i64>)> = points
        .into_iter()
        .filter(|g| g.iter().any(|&v| v != 0))
        .map(|g| (g.iter().map(|v| v.unsigned_abs()).sum(), g))
        .collect();
    sorted.sort();
    let mut minimal: Vec<(SignMask, &Vec<i64>)> = Vec::new();
    for (_, y) in sorted {
        let ym = SignMask::of(y);
        let dominated = minimal
            .iter()
            .any(|(gm, g)| gm.may_conform_to(ym) && conforms_unchecked(g, y));
        if !dominated {
            minimal.push((ym, y));
        }
    }
    minimal.into_iter().map(|(_, g)| g.clone()).collect()
}

/// Exact `G(A) ∩ box` by enumeration: the ⊑-minimal nonzero kernel points
/// inside `bx`. When `bx` contains `[l−u, u−l]` this holds every Graver
/// element usable under bounds `l, u`.
pub fn graver_oracle(
    a: &IntegerMatrix,
    bx: &SearchBox,
    limits: &EnumerationLimits,
) -> Result<BTreeSet<Vec<i64>>, GraverError> {
    let kernel = enumerate_kernel_in_box(a, bx, limits)?;
    Ok(minimal_elements(&kernel))
}

/// `z ↦ B z`.
pub fn to_ambient(b: &IntegerMatrix, z: &[i64]) -> Result<Vec<BigInt>, GraverError> {
    if z.len() != b.cols() {
        return Err(GraverError::LengthMismatch {
            expected: b.cols(),
            got: z.len(),
        });
    }
    Ok(b.mul_vec_i64(z)?)
}

/// `B z` in `i64`, failing on overflow.
pub fn to_ambient_i64(b: &IntegerMatrix, z: &[i64]) -> Result<Vec<i64>, GraverError> {
    to_ambient(b, z)?
        .iter()
        .map(|v| v.to_i64().ok_or(GraverError::Overflow))
        .collect()
}

/// Least-squares coordinates `(BᵀB)⁻¹ Bᵀ g`, computed exactly. For `g` in
/// the lattice spanned by `B` this is its integer coordinate vector.
pub fn to_coords(b: &IntegerMatrix, g: &[BigInt]) -> Result<Vec<BigRational>, GraverError> {
    let n = b.rows();
    let d = b.cols();
    if g.len() != n {
        return Err(GraverError::LengthMismatch {
            expected: n,
            got: g.len(),
        });
    }
    let cols = b.columns();
    let q = |v: BigInt| BigRational::from_integer(v);
    // augmented normal equations [BᵀB | Bᵀg]
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..d)
                .map(|j| q(cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum()))
                .collect();
            row.push(q(cols[i].iter().zip(g).map(|(x, y)| x * y).sum()));
            row
        })
        .collect();
    for c in 0..d {
        let p = (c..d)
            .find(|&r| !m[r][c].is_zero())
            .ok_or(LatticeError::DependentColumns { index: c })?;
        m.swap(p, c);
        let pivot = m[c][c].clone();
        for v in m[c].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= &f * p;
            }
        }
    }
    Ok(m.into_iter().map(|row| row[d].clone()).collect())
}

/// Integer coordinates of `g` w.r.t. `B`, or `None` when `g ∉ L(B)`.
pub fn lattice_coords(b: &IntegerMatrix, g: &[BigInt]) -> Result<Option<Vec<BigInt>>, GraverError> {
    let z = to_coords(b, g)?;
    if !z.iter().all(|v| v.is_integer()) {
        return Ok(None);
    }
    let z: Vec<BigInt> = z.into_iter().map(|v| v.to_integer()).collect();
    Ok((b.mul_vec(&z)? == g).then_some(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::kernel_lattice_basis;
    use proptest::prelude::*;

    fn mat(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows).unwrap()
    }

    fn cube(n: usize, lo: i64, hi: i64) -> SearchBox {
        SearchBox::new(vec![lo; n], vec![hi; n]).unwrap()
    }

    fn set(v: &[&[i64]]) -> BTreeSet<Vec<i64>> {
        v.iter().map(|x| x.to_vec()).collect()
    }

    /// Plain product scan, no pruning.
    fn brute_kernel(a: &[Vec<i64>], bx: &SearchBox) -> BTreeSet<Vec<i64>> {
        let n = bx.dim();
        let mut out = BTreeSet::new();
        let mut x = bx.lo.clone();
        loop {
            if x.iter().any(|&v| v != 0)
                && a.iter().all(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum::<i64>() == 0)
            {
                out.insert(x.clone());
            }
            let mut k = 0;
            loop {
                if k == n {
                    return out;
                }
                if x[k] < bx.hi[k] {
                    x[k] += 1;
                    break;
                }
                x[k] = bx.lo[k];
                k += 1;
            }
        }
    }

    #[test]
    fn conformity_examples() {
        assert!(conforms(&[1, -1], &[2, -2]).unwrap());
        assert!(!conforms(&[1, 1], &[2, -2]).unwrap());
        assert!(conforms(&[0, 0], &[5, -3]).unwrap());
        assert!(!conforms(&[1, 0], &[0, 1]).unwrap());
        assert!(matches!(
            conforms(&[1], &[1, 2]),
            Err(GraverError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn kernel_enumeration_examples() {
        let lim = EnumerationLimits::default();
        let a = mat(&[vec![1, 1]]);
        assert_eq!(
            enumerate_kernel_in_box(&a, &cube(2, -2, 2), &lim).unwrap(),
            set(&[&[1, -1], &[-1, 1], &[2, -2], &[-2, 2]])
        );
        assert!(enumerate_kernel_in_box(&a, &cube(2, 0, 2), &lim)
            .unwrap()
            .is_empty());
        let a = mat(&[vec![1, 2]]);
        assert_eq!(
            enumerate_kernel_in_box(&a, &cube(2, -2, 2), &lim).unwrap(),
            set(&[&[2, -1], &[-2, 1]])
        );
    }

    #[test]
    fn oracle_examples() {
        let lim = EnumerationLimits::default();
        assert_eq!(
            graver_oracle(&mat(&[vec![1, 1]]), &cube(2, -3, 3), &lim).unwrap(),
            set(&[&[1, -1], &[-1, 1]])
        );
        assert_eq!(
            graver_oracle(&mat(&[vec![1, 1, 1]]), &cube(3, -2, 2), &lim).unwrap(),
            set(&[
                &[1, -1, 0],
                &[-1, 1, 0],
                &[1, 0, -1],
                &[-1, 0, 1],
                &[0, 1, -1],
                &[0, -1, 1]
            ])
        );
        assert_eq!(
            graver_oracle(&mat(&[vec![1, 2]]), &cube(2, -4, 4), &lim).unwrap(),
            set(&[&[2, -1], &[-2, 1]])
        );
    }

    #[test]
    fn enumeration_budget_guard() {
        let a = mat(&[vec![1; 30]]);
        assert!(matches!(
            enumerate_kernel_in_box(&a, &cube(30, -1, 1), &EnumerationLimits::default()),
            Err(GraverError::TooLarge(_))
        ));
        let tight = EnumerationLimits {
            max_dim: 14,
            node_budget: 10,
        };
        assert!(matches!(
            enumerate_kernel_in_box(&mat(&[vec![1, 1, 1]]), &cube(3, -3, 3), &tight),
            Err(GraverError::TooLarge(_))
        ));
    }

    #[test]
    fn pruned_search_matches_product_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(1..n);
            let rows: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
                .collect();
            let bx = SearchBox::new(
                (0..n).map(|_| rng.gen_range(-3..=0)).collect(),
                (0..n).map(|_| rng.gen_range(0..=3)).collect(),
            )
            .unwrap();
            let a = mat(&rows);
            let fast = enumerate_kernel_in_box(&a, &bx, &EnumerationLimits::default()).unwrap();
            assert_eq!(fast, brute_kernel(&rows, &bx));
        }
    }

    #[test]
    fn coordinate_maps() {
        let b = mat(&[vec![1], vec![-1]]);
        let g = to_ambient(&b, &[3]).unwrap();
        assert_eq!(g, vec![BigInt::from(3), BigInt::from(-3)]);
        assert_eq!(to_ambient(&b, &[0]).unwrap(), vec![BigInt::zero(); 2]);
        assert_eq!(
            to_coords(&b, &g).unwrap(),
            vec![BigRational::from_integer(3.into())]
        );
        // orthogonal to range(B)
        let orth = vec![BigInt::from(1), BigInt::from(1)];
        assert!(to_coords(&b, &orth).unwrap()[0].is_zero());
        assert_eq!(lattice_coords(&b, &orth).unwrap(), None);
        assert!(matches!(
            to_ambient(&b, &[1, 2]),
            Err(GraverError::LengthMismatch { .. })
        ));

        let kb = kernel_lattice_basis(&mat(&[vec![1, 2]])).unwrap();
        let g = to_ambient_i64(&kb, &[1]).unwrap();
        assert_eq!(g[0] + 2 * g[1], 0);
    }

    fn small_vec(n: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-3i64..=3, n)
    }

    proptest! {
        #[test]
        fn conformity_is_reflexive_and_transitive(
            x in small_vec(5), y in small_vec(5), z in small_vec(5)
        ) {
            prop_assert!(conforms_unchecked(&x, &x));
            if conforms_unchecked(&x, &y) && conforms_unchecked(&y, &z) {
                prop_assert!(conforms_unchecked(&x, &z));
            }
            if conforms_unchecked(&x, &y) && conforms_unchecked(&y, &x) {
                prop_assert_eq!(&x, &y);
            }
        }

        #[test]
        fn to_ambient_is_additive(z1 in small_vec(2), z2 in small_vec(2)) {
            let b = kernel_lattice_basis(&mat(&[vec![2, -1, 3, 1]])).unwrap();
            let b = b.select_columns(0..2).unwrap();
            let sum: Vec<i64> = z1.iter().zip(&z2).map(|(p, q)| p + q).collect();
            let lhs = to_ambient(&b, &sum).unwrap();
            let rhs: Vec<BigInt> = to_ambient(&b, &z1).unwrap().into_iter()
                .zip(to_ambient(&b, &z2).unwrap()).map(|(p, q)| p + q).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn coords_round_trip(z in small_vec(3)) {
            let b = kernel_lattice_basis(&mat(&[vec![1, 2, -1, 3, 1]])).unwrap();
            let b = b.select_columns(0..3).unwrap();
            let g = to_ambient(&b, &z).unwrap();
            let back = lattice_coords(&b, &g).unwrap().unwrap();
            prop_assert_eq!(back, z.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        }
    }
}
