//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use maple::lattice::IntegerMatrix;
use maple::model::{Objective, Polynomial, Problem, QuadraticObjective, SeparableObjective};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, span: i64) -> Vec<Vec<i64>> {
    (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-span..=span)).collect())
        .collect()
}

/// Random `m × n` matrix with rank `m`.
pub fn full_row_rank(rng: &mut ChaCha8Rng, m: usize, n: usize, span: i64) -> Vec<Vec<i64>> {
    loop {
        let rows = random_rows(rng, m, n, span);
        if IntegerMatrix::from_rows(&rows).unwrap().rank() == m {
            return rows;
        }
    }
}

pub fn mat(rows: &[Vec<i64>]) -> IntegerMatrix {
    IntegerMatrix::from_rows(rows).unwrap()
}

pub fn mul(rows: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Feasible right-hand side: `b = A x̂` for a random `x̂` in the bounds.
pub fn planted_rhs(rng: &mut ChaCha8Rng, rows: &[Vec<i64>], l: &[i64], u: &[i64]) -> Vec<i64> {
    let x: Vec<i64> = l.iter().zip(u).map(|(&a, &b)| rng.gen_range(a..=b)).collect();
    mul(rows, &x)
}

/// Σ a_j (x_j − t_j)² + s_j x_j with a_j > 0: separable and convex.
pub fn separable_convex(rng: &mut ChaCha8Rng, n: usize, hi: i64) -> Objective {
    let terms = (0..n)
        .map(|_| {
            let a = rng.gen_range(1..=4) as f64 * 0.5;
            let t = rng.gen_range(0.0..=hi as f64);
            let s = rng.gen_range(-1.0..=1.0);
            Polynomial(vec![a * t * t, -2.0 * a * t + s, a])
        })
        .collect();
    Objective::Separable(SeparableObjective { terms })
}

/// Dense symmetric `Q`; indefinite when `convex` is false.
#[allow(clippy::needless_range_loop)]
pub fn quadratic(rng: &mut ChaCha8Rng, n: usize, convex: bool) -> Objective {
    let mut q = vec![vec![0.0; n]; n];
    if convex {
        let r: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-2i32..=2) as f64).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                q[i][j] = (0..n).map(|k| r[k][i] * r[k][j]).sum::<f64>();
            }
            q[i][i] += 1.0;
        }
    } else {
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-4i32..=4) as f64;
                q[i][j] = v;
                q[j][i] = v;
            }
        }
    }
    let c = (0..n).map(|_| rng.gen_range(-10i32..=10) as f64).collect();
    Objective::Quadratic(QuadraticObjective::new(q, c, 0.0).unwrap())
}

pub fn problem(
    name: &str,
    rows: Vec<Vec<i64>>,
    b: Vec<i64>,
    l: Vec<i64>,
    u: Vec<i64>,
    objective: Objective,
) -> Problem {
    Problem::new(name, rows, b, l, u, objective).unwrap()
}
