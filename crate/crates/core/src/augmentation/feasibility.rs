use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use super::{AugmentError, SolveConfig};
use crate::extraction::{frac_penalty, frac_penalty_grad, round_to_i64, start_rng, Adam};
use crate::model::Problem;

/// Stream offset separating feasibility starts from extraction starts.
const FEASIBILITY_STREAM: usize = 1 << 32;

/// `||Ax − b||² + λ3 Σ (x_i − ⌊x_i⌋)(⌈x_i⌉ − x_i)` and its gradient.
pub fn feasibility_loss_and_grad(
    x: &[f64],
    a: &[Vec<i64>],
    b: &[i64],
    lambda3: f64,
) -> Result<(f64, Vec<f64>), AugmentError> {
    let n = a.first().map_or(x.len(), Vec::len);
    if x.len() != n {
        return Err(AugmentError::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if b.len() != a.len() {
        return Err(AugmentError::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut grad = vec![0.0; n];
    let value = loss_into(x, a, b, lambda3, &mut grad);
    Ok((value, grad))
}

fn loss_into(x: &[f64], a: &[Vec<i64>], b: &[i64], lambda3: f64, grad: &mut [f64]) -> f64 {
    let mut value = 0.0;
    for (gi, &xi) in grad.iter_mut().zip(x) {
        value += lambda3 * frac_penalty(xi);
        *gi = lambda3 * frac_penalty_grad(xi);
    }
    for (row, &bi) in a.iter().zip(b) {
        let r: f64 = row.iter().zip(x).map(|(&p, &q)| p as f64 * q).sum::<f64>() - bi as f64;
        value += r * r;
        if r != 0.0 {
            for (gi, &p) in grad.iter_mut().zip(row) {
                *gi += 2.0 * r * p as f64;
            }
        }
    }
    value
}

fn descend(problem: &Problem, cfg: &SolveConfig, index: usize) -> Option<Vec<i64>> {
    let (l, u) = (problem.lower(), problem.upper());
    let mut rng = start_rng(cfg.seed, FEASIBILITY_STREAM + index);
    let mut x: Vec<f64> = l
        .iter()
        .zip(u)
        .map(|(&lo, &hi)| {
            if lo < hi {
                rng.gen_range(lo as f64..=hi as f64)
            } else {
                lo as f64
            }
        })
        .collect();
    let mut grad = vec![0.0; x.len()];
    let mut opt = Adam::new(x.len(), cfg.feasibility_step_size, cfg.extraction.moment_decays);
    let mut latest = None;
    for _ in 0..cfg.feasibility_epochs {
        loss_into(&x, problem.a_rows(), problem.b(), cfg.lambda3, &mut grad);
        opt.step(&mut x, &grad);
        for ((xi, &lo), &hi) in x.iter_mut().zip(l).zip(u) {
            *xi = xi.clamp(lo as f64, hi as f64);
        }
        if let Some(rounded) = rounded_if_feasible(problem, &x) {
            latest = Some(rounded);
        }
    }
    latest
}

fn rounded_if_feasible(problem: &Problem, x: &[f64]) -> Option<Vec<i64>> {
    let rounded: Vec<i64> = x.iter().map(|&t| round_to_i64(t)).collect::<Option<_>>()?;
    problem.is_feasible(&rounded).then_some(rounded)
}

/// Distinct feasible points obtained by descending the feasibility model from
/// `K` random starts in `[l, u]`. Each start contributes the last iterate
/// whose rounding satisfies the constraints exactly, if any. Sorted
/// lexicographically; possibly empty.
pub fn find_feasible_set(problem: &Problem, cfg: &SolveConfig) -> Vec<Vec<i64>> {
    let found: Vec<Option<Vec<i64>>> = (0..cfg.num_feasible_starts)
        .into_par_iter()
        .map(|i| descend(problem, cfg, i))
        .collect();
    found
        .into_iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
