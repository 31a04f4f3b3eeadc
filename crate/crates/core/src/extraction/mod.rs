//! Heuristic Graver-direction extraction: descend a continuous surrogate of
//! the shortest-vector problem from many random lattice coordinates and
//! harvest every rounded iterate that lands in the difference box.

mod adam;
mod basis;
mod loss;
mod pool;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use adam::Adam;
pub use basis::KernelBasis;
pub use loss::{extraction_loss, extraction_loss_grad, SurrogateLoss, DEFAULT_EPSILON_DIV};
pub use pool::DirectionPool;

pub(crate) use loss::{frac_penalty, frac_penalty_grad};

use crate::graver::SearchBox;
use crate::lattice::{IntegerMatrix, LatticeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractionError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("lower bound exceeds upper bound at index {index}")]
    BadBounds { index: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("malformed pool file: {0}")]
    PoolFormat(String),
    #[error("pool does not match instance: {0}")]
    PoolMismatch(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    pub num_starts: usize,
    pub epochs: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub step_size: f64,
    pub moment_decays: (f64, f64),
    pub epsilon_div: f64,
    pub seed: u64,
    /// Harvesting stops adding once the pool reaches this many members.
    pub max_pool_size: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            num_starts: 1000,
            epochs: 300,
            lambda1: 0.85,
            lambda2: 1.0,
            step_size: 0.01,
            moment_decays: (0.9, 0.999),
            epsilon_div: DEFAULT_EPSILON_DIV,
            seed: 0,
            max_pool_size: 1_000_000,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<(), ExtractionError> {
        let bad = |msg: &str| Err(ExtractionError::InvalidConfig(msg.into()));
        if self.num_starts == 0 {
            return bad("num_starts must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) {
            return bad("lambda1 and lambda2 must be non-negative");
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return bad("step_size must be positive");
        }
        let (b1, b2) = self.moment_decays;
        if !((0.0..1.0).contains(&b1) && (0.0..1.0).contains(&b2)) {
            return bad("moment decays must lie in [0, 1)");
        }
        if self.epsilon_div.is_nan() || self.epsilon_div <= 0.0 {
            return bad("epsilon_div must be positive");
        }
        Ok(())
    }

    pub fn loss(&self) -> SurrogateLoss {
        SurrogateLoss {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            epsilon_div: self.epsilon_div,
        }
    }
}

/// Per-start generator: one independent stream of the seeded generator.
pub(crate) fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn check_bounds(l: &[i64], u: &[i64]) -> Result<(), ExtractionError> {
    if l.len() != u.len() {
        return Err(ExtractionError::LengthMismatch {
            expected: l.len(),
            got: u.len(),
        });
    }
    match l.iter().zip(u).position(|(a, b)| a > b) {
        Some(index) => Err(ExtractionError::BadBounds { index }),
        None => Ok(()),
    }
}

fn sample_start(l: &[i64], u: &[i64], basis: &KernelBasis, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let g: Vec<f64> = l
        .iter()
        .zip(u)
        .map(|(&lo, &hi)| {
            let w = (hi - lo) as f64;
            if w > 0.0 {
                rng.gen_range(-w..=w)
            } else {
                0.0
            }
        })
        .collect();
    basis.coords(&g)
}

/// `N` random lattice coordinates `z = B⁺g`, `g` uniform on `[l−u, u−l]`.
pub fn sample_starts(
    l: &[i64],
    u: &[i64],
    basis: &KernelBasis,
    num_starts: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, ExtractionError> {
    check_bounds(l, u)?;
    if l.len() != basis.ambient_dim() {
        return Err(ExtractionError::LengthMismatch {
            expected: basis.ambient_dim(),
            got: l.len(),
        });
    }
    Ok((0..num_starts)
        .map(|i| sample_start(l, u, basis, &mut start_rng(seed, i)))
        .collect())
}

/// Run `cfg.epochs` Adam steps on the surrogate loss from `z0`, calling
/// `harvest` with every iterate.
pub fn optimize_start<F>(
    z0: &[f64],
    basis: &KernelBasis,
    cfg: &ExtractionConfig,
    mut harvest: F,
) -> Result<Vec<f64>, ExtractionError>
where
    F: FnMut(&[f64]),
{
    if z0.len() != basis.lattice_dim() {
        return Err(ExtractionError::LengthMismatch {
            expected: basis.lattice_dim(),
            got: z0.len(),
        });
    }
    let loss = cfg.loss();
    let mut z = z0.to_vec();
    let mut grad = vec![0.0; z.len()];
    let mut opt = Adam::new(z.len(), cfg.step_size, cfg.moment_decays);
    for _ in 0..cfg.epochs {
        loss.gradient_into(basis, &z, &mut grad);
        opt.step(&mut z, &grad);
        harvest(&z);
    }
    Ok(z)
}

/// Nearest integer, halves away from zero; `None` outside the `i64` range.
pub(crate) fn round_to_i64(t: f64) -> Option<i64> {
    let r = t.round();
    (r.is_finite() && r.abs() < 9.0e18).then_some(r as i64)
}

/// Distinct in-box directions met along one trajectory, in harvest order.
fn harvest_trajectory(
    z0: &[f64],
    basis: &KernelBasis,
    bx: &SearchBox,
    cfg: &ExtractionConfig,
) -> Vec<Vec<i64>> {
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last: Option<Vec<i64>> = None;
    let _ = optimize_start(z0, basis, cfg, |z| {
        let Some(zr) = z.iter().map(|&t| round_to_i64(t)).collect::<Option<Vec<_>>>() else {
            return;
        };
        if last.as_ref() == Some(&zr) {
            return;
        }
        if let Some(g) = basis.apply_int(&zr) {
            if g.iter().any(|&v| v != 0) && bx.contains(&g) && seen.insert(g.clone()) {
                found.push(g);
            }
        }
        last = Some(zr);
    });
    found
}

/// Harvest a direction pool for `A` over the box `[l−u, u−l]` from a
/// precomputed reduced kernel basis.
pub fn extract_with_basis(
    basis: &KernelBasis,
    m: usize,
    l: &[i64],
    u: &[i64],
    cfg: &ExtractionConfig,
) -> Result<DirectionPool, ExtractionError> {
    cfg.validate()?;
    check_bounds(l, u)?;
    if l.len() != basis.ambient_dim() {
        return Err(ExtractionError::LengthMismatch {
            expected: basis.ambient_dim(),
            got: l.len(),
        });
    }
    let bx = SearchBox::difference_box(l, u);
    let per_start: Vec<Vec<Vec<i64>>> = (0..cfg.num_starts)
        .into_par_iter()
        .map(|i| {
            let z0 = sample_start(l, u, basis, &mut start_rng(cfg.seed, i));
            harvest_trajectory(&z0, basis, &bx, cfg)
        })
        .collect();
    let mut pool = DirectionPool::new(l.len(), m, bx);
    'merge: for found in per_start {
        for g in found {
            if pool.len() + 2 > cfg.max_pool_size {
                break 'merge;
            }
            pool.insert_pair(&g);
        }
    }
    Ok(pool)
}

/// Reduced kernel basis of `a`, then [`extract_with_basis`].
pub fn extract_directions(
    a: &IntegerMatrix,
    l: &[i64],
    u: &[i64],
    cfg: &ExtractionConfig,
) -> Result<DirectionPool, ExtractionError> {
    cfg.validate()?;
    let basis = KernelBasis::for_matrix(a)?;
    extract_with_basis(&basis, a.rows(), l, u, cfg)
}
