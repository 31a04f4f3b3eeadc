//! Feasible starting points, integer line search along pool directions, the
//! Graver-best augmentation loop and the multi-start driver.

mod feasibility;
mod step;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use feasibility::{feasibility_loss_and_grad, find_feasible_set};
pub use step::{best_step, graver_best_augment, max_step_length, Augmentation, Step};

use crate::extraction::{extract_directions, DirectionPool, ExtractionConfig, ExtractionError};
use crate::graver::{enumerate_box_solutions, EnumerationLimits, GraverError, SearchBox};
use crate::lattice::LatticeError;
use crate::model::Problem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AugmentError {
    #[error("direction is zero")]
    ZeroDirection,
    #[error("starting point is not feasible")]
    InfeasibleStart,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub num_feasible_starts: usize,
    pub lambda3: f64,
    pub feasibility_epochs: usize,
    pub feasibility_step_size: f64,
    pub step_cap: i64,
    pub seed: u64,
    pub extraction: ExtractionConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            num_feasible_starts: 100,
            lambda3: 0.1,
            feasibility_epochs: 500,
            feasibility_step_size: 0.05,
            step_cap: 1_000_000,
            seed: 0,
            extraction: ExtractionConfig::default(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), AugmentError> {
        let bad = |msg: &str| Err(AugmentError::InvalidConfig(msg.into()));
        if self.num_feasible_starts == 0 {
            return bad("num_feasible_starts must be at least 1");
        }
        if self.lambda3.is_nan() || self.lambda3 < 0.0 {
            return bad("lambda3 must be non-negative");
        }
        if !(self.feasibility_step_size > 0.0 && self.feasibility_step_size.is_finite()) {
            return bad("feasibility_step_size must be positive");
        }
        if self.step_cap < 1 {
            return bad("step_cap must be at least 1");
        }
        self.extraction.validate()?;
        Ok(())
    }
}

/// A feasible point with its objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<i64>,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Ok,
    NoFeasibleFound,
}

/// Wall-clock phases in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub extraction_ms: f64,
    pub feasibility_ms: f64,
    pub augmentation_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub best: Option<Solution>,
    /// Final point of the augmentation started from each feasible start.
    pub all_finals: Vec<Solution>,
    pub trajectory_lengths: Vec<usize>,
    /// Objective values along each augmentation, aligned with `all_finals`.
    pub traces: Vec<Vec<f64>>,
    pub pool_size: usize,
    pub timings: Timings,
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Lowest objective, ties to the lexicographically smallest point.
pub(crate) fn pick_best<'a, I>(solutions: I) -> Option<&'a Solution>
where
    I: IntoIterator<Item = &'a Solution>,
{
    solutions.into_iter().min_by(|a, b| {
        a.objective
            .total_cmp(&b.objective)
            .then_with(|| a.x.cmp(&b.x))
    })
}

/// Extract a pool, then [`maple_solve_with_pool`].
pub fn maple_solve(problem: &Problem, cfg: &SolveConfig) -> Result<SolveReport, AugmentError> {
    maple_solve_with_pool(problem, None, cfg)
}

/// Multi-start augmentation over one shared pool. A supplied pool is
/// checked against the problem and used as is; otherwise one is extracted.
pub fn maple_solve_with_pool(
    problem: &Problem,
    pool: Option<&DirectionPool>,
    cfg: &SolveConfig,
) -> Result<SolveReport, AugmentError> {
    cfg.validate()?;
    let mut timings = Timings::default();
    let started = Instant::now();
    let extracted;
    let pool = match pool {
        Some(p) => {
            p.check_compatible(problem)?;
            p
        }
        None => {
            extracted = match extract_directions(
                problem.matrix(),
                problem.lower(),
                problem.upper(),
                &cfg.extraction,
            ) {
                Ok(p) => p,
                Err(ExtractionError::Lattice(LatticeError::FullRankKernel { .. })) => {
                    DirectionPool::for_problem(problem)
                }
                Err(e) => return Err(e.into()),
            };
            timings.extraction_ms = millis(started);
            &extracted
        }
    };

    let started = Instant::now();
    let starts = find_feasible_set(problem, cfg);
    timings.feasibility_ms = millis(started);

    let started = Instant::now();
    let runs: Vec<Augmentation> = starts
        .par_iter()
        .map(|x| graver_best_augment(problem, x, pool, cfg.step_cap))
        .collect::<Result<_, _>>()?;
    timings.augmentation_ms = millis(started);

    let all_finals: Vec<Solution> = runs.iter().map(|r| r.solution.clone()).collect();
    let best = pick_best(&all_finals).cloned();
    Ok(SolveReport {
        status: if best.is_some() {
            SolveStatus::Ok
        } else {
            SolveStatus::NoFeasibleFound
        },
        best,
        trajectory_lengths: runs.iter().map(Augmentation::steps).collect(),
        traces: runs.into_iter().map(|r| r.trace).collect(),
        all_finals,
        pool_size: pool.len(),
        timings,
    })
}

/// Exact optimum by enumerating every feasible point; `None` if infeasible.
pub fn brute_force_optimum(
    problem: &Problem,
    limits: &EnumerationLimits,
) -> Result<Option<Solution>, GraverError> {
    let bx = SearchBox::new(problem.lower().to_vec(), problem.upper().to_vec())?;
    let points = enumerate_box_solutions(problem.a_rows(), problem.b(), &bx, limits)?;
    let solutions: Vec<Solution> = points
        .into_iter()
        .map(|x| Solution {
            objective: problem.eval(&x),
            x,
        })
        .collect();
    Ok(pick_best(&solutions).cloned())
}
