use std::cmp::Ordering;

use rayon::prelude::*;

use super::{AugmentError, Solution};
use crate::extraction::DirectionPool;
use crate::model::{Objective, Problem};

/// Improvements smaller than this fraction of `max(1, |f(x)|)` are ignored.
const IMPROVEMENT_TOLERANCE: f64 = 1e-9;

/// An improving step `x + λ g` with its objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub lambda: i64,
    pub value: f64,
}

/// Largest `λ ≥ 0` keeping `x + λ g` inside `[l, u]`.
pub fn max_step_length(x: &[i64], g: &[i64], l: &[i64], u: &[i64]) -> Result<i64, AugmentError> {
    if g.len() != x.len() || l.len() != x.len() || u.len() != x.len() {
        return Err(AugmentError::LengthMismatch {
            expected: x.len(),
            got: g.len(),
        });
    }
    if g.iter().all(|&v| v == 0) {
        return Err(AugmentError::ZeroDirection);
    }
    let mut best = i64::MAX;
    for i in 0..x.len() {
        let room = match g[i].cmp(&0) {
            Ordering::Greater => (u[i] - x[i]).div_euclid(g[i]),
            Ordering::Less => (x[i] - l[i]).div_euclid(-g[i]),
            Ordering::Equal => continue,
        };
        best = best.min(room);
    }
    Ok(best.max(0))
}

/// A pool member with the data reused across augmentation iterations.
pub(crate) struct PreparedDirection<'a> {
    g: &'a [i64],
    support: Vec<(usize, i64)>,
    curvature: f64,
}

impl<'a> PreparedDirection<'a> {
    pub(crate) fn new(g: &'a [i64], objective: &Objective) -> Self {
        let support: Vec<(usize, i64)> = g
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i, v))
            .collect();
        let curvature = match objective {
            Objective::Quadratic(q) => q.curvature(&support),
            Objective::Separable(_) => 0.0,
        };
        Self {
            g,
            support,
            curvature,
        }
    }

    fn max_step(&self, x: &[i64], l: &[i64], u: &[i64]) -> i64 {
        self.support
            .iter()
            .map(|&(i, gi)| {
                if gi > 0 {
                    (u[i] - x[i]).div_euclid(gi)
                } else {
                    (x[i] - l[i]).div_euclid(-gi)
                }
            })
            .min()
            .unwrap_or(0)
            .max(0)
    }
}

/// Objective state at the current point shared by all directions.
pub(crate) struct Point<'a> {
    x: &'a [i64],
    value: f64,
    /// `Q x + c` for quadratic objectives.
    gradient: Vec<f64>,
}

impl<'a> Point<'a> {
    pub(crate) fn new(problem: &Problem, x: &'a [i64]) -> Self {
        let gradient = match problem.objective() {
            Objective::Quadratic(q) => q.gradient(x),
            Objective::Separable(_) => Vec::new(),
        };
        Self {
            x,
            value: problem.eval(x),
            gradient,
        }
    }
}

/// Best improving step along one direction; ties go to the smaller `λ`.
pub(crate) fn step_along(
    problem: &Problem,
    at: &Point<'_>,
    dir: &PreparedDirection<'_>,
    step_cap: i64,
) -> Option<Step> {
    let lmax = dir.max_step(at.x, problem.lower(), problem.upper());
    if lmax == 0 {
        return None;
    }
    let (lambda, delta) = match problem.objective() {
        Objective::Quadratic(_) => {
            let alpha: f64 = dir
                .support
                .iter()
                .map(|&(i, gi)| gi as f64 * at.gradient[i])
                .sum();
            let beta = dir.curvature;
            let phi = |lam: i64| {
                let t = lam as f64;
                alpha * t + 0.5 * beta * t * t
            };
            let mut candidates = vec![1, lmax];
            if beta > 0.0 {
                let star = -alpha / beta;
                if star.is_finite() {
                    let clamp = |t: f64| t.clamp(1.0, lmax as f64) as i64;
                    candidates.push(clamp(star.floor()));
                    candidates.push(clamp(star.ceil()));
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            candidates
                .into_iter()
                .map(|lam| (lam, phi(lam)))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))?
        }
        Objective::Separable(s) => {
            let base: Vec<f64> = dir
                .support
                .iter()
                .map(|&(i, _)| s.terms[i].eval(at.x[i] as f64))
                .collect();
            let mut best: Option<(i64, f64)> = None;
            for lam in 1..=lmax.min(step_cap.max(1)) {
                let delta: f64 = dir
                    .support
                    .iter()
                    .zip(&base)
                    .map(|(&(i, gi), f0)| s.terms[i].eval((at.x[i] + lam * gi) as f64) - f0)
                    .sum();
                if best.is_none_or(|(_, d)| delta < d) {
                    best = Some((lam, delta));
                }
            }
            best?
        }
    };
    let tolerance = IMPROVEMENT_TOLERANCE * at.value.abs().max(1.0);
    (delta < -tolerance).then_some(Step {
        lambda,
        value: at.value + delta,
    })
}

/// Best improving integer step along `g` from the feasible point `x`, or
/// `None` when no `λ ≥ 1` improves.
pub fn best_step(
    problem: &Problem,
    x: &[i64],
    g: &[i64],
    step_cap: i64,
) -> Result<Option<Step>, AugmentError> {
    max_step_length(x, g, problem.lower(), problem.upper())?;
    if !problem.is_feasible(x) {
        return Err(AugmentError::InfeasibleStart);
    }
    let at = Point::new(problem, x);
    let dir = PreparedDirection::new(g, problem.objective());
    Ok(step_along(problem, &at, &dir, step_cap).map(|s| Step {
        value: problem.eval(&add_scaled(x, g, s.lambda)),
        ..s
    }))
}

fn add_scaled(x: &[i64], g: &[i64], lambda: i64) -> Vec<i64> {
    x.iter().zip(g).map(|(&a, &b)| a + lambda * b).collect()
}

/// Result of one augmentation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmentation {
    pub solution: Solution,
    /// Objective values of every iterate, starting point included.
    pub trace: Vec<f64>,
}

impl Augmentation {
    pub fn steps(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Total order on candidate moves: value, then direction, then step length.
fn better<'a>(a: (&'a [i64], Step), b: (&'a [i64], Step)) -> (&'a [i64], Step) {
    let ord = a
        .1
        .value
        .total_cmp(&b.1.value)
        .then_with(|| a.0.cmp(b.0))
        .then(a.1.lambda.cmp(&b.1.lambda));
    if ord == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Repeatedly apply the best improving `(g, λ)` over the whole pool until no
/// member improves.
pub fn graver_best_augment(
    problem: &Problem,
    x0: &[i64],
    pool: &DirectionPool,
    step_cap: i64,
) -> Result<Augmentation, AugmentError> {
    if !problem.is_feasible(x0) {
        return Err(AugmentError::InfeasibleStart);
    }
    let dirs: Vec<PreparedDirection<'_>> = pool
        .iter()
        .filter(|g| g.len() == problem.n())
        .map(|g| PreparedDirection::new(g, problem.objective()))
        .collect();
    let mut x = x0.to_vec();
    let mut trace = vec![problem.eval(&x)];
    loop {
        let at = Point::new(problem, &x);
        let chosen = dirs
            .par_iter()
            .filter_map(|d| step_along(problem, &at, d, step_cap).map(|s| (d.g, s)))
            .reduce_with(better);
        let Some((g, step)) = chosen else { break };
        let next = add_scaled(&x, g, step.lambda);
        assert!(problem.is_feasible(&next), "augmentation left the feasible set");
        let value = problem.eval(&next);
        if value >= *trace.last().expect("trace is never empty") {
            break;
        }
        x = next;
        trace.push(value);
    }
    let objective = *trace.last().expect("trace is never empty");
    Ok(Augmentation {
        solution: Solution { x, objective },
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graver::SearchBox;
    use crate::model::{Polynomial, QuadraticObjective, SeparableObjective};

    fn worked(objective: Objective) -> Problem {
        Problem::new("w", vec![vec![1, 1]], vec![4], vec![0, 0], vec![3, 3], objective).unwrap()
    }

    fn squares() -> Objective {
        Objective::Quadratic(
            QuadraticObjective::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0], 0.0)
                .unwrap(),
        )
    }

    fn centered() -> Objective {
        Objective::Quadratic(
            QuadraticObjective::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![-4.0, -4.0], 8.0)
                .unwrap(),
        )
    }

    fn line_pool() -> DirectionPool {
        let mut pool = DirectionPool::new(2, 1, SearchBox::difference_box(&[0, 0], &[3, 3]));
        pool.insert_pair(&[1, -1]);
        pool
    }

    #[test]
    fn max_step_examples() {
        assert_eq!(max_step_length(&[3, 1], &[-1, 1], &[0, 0], &[3, 3]).unwrap(), 2);
        assert_eq!(max_step_length(&[1], &[1], &[0], &[5]).unwrap(), 4);
        assert_eq!(max_step_length(&[3], &[1], &[0], &[3]).unwrap(), 0);
        assert_eq!(max_step_length(&[2], &[-3], &[0], &[5]).unwrap(), 0);
        assert_eq!(
            max_step_length(&[1, 1], &[0, 0], &[0, 0], &[3, 3]),
            Err(AugmentError::ZeroDirection)
        );
    }

    #[test]
    fn quadratic_best_step() {
        let p = worked(squares());
        let s = best_step(&p, &[3, 1], &[-1, 1], 1_000_000).unwrap().unwrap();
        assert_eq!(s, Step { lambda: 1, value: 8.0 });
        assert_eq!(best_step(&p, &[2, 2], &[-1, 1], 1_000_000).unwrap(), None);
        assert_eq!(best_step(&p, &[2, 2], &[1, -1], 1_000_000).unwrap(), None);
        assert_eq!(best_step(&p, &[0, 4], &[-1, 1], 1_000_000).unwrap_err(), AugmentError::InfeasibleStart);
    }

    #[test]
    fn wall_gives_no_step() {
        let p = Problem::new("w", vec![vec![1, 1]], vec![3], vec![0, 0], vec![3, 3], squares()).unwrap();
        assert_eq!(best_step(&p, &[0, 3], &[-1, 1], 10).unwrap(), None);
    }

    #[test]
    fn concave_direction_uses_the_far_end() {
        let obj = Objective::Quadratic(
            QuadraticObjective::new(vec![vec![-2.0, 0.0], vec![0.0, -2.0]], vec![0.0, 0.0], 0.0)
                .unwrap(),
        );
        let p = Problem::new("c", vec![vec![1, 1]], vec![6], vec![0, 0], vec![6, 6], obj).unwrap();
        let s = best_step(&p, &[3, 3], &[1, -1], 100).unwrap().unwrap();
        assert_eq!(s.lambda, 3);
        assert_eq!(s.value, -36.0);
    }

    #[test]
    fn separable_best_step_matches_quadratic() {
        let sep = Objective::Separable(SeparableObjective {
            terms: vec![Polynomial(vec![4.0, -4.0, 1.0]), Polynomial(vec![4.0, -4.0, 1.0])],
        });
        let p = worked(sep);
        let s = best_step(&p, &[3, 1], &[-1, 1], 100).unwrap().unwrap();
        assert_eq!(s, Step { lambda: 1, value: 0.0 });
    }

    #[test]
    fn worked_augmentation() {
        let p = worked(centered());
        let out = graver_best_augment(&p, &[3, 1], &line_pool(), 1_000_000).unwrap();
        assert_eq!(out.solution, Solution { x: vec![2, 2], objective: 0.0 });
        assert_eq!(out.trace, vec![2.0, 0.0]);
        assert_eq!(out.steps(), 1);

        let again = graver_best_augment(&p, &[2, 2], &line_pool(), 1_000_000).unwrap();
        assert_eq!(again.steps(), 0);

        let empty = DirectionPool::new(2, 1, SearchBox::difference_box(&[0, 0], &[3, 3]));
        let stuck = graver_best_augment(&p, &[3, 1], &empty, 1_000_000).unwrap();
        assert_eq!(stuck.solution.x, vec![3, 1]);

        assert_eq!(
            graver_best_augment(&p, &[3, 3], &line_pool(), 10).unwrap_err(),
            AugmentError::InfeasibleStart
        );
    }

    #[test]
    fn equal_moves_resolve_deterministically() {
        let obj = Objective::Quadratic(
            QuadraticObjective::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![-4.0, -4.0], 8.0)
                .unwrap(),
        );
        let p = Problem::new("t", vec![vec![1, 1]], vec![4], vec![0, 0], vec![4, 4], obj).unwrap();
        let mut pool = DirectionPool::new(2, 1, p.difference_box());
        pool.insert_pair(&[1, -1]);
        pool.insert_pair(&[2, -2]);
        // (−2, 2)·1 and (−1, 1)·2 both reach the optimum in a single move.
        let out = graver_best_augment(&p, &[4, 0], &pool, 100).unwrap();
        assert_eq!(out.solution.x, vec![2, 2]);
        assert_eq!(out.steps(), 1);
    }
}
