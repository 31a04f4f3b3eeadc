//! Problem representation and file formats.
//!
//! A [`Problem`] is `min f(x) s.t. A x = b, l <= x <= u, x ∈ Z^n` with an
//! integer constraint system and an objective that is either quadratic
//! (`½ xᵀQx + cᵀx + c0`) or separable (`Σ f_j(x_j)`, each `f_j` a polynomial).

mod json;
mod qplib;
mod report;

pub use json::{parse_instance_json, write_instance_json};
pub use qplib::import_qplib;
pub use report::{parse_report, write_report};

use crate::graver::SearchBox;
use crate::lattice::IntegerMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("bounds error: l[{index}] = {lower} > u[{index}] = {upper}")]
    Bounds { index: usize, lower: i64, upper: i64 },
    #[error("constraint matrix has {rows} rows but rank {rank}")]
    Rank { rows: usize, rank: usize },
    #[error("separable term {index} is not convex around {at}")]
    NonConvex { index: usize, at: i64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
}

/// `½ xᵀQx + cᵀx + c0` with `Q` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective {
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub c0: f64,
}

impl QuadraticObjective {
    /// Symmetrizes `q` as `(Q + Qᵀ)/2`.
    pub fn new(q: Vec<Vec<f64>>, c: Vec<f64>, c0: f64) -> Result<Self, ModelError> {
        let n = c.len();
        if q.len() != n || q.iter().any(|r| r.len() != n) {
            return Err(ModelError::Dimension(format!("Q must be {n}x{n}")));
        }
        let mut sym = q.clone();
        for i in 0..n {
            for j in 0..n {
                sym[i][j] = 0.5 * (q[i][j] + q[j][i]);
            }
        }
        Ok(Self { q: sym, c, c0 })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut quad = 0.0;
        for (i, row) in self.q.iter().enumerate() {
            if x[i] == 0.0 {
                continue;
            }
            let s: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            quad += x[i] * s;
        }
        0.5 * quad + self.c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.c0
    }

    /// `Q x + c`.
    pub fn gradient(&self, x: &[i64]) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.c)
            .map(|(row, ci)| {
                row.iter()
                    .zip(x)
                    .filter(|(_, &xv)| xv != 0)
                    .map(|(a, &b)| a * b as f64)
                    .sum::<f64>()
                    + ci
            })
            .collect()
    }

    /// `gᵀ Q g` for a sparse direction.
    pub fn curvature(&self, support: &[(usize, i64)]) -> f64 {
        let mut s = 0.0;
        for &(i, gi) in support {
            for &(j, gj) in support {
                s += self.q[i][j] * (gi * gj) as f64;
            }
        }
        s
    }

    pub fn is_zero_quadratic(&self) -> bool {
        self.q.iter().flatten().all(|&v| v == 0.0)
    }
}

/// Polynomial in one variable, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

/// `Σ_j f_j(x_j)` with each `f_j` convex on its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableObjective {
    pub terms: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Quadratic(QuadraticObjective),
    Separable(SeparableObjective),
}

impl Objective {
    pub fn dim(&self) -> usize {
        match self {
            Objective::Quadratic(q) => q.dim(),
            Objective::Separable(s) => s.terms.len(),
        }
    }

    pub fn eval_i64(&self, x: &[i64]) -> f64 {
        match self {
            Objective::Quadratic(q) => {
                let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                q.eval(&xf)
            }
            Objective::Separable(s) => s
                .terms
                .iter()
                .zip(x)
                .map(|(p, &v)| p.eval(v as f64))
                .sum(),
        }
    }
}

/// Evaluate `f(x)`.
pub fn eval_objective(obj: &Objective, x: &[f64]) -> Result<f64, ModelError> {
    if x.len() != obj.dim() {
        return Err(ModelError::LengthMismatch {
            expected: obj.dim(),
            got: x.len(),
        });
    }
    Ok(match obj {
        Objective::Quadratic(q) => q.eval(x),
        Objective::Separable(s) => s.terms.iter().zip(x).map(|(p, &v)| p.eval(v)).sum(),
    })
}

/// Validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    name: String,
    a: IntegerMatrix,
    a_rows: Vec<Vec<i64>>,
    b: Vec<i64>,
    lower: Vec<i64>,
    upper: Vec<i64>,
    objective: Objective,
}

/// Upper limit on midpoint-convexity probes per separable term.
const CONVEXITY_PROBES: i64 = 2048;

impl Problem {
    pub fn new(
        name: impl Into<String>,
        a: Vec<Vec<i64>>,
        b: Vec<i64>,
        lower: Vec<i64>,
        upper: Vec<i64>,
        objective: Objective,
    ) -> Result<Self, ModelError> {
        let m = a.len();
        let n = lower.len();
        if m == 0 || n == 0 {
            return Err(ModelError::Dimension(format!(
                "need at least one constraint and one variable, got m={m}, n={n}"
            )));
        }
        if let Some((i, r)) = a.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(ModelError::Dimension(format!(
                "row {i} of A has {} entries, expected {n}",
                r.len()
            )));
        }
        if b.len() != m {
            return Err(ModelError::Dimension(format!("b has {} entries, expected {m}", b.len())));
        }
        if upper.len() != n {
            return Err(ModelError::Dimension(format!(
                "u has {} entries, expected {n}",
                upper.len()
            )));
        }
        if objective.dim() != n {
            return Err(ModelError::Dimension(format!(
                "objective has dimension {}, expected {n}",
                objective.dim()
            )));
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo > hi {
                return Err(ModelError::Bounds {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        let matrix = IntegerMatrix::from_rows(&a).map_err(|e| ModelError::Dimension(e.to_string()))?;
        let rank = matrix.rank();
        if rank < m {
            return Err(ModelError::Rank { rows: m, rank });
        }
        if let Objective::Separable(s) = &objective {
            check_midpoint_convexity(s, &lower, &upper)?;
        }
        Ok(Self {
            name: name.into(),
            a: matrix,
            a_rows: a,
            b,
            lower,
            upper,
            objective,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.lower.len()
    }
    pub fn m(&self) -> usize {
        self.b.len()
    }
    pub fn matrix(&self) -> &IntegerMatrix {
        &self.a
    }
    pub fn a_rows(&self) -> &[Vec<i64>] {
        &self.a_rows
    }
    pub fn b(&self) -> &[i64] {
        &self.b
    }
    pub fn lower(&self) -> &[i64] {
        &self.lower
    }
    pub fn upper(&self) -> &[i64] {
        &self.upper
    }
    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    /// Same constraint matrix and bounds with a different right-hand side.
    pub fn with_rhs(&self, b: Vec<i64>) -> Result<Self, ModelError> {
        if b.len() != self.m() {
            return Err(ModelError::Dimension(format!(
                "b has {} entries, expected {}",
                b.len(),
                self.m()
            )));
        }
        Ok(Self { b, ..self.clone() })
    }

    /// Same constraints with a different objective.
    pub fn with_objective(&self, objective: Objective) -> Result<Self, ModelError> {
        Self::new(
            self.name.clone(),
            self.a_rows.clone(),
            self.b.clone(),
            self.lower.clone(),
            self.upper.clone(),
            objective,
        )
    }

    pub fn difference_box(&self) -> SearchBox {
        SearchBox::difference_box(&self.lower, &self.upper)
    }

    pub fn within_bounds(&self, x: &[i64]) -> bool {
        x.len() == self.n()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    pub fn satisfies_equalities(&self, x: &[i64]) -> bool {
        x.len() == self.n()
            && self.a_rows.iter().zip(&self.b).all(|(row, &bi)| {
                row.iter()
                    .zip(x)
                    .map(|(&p, &q)| p as i128 * q as i128)
                    .sum::<i128>()
                    == bi as i128
            })
    }

    pub fn is_feasible(&self, x: &[i64]) -> bool {
        self.within_bounds(x) && self.satisfies_equalities(x)
    }

    /// `A g = 0`.
    pub fn in_kernel(&self, g: &[i64]) -> bool {
        g.len() == self.n()
            && self.a_rows.iter().all(|row| {
                row.iter()
                    .zip(g)
                    .map(|(&p, &q)| p as i128 * q as i128)
                    .sum::<i128>()
                    == 0
            })
    }

    pub fn eval(&self, x: &[i64]) -> f64 {
        self.objective.eval_i64(x)
    }
}

fn check_midpoint_convexity(
    s: &SeparableObjective,
    lower: &[i64],
    upper: &[i64],
) -> Result<(), ModelError> {
    for (index, p) in s.terms.iter().enumerate() {
        let (lo, hi) = (lower[index], upper[index]);
        if hi - lo < 2 {
            continue;
        }
        let stride = ((hi - lo - 1) / CONVEXITY_PROBES).max(1);
        let mut t = lo + 1;
        while t < hi {
            let (fm, f0, fp) = (p.eval((t - 1) as f64), p.eval(t as f64), p.eval((t + 1) as f64));
            let scale = fm.abs().max(f0.abs()).max(fp.abs()).max(1.0);
            if fm + fp < 2.0 * f0 - 1e-9 * scale {
                return Err(ModelError::NonConvex { index, at: t });
            }
            t += stride;
        }
    }
    Ok(())
}
