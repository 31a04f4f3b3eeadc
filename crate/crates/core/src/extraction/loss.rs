use super::{ExtractionError, KernelBasis};

/// Divisor floor for the `1/||z||_inf` term.
pub const DEFAULT_EPSILON_DIV: f64 = 1e-8;

/// `(t − ⌊t⌋)(⌈t⌉ − t)`, zero on integers.
#[inline]
pub(crate) fn frac_penalty(t: f64) -> f64 {
    let f = t - t.floor();
    f * (1.0 - f)
}

/// Derivative of [`frac_penalty`]: `⌈t⌉ + ⌊t⌋ − 2t`, taken as 0 on integers.
#[inline]
pub(crate) fn frac_penalty_grad(t: f64) -> f64 {
    if t.fract() == 0.0 {
        0.0
    } else {
        t.ceil() + t.floor() - 2.0 * t
    }
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `||Bz||_1 + λ1 Σ (z_i − ⌊z_i⌋)(⌈z_i⌉ − z_i) + λ2 max(1/max(||z||_inf, ε) − 1, 0)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateLoss {
    pub lambda1: f64,
    pub lambda2: f64,
    pub epsilon_div: f64,
}

impl SurrogateLoss {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        Self {
            lambda1,
            lambda2,
            epsilon_div: DEFAULT_EPSILON_DIV,
        }
    }

    fn check(basis: &KernelBasis, z: &[f64]) -> Result<(), ExtractionError> {
        if z.len() != basis.lattice_dim() {
            return Err(ExtractionError::LengthMismatch {
                expected: basis.lattice_dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, basis: &KernelBasis, z: &[f64]) -> Result<f64, ExtractionError> {
        Self::check(basis, z)?;
        Ok(self.value_unchecked(basis, z))
    }

    pub(crate) fn value_unchecked(&self, basis: &KernelBasis, z: &[f64]) -> f64 {
        let l1: f64 = basis.apply(z).iter().map(|v| v.abs()).sum();
        let frac: f64 = z.iter().map(|&t| frac_penalty(t)).sum();
        let inf = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let barrier = (1.0 / inf.max(self.epsilon_div) - 1.0).max(0.0);
        l1 + self.lambda1 * frac + self.lambda2 * barrier
    }

    /// A subgradient, with `sign(0) = 0`, zero penalty slope on integers and
    /// the barrier charged to the lowest-index coordinate of largest modulus.
    pub fn gradient(&self, basis: &KernelBasis, z: &[f64]) -> Result<Vec<f64>, ExtractionError> {
        Self::check(basis, z)?;
        let mut out = vec![0.0; z.len()];
        self.gradient_into(basis, z, &mut out);
        Ok(out)
    }

    pub(crate) fn gradient_into(&self, basis: &KernelBasis, z: &[f64], out: &mut [f64]) {
        for (o, &t) in out.iter_mut().zip(z) {
            *o = self.lambda1 * frac_penalty_grad(t);
        }
        for row in basis.rows_f64() {
            let s = sign(row.iter().zip(z).map(|(a, b)| a * b).sum());
            if s != 0.0 {
                for (o, &bij) in out.iter_mut().zip(row) {
                    *o += s * bij;
                }
            }
        }
        let mut k = 0;
        let mut inf = 0.0f64;
        for (i, v) in z.iter().enumerate() {
            if v.abs() > inf {
                inf = v.abs();
                k = i;
            }
        }
        if inf < 1.0 && !z.is_empty() {
            out[k] -= self.lambda2 * sign(z[k]) / (z[k] * z[k]).max(self.epsilon_div);
        }
    }
}

pub fn extraction_loss(
    z: &[f64],
    basis: &KernelBasis,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64, ExtractionError> {
    SurrogateLoss::new(lambda1, lambda2).value(basis, z)
}

pub fn extraction_loss_grad(
    z: &[f64],
    basis: &KernelBasis,
    lambda1: f64,
    lambda2: f64,
) -> Result<Vec<f64>, ExtractionError> {
    SurrogateLoss::new(lambda1, lambda2).gradient(basis, z)
}
