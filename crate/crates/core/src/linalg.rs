//! Periodic (cyclic) tridiagonal systems.

use crate::error::{Error, Result};

/// Cyclic tridiagonal matrix: row `i` has `lower[i]` at column `i-1`,
/// `diag[i]` at `i` and `upper[i]` at `i+1`, indices taken modulo `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            out[i] = self.lower[i] * x[im] + self.diag[i] * x[i] + self.upper[i] * x[ip];
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.apply(x, &mut out);
        out
    }

    /// `x^T A` as a vector, i.e. `A^T x`.
    pub fn mul_transpose(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            out[im] += self.lower[i] * x[i];
            out[i] += self.diag[i] * x[i];
            out[ip] += self.upper[i] * x[i];
        }
        out
    }

    /// Column sums (`1^T A`).
    pub fn column_sums(&self) -> Vec<f64> {
        self.mul_transpose(&vec![1.0; self.len()])
    }

    /// `I - scale * A`.
    pub fn shifted_identity(&self, scale: f64) -> Self {
        Self {
            lower: self.lower.iter().map(|a| -scale * a).collect(),
            diag: self.diag.iter().map(|a| 1.0 - scale * a).collect(),
            upper: self.upper.iter().map(|a| -scale * a).collect(),
        }
    }

    /// Solve `A x = rhs` by the Sherman-Morrison reduction of the cyclic
    /// system to two ordinary tridiagonal solves.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::ShapeMismatch { expected: n, actual: rhs.len() });
        }
        if n < 3 {
            return Err(Error::param("n", "cyclic solve needs at least three unknowns"));
        }
        let alpha = self.upper[n - 1]; // A[n-1][0]
        let beta = self.lower[0]; // A[0][n-1]
        let gamma = -self.diag[0];
        let mut diag = self.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= alpha * beta / gamma;

        let x = thomas(&self.lower, &diag, &self.upper, rhs)?;
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = alpha;
        let z = thomas(&self.lower, &diag, &self.upper, &u)?;

        let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
        let out: Vec<f64> = x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::numerical("cyclic tridiagonal solve", "non-finite solution"))
        }
    }
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::numerical("tridiagonal solve", "zero pivot"));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::numerical("tridiagonal solve", format!("zero pivot at row {i}")));
        }
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}
