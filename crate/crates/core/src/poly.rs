//! Polynomial rooting through companion-matrix eigenvalues.
//!
//! Coefficients are stored highest degree first: `[p_0, p_1, …, p_n]` is
//! `p_0 z^n + p_1 z^{n−1} + … + p_n`.

use nalgebra::Schur;

use crate::error::{DoaError, Result};
use crate::{CMatrix, C64};

/// Evaluates the polynomial at `z` by Horner's rule.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let zero = C64::new(0.0, 0.0);
    coeffs
        .iter()
        .fold((zero, zero), |(p, dp), &c| (p * z + c, dp * z + p))
}

/// Monic coefficients `[1, c_1, …, c_n]` of `∏ (z − r_i)`.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        coeffs.push(C64::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let prev = coeffs[i - 1];
            coeffs[i] -= r * prev;
        }
    }
    coeffs
}

/// Companion matrix of the monic polynomial `z^n + a_1 z^{n−1} + … + a_n`.
pub fn companion(monic_tail: &[C64]) -> CMatrix {
    let n = monic_tail.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, &a) in monic_tail.iter().enumerate() {
        m[(0, j)] = -a;
    }
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    m
}

/// All `n` roots of a degree-`n` polynomial, with multiplicity.
///
/// Eigenvalues of the companion matrix are refined by a few Newton steps
/// on the original coefficients; a step is kept only when it lowers |p|.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let lead = coeffs
        .iter()
        .position(|c| *c != C64::new(0.0, 0.0))
        .ok_or_else(|| DoaError::Precondition("zero polynomial has no roots".into()))?;
    let coeffs = &coeffs[lead..];
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let tail: Vec<C64> = coeffs[1..].iter().map(|&c| c / coeffs[0]).collect();
    if n == 1 {
        return Ok(vec![-tail[0]]);
    }
    let eigenvalues = Schur::new(companion(&tail))
        .eigenvalues()
        .ok_or_else(|| DoaError::Estimation("companion Schur form not triangular".into()))?;
    let mut monic = Vec::with_capacity(n + 1);
    monic.push(C64::new(1.0, 0.0));
    monic.extend_from_slice(&tail);
    Ok(eigenvalues.iter().map(|&z| polish(&monic, z, 3)).collect())
}

/// Coefficients of the first derivative.
pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (n - i) as f64)
        .collect()
}

/// Up to `steps` Newton steps from `z`, each kept only when it lowers |p|.
pub(crate) fn polish(coeffs: &[C64], mut z: C64, steps: usize) -> C64 {
    let mut residual = eval(coeffs, z).norm();
    for _ in 0..steps {
        if residual == 0.0 {
            break;
        }
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let r = eval(coeffs, candidate).norm();
        if !(r < residual) {
            break;
        }
        z = candidate;
        residual = r;
    }
    z
}
