use nalgebra::DMatrix;

use crate::CMatrix;
#[cfg(test)]
use crate::C64;

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖M − M^H‖_F / ‖M‖_F, zero for the zero matrix.
pub(crate) fn hermitian_defect(m: &CMatrix) -> f64 {
    let norm = frobenius(m);
    if norm == 0.0 {
        return 0.0;
    }
    frobenius(&(m - m.adjoint())) / norm
}

#[cfg(test)]
pub(crate) fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Solves the Hermitian positive definite system `a x = b`, falling back to
/// LU when the Cholesky factorization breaks down numerically.
pub(crate) fn solve_hermitian(a: CMatrix, b: &CMatrix) -> Option<CMatrix> {
    if let Some(chol) = a.clone().cholesky() {
        return Some(chol.solve(b));
    }
    a.lu().solve(b)
}

/// 2-norm condition number from singular values; infinite for singular input.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
