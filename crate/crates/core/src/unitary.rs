//! Unitary transform mapping centro-Hermitian matrices to real ones.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::array::HermitianCovariance;
use crate::error::{DoaError, Result};
use crate::{CMatrix, RMatrix, C64};

/// Left-Π-real unitary matrix `Q_M` (`J_M Q_M = Q_M^*`).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryQ {
    data: CMatrix,
}

impl UnitaryQ {
    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }
}

/// Real symmetric covariance `C = Re{Q^H R Q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealCovariance {
    data: RMatrix,
}

impl RealCovariance {
    /// Wraps a real matrix, rejecting asymmetric input.
    pub fn new(data: RMatrix) -> Result<Self> {
        if !data.is_square() {
            return Err(DoaError::Precondition(
                "real covariance must be square".into(),
            ));
        }
        let norm = data.norm();
        let defect = (&data - data.transpose()).norm();
        if norm > 0.0 && defect / norm > 1e-12 {
            return Err(DoaError::Precondition(format!(
                "real covariance is not symmetric (relative defect {:.2e})",
                defect / norm
            )));
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &RMatrix {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }
}

/// M×M exchange matrix with ones on the antidiagonal.
pub fn exchange_matrix(m: usize) -> RMatrix {
    RMatrix::from_fn(m, m, |i, j| if i + j + 1 == m { 1.0 } else { 0.0 })
}

/// Builds `Q_M`.
///
/// Even `M = 2l`: `(1/√2) [[I, jI], [J, −jJ]]`.
/// Odd `M = 2l+1`: `(1/√2) [[I, 0, jI], [0ᵀ, √2, 0ᵀ], [J, 0, −jJ]]`.
pub fn build_unitary_q(m: usize) -> Result<UnitaryQ> {
    if m < 2 {
        return Err(DoaError::Precondition(format!("Q_M needs M ≥ 2, got {m}")));
    }
    Ok(unitary_q_unchecked(m))
}

/// Same construction, also defined for `M = 1` (`Q_1 = [1]`), which the
/// ESPRIT selection matrices need for two-sensor arrays.
pub(crate) fn unitary_q_unchecked(m: usize) -> UnitaryQ {
    let l = m / 2;
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let js = C64::new(0.0, FRAC_1_SQRT_2);
    let mut q = CMatrix::zeros(m, m);
    // columns 0..l carry the real part, columns m-l..m the imaginary part
    for i in 0..l {
        q[(i, i)] = s;
        q[(i, m - l + i)] = js;
        let row = m - 1 - i;
        q[(row, i)] = s;
        q[(row, m - l + i)] = -js;
    }
    if m % 2 == 1 {
        q[(l, l)] = C64::new(1.0, 0.0);
    }
    UnitaryQ { data: q }
}

/// `C = Re{Q^H R Q}`, equal to `(1/2) Q^H (R + J R^* J) Q`.
pub fn to_real_covariance(r: &HermitianCovariance, q: &UnitaryQ) -> Result<RealCovariance> {
    if r.dim() != q.size() {
        return Err(DoaError::Precondition(format!(
            "covariance is {}×{} but Q is {}×{}",
            r.dim(),
            r.dim(),
            q.size(),
            q.size()
        )));
    }
    let qd = q.data();
    let full = qd.adjoint() * r.data() * qd;
    let c = full.map(|z| z.re);
    let c = (&c + c.transpose()) * 0.5;
    Ok(RealCovariance { data: c })
}
