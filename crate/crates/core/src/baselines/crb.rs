use crate::array::{
    exact_covariance, steering_derivative, steering_matrix, SourceScenario, UlaGeometry,
};
use crate::error::{DoaError, Result};
use crate::linalg::{condition_number, solve_hermitian};
use crate::{CMatrix, RMatrix};

/// Per-angle standard-deviation lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbResult {
    pub per_angle_bound_deg: Vec<f64>,
    /// Condition number of the Fisher-type matrix that was inverted.
    pub fisher_conditioning: f64,
}

impl CrbResult {
    /// `sqrt(mean_k CRB_kk)` in degrees, the bound matching an RMSE pooled
    /// over all sources.
    pub fn pooled_deg(&self) -> f64 {
        let k = self.per_angle_bound_deg.len() as f64;
        (self.per_angle_bound_deg.iter().map(|b| b * b).sum::<f64>() / k).sqrt()
    }
}

const MAX_CONDITION: f64 = 1e14;

/// Stochastic (unconditional) CRB for uncorrelated equal-power Gaussian sources:
///
/// `CRB = σ²/(2N) · Re[(D^H Π_A^⊥ D) ⊙ (S A^H R^{−1} A S)^T]^{−1}`.
pub fn stochastic_crb(
    scenario: &SourceScenario,
    geometry: &UlaGeometry,
    n_snapshots: usize,
) -> Result<CrbResult> {
    if n_snapshots == 0 {
        return Err(DoaError::Precondition(
            "n_snapshots must be at least 1".into(),
        ));
    }
    if !(scenario.noise_power() > 0.0) {
        return Err(DoaError::Precondition(
            "the stochastic CRB requires positive noise power".into(),
        ));
    }
    let a = steering_matrix(scenario, geometry)?;
    let m = geometry.sensor_count();
    let k = scenario.source_count();
    let mut d = CMatrix::zeros(m, k);
    for (i, &theta) in scenario.angles_deg().iter().enumerate() {
        d.set_column(i, &steering_derivative(theta, geometry)?);
    }
    let gram = a.adjoint() * &a;
    let proj = &a
        * solve_hermitian(gram, &a.adjoint()).ok_or(DoaError::SingularFisher {
            condition: f64::INFINITY,
        })?;
    let perp = CMatrix::identity(m, m) - proj;
    let r = exact_covariance(scenario, geometry)?;
    let r_inv_a = solve_hermitian(r.data().clone(), &a).ok_or(DoaError::SingularFisher {
        condition: f64::INFINITY,
    })?;
    let p = scenario.source_power();
    let signal_term = (a.adjoint() * r_inv_a).map(|z| z * (p * p));
    let derivative_term = d.adjoint() * perp * &d;
    let signal_t = signal_term.transpose();
    let fisher = RMatrix::from_fn(k, k, |i, j| (derivative_term[(i, j)] * signal_t[(i, j)]).re);
    let fisher = (&fisher + fisher.transpose()) * 0.5;

    let condition = condition_number(&fisher);
    if !(condition < MAX_CONDITION) {
        return Err(DoaError::SingularFisher { condition });
    }
    let inv = fisher
        .try_inverse()
        .ok_or(DoaError::SingularFisher { condition })?;
    let scale = scenario.noise_power() / (2.0 * n_snapshots as f64);
    let per_angle_bound_deg = (0..k)
        .map(|i| (scale * inv[(i, i)]).sqrt().to_degrees())
        .collect();
    Ok(CrbResult {
        per_angle_bound_deg,
        fisher_conditioning: condition,
    })
}
