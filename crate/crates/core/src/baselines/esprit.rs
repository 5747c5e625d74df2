use std::f64::consts::PI;

use crate::array::{HermitianCovariance, UlaGeometry};
use crate::error::{DoaError, Result};
use crate::subspace::signal_subspace;
use crate::unitary::{to_real_covariance, unitary_q_unchecked};
use crate::warning::Warning;
use crate::wlslp::{electrical_to_degrees, DoaEstimate};
use crate::{CMatrix, RMatrix, C64};

/// Real selection matrices `(K₁, K₂) = 2·(Re, Im){Q_{M−1}^H J₂ Q_M}`, where
/// `J₂ = [0 | I_{M−1}]` selects the last M−1 sensors.
pub fn selection_matrices(m: usize) -> Result<(RMatrix, RMatrix)> {
    if m < 2 {
        return Err(DoaError::Precondition(format!(
            "ESPRIT needs M ≥ 2, got {m}"
        )));
    }
    let qm = unitary_q_unchecked(m);
    let qs = unitary_q_unchecked(m - 1);
    let j2 = CMatrix::from_fn(m - 1, m, |i, j| {
        if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let t = qs.data().adjoint() * j2 * qm.data();
    Ok((t.map(|z| 2.0 * z.re), t.map(|z| 2.0 * z.im)))
}

/// Imaginary part of a rotation eigenvalue above which a warning is raised.
const COMPLEX_EIG_TOL: f64 = 1e-6;

/// Unitary ESPRIT with a least-squares solution of `K₁ E_s Ψ = K₂ E_s`.
pub fn unitary_esprit(
    r: &HermitianCovariance,
    k: usize,
    geometry: &UlaGeometry,
) -> Result<DoaEstimate> {
    let m = geometry.sensor_count();
    if r.dim() != m {
        return Err(DoaError::Precondition(format!(
            "covariance is {}×{} but the array has {m} sensors",
            r.dim(),
            r.dim()
        )));
    }
    if k == 0 || k >= m {
        return Err(DoaError::Precondition(format!(
            "source count must satisfy 1 ≤ K < M (K = {k}, M = {m})"
        )));
    }
    let q = unitary_q_unchecked(m);
    let c = to_real_covariance(r, &q)?;
    let us = signal_subspace(&c, k)?;
    let es = us.basis();
    let (k1, k2) = selection_matrices(m)?;
    let lhs = &k1 * es;
    let rhs = &k2 * es;

    let svd = lhs.clone().svd(true, true);
    let sv = &svd.singular_values;
    if !(sv.min() > 1e-12 * sv.max()) {
        return Err(DoaError::Estimation(
            "ESPRIT invariance equation is rank deficient".into(),
        ));
    }
    let psi = svd
        .solve(&rhs, 0.0)
        .map_err(|e| DoaError::Estimation(format!("ESPRIT least squares failed: {e}")))?;

    let mut warnings: Vec<Warning> = us.warnings().to_vec();
    let omegas = psi.complex_eigenvalues();
    let mut pairs = Vec::with_capacity(k);
    for (i, w) in omegas.iter().enumerate() {
        if w.im.abs() > COMPLEX_EIG_TOL * w.re.abs().max(1.0) {
            warnings.push(Warning::ComplexEigenvalue {
                index: i,
                imag: w.im,
            });
        }
        let mu = 2.0 * w.re.atan();
        let theta = electrical_to_degrees(mu, geometry, i, &mut warnings);
        pairs.push((theta, C64::from_polar(1.0, mu)));
    }
    debug_assert!(mu_range_ok(&pairs));
    Ok(DoaEstimate::new(pairs, warnings))
}

fn mu_range_ok(pairs: &[(f64, C64)]) -> bool {
    pairs.iter().all(|(_, z)| z.arg().abs() <= PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{exact_covariance, SourceScenario};

    #[test]
    fn noise_free_recovery() {
        let g = UlaGeometry::half_wavelength(10).unwrap();
        let s = SourceScenario::new(vec![6.0, 45.0], 1.0, 0.0).unwrap();
        let r = exact_covariance(&s, &g).unwrap();
        let e = unitary_esprit(&r, 2, &g).unwrap();
        assert!(
            (e.angles_deg()[0] - 6.0).abs() < 1e-6,
            "{:?}",
            e.angles_deg()
        );
        assert!(
            (e.angles_deg()[1] - 45.0).abs() < 1e-6,
            "{:?}",
            e.angles_deg()
        );
    }

    #[test]
    fn broadside_single_source() {
        let g = UlaGeometry::half_wavelength(5).unwrap();
        let s = SourceScenario::new(vec![0.0], 1.0, 0.0).unwrap();
        let r = exact_covariance(&s, &g).unwrap();
        let e = unitary_esprit(&r, 1, &g).unwrap();
        assert!(e.angles_deg()[0].abs() < 1e-9);
    }

    #[test]
    fn two_sensor_array() {
        let g = UlaGeometry::half_wavelength(2).unwrap();
        let s = SourceScenario::new(vec![-37.0], 1.0, 0.0).unwrap();
        let r = exact_covariance(&s, &g).unwrap();
        let e = unitary_esprit(&r, 1, &g).unwrap();
        assert!((e.angles_deg()[0] + 37.0).abs() < 1e-9);
    }

    #[test]
    fn selection_matrices_are_real() {
        // Q^H (J₁ + J₂) Q and Q^H j(J₁ − J₂) Q are real and equal K₁, K₂
        for m in 2..=12 {
            let qm = unitary_q_unchecked(m);
            let qs = unitary_q_unchecked(m - 1);
            let sel = |offset: usize| {
                CMatrix::from_fn(m - 1, m, |i, j| {
                    C64::new(if j == i + offset { 1.0 } else { 0.0 }, 0.0)
                })
            };
            let (j1, j2) = (sel(0), sel(1));
            let a = qs.data().adjoint() * (&j1 + &j2) * qm.data();
            let b = qs.data().adjoint() * (&j1 - &j2).map(|z| z * C64::new(0.0, 1.0)) * qm.data();
            let (k1, k2) = selection_matrices(m).unwrap();
            for (z, x) in a.iter().zip(k1.iter()) {
                assert!(z.im.abs() < 1e-12 && (z.re - x).abs() < 1e-12);
            }
            for (z, x) in b.iter().zip(k2.iter()) {
                assert!(z.im.abs() < 1e-12 && (z.re - x).abs() < 1e-12);
            }
        }
    }
}
