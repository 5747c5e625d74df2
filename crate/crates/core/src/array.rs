//! Uniform linear array geometry and the narrowband snapshot model
//! `x(t) = A s(t) + n(t)`.

use std::f64::consts::PI;

#[cfg(test)]
use nalgebra::DMatrix;

use crate::error::{DoaError, Result};
use crate::linalg::hermitian_defect;
use crate::rng::{complex_gaussian, stream};
use crate::{CMatrix, CVector, C64};

/// Sensor count and inter-element spacing in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaGeometry {
    sensor_count: usize,
    spacing_ratio: f64,
}

impl UlaGeometry {
    pub fn new(sensor_count: usize, spacing_ratio: f64) -> Result<Self> {
        if sensor_count < 2 {
            return Err(DoaError::Precondition(format!(
                "array needs at least 2 sensors, got {sensor_count}"
            )));
        }
        if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
            return Err(DoaError::Precondition(format!(
                "spacing ratio must be positive, got {spacing_ratio}"
            )));
        }
        Ok(Self {
            sensor_count,
            spacing_ratio,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(sensor_count: usize) -> Result<Self> {
        Self::new(sensor_count, 0.5)
    }

    pub fn sensor_count(&self) -> usize {
        self.sensor_count
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }

    /// Electrical angle `2π (d/λ) sin θ` for an angle in degrees.
    pub fn electrical_angle(&self, theta_deg: f64) -> f64 {
        2.0 * PI * self.spacing_ratio * theta_deg.to_radians().sin()
    }
}

/// Equal-power uncorrelated sources in white noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceScenario {
    angles_deg: Vec<f64>,
    source_power: f64,
    noise_power: f64,
}

impl SourceScenario {
    pub fn new(angles_deg: Vec<f64>, source_power: f64, noise_power: f64) -> Result<Self> {
        if angles_deg.is_empty() {
            return Err(DoaError::Precondition(
                "at least one source is required".into(),
            ));
        }
        for &theta in &angles_deg {
            check_angle(theta)?;
        }
        for (i, a) in angles_deg.iter().enumerate() {
            if angles_deg[..i].contains(a) {
                return Err(DoaError::Precondition(format!(
                    "duplicate source angle {a}°"
                )));
            }
        }
        if !(source_power > 0.0 && source_power.is_finite()) {
            return Err(DoaError::Precondition(format!(
                "source power must be positive, got {source_power}"
            )));
        }
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return Err(DoaError::Precondition(format!(
                "noise power must be non-negative, got {noise_power}"
            )));
        }
        Ok(Self {
            angles_deg,
            source_power,
            noise_power,
        })
    }

    /// Unit-power sources with noise power `10^(−snr_db/10)`.
    pub fn from_snr(angles_deg: Vec<f64>, snr_db: f64) -> Result<Self> {
        Self::new(angles_deg, 1.0, 10f64.powf(-snr_db / 10.0))
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn source_count(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn source_power(&self) -> f64 {
        self.source_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.source_power / self.noise_power).log10()
    }

    pub fn with_noise_power(&self, noise_power: f64) -> Result<Self> {
        Self::new(self.angles_deg.clone(), self.source_power, noise_power)
    }

    pub fn validate_against(&self, geometry: &UlaGeometry) -> Result<()> {
        if self.source_count() >= geometry.sensor_count() {
            return Err(DoaError::Precondition(format!(
                "{} sources need more than {} sensors",
                self.source_count(),
                geometry.sensor_count()
            )));
        }
        Ok(())
    }
}

/// M×N array observations; column `t` is `x(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: CMatrix,
    geometry: UlaGeometry,
}

impl SnapshotMatrix {
    pub fn new(data: CMatrix, geometry: UlaGeometry) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(DoaError::Precondition("no snapshots".into()));
        }
        if data.nrows() != geometry.sensor_count() {
            return Err(DoaError::Precondition(format!(
                "snapshot rows {} differ from sensor count {}",
                data.nrows(),
                geometry.sensor_count()
            )));
        }
        Ok(Self { data, geometry })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn geometry(&self) -> &UlaGeometry {
        &self.geometry
    }

    pub fn n_snapshots(&self) -> usize {
        self.data.ncols()
    }
}

/// Hermitian positive semidefinite M×M covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCovariance {
    data: CMatrix,
}

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

impl HermitianCovariance {
    /// Validates Hermitian symmetry and positive semidefiniteness.
    pub fn new(data: CMatrix) -> Result<Self> {
        if !data.is_square() || data.nrows() == 0 {
            return Err(DoaError::Precondition(format!(
                "covariance must be square, got {}×{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DoaError::Precondition(
                "covariance has non-finite entries".into(),
            ));
        }
        let defect = hermitian_defect(&data);
        if defect > HERMITIAN_TOL {
            return Err(DoaError::Precondition(format!(
                "covariance is not Hermitian (relative defect {defect:.2e})"
            )));
        }
        let m = data.nrows() as f64;
        let trace = data.trace().re;
        let min_eig = data.clone().symmetric_eigenvalues().min();
        if min_eig < -PSD_TOL * trace.abs() / m {
            return Err(DoaError::Precondition(format!(
                "covariance is not positive semidefinite (eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { data })
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn from_hermitian(data: CMatrix) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Multiplies by a positive scalar.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(DoaError::Precondition(format!(
                "scale must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            data: self.data.map(|z| z * alpha),
        })
    }
}

fn check_angle(theta_deg: f64) -> Result<()> {
    if !(theta_deg.abs() < 90.0) {
        return Err(DoaError::Domain(format!(
            "angle {theta_deg}° outside the open interval (−90°, 90°)"
        )));
    }
    Ok(())
}

/// `a(θ)` with element `m` equal to `exp(j 2π (d/λ) m sin θ)`.
pub fn steering_vector(theta_deg: f64, geometry: &UlaGeometry) -> Result<CVector> {
    check_angle(theta_deg)?;
    let phase = geometry.electrical_angle(theta_deg);
    Ok(CVector::from_fn(geometry.sensor_count(), |m, _| {
        C64::from_polar(1.0, phase * m as f64)
    }))
}

/// Derivative of `a(θ)` with respect to θ in radians.
pub fn steering_derivative(theta_deg: f64, geometry: &UlaGeometry) -> Result<CVector> {
    let a = steering_vector(theta_deg, geometry)?;
    let dphase = 2.0 * PI * geometry.spacing_ratio() * theta_deg.to_radians().cos();
    Ok(CVector::from_fn(geometry.sensor_count(), |m, _| {
        a[m] * C64::new(0.0, dphase * m as f64)
    }))
}

/// `A = [a(θ_1) … a(θ_K)]`.
pub fn steering_matrix(scenario: &SourceScenario, geometry: &UlaGeometry) -> Result<CMatrix> {
    scenario.validate_against(geometry)?;
    let m = geometry.sensor_count();
    let mut a = CMatrix::zeros(m, scenario.source_count());
    for (k, &theta) in scenario.angles_deg().iter().enumerate() {
        a.set_column(k, &steering_vector(theta, geometry)?);
    }
    Ok(a)
}

/// Draws `n_snapshots` columns of `A s(t) + n(t)` from the stream seeded by `seed`.
///
/// Samples are drawn column by column: the K source amplitudes of `s(t)`
/// followed by the M noise samples of `n(t)`.
pub fn synthesize_snapshots(
    scenario: &SourceScenario,
    geometry: &UlaGeometry,
    n_snapshots: usize,
    seed: u64,
) -> Result<SnapshotMatrix> {
    if n_snapshots == 0 {
        return Err(DoaError::Precondition(
            "n_snapshots must be at least 1".into(),
        ));
    }
    let a = steering_matrix(scenario, geometry)?;
    let m = geometry.sensor_count();
    let k = scenario.source_count();
    let mut rng = stream(seed);
    let mut signals = CMatrix::zeros(k, n_snapshots);
    let mut noise = CMatrix::zeros(m, n_snapshots);
    for t in 0..n_snapshots {
        for i in 0..k {
            signals[(i, t)] = complex_gaussian(&mut rng, scenario.source_power());
        }
        for i in 0..m {
            noise[(i, t)] = complex_gaussian(&mut rng, scenario.noise_power());
        }
    }
    SnapshotMatrix::new(&a * signals + noise, *geometry)
}

/// `(1/N) Σ_t x(t) x(t)^H`, symmetrized.
pub fn sample_covariance(snapshots: &SnapshotMatrix) -> HermitianCovariance {
    let x = snapshots.data();
    let n = x.ncols() as f64;
    let r = (x * x.adjoint()).map(|z| z / n);
    let r = (&r + r.adjoint()).map(|z| z * 0.5);
    HermitianCovariance::from_hermitian(r)
}

/// `A (σ_s² I) A^H + σ² I`.
pub fn exact_covariance(
    scenario: &SourceScenario,
    geometry: &UlaGeometry,
) -> Result<HermitianCovariance> {
    let a = steering_matrix(scenario, geometry)?;
    let m = geometry.sensor_count();
    let mut r = (&a * a.adjoint()).map(|z| z * scenario.source_power());
    for i in 0..m {
        r[(i, i)] += C64::new(scenario.noise_power(), 0.0);
    }
    let r = (&r + r.adjoint()).map(|z| z * 0.5);
    Ok(HermitianCovariance::from_hermitian(r))
}

#[cfg(test)]
pub(crate) fn real_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
pub(crate) fn complex_singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn broadside_steering_is_all_ones() {
        let g = UlaGeometry::half_wavelength(4).unwrap();
        let a = steering_vector(0.0, &g).unwrap();
        assert!(a.iter().all(|&z| z == C64::new(1.0, 0.0)));
    }

    #[test]
    fn thirty_degrees_steering() {
        let g = UlaGeometry::half_wavelength(3).unwrap();
        let j = C64::new(0.0, 1.0);
        let a = steering_vector(30.0, &g).unwrap();
        let want = [C64::new(1.0, 0.0), j, C64::new(-1.0, 0.0)];
        for (z, w) in a.iter().zip(want) {
            assert!(close(*z, w, 1e-14), "{z} vs {w}");
        }
        let a = steering_vector(-30.0, &g).unwrap();
        let want = [C64::new(1.0, 0.0), -j, C64::new(-1.0, 0.0)];
        for (z, w) in a.iter().zip(want) {
            assert!(close(*z, w, 1e-14), "{z} vs {w}");
        }
    }

    #[test]
    fn first_element_is_exactly_one() {
        let g = UlaGeometry::new(7, 0.37).unwrap();
        for theta in [-80.0, -12.5, 3.0, 61.0] {
            assert_eq!(steering_vector(theta, &g).unwrap()[0], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn endfire_is_rejected() {
        let g = UlaGeometry::half_wavelength(4).unwrap();
        for theta in [90.0, -90.0, 120.0, f64::NAN] {
            assert!(matches!(
                steering_vector(theta, &g),
                Err(DoaError::Domain(_))
            ));
        }
    }

    #[test]
    fn geometry_and_scenario_validation() {
        assert!(UlaGeometry::new(1, 0.5).is_err());
        assert!(UlaGeometry::new(4, 0.0).is_err());
        assert!(SourceScenario::new(vec![], 1.0, 1.0).is_err());
        assert!(SourceScenario::new(vec![10.0, 10.0], 1.0, 1.0).is_err());
        assert!(SourceScenario::new(vec![10.0], 0.0, 1.0).is_err());
        assert!(SourceScenario::new(vec![10.0], 1.0, -1.0).is_err());
        assert!(SourceScenario::new(vec![10.0], 1.0, 0.0).is_ok());
        let g = UlaGeometry::half_wavelength(2).unwrap();
        let s = SourceScenario::new(vec![1.0, 2.0], 1.0, 0.0).unwrap();
        assert!(matches!(
            steering_matrix(&s, &g),
            Err(DoaError::Precondition(_))
        ));
    }

    #[test]
    fn single_broadside_column() {
        let g = UlaGeometry::half_wavelength(2).unwrap();
        let s = SourceScenario::new(vec![0.0], 1.0, 0.0).unwrap();
        let a = steering_matrix(&s, &g).unwrap();
        assert_eq!(a.shape(), (2, 1));
        assert!(a.iter().all(|&z| z == C64::new(1.0, 0.0)));
    }

    #[test]
    fn near_endfire_columns_independent() {
        let g = UlaGeometry::half_wavelength(4).unwrap();
        let s = SourceScenario::new(vec![0.0, 89.9], 1.0, 0.0).unwrap();
        let sv = complex_singular_values(&steering_matrix(&s, &g).unwrap());
        assert!(sv[1] > 1e-3, "{sv:?}");
    }

    #[test]
    fn two_source_steering_rank() {
        let g = UlaGeometry::half_wavelength(10).unwrap();
        let s = SourceScenario::new(vec![6.0, 45.0], 1.0, 0.0).unwrap();
        let a = steering_matrix(&s, &g).unwrap();
        let sv = complex_singular_values(&a);
        assert_eq!(sv.len(), 2);
        assert!(sv[1] > 1e-3 * sv[0]);
    }

    #[test]
    fn steering_entries_unit_modulus() {
        let g = UlaGeometry::new(20, 0.5).unwrap();
        for theta in [-89.0, -45.0, 0.5, 33.3, 89.0] {
            let a = steering_vector(theta, &g).unwrap();
            assert!(a.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn noise_free_single_source_is_rank_one() {
        let g = UlaGeometry::half_wavelength(6).unwrap();
        let s = SourceScenario::new(vec![17.0], 2.0, 0.0).unwrap();
        let x = synthesize_snapshots(&s, &g, 25, 3).unwrap();
        let a = steering_vector(17.0, &g).unwrap();
        for t in 0..25 {
            let col = x.data().column(t);
            let alpha = col[0];
            for m in 0..6 {
                assert!(close(col[m], alpha * a[m], 1e-12));
            }
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let g = UlaGeometry::half_wavelength(5).unwrap();
        let s = SourceScenario::from_snr(vec![-20.0, 40.0], 3.0).unwrap();
        let x1 = synthesize_snapshots(&s, &g, 40, 99).unwrap();
        let x2 = synthesize_snapshots(&s, &g, 40, 99).unwrap();
        assert_eq!(x1, x2);
        let x3 = synthesize_snapshots(&s, &g, 40, 100).unwrap();
        assert_ne!(x1, x3);
        assert!(synthesize_snapshots(&s, &g, 0, 1).is_err());
    }

    #[test]
    fn large_sample_covariance_approaches_exact() {
        let g = UlaGeometry::half_wavelength(6).unwrap();
        let s = SourceScenario::new(vec![6.0, 45.0], 1.0, 0.5).unwrap();
        let x = synthesize_snapshots(&s, &g, 100_000, 5).unwrap();
        let rs = sample_covariance(&x);
        let re = exact_covariance(&s, &g).unwrap();
        let rel = frobenius(&(rs.data() - re.data())) / frobenius(re.data());
        assert!(rel < 0.05, "relative error {rel}");
    }

    #[test]
    fn sample_covariance_single_snapshot() {
        let g = UlaGeometry::half_wavelength(3).unwrap();
        let data = CMatrix::from_column_slice(
            3,
            1,
            &[C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 3.0)],
        );
        let x = SnapshotMatrix::new(data.clone(), g).unwrap();
        let r = sample_covariance(&x);
        let want = &data * data.adjoint();
        assert!(frobenius(&(r.data() - want)) < 1e-14);
    }

    #[test]
    fn sample_covariance_identity_columns() {
        let m = 4;
        let g = UlaGeometry::half_wavelength(m).unwrap();
        let x = SnapshotMatrix::new(CMatrix::identity(m, m), g).unwrap();
        let r = sample_covariance(&x);
        let want = CMatrix::identity(m, m).map(|z| z / m as f64);
        assert!(frobenius(&(r.data() - want)) < 1e-15);
    }

    #[test]
    fn sample_covariance_matches_direct_sum() {
        let g = UlaGeometry::half_wavelength(5).unwrap();
        let s = SourceScenario::from_snr(vec![12.0], 0.0).unwrap();
        let x = synthesize_snapshots(&s, &g, 17, 8).unwrap();
        let r = sample_covariance(&x);
        let mut want = CMatrix::zeros(5, 5);
        for t in 0..17 {
            for i in 0..5 {
                for j in 0..5 {
                    want[(i, j)] += x.data()[(i, t)] * x.data()[(j, t)].conj();
                }
            }
        }
        want /= C64::new(17.0, 0.0);
        assert!(frobenius(&(r.data() - want)) < 1e-12);
        assert!(HermitianCovariance::new(r.data().clone()).is_ok());
    }

    #[test]
    fn exact_covariance_examples() {
        let g = UlaGeometry::half_wavelength(2).unwrap();
        let s = SourceScenario::new(vec![0.0], 1.0, 0.0).unwrap();
        let r = exact_covariance(&s, &g).unwrap();
        assert!(r
            .data()
            .iter()
            .all(|&z| close(z, C64::new(1.0, 0.0), 1e-15)));
        let s = s.with_noise_power(1.0).unwrap();
        let r = exact_covariance(&s, &g).unwrap();
        assert!(close(r.data()[(0, 0)], C64::new(2.0, 0.0), 1e-15));
        assert!(close(r.data()[(0, 1)], C64::new(1.0, 0.0), 1e-15));

        let g = UlaGeometry::half_wavelength(9).unwrap();
        let s = SourceScenario::new(vec![-33.0, 5.0, 70.0], 1.7, 0.3).unwrap();
        let r = exact_covariance(&s, &g).unwrap();
        let want = 9.0 * (3.0 * 1.7 + 0.3);
        assert!((r.data().trace().re - want).abs() < 1e-12);
    }

    #[test]
    fn noise_free_exact_covariance_has_rank_k() {
        let g = UlaGeometry::half_wavelength(8).unwrap();
        let s = SourceScenario::new(vec![-20.0, 10.0, 50.0], 1.0, 0.0).unwrap();
        let sv = complex_singular_values(exact_covariance(&s, &g).unwrap().data());
        assert!(sv[2] > 1e-3 * sv[0]);
        assert!(sv[3..].iter().all(|&v| v < 1e-10 * sv[0]), "{sv:?}");
    }

    #[test]
    fn covariance_validation_rejects_non_hermitian() {
        let mut m = CMatrix::identity(3, 3);
        m[(0, 1)] = C64::new(0.5, 0.0);
        assert!(HermitianCovariance::new(m).is_err());
        let mut m = CMatrix::identity(2, 2);
        m[(0, 0)] = C64::new(-1.0, 0.0);
        assert!(HermitianCovariance::new(m).is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let g = UlaGeometry::half_wavelength(10).unwrap();
        let theta = 23.0_f64;
        let d = steering_derivative(theta, &g).unwrap();
        let h = 1e-6_f64;
        let plus = steering_vector(theta + h.to_degrees(), &g).unwrap();
        let minus = steering_vector(theta - h.to_degrees(), &g).unwrap();
        let fd = (plus - minus) / C64::new(2.0 * h, 0.0);
        assert!((fd - d).norm() < 1e-7);
    }
}
