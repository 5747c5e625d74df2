use nalgebra::SymmetricEigen;

use crate::array::{HermitianCovariance, UlaGeometry};
use crate::error::{DoaError, Result};
use crate::poly;
use crate::wlslp::{electrical_to_degrees, principal_arg, DoaEstimate};
use crate::{CMatrix, C64};

fn check_dims(r: &HermitianCovariance, k: usize, geometry: &UlaGeometry) -> Result<usize> {
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
    Ok(m)
}

/// Coefficients (highest degree first) of `z^{M−1} a^H(1/z^*) E_n E_n^H a(z)`.
///
/// Entry `i` is the sum of the noise projector's `(M−1−i)`-th diagonal,
/// so the coefficient list is conjugate-symmetric about its middle.
pub fn root_music_polynomial(r: &HermitianCovariance, k: usize) -> Result<Vec<C64>> {
    let m = r.dim();
    if k == 0 || k >= m {
        return Err(DoaError::Precondition(format!(
            "source count must satisfy 1 ≤ K < M (K = {k}, M = {m})"
        )));
    }
    let eig = SymmetricEigen::try_new(r.data().clone(), f64::EPSILON, 0)
        .ok_or_else(|| DoaError::Estimation("eigendecomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut noise = CMatrix::zeros(m, m - k);
    for (col, &idx) in order.iter().take(m - k).enumerate() {
        noise.set_column(col, &eig.eigenvectors.column(idx));
    }
    let proj = &noise * noise.adjoint();

    // s[l] = Σ_{n − m = l} P[m][n] for l = 0..M−1; negative lags are conjugates
    let diag_sum = |lag: usize| -> C64 { (0..m - lag).map(|row| proj[(row, row + lag)]).sum() };
    let degree = 2 * (m - 1);
    let mut coeffs = vec![C64::new(0.0, 0.0); degree + 1];
    for lag in 0..m {
        let s = diag_sum(lag);
        coeffs[m - 1 - lag] = s;
        coeffs[m - 1 + lag] = s.conj();
    }
    coeffs[m - 1] = C64::new(coeffs[m - 1].re, 0.0);
    Ok(coeffs)
}

/// Groups roots into conjugate-reciprocal pairs `(z, 1/z^*)`, greedily by
/// closeness of the reflection. An odd root out is paired with itself.
fn reciprocal_pairs(roots: &[C64]) -> Vec<(C64, C64)> {
    let n = roots.len();
    let mut candidates = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let reflected = C64::new(1.0, 0.0) / roots[j].conj();
            candidates.push(((roots[i] - reflected).norm(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2 + 1);
    for (_, i, j) in candidates {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            pairs.push((roots[i], roots[j]));
        }
    }
    for (i, &z) in roots.iter().enumerate() {
        if !used[i] {
            pairs.push((z, z));
        }
    }
    pairs
}

/// Pairs closer than this are one double root split by rounding.
const COALESCED_PAIR: f64 = 1e-5;

/// Root-MUSIC: the K roots of the noise-subspace polynomial lying inside the
/// unit circle with the largest modulus.
///
/// Roots are first paired with their conjugate reciprocals and each pair is
/// represented by its inner member, so a (near) double root on the unit
/// circle is selected once no matter which side rounding puts its copies.
/// The reported angle uses the argument of the pair's mean direction. A pair
/// that has coalesced to rounding level is a double root, which is a simple
/// root of the derivative, so it is refined by Newton steps on `P'`.
pub fn root_music(
    r: &HermitianCovariance,
    k: usize,
    geometry: &UlaGeometry,
) -> Result<DoaEstimate> {
    check_dims(r, k, geometry)?;
    let coeffs = root_music_polynomial(r, k)?;
    let roots = poly::roots(&coeffs)?;
    let closeness = |z: C64| {
        let m = z.norm();
        if m <= 1.0 {
            m
        } else {
            1.0 / m
        }
    };
    let mut pairs: Vec<(f64, C64, C64)> = reciprocal_pairs(&roots)
        .into_iter()
        .map(|(a, b)| {
            let inner = if a.norm() <= b.norm() { a } else { b };
            let direction = a / a.norm() + b / b.norm();
            (closeness(a).min(closeness(b)), inner, direction)
        })
        .filter(|(rho, _, _)| rho.is_finite() && *rho > 0.0)
        .collect();
    if pairs.len() < k {
        return Err(DoaError::Estimation(format!(
            "only {} of {k} required roots inside the unit circle",
            pairs.len()
        )));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.truncate(k);
    let dp = poly::derivative(&coeffs);
    for (_, inner, direction) in pairs.iter_mut() {
        let b = C64::new(1.0, 0.0) / inner.conj();
        if (*inner - b).norm() < COALESCED_PAIR && direction.norm() > 0.0 {
            let start = *direction / direction.norm();
            let z = poly::polish(&dp, start, 8);
            *inner = z;
            *direction = z;
        }
    }
    let mut warnings = Vec::new();
    let estimates = pairs
        .iter()
        .enumerate()
        .map(|(i, &(_, inner, direction))| {
            let mu = if direction.norm() > 0.0 {
                principal_arg(direction)
            } else {
                principal_arg(inner)
            };
            (electrical_to_degrees(mu, geometry, i, &mut warnings), inner)
        })
        .collect();
    Ok(DoaEstimate::new(estimates, warnings))
}
