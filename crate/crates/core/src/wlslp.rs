//! Weighted least-squares linear-prediction DOA estimator.
//!
//! Every column `u_k` of the complex signal subspace is a combination of
//! steering vectors, so it satisfies the K-tap recursion
//! `u[m] + c_1 u[m−1] + … + c_K u[m−K] = 0` whose characteristic polynomial
//! `z^K + c_1 z^{K−1} + … + c_K` has roots `exp(j 2π (d/λ) sin θ_k)`.
//! Stacking the recursions of all K columns gives the overdetermined system
//! `D c = f`, solved first by ordinary least squares and then by
//! reweighting with `W = I_K ⊗ (B B^H)^{−1}` until `c` settles.
//!
//! `W` whitens the equation error `e_k = B u_k`: if the subspace error is
//! white, `E{e_k e_k^H} ∝ B B^H`.

use std::f64::consts::PI;

use crate::array::{HermitianCovariance, UlaGeometry};
use crate::error::{DoaError, Result};
use crate::linalg::solve_hermitian;
use crate::poly;
use crate::subspace::{complexify_subspace, signal_subspace, ComplexSubspace};
use crate::unitary::{build_unitary_q, to_real_covariance};
use crate::warning::Warning;
use crate::{CMatrix, CVector, C64};

/// Overdetermined LP system `D c = f` built from K subspace columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSystem {
    design: CMatrix,
    target: CVector,
    sensor_count: usize,
    order: usize,
}

impl LpSystem {
    /// `D`, of size K(M−K)×K.
    pub fn design(&self) -> &CMatrix {
        &self.design
    }

    /// `f`, of length K(M−K).
    pub fn target(&self) -> &CVector {
        &self.target
    }

    pub fn sensor_count(&self) -> usize {
        self.sensor_count
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Equation error `e = D c − f`.
    pub fn residual(&self, c: &[C64]) -> CVector {
        &self.design * CVector::from_column_slice(c) - &self.target
    }
}

/// LP coefficients `c_1 … c_K` (`c_0 = 1` implicit) and solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LpCoefficients {
    coeffs: Vec<C64>,
    iterations_used: usize,
    final_residual: f64,
    warnings: Vec<Warning>,
}

impl LpCoefficients {
    /// Coefficients supplied directly rather than estimated.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(DoaError::Precondition("LP order must be at least 1".into()));
        }
        Ok(Self {
            coeffs,
            iterations_used: 0,
            final_residual: 0.0,
            warnings: Vec::new(),
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Number of solves performed, counting the unweighted one.
    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// `e^H W e` at the returned coefficients.
    pub fn final_residual(&self) -> f64 {
        self.final_residual
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }
}

/// Sorted angle estimates with the roots they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaEstimate {
    angles_deg: Vec<f64>,
    roots: Vec<C64>,
    warnings: Vec<Warning>,
}

impl DoaEstimate {
    pub(crate) fn new(pairs: Vec<(f64, C64)>, warnings: Vec<Warning>) -> Self {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (angles_deg, roots) = pairs.into_iter().unzip();
        Self {
            angles_deg,
            roots,
            warnings,
        }
    }

    /// Angles in degrees, ascending.
    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    /// Roots (or rotation eigenvalues) matching `angles_deg` element-wise.
    pub fn roots(&self) -> &[C64] {
        &self.roots
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub(crate) fn push_warnings(&mut self, extra: impl IntoIterator<Item = Warning>) {
        let mut extra: Vec<Warning> = extra.into_iter().collect();
        extra.append(&mut self.warnings);
        self.warnings = extra;
    }
}

/// Iteration controls for [`wls_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlsConfig {
    /// Reweighted solves after the unweighted one; 0 gives plain least squares.
    pub max_iter: usize,
    /// Relative change `‖c_new − c_old‖ ≤ tol ‖c_old‖` that ends the iteration.
    pub tol: f64,
}

impl Default for WlsConfig {
    fn default() -> Self {
        Self {
            max_iter: 10,
            tol: 1e-8,
        }
    }
}

impl WlsConfig {
    /// Ordinary least squares only.
    pub fn ordinary() -> Self {
        Self {
            max_iter: 0,
            ..Self::default()
        }
    }
}

/// (M−K)×M banded Toeplitz matrix with rows sliding `[c_K, …, c_1, 1]`.
pub fn build_toeplitz_b(c: &[C64], m: usize) -> Result<CMatrix> {
    let k = c.len();
    if k == 0 || k >= m {
        return Err(DoaError::Precondition(format!(
            "Toeplitz B needs 1 ≤ K < M (K = {k}, M = {m})"
        )));
    }
    let mut b = CMatrix::zeros(m - k, m);
    for r in 0..m - k {
        for i in 0..k {
            b[(r, r + i)] = c[k - 1 - i];
        }
        b[(r, r + k)] = C64::new(1.0, 0.0);
    }
    Ok(b)
}

/// Stacks `D_k`, `f_k` for every column `u_k` of the subspace.
///
/// Row `r` of `D_k` is `[u_k[K−1+r], …, u_k[r]]` and `f_k[r] = −u_k[K+r]`
/// (0-based), so that `B u_k = D_k c − f_k`.
pub fn build_lp_system(uc: &ComplexSubspace) -> LpSystem {
    let m = uc.sensor_count();
    let k = uc.rank();
    let rows = m - k;
    let mut design = CMatrix::zeros(k * rows, k);
    let mut target = CVector::zeros(k * rows);
    for (block, u) in uc.basis().column_iter().enumerate() {
        for r in 0..rows {
            let row = block * rows + r;
            for j in 0..k {
                design[(row, j)] = u[k - 1 + r - j];
            }
            target[row] = -u[k + r];
        }
    }
    LpSystem {
        design,
        target,
        sensor_count: m,
        order: k,
    }
}

/// `I_K ⊗ (B B^H)^{−1}`, or the identity when `B B^H` cannot be inverted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub data: CMatrix,
    pub warning: Option<Warning>,
}

/// Inverse of the (M−K)×(M−K) Gram matrix `B B^H`, if it is numerically invertible.
fn weight_block(c: &[C64], m: usize) -> Result<Option<CMatrix>> {
    let b = build_toeplitz_b(c, m)?;
    let gram = &b * b.adjoint();
    let n = gram.nrows();
    let inv = solve_hermitian(gram, &CMatrix::identity(n, n));
    Ok(inv.filter(|w| w.iter().all(|z| z.re.is_finite() && z.im.is_finite())))
}

/// Optimal block-diagonal weight for the stacked LP error.
pub fn optimal_weight(c: &[C64], m: usize) -> Result<WeightMatrix> {
    let k = c.len();
    let rows = m.saturating_sub(k);
    let block = weight_block(c, m)?;
    let (block, warning) = match block {
        Some(w) => (w, None),
        None => (CMatrix::identity(rows, rows), Some(Warning::SingularWeight)),
    };
    let mut data = CMatrix::zeros(k * rows, k * rows);
    for i in 0..k {
        data.view_mut((i * rows, i * rows), (rows, rows))
            .copy_from(&block);
    }
    Ok(WeightMatrix { data, warning })
}

/// Solves the weighted normal equations blockwise; `block = None` means `W = I`.
fn weighted_solve(system: &LpSystem, block: Option<&CMatrix>) -> Result<(Vec<C64>, f64)> {
    let k = system.order;
    let rows = system.sensor_count - k;
    let mut normal = CMatrix::zeros(k, k);
    let mut rhs = CVector::zeros(k);
    for i in 0..k {
        let d = system.design.rows(i * rows, rows);
        let f = system.target.rows(i * rows, rows);
        let (wd, wf) = match block {
            Some(w) => (w * d, w * f),
            None => (d.clone_owned(), f.clone_owned()),
        };
        normal += d.adjoint() * wd;
        rhs += d.adjoint() * wf;
    }
    let normal = (&normal + normal.adjoint()).map(|z| z * 0.5);
    let rhs = CMatrix::from_column_slice(k, 1, rhs.as_slice());
    let sol = solve_hermitian(normal, &rhs)
        .filter(|s| s.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| DoaError::Estimation("singular WLS normal equations".into()))?;
    let c: Vec<C64> = sol.iter().copied().collect();

    let e = system.residual(&c);
    let mut residual = 0.0;
    for i in 0..k {
        let ei = e.rows(i * rows, rows);
        residual += match block {
            Some(w) => (ei.adjoint() * w * ei)[(0, 0)].re,
            None => ei.norm_squared(),
        };
    }
    Ok((c, residual.max(0.0)))
}

fn check_full_rank(system: &LpSystem) -> Result<()> {
    let sv = system.design.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || !(min > max * 1e-12) {
        return Err(DoaError::Estimation(format!(
            "LP design matrix is rank deficient (σ_min/σ_max = {:.3e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    Ok(())
}

fn iterate(
    system: &LpSystem,
    mut c: Vec<C64>,
    mut residual: f64,
    mut iterations_used: usize,
    config: &WlsConfig,
) -> Result<LpCoefficients> {
    let mut warnings = Vec::new();
    let mut converged = config.max_iter == 0;
    for _ in 0..config.max_iter {
        let block = weight_block(&c, system.sensor_count)?;
        if block.is_none() && !warnings.contains(&Warning::SingularWeight) {
            warnings.push(Warning::SingularWeight);
        }
        let (next, r) = weighted_solve(system, block.as_ref())?;
        iterations_used += 1;
        let step = distance(&next, &c);
        let scale = norm(&c);
        c = next;
        residual = r;
        if step <= config.tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        warnings.push(Warning::NotConverged {
            iterations: iterations_used,
        });
    }
    Ok(LpCoefficients {
        coeffs: c,
        iterations_used,
        final_residual: residual,
        warnings,
    })
}

/// Iterated WLS: ordinary least squares, then up to `max_iter` solves with
/// `W` rebuilt from the previous coefficients.
pub fn wls_solve(system: &LpSystem, config: &WlsConfig) -> Result<LpCoefficients> {
    check_full_rank(system)?;
    let (c, residual) = weighted_solve(system, None)?;
    iterate(system, c, residual, 1, config)
}

/// Continues the WLS iteration from given coefficients instead of the
/// unweighted solution.
pub fn wls_refine(
    system: &LpSystem,
    start: &LpCoefficients,
    config: &WlsConfig,
) -> Result<LpCoefficients> {
    if start.order() != system.order {
        return Err(DoaError::Precondition(format!(
            "starting point has order {} but system has order {}",
            start.order(),
            system.order
        )));
    }
    check_full_rank(system)?;
    iterate(
        system,
        start.coeffs.clone(),
        start.final_residual,
        0,
        config,
    )
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Roots of `z^K + c_1 z^{K−1} + … + c_K`.
pub fn lp_roots(c: &[C64]) -> Result<Vec<C64>> {
    if c.is_empty() {
        return Err(DoaError::Precondition("LP order must be at least 1".into()));
    }
    let mut coeffs = Vec::with_capacity(c.len() + 1);
    coeffs.push(C64::new(1.0, 0.0));
    coeffs.extend_from_slice(c);
    poly::roots(&coeffs)
}

/// Principal argument in (−π, π].
pub(crate) fn principal_arg(z: C64) -> f64 {
    let mu = z.arg();
    if mu <= -PI {
        PI
    } else {
        mu
    }
}

/// Maps an electrical angle to degrees, clipping the arcsin argument.
pub(crate) fn electrical_to_degrees(
    mu: f64,
    geometry: &UlaGeometry,
    index: usize,
    warnings: &mut Vec<Warning>,
) -> f64 {
    let argument = mu / (2.0 * PI * geometry.spacing_ratio());
    let clipped = argument.clamp(-1.0, 1.0);
    if clipped != argument {
        warnings.push(Warning::ArcsinClipped { index, argument });
    }
    clipped.asin().to_degrees()
}

/// `θ_k = arcsin(arg(z_k) / (2π d/λ))`, sorted ascending. Root magnitude is ignored.
pub fn angles_from_roots(roots: &[C64], geometry: &UlaGeometry) -> DoaEstimate {
    let mut warnings = Vec::new();
    let pairs = roots
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            (
                electrical_to_degrees(principal_arg(z), geometry, i, &mut warnings),
                z,
            )
        })
        .collect();
    DoaEstimate::new(pairs, warnings)
}

/// Full pipeline: real covariance, real subspace, complex subspace, LP
/// system, iterated WLS, rooting and angle mapping.
pub fn estimate_doa_wlslp(
    r: &HermitianCovariance,
    k: usize,
    geometry: &UlaGeometry,
    config: &WlsConfig,
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
    let q = build_unitary_q(m)?;
    let c = to_real_covariance(r, &q)?;
    let us = signal_subspace(&c, k)?;
    let uc = complexify_subspace(&us, &q)?;
    let system = build_lp_system(&uc);
    let coeffs = wls_solve(&system, config)?;
    let roots = lp_roots(coeffs.coeffs())?;
    if roots.len() != k {
        return Err(DoaError::Estimation(format!(
            "expected {k} roots, found {}",
            roots.len()
        )));
    }
    let mut estimate = angles_from_roots(&roots, geometry);
    estimate.push_warnings(
        us.warnings()
            .iter()
            .cloned()
            .chain(coeffs.warnings().iter().cloned()),
    );
    Ok(estimate)
}
