//! Signal subspace of the real covariance and its complex counterpart.

use nalgebra::SymmetricEigen;

use crate::error::{DoaError, Result};
use crate::unitary::{RealCovariance, UnitaryQ};
use crate::warning::Warning;
use crate::{CMatrix, RMatrix};

/// Gap below which the K-th and (K+1)-th singular values count as tied.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// Real signal subspace `U_s` (M×K) and the full singular spectrum of `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSubspace {
    basis: RMatrix,
    singular_values: Vec<f64>,
    warnings: Vec<Warning>,
}

impl RealSubspace {
    pub fn basis(&self) -> &RMatrix {
        &self.basis
    }

    /// All M singular values, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }
}

/// Complex subspace `U_c = Q U_s`; each column obeys the LP recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSubspace {
    basis: CMatrix,
}

impl ComplexSubspace {
    /// Wraps an M×K complex basis.
    pub fn from_basis(basis: CMatrix) -> Result<Self> {
        if basis.ncols() == 0 || basis.ncols() >= basis.nrows() {
            return Err(DoaError::Precondition(format!(
                "subspace of dimension {} in C^{} needs 1 ≤ K < M",
                basis.ncols(),
                basis.nrows()
            )));
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn sensor_count(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }
}

/// Dominant K-dimensional eigenspace of `C`, from a symmetric
/// eigendecomposition ordered by |eigenvalue|.
///
/// Each basis column is scaled so that its entry of largest magnitude is
/// positive (lowest index wins ties).
pub fn signal_subspace(c: &RealCovariance, k: usize) -> Result<RealSubspace> {
    let m = c.dim();
    if k == 0 || k >= m {
        return Err(DoaError::Precondition(format!(
            "subspace dimension must satisfy 1 ≤ K < M (K = {k}, M = {m})"
        )));
    }
    let eig = SymmetricEigen::new(c.data().clone());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .total_cmp(&eig.eigenvalues[a].abs())
            .then(a.cmp(&b))
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].abs()).collect();

    let mut basis = RMatrix::zeros(m, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let mut v = eig.eigenvectors.column(idx).clone_owned();
        let mut pivot = 0;
        for i in 1..m {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        basis.set_column(col, &v);
    }

    let mut warnings = Vec::new();
    let ratio = singular_values[k - 1] / singular_values[k];
    if ratio < 1.0 + DEGENERACY_GAP {
        warnings.push(Warning::DegenerateSpectrum { ratio });
    }
    Ok(RealSubspace {
        basis,
        singular_values,
        warnings,
    })
}

/// `U_c = Q U_s`.
pub fn complexify_subspace(us: &RealSubspace, q: &UnitaryQ) -> Result<ComplexSubspace> {
    if us.basis().nrows() != q.size() {
        return Err(DoaError::Precondition(format!(
            "subspace has {} rows but Q is {}×{}",
            us.basis().nrows(),
            q.size(),
            q.size()
        )));
    }
    let basis = q.data() * us.basis().map(|x| crate::C64::new(x, 0.0));
    ComplexSubspace::from_basis(basis)
}
