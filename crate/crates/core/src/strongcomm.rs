//! Commutation and strong commutation of CP maps on `B(H)`, `dim H < ∞`.
//!
//! For Kraus families `{T_i}` (length `m`) and `{S_j}` (length `n`) of two
//! commuting maps, strong commutation is witnessed by an `mn × mn` unitary `u`
//! with
//!
//! ```text
//! T_i S_j = Σ_{(k,l)} u[(i,j),(k,l)] S_l T_k
//! ```
//!
//! Pair indices `(i, j)` are flattened as `i·n + j`. Such a `u` always exists
//! for commuting maps in finite dimensions: the two composite families are
//! Kraus presentations of one map.

use serde::Serialize;

use crate::chan::{compose, intertwining_residual, kraus_equivalence_unitary, KrausFamily};
use crate::error::{Error, Result};
use crate::linalg::{fro, unitarity_residual, CMatrix};

#[derive(Debug, Clone, Serialize)]
pub struct CommuteReport {
    pub commute: bool,
    /// `‖S(Φ)S(Ψ) − S(Ψ)S(Φ)‖_F` on superoperators
    pub residual: f64,
    pub tol: f64,
}

pub fn check_commute(phi: &KrausFamily, psi: &KrausFamily, tol: f64) -> Result<CommuteReport> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), found: psi.dim() });
    }
    let a = phi.to_superoperator();
    let b = psi.to_superoperator();
    let residual = fro(&(a.matrix() * b.matrix() - b.matrix() * a.matrix()));
    Ok(CommuteReport { commute: residual <= tol, residual, tol })
}

#[derive(Debug, Clone)]
pub struct StrongCommutationCertificate {
    /// Kraus length of `Θ`.
    pub m: usize,
    /// Kraus length of `Φ`.
    pub n: usize,
    pub u: CMatrix,
    pub unitarity_residual: f64,
    pub intertwining_residual: f64,
}

/// The composite families `{T_i S_j}` and `{S_l T_k}`, both indexed by
/// `(first, second) ↦ first·n + second` with the first index running over `Θ`.
pub fn composite_families(theta: &KrausFamily, phi: &KrausFamily) -> Result<(KrausFamily, KrausFamily)> {
    let forward = compose(theta, phi)?;
    let (m, n) = (theta.len(), phi.len());
    let mut ops = Vec::with_capacity(m * n);
    for k in 0..m {
        for l in 0..n {
            ops.push(&phi.ops()[l] * &theta.ops()[k]);
        }
    }
    let backward = KrausFamily::with_tol(ops, f64::INFINITY)?;
    Ok((forward, backward))
}

pub fn strong_commutation_certificate(
    theta: &KrausFamily,
    phi: &KrausFamily,
    tol: f64,
) -> Result<StrongCommutationCertificate> {
    let comm = check_commute(theta, phi, tol)?;
    if !comm.commute {
        return Err(Error::NotCommuting { residual: comm.residual });
    }
    let (forward, backward) = composite_families(theta, phi)?;
    let eq = kraus_equivalence_unitary(&forward, &backward, tol)?;
    Ok(StrongCommutationCertificate {
        m: theta.len(),
        n: phi.len(),
        u: eq.u,
        unitarity_residual: eq.unitarity_residual,
        intertwining_residual: eq.intertwining_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateCheck {
    pub unitarity_residual: f64,
    pub intertwining_residual: f64,
    pub pass: bool,
    pub tol: f64,
}

/// Recomputes both residuals from `Θ`, `Φ` and `u` alone.
pub fn verify_certificate(theta: &KrausFamily, phi: &KrausFamily, u: &CMatrix, tol: f64) -> Result<CertificateCheck> {
    let mn = theta.len() * phi.len();
    if u.nrows() != mn || u.ncols() != mn {
        return Err(Error::DimensionMismatch { expected: mn, found: u.nrows().max(u.ncols()) });
    }
    let (forward, backward) = composite_families(theta, phi)?;
    let unitarity = unitarity_residual(u);
    let intertwining = intertwining_residual(&forward, &backward, u);
    Ok(CertificateCheck {
        unitarity_residual: unitarity,
        intertwining_residual: intertwining,
        pass: unitarity <= tol && intertwining <= tol,
        tol,
    })
}

impl StrongCommutationCertificate {
    pub fn verify(&self, theta: &KrausFamily, phi: &KrausFamily, tol: f64) -> Result<CertificateCheck> {
        verify_certificate(theta, phi, &self.u, tol)
    }
}
