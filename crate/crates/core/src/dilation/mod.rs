//! Finite-horizon `E₀`-dilation of a strongly commuting CP pair.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`build_big_space`]: the truncated space `ℋ_N = ⊕_{t ≤ N} X(t) ⊗ H` with
//!    its commuting semigroup `T̂`, coisometric for unital inputs.
//! 2. [`build_dilation_space`]: `K` as the span of formal vectors `V̂_s(δ_s·ζ)`,
//!    realized by factoring their Gram matrix. Every inner product between
//!    such vectors reduces to `⟨T̂_{(s−u)₊} T̂_{(s−u)₋}* ζ, η⟩`, so no unitary
//!    extension of `T̂` is ever built.
//! 3. [`lift_operators`]: isometries `V_g(x)` on `K` and the endomorphisms
//!    `α_g`, exposed for `g` within the margin.
//! 4. [`verify_e_dilation`] and [`minimality_check`]: the dilation identities
//!    and the minimality diagnostics.
//!
//! [`run_pipeline`] chains all four.

mod lift;
mod minimal;
mod space;

pub use lift::{lift_operators, verify_e_dilation, Checked, DilationResiduals, EDilation, EDilationReport, PSD_FLOOR};
pub use minimal::{
    algebra_closure, commutant_dimension, cyclic_span, lifted_matrix_units, minimality_check, AlgebraClosure,
    ClosureStatus, MinimalityReport, CLOSURE_ITERATION_CAP, CLOSURE_MAX_DIM_K, COMMUTANT_UNKNOWN_CAP, SPAN_DEPTH_CAP,
};
pub use space::{
    assemble_gram, build_big_space, build_big_space_with_cap, build_dilation_space, BigSpace, Block, DilationSpace,
    GramSpectrum, HatSemigroup, DEFAULT_BIG_SPACE_CAP, GRAM_RANK_CUTOFF,
};

use serde::Serialize;

use crate::chan::KrausFamily;
use crate::error::Result;
use crate::prodsys::{build_product_system, GridPoint};
use crate::strongcomm::{strong_commutation_certificate, StrongCommutationCertificate};

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub horizon: GridPoint,
    pub margin: GridPoint,
    pub dim_k: usize,
    pub gram: GramSpectrum,
    pub gram_min_eig: Checked,
    pub hat_commutation: Checked,
    pub dilation: EDilationReport,
    pub minimality: MinimalityReport,
    pub pass: bool,
}

/// Certificate (computed unless supplied), product system, big space, `K`,
/// lifted operators, then every check. The dilation identities are tested for
/// `g ≤ margin`; minimality uses the whole horizon.
pub fn run_pipeline(
    theta: &KrausFamily,
    phi: &KrausFamily,
    certificate: Option<&StrongCommutationCertificate>,
    horizon: GridPoint,
    margin: GridPoint,
    tol: f64,
) -> Result<(EDilation, PipelineReport)> {
    let computed;
    let cert = match certificate {
        Some(c) => c,
        None => {
            computed = strong_commutation_certificate(theta, phi, tol)?;
            &computed
        }
    };
    let sys = build_product_system(theta, phi, cert, tol)?;
    let hat = build_big_space(&sys, horizon)?;
    let dsp = build_dilation_space(&hat, margin, tol)?;
    let res = lift_operators(&dsp)?;
    let dilation = verify_e_dilation(&res, theta, phi, margin, tol)?;
    let minimality = minimality_check(&res, horizon, tol)?;
    let gram = dsp.spectrum().clone();
    let gram_min_eig = Checked::floor(gram.min_eigenvalue, PSD_FLOOR);
    let hat_commutation = Checked::residual(hat.commutation_residual(), tol);
    let pass = gram_min_eig.pass && hat_commutation.pass && dilation.pass && minimality.pass;
    let report = PipelineReport {
        horizon,
        margin,
        dim_k: res.dim_k(),
        gram,
        gram_min_eig,
        hat_commutation,
        dilation,
        minimality,
        pass,
    };
    Ok((res, report))
}
