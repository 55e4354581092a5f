//! Minimality diagnostics: the cyclic span of the lifted copies of `B(H)`
//! applied to `ιH`, and the commutant of the algebra they generate.
//!
//! The lifted matrix units `α_g(ι e_ij ι*) = W_g (I ⊗ e_ij) W_g*`, with `W_g`
//! the level-`g` generators, only involve generators at level `g`, so they
//! are exact at every `g` up to the horizon, not just within the margin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, mul, mul_adj, range_basis, CMatrix, CVector};
use crate::prodsys::GridPoint;

use super::lift::EDilation;
use super::space::RANGE_TOL;

pub const SPAN_DEPTH_CAP: usize = 16;
pub const CLOSURE_ITERATION_CAP: usize = 8;
/// Algebra closure runs only when `dim K` is at most this; beyond it the
/// commutant is computed from the generators alone.
pub const CLOSURE_MAX_DIM_K: usize = 8;
/// Cap on the number of unknowns in the commutant system.
pub const COMMUTANT_UNKNOWN_CAP: usize = 2048;

const COMMUTANT_SEED: u64 = 0xc0de;
const CLUSTER_TOL: f64 = 1e-6;
const NULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureStatus {
    /// span stabilized within the iteration cap
    Closed,
    /// iteration cap reached first
    Inconclusive,
    /// `dim K` too large for the closure to be affordable
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraClosure {
    pub status: ClosureStatus,
    pub dim: Option<usize>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub grid_limit: GridPoint,
    pub generator_count: usize,
    pub span_dim: usize,
    /// `dim K_{grid_limit}`; equals `dim K` when `grid_limit` is the horizon
    pub span_target: usize,
    pub span_depth: usize,
    pub commutant_dim: usize,
    pub commutant_unknowns: usize,
    pub algebra: AlgebraClosure,
    pub pass: bool,
    pub tol: f64,
}

/// `α_g(ι e_ij ι*)` for all `g ≤ grid_limit` and matrix units `e_ij` of `H`.
pub fn lifted_matrix_units(res: &EDilation, grid_limit: GridPoint) -> Result<Vec<CMatrix>> {
    let space = res.space();
    if !grid_limit.le(space.horizon()) {
        return Err(Error::OutOfHorizon { point: grid_limit, limit: space.horizon() });
    }
    let n = space.big().dim_h();
    let mut out = Vec::new();
    for g in grid_limit.down_set() {
        let w = space.level_generators(g)?;
        let d = w.ncols() / n;
        // columns x·n + i for fixed i
        let slices: Vec<CMatrix> = (0..n).map(|i| CMatrix::from_fn(w.nrows(), d, |r, x| w[(r, x * n + i)])).collect();
        for ci in &slices {
            for cj in &slices {
                out.push(mul_adj(ci, cj));
            }
        }
    }
    Ok(out)
}

pub fn minimality_check(res: &EDilation, grid_limit: GridPoint, tol: f64) -> Result<MinimalityReport> {
    let space = res.space();
    let generators = lifted_matrix_units(res, grid_limit)?;
    let span_target = space.dim_up_to(grid_limit)?;
    let (span_dim, span_depth) = cyclic_span(&generators, space.embed_h());
    let (commutant_dim, commutant_unknowns) = commutant_dimension(&generators, res.dim_k())?;
    let algebra = if res.dim_k() <= CLOSURE_MAX_DIM_K {
        algebra_closure(&generators, tol)
    } else {
        AlgebraClosure { status: ClosureStatus::Skipped, dim: None, iterations: 0 }
    };
    let pass = span_dim == span_target && commutant_dim == 1 && algebra.status != ClosureStatus::Inconclusive;
    Ok(MinimalityReport {
        grid_limit,
        generator_count: generators.len(),
        span_dim,
        span_target,
        span_depth,
        commutant_dim,
        commutant_unknowns,
        algebra,
        pass,
        tol,
    })
}

/// Dimension of `span{A₁⋯A_r ι h}` over words of length `1 ≤ r ≤` the depth
/// cap, and the depth at which it stabilized.
pub fn cyclic_span(generators: &[CMatrix], embed: &CMatrix) -> (usize, usize) {
    let dim_k = embed.nrows();
    let mut basis = CMatrix::zeros(dim_k, 0);
    let mut frontier = embed.clone();
    let mut depth = 0;
    while depth < SPAN_DEPTH_CAP {
        let images: Vec<CMatrix> = generators.iter().map(|a| mul(a, &frontier)).collect();
        let total: usize = basis.ncols() + images.iter().map(|m| m.ncols()).sum::<usize>();
        let mut stacked = CMatrix::zeros(dim_k, total);
        stacked.columns_mut(0, basis.ncols()).copy_from(&basis);
        let mut at = basis.ncols();
        for m in &images {
            stacked.columns_mut(at, m.ncols()).copy_from(m);
            at += m.ncols();
        }
        let next = range_basis(&stacked, RANGE_TOL);
        depth += 1;
        if next.ncols() == basis.ncols() {
            return (basis.ncols(), depth - 1);
        }
        // new directions only
        let residual = &next - mul(&basis, &mul(&basis.adjoint(), &next));
        frontier = range_basis(&residual, RANGE_TOL);
        basis = next;
        if basis.ncols() == dim_k {
            return (dim_k, depth);
        }
    }
    (basis.ncols(), depth)
}

/// Dimension of `{Y : [Y, A] = 0 for all generators A}`.
///
/// A seeded random self-adjoint element `h` of the generated algebra is
/// diagonalized first; anything commuting with the algebra commutes with `h`
/// and is therefore block diagonal over its eigenvalue clusters. The
/// remaining unknowns enter `Σ_A ‖[Y, A]‖²`, a Hermitian form whose null
/// space is the commutant. Returns the dimension and the number of unknowns.
pub fn commutant_dimension(generators: &[CMatrix], dim_k: usize) -> Result<(usize, usize)> {
    if dim_k == 0 {
        return Ok((0, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(COMMUTANT_SEED);
    let mut h = CMatrix::zeros(dim_k, dim_k);
    for a in generators {
        let r: f64 = rng.random_range(-1.0..1.0);
        h += (a + a.adjoint()) * crate::linalg::re(r);
    }
    let (vals, q) = hermitian_eigen(&h);
    let spread = (vals[vals.len() - 1] - vals[0]).abs().max(1.0);
    let mut cluster = vec![0usize; dim_k];
    for i in 1..dim_k {
        cluster[i] = cluster[i - 1] + usize::from(vals[i] - vals[i - 1] > CLUSTER_TOL * spread);
    }
    let unknowns: Vec<(usize, usize)> =
        (0..dim_k).flat_map(|a| (0..dim_k).map(move |b| (a, b))).filter(|&(a, b)| cluster[a] == cluster[b]).collect();
    let nu = unknowns.len();
    if nu > COMMUTANT_UNKNOWN_CAP {
        return Err(Error::CapExceeded { what: "commutant unknowns", size: nu, cap: COMMUTANT_UNKNOWN_CAP });
    }

    let q_adj = q.adjoint();
    let rotated: Vec<CMatrix> = generators.iter().map(|a| mul(&mul(&q_adj, a), &q)).collect();
    let left: CMatrix = rotated.iter().map(|a| mul(&a.adjoint(), a)).sum();
    let right: CMatrix = rotated.iter().map(|a| mul_adj(a, a)).sum();
    let mut form = CMatrix::zeros(nu, nu);
    for (p, &(a, b)) in unknowns.iter().enumerate() {
        for (r, &(c, d)) in unknowns.iter().enumerate() {
            let mut v = crate::linalg::re(0.0);
            if b == d {
                v += left[(a, c)];
            }
            if a == c {
                v += right[(d, b)];
            }
            for m in &rotated {
                v -= m[(c, a)].conj() * m[(d, b)] + m[(a, c)] * m[(b, d)].conj();
            }
            form[(p, r)] = v;
        }
    }
    let (evals, _) = hermitian_eigen(&form);
    let top = evals.last().copied().unwrap_or(0.0).max(1.0);
    let nullity = evals.iter().filter(|&&e| e <= NULL_TOL * top).count();
    Ok((nullity, nu))
}

/// Linear span of all words in the generators, grown by right
/// multiplication until it stops growing. The generating set is closed
/// under adjoints, so the span is the generated `*`-algebra.
pub fn algebra_closure(generators: &[CMatrix], tol: f64) -> AlgebraClosure {
    let mut basis: Vec<CVector> = Vec::new();
    let mut members: Vec<CMatrix> = Vec::new();
    let push = |m: &CMatrix, basis: &mut Vec<CVector>| -> bool {
        let mut v = CVector::from_column_slice(m.as_slice());
        let scale = v.norm();
        if scale == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let nrm = v.norm();
        if nrm <= tol.max(RANGE_TOL) * scale {
            return false;
        }
        basis.push(v / crate::linalg::re(nrm));
        true
    };
    for g in generators {
        if push(g, &mut basis) {
            members.push(g.clone());
        }
    }
    let mut frontier = members.clone();
    for iteration in 1..=CLOSURE_ITERATION_CAP {
        let mut fresh = Vec::new();
        for m in &frontier {
            for g in generators {
                let prod = m * g;
                if push(&prod, &mut basis) {
                    fresh.push(prod);
                }
            }
        }
        if fresh.is_empty() {
            return AlgebraClosure { status: ClosureStatus::Closed, dim: Some(basis.len()), iterations: iteration };
        }
        frontier = fresh;
    }
    AlgebraClosure { status: ClosureStatus::Inconclusive, dim: Some(basis.len()), iterations: CLOSURE_ITERATION_CAP }
}
