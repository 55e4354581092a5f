//! Stochastic matrices as unital CP maps on the diagonal algebra `ℂⁿ`.
//!
//! Two stochastic matrices `P`, `Q` commute strongly iff they commute and,
//! for every pair `(i, k)`,
//!
//! ```text
//! |{j : q_kj p_ji ≠ 0}| = |{j : p_kj q_ji ≠ 0}|
//! ```
//!
//! When the counts agree, an intertwiner is assembled block by block: on each
//! `(i, k)` block it rotates the distinguished vector `Σ_j e_i ⊗ e_j ⊗ e_k`
//! onto its counterpart and fixes the orthogonal complement of their plane.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;

pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// A nonnegative square matrix with unit row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(RealMatrix);

impl StochasticMatrix {
    pub fn new(p: RealMatrix, tol: f64) -> Result<Self> {
        if validate(&p, tol)? {
            Ok(Self(p))
        } else {
            let worst = (0..p.nrows()).map(|i| (p.row(i).sum() - 1.0).abs()).fold(0.0, f64::max);
            Err(Error::invalid(format!("row sums deviate from 1 by up to {worst:.3e}")))
        }
    }

    pub fn from_rows(rows: &[&[f64]], tol: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("stochastic matrix must be square"));
        }
        Self::new(RealMatrix::from_fn(n, n, |i, j| rows[i][j]), tol)
    }

    pub fn identity(n: usize) -> Self {
        Self(RealMatrix::identity(n, n))
    }

    /// `(1/n) J_n`
    pub fn uniform(n: usize) -> Self {
        Self(RealMatrix::from_element(n, n, 1.0 / n as f64))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn into_inner(self) -> RealMatrix {
        self.0
    }
}

/// Row sums within `tol` of one; negative entries are an error.
pub fn validate(p: &RealMatrix, tol: f64) -> Result<bool> {
    if p.nrows() != p.ncols() || p.nrows() == 0 {
        return Err(Error::invalid("stochastic matrix must be square and nonempty"));
    }
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let v = p[(i, j)];
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite entry at ({i}, {j})")));
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row: i, col: j, value: v });
            }
        }
    }
    Ok((0..p.nrows()).all(|i| (p.row(i).sum() - 1.0).abs() <= tol))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardWitness {
    pub i: usize,
    pub k: usize,
    /// `|{j : q_kj p_ji ≠ 0}|`
    pub count_qp: usize,
    /// `|{j : p_kj q_ji ≠ 0}|`
    pub count_pq: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CardReport {
    pub holds: bool,
    pub witnesses: Vec<CardWitness>,
    /// Entries of `P` or `Q` that are nonzero but within `10 · zero_tol`;
    /// the counts are sensitive to these.
    pub borderline_entries: Vec<BorderlineEntry>,
    pub zero_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BorderlineEntry {
    pub matrix: char,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

fn same_size(p: &StochasticMatrix, q: &StochasticMatrix) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: q.n() });
    }
    Ok(())
}

#[inline]
fn nonzero(x: f64, zero_tol: f64) -> bool {
    x > zero_tol
}

/// Support counts for the `(i, k)` block: `(|{j : q_kj p_ji ≠ 0}|, |{j : p_kj q_ji ≠ 0}|)`.
pub fn card_counts(p: &RealMatrix, q: &RealMatrix, i: usize, k: usize, zero_tol: f64) -> (usize, usize) {
    let n = p.nrows();
    let qp = (0..n).filter(|&j| nonzero(q[(k, j)], zero_tol) && nonzero(p[(j, i)], zero_tol)).count();
    let pq = (0..n).filter(|&j| nonzero(p[(k, j)], zero_tol) && nonzero(q[(j, i)], zero_tol)).count();
    (qp, pq)
}

pub fn card_criterion(p: &StochasticMatrix, q: &StochasticMatrix, zero_tol: f64) -> Result<CardReport> {
    same_size(p, q)?;
    let n = p.n();
    let mut witnesses = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let (count_qp, count_pq) = card_counts(p.matrix(), q.matrix(), i, k, zero_tol);
            if count_qp != count_pq {
                witnesses.push(CardWitness { i, k, count_qp, count_pq });
            }
        }
    }
    let mut borderline_entries = Vec::new();
    for (name, m) in [('P', p.matrix()), ('Q', q.matrix())] {
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v > 0.0 && v <= 10.0 * zero_tol {
                    borderline_entries.push(BorderlineEntry { matrix: name, row: i, col: j, value: v });
                }
            }
        }
    }
    Ok(CardReport { holds: witnesses.is_empty(), witnesses, borderline_entries, zero_tol })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalStrongCommutation {
    pub strongly_commute: bool,
    pub commute: bool,
    /// `‖PQ − QP‖_F`
    pub commutation_residual: f64,
    pub card: CardReport,
    pub tol: f64,
}

pub fn strongly_commute_diagonal(
    p: &StochasticMatrix,
    q: &StochasticMatrix,
    tol: f64,
    zero_tol: f64,
) -> Result<DiagonalStrongCommutation> {
    same_size(p, q)?;
    let (pm, qm) = (p.matrix(), q.matrix());
    let commutation_residual = (pm * qm - qm * pm).norm();
    let commute = commutation_residual <= tol;
    let card = card_criterion(p, q, zero_tol)?;
    Ok(DiagonalStrongCommutation { strongly_commute: commute && card.holds, commute, commutation_residual, card, tol })
}

/// `e^{−t} e^{tP} = e^{t(P − I)}`.
///
/// Scaling and squaring: the argument is halved until its ∞-norm is at most
/// 1/2, the Taylor series is summed until terms drop below machine epsilon,
/// and the result is squared back.
pub fn semigroup_at(p: &StochasticMatrix, t: f64) -> Result<StochasticMatrix> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let n = p.n();
    let a = (p.matrix() - RealMatrix::identity(n, n)) * t;
    Ok(StochasticMatrix(expm(&a)))
}

fn inf_norm(a: &RealMatrix) -> f64 {
    (0..a.nrows()).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub(crate) fn expm(a: &RealMatrix) -> RealMatrix {
    let n = a.nrows();
    let norm = inf_norm(a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * scale;
    let mut term = RealMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..64 {
        term = &term * &x / k as f64;
        sum += &term;
        if inf_norm(&term) <= f64::EPSILON * inf_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Strong connectivity of the digraph with an edge `i → j` iff `p_ij > zero_tol`.
pub fn is_irreducible(p: &StochasticMatrix, zero_tol: f64) -> bool {
    let m = p.matrix();
    let n = p.n();
    let reach_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let x = if forward { m[(v, w)] } else { m[(w, v)] };
                if !seen[w] && nonzero(x, zero_tol) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach_all(true) && reach_all(false)
}

/// One `(i, k)` block of the diagonal intertwiner.
#[derive(Debug, Clone)]
pub struct IntertwinerBlock {
    pub i: usize,
    pub k: usize,
    /// `{j : q_kj p_ji ≠ 0}` in increasing order; coordinates of the domain.
    pub domain: Vec<usize>,
    /// `{j : p_kj q_ji ≠ 0}` in increasing order; coordinates of the codomain.
    pub codomain: Vec<usize>,
    /// `|codomain| × |domain|` real orthogonal matrix in the normalized bases.
    pub unitary: RealMatrix,
    /// Distinguished vector `Σ_j e_i ⊗ e_j ⊗ e_k` in normalized coordinates.
    pub source: Vec<f64>,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DiagonalIntertwiner {
    pub blocks: Vec<IntertwinerBlock>,
    /// `max ‖U_b U_bᵀ − I‖_F` over blocks.
    pub unitarity_residual: f64,
    /// `max ‖U_b v_b − w_b‖` over blocks.
    pub intertwining_residual: f64,
}

/// Rotation in the plane of unit vectors `a`, `b` taking `a` to `b` and
/// fixing the orthogonal complement; requires `a · b > −1`.
fn plane_rotation(a: &[f64], b: &[f64]) -> RealMatrix {
    let d = a.len();
    let av = nalgebra::DVector::from_column_slice(a);
    let bv = nalgebra::DVector::from_column_slice(b);
    let cos = av.dot(&bv);
    let k = &bv * av.transpose() - &av * bv.transpose();
    RealMatrix::identity(d, d) + &k + (&k * &k) / (1.0 + cos)
}

pub fn build_diagonal_intertwiner(
    p: &StochasticMatrix,
    q: &StochasticMatrix,
    tol: f64,
    zero_tol: f64,
) -> Result<DiagonalIntertwiner> {
    let sc = strongly_commute_diagonal(p, q, tol, zero_tol)?;
    if !sc.card.holds {
        return Err(Error::NoIntertwiner { witnesses: sc.card.witnesses.iter().map(|w| (w.i, w.k)).collect() });
    }
    if !sc.commute {
        return Err(Error::NotCommuting { residual: sc.commutation_residual });
    }
    let (pm, qm) = (p.matrix(), q.matrix());
    let n = p.n();
    let mut blocks = Vec::with_capacity(n * n);
    let mut unitarity_residual: f64 = 0.0;
    let mut intertwining_residual: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let domain: Vec<usize> =
                (0..n).filter(|&j| nonzero(qm[(k, j)], zero_tol) && nonzero(pm[(j, i)], zero_tol)).collect();
            let codomain: Vec<usize> =
                (0..n).filter(|&j| nonzero(pm[(k, j)], zero_tol) && nonzero(qm[(j, i)], zero_tol)).collect();
            // ‖e_i ⊗ e_j ⊗ e_k‖² = q_kj p_ji, so the coefficient of the
            // distinguished vector on the normalized basis is √(q_kj p_ji)
            let source: Vec<f64> = domain.iter().map(|&j| (qm[(k, j)] * pm[(j, i)]).sqrt()).collect();
            let target: Vec<f64> = codomain.iter().map(|&j| (pm[(k, j)] * qm[(j, i)]).sqrt()).collect();
            let d = domain.len();
            let ns = source.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nt = target.iter().map(|x| x * x).sum::<f64>().sqrt();
            let unitary = if d == 0 {
                RealMatrix::zeros(0, 0)
            } else {
                let a: Vec<f64> = source.iter().map(|x| x / ns).collect();
                let b: Vec<f64> = target.iter().map(|x| x / nt).collect();
                plane_rotation(&a, &b)
            };
            if d > 0 {
                let u_res = (&unitary * unitary.transpose() - RealMatrix::identity(d, d)).norm();
                let mapped = &unitary * nalgebra::DVector::from_column_slice(&source);
                let i_res = (mapped - nalgebra::DVector::from_column_slice(&target)).norm();
                unitarity_residual = unitarity_residual.max(u_res);
                intertwining_residual = intertwining_residual.max(i_res);
            }
            blocks.push(IntertwinerBlock { i, k, domain, codomain, unitary, source, target });
        }
    }
    Ok(DiagonalIntertwiner { blocks, unitarity_residual, intertwining_residual })
}

/// The 3 × 3 pair that commutes but violates the cardinality criterion.
pub fn counterexample_pair() -> (StochasticMatrix, StochasticMatrix) {
    let p = StochasticMatrix::uniform(3);
    let q = StochasticMatrix::from_rows(&[&[0.5, 0.0, 0.5], &[0.25, 0.5, 0.25], &[0.25, 0.5, 0.25]], 1e-12)
        .expect("rows sum to one");
    (p, q)
}
