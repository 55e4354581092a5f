//! Completely positive maps on `M_n(ℂ)`: Kraus families, Choi matrices and
//! superoperators.
//!
//! A [`KrausFamily`] `{T_i}` presents the map `a ↦ Σ_i T_i a T_i*`. It is the
//! canonical form used by the rest of the crate; the Choi matrix
//! `Σ_i vec(T_i) vec(T_i)*` and the superoperator `Σ_i conj(T_i) ⊗ T_i`
//! (acting on column-stacked matrices) are derived from it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    complete_to_unitary, fro, hermitian_eigen, identity, is_finite, max_eigenvalue, min_eigenvalue, re,
    unitarity_residual, unvec, vec_col, CMatrix, CVector, DEFAULT_TOL,
};

/// An ordered list of `n × n` operators whose Kraus sum is contractive.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausFamily {
    /// Validates shapes, finiteness and `Σ T_i T_i* ⪯ I` within [`DEFAULT_TOL`].
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        Self::with_tol(ops, DEFAULT_TOL)
    }

    pub fn with_tol(ops: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let family = Self::unchecked(ops)?;
        let lmax = max_eigenvalue(&family.kraus_sum());
        if lmax > 1.0 + tol {
            return Err(Error::NotContractive { max_eigenvalue: lmax });
        }
        Ok(family)
    }

    /// Shape and finiteness checks only.
    fn unchecked(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::invalid("Kraus family must be nonempty"))?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::invalid("Kraus operators must be at least 1×1"));
        }
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: op.nrows().max(op.ncols()) });
            }
            if !is_finite(op) {
                return Err(Error::invalid("Kraus operator has non-finite entries"));
            }
        }
        Ok(Self { dim, ops })
    }

    /// The identity channel on `M_n`.
    pub fn identity(n: usize) -> Self {
        Self { dim: n, ops: vec![identity(n)] }
    }

    /// Conjugation `a ↦ u a u*` by a contraction `u`.
    pub fn conjugation(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<CMatrix> {
        self.ops
    }

    /// `Σ_i T_i T_i*`, the image of the identity.
    pub fn kraus_sum(&self) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(self.dim, self.dim), |acc, t| acc + t * t.adjoint())
    }

    /// Appends zero operators up to length `len`; the map is unchanged.
    pub fn padded(&self, len: usize) -> Self {
        let mut ops = self.ops.clone();
        while ops.len() < len {
            ops.push(CMatrix::zeros(self.dim, self.dim));
        }
        Self { dim: self.dim, ops }
    }

    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        apply(self, a)
    }

    /// Applies the map `k` times.
    pub fn apply_power(&self, a: &CMatrix, k: usize) -> Result<CMatrix> {
        let mut x = a.clone();
        for _ in 0..k {
            x = apply(self, &x)?;
        }
        Ok(x)
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        kraus_to_choi(self)
    }

    pub fn to_superoperator(&self) -> Superoperator {
        Superoperator::from_kraus(self)
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        fro(&(self.kraus_sum() - identity(self.dim))) <= tol
    }
}

/// `n² × n²` Choi matrix `Σ_i vec(T_i) vec(T_i)*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if dim == 0 || matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::DimensionMismatch { expected: d2, found: matrix.nrows() });
        }
        if !is_finite(&matrix) {
            return Err(Error::invalid("Choi matrix has non-finite entries"));
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hermiticity_residual(&self) -> f64 {
        fro(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn to_kraus(&self, tol: f64) -> Result<KrausFamily> {
        choi_to_kraus(self, tol)
    }
}

/// `n² × n²` matrix acting on column-stacked `n × n` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_kraus(k: &KrausFamily) -> Self {
        let d2 = k.dim * k.dim;
        let matrix = k.ops.iter().fold(CMatrix::zeros(d2, d2), |acc, t| acc + t.map(|z| z.conj()).kronecker(t));
        Self { dim: k.dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        check_square(a, self.dim)?;
        Ok(unvec(&(&self.matrix * vec_col(a)), self.dim))
    }

    /// Superoperator of `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Superoperator { dim: self.dim, matrix: &self.matrix * &other.matrix })
    }
}

/// Structural summary of a CP map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub is_cp: bool,
    pub is_unital: bool,
    pub is_contractive: bool,
    pub min_choi_eigenvalue: f64,
    /// `‖Θ(I) − I‖_F`
    pub unitality_residual: f64,
    pub max_kraus_sum_eigenvalue: f64,
    pub kraus_len: usize,
    pub tol: f64,
}

fn check_square(a: &CMatrix, n: usize) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if a.nrows() != n { a.nrows() } else { a.ncols() },
        });
    }
    Ok(())
}

pub fn kraus_to_choi(k: &KrausFamily) -> ChoiMatrix {
    let d2 = k.dim * k.dim;
    let matrix = k.ops.iter().fold(CMatrix::zeros(d2, d2), |acc, t| {
        let v = vec_col(t);
        acc + &v * v.adjoint()
    });
    ChoiMatrix { dim: k.dim, matrix }
}

/// Kraus operators `unvec(√λ_i v_i)` from the eigenpairs with `λ_i > tol`,
/// largest eigenvalue first.
pub fn choi_to_kraus(choi: &ChoiMatrix, tol: f64) -> Result<KrausFamily> {
    let herm = choi.hermiticity_residual();
    if herm > tol {
        return Err(Error::invalid(format!("Choi matrix is not Hermitian (residual {herm:.3e})")));
    }
    let (vals, vecs) = hermitian_eigen(&choi.matrix);
    if let Some(&lo) = vals.first() {
        if lo < -tol {
            return Err(Error::NotCompletelyPositive { eigenvalue: lo, tol });
        }
    }
    let ops: Vec<CMatrix> = (0..vals.len())
        .rev()
        .filter(|&i| vals[i] > tol)
        .map(|i| {
            let v: CVector = vecs.column(i).into_owned() * re(vals[i].sqrt());
            unvec(&v, choi.dim)
        })
        .collect();
    if ops.is_empty() {
        // the zero map
        return KrausFamily::new(vec![CMatrix::zeros(choi.dim, choi.dim)]);
    }
    KrausFamily::new(ops)
}

pub fn classify(k: &KrausFamily, tol: f64) -> ChannelReport {
    let min_choi = kraus_to_choi(k).min_eigenvalue();
    let sum = k.kraus_sum();
    let unitality_residual = fro(&(&sum - identity(k.dim)));
    let lmax = max_eigenvalue(&sum);
    ChannelReport {
        is_cp: min_choi >= -tol,
        is_unital: unitality_residual <= tol,
        is_contractive: lmax <= 1.0 + tol,
        min_choi_eigenvalue: min_choi,
        unitality_residual,
        max_kraus_sum_eigenvalue: lmax,
        kraus_len: k.len(),
        tol,
    }
}

/// Structural summary read directly off a Choi matrix, so maps that fail
/// complete positivity or contractivity can still be reported.
pub fn classify_choi(choi: &ChoiMatrix, tol: f64) -> ChannelReport {
    let n = choi.dim;
    let (vals, _) = hermitian_eigen(&choi.matrix);
    let min_choi = vals.first().copied().unwrap_or(0.0);
    // Θ(I)[r, s] = Σ_i Choi[(r + n i), (s + n i)]
    let image_of_identity = CMatrix::from_fn(n, n, |r, s| (0..n).map(|i| choi.matrix[(r + n * i, s + n * i)]).sum());
    let unitality_residual = fro(&(&image_of_identity - identity(n)));
    let lmax = max_eigenvalue(&image_of_identity);
    ChannelReport {
        is_cp: min_choi >= -tol,
        is_unital: unitality_residual <= tol,
        is_contractive: lmax <= 1.0 + tol,
        min_choi_eigenvalue: min_choi,
        unitality_residual,
        max_kraus_sum_eigenvalue: lmax,
        kraus_len: vals.iter().filter(|&&v| v > tol).count(),
        tol,
    }
}

/// Kraus family of `Φ ∘ Ψ`: all products `T_i S_j` in lexicographic `(i, j)` order.
pub fn compose(phi: &KrausFamily, psi: &KrausFamily) -> Result<KrausFamily> {
    if phi.dim != psi.dim {
        return Err(Error::DimensionMismatch { expected: phi.dim, found: psi.dim });
    }
    let ops = phi.ops.iter().flat_map(|t| psi.ops.iter().map(move |s| t * s)).collect();
    // contractivity is inherited from the factors
    Ok(KrausFamily { dim: phi.dim, ops })
}

pub fn apply(k: &KrausFamily, a: &CMatrix) -> Result<CMatrix> {
    check_square(a, k.dim)?;
    Ok(k.ops.iter().fold(CMatrix::zeros(k.dim, k.dim), |acc, t| acc + t * a * t.adjoint()))
}

/// A unitary relating two Kraus presentations of one map.
#[derive(Debug, Clone)]
pub struct KrausEquivalence {
    /// `L × L`, with `A_i = Σ_j u_ij B_j` after zero padding to length `L`.
    pub u: CMatrix,
    pub unitarity_residual: f64,
    /// `max_i ‖A_i − Σ_j u_ij B_j‖_F`
    pub intertwining_residual: f64,
    /// Rank of the shared Choi matrix.
    pub rank: usize,
}

/// Finds `u` with `A_i = Σ_j u_ij B_j` for two Kraus families of one map.
///
/// Both families are written as `n² × L` matrices of vectorized operators.
/// Against the eigenbasis `W Λ W*` of the shared Choi matrix each becomes
/// `W Λ^{1/2} X` with `X` having orthonormal rows; completing the rows of
/// `X_A` and `X_B` to unitaries `U_A`, `U_B` gives `uᵀ = U_B* U_A`.
pub fn kraus_equivalence_unitary(a: &KrausFamily, b: &KrausFamily, tol: f64) -> Result<KrausEquivalence> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    let len = a.len().max(b.len());
    let a = a.padded(len);
    let b = b.padded(len);
    let stack = |k: &KrausFamily| {
        let cols: Vec<CVector> = k.ops.iter().map(vec_col).collect();
        CMatrix::from_columns(&cols)
    };
    let a_hat = stack(&a);
    let b_hat = stack(&b);
    let choi_a = &a_hat * a_hat.adjoint();
    let choi_b = &b_hat * b_hat.adjoint();
    let mismatch = fro(&(&choi_a - &choi_b));
    if mismatch > tol {
        return Err(Error::NotSameChannel { residual: mismatch });
    }

    let (vals, vecs) = hermitian_eigen(&(choi_a + choi_b).scale(0.5));
    let top = vals.last().copied().unwrap_or(0.0);
    let cut = 1e-12 * top.max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > cut).collect();
    let rank = keep.len();

    // rows of X = Λ^{-1/2} W* Â, returned as the columns of X*
    let coords = |hat: &CMatrix| {
        let mut x_adj = CMatrix::zeros(len, rank);
        for (k, &i) in keep.iter().enumerate() {
            let w = vecs.column(i);
            let row = w.adjoint() * hat; // 1 × L
            x_adj.set_column(k, &(row.adjoint() * re(1.0 / vals[i].sqrt())));
        }
        complete_to_unitary(&orthonormalize(&x_adj))
    };
    // U_A = coords(Â)*, U_B = coords(B̂)*, so uᵀ = U_B* U_A = coords(B̂) coords(Â)*
    let ua_adj = coords(&a_hat);
    let ub_adj = coords(&b_hat);
    let u = (&ub_adj * ua_adj.adjoint()).transpose();

    let unitarity = unitarity_residual(&u);
    let intertwining = intertwining_residual(&a, &b, &u);
    if unitarity > tol || intertwining > tol {
        return Err(Error::CertificateFailure { unitarity, intertwining });
    }
    Ok(KrausEquivalence { u, unitarity_residual: unitarity, intertwining_residual: intertwining, rank })
}

/// `max_i ‖A_i − Σ_j u_ij B_j‖_F`; families must already share a length.
pub fn intertwining_residual(a: &KrausFamily, b: &KrausFamily, u: &CMatrix) -> f64 {
    (0..a.len())
        .map(|i| {
            let mix = (0..b.len()).fold(CMatrix::zeros(a.dim, a.dim), |acc, j| acc + &b.ops[j] * u[(i, j)]);
            fro(&(&a.ops[i] - mix))
        })
        .fold(0.0, f64::max)
}

// Modified Gram–Schmidt on columns; removes the O(ε/λ) drift left by the
// Choi eigensolve before the columns are completed.
fn orthonormalize(cols: &CMatrix) -> CMatrix {
    let mut out = cols.clone();
    for k in 0..out.ncols() {
        let mut v = out.column(k).into_owned();
        for j in 0..k {
            let q = out.column(j).into_owned();
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        let nrm = v.norm();
        out.set_column(k, &(v / re(nrm)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choi_classification_matches_kraus() {
        let k = crate::families::reset_map();
        let a = classify(&k, DEFAULT_TOL);
        let b = classify_choi(&k.to_choi(), DEFAULT_TOL);
        assert_eq!(
            (a.is_cp, a.is_unital, a.is_contractive, a.kraus_len),
            (b.is_cp, b.is_unital, b.is_contractive, b.kraus_len)
        );
        assert!((a.min_choi_eigenvalue - b.min_choi_eigenvalue).abs() < 1e-12);
        assert!((a.unitality_residual - b.unitality_residual).abs() < 1e-12);

        // transpose map: Choi is the swap, eigenvalue −1
        let swap = ChoiMatrix::new(
            2,
            CMatrix::from_fn(4, 4, |r, c| {
                let (i, j) = (r % 2, r / 2);
                if c == j + 2 * i {
                    re(1.0)
                } else {
                    re(0.0)
                }
            }),
        )
        .unwrap();
        let t = classify_choi(&swap, DEFAULT_TOL);
        assert!(!t.is_cp && (t.min_choi_eigenvalue + 1.0).abs() < 1e-12 && t.is_unital);
    }

    use crate::families::{hadamard, pauli_x, pauli_z};
    use crate::linalg::{c, matrix_unit};

    fn e00() -> CMatrix {
        matrix_unit(2, 0, 0)
    }
    fn e10() -> CMatrix {
        matrix_unit(2, 1, 0)
    }

    #[test]
    fn identity_choi_is_rank_one_trace_two() {
        let choi = kraus_to_choi(&KrausFamily::identity(2));
        let v = vec_col(&identity(2));
        assert!(fro(&(choi.matrix() - &v * v.adjoint())) < 1e-15);
        assert!((choi.matrix().trace() - re(2.0)).norm() < 1e-15);
    }

    #[test]
    fn reset_map_choi_matches_action_on_units() {
        // a ↦ a00 · I
        let k = KrausFamily::new(vec![e00(), e10()]).unwrap();
        let choi = kraus_to_choi(&k);
        // brute force: Choi[(r + n i), (s + n j)] = Θ(e_ij)[(r, s)]
        let n = 2;
        let mut brute = CMatrix::zeros(4, 4);
        for i in 0..n {
            for j in 0..n {
                let img = apply(&k, &matrix_unit(n, i, j)).unwrap();
                let expected = if i == 0 && j == 0 { identity(2) } else { CMatrix::zeros(2, 2) };
                assert!(fro(&(&img - expected)) < 1e-15);
                for r in 0..n {
                    for s in 0..n {
                        brute[(r + n * i, s + n * j)] = img[(r, s)];
                    }
                }
            }
        }
        assert!(fro(&(choi.matrix() - brute)) < 1e-15);
    }

    #[test]
    fn pauli_mix_choi_eigenvalues() {
        let s = 1.0 / 2f64.sqrt();
        let k = KrausFamily::new(vec![pauli_x() * re(s), pauli_z() * re(s)]).unwrap();
        let (vals, _) = hermitian_eigen(kraus_to_choi(&k).matrix());
        let expect = [0.0, 0.0, 1.0, 1.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14, "{vals:?}");
        }
    }

    #[test]
    fn choi_round_trip_identity() {
        let k = choi_to_kraus(&kraus_to_choi(&KrausFamily::identity(2)), DEFAULT_TOL).unwrap();
        assert_eq!(k.len(), 1);
        let t = &k.ops()[0];
        let phase = t[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(fro(&(t - identity(2) * phase)) < 1e-12);
    }

    #[test]
    fn maximally_mixed_choi_gives_trace_map() {
        let choi = ChoiMatrix::new(2, identity(4).scale(0.5)).unwrap();
        let k = choi_to_kraus(&choi, DEFAULT_TOL).unwrap();
        assert_eq!(k.len(), 4);
        for i in 0..2 {
            for j in 0..2 {
                let a = matrix_unit(2, i, j);
                let expected = identity(2) * (a.trace() * re(0.5));
                assert!(fro(&(apply(&k, &a).unwrap() - expected)) < 1e-12);
            }
        }
        // each operator is a scaled matrix unit up to a unitary mix: Σ |T|² entries = 1/2 each
        for t in k.ops() {
            assert!((t.norm_squared() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_choi_is_rejected() {
        let mut m = identity(4).scale(0.25);
        m[(3, 3)] = re(-0.1);
        let err = choi_to_kraus(&ChoiMatrix::new(2, m).unwrap(), DEFAULT_TOL).unwrap_err();
        match err {
            Error::NotCompletelyPositive { eigenvalue, .. } => assert!((eigenvalue + 0.1).abs() < 1e-12),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify(&KrausFamily::identity(2), DEFAULT_TOL);
        assert!(r.is_cp && r.is_unital && r.is_contractive);

        let r = classify(&KrausFamily::new(vec![e00(), e10()]).unwrap(), DEFAULT_TOL);
        assert!(r.is_unital && r.unitality_residual < 1e-15);

        let r = classify(&KrausFamily::new(vec![identity(2).scale(0.5)]).unwrap(), DEFAULT_TOL);
        assert!(r.is_contractive && !r.is_unital && r.is_cp);
        assert!((r.max_kraus_sum_eigenvalue - 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_contractive_family_rejected() {
        assert!(matches!(KrausFamily::new(vec![identity(2).scale(1.1)]), Err(Error::NotContractive { .. })));
        assert!(matches!(KrausFamily::new(vec![identity(2), identity(3)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_examples() {
        let z = KrausFamily::conjugation(pauli_z()).unwrap();
        let x = KrausFamily::conjugation(pauli_x()).unwrap();
        let zx = compose(&z, &x).unwrap();
        let xz = compose(&x, &z).unwrap();
        assert!(fro(&(&zx.ops()[0] - pauli_z() * pauli_x())) < 1e-15);
        let s_zx = zx.to_superoperator();
        let oracle = z.to_superoperator().matrix() * x.to_superoperator().matrix();
        assert!(fro(&(s_zx.matrix() - &oracle)) < 1e-14);
        assert!(fro(&(s_zx.matrix() - xz.to_superoperator().matrix())) < 1e-14);

        let id = KrausFamily::identity(2);
        let psi = KrausFamily::new(vec![e00(), e10()]).unwrap();
        let c = compose(&id, &psi).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let a = matrix_unit(2, i, j);
                assert!(fro(&(apply(&c, &a).unwrap() - apply(&psi, &a).unwrap())) < 1e-15);
            }
        }

        let two = KrausFamily::new(vec![identity(2).scale(0.5), pauli_x().scale(0.5)]).unwrap();
        let three = KrausFamily::new(vec![identity(2).scale(0.5), pauli_x().scale(0.5), pauli_z().scale(0.5)]).unwrap();
        assert_eq!(compose(&two, &three).unwrap().len(), 6);
    }

    #[test]
    fn apply_examples() {
        let a = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        assert_eq!(apply(&KrausFamily::identity(2), &a).unwrap(), a);
        let reset = KrausFamily::new(vec![e00(), e10()]).unwrap();
        assert!(fro(&(apply(&reset, &a).unwrap() - identity(2) * a[(0, 0)])) < 1e-15);
        let x = KrausFamily::conjugation(pauli_x()).unwrap();
        assert!(fro(&(apply(&x, &pauli_z()).unwrap() + pauli_z())) < 1e-15);
        assert!(matches!(apply(&x, &identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn equivalence_trivial_and_phase() {
        let eq = kraus_equivalence_unitary(&KrausFamily::identity(2), &KrausFamily::identity(2), DEFAULT_TOL).unwrap();
        assert_eq!(eq.u.shape(), (1, 1));
        assert!((eq.u[(0, 0)] - re(1.0)).norm() < 1e-12);

        let a = KrausFamily::conjugation(pauli_x()).unwrap();
        let b = KrausFamily::conjugation(pauli_x() * c(0.0, 1.0)).unwrap();
        let eq = kraus_equivalence_unitary(&a, &b, DEFAULT_TOL).unwrap();
        // X = u · iX forces u = -i
        assert!((eq.u[(0, 0)] - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn equivalence_hadamard_mix() {
        let s = re(1.0 / 2f64.sqrt());
        let a = KrausFamily::new(vec![e00(), e10()]).unwrap();
        let b = KrausFamily::new(vec![(e00() + e10()) * s, (e00() - e10()) * s]).unwrap();
        let eq = kraus_equivalence_unitary(&a, &b, DEFAULT_TOL).unwrap();
        assert!(eq.intertwining_residual <= 1e-10 && eq.unitarity_residual <= 1e-10);
        // independent least-squares oracle: A is linearly independent so u is unique
        let h = hadamard();
        assert!(fro(&(&eq.u - h)) < 1e-10, "{}", eq.u);
    }

    #[test]
    fn equivalence_pads_shorter_family() {
        let a = KrausFamily::identity(2);
        let s = re(1.0 / 2f64.sqrt());
        let b = KrausFamily::new(vec![identity(2) * s, identity(2) * s]).unwrap();
        let eq = kraus_equivalence_unitary(&a, &b, DEFAULT_TOL).unwrap();
        assert_eq!(eq.u.shape(), (2, 2));
        assert!(eq.unitarity_residual < 1e-10 && eq.intertwining_residual < 1e-10);
    }

    #[test]
    fn equivalence_rejects_different_channels() {
        let a = KrausFamily::conjugation(pauli_x()).unwrap();
        let b = KrausFamily::conjugation(pauli_z()).unwrap();
        assert!(matches!(kraus_equivalence_unitary(&a, &b, DEFAULT_TOL), Err(Error::NotSameChannel { .. })));
    }
}
