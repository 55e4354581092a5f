//! Dense complex linear algebra helpers shared by every module.
//!
//! Vectorization is column stacking throughout: `vec(a)` lists the entries
//! of `a` column by column, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

pub use nalgebra::Complex;
use nalgebra::{DMatrix, DVector};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default tolerance for predicates on double precision data with n ≤ 8.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

/// The matrix unit `e_i e_j*` in `M_n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = re(1.0);
    m
}

pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = re(1.0);
    v
}

pub fn vec_col(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &CVector, n: usize) -> CMatrix {
    debug_assert_eq!(v.len(), n * n);
    CMatrix::from_column_slice(n, n, v.as_slice())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Below this many multiply-adds the plain complex product is used.
const SPLIT_PRODUCT_THRESHOLD: usize = 32 * 32 * 32;

/// Complex matrix product through four real products.
///
/// nalgebra only dispatches real scalars to its blocked gemm kernel, so on
/// large operands this is an order of magnitude faster than `a * b`.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_PRODUCT_THRESHOLD {
        return a * b;
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let real = &ar * &br - &ai * &bi;
    let imag = &ar * &bi + &ai * &br;
    CMatrix::from_fn(a.nrows(), b.ncols(), |i, j| c(real[(i, j)], imag[(i, j)]))
}

/// `a · b*` without materializing the adjoint separately.
pub fn mul_adj(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(a, &b.adjoint())
}

pub fn fro(a: &CMatrix) -> f64 {
    a.norm()
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
///
/// The input is symmetrized first; callers that care about the
/// anti-Hermitian part should measure it separately.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigen(a).0.first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigen(a).0.last().copied().unwrap_or(0.0)
}

/// `‖u*u − I‖_F`
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    fro(&(u.adjoint() * u - identity(u.ncols())))
}

/// Operator norm via the largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Extends a set of orthonormal columns to a unitary by ordered Gram–Schmidt
/// over the standard basis `e_0, e_1, …`.
///
/// Standard basis vectors whose remainder after projection is shorter than
/// `0.5` are skipped; at least one in every `d` candidates always survives,
/// so the result is well conditioned.
pub fn complete_to_unitary(cols: &CMatrix) -> CMatrix {
    let d = cols.nrows();
    let mut basis: Vec<CVector> = cols.column_iter().map(|c| c.into_owned()).collect();
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = basis_vector(d, k);
        // two passes keep the completion orthogonal to working precision
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 0.5 {
            basis.push(v / re(nrm));
        }
    }
    let mut u = CMatrix::zeros(d, d);
    for (k, b) in basis.iter().enumerate() {
        u.set_column(k, b);
    }
    u
}

/// Orthonormal basis of the column space, dropping singular values at or
/// below `rel_tol · σ_max`.
pub fn range_basis(a: &CMatrix, rel_tol: f64) -> CMatrix {
    if a.ncols() == 0 || a.nrows() == 0 {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let gram = mul_adj(a, a);
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cut = (rel_tol * rel_tol) * top;
    let keep: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > cut && vals[i] > 0.0).collect();
    let mut q = CMatrix::zeros(a.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        q.set_column(k, &vecs.column(i));
    }
    q
}

/// Moore–Penrose pseudo-inverse with a relative singular-value cutoff.
///
/// Built from the eigendecomposition of `a* a` (or `a a*` for wide input):
/// nalgebra's complex SVD loses several digits on moderately sized inputs.
pub fn pinv(a: &CMatrix, rel_tol: f64) -> CMatrix {
    if a.is_empty() {
        return CMatrix::zeros(a.ncols(), a.nrows());
    }
    let tall = a.nrows() >= a.ncols();
    let gram = if tall { mul(&a.adjoint(), a) } else { mul_adj(a, a) };
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cut = (rel_tol * rel_tol) * top;
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut && vals[i] > 0.0).collect();
    let mut scaled = CMatrix::zeros(gram.nrows(), keep.len());
    let mut kept = CMatrix::zeros(gram.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        kept.set_column(k, &vecs.column(i));
        scaled.set_column(k, &(vecs.column(i) / re(vals[i])));
    }
    // (a* a)⁺ a*  or  a* (a a*)⁺
    let inverse_gram = mul_adj(&scaled, &kept);
    if tall {
        mul_adj(&inverse_gram, a)
    } else {
        mul(&a.adjoint(), &inverse_gram)
    }
}

/// Orthogonal projection onto the column space of `a`.
pub fn range_projection(a: &CMatrix, rel_tol: f64) -> CMatrix {
    let q = range_basis(a, rel_tol);
    &q * q.adjoint()
}

/// `max_i ‖a_i − b_i‖_F` over paired lists.
pub fn max_pairwise_residual(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| fro(&(x - y))).fold(0.0, f64::max)
}
