//! Standard matrices and seeded recipes for commuting CP pairs and
//! commuting stochastic matrices.
//!
//! Every recipe produces pairs that commute by construction, so they are
//! the natural inputs for certificate search and the dilation pipeline.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::chan::{compose, KrausFamily};
use crate::linalg::{c, identity, matrix_unit, re, CMatrix, CVector, Complex64};

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)])
}

/// Normalized Hadamard `[[1, 1], [1, −1]]/√2`.
pub fn hadamard() -> CMatrix {
    let s = 1.0 / 2f64.sqrt();
    CMatrix::from_row_slice(2, 2, &[re(s), re(s), re(s), re(-s)])
}

/// `diag(1, i)`
pub fn phase_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), c(0.0, 1.0)])
}

/// Cyclic shift `e_j ↦ e_{j+1}` on `ℂⁿ`.
pub fn weyl_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { re(1.0) } else { re(0.0) })
}

/// Clock `diag(1, ω, ω², …)` with `ω = e^{2πi/n}`.
pub fn weyl_clock(n: usize) -> CMatrix {
    let w = 2.0 * std::f64::consts::PI / n as f64;
    CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::from_polar(1.0, w * i as f64) } else { re(0.0) })
}

/// The unital map `a ↦ a₀₀ · I` on `M_2`, Kraus `{e₀e₀*, e₁e₀*}`.
pub fn reset_map() -> KrausFamily {
    KrausFamily::new(vec![matrix_unit(2, 0, 0), matrix_unit(2, 1, 0)]).expect("reset map is contractive")
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / re(d.norm())
        } else {
            re(1.0)
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

fn random_phases<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let d = CVector::from_fn(n, |_, _| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU));
    CMatrix::from_diagonal(&d)
}

fn random_probabilities<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn mixture(unitaries: &[CMatrix], probs: &[f64]) -> KrausFamily {
    let ops = unitaries.iter().zip(probs).map(|(u, &p)| u * re(p.sqrt())).collect();
    KrausFamily::new(ops).expect("convex mixture of unitaries is unital")
}

/// `Ad U`, `Ad V` with `U`, `V` diagonal in a shared random basis.
pub fn commuting_conjugations<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (KrausFamily, KrausFamily) {
    let w = random_unitary(n, rng);
    let u = &w * random_phases(n, rng) * w.adjoint();
    let v = &w * random_phases(n, rng) * w.adjoint();
    (KrausFamily::conjugation(u).unwrap(), KrausFamily::conjugation(v).unwrap())
}

/// Random-unitary channels with `m` and `k` Kraus operators, all diagonal in
/// one shared random basis.
pub fn shared_basis_mixtures<R: Rng + ?Sized>(n: usize, m: usize, k: usize, rng: &mut R) -> (KrausFamily, KrausFamily) {
    let w = random_unitary(n, rng);
    let mut draw = |count: usize| {
        let us: Vec<CMatrix> = (0..count).map(|_| &w * random_phases(n, rng) * w.adjoint()).collect();
        let ps = random_probabilities(count, rng);
        mixture(&us, &ps)
    };
    let theta = draw(m);
    let phi = draw(k);
    (theta, phi)
}

/// Pauli channels on `M_2` with `m` and `k` distinct Pauli Kraus operators.
///
/// Pauli conjugations commute as maps even where the matrices anticommute,
/// so the certificate unitaries are genuinely nontrivial.
pub fn pauli_mixtures<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> (KrausFamily, KrausFamily) {
    let paulis = [identity(2), pauli_x(), pauli_y(), pauli_z()];
    let mut draw = |count: usize| {
        let start = rng.random_range(0..4usize);
        let us: Vec<CMatrix> = (0..count).map(|i| paulis[(start + i) % 4].clone()).collect();
        let ps = random_probabilities(count, rng);
        mixture(&us, &ps)
    };
    let theta = draw(m);
    let phi = draw(k);
    (theta, phi)
}

/// Weyl-covariant mixtures on `M_n` built from `X^a Z^b`.
pub fn weyl_mixtures<R: Rng + ?Sized>(n: usize, m: usize, k: usize, rng: &mut R) -> (KrausFamily, KrausFamily) {
    let x = weyl_shift(n);
    let z = weyl_clock(n);
    let word = |a: usize, b: usize| {
        let mut w = identity(n);
        for _ in 0..a {
            w = &w * &x;
        }
        for _ in 0..b {
            w = &w * &z;
        }
        w
    };
    let mut draw = |count: usize| {
        let mut seen = Vec::new();
        while seen.len() < count {
            let ab = (rng.random_range(0..n), rng.random_range(0..n));
            if !seen.contains(&ab) {
                seen.push(ab);
            }
        }
        let us: Vec<CMatrix> = seen.iter().map(|&(a, b)| word(a, b)).collect();
        let ps = random_probabilities(count, rng);
        mixture(&us, &ps)
    };
    let theta = draw(m);
    let phi = draw(k);
    (theta, phi)
}

/// `Θ` and `Θ ∘ Ad V`, where `V` commutes with every Kraus operator of `Θ`.
pub fn theta_and_twisted<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> (KrausFamily, KrausFamily) {
    let w = random_unitary(n, rng);
    let us: Vec<CMatrix> = (0..m).map(|_| &w * random_phases(n, rng) * w.adjoint()).collect();
    let theta = mixture(&us, &random_probabilities(m, rng));
    let v = &w * random_phases(n, rng) * w.adjoint();
    let phi = compose(&theta, &KrausFamily::conjugation(v).unwrap()).unwrap();
    (theta, phi)
}

/// A sparse irreducible stochastic matrix: a random cyclic permutation mixed
/// with a few random extra transitions.
pub fn random_irreducible_stochastic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut p = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        p[(perm[i], perm[(i + 1) % n])] = 1.0 + rng.random::<f64>();
    }
    for _ in 0..n {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        p[(i, j)] += rng.random::<f64>();
    }
    for i in 0..n {
        let s: f64 = p.row(i).sum();
        for j in 0..n {
            p[(i, j)] /= s;
        }
    }
    p
}

/// `(Σ_k c_k P^k) / Σ_k c_k` with `c_k ≥ 0`; stochastic and commuting with `P`.
pub fn stochastic_polynomial(p: &DMatrix<f64>, coeffs: &[f64]) -> DMatrix<f64> {
    let n = p.nrows();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    let mut power = DMatrix::<f64>::identity(n, n);
    for &ck in coeffs {
        acc += &power * ck;
        power = &power * p;
    }
    let total: f64 = coeffs.iter().sum();
    acc / total
}
