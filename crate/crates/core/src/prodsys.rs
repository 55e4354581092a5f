//! The discrete two-parameter product system `X(a, b) = E^{⊗a} ⊗ F^{⊗b}`
//! built from a strongly commuting pair on `B(H)`, and its covariant
//! representation on `H`.
//!
//! Because the algebra is all of `B(H)`, its commutant is `ℂ` and every
//! fiber is a plain Hilbert space: `E = ℂ^m`, `F = ℂ^k`, where `m` and `k`
//! are the Kraus lengths of `Θ` and `Φ`. A fiber basis vector is a word
//! `e_{i₁}⊗…⊗e_{i_a}⊗f_{j₁}⊗…⊗f_{j_b}`, indexed lexicographically with the
//! leftmost letter most significant.
//!
//! Multiplication `X(a,b) ⊗ X(c,d) → X(a+c, b+d)` reorders the word
//! `E^a F^b E^c F^d` with the flip `τ: F ⊗ E → E ⊗ F` read off the strong
//! commutation certificate. The representation sends a word to the operator
//! product `T_{i₁}⋯T_{i_a} S_{j₁}⋯S_{j_b}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chan::KrausFamily;
use crate::error::{Error, Result};
use crate::linalg::{fro, identity, kron, matrix_unit, unitarity_residual, CMatrix, CVector};
use crate::strongcomm::{verify_certificate, StrongCommutationCertificate};

/// Default cap on `dim X(g) · dim H` for any fiber touched by a check.
pub const DEFAULT_FIBER_CAP: usize = 4096;

/// A point of the grid `ℕ²` with the componentwise partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub a: usize,
    pub b: usize,
}

impl GridPoint {
    pub const ZERO: GridPoint = GridPoint { a: 0, b: 0 };
    pub const E1: GridPoint = GridPoint { a: 1, b: 0 };
    pub const E2: GridPoint = GridPoint { a: 0, b: 1 };

    pub const fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }

    /// Componentwise `≤`.
    pub fn le(self, other: GridPoint) -> bool {
        self.a <= other.a && self.b <= other.b
    }

    pub fn checked_sub(self, other: GridPoint) -> Option<GridPoint> {
        Some(GridPoint::new(self.a.checked_sub(other.a)?, self.b.checked_sub(other.b)?))
    }

    /// Componentwise maximum.
    pub fn join(self, other: GridPoint) -> GridPoint {
        GridPoint::new(self.a.max(other.a), self.b.max(other.b))
    }

    /// `((s − u)₊, (s − u)₋)`, both in `ℕ²`.
    pub fn difference_parts(s: GridPoint, u: GridPoint) -> (GridPoint, GridPoint) {
        (
            GridPoint::new(s.a.saturating_sub(u.a), s.b.saturating_sub(u.b)),
            GridPoint::new(u.a.saturating_sub(s.a), u.b.saturating_sub(s.b)),
        )
    }

    /// All points `g ≤ self`, first coordinate major.
    pub fn down_set(self) -> impl Iterator<Item = GridPoint> {
        (0..=self.a).flat_map(move |a| (0..=self.b).map(move |b| GridPoint::new(a, b)))
    }
}

impl std::ops::Add for GridPoint {
    type Output = GridPoint;

    fn add(self, other: GridPoint) -> GridPoint {
        GridPoint::new(self.a + other.a, self.b + other.b)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Letter {
    E,
    F,
}

/// Fibers, flip and Kraus data of the twisted product system.
#[derive(Debug, Clone)]
pub struct TwistedProductSystem {
    dim_h: usize,
    theta: KrausFamily,
    phi: KrausFamily,
    /// `mk × mk` unitary `F ⊗ E → E ⊗ F`; column `l·m + k`, row `i·k + j`.
    flip: CMatrix,
    cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberVector {
    pub grid: GridPoint,
    pub coords: CVector,
}

impl FiberVector {
    pub fn new(sys: &TwistedProductSystem, grid: GridPoint, coords: CVector) -> Result<Self> {
        let d = sys.fiber_dim(grid)?;
        if coords.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: coords.len() });
        }
        Ok(Self { grid, coords })
    }

    pub fn basis(sys: &TwistedProductSystem, grid: GridPoint, index: usize) -> Result<Self> {
        let d = sys.fiber_dim(grid)?;
        if index >= d {
            return Err(Error::invalid(format!("basis index {index} out of range for X{grid} of dimension {d}")));
        }
        let mut coords = CVector::zeros(d);
        coords[index] = crate::linalg::re(1.0);
        Ok(Self { grid, coords })
    }

    /// The unit `1 ∈ X(0, 0) = ℂ`.
    pub fn unit() -> Self {
        Self { grid: GridPoint::ZERO, coords: CVector::from_element(1, crate::linalg::re(1.0)) }
    }
}

/// Turns the certificate `T_i S_j = Σ u[(i,j),(k,l)] S_l T_k` into the flip
/// `τ(f_l ⊗ e_k) = Σ_{(i,j)} conj(u[(i,j),(k,l)]) e_i ⊗ f_j`, the unique map
/// with `T(τ(f ⊗ e)) = S(f) T(e)`.
pub fn flip_from_certificate(u: &CMatrix, m: usize, k: usize) -> CMatrix {
    let mut tau = CMatrix::zeros(m * k, m * k);
    for i in 0..m {
        for j in 0..k {
            for kk in 0..m {
                for l in 0..k {
                    tau[(i * k + j, l * m + kk)] = u[(i * k + j, kk * k + l)].conj();
                }
            }
        }
    }
    tau
}

pub fn build_product_system(
    theta: &KrausFamily,
    phi: &KrausFamily,
    cert: &StrongCommutationCertificate,
    tol: f64,
) -> Result<TwistedProductSystem> {
    let check = verify_certificate(theta, phi, &cert.u, tol)?;
    if !check.pass {
        return Err(Error::CertificateFailure {
            unitarity: check.unitarity_residual,
            intertwining: check.intertwining_residual,
        });
    }
    let flip = flip_from_certificate(&cert.u, theta.len(), phi.len());
    TwistedProductSystem::from_flip(theta.clone(), phi.clone(), flip)
}

impl TwistedProductSystem {
    /// Builds a system from an arbitrary `mk × mk` flip without checking
    /// that it intertwines the Kraus families.
    pub fn from_flip(theta: KrausFamily, phi: KrausFamily, flip: CMatrix) -> Result<Self> {
        if theta.dim() != phi.dim() {
            return Err(Error::DimensionMismatch { expected: theta.dim(), found: phi.dim() });
        }
        let mk = theta.len() * phi.len();
        if flip.nrows() != mk || flip.ncols() != mk {
            return Err(Error::DimensionMismatch { expected: mk, found: flip.nrows() });
        }
        Ok(Self { dim_h: theta.dim(), theta, phi, flip, cap: DEFAULT_FIBER_CAP })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    /// Dimension of the `E` fiber (Kraus length of `Θ`).
    pub fn m(&self) -> usize {
        self.theta.len()
    }

    /// Dimension of the `F` fiber (Kraus length of `Φ`).
    pub fn k(&self) -> usize {
        self.phi.len()
    }

    pub fn flip(&self) -> &CMatrix {
        &self.flip
    }

    pub fn theta(&self) -> &KrausFamily {
        &self.theta
    }

    pub fn phi(&self) -> &KrausFamily {
        &self.phi
    }

    pub fn flip_unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.flip)
    }

    /// `m^a k^b`, subject to the cap on `m^a k^b · dim H`.
    pub fn fiber_dim(&self, g: GridPoint) -> Result<usize> {
        let too_big = || Error::CapExceeded { what: "fiber dimension", size: usize::MAX, cap: self.cap };
        let pa = self.m().checked_pow(g.a as u32).ok_or_else(too_big)?;
        let pb = self.k().checked_pow(g.b as u32).ok_or_else(too_big)?;
        let d = pa.checked_mul(pb).ok_or_else(too_big)?;
        let total = d.checked_mul(self.dim_h).ok_or_else(too_big)?;
        if total > self.cap {
            return Err(Error::CapExceeded { what: "fiber dimension", size: total, cap: self.cap });
        }
        Ok(d)
    }

    /// Applies `τ` to the adjacent `(F, E)` slots at `pos`, `pos + 1` of a
    /// batch of tensors stored as the columns of `data`.
    fn flip_slots(&self, data: &CMatrix, letters: &mut [Letter], pos: usize) -> CMatrix {
        debug_assert_eq!((letters[pos], letters[pos + 1]), (Letter::F, Letter::E));
        let (m, k) = (self.m(), self.k());
        let dim_of = |l: Letter| if l == Letter::E { m } else { k };
        let left: usize = letters[..pos].iter().map(|&l| dim_of(l)).product();
        let right: usize = letters[pos + 2..].iter().map(|&l| dim_of(l)).product();
        let mk = m * k;
        let mut out = CMatrix::zeros(data.nrows(), data.ncols());
        for col in 0..data.ncols() {
            for l in 0..left {
                for r in 0..right {
                    for fe in 0..mk {
                        let x = data[((l * mk + fe) * right + r, col)];
                        if x.re == 0.0 && x.im == 0.0 {
                            continue;
                        }
                        for ef in 0..mk {
                            let t = self.flip[(ef, fe)];
                            out[((l * mk + ef) * right + r, col)] += t * x;
                        }
                    }
                }
            }
        }
        letters.swap(pos, pos + 1);
        out
    }

    /// Reorders `E^a F^b E^c F^d` into `E^{a+c} F^{b+d}` on the columns of
    /// `data` (each a tensor in `X(g) ⊗ X(h)`).
    ///
    /// Sweep: the `E` letters of the right factor move left one slot at a
    /// time, leftmost first, each passing the `b` letters `F` of the left
    /// factor; `b·c` flips in all. Flips on disjoint slots commute, so every
    /// sweep order gives the same result.
    fn reorder(&self, g: GridPoint, h: GridPoint, data: CMatrix) -> CMatrix {
        let mut letters: Vec<Letter> = std::iter::repeat_n(Letter::E, g.a)
            .chain(std::iter::repeat_n(Letter::F, g.b))
            .chain(std::iter::repeat_n(Letter::E, h.a))
            .chain(std::iter::repeat_n(Letter::F, h.b))
            .collect();
        let mut data = data;
        for e in 0..h.a {
            let start = g.a + g.b + e;
            let stop = g.a + e;
            for pos in (stop..start).rev() {
                data = self.flip_slots(&data, &mut letters, pos);
            }
        }
        data
    }

    /// The unitary `X(g) ⊗ X(h) → X(g + h)` implementing multiplication.
    pub fn multiplication_matrix(&self, g: GridPoint, h: GridPoint) -> Result<CMatrix> {
        let d = self.fiber_dim(g + h)?;
        Ok(self.reorder(g, h, identity(d)))
    }

    pub fn multiply(&self, x: &FiberVector, y: &FiberVector) -> Result<FiberVector> {
        let (dx, dy) = (self.fiber_dim(x.grid)?, self.fiber_dim(y.grid)?);
        if x.coords.len() != dx {
            return Err(Error::DimensionMismatch { expected: dx, found: x.coords.len() });
        }
        if y.coords.len() != dy {
            return Err(Error::DimensionMismatch { expected: dy, found: y.coords.len() });
        }
        let grid = x.grid + y.grid;
        self.fiber_dim(grid)?;
        let tensor = x.coords.kronecker(&y.coords);
        let out = self.reorder(x.grid, y.grid, CMatrix::from_column_slice(tensor.len(), 1, tensor.as_slice()));
        Ok(FiberVector { grid, coords: out.column(0).into_owned() })
    }

    /// Operators `T_w` for every word `w` of `X(g)`, in basis order.
    pub fn word_operators(&self, g: GridPoint) -> Result<Vec<CMatrix>> {
        self.fiber_dim(g)?;
        let mut words = vec![identity(self.dim_h)];
        for _ in 0..g.a {
            words = words.iter().flat_map(|w| self.theta.ops().iter().map(move |t| w * t)).collect();
        }
        for _ in 0..g.b {
            words = words.iter().flat_map(|w| self.phi.ops().iter().map(move |s| w * s)).collect();
        }
        Ok(words)
    }

    /// `T̃_g : X(g) ⊗ H → H`, the block row `[T_{w₀} T_{w₁} …]`.
    pub fn representation_matrix(&self, g: GridPoint) -> Result<CMatrix> {
        let words = self.word_operators(g)?;
        let n = self.dim_h;
        let mut out = CMatrix::zeros(n, n * words.len());
        for (w, op) in words.iter().enumerate() {
            out.view_mut((0, w * n), (n, n)).copy_from(op);
        }
        Ok(out)
    }

    /// `T(x) = Σ_w x_w T_w`.
    pub fn represent(&self, x: &FiberVector) -> Result<CMatrix> {
        let words = self.word_operators(x.grid)?;
        if words.len() != x.coords.len() {
            return Err(Error::DimensionMismatch { expected: words.len(), found: x.coords.len() });
        }
        Ok(words.iter().zip(x.coords.iter()).fold(CMatrix::zeros(self.dim_h, self.dim_h), |acc, (w, c)| acc + w * *c))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationReport {
    pub horizon: GridPoint,
    /// `max ‖T̃_g (I ⊗ x) T̃_g* − Θ^a Φ^b (x)‖_F` over grid points and matrix units
    pub rep_residual: f64,
    /// `max ‖T̃_{g+h} (M_{g,h} ⊗ I) − T̃_g (I ⊗ T̃_h)‖_F` over `g + h ≤ horizon`
    pub homomorphism_residual: f64,
    /// `max ‖T̃_g T̃_g* − I‖_F`; only when both maps are unital
    pub coisometry_residual: Option<f64>,
    /// `max ‖T̃_g‖` (operator norm)
    pub max_norm: f64,
    pub points_checked: usize,
    pub pass: bool,
    pub tol: f64,
}

impl RepresentationReport {
    pub fn max_residual(&self) -> f64 {
        self.rep_residual.max(self.homomorphism_residual).max(self.coisometry_residual.unwrap_or(0.0))
    }
}

pub fn verify_representation(sys: &TwistedProductSystem, horizon: GridPoint, tol: f64) -> Result<RepresentationReport> {
    sys.fiber_dim(horizon)?;
    let n = sys.dim_h;
    let unital = sys.theta.is_unital(tol) && sys.phi.is_unital(tol);
    let mut rep_residual: f64 = 0.0;
    let mut coisometry: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    let mut points = 0;
    let mut tilde = std::collections::BTreeMap::new();
    for g in horizon.down_set() {
        let t = sys.representation_matrix(g)?;
        let d = sys.fiber_dim(g)?;
        for i in 0..n {
            for j in 0..n {
                let x = matrix_unit(n, i, j);
                let lhs = &t * kron(&identity(d), &x) * t.adjoint();
                let rhs = sys.theta.apply_power(&sys.phi.apply_power(&x, g.b)?, g.a)?;
                rep_residual = rep_residual.max(fro(&(lhs - rhs)));
            }
        }
        if unital {
            coisometry = coisometry.max(fro(&(&t * t.adjoint() - identity(n))));
        }
        max_norm = max_norm.max(crate::linalg::spectral_norm(&t));
        tilde.insert(g, t);
        points += 1;
    }

    let mut homomorphism: f64 = 0.0;
    for s in horizon.down_set() {
        for g in s.down_set() {
            let h = s.checked_sub(g).expect("g ≤ s");
            let dg = sys.fiber_dim(g)?;
            let lhs = &tilde[&s] * kron(&sys.multiplication_matrix(g, h)?, &identity(n));
            let rhs = &tilde[&g] * kron(&identity(dg), &tilde[&h]);
            homomorphism = homomorphism.max(fro(&(lhs - rhs)));
        }
    }

    let coisometry_residual = unital.then_some(coisometry);
    let pass = rep_residual <= tol
        && homomorphism <= tol
        && coisometry_residual.is_none_or(|c| c <= tol)
        && max_norm <= 1.0 + tol;
    Ok(RepresentationReport {
        horizon,
        rep_residual,
        homomorphism_residual: homomorphism,
        coisometry_residual,
        max_norm,
        points_checked: points,
        pass,
        tol,
    })
}
