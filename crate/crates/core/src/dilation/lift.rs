//! Lifting the representation to isometric operators `V_g(x)` on `K` and the
//! endomorphisms `α_g(b) = Σ_x V_g(e_x) b V_g(e_x)*`.
//!
//! `V_g(x)` sends the generator `(u, ζ)` to `(g + u, M_{g,u}(x ⊗ ζ))`. Inside
//! the truncated grid that only makes sense for `u ≤ N − g`, so the operators
//! act on `K_in = K_{N − margin}` and are exposed for `g ≤ margin`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::chan::KrausFamily;
use crate::error::{Error, Result};
use crate::linalg::{
    c, fro, identity, kron, matrix_unit, min_eigenvalue, mul, mul_adj, pinv, range_basis, CMatrix, CVector, Complex64,
};
use crate::prodsys::GridPoint;

use super::space::{DilationSpace, RANGE_TOL};

/// Floor below which `α_g(p) − p` counts as not positive.
pub const PSD_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EDilation {
    space: DilationSpace,
    /// `V_g(e_x)` for every basis vector of `X(g)`, `g ≤ margin`
    v_ops: BTreeMap<GridPoint, Vec<CMatrix>>,
    in_projection: CMatrix,
    well_definedness: f64,
}

pub fn lift_operators(dsp: &DilationSpace) -> Result<EDilation> {
    let sys = dsp.system();
    let n = sys.dim_h();
    let inner = dsp.inner_level();
    let f_in = dsp.generators_up_to(inner)?;
    let f_in_pinv = pinv(&f_in, RANGE_TOL);
    let in_projection = mul(&f_in, &f_in_pinv);

    let inner_blocks: Vec<_> = dsp.big().blocks().iter().filter(|b| b.level.le(inner)).copied().collect();
    let mut v_ops = BTreeMap::new();
    let mut well_definedness: f64 = 0.0;
    for g in dsp.margin().down_set() {
        let dg = sys.fiber_dim(g)?;
        // images of all inner generators under x ⊗ ·, for every x at once
        let images: Vec<CMatrix> = inner_blocks
            .iter()
            .map(|b| {
                let mult = sys.multiplication_matrix(g, b.level)?;
                Ok(mul(&dsp.level_generators(g + b.level)?, &kron(&mult, &identity(n))))
            })
            .collect::<Result<_>>()?;
        let mut ops = Vec::with_capacity(dg);
        for x in 0..dg {
            let mut f_out = CMatrix::zeros(dsp.dim_k(), f_in.ncols());
            let mut at = 0;
            for (b, img) in inner_blocks.iter().zip(&images) {
                f_out.columns_mut(at, b.dim).copy_from(&img.columns(x * b.dim, b.dim));
                at += b.dim;
            }
            let v = mul(&f_out, &f_in_pinv);
            well_definedness = well_definedness.max(fro(&(&f_out - mul(&v, &f_in))));
            ops.push(v);
        }
        v_ops.insert(g, ops);
    }
    Ok(EDilation { space: dsp.clone(), v_ops, in_projection, well_definedness })
}

impl EDilation {
    pub fn space(&self) -> &DilationSpace {
        &self.space
    }

    pub fn dim_k(&self) -> usize {
        self.space.dim_k()
    }

    pub fn margin(&self) -> GridPoint {
        self.space.margin()
    }

    /// Projection onto `K_in`, the common domain of the `V_g(x)`.
    pub fn in_projection(&self) -> &CMatrix {
        &self.in_projection
    }

    /// `max ‖F_out − V F_in‖_F`: how far the generator assignment is from
    /// respecting linear relations among generators.
    pub fn well_definedness_residual(&self) -> f64 {
        self.well_definedness
    }

    /// `p = ιι*`
    pub fn p(&self) -> CMatrix {
        let e = self.space.embed_h();
        e * e.adjoint()
    }

    /// `V_g(e_x)` for the basis of `X(g)`.
    pub fn v_basis(&self, g: GridPoint) -> Result<&[CMatrix]> {
        self.v_ops.get(&g).map(Vec::as_slice).ok_or(Error::OutOfHorizon { point: g, limit: self.margin() })
    }

    pub fn v(&self, g: GridPoint, x: &CVector) -> Result<CMatrix> {
        let ops = self.v_basis(g)?;
        if x.len() != ops.len() {
            return Err(Error::DimensionMismatch { expected: ops.len(), found: x.len() });
        }
        let k = self.dim_k();
        Ok(ops.iter().zip(x.iter()).fold(CMatrix::zeros(k, k), |acc, (v, &c)| acc + v * c))
    }

    /// `Ṽ_g : X(g) ⊗ K → K`, the block row `[V_g(e_0) V_g(e_1) …]`.
    pub fn v_tilde(&self, g: GridPoint) -> Result<CMatrix> {
        let ops = self.v_basis(g)?;
        let k = self.dim_k();
        let mut out = CMatrix::zeros(k, k * ops.len());
        for (x, v) in ops.iter().enumerate() {
            out.columns_mut(x * k, k).copy_from(v);
        }
        Ok(out)
    }

    /// `ρ(a)` for `a` in the commutant `ℂ`: scalar multiplication on `K`.
    pub fn rho(&self, a: Complex64) -> CMatrix {
        identity(self.dim_k()) * a
    }

    /// `α_g(b) = Ṽ_g (I ⊗ b) Ṽ_g*`.
    pub fn alpha(&self, g: GridPoint, b: &CMatrix) -> Result<CMatrix> {
        let k = self.dim_k();
        if b.shape() != (k, k) {
            return Err(Error::DimensionMismatch { expected: k, found: b.nrows() });
        }
        let ops = self.v_basis(g)?;
        Ok(ops.iter().fold(CMatrix::zeros(k, k), |acc, v| acc + mul_adj(&mul(v, b), v)))
    }

    /// `α_g(left · right*)` without forming the product.
    pub fn alpha_factored(&self, g: GridPoint, left: &CMatrix, right: &CMatrix) -> Result<CMatrix> {
        let k = self.dim_k();
        let ops = self.v_basis(g)?;
        Ok(ops.iter().fold(CMatrix::zeros(k, k), |acc, v| acc + mul_adj(&mul(v, left), &mul(v, right))))
    }

    /// `ι* α_g(ι x ι*) ι`, the compression of `α_g` to `H`.
    pub fn compressed_alpha(&self, g: GridPoint, x: &CMatrix) -> Result<CMatrix> {
        let e = self.space.embed_h();
        Ok(e.adjoint() * self.alpha_factored(g, &(e * x), e)? * e)
    }
}

/// A measured quantity together with the tolerance it was tested against.
///
/// Residuals pass when `value ≤ tol`; floors (minimum eigenvalues) pass when
/// `value ≥ −tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checked {
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Checked {
    pub fn residual(value: f64, tol: f64) -> Self {
        Self { value, tol, pass: value <= tol }
    }

    pub fn floor(value: f64, tol: f64) -> Self {
        Self { value, tol, pass: value >= -tol }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationResiduals {
    /// `V_g(x)*V_g(y) = ⟨x, y⟩ P_in`
    pub isometry: Checked,
    /// `Ṽ_g Ṽ_g* = P_{K_{in + g}}`, unital inputs only
    pub coisometry: Option<Checked>,
    /// `P_in α_g(P_in) P_in = P_in`, unital inputs only
    pub unitality: Option<Checked>,
    /// `ι* α_g(ι x ι*) ι = Θ^a Φ^b (x)`
    pub dilation: Checked,
    /// `α_g ∘ α_h = α_{g+h}` on rank-one operators inside the domain
    pub semigroup: Checked,
    /// compressions compose: `P_g ∘ P_h = P_{g+h}` through the dilation
    pub compression: Checked,
    /// `α_g(bc) = α_g(b) α_g(c)`
    pub multiplicativity: Checked,
    /// `ρ(a) V_g(x) = V_g(a x)`
    pub rho: Checked,
    pub well_definedness: Checked,
}

#[derive(Debug, Clone, Serialize)]
pub struct EDilationReport {
    pub grid_limit: GridPoint,
    pub dim_k: usize,
    pub unital: bool,
    pub residuals: DilationResiduals,
    /// minimum eigenvalue of `α_g(p) − p` over the grid, unital inputs only
    pub increasing: Option<Checked>,
    pub pass: bool,
}

impl DilationResiduals {
    fn all(&self) -> Vec<Checked> {
        let mut v = vec![
            self.isometry,
            self.dilation,
            self.semigroup,
            self.compression,
            self.multiplicativity,
            self.rho,
            self.well_definedness,
        ];
        v.extend(self.coisometry);
        v.extend(self.unitality);
        v
    }

    /// Largest residual value across every check present.
    pub fn max_value(&self) -> f64 {
        self.all().iter().map(|c| c.value).fold(0.0, f64::max)
    }
}

const RANDOM_PRODUCT_PAIRS: usize = 3;
const RANDOM_SEED: u64 = 0x5eed;

pub fn verify_e_dilation(
    res: &EDilation,
    theta: &KrausFamily,
    phi: &KrausFamily,
    grid_limit: GridPoint,
    tol: f64,
) -> Result<EDilationReport> {
    if !grid_limit.le(res.margin()) {
        return Err(Error::OutOfHorizon { point: grid_limit, limit: res.margin() });
    }
    let space = res.space();
    let n = space.big().dim_h();
    if theta.dim() != n || phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: theta.dim() });
    }
    let k = res.dim_k();
    let unital = theta.is_unital(tol) && phi.is_unital(tol);
    let p_in = res.in_projection();
    let inner = space.inner_level();
    let e = space.embed_h();
    let p = res.p();
    let in_basis = range_basis(p_in, RANGE_TOL);

    let mut isometry: f64 = 0.0;
    let mut coisometry: f64 = 0.0;
    let mut unitality: f64 = 0.0;
    let mut dilation: f64 = 0.0;
    let mut multiplicativity: f64 = 0.0;
    let mut rho: f64 = 0.0;
    let mut increasing = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let scalar = c(0.3, -0.7);

    for g in grid_limit.down_set() {
        let ops = res.v_basis(g)?;
        // V_x*V_y = δ_xy P_in, read through an orthonormal basis Q of K_in:
        // (V_x Q)*(V_y Q) = δ_xy I and V_x = (V_x Q) Q*
        let on_in: Vec<CMatrix> = ops.iter().map(|v| mul(v, &in_basis)).collect();
        for (x, vx) in ops.iter().enumerate() {
            for (y, wy) in on_in.iter().enumerate() {
                let expected = if x == y { identity(in_basis.ncols()) } else { CMatrix::zeros(wy.ncols(), wy.ncols()) };
                isometry = isometry.max(fro(&(on_in[x].adjoint() * wy - expected)));
            }
            isometry = isometry.max(fro(&(vx - mul_adj(&on_in[x], &in_basis))));
            let mut ax = CVector::zeros(ops.len());
            ax[x] = scalar;
            rho = rho.max(fro(&(res.rho(scalar) * vx - res.v(g, &ax)?)));
        }

        if unital {
            let vt = res.v_tilde(g)?;
            let target = space.projection_up_to(inner + g)?;
            coisometry = coisometry.max(fro(&(mul_adj(&vt, &vt) - target)));
            let a = res.alpha_factored(g, &in_basis, &in_basis)?;
            unitality = unitality.max(fro(&(mul(&mul(p_in, &a), p_in) - p_in)));
            increasing = increasing.min(min_eigenvalue(&(res.alpha_factored(g, e, e)? - &p)));
        }

        for i in 0..n {
            for j in 0..n {
                let x = matrix_unit(n, i, j);
                let expected = theta.apply_power(&phi.apply_power(&x, g.b)?, g.a)?;
                dilation = dilation.max(fro(&(res.compressed_alpha(g, &x)? - expected)));
            }
        }

        // products of lifted matrix units of H: e_ij e_kl = δ_jk e_il. With
        // A_i = [V_x ι e_i]_x, α_g(ι e_ij ι*) = A_i A_j*, so the product of two
        // lifted units is A_i (A_j* A_k) A_l*.
        let lifted_cols: Vec<CMatrix> = (0..n)
            .map(|i| {
                let col = e.columns(i, 1);
                let mut a = CMatrix::zeros(k, ops.len());
                for (x, v) in ops.iter().enumerate() {
                    a.set_column(x, &(v * col).column(0));
                }
                a
            })
            .collect();
        for ai in &lifted_cols {
            for (j, aj) in lifted_cols.iter().enumerate() {
                for (kk, ak) in lifted_cols.iter().enumerate() {
                    let middle = aj.adjoint() * ak;
                    for al in &lifted_cols {
                        let lhs = if j == kk { mul_adj(ai, al) } else { CMatrix::zeros(k, k) };
                        multiplicativity = multiplicativity.max(fro(&(lhs - mul_adj(&(ai * &middle), al))));
                    }
                }
            }
        }
        // and of random rank-one operators supported on K_in
        for _ in 0..RANDOM_PRODUCT_PAIRS {
            let [xi, eta, xi2, eta2] = [(); 4].map(|_| p_in * random_vector(k, &mut rng));
            let overlap = eta.adjoint() * &xi2;
            let lhs = res.alpha_factored(g, &(xi.clone() * overlap[(0, 0)]), &eta2)?;
            let rhs = mul(&res.alpha_factored(g, &xi, &eta)?, &res.alpha_factored(g, &xi2, &eta2)?);
            multiplicativity = multiplicativity.max(fro(&(lhs - rhs)));
        }
    }

    let (semigroup, compression) = semigroup_residuals(res, grid_limit)?;

    let residuals = DilationResiduals {
        isometry: Checked::residual(isometry, tol),
        coisometry: unital.then(|| Checked::residual(coisometry, tol)),
        unitality: unital.then(|| Checked::residual(unitality, tol)),
        dilation: Checked::residual(dilation, tol),
        semigroup: Checked::residual(semigroup, tol),
        compression: Checked::residual(compression, tol),
        multiplicativity: Checked::residual(multiplicativity, tol),
        rho: Checked::residual(rho, tol),
        well_definedness: Checked::residual(res.well_definedness_residual(), tol),
    };
    let increasing = unital.then(|| Checked::floor(increasing, PSD_FLOOR));
    let pass = residuals.all().iter().all(|c| c.pass) && increasing.is_none_or(|c| c.pass);
    Ok(EDilationReport { grid_limit, dim_k: k, unital, residuals, increasing, pass })
}

/// Semigroup law of `α` on rank-one operators `ξη*` with `ξ, η` ranging over
/// an orthonormal basis of `K_{in − h}` (where `α_h` lands inside `K_in`), and
/// the composition law of the compressions on matrix units of `H`.
fn semigroup_residuals(res: &EDilation, grid_limit: GridPoint) -> Result<(f64, f64)> {
    let space = res.space();
    let inner = space.inner_level();
    let n = space.big().dim_h();
    let mut bases: BTreeMap<GridPoint, CMatrix> = BTreeMap::new();
    let mut compression: f64 = 0.0;
    // α_0 compresses to K_in, which makes the law trivial when g or h is 0
    let mut semigroup = fro(&(&res.v_basis(GridPoint::ZERO)?[0] - res.in_projection()));
    for s in grid_limit.down_set() {
        for g in s.down_set() {
            let h = s.checked_sub(g).expect("g ≤ s");
            let trivial = g == GridPoint::ZERO || h == GridPoint::ZERO;
            if let (false, Some(level)) = (trivial, inner.checked_sub(h)) {
                if let Entry::Vacant(e) = bases.entry(level) {
                    e.insert(range_basis(&space.generators_up_to(level)?, RANGE_TOL));
                }
                let q = &bases[&level];
                let vs = res.v_basis(s)?;
                let mut terms: Vec<(CMatrix, f64)> = Vec::new();
                for a in res.v_basis(g)? {
                    for b in res.v_basis(h)? {
                        terms.push((mul(a, &mul(b, q)), 1.0));
                    }
                }
                terms.extend(vs.iter().map(|v| (mul(v, q), -1.0)));
                semigroup = semigroup.max(rank_one_difference(&terms));
            }
            for i in 0..n {
                for j in 0..n {
                    let x = matrix_unit(n, i, j);
                    let inner_step = res.compressed_alpha(h, &x)?;
                    let twice = res.compressed_alpha(g, &inner_step)?;
                    compression = compression.max(fro(&(twice - res.compressed_alpha(s, &x)?)));
                }
            }
        }
    }
    Ok((semigroup, compression))
}

/// `max_{i,j} ‖Σ_w c_w W_w e_i (W_w e_j)*‖_F` for signed terms `(W_w, c_w)`.
///
/// For fixed `i` all `j` are handled by one product: column `q + k·j` of
/// `[W_w e_i]_w · [c_w conj(W_w)[q, j]]_{w,(q,j)}` is column `q` of the
/// `(i, j)` operator.
fn rank_one_difference(terms: &[(CMatrix, f64)]) -> f64 {
    let Some((first, _)) = terms.first() else { return 0.0 };
    let (k, r) = first.shape();
    let mut conj_rows = CMatrix::zeros(terms.len(), k * r);
    for (w, (m, sign)) in terms.iter().enumerate() {
        for (idx, z) in m.as_slice().iter().enumerate() {
            conj_rows[(w, idx)] = z.conj() * *sign;
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..r {
        let cols = CMatrix::from_fn(k, terms.len(), |p, w| terms[w].0[(p, i)]);
        let all = mul(&cols, &conj_rows);
        for j in 0..r {
            worst = worst.max(all.columns(k * j, k).norm());
        }
    }
    worst
}

fn random_vector<R: Rng>(k: usize, rng: &mut R) -> CMatrix {
    let m = CMatrix::from_fn(k, 1, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let nrm = m.norm();
    m / crate::linalg::re(nrm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::space::{build_big_space, build_dilation_space};
    use crate::families::{pauli_x, pauli_z, reset_map};
    use crate::linalg::DEFAULT_TOL;
    use crate::prodsys::build_product_system;
    use crate::strongcomm::strong_commutation_certificate;

    fn lift(theta: &KrausFamily, phi: &KrausFamily, horizon: GridPoint, margin: GridPoint) -> EDilation {
        let cert = strong_commutation_certificate(theta, phi, DEFAULT_TOL).unwrap();
        let sys = build_product_system(theta, phi, &cert, DEFAULT_TOL).unwrap();
        let hat = build_big_space(&sys, horizon).unwrap();
        lift_operators(&build_dilation_space(&hat, margin, DEFAULT_TOL).unwrap()).unwrap()
    }

    #[test]
    fn identity_pair_is_trivial() {
        let id = KrausFamily::identity(1);
        let res = lift(&id, &id, GridPoint::new(2, 2), GridPoint::new(1, 1));
        for g in GridPoint::new(1, 1).down_set() {
            assert!(fro(&(&res.v_basis(g).unwrap()[0] - identity(1))) < 1e-12);
        }
        let r = verify_e_dilation(&res, &id, &id, GridPoint::new(1, 1), DEFAULT_TOL).unwrap();
        assert!(r.pass && r.residuals.max_value() < 1e-12, "{r:?}");
    }

    #[test]
    fn zx_alpha_is_conjugation() {
        let (z, x) = (pauli_z(), pauli_x());
        let theta = KrausFamily::conjugation(z.clone()).unwrap();
        let phi = KrausFamily::conjugation(x.clone()).unwrap();
        let res = lift(&theta, &phi, GridPoint::new(2, 2), GridPoint::new(2, 2));
        let r = verify_e_dilation(&res, &theta, &phi, GridPoint::new(2, 2), DEFAULT_TOL).unwrap();
        assert!(r.pass && r.residuals.max_value() <= 1e-10, "{r:?}");
        for g in GridPoint::new(2, 2).down_set() {
            let mut w = identity(2);
            for _ in 0..g.a {
                w = &w * &z;
            }
            for _ in 0..g.b {
                w = &w * &x;
            }
            for i in 0..2 {
                for j in 0..2 {
                    let e = matrix_unit(2, i, j);
                    let got = res.compressed_alpha(g, &e).unwrap();
                    assert!(fro(&(got - &w * &e * w.adjoint())) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn reset_alpha_is_multiplicative() {
        let theta = reset_map();
        let phi = KrausFamily::identity(2);
        let res = lift(&theta, &phi, GridPoint::new(2, 1), GridPoint::new(1, 1));
        let r = verify_e_dilation(&res, &theta, &phi, GridPoint::new(1, 1), DEFAULT_TOL).unwrap();
        assert!(r.residuals.multiplicativity.value <= 1e-8);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn beyond_margin_is_an_error() {
        let id = KrausFamily::identity(1);
        let res = lift(&id, &id, GridPoint::new(2, 2), GridPoint::new(1, 0));
        assert!(matches!(res.v_basis(GridPoint::new(0, 1)), Err(Error::OutOfHorizon { .. })));
        assert!(matches!(
            verify_e_dilation(&res, &id, &id, GridPoint::new(1, 1), DEFAULT_TOL),
            Err(Error::OutOfHorizon { .. })
        ));
    }
}
