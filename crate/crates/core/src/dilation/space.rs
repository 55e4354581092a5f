//! The truncated big space `ℋ_N = ⊕_{t ≤ N} X(t) ⊗ H`, its hat semigroup,
//! and the Gram realization of the dilation space `K`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, identity, kron, CMatrix};
use crate::prodsys::{GridPoint, TwistedProductSystem};

/// Cap on the total dimension of the truncated big space.
pub const DEFAULT_BIG_SPACE_CAP: usize = 4096;

/// Gram eigenvalues at or below this fraction of the largest are dropped.
pub const GRAM_RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub level: GridPoint,
    /// `dim X(level)`
    pub fiber_dim: usize,
    /// `dim X(level) · dim H`
    pub dim: usize,
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub struct BigSpace {
    horizon: GridPoint,
    dim_h: usize,
    blocks: Vec<Block>,
    total_dim: usize,
}

impl BigSpace {
    pub fn new(sys: &TwistedProductSystem, horizon: GridPoint, cap: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut offset = 0usize;
        for level in horizon.down_set() {
            let fiber_dim = sys.fiber_dim(level)?;
            let dim = fiber_dim * sys.dim_h();
            blocks.push(Block { level, fiber_dim, dim, offset });
            offset = offset.checked_add(dim).ok_or(Error::CapExceeded {
                what: "big space dimension",
                size: usize::MAX,
                cap,
            })?;
        }
        if offset > cap {
            return Err(Error::CapExceeded { what: "big space dimension", size: offset, cap });
        }
        Ok(Self { horizon, dim_h: sys.dim_h(), blocks, total_dim: offset })
    }

    pub fn horizon(&self) -> GridPoint {
        self.horizon
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Blocks are stored in `down_set` order, first coordinate major.
    pub fn block_index(&self, level: GridPoint) -> Option<usize> {
        level.le(self.horizon).then(|| level.a * (self.horizon.b + 1) + level.b)
    }

    pub fn block(&self, level: GridPoint) -> Result<&Block> {
        self.block_index(level)
            .map(|i| &self.blocks[i])
            .ok_or(Error::OutOfHorizon { point: level, limit: self.horizon })
    }

    /// Total dimension of the blocks at levels `≤ level`.
    pub fn down_set_dim(&self, level: GridPoint) -> usize {
        self.blocks.iter().filter(|b| b.level.le(level)).map(|b| b.dim).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    First,
    Second,
}

/// The hat semigroup on `ℋ_N`, stored as the one-step maps between blocks.
///
/// `T̂_s` sends block `t ≥ s` to block `t − s` through
/// `(I_{X(t−s)} ⊗ T̃_s)(M_{t−s,s}* ⊗ I_H)` and kills blocks `t ≱ s`. The
/// adjoint sends block `t` to `t + s`, truncated to zero past the horizon.
#[derive(Debug, Clone)]
pub struct HatSemigroup {
    sys: TwistedProductSystem,
    big: BigSpace,
    /// indexed by block; `None` when the block has no predecessor
    down_first: Vec<Option<CMatrix>>,
    down_second: Vec<Option<CMatrix>>,
}

pub fn build_big_space(sys: &TwistedProductSystem, horizon: GridPoint) -> Result<HatSemigroup> {
    build_big_space_with_cap(sys, horizon, DEFAULT_BIG_SPACE_CAP)
}

pub fn build_big_space_with_cap(sys: &TwistedProductSystem, horizon: GridPoint, cap: usize) -> Result<HatSemigroup> {
    let big = BigSpace::new(sys, horizon, cap)?;
    let n = sys.dim_h();
    let t_first = sys.representation_matrix(GridPoint::E1)?;
    let t_second = sys.representation_matrix(GridPoint::E2)?;

    let step = |block: &Block, dir: Direction| -> Result<Option<CMatrix>> {
        let (unit, tilde) = match dir {
            Direction::First => (GridPoint::E1, &t_first),
            Direction::Second => (GridPoint::E2, &t_second),
        };
        let Some(rest) = block.level.checked_sub(unit) else {
            return Ok(None);
        };
        let rest_dim = sys.fiber_dim(rest)?;
        let mult = sys.multiplication_matrix(rest, unit)?;
        Ok(Some(kron(&identity(rest_dim), tilde) * kron(&mult.adjoint(), &identity(n))))
    };

    let down_first = big.blocks.iter().map(|b| step(b, Direction::First)).collect::<Result<Vec<_>>>()?;
    let down_second = big.blocks.iter().map(|b| step(b, Direction::Second)).collect::<Result<Vec<_>>>()?;
    Ok(HatSemigroup { sys: sys.clone(), big, down_first, down_second })
}

impl HatSemigroup {
    pub fn system(&self) -> &TwistedProductSystem {
        &self.sys
    }

    pub fn big(&self) -> &BigSpace {
        &self.big
    }

    fn step(&self, dir: Direction, level: GridPoint) -> Option<&CMatrix> {
        let idx = self.big.block_index(level)?;
        match dir {
            Direction::First => self.down_first[idx].as_ref(),
            Direction::Second => self.down_second[idx].as_ref(),
        }
    }

    /// Applies `T̂_s` to columns living in block `from`; returns columns in
    /// block `from − s`, or `None` when `from ≱ s`.
    pub fn apply_down(&self, s: GridPoint, from: GridPoint, data: CMatrix) -> Option<CMatrix> {
        from.checked_sub(s)?;
        let mut level = from;
        let mut out = data;
        for _ in 0..s.b {
            out = self.step(Direction::Second, level)? * out;
            level = level.checked_sub(GridPoint::E2)?;
        }
        for _ in 0..s.a {
            out = self.step(Direction::First, level)? * out;
            level = level.checked_sub(GridPoint::E1)?;
        }
        Some(out)
    }

    /// Applies `T̂_s*` to columns in block `from`; returns columns in block
    /// `from + s`, or `None` past the horizon.
    pub fn apply_up(&self, s: GridPoint, from: GridPoint, data: CMatrix) -> Option<CMatrix> {
        let target = from + s;
        if !target.le(self.big.horizon) {
            return None;
        }
        let mut level = from;
        let mut out = data;
        for _ in 0..s.a {
            level = level + GridPoint::E1;
            out = self.step(Direction::First, level)?.adjoint() * out;
        }
        for _ in 0..s.b {
            level = level + GridPoint::E2;
            out = self.step(Direction::Second, level)?.adjoint() * out;
        }
        Some(out)
    }

    /// `T̂_s` as a dense operator on `ℋ_N`.
    pub fn dense(&self, s: GridPoint) -> CMatrix {
        let d = self.big.total_dim;
        let mut out = CMatrix::zeros(d, d);
        for src in &self.big.blocks {
            let Some(target) = src.level.checked_sub(s) else { continue };
            let dst = self.big.block(target).expect("target below source");
            let op = self.apply_down(s, src.level, identity(src.dim)).expect("source ≥ s");
            out.view_mut((dst.offset, src.offset), (dst.dim, src.dim)).copy_from(&op);
        }
        out
    }

    /// `‖T̂_{e₁}T̂_{e₂} − T̂_{e₂}T̂_{e₁}‖_F` on `ℋ_N`.
    pub fn commutation_residual(&self) -> f64 {
        let (f, s) = (self.dense(GridPoint::E1), self.dense(GridPoint::E2));
        (&f * &s - &s * &f).norm()
    }

    /// `max ‖(T̂_s T̂_s* − I)|_{block t}‖_F` over blocks with `t + s ≤ N`,
    /// the part of `ℋ_N` the truncation leaves intact.
    pub fn coisometry_residual(&self, s: GridPoint) -> f64 {
        self.big
            .blocks
            .iter()
            .filter(|b| (b.level + s).le(self.big.horizon))
            .map(|b| {
                let up = self.apply_up(s, b.level, identity(b.dim)).expect("inside horizon");
                let back = self.apply_down(s, b.level + s, up).expect("inside horizon");
                (back - identity(b.dim)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Gram block `T̂_{(s−u)₊} T̂_{(s−u)₋}*` from block `s` to block `u`.
    pub fn gram_block(&self, u: GridPoint, s: GridPoint) -> CMatrix {
        let (plus, minus) = GridPoint::difference_parts(s, u);
        let top = s.join(u);
        let src = self.big.block(s).expect("inside horizon");
        let up = self.apply_up(minus, s, identity(src.dim)).expect("join stays inside horizon");
        self.apply_down(plus, top, up).expect("join dominates u")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GramSpectrum {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// smallest retained eigenvalue
    pub smallest_kept: f64,
    /// largest dropped eigenvalue, `0` when nothing was dropped
    pub largest_dropped: f64,
    pub rank_cutoff: f64,
}

/// The dilation space `K` realized from the Gram matrix of the generators
/// `(g, ζ)`, `g ≤ N`, `ζ` a basis vector of `X(g) ⊗ H`.
#[derive(Debug, Clone)]
pub struct DilationSpace {
    hat: HatSemigroup,
    margin: GridPoint,
    gram: CMatrix,
    /// `dimK × D` with `factor* · factor = gram`; column `j` is generator `j`
    /// in an orthonormal basis of `K`
    factor: CMatrix,
    embed_h: CMatrix,
    spectrum: GramSpectrum,
}

/// The Gram matrix over all generators, block `(u, s)` equal to
/// `T̂_{(s−u)₊} T̂_{(s−u)₋}*`.
pub fn assemble_gram(hat: &HatSemigroup) -> CMatrix {
    let big = hat.big();
    let pairs: Vec<(Block, Block)> =
        big.blocks().iter().flat_map(|u| big.blocks().iter().map(move |s| (*u, *s))).collect();
    let computed: Vec<CMatrix> = pairs.par_iter().map(|(u, s)| hat.gram_block(u.level, s.level)).collect();
    let mut gram = CMatrix::zeros(big.total_dim(), big.total_dim());
    for ((u, s), block) in pairs.iter().zip(computed) {
        gram.view_mut((u.offset, s.offset), (u.dim, s.dim)).copy_from(&block);
    }
    gram
}

pub fn build_dilation_space(hat: &HatSemigroup, margin: GridPoint, tol: f64) -> Result<DilationSpace> {
    let horizon = hat.big().horizon();
    if !margin.le(horizon) {
        return Err(Error::OutOfHorizon { point: margin, limit: horizon });
    }
    let gram = assemble_gram(hat);
    let (vals, vecs) = hermitian_eigen(&gram);
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    let max_eigenvalue = vals.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol {
        return Err(Error::ConstructionFailure { min_eigenvalue });
    }
    let cut = GRAM_RANK_CUTOFF * max_eigenvalue.max(0.0);
    let kept: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > cut).collect();
    let largest_dropped = vals.iter().copied().filter(|&v| v <= cut).fold(0.0, f64::max);
    let smallest_kept = kept.last().map(|&i| vals[i]).unwrap_or(0.0);

    let mut factor = CMatrix::zeros(kept.len(), gram.ncols());
    for (row, &i) in kept.iter().enumerate() {
        let scaled = vecs.column(i).adjoint() * crate::linalg::re(vals[i].sqrt());
        factor.set_row(row, &scaled);
    }
    let zero = hat.big().block(GridPoint::ZERO)?;
    let embed_h = factor.columns(zero.offset, zero.dim).into_owned();

    Ok(DilationSpace {
        hat: hat.clone(),
        margin,
        gram,
        factor,
        embed_h,
        spectrum: GramSpectrum { min_eigenvalue, max_eigenvalue, smallest_kept, largest_dropped, rank_cutoff: cut },
    })
}

impl DilationSpace {
    pub fn hat(&self) -> &HatSemigroup {
        &self.hat
    }

    pub fn system(&self) -> &TwistedProductSystem {
        self.hat.system()
    }

    pub fn big(&self) -> &BigSpace {
        self.hat.big()
    }

    pub fn horizon(&self) -> GridPoint {
        self.big().horizon()
    }

    pub fn margin(&self) -> GridPoint {
        self.margin
    }

    /// Highest level whose generators form the domain of the lifted
    /// operators: `horizon − margin`.
    pub fn inner_level(&self) -> GridPoint {
        self.horizon().checked_sub(self.margin).expect("margin ≤ horizon")
    }

    pub fn dim_k(&self) -> usize {
        self.factor.nrows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    pub fn embed_h(&self) -> &CMatrix {
        &self.embed_h
    }

    pub fn spectrum(&self) -> &GramSpectrum {
        &self.spectrum
    }

    /// `‖F* F − G‖_F`
    pub fn factorization_residual(&self) -> f64 {
        (self.factor.adjoint() * &self.factor - &self.gram).norm()
    }

    /// `‖ι*ι − I_H‖_F`
    pub fn embedding_residual(&self) -> f64 {
        (self.embed_h.adjoint() * &self.embed_h - identity(self.big().dim_h())).norm()
    }

    /// Generators at one level: `W_g : X(g) ⊗ H → K`, `x ⊗ h ↦ V̂_g(δ_g·x⊗h)`.
    pub fn level_generators(&self, level: GridPoint) -> Result<CMatrix> {
        let b = self.big().block(level)?;
        Ok(self.factor.columns(b.offset, b.dim).into_owned())
    }

    /// Generators at every level `≤ level`, in block order.
    pub fn generators_up_to(&self, level: GridPoint) -> Result<CMatrix> {
        if !level.le(self.horizon()) {
            return Err(Error::OutOfHorizon { point: level, limit: self.horizon() });
        }
        let cols: Vec<&Block> = self.big().blocks().iter().filter(|b| b.level.le(level)).collect();
        let total: usize = cols.iter().map(|b| b.dim).sum();
        let mut out = CMatrix::zeros(self.dim_k(), total);
        let mut at = 0;
        for b in cols {
            out.columns_mut(at, b.dim).copy_from(&self.factor.columns(b.offset, b.dim));
            at += b.dim;
        }
        Ok(out)
    }

    /// Orthogonal projection onto `K_level`, the span of generators at
    /// levels `≤ level`.
    pub fn projection_up_to(&self, level: GridPoint) -> Result<CMatrix> {
        Ok(crate::linalg::range_projection(&self.generators_up_to(level)?, RANGE_TOL))
    }

    /// `dim K_level`.
    pub fn dim_up_to(&self, level: GridPoint) -> Result<usize> {
        Ok(crate::linalg::range_basis(&self.generators_up_to(level)?, RANGE_TOL).ncols())
    }
}

/// Relative singular-value cutoff for spans of generator columns; the square
/// root of the Gram rank cutoff, so both notions of rank agree.
pub(crate) const RANGE_TOL: f64 = 1e-5;
