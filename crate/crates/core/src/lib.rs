//! Completely positive maps on matrix algebras, strong commutation of
//! commuting pairs, and finite-horizon `E₀`-dilations of the discrete
//! two-parameter semigroups they generate.
//!
//! The modules follow the pipeline:
//!
//! * [`chan`]: Kraus families, Choi matrices, superoperators, and the unitary
//!   relating two Kraus presentations of one map.
//! * [`strongcomm`]: commutation tests and strong commutation certificates.
//! * [`stochastic`]: the same questions for stochastic matrices, where
//!   strong commutation reduces to a support-counting criterion.
//! * [`prodsys`]: the twisted product system `X(a, b) = E^{⊗a} ⊗ F^{⊗b}` and
//!   its representation on `H`.
//! * [`dilation`]: the dilation space `K`, the lifted isometries, the
//!   endomorphism semigroup `α`, and minimality diagnostics.
//! * [`json`] and [`cli`]: file formats and the `cpdil` command line.
//!
//! [`families`] holds standard matrices and seeded generators of commuting
//! pairs.

pub mod chan;
pub mod cli;
pub mod dilation;
pub mod error;
pub mod families;
pub mod json;
pub mod linalg;
pub mod prodsys;
pub mod stochastic;
pub mod strongcomm;

pub use error::{Error, Result};
pub use prodsys::GridPoint;
