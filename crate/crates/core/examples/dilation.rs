//! Finite-horizon dilation of the reset channel paired with the identity,
//! and of a pair of Pauli conjugations.
//!
//! ```bash
//! cargo run --release --example dilation
//! ```

use cpdil::chan::KrausFamily;
use cpdil::dilation::run_pipeline;
use cpdil::families::{pauli_x, pauli_z, reset_map};
use cpdil::linalg::{fro, DEFAULT_TOL};
use cpdil::GridPoint;

fn main() -> cpdil::Result<()> {
    let horizon = GridPoint::new(3, 3);
    let margin = GridPoint::new(1, 1);

    let theta = reset_map();
    let phi = KrausFamily::identity(2);
    let (dil, report) = run_pipeline(&theta, &phi, None, horizon, margin, DEFAULT_TOL)?;
    println!("reset / identity: dim K = {}, pass = {}", report.dim_k, report.pass);
    println!("  gram min eigenvalue {:.2e}", report.gram.min_eigenvalue);
    println!("  largest dilation residual {:.2e}", report.dilation.residuals.max_value());

    // Compressing α back to H recovers the semigroup.
    let a = cpdil::families::hadamard();
    let g = GridPoint::new(1, 0);
    let gap = fro(&(dil.compressed_alpha(g, &a)? - theta.apply(&a)?));
    println!("  ι* α(1,0)(ι a ι*) ι − Θ(a): {gap:.2e}");

    let theta = KrausFamily::conjugation(pauli_z())?;
    let phi = KrausFamily::conjugation(pauli_x())?;
    let (_, report) = run_pipeline(&theta, &phi, None, horizon, margin, DEFAULT_TOL)?;
    println!("Z / X conjugations: dim K = {}, pass = {}", report.dim_k, report.pass);
    Ok(())
}
