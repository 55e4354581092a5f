//! The twisted product system of a strongly commuting pair and its
//! representation on `H`.
//!
//! ```bash
//! cargo run --example product_system
//! ```

use cpdil::families::pauli_mixtures;
use cpdil::linalg::{fro, DEFAULT_TOL};
use cpdil::prodsys::{build_product_system, verify_representation, FiberVector, GridPoint};
use cpdil::strongcomm::strong_commutation_certificate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cpdil::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (theta, phi) = pauli_mixtures(2, 2, &mut rng);
    let cert = strong_commutation_certificate(&theta, &phi, DEFAULT_TOL)?;
    let sys = build_product_system(&theta, &phi, &cert, DEFAULT_TOL)?;
    println!("E has dimension {}, F has dimension {}", sys.m(), sys.k());

    for g in GridPoint::new(2, 2).down_set() {
        println!("  dim X{g} = {}", sys.fiber_dim(g)?);
    }

    // The representation is multiplicative: T(x ⊗ y) = T(x) T(y).
    let (g, h) = (GridPoint::new(1, 1), GridPoint::new(0, 1));
    let x = FiberVector::basis(&sys, g, 1)?;
    let y = FiberVector::basis(&sys, h, 1)?;
    let xy = sys.multiply(&x, &y)?;
    let gap = fro(&(sys.represent(&xy)? - sys.represent(&x)? * sys.represent(&y)?));
    println!("T(x y) − T(x) T(y): {gap:.2e}");

    let rep = verify_representation(&sys, GridPoint::new(3, 3), DEFAULT_TOL)?;
    println!(
        "horizon (3, 3): rep {:.2e}, homomorphism {:.2e}, coisometry {:?}, pass {}",
        rep.rep_residual, rep.homomorphism_residual, rep.coisometry_residual, rep.pass
    );
    Ok(())
}
