//! Certificates of strong commutation for commuting qubit channels.
//!
//! ```bash
//! cargo run --example strong_commutation
//! ```

use cpdil::chan::KrausFamily;
use cpdil::families::{pauli_mixtures, pauli_x, pauli_z, reset_map, theta_and_twisted};
use cpdil::linalg::DEFAULT_TOL;
use cpdil::strongcomm::{check_commute, strong_commutation_certificate, verify_certificate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(name: &str, theta: &KrausFamily, phi: &KrausFamily) -> cpdil::Result<()> {
    let comm = check_commute(theta, phi, DEFAULT_TOL)?;
    if !comm.commute {
        println!("{name}: maps do not commute (residual {:.2e})", comm.residual);
        return Ok(());
    }
    let cert = strong_commutation_certificate(theta, phi, DEFAULT_TOL)?;
    let check = verify_certificate(theta, phi, &cert.u, DEFAULT_TOL)?;
    println!(
        "{name}: {}x{} certificate, unitarity {:.2e}, intertwining {:.2e}, verified {}",
        cert.u.nrows(),
        cert.u.ncols(),
        check.unitarity_residual,
        check.intertwining_residual,
        check.pass
    );
    Ok(())
}

fn main() -> cpdil::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    report("Z / X conjugations", &KrausFamily::conjugation(pauli_z())?, &KrausFamily::conjugation(pauli_x())?)?;
    report("reset / identity", &reset_map(), &KrausFamily::identity(2))?;
    let (theta, phi) = pauli_mixtures(2, 2, &mut rng);
    report("pauli mixtures", &theta, &phi)?;
    let (theta, phi) = theta_and_twisted(3, 2, &mut rng);
    report("map and its twist", &theta, &phi)?;
    report("reset / X (not commuting)", &reset_map(), &KrausFamily::conjugation(pauli_x())?)?;
    Ok(())
}
