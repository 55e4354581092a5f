//! Kraus, Choi and superoperator views of a few qubit channels.
//!
//! ```bash
//! cargo run --example channels
//! ```

use cpdil::chan::{choi_to_kraus, classify, classify_choi, compose, kraus_equivalence_unitary, KrausFamily};
use cpdil::families::{hadamard, pauli_x, pauli_z, reset_map};
use cpdil::linalg::{c, fro, identity, DEFAULT_TOL};

fn main() -> cpdil::Result<()> {
    let depolarizing = KrausFamily::new(vec![
        identity(2) * c(0.9f64.sqrt(), 0.0),
        pauli_x() * c((0.1f64 / 3.0).sqrt(), 0.0),
        pauli_z() * c((0.1f64 / 3.0).sqrt(), 0.0),
        cpdil::families::pauli_y() * c((0.1f64 / 3.0).sqrt(), 0.0),
    ])?;
    let reset = reset_map();

    for (name, k) in [("depolarizing", &depolarizing), ("reset", &reset)] {
        let r = classify(k, DEFAULT_TOL);
        println!(
            "{name:>13}: cp={} unital={} contractive={} kraus rank={}",
            r.is_cp, r.is_unital, r.is_contractive, r.kraus_len
        );
    }

    // The Choi route recovers a Kraus family of the same map.
    let choi = depolarizing.to_choi();
    let again = choi_to_kraus(&choi, DEFAULT_TOL)?;
    let probe = hadamard();
    let gap = fro(&(depolarizing.apply(&probe)? - again.apply(&probe)?));
    println!("choi round trip: {} operators, output gap {gap:.2e}", again.len());
    println!("choi classification: cp={}", classify_choi(&choi, DEFAULT_TOL).is_cp);

    // Two presentations of one map differ by a unitary mixing of operators.
    let eq = kraus_equivalence_unitary(&depolarizing, &again, DEFAULT_TOL)?;
    println!(
        "kraus equivalence: unitarity {:.2e}, intertwining {:.2e}",
        eq.unitarity_residual, eq.intertwining_residual
    );

    let both = compose(&reset, &depolarizing)?;
    let sup = both.to_superoperator();
    let direct = reset.apply(&depolarizing.apply(&probe)?)?;
    println!("composition via superoperator: gap {:.2e}", fro(&(sup.apply(&probe)? - direct)));
    Ok(())
}
