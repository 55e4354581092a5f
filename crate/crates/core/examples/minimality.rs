//! Minimality diagnostics: how quickly the lifted copies of `B(H)` span `K`,
//! and the dimension of their commutant.
//!
//! ```bash
//! cargo run --release --example minimality
//! ```

use cpdil::chan::KrausFamily;
use cpdil::dilation::{build_big_space, build_dilation_space, lift_operators, minimality_check};
use cpdil::families::reset_map;
use cpdil::linalg::DEFAULT_TOL;
use cpdil::prodsys::build_product_system;
use cpdil::strongcomm::strong_commutation_certificate;
use cpdil::GridPoint;

fn main() -> cpdil::Result<()> {
    let theta = reset_map();
    let phi = KrausFamily::identity(2);
    let cert = strong_commutation_certificate(&theta, &phi, DEFAULT_TOL)?;
    let sys = build_product_system(&theta, &phi, &cert, DEFAULT_TOL)?;

    for horizon in [GridPoint::new(1, 0), GridPoint::new(2, 0), GridPoint::new(2, 2)] {
        let hat = build_big_space(&sys, horizon)?;
        let dsp = build_dilation_space(&hat, GridPoint::ZERO, DEFAULT_TOL)?;
        let dil = lift_operators(&dsp)?;
        let m = minimality_check(&dil, horizon, DEFAULT_TOL)?;
        println!(
            "horizon {horizon}: dim K = {}, span {}/{} after {} rounds, commutant {}, algebra {:?}",
            dil.dim_k(),
            m.span_dim,
            m.span_target,
            m.span_depth,
            m.commutant_dim,
            m.algebra.status
        );
    }
    Ok(())
}
