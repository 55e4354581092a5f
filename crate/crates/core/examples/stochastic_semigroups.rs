//! Strong commutation of stochastic matrices, where it reduces to counting
//! supports, and the semigroups `e^{t(P − I)}` of irreducible matrices.
//!
//! ```bash
//! cargo run --example stochastic_semigroups
//! ```

use cpdil::families::{random_irreducible_stochastic, stochastic_polynomial};
use cpdil::linalg::DEFAULT_TOL;
use cpdil::stochastic::{
    build_diagonal_intertwiner, counterexample_pair, is_irreducible, semigroup_at, strongly_commute_diagonal,
    StochasticMatrix, DEFAULT_ZERO_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cpdil::Result<()> {
    let (p, q) = counterexample_pair();
    let r = strongly_commute_diagonal(&p, &q, DEFAULT_TOL, DEFAULT_ZERO_TOL)?;
    println!(
        "3x3 pair: commute {} (residual {:.1e}), strongly commute {}",
        r.commute, r.commutation_residual, r.strongly_commute
    );
    for w in &r.card.witnesses {
        println!("  witness ({}, {}): {} vs {} paths", w.i, w.k, w.count_qp, w.count_pq);
    }

    // Passing to the semigroups fills every support, so the criterion holds.
    for t in [0.1, 1.0] {
        let (pt, qt) = (semigroup_at(&p, t)?, semigroup_at(&q, t)?);
        let r = strongly_commute_diagonal(&pt, &qt, 1e-8, DEFAULT_ZERO_TOL)?;
        println!("t = {t}: strongly commute {}", r.strongly_commute);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = StochasticMatrix::new(random_irreducible_stochastic(4, &mut rng), DEFAULT_TOL)?;
    let q = StochasticMatrix::new(stochastic_polynomial(p.matrix(), &[0.2, 0.5, 0.3]), DEFAULT_TOL)?;
    println!("random P irreducible: {}", is_irreducible(&p, DEFAULT_ZERO_TOL));
    let r = strongly_commute_diagonal(&p, &q, 1e-8, DEFAULT_ZERO_TOL)?;
    println!("P and a polynomial in P: commute {}, strongly commute {}", r.commute, r.strongly_commute);
    let (pt, qs) = (semigroup_at(&p, 0.5)?, semigroup_at(&q, 2.0)?);
    let min_entry = pt.matrix().min().min(qs.matrix().min());
    let r = strongly_commute_diagonal(&pt, &qs, 1e-8, DEFAULT_ZERO_TOL)?;
    println!("their semigroups at t = 0.5, s = 2: min entry {min_entry:.3}, strongly commute {}", r.strongly_commute);
    if r.strongly_commute {
        let it = build_diagonal_intertwiner(&pt, &qs, 1e-8, DEFAULT_ZERO_TOL)?;
        println!(
            "  intertwiner: {} blocks, unitarity {:.2e}, intertwining {:.2e}",
            it.blocks.len(),
            it.unitarity_residual,
            it.intertwining_residual
        );
    }
    Ok(())
}
