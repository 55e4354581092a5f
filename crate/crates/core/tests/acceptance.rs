//! The eight acceptance criteria, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use cpdil::chan::{intertwining_residual, KrausFamily};
use cpdil::dilation::{
    build_big_space, build_dilation_space, lift_operators, minimality_check, verify_e_dilation, EDilation,
};
use cpdil::families::{
    commuting_conjugations, pauli_mixtures, pauli_x, pauli_z, random_irreducible_stochastic, random_unitary, reset_map,
    shared_basis_mixtures, stochastic_polynomial, theta_and_twisted, weyl_clock, weyl_mixtures, weyl_shift,
};
use cpdil::linalg::{identity, matrix_unit, CMatrix};
use cpdil::prodsys::{build_product_system, flip_from_certificate, verify_representation, TwistedProductSystem};
use cpdil::stochastic::{
    card_criterion, counterexample_pair, semigroup_at, strongly_commute_diagonal, StochasticMatrix,
};
use cpdil::strongcomm::{composite_families, strong_commutation_certificate, StrongCommutationCertificate};
use cpdil::GridPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO_TOL: f64 = 1e-12;

// Criterion 1
const COMMUTE_TOL_3X3: f64 = 1e-12;
const BUDGET_3X3: Duration = Duration::from_secs(1);
// Criterion 2
const SEMIGROUP_COMMUTE_TOL: f64 = 1e-8;
const SEMIGROUP_TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
const BUDGET_SEMIGROUPS: Duration = Duration::from_secs(5);
// Criteria 3 and 4
const CERTIFICATE_TOL: f64 = 1e-8;
const REPRESENTATION_TOL: f64 = 1e-8;
const BUDGET_CERTIFICATES: Duration = Duration::from_secs(10);
// Criteria 5 and 6
const GRAM_FLOOR: f64 = 1e-10;
const DILATION_TOL: f64 = 1e-8;
const BUDGET_DILATION: Duration = Duration::from_secs(60);
const BUDGET_MINIMALITY: Duration = Duration::from_secs(60);
// Criterion 7
const NEGATIVE_CONTROL_FLOOR: f64 = 1e-3;
// Criterion 8
const ORACLE_TOL: f64 = 1e-9;

const HORIZON: GridPoint = GridPoint { a: 3, b: 3 };
const MARGIN: GridPoint = GridPoint { a: 1, b: 1 };

struct Outcome {
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome { pass, detail, elapsed: start.elapsed() }
}

fn within(o: Outcome, budget: Duration) -> Outcome {
    let pass = o.pass && o.elapsed < budget;
    let detail = format!("{}; {:.2?} of {:.0?}", o.detail, o.elapsed, budget);
    Outcome { pass, detail, elapsed: o.elapsed }
}

fn stochastic_counterexample() -> (bool, String) {
    let (p, q) = counterexample_pair();
    let r = strongly_commute_diagonal(&p, &q, COMMUTE_TOL_3X3, ZERO_TOL).unwrap();
    let first = r.card.witnesses.first();
    let witness_ok = first.is_some_and(|w| (w.i, w.k, w.count_qp, w.count_pq) == (0, 0, 2, 3));
    let pass =
        r.commute && r.commutation_residual <= COMMUTE_TOL_3X3 && !r.card.holds && witness_ok && !r.strongly_commute;
    let w = first.map_or("none".into(), |w| format!("({}, {}) counts {} vs {}", w.i, w.k, w.count_qp, w.count_pq));
    (
        pass,
        format!(
            "commute residual {:.1e}, first witness {w}, strongly commute {}",
            r.commutation_residual, r.strongly_commute
        ),
    )
}

fn irreducible_semigroups() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pass = true;
    let (mut min_entry, mut worst_comm) = (f64::INFINITY, 0.0f64);
    for _ in 0..5 {
        let n = rng.random_range(3..=5);
        let p = random_irreducible_stochastic(n, &mut rng);
        let coeffs = [rng.random::<f64>(), 0.1 + rng.random::<f64>(), rng.random::<f64>()];
        let q = stochastic_polynomial(&p, &coeffs);
        let p = StochasticMatrix::new(p, 1e-9).unwrap();
        let q = StochasticMatrix::new(q, 1e-9).unwrap();
        for &t in &SEMIGROUP_TIMES {
            for &s in &SEMIGROUP_TIMES {
                let pt = semigroup_at(&p, t).unwrap();
                let qs = semigroup_at(&q, s).unwrap();
                min_entry = min_entry.min(pt.matrix().min()).min(qs.matrix().min());
                let comm = (pt.matrix() * qs.matrix() - qs.matrix() * pt.matrix()).norm();
                worst_comm = worst_comm.max(comm);
                let card = card_criterion(&pt, &qs, ZERO_TOL).unwrap();
                pass &= comm <= SEMIGROUP_COMMUTE_TOL && card.holds;
            }
        }
    }
    pass &= min_entry > 0.0;
    (pass, format!("min entry {min_entry:.3e}, max commutator {worst_comm:.1e}"))
}

/// Twenty commuting CP pairs on `M_2` and `M_3` from the standard recipes.
fn certified_suite() -> Vec<(String, KrausFamily, KrausFamily)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = Vec::new();
    for i in 0..20 {
        let n = 2 + i % 2;
        let (name, (theta, phi)) = match i % 5 {
            0 => ("conjugations", commuting_conjugations(n, &mut rng)),
            1 => ("shared basis", shared_basis_mixtures(n, 2, 3, &mut rng)),
            2 => ("twisted", theta_and_twisted(n, 2, &mut rng)),
            3 => ("pauli", pauli_mixtures(2, 2 + i % 3, &mut rng)),
            _ => ("weyl", weyl_mixtures(n, 2, 2, &mut rng)),
        };
        pairs.push((format!("{name} on M{}", theta.dim()), theta, phi));
    }
    pairs
}

fn certificates(suite: &[(String, KrausFamily, KrausFamily)]) -> (bool, String, Vec<StrongCommutationCertificate>) {
    let mut certs = Vec::new();
    let mut worst = 0.0f64;
    for (name, theta, phi) in suite {
        match strong_commutation_certificate(theta, phi, CERTIFICATE_TOL) {
            Ok(c) => {
                worst = worst.max(c.unitarity_residual).max(c.intertwining_residual);
                certs.push(c);
            }
            Err(e) => return (false, format!("{name}: {e}"), certs),
        }
    }
    (worst <= CERTIFICATE_TOL, format!("{} pairs certified, max residual {worst:.1e}", certs.len()), certs)
}

fn representations(
    suite: &[(String, KrausFamily, KrausFamily)],
    certs: &[StrongCommutationCertificate],
) -> (bool, String) {
    let mut pass = certs.len() == suite.len();
    let mut worst = 0.0f64;
    let mut coisometries = 0;
    for ((name, theta, phi), cert) in suite.iter().zip(certs) {
        let sys = build_product_system(theta, phi, cert, REPRESENTATION_TOL).unwrap();
        let rep = match verify_representation(&sys, HORIZON, REPRESENTATION_TOL) {
            Ok(r) => r,
            Err(e) => return (false, format!("{name}: {e}")),
        };
        worst = worst.max(rep.max_residual());
        coisometries += usize::from(rep.coisometry_residual.is_some());
        pass &= rep.pass && rep.max_residual() <= REPRESENTATION_TOL && rep.coisometry_residual.is_some();
    }
    (pass, format!("{} pairs at {HORIZON}, {coisometries} coisometry checks, max residual {worst:.1e}", certs.len()))
}

fn dilation_suite() -> Vec<(String, KrausFamily, KrausFamily)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut suite = vec![
        ("identity".to_string(), KrausFamily::identity(2), KrausFamily::identity(2)),
        (
            "Z / X".to_string(),
            KrausFamily::conjugation(pauli_z()).unwrap(),
            KrausFamily::conjugation(pauli_x()).unwrap(),
        ),
        ("reset / identity".to_string(), reset_map(), KrausFamily::identity(2)),
    ];
    let (t, p) = pauli_mixtures(2, 2, &mut rng);
    suite.push(("pauli".into(), t, p));
    let (t, p) = pauli_mixtures(2, 2, &mut rng);
    suite.push(("pauli".into(), t, p));
    let (t, p) = shared_basis_mixtures(2, 2, 2, &mut rng);
    suite.push(("shared basis".into(), t, p));
    let (t, p) = theta_and_twisted(2, 2, &mut rng);
    suite.push(("twisted".into(), t, p));
    let (t, p) = weyl_mixtures(2, 2, 2, &mut rng);
    suite.push(("weyl".into(), t, p));
    suite
}

fn dilations(suite: &[(String, KrausFamily, KrausFamily)]) -> (bool, String, Vec<EDilation>) {
    let mut built = Vec::new();
    let mut pass = true;
    let (mut min_gram, mut worst) = (f64::INFINITY, 0.0f64);
    let mut dims = Vec::new();
    for (name, theta, phi) in suite {
        let run = || -> cpdil::Result<(EDilation, f64, bool, f64)> {
            let cert = strong_commutation_certificate(theta, phi, DILATION_TOL)?;
            let sys = build_product_system(theta, phi, &cert, DILATION_TOL)?;
            let hat = build_big_space(&sys, HORIZON)?;
            let dsp = build_dilation_space(&hat, MARGIN, DILATION_TOL)?;
            let gram_min = dsp.spectrum().min_eigenvalue;
            let dil = lift_operators(&dsp)?;
            let report = verify_e_dilation(&dil, theta, phi, MARGIN, DILATION_TOL)?;
            let r = &report.residuals;
            let complete = r.coisometry.is_some() && report.increasing.is_some();
            let ok = report.pass && complete && report.increasing.is_some_and(|c| c.pass);
            let largest =
                [Some(r.isometry), r.coisometry, Some(r.dilation), Some(r.semigroup), Some(r.multiplicativity)]
                    .into_iter()
                    .flatten()
                    .map(|c| c.value)
                    .fold(0.0, f64::max);
            Ok((dil, gram_min, ok && largest <= DILATION_TOL, largest))
        };
        match run() {
            Ok((dil, gram_min, ok, largest)) => {
                min_gram = min_gram.min(gram_min);
                worst = worst.max(largest);
                pass &= ok && gram_min >= -GRAM_FLOOR;
                dims.push(format!("{name}:{}", dil.dim_k()));
                built.push(dil);
            }
            Err(e) => return (false, format!("{name}: {e}"), built),
        }
    }
    (pass, format!("gram min {min_gram:.1e}, max residual {worst:.1e}, dimK [{}]", dims.join(", ")), built)
}

fn minimality(built: &[EDilation]) -> (bool, String) {
    let mut pass = !built.is_empty();
    let mut commutants = Vec::new();
    for dil in built {
        let m = match minimality_check(dil, HORIZON, DILATION_TOL) {
            Ok(m) => m,
            Err(e) => return (false, e.to_string()),
        };
        pass &= m.span_dim == dil.dim_k() && m.span_target == dil.dim_k() && m.commutant_dim == 1;
        commutants.push(format!("{}/{}:{}", m.span_dim, dil.dim_k(), m.commutant_dim));
    }
    (pass, format!("span/dimK:commutant [{}]", commutants.join(", ")))
}

fn negative_control() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (theta, phi) = pauli_mixtures(2, 2, &mut rng);
    let (m, k) = (theta.len(), phi.len());
    let u = random_unitary(m * k, &mut rng);
    let (forward, backward) = composite_families(&theta, &phi).unwrap();
    let intertwining = intertwining_residual(&forward, &backward, &u);
    let sys = TwistedProductSystem::from_flip(theta, phi, flip_from_certificate(&u, m, k)).unwrap();
    let rep = verify_representation(&sys, HORIZON, DILATION_TOL).unwrap();
    let pass = intertwining > NEGATIVE_CONTROL_FLOOR && rep.homomorphism_residual > NEGATIVE_CONTROL_FLOOR && !rep.pass;
    (pass, format!("random unitary: intertwining {intertwining:.2e}, homomorphism {:.2e}", rep.homomorphism_residual))
}

fn word(u: &CMatrix, v: &CMatrix, g: GridPoint) -> CMatrix {
    let n = u.nrows();
    let mut w = identity(n);
    for _ in 0..g.a {
        w = &w * u;
    }
    for _ in 0..g.b {
        w = &w * v;
    }
    w
}

fn endomorphism_oracle() -> (bool, String) {
    let horizon = GridPoint::new(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = vec![(pauli_z(), pauli_x()), (weyl_clock(3), weyl_shift(3))];
    for n in [2, 3] {
        let (t, p) = commuting_conjugations(n, &mut rng);
        pairs.push((t.ops()[0].clone(), p.ops()[0].clone()));
    }
    let mut worst = 0.0f64;
    let mut pass = true;
    for (u, v) in &pairs {
        let theta = KrausFamily::conjugation(u.clone()).unwrap();
        let phi = KrausFamily::conjugation(v.clone()).unwrap();
        let cert = strong_commutation_certificate(&theta, &phi, ORACLE_TOL).unwrap();
        let sys = build_product_system(&theta, &phi, &cert, ORACLE_TOL).unwrap();
        let hat = build_big_space(&sys, horizon).unwrap();
        let dsp = build_dilation_space(&hat, horizon, ORACLE_TOL).unwrap();
        let dil = lift_operators(&dsp).unwrap();
        let n = u.nrows();
        pass &= dil.dim_k() == n;
        let e = dil.space().embed_h().clone();
        for g in horizon.down_set() {
            // Conjugation by the word, carried to K through the embedding.
            let w = &e * word(u, v, g) * e.adjoint();
            for i in 0..n {
                for j in 0..n {
                    let b = matrix_unit(n, i, j);
                    let diff = dil.alpha(g, &b).unwrap() - &w * &b * w.adjoint();
                    worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    let x = matrix_unit(n, i, j);
                    let diff = dil.compressed_alpha(g, &x).unwrap() - word(u, v, g) * &x * word(u, v, g).adjoint();
                    worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
    }
    pass &= worst <= ORACLE_TOL;
    (pass, format!("{} pairs over g ≤ {horizon}, max entrywise error {worst:.1e}", pairs.len()))
}

#[test]
fn acceptance_criteria() {
    let mut lines = Vec::new();

    lines.push(("1 stochastic 3x3 counterexample", within(timed(stochastic_counterexample), BUDGET_3X3)));
    lines.push(("2 irreducible semigroups", within(timed(irreducible_semigroups), BUDGET_SEMIGROUPS)));

    let suite = certified_suite();
    let mut certs = Vec::new();
    let c3 = timed(|| {
        let (pass, detail, c) = certificates(&suite);
        certs = c;
        (pass, detail)
    });
    lines.push(("3 strong commutation certificates", within(c3, BUDGET_CERTIFICATES)));
    lines.push(("4 covariant representation", timed(|| representations(&suite, &certs))));

    let dsuite = dilation_suite();
    let mut built = Vec::new();
    let c5 = timed(|| {
        let (pass, detail, b) = dilations(&dsuite);
        built = b;
        (pass, detail)
    });
    lines.push(("5 dilation pipeline", within(c5, BUDGET_DILATION)));
    let pass5 = lines.last().unwrap().1.pass;
    let c6 = timed(|| {
        let (pass, detail) = minimality(&built);
        (pass && pass5, detail)
    });
    lines.push(("6 minimality and commutant", within(c6, BUDGET_MINIMALITY)));
    lines.push(("7 negative control", timed(negative_control)));
    lines.push(("8 endomorphism oracle", timed(endomorphism_oracle)));

    for (name, o) in &lines {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<_> = lines.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
