//! The `cpdil` command line.
//!
//! Exit status: `0` when the property holds or the build verified, `1` when
//! the property is false (the report carries a witness), `2` for invalid
//! input or a failed internal verification.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::chan::{classify, classify_choi, KrausFamily};
use crate::dilation::{run_pipeline, PipelineReport};
use crate::error::{Error, Result};
use crate::json::{
    is_pair, matrix_to_json, parse_map, parse_pair, read_json, real_matrix_to_json, ChannelSpec, MapSpec, PairSpec,
};
use crate::linalg::DEFAULT_TOL;
use crate::prodsys::{build_product_system, verify_representation, GridPoint, DEFAULT_FIBER_CAP};
use crate::stochastic::{
    build_diagonal_intertwiner, card_criterion, is_irreducible, semigroup_at, strongly_commute_diagonal, validate,
    StochasticMatrix, DEFAULT_ZERO_TOL,
};
use crate::strongcomm::{
    check_commute, strong_commutation_certificate, verify_certificate, StrongCommutationCertificate,
};

pub const TOL_ENV: &str = "CPDIL_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds = 0,
    Fails = 1,
    Invalid = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "cpdil", version, about = "Strong commutation and finite-horizon E0-dilation of commuting CP maps")]
pub struct Cli {
    /// Numerical tolerance for every residual check
    #[arg(long, global = true, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Entries at or below this count as zero in support computations
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    /// Pretty-printed JSON report, or summary lines
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complete positivity, unitality and contractivity of one map
    Classify { input: PathBuf },
    /// Whether two maps commute: a pair file, or two map files
    Commute {
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
    },
    /// Strong commutation, with a certificate unitary or a cardinality witness
    StrongCommute {
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
    },
    /// Stochastic matrices: cardinality criterion, semigroups, irreducibility
    Stochastic {
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        check_card: bool,
        /// Evaluate e^{t(P − I)} at this time
        #[arg(long, value_name = "T")]
        semigroup: Option<f64>,
        #[arg(long)]
        irreducible: bool,
    },
    /// The product system of a strongly commuting pair
    Prodsys {
        #[command(subcommand)]
        action: ProdsysAction,
    },
    /// Build and verify the finite-horizon dilation
    Dilate {
        /// A pair file, or two channel files
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        /// Grid point up to which the dilation space is built
        #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [2, 2])]
        horizon: Vec<usize>,
        /// Steps for which the lifted operators are exposed and verified
        #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [1, 1])]
        margin: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProdsysAction {
    /// Check the representation identity, homomorphism and coisometry
    Verify {
        /// A pair file, or two channel files
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        /// Check every grid point up to this one
        #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [2, 2])]
        horizon: Vec<usize>,
        /// Cap on dim X(g) · dim H
        #[arg(long, default_value_t = DEFAULT_FIBER_CAP)]
        cap: usize,
    },
}

/// The result of one invocation, kept in memory so tests can inspect it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    status: Status,
    body: Value,
    summary: Vec<String>,
}

impl Report {
    fn new(status: Status, body: Value, summary: Vec<String>) -> Self {
        Self { status, body, summary }
    }
}

pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { Status::Invalid as i32 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = check_config(cli).and_then(|_| dispatch(cli));
    match result {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report.body).expect("reports serialize");
                    s.push('\n');
                    s
                }
                Format::Text => report.summary.iter().map(|l| format!("{l}\n")).collect(),
            };
            Outcome { code: report.status as i32, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: Status::Invalid as i32, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn check_config(cli: &Cli) -> Result<()> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance must be positive and finite, got {}", cli.tol)));
    }
    if !(cli.zero_tol >= 0.0 && cli.zero_tol.is_finite()) {
        return Err(Error::invalid(format!("zero tolerance must be nonnegative and finite, got {}", cli.zero_tol)));
    }
    Ok(())
}

fn grid(v: &[usize]) -> GridPoint {
    GridPoint::new(v[0], v[1])
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let (tol, zero_tol) = (cli.tol, cli.zero_tol);
    match &cli.command {
        Command::Classify { input } => classify_cmd(input, tol),
        Command::Commute { inputs } => commute_cmd(&load_pair(inputs)?, tol),
        Command::StrongCommute { inputs } => strong_commute_cmd(&load_pair(inputs)?, tol, zero_tol),
        Command::Stochastic { inputs, check_card, semigroup, irreducible } => {
            stochastic_cmd(inputs, *check_card, *semigroup, *irreducible, tol, zero_tol)
        }
        Command::Prodsys { action: ProdsysAction::Verify { inputs, horizon, cap } } => {
            prodsys_cmd(&load_pair(inputs)?, grid(horizon), *cap, tol)
        }
        Command::Dilate { inputs, horizon, margin } => {
            dilate_cmd(&load_pair(inputs)?, grid(horizon), grid(margin), tol)
        }
    }
}

fn load_pair(inputs: &[PathBuf]) -> Result<PairSpec> {
    match inputs {
        [one] => {
            let v = read_json(one)?;
            if !is_pair(&v) {
                return Err(Error::invalid(format!(
                    "{}: expected a pair file with \"theta\" and \"phi\", or give two map files",
                    one.display()
                )));
            }
            parse_pair(&v, "")
        }
        [a, b] => Ok(PairSpec {
            theta: parse_map(&read_json(a)?, "")?,
            phi: parse_map(&read_json(b)?, "")?,
            certificate: None,
        }),
        _ => Err(Error::invalid("expected one pair file or two map files")),
    }
}

enum Kinds {
    Channels(KrausFamily, KrausFamily),
    Stochastic(StochasticMatrix, StochasticMatrix),
}

fn pair_kinds(pair: &PairSpec, tol: f64) -> Result<Kinds> {
    match (&pair.theta, &pair.phi) {
        (MapSpec::Channel(_), MapSpec::Channel(_)) => {
            Ok(Kinds::Channels(pair.theta.to_kraus(tol)?, pair.phi.to_kraus(tol)?))
        }
        (MapSpec::Stochastic(_), MapSpec::Stochastic(_)) => {
            Ok(Kinds::Stochastic(pair.theta.to_stochastic(tol)?, pair.phi.to_stochastic(tol)?))
        }
        (a, b) => Err(Error::invalid(format!("cannot pair a {} with a {}", a.kind(), b.kind()))),
    }
}

fn channel_pair(pair: &PairSpec, tol: f64) -> Result<(KrausFamily, KrausFamily)> {
    match pair_kinds(pair, tol)? {
        Kinds::Channels(t, p) => Ok((t, p)),
        Kinds::Stochastic(..) => Err(Error::invalid("this subcommand needs channels, found stochastic matrices")),
    }
}

fn holds(b: bool) -> Status {
    if b {
        Status::Holds
    } else {
        Status::Fails
    }
}

fn classify_cmd(input: &Path, tol: f64) -> Result<Report> {
    let v = read_json(input)?;
    match parse_map(&v, "")? {
        MapSpec::Channel(spec) => {
            let (report, source) = match &spec {
                ChannelSpec::Kraus(ops) => {
                    (classify(&KrausFamily::with_tol(ops.clone(), f64::INFINITY)?, tol), "kraus")
                }
                ChannelSpec::Choi(choi) => (classify_choi(choi, tol), "choi"),
            };
            let mut body = serde_json::to_value(&report)?;
            body["kind"] = json!("channel");
            body["source"] = json!(source);
            let summary = vec![format!(
                "channel: cp={} unital={} contractive={} (min Choi eigenvalue {:.3e}, tol {:e})",
                report.is_cp, report.is_unital, report.is_contractive, report.min_choi_eigenvalue, tol
            )];
            Ok(Report::new(holds(report.is_cp && report.is_contractive), body, summary))
        }
        MapSpec::Stochastic(m) => {
            let (status, body) = match validate(&m, tol) {
                Ok(rows_ok) => {
                    let worst = (0..m.nrows()).map(|i| (m.row(i).sum() - 1.0).abs()).fold(0.0, f64::max);
                    (
                        holds(rows_ok && m.is_square()),
                        json!({
                            "kind": "stochastic",
                            "n": m.nrows(),
                            "is_stochastic": rows_ok && m.is_square(),
                            "row_sum_residual": worst,
                            "tol": tol,
                        }),
                    )
                }
                Err(Error::NegativeEntry { row, col, value }) => (
                    Status::Fails,
                    json!({
                        "kind": "stochastic",
                        "n": m.nrows(),
                        "is_stochastic": false,
                        "negative_entry": { "row": row, "col": col, "value": value },
                        "tol": tol,
                    }),
                ),
                Err(e) => return Err(e),
            };
            let summary = vec![format!("stochastic: {}", status == Status::Holds)];
            Ok(Report::new(status, body, summary))
        }
    }
}

fn commute_cmd(pair: &PairSpec, tol: f64) -> Result<Report> {
    match pair_kinds(pair, tol)? {
        Kinds::Channels(t, p) => {
            let r = check_commute(&t, &p, tol)?;
            let summary = vec![format!("commute: {} (residual {:.3e}, tol {:e})", r.commute, r.residual, tol)];
            let mut body = serde_json::to_value(&r)?;
            body["kind"] = json!("channel");
            Ok(Report::new(holds(r.commute), body, summary))
        }
        Kinds::Stochastic(p, q) => {
            let (pm, qm) = (p.matrix(), q.matrix());
            let residual = (pm * qm - qm * pm).norm();
            let commute = residual <= tol;
            let summary = vec![format!("commute: {commute} (residual {residual:.3e}, tol {tol:e})")];
            let body = json!({ "kind": "stochastic", "commute": commute, "residual": residual, "tol": tol });
            Ok(Report::new(holds(commute), body, summary))
        }
    }
}

fn certificate_json(cert: &StrongCommutationCertificate, tol: f64) -> Value {
    json!({
        "u": matrix_to_json(&cert.u),
        "unitarity_residual": cert.unitarity_residual,
        "intertwining_residual": cert.intertwining_residual,
        "tol": tol,
    })
}

fn strong_commute_cmd(pair: &PairSpec, tol: f64, zero_tol: f64) -> Result<Report> {
    match pair_kinds(pair, tol)? {
        Kinds::Channels(t, p) => {
            if let Some(u) = &pair.certificate {
                let check = verify_certificate(&t, &p, u, tol)?;
                let summary = vec![format!(
                    "supplied certificate: {} (unitarity {:.3e}, intertwining {:.3e}, tol {:e})",
                    check.pass, check.unitarity_residual, check.intertwining_residual, tol
                )];
                let body = json!({
                    "kind": "channel",
                    "strongly_commute": check.pass,
                    "certificate_source": "supplied",
                    "certificate_check": check,
                });
                return Ok(Report::new(holds(check.pass), body, summary));
            }
            let comm = check_commute(&t, &p, tol)?;
            if !comm.commute {
                let summary =
                    vec![format!("strongly commute: false (maps do not commute, residual {:.3e})", comm.residual)];
                let body = json!({
                    "kind": "channel",
                    "strongly_commute": false,
                    "commute": comm,
                });
                return Ok(Report::new(Status::Fails, body, summary));
            }
            let cert = strong_commutation_certificate(&t, &p, tol)?;
            let summary = vec![format!(
                "strongly commute: true ({}×{} certificate, unitarity {:.3e}, intertwining {:.3e}, tol {:e})",
                cert.u.nrows(),
                cert.u.ncols(),
                cert.unitarity_residual,
                cert.intertwining_residual,
                tol
            )];
            let body = json!({
                "kind": "channel",
                "strongly_commute": true,
                "commute": comm,
                "certificate_source": "computed",
                "certificate": certificate_json(&cert, tol),
            });
            Ok(Report::new(Status::Holds, body, summary))
        }
        Kinds::Stochastic(p, q) => {
            let r = strongly_commute_diagonal(&p, &q, tol, zero_tol)?;
            let mut body = serde_json::to_value(&r)?;
            body["kind"] = json!("stochastic");
            let mut summary = vec![format!(
                "strongly commute: {} (commute {}, residual {:.3e}; cardinality criterion {})",
                r.strongly_commute, r.commute, r.commutation_residual, r.card.holds
            )];
            for w in &r.card.witnesses {
                summary.push(format!("  witness ({}, {}): counts {} vs {}", w.i, w.k, w.count_qp, w.count_pq));
            }
            if r.strongly_commute {
                let it = build_diagonal_intertwiner(&p, &q, tol, zero_tol)?;
                body["intertwiner"] = json!({
                    "blocks": it.blocks.len(),
                    "unitarity_residual": it.unitarity_residual,
                    "intertwining_residual": it.intertwining_residual,
                    "tol": tol,
                });
                if it.unitarity_residual > tol || it.intertwining_residual > tol {
                    return Ok(Report::new(Status::Invalid, body, summary));
                }
            }
            Ok(Report::new(holds(r.strongly_commute), body, summary))
        }
    }
}

fn stochastic_cmd(
    inputs: &[PathBuf],
    check_card: bool,
    semigroup: Option<f64>,
    irreducible: bool,
    tol: f64,
    zero_tol: f64,
) -> Result<Report> {
    let matrices: Vec<StochasticMatrix> = match inputs {
        [one] => {
            let v = read_json(one)?;
            if is_pair(&v) {
                let pair = parse_pair(&v, "")?;
                vec![pair.theta.to_stochastic(tol)?, pair.phi.to_stochastic(tol)?]
            } else {
                vec![parse_map(&v, "")?.to_stochastic(tol)?]
            }
        }
        many => many.iter().map(|p| parse_map(&read_json(p)?, "")?.to_stochastic(tol)).collect::<Result<_>>()?,
    };
    let mut status = Status::Holds;
    let mut summary = Vec::new();
    let mut entries = Vec::new();
    for (idx, m) in matrices.iter().enumerate() {
        let mut entry = json!({ "n": m.n() });
        if irreducible {
            let irr = is_irreducible(m, zero_tol);
            entry["irreducible"] = json!(irr);
            summary.push(format!("matrix {idx}: irreducible {irr}"));
            if !irr {
                status = Status::Fails;
            }
        }
        if let Some(t) = semigroup {
            let s = semigroup_at(m, t)?;
            let min_entry = s.matrix().iter().copied().fold(f64::INFINITY, f64::min);
            entry["semigroup"] = json!({ "t": t, "matrix": real_matrix_to_json(s.matrix()), "min_entry": min_entry });
            summary.push(format!("matrix {idx}: semigroup at t = {t}, min entry {min_entry:.6e}"));
        }
        entries.push(entry);
    }
    let mut body = json!({ "matrices": entries, "tol": tol, "zero_tol": zero_tol });
    if check_card {
        let [p, q] = matrices.as_slice() else {
            return Err(Error::invalid("--check-card needs two stochastic matrices"));
        };
        let card = card_criterion(p, q, zero_tol)?;
        let (pm, qm) = (p.matrix(), q.matrix());
        body["commutation_residual"] = json!((pm * qm - qm * pm).norm());
        summary.push(format!("cardinality criterion: {}", card.holds));
        for w in &card.witnesses {
            summary.push(format!("  witness ({}, {}): counts {} vs {}", w.i, w.k, w.count_qp, w.count_pq));
        }
        if !card.holds {
            status = Status::Fails;
        }
        body["card"] = serde_json::to_value(&card)?;
    }
    if summary.is_empty() {
        summary.push(format!("{} valid stochastic matrix(es)", matrices.len()));
    }
    Ok(Report::new(status, body, summary))
}

/// The certificate from the pair file, or a computed one. `Err(report)` when
/// the maps do not commute, so there is nothing to certify.
fn obtain_certificate(
    pair: &PairSpec,
    theta: &KrausFamily,
    phi: &KrausFamily,
    tol: f64,
) -> Result<std::result::Result<(StrongCommutationCertificate, &'static str), Report>> {
    if let Some(u) = &pair.certificate {
        let check = verify_certificate(theta, phi, u, tol)?;
        let cert = StrongCommutationCertificate {
            m: theta.len(),
            n: phi.len(),
            u: u.clone(),
            unitarity_residual: check.unitarity_residual,
            intertwining_residual: check.intertwining_residual,
        };
        return Ok(Ok((cert, "supplied")));
    }
    let comm = check_commute(theta, phi, tol)?;
    if !comm.commute {
        let summary = vec![format!("maps do not commute (residual {:.3e}); no product system", comm.residual)];
        return Ok(Err(Report::new(Status::Fails, json!({ "strongly_commute": false, "commute": comm }), summary)));
    }
    Ok(Ok((strong_commutation_certificate(theta, phi, tol)?, "computed")))
}

fn prodsys_cmd(pair: &PairSpec, horizon: GridPoint, cap: usize, tol: f64) -> Result<Report> {
    let (theta, phi) = channel_pair(pair, tol)?;
    let (cert, source) = match obtain_certificate(pair, &theta, &phi, tol)? {
        Ok(c) => c,
        Err(report) => return Ok(report),
    };
    let sys = build_product_system(&theta, &phi, &cert, tol)?.with_cap(cap);
    let rep = verify_representation(&sys, horizon, tol)?;
    let summary = vec![format!(
        "representation at horizon {horizon}: {} (rep {:.3e}, homomorphism {:.3e}, coisometry {}, tol {:e})",
        rep.pass,
        rep.rep_residual,
        rep.homomorphism_residual,
        rep.coisometry_residual.map_or("n/a".to_string(), |c| format!("{c:.3e}")),
        tol
    )];
    let body = json!({
        "dim_h": sys.dim_h(),
        "m": sys.m(),
        "k": sys.k(),
        "certificate_source": source,
        "flip_unitarity_residual": sys.flip_unitarity_residual(),
        "cap": cap,
        "representation": rep,
    });
    Ok(Report::new(if rep.pass { Status::Holds } else { Status::Invalid }, body, summary))
}

fn dilate_report(r: &PipelineReport, certificate_source: &str) -> Value {
    let d = &r.dilation.residuals;
    let m = &r.minimality;
    json!({
        "horizon": r.horizon,
        "margin": r.margin,
        "certificate_source": certificate_source,
        "dimK": r.dim_k,
        "gram_min_eig": r.gram_min_eig,
        "gram_spectrum": r.gram,
        "residuals": {
            "isometry": d.isometry,
            "coisometry": d.coisometry,
            "unitality": d.unitality,
            "dilation": d.dilation,
            "semigroup": d.semigroup,
            "compression": d.compression,
            "multiplicativity": d.multiplicativity,
            "rho": d.rho,
            "well_definedness": d.well_definedness,
            "hat_commutation": r.hat_commutation,
        },
        "increasing": r.dilation.increasing,
        "minimality": {
            "grid_limit": m.grid_limit,
            "span_dim": m.span_dim,
            "span_target": m.span_target,
            "span_depth": m.span_depth,
            "commutant_dim": m.commutant_dim,
            "algebra": m.algebra,
            "pass": m.pass,
            "tol": m.tol,
        },
        "pass": r.pass,
    })
}

fn dilate_cmd(pair: &PairSpec, horizon: GridPoint, margin: GridPoint, tol: f64) -> Result<Report> {
    if !margin.le(horizon) {
        return Err(Error::invalid(format!("margin {margin} must not exceed horizon {horizon}")));
    }
    let (theta, phi) = channel_pair(pair, tol)?;
    let (cert, source) = match obtain_certificate(pair, &theta, &phi, tol)? {
        Ok(c) => c,
        Err(report) => return Ok(report),
    };
    let (_, r) = run_pipeline(&theta, &phi, Some(&cert), horizon, margin, tol)?;
    let summary = vec![
        format!("dilation at horizon {horizon}, margin {margin}: dimK = {}, pass = {}", r.dim_k, r.pass),
        format!("  gram min eigenvalue {:.3e}", r.gram.min_eigenvalue),
        format!("  largest residual {:.3e} (tol {tol:e})", r.dilation.residuals.max_value()),
        format!(
            "  span {}/{}, commutant dimension {}",
            r.minimality.span_dim, r.minimality.span_target, r.minimality.commutant_dim
        ),
    ];
    let body = dilate_report(&r, source);
    Ok(Report::new(if r.pass { Status::Holds } else { Status::Invalid }, body, summary))
}
