//! JSON formats for maps, pairs and certificates.
//!
//! * complex number: `[re, im]`, or a bare number for a real value
//! * matrix: array of rows
//! * channel: `{"dim": n, "kraus": [matrix, …]}` or `{"dim": n, "choi": matrix}`
//! * stochastic matrix: `{"stochastic": real matrix}` or a bare real matrix
//! * pair: `{"theta": map, "phi": map, "certificate": matrix}`, certificate optional
//!
//! Parse errors name the offending field, e.g. `theta.kraus[1][0][2]`.

use std::path::Path;

use serde_json::{json, Value};

use crate::chan::{choi_to_kraus, ChoiMatrix, KrausFamily};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, Complex64};
use crate::stochastic::{RealMatrix, StochasticMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Kraus(Vec<CMatrix>),
    Choi(ChoiMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Channel(ChannelSpec),
    Stochastic(RealMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec {
    pub theta: MapSpec,
    pub phi: MapSpec,
    pub certificate: Option<CMatrix>,
}

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::invalid(format!("{}: {msg}", if path.is_empty() { "<root>" } else { path }))
}

fn child(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub fn parse_complex(v: &Value, path: &str) -> Result<Complex64> {
    let num = |x: &Value, p: &str| x.as_f64().ok_or_else(|| err(p, "expected a number"));
    match v {
        Value::Number(_) => Ok(c(num(v, path)?, 0.0)),
        Value::Array(parts) if parts.len() == 2 => {
            Ok(c(num(&parts[0], &format!("{path}[0]"))?, num(&parts[1], &format!("{path}[1]"))?))
        }
        _ => Err(err(path, "expected a complex number [re, im] or a real number")),
    }
}

fn rows<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    let rows = v.as_array().ok_or_else(|| err(path, "expected a matrix (array of rows)"))?;
    if rows.is_empty() {
        return Err(err(path, "matrix has no rows"));
    }
    Ok(rows)
}

fn row_entries<'a>(v: &'a Value, path: &str, expected: Option<usize>) -> Result<&'a Vec<Value>> {
    let row = v.as_array().ok_or_else(|| err(path, "expected a row (array)"))?;
    if let Some(n) = expected {
        if row.len() != n {
            return Err(err(path, format!("row has {} entries, expected {n}", row.len())));
        }
    }
    Ok(row)
}

pub fn parse_complex_matrix(v: &Value, path: &str) -> Result<CMatrix> {
    let rows = rows(v, path)?;
    let first = row_entries(&rows[0], &format!("{path}[0]"), None)?.len();
    let mut m = CMatrix::zeros(rows.len(), first);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        for (j, x) in row_entries(row, &rp, Some(first))?.iter().enumerate() {
            m[(i, j)] = parse_complex(x, &format!("{rp}[{j}]"))?;
        }
    }
    Ok(m)
}

pub fn parse_real_matrix(v: &Value, path: &str) -> Result<RealMatrix> {
    let rows = rows(v, path)?;
    let first = row_entries(&rows[0], &format!("{path}[0]"), None)?.len();
    let mut m = RealMatrix::zeros(rows.len(), first);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        for (j, x) in row_entries(row, &rp, Some(first))?.iter().enumerate() {
            m[(i, j)] = x.as_f64().ok_or_else(|| err(&format!("{rp}[{j}]"), "expected a real number"))?;
        }
    }
    Ok(m)
}

fn parse_dim(obj: &serde_json::Map<String, Value>, path: &str) -> Result<usize> {
    let p = child(path, "dim");
    let d = obj.get("dim").ok_or_else(|| err(path, "missing field \"dim\""))?;
    let d = d.as_u64().ok_or_else(|| err(&p, "expected a positive integer"))?;
    if d == 0 {
        return Err(err(&p, "must be positive"));
    }
    usize::try_from(d).map_err(|_| err(&p, "too large"))
}

fn square(m: &CMatrix, n: usize, path: &str) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(err(path, format!("expected {n}×{n}, found {}×{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

pub fn parse_channel(v: &Value, path: &str) -> Result<ChannelSpec> {
    let obj = v.as_object().ok_or_else(|| err(path, "expected a channel object"))?;
    let dim = parse_dim(obj, path)?;
    match (obj.get("kraus"), obj.get("choi")) {
        (Some(k), None) => {
            let kp = child(path, "kraus");
            let list = k.as_array().ok_or_else(|| err(&kp, "expected an array of matrices"))?;
            if list.is_empty() {
                return Err(err(&kp, "at least one Kraus operator is required"));
            }
            let ops = list
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let mp = format!("{kp}[{i}]");
                    let op = parse_complex_matrix(m, &mp)?;
                    square(&op, dim, &mp)?;
                    Ok(op)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ChannelSpec::Kraus(ops))
        }
        (None, Some(ch)) => {
            let cp = child(path, "choi");
            let m = parse_complex_matrix(ch, &cp)?;
            square(&m, dim * dim, &cp)?;
            Ok(ChannelSpec::Choi(ChoiMatrix::new(dim, m).map_err(|e| err(&cp, e))?))
        }
        (Some(_), Some(_)) => Err(err(path, "give either \"kraus\" or \"choi\", not both")),
        (None, None) => Err(err(path, "missing field \"kraus\" or \"choi\"")),
    }
}

pub fn parse_map(v: &Value, path: &str) -> Result<MapSpec> {
    match v {
        Value::Array(_) => Ok(MapSpec::Stochastic(parse_real_matrix(v, path)?)),
        Value::Object(obj) if obj.contains_key("stochastic") => {
            Ok(MapSpec::Stochastic(parse_real_matrix(&obj["stochastic"], &child(path, "stochastic"))?))
        }
        Value::Object(_) => Ok(MapSpec::Channel(parse_channel(v, path)?)),
        _ => Err(err(path, "expected a channel object or a stochastic matrix")),
    }
}

pub fn is_pair(v: &Value) -> bool {
    v.as_object().is_some_and(|o| o.contains_key("theta") || o.contains_key("phi"))
}

pub fn parse_pair(v: &Value, path: &str) -> Result<PairSpec> {
    let obj = v.as_object().ok_or_else(|| err(path, "expected a pair object"))?;
    let get = |key: &str| obj.get(key).ok_or_else(|| err(path, format!("missing field \"{key}\"")));
    let theta = parse_map(get("theta")?, &child(path, "theta"))?;
    let phi = parse_map(get("phi")?, &child(path, "phi"))?;
    let certificate = match obj.get("certificate") {
        None | Some(Value::Null) => None,
        Some(Value::Object(cert)) => {
            let cp = child(path, "certificate");
            let u = cert.get("u").ok_or_else(|| err(&cp, "missing field \"u\""))?;
            Some(parse_complex_matrix(u, &child(&cp, "u"))?)
        }
        Some(m) => Some(parse_complex_matrix(m, &child(path, "certificate"))?),
    };
    Ok(PairSpec { theta, phi, certificate })
}

impl ChannelSpec {
    /// Kraus family, checked for contractivity within `tol`.
    pub fn to_kraus(&self, tol: f64) -> Result<KrausFamily> {
        match self {
            ChannelSpec::Kraus(ops) => KrausFamily::with_tol(ops.clone(), tol),
            ChannelSpec::Choi(choi) => choi_to_kraus(choi, tol),
        }
    }
}

impl MapSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MapSpec::Channel(_) => "channel",
            MapSpec::Stochastic(_) => "stochastic",
        }
    }

    pub fn to_stochastic(&self, tol: f64) -> Result<StochasticMatrix> {
        match self {
            MapSpec::Stochastic(m) => StochasticMatrix::new(m.clone(), tol),
            MapSpec::Channel(_) => Err(Error::invalid("expected a stochastic matrix, found a channel")),
        }
    }

    pub fn to_kraus(&self, tol: f64) -> Result<KrausFamily> {
        match self {
            MapSpec::Channel(c) => c.to_kraus(tol),
            MapSpec::Stochastic(_) => Err(Error::invalid("expected a channel, found a stochastic matrix")),
        }
    }
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect())).collect(),
    )
}

pub fn real_matrix_to_json(m: &RealMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| json!((0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())).collect())
}

pub fn channel_to_json(k: &KrausFamily) -> Value {
    json!({ "dim": k.dim(), "kraus": k.ops().iter().map(matrix_to_json).collect::<Vec<_>>() })
}

pub fn pair_to_json(theta: &KrausFamily, phi: &KrausFamily, certificate: Option<&CMatrix>) -> Value {
    let mut v = json!({ "theta": channel_to_json(theta), "phi": channel_to_json(phi) });
    if let Some(u) = certificate {
        v["certificate"] = matrix_to_json(u);
    }
    v
}

pub fn stochastic_pair_to_json(p: &RealMatrix, q: &RealMatrix) -> Value {
    json!({ "theta": { "stochastic": real_matrix_to_json(p) }, "phi": { "stochastic": real_matrix_to_json(q) } })
}
