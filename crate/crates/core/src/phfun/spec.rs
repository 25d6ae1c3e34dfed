//! Constraint descriptors and their JSON schema.
//!
//! A constraint is a tree: atoms at the leaves, binary combinators above.
//! JSON nodes look like `{"kind": "...", "params": {...}, "children": [...]}`.
//! Atoms:
//!
//! | kind         | params                                   |
//! |--------------|------------------------------------------|
//! | `schatten`   | `p` (number ≥ 1, or `"inf"`)             |
//! | `op_shifted` | none                                     |
//! | `ml`         | `p` (> 0), `psi`                         |
//! | `mt`         | `psi`                                    |
//! | `randers`    | `metric` ((N²-1)² real), `oneform` (N²-1) |
//!
//! Combinators take two `children`: `sum`, `max`, `min`, and `powmean`,
//! `geomean` with a `p` param. A state `psi` is a vector record
//! `{"dim", "re", "im"}`, the shorthand `{"basis": k, "dim": N}`, or
//! `{"file": path}`. Randers data may likewise be inline arrays or
//! `{"file": path}`; paths resolve against the directory of the constraint
//! file.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Map, Value};

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

/// Randers data over su-basis coordinates: `F(a) = sqrt(aᵀ M a) + bᵀ a`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandersData {
    pub metric: DMatrix<f64>,
    pub oneform: DVector<f64>,
    dim: usize,
}

impl RandersData {
    pub fn new(metric: DMatrix<f64>, oneform: DVector<f64>) -> Result<Self> {
        let d = metric.nrows();
        if metric.ncols() != d || oneform.len() != d {
            return Err(Error::InvalidParameter(format!(
                "randers metric must be square and match the one-form (metric {}x{}, one-form {})",
                metric.nrows(),
                metric.ncols(),
                oneform.len()
            )));
        }
        let n = ((d + 1) as f64).sqrt().round() as usize;
        if n < 2 || n * n - 1 != d {
            return Err(Error::InvalidParameter(format!(
                "randers data has size {d}, which is not N²-1 for any N >= 2"
            )));
        }
        let asym = (&metric - metric.transpose()).amax();
        if asym > 1e-12 * metric.amax().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "randers metric is not symmetric (deviation {asym:.3e})"
            )));
        }
        let chol = metric.clone().cholesky().ok_or_else(|| {
            Error::InvalidParameter("randers metric is not positive definite".into())
        })?;
        let strength = oneform.dot(&chol.solve(&oneform));
        if !(strength < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "randers one-form too strong: bᵀM⁻¹b = {strength} must be < 1"
            )));
        }
        Ok(Self {
            metric,
            oneform,
            dim: n,
        })
    }

    /// Identity metric, so the Riemannian part is the Frobenius norm.
    pub fn with_identity_metric(n: usize, oneform: DVector<f64>) -> Result<Self> {
        Self::new(DMatrix::identity(n * n - 1, n * n - 1), oneform)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combinator {
    Sum,
    /// `(F1^p + F2^p)^(1/p)`.
    PowMean,
    /// `(F1^p F2^p)^(1/(2p))`.
    GeoMean,
    Max,
    Min,
}

impl Combinator {
    fn kind(self) -> &'static str {
        match self {
            Combinator::Sum => "sum",
            Combinator::PowMean => "powmean",
            Combinator::GeoMean => "geomean",
            Combinator::Max => "max",
            Combinator::Min => "min",
        }
    }

    fn takes_p(self) -> bool {
        matches!(self, Combinator::PowMean | Combinator::GeoMean)
    }
}

/// A positive-homogeneous constraint function on su(N).
#[derive(Debug, Clone, PartialEq)]
pub enum PHFunctionSpec {
    /// Schatten p-norm of `H`; `p = ∞` is the operator norm.
    Schatten { p: f64 },
    /// `E_max - E_0`.
    OpShifted,
    /// `⟨ψ|(H - E_0)^p|ψ⟩^(1/p)`.
    MargolusLevitin { p: f64, psi: StateVector },
    /// Energy uncertainty `ΔE` in `ψ`.
    MandelstamTamm { psi: StateVector },
    Randers(RandersData),
    Combine {
        op: Combinator,
        p: Option<f64>,
        children: Box<[PHFunctionSpec; 2]>,
    },
}

impl PHFunctionSpec {
    pub fn schatten(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("schatten p must be >= 1, got {p}")));
        }
        Ok(Self::Schatten { p })
    }

    pub fn operator_norm() -> Self {
        Self::Schatten { p: f64::INFINITY }
    }

    pub fn ml(p: f64, psi: StateVector) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("ml p must be positive, got {p}")));
        }
        Ok(Self::MargolusLevitin { p, psi })
    }

    pub fn mt(psi: StateVector) -> Self {
        Self::MandelstamTamm { psi }
    }

    pub fn randers(data: RandersData) -> Self {
        Self::Randers(data)
    }

    pub fn combine(op: Combinator, p: Option<f64>, a: Self, b: Self) -> Result<Self> {
        match (op.takes_p(), p) {
            (true, Some(p)) if p > 0.0 && p.is_finite() => {}
            (true, _) => {
                return Err(Error::InvalidParameter(format!(
                    "{} needs a positive finite p",
                    op.kind()
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!("{} takes no p", op.kind())))
            }
            (false, None) => {}
        }
        if let (Some(da), Some(db)) = (a.dim(), b.dim()) {
            if da != db {
                return Err(Error::DimensionMismatch {
                    expected: da,
                    found: db,
                });
            }
        }
        Ok(Self::Combine {
            op,
            p,
            children: Box::new([a, b]),
        })
    }

    pub fn sum(a: Self, b: Self) -> Result<Self> {
        Self::combine(Combinator::Sum, None, a, b)
    }

    pub fn max(a: Self, b: Self) -> Result<Self> {
        Self::combine(Combinator::Max, None, a, b)
    }

    pub fn min(a: Self, b: Self) -> Result<Self> {
        Self::combine(Combinator::Min, None, a, b)
    }

    pub fn powmean(p: f64, a: Self, b: Self) -> Result<Self> {
        Self::combine(Combinator::PowMean, Some(p), a, b)
    }

    pub fn geomean(p: f64, a: Self, b: Self) -> Result<Self> {
        Self::combine(Combinator::GeoMean, Some(p), a, b)
    }

    /// Dimension fixed by embedded data, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Schatten { .. } | Self::OpShifted => None,
            Self::MargolusLevitin { psi, .. } | Self::MandelstamTamm { psi } => Some(psi.dim()),
            Self::Randers(r) => Some(r.dim()),
            Self::Combine { children, .. } => children[0].dim().or(children[1].dim()),
        }
    }

    /// True for atoms that depend only on the spectrum of `H`.
    pub fn is_spectral_atom(&self) -> bool {
        matches!(self, Self::Schatten { .. } | Self::OpShifted)
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Combine { children, .. } => 1 + children[0].depth().max(children[1].depth()),
            _ => 1,
        }
    }

    /// Short human-readable label, e.g. `max(schatten(2), op_shifted)`.
    pub fn label(&self) -> String {
        match self {
            Self::Schatten { p } if p.is_infinite() => "schatten(inf)".into(),
            Self::Schatten { p } => format!("schatten({p})"),
            Self::OpShifted => "op_shifted".into(),
            Self::MargolusLevitin { p, .. } => format!("ml({p})"),
            Self::MandelstamTamm { .. } => "mt".into(),
            Self::Randers(r) if r.oneform.iter().all(|&b| b == 0.0) => "randers(b=0)".into(),
            Self::Randers(_) => "randers".into(),
            Self::Combine { op, p, children } => {
                let head = match p {
                    Some(p) => format!("{}[{p}]", op.kind()),
                    None => op.kind().to_string(),
                };
                format!("{head}({}, {})", children[0].label(), children[1].label())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let state = |psi: &StateVector| serde_json::to_value(psi).expect("state serializes");
        match self {
            Self::Schatten { p } if p.is_infinite() => {
                json!({"kind": "schatten", "params": {"p": "inf"}})
            }
            Self::Schatten { p } => json!({"kind": "schatten", "params": {"p": p}}),
            Self::OpShifted => json!({"kind": "op_shifted"}),
            Self::MargolusLevitin { p, psi } => {
                json!({"kind": "ml", "params": {"p": p, "psi": state(psi)}})
            }
            Self::MandelstamTamm { psi } => json!({"kind": "mt", "params": {"psi": state(psi)}}),
            Self::Randers(r) => {
                let metric: Vec<Vec<f64>> = r
                    .metric
                    .row_iter()
                    .map(|row| row.iter().copied().collect())
                    .collect();
                let oneform: Vec<f64> = r.oneform.iter().copied().collect();
                json!({"kind": "randers", "params": {"metric": metric, "oneform": oneform}})
            }
            Self::Combine { op, p, children } => {
                let mut node = json!({
                    "kind": op.kind(),
                    "children": [children[0].to_json(), children[1].to_json()],
                });
                if let Some(p) = p {
                    node["params"] = json!({ "p": p });
                }
                node
            }
        }
    }

    /// Parses a constraint tree. Relative file references resolve against `base`.
    pub fn from_json(value: &Value, base: Option<&Path>) -> Result<Self> {
        parse_node(value, base, "constraint")
    }

    pub fn from_json_str(text: &str, base: Option<&Path>) -> Result<Self> {
        let value: Value = crate::json::parse(text, "constraint")?;
        Self::from_json(&value, base)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let value: Value = crate::json::read_file(path)?;
        Self::from_json(&value, path.parent())
    }
}

fn field_err(at: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{at}: {msg}"))
}

fn parse_node(value: &Value, base: Option<&Path>, at: &str) -> Result<PHFunctionSpec> {
    let obj = value
        .as_object()
        .ok_or_else(|| field_err(at, "expected an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| field_err(&format!("{at}.kind"), "missing or not a string"))?;
    let empty = Map::new();
    let params = match obj.get("params") {
        None | Some(Value::Null) => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => return Err(field_err(&format!("{at}.params"), "expected an object")),
    };
    let children = match obj.get("children") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(a)) => a.iter().collect(),
        Some(_) => return Err(field_err(&format!("{at}.children"), "expected an array")),
    };
    let number = |key: &str| -> Result<f64> {
        params
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| field_err(&format!("{at}.params.{key}"), "missing or not a number"))
    };
    let state = |key: &str| -> Result<StateVector> {
        let v = params
            .get(key)
            .ok_or_else(|| field_err(&format!("{at}.params.{key}"), "missing"))?;
        parse_state(v, base, &format!("{at}.params.{key}"))
    };
    let wrap = |r: Result<PHFunctionSpec>| r.map_err(|e| field_err(at, e));

    let combinator = match kind {
        "sum" => Some(Combinator::Sum),
        "powmean" => Some(Combinator::PowMean),
        "geomean" => Some(Combinator::GeoMean),
        "max" => Some(Combinator::Max),
        "min" => Some(Combinator::Min),
        _ => None,
    };
    if let Some(op) = combinator {
        if children.len() != 2 {
            return Err(field_err(
                &format!("{at}.children"),
                format!("{kind} needs exactly 2 children, got {}", children.len()),
            ));
        }
        let a = parse_node(children[0], base, &format!("{at}.children[0]"))?;
        let b = parse_node(children[1], base, &format!("{at}.children[1]"))?;
        let p = if op.takes_p() { Some(number("p")?) } else { None };
        return wrap(PHFunctionSpec::combine(op, p, a, b));
    }
    if !children.is_empty() {
        return Err(field_err(&format!("{at}.children"), format!("{kind} takes no children")));
    }
    match kind {
        "schatten" => {
            let p = match params.get("p") {
                Some(Value::String(s)) if s == "inf" || s == "infinity" => f64::INFINITY,
                _ => number("p")?,
            };
            wrap(PHFunctionSpec::schatten(p))
        }
        "op_shifted" => Ok(PHFunctionSpec::OpShifted),
        "ml" => wrap(PHFunctionSpec::ml(number("p")?, state("psi")?)),
        "mt" => Ok(PHFunctionSpec::mt(state("psi")?)),
        "randers" => {
            let metric = params
                .get("metric")
                .ok_or_else(|| field_err(&format!("{at}.params.metric"), "missing"))?;
            let oneform = params
                .get("oneform")
                .ok_or_else(|| field_err(&format!("{at}.params.oneform"), "missing"))?;
            let metric = parse_real_matrix(metric, base, &format!("{at}.params.metric"))?;
            let oneform = parse_real_vector(oneform, base, &format!("{at}.params.oneform"))?;
            wrap(RandersData::new(metric, oneform).map(PHFunctionSpec::Randers))
        }
        other => Err(field_err(&format!("{at}.kind"), format!("unknown kind '{other}'"))),
    }
}

fn resolve(base: Option<&Path>, file: &str) -> PathBuf {
    let p = Path::new(file);
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

/// Follows a `{"file": path}` reference, returning the referenced JSON.
fn dereference(v: &Value, base: Option<&Path>, at: &str) -> Result<Option<Value>> {
    if let Some(file) = v.get("file") {
        let file = file
            .as_str()
            .ok_or_else(|| field_err(&format!("{at}.file"), "expected a path string"))?;
        let loaded: Value = crate::json::read_file(resolve(base, file))
            .map_err(|e| field_err(at, e))?;
        return Ok(Some(loaded));
    }
    Ok(None)
}

fn parse_state(v: &Value, base: Option<&Path>, at: &str) -> Result<StateVector> {
    if let Some(loaded) = dereference(v, base, at)? {
        return parse_state(&loaded, None, at);
    }
    if let Some(k) = v.get("basis") {
        let k = k
            .as_u64()
            .ok_or_else(|| field_err(&format!("{at}.basis"), "expected a non-negative integer"))?;
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| field_err(&format!("{at}.dim"), "missing or not an integer"))?;
        return StateVector::basis(dim as usize, k as usize).map_err(|e| field_err(at, e));
    }
    serde_json::from_value(v.clone()).map_err(|e| field_err(at, e))
}

fn parse_real_vector(v: &Value, base: Option<&Path>, at: &str) -> Result<DVector<f64>> {
    if let Some(loaded) = dereference(v, base, at)? {
        return parse_real_vector(&loaded, None, at);
    }
    let values: Vec<f64> = if v.is_object() {
        let rec: crate::phfun::state::VectorRecord =
            serde_json::from_value(v.clone()).map_err(|e| field_err(at, e))?;
        if rec.im.iter().any(|&x| x != 0.0) {
            return Err(field_err(at, "expected a real vector"));
        }
        rec.re
    } else {
        serde_json::from_value(v.clone()).map_err(|e| field_err(at, e))?
    };
    Ok(DVector::from_vec(values))
}

fn parse_real_matrix(v: &Value, base: Option<&Path>, at: &str) -> Result<DMatrix<f64>> {
    if let Some(loaded) = dereference(v, base, at)? {
        return parse_real_matrix(&loaded, None, at);
    }
    if v.is_object() {
        let m: ComplexMatrix = serde_json::from_value(v.clone()).map_err(|e| field_err(at, e))?;
        if m.iter().any(|z| z.im != 0.0) {
            return Err(field_err(at, "expected a real matrix"));
        }
        return Ok(m.map(|z| z.re));
    }
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).map_err(|e| field_err(at, e))?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(field_err(at, "expected a square array of rows"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
