//! Problem-file schema and the translation into engine objects.
//!
//! A problem file is JSON with an optional `manifold` + `connection` pair
//! (most tasks), an optional `metric`, an optional `algebra` (for the
//! `lieadm` task) and a list of `tasks`. All indices in file keys are
//! 1-based; expressions use the engine grammar (rational functions of the
//! coordinates; `cos(θ)`/`sin(θ)` on angle coordinates; `exp`, `ln` and
//! friends are allowed in numeric-verification expressions only).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use symcartan::connection::{cube_index, Connection};
use symcartan::ring::{parse_expression, parse_scalar, Expr, Q};
use symcartan::symtensor::SymField;
use symcartan::{Chart, CoordKind, ScalarField};

use crate::CliError;

/// Documented parameter ranges: every degree bound in a task must stay
/// below this (the exact solvers escalate by two internally, so the
/// effective cap matches the library's auto-escalation cap).
pub const MAX_DEGREE_BOUND: u16 = 10;
/// Documented cap on tensor degrees in tasks.
pub const MAX_TENSOR_DEGREE: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifold: Option<Manifold>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub connection: Option<ConnectionSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metric: Option<MetricSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifold {
    pub dim: usize,
    pub coords: Vec<Coord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coord {
    pub name: String,
    /// `"affine"` or `"angle"`.
    pub kind: String,
}

/// Connection coefficients Γᵏᵢⱼ keyed `"k,i,j"` (1-based); missing entries
/// are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub gamma: BTreeMap<String, String>,
}

/// Metric components g_{ij} keyed `"i,j"` (1-based, either order); missing
/// entries are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub components: BTreeMap<String, String>,
}

/// Product constants uᵢ·uⱼ = cᵏᵢⱼ uₖ: the key `"i,j"` (1-based) maps to
/// the coefficient vector [c¹ᵢⱼ, …, cⁿᵢⱼ] of rationals; missing products
/// are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub product: BTreeMap<String, Vec<String>>,
}

/// A symmetric tensor field given by components on sorted 1-based index
/// tuples (`""` for degree zero).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub degree: usize,
    pub components: BTreeMap<String, String>,
}

/// A second chart-plus-connection, for product constructions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub manifold: Manifold,
    pub connection: ConnectionSpec,
}

fn default_samples() -> usize {
    100
}
fn default_verify_tol() -> f64 {
    1e-9
}
fn default_true() -> bool {
    true
}
fn default_lieadm_degree() -> usize {
    3
}
fn default_ident_degree() -> usize {
    3
}
fn default_coeff_degree() -> u16 {
    2
}
fn default_gate_degree() -> usize {
    2
}
fn default_spray_samples() -> usize {
    50
}
fn default_spray_tol() -> f64 {
    1e-6
}
fn default_flow_steps() -> usize {
    8
}
fn default_flow_tol() -> f64 {
    1e-4
}
fn default_rk4_coarse() -> f64 {
    0.02
}
fn default_rk4_fine() -> f64 {
    0.01
}
fn default_factor_range() -> [f64; 2] {
    [12.0, 20.0]
}

/// One requested computation. Optional `expect*` fields turn the task into
/// an assertion: the run exits nonzero when a reported value disagrees.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    /// Killing tensors of one degree within the polynomial ansatz.
    Kill {
        degree: usize,
        bound: u16,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_dim: Option<usize>,
    },
    /// Symmetric cohomology dimensions [kill, exact∩kill, quotient]; with
    /// no `bound` the ansatz auto-escalates until the dimensions stabilize.
    Cohomology {
        degree: usize,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        bound: Option<u16>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect: Option<[usize; 3]>,
    },
    /// Numeric residual check that a closed-form tensor is Killing.
    Verify {
        tensor: TensorSpec,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_verify_tol")]
        tol: f64,
        #[serde(default = "default_true")]
        expect_pass: bool,
    },
    /// Cohomology dimensions certified through a closed-form basis of
    /// Killing one-forms (components per basis element, one expression per
    /// coordinate).
    BasisCohomology {
        basis: Vec<Vec<String>>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_verify_tol")]
        tol: f64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect: Option<[usize; 3]>,
    },
    /// Classification of a circle connection by the mean of its single
    /// coefficient.
    Circle {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_dim: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_levi_civita: Option<bool>,
    },
    /// Affine and parallel vector-field dimensions within the ansatz.
    Affine {
        bound: u16,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect: Option<[usize; 2]>,
    },
    /// Exact identity suite for the split metric of the connection on the
    /// doubled chart.
    Pw {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        seed: Option<u64>,
    },
    /// Summand dimensions [bivector, affine quotient, base H¹] of the
    /// lifted-connection cohomology.
    PwLift {
        bound: u16,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_summands: Option<[usize; 3]>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_total: Option<usize>,
    },
    /// Künneth classes of the product with a second factor; optionally
    /// compared against the full cohomology of the product connection.
    Kunneth {
        other: Factor,
        degree: usize,
        bound: u16,
        #[serde(default)]
        compare_full: bool,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_dim: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_full_dim: Option<usize>,
    },
    /// Lie-admissibility and symmetric cohomology of the product table in
    /// the file's `algebra` section.
    Lieadm {
        #[serde(default = "default_lieadm_degree")]
        max_degree: usize,
        #[serde(default = "default_true")]
        expect_admissible: bool,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect_h: Option<Vec<usize>>,
    },
    /// Fixed-step RK4 geodesic; optionally checks the drift of every exact
    /// Killing one-form and of the metric along the trajectory.
    Geodesic {
        h: f64,
        #[serde(rename = "T")]
        horizon: f64,
        start: Vec<f64>,
        velocity: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        killing_bound: Option<u16>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        max_drift: Option<f64>,
        /// Per-step CSV written here when set.
        #[serde(skip_serializing_if = "Option::is_none", default)]
        csv: Option<String>,
    },
    /// Commutation-relation suite on the spanning monomial form family,
    /// with seeded vector fields and a seeded comparison connection.
    Identities {
        #[serde(default = "default_ident_degree")]
        max_degree: usize,
        #[serde(default = "default_coeff_degree")]
        coeff_degree: u16,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        seed: Option<u64>,
    },
    /// Gradient-Killing gate for the complete lift of a vector field,
    /// cross-checked against vanishing of [∇ˢ, Lˢ_X] on the form family.
    Gate {
        field: Vec<String>,
        #[serde(default = "default_gate_degree")]
        max_degree: usize,
        #[serde(default = "default_coeff_degree")]
        coeff_degree: u16,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expect: Option<bool>,
    },
    /// Central-difference check of the symmetric derivative along the
    /// geodesic spray against the exact computation.
    Spray {
        phi: TensorSpec,
        #[serde(default = "default_spray_samples")]
        samples: usize,
        #[serde(default = "default_spray_tol")]
        tol: f64,
    },
    /// Finite-difference check of the flow formula for the symmetric Lie
    /// derivative at one point.
    Flow {
        field: Vec<String>,
        phi: TensorSpec,
        point: Vec<f64>,
        #[serde(default = "default_flow_steps")]
        steps: usize,
        #[serde(default = "default_flow_tol")]
        tol: f64,
    },
    /// RK4 convergence-order check: the end-position error against a known
    /// exact endpoint must shrink by a fourth-order factor when the step is
    /// halved.
    Rk4Order {
        start: Vec<f64>,
        velocity: Vec<f64>,
        #[serde(rename = "T")]
        horizon: f64,
        reference_end: Vec<f64>,
        #[serde(default = "default_rk4_coarse")]
        h_coarse: f64,
        #[serde(default = "default_rk4_fine")]
        h_fine: f64,
        #[serde(default = "default_factor_range")]
        expect_factor: [f64; 2],
    },
}

impl Task {
    /// The task name as it appears in reports and filters.
    pub fn name(&self) -> &'static str {
        match self {
            Task::Kill { .. } => "kill",
            Task::Cohomology { .. } => "cohomology",
            Task::Verify { .. } => "verify",
            Task::BasisCohomology { .. } => "basis-cohomology",
            Task::Circle { .. } => "circle",
            Task::Affine { .. } => "affine",
            Task::Pw { .. } => "pw",
            Task::PwLift { .. } => "pw-lift",
            Task::Kunneth { .. } => "kunneth",
            Task::Lieadm { .. } => "lieadm",
            Task::Geodesic { .. } => "geodesic",
            Task::Identities { .. } => "identities",
            Task::Gate { .. } => "gate",
            Task::Spray { .. } => "spray",
            Task::Flow { .. } => "flow",
            Task::Rk4Order { .. } => "rk4-order",
        }
    }
}

/// Parses a comma-separated 1-based index key into 0-based indices; the
/// empty string maps to the empty tuple.
fn parse_key(key: &str, len: Option<usize>, dim: usize) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    if !key.is_empty() {
        for part in key.split(',') {
            let i: usize = part
                .trim()
                .parse()
                .map_err(|_| CliError::schema(format!("bad index key {key:?}")))?;
            if i < 1 || i > dim {
                return Err(CliError::schema(format!(
                    "index {i} in key {key:?} is outside 1..={dim}"
                )));
            }
            out.push(i - 1);
        }
    }
    if let Some(l) = len {
        if out.len() != l {
            return Err(CliError::schema(format!(
                "key {key:?} should have {l} indices"
            )));
        }
    }
    Ok(out)
}

/// Parses a sorted component key of a degree-`degree` symmetric tensor.
pub fn parse_component_key(key: &str, degree: usize, dim: usize) -> Result<Vec<usize>, CliError> {
    let idx = parse_key(key, Some(degree), dim)?;
    if idx.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::schema(format!(
            "component key {key:?} must be sorted"
        )));
    }
    Ok(idx)
}

fn parse_field(chart: &Chart, expr: &str) -> Result<ScalarField, CliError> {
    parse_scalar(chart, expr)
        .map_err(|e| CliError::schema(format!("cannot parse {expr:?}: {e}")))
}

fn parse_rational(s: &str) -> Result<Q, CliError> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| CliError::schema(format!("bad rational {s:?}")))
}

pub fn build_chart(m: &Manifold) -> Result<Chart, CliError> {
    if m.dim != m.coords.len() {
        return Err(CliError::schema(format!(
            "dim is {} but {} coordinates are listed",
            m.dim,
            m.coords.len()
        )));
    }
    let coords: Vec<(String, CoordKind)> = m
        .coords
        .iter()
        .map(|c| {
            let kind = match c.kind.as_str() {
                "affine" => CoordKind::Affine,
                "angle" => CoordKind::Angle,
                other => {
                    return Err(CliError::schema(format!(
                        "coordinate kind {other:?} is not \"affine\" or \"angle\""
                    )))
                }
            };
            Ok((c.name.clone(), kind))
        })
        .collect::<Result<_, _>>()?;
    Chart::new(coords).map_err(|e| CliError::schema(format!("bad chart: {e}")))
}

pub fn build_connection(chart: &Chart, spec: &ConnectionSpec) -> Result<Connection, CliError> {
    let n = chart.dim();
    let mut gamma = vec![ScalarField::zero(chart); n * n * n];
    for (key, expr) in &spec.gamma {
        let idx = parse_key(key, Some(3), n)?;
        gamma[cube_index(n, idx[0], idx[1], idx[2])] = parse_field(chart, expr)?;
    }
    Ok(Connection::new(chart, gamma))
}

pub fn build_metric(chart: &Chart, spec: &MetricSpec) -> Result<SymField, CliError> {
    let n = chart.dim();
    let mut comps: BTreeMap<Vec<usize>, ScalarField> = BTreeMap::new();
    for (key, expr) in &spec.components {
        let mut idx = parse_key(key, Some(2), n)?;
        idx.sort_unstable();
        let field = parse_field(chart, expr)?;
        if let Some(prev) = comps.get(&idx) {
            if *prev != field {
                return Err(CliError::schema(format!(
                    "metric component {key:?} given twice with different values"
                )));
            }
        }
        comps.insert(idx, field);
    }
    SymField::from_components(chart, 2, &comps)
        .map_err(|e| CliError::schema(format!("bad metric: {e}")))
}

pub fn build_tensor(chart: &Chart, spec: &TensorSpec) -> Result<SymField, CliError> {
    if spec.degree > MAX_TENSOR_DEGREE {
        return Err(CliError::schema(format!(
            "tensor degree {} exceeds the documented cap {MAX_TENSOR_DEGREE}",
            spec.degree
        )));
    }
    let n = chart.dim();
    let mut comps: BTreeMap<Vec<usize>, ScalarField> = BTreeMap::new();
    for (key, expr) in &spec.components {
        let idx = parse_component_key(key, spec.degree, n)?;
        comps.insert(idx, parse_field(chart, expr)?);
    }
    SymField::from_components(chart, spec.degree, &comps)
        .map_err(|e| CliError::schema(format!("bad tensor: {e}")))
}

/// Components of a vector field, one expression per coordinate.
pub fn build_vector(chart: &Chart, exprs: &[String]) -> Result<Vec<ScalarField>, CliError> {
    if exprs.len() != chart.dim() {
        return Err(CliError::schema(format!(
            "vector field needs {} components, got {}",
            chart.dim(),
            exprs.len()
        )));
    }
    exprs.iter().map(|e| parse_field(chart, e)).collect()
}

/// Expression trees for numeric verification (these admit `exp` etc.).
pub fn build_exprs(exprs: &[String]) -> Result<Vec<Expr>, CliError> {
    exprs
        .iter()
        .map(|e| {
            parse_expression(e).map_err(|err| CliError::schema(format!("cannot parse {e:?}: {err}")))
        })
        .collect()
}

/// Product constants in the flat cube layout, ready for an admissibility
/// check followed by `Algebra::new`.
pub fn build_algebra_constants(spec: &AlgebraSpec) -> Result<(usize, Vec<Q>), CliError> {
    let n = spec.dim;
    if n == 0 {
        return Err(CliError::schema("algebra dimension must be positive".to_string()));
    }
    let mut c = vec![Q::default(); n * n * n];
    for (key, coeffs) in &spec.product {
        let idx = parse_key(key, Some(2), n)?;
        if coeffs.len() != n {
            return Err(CliError::schema(format!(
                "product {key:?} needs {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        for (k, s) in coeffs.iter().enumerate() {
            c[cube_index(n, k, idx[0], idx[1])] = parse_rational(s)?;
        }
    }
    Ok((n, c))
}

impl ProblemFile {
    pub fn from_str(text: &str) -> Result<ProblemFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::schema(format!("invalid problem file: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))?;
        ProblemFile::from_str(&text)
    }

    /// The chart-plus-connection most tasks run against.
    pub fn geometry(&self) -> Result<(Chart, Connection), CliError> {
        let manifold = self
            .manifold
            .as_ref()
            .ok_or_else(|| CliError::schema("this task needs a manifold section".to_string()))?;
        let conn = self
            .connection
            .as_ref()
            .ok_or_else(|| CliError::schema("this task needs a connection section".to_string()))?;
        let chart = build_chart(manifold)?;
        let con = build_connection(&chart, conn)?;
        Ok((chart, con))
    }
}
