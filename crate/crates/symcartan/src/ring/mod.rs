//! The coefficient ring: exact rational functions of chart coordinates.
//!
//! A [`Chart`] declares named coordinates. Affine coordinates contribute one
//! polynomial generator each; an angle coordinate `t` contributes two
//! generators `cos(t)`, `sin(t)` subject to `cos(t)^2 + sin(t)^2 = 1`, kept
//! in the normal form "sin-degree <= 1". A [`ScalarField`] is a reduced
//! fraction of multivariate polynomials over exact rationals in these
//! generators.

mod field;
mod numeric;
mod parse;
mod poly;

pub use field::ScalarField;
pub use numeric::NumericPoint;
pub use parse::{parse_expression, parse_scalar, Expr};
pub use poly::{Mono, Poly};

use std::fmt;
use std::sync::Arc;

pub type Q = num_rational::BigRational;

/// What kind of coordinate a chart entry is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordKind {
    Affine,
    Angle,
}

/// How a polynomial generator relates to a coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum GenKind {
    /// The affine coordinate itself.
    Plain(usize),
    /// cos of the angle coordinate with the given index.
    Cos(usize),
    /// sin of the angle coordinate with the given index.
    Sin(usize),
}

#[derive(Debug)]
pub(crate) struct ChartData {
    coords: Vec<(String, CoordKind)>,
    /// Generators in declaration order; for an angle coordinate cos comes
    /// before sin.
    gens: Vec<(String, GenKind)>,
    /// First generator index for each coordinate.
    gen_start: Vec<usize>,
}

/// A coordinate chart: an ordered list of named coordinates.
#[derive(Clone, Debug)]
pub struct Chart(Arc<ChartData>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.coords == other.0.coords
    }
}
impl Eq for Chart {}

impl Chart {
    pub fn new(coords: Vec<(impl Into<String>, CoordKind)>) -> Result<Chart, RingError> {
        let coords: Vec<(String, CoordKind)> =
            coords.into_iter().map(|(n, k)| (n.into(), k)).collect();
        if coords.is_empty() {
            return Err(RingError::EmptyChart);
        }
        for (i, (name, _)) in coords.iter().enumerate() {
            if name.is_empty() || !is_identifier(name) {
                return Err(RingError::BadCoordinateName(name.clone()));
            }
            if coords[..i].iter().any(|(m, _)| m == name) {
                return Err(RingError::DuplicateCoordinate(name.clone()));
            }
        }
        let mut gens = Vec::new();
        let mut gen_start = Vec::new();
        for (i, (name, kind)) in coords.iter().enumerate() {
            gen_start.push(gens.len());
            match kind {
                CoordKind::Affine => gens.push((name.clone(), GenKind::Plain(i))),
                CoordKind::Angle => {
                    gens.push((format!("cos({name})"), GenKind::Cos(i)));
                    gens.push((format!("sin({name})"), GenKind::Sin(i)));
                }
            }
        }
        Ok(Chart(Arc::new(ChartData {
            coords,
            gens,
            gen_start,
        })))
    }

    /// Convenience: a chart with all-affine coordinates.
    pub fn affine(names: &[&str]) -> Chart {
        Chart::new(names.iter().map(|n| (*n, CoordKind::Affine)).collect()).unwrap()
    }

    /// Convenience: a chart with all-angle coordinates.
    pub fn angles(names: &[&str]) -> Chart {
        Chart::new(names.iter().map(|n| (*n, CoordKind::Angle)).collect()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coord_name(&self, i: usize) -> &str {
        &self.0.coords[i].0
    }

    pub fn coord_kind(&self, i: usize) -> CoordKind {
        self.0.coords[i].1
    }

    pub fn coords(&self) -> impl Iterator<Item = (&str, CoordKind)> {
        self.0.coords.iter().map(|(n, k)| (n.as_str(), *k))
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.0.coords.iter().position(|(n, _)| n == name)
    }

    pub(crate) fn n_gens(&self) -> usize {
        self.0.gens.len()
    }

    pub(crate) fn gen_name(&self, g: usize) -> &str {
        &self.0.gens[g].0
    }

    pub(crate) fn gen_kind(&self, g: usize) -> &GenKind {
        &self.0.gens[g].1
    }

    /// Index of the first generator belonging to coordinate `i`.
    pub(crate) fn gen_of_coord(&self, i: usize) -> usize {
        self.0.gen_start[i]
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (name, kind)) in self.0.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match kind {
                CoordKind::Affine => write!(f, "{name}")?,
                CoordKind::Angle => write!(f, "{name}:angle")?,
            }
        }
        write!(f, ")")
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Errors raised by the coefficient ring and its parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    EmptyChart,
    BadCoordinateName(String),
    DuplicateCoordinate(String),
    ChartMismatch,
    /// Parse error with byte position in the source text.
    Syntax { pos: usize, msg: String },
    UnknownIdentifier(String),
    /// sin/cos applied to something that is not an angle coordinate.
    TrigOnAffine(String),
    /// exp (or another transcendental) reached the exact ring.
    NotInRing(String),
    DivisionByZero,
    /// Evaluation hit a (near-)zero denominator.
    PoleAtPoint,
    IndexOutOfRange,
    /// An identity stated only for torsion-free connections was requested
    /// for a connection with torsion.
    TorsionPresent,
    /// A metric whose determinant is the zero rational function.
    DegenerateMetric,
    /// A solver was handed an ansatz (or basis) with no elements.
    EmptyAnsatz,
    /// Product constants whose skew part fails the Jacobi identity.
    NotLieAdmissible,
    /// Operands with incompatible dimensions or degrees.
    DimensionMismatch,
    /// An integrator was asked for a nonpositive step or a horizon that is
    /// not an integer number of steps.
    BadStep,
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::EmptyChart => write!(f, "chart has no coordinates"),
            RingError::BadCoordinateName(n) => write!(f, "bad coordinate name `{n}`"),
            RingError::DuplicateCoordinate(n) => write!(f, "duplicate coordinate `{n}`"),
            RingError::ChartMismatch => write!(f, "operands live on different charts"),
            RingError::Syntax { pos, msg } => write!(f, "syntax error at byte {pos}: {msg}"),
            RingError::UnknownIdentifier(n) => write!(f, "unknown identifier `{n}`"),
            RingError::TrigOnAffine(n) => {
                write!(f, "sin/cos applied to non-angle coordinate `{n}`")
            }
            RingError::NotInRing(what) => {
                write!(f, "`{what}` is not representable in the exact ring")
            }
            RingError::DivisionByZero => write!(f, "division by the zero polynomial"),
            RingError::PoleAtPoint => write!(f, "denominator vanishes at the evaluation point"),
            RingError::IndexOutOfRange => write!(f, "coordinate index out of range"),
            RingError::TorsionPresent => {
                write!(f, "identity requires a torsion-free connection")
            }
            RingError::DegenerateMetric => write!(f, "metric is degenerate"),
            RingError::EmptyAnsatz => write!(f, "ansatz has no elements"),
            RingError::NotLieAdmissible => {
                write!(f, "skew part of the product fails the Jacobi identity")
            }
            RingError::DimensionMismatch => {
                write!(f, "operands have mismatched dimensions or degrees")
            }
            RingError::BadStep => {
                write!(f, "step and horizon must be positive with an integer step count")
            }
        }
    }
}

impl std::error::Error for RingError {}
