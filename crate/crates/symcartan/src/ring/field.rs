//! Reduced fractions of polynomials: the scalar fields of a chart.

use super::poly::Poly;
use super::{Chart, NumericPoint, Q, RingError};
use num_traits::One;
use std::fmt;

/// An exact rational function of the chart coordinates. Kept reduced: the
/// denominator is nonzero, monic under graded-lex, and shares no polynomial
/// factor with the numerator.
#[derive(Clone, Debug)]
pub struct ScalarField {
    num: Poly,
    den: Poly,
}

impl ScalarField {
    fn reduced(num: Poly, den: Poly) -> ScalarField {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            let chart = num.chart().clone();
            return ScalarField {
                num,
                den: Poly::one(&chart),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        // Monic denominator fixes the scale of the pair.
        let lc = den.leading().unwrap().1.clone();
        if !lc.is_one() {
            let inv = Q::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        ScalarField { num, den }
    }

    pub fn zero(chart: &Chart) -> ScalarField {
        ScalarField {
            num: Poly::zero(chart),
            den: Poly::one(chart),
        }
    }

    pub fn one(chart: &Chart) -> ScalarField {
        ScalarField::rational(chart, Q::one())
    }

    pub fn rational(chart: &Chart, q: Q) -> ScalarField {
        ScalarField {
            num: Poly::constant(chart, q),
            den: Poly::one(chart),
        }
    }

    pub fn integer(chart: &Chart, n: i64) -> ScalarField {
        ScalarField::rational(chart, Q::from_integer(n.into()))
    }

    pub fn from_poly(p: Poly) -> ScalarField {
        let one = Poly::one(p.chart());
        ScalarField { num: p, den: one }
    }

    /// The affine coordinate `i` as a field. Angle coordinates are not ring
    /// elements themselves; use [`ScalarField::cos_of`]/[`ScalarField::sin_of`].
    pub fn coordinate(chart: &Chart, i: usize) -> Result<ScalarField, RingError> {
        if i >= chart.dim() {
            return Err(RingError::IndexOutOfRange);
        }
        match chart.coord_kind(i) {
            super::CoordKind::Affine => Ok(ScalarField::from_poly(Poly::generator(
                chart,
                chart.gen_of_coord(i),
            ))),
            super::CoordKind::Angle => Err(RingError::NotInRing(format!(
                "angle coordinate `{}`",
                chart.coord_name(i)
            ))),
        }
    }

    pub fn cos_of(chart: &Chart, i: usize) -> Result<ScalarField, RingError> {
        match chart.coord_kind(i) {
            super::CoordKind::Angle => Ok(ScalarField::from_poly(Poly::generator(
                chart,
                chart.gen_of_coord(i),
            ))),
            super::CoordKind::Affine => {
                Err(RingError::TrigOnAffine(chart.coord_name(i).to_string()))
            }
        }
    }

    pub fn sin_of(chart: &Chart, i: usize) -> Result<ScalarField, RingError> {
        match chart.coord_kind(i) {
            super::CoordKind::Angle => Ok(ScalarField::from_poly(Poly::generator(
                chart,
                chart.gen_of_coord(i) + 1,
            ))),
            super::CoordKind::Affine => {
                Err(RingError::TrigOnAffine(chart.coord_name(i).to_string()))
            }
        }
    }

    pub fn chart(&self) -> &Chart {
        self.num.chart()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &ScalarField::one(self.chart())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The value as an exact rational, when the field is constant.
    pub fn as_rational(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.num.constant_term() / self.den.constant_term())
        } else {
            None
        }
    }

    fn check_chart(&self, other: &ScalarField) -> Result<(), RingError> {
        if self.chart() == other.chart() {
            Ok(())
        } else {
            Err(RingError::ChartMismatch)
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.check_chart(other).expect("chart mismatch");
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        ScalarField::reduced(num, den)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ScalarField {
        ScalarField {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        self.check_chart(other).expect("chart mismatch");
        ScalarField::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, q: &Q) -> ScalarField {
        ScalarField::reduced(self.num.scale(q), self.den.clone())
    }

    pub fn div(&self, other: &ScalarField) -> Result<ScalarField, RingError> {
        self.check_chart(other)?;
        if other.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Ok(ScalarField::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inverse(&self) -> Result<ScalarField, RingError> {
        ScalarField::one(self.chart()).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<ScalarField, RingError> {
        if e >= 0 {
            Ok(ScalarField::reduced(
                self.num.pow(e as u32),
                self.den.pow(e as u32),
            ))
        } else {
            if self.is_zero() {
                return Err(RingError::DivisionByZero);
            }
            Ok(ScalarField::reduced(
                self.den.pow((-e) as u32),
                self.num.pow((-e) as u32),
            ))
        }
    }

    /// Exact partial derivative with respect to coordinate `i` by the
    /// quotient rule.
    pub fn partial(&self, i: usize) -> ScalarField {
        assert!(i < self.chart().dim(), "coordinate index out of range");
        if self.den.is_constant() {
            let d = self.den.constant_term();
            return ScalarField::reduced(
                self.num.partial(i).scale(&(Q::one() / d)),
                Poly::one(self.chart()),
            );
        }
        let num = self
            .num
            .partial(i)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(i)));
        let den = self.den.mul(&self.den);
        ScalarField::reduced(num, den)
    }

    /// Evaluate at a numeric point. Errors when the denominator is smaller
    /// than 1e-12 in absolute value there.
    pub fn eval(&self, p: &NumericPoint) -> Result<f64, RingError> {
        if p.chart() != self.chart() {
            return Err(RingError::ChartMismatch);
        }
        let gv = p.gen_values();
        let d = self.den.eval_gens(&gv);
        if d.abs() < 1e-12 {
            return Err(RingError::PoleAtPoint);
        }
        Ok(self.num.eval_gens(&gv) / d)
    }

    /// Transport this field to a larger chart whose generator list contains
    /// this chart's generators under the same names and kinds (used for
    /// pullbacks along projections, e.g. base -> cotangent total space).
    pub fn extend_to(&self, chart: &Chart) -> Result<ScalarField, RingError> {
        let src = self.chart();
        if src == chart {
            return Ok(self.clone());
        }
        // Map generator indices by coordinate name.
        let mut gen_map = Vec::with_capacity(src.n_gens());
        for i in 0..src.dim() {
            let name = src.coord_name(i);
            let j = chart
                .coord_index(name)
                .ok_or_else(|| RingError::UnknownIdentifier(name.to_string()))?;
            if chart.coord_kind(j) != src.coord_kind(i) {
                return Err(RingError::ChartMismatch);
            }
            let sg = src.gen_of_coord(i);
            let dg = chart.gen_of_coord(j);
            match src.coord_kind(i) {
                super::CoordKind::Affine => gen_map.push((sg, dg)),
                super::CoordKind::Angle => {
                    gen_map.push((sg, dg));
                    gen_map.push((sg + 1, dg + 1));
                }
            }
        }
        let lift_poly = |p: &Poly| -> Poly {
            let mut out = Poly::zero(chart);
            for (m, c) in p.terms() {
                let mut exps = vec![0u16; chart.n_gens()];
                for &(sg, dg) in &gen_map {
                    exps[dg] = m.0[sg];
                }
                let mono = super::poly::Mono(exps.into_boxed_slice());
                let term = Poly::from_mono(chart, mono, c.clone());
                out = out.add(&term);
            }
            out
        };
        Ok(ScalarField {
            num: lift_poly(&self.num),
            den: lift_poly(&self.den),
        })
    }
}

impl PartialEq for ScalarField {
    /// Canonical equality: the cross-multiplied difference normalizes to the
    /// zero polynomial (reduction makes plain structural comparison unsound
    /// only on angle charts, where representatives are not unique).
    fn eq(&self, other: &Self) -> bool {
        if self.chart() != other.chart() {
            return false;
        }
        self.num.mul(&other.den).sub(&other.num.mul(&self.den)).is_zero()
    }
}
impl Eq for ScalarField {}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            if self.num.n_terms() > 1 && f.alternate() {
                write!(f, "({})", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
