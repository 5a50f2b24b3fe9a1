//! Numeric points of a chart, for evaluating exact fields and expression
//! trees in the verification harness.

use super::{Chart, CoordKind, RingError};

/// A point of a chart with `f64` coordinate values.
#[derive(Clone, Debug)]
pub struct NumericPoint {
    chart: Chart,
    values: Vec<f64>,
}

impl NumericPoint {
    pub fn new(chart: &Chart, values: Vec<f64>) -> Result<Self, RingError> {
        if values.len() != chart.dim() {
            return Err(RingError::ChartMismatch);
        }
        Ok(NumericPoint {
            chart: chart.clone(),
            values,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn value(&self, coord: usize) -> f64 {
        self.values[coord]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values of the ring generators at this point: an affine coordinate
    /// contributes its value, an angle coordinate contributes the pair
    /// (cos v, sin v) in generator order.
    pub fn gen_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.chart.n_gens());
        for (i, v) in self.values.iter().enumerate() {
            match self.chart.coord_kind(i) {
                CoordKind::Affine => out.push(*v),
                CoordKind::Angle => {
                    out.push(v.cos());
                    out.push(v.sin());
                }
            }
        }
        out
    }
}
