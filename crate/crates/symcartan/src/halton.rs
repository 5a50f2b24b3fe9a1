//! Low-discrepancy sample points for the numeric verification paths.
//!
//! Verification routines evaluate exact residuals at quasi-random points of
//! a fixed box: affine coordinates range over `[-1, 1]`, angle coordinates
//! over `[0, 2π)`. The points come from the Halton sequence (one prime base
//! per coordinate), so a `(seed, count)` pair always reproduces the same
//! point set.

use crate::ring::{Chart, CoordKind, NumericPoint, RingError};

/// Element `index` of the van der Corput sequence in the given base: the
/// base-`base` digits of `index` mirrored across the radix point.
pub fn halton(mut index: u64, base: u64) -> f64 {
    debug_assert!(base >= 2);
    let mut value = 0.0;
    let mut scale = 1.0 / base as f64;
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale /= base as f64;
    }
    value
}

/// The `k`-th prime (0-based), by trial division; used as the Halton base
/// for coordinate `k`.
pub(crate) fn prime(k: usize) -> u64 {
    let mut found = 0usize;
    let mut candidate = 1u64;
    loop {
        candidate += 1;
        if (2..candidate).take_while(|d| d * d <= candidate).all(|d| candidate % d != 0) {
            if found == k {
                return candidate;
            }
            found += 1;
        }
    }
}

/// `count` sample points on the chart. The seed offsets the start index of
/// the sequence, so disjoint seeds give disjoint point sets; index 0 (the
/// corner of the box) is always skipped.
pub fn sample_points(
    chart: &Chart,
    count: usize,
    seed: u64,
) -> Result<Vec<NumericPoint>, RingError> {
    let n = chart.dim();
    let mut points = Vec::with_capacity(count);
    for j in 0..count {
        let index = seed + 1 + j as u64;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let u = halton(index, prime(i));
            values.push(match chart.coord_kind(i) {
                CoordKind::Affine => 2.0 * u - 1.0,
                CoordKind::Angle => 2.0 * std::f64::consts::PI * u,
            });
        }
        points.push(NumericPoint::new(chart, values)?);
    }
    Ok(points)
}
