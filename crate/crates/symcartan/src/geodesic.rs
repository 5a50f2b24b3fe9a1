//! Numeric verification layer: fixed-step RK4 geodesics, conserved
//! quantities of Killing tensors, the fiber-derivative reading of the
//! symmetric derivative along the geodesic spray, and the finite-difference
//! check of the flow-plus-parallel-transport formula for the symmetric Lie
//! derivative.
//!
//! Everything here is deliberately floating point: the exact solvers of the
//! other modules produce the objects, and this module confirms their
//! dynamical meaning on integrated trajectories. All integrators are
//! classical fixed-step RK4 — deterministic, fourth order, and accurate far
//! below every tolerance used in the tests.

use std::collections::BTreeMap;

use crate::connection::Connection;
use crate::halton;
use crate::killing::{multi_index_factorial, sorted_multi_indices};
use crate::ring::{Chart, NumericPoint, RingError, ScalarField};
use crate::symtensor::SymField;

/// One classical RK4 step of size `h` (which may be negative) for a
/// right-hand side that can fail at poles.
fn rk4_step<F>(f: &F, y: &[f64], h: f64) -> Result<Vec<f64>, RingError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, RingError>,
{
    let shift = |base: &[f64], dir: &[f64], s: f64| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + s * d).collect()
    };
    let k1 = f(y)?;
    let k2 = f(&shift(y, &k1, h / 2.0))?;
    let k3 = f(&shift(y, &k2, h / 2.0))?;
    let k4 = f(&shift(y, &k3, h))?;
    Ok(y.iter()
        .enumerate()
        .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// All n³ connection coefficients evaluated at raw coordinates.
fn gamma_values(con: &Connection, x: &[f64]) -> Result<Vec<f64>, RingError> {
    let n = con.dim();
    let p = NumericPoint::new(con.chart(), x.to_vec())?;
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out.push(con.gamma(k, i, j).eval(&p)?);
            }
        }
    }
    Ok(out)
}

/// A geodesic integrated with fixed-step RK4, sampled at every step.
#[derive(Clone, Debug)]
pub struct GeodesicRun {
    chart: Chart,
    step: f64,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
}

impl GeodesicRun {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of RK4 steps; there are `steps() + 1` samples.
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn time(&self, i: usize) -> f64 {
        self.step * i as f64
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i]
    }

    pub fn velocity(&self, i: usize) -> &[f64] {
        &self.velocities[i]
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }
}

/// Integrates γ̈ᵏ + γ̇ⁱγ̇ʲ Γᵏᵢⱼ(γ) = 0 from the given initial data with RK4
/// at fixed step `h` up to time `t_end`. The horizon must be a positive
/// integer multiple of the step; connection coefficients must stay
/// pole-free along the trajectory.
pub fn integrate_geodesic(
    con: &Connection,
    start: &[f64],
    velocity: &[f64],
    h: f64,
    t_end: f64,
) -> Result<GeodesicRun, RingError> {
    let n = con.dim();
    if start.len() != n || velocity.len() != n {
        return Err(RingError::DimensionMismatch);
    }
    if !(h > 0.0) || !(t_end > 0.0) || !h.is_finite() || !t_end.is_finite() {
        return Err(RingError::BadStep);
    }
    let ratio = t_end / h;
    let steps = ratio.round();
    if steps < 1.0 || (ratio - steps).abs() > 1e-9 {
        return Err(RingError::BadStep);
    }
    let steps = steps as usize;

    let rhs = |state: &[f64]| -> Result<Vec<f64>, RingError> {
        let (x, v) = state.split_at(n);
        let g = gamma_values(con, x)?;
        let mut out = Vec::with_capacity(2 * n);
        out.extend_from_slice(v);
        for k in 0..n {
            let mut a = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let c = g[(k * n + i) * n + j];
                    if c != 0.0 {
                        a -= c * v[i] * v[j];
                    }
                }
            }
            out.push(a);
        }
        Ok(out)
    };

    let mut state: Vec<f64> = start.iter().chain(velocity).copied().collect();
    let mut positions = vec![start.to_vec()];
    let mut velocities = vec![velocity.to_vec()];
    for _ in 0..steps {
        state = rk4_step(&rhs, &state, h)?;
        // A state that stops being finite has hit a pole of the
        // coefficients (or blown up in finite time, which is the same
        // incompleteness seen from the integrator).
        if state.iter().any(|v| !v.is_finite()) {
            return Err(RingError::PoleAtPoint);
        }
        positions.push(state[..n].to_vec());
        velocities.push(state[n..].to_vec());
    }
    Ok(GeodesicRun {
        chart: con.chart().clone(),
        step: h,
        positions,
        velocities,
    })
}

/// The fiber polynomial of a symmetric tensor as numeric data: component
/// fields together with the reciprocal multi-index factorials, so that
/// φ̃(x, v) = Σ_β φ_β(x)/β! · v_{β₁}⋯v_{β_r}.
struct FiberPolynomial {
    terms: Vec<(Vec<usize>, f64, ScalarField)>,
}

impl FiberPolynomial {
    fn new(phi: &SymField) -> FiberPolynomial {
        let terms = phi
            .components()
            .into_iter()
            .filter(|(_, f)| !f.is_zero())
            .map(|(beta, f)| {
                use num_traits::ToPrimitive;
                let fact = multi_index_factorial(&beta)
                    .to_f64()
                    .expect("factorial fits in f64");
                (beta, 1.0 / fact, f)
            })
            .collect();
        FiberPolynomial { terms }
    }

    fn eval(&self, chart: &Chart, x: &[f64], v: &[f64]) -> Result<f64, RingError> {
        let p = NumericPoint::new(chart, x.to_vec())?;
        let mut total = 0.0;
        for (beta, recip, f) in &self.terms {
            let mut prod = *recip;
            for &b in beta {
                prod *= v[b];
            }
            if prod != 0.0 {
                total += f.eval(&p)? * prod;
            }
        }
        Ok(total)
    }
}

/// Maximal drift (max − min) of the fiber polynomial K̃(γ̇) along the run.
/// For a Killing tensor this is conserved up to the integrator error.
pub fn conserved_quantity(run: &GeodesicRun, k: &SymField) -> Result<f64, RingError> {
    if k.chart() != run.chart() {
        return Err(RingError::ChartMismatch);
    }
    let poly = FiberPolynomial::new(k);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=run.steps() {
        let value = poly.eval(run.chart(), run.position(i), run.velocity(i))?;
        lo = lo.min(value);
        hi = hi.max(value);
    }
    Ok(hi - lo)
}

/// Largest mismatch, over quasi-random points (x, v) of the box, between
/// the central-difference derivative of φ̃ along the geodesic spray
/// vⁱ∂_{xⁱ} − vⁱvʲΓᵏᵢⱼ∂_{vᵏ} and the exact symmetric derivative of φ read
/// as a fiber polynomial at the same point.
pub fn spray_correspondence(
    con: &Connection,
    phi: &SymField,
    samples: usize,
    seed: u64,
) -> Result<f64, RingError> {
    if phi.chart() != con.chart() {
        return Err(RingError::ChartMismatch);
    }
    let chart = con.chart();
    let n = chart.dim();
    let value = FiberPolynomial::new(phi);
    let derivative = FiberPolynomial::new(&con.sym_derivative(phi));
    let eps = 1e-6;

    let points = halton::sample_points(chart, samples, seed)?;
    let mut worst = 0.0f64;
    for (j, p) in points.iter().enumerate() {
        let x: Vec<f64> = (0..n).map(|i| p.value(i)).collect();
        // Fiber velocities come from the Halton dimensions past the base
        // coordinates, so (x, v) together fill the doubled box.
        let v: Vec<f64> = (0..n)
            .map(|i| 2.0 * halton::halton(seed + 1 + j as u64, halton::prime(n + i)) - 1.0)
            .collect();
        let g = gamma_values(con, &x)?;
        let mut spray = Vec::with_capacity(2 * n);
        spray.extend_from_slice(&v);
        for k in 0..n {
            let mut a = 0.0;
            for i in 0..n {
                for l in 0..n {
                    a -= g[(k * n + i) * n + l] * v[i] * v[l];
                }
            }
            spray.push(a);
        }
        let eval_shift = |s: f64| -> Result<f64, RingError> {
            let xs: Vec<f64> = x.iter().zip(&spray[..n]).map(|(a, d)| a + s * d).collect();
            let vs: Vec<f64> = v.iter().zip(&spray[n..]).map(|(a, d)| a + s * d).collect();
            value.eval(chart, &xs, &vs)
        };
        let numeric = (eval_shift(eps)? - eval_shift(-eps)?) / (2.0 * eps);
        let exact = derivative.eval(chart, &x, &v)?;
        worst = worst.max((numeric - exact).abs());
    }
    Ok(worst)
}

/// Finite-difference check of the flow formula for the symmetric Lie
/// derivative of a torsion-free connection: the composite of flowing
/// forward by t, pulling back through the backward flow from time 2t, and
/// parallel-transporting from 2t to 0 along the integral curve has
/// t-derivative (Lˢ_Xφ)_m at t = 0. Both legs are integrated with RK4 in
/// `steps` substeps, the derivative is a central difference at t = ±1e-3,
/// and the result is the largest residual over all basis component tuples.
pub fn sym_lie_flow_check(
    con: &Connection,
    x: &[ScalarField],
    phi: &SymField,
    m: &[f64],
    steps: usize,
) -> Result<f64, RingError> {
    if !con.is_torsion_free() {
        return Err(RingError::TorsionPresent);
    }
    let chart = con.chart();
    let n = chart.dim();
    if x.len() != n || phi.chart() != chart || m.len() != n || steps == 0 {
        return Err(RingError::DimensionMismatch);
    }
    let delta = 1e-3;
    let r = phi.degree();
    let betas = sorted_multi_indices(n, r);

    // Exact field values, flow Jacobian and connection coefficients.
    let x_at = |y: &[f64]| -> Result<Vec<f64>, RingError> {
        let p = NumericPoint::new(chart, y.to_vec())?;
        x.iter().map(|f| f.eval(&p)).collect()
    };
    let jac: Vec<Vec<ScalarField>> = x
        .iter()
        .map(|f| (0..n).map(|j| f.partial(j)).collect())
        .collect();
    let jac_at = |y: &[f64]| -> Result<Vec<Vec<f64>>, RingError> {
        let p = NumericPoint::new(chart, y.to_vec())?;
        jac.iter()
            .map(|row| row.iter().map(|f| f.eval(&p)).collect())
            .collect()
    };
    let comps: BTreeMap<Vec<usize>, ScalarField> = phi
        .components()
        .into_iter()
        .filter(|(_, f)| !f.is_zero())
        .collect();

    // Composite transported tensor at parameter t, evaluated on every
    // sorted basis tuple.
    let composite = |t: f64| -> Result<Vec<f64>, RingError> {
        // Leg one: flow the point while parallel-transporting the basis
        // frame along the integral curve, s from 0 to 2t.
        let rhs_transport = |state: &[f64]| -> Result<Vec<f64>, RingError> {
            let y = &state[..n];
            let xv = x_at(y)?;
            let g = gamma_values(con, y)?;
            let mut out = xv.clone();
            for a in 0..n {
                let u = &state[n * (a + 1)..n * (a + 2)];
                for k in 0..n {
                    let mut du = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            du -= g[(k * n + i) * n + j] * xv[i] * u[j];
                        }
                    }
                    out.push(du);
                }
            }
            Ok(out)
        };
        let mut state = m.to_vec();
        for a in 0..n {
            for k in 0..n {
                state.push(if a == k { 1.0 } else { 0.0 });
            }
        }
        let h = t / steps as f64;
        let mut midpoint = Vec::new();
        for s in 0..2 * steps {
            state = rk4_step(&rhs_transport, &state, h)?;
            if s + 1 == steps {
                midpoint = state[..n].to_vec();
            }
        }

        // Leg two: flow backwards by t from the far end, pushing the
        // transported frame through the flow differential.
        let rhs_backward = |state: &[f64]| -> Result<Vec<f64>, RingError> {
            let y = &state[..n];
            let xv = x_at(y)?;
            let dx = jac_at(y)?;
            let mut out: Vec<f64> = xv.iter().map(|v| -v).collect();
            for a in 0..n {
                let w = &state[n * (a + 1)..n * (a + 2)];
                for k in 0..n {
                    let mut dw = 0.0;
                    for j in 0..n {
                        dw -= dx[k][j] * w[j];
                    }
                    out.push(dw);
                }
            }
            Ok(out)
        };
        for _ in 0..steps {
            state = rk4_step(&rhs_backward, &state, h)?;
        }

        // Evaluate φ at the flow midpoint on the composite frame images.
        let frame: Vec<&[f64]> = (0..n).map(|a| &state[n * (a + 1)..n * (a + 2)]).collect();
        let p = NumericPoint::new(chart, midpoint)?;
        let mut comp_vals: BTreeMap<&Vec<usize>, f64> = BTreeMap::new();
        for (key, f) in &comps {
            comp_vals.insert(key, f.eval(&p)?);
        }
        let mut out = Vec::with_capacity(betas.len());
        for beta in &betas {
            let mut total = 0.0;
            let mut tuple = vec![0usize; r];
            'tuples: loop {
                let mut key: Vec<usize> = tuple.clone();
                key.sort_unstable();
                if let Some(&c) = comp_vals.get(&key) {
                    let mut prod = c;
                    for (slot, &i) in tuple.iter().enumerate() {
                        prod *= frame[beta[slot]][i];
                    }
                    total += prod;
                }
                for pos in (0..r).rev() {
                    tuple[pos] += 1;
                    if tuple[pos] < n {
                        continue 'tuples;
                    }
                    tuple[pos] = 0;
                }
                break;
            }
            out.push(total);
        }
        Ok(out)
    };

    let plus = composite(delta)?;
    let minus = composite(-delta)?;
    let exact = con.sym_lie(x, phi).components();
    let p = NumericPoint::new(chart, m.to_vec())?;
    let mut worst = 0.0f64;
    for (b, beta) in betas.iter().enumerate() {
        let central = (plus[b] - minus[b]) / (2.0 * delta);
        let target = match exact.get(beta) {
            Some(f) => f.eval(&p)?,
            None => 0.0,
        };
        worst = worst.max((central - target).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::cube_index;
    use crate::killing::{killing_solve, AnsatzSpec};
    use crate::ring::{parse_scalar, Chart};

    fn euclidean(names: &[&str]) -> Connection {
        Connection::flat(&Chart::affine(names))
    }

    fn one_form(chart: &Chart, coeffs: &[&str]) -> SymField {
        let fields: Vec<ScalarField> =
            coeffs.iter().map(|e| parse_scalar(chart, e).unwrap()).collect();
        SymField::one_form(chart, &fields)
    }

    /// ℝ¹ with Γ¹₁₁ = 1: geodesics solve ẍ = −ẋ², so
    /// x(t) = x₀ + ln(1 + t v₀).
    fn log_line() -> Connection {
        let chart = Chart::affine(&["x"]);
        Connection::new(&chart, vec![ScalarField::one(&chart)])
    }

    #[test]
    fn euclidean_geodesics_are_straight_lines() {
        let con = euclidean(&["x", "y"]);
        let run = integrate_geodesic(&con, &[0.25, -1.0], &[0.5, 2.0], 1e-3, 1.0).unwrap();
        assert_eq!(run.steps(), 1000);
        for i in [0usize, 311, 1000] {
            let t = run.time(i);
            assert!((run.position(i)[0] - (0.25 + 0.5 * t)).abs() < 1e-12);
            assert!((run.position(i)[1] - (-1.0 + 2.0 * t)).abs() < 1e-12);
            assert!((run.velocity(i)[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn round_circle_geodesics_rotate_uniformly() {
        let chart = Chart::angles(&["t"]);
        let con = Connection::flat(&chart);
        let run = integrate_geodesic(&con, &[0.3], &[2.0], 1e-3, 1.0).unwrap();
        assert!((run.position(1000)[0] - 2.3).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_geodesic_matches_the_closed_form() {
        let run = integrate_geodesic(&log_line(), &[0.0], &[0.5], 1e-3, 1.0).unwrap();
        let exact = (1.0f64 + 0.5).ln();
        assert!((run.position(1000)[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let exact = (1.0f64 + 0.5).ln();
        let error = |h: f64| {
            let run = integrate_geodesic(&log_line(), &[0.0], &[0.5], h, 1.0).unwrap();
            (run.position(run.steps())[0] - exact).abs()
        };
        let factor = error(0.02) / error(0.01);
        assert!(
            (12.0..=20.0).contains(&factor),
            "halving the step should cut the error ~16×, got {factor}"
        );
    }

    #[test]
    fn bad_steps_and_poles_are_rejected() {
        let con = euclidean(&["x"]);
        assert_eq!(
            integrate_geodesic(&con, &[0.0], &[1.0], 0.0, 1.0).unwrap_err(),
            RingError::BadStep
        );
        assert_eq!(
            integrate_geodesic(&con, &[0.0], &[1.0], 0.3, 1.0).unwrap_err(),
            RingError::BadStep
        );
        assert_eq!(
            integrate_geodesic(&con, &[0.0, 0.0], &[1.0], 1e-3, 1.0).unwrap_err(),
            RingError::DimensionMismatch
        );
        // Γ = 1/x blows up when the trajectory crosses the origin.
        let chart = Chart::affine(&["x"]);
        let gamma = vec![parse_scalar(&chart, "1/x").unwrap()];
        let singular = Connection::new(&chart, gamma);
        assert_eq!(
            integrate_geodesic(&singular, &[-0.05], &[1.0], 1e-3, 1.0).unwrap_err(),
            RingError::PoleAtPoint
        );
    }

    #[test]
    fn killing_tensors_are_conserved_along_geodesics() {
        let con = euclidean(&["x", "y"]);
        let chart = con.chart().clone();
        let run = integrate_geodesic(&con, &[0.1, -0.2], &[0.7, 0.4], 1e-3, 1.0).unwrap();

        // Quadratic energy dx⊙dx + dy⊙dy and angular momentum x dy − y dx.
        let g = one_form(&chart, &["1", "0"]).sym_product(&one_form(&chart, &["1", "0"])).add(
            &one_form(&chart, &["0", "1"]).sym_product(&one_form(&chart, &["0", "1"])),
        );
        assert!(conserved_quantity(&run, &g).unwrap() < 1e-10);
        let momentum = one_form(&chart, &["-y", "x"]);
        assert!(conserved_quantity(&run, &momentum).unwrap() < 1e-8);

        // A non-Killing tensor drifts at order one.
        let bad = one_form(&chart, &["x", "0"]);
        assert!(conserved_quantity(&run, &bad).unwrap() > 0.1);
    }

    #[test]
    fn solver_output_feeds_the_conserved_quantity_check() {
        // Every Killing one-form found by the exact solver is conserved
        // along an integrated geodesic, both on the plane and on the circle.
        let plane = euclidean(&["x", "y"]);
        let (basis, _) = killing_solve(&plane, &AnsatzSpec::new(1, 2)).unwrap();
        assert_eq!(basis.len(), 3);
        let run = integrate_geodesic(&plane, &[0.3, 0.4], &[-0.6, 1.1], 1e-3, 1.0).unwrap();
        for k in &basis {
            assert!(conserved_quantity(&run, k).unwrap() < 1e-8);
        }

        let circle = Connection::flat(&Chart::angles(&["t"]));
        let (basis, _) = killing_solve(&circle, &AnsatzSpec::new(1, 3)).unwrap();
        assert_eq!(basis.len(), 1);
        let run = integrate_geodesic(&circle, &[0.5], &[1.5], 1e-3, 1.0).unwrap();
        for k in &basis {
            assert!(conserved_quantity(&run, k).unwrap() < 1e-8);
        }
    }

    #[test]
    fn spray_derivative_matches_the_symmetric_derivative() {
        // Degree 0: both sides are df contracted with the velocity.
        let con = euclidean(&["x", "y"]);
        let chart = con.chart().clone();
        let f = SymField::function(parse_scalar(&chart, "x^2*y - y").unwrap());
        assert!(spray_correspondence(&con, &f, 50, 0).unwrap() < 1e-6);

        // Degree 1 on a flat chart: φ = x dy gives v¹v² on both sides.
        let phi = one_form(&chart, &["0", "x"]);
        assert!(spray_correspondence(&con, &phi, 50, 0).unwrap() < 1e-6);

        // Degree 2 with a genuinely curved connection.
        let curved_chart = Chart::affine(&["x", "y"]);
        let mut gamma = vec![ScalarField::zero(&curved_chart); 8];
        gamma[cube_index(2, 0, 0, 1)] = parse_scalar(&curved_chart, "x/2").unwrap();
        gamma[cube_index(2, 0, 1, 0)] = parse_scalar(&curved_chart, "x/2").unwrap();
        gamma[cube_index(2, 1, 1, 1)] = parse_scalar(&curved_chart, "y").unwrap();
        let curved = Connection::new(&curved_chart, gamma);
        let psi = one_form(&curved_chart, &["x*y", "y^2 - 1"])
            .sym_product(&one_form(&curved_chart, &["1", "x"]));
        assert!(spray_correspondence(&curved, &psi, 50, 7).unwrap() < 1e-6);
    }

    #[test]
    fn flow_formula_reproduces_the_symmetric_lie_derivative() {
        let con = euclidean(&["x", "y"]);
        let chart = con.chart().clone();
        let sf = |s: &str| parse_scalar(&chart, s).unwrap();

        // Lˢ_{∂x}(x dy) = dy: the dy-residual is measured against 1.
        let x = vec![sf("1"), sf("0")];
        let phi = one_form(&chart, &["0", "x"]);
        let res = sym_lie_flow_check(&con, &x, &phi, &[0.2, -0.3], 8).unwrap();
        assert!(res < 1e-6, "translation case residual {res}");

        // A rotation is Killing for the Euclidean metric: Lˢ_Xg = 0.
        let rot = vec![sf("-y"), sf("x")];
        let g = one_form(&chart, &["1", "0"]).sym_product(&one_form(&chart, &["1", "0"])).add(
            &one_form(&chart, &["0", "1"]).sym_product(&one_form(&chart, &["0", "1"])),
        );
        let res = sym_lie_flow_check(&con, &rot, &g, &[0.4, 0.1], 8).unwrap();
        assert!(res < 1e-4, "rotation case residual {res}");

        // Degree zero reduces to Xf.
        let f = SymField::function(sf("x^2 + x*y"));
        let x = vec![sf("x"), sf("1 - y")];
        let res = sym_lie_flow_check(&con, &x, &f, &[0.5, 0.25], 8).unwrap();
        assert!(res < 1e-4, "function case residual {res}");

        // The same checks hold on a curved connection.
        let mut gamma = vec![ScalarField::zero(&chart); 8];
        gamma[cube_index(2, 1, 0, 0)] = sf("y");
        gamma[cube_index(2, 0, 1, 1)] = sf("x");
        let curved = Connection::new(&chart, gamma);
        let x = vec![sf("x*y"), sf("x - y")];
        let phi = one_form(&chart, &["y^2", "x"]);
        let res = sym_lie_flow_check(&curved, &x, &phi, &[0.3, 0.6], 8).unwrap();
        assert!(res < 1e-4, "curved case residual {res}");

        let torsional = Connection::new(&chart, {
            let mut g = vec![ScalarField::zero(&chart); 8];
            g[cube_index(2, 0, 0, 1)] = sf("1");
            g
        });
        assert_eq!(
            sym_lie_flow_check(&torsional, &x, &phi, &[0.0, 0.0], 8).unwrap_err(),
            RingError::TorsionPresent
        );
    }
}
