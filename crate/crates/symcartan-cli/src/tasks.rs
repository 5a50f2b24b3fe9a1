//! Execution of individual tasks against the engine.

use std::collections::BTreeMap;

use serde_json::Value;

use symcartan::connection::{cube_index, Connection};
use symcartan::cotangent::{gradient_killing_complete_lift, pw_report};
use symcartan::geodesic::{
    conserved_quantity, integrate_geodesic, spray_correspondence, sym_lie_flow_check,
};
use symcartan::killing::{
    affine_fields, circle_classify, cohomology, cohomology_auto, killing_solve, killing_verify,
    kunneth_subspace, parallel_fields, product_connection, pw_cohomology_lift,
    verified_basis_cohomology, AnsatzSpec, CohomologyReport,
};
use symcartan::liealg::{is_lie_admissible, Algebra};
use symcartan::symtensor::{monomial_forms, seeded_scalar, seeded_vector, SymField};
use symcartan::{Chart, CoordKind, RingError};

use crate::problem::{
    build_algebra_constants, build_chart, build_connection, build_exprs, build_metric,
    build_tensor, build_vector, ProblemFile, Task, TensorSpec, MAX_DEGREE_BOUND,
    MAX_TENSOR_DEGREE,
};
use crate::report::{TaskLog, TaskReport};
use crate::{CliError, RunOptions};

fn engine<T>(r: Result<T, RingError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::computation(e.to_string()))
}

fn check_degree(degree: usize) -> Result<(), CliError> {
    if degree > MAX_TENSOR_DEGREE {
        return Err(CliError::schema(format!(
            "tensor degree {degree} exceeds the documented cap {MAX_TENSOR_DEGREE}"
        )));
    }
    Ok(())
}

fn check_bound(bound: u16) -> Result<(), CliError> {
    if bound > MAX_DEGREE_BOUND {
        return Err(CliError::schema(format!(
            "degree bound {bound} exceeds the documented cap {MAX_DEGREE_BOUND}"
        )));
    }
    Ok(())
}

/// The potential ansatz paired with a Killing ansatz of the given degree
/// and bound (ignored by the engine in degree zero).
fn potential_spec(degree: usize, bound: u16) -> AnsatzSpec {
    if degree == 0 {
        AnsatzSpec::new(0, bound)
    } else {
        AnsatzSpec::new(degree - 1, bound + 1)
    }
}

fn cohomology_at(
    con: &Connection,
    degree: usize,
    bound: u16,
) -> Result<CohomologyReport, RingError> {
    cohomology(
        con,
        &AnsatzSpec::new(degree, bound),
        &potential_spec(degree, bound),
    )
}

/// All monomial forms of tensor degree 0..=max_degree with monomial
/// coefficients up to `coeff_degree`: the spanning family the identity
/// suites quantify over.
fn form_family(chart: &Chart, max_degree: usize, coeff_degree: u16) -> Vec<SymField> {
    (0..=max_degree)
        .flat_map(|d| monomial_forms(chart, d, coeff_degree))
        .collect()
}

/// Seed stream decorrelated from the raw user seed.
fn seed_state(seed: u64) -> u64 {
    seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(1)
}

fn float(x: f64) -> Value {
    Value::from(x)
}

fn dims_value(dims: &[usize]) -> Value {
    Value::Array(dims.iter().map(|&d| Value::from(d)).collect())
}

/// A torsion-free comparison connection: the input shifted by a seeded
/// symmetric difference tensor.
fn perturbed_connection(con: &Connection, coeff_degree: u16, state: &mut u64) -> Connection {
    let chart = con.chart();
    let n = chart.dim();
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma.push(con.gamma(k, i, j).clone());
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let s = seeded_scalar(chart, coeff_degree, state);
                gamma[cube_index(n, k, i, j)] = gamma[cube_index(n, k, i, j)].add(&s);
                if i != j {
                    gamma[cube_index(n, k, j, i)] = gamma[cube_index(n, k, j, i)].add(&s);
                }
            }
        }
    }
    Connection::new(chart, gamma)
}

fn tensor_components(
    chart: &Chart,
    spec: &TensorSpec,
) -> Result<BTreeMap<Vec<usize>, symcartan::ring::Expr>, CliError> {
    check_degree(spec.degree)?;
    let n = chart.dim();
    let mut out = BTreeMap::new();
    for (key, expr) in &spec.components {
        let idx = crate::problem::parse_component_key(key, spec.degree, n)?;
        let tree = symcartan::ring::parse_expression(expr)
            .map_err(|e| CliError::schema(format!("cannot parse {expr:?}: {e}")))?;
        out.insert(idx, tree);
    }
    if out.is_empty() {
        return Err(CliError::schema("tensor has no components".to_string()));
    }
    Ok(out)
}

pub fn run_task(file: &ProblemFile, task: &Task, opts: &RunOptions) -> Result<TaskReport, CliError> {
    let mut log = TaskLog::new(task.name());
    match task {
        Task::Kill {
            degree,
            bound,
            expect_dim,
        } => {
            check_degree(*degree)?;
            check_bound(*bound)?;
            let (_, con) = file.geometry()?;
            let spec = AnsatzSpec::new(*degree, *bound);
            let (basis, problem) = engine(killing_solve(&con, &spec))?;
            log.value("degree", *degree);
            log.value("bound", *bound);
            log.value("dim", basis.len());
            log.value("ansatz_dim", problem.col_labels().len());
            log.value("rank", problem.rank());
            for b in &basis {
                log.basis_element(b.to_string());
            }
            if let Some(d) = expect_dim {
                log.expect(&format!("dim == {d}"), basis.len() == *d);
            }
        }
        Task::Cohomology {
            degree,
            bound,
            expect,
        } => {
            check_degree(*degree)?;
            let (_, con) = file.geometry()?;
            let report = match bound {
                Some(b) => {
                    check_bound(*b)?;
                    engine(cohomology_at(&con, *degree, *b))?
                }
                None => engine(cohomology_auto(&con, *degree))?,
            };
            log.value("degree", *degree);
            log.value("bound", report.ansatz.degree_bound);
            log.value("dim_kill", report.dim_kill);
            log.value("dim_exact_in_kill", report.dim_exact_in_kill);
            log.value("dim_h", report.dim_h);
            log.value("stable", report.stable);
            for b in &report.basis {
                log.basis_element(b.to_string());
            }
            if let Some(e) = expect {
                let got = [report.dim_kill, report.dim_exact_in_kill, report.dim_h];
                log.expect(
                    &format!("dims == [{}, {}, {}]", e[0], e[1], e[2]),
                    got == *e,
                );
            }
        }
        Task::Verify {
            tensor,
            samples,
            tol,
            expect_pass,
        } => {
            let (chart, con) = file.geometry()?;
            let comps = tensor_components(&chart, tensor)?;
            let tol = opts.tol.unwrap_or(*tol);
            let rep = engine(killing_verify(&con, &comps, *samples, tol, opts.seed))?;
            log.value("passed", rep.passed);
            log.value("max_residual", float(rep.max_residual));
            log.value("points_used", rep.points_used);
            log.value("resampled", rep.resampled);
            log.value("tol", float(tol));
            log.expect(
                if *expect_pass {
                    "residuals below tolerance"
                } else {
                    "residuals above tolerance"
                },
                rep.passed == *expect_pass,
            );
        }
        Task::BasisCohomology {
            basis,
            samples,
            tol,
            expect,
        } => {
            let (chart, con) = file.geometry()?;
            let exprs: Vec<Vec<symcartan::ring::Expr>> = basis
                .iter()
                .map(|alpha| {
                    if alpha.len() != chart.dim() {
                        return Err(CliError::schema(format!(
                            "basis element needs {} components, got {}",
                            chart.dim(),
                            alpha.len()
                        )));
                    }
                    build_exprs(alpha)
                })
                .collect::<Result<_, _>>()?;
            let tol = opts.tol.unwrap_or(*tol);
            let rep = engine(verified_basis_cohomology(
                &con, &exprs, *samples, tol, opts.seed,
            ))?;
            log.value("dim_kill", rep.dim_kill);
            log.value("dim_exact_in_kill", rep.dim_exact_in_kill);
            log.value("dim_h", rep.dim_h);
            let worst = rep
                .verifications
                .iter()
                .map(|v| v.max_residual)
                .fold(0.0_f64, f64::max);
            log.value("max_residual", float(worst));
            log.value("tol", float(tol));
            log.expect(
                "every basis element is Killing",
                rep.verifications.iter().all(|v| v.passed),
            );
            if let Some(e) = expect {
                let got = [rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h];
                log.expect(
                    &format!("dims == [{}, {}, {}]", e[0], e[1], e[2]),
                    got == *e,
                );
            }
        }
        Task::Circle {
            expect_dim,
            expect_levi_civita,
        } => {
            let (chart, con) = file.geometry()?;
            if chart.dim() != 1 || chart.coord_kind(0) != CoordKind::Angle {
                return Err(CliError::schema(
                    "the circle task needs a one-dimensional angle chart".to_string(),
                ));
            }
            let (dim_kill, dim_h, is_lc) = engine(circle_classify(con.gamma(0, 0, 0)))?;
            log.value("dim_kill", dim_kill);
            log.value("dim_h", dim_h);
            log.value("levi_civita", is_lc);
            if let Some(d) = expect_dim {
                log.expect(&format!("dim_h == {d}"), dim_h == *d);
            }
            if let Some(lc) = expect_levi_civita {
                log.expect(&format!("levi_civita == {lc}"), is_lc == *lc);
            }
        }
        Task::Affine { bound, expect } => {
            check_bound(*bound)?;
            let (_, con) = file.geometry()?;
            let spec = AnsatzSpec::new(0, *bound);
            let (affine, _) = engine(affine_fields(&con, &spec))?;
            let (parallel, _) = engine(parallel_fields(&con, &spec))?;
            log.value("bound", *bound);
            log.value("dim_affine", affine.len());
            log.value("dim_parallel", parallel.len());
            if let Some(e) = expect {
                log.expect(
                    &format!("dims == [{}, {}]", e[0], e[1]),
                    [affine.len(), parallel.len()] == *e,
                );
            }
        }
        Task::Pw { seed } => {
            let (_, con) = file.geometry()?;
            let seed = seed.unwrap_or(opts.seed);
            let rep = engine(pw_report(&con, seed))?;
            log.value("checks", rep.checks().len());
            let failed: Vec<Value> = rep
                .checks()
                .iter()
                .filter(|(_, ok)| !ok)
                .map(|(name, _)| Value::from(name.as_str()))
                .collect();
            if !failed.is_empty() {
                log.value("failed_checks", Value::Array(failed));
            }
            log.expect("split-metric identity suite", rep.all_pass());
        }
        Task::PwLift {
            bound,
            expect_summands,
            expect_total,
        } => {
            check_bound(*bound)?;
            let (_, con) = file.geometry()?;
            let rep = engine(pw_cohomology_lift(&con, *bound))?;
            let (biv, aff, base) = rep.summands();
            log.value("bound", *bound);
            log.value("dim_bivectors", biv);
            log.value("dim_affine_quotient", aff);
            log.value("dim_base_h1", base);
            log.value("total", rep.total);
            log.value("h1_stable", rep.h1_stable);
            if let Some(e) = expect_summands {
                log.expect(
                    &format!("summands == [{}, {}, {}]", e[0], e[1], e[2]),
                    [biv, aff, base] == *e,
                );
            }
            if let Some(t) = expect_total {
                log.expect(&format!("total == {t}"), rep.total == *t);
            }
        }
        Task::Kunneth {
            other,
            degree,
            bound,
            compare_full,
            expect_dim,
            expect_full_dim,
        } => {
            check_degree(*degree)?;
            check_bound(*bound)?;
            let (_, con1) = file.geometry()?;
            let chart2 = build_chart(&other.manifold)?;
            let con2 = build_connection(&chart2, &other.connection)?;
            let ladder = |con: &Connection| -> Result<Vec<CohomologyReport>, CliError> {
                (0..=*degree)
                    .map(|i| engine(cohomology_at(con, i, *bound)))
                    .collect()
            };
            let reps1 = ladder(&con1)?;
            let reps2 = ladder(&con2)?;
            let kunneth = engine(kunneth_subspace(&con1, &reps1, &con2, &reps2, *degree))?;
            log.value("degree", *degree);
            log.value("bound", *bound);
            log.value("dim", kunneth.dim);
            log.value(
                "factor_dims_h",
                Value::Array(vec![
                    dims_value(&reps1.iter().map(|r| r.dim_h).collect::<Vec<_>>()),
                    dims_value(&reps2.iter().map(|r| r.dim_h).collect::<Vec<_>>()),
                ]),
            );
            for b in &kunneth.basis {
                log.basis_element(b.to_string());
            }
            if let Some(d) = expect_dim {
                log.expect(&format!("dim == {d}"), kunneth.dim == *d);
            }
            if *compare_full {
                let product = engine(product_connection(&con1, &con2))?;
                let full = engine(cohomology_at(&product, *degree, *bound))?;
                log.value("full_dim", full.dim_h);
                log.value("full_stable", full.stable);
                log.expect(
                    "product classes embed into the full cohomology",
                    kunneth.dim <= full.dim_h,
                );
                if let Some(d) = expect_full_dim {
                    log.expect(&format!("full_dim == {d}"), full.dim_h == *d);
                }
            }
        }
        Task::Lieadm {
            max_degree,
            expect_admissible,
            expect_h,
        } => {
            let spec = file
                .algebra
                .as_ref()
                .ok_or_else(|| CliError::schema("this task needs an algebra section".to_string()))?;
            let (dim, constants) = build_algebra_constants(spec)?;
            let admissible = is_lie_admissible(dim, &constants);
            log.value("dim", dim);
            log.value("admissible", admissible);
            log.expect(
                &format!("admissible == {expect_admissible}"),
                admissible == *expect_admissible,
            );
            if admissible {
                let algebra = engine(Algebra::new(dim, constants))?;
                log.value("left_symmetric", algebra.is_left_symmetric());
                let mut dims_h = Vec::new();
                let mut dims_kernel = Vec::new();
                for r in 0..=*max_degree {
                    let coh = algebra.cohomology(r);
                    dims_h.push(coh.dim_h);
                    dims_kernel.push(coh.dim_kernel);
                }
                log.value("dims_kernel", dims_value(&dims_kernel));
                log.value("dims_h", dims_value(&dims_h));
                if let Some(e) = expect_h {
                    log.expect(&format!("dims_h == {e:?}"), dims_h == *e);
                }
            } else if expect_h.is_some() {
                log.expect("cohomology computed", false);
            }
        }
        Task::Geodesic {
            h,
            horizon,
            start,
            velocity,
            killing_bound,
            max_drift,
            csv,
        } => {
            let (chart, con) = file.geometry()?;
            let n = chart.dim();
            if start.len() != n || velocity.len() != n {
                return Err(CliError::schema(format!(
                    "start and velocity need {n} components"
                )));
            }
            if !(*h > 0.0) || !(*horizon > 0.0) || !h.is_finite() || !horizon.is_finite() {
                return Err(CliError::schema(
                    "step and horizon must be positive finite numbers".to_string(),
                ));
            }
            let ratio = horizon / h;
            if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
                return Err(CliError::schema(
                    "the horizon must be a whole number of steps".to_string(),
                ));
            }
            let run = engine(integrate_geodesic(&con, start, velocity, *h, *horizon))?;
            log.value("steps", run.steps());
            log.value(
                "end_position",
                Value::Array(run.position(run.steps()).iter().map(|&v| float(v)).collect()),
            );
            log.value(
                "end_velocity",
                Value::Array(run.velocity(run.steps()).iter().map(|&v| float(v)).collect()),
            );
            let mut worst: Option<f64> = None;
            let mut track = |log: &mut TaskLog, key: &str, drift: f64| {
                log.value(key, float(drift));
                worst = Some(worst.map_or(drift, |w: f64| w.max(drift)));
            };
            if let Some(mspec) = &file.metric {
                let g = build_metric(&chart, mspec)?;
                let drift = engine(conserved_quantity(&run, &g))?;
                track(&mut log, "metric_drift", drift);
            }
            if let Some(kb) = killing_bound {
                check_bound(*kb)?;
                let (basis, _) = engine(killing_solve(&con, &AnsatzSpec::new(1, *kb)))?;
                log.value("killing_forms", basis.len());
                let mut max_d = 0.0_f64;
                for k in &basis {
                    max_d = max_d.max(engine(conserved_quantity(&run, k))?);
                }
                if !basis.is_empty() {
                    track(&mut log, "killing_drift_max", max_d);
                }
            }
            if let Some(limit) = max_drift {
                let worst = worst.ok_or_else(|| {
                    CliError::schema(
                        "max_drift needs a metric or a killing_bound to measure".to_string(),
                    )
                })?;
                log.value("max_drift", float(*limit));
                log.expect("drift below max_drift", worst < *limit);
            }
            if let Some(path) = csv {
                let mut text = String::from("t");
                for i in 0..n {
                    text.push_str(&format!(",{}", chart.coord_name(i)));
                }
                for i in 0..n {
                    text.push_str(&format!(",v_{}", chart.coord_name(i)));
                }
                text.push('\n');
                for s in 0..=run.steps() {
                    text.push_str(&format!("{}", run.time(s)));
                    for &v in run.position(s) {
                        text.push_str(&format!(",{v}"));
                    }
                    for &v in run.velocity(s) {
                        text.push_str(&format!(",{v}"));
                    }
                    text.push('\n');
                }
                std::fs::write(path, text).map_err(|e| {
                    CliError::schema(format!("cannot write {path}: {e}"))
                })?;
                log.value("csv", path.as_str());
            }
        }
        Task::Identities {
            max_degree,
            coeff_degree,
            seed,
        } => {
            check_degree(*max_degree)?;
            check_bound(*coeff_degree)?;
            let (chart, con) = file.geometry()?;
            let forms = form_family(&chart, *max_degree, *coeff_degree);
            let mut state = seed_state(seed.unwrap_or(opts.seed));
            let x = seeded_vector(&chart, *coeff_degree, &mut state);
            let y = seeded_vector(&chart, *coeff_degree, &mut state);
            let commutators = engine(con.commutator_identities(&x, &y, &forms))?;
            let other = perturbed_connection(&con, *coeff_degree, &mut state);
            let variation = con.variation_check(&other, &x, &y, &forms);
            log.value("forms", forms.len());
            log.value(
                "checks",
                commutators.checks().len() + variation.checks().len(),
            );
            for (name, ok) in commutators.checks().iter().chain(variation.checks()) {
                log.expect(name, *ok);
            }
        }
        Task::Gate {
            field,
            max_degree,
            coeff_degree,
            expect,
        } => {
            check_degree(*max_degree)?;
            check_bound(*coeff_degree)?;
            let (chart, con) = file.geometry()?;
            let x = build_vector(&chart, field)?;
            let gate = engine(gradient_killing_complete_lift(&con, &x))?;
            let forms = form_family(&chart, *max_degree, *coeff_degree);
            let commutes = forms.iter().all(|phi| {
                con.sym_derivative(&con.sym_lie(&x, phi)) == con.sym_lie(&x, &con.sym_derivative(phi))
            });
            log.value("gradient_killing_lift", gate);
            log.value("commutator_vanishes", commutes);
            log.value("forms", forms.len());
            log.expect("gate matches the commutator criterion", gate == commutes);
            if let Some(e) = expect {
                log.expect(&format!("gate == {e}"), gate == *e);
            }
        }
        Task::Spray { phi, samples, tol } => {
            let (chart, con) = file.geometry()?;
            let phi = build_tensor(&chart, phi)?;
            let tol = opts.tol.unwrap_or(*tol);
            let worst = engine(spray_correspondence(&con, &phi, *samples, opts.seed))?;
            log.value("max_residual", float(worst));
            log.value("samples", *samples);
            log.value("tol", float(tol));
            log.expect("residual below tolerance", worst < tol);
        }
        Task::Flow {
            field,
            phi,
            point,
            steps,
            tol,
        } => {
            let (chart, con) = file.geometry()?;
            if point.len() != chart.dim() {
                return Err(CliError::schema(format!(
                    "point needs {} coordinates",
                    chart.dim()
                )));
            }
            if *steps == 0 {
                return Err(CliError::schema("steps must be positive".to_string()));
            }
            let x = build_vector(&chart, field)?;
            let phi = build_tensor(&chart, phi)?;
            let tol = opts.tol.unwrap_or(*tol);
            let worst = engine(sym_lie_flow_check(&con, &x, &phi, point, *steps))?;
            log.value("max_residual", float(worst));
            log.value("steps", *steps);
            log.value("tol", float(tol));
            log.expect("residual below tolerance", worst < tol);
        }
        Task::Rk4Order {
            start,
            velocity,
            horizon,
            reference_end,
            h_coarse,
            h_fine,
            expect_factor,
        } => {
            let (chart, con) = file.geometry()?;
            let n = chart.dim();
            if start.len() != n || velocity.len() != n || reference_end.len() != n {
                return Err(CliError::schema(format!(
                    "start, velocity and reference_end need {n} components"
                )));
            }
            if !(*h_fine > 0.0) || h_coarse <= h_fine {
                return Err(CliError::schema(
                    "needs h_coarse > h_fine > 0".to_string(),
                ));
            }
            let end_error = |h: f64| -> Result<f64, CliError> {
                let run = engine(integrate_geodesic(&con, start, velocity, h, *horizon))?;
                let end = run.position(run.steps());
                Ok(end
                    .iter()
                    .zip(reference_end)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max))
            };
            let coarse = end_error(*h_coarse)?;
            let fine = end_error(*h_fine)?;
            let factor = coarse / fine;
            log.value("error_coarse", float(coarse));
            log.value("error_fine", float(fine));
            log.value("factor", float(factor));
            log.expect(
                &format!(
                    "error factor within [{}, {}]",
                    expect_factor[0], expect_factor[1]
                ),
                factor >= expect_factor[0] && factor <= expect_factor[1],
            );
        }
    }
    Ok(log.finish())
}
