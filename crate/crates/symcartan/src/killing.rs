//! Degree-bounded linear solvers over the exact ring: Killing tensors,
//! symmetric cohomology dimensions, affine and parallel vector fields,
//! parallel bivectors, the circle classification, product-chart assembly of
//! Künneth classes, and the summand count for the cohomology of the lifted
//! connection on the cotangent chart.
//!
//! All solvers work the same way: the sought field is expanded over a finite
//! monomial ansatz, the defining equation (which is linear in the field) is
//! evaluated once per ansatz element, denominators are cleared by one common
//! multiple per equation, and the coefficients of the resulting polynomials
//! form an exact rational matrix whose kernel is the solution space within
//! the ansatz. Quotient dimensions are computed by rank arithmetic, never by
//! constructing complements. Reported dimensions are always relative to the
//! ansatz; a stability flag records whether they survive raising the degree
//! bounds by two.
//!
//! Closed-form (transcendental) solutions fall outside every polynomial
//! ansatz. Those are checked numerically instead: expression trees are
//! differentiated symbolically, and the same component formula used by the
//! exact path is evaluated at low-discrepancy sample points.

use std::collections::{BTreeMap, BTreeSet};

use crate::connection::{cube_index, Connection};
use crate::halton;
use crate::linalg::{self, QMatrix};
use crate::par;
use crate::ring::{
    Chart, CoordKind, Expr, GenKind, Mono, NumericPoint, Poly, Q, RingError, ScalarField,
};
use crate::symtensor::{SymField, VecSymField};
use num_traits::{One, Zero};

/// A finite slice of the space of symmetric `r`-tensor fields: every
/// component is a polynomial (trig polynomial on angle coordinates) whose
/// total degree is bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    /// Degree `r` of the sought symmetric tensor fields.
    pub tensor_degree: usize,
    /// Total-degree bound for the scalar coefficients: polynomial degree on
    /// affine coordinates, combined cos/sin degree on angle coordinates.
    pub degree_bound: u16,
    /// Optional per-coordinate degree caps, one per chart coordinate.
    pub coord_bounds: Option<Vec<u16>>,
}

impl AnsatzSpec {
    pub fn new(tensor_degree: usize, degree_bound: u16) -> AnsatzSpec {
        AnsatzSpec {
            tensor_degree,
            degree_bound,
            coord_bounds: None,
        }
    }

    /// The default bound `D = r + 2`: every golden example stabilizes at or
    /// below this degree.
    pub fn default_for(tensor_degree: usize) -> AnsatzSpec {
        AnsatzSpec::new(tensor_degree, tensor_degree as u16 + 2)
    }

    /// The same ansatz with every degree bound raised by two; used for the
    /// stability check and for automatic escalation.
    pub fn escalated(&self) -> AnsatzSpec {
        AnsatzSpec {
            tensor_degree: self.tensor_degree,
            degree_bound: self.degree_bound + 2,
            coord_bounds: self
                .coord_bounds
                .as_ref()
                .map(|b| b.iter().map(|d| d + 2).collect()),
        }
    }

    /// The scalar monomial basis on the chart, in the fixed graded order.
    ///
    /// Only normal-form monomials are enumerated: on an angle coordinate the
    /// sine generator appears with exponent at most one (higher powers reduce
    /// through sin² = 1 − cos², so admitting them would duplicate basis
    /// elements and manufacture spurious kernel vectors).
    pub fn monomials(&self, chart: &Chart) -> Result<Vec<Mono>, RingError> {
        if let Some(bounds) = &self.coord_bounds {
            if bounds.len() != chart.dim() {
                return Err(RingError::IndexOutOfRange);
            }
        }
        let n_gens = chart.n_gens();
        let gen_coord: Vec<usize> = (0..n_gens)
            .map(|g| match chart.gen_kind(g) {
                GenKind::Plain(i) | GenKind::Cos(i) | GenKind::Sin(i) => *i,
            })
            .collect();
        let monos = Mono::all_up_to_degree(n_gens, self.degree_bound)
            .into_iter()
            .filter(|m| {
                for g in 0..n_gens {
                    if matches!(chart.gen_kind(g), GenKind::Sin(_)) && m.0[g] > 1 {
                        return false;
                    }
                }
                if let Some(bounds) = &self.coord_bounds {
                    let mut per = vec![0u16; chart.dim()];
                    for g in 0..n_gens {
                        per[gen_coord[g]] += m.0[g];
                    }
                    if per.iter().zip(bounds).any(|(d, b)| d > b) {
                        return false;
                    }
                }
                true
            })
            .collect();
        Ok(monos)
    }
}

/// An assembled linear system: rows are the monomial coefficients of one
/// residual component each, columns are the ansatz unknowns.
#[derive(Clone, Debug)]
pub struct LinearProblem {
    matrix: QMatrix,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl LinearProblem {
    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Kernel basis, echelon-normalized by the underlying elimination.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        self.matrix.kernel()
    }
}

/// All nondecreasing index sequences of length `r` over `0..n`: the
/// canonical component labels of a symmetric `r`-tensor.
pub(crate) fn sorted_multi_indices(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; r];
    loop {
        out.push(cur.clone());
        let mut pos = r;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] + 1 < n {
                let v = cur[pos] + 1;
                for slot in cur.iter_mut().skip(pos) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// α! for a sorted multi-index: the product of the factorials of the index
/// multiplicities. Components and fiber coefficients differ by this factor.
pub(crate) fn multi_index_factorial(idx: &[usize]) -> Q {
    let mut fact = Q::one();
    let mut run = 0i64;
    for j in 0..idx.len() {
        run = if j > 0 && idx[j] == idx[j - 1] { run + 1 } else { 1 };
        fact *= Q::from_integer(run.into());
    }
    fact
}

/// The fiber monomial v_{i₁}⋯v_{i_r} of a sorted multi-index.
fn fiber_mono(idx: &[usize], n: usize) -> Mono {
    let mut exps = vec![0u16; n];
    for &i in idx {
        exps[i] += 1;
    }
    Mono(exps.into_boxed_slice())
}

fn mono_label(chart: &Chart, m: &Mono) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(g, &e)| {
            if e == 1 {
                chart.gen_name(g).to_string()
            } else {
                format!("{}^{}", chart.gen_name(g), e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn coords_label(chart: &Chart, idx: &[usize]) -> String {
    idx.iter()
        .map(|&i| chart.coord_name(i))
        .collect::<Vec<_>>()
        .join(",")
}

/// Clear denominators and expand a family of residuals — one rational
/// function per (equation, unknown) pair — into an exact linear system.
///
/// For each equation the least common multiple of the denominators across
/// all unknowns is computed once; multiplying the whole equation by that
/// fixed polynomial is an injective linear change, so the kernel is exactly
/// the solution set of the original residuals. Each monomial of the cleared
/// polynomials then contributes one row. Rows of distinct equations are
/// independent and are produced in parallel; the output order is fixed by
/// the equation and monomial orders, not by the schedule.
fn assemble_problem<K, L>(
    chart: &Chart,
    residuals: &[BTreeMap<K, ScalarField>],
    col_labels: Vec<String>,
    eq_label: L,
) -> LinearProblem
where
    K: Ord + Clone + Send + Sync,
    L: Fn(&K) -> String + Sync + Send,
{
    let mut key_set: BTreeSet<&K> = BTreeSet::new();
    for rm in residuals {
        for k in rm.keys() {
            key_set.insert(k);
        }
    }
    let keys: Vec<&K> = key_set.into_iter().collect();
    let blocks: Vec<Vec<(String, Vec<Q>)>> = par::map_slice(&keys, |key| {
        let mut lcm = Poly::one(chart);
        for rm in residuals {
            if let Some(f) = rm.get(*key) {
                let den = f.denominator();
                let g = lcm.gcd(den);
                lcm = lcm.div_exact(&g).mul(den);
            }
        }
        let cleared: Vec<Option<BTreeMap<Mono, Q>>> = residuals
            .iter()
            .map(|rm| {
                rm.get(*key).map(|f| {
                    f.numerator()
                        .mul(&lcm.div_exact(f.denominator()))
                        .terms()
                        .map(|(m, q)| (m.clone(), q.clone()))
                        .collect()
                })
            })
            .collect();
        let mut monos: BTreeSet<Mono> = BTreeSet::new();
        for c in cleared.iter().flatten() {
            for m in c.keys() {
                monos.insert(m.clone());
            }
        }
        let base = eq_label(key);
        monos
            .into_iter()
            .map(|mono| {
                let row: Vec<Q> = cleared
                    .iter()
                    .map(|c| {
                        c.as_ref()
                            .and_then(|m| m.get(&mono))
                            .cloned()
                            .unwrap_or_else(Q::zero)
                    })
                    .collect();
                (format!("{} * {}", base, mono_label(chart, &mono)), row)
            })
            .collect()
    });
    let mut row_labels = Vec::new();
    let mut rows = Vec::new();
    for block in blocks {
        for (label, row) in block {
            row_labels.push(label);
            rows.push(row);
        }
    }
    let matrix = if rows.is_empty() {
        QMatrix::zeros(0, residuals.len())
    } else {
        QMatrix::from_rows(rows)
    };
    LinearProblem {
        matrix,
        row_labels,
        col_labels,
    }
}

/// The monomial basis of symmetric `r`-tensor fields with coefficients in a
/// scalar ansatz: unknown `(c, m)` is (scalar monomial m) · (component
/// basis tensor c).
struct TensorAnsatz {
    chart: Chart,
    degree: usize,
    indices: Vec<Vec<usize>>,
    monos: Vec<Mono>,
}

impl TensorAnsatz {
    fn new(chart: &Chart, spec: &AnsatzSpec) -> Result<TensorAnsatz, RingError> {
        let monos = spec.monomials(chart)?;
        let indices = sorted_multi_indices(chart.dim(), spec.tensor_degree);
        if monos.is_empty() || indices.is_empty() {
            return Err(RingError::EmptyAnsatz);
        }
        Ok(TensorAnsatz {
            chart: chart.clone(),
            degree: spec.tensor_degree,
            indices,
            monos,
        })
    }

    fn unknowns(&self) -> usize {
        self.indices.len() * self.monos.len()
    }

    /// Basis field number `t`: component `indices[t / M]` equals monomial
    /// `monos[t % M]`, all other components vanish.
    fn field(&self, t: usize) -> SymField {
        let (c, mi) = (t / self.monos.len(), t % self.monos.len());
        let idx = &self.indices[c];
        let coeff =
            ScalarField::from_poly(Poly::from_mono(&self.chart, self.monos[mi].clone(), Q::one()))
                .scale(&multi_index_factorial(idx).recip());
        SymField::from_fiber_terms(
            &self.chart,
            self.degree,
            [(fiber_mono(idx, self.chart.dim()), coeff)],
        )
    }

    fn col_labels(&self, name: &str) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.unknowns());
        for idx in &self.indices {
            for mono in &self.monos {
                labels.push(format!(
                    "{}[{}] * {}",
                    name,
                    coords_label(&self.chart, idx),
                    mono_label(&self.chart, mono)
                ));
            }
        }
        labels
    }

    /// The field Σ_t coeffs[t] · basis(t).
    fn combine(&self, coeffs: &[Q]) -> SymField {
        let n = self.chart.dim();
        let mut terms: Vec<(Mono, ScalarField)> = Vec::new();
        for (c, idx) in self.indices.iter().enumerate() {
            let mut p = Poly::zero(&self.chart);
            for (mi, mono) in self.monos.iter().enumerate() {
                let q = &coeffs[c * self.monos.len() + mi];
                if !q.is_zero() {
                    p = p.add(&Poly::from_mono(&self.chart, mono.clone(), q.clone()));
                }
            }
            if !p.is_zero() {
                let coeff =
                    ScalarField::from_poly(p).scale(&multi_index_factorial(idx).recip());
                terms.push((fiber_mono(idx, n), coeff));
            }
        }
        SymField::from_fiber_terms(&self.chart, self.degree, terms)
    }
}

/// Basis of the Killing `r`-tensor fields within the ansatz, together with
/// the assembled linear system. The kernel span is exactly the set of
/// ansatz fields with vanishing symmetric derivative; every returned field
/// is re-checked through the independent component-formula route.
pub fn killing_solve(
    con: &Connection,
    spec: &AnsatzSpec,
) -> Result<(Vec<SymField>, LinearProblem), RingError> {
    let chart = con.chart();
    let ansatz = TensorAnsatz::new(chart, spec)?;
    let fields: Vec<SymField> = par::map_range(ansatz.unknowns(), |t| ansatz.field(t));
    let residuals: Vec<BTreeMap<Vec<usize>, ScalarField>> = par::map_slice(&fields, |phi| {
        con.sym_derivative(phi)
            .components()
            .into_iter()
            .filter(|(_, f)| !f.is_zero())
            .collect()
    });
    let problem = assemble_problem(
        chart,
        &residuals,
        ansatz.col_labels("K"),
        |beta: &Vec<usize>| format!("DsK[{}]", coords_label(chart, beta)),
    );
    let basis: Vec<SymField> = problem.kernel().iter().map(|v| ansatz.combine(v)).collect();
    for k in &basis {
        assert!(
            con.sym_derivative_components(k).is_zero(),
            "kernel element fails the component-formula recheck"
        );
    }
    Ok((basis, problem))
}

/// Dimensions of the degree-`r` symmetric cohomology within an ansatz:
/// Killing fields modulo those that are symmetric derivatives of an
/// (r−1)-tensor potential.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub dim_kill: usize,
    pub dim_exact_in_kill: usize,
    pub dim_h: usize,
    /// Kernel basis of the Killing system (representatives, not classes).
    pub basis: Vec<SymField>,
    pub ansatz: AnsatzSpec,
    pub potential_ansatz: AnsatzSpec,
    /// True when all three dimensions are unchanged after raising both
    /// degree bounds by two.
    pub stable: bool,
}

/// Component maps of a family of fields as exact rational vectors over one
/// shared (component, monomial) column dictionary. A single common
/// denominator is cleared across the whole family, so spans, ranks and
/// intersections are preserved.
fn vectorize(chart: &Chart, a: &[SymField], b: &[SymField]) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    let comp_maps = |fs: &[SymField]| -> Vec<BTreeMap<Vec<usize>, ScalarField>> {
        fs.iter()
            .map(|f| {
                f.components()
                    .into_iter()
                    .filter(|(_, g)| !g.is_zero())
                    .collect()
            })
            .collect()
    };
    let ca = comp_maps(a);
    let cb = comp_maps(b);
    let mut lcm = Poly::one(chart);
    for m in ca.iter().chain(cb.iter()) {
        for f in m.values() {
            let den = f.denominator();
            let g = lcm.gcd(den);
            lcm = lcm.div_exact(&g).mul(den);
        }
    }
    let clear = |maps: &[BTreeMap<Vec<usize>, ScalarField>]| -> Vec<BTreeMap<(Vec<usize>, Mono), Q>> {
        maps.iter()
            .map(|m| {
                let mut out = BTreeMap::new();
                for (idx, f) in m {
                    let p = f.numerator().mul(&lcm.div_exact(f.denominator()));
                    for (mono, q) in p.terms() {
                        out.insert((idx.clone(), mono.clone()), q.clone());
                    }
                }
                out
            })
            .collect()
    };
    let pa = clear(&ca);
    let pb = clear(&cb);
    let mut cols: BTreeSet<(Vec<usize>, Mono)> = BTreeSet::new();
    for m in pa.iter().chain(pb.iter()) {
        for k in m.keys() {
            cols.insert(k.clone());
        }
    }
    let cols: Vec<_> = cols.into_iter().collect();
    let to_vec = |m: &BTreeMap<(Vec<usize>, Mono), Q>| -> Vec<Q> {
        cols.iter()
            .map(|k| m.get(k).cloned().unwrap_or_else(Q::zero))
            .collect()
    };
    (pa.iter().map(to_vec).collect(), pb.iter().map(to_vec).collect())
}

/// One cohomology computation at fixed bounds; returns the Killing basis
/// and the three dimensions.
fn cohomology_level(
    con: &Connection,
    kill_spec: &AnsatzSpec,
    pot_spec: &AnsatzSpec,
) -> Result<(Vec<SymField>, (usize, usize, usize)), RingError> {
    let r = kill_spec.tensor_degree;
    if r > 0 && pot_spec.tensor_degree + 1 != r {
        return Err(RingError::IndexOutOfRange);
    }
    let (basis, _) = killing_solve(con, kill_spec)?;
    let dim_kill = basis.len();
    let dim_exact = if r == 0 || dim_kill == 0 {
        // A function is exact only in the trivial sense: there is no
        // degree −1 potential space.
        0
    } else {
        let pot = TensorAnsatz::new(con.chart(), pot_spec)?;
        let pot_fields: Vec<SymField> = par::map_range(pot.unknowns(), |t| pot.field(t));
        let images: Vec<SymField> = par::map_slice(&pot_fields, |psi| con.sym_derivative(psi));
        let (kill_vecs, image_vecs) = vectorize(con.chart(), &basis, &images);
        debug_assert_eq!(
            QMatrix::from_rows(kill_vecs.clone()).rank(),
            dim_kill,
            "kernel basis must stay independent after vectorization"
        );
        linalg::intersection_dim(&kill_vecs, &image_vecs)
    };
    Ok((basis, (dim_kill, dim_exact, dim_kill - dim_exact)))
}

/// Killing dimension, exact dimension and quotient dimension for degree
/// `kill_spec.tensor_degree`, with the stability flag from recomputing both
/// at degree bounds raised by two. For `r = 0` the potential ansatz is
/// ignored and the quotient equals the kernel (locally constant functions).
pub fn cohomology(
    con: &Connection,
    kill_spec: &AnsatzSpec,
    pot_spec: &AnsatzSpec,
) -> Result<CohomologyReport, RingError> {
    let (basis, dims) = cohomology_level(con, kill_spec, pot_spec)?;
    let (_, dims_up) = cohomology_level(con, &kill_spec.escalated(), &pot_spec.escalated())?;
    Ok(CohomologyReport {
        dim_kill: dims.0,
        dim_exact_in_kill: dims.1,
        dim_h: dims.2,
        basis,
        ansatz: kill_spec.clone(),
        potential_ansatz: pot_spec.clone(),
        stable: dims == dims_up,
    })
}

/// Repeats [`cohomology`] starting from the default bound `D = r + 2`,
/// raising the bound by two until two consecutive computations agree, with
/// a hard cap at `D = 10`.
pub fn cohomology_auto(con: &Connection, r: usize) -> Result<CohomologyReport, RingError> {
    let mut kill = AnsatzSpec::default_for(r);
    loop {
        let pot = AnsatzSpec::new(r.saturating_sub(1), kill.degree_bound + 1);
        let report = cohomology(con, &kill, &pot)?;
        if report.stable || kill.degree_bound + 2 > 10 {
            return Ok(report);
        }
        kill = kill.escalated();
    }
}

/// Outcome of a numeric residual check at sampled points.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// True when the largest residual component stayed below the tolerance.
    pub passed: bool,
    pub max_residual: f64,
    pub points_used: usize,
    /// Number of sample points replaced because a denominator vanished.
    pub resampled: usize,
}

/// Numeric check that a closed-form symmetric tensor field is Killing.
///
/// `components` maps sorted multi-indices (all of one length `r`) to
/// expression trees; missing indices are zero. The symmetric-derivative
/// residual is evaluated at `samples` low-discrepancy points of the box
/// (affine coordinates in [−1, 1], angles in [0, 2π)); derivative trees are
/// formed symbolically, so no finite differencing is involved. Points where
/// an expression or a connection coefficient has a pole are replaced by
/// fresh points and counted in the report.
pub fn killing_verify(
    con: &Connection,
    components: &BTreeMap<Vec<usize>, Expr>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerifyReport, RingError> {
    let chart = con.chart();
    let n = chart.dim();
    if components.is_empty() {
        return Err(RingError::EmptyAnsatz);
    }
    let r = components.keys().next().map(|k| k.len()).unwrap_or(0);
    for key in components.keys() {
        if key.len() != r
            || key.windows(2).any(|w| w[0] > w[1])
            || key.iter().any(|&i| i >= n)
        {
            return Err(RingError::IndexOutOfRange);
        }
    }
    let mut diffs: BTreeMap<(usize, Vec<usize>), Expr> = BTreeMap::new();
    for (key, e) in components {
        for i in 0..n {
            diffs.insert((i, key.clone()), e.diff(chart.coord_name(i)));
        }
    }
    let betas = sorted_multi_indices(n, r + 1);

    // Largest |(∇ˢK)_β| over all β at one point; component formula
    // (∇ˢK)_β = Σ_a [ ∂_{β_a} K_{β∖a} − Σ_b Σ_l Γ^l_{β_a,(β∖a)_b} K_{(β∖a)[b→l]} ].
    let eval_at = |p: &NumericPoint| -> Result<f64, RingError> {
        let mut comp_vals: BTreeMap<&Vec<usize>, f64> = BTreeMap::new();
        for (key, e) in components {
            comp_vals.insert(key, e.eval(p)?);
        }
        let mut gamma_vals = vec![0.0f64; n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma_vals[cube_index(n, l, i, j)] = con.gamma(l, i, j).eval(p)?;
                }
            }
        }
        let comp = |key: &Vec<usize>| comp_vals.get(key).copied().unwrap_or(0.0);
        let mut worst = 0.0f64;
        for beta in &betas {
            let mut res = 0.0;
            for a in 0..beta.len() {
                let i = beta[a];
                let mut rest = beta.clone();
                rest.remove(a);
                if let Some(e) = diffs.get(&(i, rest.clone())) {
                    res += e.eval(p)?;
                }
                for b in 0..rest.len() {
                    for l in 0..n {
                        let g = gamma_vals[cube_index(n, l, i, rest[b])];
                        if g != 0.0 {
                            let mut rep = rest.clone();
                            rep[b] = l;
                            rep.sort_unstable();
                            res -= g * comp(&rep);
                        }
                    }
                }
            }
            worst = worst.max(res.abs());
        }
        Ok(worst)
    };

    let points = halton::sample_points(chart, samples, seed)?;
    let mut max_res = 0.0f64;
    let mut resampled = 0usize;
    let mut fresh = 0u64;
    let mut used = 0usize;
    for p in points {
        let mut point = p;
        loop {
            match eval_at(&point) {
                Ok(v) => {
                    max_res = max_res.max(v);
                    used += 1;
                    break;
                }
                Err(RingError::PoleAtPoint) => {
                    resampled += 1;
                    if resampled > samples.max(1) * 10 {
                        return Err(RingError::PoleAtPoint);
                    }
                    point = halton::sample_points(chart, 1, seed + samples as u64 + fresh)?
                        .pop()
                        .expect("one fresh sample point");
                    fresh += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(VerifyReport {
        passed: max_res < tol,
        max_residual: max_res,
        points_used: used,
        resampled,
    })
}

/// Cohomology dimensions certified through a closed-form spanning family.
#[derive(Clone, Debug)]
pub struct BasisCohomologyReport {
    pub dim_kill: usize,
    pub dim_exact_in_kill: usize,
    pub dim_h: usize,
    /// One residual check per basis element, in input order.
    pub verifications: Vec<VerifyReport>,
}

/// Collects `samples` points where every given expression evaluates
/// finitely, replacing poles with fresh points.
fn pole_free_points(
    chart: &Chart,
    exprs: &[Expr],
    samples: usize,
    seed: u64,
) -> Result<Vec<NumericPoint>, RingError> {
    let mut out = Vec::with_capacity(samples);
    let mut offset = 0u64;
    let mut rejected = 0usize;
    while out.len() < samples {
        let p = halton::sample_points(chart, 1, seed + offset)?
            .pop()
            .expect("one sample point");
        offset += 1;
        let mut ok = true;
        for e in exprs {
            match e.eval(&p) {
                Ok(_) => {}
                Err(RingError::PoleAtPoint) => {
                    ok = false;
                    break;
                }
                Err(err) => return Err(err),
            }
        }
        if ok {
            out.push(p);
        } else {
            rejected += 1;
            if rejected > samples.max(1) * 10 {
                return Err(RingError::PoleAtPoint);
            }
        }
    }
    Ok(out)
}

/// Degree-one cohomology dimensions from a closed-form basis of Killing
/// one-forms (each given by its component expression trees).
///
/// Every element is residual-checked numerically; the span dimension and
/// the dimension of its closed subspace come from numeric ranks at the same
/// sample points. On a contractible affine chart closed one-forms are
/// exactly the symmetric derivatives of functions, so the closed subspace
/// is the exact subspace; the chart is required to be affine for this
/// reason. Dimensions are relative to the given family.
pub fn verified_basis_cohomology(
    con: &Connection,
    basis: &[Vec<Expr>],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<BasisCohomologyReport, RingError> {
    let chart = con.chart();
    let n = chart.dim();
    if basis.is_empty() {
        return Err(RingError::EmptyAnsatz);
    }
    if (0..n).any(|i| chart.coord_kind(i) != CoordKind::Affine) {
        return Err(RingError::NotInRing(
            "exactness through closedness needs a contractible affine chart".to_string(),
        ));
    }
    for alpha in basis {
        if alpha.len() != n {
            return Err(RingError::IndexOutOfRange);
        }
    }

    let mut verifications = Vec::with_capacity(basis.len());
    for alpha in basis {
        let comps: BTreeMap<Vec<usize>, Expr> = alpha
            .iter()
            .cloned()
            .enumerate()
            .map(|(j, e)| (vec![j], e))
            .collect();
        verifications.push(killing_verify(con, &comps, samples, tol, seed)?);
    }

    // Partial-derivative trees for the curl components.
    let partials: Vec<Vec<Vec<Expr>>> = basis
        .iter()
        .map(|alpha| {
            alpha
                .iter()
                .map(|e| (0..n).map(|i| e.diff(chart.coord_name(i))).collect())
                .collect()
        })
        .collect();
    let mut all_exprs: Vec<Expr> = Vec::new();
    for (alpha, dps) in basis.iter().zip(&partials) {
        all_exprs.extend(alpha.iter().cloned());
        for row in dps {
            all_exprs.extend(row.iter().cloned());
        }
    }
    let points = pole_free_points(chart, &all_exprs, samples, seed)?;

    let value_rows: Vec<Vec<f64>> = basis
        .iter()
        .map(|alpha| {
            let mut row = Vec::with_capacity(n * points.len());
            for e in alpha {
                for p in &points {
                    row.push(e.eval(p).expect("pole-free point"));
                }
            }
            row
        })
        .collect();
    let dim_kill = linalg::numeric_rank(&value_rows, 1e-8);
    if dim_kill != basis.len() {
        return Err(RingError::NotInRing(
            "the given family is numerically dependent".to_string(),
        ));
    }

    // curl(α)_{ab} = ∂_a α_b − ∂_b α_a sampled over all pairs a < b.
    let curl_rows: Vec<Vec<f64>> = partials
        .iter()
        .map(|dps| {
            let mut row = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    for p in &points {
                        let dab = dps[b][a].eval(p).expect("pole-free point");
                        let dba = dps[a][b].eval(p).expect("pole-free point");
                        row.push(dab - dba);
                    }
                }
            }
            row
        })
        .collect();
    let dim_exact_in_kill = dim_kill - linalg::numeric_rank(&curl_rows, 1e-8);

    Ok(BasisCohomologyReport {
        dim_kill,
        dim_exact_in_kill,
        dim_h: dim_kill - dim_exact_in_kill,
        verifications,
    })
}

/// Mean value of cosᵃ over a full period: the central binomial C(a, a/2)/2ᵃ
/// for even `a`, zero for odd `a`.
fn cos_power_mean(a: u16) -> Q {
    if a % 2 == 1 {
        return Q::zero();
    }
    let h = u64::from(a / 2);
    let mut binom = num_bigint::BigInt::one();
    for k in 1..=h {
        binom = binom * num_bigint::BigInt::from(h + k) / num_bigint::BigInt::from(k);
    }
    Q::new(binom, num_bigint::BigInt::one() << a)
}

/// Classification of the connection ∇_∂θ ∂θ = f ∂θ on a one-dimensional
/// angle chart: returns (dim Kill¹, dim H¹, metrizability). All three are
/// decided by whether f has zero mean over the circle — exactly then the
/// Killing equation has the (periodic, generally transcendental) solution
/// e^{∫f} dθ, nothing is exact, and f is the Levi-Civita connection of a
/// metric. The mean is exact for trig polynomials and a periodic-trapezoid
/// quadrature (tolerance 1e-10) otherwise.
pub fn circle_classify(f: &ScalarField) -> Result<(usize, usize, bool), RingError> {
    let chart = f.chart();
    if chart.dim() != 1 || chart.coord_kind(0) != CoordKind::Angle {
        return Err(RingError::ChartMismatch);
    }
    let zero_mean = if f.is_polynomial() {
        let mut mean = Q::zero();
        for (mono, q) in f.numerator().terms() {
            let (a, b) = (mono.0[0], mono.0[1]);
            debug_assert!(b <= 1, "normal form keeps sine exponents below two");
            if b == 0 {
                mean += q * cos_power_mean(a);
            }
            // cosᵃ·sin integrates to zero over a full period.
        }
        mean /= f.denominator().constant_term();
        mean.is_zero()
    } else {
        let steps = 4096usize;
        let mut sum = 0.0f64;
        for k in 0..steps {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            sum += f.eval(&NumericPoint::new(chart, vec![theta])?)?;
        }
        (sum / steps as f64).abs() < 1e-10
    };
    Ok(if zero_mean { (1, 1, true) } else { (0, 0, false) })
}

/// The monomial basis of vector fields: unknown `(k, m)` is (monomial m)·∂_k.
struct VectorAnsatz {
    chart: Chart,
    monos: Vec<Mono>,
}

impl VectorAnsatz {
    fn new(chart: &Chart, spec: &AnsatzSpec) -> Result<VectorAnsatz, RingError> {
        let monos = spec.monomials(chart)?;
        if monos.is_empty() {
            return Err(RingError::EmptyAnsatz);
        }
        Ok(VectorAnsatz {
            chart: chart.clone(),
            monos,
        })
    }

    fn unknowns(&self) -> usize {
        self.chart.dim() * self.monos.len()
    }

    fn field(&self, t: usize) -> Vec<ScalarField> {
        let (k, mi) = (t / self.monos.len(), t % self.monos.len());
        let mut x = vec![ScalarField::zero(&self.chart); self.chart.dim()];
        x[k] = ScalarField::from_poly(Poly::from_mono(
            &self.chart,
            self.monos[mi].clone(),
            Q::one(),
        ));
        x
    }

    fn col_labels(&self, name: &str) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.unknowns());
        for k in 0..self.chart.dim() {
            for mono in &self.monos {
                labels.push(format!(
                    "{}^{} * {}",
                    name,
                    self.chart.coord_name(k),
                    mono_label(&self.chart, mono)
                ));
            }
        }
        labels
    }

    fn combine(&self, coeffs: &[Q]) -> Vec<ScalarField> {
        (0..self.chart.dim())
            .map(|k| {
                let mut p = Poly::zero(&self.chart);
                for (mi, mono) in self.monos.iter().enumerate() {
                    let q = &coeffs[k * self.monos.len() + mi];
                    if !q.is_zero() {
                        p = p.add(&Poly::from_mono(&self.chart, mono.clone(), q.clone()));
                    }
                }
                ScalarField::from_poly(p)
            })
            .collect()
    }
}

/// Flattens a vector-valued symmetric field into (slot, component) keyed
/// scalar residuals, dropping zero entries.
fn vec_sym_components(v: &VecSymField) -> BTreeMap<(usize, Vec<usize>), ScalarField> {
    let mut out = BTreeMap::new();
    for (m, comp) in v.components().iter().enumerate() {
        for (beta, f) in comp.components() {
            if !f.is_zero() {
                out.insert((m, beta), f);
            }
        }
    }
    out
}

/// Basis of the affine vector fields within the ansatz: the kernel of
/// τ(X) = 2 sym ι_X R + RˢX, which vanishes exactly when the flow of X
/// preserves the connection. Only the scalar part of the ansatz is used.
pub fn affine_fields(
    con: &Connection,
    spec: &AnsatzSpec,
) -> Result<(Vec<Vec<ScalarField>>, LinearProblem), RingError> {
    if !con.is_torsion_free() {
        return Err(RingError::TorsionPresent);
    }
    let chart = con.chart();
    let ansatz = VectorAnsatz::new(chart, spec)?;
    let curv = con.riemann();
    let residuals: Vec<BTreeMap<(usize, Vec<usize>), ScalarField>> =
        par::map_range(ansatz.unknowns(), |t| {
            let x = ansatz.field(t);
            vec_sym_components(&curv.two_sym_contract(&x).add(&con.sym_curvature(&x)))
        });
    let problem = assemble_problem(
        chart,
        &residuals,
        ansatz.col_labels("X"),
        |(m, beta): &(usize, Vec<usize>)| {
            format!(
                "tau^{}[{}]",
                chart.coord_name(*m),
                coords_label(chart, beta)
            )
        },
    );
    let basis = problem.kernel().iter().map(|v| ansatz.combine(v)).collect();
    Ok((basis, problem))
}

/// Basis of the vector fields with ∇X = 0 and sym ι_X R = 0 within the
/// ansatz — the fields whose complete lift is a gradient Killing field of
/// the lifted metric.
pub fn parallel_fields(
    con: &Connection,
    spec: &AnsatzSpec,
) -> Result<(Vec<Vec<ScalarField>>, LinearProblem), RingError> {
    let chart = con.chart();
    let n = chart.dim();
    let ansatz = VectorAnsatz::new(chart, spec)?;
    let curv = con.riemann();
    let residuals: Vec<BTreeMap<(usize, Vec<usize>), ScalarField>> =
        par::map_range(ansatz.unknowns(), |t| {
            let x = ansatz.field(t);
            let mut out = BTreeMap::new();
            let cov = con.cov_vector(&x);
            for (k, row) in cov.iter().enumerate() {
                for (j, f) in row.iter().enumerate() {
                    if !f.is_zero() {
                        out.insert((k, vec![j]), f.clone());
                    }
                }
            }
            out.extend(vec_sym_components(&curv.two_sym_contract(&x)));
            out
        });
    let problem = assemble_problem(
        chart,
        &residuals,
        ansatz.col_labels("X"),
        |(m, beta): &(usize, Vec<usize>)| {
            if beta.len() == 1 {
                format!(
                    "DX^{}[{}]",
                    chart.coord_name(*m),
                    chart.coord_name(beta[0])
                )
            } else {
                format!(
                    "symRX^{}[{}]",
                    chart.coord_name(*m),
                    coords_label(chart, beta)
                )
            }
        },
    );
    let basis = problem.kernel().iter().map(|v| ansatz.combine(v)).collect();
    let _ = n;
    Ok((basis, problem))
}

/// The monomial basis of skew bivector fields: unknown `((j,k), m)` with
/// j < k is (monomial m)·(∂_j ∧ ∂_k).
struct BivectorAnsatz {
    chart: Chart,
    monos: Vec<Mono>,
    pairs: Vec<(usize, usize)>,
}

impl BivectorAnsatz {
    fn new(chart: &Chart, spec: &AnsatzSpec) -> Result<BivectorAnsatz, RingError> {
        let monos = spec.monomials(chart)?;
        if monos.is_empty() {
            return Err(RingError::EmptyAnsatz);
        }
        let n = chart.dim();
        let mut pairs = Vec::new();
        for j in 0..n {
            for k in (j + 1)..n {
                pairs.push((j, k));
            }
        }
        Ok(BivectorAnsatz {
            chart: chart.clone(),
            monos,
            pairs,
        })
    }

    fn unknowns(&self) -> usize {
        self.pairs.len() * self.monos.len()
    }

    /// Full skew component matrix π[j][k] of basis element `t`.
    fn field(&self, t: usize) -> Vec<Vec<ScalarField>> {
        let (pi, mi) = (t / self.monos.len(), t % self.monos.len());
        let (j, k) = self.pairs[pi];
        let n = self.chart.dim();
        let mut out = vec![vec![ScalarField::zero(&self.chart); n]; n];
        let m = ScalarField::from_poly(Poly::from_mono(
            &self.chart,
            self.monos[mi].clone(),
            Q::one(),
        ));
        out[j][k] = m.clone();
        out[k][j] = m.neg();
        out
    }

    fn col_labels(&self, name: &str) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.unknowns());
        for &(j, k) in &self.pairs {
            for mono in &self.monos {
                labels.push(format!(
                    "{}^{{{},{}}} * {}",
                    name,
                    self.chart.coord_name(j),
                    self.chart.coord_name(k),
                    mono_label(&self.chart, mono)
                ));
            }
        }
        labels
    }

    fn combine(&self, coeffs: &[Q]) -> Vec<Vec<ScalarField>> {
        let n = self.chart.dim();
        let mut out = vec![vec![ScalarField::zero(&self.chart); n]; n];
        for (pi, &(j, k)) in self.pairs.iter().enumerate() {
            let mut p = Poly::zero(&self.chart);
            for (mi, mono) in self.monos.iter().enumerate() {
                let q = &coeffs[pi * self.monos.len() + mi];
                if !q.is_zero() {
                    p = p.add(&Poly::from_mono(&self.chart, mono.clone(), q.clone()));
                }
            }
            let f = ScalarField::from_poly(p);
            out[j][k] = f.clone();
            out[k][j] = f.neg();
        }
        out
    }
}

/// Basis of the parallel bivector fields that additionally annihilate the
/// symmetrized curvature pairing — the bivectors whose horizontal lift is a
/// Killing field of the lifted metric. Returns full skew component matrices.
/// On a one-dimensional chart the bivector space itself is trivial and the
/// basis is empty.
pub fn parallel_bivectors(
    con: &Connection,
    spec: &AnsatzSpec,
) -> Result<(Vec<Vec<Vec<ScalarField>>>, LinearProblem), RingError> {
    if !con.is_torsion_free() {
        return Err(RingError::TorsionPresent);
    }
    let chart = con.chart();
    let n = chart.dim();
    let ansatz = BivectorAnsatz::new(chart, spec)?;
    let curv = con.riemann();
    let residuals: Vec<BTreeMap<(usize, Vec<usize>), ScalarField>> =
        par::map_range(ansatz.unknowns(), |t| {
            let pi = ansatz.field(t);
            let mut out = BTreeMap::new();
            // (∇_i π)^{jk} = ∂_i π^{jk} + Γ^j_{il} π^{lk} + Γ^k_{il} π^{jl}
            for i in 0..n {
                for &(j, k) in &ansatz.pairs {
                    let mut f = pi[j][k].partial(i);
                    for l in 0..n {
                        f = f.add(&con.gamma(j, i, l).mul(&pi[l][k]));
                        f = f.add(&con.gamma(k, i, l).mul(&pi[j][l]));
                    }
                    if !f.is_zero() {
                        out.insert((i, vec![j, k]), f);
                    }
                }
            }
            // sym over the two output slots of R(∂_i, π(·))∂_j + R(∂_j, π(·))∂_i:
            // Σ_a π^{ma}(R^l_{iaj} + R^l_{jai}) symmetrized in (l, m).
            for l in 0..n {
                for m in l..n {
                    for i in 0..n {
                        for j in i..n {
                            let mut f = ScalarField::zero(chart);
                            for a in 0..n {
                                let rl = curv.component(l, i, a, j).add(curv.component(l, j, a, i));
                                let rm = curv.component(m, i, a, j).add(curv.component(m, j, a, i));
                                f = f.add(&pi[m][a].mul(&rl)).add(&pi[l][a].mul(&rm));
                            }
                            if !f.is_zero() {
                                out.insert((n + l * n + m, vec![i, j]), f);
                            }
                        }
                    }
                }
            }
            out
        });
    let problem = assemble_problem(
        chart,
        &residuals,
        ansatz.col_labels("Pi"),
        |(slot, idx): &(usize, Vec<usize>)| {
            if *slot < n {
                format!(
                    "DPi^{}[{}]",
                    chart.coord_name(*slot),
                    coords_label(chart, idx)
                )
            } else {
                let l = (slot - n) / n;
                let m = (slot - n) % n;
                format!(
                    "piR^{{{},{}}}[{}]",
                    chart.coord_name(l),
                    chart.coord_name(m),
                    coords_label(chart, idx)
                )
            }
        },
    );
    let basis = problem.kernel().iter().map(|v| ansatz.combine(v)).collect();
    Ok((basis, problem))
}

/// The three summand dimensions behind the degree-one cohomology of the
/// lifted connection on the cotangent chart, and their total.
#[derive(Clone, Debug)]
pub struct PwLiftReport {
    pub dim_bivectors: usize,
    pub dim_affine: usize,
    pub dim_parallel_affine: usize,
    pub dim_h1: usize,
    pub total: usize,
    /// Stability flag of the underlying degree-one cohomology computation.
    pub h1_stable: bool,
}

impl PwLiftReport {
    /// The decomposition (bivectors, affine quotient, base cohomology).
    pub fn summands(&self) -> (usize, usize, usize) {
        (
            self.dim_bivectors,
            self.dim_affine - self.dim_parallel_affine,
            self.dim_h1,
        )
    }
}

/// Summand dimensions of H¹ of the lifted metric connection, computed
/// entirely on the base chart: Killing fields upstairs decompose into a
/// parallel-bivector lift, a complete lift of an affine field, and a
/// vertical lift of a Killing one-form, while gradients come from parallel
/// fields and exact Killing one-forms. Cross-check against a direct
/// cohomology run on the doubled chart is the caller's job.
pub fn pw_cohomology_lift(
    con: &Connection,
    degree_bound: u16,
) -> Result<PwLiftReport, RingError> {
    if !con.is_torsion_free() {
        return Err(RingError::TorsionPresent);
    }
    let scalar = AnsatzSpec::new(0, degree_bound);
    let (bivectors, _) = parallel_bivectors(con, &scalar)?;
    let (affine, _) = affine_fields(con, &scalar)?;
    let (parallel, _) = parallel_fields(con, &scalar)?;
    assert!(
        parallel.len() <= affine.len(),
        "parallel fields embed into the affine fields"
    );
    let h1 = cohomology(
        con,
        &AnsatzSpec::new(1, degree_bound),
        &AnsatzSpec::new(0, degree_bound + 1),
    )?;
    let total = bivectors.len() + (affine.len() - parallel.len()) + h1.dim_h;
    Ok(PwLiftReport {
        dim_bivectors: bivectors.len(),
        dim_affine: affine.len(),
        dim_parallel_affine: parallel.len(),
        dim_h1: h1.dim_h,
        total,
        h1_stable: h1.stable,
    })
}

/// The block-diagonal connection on the product chart of two factor
/// charts. Coordinate names must be disjoint.
pub fn product_connection(a: &Connection, b: &Connection) -> Result<Connection, RingError> {
    let coords: Vec<(String, CoordKind)> = a
        .chart()
        .coords()
        .chain(b.chart().coords())
        .map(|(name, kind)| (name.to_string(), kind))
        .collect();
    let chart = Chart::new(coords)?;
    let n = chart.dim();
    let na = a.chart().dim();
    let mut gamma = vec![ScalarField::zero(&chart); n * n * n];
    for k in 0..na {
        for i in 0..na {
            for j in 0..na {
                gamma[cube_index(n, k, i, j)] = a.gamma(k, i, j).extend_to(&chart)?;
            }
        }
    }
    let nb = b.chart().dim();
    for k in 0..nb {
        for i in 0..nb {
            for j in 0..nb {
                gamma[cube_index(n, na + k, na + i, na + j)] =
                    b.gamma(k, i, j).extend_to(&chart)?;
            }
        }
    }
    Ok(Connection::new(&chart, gamma))
}

/// The product classes assembled from factor cohomology bases.
#[derive(Clone, Debug)]
pub struct KunnethReport {
    /// Σ_{i+j=r} dim Hⁱ(M₁) · dim Hʲ(M₂); a lower bound for the product
    /// cohomology dimension.
    pub dim: usize,
    /// Products of pulled-back class representatives, on the product chart.
    pub basis: Vec<SymField>,
}

/// Kernel basis elements whose classes span the quotient: all of them when
/// nothing is exact, otherwise a greedy subset that keeps increasing the
/// rank over the exact image.
fn class_representatives(
    con: &Connection,
    report: &CohomologyReport,
) -> Result<Vec<SymField>, RingError> {
    if report.dim_h == 0 {
        return Ok(Vec::new());
    }
    if report.dim_exact_in_kill == 0 {
        return Ok(report.basis.clone());
    }
    let pot = TensorAnsatz::new(con.chart(), &report.potential_ansatz)?;
    let pot_fields: Vec<SymField> = par::map_range(pot.unknowns(), |t| pot.field(t));
    let images: Vec<SymField> = par::map_slice(&pot_fields, |psi| con.sym_derivative(psi));
    let (kill_vecs, image_vecs) = vectorize(con.chart(), &report.basis, &images);
    let mut base = image_vecs;
    let mut reps = Vec::new();
    for (field, vec) in report.basis.iter().zip(kill_vecs) {
        if reps.len() == report.dim_h {
            break;
        }
        if linalg::rank_increase(&base, std::slice::from_ref(&vec)) > 0 {
            reps.push(field.clone());
            base.push(vec);
        }
    }
    assert_eq!(reps.len(), report.dim_h, "quotient representatives found");
    Ok(reps)
}

/// Assembles the degree-`r` product classes of two factors from their
/// cohomology reports in degrees 0..=r (`reports*[i]` must be the degree-i
/// report). Every product of pulled-back representatives is a Killing field
/// for the block-diagonal product connection; each one is re-checked
/// exactly before it is returned.
pub fn kunneth_subspace(
    con1: &Connection,
    reports1: &[CohomologyReport],
    con2: &Connection,
    reports2: &[CohomologyReport],
    r: usize,
) -> Result<KunnethReport, RingError> {
    if reports1.len() != r + 1 || reports2.len() != r + 1 {
        return Err(RingError::IndexOutOfRange);
    }
    for (i, rep) in reports1.iter().enumerate() {
        if rep.ansatz.tensor_degree != i {
            return Err(RingError::IndexOutOfRange);
        }
    }
    for (i, rep) in reports2.iter().enumerate() {
        if rep.ansatz.tensor_degree != i {
            return Err(RingError::IndexOutOfRange);
        }
    }
    let product = product_connection(con1, con2)?;
    let chart = product.chart().clone();
    let mut dim = 0usize;
    let mut basis = Vec::new();
    for i in 0..=r {
        let j = r - i;
        dim += reports1[i].dim_h * reports2[j].dim_h;
        let reps1 = class_representatives(con1, &reports1[i])?;
        let reps2 = class_representatives(con2, &reports2[j])?;
        for a in &reps1 {
            let a_ext = a.extend_to(&chart)?;
            for b in &reps2 {
                let prod = a_ext.sym_product(&b.extend_to(&chart)?);
                assert!(
                    product.sym_derivative(&prod).is_zero(),
                    "product of Killing classes stays Killing"
                );
                basis.push(prod);
            }
        }
    }
    assert_eq!(basis.len(), dim, "one product per class pair");
    Ok(KunnethReport { dim, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_expression, parse_scalar};
    use crate::symtensor::SymField;

    fn euclidean(names: &[&str]) -> Connection {
        Connection::flat(&Chart::affine(names))
    }

    /// The torsion-free plane family ∇_∂x∂x = f₁∂x + f₂∂y,
    /// ∇_∂x∂y = ½(f₃∂x + f₄∂y), ∇_∂y∂y = f₅∂x + f₆∂y.
    fn plane_connection(chart: &Chart, f: [&str; 6]) -> Connection {
        let half = Q::new(1.into(), 2.into());
        let fs: Vec<ScalarField> = f.iter().map(|e| parse_scalar(chart, e).unwrap()).collect();
        let mut gamma = vec![ScalarField::zero(chart); 8];
        gamma[cube_index(2, 0, 0, 0)] = fs[0].clone();
        gamma[cube_index(2, 1, 0, 0)] = fs[1].clone();
        gamma[cube_index(2, 0, 0, 1)] = fs[2].scale(&half);
        gamma[cube_index(2, 0, 1, 0)] = fs[2].scale(&half);
        gamma[cube_index(2, 1, 0, 1)] = fs[3].scale(&half);
        gamma[cube_index(2, 1, 1, 0)] = fs[3].scale(&half);
        gamma[cube_index(2, 0, 1, 1)] = fs[4].clone();
        gamma[cube_index(2, 1, 1, 1)] = fs[5].clone();
        Connection::new(chart, gamma)
    }

    fn one_form(chart: &Chart, coeffs: &[&str]) -> SymField {
        let fields: Vec<ScalarField> =
            coeffs.iter().map(|e| parse_scalar(chart, e).unwrap()).collect();
        SymField::one_form(chart, &fields)
    }

    fn round_circle(f: &str) -> Connection {
        let chart = Chart::angles(&["t"]);
        let gamma = vec![parse_scalar(&chart, f).unwrap()];
        Connection::new(&chart, gamma)
    }

    fn assert_rank_oracle(problem: &LinearProblem) {
        assert_eq!(
            problem.rank(),
            linalg::numeric_rank(&problem.matrix().to_f64(), 1e-8),
            "exact and floating-point ranks disagree"
        );
    }

    #[test]
    fn multi_index_helpers() {
        assert_eq!(
            sorted_multi_indices(2, 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 1]]
        );
        assert_eq!(sorted_multi_indices(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(multi_index_factorial(&[0, 0]), Q::from_integer(2.into()));
        assert_eq!(multi_index_factorial(&[0, 1]), Q::one());
        assert_eq!(
            multi_index_factorial(&[1, 1, 1]),
            Q::from_integer(6.into())
        );
        let m = fiber_mono(&[0, 0, 2], 3);
        assert_eq!(&*m.0, &[2, 0, 1]);
    }

    #[test]
    fn euclidean_killing_one_forms_in_each_dimension() {
        for (names, expect) in [
            (vec!["x"], 1usize),
            (vec!["x", "y"], 3),
            (vec!["x", "y", "z"], 6),
        ] {
            let con = euclidean(&names);
            let n = names.len();
            let (basis, problem) = killing_solve(&con, &AnsatzSpec::new(1, 1)).unwrap();
            assert_eq!(basis.len(), expect, "dim Kill¹ on {n}-space");
            assert!(basis.len() <= n * (n + 1) / 2);
            assert_eq!(
                problem.rank() + basis.len(),
                problem.matrix().cols(),
                "rank–nullity"
            );
            assert_rank_oracle(&problem);
        }
    }

    #[test]
    fn euclidean_plane_killing_basis_is_the_classical_span() {
        let con = euclidean(&["x", "y"]);
        let chart = con.chart().clone();
        let (basis, _) = killing_solve(&con, &AnsatzSpec::new(1, 2)).unwrap();
        assert_eq!(basis.len(), 3, "no new elements above degree one");
        for alpha in [
            one_form(&chart, &["1", "0"]),
            one_form(&chart, &["0", "1"]),
            one_form(&chart, &["-y", "x"]),
        ] {
            assert!(con.sym_derivative(&alpha).is_zero());
            assert!(con.sym_derivative_components(&alpha).is_zero());
        }
    }

    #[test]
    fn killing_dimension_is_monotone_in_the_bound() {
        let chart = Chart::affine(&["x", "y"]);
        let con = plane_connection(&chart, ["0", "0", "x*y", "y", "0", "0"]);
        let mut last = 0usize;
        for d in [1u16, 2, 4, 6] {
            let (basis, _) = killing_solve(&con, &AnsatzSpec::new(1, d)).unwrap();
            assert!(basis.len() >= last);
            last = basis.len();
        }
    }

    #[test]
    fn plane_connection_with_trivial_cohomology_has_no_killing_forms() {
        let chart = Chart::affine(&["x", "y"]);
        let con = plane_connection(&chart, ["0", "0", "x*y", "y", "0", "0"]);
        let (basis, problem) = killing_solve(&con, &AnsatzSpec::new(1, 6)).unwrap();
        assert!(basis.is_empty());
        assert_rank_oracle(&problem);
        let report = cohomology(
            &con,
            &AnsatzSpec::new(1, 6),
            &AnsatzSpec::new(0, 7),
        )
        .unwrap();
        assert_eq!(
            (report.dim_kill, report.dim_exact_in_kill, report.dim_h),
            (0, 0, 0)
        );
        assert!(report.stable);
    }

    #[test]
    fn symmetric_derivative_matches_the_reduced_plane_system() {
        // For the plane family the three components of ∇ˢα are (up to the
        // factor two on the diagonal) ∂ₓα₁ − α₁f₁ − α₂f₂,
        // ∂_yα₁ + ∂ₓα₂ − α₁f₃ − α₂f₄ and ∂_yα₂ − α₁f₅ − α₂f₆.
        let chart = Chart::affine(&["x", "y"]);
        let con = plane_connection(&chart, ["0", "0", "x*y", "y", "0", "0"]);
        let alpha = one_form(&chart, &["x*y", "y^2"]);
        let ds = con.sym_derivative(&alpha);
        let sf = |s: &str| parse_scalar(&chart, s).unwrap();
        assert_eq!(ds.component(&[0, 0]), sf("2*y"));
        assert_eq!(
            ds.component(&[0, 1]),
            sf("x - (x*y)*(x*y) - y*(y^2)")
        );
        assert_eq!(ds.component(&[1, 1]), sf("2*(2*y)"));
    }

    #[test]
    fn euclidean_cohomology_dimensions() {
        let line = euclidean(&["x"]);
        let rep = cohomology(&line, &AnsatzSpec::new(1, 2), &AnsatzSpec::new(0, 3)).unwrap();
        assert_eq!((rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h), (1, 1, 0));
        assert!(rep.stable);

        let plane = euclidean(&["x", "y"]);
        let rep = cohomology(&plane, &AnsatzSpec::new(1, 2), &AnsatzSpec::new(0, 3)).unwrap();
        assert_eq!((rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h), (3, 2, 1));
        assert!(rep.stable);

        let auto = cohomology_auto(&plane, 1).unwrap();
        assert_eq!(auto.dim_h, 1);
        assert!(auto.stable);
    }

    #[test]
    fn degree_zero_cohomology_is_the_constants() {
        let chart = Chart::affine(&["x", "y"]);
        let con = plane_connection(&chart, ["0", "0", "x*y", "y", "0", "0"]);
        let rep = cohomology(&con, &AnsatzSpec::new(0, 3), &AnsatzSpec::new(0, 3)).unwrap();
        assert_eq!((rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h), (1, 0, 1));
        assert!(rep.stable);
        assert!(rep.basis[0].scalar().is_constant());
    }

    #[test]
    fn flat_torus_cohomology() {
        let chart = Chart::angles(&["t1", "t2"]);
        let con = Connection::flat(&chart);
        let rep = cohomology(&con, &AnsatzSpec::new(1, 3), &AnsatzSpec::new(0, 4)).unwrap();
        assert_eq!((rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h), (2, 0, 2));
        assert!(rep.stable);
    }

    #[test]
    fn two_dimensional_cohomology_family_is_verified_numerically() {
        // f₃ = f₄ = 1: the Killing one-forms are spanned by e^y dx, e^x dy
        // and dx − dy; only the last is closed, so the quotient is two-dim.
        let chart = Chart::affine(&["x", "y"]);
        let con = plane_connection(&chart, ["0", "0", "1", "1", "0", "0"]);
        let ex = |s: &str| parse_expression(s).unwrap();
        let basis = vec![
            vec![ex("exp(y)"), ex("0")],
            vec![ex("0"), ex("exp(x)")],
            vec![ex("1"), ex("-1")],
        ];
        let rep = verified_basis_cohomology(&con, &basis, 100, 1e-9, 0).unwrap();
        assert!(rep.verifications.iter().all(|v| v.passed));
        assert!(rep.verifications.iter().all(|v| v.max_residual < 1e-9));
        assert_eq!((rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h), (3, 1, 2));
    }

    #[test]
    fn three_dimensional_cohomology_family_is_verified_numerically() {
        let chart = Chart::affine(&["x", "y"]);
        let con = plane_connection(
            &chart,
            [
                "0",
                "0",
                "-2*y*(1 + 2/(1 + 2*y^2))",
                "-2*x*(1 + 2/(1 + 2*x^2))",
                "0",
                "0",
            ],
        );
        let ex = |s: &str| parse_expression(s).unwrap();
        let basis = vec![
            vec![ex("exp(-y^2)/(1 + 2*y^2)"), ex("0")],
            vec![ex("0"), ex("exp(-x^2)/(1 + 2*x^2)")],
            vec![ex("y/(1 + 2*y^2)"), ex("-x/(1 + 2*x^2)")],
        ];
        let rep = verified_basis_cohomology(&con, &basis, 100, 1e-9, 0).unwrap();
        assert!(rep.verifications.iter().all(|v| v.passed));
        assert_eq!((rep.dim_kill, rep.dim_exact_in_kill, rep.dim_h), (3, 0, 3));

        // A non-solution is rejected with an order-one residual.
        let bad: BTreeMap<Vec<usize>, Expr> =
            [(vec![0], ex("x"))].into_iter().collect();
        let rep = killing_verify(&con, &bad, 100, 1e-9, 0).unwrap();
        assert!(!rep.passed);
        assert!(rep.max_residual > 0.1);
    }

    #[test]
    fn verify_replaces_sample_points_at_poles() {
        let con = euclidean(&["x"]);
        let comps: BTreeMap<Vec<usize>, Expr> =
            [(vec![0], parse_expression("1/x").unwrap())].into_iter().collect();
        // The first Halton point is x = 0, exactly the pole.
        let rep = killing_verify(&con, &comps, 5, 1e-9, 0).unwrap();
        assert!(rep.resampled >= 1);
        assert_eq!(rep.points_used, 5);
        assert!(!rep.passed);
    }

    #[test]
    fn empty_families_are_rejected() {
        let con = euclidean(&["x", "y"]);
        assert_eq!(
            verified_basis_cohomology(&con, &[], 10, 1e-9, 0).unwrap_err(),
            RingError::EmptyAnsatz
        );
        let comps: BTreeMap<Vec<usize>, Expr> = BTreeMap::new();
        assert_eq!(
            killing_verify(&con, &comps, 10, 1e-9, 0).unwrap_err(),
            RingError::EmptyAnsatz
        );
    }

    #[test]
    fn circle_classification() {
        let chart = Chart::angles(&["t"]);
        let zero = ScalarField::zero(&chart);
        assert_eq!(circle_classify(&zero).unwrap(), (1, 1, true));
        let sin = ScalarField::sin_of(&chart, 0).unwrap();
        assert_eq!(circle_classify(&sin).unwrap(), (1, 1, true));
        let one_plus_sin = ScalarField::one(&chart).add(&sin);
        assert_eq!(circle_classify(&one_plus_sin).unwrap(), (0, 0, false));
        // Rational functions take the quadrature path.
        let cos = ScalarField::cos_of(&chart, 0).unwrap();
        let two_plus_cos = ScalarField::integer(&chart, 2).add(&cos);
        let odd = sin.div(&two_plus_cos).unwrap();
        assert_eq!(circle_classify(&odd).unwrap(), (1, 1, true));
        let even = ScalarField::one(&chart).div(&two_plus_cos).unwrap();
        assert_eq!(circle_classify(&even).unwrap(), (0, 0, false));
        // Wrong chart kind is refused.
        let affine = parse_scalar(&Chart::affine(&["x"]), "x").unwrap();
        assert_eq!(
            circle_classify(&affine).unwrap_err(),
            RingError::ChartMismatch
        );
    }

    #[test]
    fn circle_killing_solution_is_verified() {
        // ∂θα = (sin θ)·α has the periodic solution α = e^{−cos θ}.
        let con = round_circle("sin(t)");
        let comps: BTreeMap<Vec<usize>, Expr> =
            [(vec![0], parse_expression("exp(-cos(t))").unwrap())]
                .into_iter()
                .collect();
        let rep = killing_verify(&con, &comps, 100, 1e-9, 0).unwrap();
        assert!(rep.passed, "max residual {}", rep.max_residual);
    }

    #[test]
    fn euclidean_affine_parallel_and_bivector_dimensions() {
        let plane = euclidean(&["x", "y"]);
        let spec = AnsatzSpec::new(0, 2);
        let (aff, problem) = affine_fields(&plane, &spec).unwrap();
        assert_eq!(aff.len(), 6);
        assert_rank_oracle(&problem);
        let (par0, _) = parallel_fields(&plane, &spec).unwrap();
        assert_eq!(par0.len(), 2);
        let (biv, _) = parallel_bivectors(&plane, &spec).unwrap();
        assert_eq!(biv.len(), 1);
        assert!(biv[0][0][1].is_constant());

        let line = euclidean(&["x"]);
        let (aff, _) = affine_fields(&line, &AnsatzSpec::new(0, 3)).unwrap();
        assert_eq!(aff.len(), 2, "span of ∂x and x∂x");
        let (par0, _) = parallel_fields(&line, &AnsatzSpec::new(0, 3)).unwrap();
        assert_eq!(par0.len(), 1);
        let (biv, _) = parallel_bivectors(&line, &AnsatzSpec::new(0, 3)).unwrap();
        assert!(biv.is_empty(), "no bivectors on a line");
    }

    #[test]
    fn affine_solver_respects_torsion_guard() {
        let chart = Chart::affine(&["x", "y"]);
        let mut gamma = vec![ScalarField::zero(&chart); 8];
        gamma[cube_index(2, 0, 0, 1)] = ScalarField::one(&chart);
        let torsional = Connection::new(&chart, gamma);
        assert_eq!(
            affine_fields(&torsional, &AnsatzSpec::new(0, 1)).unwrap_err(),
            RingError::TorsionPresent
        );
        assert_eq!(
            parallel_bivectors(&torsional, &AnsatzSpec::new(0, 1)).unwrap_err(),
            RingError::TorsionPresent
        );
    }

    #[test]
    fn lift_summands_on_the_plane_line_and_circle() {
        let plane = euclidean(&["x", "y"]);
        let rep = pw_cohomology_lift(&plane, 2).unwrap();
        assert_eq!(rep.summands(), (1, 4, 1));
        assert_eq!(rep.total, 6);
        assert!(rep.h1_stable);

        let line = euclidean(&["x"]);
        let rep = pw_cohomology_lift(&line, 2).unwrap();
        assert_eq!(rep.summands(), (0, 1, 0));
        assert_eq!(rep.total, 1);

        let circle = round_circle("0");
        let rep = pw_cohomology_lift(&circle, 3).unwrap();
        assert_eq!(rep.summands(), (0, 0, 1));
        assert_eq!(rep.total, 1);
    }

    #[test]
    fn line_lift_total_matches_the_doubled_chart_cohomology() {
        // For the flat line the lifted metric connection on (x, p_x) is flat,
        // so the cotangent-chart cohomology can be computed directly and
        // compared with the summand count.
        let line = euclidean(&["x"]);
        let lift = pw_cohomology_lift(&line, 2).unwrap();
        let doubled = euclidean(&["x", "p_x"]);
        let rep = cohomology(&doubled, &AnsatzSpec::new(1, 2), &AnsatzSpec::new(0, 3)).unwrap();
        assert_eq!(lift.total, rep.dim_h);
    }

    #[test]
    fn kunneth_classes_on_cylinder_plane_and_torus() {
        let degree_pair = |con: &Connection, d: u16| {
            vec![
                cohomology(con, &AnsatzSpec::new(0, d), &AnsatzSpec::new(0, d)).unwrap(),
                cohomology(con, &AnsatzSpec::new(1, d), &AnsatzSpec::new(0, d + 1)).unwrap(),
            ]
        };

        // Flat cylinder: the product classes fill the whole cohomology.
        let circle = round_circle("0");
        let line = euclidean(&["x"]);
        let kun = kunneth_subspace(
            &circle,
            &degree_pair(&circle, 3),
            &line,
            &degree_pair(&line, 3),
            1,
        )
        .unwrap();
        assert_eq!(kun.dim, 1);
        let cylinder = product_connection(&circle, &line).unwrap();
        let full = cohomology(&cylinder, &AnsatzSpec::new(1, 3), &AnsatzSpec::new(0, 4)).unwrap();
        assert_eq!(full.dim_h, 1);
        assert_eq!(kun.dim, full.dim_h);

        // Euclidean plane as a product of two lines: a strict subspace.
        let line2 = euclidean(&["y"]);
        let kun = kunneth_subspace(
            &line,
            &degree_pair(&line, 3),
            &line2,
            &degree_pair(&line2, 3),
            1,
        )
        .unwrap();
        assert_eq!(kun.dim, 0);
        let plane = product_connection(&line, &line2).unwrap();
        let full = cohomology(&plane, &AnsatzSpec::new(1, 3), &AnsatzSpec::new(0, 4)).unwrap();
        assert_eq!(full.dim_h, 1);
        assert!(kun.dim < full.dim_h);

        // Flat torus: the product classes fill the cohomology again.
        let c1 = round_circle("0");
        let c2 = Connection::flat(&Chart::angles(&["s"]));
        let kun = kunneth_subspace(
            &c1,
            &degree_pair(&c1, 3),
            &c2,
            &degree_pair(&c2, 3),
            1,
        )
        .unwrap();
        assert_eq!(kun.dim, 2);
        let torus = product_connection(&c1, &c2).unwrap();
        let full = cohomology(&torus, &AnsatzSpec::new(1, 3), &AnsatzSpec::new(0, 4)).unwrap();
        assert_eq!(full.dim_h, 2);
        assert_eq!(kun.basis.len(), 2);
    }

    #[test]
    fn product_charts_require_distinct_names() {
        let a = euclidean(&["x"]);
        assert_eq!(
            product_connection(&a, &a).unwrap_err(),
            RingError::DuplicateCoordinate("x".to_string())
        );
    }

    #[test]
    fn representatives_skip_the_exact_directions() {
        // On the Euclidean plane dx and dy are exact while x dy − y dx is
        // not, so exactly one representative survives.
        let plane = euclidean(&["x", "y"]);
        let rep = cohomology(&plane, &AnsatzSpec::new(1, 2), &AnsatzSpec::new(0, 3)).unwrap();
        let reps = class_representatives(&plane, &rep).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(plane.sym_derivative(&reps[0]).is_zero());
    }

    #[test]
    fn ansatz_monomials_respect_normal_form_and_bounds() {
        let chart = Chart::new(vec![
            ("x", CoordKind::Affine),
            ("t", CoordKind::Angle),
        ])
        .unwrap();
        let spec = AnsatzSpec::new(0, 3);
        let monos = spec.monomials(&chart).unwrap();
        assert!(monos.iter().all(|m| m.0[2] <= 1), "sin exponent capped");
        assert!(monos
            .iter()
            .all(|m| m.0.iter().map(|&e| e as u32).sum::<u32>() <= 3));
        let capped = AnsatzSpec {
            coord_bounds: Some(vec![1, 3]),
            ..spec.clone()
        };
        let capped_monos = capped.monomials(&chart).unwrap();
        assert!(capped_monos.iter().all(|m| m.0[0] <= 1));
        assert!(capped_monos.len() < monos.len());
        let bad = AnsatzSpec {
            coord_bounds: Some(vec![1]),
            ..spec
        };
        assert_eq!(
            bad.monomials(&chart).unwrap_err(),
            RingError::IndexOutOfRange
        );
    }
}
