//! The cotangent bundle of a chart: the doubled coordinate chart, the
//! vertical, horizontal, complete, endomorphism and bivector lifts of base
//! data, the Patterson–Walker metric of a connection, the canonical one-form
//! and symplectic form, and the two lifted connections adapted to the
//! metric. A Koszul-formula Levi-Civita constructor for arbitrary
//! nondegenerate metrics lives here as well.
//!
//! The two lifted connections are built through independent routes on
//! purpose: `lifted_connection_hat` is assembled on the horizontal/vertical
//! frame and pushed to coordinate Christoffel symbols by one audited frame
//! change, while `lifted_connection_bar` adds a curvature correction to the
//! same frame data and is compared exactly against `levi_civita` of the
//! Patterson–Walker metric in the tests.

use crate::connection::{cube_index, Connection, IdentityReport};
use crate::linalg;
use crate::par;
use crate::ring::{Chart, CoordKind, Q, RingError, ScalarField};
use crate::symtensor::{seeded_scalar, seeded_vector, SymField};

/// Prefix used to mangle base coordinate names into fiber coordinate names.
const FIBER_PREFIX: &str = "p_";

/// The chart of the cotangent bundle over a base chart: the base coordinates
/// (keeping their kinds) followed by one affine fiber coordinate `p_<name>`
/// per base coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentChart {
    base: Chart,
    total: Chart,
}

impl CotangentChart {
    pub fn new(base: &Chart) -> Result<CotangentChart, RingError> {
        let n = base.dim();
        let mut coords: Vec<(String, CoordKind)> = Vec::with_capacity(2 * n);
        for i in 0..n {
            coords.push((base.coord_name(i).to_string(), base.coord_kind(i)));
        }
        for i in 0..n {
            coords.push((
                format!("{}{}", FIBER_PREFIX, base.coord_name(i)),
                CoordKind::Affine,
            ));
        }
        let total = Chart::new(coords)?;
        Ok(CotangentChart {
            base: base.clone(),
            total,
        })
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    /// Base dimension n; the total chart has dimension 2n.
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Slot of the i-th base coordinate in the total chart.
    pub fn x_slot(&self, i: usize) -> usize {
        i
    }

    /// Slot of the i-th fiber coordinate in the total chart.
    pub fn p_slot(&self, i: usize) -> usize {
        self.base.dim() + i
    }

    /// The i-th fiber coordinate pᵢ as a scalar on the total chart.
    pub fn p(&self, i: usize) -> ScalarField {
        ScalarField::coordinate(&self.total, self.p_slot(i)).expect("fiber slot in range")
    }

    /// Pull a base scalar back along the bundle projection.
    pub fn pull_scalar(&self, f: &ScalarField) -> Result<ScalarField, RingError> {
        if f.chart() != &self.base {
            return Err(RingError::ChartMismatch);
        }
        f.extend_to(&self.total)
    }

    /// Pull a base symmetric field back along the bundle projection (fiber
    /// slots stay on the base directions).
    pub fn pull_sym(&self, phi: &SymField) -> Result<SymField, RingError> {
        if phi.chart() != &self.base {
            return Err(RingError::ChartMismatch);
        }
        phi.extend_to(&self.total)
    }

    fn check_base(&self, comps: &[ScalarField]) -> Result<(), RingError> {
        if comps.len() != self.dim() || comps.iter().any(|c| c.chart() != &self.base) {
            return Err(RingError::ChartMismatch);
        }
        Ok(())
    }

    fn zero_vector(&self) -> Vec<ScalarField> {
        vec![ScalarField::zero(&self.total); 2 * self.dim()]
    }

    /// Vertical lift of a 1-form with base components αⱼ: the fiberwise
    /// constant vector field αⱼ∂_{pⱼ}.
    pub fn lift_vertical_1form(&self, alpha: &[ScalarField]) -> Result<Vec<ScalarField>, RingError> {
        self.check_base(alpha)?;
        let mut out = self.zero_vector();
        for j in 0..self.dim() {
            out[self.p_slot(j)] = alpha[j].extend_to(&self.total)?;
        }
        Ok(out)
    }

    /// Vertical lift of a vector field: the fiber-linear function
    /// ζ ↦ ζ(X), in coordinates pᵢXⁱ.
    pub fn lift_vertical_vec(&self, x: &[ScalarField]) -> Result<ScalarField, RingError> {
        self.check_base(x)?;
        let mut out = ScalarField::zero(&self.total);
        for i in 0..self.dim() {
            if x[i].is_zero() {
                continue;
            }
            out = out.add(&self.p(i).mul(&x[i].extend_to(&self.total)?));
        }
        Ok(out)
    }

    /// Horizontal lift of the coordinate field ∂ᵢ: ∂ᵢ + pₖΓᵏᵢⱼ∂_{pⱼ}. The
    /// fiber part is the parallel-transport equation of covectors along ∂ᵢ,
    /// so the direction sits in the first lower slot of Γ.
    fn horizontal_frame_field(
        &self,
        con: &Connection,
        i: usize,
    ) -> Result<Vec<ScalarField>, RingError> {
        let n = self.dim();
        let mut out = self.zero_vector();
        out[self.x_slot(i)] = ScalarField::one(&self.total);
        for j in 0..n {
            let mut c = ScalarField::zero(&self.total);
            for k in 0..n {
                let g = con.gamma(k, i, j);
                if g.is_zero() {
                    continue;
                }
                c = c.add(&self.p(k).mul(&g.extend_to(&self.total)?));
            }
            out[self.p_slot(j)] = c;
        }
        Ok(out)
    }

    /// Horizontal lift of a base vector field: the unique horizontal field
    /// projecting to X, in coordinates Xⁱ(∂ᵢ + pₖΓᵏᵢⱼ∂_{pⱼ}).
    pub fn lift_horizontal_vec(
        &self,
        con: &Connection,
        x: &[ScalarField],
    ) -> Result<Vec<ScalarField>, RingError> {
        self.check_base(x)?;
        if con.chart() != &self.base {
            return Err(RingError::ChartMismatch);
        }
        let n = self.dim();
        let mut out = self.zero_vector();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let xi = x[i].extend_to(&self.total)?;
            let frame = self.horizontal_frame_field(con, i)?;
            for a in 0..2 * n {
                if frame[a].is_zero() {
                    continue;
                }
                out[a] = out[a].add(&xi.mul(&frame[a]));
            }
        }
        Ok(out)
    }

    /// Complete lift of a base vector field: Xⁱ∂ᵢ − pᵢ(∂ⱼXⁱ)∂_{pⱼ}, the
    /// generator of the covector lift of the flow of X.
    pub fn lift_complete(&self, x: &[ScalarField]) -> Result<Vec<ScalarField>, RingError> {
        self.check_base(x)?;
        let n = self.dim();
        let mut out = self.zero_vector();
        for i in 0..n {
            out[self.x_slot(i)] = x[i].extend_to(&self.total)?;
        }
        for j in 0..n {
            let mut c = ScalarField::zero(&self.total);
            for i in 0..n {
                let d = x[i].partial(j);
                if d.is_zero() {
                    continue;
                }
                c = c.sub(&self.p(i).mul(&d.extend_to(&self.total)?));
            }
            out[self.p_slot(j)] = c;
        }
        Ok(out)
    }

    /// Vertical lift of an endomorphism field A = Aⁱⱼ dxʲ⊗∂ᵢ (`a[i][j]`,
    /// row = output index): the fiber-linear vertical field pᵢAⁱⱼ∂_{pⱼ}.
    pub fn lift_endo(&self, a: &[Vec<ScalarField>]) -> Result<Vec<ScalarField>, RingError> {
        let n = self.dim();
        if a.len() != n {
            return Err(RingError::ChartMismatch);
        }
        for row in a {
            self.check_base(row)?;
        }
        let mut out = self.zero_vector();
        for j in 0..n {
            let mut c = ScalarField::zero(&self.total);
            for i in 0..n {
                if a[i][j].is_zero() {
                    continue;
                }
                c = c.add(&self.p(i).mul(&a[i][j].extend_to(&self.total)?));
            }
            out[self.p_slot(j)] = c;
        }
        Ok(out)
    }

    /// Horizontal lift of a bivector π = ½πⁱʲ∂ᵢ∧∂ⱼ (components
    /// antisymmetric): the field pᵢπⁱʲ∂ʰⱼ over the horizontal frame.
    pub fn lift_horizontal_bivec(
        &self,
        con: &Connection,
        pi: &[Vec<ScalarField>],
    ) -> Result<Vec<ScalarField>, RingError> {
        let n = self.dim();
        if pi.len() != n || con.chart() != &self.base {
            return Err(RingError::ChartMismatch);
        }
        for row in pi {
            self.check_base(row)?;
        }
        let mut out = self.zero_vector();
        for j in 0..n {
            let mut coeff = ScalarField::zero(&self.total);
            for i in 0..n {
                if pi[i][j].is_zero() {
                    continue;
                }
                coeff = coeff.add(&self.p(i).mul(&pi[i][j].extend_to(&self.total)?));
            }
            if coeff.is_zero() {
                continue;
            }
            let frame = self.horizontal_frame_field(con, j)?;
            for a in 0..2 * n {
                if frame[a].is_zero() {
                    continue;
                }
                out[a] = out[a].add(&coeff.mul(&frame[a]));
            }
        }
        Ok(out)
    }

    /// The split-signature metric dpᵢ⊙dxⁱ − pₖΓᵏᵢⱼ dxⁱ⊙dxʲ on the total
    /// chart as a degree-2 field. Only the symmetric part of Γ enters, so
    /// connections sharing a torsion-free part give the same metric.
    pub fn patterson_walker(&self, con: &Connection) -> Result<SymField, RingError> {
        if con.chart() != &self.base {
            return Err(RingError::ChartMismatch);
        }
        let n = self.dim();
        let mut g = vec![vec![ScalarField::zero(&self.total); 2 * n]; 2 * n];
        let one = ScalarField::one(&self.total);
        for i in 0..n {
            g[self.x_slot(i)][self.p_slot(i)] = one.clone();
            g[self.p_slot(i)][self.x_slot(i)] = one.clone();
            for j in 0..n {
                let mut c = ScalarField::zero(&self.total);
                for k in 0..n {
                    let s = con.gamma(k, i, j).add(con.gamma(k, j, i));
                    if s.is_zero() {
                        continue;
                    }
                    c = c.sub(&self.p(k).mul(&s.extend_to(&self.total)?));
                }
                g[self.x_slot(i)][self.x_slot(j)] = c;
            }
        }
        Ok(SymField::from_matrix(&self.total, &g))
    }

    /// The canonical 1-form pᵢdxⁱ together with the canonical symplectic
    /// form, the latter given directly by its constant component matrix so
    /// that `exterior_derivative` of the former can be checked against it.
    pub fn canonical_forms(&self) -> (SymField, TwoForm) {
        let n = self.dim();
        let mut coeffs = vec![ScalarField::zero(&self.total); 2 * n];
        for i in 0..n {
            coeffs[self.x_slot(i)] = self.p(i);
        }
        let alpha = SymField::one_form(&self.total, &coeffs);
        let mut comps = vec![vec![ScalarField::zero(&self.total); 2 * n]; 2 * n];
        let one = ScalarField::one(&self.total);
        for i in 0..n {
            comps[self.x_slot(i)][self.p_slot(i)] = one.clone();
            comps[self.p_slot(i)][self.x_slot(i)] = one.neg();
        }
        (alpha, TwoForm::new(&self.total, comps))
    }

    /// Frame coefficients Wᶜ_{AB} of the connection lift determined by
    /// ∇̂ over horizontal directions reproducing ∇ on both horizontal lifts
    /// and vertical 1-form lifts, and vanishing over vertical directions.
    /// The frame is E_i = ∂ʰᵢ, E_{n+j} = ∂_{pⱼ}.
    fn hat_frame_coefficients(&self, con: &Connection) -> Result<Vec<ScalarField>, RingError> {
        if con.chart() != &self.base {
            return Err(RingError::ChartMismatch);
        }
        let n = self.dim();
        let m = 2 * n;
        let mut w = vec![ScalarField::zero(&self.total); m * m * m];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let g = con.gamma(k, i, j);
                    if g.is_zero() {
                        continue;
                    }
                    let gt = g.extend_to(&self.total)?;
                    // ∇̂_{∂ʰᵢ}∂ʰⱼ = Γᵏᵢⱼ ∂ʰₖ.
                    w[cube_index(m, k, i, j)] = gt.clone();
                    // ∇̂_{∂ʰᵢ}(dxᵏ)ᵛ = −Γᵏᵢⱼ (dxʲ)ᵛ: the dual pairing flips
                    // the sign and moves the upper index down.
                    w[cube_index(m, n + j, i, n + k)] = gt.neg();
                }
            }
        }
        Ok(w)
    }

    /// Convert frame coefficients over the horizontal/vertical frame into
    /// coordinate Christoffel symbols: with P the frame matrix (columns are
    /// the frame fields) and Q = P⁻¹,
    /// Γᶜ_{ab} = Qᴬₐ (Pᵈ_A ∂_d Qᴮ_b) Pᶜ_B + Qᴬₐ Qᴮ_b Wᶜ́_{AB} Pᶜ_Ć.
    fn frame_to_coordinates(
        &self,
        con: &Connection,
        w: &[ScalarField],
    ) -> Result<Connection, RingError> {
        let n = self.dim();
        let m = 2 * n;
        let zero = ScalarField::zero(&self.total);
        let mut p_mat = vec![vec![zero.clone(); m]; m];
        for i in 0..n {
            let frame = self.horizontal_frame_field(con, i)?;
            for d in 0..m {
                p_mat[d][i] = frame[d].clone();
            }
            p_mat[self.p_slot(i)][n + i] = ScalarField::one(&self.total);
        }
        let q = linalg::invert_field(&p_mat)?;
        // e1[A][B][b] = E_A(Qᴮ_b), the frame derivative of the inverse.
        let e1: Vec<Vec<Vec<ScalarField>>> = par::map_range(m, |a_frame| {
            (0..m)
                .map(|b_frame| {
                    (0..m)
                        .map(|b| {
                            let mut acc = zero.clone();
                            for d in 0..m {
                                if p_mat[d][a_frame].is_zero() {
                                    continue;
                                }
                                let dq = q[b_frame][b].partial(d);
                                if dq.is_zero() {
                                    continue;
                                }
                                acc = acc.add(&p_mat[d][a_frame].mul(&dq));
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        });
        let gamma_rows: Vec<Vec<ScalarField>> = par::map_range(m * m, |ab| {
            let a = ab / m;
            let b = ab % m;
            (0..m)
                .map(|c| {
                    let mut acc = zero.clone();
                    for a_frame in 0..m {
                        if q[a_frame][a].is_zero() {
                            continue;
                        }
                        let mut inner = zero.clone();
                        for b_frame in 0..m {
                            // Derivative part.
                            if !e1[a_frame][b_frame][b].is_zero() && !p_mat[c][b_frame].is_zero() {
                                inner =
                                    inner.add(&e1[a_frame][b_frame][b].mul(&p_mat[c][b_frame]));
                            }
                            // Frame-coefficient part.
                            if q[b_frame][b].is_zero() {
                                continue;
                            }
                            for c_frame in 0..m {
                                let wc = &w[cube_index(m, c_frame, a_frame, b_frame)];
                                if wc.is_zero() || p_mat[c][c_frame].is_zero() {
                                    continue;
                                }
                                inner = inner.add(&q[b_frame][b].mul(&wc.mul(&p_mat[c][c_frame])));
                            }
                        }
                        acc = acc.add(&q[a_frame][a].mul(&inner));
                    }
                    acc
                })
                .collect()
        });
        let mut gamma = vec![zero; m * m * m];
        for (ab, row) in gamma_rows.into_iter().enumerate() {
            let a = ab / m;
            let b = ab % m;
            for (c, v) in row.into_iter().enumerate() {
                gamma[cube_index(m, c, a, b)] = v;
            }
        }
        Ok(Connection::new(&self.total, gamma))
    }

    /// The connection on the total chart that reproduces ∇ on horizontal
    /// lifts and vertical 1-form lifts and annihilates vertical directions,
    /// as coordinate Christoffel symbols.
    pub fn lifted_connection_hat(&self, con: &Connection) -> Result<Connection, RingError> {
        let w = self.hat_frame_coefficients(con)?;
        self.frame_to_coordinates(con, &w)
    }

    /// The Levi-Civita connection of the Patterson–Walker metric, built by
    /// adding the curvature correction −pₗRˡⱼₘᵢ on the vertical output of
    /// two horizontal directions. Requires a torsion-free base connection.
    pub fn lifted_connection_bar(&self, con: &Connection) -> Result<Connection, RingError> {
        if !con.is_torsion_free() {
            return Err(RingError::TorsionPresent);
        }
        let n = self.dim();
        let m = 2 * n;
        let mut w = self.hat_frame_coefficients(con)?;
        let r = con.riemann();
        for i in 0..n {
            for j in 0..n {
                for mm in 0..n {
                    let mut c = ScalarField::zero(&self.total);
                    for l in 0..n {
                        // The endomorphism Z ↦ R(∂ⱼ, Z)∂ᵢ in the slot (m, l).
                        let rc = r.component(l, j, mm, i);
                        if rc.is_zero() {
                            continue;
                        }
                        c = c.sub(&self.p(l).mul(&rc.extend_to(&self.total)?));
                    }
                    if c.is_zero() {
                        continue;
                    }
                    let idx = cube_index(m, n + mm, i, j);
                    w[idx] = w[idx].add(&c);
                }
            }
        }
        self.frame_to_coordinates(con, &w)
    }
}

/// An antisymmetric 2-form on a chart, stored by its full component matrix
/// ω(∂ₐ, ∂_b).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    chart: Chart,
    comps: Vec<Vec<ScalarField>>,
}

impl TwoForm {
    pub fn new(chart: &Chart, comps: Vec<Vec<ScalarField>>) -> TwoForm {
        let n = chart.dim();
        assert_eq!(comps.len(), n);
        assert!(comps.iter().all(|row| row.len() == n));
        for a in 0..n {
            for b in 0..=a {
                assert!(
                    comps[a][b] == comps[b][a].neg(),
                    "component matrix must be antisymmetric"
                );
            }
        }
        TwoForm {
            chart: chart.clone(),
            comps,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, a: usize, b: usize) -> &ScalarField {
        &self.comps[a][b]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|row| row.iter().all(|c| c.is_zero()))
    }

    /// Evaluate on two vector fields: ω(V, W) = ω_{ab}VᵃWᵇ.
    pub fn apply(&self, v: &[ScalarField], w: &[ScalarField]) -> ScalarField {
        let n = self.chart.dim();
        assert_eq!(v.len(), n);
        assert_eq!(w.len(), n);
        let mut acc = ScalarField::zero(&self.chart);
        for a in 0..n {
            if v[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if self.comps[a][b].is_zero() || w[b].is_zero() {
                    continue;
                }
                acc = acc.add(&self.comps[a][b].mul(&v[a]).mul(&w[b]));
            }
        }
        acc
    }
}

/// Exterior derivative of a 1-form given by coefficients. The component
/// convention is (dα)(∂ₐ,∂_b) = ∂_bαₐ − ∂ₐα_b, which makes d(pᵢdxⁱ) the
/// canonical symplectic form with ω(∂_{xⁱ}, ∂_{pᵢ}) = 1.
pub fn exterior_derivative(chart: &Chart, alpha: &[ScalarField]) -> TwoForm {
    let n = chart.dim();
    assert_eq!(alpha.len(), n);
    let mut comps = vec![vec![ScalarField::zero(chart); n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            comps[a][b] = alpha[a].partial(b).sub(&alpha[b].partial(a));
        }
    }
    TwoForm::new(chart, comps)
}

/// Whether a 1-form given by coefficients is closed.
pub fn is_closed_1form(chart: &Chart, alpha: &[ScalarField]) -> bool {
    exterior_derivative(chart, alpha).is_zero()
}

/// Directional derivative of a scalar by a vector field: V(f) = Vᵃ∂ₐf.
pub fn apply_vector(v: &[ScalarField], f: &ScalarField) -> ScalarField {
    let n = f.chart().dim();
    assert_eq!(v.len(), n);
    let mut acc = ScalarField::zero(f.chart());
    for a in 0..n {
        if v[a].is_zero() {
            continue;
        }
        let d = f.partial(a);
        if d.is_zero() {
            continue;
        }
        acc = acc.add(&v[a].mul(&d));
    }
    acc
}

/// The Levi-Civita connection of a nondegenerate degree-2 field, by the
/// Koszul formula Γᵏᵢⱼ = ½gᵏˡ(∂ᵢg_{lj} + ∂ⱼg_{li} − ∂ₗg_{ij}).
pub fn levi_civita(g: &SymField) -> Result<Connection, RingError> {
    assert_eq!(g.degree(), 2, "metric must have degree 2");
    let chart = g.chart().clone();
    let n = chart.dim();
    let mut mat = vec![vec![ScalarField::zero(&chart); n]; n];
    for a in 0..n {
        for b in 0..n {
            mat[a][b] = g.component(&[a, b]);
        }
    }
    let inv = linalg::invert_field(&mat).map_err(|e| match e {
        RingError::DivisionByZero => RingError::DegenerateMetric,
        other => other,
    })?;
    let half = Q::new(1.into(), 2.into());
    let gamma = par::map_range(n * n * n, |idx| {
        let k = idx / (n * n);
        let i = (idx / n) % n;
        let j = idx % n;
        let mut acc = ScalarField::zero(&chart);
        for l in 0..n {
            if inv[k][l].is_zero() {
                continue;
            }
            let s = mat[l][j]
                .partial(i)
                .add(&mat[l][i].partial(j))
                .sub(&mat[i][j].partial(l));
            if s.is_zero() {
                continue;
            }
            acc = acc.add(&inv[k][l].mul(&s));
        }
        acc.scale(&half)
    });
    Ok(Connection::new(&chart, gamma))
}

/// Whether the complete lift of X is a gradient Killing field for the
/// Patterson–Walker metric of the connection: true iff X is parallel and
/// the symmetrized curvature contraction of X vanishes, both checked
/// exactly on components.
pub fn gradient_killing_complete_lift(
    con: &Connection,
    x: &[ScalarField],
) -> Result<bool, RingError> {
    if !con.is_torsion_free() {
        return Err(RingError::TorsionPresent);
    }
    let dx = con.cov_vector(x);
    if dx.iter().any(|row| row.iter().any(|c| !c.is_zero())) {
        return Ok(false);
    }
    Ok(con.riemann().two_sym_contract(x).is_zero())
}

/// The bundled exact identity suite for the split metric of one
/// torsion-free connection: both lifted connections send the canonical
/// one-form to the metric, the metrical lift is the Levi-Civita connection
/// of the metric, the canonical two-form is the exterior differential of
/// the canonical one-form, the vertical subbundle is isotropic, complete
/// lifts pair through the symmetric bracket, and the endomorphism,
/// bivector, vertical and horizontal lifts pair as the fiber-linear
/// functions of their base data. The pairing identities run on two rounds
/// of seeded polynomial inputs.
pub fn pw_report(con: &Connection, seed: u64) -> Result<IdentityReport, RingError> {
    if !con.is_torsion_free() {
        return Err(RingError::TorsionPresent);
    }
    let base = con.chart();
    let n = base.dim();
    let ct = CotangentChart::new(base)?;
    let g = ct.patterson_walker(con)?;
    let (alpha_can, omega_can) = ct.canonical_forms();
    let mut report = IdentityReport::new();

    let hat = ct.lifted_connection_hat(con)?;
    let bar = ct.lifted_connection_bar(con)?;
    report.push(
        "hat_sym_derivative_of_canonical_form_is_metric",
        hat.sym_derivative(&alpha_can) == g,
    );
    report.push(
        "bar_sym_derivative_of_canonical_form_is_metric",
        bar.sym_derivative(&alpha_can) == g,
    );
    report.push("bar_is_levi_civita_of_metric", bar == levi_civita(&g)?);

    let can_coeffs: Vec<ScalarField> = (0..2 * n).map(|a| alpha_can.component(&[a])).collect();
    report.push(
        "exterior_derivative_of_canonical_form_is_canonical_two_form",
        exterior_derivative(ct.total(), &can_coeffs) == omega_can,
    );

    let isotropic = (0..n)
        .all(|i| (0..n).all(|j| g.component(&[ct.p_slot(i), ct.p_slot(j)]).is_zero()));
    report.push("vertical_subbundle_is_isotropic", isotropic);

    let mut state = seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(1);
    for trial in 0..2u32 {
        let x = seeded_vector(base, 2, &mut state);
        let y = seeded_vector(base, 2, &mut state);
        let alpha = seeded_vector(base, 2, &mut state);
        let a: Vec<Vec<ScalarField>> = (0..n)
            .map(|_| seeded_vector(base, 2, &mut state))
            .collect();
        let mut pi = vec![vec![ScalarField::zero(base); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let p = seeded_scalar(base, 2, &mut state);
                pi[i][j] = p.clone();
                pi[j][i] = p.neg();
            }
        }

        let xc = ct.lift_complete(&x)?;
        let yc = ct.lift_complete(&y)?;
        let xh = ct.lift_horizontal_vec(con, &x)?;
        let av = ct.lift_vertical_1form(&alpha)?;
        let au = ct.lift_endo(&a)?;
        let pih = ct.lift_horizontal_bivec(con, &pi)?;

        report.push(
            &format!("complete_lifts_pair_through_symmetric_bracket_{trial}"),
            g.apply_vectors(&[&xc, &yc])
                == ct.lift_vertical_vec(&con.sym_bracket(&x, &y))?.neg(),
        );
        report.push(
            &format!("endo_lift_pairs_with_vertical_to_zero_{trial}"),
            g.apply_vectors(&[&au, &av]).is_zero(),
        );
        let ax: Vec<ScalarField> = (0..n)
            .map(|i| {
                (0..n).fold(ScalarField::zero(base), |acc, j| {
                    acc.add(&a[i][j].mul(&x[j]))
                })
            })
            .collect();
        report.push(
            &format!("endo_lift_pairs_with_horizontal_as_image_{trial}"),
            g.apply_vectors(&[&au, &xh]) == ct.lift_vertical_vec(&ax)?,
        );
        let pi_alpha: Vec<ScalarField> = (0..n)
            .map(|j| {
                (0..n).fold(ScalarField::zero(base), |acc, i| {
                    acc.add(&pi[j][i].mul(&alpha[i]))
                })
            })
            .collect();
        report.push(
            &format!("bivector_lift_pairs_with_vertical_as_insertion_{trial}"),
            g.apply_vectors(&[&pih, &av]) == ct.lift_vertical_vec(&pi_alpha)?,
        );
        report.push(
            &format!("canonical_form_reads_horizontal_lifts_{trial}"),
            alpha_can.apply_vectors(&[&xh]) == ct.lift_vertical_vec(&x)?,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{lie_bracket, Connection};
    use crate::ring::parse_scalar;
    use crate::symtensor::SymField;

    fn scalars(chart: &Chart, exprs: &[&str]) -> Vec<ScalarField> {
        exprs.iter().map(|e| parse_scalar(chart, e).unwrap()).collect()
    }

    /// The ℝ² connection with ∇_∂x∂x = f₁∂x+f₂∂y, ∇_∂x∂y = ∇_∂y∂x =
    /// ½(f₃∂x+f₄∂y), ∇_∂y∂y = f₅∂x+f₆∂y.
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

    fn assert_vec_eq(a: &[ScalarField], b: &[ScalarField]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn total_chart_layout() {
        let base = Chart::new(vec![("theta", CoordKind::Angle), ("z", CoordKind::Affine)])
            .unwrap();
        let ct = CotangentChart::new(&base).unwrap();
        assert_eq!(ct.total().dim(), 4);
        assert_eq!(ct.total().coord_name(0), "theta");
        assert_eq!(ct.total().coord_kind(0), CoordKind::Angle);
        assert_eq!(ct.total().coord_name(2), "p_theta");
        assert_eq!(ct.total().coord_kind(2), CoordKind::Affine);
        assert_eq!(ct.total().coord_name(3), "p_z");
        assert_eq!(ct.x_slot(1), 1);
        assert_eq!(ct.p_slot(1), 3);
    }

    #[test]
    fn coordinate_lift_examples() {
        // Complete lift of x∂x on the line: x∂x − p∂p.
        let line = Chart::affine(&["x"]);
        let ct = CotangentChart::new(&line).unwrap();
        let xc = ct.lift_complete(&scalars(&line, &["x"])).unwrap();
        assert_vec_eq(&xc, &scalars(ct.total(), &["x", "-p_x"]));

        // Vertical lift of dy on the plane: ∂_{p_y}.
        let plane = Chart::affine(&["x", "y"]);
        let ct2 = CotangentChart::new(&plane).unwrap();
        let av = ct2
            .lift_vertical_1form(&scalars(&plane, &["0", "1"]))
            .unwrap();
        assert_vec_eq(&av, &scalars(ct2.total(), &["0", "0", "0", "1"]));

        // Horizontal lift of the bivector ∂x∧∂y over the flat plane:
        // p₁∂y − p₂∂x.
        let flat = Connection::flat(&plane);
        let pi = vec![
            scalars(&plane, &["0", "1"]),
            scalars(&plane, &["-1", "0"]),
        ];
        let pih = ct2.lift_horizontal_bivec(&flat, &pi).unwrap();
        assert_vec_eq(&pih, &scalars(ct2.total(), &["-p_y", "p_x", "0", "0"]));

        // Vertical lift of a vector field is the fiber-linear pairing.
        let xv = ct2.lift_vertical_vec(&scalars(&plane, &["y", "x^2"])).unwrap();
        assert_eq!(xv, parse_scalar(ct2.total(), "y*p_x + x^2*p_y").unwrap());
    }

    #[test]
    fn scalar_action_of_lifts() {
        let plane = Chart::affine(&["x", "y"]);
        let con = plane_connection(&plane, ["y", "x", "x*y", "y", "0", "x^2"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let x = scalars(&plane, &["x^2", "y"]);
        let y = scalars(&plane, &["x + y", "x*y"]);
        let alpha = scalars(&plane, &["y^2", "x"]);
        let f = parse_scalar(&plane, "x^2*y + y^3").unwrap();

        let xh = ct.lift_horizontal_vec(&con, &x).unwrap();
        let av = ct.lift_vertical_1form(&alpha).unwrap();
        let yv = ct.lift_vertical_vec(&y).unwrap();

        // Horizontal lifts act on pulled-back scalars as the base field.
        let xf = apply_vector(&x, &f);
        assert_eq!(
            apply_vector(&xh, &ct.pull_scalar(&f).unwrap()),
            ct.pull_scalar(&xf).unwrap()
        );
        // Vertical lifts annihilate pulled-back scalars.
        assert!(apply_vector(&av, &ct.pull_scalar(&f).unwrap()).is_zero());
        // Xʰ acts on Yᵛ as the covariant derivative.
        assert_eq!(
            apply_vector(&xh, &yv),
            ct.lift_vertical_vec(&con.cov_vector_along(&x, &y)).unwrap()
        );
        // αᵛ acts on Yᵛ as the pairing α(Y).
        let pairing = alpha[0].mul(&y[0]).add(&alpha[1].mul(&y[1]));
        assert_eq!(apply_vector(&av, &yv), ct.pull_scalar(&pairing).unwrap());
    }

    #[test]
    fn lie_brackets_of_lifts() {
        let plane = Chart::affine(&["x", "y"]);
        // A connection with torsion: the bracket relations hold regardless.
        let mut gamma = vec![ScalarField::zero(&plane); 8];
        gamma[cube_index(2, 0, 0, 1)] = parse_scalar(&plane, "x").unwrap();
        gamma[cube_index(2, 1, 1, 0)] = parse_scalar(&plane, "y^2").unwrap();
        gamma[cube_index(2, 1, 0, 0)] = parse_scalar(&plane, "x*y").unwrap();
        let con = Connection::new(&plane, gamma);
        assert!(!con.is_torsion_free());

        let ct = CotangentChart::new(&plane).unwrap();
        let x = scalars(&plane, &["y", "x^2"]);
        let y = scalars(&plane, &["x*y", "x"]);
        let alpha = scalars(&plane, &["x", "y^2"]);
        let beta = scalars(&plane, &["y", "0"]);

        let xh = ct.lift_horizontal_vec(&con, &x).unwrap();
        let yh = ct.lift_horizontal_vec(&con, &y).unwrap();
        let av = ct.lift_vertical_1form(&alpha).unwrap();
        let bv = ct.lift_vertical_1form(&beta).unwrap();

        // [Xʰ, Yʰ] = [X,Y]ʰ + R(X,Y)^υ.
        let lhs = lie_bracket(&xh, &yh);
        let endo = con.riemann().endomorphism(&x, &y);
        let mut rhs = ct
            .lift_horizontal_vec(&con, &lie_bracket(&x, &y))
            .unwrap();
        let corr = ct.lift_endo(&endo).unwrap();
        for a in 0..4 {
            rhs[a] = rhs[a].add(&corr[a]);
        }
        assert_vec_eq(&lhs, &rhs);

        // [Xʰ, αᵛ] = (∇_Xα)ᵛ.
        let lhs2 = lie_bracket(&xh, &av);
        let n = 2;
        let cov_alpha: Vec<ScalarField> = (0..n)
            .map(|j| {
                let mut acc = ScalarField::zero(&plane);
                for i in 0..n {
                    let mut term = alpha[j].partial(i);
                    for m in 0..n {
                        term = term.sub(&con.gamma(m, i, j).mul(&alpha[m]));
                    }
                    acc = acc.add(&x[i].mul(&term));
                }
                acc
            })
            .collect();
        let rhs2 = ct.lift_vertical_1form(&cov_alpha).unwrap();
        assert_vec_eq(&lhs2, &rhs2);

        // [αᵛ, βᵛ] = 0.
        assert!(lie_bracket(&av, &bv).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn patterson_walker_examples() {
        // Flat line: dp⊙dx.
        let line = Chart::affine(&["x"]);
        let ct = CotangentChart::new(&line).unwrap();
        let g = ct.patterson_walker(&Connection::flat(&line)).unwrap();
        assert_eq!(g.component(&[0, 1]), ScalarField::one(ct.total()));
        assert_eq!(g.component(&[0, 0]), ScalarField::zero(ct.total()));
        assert_eq!(g.component(&[1, 1]), ScalarField::zero(ct.total()));

        // The xy-plane connection produces the p-weighted base block.
        let plane = Chart::affine(&["x", "y"]);
        let con = plane_connection(&plane, ["0", "0", "x*y", "y", "0", "0"]);
        let ct2 = CotangentChart::new(&plane).unwrap();
        let g2 = ct2.patterson_walker(&con).unwrap();
        assert_eq!(
            g2.component(&[0, 1]),
            parse_scalar(ct2.total(), "-(x*y*p_x + y*p_y)").unwrap()
        );
        assert_eq!(g2.component(&[0, 0]), ScalarField::zero(ct2.total()));
        assert_eq!(g2.component(&[0, 2]), ScalarField::one(ct2.total()));
        assert_eq!(g2.component(&[1, 3]), ScalarField::one(ct2.total()));
        assert_eq!(g2.component(&[2, 3]), ScalarField::zero(ct2.total()));

        // Torsion does not change the metric.
        let mut gamma = vec![ScalarField::zero(&plane); 8];
        gamma[cube_index(2, 0, 0, 1)] = parse_scalar(&plane, "x*y").unwrap();
        gamma[cube_index(2, 1, 0, 1)] = parse_scalar(&plane, "y + x").unwrap();
        gamma[cube_index(2, 1, 1, 0)] = parse_scalar(&plane, "y - x").unwrap();
        let torsional = Connection::new(&plane, gamma);
        assert!(!torsional.is_torsion_free());
        assert_eq!(
            ct2.patterson_walker(&torsional).unwrap(),
            ct2.patterson_walker(&torsional.torsion_free_part()).unwrap()
        );
    }

    #[test]
    fn metric_pairs_complete_lifts_as_symmetric_bracket() {
        let plane = Chart::affine(&["x", "y"]);
        let con = plane_connection(&plane, ["y", "x^2", "x*y", "y", "1", "x"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let g = ct.patterson_walker(&con).unwrap();
        for (x, y) in [
            (["x^2", "y"], ["x + y", "x*y"]),
            (["y", "1"], ["0", "x^2 + y"]),
        ] {
            let xf = scalars(&plane, &x);
            let yf = scalars(&plane, &y);
            let xc = ct.lift_complete(&xf).unwrap();
            let yc = ct.lift_complete(&yf).unwrap();
            let lhs = g.apply_vectors(&[&xc, &yc]);
            let rhs = ct
                .lift_vertical_vec(&con.sym_bracket(&xf, &yf))
                .unwrap()
                .neg();
            assert_eq!(lhs, rhs);
        }

        // The vertical subbundle is isotropic.
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(
                    g.component(&[ct.p_slot(i), ct.p_slot(j)]),
                    ScalarField::zero(ct.total())
                );
            }
        }
    }

    #[test]
    fn metric_pairs_with_endo_and_bivector_lifts() {
        let plane = Chart::affine(&["x", "y"]);
        let con = plane_connection(&plane, ["0", "x", "x*y", "y", "y^2", "0"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let g = ct.patterson_walker(&con).unwrap();

        let a = vec![
            scalars(&plane, &["x", "y^2"]),
            scalars(&plane, &["1", "x*y"]),
        ];
        let alpha = scalars(&plane, &["y", "x^2"]);
        let x = scalars(&plane, &["x*y", "x + y"]);

        let au = ct.lift_endo(&a).unwrap();
        let av = ct.lift_vertical_1form(&alpha).unwrap();
        let xh = ct.lift_horizontal_vec(&con, &x).unwrap();

        // g(A^υ, αᵛ) = 0.
        assert!(g.apply_vectors(&[&au, &av]).is_zero());

        // g(A^υ, Xʰ) = (AX)ᵛ.
        let ax: Vec<ScalarField> = (0..2)
            .map(|i| a[i][0].mul(&x[0]).add(&a[i][1].mul(&x[1])))
            .collect();
        assert_eq!(
            g.apply_vectors(&[&au, &xh]),
            ct.lift_vertical_vec(&ax).unwrap()
        );

        // g(πʰ, αᵛ) = (π(α))ᵛ with the insertion π(α)ʲ = πʲⁱαᵢ.
        let pi12 = parse_scalar(&plane, "x^2 + 1").unwrap();
        let pi = vec![
            vec![ScalarField::zero(&plane), pi12.clone()],
            vec![pi12.neg(), ScalarField::zero(&plane)],
        ];
        let pih = ct.lift_horizontal_bivec(&con, &pi).unwrap();
        let pi_alpha: Vec<ScalarField> = (0..2)
            .map(|j| pi[j][0].mul(&alpha[0]).add(&pi[j][1].mul(&alpha[1])))
            .collect();
        assert_eq!(
            g.apply_vectors(&[&pih, &av]),
            ct.lift_vertical_vec(&pi_alpha).unwrap()
        );
    }

    #[test]
    fn canonical_forms_checks() {
        let plane = Chart::affine(&["x", "y"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let (alpha, omega) = ct.canonical_forms();

        // α_can = pᵢdxⁱ.
        assert_eq!(alpha.component(&[0]), parse_scalar(ct.total(), "p_x").unwrap());
        assert_eq!(alpha.component(&[1]), parse_scalar(ct.total(), "p_y").unwrap());
        assert_eq!(alpha.component(&[2]), ScalarField::zero(ct.total()));

        // dα_can = ω_can with the canonical form built independently.
        let coeffs: Vec<ScalarField> = (0..4).map(|a| alpha.component(&[a])).collect();
        assert_eq!(exterior_derivative(ct.total(), &coeffs), omega);

        // ω_can(Xᶜ, Yᶜ) = −[X,Y]ᵛ.
        let x = scalars(&plane, &["x^2*y", "y"]);
        let y = scalars(&plane, &["x + y", "x"]);
        let xc = ct.lift_complete(&x).unwrap();
        let yc = ct.lift_complete(&y).unwrap();
        assert_eq!(
            omega.apply(&xc, &yc),
            ct.lift_vertical_vec(&lie_bracket(&x, &y)).unwrap().neg()
        );

        // α_can(Xʰ) = Xᵛ for any connection.
        let con = plane_connection(&plane, ["y", "0", "x*y", "y", "0", "x"]);
        let xh = ct.lift_horizontal_vec(&con, &x).unwrap();
        assert_eq!(
            alpha.apply_vectors(&[&xh]),
            ct.lift_vertical_vec(&x).unwrap()
        );
    }

    #[test]
    fn hat_connection_flat_base_is_flat() {
        let plane = Chart::affine(&["x", "y"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let hat = ct.lifted_connection_hat(&Connection::flat(&plane)).unwrap();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert!(hat.gamma(k, i, j).is_zero());
                }
            }
        }
        let bar = ct.lifted_connection_bar(&Connection::flat(&plane)).unwrap();
        assert_eq!(hat, bar);
    }

    #[test]
    fn hat_connection_reproduces_base_rules() {
        let plane = Chart::affine(&["x", "y"]);
        let con = plane_connection(&plane, ["y", "x", "x*y", "y", "0", "x^2"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let hat = ct.lifted_connection_hat(&con).unwrap();

        let x = scalars(&plane, &["x^2", "y"]);
        let y = scalars(&plane, &["x + y", "x*y"]);
        let alpha = scalars(&plane, &["y^2", "x"]);

        let xh = ct.lift_horizontal_vec(&con, &x).unwrap();
        let yh = ct.lift_horizontal_vec(&con, &y).unwrap();
        let av = ct.lift_vertical_1form(&alpha).unwrap();

        // ∇̂_{Xʰ}Yʰ = (∇_XY)ʰ.
        assert_vec_eq(
            &hat.cov_vector_along(&xh, &yh),
            &ct.lift_horizontal_vec(&con, &con.cov_vector_along(&x, &y))
                .unwrap(),
        );
        // ∇̂_{Xʰ}αᵛ = (∇_Xα)ᵛ.
        let n = 2;
        let cov_alpha: Vec<ScalarField> = (0..n)
            .map(|j| {
                let mut acc = ScalarField::zero(&plane);
                for i in 0..n {
                    let mut term = alpha[j].partial(i);
                    for m in 0..n {
                        term = term.sub(&con.gamma(m, i, j).mul(&alpha[m]));
                    }
                    acc = acc.add(&x[i].mul(&term));
                }
                acc
            })
            .collect();
        assert_vec_eq(
            &hat.cov_vector_along(&xh, &av),
            &ct.lift_vertical_1form(&cov_alpha).unwrap(),
        );
        // ∇̂ along vertical directions annihilates lifted fields: their
        // frame coefficients are base functions, so both terms of the
        // Leibniz expansion vanish.
        assert!(hat.cov_vector_along(&av, &yh).iter().all(|c| c.is_zero()));
        let bv = ct
            .lift_vertical_1form(&scalars(&plane, &["x", "y*x"]))
            .unwrap();
        assert!(hat.cov_vector_along(&av, &bv).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn hat_torsion_is_base_torsion_minus_curvature() {
        let plane = Chart::affine(&["x", "y"]);
        // Torsion-free base with curvature: T_∇̂(Xʰ,Yʰ) = −R(X,Y)^υ.
        let con = plane_connection(&plane, ["0", "0", "x*y", "y", "0", "0"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let hat = ct.lifted_connection_hat(&con).unwrap();

        let x = scalars(&plane, &["1", "x"]);
        let y = scalars(&plane, &["y", "0"]);
        let xh = ct.lift_horizontal_vec(&con, &x).unwrap();
        let yh = ct.lift_horizontal_vec(&con, &y).unwrap();

        let mut t_hat = hat.cov_vector_along(&xh, &yh);
        let back = hat.cov_vector_along(&yh, &xh);
        let br = lie_bracket(&xh, &yh);
        for a in 0..4 {
            t_hat[a] = t_hat[a].sub(&back[a]).sub(&br[a]);
        }
        let endo = con.riemann().endomorphism(&x, &y);
        let corr = ct.lift_endo(&endo).unwrap();
        for a in 0..4 {
            assert_eq!(t_hat[a], corr[a].neg());
        }
    }

    #[test]
    fn hat_and_bar_symmetric_derivative_of_canonical_form_is_metric() {
        let line = Chart::affine(&["x"]);
        let plane = Chart::affine(&["x", "y"]);
        let cons = [
            (line.clone(), Connection::flat(&line)),
            (line.clone(), {
                let mut gamma = vec![ScalarField::zero(&line)];
                gamma[0] = parse_scalar(&line, "x^2").unwrap();
                Connection::new(&line, gamma)
            }),
            (
                plane.clone(),
                plane_connection(&plane, ["0", "0", "x*y", "y", "0", "0"]),
            ),
            (
                plane.clone(),
                plane_connection(&plane, ["y", "x", "x*y", "y", "1", "x^2"]),
            ),
        ];
        for (base, con) in &cons {
            let ct = CotangentChart::new(base).unwrap();
            let g = ct.patterson_walker(con).unwrap();
            let (alpha, _) = ct.canonical_forms();
            let hat = ct.lifted_connection_hat(con).unwrap();
            let bar = ct.lifted_connection_bar(con).unwrap();
            assert_eq!(hat.sym_derivative(&alpha), g);
            assert_eq!(bar.sym_derivative(&alpha), g);
        }
    }

    #[test]
    fn bar_connection_is_levi_civita_of_the_metric() {
        let plane = Chart::affine(&["x", "y"]);
        let con = plane_connection(&plane, ["0", "0", "x*y", "y", "0", "0"]);
        let ct = CotangentChart::new(&plane).unwrap();
        let g = ct.patterson_walker(&con).unwrap();
        let bar = ct.lifted_connection_bar(&con).unwrap();

        assert!(bar.is_torsion_free());
        assert_eq!(bar.levi_civita_check(&g), Ok(true));
        assert_eq!(bar, levi_civita(&g).unwrap());

        // Torsional base connections are rejected.
        let mut gamma = vec![ScalarField::zero(&plane); 8];
        gamma[cube_index(2, 0, 0, 1)] = parse_scalar(&plane, "x").unwrap();
        let torsional = Connection::new(&plane, gamma);
        assert_eq!(
            ct.lifted_connection_bar(&torsional).err(),
            Some(RingError::TorsionPresent)
        );
    }

    #[test]
    fn bar_connection_line_closed_form() {
        // Γ¹₁₁ = f on the line gives ∇̄_∂x∂x = f∂x + p(2f² − f′)∂p,
        // ∇̄_∂x∂p = −f∂p, ∇̄_∂p∂p = 0 on the total chart.
        let line = Chart::affine(&["x"]);
        let f = "x^2";
        let mut gamma = vec![ScalarField::zero(&line)];
        gamma[0] = parse_scalar(&line, f).unwrap();
        let con = Connection::new(&line, gamma);
        let ct = CotangentChart::new(&line).unwrap();
        let bar = ct.lifted_connection_bar(&con).unwrap();

        let t = ct.total();
        assert_eq!(bar.gamma(0, 0, 0), &parse_scalar(t, "x^2").unwrap());
        assert_eq!(
            bar.gamma(1, 0, 0),
            &parse_scalar(t, "p_x*(2*x^4 - 2*x)").unwrap()
        );
        assert_eq!(bar.gamma(1, 0, 1), &parse_scalar(t, "-x^2").unwrap());
        assert_eq!(bar.gamma(1, 1, 0), &parse_scalar(t, "-x^2").unwrap());
        assert_eq!(bar.gamma(0, 0, 1), &ScalarField::zero(t));
        assert_eq!(bar.gamma(0, 1, 1), &ScalarField::zero(t));
        assert_eq!(bar.gamma(1, 1, 1), &ScalarField::zero(t));
    }

    #[test]
    fn levi_civita_examples() {
        // Euclidean metric: flat connection.
        let plane = Chart::affine(&["x", "y"]);
        let mut g = SymField::zero(&plane, 2);
        let one = ScalarField::one(&plane);
        g = g.add(&SymField::from_matrix(
            &plane,
            &[
                vec![one.clone(), ScalarField::zero(&plane)],
                vec![ScalarField::zero(&plane), one.clone()],
            ],
        ));
        assert_eq!(levi_civita(&g).unwrap(), Connection::flat(&plane));

        // g = (1+x²)dx⊙dx on the line: Γ¹₁₁ = x/(1+x²).
        let line = Chart::affine(&["x"]);
        let gl = SymField::from_matrix(
            &line,
            &[vec![parse_scalar(&line, "1 + x^2").unwrap()]],
        );
        let lc = levi_civita(&gl).unwrap();
        assert_eq!(lc.gamma(0, 0, 0), &parse_scalar(&line, "x/(1 + x^2)").unwrap());
        assert_eq!(lc.levi_civita_check(&gl), Ok(true));

        // Degenerate metrics are rejected.
        let degenerate = SymField::from_matrix(
            &plane,
            &[
                vec![one.clone(), ScalarField::zero(&plane)],
                vec![ScalarField::zero(&plane), ScalarField::zero(&plane)],
            ],
        );
        assert_eq!(levi_civita(&degenerate).err(), Some(RingError::DegenerateMetric));
    }

    #[test]
    fn gradient_killing_gate_examples() {
        let plane = Chart::affine(&["x", "y"]);
        let flat = Connection::flat(&plane);
        let dx = scalars(&plane, &["1", "0"]);
        let euler = scalars(&plane, &["x", "0"]);
        assert_eq!(gradient_killing_complete_lift(&flat, &dx), Ok(true));
        assert_eq!(gradient_killing_complete_lift(&flat, &euler), Ok(false));

        let con = plane_connection(&plane, ["0", "0", "1", "2", "0", "0"]);
        assert_eq!(gradient_killing_complete_lift(&con, &dx), Ok(false));

        let mut gamma = vec![ScalarField::zero(&plane); 8];
        gamma[cube_index(2, 0, 0, 1)] = parse_scalar(&plane, "x").unwrap();
        let torsional = Connection::new(&plane, gamma);
        assert_eq!(
            gradient_killing_complete_lift(&torsional, &dx).err(),
            Some(RingError::TorsionPresent)
        );
    }

    #[test]
    fn gradient_killing_gate_matches_commutator_vanishing() {
        // On the flat plane ∂x is gradient Killing and both extra
        // commutators vanish; the Euler field is not and they do not.
        let plane = Chart::affine(&["x", "y"]);
        let flat = Connection::flat(&plane);
        let dx = scalars(&plane, &["1", "0"]);
        let dy = scalars(&plane, &["0", "1"]);
        let euler = scalars(&plane, &["x", "y"]);

        let probes = [
            SymField::one_form(
                &plane,
                &scalars(&plane, &["x*y", "x + y^2"]),
            ),
            SymField::function(parse_scalar(&plane, "x^2*y").unwrap()),
        ];
        for phi in &probes {
            // [∇ˢ, Lˢ_X]φ for a parallel flat field vanishes…
            let lhs = flat
                .sym_derivative(&flat.sym_lie(&dx, phi))
                .sub(&flat.sym_lie(&dx, &flat.sym_derivative(phi)));
            assert!(lhs.is_zero());
            // …and [Lˢ_X, Lˢ_Y]φ vanishes for two such fields.
            let comm = flat
                .sym_lie(&dx, &flat.sym_lie(&dy, phi))
                .sub(&flat.sym_lie(&dy, &flat.sym_lie(&dx, phi)));
            assert!(comm.is_zero());
        }
        // The Euler field fails the gate and the commutator is nonzero on
        // some probe.
        assert_eq!(gradient_killing_complete_lift(&flat, &euler), Ok(false));
        let phi = &probes[0];
        let lhs = flat
            .sym_derivative(&flat.sym_lie(&euler, phi))
            .sub(&flat.sym_lie(&euler, &flat.sym_derivative(phi)));
        assert!(!lhs.is_zero());
    }

    #[test]
    fn closedness_checker() {
        let plane = Chart::affine(&["x", "y"]);
        assert!(is_closed_1form(&plane, &scalars(&plane, &["y", "x"])));
        assert!(!is_closed_1form(&plane, &scalars(&plane, &["y", "-x"])));
    }

    #[test]
    fn bundled_metric_identity_suite() {
        // All checks pass on flat charts, a curved plane connection and a
        // trigonometric circle connection, for more than one seed.
        let plane = Chart::affine(&["x", "y"]);
        let cases = vec![
            Connection::flat(&Chart::affine(&["x"])),
            Connection::flat(&plane),
            plane_connection(&plane, ["y", "x^2", "x*y", "y", "1", "x"]),
            {
                let s1 = Chart::angles(&["t"]);
                Connection::new(&s1, scalars(&s1, &["sin(t)"]))
            },
        ];
        for con in &cases {
            for seed in [0, 9] {
                let report = pw_report(con, seed).unwrap();
                assert!(
                    report.all_pass(),
                    "failed checks: {:?}",
                    report
                        .checks()
                        .iter()
                        .filter(|(_, ok)| !ok)
                        .collect::<Vec<_>>()
                );
                assert_eq!(report.checks().len(), 5 + 2 * 5);
            }
        }

        // Torsion is rejected up front.
        let mut gamma = vec![ScalarField::zero(&plane); 8];
        gamma[cube_index(2, 0, 0, 1)] = parse_scalar(&plane, "1").unwrap();
        let torsional = Connection::new(&plane, gamma);
        assert_eq!(pw_report(&torsional, 0).unwrap_err(), RingError::TorsionPresent);
    }
}
