//! Symmetric covariant tensor fields and their vector-valued variants.
//!
//! A degree-`r` symmetric field φ is stored as its fiber polynomial
//! φ̃(x, v) = (1/r!) φ_x(v, …, v), a homogeneous degree-`r` polynomial in the
//! velocity variables v¹..vⁿ with [`ScalarField`] coefficients. Under this
//! convention the symmetric product becomes plain polynomial multiplication
//! and contraction becomes differentiation in v:
//!
//! * (φ ⊙ ψ)~ = φ̃ · ψ̃
//! * (ι_X φ)~ = Xⁱ ∂φ̃/∂vⁱ
//! * (ιˢ_σ φ)~ = Σ_m σ̃ᵐ ∂φ̃/∂vᵐ
//!
//! Component values follow the tensor convention: the component on
//! (∂_{i₁},…,∂_{i_r}) equals α!·c_α, where α is the exponent vector of the
//! index multiset and c_α the fiber coefficient of v^α.

use crate::ring::{Chart, GenKind, Mono, NumericPoint, Poly, Q, RingError, ScalarField};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// α! = Π_i (α_i)! as an exact rational.
fn multi_factorial(m: &Mono) -> Q {
    let mut acc = BigInt::one();
    for &e in m.0.iter() {
        for k in 2..=e as u64 {
            acc *= k;
        }
    }
    Q::from_integer(acc)
}

/// A symmetric covariant tensor field, stored as its fiber polynomial.
/// The exponent keys have length `chart.dim()` and total degree `degree`;
/// zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SymField {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Mono, ScalarField>,
}

impl SymField {
    pub fn zero(chart: &Chart, degree: usize) -> SymField {
        SymField {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A function, i.e. a degree-0 field.
    pub fn function(f: ScalarField) -> SymField {
        let chart = f.chart().clone();
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(Mono::unit(chart.dim()), f);
        }
        SymField {
            chart,
            degree: 0,
            terms,
        }
    }

    /// The coordinate differential dxⁱ (fiber polynomial vⁱ).
    pub fn coordinate_differential(chart: &Chart, i: usize) -> SymField {
        assert!(i < chart.dim(), "coordinate index out of range");
        let mut exps = vec![0u16; chart.dim()];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(
            Mono(exps.into_boxed_slice()),
            ScalarField::one(chart),
        );
        SymField {
            chart: chart.clone(),
            degree: 1,
            terms,
        }
    }

    /// The 1-form Σᵢ coeffs[i] dxⁱ.
    pub fn one_form(chart: &Chart, coeffs: &[ScalarField]) -> SymField {
        assert_eq!(coeffs.len(), chart.dim());
        let mut out = SymField::zero(chart, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut exps = vec![0u16; chart.dim()];
            exps[i] = 1;
            out.insert_term(Mono(exps.into_boxed_slice()), c.clone());
        }
        out
    }

    /// The degree-2 field with component matrix `g` (symmetrized): fiber
    /// polynomial ½ g_{ij} vⁱvʲ.
    pub fn from_matrix(chart: &Chart, g: &[Vec<ScalarField>]) -> SymField {
        let n = chart.dim();
        assert_eq!(g.len(), n);
        assert!(g.iter().all(|row| row.len() == n));
        let half = Q::new(1.into(), 2.into());
        let mut out = SymField::zero(chart, 2);
        for i in 0..n {
            for j in 0..n {
                if g[i][j].is_zero() {
                    continue;
                }
                let mut exps = vec![0u16; n];
                exps[i] += 1;
                exps[j] += 1;
                out.insert_term(Mono(exps.into_boxed_slice()), g[i][j].scale(&half));
            }
        }
        out
    }

    /// Build from components in the tensor convention. Keys are
    /// weakly-increasing 0-based index tuples of length `degree`.
    pub fn from_components(
        chart: &Chart,
        degree: usize,
        components: &BTreeMap<Vec<usize>, ScalarField>,
    ) -> Result<SymField, RingError> {
        let n = chart.dim();
        let mut out = SymField::zero(chart, degree);
        for (idx, value) in components {
            if idx.len() != degree {
                return Err(RingError::IndexOutOfRange);
            }
            let mut exps = vec![0u16; n];
            let mut prev = 0usize;
            for &i in idx {
                if i >= n || i < prev {
                    return Err(RingError::IndexOutOfRange);
                }
                prev = i;
                exps[i] += 1;
            }
            let mono = Mono(exps.into_boxed_slice());
            let fact = multi_factorial(&mono);
            out.insert_term(mono, value.scale(&(Q::one() / fact)));
        }
        Ok(out)
    }

    /// Symmetric projection of a full covariant tensor, given as a component
    /// map from arbitrary-order 0-based index tuples (missing tuples are
    /// zero). The fiber polynomial of the projection is the diagonal
    /// evaluation (1/r!) Σ t_{i₁…i_r} v^{i₁}…v^{i_r}, which makes the
    /// projection idempotent by construction.
    pub fn sym_projection(
        chart: &Chart,
        degree: usize,
        tensor: &BTreeMap<Vec<usize>, ScalarField>,
    ) -> Result<SymField, RingError> {
        let n = chart.dim();
        let r_fact = multi_factorial(&Mono(vec![degree as u16].into_boxed_slice()));
        let mut out = SymField::zero(chart, degree);
        for (idx, value) in tensor {
            if idx.len() != degree {
                return Err(RingError::IndexOutOfRange);
            }
            let mut exps = vec![0u16; n];
            for &i in idx {
                if i >= n {
                    return Err(RingError::IndexOutOfRange);
                }
                exps[i] += 1;
            }
            out.insert_term(
                Mono(exps.into_boxed_slice()),
                value.scale(&(Q::one() / r_fact.clone())),
            );
        }
        Ok(out)
    }

    /// Build directly from fiber terms (exponent vector, coefficient).
    pub fn from_fiber_terms(
        chart: &Chart,
        degree: usize,
        terms: impl IntoIterator<Item = (Mono, ScalarField)>,
    ) -> SymField {
        let mut out = SymField::zero(chart, degree);
        for (m, c) in terms {
            out.insert_term(m, c);
        }
        out
    }

    fn insert_term(&mut self, m: Mono, c: ScalarField) {
        debug_assert_eq!(m.0.len(), self.chart.dim());
        debug_assert_eq!(m.total_degree() as usize, self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Fiber coefficients c_α, ascending in α.
    pub fn fiber_terms(&self) -> impl Iterator<Item = (&Mono, &ScalarField)> {
        self.terms.iter()
    }

    pub fn fiber_coefficient(&self, m: &Mono) -> ScalarField {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(&self.chart))
    }

    /// The degree-0 value (panics on positive degree).
    pub fn scalar(&self) -> ScalarField {
        assert_eq!(self.degree, 0, "scalar() on a field of positive degree");
        self.fiber_coefficient(&Mono::unit(self.chart.dim()))
    }

    /// Component on (∂_{i₁},…,∂_{i_r}); the tuple may be in any order.
    pub fn component(&self, idx: &[usize]) -> ScalarField {
        assert_eq!(idx.len(), self.degree, "component arity mismatch");
        let mut exps = vec![0u16; self.chart.dim()];
        for &i in idx {
            assert!(i < self.chart.dim(), "component index out of range");
            exps[i] += 1;
        }
        let mono = Mono(exps.into_boxed_slice());
        let fact = multi_factorial(&mono);
        self.fiber_coefficient(&mono).scale(&fact)
    }

    /// All components in the tensor convention, keyed by weakly-increasing
    /// 0-based index tuples; zero components omitted.
    pub fn components(&self) -> BTreeMap<Vec<usize>, ScalarField> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut idx = Vec::with_capacity(self.degree);
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    idx.push(i);
                }
            }
            out.insert(idx, c.scale(&multi_factorial(m)));
        }
        out
    }

    fn check_align(&self, other: &SymField) {
        assert!(self.chart == other.chart, "chart mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
    }

    pub fn add(&self, other: &SymField) -> SymField {
        self.check_align(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymField) -> SymField {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymField {
        SymField {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, q: &Q) -> SymField {
        if q.is_zero() {
            return SymField::zero(&self.chart, self.degree);
        }
        SymField {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.scale(q)))
                .collect(),
        }
    }

    /// Pointwise multiplication by a function (degree is unchanged).
    pub fn mul_scalar(&self, f: &ScalarField) -> SymField {
        assert!(self.chart == *f.chart(), "chart mismatch");
        let mut out = SymField::zero(&self.chart, self.degree);
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), c.mul(f));
        }
        out
    }

    /// Symmetric product φ⊙ψ: multiplication of fiber polynomials.
    pub fn sym_product(&self, other: &SymField) -> SymField {
        assert!(self.chart == other.chart, "chart mismatch");
        let mut out = SymField::zero(&self.chart, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul_exps(mb), ca.mul(cb));
            }
        }
        out
    }

    /// ∂φ̃/∂vᵐ, a field of degree r−1 (zero for degree 0).
    pub fn partial_v(&self, m: usize) -> SymField {
        assert!(m < self.chart.dim());
        let deg = self.degree.saturating_sub(1);
        let mut out = SymField::zero(&self.chart, deg);
        if self.degree == 0 {
            return out;
        }
        for (mono, c) in &self.terms {
            let e = mono.0[m];
            if e == 0 {
                continue;
            }
            let mut exps = mono.0.to_vec();
            exps[m] -= 1;
            out.insert_term(
                Mono(exps.into_boxed_slice()),
                c.scale(&Q::from_integer((e as i64).into())),
            );
        }
        out
    }

    /// Coefficientwise ∂/∂xⁱ of the fiber polynomial (not a tensor operation
    /// by itself; building block for the connection operators).
    pub fn partial_x(&self, i: usize) -> SymField {
        let mut out = SymField::zero(&self.chart, self.degree);
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), c.partial(i));
        }
        out
    }

    /// Contraction ι_Xφ with a vector field given by its components.
    pub fn contract(&self, x: &[ScalarField]) -> Result<SymField, RingError> {
        if self.degree == 0 {
            return Err(RingError::IndexOutOfRange);
        }
        assert_eq!(x.len(), self.chart.dim());
        let mut out = SymField::zero(&self.chart, self.degree - 1);
        for (m, xm) in x.iter().enumerate() {
            if xm.is_zero() {
                continue;
            }
            out = out.add(&self.partial_v(m).mul_scalar(xm));
        }
        Ok(out)
    }

    /// Full evaluation φ(X₁,…,X_r) by iterated contraction.
    pub fn apply_vectors(&self, vectors: &[&[ScalarField]]) -> ScalarField {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        let mut cur = self.clone();
        for x in vectors {
            cur = cur.contract(x).expect("degree bookkeeping");
        }
        cur.scalar()
    }

    /// Numeric fiber value φ̃(x, v).
    pub fn eval_fiber(&self, p: &NumericPoint, v: &[f64]) -> Result<f64, RingError> {
        assert_eq!(v.len(), self.chart.dim());
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut mv = 1.0;
            for (i, &e) in m.0.iter().enumerate() {
                mv *= v[i].powi(e as i32);
            }
            acc += c.eval(p)? * mv;
        }
        Ok(acc)
    }

    /// Numeric full evaluation φ(X₁,…,X_r) at a point.
    pub fn eval_on(&self, p: &NumericPoint, vectors: &[&[f64]]) -> Result<f64, RingError> {
        assert_eq!(vectors.len(), self.degree);
        // evaluate coefficients once, then sum over all index tuples
        let n = self.chart.dim();
        let comps: BTreeMap<&Mono, f64> = {
            let mut out = BTreeMap::new();
            for (m, c) in &self.terms {
                out.insert(m, c.eval(p)?);
            }
            out
        };
        let mut acc = 0.0;
        let mut tuple = vec![0usize; self.degree];
        loop {
            let mut exps = vec![0u16; n];
            for &i in &tuple {
                exps[i] += 1;
            }
            let mono = Mono(exps.into_boxed_slice());
            if let Some(&c) = comps.get(&mono) {
                use num_traits::ToPrimitive;
                // component value on this ordered tuple is α!·c_α
                let mut prod = c * multi_factorial(&mono).to_f64().unwrap();
                for (slot, &i) in tuple.iter().enumerate() {
                    prod *= vectors[slot][i];
                }
                acc += prod;
            }
            // advance odometer
            let mut k = self.degree;
            loop {
                if k == 0 {
                    return Ok(acc);
                }
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < n {
                    break;
                }
                tuple[k] = 0;
            }
        }
    }

    /// Transport to a super-chart (pullback along a projection that keeps
    /// coordinate names); velocity slots map by coordinate name as well.
    pub fn extend_to(&self, chart: &Chart) -> Result<SymField, RingError> {
        let src = &self.chart;
        if src == chart {
            return Ok(self.clone());
        }
        let mut slot_map = Vec::with_capacity(src.dim());
        for i in 0..src.dim() {
            let j = chart
                .coord_index(src.coord_name(i))
                .ok_or_else(|| RingError::UnknownIdentifier(src.coord_name(i).to_string()))?;
            slot_map.push(j);
        }
        let mut out = SymField::zero(chart, self.degree);
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; chart.dim()];
            for (i, &e) in m.0.iter().enumerate() {
                exps[slot_map[i]] += e;
            }
            out.insert_term(Mono(exps.into_boxed_slice()), c.extend_to(chart)?);
        }
        Ok(out)
    }
}

impl Mono {
    /// Exponentwise sum, usable when both monos index the same variable set.
    pub fn mul_exps(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Normal-form generator monomials of total degree at most `bound` as
/// scalar fields. On affine charts these are the ordinary coordinate
/// monomials; on angle charts they are cos/sin monomials with sine
/// exponents capped at one, so each listed field is a distinct normal form.
pub fn chart_monomials(chart: &Chart, bound: u16) -> Vec<ScalarField> {
    Mono::all_up_to_degree(chart.n_gens(), bound)
        .into_iter()
        .filter(|m| {
            (0..chart.n_gens())
                .all(|g| !matches!(chart.gen_kind(g), GenKind::Sin(_)) || m.0[g] <= 1)
        })
        .map(|m| ScalarField::from_poly(Poly::from_mono(chart, m, Q::one())))
        .collect()
}

/// A spanning family of degree-`degree` forms with bounded coefficients:
/// every product of a chart monomial of degree at most `coeff_degree` with
/// a ⊙-product of coordinate differentials. Identities that are ℝ-linear
/// in the form hold on the whole bounded-coefficient space once they hold
/// on this family.
pub fn monomial_forms(chart: &Chart, degree: usize, coeff_degree: u16) -> Vec<SymField> {
    let coeffs = chart_monomials(chart, coeff_degree);
    let mut out = Vec::new();
    for alpha in Mono::all_of_degree(chart.dim(), degree as u16) {
        for c in &coeffs {
            let mut terms = BTreeMap::new();
            terms.insert(alpha.clone(), c.clone());
            out.push(SymField {
                chart: chart.clone(),
                degree,
                terms,
            });
        }
    }
    out
}

/// Advances an xorshift64 state and returns a small integer in {−2,…,2}.
fn seeded_coefficient(state: &mut u64) -> i64 {
    if *state == 0 {
        *state = 0x9e37_79b9_7f4a_7c15;
    }
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    ((*state >> 32) % 5) as i64 - 2
}

/// A deterministic pseudo-random combination of the chart monomials of
/// degree at most `coeff_degree`, with integer coefficients in {−2,…,2}.
/// The state advances on every draw, so successive calls produce an
/// independent-looking family and a fixed seed reproduces it exactly.
pub fn seeded_scalar(chart: &Chart, coeff_degree: u16, state: &mut u64) -> ScalarField {
    let mut acc = ScalarField::zero(chart);
    for m in chart_monomials(chart, coeff_degree) {
        let c = seeded_coefficient(state);
        if c != 0 {
            acc = acc.add(&m.scale(&Q::from_integer(c.into())));
        }
    }
    acc
}

/// One seeded scalar per coordinate: a deterministic polynomial vector
/// field for randomized exact identity checks.
pub fn seeded_vector(chart: &Chart, coeff_degree: u16, state: &mut u64) -> Vec<ScalarField> {
    (0..chart.dim())
        .map(|_| seeded_scalar(chart, coeff_degree, state))
        .collect()
}

impl fmt::Display for SymField {
    /// Prints in the ⊙-basis: the fiber coefficients are exactly the
    /// coefficients of dx^{i₁}⊙…⊙dx^{i_r}.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let basis: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .flat_map(|(i, &e)| {
                    std::iter::repeat(format!("d{}", self.chart.coord_name(i))).take(e as usize)
                })
                .collect();
            if basis.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", basis.join("⊙"))?;
            } else {
                write!(f, "{c:#} {}", basis.join("⊙"))?;
            }
        }
        Ok(())
    }
}

/// A vector-valued symmetric field σ ∈ Υᵏ(M, TM): one degree-k fiber
/// polynomial per output component. Degree 0 is a vector field, degree 1 an
/// endomorphism field.
#[derive(Clone, Debug, PartialEq)]
pub struct VecSymField {
    comps: Vec<SymField>,
}

impl VecSymField {
    pub fn zero(chart: &Chart, degree: usize) -> VecSymField {
        VecSymField {
            comps: (0..chart.dim()).map(|_| SymField::zero(chart, degree)).collect(),
        }
    }

    pub fn from_components(comps: Vec<SymField>) -> VecSymField {
        assert!(!comps.is_empty());
        let chart = comps[0].chart().clone();
        let degree = comps[0].degree();
        assert_eq!(comps.len(), chart.dim(), "one component per coordinate");
        assert!(
            comps.iter().all(|c| *c.chart() == chart && c.degree() == degree),
            "components must share chart and degree"
        );
        VecSymField { comps }
    }

    /// A vector field Xⁱ∂ᵢ as a degree-0 vector-valued field.
    pub fn vector_field(chart: &Chart, x: &[ScalarField]) -> VecSymField {
        assert_eq!(x.len(), chart.dim());
        VecSymField {
            comps: x.iter().map(|f| SymField::function(f.clone())).collect(),
        }
    }

    /// The identity endomorphism: component m has fiber polynomial vᵐ.
    pub fn identity(chart: &Chart) -> VecSymField {
        VecSymField {
            comps: (0..chart.dim())
                .map(|m| SymField::coordinate_differential(chart, m))
                .collect(),
        }
    }

    /// An endomorphism field from its matrix a[m][j] = Aᵐⱼ (row = output).
    pub fn endomorphism(chart: &Chart, a: &[Vec<ScalarField>]) -> VecSymField {
        let n = chart.dim();
        assert_eq!(a.len(), n);
        VecSymField {
            comps: a
                .iter()
                .map(|row| SymField::one_form(chart, row))
                .collect(),
        }
    }

    pub fn chart(&self) -> &Chart {
        self.comps[0].chart()
    }

    pub fn degree(&self) -> usize {
        self.comps[0].degree()
    }

    pub fn component(&self, m: usize) -> &SymField {
        &self.comps[m]
    }

    pub fn components(&self) -> &[SymField] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &VecSymField) -> VecSymField {
        VecSymField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &VecSymField) -> VecSymField {
        VecSymField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> VecSymField {
        VecSymField {
            comps: self.comps.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, q: &Q) -> VecSymField {
        VecSymField {
            comps: self.comps.iter().map(|c| c.scale(q)).collect(),
        }
    }

    pub fn mul_scalar(&self, f: &ScalarField) -> VecSymField {
        VecSymField {
            comps: self.comps.iter().map(|c| c.mul_scalar(f)).collect(),
        }
    }

    /// As a plain component vector (degree 0 only).
    pub fn as_vector(&self) -> Vec<ScalarField> {
        assert_eq!(self.degree(), 0, "as_vector() on positive degree");
        self.comps.iter().map(|c| c.scalar()).collect()
    }

    /// σ(X₁,…,X_k) as a component vector.
    pub fn plug_vectors(&self, vectors: &[&[ScalarField]]) -> Vec<ScalarField> {
        self.comps
            .iter()
            .map(|c| c.apply_vectors(vectors))
            .collect()
    }

    /// Symmetric contraction ιˢ_σφ = Σ_m σ̃ᵐ ∂φ̃/∂vᵐ, of degree r+k−1.
    pub fn sym_contract(&self, phi: &SymField) -> Result<SymField, RingError> {
        if phi.degree() == 0 {
            return Err(RingError::IndexOutOfRange);
        }
        assert!(self.chart() == phi.chart(), "chart mismatch");
        let mut out = SymField::zero(self.chart(), phi.degree() + self.degree() - 1);
        for (m, sigma_m) in self.comps.iter().enumerate() {
            if sigma_m.is_zero() {
                continue;
            }
            out = out.add(&sigma_m.sym_product(&phi.partial_v(m)));
        }
        Ok(out)
    }
}
