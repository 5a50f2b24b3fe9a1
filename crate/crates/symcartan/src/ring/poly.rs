//! Multivariate polynomials over exact rationals in the chart generators.
//!
//! Monomials are exponent vectors over the generators, ordered graded-lex by
//! declaration order. Angle charts impose the normal form `sin^2 -> 1 - cos^2`
//! so every stored monomial has sin-exponent at most one.

use super::{Chart, GenKind, Q};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// A monomial: one exponent per chart generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mono(pub Box<[u16]>);

impl Mono {
    pub fn unit(n: usize) -> Mono {
        Mono(vec![0u16; n].into_boxed_slice())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise division; `None` when not divisible.
    fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out.into_boxed_slice()))
    }

    /// All exponent vectors in `nvars` variables of exact total degree `d`,
    /// in ascending order.
    pub fn all_of_degree(nvars: usize, d: u16) -> Vec<Mono> {
        fn rec(prefix: &mut Vec<u16>, rest: usize, left: u16, out: &mut Vec<Mono>) {
            if rest == 1 {
                prefix.push(left);
                out.push(Mono(prefix.clone().into_boxed_slice()));
                prefix.pop();
                return;
            }
            for e in 0..=left {
                prefix.push(e);
                rec(prefix, rest - 1, left - e, out);
                prefix.pop();
            }
        }
        if nvars == 0 {
            return if d == 0 {
                vec![Mono(Vec::new().into_boxed_slice())]
            } else {
                Vec::new()
            };
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(nvars), nvars, d, &mut out);
        out.sort();
        out
    }

    /// All exponent vectors of total degree at most `d`, ascending.
    pub fn all_up_to_degree(nvars: usize, d: u16) -> Vec<Mono> {
        let mut out = Vec::new();
        for k in 0..=d {
            out.extend(Mono::all_of_degree(nvars, k));
        }
        out
    }
}

/// Graded lexicographic: first by total degree, ties by exponent vector with
/// earlier generators weighing more.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the chart generators, in angle normal form, with no
/// explicitly stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    chart: Chart,
    terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero(chart: &Chart) -> Poly {
        Poly {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &Chart) -> Poly {
        Poly::constant(chart, Q::one())
    }

    pub fn constant(chart: &Chart, q: Q) -> Poly {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Mono::unit(chart.n_gens()), q);
        }
        Poly {
            chart: chart.clone(),
            terms,
        }
    }

    /// A single term, normalized.
    pub fn from_mono(chart: &Chart, m: Mono, c: Q) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        let mut p = Poly {
            chart: chart.clone(),
            terms,
        };
        p.normalize_angles();
        p
    }

    /// The generator with index `g` as a polynomial.
    pub fn generator(chart: &Chart, g: usize) -> Poly {
        let mut exps = vec![0u16; chart.n_gens()];
        exps[g] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Mono(exps.into_boxed_slice()), Q::one());
        Poly {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_unit())
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> Q {
        self.terms
            .get(&Mono::unit(self.chart.n_gens()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Leading (largest) monomial and coefficient under graded-lex.
    pub fn leading(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().next_back()
    }

    fn insert_term(terms: &mut BTreeMap<Mono, Q>, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Restore the angle normal form: every sin-exponent reduced below two
    /// via `sin^2 = 1 - cos^2`.
    fn normalize_angles(&mut self) {
        let chart = self.chart.clone();
        let sin_gens: Vec<usize> = (0..chart.n_gens())
            .filter(|&g| matches!(chart.gen_kind(g), GenKind::Sin(_)))
            .collect();
        if sin_gens.is_empty() {
            return;
        }
        loop {
            let offending: Vec<(Mono, Q)> = self
                .terms
                .iter()
                .filter(|(m, _)| sin_gens.iter().any(|&g| m.0[g] >= 2))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            if offending.is_empty() {
                return;
            }
            for (m, c) in offending {
                self.terms.remove(&m);
                // Reduce the first offending sin generator by one power of
                // sin^2; later ones are caught in subsequent passes.
                let g = *sin_gens.iter().find(|&&g| m.0[g] >= 2).unwrap();
                let cos_g = g - 1; // cos is declared immediately before sin
                let mut base = m.clone();
                base.0[g] -= 2;
                // m = base * sin^2 = base * (1 - cos^2)
                Poly::insert_term(&mut self.terms, base.clone(), c.clone());
                let mut with_cos = base;
                with_cos.0[cos_g] += 2;
                Poly::insert_term(&mut self.terms, with_cos, -c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.chart, other.chart);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Poly::insert_term(&mut terms, m.clone(), c.clone());
        }
        Poly {
            chart: self.chart.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = self.mul_raw(other);
        out.normalize_angles();
        out
    }

    /// Product in the plain polynomial ring of representatives, skipping the
    /// angle normal form. The gcd machinery works at this level; quotient
    /// arithmetic mid-sequence would invalidate the pseudo-remainder theory.
    fn mul_raw(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.chart, other.chart);
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Poly::insert_term(&mut terms, ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Poly {
            chart: self.chart.clone(),
            terms,
        }
    }

    pub fn scale(&self, q: &Q) -> Poly {
        if q.is_zero() {
            return Poly::zero(&self.chart);
        }
        Poly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * q.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.chart);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to coordinate `i` (not generator).
    /// Affine coordinates differentiate their generator; an angle coordinate
    /// acts by cos -> -sin, sin -> cos.
    pub fn partial(&self, i: usize) -> Poly {
        let chart = &self.chart;
        let g0 = chart.gen_of_coord(i);
        let mut terms = BTreeMap::new();
        match chart.coord_kind(i) {
            super::CoordKind::Affine => {
                for (m, c) in &self.terms {
                    let e = m.0[g0];
                    if e == 0 {
                        continue;
                    }
                    let mut d = m.clone();
                    d.0[g0] -= 1;
                    Poly::insert_term(&mut terms, d, c.clone() * Q::from_integer(e.into()));
                }
            }
            super::CoordKind::Angle => {
                let (gc, gs) = (g0, g0 + 1);
                for (m, c) in &self.terms {
                    let (a, b) = (m.0[gc], m.0[gs]);
                    // d/dt cos^a sin^b = -a cos^(a-1) sin^(b+1) + b cos^(a+1) sin^(b-1)
                    if a > 0 {
                        let mut d = m.clone();
                        d.0[gc] -= 1;
                        d.0[gs] += 1;
                        Poly::insert_term(&mut terms, d, -c.clone() * Q::from_integer(a.into()));
                    }
                    if b > 0 {
                        let mut d = m.clone();
                        d.0[gc] += 1;
                        d.0[gs] -= 1;
                        Poly::insert_term(&mut terms, d, c.clone() * Q::from_integer(b.into()));
                    }
                }
            }
        }
        let mut out = Poly {
            chart: chart.clone(),
            terms,
        };
        out.normalize_angles();
        out
    }

    /// Evaluate given a value for every generator.
    pub fn eval_gens(&self, gen_values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (g, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= gen_values[g].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact division; panics if `self` is not a multiple of `div`.
    /// Only called where divisibility is guaranteed (gcd plumbing).
    pub(crate) fn div_exact(&self, div: &Poly) -> Poly {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = BTreeMap::new();
        let (dm, dc) = {
            let (m, c) = div.leading().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm
                .div(&dm)
                .unwrap_or_else(|| panic!("non-exact polynomial division"));
            let qc = rc / dc.clone();
            Poly::insert_term(&mut quo, qm.clone(), qc.clone());
            // rem -= (qc * qm) * div
            let mut piece = BTreeMap::new();
            for (m, c) in &div.terms {
                Poly::insert_term(&mut piece, m.mul(&qm), c.clone() * qc.clone());
            }
            let piece = Poly {
                chart: self.chart.clone(),
                terms: piece,
            };
            rem = rem.sub(&piece);
        }
        Poly {
            chart: self.chart.clone(),
            terms: quo,
        }
    }

    /// Greatest common divisor of the stored representatives, normalized to
    /// leading coefficient one. On purely affine charts this is the honest
    /// polynomial gcd; on angle charts it is a gcd of representatives, which
    /// is all fraction reduction needs.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        gcd_inner(self, other).monic()
    }

    /// Scale so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Q::one() / c.clone();
                self.scale(&inv)
            }
        }
    }

    /// Largest generator index with a nonzero exponent anywhere, if any.
    fn main_variable(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for m in self.terms.keys() {
            for (g, &e) in m.0.iter().enumerate().rev() {
                if e > 0 {
                    best = Some(best.map_or(g, |b| b.max(g)));
                    break;
                }
            }
        }
        best
    }

    /// View as univariate in generator `g`: degree -> coefficient polynomial.
    fn univariate_in(&self, g: usize) -> BTreeMap<u16, Poly> {
        let mut out: BTreeMap<u16, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[g];
            let mut rest = m.clone();
            rest.0[g] = 0;
            let entry = out
                .entry(e)
                .or_insert_with(|| Poly::zero(&self.chart));
            Poly::insert_term(&mut entry.terms, rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn from_univariate(chart: &Chart, g: usize, coeffs: &BTreeMap<u16, Poly>) -> Poly {
        let mut terms = BTreeMap::new();
        for (&e, p) in coeffs {
            for (m, c) in &p.terms {
                let mut full = m.clone();
                full.0[g] += e;
                Poly::insert_term(&mut terms, full, c.clone());
            }
        }
        Poly {
            chart: chart.clone(),
            terms,
        }
    }
}

fn rational_to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // Fall back on a division of the parts; only reachable for numbers
        // far outside f64 range, which the numeric layer never produces.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Recursive multivariate gcd by a primitive pseudo-remainder sequence in the
/// highest occurring generator.
fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    let chart = a.chart().clone();
    let var = match a.main_variable().into_iter().chain(b.main_variable()).max() {
        None => return Poly::one(&chart), // both constants
        Some(v) => v,
    };
    if a.is_constant() || b.is_constant() {
        return Poly::one(&chart);
    }
    let ua = a.univariate_in(var);
    let ub = b.univariate_in(var);
    // Content: gcd of the univariate coefficients (polynomials in the
    // remaining generators).
    let content = |u: &BTreeMap<u16, Poly>| -> Poly {
        let mut g = Poly::zero(&chart);
        for p in u.values() {
            g = g.gcd(p);
            if g.is_constant() && !g.is_zero() {
                break;
            }
        }
        g
    };
    let ca = content(&ua);
    let cb = content(&ub);
    let cont_gcd = ca.gcd(&cb);
    let pa = a.div_exact(&ca);
    let pb = b.div_exact(&cb);

    let primitive = |p: &Poly| -> Poly {
        let u = p.univariate_in(var);
        if u.is_empty() {
            return p.clone();
        }
        let c = content(&u);
        p.div_exact(&c)
    };

    let deg = |p: &Poly| -> u16 {
        p.univariate_in(var)
            .keys()
            .next_back()
            .copied()
            .unwrap_or(0)
    };

    let (mut r0, mut r1) = if deg(&pa) >= deg(&pb) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        if r1.is_zero() {
            return cont_gcd.mul_raw(&primitive(&r0));
        }
        let u1 = r1.univariate_in(var);
        let d1 = *u1.keys().next_back().unwrap();
        if d1 == 0 {
            // Nonzero content-free constant in the main variable: coprime.
            return cont_gcd;
        }
        let lead1 = u1[&d1].clone();
        // Pseudo-remainder of r0 by r1 in `var`.
        let mut rem = r0.clone();
        loop {
            if rem.is_zero() {
                break;
            }
            let ur = rem.univariate_in(var);
            let dr = *ur.keys().next_back().unwrap();
            if dr < d1 {
                break;
            }
            let leadr = ur[&dr].clone();
            // rem = lead1*rem - leadr*var^(dr-d1)*r1
            let mut shift: BTreeMap<u16, Poly> = BTreeMap::new();
            for (&e, p) in &u1 {
                shift.insert(e + (dr - d1), p.clone());
            }
            let shifted = Poly::from_univariate(&chart, var, &shift);
            rem = rem.mul_raw(&lead1).sub(&shifted.mul_raw(&leadr));
        }
        let rem = if rem.is_zero() { rem } else { primitive(&rem) };
        r0 = r1;
        r1 = rem;
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_unit() {
                factors.push(format_rational(&abs));
            }
            for (g, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = self.chart.gen_name(g);
                if e == 1 {
                    factors.push(name.to_string());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

pub(crate) fn format_rational(q: &Q) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
