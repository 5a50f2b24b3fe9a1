//! Lie-admissible algebras given by exact rational structure constants and
//! their symmetric cohomology.
//!
//! An algebra (V, ·) is Lie-admissible when the skew part u·v − v·u
//! satisfies the Jacobi identity; equivalently, the full skew-symmetrization
//! of the associator vanishes. Such algebras are exactly the restrictions of
//! left-invariant torsion-free connections on a Lie group to the identity,
//! and the canonical degree-one derivation
//!
//! ```text
//! (dˢζ)(u, v) = −ζ(u·v + v·u)
//! ```
//!
//! of Sym•V* is the left-invariant shadow of the symmetric derivative. Its
//! kernel-modulo-image dimensions are computed here by exact dense linear
//! algebra — the spaces are finite-dimensional, so no ansatz is involved,
//! and the resulting dimensions bound the chart-level cohomology of compact
//! groups from below.

use crate::connection::cube_index;
use crate::killing::sorted_multi_indices;
use crate::linalg::{self, QMatrix};
use crate::ring::{Q, RingError};
use num_traits::{One, Zero};

/// Product of the factorials of the exponents: α! for an exponent vector.
fn exps_factorial(exps: &[u16]) -> Q {
    let mut fact = Q::one();
    for &e in exps {
        for k in 2..=i64::from(e) {
            fact *= Q::from_integer(k.into());
        }
    }
    fact
}

/// Exponent vector of a sorted multi-index.
fn exps_of(idx: &[usize], n: usize) -> Vec<u16> {
    let mut exps = vec![0u16; n];
    for &i in idx {
        exps[i] += 1;
    }
    exps
}

/// All exponent vectors `a ≤ caps` (componentwise) with `Σ a = total`.
fn bounded_exps(caps: &[u16], total: u16) -> Vec<Vec<u16>> {
    fn rec(caps: &[u16], left: u16, pos: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if pos == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=caps[pos].min(left) {
            cur.push(v);
            rec(caps, left - v, pos + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(caps, total, 0, &mut Vec::new(), &mut out);
    out
}

/// An element of SymʳV* over the rationals, stored through its components
/// ζ_α = ζ(u_{α₁}, …, u_{α_r}) on sorted multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymForm {
    dim: usize,
    degree: usize,
    indices: Vec<Vec<usize>>,
    comps: Vec<Q>,
}

impl SymForm {
    /// Builds a form from its component list in the order of
    /// [`SymForm::basis_indices`].
    pub fn new(dim: usize, degree: usize, comps: Vec<Q>) -> Result<SymForm, RingError> {
        if dim == 0 {
            return Err(RingError::DimensionMismatch);
        }
        let indices = sorted_multi_indices(dim, degree);
        if comps.len() != indices.len() {
            return Err(RingError::DimensionMismatch);
        }
        Ok(SymForm {
            dim,
            degree,
            indices,
            comps,
        })
    }

    pub fn zero(dim: usize, degree: usize) -> Result<SymForm, RingError> {
        let len = sorted_multi_indices(dim, degree).len();
        SymForm::new(dim, degree, vec![Q::zero(); len])
    }

    /// The dual basis covector u_i*.
    pub fn basis_covector(dim: usize, i: usize) -> Result<SymForm, RingError> {
        if i >= dim {
            return Err(RingError::IndexOutOfRange);
        }
        let mut comps = vec![Q::zero(); dim];
        comps[i] = Q::one();
        SymForm::new(dim, 1, comps)
    }

    /// The component labels of SymʳV* in storage order.
    pub fn basis_indices(dim: usize, degree: usize) -> Vec<Vec<usize>> {
        sorted_multi_indices(dim, degree)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Q::is_zero)
    }

    /// Component on any index tuple (order irrelevant by symmetry).
    pub fn component(&self, idx: &[usize]) -> Q {
        assert!(idx.iter().all(|&i| i < self.dim), "index within dimension");
        let mut key = idx.to_vec();
        key.sort_unstable();
        match self.indices.iter().position(|v| *v == key) {
            Some(p) => self.comps[p].clone(),
            None => Q::zero(),
        }
    }

    pub fn add(&self, other: &SymForm) -> Result<SymForm, RingError> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(RingError::DimensionMismatch);
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a + b)
            .collect();
        SymForm::new(self.dim, self.degree, comps)
    }

    pub fn scale(&self, q: &Q) -> SymForm {
        let comps = self.comps.iter().map(|c| c * q).collect();
        SymForm::new(self.dim, self.degree, comps).expect("same shape")
    }

    /// Symmetric product: under the polynomial identification
    /// ζ̃(u) = (1/r!)ζ(u,…,u) this is the plain product of polynomials, so
    /// componentwise (ζ⊙η)_γ = γ! Σ_{α+β=γ} ζ_α/α! · η_β/β!.
    pub fn sym_product(&self, other: &SymForm) -> Result<SymForm, RingError> {
        if self.dim != other.dim {
            return Err(RingError::DimensionMismatch);
        }
        let n = self.dim;
        let degree = self.degree + other.degree;
        let indices = sorted_multi_indices(n, degree);
        let mut comps = Vec::with_capacity(indices.len());
        for gamma in &indices {
            let caps = exps_of(gamma, n);
            let mut total = Q::zero();
            for a in bounded_exps(&caps, self.degree as u16) {
                let za = self.component_by_exps(&a);
                if za.is_zero() {
                    continue;
                }
                let b: Vec<u16> = caps.iter().zip(&a).map(|(c, ae)| c - ae).collect();
                let zb = other.component_by_exps(&b);
                if zb.is_zero() {
                    continue;
                }
                total += za * zb / (exps_factorial(&a) * exps_factorial(&b));
            }
            comps.push(total * exps_factorial(&caps));
        }
        SymForm::new(n, degree, comps)
    }

    fn component_by_exps(&self, exps: &[u16]) -> Q {
        let mut idx = Vec::new();
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                idx.push(i);
            }
        }
        self.component(&idx)
    }
}

/// A finite-dimensional algebra over the rationals given by its product
/// constants u_i · u_j = c^k_{ij} u_k, stored in the same cube layout as
/// connection coefficients. Construction checks Lie-admissibility: the skew
/// part b^k_{ij} = c^k_{ij} − c^k_{ji} must satisfy the Jacobi identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    c: Vec<Q>,
}

/// Whether the skew part of the given product constants (cube layout,
/// length dim³) satisfies the Jacobi identity. Every product in dimension
/// at most two passes, because the Jacobiator is an alternating trilinear
/// map.
pub fn is_lie_admissible(dim: usize, constants: &[Q]) -> bool {
    assert_eq!(constants.len(), dim * dim * dim, "one constant per (k,i,j)");
    let b = skew_part(dim, constants);
    jacobi_holds(dim, &b)
}

fn skew_part(n: usize, c: &[Q]) -> Vec<Q> {
    let mut b = vec![Q::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                b[cube_index(n, k, i, j)] =
                    &c[cube_index(n, k, i, j)] - &c[cube_index(n, k, j, i)];
            }
        }
    }
    b
}

/// Jacobi identity for skew constants: [u,[v,w]] + [v,[w,u]] + [w,[u,v]] = 0
/// on basis triples (alternating, so i < j < k suffices).
fn jacobi_holds(n: usize, b: &[Q]) -> bool {
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for m in 0..n {
                    let mut s = Q::zero();
                    for l in 0..n {
                        s += &b[cube_index(n, l, j, k)] * &b[cube_index(n, m, i, l)]
                            + &b[cube_index(n, l, k, i)] * &b[cube_index(n, m, j, l)]
                            + &b[cube_index(n, l, i, j)] * &b[cube_index(n, m, k, l)];
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

impl Algebra {
    pub fn new(dim: usize, constants: Vec<Q>) -> Result<Algebra, RingError> {
        if dim == 0 || constants.len() != dim * dim * dim {
            return Err(RingError::DimensionMismatch);
        }
        if !is_lie_admissible(dim, &constants) {
            return Err(RingError::NotLieAdmissible);
        }
        Ok(Algebra { dim, c: constants })
    }

    /// The trivial product u·v = 0.
    pub fn trivial(dim: usize) -> Result<Algebra, RingError> {
        Algebra::new(dim, vec![Q::zero(); dim * dim * dim])
    }

    /// The product u·v := [u,v] given by bracket constants. Note the skew
    /// part of this product is twice the input bracket; see
    /// [`Algebra::induced_bracket`].
    pub fn from_bracket(dim: usize, bracket: &[Q]) -> Result<Algebra, RingError> {
        Algebra::new(dim, bracket.to_vec())
    }

    /// The Lie-admissible product attached to a bracket and an inner
    /// product by ⟨u·v, w⟩ = ½(⟨[u,v],w⟩ − ⟨[v,w],u⟩ − ⟨[u,w],v⟩). Its skew
    /// part reproduces the bracket exactly. The gram matrix must be
    /// symmetric and invertible.
    pub fn from_bracket_metric(
        dim: usize,
        bracket: &[Q],
        gram: &[Vec<Q>],
    ) -> Result<Algebra, RingError> {
        let n = dim;
        if n == 0 || bracket.len() != n * n * n || gram.len() != n {
            return Err(RingError::DimensionMismatch);
        }
        for row in gram {
            if row.len() != n {
                return Err(RingError::DimensionMismatch);
            }
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(RingError::DegenerateMetric);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if bracket[cube_index(n, k, i, j)] != -&bracket[cube_index(n, k, j, i)] {
                        return Err(RingError::NotLieAdmissible);
                    }
                }
            }
        }
        let mut aug = QMatrix::from_rows(gram.to_vec()).augment(&QMatrix::identity(n));
        let pivots = aug.rref();
        if pivots != (0..n).collect::<Vec<_>>() {
            return Err(RingError::DegenerateMetric);
        }
        let inv = |k: usize, l: usize| aug.row(k)[n + l].clone();
        let half = Q::new(1.into(), 2.into());
        let pairing = |a: usize, b: usize, l: usize| -> Q {
            // ⟨[u_a, u_b], u_l⟩
            let mut s = Q::zero();
            for m in 0..n {
                s += &bracket[cube_index(n, m, a, b)] * &gram[m][l];
            }
            s
        };
        let mut c = vec![Q::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = Q::zero();
                    for l in 0..n {
                        let rhs = (pairing(i, j, l) - pairing(j, l, i) - pairing(i, l, j))
                            * half.clone();
                        v += inv(k, l) * rhs;
                    }
                    c[cube_index(n, k, i, j)] = v;
                }
            }
        }
        Algebra::new(n, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// c^k_{ij}, the u_k-coefficient of u_i · u_j.
    pub fn constant(&self, k: usize, i: usize, j: usize) -> &Q {
        &self.c[cube_index(self.dim, k, i, j)]
    }

    /// The coefficient vector of u_i · u_j.
    pub fn product(&self, i: usize, j: usize) -> Vec<Q> {
        (0..self.dim).map(|k| self.constant(k, i, j).clone()).collect()
    }

    /// Structure constants of the bracket induced by the skew part,
    /// u_i·u_j − u_j·u_i, in the same cube layout. No normalization is
    /// applied: taking a Lie bracket itself as the product induces twice
    /// that bracket.
    pub fn induced_bracket(&self) -> Vec<Q> {
        skew_part(self.dim, &self.c)
    }

    /// Whether assoc(u,v,w) = assoc(v,u,w) for the associator
    /// assoc(u,v,w) = u·(v·w) − (u·v)·w, checked on basis triples.
    /// Left-symmetric algebras correspond to flat left-invariant
    /// torsion-free connections.
    pub fn is_left_symmetric(&self) -> bool {
        let n = self.dim;
        let assoc = |i: usize, j: usize, k: usize, m: usize| -> Q {
            let mut s = Q::zero();
            for l in 0..n {
                s += self.constant(l, j, k) * self.constant(m, i, l)
                    - self.constant(l, i, j) * self.constant(m, l, k);
            }
            s
        };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    for m in 0..n {
                        if assoc(i, j, k, m) != assoc(j, i, k, m) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The canonical degree-one derivation on components:
    /// (dˢζ)(u₁,…,u_{r+1}) = −Σ_{i<j} ζ(uᵢ·uⱼ + uⱼ·uᵢ, …remaining…).
    pub fn d_sym(&self, zeta: &SymForm) -> Result<SymForm, RingError> {
        if zeta.dim() != self.dim {
            return Err(RingError::DimensionMismatch);
        }
        let n = self.dim;
        let r = zeta.degree();
        let indices = sorted_multi_indices(n, r + 1);
        let mut comps = Vec::with_capacity(indices.len());
        for beta in &indices {
            let mut total = Q::zero();
            for a in 0..beta.len() {
                for b in (a + 1)..beta.len() {
                    let (i, j) = (beta[a], beta[b]);
                    let rest: Vec<usize> = beta
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != a && p != b)
                        .map(|(_, &v)| v)
                        .collect();
                    for k in 0..n {
                        let s = self.constant(k, i, j) + self.constant(k, j, i);
                        if s.is_zero() {
                            continue;
                        }
                        let mut arg = rest.clone();
                        let pos = arg.partition_point(|&v| v < k);
                        arg.insert(pos, k);
                        total -= s * zeta.component(&arg);
                    }
                }
            }
            comps.push(total);
        }
        SymForm::new(n, r + 1, comps)
    }

    /// Matrix of dˢ: SymʳV* → Sym^{r+1}V* over the sorted-multi-index bases.
    pub fn d_sym_matrix(&self, r: usize) -> QMatrix {
        let n = self.dim;
        let src = sorted_multi_indices(n, r);
        let target_len = sorted_multi_indices(n, r + 1).len();
        let columns: Vec<Vec<Q>> = src
            .iter()
            .enumerate()
            .map(|(t, _)| {
                let mut comps = vec![Q::zero(); src.len()];
                comps[t] = Q::one();
                let unit = SymForm::new(n, r, comps).expect("basis form");
                self.d_sym(&unit).expect("matching dimension").comps
            })
            .collect();
        let rows: Vec<Vec<Q>> = (0..target_len)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        QMatrix::from_rows(rows)
    }

    /// Exact kernel/image/quotient dimensions of dˢ in degree `r`, with a
    /// kernel basis. The quotient is ker dˢ|_{SymʳV*} modulo its
    /// intersection with dˢ(Sym^{r−1}V*); in degree zero it is the scalars.
    pub fn cohomology(&self, r: usize) -> AlgebraCohomology {
        let m = self.d_sym_matrix(r);
        let kernel_vecs = m.kernel();
        let dim_kernel = kernel_vecs.len();
        let dim_exact = if r == 0 || dim_kernel == 0 {
            0
        } else {
            let prev = self.d_sym_matrix(r - 1);
            let images: Vec<Vec<Q>> = (0..prev.cols())
                .map(|c| (0..prev.rows()).map(|i| prev.row(i)[c].clone()).collect())
                .collect();
            linalg::intersection_dim(&kernel_vecs, &images)
        };
        let kernel = kernel_vecs
            .into_iter()
            .map(|v| SymForm::new(self.dim, r, v).expect("kernel vector shape"))
            .collect();
        AlgebraCohomology {
            dim_kernel,
            dim_exact_in_kernel: dim_exact,
            dim_h: dim_kernel - dim_exact,
            kernel,
        }
    }
}

/// Exact dimensions of one cohomology degree of an algebra.
#[derive(Clone, Debug)]
pub struct AlgebraCohomology {
    pub dim_kernel: usize,
    pub dim_exact_in_kernel: usize,
    pub dim_h: usize,
    /// Echelon-normalized basis of ker dˢ in this degree.
    pub kernel: Vec<SymForm>,
}
