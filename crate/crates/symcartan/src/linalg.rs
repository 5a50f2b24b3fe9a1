//! Exact linear algebra over the rationals, a small dense solver over the
//! scalar-field fraction field, and a one-sided Jacobi SVD used as a numeric
//! rank oracle.

use crate::ring::{Q, RingError, ScalarField};
use num_traits::{One, Signed, Zero};

/// Dense matrix over the exact rationals, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn augment(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = QMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        QMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mat_mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// In-place reduction to reduced row echelon form; returns the pivot
    /// columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            // choose the entry of largest magnitude for mild coefficient control
            let mut best: Option<usize> = None;
            for r in pivot_row..self.rows {
                if !self[(r, col)].is_zero() {
                    match best {
                        None => best = Some(r),
                        Some(b) => {
                            if complexity(&self[(r, col)]) < complexity(&self[(b, col)]) {
                                best = Some(r);
                            }
                        }
                    }
                }
            }
            let Some(r) = best else { continue };
            self.swap_rows(pivot_row, r);
            let inv = self[(pivot_row, col)].recip();
            self.scale_row(pivot_row, &inv);
            for r2 in 0..self.rows {
                if r2 != pivot_row && !self[(r2, col)].is_zero() {
                    let factor = self[(r2, col)].clone();
                    self.row_axpy(r2, pivot_row, &-factor);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the null space, echelon-normalized: each vector has a 1 in
    /// one free column and zeros in the other free columns.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Q::zero(); self.cols];
            vec[free] = Q::one();
            for (col, pr) in pivot_set.iter().enumerate() {
                if let Some(r) = pr {
                    vec[col] = -m[(*r, free)].clone();
                }
            }
            basis.push(vec);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, factor: &Q) {
        for j in 0..self.cols {
            let v = &mut self[(r, j)];
            if !v.is_zero() {
                *v *= factor;
            }
        }
    }

    /// row[dst] += factor * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, factor: &Q) {
        for j in 0..self.cols {
            let add = &self[(src, j)] * factor;
            if !add.is_zero() {
                self[(dst, j)] += add;
            }
        }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|q| q.to_f64().unwrap_or(0.0)).collect())
            .collect()
    }
}

/// Rough size measure used to pick well-conditioned exact pivots.
fn complexity(q: &Q) -> usize {
    q.numer().abs().to_string().len() + q.denom().to_string().len()
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank of the column span of `extra` modulo the column span of `base`:
/// dim span(base ∪ extra) − dim span(base). Columns are given as vectors.
pub fn rank_increase(base: &[Vec<Q>], extra: &[Vec<Q>]) -> usize {
    if extra.is_empty() {
        return 0;
    }
    let n = extra[0].len();
    let rows_base: Vec<Vec<Q>> = base.iter().cloned().collect();
    let mut all = rows_base.clone();
    all.extend(extra.iter().cloned());
    let rank_base = if rows_base.is_empty() {
        0
    } else {
        QMatrix::from_rows(rows_base).rank()
    };
    debug_assert!(all.iter().all(|v| v.len() == n));
    QMatrix::from_rows(all).rank() - rank_base
}

/// Dimension of the intersection of the spans of two vector families, via
/// dim(U ∩ W) = dim U + dim W − dim(U + W).
pub fn intersection_dim(u: &[Vec<Q>], w: &[Vec<Q>]) -> usize {
    let dim_u = if u.is_empty() {
        0
    } else {
        QMatrix::from_rows(u.to_vec()).rank()
    };
    let dim_w = if w.is_empty() {
        0
    } else {
        QMatrix::from_rows(w.to_vec()).rank()
    };
    let mut all = u.to_vec();
    all.extend(w.iter().cloned());
    let dim_sum = if all.is_empty() {
        0
    } else {
        QMatrix::from_rows(all).rank()
    };
    dim_u + dim_w - dim_sum
}

/// Solve the dense system `a * x = b` over the scalar-field fraction field
/// by Gauss–Jordan elimination. `a` is square, row-major. Fails if `a` is
/// singular as a matrix of rational functions.
pub fn solve_field(a: &[Vec<ScalarField>], b: &[Vec<ScalarField>]) -> Result<Vec<Vec<ScalarField>>, RingError> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n));
    let m = b.first().map_or(0, |row| row.len());
    assert_eq!(b.len(), n);
    let mut aug: Vec<Vec<ScalarField>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or(RingError::DivisionByZero)?;
        aug.swap(col, pivot);
        let inv = aug[col][col].inverse()?;
        for j in col..n + m {
            aug[col][j] = aug[col][j].mul(&inv);
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for j in col..n + m {
                    let sub = f.mul(&aug[col][j]);
                    aug[r][j] = aug[r][j].sub(&sub);
                }
            }
        }
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Inverse of a square scalar-field matrix.
pub fn invert_field(a: &[Vec<ScalarField>]) -> Result<Vec<Vec<ScalarField>>, RingError> {
    let n = a.len();
    assert!(n > 0);
    let chart = a[0][0].chart().clone();
    let mut id = vec![vec![ScalarField::zero(&chart); n]; n];
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = ScalarField::one(&chart);
    }
    solve_field(a, &id)
}

/// Singular values of a real matrix by one-sided Jacobi rotations on the
/// columns. Adequate for the modest sizes of the verification harness.
pub fn singular_values(a: &[Vec<f64>]) -> Vec<f64> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    if cols == 0 {
        return Vec::new();
    }
    // work on the transpose if needed so that cols <= rows
    let (mut u, n): (Vec<Vec<f64>>, usize) = if cols <= rows {
        (
            (0..cols).map(|j| (0..rows).map(|i| a[i][j]).collect()).collect(),
            cols,
        )
    } else {
        ((0..rows).map(|i| a[i].clone()).collect(), rows)
    };
    // u now holds n column vectors; orthogonalize pairwise
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for k in 0..u[p].len() {
                    app += u[p][k] * u[p][k];
                    aqq += u[q][k] * u[q][k];
                    apq += u[p][k] * u[q][k];
                }
                if apq.abs() <= 1e-30 {
                    continue;
                }
                off = off.max(apq.abs() / (app.sqrt() * aqq.sqrt()).max(1e-300));
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..u[p].len() {
                    let up = u[p][k];
                    let uq = u[q][k];
                    u[p][k] = c * up - s * uq;
                    u[q][k] = s * up + c * uq;
                }
            }
        }
        if off < 1e-14 {
            break;
        }
    }
    let mut sv: Vec<f64> = u
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Numeric rank: number of singular values above `tol` relative to the
/// largest one (absolute if the matrix is numerically zero).
pub fn numeric_rank(a: &[Vec<f64>], tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    if top <= tol {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}
