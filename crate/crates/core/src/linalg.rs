//! Small dense linear algebra over any [`Scalar`].
//!
//! Elimination picks the first non-zero pivot in the exact backend and the
//! largest one (with a relative threshold) for floats, so the same code
//! yields exact ranks over the rationals and stable ones over `f64`.

use nalgebra::{DMatrix, DVector};
use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_diag(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn max_abs(&self) -> S {
        S::max_abs(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs();
        (0..self.rows).all(|i| {
            (i + 1..self.cols).all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).is_negligible(&scale))
        })
    }

    /// Reduced row echelon form with the list of pivot columns.
    pub fn rref(&self) -> Rref<S> {
        let mut m = self.clone();
        let scale = self.max_abs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.pick_pivot(r, c, &scale) else { continue };
            m.swap_rows(r, p);
            let inv = S::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m[(r, j)].clone();
                    if !v.is_zero() {
                        m[(i, j)] = m[(i, j)].clone() - f.clone() * v;
                    }
                }
                m[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        if !S::EXACT {
            // Clear round-off below the rank threshold.
            for v in m.data.iter_mut() {
                if v.is_negligible(&S::one()) {
                    *v = S::zero();
                }
            }
        }
        Rref { matrix: m, pivots }
    }

    fn pick_pivot(&self, from: usize, c: usize, scale: &S) -> Option<usize> {
        if S::EXACT {
            return (from..self.rows).find(|&i| !self[(i, c)].is_zero());
        }
        let (best, val) = (from..self.rows)
            .map(|i| (i, self[(i, c)].abs()))
            .fold((from, S::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        (!val.is_negligible(scale) && !scale.is_zero()).then_some(best)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<S>> {
        self.rref().null_space()
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let scale = self.max_abs();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = m.pick_pivot(c, c, &scale) else { return S::zero() };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                let f = m[(i, c)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let red = aug.rref();
        if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red.matrix[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Diagonal pivots of an LDLᵀ factorisation without pivoting, or `None`
    /// when a pivot is not strictly positive beyond `tol` (relative to the
    /// largest diagonal entry). Succeeds exactly on positive-definite input.
    pub fn positive_definite_pivots(&self, tol: &S) -> Option<Vec<S>> {
        if !self.is_symmetric() {
            return None;
        }
        let n = self.rows;
        let scale = (0..n).map(|i| self[(i, i)].abs()).fold(S::zero(), |m, x| if x > m { x } else { m });
        let threshold = tol.clone() * if scale > S::one() { scale } else { S::one() };
        let mut m = self.clone();
        let mut pivots = Vec::with_capacity(n);
        for c in 0..n {
            let piv = m[(c, c)].clone();
            if piv <= threshold || piv.is_zero() {
                return None;
            }
            for i in c + 1..n {
                let f = m[(i, c)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                }
            }
            pivots.push(piv);
        }
        Some(pivots)
    }

    /// Sylvester inertia `(positive, negative, zero)` of a symmetric matrix,
    /// via symmetric elimination by congruence.
    pub fn inertia(&self) -> (usize, usize, usize) {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let scale = self.max_abs();
        let (mut pos, mut neg) = (0, 0);
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            // Prefer a non-zero diagonal pivot.
            let diag = active.iter().copied().find(|&i| !m[(i, i)].is_negligible(&scale));
            let p = match diag {
                Some(p) => p,
                None => {
                    // All diagonals vanish: combine two indices with a non-zero
                    // off-diagonal entry, e_i -> e_i + e_j.
                    let pair = active.iter().copied().find_map(|i| {
                        active
                            .iter()
                            .copied()
                            .find(|&j| j != i && !m[(i, j)].is_negligible(&scale))
                            .map(|j| (i, j))
                    });
                    let Some((i, j)) = pair else { break };
                    for k in 0..n {
                        let v = m[(j, k)].clone();
                        m[(i, k)] = m[(i, k)].clone() + v;
                    }
                    for k in 0..n {
                        let v = m[(k, j)].clone();
                        m[(k, i)] = m[(k, i)].clone() + v;
                    }
                    i
                }
            };
            let piv = m[(p, p)].clone();
            if piv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for &i in active.iter().filter(|&&i| i != p) {
                let f = m[(i, p)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let v = m[(p, k)].clone();
                    m[(i, k)] = m[(i, k)].clone() - f.clone() * v;
                }
                for k in 0..n {
                    let v = m[(k, p)].clone();
                    m[(k, i)] = m[(k, i)].clone() - f.clone() * v;
                }
            }
            active.retain(|&i| i != p);
        }
        (pos, neg, n - pos - neg)
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug)]
pub struct Rref<S> {
    pub matrix: Matrix<S>,
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Rref<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn null_space(&self) -> Vec<Vec<S>> {
        let cols = self.matrix.cols();
        let free: Vec<usize> = (0..cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); cols];
                v[f] = S::one();
                for (r, &p) in self.pivots.iter().enumerate() {
                    v[p] = -self.matrix[(r, f)].clone();
                }
                v
            })
            .collect()
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Solution of a linear least-squares problem.
#[derive(Clone, Debug)]
pub struct LeastSquares<S> {
    /// Minimum-norm minimiser.
    pub x: Vec<S>,
    /// `|A x − b|²`.
    pub residual_sq: S,
    pub rank: usize,
    /// Basis of the null space of `A`; non-empty iff the minimiser is not unique.
    pub null_space: Vec<Vec<S>>,
}

/// Minimises `|Ax − b|` and returns the minimum-norm minimiser. Exact
/// backends solve the normal equations on the pivot columns of `A`; float
/// backends use an SVD.
pub fn least_squares<S: Scalar>(a: &Matrix<S>, b: &[S]) -> LeastSquares<S> {
    assert_eq!(a.rows(), b.len(), "least squares shape mismatch");
    let red = a.rref();
    let null_space = red.null_space();
    let x = if S::EXACT { normal_solve(a, b, &red.pivots, &null_space) } else { svd_solve(a, b) };
    let ax = a.mul_vec(&x);
    let r: Vec<S> = ax.iter().zip(b).map(|(p, q)| p.clone() - q.clone()).collect();
    let residual_sq = dot(&r, &r);
    LeastSquares { x, residual_sq, rank: red.pivots.len(), null_space }
}

fn normal_solve<S: Scalar>(a: &Matrix<S>, b: &[S], piv: &[usize], null_space: &[Vec<S>]) -> Vec<S> {
    let at = a.transpose();
    let normal = at.mul(a);
    let rhs = at.mul_vec(b);
    let mut x = vec![S::zero(); a.cols()];
    if !piv.is_empty() {
        let sub = Matrix::from_rows(
            piv.iter().map(|&i| piv.iter().map(|&j| normal[(i, j)].clone()).collect()).collect(),
        );
        let sub_rhs: Vec<S> = piv.iter().map(|&i| rhs[i].clone()).collect();
        let xs = solve_square(&sub, &sub_rhs).expect("normal equations on pivot columns are non-singular");
        for (&p, v) in piv.iter().zip(xs) {
            x[p] = v;
        }
    }
    if null_space.is_empty() {
        x
    } else {
        project_out(&x, null_space)
    }
}

fn svd_solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Vec<S> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return vec![S::zero(); n];
    }
    let am = DMatrix::from_fn(m, n, |i, j| a[(i, j)].as_f64());
    let bv = DVector::from_iterator(m, b.iter().map(Scalar::as_f64));
    let svd = am.svd(true, true);
    let eps = svd.singular_values.max() * 1e-11 * (m.max(n) as f64);
    let x = svd.solve(&bv, eps).expect("both factors computed");
    x.iter().map(|&v| <S as Scalar>::from_f64(v).expect("finite least-squares solution")).collect()
}

/// Removes from `x` its Euclidean projection onto `span(basis)`.
fn project_out<S: Scalar>(x: &[S], basis: &[Vec<S>]) -> Vec<S> {
    let gram = Matrix::from_rows(basis.iter().map(|u| basis.iter().map(|v| dot(u, v)).collect()).collect());
    let rhs: Vec<S> = basis.iter().map(|u| dot(u, x)).collect();
    let coef = solve_square(&gram, &rhs).expect("null-space basis is independent");
    let mut out = x.to_vec();
    for (c, u) in coef.iter().zip(basis) {
        for (o, ui) in out.iter_mut().zip(u) {
            *o = o.clone() - c.clone() * ui.clone();
        }
    }
    out
}

/// Solves a non-singular square system.
pub fn solve_square<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let mut aug = Matrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let red = aug.rref();
    if red.rank() < n || red.pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|i| red.matrix[(i, n)].clone()).collect())
}
