use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::{basis, Endo, KForm, MAX_DIM};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

/// A real Lie algebra given by the differentials `de¹,…,deⁿ` of its dual
/// basis. Brackets follow `deᵏ(eᵢ, eⱼ) = −eᵏ([eᵢ, eⱼ])`.
///
/// The Chevalley–Eilenberg differential on every degree is tabulated at
/// construction.
#[derive(Clone, Debug)]
pub struct LieAlgebra<S> {
    n: usize,
    d1: Vec<KForm<S>>,
    name: String,
    params: BTreeMap<String, Rational>,
    /// `c[(k * n + i) * n + j] = eᵏ([eᵢ, eⱼ])`.
    c: Vec<S>,
    /// `diff[k]` maps `Λᵏ → Λᵏ⁺¹` in the lexicographic bases, `k < n`.
    diff: Vec<Matrix<S>>,
}

impl<S: Scalar> LieAlgebra<S> {
    /// Builds an algebra and rejects structure equations violating Jacobi.
    pub fn new(d1: Vec<KForm<S>>) -> Result<Self> {
        let l = Self::from_differentials(d1)?;
        let r = l.check_jacobi();
        if !r.is_negligible(&S::one()) {
            return Err(Error::InvalidAlgebra(format!("d² ≠ 0 (Jacobi residual {r})")));
        }
        Ok(l)
    }

    /// Builds an algebra without checking Jacobi; see [`LieAlgebra::check_jacobi`].
    pub fn from_differentials(d1: Vec<KForm<S>>) -> Result<Self> {
        let n = d1.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::AmbientDimension(n));
        }
        for (k, f) in d1.iter().enumerate() {
            if f.n() != n || f.degree() != 2 {
                return Err(Error::InvalidAlgebra(format!(
                    "de^{} must be a 2-form on ℝ^{n}, got a {}-form on ℝ^{}",
                    k + 1,
                    f.degree(),
                    f.n()
                )));
            }
        }
        let mut c = vec![S::zero(); n * n * n];
        for (k, f) in d1.iter().enumerate() {
            for (&m, v) in basis::masks(n, 2).iter().zip(f.coeffs()) {
                if v.is_zero() {
                    continue;
                }
                let mut idx = basis::indices(m);
                let (i, j) = (idx.next().unwrap(), idx.next().unwrap());
                c[(k * n + i) * n + j] = -v.clone();
                c[(k * n + j) * n + i] = v.clone();
            }
        }
        let diff = (0..n).map(|k| differential_matrix(&d1, n, k)).collect();
        Ok(LieAlgebra { n, d1, name: String::new(), params: BTreeMap::new(), c, diff })
    }

    /// The abelian algebra `ℝⁿ`.
    pub fn abelian(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::AmbientDimension(n));
        }
        Self::new(vec![KForm::zero(n, 2); n])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_params(mut self, params: BTreeMap<String, Rational>) -> Self {
        self.params = params;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, Rational> {
        &self.params
    }

    /// `(de¹,…,deⁿ)`.
    pub fn d1(&self) -> &[KForm<S>] {
        &self.d1
    }

    /// Structure constant `eᵏ([eᵢ, eⱼ])` (0-based indices).
    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> &S {
        &self.c[(k * self.n + i) * self.n + j]
    }

    /// `[x, y]` in the basis `e₁,…,eₙ`.
    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); n];
        for i in (0..n).filter(|&i| !x[i].is_zero()) {
            for j in (0..n).filter(|&j| j != i && !y[j].is_zero()) {
                let xy = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(k, i, j);
                    if !c.is_zero() {
                        *o = o.clone() + c.clone() * xy.clone();
                    }
                }
            }
        }
        out
    }

    /// `ad_x`, with column `j` equal to `[x, eⱼ]`.
    pub fn ad(&self, x: &[S]) -> Endo<S> {
        let cols: Vec<Vec<S>> = (0..self.n).map(|j| self.bracket(x, &unit(self.n, j))).collect();
        Endo::new(Matrix::from_columns(&cols)).expect("square")
    }

    pub fn ad_basis(&self, i: usize) -> Endo<S> {
        self.ad(&unit(self.n, i))
    }

    /// Killing form `B(x, y) = tr(ad_x ad_y)` as a matrix in the basis `eᵢ`.
    pub fn killing(&self) -> Matrix<S> {
        let ads: Vec<Endo<S>> = (0..self.n).map(|i| self.ad_basis(i)).collect();
        let mut b = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let v = ads[i].compose(&ads[j]).trace();
                b[(j, i)] = v.clone();
                b[(i, j)] = v;
            }
        }
        b
    }

    /// Matrix of `d: Λᵏ → Λᵏ⁺¹`; zero rows for `k = n`.
    pub fn differential_matrix(&self, k: usize) -> Matrix<S> {
        if k < self.n {
            self.diff[k].clone()
        } else {
            Matrix::zeros(0, basis::binomial(self.n, k))
        }
    }

    /// The Chevalley–Eilenberg differential. A degree-`n` form maps to the
    /// (empty) zero form of degree `n + 1`.
    pub fn ce_differential(&self, gamma: &KForm<S>) -> Result<KForm<S>> {
        if gamma.n() != self.n {
            return Err(Error::dim(format!("form on ℝ^{} for a {}-dimensional algebra", gamma.n(), self.n)));
        }
        let k = gamma.degree();
        if k >= self.n {
            return Ok(KForm::zero(self.n, k + 1));
        }
        KForm::from_coeffs(self.n, k + 1, self.diff[k].mul_vec(gamma.coeffs()))
    }

    /// Panicking [`LieAlgebra::ce_differential`] for forms whose shape is
    /// fixed by construction.
    pub(crate) fn d(&self, gamma: &KForm<S>) -> KForm<S> {
        self.ce_differential(gamma).expect("form shape fixed by construction")
    }

    /// Largest coefficient of `d(deᵏ)` over all `k`; zero iff Jacobi holds.
    pub fn check_jacobi(&self) -> S {
        self.d1
            .iter()
            .map(|f| self.d(f).max_abs())
            .fold(S::zero(), |m, x| if x > m { x } else { m })
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> LieAlgebra<T> {
        LieAlgebra {
            n: self.n,
            d1: self.d1.iter().map(|g| g.map_scalar(f)).collect(),
            name: self.name.clone(),
            params: self.params.clone(),
            c: self.c.iter().map(f).collect(),
            diff: self.diff.iter().map(|m| m.map(f)).collect(),
        }
    }

    pub fn to_f64(&self) -> LieAlgebra<f64> {
        self.map_scalar(Scalar::as_f64)
    }
}

pub(crate) fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// `d(eᴵ) = Σₚ (−1)ᵖ de^{iₚ} ∧ e^{I∖iₚ}` tabulated column by column.
fn differential_matrix<S: Scalar>(d1: &[KForm<S>], n: usize, k: usize) -> Matrix<S> {
    let masks = basis::masks(n, k);
    let mut m: Matrix<S> = Matrix::zeros(basis::binomial(n, k + 1), masks.len());
    for (col, &mask) in masks.iter().enumerate() {
        let idx: Vec<usize> = basis::indices(mask).collect();
        for (p, &i) in idx.iter().enumerate() {
            let rest: Vec<usize> = idx.iter().filter(|&&j| j != i).map(|&j| j + 1).collect();
            let tail = KForm::term(n, &rest, S::one()).expect("valid indices");
            let term = d1[i].w(&tail);
            for (row, v) in term.coeffs().iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                m[(row, col)] = if p % 2 == 0 { m[(row, col)].clone() + v.clone() } else { m[(row, col)].clone() - v.clone() };
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn e(n: usize, idx: &[usize]) -> KForm<Rational> {
        KForm::mono(n, idx).unwrap()
    }

    fn n2() -> LieAlgebra<Rational> {
        let z = KForm::zero(6, 2);
        LieAlgebra::new(vec![
            z.clone(),
            z.clone(),
            z.clone(),
            z,
            e(6, &[1, 4]) + e(6, &[2, 3]),
            e(6, &[1, 3]) - e(6, &[2, 4]),
        ])
        .unwrap()
    }

    #[test]
    fn differential_of_generators() {
        let l = n2();
        assert_eq!(l.d(&e(6, &[5])), e(6, &[1, 4]) + e(6, &[2, 3]));
        assert!(l.d(&e(6, &[1])).is_zero());
        assert!(l.d(&KForm::scalar(6, q(3, 1))).is_zero());
        assert_eq!(l.d(&KForm::volume(6)).degree(), 7);
    }

    #[test]
    fn bracket_sign_convention() {
        // de⁵ = e¹⁴ + …, so [e₁, e₄] = −e₅.
        let l = n2();
        let b = l.bracket(&unit(6, 0), &unit(6, 3));
        assert_eq!(b, vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(-1, 1), q(0, 1)]);
    }

    #[test]
    fn rejects_jacobi_violation() {
        let mut d = n2().d1().to_vec();
        d[5] = d[5].clone() + e(6, &[1, 5]);
        assert!(matches!(LieAlgebra::new(d.clone()), Err(Error::InvalidAlgebra(_))));
        let l = LieAlgebra::from_differentials(d).unwrap();
        assert!(l.check_jacobi() > q(0, 1));
    }

    #[test]
    fn rejects_malformed_differentials() {
        assert!(LieAlgebra::<Rational>::new(vec![e(3, &[1]); 3]).is_err());
        assert!(LieAlgebra::<Rational>::new(vec![]).is_err());
    }
}
