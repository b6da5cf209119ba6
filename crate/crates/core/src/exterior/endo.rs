use super::basis;
use super::form::KForm;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A linear endomorphism of `ℝⁿ`. Column `j` holds the image of `e_j`, so
/// `A e_j = Σᵢ A[i][j] eᵢ` and the dual action is `A* eⁱ = Σⱼ A[i][j] eʲ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endo<S>(Matrix<S>);

impl<S: Scalar> Endo<S> {
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dim(format!("endomorphism must be square, got {}x{}", m.rows(), m.cols())));
        }
        Ok(Endo(m))
    }

    pub fn zero(n: usize) -> Self {
        Endo(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Endo(Matrix::identity(n))
    }

    pub fn diag(d: &[S]) -> Self {
        Endo(Matrix::from_diag(d))
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.0[(i, j)]
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.0.mul_vec(v)
    }

    pub fn add(&self, other: &Endo<S>) -> Endo<S> {
        Endo(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Endo<S>) -> Endo<S> {
        Endo(self.0.sub(&other.0))
    }

    pub fn scale(&self, s: &S) -> Endo<S> {
        Endo(self.0.scale(s))
    }

    pub fn compose(&self, other: &Endo<S>) -> Endo<S> {
        Endo(self.0.mul(&other.0))
    }

    pub fn trace(&self) -> S {
        self.0.trace()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Endo<T> {
        Endo(self.0.map(f))
    }

    pub fn to_f64(&self) -> Endo<f64> {
        self.map_scalar(Scalar::as_f64)
    }

    /// Linear combination `Σ cᵢ Aᵢ` of endomorphisms of a common size.
    pub fn combination(n: usize, coeffs: &[S], basis: &[Endo<S>]) -> Endo<S> {
        coeffs
            .iter()
            .zip(basis)
            .fold(Endo::zero(n), |acc, (c, b)| acc.add(&b.scale(c)))
    }

    /// The derivation action on forms:
    /// `(A*γ)(X₁,…,Xₖ) = Σᵢ γ(X₁,…,AXᵢ,…,Xₖ)`.
    pub fn act(&self, gamma: &KForm<S>) -> Result<KForm<S>> {
        let n = self.n();
        if gamma.n() != n {
            return Err(Error::dim(format!("{n}x{n} endomorphism acting on a form on ℝ^{}", gamma.n())));
        }
        let masks = gamma.masks();
        let mut out = vec![S::zero(); masks.len()];
        for (&m, c) in masks.iter().zip(gamma.coeffs()) {
            if c.is_zero() {
                continue;
            }
            for i in basis::indices(m) {
                for j in 0..n {
                    let a = &self.0[(i, j)];
                    if a.is_zero() {
                        continue;
                    }
                    let v = c.clone() * a.clone();
                    if j == i {
                        let p = basis::position(n, m);
                        out[p] = out[p].clone() + v;
                        continue;
                    }
                    if m & (1 << j) != 0 {
                        continue;
                    }
                    // Replace eⁱ by eʲ in place, then sort: the sign counts the
                    // indices of m strictly between i and j.
                    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                    let between = basis::count_below(m, hi as u32) - basis::count_below(m, lo as u32 + 1);
                    let p = basis::position(n, (m & !(1 << i)) | (1 << j));
                    out[p] = if between.is_multiple_of(2) { out[p].clone() + v } else { out[p].clone() - v };
                }
            }
        }
        KForm::from_coeffs(n, gamma.degree(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn e(idx: &[usize]) -> KForm<Rational> {
        KForm::mono(6, idx).unwrap()
    }

    fn psi() -> KForm<Rational> {
        e(&[1, 3, 5]) - e(&[1, 4, 6]) - e(&[2, 3, 6]) - e(&[2, 4, 5])
    }

    #[test]
    fn identity_scales_by_degree() {
        assert_eq!(Endo::identity(6).act(&psi()).unwrap(), psi().scale(&q(3, 1)));
    }

    #[test]
    fn dual_action_on_covectors() {
        // A e_1 = e_2, so A* e^2 = e^1.
        let mut m = Matrix::zeros(6, 6);
        m[(1, 0)] = q(1, 1);
        let a = Endo::new(m).unwrap();
        assert_eq!(a.act(&e(&[2])).unwrap(), e(&[1]));
        assert!(a.act(&e(&[1])).unwrap().is_zero());
        // A* e^{23} = e^{13}
        assert_eq!(a.act(&e(&[2, 3])).unwrap(), e(&[1, 3]));
    }

    #[test]
    fn sign_of_replacement() {
        // A e_1 = e_4 (A* e^4 = e^1): A* e^{234} = e^{231} = e^{123}.
        let mut m = Matrix::zeros(6, 6);
        m[(3, 0)] = q(1, 1);
        let a = Endo::new(m).unwrap();
        assert_eq!(a.act(&e(&[2, 3, 4])).unwrap(), e(&[1, 2, 3]));
    }

    #[test]
    fn lauret_derivation_fixes_psi() {
        let a = q(3, 7);
        let half = q(1, 2);
        let d = Endo::diag(&[a.clone(), a.clone(), &half - &a, &half - &a, half.clone(), half]);
        assert_eq!(d.act(&psi()).unwrap(), psi());
    }
}
