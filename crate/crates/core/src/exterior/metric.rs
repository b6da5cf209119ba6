use super::basis::{self, Mask};
use super::form::KForm;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A positive-definite inner product on `ℝⁿ` with its volume form in the
/// fixed orientation `e^{1…n}`, plus the induced inner products on every
/// `Λᵏ`, all computed at construction.
#[derive(Clone, Debug)]
pub struct MetricData<S> {
    g: Matrix<S>,
    g_inv: Matrix<S>,
    vol: S,
    /// Gram matrices `⟨eᴵ, eᴶ⟩ = det(g⁻¹[I, J])` per degree.
    gram: Vec<Matrix<S>>,
}

impl<S: Scalar> MetricData<S> {
    /// Checks positivity and derives `vol = √det g · e^{1…n}`.
    pub fn new(g: Matrix<S>) -> Result<Self> {
        let det = Self::check(&g)?;
        let vol = det.root(2).ok_or(Error::InexactRoot("√det g"))?;
        Self::assemble(g, vol)
    }

    /// Like [`MetricData::new`] with a precomputed volume coefficient, which
    /// must equal `√det g`.
    pub fn with_volume(g: Matrix<S>, vol: S) -> Result<Self> {
        let det = Self::check(&g)?;
        if !(vol.clone() * vol.clone() - det.clone()).is_negligible(&det) || !vol.is_positive() {
            return Err(Error::Numerical(format!("volume coefficient {vol} does not match det g = {det}")));
        }
        Self::assemble(g, vol)
    }

    pub fn identity(n: usize) -> Self {
        Self::assemble(Matrix::identity(n), S::one()).expect("identity metric")
    }

    fn check(g: &Matrix<S>) -> Result<S> {
        if !g.is_square() || g.rows() == 0 || g.rows() > basis::MAX_DIM {
            return Err(Error::dim(format!("metric of shape {}x{}", g.rows(), g.cols())));
        }
        g.positive_definite_pivots(&S::tolerance(1e-12)).ok_or(Error::MetricNotPositive)?;
        Ok(g.determinant())
    }

    fn assemble(g: Matrix<S>, vol: S) -> Result<Self> {
        let n = g.rows();
        let g_inv = g.inverse().ok_or(Error::MetricNotPositive)?;
        let gram = (0..=n).map(|k| gram_matrix(&g_inv, n, k)).collect();
        Ok(MetricData { g, g_inv, vol, gram })
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn g(&self) -> &Matrix<S> {
        &self.g
    }

    pub fn g_inv(&self) -> &Matrix<S> {
        &self.g_inv
    }

    /// Coefficient of the volume form on `e^{1…n}`.
    pub fn vol_coeff(&self) -> &S {
        &self.vol
    }

    pub fn volume_form(&self) -> KForm<S> {
        KForm::volume(self.n()).scale(&self.vol)
    }

    pub fn gram(&self, k: usize) -> &Matrix<S> {
        &self.gram[k]
    }

    fn check_form(&self, a: &KForm<S>) -> Result<()> {
        if a.n() != self.n() {
            return Err(Error::dim(format!("form on ℝ^{} with a metric on ℝ^{}", a.n(), self.n())));
        }
        if a.degree() > self.n() {
            return Err(Error::Degree(format!("degree {} on ℝ^{}", a.degree(), self.n())));
        }
        Ok(())
    }

    /// Induced inner product of two forms of equal degree.
    pub fn inner(&self, a: &KForm<S>, b: &KForm<S>) -> Result<S> {
        self.check_form(a)?;
        self.check_form(b)?;
        if a.degree() != b.degree() {
            return Err(Error::Degree(format!("inner product of a {}-form and a {}-form", a.degree(), b.degree())));
        }
        let gb = self.gram[a.degree()].mul_vec(b.coeffs());
        Ok(crate::linalg::dot(a.coeffs(), &gb))
    }

    pub fn norm_sq(&self, a: &KForm<S>) -> Result<S> {
        self.inner(a, a)
    }

    /// Hodge star, characterised by `α ∧ *γ = ⟨α, γ⟩ vol`.
    pub fn hodge(&self, gamma: &KForm<S>) -> Result<KForm<S>> {
        self.check_form(gamma)?;
        let n = self.n();
        let k = gamma.degree();
        let full: Mask = if n == 8 { 0xff } else { ((1u16 << n) - 1) as Mask };
        let raised = self.gram[k].mul_vec(gamma.coeffs());
        let mut out = vec![S::zero(); basis::binomial(n, n - k)];
        for (&m, c) in basis::masks(n, k).iter().zip(raised) {
            if c.is_zero() {
                continue;
            }
            let comp = full & !m;
            let v = c * self.vol.clone();
            out[basis::position(n, comp)] = if basis::merge_sign(m, comp) > 0 { v } else { -v };
        }
        KForm::from_coeffs(n, n - k, out)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> MetricData<T> {
        MetricData {
            g: self.g.map(f),
            g_inv: self.g_inv.map(f),
            vol: f(&self.vol),
            gram: self.gram.iter().map(|m| m.map(f)).collect(),
        }
    }
}

fn gram_matrix<S: Scalar>(g_inv: &Matrix<S>, n: usize, k: usize) -> Matrix<S> {
    let masks = basis::masks(n, k);
    let idx: Vec<Vec<usize>> = masks.iter().map(|&m| basis::indices(m).collect()).collect();
    let size = masks.len();
    let mut out = Matrix::zeros(size, size);
    for a in 0..size {
        for b in a..size {
            let v = if k == 0 {
                S::one()
            } else {
                let sub = Matrix::from_rows(
                    idx[a].iter().map(|&i| idx[b].iter().map(|&j| g_inv[(i, j)].clone()).collect()).collect(),
                );
                sub.determinant()
            };
            out[(b, a)] = v.clone();
            out[(a, b)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    #[test]
    fn hodge_identity_metric() {
        let m = MetricData::<Rational>::identity(7);
        let f = KForm::mono(7, &[1, 2, 7]).unwrap();
        assert_eq!(m.hodge(&f).unwrap(), KForm::mono(7, &[3, 4, 5, 6]).unwrap());
        assert_eq!(m.hodge(&KForm::scalar(7, q(1, 1))).unwrap(), KForm::volume(7));
        assert_eq!(m.hodge(&KForm::volume(7)).unwrap(), KForm::scalar(7, q(1, 1)));
    }

    #[test]
    fn inner_identity_metric() {
        let m = MetricData::<Rational>::identity(7);
        let f = KForm::mono(7, &[1, 2]).unwrap();
        assert_eq!(m.inner(&f, &f).unwrap(), q(1, 1));
        assert!(matches!(m.inner(&f, &KForm::mono(7, &[1]).unwrap()), Err(Error::Degree(_))));
    }

    #[test]
    fn scaled_metric_volume() {
        // g = diag(4, 1, 1): vol = 2 e^{123}, |e^1|² = 1/4.
        let g = Matrix::from_diag(&[q(4, 1), q(1, 1), q(1, 1)]);
        let m = MetricData::new(g).unwrap();
        assert_eq!(m.vol_coeff(), &q(2, 1));
        let e1 = KForm::mono(3, &[1]).unwrap();
        assert_eq!(m.norm_sq(&e1).unwrap(), q(1, 4));
        // *e^1 = ⟨e^1,e^1⟩ vol on the complement: (1/4)·2 e^{23}
        assert_eq!(m.hodge(&e1).unwrap(), KForm::mono(3, &[2, 3]).unwrap().scale(&q(1, 2)));
    }

    #[test]
    fn rejects_indefinite_and_inexact() {
        let g = Matrix::from_diag(&[q(1, 1), q(-1, 1)]);
        assert_eq!(MetricData::new(g).unwrap_err(), Error::MetricNotPositive);
        let g = Matrix::from_diag(&[q(2, 1), q(1, 1)]);
        assert!(matches!(MetricData::new(g), Err(Error::InexactRoot(_))));
        assert!(MetricData::new(Matrix::from_diag(&[2.0f64, 1.0])).is_ok());
    }
}
