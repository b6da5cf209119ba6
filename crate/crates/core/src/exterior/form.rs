use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::basis::{self, Mask, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A degree-`k` alternating form on `ℝⁿ` with one coefficient per basis
/// monomial, in lexicographic order.
///
/// The arithmetic operators panic when the ambient dimension or degree
/// differ; [`KForm::wedge`] and [`KForm::interior`] report such mismatches
/// as errors instead.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    n: usize,
    k: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> KForm<S> {
    /// The zero form. Degree `n + 1` is allowed and has no coefficients.
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(n <= MAX_DIM, "ambient dimension {n} exceeds {MAX_DIM}");
        assert!(k <= n + 1, "degree {k} exceeds ambient dimension {n}");
        KForm { n, k, coeffs: vec![S::zero(); basis::binomial(n, k)] }
    }

    pub fn try_zero(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::AmbientDimension(n));
        }
        if k > n {
            return Err(Error::Degree(format!("degree {k} on ℝ^{n}")));
        }
        Ok(Self::zero(n, k))
    }

    pub fn scalar(n: usize, c: S) -> Self {
        let mut f = Self::zero(n, 0);
        f.coeffs[0] = c;
        f
    }

    /// `e^{1…n}`.
    pub fn volume(n: usize) -> Self {
        let mut f = Self::zero(n, n);
        f.coeffs[0] = S::one();
        f
    }

    pub fn from_coeffs(n: usize, k: usize, coeffs: Vec<S>) -> Result<Self> {
        let f = Self::try_zero(n, k)?;
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::dim(format!(
                "{} coefficients for a {k}-form on ℝ^{n} (expected {})",
                coeffs.len(),
                f.coeffs.len()
            )));
        }
        Ok(KForm { coeffs, ..f })
    }

    /// The monomial `e^{i₁…iₖ}` from 1-based indices in any order.
    pub fn mono(n: usize, idx: &[usize]) -> Result<Self> {
        Self::term(n, idx, S::one())
    }

    /// `c · e^{i₁…iₖ}`; repeated indices give the zero form.
    pub fn term(n: usize, idx: &[usize], c: S) -> Result<Self> {
        let mut f = Self::try_zero(n, idx.len())?;
        f.add_term(idx, c)?;
        Ok(f)
    }

    /// Sum of `c · e^{idx}` terms of a common degree.
    pub fn from_terms<'a, I>(n: usize, k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], S)>,
    {
        let mut f = Self::try_zero(n, k)?;
        for (idx, c) in terms {
            f.add_term(idx, c)?;
        }
        Ok(f)
    }

    /// Adds `c · e^{idx}` (1-based indices, any order).
    pub fn add_term(&mut self, idx: &[usize], c: S) -> Result<()> {
        if idx.len() != self.k {
            return Err(Error::Degree(format!("term of degree {} added to a {}-form", idx.len(), self.k)));
        }
        if idx.iter().any(|&i| i == 0 || i > self.n) {
            return Err(Error::dim(format!("index out of range 1..={} in {idx:?}", self.n)));
        }
        if let Some((mask, sign)) = basis::mask_from_indices(self.n, idx) {
            let p = basis::position(self.n, mask);
            let c = if sign < 0 { -c } else { c };
            self.coeffs[p] = self.coeffs[p].clone() + c;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub(crate) fn masks(&self) -> &'static [Mask] {
        basis::masks(self.n, self.k)
    }

    /// Coefficient of `e^{idx}` (sign-adjusted for unsorted indices).
    pub fn coeff(&self, idx: &[usize]) -> S {
        if idx.len() != self.k {
            return S::zero();
        }
        match basis::mask_from_indices(self.n, idx) {
            Some((mask, sign)) => {
                let c = self.coeffs[basis::position(self.n, mask)].clone();
                if sign < 0 { -c } else { c }
            }
            None => S::zero(),
        }
    }

    /// Non-zero terms as (1-based sorted indices, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        self.masks()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&m, c)| (basis::indices(m).map(|i| i + 1).collect(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn max_abs(&self) -> S {
        S::max_abs(&self.coeffs)
    }

    /// Zero up to the backend tolerance relative to `scale`.
    pub fn is_negligible(&self, scale: &S) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(scale))
    }

    /// Euclidean coefficient norm squared (orthonormal-coframe norm).
    pub fn coeff_norm_sq(&self) -> S {
        crate::linalg::dot(&self.coeffs, &self.coeffs)
    }

    pub fn scale(&self, s: &S) -> Self {
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Lossy conversion to `f64` coefficients.
    pub fn to_f64(&self) -> KForm<f64> {
        self.map_scalar(Scalar::as_f64)
    }

    /// Converts between backends, failing if a coefficient is not
    /// representable in the target.
    pub fn convert<T: Scalar>(&self) -> Result<KForm<T>> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                c.to_rational()
                    .and_then(|q| T::from_rational(&q))
                    .ok_or_else(|| Error::Numerical(format!("coefficient {c} not representable in {}", T::NAME)))
            })
            .collect::<Result<_>>()?;
        Ok(KForm { n: self.n, k: self.k, coeffs })
    }

    fn check_same_shape(&self, other: &Self, op: &str) {
        assert!(
            self.n == other.n && self.k == other.k,
            "{op}: shape mismatch ({}-form on ℝ^{} vs {}-form on ℝ^{})",
            self.k,
            self.n,
            other.k,
            other.n
        );
    }

    /// `α ∧ β`.
    pub fn wedge(&self, other: &KForm<S>) -> Result<KForm<S>> {
        if self.n != other.n {
            return Err(Error::dim(format!("wedge of forms on ℝ^{} and ℝ^{}", self.n, other.n)));
        }
        let k = self.k + other.k;
        if k > self.n {
            return Err(Error::Degree(format!("wedge degree {k} exceeds dimension {}", self.n)));
        }
        let mut out: KForm<S> = KForm::zero(self.n, k);
        let bm = other.masks();
        for (&ma, ca) in self.masks().iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (&mb, cb) in bm.iter().zip(&other.coeffs) {
                if cb.is_zero() || ma & mb != 0 {
                    continue;
                }
                let p = basis::position(self.n, ma | mb);
                let v = ca.clone() * cb.clone();
                out.coeffs[p] = if basis::merge_sign(ma, mb) > 0 {
                    out.coeffs[p].clone() + v
                } else {
                    out.coeffs[p].clone() - v
                };
            }
        }
        Ok(out)
    }

    /// Wedge with a form, panicking on shape errors. Internal convenience for
    /// code paths where the shapes are fixed by construction.
    pub(crate) fn w(&self, other: &KForm<S>) -> KForm<S> {
        self.wedge(other).expect("wedge shapes fixed by construction")
    }

    /// `k`-th power `α ∧ … ∧ α`.
    pub fn power(&self, p: usize) -> Result<KForm<S>> {
        let mut acc = KForm::scalar(self.n, S::one());
        for _ in 0..p {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Interior product `ι_X α` with the vector `X` (components in `e₁…eₙ`).
    pub fn interior(&self, x: &[S]) -> Result<KForm<S>> {
        if x.len() != self.n {
            return Err(Error::dim(format!("vector of length {} on ℝ^{}", x.len(), self.n)));
        }
        if self.k == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut out: KForm<S> = KForm::zero(self.n, self.k - 1);
        for (&m, c) in self.masks().iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            for j in basis::indices(m) {
                if x[j].is_zero() {
                    continue;
                }
                let p = basis::position(self.n, m & !(1 << j));
                let v = c.clone() * x[j].clone();
                out.coeffs[p] = if basis::count_below(m, j as u32).is_multiple_of(2) {
                    out.coeffs[p].clone() + v
                } else {
                    out.coeffs[p].clone() - v
                };
            }
        }
        Ok(out)
    }

    /// `ι_{e_j} α` for a 0-based basis index.
    pub fn interior_basis(&self, j: usize) -> Result<KForm<S>> {
        let mut x = vec![S::zero(); self.n];
        x[j] = S::one();
        self.interior(&x)
    }

    /// The same form on `ℝᵐ ⊇ ℝⁿ` (new coordinates appended).
    pub fn extend(&self, m: usize) -> Result<KForm<S>> {
        if m < self.n || m > MAX_DIM {
            return Err(Error::AmbientDimension(m));
        }
        let mut out = KForm::zero(m, self.k);
        for (&mask, c) in self.masks().iter().zip(&self.coeffs) {
            out.coeffs[basis::position(m, mask)] = c.clone();
        }
        Ok(out)
    }

    /// Pull-back to the coordinate subspace `ℝᵐ ⊆ ℝⁿ` spanned by the first
    /// `m` basis vectors: terms touching the dropped indices vanish.
    pub fn restrict(&self, m: usize) -> Result<KForm<S>> {
        if m > self.n || self.k > m {
            return Err(Error::AmbientDimension(m));
        }
        let mut out = KForm::zero(m, self.k);
        let keep: Mask = if m == 8 { 0xff } else { (1u16 << m) as Mask - 1 };
        for (&mask, c) in self.masks().iter().zip(&self.coeffs) {
            if mask & !keep == 0 {
                out.coeffs[basis::position(m, mask)] = c.clone();
            }
        }
        Ok(out)
    }

    /// Substitutes `eⁱ ↦ sᵢ eⁱ` coefficient-wise.
    pub fn rescale_coframe(&self, s: &[S]) -> KForm<S> {
        assert_eq!(s.len(), self.n);
        let coeffs = self
            .masks()
            .iter()
            .zip(&self.coeffs)
            .map(|(&m, c)| basis::indices(m).fold(c.clone(), |acc, i| acc * s[i].clone()))
            .collect();
        KForm { n: self.n, k: self.k, coeffs }
    }
}

impl<S: fmt::Debug> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KForm").field("n", &self.n).field("k", &self.k).field("coeffs", &self.coeffs).finish()
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            let label: String = idx.iter().map(|i| i.to_string()).collect();
            if first {
                write!(f, "({c})e{label}")?;
                first = false;
            } else {
                write!(f, " + ({c})e{label}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<S: Scalar> Add for &KForm<S> {
    type Output = KForm<S>;
    fn add(self, rhs: &KForm<S>) -> KForm<S> {
        self.check_same_shape(rhs, "add");
        KForm {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Sub for &KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: &KForm<S>) -> KForm<S> {
        self.check_same_shape(rhs, "sub");
        KForm {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Add for KForm<S> {
    type Output = KForm<S>;
    fn add(self, rhs: KForm<S>) -> KForm<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: KForm<S>) -> KForm<S> {
        &self - &rhs
    }
}

impl<S: Scalar> AddAssign<&KForm<S>> for KForm<S> {
    fn add_assign(&mut self, rhs: &KForm<S>) {
        self.check_same_shape(rhs, "add");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = a.clone() + b.clone();
        }
    }
}

impl<S: Scalar> SubAssign<&KForm<S>> for KForm<S> {
    fn sub_assign(&mut self, rhs: &KForm<S>) {
        self.check_same_shape(rhs, "sub");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = a.clone() - b.clone();
        }
    }
}

impl<S: Scalar> Neg for &KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        KForm { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<S: Scalar> Neg for KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        -&self
    }
}

impl<S: Scalar> Mul<S> for &KForm<S> {
    type Output = KForm<S>;
    fn mul(self, s: S) -> KForm<S> {
        self.scale(&s)
    }
}

impl<S: Scalar> Mul<S> for KForm<S> {
    type Output = KForm<S>;
    fn mul(self, s: S) -> KForm<S> {
        self.scale(&s)
    }
}
