use super::algebra::{unit, LieAlgebra};
use crate::error::{Error, Result};
use crate::exterior::{Endo, KForm, MAX_DIM};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A basis of `Der(𝔤)`.
#[derive(Clone, Debug)]
pub struct DerivationSpace<S> {
    pub basis: Vec<Endo<S>>,
}

impl<S: Scalar> DerivationSpace<S> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `d` in the basis, if it lies in the span.
    pub fn coordinates(&self, d: &Endo<S>) -> Option<Vec<S>> {
        let n = d.n();
        let cols: Vec<Vec<S>> = self.basis.iter().map(|b| b.matrix().entries().to_vec()).collect();
        let a = if cols.is_empty() { Matrix::zeros(n * n, 0) } else { Matrix::from_columns(&cols) };
        let target = d.matrix().entries();
        let ls = crate::linalg::least_squares(&a, target);
        let scale = S::max_abs(target);
        let r = ls.residual_sq.clone();
        r.is_negligible(&(scale.clone() * scale)).then_some(ls.x)
    }

    pub fn contains(&self, d: &Endo<S>) -> bool {
        self.coordinates(d).is_some()
    }
}

impl<S: Scalar> LieAlgebra<S> {
    /// Linear map `D ↦ (D*∘d − d∘D*)|_{Λ¹}`, with `D` flattened row-major.
    fn derivation_system(&self) -> Matrix<S> {
        let n = self.n();
        let mut cols = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut m = Matrix::zeros(n, n);
                m[(i, j)] = S::one();
                let e = Endo::new(m).expect("square");
                cols.push(self.derivation_defect(&e).into_iter().flat_map(KForm::into_coeffs).collect());
            }
        }
        Matrix::from_columns(&cols)
    }

    /// `D*(deᵏ) − d(D*eᵏ)` for every `k`; all zero iff `D` is a derivation.
    pub fn derivation_defect(&self, d: &Endo<S>) -> Vec<KForm<S>> {
        let n = self.n();
        (0..n)
            .map(|k| {
                let ek = KForm::from_coeffs(n, 1, unit(n, k)).expect("covector");
                let lhs = d.act(&self.d1()[k]).expect("shapes match");
                let rhs = self.d(&d.act(&ek).expect("shapes match"));
                lhs - rhs
            })
            .collect()
    }

    pub fn is_derivation(&self, d: &Endo<S>) -> bool {
        if d.n() != self.n() {
            return false;
        }
        let scale = d.matrix().max_abs();
        self.derivation_defect(d).iter().all(|f| f.is_negligible(&scale))
    }

    /// Null space of the derivation equations.
    pub fn derivation_space(&self) -> DerivationSpace<S> {
        let n = self.n();
        let basis = self
            .derivation_system()
            .null_space()
            .into_iter()
            .map(|v| Endo::new(Matrix::from_rows(v.chunks(n).map(<[S]>::to_vec).collect())).expect("square"))
            .collect();
        DerivationSpace { basis }
    }

    /// `𝔤 ⋊_D ℝ`: appends `η = eⁿ⁺¹` with `dη = 0` and
    /// `deᵏ ↦ deᵏ + D*eᵏ ∧ η`, so that `[η, X] = DX`.
    pub fn rank_one_extension(&self, d: &Endo<S>) -> Result<LieAlgebra<S>> {
        let n = self.n();
        if d.n() != n {
            return Err(Error::dim(format!("{}x{} endomorphism on a {n}-dimensional algebra", d.n(), d.n())));
        }
        if n + 1 > MAX_DIM {
            return Err(Error::AmbientDimension(n + 1));
        }
        if !self.is_derivation(d) {
            let defect = self.derivation_defect(d).iter().map(KForm::max_abs).fold(S::zero(), |m, x| if x > m { x } else { m });
            return Err(Error::NotDerivation(defect.to_string()));
        }
        let eta = KForm::mono(n + 1, &[n + 1]).expect("η");
        let mut d1 = Vec::with_capacity(n + 1);
        for k in 0..n {
            let ek = KForm::from_coeffs(n, 1, unit(n, k)).expect("covector");
            let dk = d.act(&ek)?.extend(n + 1)?;
            d1.push(self.d1()[k].extend(n + 1)? + dk.w(&eta));
        }
        d1.push(KForm::zero(n + 1, 2));
        let ext = LieAlgebra::new(d1)?;
        let name = if self.name().is_empty() { String::new() } else { format!("{}⋊ℝ", self.name()) };
        Ok(ext.with_name(name).with_params(self.params().clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn e(n: usize, idx: &[usize]) -> KForm<Rational> {
        KForm::mono(n, idx).unwrap()
    }

    fn heisenberg() -> LieAlgebra<Rational> {
        LieAlgebra::new(vec![KForm::zero(3, 2), KForm::zero(3, 2), e(3, &[1, 2])]).unwrap()
    }

    #[test]
    fn heisenberg_derivations() {
        // Der(𝔥₃) has dimension 6.
        let l = heisenberg();
        let der = l.derivation_space();
        assert_eq!(der.dim(), 6);
        assert!(der.contains(&Endo::diag(&[q(1, 1), q(0, 1), q(1, 1)])));
        assert!(!der.contains(&Endo::identity(3)));
    }

    #[test]
    fn extension_bracket() {
        let l = heisenberg();
        let d = Endo::diag(&[q(1, 1), q(2, 1), q(3, 1)]);
        let ext = l.rank_one_extension(&d).unwrap();
        // [η, e₂] = 2e₂
        let b = ext.bracket(&unit(4, 3), &unit(4, 1));
        assert_eq!(b, vec![q(0, 1), q(2, 1), q(0, 1), q(0, 1)]);
        assert!(matches!(l.rank_one_extension(&Endo::identity(3)), Err(Error::NotDerivation(_))));
    }
}
