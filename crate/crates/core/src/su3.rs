//! SU(3)-structures on six-dimensional Lie algebras and their rank-one
//! extensions to closed G₂-structures.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Endo, KForm, MetricData};
use crate::g2::G2Structure;
use crate::liealg::LieAlgebra;
use crate::linalg::{least_squares, Matrix};
use crate::scalar::Scalar;

/// `(ω, ψ, ψ̂, J, g)` on a six-dimensional Lie algebra, normalized by
/// `3ψ∧ψ̂ = 2ω³`.
#[derive(Clone, Debug)]
pub struct Su3Structure<S> {
    algebra: LieAlgebra<S>,
    omega: KForm<S>,
    psi: KForm<S>,
    psi_hat: KForm<S>,
    j: Endo<S>,
    metric: MetricData<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum Su3TorsionClass {
    SymplecticHalfFlat,
    /// `dω = cψ` with `c ≠ 0`; `c` as a decimal for reporting.
    Coupled { c: f64 },
    Generic,
}

/// Torsion data of a coupled (or symplectic half-flat, `c = 0`) structure:
/// `dψ̂ = −(2c/3) ω² + w₂ ∧ ω`.
#[derive(Clone, Debug)]
pub struct CoupledData<S> {
    pub c: S,
    pub w2: KForm<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Dw2Proportionality<S> {
    /// `dw₂ = μψ`, and `μ = |w₂|²/4`.
    Proportional { mu: S, w2_norm_sq: S },
    /// Norm of `dw₂ − μψ` for the best `μ`.
    NotProportional { residual: f64 },
}

/// The solutions of `D*ψ = −cψ` inside `Der(𝔥)`: `particular + span(directions)`.
#[derive(Clone, Debug)]
pub struct CompatibleDerivations<S> {
    pub particular: Endo<S>,
    pub directions: Vec<Endo<S>>,
    target: S,
    psi: KForm<S>,
    algebra: LieAlgebra<S>,
}

impl<S: Scalar> CompatibleDerivations<S> {
    pub fn affine_dim(&self) -> usize {
        self.directions.len()
    }

    pub fn contains(&self, d: &Endo<S>) -> bool {
        if !self.algebra.is_derivation(d) {
            return false;
        }
        let Ok(act) = d.act(&self.psi) else { return false };
        (act + self.psi.scale(&self.target)).is_negligible(&self.psi.max_abs())
    }
}

/// `φ = ω∧η + ψ` on `𝔥 ⋊_D ℝ`, with the closedness flag from
/// `d̂ω = −D*ψ, d̂ψ = 0` (checked against a direct `dφ`).
#[derive(Clone, Debug)]
pub struct ExtensionOutcome<S> {
    pub algebra: LieAlgebra<S>,
    pub phi: KForm<S>,
    pub closed: bool,
    pub g2: Result<G2Structure<S>>,
}

/// The Hitchin endomorphism `K(X) = A(ι_Xψ ∧ ψ)`, `A: Λ⁵ ≅ V ⊗ Λ⁶`.
fn hitchin_k<S: Scalar>(psi: &KForm<S>) -> Endo<S> {
    let mut k = Matrix::zeros(6, 6);
    for j in 0..6 {
        let rho = psi.interior_basis(j).expect("3-form").w(psi);
        for i in 0..6 {
            let comp: Vec<usize> = (1..=6).filter(|&p| p != i + 1).collect();
            let c = rho.coeff(&comp);
            k[(i, j)] = if i % 2 == 0 { c } else { -c };
        }
    }
    Endo::new(k).expect("square")
}

/// `W[i][j] = ω(eᵢ, eⱼ)`.
fn two_form_matrix<S: Scalar>(omega: &KForm<S>) -> Matrix<S> {
    let n = omega.n();
    let mut w = Matrix::zeros(n, n);
    for (idx, c) in omega.terms() {
        let (i, j) = (idx[0] - 1, idx[1] - 1);
        w[(i, j)] = c.clone();
        w[(j, i)] = -c.clone();
    }
    w
}

impl<S: Scalar> Su3Structure<S> {
    /// Reconstructs `(J, ψ̂, g)` from `(ω, ψ)`.
    pub fn reconstruct(algebra: LieAlgebra<S>, omega: KForm<S>, psi: KForm<S>) -> Result<Self> {
        if algebra.n() != 6 || omega.n() != 6 || psi.n() != 6 || omega.degree() != 2 || psi.degree() != 3 {
            return Err(Error::dim("SU(3)-structures need a 2-form and a 3-form on a 6-dimensional algebra"));
        }
        let omega3 = omega.power(3)?;
        if omega3.is_negligible(&omega.max_abs()) {
            return Err(Error::OmegaDegenerate);
        }
        let k = hitchin_k(&psi);
        let lambda = k.compose(&k).trace() / S::int(6);
        let m2 = psi.max_abs() * psi.max_abs();
        if !lambda.is_negative() || lambda.is_negligible(&(m2.clone() * m2)) {
            return Err(Error::PsiNotStable);
        }
        if !omega.w(&psi).is_negligible(&(omega.max_abs() * psi.max_abs())) {
            return Err(Error::IncompatiblePair("ω ∧ ψ ≠ 0".into()));
        }
        let root = (-lambda).root(2).ok_or(Error::InexactRoot("√(−λ) of the Hitchin invariant"))?;
        let w = two_form_matrix(&omega);
        let mut j = k.scale(&(S::one() / root));
        let mut g = w.mul(j.matrix());
        if !g.is_symmetric() {
            return Err(Error::IncompatiblePair("ω is not of type (1,1) for the complex structure of ψ".into()));
        }
        let tol = S::tolerance(1e-12);
        if g.positive_definite_pivots(&tol).is_none() {
            j = j.scale(&-S::one());
            g = g.scale(&-S::one());
            if g.positive_definite_pivots(&tol).is_none() {
                return Err(Error::MetricNotPositive);
            }
        }
        let psi_hat = j.act(&psi)?.scale(&(-S::one() / S::int(3)));
        let lhs = psi.w(&psi_hat).scale(&S::int(3));
        let rhs = omega3.scale(&S::int(2));
        if !(lhs - rhs.clone()).is_negligible(&rhs.max_abs()) {
            return Err(Error::IncompatiblePair("normalization 3ψ∧ψ̂ = 2ω³ fails".into()));
        }
        let vol = omega3.coeffs()[0].clone() / S::int(6);
        let metric = MetricData::with_volume(g, vol)?;
        Ok(Su3Structure { algebra, omega, psi, psi_hat, j, metric })
    }

    /// Like [`Su3Structure::reconstruct`], also checking a supplied `ψ̂`.
    pub fn with_psi_hat(algebra: LieAlgebra<S>, omega: KForm<S>, psi: KForm<S>, psi_hat: &KForm<S>) -> Result<Self> {
        let s = Self::reconstruct(algebra, omega, psi)?;
        if psi_hat.n() != 6 || psi_hat.degree() != 3 || !(psi_hat - &s.psi_hat).is_negligible(&s.psi.max_abs()) {
            return Err(Error::IncompatiblePair("supplied ψ̂ differs from the one determined by (ω, ψ)".into()));
        }
        Ok(s)
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn omega(&self) -> &KForm<S> {
        &self.omega
    }

    pub fn psi(&self) -> &KForm<S> {
        &self.psi
    }

    pub fn psi_hat(&self) -> &KForm<S> {
        &self.psi_hat
    }

    pub fn j(&self) -> &Endo<S> {
        &self.j
    }

    pub fn metric(&self) -> &MetricData<S> {
        &self.metric
    }

    /// `ψ̂(X, Y, Z) = −ψ(JX, Y, Z)` holds for the reconstructed forms;
    /// returns the largest deviation.
    pub fn psi_hat_defect(&self) -> S {
        let mut worst = S::zero();
        for x in 0..6 {
            let jx = self.j.apply(&crate::liealg::unit(6, x));
            let lhs = self.psi_hat.interior_basis(x).expect("3-form");
            let rhs = -self.psi.interior(&jx).expect("3-form");
            let d = (lhs - rhs).max_abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// `dω = cψ` by least squares; `None` when `dω` is not a multiple of `ψ`.
    pub fn coupled_constant(&self) -> Option<S> {
        let domega = self.algebra.ce_differential(&self.omega).expect("6-dim form");
        let c = crate::linalg::dot(domega.coeffs(), self.psi.coeffs()) / self.psi.coeff_norm_sq();
        let scale = self.psi.max_abs() * (c.abs() + S::one());
        (domega - self.psi.scale(&c)).is_negligible(&scale).then_some(c)
    }

    pub fn torsion_class(&self) -> Su3TorsionClass {
        let dpsi = self.algebra.ce_differential(&self.psi).expect("6-dim form");
        match self.coupled_constant() {
            Some(c) if c.is_negligible(&S::one()) => {
                if dpsi.is_negligible(&self.psi.max_abs()) {
                    Su3TorsionClass::SymplecticHalfFlat
                } else {
                    Su3TorsionClass::Generic
                }
            }
            Some(c) => Su3TorsionClass::Coupled { c: c.as_f64() },
            None => Su3TorsionClass::Generic,
        }
    }

    /// Basis of the primitive `(1,1)`-forms: `J*α = 0`, `α ∧ ω² = 0`.
    pub fn primitive_11(&self) -> Vec<KForm<S>> {
        let omega2 = self.omega.w(&self.omega);
        let cols: Vec<Vec<S>> = (0..15)
            .map(|p| {
                let a = crate::g2::unit_form::<S>(6, 2, p);
                let mut v = self.j.act(&a).expect("6x6").into_coeffs();
                v.extend(a.w(&omega2).into_coeffs());
                v
            })
            .collect();
        Matrix::from_columns(&cols)
            .null_space()
            .into_iter()
            .map(|v| KForm::from_coeffs(6, 2, v).expect("2-form"))
            .collect()
    }

    /// Solves `dψ̂ + (2c/3) ω² = w₂ ∧ ω` for primitive `(1,1)` `w₂`.
    pub fn w2(&self, c: &S) -> Result<CoupledData<S>> {
        let prim = self.primitive_11();
        if prim.len() != 8 {
            return Err(Error::Numerical(format!("primitive (1,1)-forms span {} dimensions", prim.len())));
        }
        let a = Matrix::from_columns(&prim.iter().map(|b| b.w(&self.omega).into_coeffs()).collect::<Vec<_>>());
        if a.rank() != 8 {
            return Err(Error::Numerical("wedge with ω is not injective on primitive (1,1)-forms".into()));
        }
        let dpsi_hat = self.algebra.ce_differential(&self.psi_hat)?;
        let omega2 = self.omega.w(&self.omega);
        let rhs = dpsi_hat + omega2.scale(&(c.clone() * S::int(2) / S::int(3)));
        let ls = least_squares(&a, rhs.coeffs());
        let w2 = prim.iter().zip(&ls.x).fold(KForm::zero(6, 2), |acc, (b, x)| acc + b.scale(x));
        let residual = (w2.w(&self.omega) - rhs.clone()).max_abs();
        if !residual.is_negligible(&rhs.max_abs()) || residual.as_f64() > 1e-9 {
            return Err(Error::Inconsistent(format!("no primitive (1,1) w₂ solves the torsion equation (residual {residual})")));
        }
        Ok(CoupledData { c: c.clone(), w2 })
    }

    /// Whether `dw₂ = μψ`; when it is, `μ = |w₂|²/4` is asserted.
    pub fn dw2_proportionality(&self, w2: &KForm<S>) -> Result<Dw2Proportionality<S>> {
        let dw2 = self.algebra.ce_differential(w2)?;
        let mu = crate::linalg::dot(dw2.coeffs(), self.psi.coeffs()) / self.psi.coeff_norm_sq();
        let rest = dw2.clone() - self.psi.scale(&mu);
        if !rest.is_negligible(&dw2.max_abs()) {
            let residual = self.metric.norm_sq(&rest)?.as_f64().max(0.0).sqrt();
            return Ok(Dw2Proportionality::NotProportional { residual });
        }
        let w2_norm_sq = self.metric.norm_sq(w2)?;
        let quarter = w2_norm_sq.clone() / S::int(4);
        if !mu.approx_eq(&quarter, 1e-8) {
            return Err(Error::Numerical(format!("dw₂ = {mu}ψ but |w₂|²/4 = {quarter}")));
        }
        Ok(Dw2Proportionality::Proportional { mu, w2_norm_sq })
    }

    /// Derivations `D` of the algebra with `D*ψ = −cψ`; `None` if there are none.
    pub fn compatible_derivations(&self, c: &S) -> Option<CompatibleDerivations<S>> {
        let der = self.algebra.derivation_space();
        let target = self.psi.scale(&-c.clone());
        let cols: Vec<Vec<S>> = der.basis.iter().map(|d| d.act(&self.psi).expect("6x6").into_coeffs()).collect();
        let a = if cols.is_empty() { Matrix::zeros(20, 0) } else { Matrix::from_columns(&cols) };
        let ls = least_squares(&a, target.coeffs());
        if !ls.residual_sq.is_negligible(&target.coeff_norm_sq()) {
            return None;
        }
        let particular = Endo::combination(6, &ls.x, &der.basis);
        let directions = ls.null_space.iter().map(|v| Endo::combination(6, v, &der.basis)).collect();
        Some(CompatibleDerivations {
            particular,
            directions,
            target: c.clone(),
            psi: self.psi.clone(),
            algebra: self.algebra.clone(),
        })
    }

    /// `φ = ω∧η + ψ` on `𝔥 ⋊_D ℝ`, `η = e⁷`.
    pub fn g2_from_extension(&self, d: &Endo<S>) -> Result<ExtensionOutcome<S>> {
        let algebra = self.algebra.rank_one_extension(d)?;
        let eta = KForm::mono(7, &[7])?;
        let phi = self.omega.extend(7)?.w(&eta) + self.psi.extend(7)?;
        let domega = self.algebra.ce_differential(&self.omega)?;
        let scale = self.psi.max_abs();
        let by_conditions = (domega + d.act(&self.psi)?).is_negligible(&scale)
            && self.algebra.ce_differential(&self.psi)?.is_negligible(&scale);
        let direct = algebra.ce_differential(&phi)?.is_negligible(&phi.max_abs());
        if by_conditions != direct {
            return Err(Error::Numerical(format!(
                "closure conditions give {by_conditions} but dφ = 0 is {direct}"
            )));
        }
        let g2 = G2Structure::new(algebra.clone(), phi.clone());
        Ok(ExtensionOutcome { algebra, phi, closed: direct, g2 })
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Su3Structure<T> {
        Su3Structure {
            algebra: self.algebra.map_scalar(f),
            omega: self.omega.map_scalar(f),
            psi: self.psi.map_scalar(f),
            psi_hat: self.psi_hat.map_scalar(f),
            j: self.j.map_scalar(f),
            metric: self.metric.map_scalar(f),
        }
    }
}
