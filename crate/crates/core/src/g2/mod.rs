//! G₂-structures on seven-dimensional Lie algebras.

mod curvature;
mod search;

pub use curvature::{CurvatureData, ErpCheck, ErpReport};
pub use search::{search_closed_positive, SearchOptions, SearchOutcome};

use crate::error::{Error, Result};
use crate::exterior::{basis, KForm, MetricData};
use crate::liealg::LieAlgebra;
use crate::linalg::{least_squares, Matrix};
use crate::scalar::Scalar;

/// `e^{127} + e^{347} + e^{567} + e^{135} − e^{146} − e^{236} − e^{245}`.
pub fn standard_phi<S: Scalar>() -> KForm<S> {
    let one = S::one;
    KForm::from_terms(
        7,
        3,
        [
            (&[1, 2, 7][..], one()),
            (&[3, 4, 7][..], one()),
            (&[5, 6, 7][..], one()),
            (&[1, 3, 5][..], one()),
            (&[1, 4, 6][..], -one()),
            (&[2, 3, 6][..], -one()),
            (&[2, 4, 5][..], -one()),
        ],
    )
    .expect("valid 3-form")
}

/// `bᵢⱼ` with `(1/6) ι_{eᵢ}φ ∧ ι_{eⱼ}φ ∧ φ = bᵢⱼ e^{1…7}`.
pub fn phi_bilinear<S: Scalar>(phi: &KForm<S>) -> Result<Matrix<S>> {
    if phi.n() != 7 || phi.degree() != 3 {
        return Err(Error::NotPositive(format!("expected a 3-form on ℝ⁷, got a {}-form on ℝ^{}", phi.degree(), phi.n())));
    }
    let contractions: Vec<KForm<S>> = (0..7).map(|i| phi.interior_basis(i)).collect::<Result<_>>()?;
    let six = S::int(6);
    let mut b = Matrix::zeros(7, 7);
    for i in 0..7 {
        let ip = contractions[i].w(phi);
        for j in i..7 {
            let v = contractions[j].w(&ip).coeffs()[0].clone() / six.clone();
            b[(j, i)] = v.clone();
            b[(i, j)] = v;
        }
    }
    Ok(b)
}

/// The metric and volume induced by a positive 3-form:
/// `g = (det b)^{−1/9} b`, `vol = (det b)^{1/9} e^{1…7}`.
pub fn metric_from_phi<S: Scalar>(phi: &KForm<S>) -> Result<MetricData<S>> {
    let b = phi_bilinear(phi)?;
    if b.positive_definite_pivots(&S::tolerance(1e-12)).is_none() {
        return Err(Error::NotPositive("induced bilinear form is not positive-definite".into()));
    }
    let det = b.determinant();
    if !det.is_positive() {
        return Err(Error::NotPositive(format!("det b = {det}")));
    }
    let vol = det.root(9).ok_or(Error::InexactRoot("(det b)^(1/9)"))?;
    let g = b.scale(&(S::one() / vol.clone()));
    MetricData::with_volume(g, vol)
}

pub fn is_positive<S: Scalar>(phi: &KForm<S>) -> bool {
    phi_bilinear(phi).is_ok_and(|b| b.positive_definite_pivots(&S::tolerance(1e-12)).is_some())
}

/// The torsion form of a closed G₂-structure.
#[derive(Clone, Debug)]
pub struct TorsionData<S> {
    pub tau: KForm<S>,
    pub tau_norm_sq: S,
    pub dtau: KForm<S>,
}

/// A G₂-structure `φ` on a seven-dimensional Lie algebra, with its metric,
/// `*φ` and a basis of `Λ²₁₄` computed at construction.
#[derive(Clone, Debug)]
pub struct G2Structure<S> {
    algebra: LieAlgebra<S>,
    phi: KForm<S>,
    metric: MetricData<S>,
    psi: KForm<S>,
    omega14: Vec<KForm<S>>,
}

impl<S: Scalar> G2Structure<S> {
    pub fn new(algebra: LieAlgebra<S>, phi: KForm<S>) -> Result<Self> {
        if algebra.n() != 7 {
            return Err(Error::dim(format!("G₂-structures need a 7-dimensional algebra, got {}", algebra.n())));
        }
        let metric = metric_from_phi(&phi)?;
        let psi = metric.hodge(&phi)?;
        let wedge_psi = Matrix::from_columns(
            &(0..basis::binomial(7, 2))
                .map(|p| unit_form(7, 2, p).w(&psi).into_coeffs())
                .collect::<Vec<_>>(),
        );
        let omega14 = wedge_psi
            .null_space()
            .into_iter()
            .map(|v| KForm::from_coeffs(7, 2, v).expect("2-form"))
            .collect::<Vec<_>>();
        if omega14.len() != 14 {
            return Err(Error::Numerical(format!("Λ²₁₄ has dimension {}", omega14.len())));
        }
        Ok(G2Structure { algebra, phi, metric, psi, omega14 })
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn phi(&self) -> &KForm<S> {
        &self.phi
    }

    pub fn metric(&self) -> &MetricData<S> {
        &self.metric
    }

    /// `*φ`.
    pub fn psi(&self) -> &KForm<S> {
        &self.psi
    }

    pub fn hodge(&self, gamma: &KForm<S>) -> KForm<S> {
        self.metric.hodge(gamma).expect("form on ℝ⁷")
    }

    pub fn inner(&self, a: &KForm<S>, b: &KForm<S>) -> S {
        self.metric.inner(a, b).expect("equal degrees on ℝ⁷")
    }

    /// Basis of `Λ²₁₄ = {α : α ∧ *φ = 0}`.
    pub fn lambda2_14(&self) -> &[KForm<S>] {
        &self.omega14
    }

    pub fn d_phi(&self) -> KForm<S> {
        self.algebra.d(&self.phi)
    }

    pub fn is_closed(&self) -> bool {
        self.d_phi().is_negligible(&self.phi.max_abs())
    }

    fn require_closed(&self) -> Result<()> {
        let dphi = self.d_phi();
        if dphi.is_negligible(&self.phi.max_abs()) {
            Ok(())
        } else {
            Err(Error::NotClosed(dphi.max_abs().as_f64()))
        }
    }

    /// `π₁₄(α) = (2α − *(α ∧ φ)) / 3`.
    pub fn project_14(&self, alpha: &KForm<S>) -> Result<KForm<S>> {
        if alpha.n() != 7 || alpha.degree() != 2 {
            return Err(Error::Degree(format!("π₁₄ of a {}-form on ℝ^{}", alpha.degree(), alpha.n())));
        }
        let star = self.hodge(&alpha.w(&self.phi));
        Ok((alpha.scale(&S::int(2)) - star).scale(&(S::one() / S::int(3))))
    }

    /// Solves `τ ∧ φ = d*φ` by least squares over `Λ²₁₄`.
    pub fn torsion_form(&self) -> Result<TorsionData<S>> {
        self.require_closed()?;
        let dpsi = self.algebra.d(&self.psi);
        let cols: Vec<Vec<S>> = self.omega14.iter().map(|b| b.w(&self.phi).into_coeffs()).collect();
        let ls = least_squares(&Matrix::from_columns(&cols), dpsi.coeffs());
        let mut tau = KForm::zero(7, 2);
        for (c, b) in ls.x.iter().zip(&self.omega14) {
            tau += &b.scale(c);
        }
        let scale = dpsi.max_abs();
        let residual = (tau.w(&self.phi) - dpsi).max_abs();
        if !residual.is_negligible(&scale) {
            return Err(Error::InconsistentTorsion(residual.as_f64()));
        }
        let tau_norm_sq = self.inner(&tau, &tau);
        let dtau = self.algebra.d(&tau);
        Ok(TorsionData { tau, tau_norm_sq, dtau })
    }

    /// `Δφ = dτ` for closed `φ`.
    pub fn hodge_laplacian_closed(&self) -> Result<KForm<S>> {
        Ok(self.torsion_form()?.dtau)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> G2Structure<T> {
        G2Structure {
            algebra: self.algebra.map_scalar(f),
            phi: self.phi.map_scalar(f),
            metric: self.metric.map_scalar(f),
            psi: self.psi.map_scalar(f),
            omega14: self.omega14.iter().map(|b| b.map_scalar(f)).collect(),
        }
    }

    pub fn to_f64(&self) -> G2Structure<f64> {
        self.map_scalar(Scalar::as_f64)
    }
}

pub(crate) fn unit_form<S: Scalar>(n: usize, k: usize, p: usize) -> KForm<S> {
    let mut c = vec![S::zero(); basis::binomial(n, k)];
    c[p] = S::one();
    KForm::from_coeffs(n, k, c).expect("unit form")
}
