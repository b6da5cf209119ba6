use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::G2Structure;
use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct CurvatureData<S> {
    /// Ricci tensor in the basis `eᵢ`.
    pub ric: Matrix<S>,
    /// `−½|τ|²`.
    pub scal: S,
    /// `tr_g Ric`, checked against `scal`.
    pub scal_from_trace: S,
    /// `|Ric|²_g`.
    pub ric_norm_sq: S,
    /// Eigenvalues of `Ric` relative to `g`, ascending.
    pub ric_eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErpCheck {
    pub name: &'static str,
    pub value: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErpReport {
    pub tau_norm_sq: f64,
    pub erp_residual: f64,
    pub checks: Vec<ErpCheck>,
}

impl ErpReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const ERP_TOL: f64 = 1e-8;
const EIGEN_TOL: f64 = 1e-7;

impl<S: Scalar> G2Structure<S> {
    /// `j(γ)(X, Y) = *(ι_Xφ ∧ ι_Yφ ∧ γ)`.
    pub fn j_map(&self, gamma: &KForm<S>) -> Result<Matrix<S>> {
        if gamma.n() != 7 || gamma.degree() != 3 {
            return Err(Error::Degree(format!("j of a {}-form on ℝ^{}", gamma.degree(), gamma.n())));
        }
        let ip: Vec<KForm<S>> = (0..7).map(|i| self.phi().interior_basis(i)).collect::<Result<_>>()?;
        let vol = self.metric().vol_coeff().clone();
        let mut j = Matrix::zeros(7, 7);
        for a in 0..7 {
            let ag = ip[a].w(gamma);
            for b in a..7 {
                let v = ip[b].w(&ag).coeffs()[0].clone() / vol.clone();
                j[(b, a)] = v.clone();
                j[(a, b)] = v;
            }
        }
        Ok(j)
    }

    /// Ricci and scalar curvature of a closed structure:
    /// `Ric = ¼|τ|² g − ¼ j(dτ − ½ *(τ∧τ))`, `Scal = −½|τ|²`.
    pub fn curvature(&self) -> Result<CurvatureData<S>> {
        let t = self.torsion_form()?;
        let quarter = S::one() / S::int(4);
        let half = S::one() / S::int(2);
        let tt = self.hodge(&t.tau.w(&t.tau));
        let jt = self.j_map(&(t.dtau.clone() - tt.scale(&half)))?;
        let g = self.metric().g();
        let ric = g.scale(&(t.tau_norm_sq.clone() * quarter.clone())).sub(&jt.scale(&quarter));
        let scal = -(t.tau_norm_sq.clone() * half);
        let g_inv = self.metric().g_inv();
        let raised = g_inv.mul(&ric);
        let scal_from_trace = raised.trace();
        let ric_norm_sq = raised.mul(&raised).trace();
        if !scal_from_trace.approx_eq(&scal, 1e-8) {
            return Err(Error::Numerical(format!("tr Ric = {scal_from_trace} but Scal = {scal}")));
        }
        let ric_eigenvalues = relative_eigenvalues(&g.map(Scalar::as_f64), &ric.map(Scalar::as_f64))?;
        Ok(CurvatureData { ric, scal, scal_from_trace, ric_norm_sq, ric_eigenvalues })
    }

    /// `dτ − (|τ|²/6) φ − (1/6) *(τ∧τ)`; zero exactly for ERP structures.
    pub fn erp_defect(&self) -> Result<KForm<S>> {
        let t = self.torsion_form()?;
        let sixth = S::one() / S::int(6);
        let tt = self.hodge(&t.tau.w(&t.tau));
        Ok(t.dtau - self.phi().scale(&(t.tau_norm_sq * sixth.clone())) - tt.scale(&sixth))
    }

    /// `g`-norm of [`G2Structure::erp_defect`].
    pub fn erp_residual(&self) -> Result<f64> {
        let r = self.erp_defect()?;
        Ok(self.inner(&r, &r).as_f64().max(0.0).sqrt())
    }

    /// Properties forced by the ERP condition; fails with [`Error::NotErp`]
    /// when `τ = 0` or the ERP equation does not hold.
    pub fn erp_diagnostics(&self) -> Result<ErpReport> {
        let t = self.torsion_form()?;
        if t.tau.is_negligible(&S::one()) {
            return Err(Error::NotErp("τ = 0".into()));
        }
        let erp_residual = self.erp_residual()?;
        if erp_residual >= ERP_TOL {
            return Err(Error::NotErp(format!("ERP residual {erp_residual:e}")));
        }
        let n2 = t.tau_norm_sq.as_f64();
        let tt = t.tau.w(&t.tau);
        let alg = self.algebra();
        let mut checks = Vec::new();
        let mut push = |name, value: f64, tol: f64| checks.push(ErpCheck { name, value, passed: value.abs() < tol });

        push("erp_residual", erp_residual, ERP_TOL);
        push("tau_cubed", tt.w(&t.tau).max_abs().as_f64(), ERP_TOL);
        push("d_tau_wedge_tau", alg.d(&tt).max_abs().as_f64(), ERP_TOL);
        push("d_star_tau_wedge_tau", alg.d(&self.hodge(&tt)).max_abs().as_f64(), ERP_TOL);

        let contractions: Vec<Vec<S>> =
            (0..7).map(|i| tt.interior_basis(i).map(KForm::into_coeffs)).collect::<Result<_>>()?;
        let annihilator = 7 - Matrix::from_columns(&contractions).rank();
        push("tau_wedge_tau_annihilator_dim_minus_3", annihilator as f64 - 3.0, 0.5);

        let curv = self.curvature()?;
        let j = self.j_map(&self.hodge(&tt))?.scale(&(S::one() / S::int(12)));
        push("ric_minus_j_star_tau_tau", curv.ric.sub(&j).max_abs().as_f64(), ERP_TOL);

        let expected = [-n2 / 6.0, -n2 / 6.0, -n2 / 6.0, 0.0, 0.0, 0.0, 0.0];
        let dev = curv.ric_eigenvalues.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        push("ric_eigenvalue_deviation", dev, EIGEN_TOL);

        Ok(ErpReport { tau_norm_sq: n2, erp_residual, checks })
    }
}

/// Eigenvalues of the symmetric form `h` relative to the metric `g`,
/// via `L⁻¹ h L⁻ᵀ` with `g = L Lᵀ`.
pub(crate) fn relative_eigenvalues(g: &Matrix<f64>, h: &Matrix<f64>) -> Result<Vec<f64>> {
    let n = g.rows();
    let gm = DMatrix::from_row_slice(n, n, g.entries());
    let hm = DMatrix::from_row_slice(n, n, h.entries());
    let chol = gm.cholesky().ok_or(Error::MetricNotPositive)?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse().ok_or(Error::MetricNotPositive)?;
    let m = &l_inv * hm * l_inv.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
