//! Laplacian flow of closed G₂-structures on Lie algebras, algebraic
//! solitons, and reference solutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Endo, KForm};
use crate::g2::{metric_from_phi, G2Structure};
use crate::liealg::LieAlgebra;
use crate::linalg::{least_squares, Matrix};
use crate::scalar::{Real, Scalar};

/// `Δφ = dτ` together with the quantities the integrator monitors.
#[derive(Clone, Debug)]
pub struct LaplacianData<R> {
    pub laplacian: KForm<R>,
    pub tau: KForm<R>,
    pub tau_norm_sq: R,
    pub vol: R,
}

/// `Δφ` for a closed positive `φ`, via `τ = −*d*φ`.
pub fn laplacian<R: Real>(algebra: &LieAlgebra<R>, phi: &KForm<R>) -> Result<LaplacianData<R>> {
    let m = metric_from_phi(phi)?;
    let dpsi = algebra.ce_differential(&m.hodge(phi)?)?;
    let tau = -m.hodge(&dpsi)?;
    let tau_norm_sq = m.norm_sq(&tau)?;
    let laplacian = algebra.ce_differential(&tau)?;
    Ok(LaplacianData { laplacian, tau, tau_norm_sq, vol: *m.vol_coeff() })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FlowConfig {
    pub t_end: f64,
    /// Initial step.
    pub dt0: f64,
    /// Local error allowance per unit time.
    pub tol: f64,
    /// `|τ|²` above which the run stops as approaching blow-up.
    pub max_tau_norm_sq: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { t_end: 1.0, dt0: 1e-3, tol: 1e-9, max_tau_norm_sq: 1e12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowStatus {
    Completed,
    BlowupApproach,
}

#[derive(Clone, Debug)]
pub struct FlowSample<R> {
    pub t: f64,
    pub phi: KForm<R>,
    pub tau_norm_sq: f64,
    /// `−½|τ|²`.
    pub scal: f64,
    pub vol: f64,
}

#[derive(Clone, Debug)]
pub struct FlowTrajectory<R> {
    pub samples: Vec<FlowSample<R>>,
    pub config: FlowConfig,
    pub status: FlowStatus,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest `|dφ|` seen along the run.
    pub max_closed_residual: f64,
}

impl<R: Real> FlowTrajectory<R> {
    pub fn last(&self) -> &FlowSample<R> {
        self.samples.last().expect("trajectories start with the initial sample")
    }

    /// Largest coefficient deviation from a reference solution over all samples.
    pub fn max_deviation(&self, reference: impl Fn(f64) -> Result<KForm<R>>) -> Result<f64> {
        self.samples.iter().try_fold(0.0f64, |m, s| {
            let r = reference(s.t)?;
            Ok(m.max((&s.phi - &r).max_abs().as_f64()))
        })
    }
}

fn axpy<R: Real>(y: &[R], h: R, k: &[R]) -> Vec<R> {
    y.iter().zip(k).map(|(a, b)| *a + h * *b).collect()
}

/// Integrates `∂φ/∂t = Δφ` with classical RK4 and step-doubling error control.
pub fn laplacian_flow<R: Real>(g0: &G2Structure<R>, cfg: &FlowConfig) -> Result<FlowTrajectory<R>> {
    let algebra = g0.algebra();
    if !g0.is_closed() {
        return Err(Error::NotClosed(g0.d_phi().max_abs().as_f64()));
    }
    if !(cfg.t_end >= 0.0 && cfg.dt0 > 0.0 && cfg.tol > 0.0) {
        return Err(Error::Parameter("need t_end ≥ 0, dt0 > 0, tol > 0".into()));
    }
    let to_r = |v: f64| <R as Scalar>::from_f64(v).expect("finite");
    let rhs = |y: &[R]| -> Result<Vec<R>> {
        let phi = KForm::from_coeffs(7, 3, y.to_vec())?;
        Ok(laplacian(algebra, &phi)?.laplacian.into_coeffs())
    };
    let rk4 = |y: &[R], h: R| -> Result<Vec<R>> {
        let two = R::int(2);
        let k1 = rhs(y)?;
        let k2 = rhs(&axpy(y, h / two, &k1))?;
        let k3 = rhs(&axpy(y, h / two, &k2))?;
        let k4 = rhs(&axpy(y, h, &k3))?;
        Ok((0..y.len()).map(|i| y[i] + h / R::int(6) * (k1[i] + two * k2[i] + two * k3[i] + k4[i])).collect())
    };
    let sample = |t: f64, phi: KForm<R>| -> Result<FlowSample<R>> {
        let lap = laplacian(algebra, &phi)?;
        let n2 = lap.tau_norm_sq.as_f64();
        Ok(FlowSample { t, phi, tau_norm_sq: n2, scal: -0.5 * n2, vol: lap.vol.as_f64() })
    };

    let mut traj = FlowTrajectory {
        samples: vec![sample(0.0, g0.phi().clone())?],
        config: *cfg,
        status: FlowStatus::Completed,
        accepted_steps: 0,
        rejected_steps: 0,
        max_closed_residual: 0.0,
    };
    let mut y = g0.phi().coeffs().to_vec();
    let mut t = 0.0f64;
    let mut h = cfg.dt0;
    while t < cfg.t_end {
        let step = h.min(cfg.t_end - t);
        let hr = to_r(step);
        let attempt = rk4(&y, hr).and_then(|full| {
            let half = rk4(&y, hr / R::int(2))?;
            Ok((full, rk4(&half, hr / R::int(2))?))
        });
        let Ok((full, fine)) = attempt else {
            traj.status = FlowStatus::BlowupApproach;
            break;
        };
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs().as_f64()));
        let err = full.iter().zip(&fine).fold(0.0f64, |m, (a, b)| m.max((*a - *b).abs().as_f64())) / 15.0 / scale;
        let allowed = cfg.tol * step;
        let factor = if err == 0.0 { 2.0 } else { (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 2.0) };
        if err > allowed {
            traj.rejected_steps += 1;
            h = step * factor;
            if h < 1e-14 {
                traj.status = FlowStatus::BlowupApproach;
                break;
            }
            continue;
        }
        // Richardson extrapolation of the two estimates.
        let fifteen = R::int(15);
        y = fine.iter().zip(&full).map(|(f, c)| *f + (*f - *c) / fifteen).collect();
        t = if cfg.t_end - t - step <= 1e-15 * cfg.t_end.max(1.0) { cfg.t_end } else { t + step };
        h = step * factor;
        traj.accepted_steps += 1;
        let phi = KForm::from_coeffs(7, 3, y.clone())?;
        let closed = algebra.ce_differential(&phi)?.max_abs().as_f64();
        traj.max_closed_residual = traj.max_closed_residual.max(closed);
        if closed > 1e-8 * scale {
            return Err(Error::Numerical(format!("dφ = {closed:e} at t = {t}")));
        }
        match sample(t, phi) {
            Ok(s) if s.tau_norm_sq <= cfg.max_tau_norm_sq => traj.samples.push(s),
            Ok(s) => {
                traj.samples.push(s);
                traj.status = FlowStatus::BlowupApproach;
                break;
            }
            Err(_) => {
                traj.status = FlowStatus::BlowupApproach;
                break;
            }
        }
    }
    Ok(traj)
}

/// `λ(a) = 8a² − 4a − 4`.
pub fn lauret_lambda(a: f64) -> f64 {
    8.0 * a * a - 4.0 * a - 4.0
}

/// `(q₁, q₂, q₃)` for `a ≠ 1`.
pub fn lauret_exponents(a: f64) -> (f64, f64, f64) {
    (3.0 * a / (2.0 * (2.0 * a + 1.0)), 3.0 * (2.0 * a - 1.0) / (8.0 * (a - 1.0)), 9.0 / (8.0 * (2.0 * a + 1.0) * (a - 1.0)))
}

/// The maximal existence interval `(lo, hi)` of the solution on `𝔤_a`.
pub fn lauret_interval(a: f64) -> (f64, f64) {
    let t = -1.5 / lauret_lambda(a);
    if a < 1.0 {
        (f64::NEG_INFINITY, t)
    } else {
        (t, f64::INFINITY)
    }
}

/// `A^{q₁} e¹²⁷ + A^{q₂} e³⁴⁷ + A^{q₃}(e⁵⁶⁷ + e¹³⁵ − e¹⁴⁶ − e²³⁶ − e²⁴⁵)`,
/// `A = ⅔λ(a)t + 1`.
pub fn lauret_solution<R: Real>(a: f64, t: f64) -> Result<KForm<R>> {
    if a < 0.25 || a == 1.0 {
        return Err(Error::Parameter(format!("the closed-form solution needs a ≥ 1/4, a ≠ 1 (got {a})")));
    }
    let (lo, hi) = lauret_interval(a);
    if !(t > lo && t < hi) {
        return Err(Error::Parameter(format!("t = {t} outside the existence interval ({lo}, {hi})")));
    }
    let big_a = 2.0 / 3.0 * lauret_lambda(a) * t + 1.0;
    let (q1, q2, q3) = lauret_exponents(a);
    let c = |v: f64| <R as Scalar>::from_f64(v).expect("finite");
    let (c1, c2, c3) = (c(big_a.powf(q1)), c(big_a.powf(q2)), c(big_a.powf(q3)));
    KForm::from_terms(
        7,
        3,
        [
            (&[1, 2, 7][..], c1),
            (&[3, 4, 7][..], c2),
            (&[5, 6, 7][..], c3),
            (&[1, 3, 5][..], c3),
            (&[1, 4, 6][..], -c3),
            (&[2, 3, 6][..], -c3),
            (&[2, 4, 5][..], -c3),
        ],
    )
}

/// `(C₁, C₂, C₃) = (C₂^{−1/3}, (1 − (8/3)b²t)^{−9/8}, 1)`.
pub fn gabk_solution(b: f64, t: f64) -> Result<(f64, f64, f64)> {
    let base = 1.0 - 8.0 / 3.0 * b * b * t;
    if base <= 0.0 {
        return Err(Error::Parameter(format!("t = {t} is past T = 3/(8b²) = {}", 3.0 / (8.0 * b * b))));
    }
    let c2 = base.powf(-9.0 / 8.0);
    Ok((c2.powf(-1.0 / 3.0), c2, 1.0))
}

/// `C₁e¹²⁷ + C₂e³⁴⁷ + C₃e⁵⁶⁷ + C₂(e¹³⁵ − e¹⁴⁶ − e²³⁶ − e²⁴⁵)` at time `t`.
pub fn gabk_phi<R: Real>(b: f64, t: f64) -> Result<KForm<R>> {
    let (c1, c2, c3) = gabk_solution(b, t)?;
    let c = |v: f64| <R as Scalar>::from_f64(v).expect("finite");
    Ok(ansatz_form(&[c(c1), c(c2), c(c3), c(c2), c(c2), c(c2), c(c2)]))
}

const ANSATZ: [([usize; 3], i64); 7] =
    [([1, 2, 7], 1), ([3, 4, 7], 1), ([5, 6, 7], 1), ([1, 3, 5], 1), ([1, 4, 6], -1), ([2, 3, 6], -1), ([2, 4, 5], -1)];

fn ansatz_form<S: Scalar>(c: &[S; 7]) -> KForm<S> {
    let mut f = KForm::zero(7, 3);
    for ((idx, sign), ci) in ANSATZ.iter().zip(c) {
        f.add_term(idx, ci.clone() * S::int(*sign)).expect("valid monomial");
    }
    f
}

/// Coefficients of `C₁e¹²⁷ + C₂e³⁴⁷ + C₃e⁵⁶⁷ + C₄e¹³⁵ − C₅e¹⁴⁶ − C₆e²³⁶ − C₇e²⁴⁵`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzCoefficients<S> {
    pub c: [S; 7],
    /// `C₄ = C₅ = C₆ = C₇ = C₂`, the closedness condition on `𝔤_{a,b,k}`.
    pub closed_shape: bool,
}

/// `None` unless `φ` is supported on the seven ansatz monomials.
pub fn ansatz_coefficients<S: Scalar>(phi: &KForm<S>) -> Option<AnsatzCoefficients<S>> {
    if phi.n() != 7 || phi.degree() != 3 {
        return None;
    }
    let c: [S; 7] = std::array::from_fn(|i| phi.coeff(&ANSATZ[i].0) * S::int(ANSATZ[i].1));
    let rest = phi - &ansatz_form(&c);
    if !rest.is_negligible(&phi.max_abs()) {
        return None;
    }
    let scale = S::max_abs(&c);
    let closed_shape = c[3..].iter().all(|x| (x.clone() - c[1].clone()).is_negligible(&scale));
    Some(AnsatzCoefficients { c, closed_shape })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonStatus {
    Feasible,
    Infeasible,
    /// Residual between the feasibility and infeasibility thresholds.
    Ambiguous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonCharacter {
    Shrinking,
    Steady,
    Expanding,
}

/// Least-squares solution of `dτ = λφ + B*φ` with `B ∈ Der(𝔤)`.
#[derive(Clone, Debug)]
pub struct SolitonSolution<S> {
    pub lambda: S,
    pub b: Endo<S>,
    /// `|dτ − λφ − B*φ|_g / |dτ|_g` (absolute when `dτ = 0`).
    pub residual: f64,
    pub status: SolitonStatus,
    pub character: SolitonCharacter,
    /// `false` when some derivation rescales `φ`, so `λ` is not determined.
    pub lambda_unique: bool,
    pub der_dim: usize,
}

impl<S: Scalar> SolitonSolution<S> {
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> SolitonSolution<T> {
        SolitonSolution {
            lambda: f(&self.lambda),
            b: self.b.map_scalar(f),
            residual: self.residual,
            status: self.status,
            character: self.character,
            lambda_unique: self.lambda_unique,
            der_dim: self.der_dim,
        }
    }
}

pub const SOLITON_FEASIBLE: f64 = 1e-8;
pub const SOLITON_INFEASIBLE: f64 = 1e-6;

/// Solves `dτ = λφ + B*φ` over `(λ, B)`, minimum-norm when not unique.
pub fn algebraic_soliton_solve<S: Scalar>(g: &G2Structure<S>) -> Result<SolitonSolution<S>> {
    let dtau = g.torsion_form()?.dtau;
    let der = g.algebra().derivation_space();
    let phi = g.phi();
    let mut cols = vec![phi.coeffs().to_vec()];
    for d in &der.basis {
        cols.push(d.act(phi)?.into_coeffs());
    }
    let ls = least_squares(&Matrix::from_columns(&cols), dtau.coeffs());
    let lambda = ls.x[0].clone();
    let b = Endo::combination(7, &ls.x[1..], &der.basis);
    let fit = phi.scale(&lambda) + b.act(phi)?;
    let r = dtau.clone() - fit;
    let r_norm = g.inner(&r, &r).as_f64().max(0.0).sqrt();
    let dtau_norm = g.inner(&dtau, &dtau).as_f64().max(0.0).sqrt();
    let residual = if dtau_norm > 0.0 { r_norm / dtau_norm } else { r_norm };
    let status = if residual < SOLITON_FEASIBLE {
        SolitonStatus::Feasible
    } else if residual >= SOLITON_INFEASIBLE {
        SolitonStatus::Infeasible
    } else {
        SolitonStatus::Ambiguous
    };
    let character = if lambda.is_negligible(&S::one()) {
        SolitonCharacter::Steady
    } else if lambda.is_negative() {
        SolitonCharacter::Shrinking
    } else {
        SolitonCharacter::Expanding
    };
    let lambda_unique = ls.null_space.iter().all(|v| v[0].is_negligible(&S::one()));
    Ok(SolitonSolution { lambda, b, residual, status, character, lambda_unique, der_dim: der.dim() })
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfSimilarReport {
    /// Largest relative `|Δφ(t) − λ(t)φ(t) − B(t)*φ(t)|` over the samples.
    pub max_residual: f64,
    /// Largest relative deviation of `vol(t)/vol(0)` from
    /// `A^{7/2} exp(s(t) tr B)`, `A = 1 + ⅔λt`, `s(t) = ∫₀ᵗ A⁻¹`.
    pub max_volume_deviation: f64,
    pub passed: bool,
}

/// Checks a trajectory against the self-similar evolution of a soliton:
/// `λ(t) = λ/A`, `B(t) = B/A`.
pub fn self_similar_check<R: Real>(traj: &FlowTrajectory<R>, sol: &SolitonSolution<R>, algebra: &LieAlgebra<R>) -> Result<SelfSimilarReport> {
    if sol.b.n() != algebra.n() || traj.samples.first().is_none_or(|s| s.phi.n() != algebra.n()) {
        return Err(Error::dim("soliton and trajectory live on different algebras"));
    }
    let lambda = sol.lambda.as_f64();
    let tr_b = sol.b.trace().as_f64();
    let vol0 = traj.samples[0].vol;
    let mut max_residual = 0.0f64;
    let mut max_volume_deviation = 0.0f64;
    for s in &traj.samples {
        let a = 1.0 + 2.0 / 3.0 * lambda * s.t;
        let lap = laplacian(algebra, &s.phi)?;
        let inv_a = <R as Scalar>::from_f64(1.0 / a).expect("finite");
        let lt = sol.lambda * inv_a;
        let fit = s.phi.scale(&lt) + sol.b.scale(&inv_a).act(&s.phi)?;
        let r = (lap.laplacian.clone() - fit).max_abs().as_f64();
        let scale = lap.laplacian.max_abs().as_f64().max(s.phi.max_abs().as_f64());
        max_residual = max_residual.max(r / scale.max(1e-300));
        let s_int = if lambda.abs() < 1e-14 { s.t } else { 1.5 / lambda * a.ln() };
        let predicted = a.powf(3.5) * (s_int * tr_b).exp();
        max_volume_deviation = max_volume_deviation.max((s.vol / vol0 / predicted - 1.0).abs());
    }
    let passed = sol.status == SolitonStatus::Feasible && max_residual < 1e-6 && max_volume_deviation < 1e-6;
    Ok(SelfSimilarReport { max_residual, max_volume_deviation, passed })
}
