use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{is_positive, phi_bilinear};
use crate::exterior::KForm;
use crate::liealg::LieAlgebra;
use crate::scalar::Scalar;

/// Integer coefficients are drawn from `-RANGE..=RANGE`.
const RANGE: i64 = 3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchOptions {
    /// Number of random starting points.
    pub attempts: usize,
    pub seed: u64,
    /// Local improvement steps tried from each start that is not already
    /// positive; 0 gives plain sampling.
    pub refine_steps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { attempts: 10_000, seed: 0, refine_steps: 100 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome<S> {
    #[serde(skip)]
    pub phi: Option<KForm<S>>,
    pub attempts_used: usize,
    /// Whether the returned form came out of the refinement stage.
    pub refined: bool,
    pub closed_dim: usize,
}

/// Looks for a closed positive 3-form in `ker(d: Λ³ → Λ⁴)`.
///
/// Each attempt draws a random integer combination of a basis of the
/// kernel and tests it (and its negative) for positivity. If that fails
/// and `refine_steps > 0`, a random local search on
/// `λ_min(±b_φ) / |φ|³` follows; a positive float point is then rounded
/// to an integer combination and re-checked exactly. A `hint` that is
/// already closed and positive is returned without sampling.
/// Deterministic for given options.
pub fn search_closed_positive<S: Scalar>(
    algebra: &LieAlgebra<S>,
    opts: &SearchOptions,
    hint: Option<&KForm<S>>,
) -> SearchOutcome<S> {
    let n = algebra.n();
    let kernel: Vec<KForm<S>> = if n == 7 {
        algebra
            .differential_matrix(3)
            .null_space()
            .into_iter()
            .map(|v| KForm::from_coeffs(7, 3, v).expect("3-form"))
            .collect()
    } else {
        Vec::new()
    };
    let closed_dim = kernel.len();
    let none = |attempts_used| SearchOutcome { phi: None, attempts_used, refined: false, closed_dim };
    if let Some(h) = hint {
        if h.n() == n && n == 7 && h.degree() == 3 && algebra.d(h).is_negligible(&h.max_abs()) && is_positive(h) {
            return SearchOutcome { phi: Some(h.clone()), attempts_used: 0, refined: false, closed_dim };
        }
    }
    if kernel.is_empty() {
        return none(0);
    }
    let kernel_f: Vec<KForm<f64>> = kernel.iter().map(KForm::to_f64).collect();
    let combine = |x: &[f64]| {
        let mut f = KForm::<f64>::zero(7, 3);
        for (c, b) in x.iter().zip(&kernel_f) {
            if *c != 0.0 {
                f += &b.scale(c);
            }
        }
        f
    };
    let exact = |coeffs: &[i64]| {
        let mut phi = KForm::<S>::zero(7, 3);
        for (c, b) in coeffs.iter().zip(&kernel) {
            if *c != 0 {
                phi += &b.scale(&S::int(*c));
            }
        }
        phi
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for attempt in 1..=opts.attempts {
        let start: Vec<i64> = (0..kernel.len()).map(|_| rng.gen_range(-RANGE..=RANGE)).collect();
        let mut x: Vec<f64> = start.iter().map(|&c| c as f64).collect();
        let mut s = score(&combine(&x));
        if s > 0.0 {
            if let Some(phi) = signed_positive(exact(&start)) {
                return SearchOutcome { phi: Some(phi), attempts_used: attempt, refined: false, closed_dim };
            }
        }
        let mut sigma = 0.5;
        for _ in 0..opts.refine_steps {
            let y: Vec<f64> = x.iter().map(|v| v + sigma * rng.gen_range(-1.0..1.0)).collect();
            let sy = score(&combine(&y));
            if sy > s {
                x = y;
                s = sy;
                sigma *= 1.2;
            } else {
                sigma *= 0.97;
            }
            if s > 0.0 {
                let rounded = rationalize(&x, |c| score(&combine(c)) > 0.0);
                if let Some(phi) = rounded.and_then(|c| signed_positive(exact(&c))) {
                    return SearchOutcome { phi: Some(phi), attempts_used: attempt, refined: true, closed_dim };
                }
            }
        }
    }
    none(opts.attempts)
}

/// `φ` or `−φ`, whichever is positive.
fn signed_positive<S: Scalar>(phi: KForm<S>) -> Option<KForm<S>> {
    if is_positive(&phi) {
        return Some(phi);
    }
    let neg = -phi;
    is_positive(&neg).then_some(neg)
}

/// Scale-invariant positivity margin: `max(λ_min(b), λ_min(−b)) / |φ|³`.
fn score(phi: &KForm<f64>) -> f64 {
    let norm = phi.coeff_norm_sq().sqrt();
    if norm == 0.0 {
        return f64::NEG_INFINITY;
    }
    let b = phi_bilinear(phi).expect("3-form on ℝ⁷");
    let ev = SymmetricEigen::new(DMatrix::from_row_slice(7, 7, b.entries())).eigenvalues;
    ev.min().max(-ev.max()) / norm.powi(3)
}

/// The coarsest rounding of `x` (rescaled to max entry `2ᵖ`) whose float
/// image still passes `positive`.
fn rationalize(x: &[f64], positive: impl Fn(&[f64]) -> bool) -> Option<Vec<i64>> {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return None;
    }
    (2..=24).find_map(|p| {
        let scale = f64::from(1u32 << p) / m;
        let c: Vec<f64> = x.iter().map(|v| (v * scale).round()).collect();
        positive(&c).then(|| c.iter().map(|&v| v as i64).collect())
    })
}
