use std::time::Instant;

use g2lab::catalog::{get, Params};
use g2lab::flow::{
    algebraic_soliton_solve, ansatz_coefficients, gabk_phi, gabk_solution, laplacian, laplacian_flow, lauret_interval,
    lauret_lambda, lauret_solution, self_similar_check, FlowConfig, FlowStatus, SolitonCharacter, SolitonStatus,
};
use g2lab::{q, G2Structure, Rational, Scalar};

fn p(v: &[(&str, Rational)]) -> Params {
    v.iter().map(|(k, x)| (k.to_string(), x.clone())).collect()
}

fn structure(id: &str, params: Params) -> G2Structure<Rational> {
    let e = get(id, &params).unwrap();
    G2Structure::new(e.algebra, e.phi.unwrap()).unwrap()
}

fn g_a(a: Rational) -> G2Structure<Rational> {
    structure("g_a", p(&[("a", a)]))
}

fn g_abk(a: i64, b: i64, k: i64) -> G2Structure<Rational> {
    structure("g_abk", p(&[("a", q(a, 1)), ("b", q(b, 1)), ("k", q(k, 1))]))
}

#[test]
fn soliton_constants_on_g_a() {
    for a in [q(1, 4), q(1, 2), q(1, 1), q(2, 1)] {
        let start = Instant::now();
        let s = algebraic_soliton_solve(&g_a(a.clone())).unwrap();
        let af = a.as_f64();
        let expected = 8.0 * af * af - 4.0 * af - 4.0;
        assert!((s.lambda.as_f64() - expected).abs() < 1e-8, "a = {a}: λ = {}", s.lambda);
        assert_eq!(s.residual, 0.0);
        assert_eq!(s.status, SolitonStatus::Feasible);
        assert!(s.lambda_unique);
        assert!(start.elapsed().as_secs_f64() < 1.0);
        let character = match expected {
            x if x < 0.0 => SolitonCharacter::Shrinking,
            x if x > 0.0 => SolitonCharacter::Expanding,
            _ => SolitonCharacter::Steady,
        };
        assert_eq!(s.character, character);
    }
}

#[test]
fn gabk_admits_no_soliton() {
    for (a, b, k) in [(1, 1, 0), (1, 2, 1), (2, 1, 3)] {
        let s = algebraic_soliton_solve(&g_abk(a, b, k)).unwrap();
        assert_eq!(s.status, SolitonStatus::Infeasible);
        assert!(s.residual > 1e-3, "({a},{b},{k}): {}", s.residual);
        assert_eq!(s.der_dim, 8);
    }
}

#[test]
fn soliton_solver_float_backend_agrees() {
    let s = algebraic_soliton_solve(&g_a(q(1, 2)).to_f64()).unwrap();
    assert!((s.lambda + 4.0).abs() < 1e-10);
    assert!(s.residual < 1e-10);
}

#[test]
fn lauret_flow_matches_closed_form() {
    let start = Instant::now();
    let g = g_a(q(1, 2)).to_f64();
    let cfg = FlowConfig { t_end: 0.3, ..Default::default() };
    let traj = laplacian_flow(&g, &cfg).unwrap();
    assert_eq!(traj.status, FlowStatus::Completed);
    assert_eq!(traj.last().t, 0.3);
    let dev = traj.max_deviation(|t| lauret_solution(0.5, t)).unwrap();
    assert!(dev < 1e-6, "deviation {dev:e}");
    assert!(traj.max_closed_residual < 1e-10);
    assert!(start.elapsed().as_secs_f64() < 10.0);

    // The run is the self-similar evolution of the soliton.
    let sol = algebraic_soliton_solve(&g).unwrap();
    let report = self_similar_check(&traj, &sol, g.algebra()).unwrap();
    assert!(report.passed, "{report:?}");
}

#[test]
fn lauret_flow_for_a_greater_than_one() {
    let g = g_a(q(2, 1)).to_f64();
    let traj = laplacian_flow(&g, &FlowConfig { t_end: 0.5, ..Default::default() }).unwrap();
    let dev = traj.max_deviation(|t| lauret_solution(2.0, t)).unwrap();
    assert!(dev < 1e-6, "deviation {dev:e}");
}

#[test]
fn gabk_flow_matches_closed_form() {
    let start = Instant::now();
    let g = g_abk(1, 1, 0).to_f64();
    let traj = laplacian_flow(&g, &FlowConfig { t_end: 0.3, ..Default::default() }).unwrap();
    assert_eq!(traj.status, FlowStatus::Completed);
    for s in &traj.samples {
        let c = ansatz_coefficients(&s.phi).expect("flow stays in the ansatz").c;
        let (c1, c2, c3) = gabk_solution(1.0, s.t).unwrap();
        assert!((c[0] - c1).abs() < 1e-6 && (c[1] - c2).abs() < 1e-6 && (c[2] - c3).abs() < 1e-6, "t = {}", s.t);
        assert!((c[2] - 1.0).abs() < 1e-6);
        assert!((c[0] - c[1].powf(-1.0 / 3.0)).abs() < 1e-6);
    }
    assert!(traj.max_deviation(|t| gabk_phi(1.0, t)).unwrap() < 1e-6);
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn torsion_norm_along_gabk_flow() {
    // |τ|² grows monotonically towards the singular time.
    let g = g_abk(1, 1, 0).to_f64();
    let traj = laplacian_flow(&g, &FlowConfig { t_end: 0.2, ..Default::default() }).unwrap();
    assert!((traj.samples[0].tau_norm_sq - 14.0).abs() < 1e-10);
    assert!((traj.samples[0].scal + 7.0).abs() < 1e-10);
    assert!(traj.samples.windows(2).all(|w| w[1].tau_norm_sq > w[0].tau_norm_sq));
}

#[test]
fn flow_detects_finite_time_singularity() {
    let g = g_a(q(1, 2)).to_f64();
    let (_, t_max) = lauret_interval(0.5);
    let cfg = FlowConfig { t_end: 0.5, tol: 1e-6, max_tau_norm_sq: 1e4, ..Default::default() };
    let traj = laplacian_flow(&g, &cfg).unwrap();
    assert_eq!(traj.status, FlowStatus::BlowupApproach);
    assert!(traj.last().t < t_max && traj.last().t > 0.3);
}

#[test]
fn flat_flow_is_stationary() {
    let g = structure("abelian7", Params::new()).to_f64();
    let traj = laplacian_flow(&g, &FlowConfig { t_end: 1.0, ..Default::default() }).unwrap();
    assert_eq!(traj.max_deviation(|_| Ok(g.phi().clone())).unwrap(), 0.0);
}

#[test]
fn flow_rejects_non_closed_forms() {
    let n2 = get("n2", &Params::new()).unwrap();
    let (omega, psi) = n2.su3.unwrap();
    let s = g2lab::Su3Structure::reconstruct(n2.algebra, omega, psi).unwrap();
    let out = s.g2_from_extension(&g2lab::catalog::d_a(&q(1, 1)).scale(&q(2, 1))).unwrap();
    let g = out.g2.unwrap().to_f64();
    assert!(matches!(laplacian_flow(&g, &FlowConfig::default()), Err(g2lab::Error::NotClosed(_))));
}

#[test]
fn laplacian_of_lauret_initial_data() {
    let g = g_a(q(1, 4)).to_f64();
    let lap = laplacian(g.algebra(), g.phi()).unwrap();
    let exact = g_a(q(1, 4)).torsion_form().unwrap();
    assert!((&lap.laplacian - &exact.dtau.to_f64()).max_abs() < 1e-12);
    assert!((lap.tau_norm_sq - exact.tau_norm_sq.as_f64()).abs() < 1e-12);
    assert_eq!(lauret_lambda(0.25), -4.5);
}

#[test]
fn reference_solution_domains() {
    assert!(lauret_solution::<f64>(0.2, 0.0).is_err());
    assert!(lauret_solution::<f64>(1.0, 0.0).is_err());
    assert!(lauret_solution::<f64>(0.5, 0.4).is_err());
    assert!(gabk_solution(1.0, 0.5).is_err());
    let (c1, c2, c3) = gabk_solution(2.0, 0.0).unwrap();
    assert_eq!((c1, c2, c3), (1.0, 1.0, 1.0));
}
