//! One function per subcommand, each mapping an [`Instance`] to a JSON payload.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use g2lab::exterior::{binomial, monomial_label};
use g2lab::flow::{
    algebraic_soliton_solve, gabk_phi, laplacian_flow, lauret_solution, FlowConfig, FlowTrajectory, SolitonStatus,
};
use g2lab::g2::{search_closed_positive, SearchOptions};
use g2lab::json::{form_to_json, scalar_to_json};
use g2lab::linalg::Matrix;
use g2lab::su3::{Dw2Proportionality, Su3TorsionClass};
use g2lab::{Endo, Error, G2Structure, KForm, Result, Scalar, Su3Structure};
use serde_json::{json, Value};

use crate::input::{read_form, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Ambiguous,
}

pub type Outcome = Result<(Status, Value)>;

fn ok(v: Value) -> Outcome {
    Ok((Status::Ok, v))
}

fn matrix_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(scalar_to_json).collect())).collect())
}

fn endo_json<S: Scalar>(e: &Endo<S>) -> Value {
    matrix_json(e.matrix())
}

pub fn analyze<S: Scalar>(inst: &Instance<S>) -> Outcome {
    let l = &inst.algebra;
    let flags = l.structure_flags();
    let class = if flags.nilpotent {
        "nilpotent"
    } else if flags.solvable {
        "solvable"
    } else {
        "non-solvable"
    };
    ok(json!({
        "algebra": inst.id,
        "n": l.n(),
        "jacobi_residual": scalar_to_json(&l.check_jacobi()),
        "unimodular": flags.unimodular,
        "solvability_class": class,
        "structure": flags,
        "betti": l.betti_numbers(),
        "der_dim": l.derivation_space().dim(),
    }))
}

/// `--phi FILE` wins over the attached form; `--default` insists on the latter.
pub fn pick_phi<S: Scalar>(inst: &Instance<S>, file: Option<&Path>, default: bool) -> Result<KForm<S>> {
    if let Some(path) = file {
        return read_form(path);
    }
    inst.phi.clone().ok_or_else(|| {
        let how = if default { "has no default 3-form" } else { "has no attached 3-form; pass --phi FILE" };
        Error::Parameter(format!("'{}' {how}", inst.id))
    })
}

pub fn g2<S: Scalar>(inst: &Instance<S>, phi: KForm<S>, erp_diagnostics: bool) -> Outcome {
    let g = G2Structure::new(inst.algebra.clone(), phi)?;
    if !g.is_closed() {
        return ok(json!({
            "closed": false,
            "d_phi": form_to_json(&g.d_phi()),
            "metric": matrix_json(g.metric().g()),
        }));
    }
    let t = g.torsion_form()?;
    let c = g.curvature()?;
    let mut out = json!({
        "closed": true,
        "parallel": t.tau.is_zero(),
        "tau": form_to_json(&t.tau),
        "tau_norm_sq": t.tau_norm_sq.as_f64(),
        "scal": c.scal.as_f64(),
        "ric_eigenvalues": c.ric_eigenvalues,
        "erp_residual": g.erp_residual()?,
        "metric": matrix_json(g.metric().g()),
    });
    if erp_diagnostics {
        out["erp_diagnostics"] = match g.erp_diagnostics() {
            Ok(r) => json!({"passed": r.passed(), "report": r}),
            Err(Error::NotErp(reason)) => json!({"passed": false, "reason": reason}),
            Err(e) => return Err(e),
        };
    }
    ok(out)
}

pub fn su3<S: Scalar>(inst: &Instance<S>, files: Option<(&Path, &Path)>, default: bool) -> Outcome {
    let (omega, psi) = match files {
        Some((o, p)) => (read_form(o)?, read_form(p)?),
        None => inst.su3.clone().ok_or_else(|| {
            let how = if default { "has no default SU(3) pair" } else { "has no attached SU(3) pair; pass --omega and --psi" };
            Error::Parameter(format!("'{}' {how}", inst.id))
        })?,
    };
    let s = Su3Structure::reconstruct(inst.algebra.clone(), omega, psi)?;
    let class = s.torsion_class();
    let mut out = json!({
        "psi_hat": form_to_json(s.psi_hat()),
        "j": endo_json(s.j()),
        "metric": matrix_json(s.metric().g()),
        "psi_hat_defect": s.psi_hat_defect().as_f64(),
        "torsion_class": class,
    });
    let c = match class {
        Su3TorsionClass::Generic => return ok(out),
        _ => s.coupled_constant().expect("coupled or half-flat"),
    };
    out["c"] = scalar_to_json(&c);
    let w2 = s.w2(&c)?.w2;
    out["w2"] = form_to_json(&w2);
    out["dw2"] = match s.dw2_proportionality(&w2)? {
        Dw2Proportionality::Proportional { mu, w2_norm_sq } => json!({
            "proportional": true,
            "mu": scalar_to_json(&mu),
            "w2_norm_sq": scalar_to_json(&w2_norm_sq),
        }),
        Dw2Proportionality::NotProportional { residual } => json!({"proportional": false, "residual": residual}),
    };
    if let Some(fam) = s.compatible_derivations(&c) {
        out["compatible_derivations"] = json!({
            "affine_dim": fam.affine_dim(),
            "particular": endo_json(&fam.particular),
            "directions": fam.directions.iter().map(endo_json).collect::<Vec<_>>(),
        });
    }
    ok(out)
}

pub fn soliton<S: Scalar>(inst: &Instance<S>, phi: KForm<S>) -> Outcome {
    let g = G2Structure::new(inst.algebra.clone(), phi)?;
    let s = algebraic_soliton_solve(&g)?;
    let status = if s.status == SolitonStatus::Ambiguous { Status::Ambiguous } else { Status::Ok };
    Ok((
        status,
        json!({
            "status": s.status,
            "lambda": scalar_to_json(&s.lambda),
            "lambda_value": s.lambda.as_f64(),
            "lambda_unique": s.lambda_unique,
            "character": s.character,
            "b": endo_json(&s.b),
            "residual": s.residual,
            "der_dim": s.der_dim,
        }),
    ))
}

pub fn search_closed<S: Scalar>(inst: &Instance<S>, opts: &SearchOptions) -> Outcome {
    let r = search_closed_positive(&inst.algebra, opts, None);
    ok(json!({
        "found": r.phi.is_some(),
        "phi": r.phi.as_ref().map(form_to_json),
        "attempts_used": r.attempts_used,
        "refined": r.refined,
        "closed_dim": r.closed_dim,
        "options": opts,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Compare {
    Lauret,
    Gabk,
}

fn param_f64(inst: &Instance<f64>, name: &str) -> Result<f64> {
    inst.params.get(name).map(Scalar::as_f64).ok_or_else(|| Error::Parameter(format!("missing parameter '{name}'")))
}

fn max_deviation(inst: &Instance<f64>, traj: &FlowTrajectory<f64>, compare: Compare) -> Result<Value> {
    let (expected, name, p) = match compare {
        Compare::Lauret => ("g_a", "a", "lauret"),
        Compare::Gabk => ("g_abk", "b", "gabk"),
    };
    if inst.id != expected {
        return Err(Error::Parameter(format!("--compare {p} needs the {expected} family, got '{}'", inst.id)));
    }
    let x = param_f64(inst, name)?;
    let dev = match compare {
        Compare::Lauret => traj.max_deviation(|t| lauret_solution(x, t))?,
        Compare::Gabk => traj.max_deviation(|t| gabk_phi(x, t))?,
    };
    Ok(json!({"reference": p, "max_deviation": dev}))
}

/// `x.csv` and its companion `x.torsion.csv`; sweeps add `-<index>`.
pub fn csv_paths(base: &Path, index: Option<usize>) -> (PathBuf, PathBuf) {
    let main = match index {
        None => base.to_path_buf(),
        Some(i) => {
            let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let name = match base.extension() {
                Some(ext) => format!("{stem}-{i}.{}", ext.to_string_lossy()),
                None => format!("{stem}-{i}"),
            };
            base.with_file_name(name)
        }
    };
    let torsion = main.with_extension("torsion.csv");
    (main, torsion)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &FlowTrajectory<f64>) -> (String, String) {
    let mut main = String::from("t");
    for pos in 0..binomial(7, 3) {
        write!(main, ",{}", monomial_label(7, 3, pos)).unwrap();
    }
    main.push('\n');
    let mut torsion = String::from("t,tau_norm_sq,scal,vol\n");
    for s in &traj.samples {
        main.push_str(&num(s.t));
        for c in s.phi.coeffs() {
            main.push(',');
            main.push_str(&num(*c));
        }
        main.push('\n');
        writeln!(torsion, "{},{},{},{}", num(s.t), num(s.tau_norm_sq), num(s.scal), num(s.vol)).unwrap();
    }
    (main, torsion)
}

pub fn flow(
    inst: &Instance<f64>,
    phi: KForm<f64>,
    cfg: &FlowConfig,
    compare: Option<Compare>,
    out: Option<(PathBuf, PathBuf)>,
) -> Outcome {
    let g = G2Structure::new(inst.algebra.clone(), phi)?;
    let traj = laplacian_flow(&g, cfg)?;
    let last = traj.last();
    let mut v = json!({
        "backend": "float",
        "config": cfg,
        "status": traj.status,
        "samples": traj.samples.len(),
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
        "max_closed_residual": traj.max_closed_residual,
        "t_final": last.t,
        "phi_final": form_to_json(&last.phi),
        "tau_norm_sq_final": last.tau_norm_sq,
        "scal_final": last.scal,
    });
    if let Some(c) = compare {
        v["compare"] = max_deviation(inst, &traj, c)?;
    }
    if let Some((main, torsion)) = out {
        let (a, b) = trajectory_csv(&traj);
        for (path, text) in [(&main, a), (&torsion, b)] {
            std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        }
        v["csv"] = json!({"trajectory": main.display().to_string(), "torsion": torsion.display().to_string()});
    }
    ok(v)
}
