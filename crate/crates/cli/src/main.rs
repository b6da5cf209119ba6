mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use g2lab::catalog::{self, Params};
use g2lab::flow::FlowConfig;
use g2lab::g2::SearchOptions;
use g2lab::json::{algebra_to_json, form_to_json};
use g2lab::{Error, Rational, Scalar};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use commands::{Compare, Outcome, Status};
use input::{params_json, parse_params, resolve, Instance};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "g2lab", version, about = "Closed G2- and SU(3)-structures on Lie algebras")]
struct Cli {
    /// Compact (`json`) or indented (`pretty`) JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Scalar backend; `flow` always runs in floating point.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Rational)]
    backend: Backend,
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Backend {
    Rational,
    Float,
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    /// Catalog id, user catalog id or path to an algebra JSON file.
    algebra: String,
    /// `NAME=p/q`; `NAME=v1,v2,...` sweeps over the values.
    #[arg(long = "param", num_args = 1.., value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args, Debug)]
struct PhiArgs {
    /// 3-form JSON file.
    #[arg(long, conflicts_with = "default")]
    phi: Option<PathBuf>,
    /// Use the 3-form attached to the catalog entry.
    #[arg(long)]
    default: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jacobi residual, structure flags, Betti numbers and derivations.
    Analyze(AlgebraArgs),
    /// Torsion and curvature of a G2-structure.
    G2 {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long)]
        erp_diagnostics: bool,
    },
    /// Torsion class and coupled data of an SU(3)-structure.
    Su3 {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, requires = "psi", conflicts_with = "default")]
        omega: Option<PathBuf>,
        #[arg(long, requires = "omega", conflicts_with = "default")]
        psi: Option<PathBuf>,
        #[arg(long)]
        default: bool,
    },
    /// Integrates the Laplacian flow of a closed G2-structure.
    Flow {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// Initial step.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Local error allowance per unit time.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Stop once |tau|^2 exceeds this.
        #[arg(long, default_value_t = 1e12)]
        max_tau_norm_sq: f64,
        /// Trajectory CSV; torsion series go to `<stem>.torsion.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        compare: Option<Compare>,
    },
    /// Solves the algebraic Laplacian soliton equation.
    Soliton {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        phi: PhiArgs,
    },
    /// Random search for a closed positive 3-form.
    SearchClosed {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 10_000)]
        attempts: usize,
        #[arg(long, default_value_t = 100)]
        refine_steps: usize,
    },
    /// Built-in and user catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    /// Ids, parameter ranges and descriptions.
    List,
    /// An entry in the algebra JSON format, with its attached forms.
    Export(AlgebraArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::G2 { .. } => "g2",
            Command::Su3 { .. } => "su3",
            Command::Flow { .. } => "flow",
            Command::Soliton { .. } => "soliton",
            Command::SearchClosed { .. } => "search-closed",
            Command::Catalog { command: CatalogCommand::List } => "catalog list",
            Command::Catalog { command: CatalogCommand::Export(_) } => "catalog export",
        }
    }

    fn algebra(&self) -> Option<&AlgebraArgs> {
        match self {
            Command::Analyze(a) | Command::Catalog { command: CatalogCommand::Export(a) } => Some(a),
            Command::G2 { algebra, .. }
            | Command::Su3 { algebra, .. }
            | Command::Flow { algebra, .. }
            | Command::Soliton { algebra, .. }
            | Command::SearchClosed { algebra, .. } => Some(algebra),
            Command::Catalog { command: CatalogCommand::List } => None,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Parameter(_) | Error::UnknownEntry(_) | Error::Degree(_) => 2,
        Error::InvalidAlgebra(_) | Error::AmbientDimension(_) => 3,
        Error::NotPositive(_)
        | Error::MetricNotPositive
        | Error::OmegaDegenerate
        | Error::PsiNotStable
        | Error::IncompatiblePair(_)
        | Error::NotClosed(_)
        | Error::NotErp(_)
        | Error::Dimension(_)
        | Error::NotDerivation(_) => 4,
        Error::Numerical(_) | Error::Inconsistent(_) | Error::InconsistentTorsion(_) | Error::InexactRoot(_) => 5,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(['(', ' ']).next().unwrap_or_default().to_string()
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({"kind": error_kind(e), "message": e.to_string(), "exit_code": exit_code(e)});
    if matches!(e, Error::InexactRoot(_)) {
        v["hint"] = json!("rerun with --backend float");
    }
    v
}

fn sha256_hex(v: &Value) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(v).expect("plain data")))
}

/// Per-instance result, before it is folded into the report.
struct Item {
    params: Params,
    digest: Option<String>,
    outcome: Outcome,
}

impl Item {
    fn status(&self) -> &'static str {
        match &self.outcome {
            Ok((Status::Ok, _)) => "ok",
            Ok((Status::Ambiguous, _)) => "ambiguous",
            Err(_) => "error",
        }
    }

    fn exit_code(&self) -> u8 {
        match &self.outcome {
            Ok((Status::Ok, _)) => 0,
            Ok((Status::Ambiguous, _)) => 5,
            Err(e) => exit_code(e),
        }
    }

    fn body(&self) -> (&'static str, Value) {
        match &self.outcome {
            Ok((_, v)) => ("results", v.clone()),
            Err(e) => ("error", error_json(e)),
        }
    }
}

/// Everything that feeds a run besides the instance: file contents and options.
fn command_inputs(cmd: &Command, cli: &Cli) -> Result<Value, Error> {
    let read = |p: &PathBuf| {
        std::fs::read_to_string(p)
            .map(|s| Value::String(format!("{:x}", Sha256::digest(s.as_bytes()))))
            .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
    };
    let phi = |p: &PhiArgs| -> Result<Value, Error> {
        Ok(json!({"phi": p.phi.as_ref().map(read).transpose()?, "default": p.default}))
    };
    Ok(match cmd {
        Command::Analyze(_) | Command::Catalog { .. } => json!({}),
        Command::G2 { phi: p, erp_diagnostics, .. } => json!({"phi": phi(p)?, "erp_diagnostics": erp_diagnostics}),
        Command::Su3 { omega, psi, default, .. } => json!({
            "omega": omega.as_ref().map(read).transpose()?,
            "psi": psi.as_ref().map(read).transpose()?,
            "default": default,
        }),
        Command::Flow { phi: p, t_end, dt, tol, max_tau_norm_sq, compare, .. } => json!({
            "phi": phi(p)?,
            "t_end": t_end, "dt": dt, "tol": tol, "max_tau_norm_sq": max_tau_norm_sq,
            "compare": compare.map(|c| format!("{c:?}").to_lowercase()),
        }),
        Command::Soliton { phi: p, .. } => json!({"phi": phi(p)?}),
        Command::SearchClosed { attempts, refine_steps, .. } => {
            json!({"attempts": attempts, "refine_steps": refine_steps, "seed": cli.seed})
        }
    })
}

fn run_one<S: Scalar>(cmd: &Command, cli: &Cli, inst: &Instance<S>) -> Outcome {
    match cmd {
        Command::Analyze(_) => commands::analyze(inst),
        Command::G2 { phi, erp_diagnostics, .. } => {
            commands::g2(inst, commands::pick_phi(inst, phi.phi.as_deref(), phi.default)?, *erp_diagnostics)
        }
        Command::Su3 { omega, psi, default, .. } => {
            commands::su3(inst, omega.as_deref().zip(psi.as_deref()), *default)
        }
        Command::Soliton { phi, .. } => commands::soliton(inst, commands::pick_phi(inst, phi.phi.as_deref(), phi.default)?),
        Command::SearchClosed { attempts, refine_steps, .. } => commands::search_closed(
            inst,
            &SearchOptions { attempts: *attempts, seed: cli.seed, refine_steps: *refine_steps },
        ),
        Command::Catalog { .. } => Ok((
            Status::Ok,
            json!({
                "algebra": algebra_to_json(&inst.algebra),
                "phi": inst.phi.as_ref().map(form_to_json),
                "omega": inst.su3.as_ref().map(|(o, _)| form_to_json(o)),
                "psi": inst.su3.as_ref().map(|(_, p)| form_to_json(p)),
            }),
        )),
        Command::Flow { .. } => unreachable!("flow runs through run_flow"),
    }
}

fn run_flow(cmd: &Command, inst: &Instance<f64>, index: Option<usize>) -> Outcome {
    let Command::Flow { phi, t_end, dt, tol, max_tau_norm_sq, out, compare, .. } = cmd else {
        unreachable!("only called for flow")
    };
    let cfg = FlowConfig { t_end: *t_end, dt0: *dt, tol: *tol, max_tau_norm_sq: *max_tau_norm_sq };
    let form = commands::pick_phi(inst, phi.phi.as_deref(), phi.default)?;
    let paths = out.as_deref().map(|p| commands::csv_paths(p, index));
    commands::flow(inst, form, &cfg, *compare, paths)
}

fn item<S: Scalar + Send + Sync>(cmd: &Command, cli: &Cli, extra: &Value, params: Params, index: Option<usize>) -> Item {
    let spec = &cmd.algebra().expect("algebra commands only").algebra;
    let inst = match resolve::<S>(spec, &params) {
        Ok(inst) => inst,
        Err(e) => return Item { params, digest: None, outcome: Err(e) },
    };
    let digest = sha256_hex(&json!({
        "command": cmd.name(),
        "backend": S::NAME,
        "instance": inst.digest_value(),
        "inputs": extra,
    }));
    let outcome = if matches!(cmd, Command::Flow { .. }) {
        let f = Instance {
            id: inst.id.clone(),
            params: inst.params.clone(),
            algebra: inst.algebra.to_f64(),
            phi: inst.phi.as_ref().map(|p| p.to_f64()),
            su3: None,
        };
        run_flow(cmd, &f, index)
    } else {
        run_one(cmd, cli, &inst)
    };
    Item { params, digest: Some(digest), outcome }
}

fn run_items<S: Scalar + Send + Sync>(cmd: &Command, cli: &Cli, extra: &Value, sets: Vec<Params>) -> Vec<Item> {
    if sets.len() == 1 {
        return vec![item::<S>(cmd, cli, extra, sets.into_iter().next().unwrap(), None)];
    }
    let work = || -> Vec<Item> {
        sets.into_par_iter().enumerate().map(|(i, p)| item::<S>(cmd, cli, extra, p, Some(i))).collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs as usize).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

fn catalog_list() -> Result<Value, Error> {
    let mut entries: Vec<Value> = catalog::list()
        .into_iter()
        .map(|e| {
            let mut v = serde_json::to_value(&e).expect("plain data");
            v["source"] = json!("builtin");
            v
        })
        .collect();
    entries.extend(input::user_catalog_listing()?);
    Ok(json!({"entries": entries}))
}

fn report(cli: &Cli) -> (Value, u8) {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut rep = json!({
        "schema_version": SCHEMA_VERSION,
        "command": {"name": cli.command.name(), "args": args},
    });
    let fail = |mut rep: Value, e: Error| {
        let code = exit_code(&e);
        rep["input_digest"] = Value::Null;
        rep["status"] = json!("error");
        rep["error"] = error_json(&e);
        (rep, code)
    };

    let Some(alg) = cli.command.algebra() else {
        return match catalog_list() {
            Ok(v) => {
                rep["input_digest"] = json!(sha256_hex(&v));
                rep["status"] = json!("ok");
                rep["results"] = v;
                (rep, 0)
            }
            Err(e) => fail(rep, e),
        };
    };
    let sets = match parse_params(&alg.params) {
        Ok(s) => s,
        Err(e) => return fail(rep, e),
    };
    let extra = match command_inputs(&cli.command, cli) {
        Ok(v) => v,
        Err(e) => return fail(rep, e),
    };
    let sweep = sets.len() > 1;
    let items = match cli.backend {
        _ if matches!(cli.command, Command::Flow { .. }) => run_items::<f64>(&cli.command, cli, &extra, sets),
        Backend::Rational => run_items::<Rational>(&cli.command, cli, &extra, sets),
        Backend::Float => run_items::<f64>(&cli.command, cli, &extra, sets),
    };

    let code = items.iter().map(Item::exit_code).find(|&c| c != 0).unwrap_or(0);
    let status = if items.iter().any(|i| i.status() == "error") {
        "error"
    } else if items.iter().any(|i| i.status() == "ambiguous") {
        "ambiguous"
    } else {
        "ok"
    };
    let digests: Vec<Value> = items.iter().map(|i| json!(i.digest)).collect();
    rep["input_digest"] = if sweep { json!(sha256_hex(&Value::Array(digests))) } else { digests[0].clone() };
    rep["status"] = json!(status);
    if sweep {
        let results: Vec<Value> = items
            .iter()
            .map(|i| {
                let (key, body) = i.body();
                json!({"params": params_json(&i.params), "input_digest": i.digest, "status": i.status(), key: body})
            })
            .collect();
        rep["results"] = Value::Array(results);
    } else {
        let (key, body) = items[0].body();
        rep[key] = body;
    }
    (rep, code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (rep, code) = report(&cli);
    let text = match cli.format {
        Format::Json => serde_json::to_string(&rep),
        Format::Pretty => serde_json::to_string_pretty(&rep),
    }
    .expect("plain data");
    // A closed pipe downstream is not an error of the run.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
