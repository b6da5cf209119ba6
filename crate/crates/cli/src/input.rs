//! Resolving an algebra argument: built-in catalog id, user catalog id
//! (from `G2LAB_CATALOG_PATH`) or a JSON file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use g2lab::catalog::{self, Params};
use g2lab::json::{algebra_from_json, algebra_to_json, form_from_json, form_to_json};
use g2lab::{parse_rational, Error, KForm, LieAlgebra, Rational, Result, Scalar};
use serde_json::{json, Value};

pub const CATALOG_ENV: &str = "G2LAB_CATALOG_PATH";

/// An instantiated algebra with whatever structures came with it.
#[derive(Clone, Debug)]
pub struct Instance<S> {
    pub id: String,
    pub params: Params,
    pub algebra: LieAlgebra<S>,
    pub phi: Option<KForm<S>>,
    pub su3: Option<(KForm<S>, KForm<S>)>,
}

impl<S: Scalar> Instance<S> {
    pub fn digest_value(&self) -> Value {
        json!({
            "id": self.id,
            "params": params_json(&self.params),
            "algebra": algebra_to_json(&self.algebra),
            "phi": self.phi.as_ref().map(form_to_json),
            "su3": self.su3.as_ref().map(|(o, p)| json!({"omega": form_to_json(o), "psi": form_to_json(p)})),
        })
    }
}

pub fn params_json(p: &Params) -> Value {
    Value::Object(p.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect())
}

fn convert<S: Scalar>(f: &KForm<Rational>) -> KForm<S> {
    f.map_scalar(|x| S::from_rational(x).expect("rationals embed in every backend"))
}

/// Entry from a user catalog file, kept as raw JSON until the backend is known.
#[derive(Clone, Debug)]
struct UserEntry {
    id: String,
    raw: Value,
}

fn user_entries() -> Result<Vec<UserEntry>> {
    let Ok(path) = std::env::var(CATALOG_ENV) else { return Ok(Vec::new()) };
    let mut files = Vec::new();
    for part in std::env::split_paths(&path) {
        if part.as_os_str().is_empty() {
            continue;
        }
        if part.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(&part)
                .map_err(|e| Error::Parse(format!("{}: {e}", part.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(part);
        }
    }
    let mut out: Vec<UserEntry> = Vec::new();
    for file in files {
        let v = read_json(&file)?;
        let items = match v.get("entries") {
            Some(Value::Array(a)) => a.clone(),
            Some(_) => return Err(Error::Parse(format!("{}: 'entries' must be an array", file.display()))),
            None => vec![v],
        };
        for raw in items {
            let id = raw
                .get("name")
                .and_then(Value::as_str)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Parse(format!("{}: user catalog entries need a 'name'", file.display())))?
                .to_string();
            if catalog::ids().any(|b| b == id) || out.iter().any(|e| e.id == id) {
                return Err(Error::Parse(format!("{}: duplicate catalog id '{id}'", file.display())));
            }
            out.push(UserEntry { id, raw });
        }
    }
    Ok(out)
}

/// `(id, dim, description)` of every user catalog entry.
pub fn user_catalog_listing() -> Result<Vec<Value>> {
    user_entries()?
        .into_iter()
        .map(|e| {
            let n = e.raw.get("n").cloned().unwrap_or(Value::Null);
            let description = e.raw.get("description").cloned().unwrap_or(Value::String(String::new()));
            Ok(json!({"id": e.id, "dim": n, "params": [], "description": description, "source": "user"}))
        })
        .collect()
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_form<S: Scalar>(path: &Path) -> Result<KForm<S>> {
    form_from_json(&read_json(path)?)
}

fn from_raw<S: Scalar>(id: String, raw: &Value, params: &Params) -> Result<Instance<S>> {
    if !params.is_empty() {
        return Err(Error::Parameter(format!("'{id}' takes no parameters")));
    }
    let algebra = algebra_from_json::<S>(raw)?;
    let opt = |key: &str| -> Result<Option<KForm<S>>> {
        match raw.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => form_from_json(v).map(Some),
        }
    };
    let phi = opt("phi")?;
    let su3 = match (opt("omega")?, opt("psi")?) {
        (Some(o), Some(p)) => Some((o, p)),
        (None, None) => None,
        _ => return Err(Error::Parse(format!("'{id}': 'omega' and 'psi' come together"))),
    };
    Ok(Instance { id, params: Params::new(), algebra, phi, su3 })
}

pub fn resolve<S: Scalar>(spec: &str, params: &Params) -> Result<Instance<S>> {
    if catalog::ids().any(|id| id == spec) {
        let e = catalog::get(spec, params)?;
        return Ok(Instance {
            id: e.id,
            params: params.clone(),
            algebra: e.algebra.map_scalar(|x| S::from_rational(x).expect("rationals embed in every backend")),
            phi: e.phi.as_ref().map(convert),
            su3: e.su3.as_ref().map(|(o, p)| (convert(o), convert(p))),
        });
    }
    if let Some(u) = user_entries()?.into_iter().find(|e| e.id == spec) {
        return from_raw(u.id, &u.raw, params);
    }
    let path = Path::new(spec);
    if path.is_file() {
        let raw = read_json(path)?;
        let id = raw.get("name").and_then(Value::as_str).filter(|s| !s.is_empty()).unwrap_or(spec).to_string();
        return from_raw(id, &raw, params);
    }
    Err(Error::UnknownEntry(spec.to_string()))
}

/// Expands `name=v1,v2,…` arguments into the Cartesian product of
/// parameter sets, in argument order.
pub fn parse_params(args: &[String]) -> Result<Vec<Params>> {
    let mut axes: BTreeMap<String, Vec<Rational>> = BTreeMap::new();
    let mut order = Vec::new();
    for arg in args {
        let (name, values) =
            arg.split_once('=').ok_or_else(|| Error::Parse(format!("parameter '{arg}' is not NAME=VALUE")))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Parse(format!("parameter '{arg}' has no name")));
        }
        let parsed = values
            .split(',')
            .map(|v| {
                parse_rational(v).ok_or_else(|| {
                    Error::Parse(format!("parameter {name} = '{v}' is not a rational (write p/q, not decimals)"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.insert(name.to_string(), parsed).is_some() {
            return Err(Error::Parse(format!("parameter '{name}' given twice")));
        }
        order.push(name.to_string());
    }
    let mut sets = vec![Params::new()];
    for name in &order {
        let values = &axes[name];
        sets = sets
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut p = p.clone();
                    p.insert(name.clone(), v.clone());
                    p
                })
            })
            .collect();
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use g2lab::q;

    #[test]
    fn sweeps_expand_in_order() {
        let sets = parse_params(&["a=1,2".into(), "b=1/2".into()]).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[1]["a"], q(2, 1));
        assert_eq!(sets[0]["b"], q(1, 2));
        assert!(parse_params(&["a=0.5".into()]).is_err());
        assert!(parse_params(&["a".into()]).is_err());
        assert_eq!(parse_params(&[]).unwrap(), vec![Params::new()]);
    }
}
