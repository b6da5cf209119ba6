//! JSON interchange for forms, Lie algebras and SU(3) data.
//!
//! Coefficients are written as rational strings (`"-3/2"`) by the exact
//! backend and as numbers by float backends. Reading accepts both, except
//! that decimals are refused when the target backend is exact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::liealg::LieAlgebra;
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Serialize, Deserialize)]
struct TermJson {
    idx: Vec<usize>,
    c: Value,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    n: usize,
    k: usize,
    #[serde(default)]
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    n: usize,
    d: Vec<Value>,
    #[serde(default)]
    name: String,
    #[serde(default)]
    params: BTreeMap<String, Value>,
}

/// `(ω, ψ, ψ̂?)` as read from `{"omega": …, "psi": …, "psi_hat": …}`.
pub type Su3Input<S> = (KForm<S>, KForm<S>, Option<KForm<S>>);

pub fn scalar_to_json<S: Scalar>(c: &S) -> Value {
    if S::EXACT {
        Value::String(c.to_string())
    } else {
        serde_json::Number::from_f64(c.as_f64()).map_or(Value::Null, Value::Number)
    }
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    let bad = || Error::Parse(format!("coefficient {v} is not representable in the {} backend", S::NAME));
    match v {
        Value::String(s) => match parse_rational(s) {
            Some(r) => S::from_rational(&r).ok_or_else(bad),
            None if !S::EXACT => s.trim().parse::<f64>().ok().and_then(<S as Scalar>::from_f64).ok_or_else(bad),
            None => Err(Error::Parse(format!("'{s}' is not a rational (use p/q)"))),
        },
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(S::int(i))
            } else if S::EXACT {
                Err(Error::Parse(format!("decimal {n} in the exact backend (use p/q)")))
            } else {
                n.as_f64().and_then(<S as Scalar>::from_f64).ok_or_else(bad)
            }
        }
        _ => Err(bad()),
    }
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    scalar_from_json::<Rational>(v)
}

pub fn form_to_json<S: Scalar>(f: &KForm<S>) -> Value {
    let terms = f.terms().map(|(idx, c)| TermJson { idx, c: scalar_to_json(c) }).collect();
    serde_json::to_value(FormJson { n: f.n(), k: f.degree(), terms }).expect("plain data")
}

pub fn form_from_json<S: Scalar>(v: &Value) -> Result<KForm<S>> {
    let raw: FormJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("form: {e}")))?;
    let mut f = KForm::try_zero(raw.n, raw.k).map_err(|e| Error::Parse(e.to_string()))?;
    for t in raw.terms {
        let c = scalar_from_json::<S>(&t.c)?;
        f.add_term(&t.idx, c).map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(f)
}

pub fn algebra_to_json<S: Scalar>(l: &LieAlgebra<S>) -> Value {
    let raw = AlgebraJson {
        n: l.n(),
        d: l.d1().iter().map(form_to_json).collect(),
        name: l.name().to_string(),
        params: l.params().iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect(),
    };
    serde_json::to_value(raw).expect("plain data")
}

/// Parses a Lie algebra; Jacobi violations are reported as
/// [`Error::InvalidAlgebra`].
pub fn algebra_from_json<S: Scalar>(v: &Value) -> Result<LieAlgebra<S>> {
    let raw: AlgebraJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("algebra: {e}")))?;
    if raw.d.len() != raw.n {
        return Err(Error::Parse(format!("'d' has {} entries for n = {}", raw.d.len(), raw.n)));
    }
    let d1 = raw.d.iter().map(form_from_json::<S>).collect::<Result<Vec<_>>>()?;
    let params = raw
        .params
        .iter()
        .map(|(k, v)| Ok((k.clone(), rational_from_json(v)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(LieAlgebra::new(d1)?.with_name(raw.name).with_params(params))
}

pub fn su3_from_json<S: Scalar>(v: &Value) -> Result<Su3Input<S>> {
    let get = |key: &str| v.get(key).ok_or_else(|| Error::Parse(format!("missing '{key}'")));
    let omega = form_from_json(get("omega")?)?;
    let psi = form_from_json(get("psi")?)?;
    let psi_hat = match v.get("psi_hat") {
        Some(Value::Null) | None => None,
        Some(p) => Some(form_from_json(p)?),
    };
    Ok((omega, psi, psi_hat))
}

pub(crate) fn ser_opt_rational<Ser: Serializer>(v: &Option<Rational>, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}
