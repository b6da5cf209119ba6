//! Named Lie algebras with their attached SU(3)- and G₂-structures.
//!
//! Parameters are rationals. Every entry records the properties it is
//! expected to have; [`verify`] re-derives them.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Endo, KForm};
use crate::g2::{search_closed_positive, standard_phi, SearchOptions};
use crate::liealg::{Levi, LieAlgebra};
use crate::scalar::{q, Rational};

pub type Params = BTreeMap<String, Rational>;

#[derive(Clone, Debug, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub range: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub dim: usize,
    pub params: Vec<ParamSpec>,
    pub description: &'static str,
    pub ambiguous: bool,
}

/// Where an attached 3-form comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhiSource {
    /// The standard form `e^{127} + e^{347} + e^{567} + e^{135} − e^{146} − e^{236} − e^{245}`.
    Standard,
    /// `ω ∧ η + ψ` on a rank-one extension of a six-dimensional entry.
    Extension,
    /// Found by the closed-positive search; not a published expression.
    SearchDerived { seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Expected {
    pub unimodular: bool,
    pub solvable: bool,
    pub nilpotent: bool,
    /// Checked only when recorded.
    pub nilpotency_step: Option<usize>,
    /// `dω = cψ` for the attached SU(3)-structure (`Some(0)` for symplectic half-flat).
    #[serde(serialize_with = "crate::json::ser_opt_rational")]
    pub coupled_c: Option<Rational>,
    /// Closedness of the attached 3-form.
    pub closed: Option<bool>,
    pub levi: Option<Levi>,
    pub radical_dim: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub algebra: LieAlgebra<Rational>,
    /// Adapted `(ω, ψ)` on six-dimensional entries.
    pub su3: Option<(KForm<Rational>, KForm<Rational>)>,
    /// The derivation used for a rank-one extension, with the base entry.
    pub extension: Option<(String, Endo<Rational>)>,
    pub phi: Option<KForm<Rational>>,
    pub phi_source: Option<PhiSource>,
    pub expected: Expected,
    pub ambiguous: bool,
}

fn e(n: usize, idx: &[usize]) -> KForm<Rational> {
    KForm::mono(n, idx).expect("valid monomial")
}

fn t(n: usize, idx: &[usize], c: Rational) -> KForm<Rational> {
    KForm::term(n, idx, c).expect("valid monomial")
}

fn z(n: usize) -> KForm<Rational> {
    KForm::zero(n, 2)
}

/// `ω = e¹² + e³⁴ + e⁵⁶`.
pub fn standard_omega() -> KForm<Rational> {
    e(6, &[1, 2]) + e(6, &[3, 4]) + e(6, &[5, 6])
}

/// `ψ = Re (e¹ + ie²)(e³ + ie⁴)(e⁵ + ie⁶) = e¹³⁵ − e¹⁴⁶ − e²³⁶ − e²⁴⁵`.
pub fn standard_psi() -> KForm<Rational> {
    e(6, &[1, 3, 5]) - e(6, &[1, 4, 6]) - e(6, &[2, 3, 6]) - e(6, &[2, 4, 5])
}

/// `ψ̂ = Im (e¹ + ie²)(e³ + ie⁴)(e⁵ + ie⁶) = e¹³⁶ + e¹⁴⁵ + e²³⁵ − e²⁴⁶`.
pub fn standard_psi_hat() -> KForm<Rational> {
    e(6, &[1, 3, 6]) + e(6, &[1, 4, 5]) + e(6, &[2, 3, 5]) - e(6, &[2, 4, 6])
}

/// `ω ∧ e⁷ + ψ` on `ℝ⁷`.
pub fn extension_phi(omega: &KForm<Rational>, psi: &KForm<Rational>) -> KForm<Rational> {
    let eta = e(7, &[7]);
    omega.extend(7).expect("6 ≤ 7").w(&eta) + psi.extend(7).expect("6 ≤ 7")
}

const ENTRIES: &[(&str, usize, &[(&str, &str)], &str, bool)] = &[
    ("abelian7", 7, &[], "abelian ℝ⁷ with the flat standard 3-form", false),
    ("abelian6", 6, &[], "abelian ℝ⁶ with the standard SU(3) pair (symplectic half-flat)", false),
    ("n1", 6, &[], "nilpotent (0,0,0,e13,e14+e23,e13-e15-e24) with the standard coupled SU(3) pair", false),
    ("n2", 6, &[], "nilpotent (0,0,0,0,e14+e23,e13-e24) with the standard coupled SU(3) pair", false),
    ("ffkm_n", 7, &[], "3-step nilpotent [e1,e2]=-e4, [e1,e3]=-e5, [e1,e4]=-e6, [e1,e5]=-e7", false),
    ("s_ab", 6, &[("a", "any"), ("b", "any")], "unimodular solvable R^4 ⋊ R^2 with the standard SU(3) pair", false),
    ("g_a", 7, &[("a", "a >= 1/4")], "n2 ⋊ diag(a,a,1/2-a,1/2-a,1/2,1/2) with φ = ω∧η + ψ", false),
    ("g_ab", 7, &[("a", "any"), ("b", "any")], "n1 ⋊ D_ab with φ = ω∧η + ψ", false),
    ("g_abk", 7, &[("a", "any"), ("b", "any"), ("k", "any")], "s_ab ⋊ D_k with φ = ω∧η + ψ", false),
    ("nonsolv_1", 7, &[("variant", "1 or 2")], "non-solvable, trivial radical action on e4; two readings of an eight-term display", true),
    ("nonsolv_2", 7, &[("mu", "-1 < mu <= 1/2")], "sl(2,R) ⋉ radical (0, -e45, -mu e46, (1+mu) e47)", false),
    ("nonsolv_3", 7, &[("mu", "mu > 0")], "sl(2,R) ⋉ radical (0, -mu e45, mu/2 e46 - e47, e46 + mu/2 e47)", false),
    ("nonsolv_levi", 7, &[], "sl(2,R) acting non-trivially on a 4-dimensional radical R ⋉ R^3", false),
];

pub fn list() -> Vec<EntryInfo> {
    ENTRIES
        .iter()
        .map(|&(id, dim, params, description, ambiguous)| EntryInfo {
            id,
            dim,
            params: params.iter().map(|&(name, range)| ParamSpec { name, range }).collect(),
            description,
            ambiguous,
        })
        .collect()
}

pub fn ids() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|e| e.0)
}

fn param(id: &str, params: &Params, name: &str) -> Result<Rational> {
    params.get(name).cloned().ok_or_else(|| Error::Parameter(format!("{id} needs parameter '{name}'")))
}

fn check_params(id: &str, params: &Params, expected: &[(&str, &str)]) -> Result<()> {
    for k in params.keys() {
        if !expected.iter().any(|(n, _)| n == k) {
            return Err(Error::Parameter(format!("{id} has no parameter '{k}'")));
        }
    }
    Ok(())
}

fn n1() -> Vec<KForm<Rational>> {
    vec![z(6), z(6), z(6), e(6, &[1, 3]), e(6, &[1, 4]) + e(6, &[2, 3]), e(6, &[1, 3]) - e(6, &[1, 5]) - e(6, &[2, 4])]
}

fn n2() -> Vec<KForm<Rational>> {
    vec![z(6), z(6), z(6), z(6), e(6, &[1, 4]) + e(6, &[2, 3]), e(6, &[1, 3]) - e(6, &[2, 4])]
}

fn s_ab(a: &Rational, b: &Rational) -> Vec<KForm<Rational>> {
    vec![
        t(6, &[2, 6], -a.clone()),
        t(6, &[1, 6], a.clone()),
        t(6, &[1, 6], b.clone()) + t(6, &[2, 5], b.clone()) + t(6, &[4, 6], a.clone()),
        t(6, &[1, 5], b.clone()) - t(6, &[2, 6], b.clone()) - t(6, &[3, 6], a.clone()),
        z(6),
        z(6),
    ]
}

/// `D_a = diag(a, a, ½ − a, ½ − a, ½, ½)`.
pub fn d_a(a: &Rational) -> Endo<Rational> {
    let h = q(1, 2);
    Endo::diag(&[a.clone(), a.clone(), &h - a, &h - a, h.clone(), h])
}

/// The two-parameter family of derivations of `n1` fixing `ψ`.
pub fn d_ab(a: &Rational, b: &Rational) -> Endo<Rational> {
    let h = q(1, 2);
    let o = q(0, 1);
    let mut rows = vec![vec![o.clone(); 6]; 6];
    rows[2][0] = a.clone();
    rows[3][1] = a.clone();
    rows[4][0] = b.clone();
    rows[5][1] = b.clone();
    for i in 2..6 {
        rows[i][i] = h.clone();
    }
    Endo::from_rows(rows).expect("square")
}

/// The one-parameter family of derivations of `s_ab` with `D*ψ = −bψ`.
pub fn d_k(b: &Rational, k: &Rational) -> Endo<Rational> {
    let hb = -(b.clone() / q(2, 1));
    let o = q(0, 1);
    let mut rows = vec![vec![o.clone(); 6]; 6];
    rows[0][0] = hb.clone();
    rows[0][1] = k.clone();
    rows[1][0] = -k.clone();
    rows[1][1] = hb.clone();
    rows[2][2] = hb.clone();
    rows[2][3] = -k.clone();
    rows[3][2] = k.clone();
    rows[3][3] = hb;
    Endo::from_rows(rows).expect("square")
}

fn sl2_part() -> [KForm<Rational>; 3] {
    [-e(7, &[2, 3]), t(7, &[1, 2], q(-2, 1)), t(7, &[1, 3], q(2, 1))]
}

fn nonsolv(tail: [KForm<Rational>; 4]) -> Vec<KForm<Rational>> {
    sl2_part().into_iter().chain(tail).collect()
}

/// Instantiates a catalog entry.
pub fn get(id: &str, params: &Params) -> Result<CatalogEntry> {
    let spec = ENTRIES.iter().find(|e| e.0 == id).ok_or_else(|| Error::UnknownEntry(id.to_string()))?;
    check_params(id, params, spec.2)?;
    let ambiguous = spec.4;
    let six = |d1: Vec<KForm<Rational>>, c: Rational, nilpotent: Option<usize>, solvable: bool| -> Result<CatalogEntry> {
        let algebra = LieAlgebra::new(d1)?;
        Ok(CatalogEntry {
            id: id.to_string(),
            algebra,
            su3: Some((standard_omega(), standard_psi())),
            extension: None,
            phi: None,
            phi_source: None,
            expected: Expected {
                unimodular: true,
                solvable,
                nilpotent: nilpotent.is_some(),
                nilpotency_step: nilpotent,
                coupled_c: Some(c),
                closed: None,
                levi: Some(Levi::Trivial),
                radical_dim: Some(6),
            },
            ambiguous,
        })
    };
    let mut entry = match id {
        "abelian7" => CatalogEntry {
            id: id.to_string(),
            algebra: LieAlgebra::abelian(7)?,
            su3: None,
            extension: None,
            phi: Some(standard_phi()),
            phi_source: Some(PhiSource::Standard),
            expected: Expected {
                unimodular: true,
                solvable: true,
                nilpotent: true,
                nilpotency_step: Some(1),
                coupled_c: None,
                closed: Some(true),
                levi: Some(Levi::Trivial),
                radical_dim: Some(7),
            },
            ambiguous,
        },
        "abelian6" => six(vec![z(6); 6], q(0, 1), Some(1), true)?,
        "n1" => six(n1(), q(-1, 1), Some(4), true)?,
        "n2" => six(n2(), q(-1, 1), Some(2), true)?,
        "s_ab" => {
            let a = param(id, params, "a")?;
            let b = param(id, params, "b")?;
            let nil = if a.is_zero() {
                Some(if b.is_zero() { 1 } else { 2 })
            } else {
                None
            };
            six(s_ab(&a, &b), b, nil, true)?
        }
        "ffkm_n" => {
            let d1 = vec![z(7), z(7), z(7), e(7, &[1, 2]), e(7, &[1, 3]), e(7, &[1, 4]), e(7, &[1, 5])];
            let algebra = LieAlgebra::new(d1)?;
            let found = search_derived_phi(&algebra);
            let closed = found.as_ref().map(|_| true);
            CatalogEntry {
                id: id.to_string(),
                algebra,
                su3: None,
                extension: None,
                phi_source: found.as_ref().map(|(seed, _)| PhiSource::SearchDerived { seed: *seed }),
                phi: found.map(|(_, phi)| phi),
                expected: Expected {
                    unimodular: true,
                    solvable: true,
                    nilpotent: true,
                    nilpotency_step: Some(3),
                    coupled_c: None,
                    closed,
                    levi: Some(Levi::Trivial),
                    radical_dim: Some(7),
                },
                ambiguous,
            }
        }
        "g_a" => {
            let a = param(id, params, "a")?;
            if a < q(1, 4) {
                return Err(Error::Parameter(format!("g_a needs a >= 1/4, got {a}")));
            }
            extension(id, get("n2", &Params::new())?, d_a(&a), false)?
        }
        "g_ab" => {
            let a = param(id, params, "a")?;
            let b = param(id, params, "b")?;
            extension(id, get("n1", &Params::new())?, d_ab(&a, &b), false)?
        }
        "g_abk" => {
            let a = param(id, params, "a")?;
            let b = param(id, params, "b")?;
            let k = param(id, params, "k")?;
            let mut base = Params::new();
            base.insert("a".into(), a);
            base.insert("b".into(), b.clone());
            let unimodular = b.is_zero();
            extension(id, get("s_ab", &base)?, d_k(&b, &k), unimodular)?
        }
        "nonsolv_1" => {
            let v = param(id, params, "variant")?;
            let h = q(1, 2);
            let tail = if v == q(1, 1) {
                [z(7), -e(7, &[4, 5]), t(7, &[4, 6], h.clone()) - e(7, &[4, 7]), t(7, &[4, 7], h)]
            } else if v == q(2, 1) {
                [z(7), -e(7, &[4, 5]), t(7, &[4, 6], h.clone()), t(7, &[4, 7], -h)]
            } else {
                return Err(Error::Parameter(format!("nonsolv_1 variant must be 1 or 2, got {v}")));
            };
            nonsolvable(id, nonsolv(tail), v == q(1, 1), 4, ambiguous)?
        }
        "nonsolv_2" => {
            let mu = param(id, params, "mu")?;
            if !(mu > q(-1, 1) && mu <= q(1, 2)) {
                return Err(Error::Parameter(format!("nonsolv_2 needs -1 < mu <= 1/2, got {mu}")));
            }
            let tail = [z(7), -e(7, &[4, 5]), t(7, &[4, 6], -mu.clone()), t(7, &[4, 7], q(1, 1) + mu)];
            nonsolvable(id, nonsolv(tail), true, 4, ambiguous)?
        }
        "nonsolv_3" => {
            let mu = param(id, params, "mu")?;
            if mu <= q(0, 1) {
                return Err(Error::Parameter(format!("nonsolv_3 needs mu > 0, got {mu}")));
            }
            let h = mu.clone() / q(2, 1);
            let tail = [
                z(7),
                t(7, &[4, 5], -mu),
                t(7, &[4, 6], h.clone()) - e(7, &[4, 7]),
                e(7, &[4, 6]) + t(7, &[4, 7], h),
            ];
            nonsolvable(id, nonsolv(tail), true, 4, ambiguous)?
        }
        "nonsolv_levi" => {
            let tail = [
                -e(7, &[1, 4]) - e(7, &[2, 5]) - e(7, &[4, 7]),
                e(7, &[1, 5]) - e(7, &[3, 4]) - e(7, &[5, 7]),
                t(7, &[6, 7], q(2, 1)),
                z(7),
            ];
            nonsolvable(id, nonsolv(tail), true, 4, ambiguous)?
        }
        _ => unreachable!("id validated against the entry table"),
    };
    entry.algebra = entry.algebra.with_name(id).with_params(params.clone());
    Ok(entry)
}

fn extension(id: &str, base: CatalogEntry, d: Endo<Rational>, unimodular: bool) -> Result<CatalogEntry> {
    let algebra = base.algebra.rank_one_extension(&d)?;
    let d_nilpotent = (0..6).fold(d.clone(), |acc, _| acc.compose(&d)).is_zero();
    let (omega, psi) = base.su3.clone().expect("six-dimensional entries carry an SU(3) pair");
    Ok(CatalogEntry {
        id: id.to_string(),
        algebra,
        su3: None,
        phi: Some(extension_phi(&omega, &psi)),
        phi_source: Some(PhiSource::Extension),
        extension: Some((base.id.clone(), d)),
        expected: Expected {
            unimodular,
            solvable: true,
            nilpotent: base.expected.nilpotent && d_nilpotent,
            nilpotency_step: None,
            coupled_c: None,
            closed: Some(true),
            levi: Some(Levi::Trivial),
            radical_dim: Some(7),
        },
        ambiguous: false,
    })
}

fn nonsolvable(id: &str, d1: Vec<KForm<Rational>>, unimodular: bool, radical_dim: usize, ambiguous: bool) -> Result<CatalogEntry> {
    let algebra = LieAlgebra::new(d1)?;
    let found = search_derived_phi(&algebra);
    let closed = found.as_ref().map(|_| true);
    Ok(CatalogEntry {
        id: id.to_string(),
        algebra,
        su3: None,
        extension: None,
        phi_source: found.as_ref().map(|(seed, _)| PhiSource::SearchDerived { seed: *seed }),
        phi: found.map(|(_, phi)| phi),
        expected: Expected {
            unimodular,
            solvable: false,
            nilpotent: false,
            nilpotency_step: None,
            coupled_c: None,
            closed,
            levi: Some(Levi::Sl2R),
            radical_dim: Some(radical_dim),
        },
        ambiguous,
    })
}

/// Seed and budget of the search that attaches 3-forms to entries without
/// a closed-form expression.
pub const CATALOG_SEARCH: SearchOptions = SearchOptions { attempts: 300, seed: 7, refine_steps: 100 };

fn search_derived_phi(algebra: &LieAlgebra<Rational>) -> Option<(u64, KForm<Rational>)> {
    search_closed_positive(algebra, &CATALOG_SEARCH, None).phi.map(|phi| (CATALOG_SEARCH.seed, phi))
}

/// A property whose recomputed value differs from the entry's record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub property: &'static str,
    pub expected: String,
    pub found: String,
}

/// Re-derives the structural part of the expected-properties record.
pub fn verify(entry: &CatalogEntry) -> Vec<Mismatch> {
    let l = &entry.algebra;
    let f = l.structure_flags();
    let ex = &entry.expected;
    let mut out = Vec::new();
    let mut cmp = |property: &'static str, expected: String, found: String| {
        if expected != found {
            out.push(Mismatch { property, expected, found });
        }
    };
    cmp("jacobi", "0".into(), l.check_jacobi().to_string());
    cmp("unimodular", ex.unimodular.to_string(), f.unimodular.to_string());
    cmp("solvable", ex.solvable.to_string(), f.solvable.to_string());
    cmp("nilpotent", ex.nilpotent.to_string(), f.nilpotent.to_string());
    if let Some(step) = ex.nilpotency_step {
        cmp("nilpotency_step", step.to_string(), format!("{:?}", f.nilpotency_step.unwrap_or(0)));
    }
    if let Some(levi) = &ex.levi {
        cmp("levi", format!("{levi:?}"), format!("{:?}", f.levi));
    }
    if let Some(r) = ex.radical_dim {
        cmp("radical_dim", r.to_string(), f.radical.dim.to_string());
    }
    if let (Some(closed), Some(phi)) = (ex.closed, &entry.phi) {
        cmp("closed", closed.to_string(), l.d(phi).is_zero().to_string());
    }
    if let Some((omega, psi)) = &entry.su3 {
        if let Some(c) = &ex.coupled_c {
            let domega = l.d(omega);
            let holds = domega == psi.scale(c) && l.d(psi).is_zero();
            cmp("coupled_c", format!("dω = {c}ψ"), if holds { format!("dω = {c}ψ") } else { format!("dω = {domega}") });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(&str, Rational)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(get("g_a", &p(&[("a", q(1, 10))])), Err(Error::Parameter(_))));
        assert!(matches!(get("g_a", &Params::new()), Err(Error::Parameter(_))));
        assert!(matches!(get("nope", &Params::new()), Err(Error::UnknownEntry(_))));
        assert!(matches!(get("abelian7", &p(&[("a", q(1, 1))])), Err(Error::Parameter(_))));
        assert!(matches!(get("nonsolv_2", &p(&[("mu", q(-1, 1))])), Err(Error::Parameter(_))));
        assert!(get("nonsolv_2", &p(&[("mu", q(1, 2))])).is_ok());
        assert!(matches!(get("nonsolv_3", &p(&[("mu", q(0, 1))])), Err(Error::Parameter(_))));
    }

    fn grid() -> Vec<(&'static str, Params)> {
        let mut out = Vec::new();
        for id in ids() {
            let names: Vec<&str> = list().into_iter().find(|e| e.id == id).unwrap().params.iter().map(|p| p.name).collect();
            let values: Vec<Rational> = match id {
                "g_a" => vec![q(1, 4), q(1, 2), q(1, 1), q(2, 1)],
                "nonsolv_1" => vec![q(1, 1), q(2, 1)],
                "nonsolv_2" => vec![q(-1, 2), q(0, 1), q(1, 2)],
                "nonsolv_3" => vec![q(1, 3), q(1, 1), q(5, 1)],
                _ => vec![q(0, 1), q(1, 1), q(-3, 2)],
            };
            if names.is_empty() {
                out.push((id, Params::new()));
                continue;
            }
            // All combinations of the sample values.
            let mut combos = vec![Params::new()];
            for name in &names {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        values.iter().map(move |v| {
                            let mut c = c.clone();
                            c.insert(name.to_string(), v.clone());
                            c
                        })
                    })
                    .collect();
            }
            out.extend(combos.into_iter().map(|c| (id, c)));
        }
        out
    }

    #[test]
    fn expected_properties_hold() {
        for (id, params) in grid() {
            let entry = get(id, &params).unwrap();
            assert_eq!(verify(&entry), vec![], "{id} {params:?}");
        }
    }

    #[test]
    fn abelian7_is_flat() {
        let entry = get("abelian7", &Params::new()).unwrap();
        assert!(entry.algebra.d1().iter().all(KForm::is_zero));
    }

    #[test]
    fn ffkm_bracket_convention() {
        let l = get("ffkm_n", &Params::new()).unwrap().algebra;
        // [e₁, e₂] = −e₄
        let b = l.bracket(&crate::liealg::unit(7, 0), &crate::liealg::unit(7, 1));
        assert_eq!(b[3], q(-1, 1));
    }

    #[test]
    fn extension_phi_is_standard() {
        assert_eq!(extension_phi(&standard_omega(), &standard_psi()), standard_phi());
    }
}
