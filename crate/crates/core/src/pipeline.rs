//! The matrix and group check suites behind the command-line front end.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::admissibility::{block_decompose, check_admissible, density_check, flat_subspace, is_semisimple, modulus_classes, FlatOptions};
use crate::error::{invalid, Error, Result};
use crate::group::automorphism::BundleAutomorphism;
use crate::group::ratio::split_extension;
use crate::group::relations::{conjugate_translation, splitting_obstruction};
use crate::group::spec::{ElemJson, GroupSpec};
use crate::json::{self, Num};
use crate::linalg::{Rat, RatMatrix};
use crate::numfield::FormalVector;
use crate::report::CheckResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInputJson {
    pub matrix: Vec<Vec<Num>>,
    /// Index into the modulus classes, largest modulus first.
    #[serde(default)]
    pub class: usize,
}

fn vector_json(v: &FormalVector) -> Value {
    let base: Vec<ElemJson> = v.base.raw().iter().map(|e| ElemJson::from_coords(e)).collect();
    json!({ "exact": base, "approx": v.approx() })
}

/// Semi-simplicity, block decomposition, modulus classes, `E^q` and density,
/// stopping at the first stage that fails.
pub fn check_matrix(input: &MatrixInputJson) -> Result<Vec<CheckResult>> {
    let a: RatMatrix = json::matrix(&input.matrix)?;
    if !a.is_square() || !a.is_integral() || a.rows() == 0 {
        return invalid("expected a non-empty square integer matrix");
    }
    let mut out = Vec::new();
    let w = is_semisimple(&a)?;
    let ok = w.semisimple;
    out.push(CheckResult::new("semi-simple", ok, json!({ "min_poly": w.min_poly.to_string(), "gcd_with_derivative": w.gcd.to_string() })));
    if !ok {
        return Ok(out);
    }

    let d = block_decompose(&a)?;
    let exact = d.reassemble() == a;
    let (basis, blocks) = d.to_json();
    out.push(CheckResult::new("block decomposition", exact, json!({ "change_of_basis": basis, "blocks": blocks, "reassembles_exactly": exact })));

    let classes = modulus_classes(&a)?;
    let listed: Vec<_> = classes.iter().map(|c| c.to_json()).collect();
    out.push(CheckResult::new("modulus classes", true, json!(listed)));
    let Some(class) = classes.get(input.class) else {
        return invalid(format!("class {} requested, the matrix has {}", input.class, classes.len()));
    };

    let flat = match flat_subspace(&a, class, FlatOptions::default()) {
        Ok(f) => f,
        Err(e @ (Error::Unsupported(_) | Error::NotAdmissible(_))) => {
            out.push(CheckResult::from_error("flat subspace", &e));
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let s = &flat.splitting;
    out.push(CheckResult::new(
        "flat subspace",
        flat.missed_factors.is_empty(),
        json!({
            "field": s.field.to_json(),
            "q": s.q(),
            "eq": s.basis_eq.iter().map(vector_json).collect::<Vec<_>>(),
            "epq": s.basis_epq.iter().map(vector_json).collect::<Vec<_>>(),
            "ratio": flat.ratio.as_ref().map(|r| json!({ "exact": r.to_string(), "approx": r.approx().0 })),
            "ratio_squared": flat.ratio_squared.to_string(),
            "missed_factors": flat.missed_factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        }),
    ));

    let dense = density_check(&s.basis_eq)?;
    out.push(CheckResult::new("E^q dense in the torus", dense.dense, serde_json::to_value(dense.to_json()).unwrap_or(Value::Null)));
    Ok(out)
}

/// Generators acting trivially on the base, with the lattice translations,
/// stabilize every leaf. Reports a pair that fails to commute, if any.
pub fn leaf_stabilizer_witness(spec: &GroupSpec) -> Result<Value> {
    let k = &*spec.field;
    let p = spec.p;
    let fibrewise: Vec<&BundleAutomorphism> = spec.generators.iter().filter(|g| g.base.is_identity(k)).collect();
    for g in &fibrewise {
        for i in 0..p {
            let mut e = vec![Rat::default(); p];
            e[i] = Rat::from_integer(1.into());
            let c = conjugate_translation(g, &e)?;
            let t = c.pure_translation().ok_or_else(|| Error::InvalidInput("conjugate of a translation is not a translation".into()))?;
            let e_k: Vec<Vec<Rat>> = e.iter().map(|x| k.rat_coords(x)).collect();
            if *t != e_k {
                return Ok(json!({
                    "abelian": false,
                    "generator": g.name,
                    "translation": json::nums(&e),
                    "conjugate": t.iter().map(|x| ElemJson::from_coords(x)).collect::<Vec<_>>(),
                }));
            }
        }
    }
    Ok(json!({ "abelian": true, "fibrewise_generators": fibrewise.iter().map(|g| g.name.clone()).collect::<Vec<_>>() }))
}

/// Admissibility, relations, the splitting obstruction, the split extension
/// of the ratio map and the leaf stabilizer.
pub fn check_group(spec: &GroupSpec) -> Result<Vec<CheckResult>> {
    let report = check_admissible(spec);
    let mut out: Vec<CheckResult> = report
        .checks
        .iter()
        .map(|c| {
            let r = CheckResult::new(c.hypothesis.clone(), c.verdict, c.witness.clone());
            if c.mandatory {
                r
            } else {
                r.optional()
            }
        })
        .collect();

    match splitting_obstruction(spec) {
        Ok(s) => out.push(CheckResult::info("semidirect splitting", json!({ "verdict": if s.exists() { "EXISTS" } else { "NONEXISTENT" }, "witness": s.to_json() }))),
        Err(e) => out.push(CheckResult::from_error("semidirect splitting", &e).optional()),
    }
    match split_extension(spec, None) {
        Ok(x) => {
            let ok = x.verified;
            out.push(CheckResult::new("split extension of the ratio map", ok, serde_json::to_value(x.to_json(&spec.names())).unwrap_or(Value::Null)));
        }
        Err(e) => out.push(CheckResult::from_error("split extension of the ratio map", &e)),
    }
    out.push(CheckResult::info("leaf stabilizer", leaf_stabilizer_witness(spec)?));
    Ok(out)
}
