use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use super::{commutant_check, density_check, is_semisimple, similarity_certificate};
use crate::group::automorphism::{FactorKind, NumericAutomorphism};
use crate::group::fixed::fiber_fixed_point_free;
use crate::group::relations::verify_relation;
use crate::group::spec::{evaluate_word, ElemJson, GroupSpec};
use crate::linalg::{Field, RatMatrix};
use crate::numfield::NFVector;

/// One hypothesis, its verdict and the data backing it.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub hypothesis: String,
    pub verdict: bool,
    /// Whether the overall verdict depends on this entry.
    pub mandatory: bool,
    pub witness: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub spec: String,
    pub admissible: bool,
    pub checks: Vec<HypothesisCheck>,
}

impl AdmissibilityReport {
    pub fn check(&self, hypothesis: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.hypothesis == hypothesis)
    }

    pub fn failures(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| c.mandatory && !c.verdict).collect()
    }
}

fn entry(hypothesis: &str, verdict: bool, witness: Value) -> HypothesisCheck {
    HypothesisCheck { hypothesis: hypothesis.into(), verdict, mandatory: true, witness }
}

/// Runs every decidable hypothesis on the spec. Properness of the base action
/// is echoed from the supplied certificate together with orbit-count spot
/// checks and does not enter the verdict.
pub fn check_admissible(spec: &GroupSpec) -> AdmissibilityReport {
    let k = &*spec.field;
    let mut checks = Vec::new();

    let unimodular: Vec<Value> = spec
        .generators
        .iter()
        .map(|g| json!({ "generator": g.name, "det": g.linear.det().to_string(), "integral": g.linear.is_integral() }))
        .collect();
    checks.push(entry("linear parts in GL_p(Z)", spec.generators.iter().all(|g| g.linear.is_unimodular()), json!(unimodular)));

    let mut ok = true;
    let mut w = Vec::new();
    for g in &spec.generators {
        match is_semisimple(&g.linear) {
            Ok(s) => {
                ok &= s.semisimple;
                w.push(json!({ "generator": g.name, "semisimple": s.semisimple, "min_poly": s.min_poly.to_string(), "gcd_with_derivative": s.gcd.to_string() }));
            }
            Err(e) => {
                ok = false;
                w.push(json!({ "generator": g.name, "error": e.to_string() }));
            }
        }
    }
    checks.push(entry("semisimple linear parts", ok, json!(w)));

    let mut ok = true;
    let mut w = Vec::new();
    for g in &spec.generators {
        let eq = spec.splitting.restrict_eq(&g.linear).is_some();
        let epq = spec.splitting.preserves_epq(&g.linear);
        let commutes = commutant_check(&g.linear, &spec.splitting).unwrap_or(false);
        ok &= eq && epq && commutes;
        w.push(json!({ "generator": g.name, "preserves_eq": eq, "preserves_epq": epq, "commutes_with_projector": commutes }));
    }
    checks.push(entry("splitting preserved", ok, json!(w)));

    let mut ok = true;
    let mut w = Vec::new();
    for g in &spec.generators {
        for (j, name) in spec.base.coord_names().iter().enumerate() {
            let col: Vec<Vec<_>> = (0..spec.p).map(|i| g.coupling.get(i, j).clone()).collect();
            if col.iter().all(|e| k.is_zero(e)) {
                continue;
            }
            let inside = NFVector::new(&spec.field, col).is_ok_and(|v| spec.splitting.epq_contains_k(&v));
            ok &= inside;
            w.push(json!({ "generator": g.name, "coordinate": name, "column_in_epq": inside }));
        }
    }
    checks.push(entry("translation constant along E^q", ok, json!(w)));

    let gens: Vec<RatMatrix> = spec.generators.iter().map(|g| g.linear.clone()).collect();
    let cert = similarity_certificate(&gens, &spec.splitting, None);
    match &cert {
        Ok(c) => {
            let ratios: Vec<Value> = spec
                .generators
                .iter()
                .zip(&c.ratios)
                .map(|(g, r)| json!({ "generator": g.name, "ratio": r.to_json() }))
                .collect();
            let form: Vec<Vec<ElemJson>> = c.scalar_product.row_vecs().iter().map(|r| r.iter().map(|e| ElemJson::from_coords(e)).collect()).collect();
            checks.push(entry("similarities on E^q", true, json!({ "scalar_product": form, "ratios": ratios })));
            let strict: Vec<&str> = spec.generators.iter().zip(&c.ratios).filter(|(_, r)| !r.is_one()).map(|(g, _)| g.name.as_str()).collect();
            checks.push(entry("not all isometries", !strict.is_empty(), json!({ "non_isometric_generators": strict })));
        }
        Err(e) => {
            checks.push(entry("similarities on E^q", false, json!({ "error": e.to_string() })));
            checks.push(entry("not all isometries", false, json!({ "error": "no similarity certificate" })));
        }
    }

    match density_check(&spec.splitting.basis_eq) {
        Ok(d) => checks.push(entry("E^q dense in the torus", d.dense, serde_json::to_value(d.to_json()).unwrap_or(Value::Null))),
        Err(e) => checks.push(entry("E^q dense in the torus", false, json!({ "error": e.to_string() }))),
    }

    let mut ok = true;
    let mut w = Vec::new();
    for fp in &spec.base_fixed_points {
        let word = fp.word.display(&spec.names());
        let point: Vec<ElemJson> = fp.point.iter().map(|e| ElemJson::from_coords(e)).collect();
        match evaluate_word(&fp.word, spec).and_then(|f| fiber_fixed_point_free(&f, &fp.point)) {
            Ok(r) => {
                ok &= r.free;
                w.push(json!({ "word": word, "point": point, "result": r.to_json() }));
            }
            Err(e) => {
                ok = false;
                w.push(json!({ "word": word, "point": point, "error": e.to_string() }));
            }
        }
    }
    checks.push(entry("no fixed points on fibres over fixed points", ok, json!(w)));

    let mut ok = true;
    let mut w = Vec::new();
    for rel in &spec.relations {
        match verify_relation(rel, spec) {
            Ok(r) => {
                ok &= r.verdict();
                w.push(serde_json::to_value(r.to_json()).unwrap_or(Value::Null));
            }
            Err(e) => {
                ok = false;
                w.push(json!({ "name": rel.name, "error": e.to_string() }));
            }
        }
    }
    checks.push(entry("relations", ok, json!(w)));

    checks.push(HypothesisCheck {
        hypothesis: "proper cocompact base action".into(),
        verdict: spec.properness_certificate.is_some(),
        mandatory: false,
        witness: json!({
            "certificate": spec.properness_certificate,
            "proven": false,
            "orbit_spot_checks": orbit_spot_checks(spec),
        }),
    });

    let admissible = checks.iter().all(|c| !c.mandatory || c.verdict);
    AdmissibilityReport { spec: spec.name.clone(), admissible, checks }
}

/// A point of the base chart away from special positions.
fn sample_base_point(spec: &GroupSpec) -> DVector<f64> {
    let mut x = Vec::new();
    for (kind, r) in spec.base.ranges() {
        match kind {
            FactorKind::Euclidean => x.extend(r.enumerate().map(|(i, _)| 0.31 + 0.17 * i as f64)),
            FactorKind::HalfLine => x.extend(r.map(|_| 1.3)),
            FactorKind::Sphere2 => x.extend([0.48, 0.36, 0.8]),
        }
    }
    DVector::from_vec(x)
}

/// Distinct base maps among words of length at most 3 and how many of them
/// move a sample point by less than 1.
fn orbit_spot_checks(spec: &GroupSpec) -> Value {
    let mut letters: Vec<NumericAutomorphism> = Vec::new();
    for g in &spec.generators {
        letters.push(g.to_f64());
        if let Ok(i) = g.inverse() {
            letters.push(i.to_f64());
        }
    }
    let base = |f: &NumericAutomorphism| (f.base_matrix.clone(), f.base_shift.clone());
    let n = spec.base.dim();
    let mut ball: Vec<(nalgebra::DMatrix<f64>, DVector<f64>)> = vec![(nalgebra::DMatrix::identity(n, n), DVector::zeros(n))];
    let mut frontier = ball.clone();
    for _ in 0..3 {
        let mut next = Vec::new();
        for (m, s) in &frontier {
            for l in &letters {
                let (lm, ls) = base(l);
                let cand = (&lm * m, &lm * s + ls);
                let seen = ball.iter().chain(&next).any(|(a, b): &(nalgebra::DMatrix<f64>, DVector<f64>)| (a - &cand.0).amax() < 1e-9 && (b - &cand.1).amax() < 1e-9);
                if !seen {
                    next.push(cand);
                }
            }
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    let x = sample_base_point(spec);
    let near = ball.iter().filter(|(m, s)| (m * &x + s - &x).norm() < 1.0).count();
    json!({ "point": x.as_slice(), "word_length": 3, "distinct_base_maps": ball.len(), "within_distance_1": near })
}
