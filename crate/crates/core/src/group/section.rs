use nalgebra::DVector;
use serde::Serialize;

use super::automorphism::{BundleAutomorphism, KVec, NumericAutomorphism};
use super::spec::{evaluate_word, ElemJson, GroupSpec};
use super::word::{Letter, Word};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::metric::expr::{Expr, KPoly};
use crate::numfield::element::to_k_matrix;

/// One generator after conjugation by `φ(a, x) = (a + s(x), x)`.
#[derive(Debug, Clone)]
pub struct ConjugatedGenerator {
    pub name: String,
    /// `φ⁻¹ ω φ`, when its translation part is affine in the base.
    pub automorphism: Option<BundleAutomorphism>,
    /// Degree of the new translation part, when it is polynomial.
    pub degree: Option<u32>,
    pub constant_translation: bool,
    /// Largest deviation of the sampled translation part from its value at the first sample.
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct Conjugation {
    pub generators: Vec<ConjugatedGenerator>,
    /// The conjugated spec, when every generator stayed in the affine model.
    pub spec: Option<GroupSpec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugatedJson {
    pub name: String,
    pub constant_translation: bool,
    pub degree: Option<u32>,
    pub spread: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<ElemJson>>,
}

impl Conjugation {
    pub fn to_json(&self) -> Vec<ConjugatedJson> {
        self.generators
            .iter()
            .map(|g| ConjugatedJson {
                name: g.name.clone(),
                constant_translation: g.constant_translation,
                degree: g.degree,
                spread: g.spread,
                translation: g.automorphism.as_ref().map(|a| a.constant.iter().map(|c| ElemJson::from_coords(c)).collect()),
            })
            .collect()
    }
}

/// Translation part of `φ⁻¹ ω φ` at a numeric base point:
/// `A s(x) + c + L x − s(ω(x))`.
fn conjugated_translation_f64(f: &NumericAutomorphism, s: &[Expr], x: &[f64]) -> DVector<f64> {
    let xv = DVector::from_column_slice(x);
    let sx = DVector::from_iterator(s.len(), s.iter().map(|e| e.eval(x)));
    let fx = &f.base_matrix * &xv + &f.base_shift;
    let sfx = DVector::from_iterator(s.len(), s.iter().map(|e| e.eval(fx.as_slice())));
    &f.linear * sx + &f.constant + &f.coupling * xv - sfx
}

/// Conjugates every generator by the fibre shift `s : C → ℝᵖ`. The new
/// translation part is computed exactly when `s` is polynomial over the
/// field, and sampled at `points` in every case.
pub fn conjugate_by_section(spec: &GroupSpec, s: &[Expr], points: &[Vec<f64>], tol: f64) -> Result<Conjugation> {
    let k = &*spec.field;
    let n = spec.base.dim();
    if s.len() != spec.p {
        return Err(Error::InvalidInput(format!("section has {} components, expected {}", s.len(), spec.p)));
    }
    if points.iter().any(|x| x.len() != n) {
        return Err(Error::InvalidInput("sample point has the wrong dimension".into()));
    }
    let polys: Option<Vec<KPoly>> = s.iter().map(|e| e.to_poly(&spec.field, n)).collect();
    let mut out = Vec::new();
    for f in &spec.generators {
        let num = f.to_f64();
        let spread = match points.first() {
            None => 0.0,
            Some(x0) => {
                let t0 = conjugated_translation_f64(&num, s, x0);
                points.iter().map(|x| (conjugated_translation_f64(&num, s, x) - &t0).amax()).fold(0.0, f64::max)
            }
        };
        let (automorphism, degree) = match &polys {
            None => (None, None),
            Some(ps) => {
                let a = to_k_matrix(k, &f.linear);
                let tau: Vec<KPoly> = (0..spec.p)
                    .map(|i| {
                        let mut t = KPoly::constant(&spec.field, n, f.constant[i].clone());
                        for j in 0..spec.p {
                            t = t.add(&ps[j].scale(a.get(i, j)));
                        }
                        for j in 0..n {
                            t = t.add(&KPoly::var(&spec.field, n, j).scale(f.coupling.get(i, j)));
                        }
                        t.sub(&ps[i].compose_affine(&f.base.matrix, &f.base.shift))
                    })
                    .collect();
                let degree = tau.iter().map(KPoly::degree).max().unwrap_or(0);
                let parts: Option<Vec<_>> = tau.iter().map(KPoly::affine_parts).collect();
                let auto = parts.map(|parts| {
                    let mut g = f.clone();
                    g.constant = parts.iter().map(|(c, _)| c.clone()).collect();
                    g.coupling = Matrix::from_rows(parts.iter().map(|(_, l)| l.clone()).collect());
                    g
                });
                (auto, Some(degree))
            }
        };
        let constant_translation = match degree {
            Some(d) => d == 0,
            None => spread <= tol,
        };
        out.push(ConjugatedGenerator { name: f.name.clone(), automorphism, degree, constant_translation, spread });
    }
    let spec = if out.iter().all(|g| g.automorphism.is_some()) {
        let mut c = spec.clone();
        c.generators = out.iter().map(|g| g.automorphism.clone().expect("checked")).collect();
        Some(c)
    } else {
        None
    };
    Ok(Conjugation { generators: out, spec })
}

/// Two generators whose commutator is a nonzero lattice translation while both
/// linear parts are the identity can never be conjugated, by any fibre shift,
/// into forms with constant translation parts: such forms would commute,
/// and `φ τ_v φ⁻¹ = τ_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationObstruction {
    pub commutator: KVec,
    pub linear_identity: bool,
    pub obstructs: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionJson {
    pub commutator: Vec<ElemJson>,
    pub linear_identity: bool,
    pub obstructs: bool,
}

impl TranslationObstruction {
    pub fn to_json(&self) -> ObstructionJson {
        ObstructionJson {
            commutator: self.commutator.iter().map(|c| ElemJson::from_coords(c)).collect(),
            linear_identity: self.linear_identity,
            obstructs: self.obstructs,
        }
    }
}

pub fn commutator_word(g: usize, h: usize) -> Word {
    Word(vec![Letter::Commutator(Box::new(Letter::Gen { index: g, power: 1 }), Box::new(Letter::Gen { index: h, power: 1 }))])
}

pub fn constant_translation_obstruction(spec: &GroupSpec, g: &str, h: &str) -> Result<TranslationObstruction> {
    let names = spec.names();
    let gi = names.iter().position(|n| n == g).ok_or_else(|| Error::InvalidInput(format!("unknown generator `{g}`")))?;
    let hi = names.iter().position(|n| n == h).ok_or_else(|| Error::InvalidInput(format!("unknown generator `{h}`")))?;
    let c = evaluate_word(&commutator_word(gi, hi), spec)?;
    let commutator = c
        .pure_translation()
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("[{g}, {h}] is not a pure translation")))?;
    let linear_identity = spec.generators[gi].linear.is_identity() && spec.generators[hi].linear.is_identity();
    let nonzero = commutator.iter().any(|e| !spec.field.is_zero(e));
    Ok(TranslationObstruction { commutator, linear_identity, obstructs: linear_identity && nonzero })
}

/// `φ [g, h] φ⁻¹` evaluated numerically at total-space points, returned as
/// the displacement `φ[g,h]φ⁻¹(y) − y` for each point.
pub fn conjugated_commutator_f64(spec: &GroupSpec, g: &str, h: &str, s: &[Expr], points: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let gi = spec.generator(g)?;
    let hi = spec.generator(h)?;
    let gn = gi.to_f64();
    let hn = hi.to_f64();
    let gin = gi.inverse()?.to_f64();
    let hin = hi.inverse()?.to_f64();
    let p = spec.p;
    let n = spec.base.dim();
    let shift = |y: &DVector<f64>, sign: f64| {
        let x: Vec<f64> = y.rows(p, n).iter().copied().collect();
        let mut out = y.clone();
        for (i, e) in s.iter().enumerate() {
            out[i] += sign * e.eval(&x);
        }
        out
    };
    Ok(points
        .iter()
        .map(|y| {
            let z = shift(y, -1.0);
            let z = hn.apply(&z);
            let z = gn.apply(&z);
            let z = hin.apply(&z);
            let z = gin.apply(&z);
            shift(&z, 1.0) - y
        })
        .collect())
}
