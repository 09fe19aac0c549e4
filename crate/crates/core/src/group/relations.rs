use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::automorphism::{BundleAutomorphism, KVec};
use super::spec::{evaluate_with, ElemJson, GroupSpec, Relation};
use crate::error::{Error, Result};
use crate::json::{self, Num};
use crate::linalg::field::is_integral;
use crate::linalg::{solve_integer, Field, IntegerSolution, Matrix, Rat, RatMatrix};

/// Outcome of checking one relation, at lattice level and exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub name: String,
    /// `word ∘ expected⁻¹`.
    pub residual: BundleAutomorphism,
    /// The residual is the identity.
    pub strict: bool,
    /// The residual is a translation by a vector of `ℤᵖ`.
    pub torus: bool,
    pub torus_only: bool,
}

impl RelationReport {
    pub fn verdict(&self) -> bool {
        if self.torus_only {
            self.torus
        } else {
            self.strict
        }
    }

    pub fn to_json(&self) -> RelationJsonReport {
        let k = &*self.residual.field;
        RelationJsonReport {
            name: self.name.clone(),
            verdict: self.verdict(),
            strict: self.strict,
            torus: self.torus,
            linear_identity: self.residual.linear.is_identity(),
            base_identity: self.residual.base.is_identity(k),
            translation_depends_on_base: self.residual.has_coupling(),
            residual_translation: self.residual.constant.iter().map(|c| ElemJson::from_coords(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationJsonReport {
    pub name: String,
    pub verdict: bool,
    pub strict: bool,
    pub torus: bool,
    pub linear_identity: bool,
    pub base_identity: bool,
    pub translation_depends_on_base: bool,
    pub residual_translation: Vec<ElemJson>,
}

fn integral_vector(v: &KVec) -> bool {
    v.iter().all(|e| is_integral(&e[0]) && e[1..].iter().all(Zero::is_zero))
}

/// Evaluates both sides of a relation and classifies the residual.
pub fn verify_relation(rel: &Relation, spec: &GroupSpec) -> Result<RelationReport> {
    verify_with(rel, &spec.generators, spec)
}

pub(crate) fn verify_with(rel: &Relation, gens: &[BundleAutomorphism], spec: &GroupSpec) -> Result<RelationReport> {
    let id = spec.identity();
    let lhs = evaluate_with(&rel.word, gens, &id)?;
    let mut rhs = evaluate_with(&rel.equals.word, gens, &id)?;
    if let Some(t) = &rel.equals.translation {
        let mut tr = id.clone();
        tr.constant = t.clone();
        rhs = tr.compose(&rhs)?;
    }
    let residual = lhs.compose(&rhs.inverse()?)?.named(format!("residual of {}", rel.name));
    let strict = residual.is_identity();
    let torus = residual.pure_translation().is_some_and(integral_vector);
    Ok(RelationReport { name: rel.name.clone(), residual, strict, torus, torus_only: rel.equals.torus })
}

/// Integer corrections `zᵍ` making every relation hold exactly, or a proof
/// that none exist.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitResult {
    Exists { lifts: Vec<Vec<BigInt>> },
    Nonexistent { system: SplitSystem, rational: Option<Vec<Rat>>, certificate: Vec<Rat> },
}

/// `M z = b` over `ℤ`, one block of rows per relation, unknowns ordered by generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSystem {
    pub matrix: RatMatrix,
    pub rhs: Vec<Rat>,
    /// Relation name for each row.
    pub rows: Vec<String>,
}

impl SplitResult {
    pub fn exists(&self) -> bool {
        matches!(self, SplitResult::Exists { .. })
    }

    pub fn to_json(&self) -> SplitJson {
        match self {
            SplitResult::Exists { lifts } => SplitJson {
                exists: true,
                lifts: Some(lifts.iter().map(|l| l.iter().map(|z| Num::Text(z.to_string())).collect()).collect()),
                system: None,
                rhs: None,
                rational_solution: None,
                certificate: None,
            },
            SplitResult::Nonexistent { system, rational, certificate } => SplitJson {
                exists: false,
                lifts: None,
                system: Some(json::matrix_json(&system.matrix)),
                rhs: Some(json::nums(&system.rhs)),
                rational_solution: rational.as_ref().map(|r| json::nums(r)),
                certificate: Some(json::nums(certificate)),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitJson {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifts: Option<Vec<Vec<Num>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<Vec<Vec<Num>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational_solution: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Num>>,
}

/// Decides whether the lifted group splits as `ℤᵖ ⋊ Ω` along the given
/// generators: each relation of `Ω` (its word against the word on the right,
/// ignoring the declared lattice correction) must hold exactly after
/// adding `zᵍ ∈ ℤᵖ` to the constant term of every generator.
pub fn splitting_obstruction(spec: &GroupSpec) -> Result<SplitResult> {
    let p = spec.p;
    let g = spec.generators.len();
    let d = spec.field.degree();
    let residual_at = |shifts: &[Vec<Rat>], rel: &Relation| -> Result<BundleAutomorphism> {
        let gens: Vec<BundleAutomorphism> = spec.generators.iter().zip(shifts).map(|(f, z)| f.shifted(z)).collect();
        let plain = Relation { equals: super::spec::Expected { translation: None, torus: false, ..rel.equals.clone() }, ..rel.clone() };
        Ok(verify_with(&plain, &gens, spec)?.residual)
    };
    let zero: Vec<Vec<Rat>> = vec![vec![Rat::zero(); p]; g];
    let mut m_rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs = Vec::new();
    let mut names = Vec::new();
    for rel in &spec.relations {
        let base = residual_at(&zero, rel)?;
        let Some(c0) = base.pure_translation().cloned() else {
            return Err(Error::Unsupported(format!(
                "{} does not hold in the quotient: its residual is not a constant translation",
                rel.name
            )));
        };
        let mut cols: Vec<KVec> = Vec::with_capacity(g * p);
        for gi in 0..g {
            for i in 0..p {
                let mut z = zero.clone();
                z[gi][i] = Rat::from_integer(1.into());
                let r = residual_at(&z, rel)?;
                let c = r.pure_translation().ok_or_else(|| Error::Unsupported(format!("{} depends on the corrections non-affinely", rel.name)))?;
                cols.push(c.iter().zip(&c0).map(|(a, b)| spec.field.sub(a, b)).collect());
            }
        }
        for j in 0..p {
            for k in 0..d {
                let row: Vec<Rat> = cols.iter().map(|c| c[j][k].clone()).collect();
                if k > 0 && row.iter().any(|x| !x.is_zero()) {
                    return Err(Error::Unsupported("corrections enter with irrational coefficients".into()));
                }
                m_rows.push(row);
                rhs.push(-c0[j][k].clone());
                names.push(rel.name.clone());
            }
        }
    }
    if rhs.iter().all(Zero::is_zero) {
        return Ok(SplitResult::Exists { lifts: vec![vec![BigInt::zero(); p]; g] });
    }
    let matrix = Matrix::from_rows(m_rows);
    match solve_integer(&matrix, &rhs)? {
        IntegerSolution::Integer(z) => Ok(SplitResult::Exists { lifts: z.chunks(p).map(|c| c.to_vec()).collect() }),
        IntegerSolution::RationalOnly { rational, certificate } => Ok(SplitResult::Nonexistent {
            system: SplitSystem { matrix, rhs, rows: names },
            rational: Some(rational),
            certificate,
        }),
        IntegerSolution::Inconsistent { certificate } => {
            Ok(SplitResult::Nonexistent { system: SplitSystem { matrix, rhs, rows: names }, rational: None, certificate })
        }
    }
}

/// `f ∘ τ_v ∘ f⁻¹ = τ_{Av}`: the conjugate of a lattice translation.
pub fn conjugate_translation(f: &BundleAutomorphism, v: &[Rat]) -> Result<BundleAutomorphism> {
    let t = BundleAutomorphism::translation(&f.field, v, f.base_dim());
    f.compose(&t)?.compose(&f.inverse()?)
}
