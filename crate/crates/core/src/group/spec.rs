use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::automorphism::{BaseAction, BaseFactor, BaseManifold, BundleAutomorphism, FactorKind, KVec};
use super::word::Word;
use crate::admissibility::{KMatrix, Splitting};
use crate::error::{invalid, Error, Result};
use crate::json::{self, Num};
use crate::linalg::{Field, Matrix, Rat};
use crate::numfield::{FormalVector, NFVector, NumberField, NumberFieldJson};

/// A field element on the wire: a rational, or power-basis coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemJson {
    Scalar(Num),
    Coords(Vec<Num>),
}

impl ElemJson {
    pub fn parse(&self, field: &NumberField) -> Result<Vec<Rat>> {
        match self {
            ElemJson::Scalar(n) => Ok(field.rat_coords(&n.to_rat()?)),
            ElemJson::Coords(c) => {
                if c.is_empty() || c.len() > field.degree() {
                    return invalid(format!("element has {} coordinates, field degree is {}", c.len(), field.degree()));
                }
                let mut v = json::rats(c)?;
                v.resize(field.degree(), Rat::default());
                Ok(v)
            }
        }
    }

    pub fn from_coords(c: &[Rat]) -> ElemJson {
        if c[1..].iter().all(|x| *x == Rat::default()) {
            ElemJson::Scalar(Num::from_rat(&c[0]))
        } else {
            ElemJson::Coords(json::nums(c))
        }
    }
}

fn parse_vec(field: &NumberField, v: &[ElemJson]) -> Result<KVec> {
    v.iter().map(|e| e.parse(field)).collect()
}

fn vec_json(v: &[Vec<Rat>]) -> Vec<ElemJson> {
    v.iter().map(|e| ElemJson::from_coords(e)).collect()
}

fn parse_kmatrix(field: &NumberField, rows: &[Vec<ElemJson>]) -> Result<KMatrix> {
    let rows = rows.iter().map(|r| parse_vec(field, r)).collect::<Result<Vec<_>>>()?;
    Matrix::try_from_rows(rows)
}

fn kmatrix_json(m: &KMatrix) -> Vec<Vec<ElemJson>> {
    m.row_vecs().iter().map(|r| vec_json(r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKindJson {
    Euclidean,
    HalfLine,
    Sphere2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorJson {
    pub kind: FactorKindJson,
    pub coords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseActionJson {
    Identity,
    Affine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<ElemJson>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Vec<ElemJson>>,
    },
    Scale {
        factor: ElemJson,
    },
    Orthogonal {
        matrix: Vec<Vec<Num>>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationJson {
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<ElemJson>>,
    /// Column of `L` per base coordinate name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub linear: BTreeMap<String, Vec<ElemJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub name: String,
    pub linear: Vec<Vec<Num>>,
    #[serde(default)]
    pub translation: TranslationJson,
    /// One action per base factor, in order; omitted means identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<BaseActionJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorJson {
    Plain(Vec<ElemJson>),
    Formal { base: Vec<ElemJson>, pi: Vec<ElemJson> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingJson {
    pub eq: Vec<VectorJson>,
    pub epq: Vec<VectorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar_product: Option<Vec<Vec<ElemJson>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<ElemJson>>,
    /// Equality only required up to a lattice translation.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub torus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub word: Vec<String>,
    #[serde(default)]
    pub equals: EqualsJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointJson {
    pub word: Vec<String>,
    /// Coordinates in the order of the base chart.
    pub point: Vec<ElemJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<NumberFieldJson>,
    pub base: Vec<FactorJson>,
    pub splitting: SplittingJson,
    pub generators: Vec<GeneratorJson>,
    #[serde(default)]
    pub relations: Vec<RelationJson>,
    #[serde(default)]
    pub base_fixed_points: Vec<FixedPointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properness_certificate: Option<String>,
}

/// Right-hand side of a relation: `translation ∘ word`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub word: Word,
    pub translation: Option<KVec>,
    pub torus: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub name: String,
    pub word: Word,
    pub equals: Expected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseFixedPoint {
    pub word: Word,
    pub point: KVec,
}

/// Generators of `Ω` lifted to `ℝᵖ × C`, with the data the hypotheses refer to.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub name: String,
    pub p: usize,
    pub field: Arc<NumberField>,
    pub base: BaseManifold,
    pub splitting: Splitting,
    pub generators: Vec<BundleAutomorphism>,
    pub relations: Vec<Relation>,
    pub base_fixed_points: Vec<BaseFixedPoint>,
    pub properness_certificate: Option<String>,
}

impl GroupSpec {
    pub fn from_json_str(s: &str) -> Result<GroupSpec> {
        let j: GroupSpecJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        GroupSpec::from_json(&j)
    }

    pub fn from_json(j: &GroupSpecJson) -> Result<GroupSpec> {
        let field = match &j.field {
            Some(f) => NumberField::from_json(f)?,
            None => NumberField::rationals(),
        };
        let k = &*field;
        let p = j.p;
        let base = BaseManifold::new(
            j.base
                .iter()
                .map(|f| BaseFactor {
                    kind: match f.kind {
                        FactorKindJson::Euclidean => FactorKind::Euclidean,
                        FactorKindJson::HalfLine => FactorKind::HalfLine,
                        FactorKindJson::Sphere2 => FactorKind::Sphere2,
                    },
                    coords: f.coords.clone(),
                })
                .collect(),
        )?;
        let n = base.dim();
        let mut generators = Vec::new();
        for g in &j.generators {
            let linear = json::matrix(&g.linear)?;
            if linear.rows() != p || !linear.is_square() {
                return invalid(format!("linear part of {} must be {p}×{p}", g.name));
            }
            if !linear.is_unimodular() {
                return invalid(format!("linear part of {} is not in GL_p(Z)", g.name));
            }
            let constant = match &g.translation.constant {
                Some(c) => parse_vec(k, c)?,
                None => vec![k.zero(); p],
            };
            if constant.len() != p {
                return invalid(format!("translation of {} has length {}", g.name, constant.len()));
            }
            let mut coupling = Matrix::zero_in(k, p, n);
            for (coord, col) in &g.translation.linear {
                let c = base.index_of(coord).ok_or_else(|| Error::InvalidInput(format!("unknown base coordinate `{coord}`")))?;
                let col = parse_vec(k, col)?;
                if col.len() != p {
                    return invalid(format!("column `{coord}` of {} has length {}", g.name, col.len()));
                }
                for (i, v) in col.into_iter().enumerate() {
                    coupling.set(i, c, v);
                }
            }
            let action = match &g.base {
                None => BaseAction::identity(k, n),
                Some(parts) => base_action(&field, &base, parts)?,
            };
            action.validate(&field, &base)?;
            generators.push(BundleAutomorphism { name: g.name.clone(), field: field.clone(), linear, constant, coupling, base: action });
        }
        let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
        if names.iter().enumerate().any(|(i, a)| names[..i].contains(a)) {
            return invalid("generator names must be unique");
        }
        let splitting = parse_splitting(&field, p, &j.splitting)?;
        let mut relations = Vec::new();
        for (i, r) in j.relations.iter().enumerate() {
            if r.word.is_empty() {
                return invalid("relation words must be non-empty");
            }
            let translation = r.equals.translation.as_ref().map(|t| parse_vec(k, t)).transpose()?;
            if translation.as_ref().is_some_and(|t| t.len() != p) {
                return invalid("relation translation has the wrong length");
            }
            relations.push(Relation {
                name: r.name.clone().unwrap_or_else(|| format!("relation {}", i + 1)),
                word: Word::parse(&r.word, &names)?,
                equals: Expected {
                    word: Word::parse(r.equals.word.as_deref().unwrap_or(&[]), &names)?,
                    translation,
                    torus: r.equals.torus,
                },
            });
        }
        let base_fixed_points = j
            .base_fixed_points
            .iter()
            .map(|f| {
                let point = parse_vec(k, &f.point)?;
                if point.len() != n {
                    return invalid(format!("base point has {} coordinates, chart has {n}", point.len()));
                }
                Ok(BaseFixedPoint { word: Word::parse(&f.word, &names)?, point })
            })
            .collect::<Result<_>>()?;
        Ok(GroupSpec {
            name: j.name.clone().unwrap_or_else(|| "group".into()),
            p,
            field,
            base,
            splitting,
            generators,
            relations,
            base_fixed_points,
            properness_certificate: j.properness_certificate.clone(),
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn generator(&self, name: &str) -> Result<&BundleAutomorphism> {
        self.generators.iter().find(|g| g.name == name).ok_or_else(|| Error::InvalidInput(format!("unknown generator `{name}`")))
    }

    pub fn identity(&self) -> BundleAutomorphism {
        BundleAutomorphism::identity(&self.field, self.p, self.base.dim())
    }

    pub fn parse_word(&self, tokens: &[&str]) -> Result<Word> {
        let t: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
        Word::parse(&t, &self.names())
    }

    pub fn to_json(&self) -> GroupSpecJson {
        let k = &*self.field;
        let names = self.names();
        let coords = self.base.coord_names();
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let mut cols = BTreeMap::new();
                for (c, name) in coords.iter().enumerate() {
                    let col = g.coupling.column(c);
                    if col.iter().any(|e| !k.is_zero(e)) {
                        cols.insert(name.clone(), vec_json(&col));
                    }
                }
                GeneratorJson {
                    name: g.name.clone(),
                    linear: json::matrix_json(&g.linear),
                    translation: TranslationJson { constant: Some(vec_json(&g.constant)), linear: cols },
                    base: if g.base.is_identity(k) { None } else { Some(base_action_json(&self.base, &g.base)) },
                }
            })
            .collect();
        let fv = |v: &FormalVector| match &v.pi {
            Some(pi) if v.has_pi() => VectorJson::Formal { base: vec_json(v.base.raw()), pi: vec_json(pi.raw()) },
            _ => VectorJson::Plain(vec_json(v.base.raw())),
        };
        let word_text = |w: &Word| -> Vec<String> { w.0.iter().map(|l| Word(vec![l.clone()]).display(&names)).collect() };
        GroupSpecJson {
            name: Some(self.name.clone()),
            p: self.p,
            field: (self.field.degree() > 1).then(|| self.field.to_json()),
            base: self
                .base
                .factors
                .iter()
                .map(|f| FactorJson {
                    kind: match f.kind {
                        FactorKind::Euclidean => FactorKindJson::Euclidean,
                        FactorKind::HalfLine => FactorKindJson::HalfLine,
                        FactorKind::Sphere2 => FactorKindJson::Sphere2,
                    },
                    coords: f.coords.clone(),
                })
                .collect(),
            splitting: SplittingJson {
                eq: self.splitting.basis_eq.iter().map(fv).collect(),
                epq: self.splitting.basis_epq.iter().map(fv).collect(),
                scalar_product: Some(kmatrix_json(&self.splitting.scalar_product)),
            },
            generators,
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson {
                    name: Some(r.name.clone()),
                    word: word_text(&r.word),
                    equals: EqualsJson {
                        word: (!r.equals.word.0.is_empty()).then(|| word_text(&r.equals.word)),
                        translation: r.equals.translation.as_ref().map(|t| vec_json(t)),
                        torus: r.equals.torus,
                    },
                })
                .collect(),
            base_fixed_points: self
                .base_fixed_points
                .iter()
                .map(|f| FixedPointJson { word: word_text(&f.word), point: vec_json(&f.point) })
                .collect(),
            properness_certificate: self.properness_certificate.clone(),
        }
    }
}

fn base_action(field: &Arc<NumberField>, base: &BaseManifold, parts: &[BaseActionJson]) -> Result<BaseAction> {
    let k = &**field;
    let ranges = base.ranges();
    if parts.len() != ranges.len() {
        return invalid(format!("base action lists {} factors, manifold has {}", parts.len(), ranges.len()));
    }
    let mut act = BaseAction::identity(k, base.dim());
    for ((kind, r), part) in ranges.iter().zip(parts) {
        let d = r.len();
        let (block, shift): (KMatrix, KVec) = match (kind, part) {
            (_, BaseActionJson::Identity) => (Matrix::identity_in(k, d), vec![k.zero(); d]),
            (FactorKind::Euclidean, BaseActionJson::Affine { matrix, shift }) => (
                match matrix {
                    Some(m) => parse_kmatrix(k, m)?,
                    None => Matrix::identity_in(k, d),
                },
                match shift {
                    Some(s) => parse_vec(k, s)?,
                    None => vec![k.zero(); d],
                },
            ),
            (FactorKind::HalfLine, BaseActionJson::Scale { factor }) => (Matrix::from_rows(vec![vec![factor.parse(k)?]]), vec![k.zero()]),
            (FactorKind::Sphere2, BaseActionJson::Orthogonal { matrix }) => {
                (json::matrix(matrix)?.map(|r| k.rat_coords(r)), vec![k.zero(); 3])
            }
            (kind, _) => return Err(Error::UnsupportedComposition(format!("action type does not fit a {kind:?} factor"))),
        };
        if block.rows() != d || block.cols() != d || shift.len() != d {
            return invalid(format!("base action block for a {kind:?} factor must be {d}×{d}"));
        }
        for i in 0..d {
            for j in 0..d {
                act.matrix.set(r.start + i, r.start + j, block.get(i, j).clone());
            }
            act.shift[r.start + i] = shift[i].clone();
        }
    }
    Ok(act)
}

fn base_action_json(base: &BaseManifold, act: &BaseAction) -> Vec<BaseActionJson> {
    base.ranges()
        .into_iter()
        .map(|(kind, r)| {
            let block: Vec<Vec<Vec<Rat>>> = r.clone().map(|i| r.clone().map(|j| act.matrix.get(i, j).clone()).collect()).collect();
            let shift: Vec<Vec<Rat>> = r.clone().map(|i| act.shift[i].clone()).collect();
            match kind {
                FactorKind::HalfLine => BaseActionJson::Scale { factor: ElemJson::from_coords(&block[0][0]) },
                FactorKind::Sphere2 => BaseActionJson::Orthogonal {
                    matrix: block.iter().map(|row| row.iter().map(|e| Num::from_rat(&e[0])).collect()).collect(),
                },
                FactorKind::Euclidean => BaseActionJson::Affine {
                    matrix: Some(block.iter().map(|row| vec_json(row)).collect()),
                    shift: Some(vec_json(&shift)),
                },
            }
        })
        .collect()
}

fn parse_vector(field: &Arc<NumberField>, v: &VectorJson) -> Result<FormalVector> {
    match v {
        VectorJson::Plain(b) => Ok(FormalVector::plain(NFVector::new(field, parse_vec(field, b)?)?)),
        VectorJson::Formal { base, pi } => {
            FormalVector::with_pi(NFVector::new(field, parse_vec(field, base)?)?, NFVector::new(field, parse_vec(field, pi)?)?)
        }
    }
}

fn parse_splitting(field: &Arc<NumberField>, p: usize, j: &SplittingJson) -> Result<Splitting> {
    let eq = j.eq.iter().map(|v| parse_vector(field, v)).collect::<Result<Vec<_>>>()?;
    let epq = j.epq.iter().map(|v| parse_vector(field, v)).collect::<Result<Vec<_>>>()?;
    if eq.iter().chain(&epq).any(|v| v.len() != p) {
        return invalid(format!("splitting vectors must have length {p}"));
    }
    let g = j.scalar_product.as_ref().map(|m| parse_kmatrix(field, m)).transpose()?;
    Splitting::new(eq, epq, g)
}

/// Exact composition of a word, the last letter acting first.
pub fn evaluate_word(word: &Word, spec: &GroupSpec) -> Result<BundleAutomorphism> {
    evaluate_with(word, &spec.generators, &spec.identity())
}

/// Evaluates a word against an explicit list of generators.
pub fn evaluate_with(word: &Word, gens: &[BundleAutomorphism], identity: &BundleAutomorphism) -> Result<BundleAutomorphism> {
    let mut inverses: BTreeMap<usize, BundleAutomorphism> = BTreeMap::new();
    let mut acc = identity.clone();
    for (i, e) in word.reduced() {
        let g = gens.get(i).ok_or_else(|| Error::InvalidInput(format!("generator index {i} out of range")))?;
        let letter = if e < 0 {
            if !inverses.contains_key(&i) {
                inverses.insert(i, g.inverse()?);
            }
            &inverses[&i]
        } else {
            g
        };
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(letter)?;
        }
    }
    Ok(acc)
}
