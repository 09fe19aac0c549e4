use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use super::splitting::{KMatrix, Splitting};
use crate::error::{invalid, Error, Result};
use crate::linalg::{rat_to_f64, Field, Rat, RatMatrix};
use crate::numfield::{Interval, NFElement, NumberField};

/// Similarity ratio `ρ > 0`, known exactly through `ρ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ratio {
    pub squared: NFElement,
    /// `ρ` itself when it was found in the field.
    pub value: Option<NFElement>,
}

impl Ratio {
    pub fn one(field: &Arc<NumberField>) -> Ratio {
        Ratio { squared: NFElement::from_i64(field, 1), value: Some(NFElement::from_i64(field, 1)) }
    }

    pub fn from_value(v: NFElement) -> Result<Ratio> {
        if v.sign()? != Ordering::Greater {
            return invalid("similarity ratio must be positive");
        }
        Ok(Ratio { squared: v.mul(&v)?, value: Some(v) })
    }

    pub fn from_squared(squared: NFElement) -> Ratio {
        let value = squared.as_rat().and_then(|r| rational_sqrt(&r)).map(|r| NFElement::from_rat(squared.field(), &r));
        Ratio { squared, value }
    }

    pub fn is_one(&self) -> bool {
        self.squared.as_rat().is_some_and(|r| r.is_one())
    }

    pub fn mul(&self, o: &Ratio) -> Result<Ratio> {
        let squared = self.squared.mul(&o.squared)?;
        let value = match (&self.value, &o.value) {
            (Some(a), Some(b)) => Some(a.mul(b)?),
            _ => None,
        };
        Ok(Ratio { squared, value })
    }

    pub fn inv(&self) -> Ratio {
        Ratio {
            squared: self.squared.inv().expect("ratio is nonzero"),
            value: self.value.as_ref().map(|v| v.inv().expect("ratio is nonzero")),
        }
    }

    /// Certified enclosure of `ρ`.
    pub fn enclosure(&self) -> Interval {
        let prec = Rat::new(BigInt::one(), BigInt::one() << 80);
        let sq = self.squared.embed(&prec);
        let sq = sq.real().cloned().unwrap_or_else(|| Interval::point(Rat::one()));
        let sq = if sq.lo.is_negative() { Interval::new(Rat::default(), sq.hi) } else { sq };
        sq.sqrt(60)
    }

    pub fn approx(&self) -> f64 {
        match &self.value {
            Some(v) => v.approx().0,
            None => rat_to_f64(&self.enclosure().mid()),
        }
    }

    pub fn to_json(&self) -> RatioJson {
        RatioJson {
            value: self.value.as_ref().map(|v| v.to_string()),
            squared: self.squared.to_string(),
            approx: self.approx(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioJson {
    pub value: Option<String>,
    pub squared: String,
    pub approx: f64,
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rat::new(n, d))
}

/// Scalar product on `E^q` together with the ratio of each generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityCertificate {
    pub scalar_product: KMatrix,
    pub ratios: Vec<Ratio>,
    /// Matrices of the generators restricted to `E^q`.
    pub restrictions: Vec<KMatrix>,
    /// `|det M|_{E^q}|^{-1/q} M|_{E^q}` is orthogonal, checked as `(ρ²)^q = det²`.
    pub normalized_orthogonal: Vec<bool>,
}

/// Ratio of `R` with respect to `G`: the `s` with `RᵀGR = s·G`.
pub fn similarity_ratio(field: &Arc<NumberField>, r: &KMatrix, g: &KMatrix) -> Result<Ratio> {
    let k = &**field;
    let lhs = r.transpose().mul_in(k, g).mul_in(k, r);
    let s = k.div(lhs.get(0, 0), g.get(0, 0)).ok_or_else(|| Error::NotPositiveDefinite("zero diagonal".into()))?;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            if *lhs.get(i, j) != k.mul(&s, g.get(i, j)) {
                return Err(Error::NotSimilarity(format!("basis pair ({i}, {j}) scales differently from (0, 0)")));
            }
        }
    }
    let squared = NFElement::new(field, s)?;
    let mut ratio = Ratio::from_squared(squared);
    if ratio.value.is_none() {
        ratio.value = scalar_value(field, r)?;
    }
    Ok(ratio)
}

/// `|c|` when `R = c·I`.
fn scalar_value(field: &Arc<NumberField>, r: &KMatrix) -> Result<Option<NFElement>> {
    let k = &**field;
    let c = r.get(0, 0).clone();
    let scalar = (0..r.rows()).all(|i| (0..r.cols()).all(|j| *r.get(i, j) == if i == j { c.clone() } else { k.zero() }));
    if !scalar || !field.is_real() {
        return Ok(None);
    }
    let e = NFElement::new(field, c)?;
    Ok(Some(if e.sign()? == Ordering::Less { e.neg() } else { e }))
}

/// Certify that every generator acts on `E^q` by similarities.
///
/// With a supplied scalar product the ratios are checked against it. Without
/// one, commuting families are tried against the identity in the splitting
/// basis and then the splitting's own scalar product.
pub fn similarity_certificate(gens: &[RatMatrix], splitting: &Splitting, supplied: Option<&KMatrix>) -> Result<SimilarityCertificate> {
    let field = &splitting.field;
    let restrictions: Vec<KMatrix> = gens
        .iter()
        .enumerate()
        .map(|(i, m)| splitting.restrict_eq(m).ok_or_else(|| Error::NotAdmissible(format!("generator {i} does not preserve E^q"))))
        .collect::<Result<_>>()?;
    let candidates: Vec<KMatrix> = match supplied {
        Some(g) => vec![g.clone()],
        None => {
            for (i, a) in gens.iter().enumerate() {
                for b in &gens[i + 1..] {
                    if a.mul(b) != b.mul(a) {
                        return Err(Error::NotFound("generators do not commute; no canonical scalar product".into()));
                    }
                }
            }
            let id = KMatrix::identity_in(&**field, splitting.q());
            if id == splitting.scalar_product { vec![id] } else { vec![id, splitting.scalar_product.clone()] }
        }
    };
    let mut last_err = None;
    for g in candidates {
        match ratios_for(field, &restrictions, &g) {
            Ok(ratios) => {
                let normalized_orthogonal = restrictions
                    .iter()
                    .zip(&ratios)
                    .map(|(r, rho)| {
                        let det = r.det_in(&**field);
                        let q = splitting.q() as i64;
                        rho.squared.pow(q).coords() == field.mul(&det, &det).as_slice()
                    })
                    .collect();
                return Ok(SimilarityCertificate { scalar_product: g, ratios, restrictions, normalized_orthogonal });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(match (supplied, last_err) {
        (Some(_), Some(e)) => e,
        (None, Some(Error::NotSimilarity(m))) => Error::NotFound(format!("no canonical scalar product works: {m}")),
        (_, Some(e)) => e,
        (_, None) => Error::NotFound("no candidate scalar product".into()),
    })
}

fn ratios_for(field: &Arc<NumberField>, restrictions: &[KMatrix], g: &KMatrix) -> Result<Vec<Ratio>> {
    restrictions.iter().map(|r| similarity_ratio(field, r, g)).collect()
}
