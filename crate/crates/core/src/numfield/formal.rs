use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::element::{NFVector, NumberField};
use super::interval::{pi_interval, Interval};
use crate::error::{invalid, Result};
use crate::linalg::{rat_to_f64, Matrix, Rat, RatMatrix};

/// Vector `a + π·b` with `a, b ∈ Kᵖ`, where π is treated as a symbol that is
/// linearly independent from `K` over `ℚ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalVector {
    pub base: NFVector,
    pub pi: Option<NFVector>,
}

impl FormalVector {
    pub fn plain(v: NFVector) -> Self {
        FormalVector { base: v, pi: None }
    }

    pub fn with_pi(base: NFVector, pi: NFVector) -> Result<Self> {
        if base.len() != pi.len() || !NumberField::same(base.field(), pi.field()) {
            return invalid("parts of a formal vector must share length and field");
        }
        Ok(FormalVector { base, pi: Some(pi) })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.base.field()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn has_pi(&self) -> bool {
        self.pi.as_ref().is_some_and(|p| !p.is_zero())
    }

    /// Rows over `ℚ`: one per basis element `θʲ`, then `π·θʲ` when a π-part is present.
    pub fn rational_rows(&self) -> Vec<Vec<Rat>> {
        let mut rows = super::element::rational_coordinates(&self.base).row_vecs();
        if let Some(p) = &self.pi {
            rows.extend(super::element::rational_coordinates(p).row_vecs());
        }
        rows
    }

    /// Substitute a rational value for π.
    pub fn specialize(&self, s: &Rat) -> NFVector {
        match &self.pi {
            None => self.base.clone(),
            Some(p) => {
                let k = self.field();
                let sk = super::element::NFElement::from_rat(k, s);
                self.base.add(&p.scale(&sk))
            }
        }
    }

    /// `M·v` for a rational matrix.
    pub fn apply(&self, m: &RatMatrix) -> FormalVector {
        FormalVector { base: self.base.apply(m), pi: self.pi.as_ref().map(|p| p.apply(m)) }
    }

    /// Approximate real vector, using the real embedding of `K` and π.
    pub fn approx(&self) -> Vec<f64> {
        let b = self.base.approx();
        let pi = rat_to_f64(&pi_interval().mid());
        match &self.pi {
            None => b.iter().map(|x| x.0).collect(),
            Some(p) => b.iter().zip(p.approx()).map(|(x, y)| x.0 + pi * y.0).collect(),
        }
    }

    /// Interval enclosure of each entry under the real embedding, with π enclosed too.
    pub fn enclose(&self, precision: &Rat) -> Vec<Interval> {
        let pi = pi_interval();
        (0..self.len())
            .map(|i| {
                let a = self.base.entry(i).embed(precision);
                let a = a.real().cloned().unwrap_or_else(|| Interval::point(Rat::zero()));
                match &self.pi {
                    None => a,
                    Some(p) => {
                        let b = p.entry(i).embed(precision);
                        let b = b.real().cloned().unwrap_or_else(|| Interval::point(Rat::zero()));
                        a.add(&b.mul(&pi))
                    }
                }
            })
            .collect()
    }
}

/// Rank over `K(π)` of formal vectors with π transcendental.
///
/// Each minor is a polynomial in π of degree at most the vector count, so the
/// rank at one of `count + 1` distinct rational values equals the generic rank.
pub fn formal_rank(vectors: &[FormalVector]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let k = first.field().clone();
    if vectors.iter().any(|v| !NumberField::same(v.field(), &k) || v.len() != first.len()) {
        return invalid("formal vectors must share field and length");
    }
    let any_pi = vectors.iter().any(|v| v.has_pi());
    let samples = if any_pi { vectors.len() + 1 } else { 1 };
    let mut best = 0;
    for s in 0..samples {
        let s = Rat::from_integer(BigInt::from(s as i64));
        let rows: Vec<Vec<Vec<Rat>>> = vectors.iter().map(|v| v.specialize(&s).raw().to_vec()).collect();
        let m = Matrix::from_rows(rows);
        best = best.max(m.rank_in(&*k));
    }
    Ok(best)
}

/// Whether `v` lies in the `K(π)`-span of `basis`.
pub fn formal_in_span(basis: &[FormalVector], v: &FormalVector) -> Result<bool> {
    let r = formal_rank(basis)?;
    let mut all = basis.to_vec();
    all.push(v.clone());
    Ok(formal_rank(&all)? == r)
}
