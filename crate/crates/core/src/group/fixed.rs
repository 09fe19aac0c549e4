use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::automorphism::{BundleAutomorphism, KVec};
use super::spec::ElemJson;
use crate::error::{Error, Result};
use crate::linalg::{matrix_order, solve_integer, Field, IntegerSolution, Rat, RatMatrix};
use crate::numfield::element::to_k_matrix;
use crate::numfield::NumberField;

/// `v ↦ Av + b` with `Aᵐ = I`, split along `V₁ = ker(A − I)` and `V₂ = ker R(A)`
/// where `Xᵐ − 1 = (X − 1)R(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFixedPoints {
    pub order: u64,
    pub b1: KVec,
    pub b2: KVec,
    /// The unique `v₂ ∈ V₂` with `(I − A)v₂ = b₂`.
    pub v2: KVec,
    /// Fixed points exist iff `b₁ = 0`; they then form `v₂ + V₁`.
    pub has_fixed_point: bool,
}

/// `R(A) = I + A + … + A^{m−1}`.
fn r_of(a: &RatMatrix, m: u64) -> RatMatrix {
    let mut acc = RatMatrix::zero(a.rows(), a.rows());
    let mut pw = RatMatrix::identity(a.rows());
    for _ in 0..m {
        acc = acc.add(&pw);
        pw = pw.mul(a);
    }
    acc
}

pub fn affine_fixed_point_analysis(field: &Arc<NumberField>, a: &RatMatrix, b: &KVec) -> Result<AffineFixedPoints> {
    let k = &**field;
    let m = matrix_order(a)?
        .finite()
        .ok_or_else(|| Error::InvalidInput("linear part has infinite order".into()))?;
    let p = a.rows();
    if b.len() != p {
        return Err(Error::InvalidInput("translation has the wrong length".into()));
    }
    let r = r_of(a, m);
    let pi1 = to_k_matrix(k, &r.scale(&Rat::new(1.into(), BigInt::from(m))));
    let b1 = pi1.mul_vec_in(k, b);
    let b2: KVec = b.iter().zip(&b1).map(|(x, y)| k.sub(x, y)).collect();
    let stacked = to_k_matrix(k, &RatMatrix::identity(p).sub(a)).vstack(&to_k_matrix(k, &r));
    let mut rhs = b2.clone();
    rhs.extend(std::iter::repeat(k.zero()).take(p));
    let v2 = stacked.solve_in(k, &rhs).expect("I − A is invertible on ker R(A)");
    let has_fixed_point = b1.iter().all(|e| k.is_zero(e));
    Ok(AffineFixedPoints { order: m, b1, b2, v2, has_fixed_point })
}

/// Whether no lift `f + z`, `z ∈ ℤᵖ`, fixes a point of the fibre over `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberFixedPoints {
    pub free: bool,
    pub order: u64,
    /// Translation part at `x`.
    pub translation: KVec,
    /// Its component in `ker(A − I)`.
    pub b1: KVec,
    /// A correction whose lift has a fixed point, when one exists.
    pub witness: Option<Vec<BigInt>>,
    pub fixed_point: Option<KVec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberJson {
    pub free: bool,
    pub order: u64,
    pub translation: Vec<ElemJson>,
    pub b1: Vec<ElemJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

impl FiberFixedPoints {
    pub fn to_json(&self) -> FiberJson {
        let v = |x: &KVec| x.iter().map(|e| ElemJson::from_coords(e)).collect();
        FiberJson {
            free: self.free,
            order: self.order,
            translation: v(&self.translation),
            b1: v(&self.b1),
            witness: self.witness.as_ref().map(|w| w.iter().map(|z| z.to_string()).collect()),
        }
    }
}

/// A lift has a fixed point on `ℝᵖ × {x}` iff `π₁(b + z) = 0` for some
/// `z ∈ ℤᵖ`, with `π₁ = R(A)/m` the projector onto `ker(A − I)` along
/// `ker R(A)` and `b = τ(x)`.
pub fn fiber_fixed_point_free(f: &BundleAutomorphism, x: &KVec) -> Result<FiberFixedPoints> {
    let k = &*f.field;
    if x.len() != f.base_dim() {
        return Err(Error::InvalidInput("base point has the wrong dimension".into()));
    }
    if f.base_apply(x) != *x {
        return Err(Error::InvalidInput(format!("{} does not fix the base point", f.name)));
    }
    let m = matrix_order(&f.linear)?
        .finite()
        .ok_or_else(|| Error::Unsupported(format!("{} has a linear part of infinite order", f.name)))?;
    let b = f.translation_at(x);
    let analysis = affine_fixed_point_analysis(&f.field, &f.linear, &b)?;
    let r = r_of(&f.linear, m);
    let d = k.degree();
    let irrational_b1 = (1..d).any(|j| {
        let bj: Vec<Rat> = b.iter().map(|e| e[j].clone()).collect();
        r.mul_vec(&bj).iter().any(|v| !v.is_zero())
    });
    let mut out = FiberFixedPoints { free: true, order: m, translation: b.clone(), b1: analysis.b1, witness: None, fixed_point: None };
    if irrational_b1 {
        return Ok(out);
    }
    let b0: Vec<Rat> = b.iter().map(|e| e[0].clone()).collect();
    let target: Vec<Rat> = r.mul_vec(&b0).into_iter().map(|v| -v).collect();
    if let IntegerSolution::Integer(z) = solve_integer(&r, &target)? {
        let shifted: KVec = b.iter().zip(&z).map(|(e, zi)| k.add(e, &k.rat_coords(&Rat::from_integer(zi.clone())))).collect();
        let fp = affine_fixed_point_analysis(&f.field, &f.linear, &shifted)?;
        debug_assert!(fp.has_fixed_point);
        out.free = false;
        out.witness = Some(z);
        out.fixed_point = Some(fp.v2);
    }
    Ok(out)
}

/// Brute-force counterpart: solves `(I − A)v = b + z` for every `z` within
/// `radius` of the lattice point nearest to `−b`.
pub fn fixed_point_in_box(f: &BundleAutomorphism, x: &KVec, radius: i64) -> Result<Option<Vec<BigInt>>> {
    let k = &*f.field;
    let b = f.translation_at(x);
    let centre: Vec<BigInt> = b.iter().map(|e| -e[0].round().to_integer()).collect();
    let p = f.p();
    let i_a = to_k_matrix(k, &RatMatrix::identity(p).sub(&f.linear));
    let width = (2 * radius + 1) as usize;
    let total = width.pow(p as u32);
    for idx in 0..total {
        let mut rem = idx;
        let z: Vec<BigInt> = centre
            .iter()
            .map(|c| {
                let v = (rem % width) as i64 - radius;
                rem /= width;
                c + v
            })
            .collect();
        let shifted: KVec = b.iter().zip(&z).map(|(e, zi)| k.add(e, &k.rat_coords(&Rat::from_integer(zi.clone())))).collect();
        if i_a.solve_in(k, &shifted).is_some() {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// The matrix of an exact fixed-point check: `A v + b = v`.
pub fn is_fixed(field: &NumberField, a: &RatMatrix, b: &KVec, v: &KVec) -> bool {
    let av = to_k_matrix(field, a).mul_vec_in(field, v);
    av.iter().zip(b).map(|(x, y)| field.add(x, y)).eq(v.iter().cloned())
}
