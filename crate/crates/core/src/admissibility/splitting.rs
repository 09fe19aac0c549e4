use std::cmp::Ordering;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::json::{self, Num};
use crate::linalg::{lattice_saturate, Field, Lattice, Matrix, Rat, RatMatrix};
use crate::numfield::element::to_k_matrix;
use crate::numfield::{formal_rank, FormalVector, NFElement, NFVector, NumberField};

/// Matrix with entries in a number field, stored as power-basis coordinates.
pub type KMatrix = Matrix<Vec<Rat>>;

/// `ℝᵖ = E^q ⊕ E^{p−q}` with a scalar product on `E^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub field: Arc<NumberField>,
    pub p: usize,
    pub basis_eq: Vec<FormalVector>,
    pub basis_epq: Vec<FormalVector>,
    /// Gram matrix of `g_{E^q}` in `basis_eq`, entries in the field.
    pub scalar_product: KMatrix,
    /// Projector onto `E^q` along `E^{p−q}`; absent when a basis vector has a π-part.
    pub projector: Option<KMatrix>,
}

impl Splitting {
    pub fn new(basis_eq: Vec<FormalVector>, basis_epq: Vec<FormalVector>, scalar_product: Option<KMatrix>) -> Result<Splitting> {
        let Some(first) = basis_eq.first() else {
            return invalid("E^q needs at least one basis vector");
        };
        let field = first.field().clone();
        let p = first.len();
        let q = basis_eq.len();
        if q >= p {
            return invalid(format!("E^q has dimension {q}, which must be smaller than p = {p}"));
        }
        if basis_epq.len() != p - q {
            return invalid(format!("E^(p-q) has {} basis vectors, expected {}", basis_epq.len(), p - q));
        }
        let all: Vec<FormalVector> = basis_eq.iter().chain(&basis_epq).cloned().collect();
        if all.iter().any(|v| v.len() != p || !NumberField::same(v.field(), &field)) {
            return invalid("splitting vectors must share field and length");
        }
        if formal_rank(&all)? != p {
            return Err(Error::NotAdmissible("E^q and E^(p-q) do not span the ambient space".into()));
        }
        let g = scalar_product.unwrap_or_else(|| Matrix::identity_in(&*field, q));
        if g.rows() != q || g.cols() != q {
            return invalid("scalar product has the wrong size");
        }
        if g.transpose() != g {
            return Err(Error::NotPositiveDefinite("scalar product is not symmetric".into()));
        }
        if !positive_definite(&field, &g)? {
            return Err(Error::NotPositiveDefinite("scalar product on E^q is not positive definite".into()));
        }
        let projector = if all.iter().any(FormalVector::has_pi) { None } else { Some(projector(&field, &basis_eq, &basis_epq)?) };
        Ok(Splitting { field, p, basis_eq, basis_epq, scalar_product: g, projector })
    }

    pub fn q(&self) -> usize {
        self.basis_eq.len()
    }

    pub fn has_pi(&self) -> bool {
        self.basis_eq.iter().chain(&self.basis_epq).any(FormalVector::has_pi)
    }

    /// Matrix of `M|_{E^q}` in `basis_eq`, or `None` if `M` does not preserve `E^q`.
    pub fn restrict_eq(&self, m: &RatMatrix) -> Option<KMatrix> {
        restrict(&self.field, &self.basis_eq, m)
    }

    pub fn preserves_epq(&self, m: &RatMatrix) -> bool {
        restrict(&self.field, &self.basis_epq, m).is_some()
    }

    /// Whether `v ∈ E^{p−q}`, as a rational vector.
    pub fn epq_contains(&self, v: &[Rat]) -> bool {
        let v = FormalVector::plain(NFVector::from_rats(&self.field, v));
        coordinates(&self.field, &self.basis_epq, &v).is_some()
    }

    pub fn epq_contains_k(&self, v: &NFVector) -> bool {
        coordinates(&self.field, &self.basis_epq, &FormalVector::plain(v.clone())).is_some()
    }
}

/// Coefficients in the field expressing `v` in `basis`, treating π as independent.
pub fn coordinates(field: &Arc<NumberField>, basis: &[FormalVector], v: &FormalVector) -> Option<Vec<Vec<Rat>>> {
    let p = v.len();
    let zero = field.zero();
    let stacked = |f: &FormalVector| -> Vec<Vec<Rat>> {
        let mut col = f.base.raw().to_vec();
        match &f.pi {
            Some(pi) => col.extend(pi.raw().iter().cloned()),
            None => col.extend(std::iter::repeat(zero.clone()).take(p)),
        }
        col
    };
    if basis.is_empty() {
        return stacked(v).iter().all(|e| field.is_zero(e)).then(Vec::new);
    }
    let cols: Vec<Vec<Vec<Rat>>> = basis.iter().map(stacked).collect();
    let m = Matrix::from_columns(2 * p, &cols);
    m.solve_in(&**field, &stacked(v))
}

fn restrict(field: &Arc<NumberField>, basis: &[FormalVector], m: &RatMatrix) -> Option<KMatrix> {
    let cols: Vec<Vec<Vec<Rat>>> = basis.iter().map(|b| coordinates(field, basis, &b.apply(m))).collect::<Option<_>>()?;
    Some(Matrix::from_columns(basis.len(), &cols))
}

fn projector(field: &Arc<NumberField>, eq: &[FormalVector], epq: &[FormalVector]) -> Result<KMatrix> {
    let p = eq[0].len();
    let cols: Vec<Vec<Vec<Rat>>> = eq.iter().chain(epq).map(|v| v.base.raw().to_vec()).collect();
    let basis = Matrix::from_columns(p, &cols);
    let inv = basis.inverse_in(&**field).ok_or_else(|| Error::NotAdmissible("splitting basis is singular".into()))?;
    let keep = Matrix::from_fn(p, p, |i, j| if i == j && i < eq.len() { field.one() } else { field.zero() });
    let proj = basis.mul_in(&**field, &keep).mul_in(&**field, &inv);
    debug_assert_eq!(proj.mul_in(&**field, &proj), proj);
    Ok(proj)
}

/// Symmetric positive definiteness over a real field, by exact `LDLᵀ` pivots.
pub fn positive_definite(field: &Arc<NumberField>, g: &KMatrix) -> Result<bool> {
    if !field.is_real() {
        return invalid("positive definiteness needs a real embedding");
    }
    let n = g.rows();
    let mut a = g.clone();
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if NFElement::new(field, pivot.clone())?.sign()? != Ordering::Greater {
            return Ok(false);
        }
        let inv = field.inv(&pivot).expect("nonzero pivot");
        for i in k + 1..n {
            let f = field.mul(a.get(i, k), &inv);
            for j in k..n {
                let v = field.sub(a.get(i, j), &field.mul(&f, a.get(k, j)));
                a.set(i, j, v);
            }
        }
    }
    Ok(true)
}

/// `M·𝐏 = 𝐏·M`, or invariance of both summands when no projector is available.
pub fn commutant_check(m: &RatMatrix, splitting: &Splitting) -> Result<bool> {
    if m.rows() != splitting.p || !m.is_square() {
        return invalid("matrix size does not match the splitting");
    }
    match &splitting.projector {
        Some(proj) => {
            let k = &*splitting.field;
            let mk = to_k_matrix(k, m);
            Ok(mk.mul_in(k, proj) == proj.mul_in(k, &mk))
        }
        None => Ok(splitting.restrict_eq(m).is_some() && splitting.preserves_epq(m)),
    }
}

/// Smallest rational subspace containing the span, as the saturated lattice
/// of its integer points.
pub fn rational_hull(vectors: &[FormalVector]) -> Result<Lattice> {
    let Some(first) = vectors.first() else {
        return invalid("rational hull of an empty family needs an ambient dimension");
    };
    let p = first.len();
    let rows: Vec<Vec<Rat>> = vectors.iter().flat_map(FormalVector::rational_rows).collect();
    lattice_saturate(p, &rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub dense: bool,
    pub hull: Lattice,
    /// The verdict treats π as independent of the field over `ℚ`.
    pub assumes_pi_independent: bool,
}

impl DensityReport {
    pub fn to_json(&self) -> DensityJson {
        DensityJson {
            dense: self.dense,
            hull_rank: self.hull.rank(),
            ambient_dim: self.hull.ambient_dim(),
            hull_basis: json::matrix_json(self.hull.basis()),
            assumes_pi_independent: self.assumes_pi_independent,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityJson {
    pub dense: bool,
    pub hull_rank: usize,
    pub ambient_dim: usize,
    pub hull_basis: Vec<Vec<Num>>,
    pub assumes_pi_independent: bool,
}

/// The span projects densely to `ℝᵖ/ℤᵖ` iff no proper rational subspace contains it.
pub fn density_check(vectors: &[FormalVector]) -> Result<DensityReport> {
    let hull = rational_hull(vectors)?;
    Ok(DensityReport {
        dense: hull.is_full(),
        assumes_pi_independent: vectors.iter().any(FormalVector::has_pi),
        hull,
    })
}

/// Convenience wrapper for plain vectors.
pub fn plain(vs: &[NFVector]) -> Vec<FormalVector> {
    vs.iter().cloned().map(FormalVector::plain).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio, PolyZ};
    use crate::numfield::{Interval, RootBox};

    fn sqrt5() -> Arc<NumberField> {
        NumberField::new(PolyZ::from_i64(&[-5, 0, 1]), RootBox::Real(Interval::new(rat(2), rat(3)))).unwrap()
    }

    #[test]
    fn hulls() {
        let k = sqrt5();
        let v = NFVector::new(&k, vec![vec![rat(1), rat(0)], vec![ratio(1, 2), ratio(1, 2)]]).unwrap();
        let d = density_check(&plain(&[v])).unwrap();
        assert!(d.dense);
        let line = NFVector::from_rats(&k, &[rat(1), rat(0)]);
        let d = density_check(&plain(&[line])).unwrap();
        assert!(!d.dense);
        assert_eq!(d.hull.basis_vectors(), vec![vec![rat(1), rat(0)]]);
        let w = NFVector::new(&k, vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)], vec![rat(0), rat(0)], vec![rat(0), rat(0)]]).unwrap();
        let h = rational_hull(&plain(&[w])).unwrap();
        assert_eq!(h.rank(), 2);
        assert!(h.contains(&[rat(0), rat(1), rat(0), rat(0)]));
    }

    #[test]
    fn projectors() {
        let q = NumberField::rationals();
        let e1 = FormalVector::plain(NFVector::from_rats(&q, &[rat(1), rat(0)]));
        let e2 = FormalVector::plain(NFVector::from_rats(&q, &[rat(0), rat(1)]));
        let s = Splitting::new(vec![e1], vec![e2], None).unwrap();
        let swap = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert!(!commutant_check(&swap, &s).unwrap());
        assert!(commutant_check(&RatMatrix::from_i64(&[&[2, 0], &[0, 3]]), &s).unwrap());
        let bad = Matrix::from_rows(vec![vec![vec![rat(-1)]]]);
        let e1 = FormalVector::plain(NFVector::from_rats(&q, &[rat(1), rat(0)]));
        let e2 = FormalVector::plain(NFVector::from_rats(&q, &[rat(0), rat(1)]));
        assert!(Splitting::new(vec![e1], vec![e2], Some(bad)).is_err());
    }
}
