use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{Rat, Rationals};
use super::matrix::{IntMatrix, Matrix, RatMatrix};
use super::normal_form::{clear_row_denominators, hnf_int, snf_int};
use crate::error::{invalid, Result};

/// A subgroup of `ℤⁿ` stored by its row-style HNF basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    ambient_dim: usize,
    basis: RatMatrix,
}

impl Lattice {
    /// The ℤ-span of integer generators.
    pub fn from_generators(ambient_dim: usize, generators: &[Vec<Rat>]) -> Result<Lattice> {
        if generators.iter().any(|g| g.len() != ambient_dim) {
            return invalid("generator length differs from ambient dimension");
        }
        let m = Matrix::from_rows(generators.to_vec());
        let m = if generators.is_empty() { RatMatrix::zero(0, ambient_dim) } else { m };
        Ok(Lattice::from_int_rows(ambient_dim, &m.to_int()?))
    }

    pub(crate) fn from_int_rows(ambient_dim: usize, m: &IntMatrix) -> Lattice {
        let (h, _) = hnf_int(m);
        let nonzero: Vec<usize> = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
        let basis = if nonzero.is_empty() { RatMatrix::zero(0, ambient_dim) } else { h.select_rows(&nonzero).to_rat() };
        Lattice { ambient_dim, basis }
    }

    pub fn full(n: usize) -> Lattice {
        Lattice { ambient_dim: n, basis: RatMatrix::identity(n) }
    }

    pub fn scaled_full(n: usize, k: i64) -> Lattice {
        Lattice { ambient_dim: n, basis: RatMatrix::identity(n).scale(&Rat::from_integer(BigInt::from(k))) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        self.basis.row_vecs()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    /// Coordinates of `v` in the basis, if `v` lies in the rational span.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        if self.rank() == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        self.basis.transpose().solve_in(&Rationals, v)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coordinates(v).is_some_and(|c| c.iter().all(|x| x.denom().is_one()))
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis_vectors().iter().all(|b| other.contains(b))
    }

    /// `|other / self|` for sublattices of equal rank.
    pub fn index_in(&self, other: &Lattice) -> Option<BigInt> {
        if !self.is_sublattice_of(other) || self.rank() != other.rank() {
            return None;
        }
        let coords: Vec<Vec<Rat>> = self.basis_vectors().iter().map(|b| other.coordinates(b).unwrap()).collect();
        if coords.is_empty() {
            return Some(BigInt::one());
        }
        Some(Matrix::from_rows(coords).det().abs().to_integer())
    }
}

/// `ℤⁿ ∩ span_ℚ(vectors)` as a lattice.
pub fn lattice_saturate(ambient_dim: usize, vectors: &[Vec<Rat>]) -> Result<Lattice> {
    if vectors.iter().any(|g| g.len() != ambient_dim) {
        return invalid("spanning vector length differs from ambient dimension");
    }
    if vectors.is_empty() {
        return Ok(Lattice { ambient_dim, basis: RatMatrix::zero(0, ambient_dim) });
    }
    let m = clear_row_denominators(vectors, ambient_dim);
    let (d, _, v) = snf_int(&m);
    let r = (0..d.rows().min(d.cols())).take_while(|&i| !d.get(i, i).is_zero()).count();
    if r == 0 {
        return Ok(Lattice { ambient_dim, basis: RatMatrix::zero(0, ambient_dim) });
    }
    // the row space of M is spanned by the first r rows of V⁻¹, which extend to a ℤ-basis
    let vinv = v.to_rat().inverse().expect("unimodular").to_int()?;
    let rows: Vec<usize> = (0..r).collect();
    Ok(Lattice::from_int_rows(ambient_dim, &vinv.select_rows(&rows)))
}

/// Least `r ≥ 1` with `r·γ ∈ Γ`, for `Γ ⊆ Γ′` of equal rank and `γ ∈ Γ′`.
pub fn quotient_order(gamma: &Lattice, gamma_prime: &Lattice, v: &[Rat]) -> Result<BigInt> {
    if gamma.ambient_dim != gamma_prime.ambient_dim || v.len() != gamma.ambient_dim {
        return invalid("dimension mismatch");
    }
    if !gamma.is_sublattice_of(gamma_prime) {
        return invalid("first lattice is not contained in the second");
    }
    if gamma.rank() != gamma_prime.rank() {
        return invalid("lattices have different ranks");
    }
    if !gamma_prime.contains(v) {
        return invalid("vector is not in the larger lattice");
    }
    let coords = gamma.coordinates(v).expect("same rational span");
    Ok(coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{rat, ratio};

    fn v(x: &[i64]) -> Vec<Rat> {
        x.iter().map(|&a| rat(a)).collect()
    }

    #[test]
    fn saturation() {
        let l = lattice_saturate(2, &[vec![ratio(1, 2), rat(0)]]).unwrap();
        assert_eq!(l.basis_vectors(), vec![v(&[1, 0])]);
        let l = lattice_saturate(2, &[v(&[1, 1]), v(&[1, -1])]).unwrap();
        assert_eq!(l, Lattice::full(2));
        let l = lattice_saturate(3, &[]).unwrap();
        assert_eq!(l.rank(), 0);
        let l = lattice_saturate(3, &[v(&[2, 4, 6]), v(&[1, 2, 3])]).unwrap();
        assert_eq!(l.basis_vectors(), vec![v(&[1, 2, 3])]);
    }

    #[test]
    fn quotient_orders() {
        let g = Lattice::scaled_full(2, 2);
        assert_eq!(quotient_order(&g, &Lattice::full(2), &v(&[1, 0])).unwrap(), BigInt::from(2));
        let g = Lattice::from_generators(2, &[v(&[1, 0]), v(&[0, 2])]).unwrap();
        assert_eq!(quotient_order(&g, &Lattice::full(2), &v(&[0, 1])).unwrap(), BigInt::from(2));
        assert_eq!(quotient_order(&g, &g, &v(&[3, 4])).unwrap(), BigInt::one());
        assert!(quotient_order(&Lattice::full(2), &g, &v(&[0, 2])).is_err());
        assert_eq!(g.index_in(&Lattice::full(2)), Some(BigInt::from(2)));
    }
}
