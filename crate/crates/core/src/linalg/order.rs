use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::factor::factor_over_z;
use super::matrix::RatMatrix;
use super::poly::{char_poly_z, min_poly, PolyZ};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixOrder {
    Finite(u64),
    Infinite,
}

/// The n-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> PolyZ {
    assert!(n >= 1);
    let mut p = PolyZ::monomial(BigInt::one(), n as usize).sub(&PolyZ::one());
    for d in 1..n {
        if n % d == 0 {
            p = p.exact_div(&cyclotomic(d)).expect("cyclotomic divisor");
        }
    }
    p
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// `n` with `f = Φₙ`, if `f` is cyclotomic.
pub fn cyclotomic_index(f: &PolyZ) -> Option<u64> {
    let d = f.deg() as u64;
    if d == 0 || !f.is_monic() {
        return None;
    }
    // φ(n) ≥ √(n/2), so n ≤ 2d²
    (1..=2 * d * d + 2).filter(|&n| totient(n) == d).find(|&n| &cyclotomic(n) == f)
}

/// Least `k ≥ 1` with `Aᵏ = I`, or `Infinite`.
pub fn matrix_order(a: &RatMatrix) -> Result<MatrixOrder> {
    if !a.is_square() || !a.is_integral() {
        return invalid("matrix must be square with integer entries");
    }
    if !a.det().abs().is_one() {
        return invalid("matrix is not in GL(n, Z)");
    }
    if a.rows() == 0 {
        return Ok(MatrixOrder::Finite(1));
    }
    let chi = factor_over_z(&char_poly_z(a)?)?;
    let mut k: u64 = 1;
    for (f, _) in &chi.factors {
        match cyclotomic_index(f) {
            Some(n) => k = k.lcm(&n),
            None => return Ok(MatrixOrder::Infinite),
        }
    }
    if !min_poly(a)?.is_squarefree() {
        return Ok(MatrixOrder::Infinite);
    }
    let ak = a.pow(k);
    if !ak.is_identity() {
        return invalid(format!("cyclotomic analysis predicts order {k} but A^{k} differs from I"));
    }
    Ok(MatrixOrder::Finite(k))
}

impl MatrixOrder {
    pub fn finite(&self) -> Option<u64> {
        match self {
            MatrixOrder::Finite(k) => Some(*k),
            MatrixOrder::Infinite => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), PolyZ::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(4), PolyZ::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), PolyZ::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), PolyZ::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_index(&PolyZ::from_i64(&[1, 1, 1])), Some(3));
        assert_eq!(cyclotomic_index(&PolyZ::from_i64(&[1, -3, 1])), None);
        assert_eq!(totient(12), 4);
    }

    #[test]
    fn orders() {
        let b = RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]]);
        assert_eq!(matrix_order(&b).unwrap(), MatrixOrder::Finite(2));
        let a0 = RatMatrix::from_i64(&[&[1, 1], &[1, 2]]);
        assert_eq!(matrix_order(&a0).unwrap(), MatrixOrder::Infinite);
        assert_eq!(matrix_order(&RatMatrix::identity(3)).unwrap(), MatrixOrder::Finite(1));
        let j = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(matrix_order(&j).unwrap(), MatrixOrder::Infinite);
        let r6 = RatMatrix::from_i64(&[&[0, -1], &[1, 1]]);
        assert_eq!(matrix_order(&r6).unwrap(), MatrixOrder::Finite(6));
        assert!(matrix_order(&RatMatrix::from_i64(&[&[2, 0], &[0, 1]])).is_err());
    }
}
