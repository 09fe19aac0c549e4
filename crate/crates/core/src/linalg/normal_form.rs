use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::Rat;
use super::matrix::{IntMatrix, Matrix, RatMatrix};
use crate::error::{invalid, Result};

/// Row-style Hermite normal form of an integer matrix.
///
/// Returns `(H, U)` with `U` unimodular and `H = U·M`. Nonzero rows of `H`
/// come first, pivots are positive and strictly move right, and entries
/// above a pivot lie in `[0, pivot)`.
pub fn hnf(m: &RatMatrix) -> Result<(RatMatrix, RatMatrix)> {
    let (h, u) = hnf_int(&m.to_int()?);
    Ok((h.to_rat(), u.to_rat()))
}

pub fn hnf_int(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity_int(m.rows());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..h.cols() {
        if r == h.rows() {
            break;
        }
        loop {
            let best = (r..h.rows())
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by_key(|&i| h.get(i, c).abs());
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..h.rows() {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = h.get(i, c).div_floor(h.get(r, c));
                h.row_axpy(i, r, &q);
                u.row_axpy(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h.get(i, c).div_floor(h.get(r, c));
            h.row_axpy(i, r, &q);
            u.row_axpy(i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    (h, u)
}

/// Smith normal form: `(D, U, V)` with `D = U·M·V` diagonal, `d₁ | d₂ | …`,
/// all `dᵢ ≥ 0`, and `U`, `V` unimodular.
pub fn snf(m: &RatMatrix) -> Result<(RatMatrix, RatMatrix, RatMatrix)> {
    let (d, u, v) = snf_int(&m.to_int()?);
    Ok((d.to_rat(), u.to_rat(), v.to_rat()))
}

pub fn snf_int(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut u = IntMatrix::identity_int(rows);
    let mut v = IntMatrix::identity_int(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = d.get(i, t).div_floor(d.get(t, t));
                d.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = d.get(t, j).div_floor(d.get(t, t));
                d.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let pivot = d.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    // pull the offending row in so the pivot shrinks to a divisor
                    let minus_one = -BigInt::one();
                    d.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(d, u, v)
}

fn finish(mut d: IntMatrix, mut u: IntMatrix, v: IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    for t in 0..d.rows().min(d.cols()) {
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (d, u, v)
}

/// Outcome of solving `M x = b` over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegerSolution {
    Integer(Vec<BigInt>),
    /// A rational solution exists but no integral one. The certificate `w`
    /// satisfies `wᵀM ∈ ℤⁿ` while `wᵀb ∉ ℤ`.
    RationalOnly { rational: Vec<Rat>, certificate: Vec<Rat> },
    /// No rational solution. The certificate `w` satisfies `wᵀM = 0`, `wᵀb ≠ 0`.
    Inconsistent { certificate: Vec<Rat> },
}

impl IntegerSolution {
    pub fn integer(&self) -> Option<&[BigInt]> {
        match self {
            IntegerSolution::Integer(x) => Some(x),
            _ => None,
        }
    }

    pub fn rational(&self) -> Option<Vec<Rat>> {
        match self {
            IntegerSolution::Integer(x) => Some(x.iter().map(|v| Rat::from_integer(v.clone())).collect()),
            IntegerSolution::RationalOnly { rational, .. } => Some(rational.clone()),
            IntegerSolution::Inconsistent { .. } => None,
        }
    }
}

pub fn solve_integer(m: &RatMatrix, b: &[Rat]) -> Result<IntegerSolution> {
    if b.len() != m.rows() {
        return invalid(format!("right-hand side has length {}, matrix has {} rows", b.len(), m.rows()));
    }
    let (d, u, v) = snf_int(&m.to_int()?);
    let ur = u.to_rat();
    let c = ur.mul_vec(b);
    let rank = (0..d.rows().min(d.cols())).take_while(|&i| !d.get(i, i).is_zero()).count();
    if let Some(i) = (rank..d.rows()).find(|&i| !c[i].is_zero()) {
        return Ok(IntegerSolution::Inconsistent { certificate: ur.row(i).to_vec() });
    }
    let y: Vec<Rat> = (0..d.cols())
        .map(|i| if i < rank { &c[i] / Rat::from_integer(d.get(i, i).clone()) } else { Rat::zero() })
        .collect();
    let x = v.to_rat().mul_vec(&y);
    match (0..rank).find(|&i| !y[i].denom().is_one()) {
        None => Ok(IntegerSolution::Integer(x.iter().map(|r| r.to_integer()).collect())),
        Some(i) => {
            let di = Rat::from_integer(d.get(i, i).clone());
            let certificate = ur.row(i).iter().map(|w| w / &di).collect();
            Ok(IntegerSolution::RationalOnly { rational: x, certificate })
        }
    }
}

/// Scale a rational row set to integers by clearing each row's denominators.
pub(crate) fn clear_row_denominators(rows: &[Vec<Rat>], dim: usize) -> IntMatrix {
    Matrix::from_rows(
        rows.iter()
            .map(|r| {
                let l = r.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                (0..dim).map(|j| (&r[j] * Rat::from_integer(l.clone())).to_integer()).collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{rat, ratio};

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let p = (0..h.cols()).find(|&j| !h.get(i, j).is_zero());
            match p {
                None => seen_zero = true,
                Some(c) => {
                    if seen_zero || last.is_some_and(|l| c <= l) || !h.get(i, c).is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        let x = h.get(k, c);
                        if x.is_negative() || x >= h.get(i, c) {
                            return false;
                        }
                    }
                    last = Some(c);
                }
            }
        }
        true
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&RatMatrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap();
        assert!(h.is_identity());
        assert_eq!(u, RatMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        let m = RatMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let (h, u) = hnf(&m).unwrap();
        assert_eq!(h, m);
        assert!(u.is_identity());
        let m = RatMatrix::from_i64(&[&[4, 6, 2], &[2, 3, 7], &[6, 9, 9]]);
        let (h, u) = hnf(&m).unwrap();
        assert!(u.is_unimodular());
        assert_eq!(u.mul(&m), h);
        assert!(is_hnf(&h.to_int().unwrap()));
        assert!(hnf(&RatMatrix::from_rows(vec![vec![ratio(1, 2)]])).is_err());
    }

    #[test]
    fn snf_examples() {
        let m = RatMatrix::from_i64(&[&[2, -1], &[-1, 3]]);
        let (d, u, v) = snf(&m).unwrap();
        assert_eq!(d, RatMatrix::from_i64(&[&[1, 0], &[0, 5]]));
        assert_eq!(u.mul(&m).mul(&v), d);
        let (d, _, _) = snf(&RatMatrix::zero(2, 3)).unwrap();
        assert!(d.is_zero());
        let m = RatMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let (d, u, v) = snf(&m).unwrap();
        assert_eq!(d, RatMatrix::diag(&[rat(2), rat(2), rat(156)]));
        assert!(u.is_unimodular() && v.is_unimodular());
    }

    #[test]
    fn solve_examples() {
        let m = RatMatrix::from_i64(&[&[2, -1], &[-1, 3]]);
        match solve_integer(&m, &[rat(1), rat(0)]).unwrap() {
            IntegerSolution::RationalOnly { rational, certificate } => {
                assert_eq!(rational, vec![ratio(3, 5), ratio(1, 5)]);
                let wm = m.transpose().mul_vec(&certificate);
                assert!(wm.iter().all(|x| x.denom().is_one()));
                let wb: Rat = certificate[0].clone();
                assert!(!wb.denom().is_one());
            }
            other => panic!("{other:?}"),
        }
        let s = solve_integer(&m, &[rat(2), rat(-1)]).unwrap();
        assert_eq!(s.integer().unwrap(), &[BigInt::from(1), BigInt::from(0)]);
        let s = solve_integer(&RatMatrix::identity(2), &[rat(7), rat(-3)]).unwrap();
        assert_eq!(s.integer().unwrap(), &[BigInt::from(7), BigInt::from(-3)]);
        let sing = RatMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(matches!(solve_integer(&sing, &[rat(1), rat(2)]).unwrap(), IntegerSolution::Inconsistent { .. }));
        assert!(solve_integer(&sing, &[rat(1)]).is_err());
    }
}
