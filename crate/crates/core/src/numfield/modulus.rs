use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::interval::Interval;
use super::roots::{count_roots, sturm_sequence, RootBox};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, PolyQ, PolyZ, Rat};

/// Resultant of two polynomials via the Sylvester determinant.
pub fn resultant(a: &PolyQ, b: &PolyQ) -> Rat {
    let (m, n) = (a.deg(), b.deg());
    if a.is_zero() || b.is_zero() {
        return Rat::zero();
    }
    if m + n == 0 {
        return Rat::one();
    }
    let size = m + n;
    let s = Matrix::from_fn(size, size, |i, j| {
        if i < n {
            // row i holds a shifted by i
            j.checked_sub(i).filter(|&k| k <= m).map_or_else(Rat::zero, |k| a.coeff(m - k))
        } else {
            let r = i - n;
            j.checked_sub(r).filter(|&k| k <= n).map_or_else(Rat::zero, |k| b.coeff(n - k))
        }
    });
    s.det()
}

/// Integer polynomial whose roots are the products `αᵢ·ᾱⱼ` over roots of
/// `f`; the squared modulus of every root of `f` is among them.
pub fn squared_modulus_poly(f: &PolyZ) -> PolyZ {
    let d = f.deg();
    let fq = f.to_q();
    let n = d * d;
    let xs: Vec<Rat> = (0..=n).map(|i| Rat::from_integer(BigInt::from(i as i64))).collect();
    let ys: Vec<Rat> = xs
        .iter()
        .map(|x| {
            // y^d f(x/y) = Σ a_k x^k y^{d−k}
            let mut g = vec![Rat::zero(); d + 1];
            let mut xk = Rat::one();
            for k in 0..=d {
                g[d - k] = fq.coeff(k) * &xk;
                xk *= x;
            }
            resultant(&fq, &PolyQ::new(g))
        })
        .collect();
    interpolate(&xs, &ys).to_primitive_z()
}

fn interpolate(xs: &[Rat], ys: &[Rat]) -> PolyQ {
    // Newton divided differences
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = PolyQ::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = p.mul(&PolyQ::new(vec![-xs[i].clone(), Rat::one()])).add(&PolyQ::constant(coef[i].clone()));
    }
    p
}

/// An algebraic number given by a squarefree polynomial and an isolating box.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicRoot {
    pub poly: PolyZ,
    pub root: RootBox,
}

impl AlgebraicRoot {
    pub fn new(poly: PolyZ, root: RootBox) -> Self {
        AlgebraicRoot { poly, root }
    }

    pub fn refine(&mut self, width: &Rat) {
        self.root = self.root.refine(&self.poly.to_q(), width);
    }

    pub fn norm_sqr(&self) -> Interval {
        self.root.norm_sqr()
    }

    /// Enclosure of `|α|` obtained from the squared-modulus enclosure.
    pub fn modulus_f64(&self) -> f64 {
        self.norm_sqr().mid_f64().max(0.0).sqrt()
    }
}

fn closed_count(seq: &[PolyQ], p: &PolyQ, iv: &Interval) -> usize {
    count_roots(seq, &iv.lo, &iv.hi) + usize::from(p.eval(&iv.lo).is_zero())
}

/// Exact comparison of `|a|` and `|b|`.
///
/// Enclosures of the squared moduli are refined until they separate. When
/// they keep overlapping, equality is decided on the squared-modulus
/// polynomials: inside a window holding exactly one root of each, the two
/// values coincide iff their gcd has a root there.
pub fn compare_moduli(a: &AlgebraicRoot, b: &AlgebraicRoot) -> Result<Ordering> {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut w = Rat::new(BigInt::one(), BigInt::from(1u64 << 20));
    let mut exact: Option<(PolyQ, PolyQ, PolyQ)> = None;
    for round in 0..40 {
        a.refine(&w);
        b.refine(&w);
        let (ia, ib) = (a.norm_sqr(), b.norm_sqr());
        if ia.hi < ib.lo {
            return Ok(Ordering::Less);
        }
        if ib.hi < ia.lo {
            return Ok(Ordering::Greater);
        }
        if a.poly == b.poly && a.root == b.root {
            return Ok(Ordering::Equal);
        }
        if round >= 2 {
            let (ra, rb, h) = exact.get_or_insert_with(|| {
                let ra = squared_modulus_poly(&a.poly).to_q().squarefree_part();
                let rb = squared_modulus_poly(&b.poly).to_q().squarefree_part();
                let h = ra.gcd(&rb);
                (ra, rb, h)
            });
            let hull = ia.hull(&ib);
            let (sa, sb) = (sturm_sequence(ra), sturm_sequence(rb));
            if closed_count(&sa, ra, &hull) == 1 && closed_count(&sb, rb, &hull) == 1 {
                if h.is_constant() {
                    // no common squared modulus at all; keep refining to separate
                } else if closed_count(&sturm_sequence(h), h, &hull) >= 1 {
                    return Ok(Ordering::Equal);
                }
            }
        }
        w = w / Rat::from_integer(BigInt::from(1u64 << 16));
    }
    Err(Error::Unsupported("could not decide modulus comparison".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::roots::root_isolation;
    use num_traits::Signed;

    #[test]
    fn resultant_basics() {
        let a = PolyZ::from_i64(&[-1, 0, 1]).to_q();
        let b = PolyZ::from_i64(&[-2, 1]).to_q();
        // Res(x² − 1, x − 2) = (2)² − 1 = 3 up to sign convention
        assert_eq!(resultant(&a, &b).abs(), Rat::from_integer(BigInt::from(3)));
    }

    #[test]
    fn squared_moduli_of_golden() {
        let f = PolyZ::from_i64(&[1, -3, 1]);
        let r = squared_modulus_poly(&f);
        // roots λ², λ⁻², 1, 1 → (x² − 7x + 1)(x − 1)²
        let expect = PolyZ::from_i64(&[1, -7, 1]).mul(&PolyZ::from_i64(&[-1, 1]).pow(2));
        assert_eq!(r, expect);
    }

    #[test]
    fn conjugate_pairs_tie() {
        let f = PolyZ::from_i64(&[5, 2, 1]);
        let roots = root_isolation(&f).unwrap();
        let a = AlgebraicRoot::new(f.clone(), roots[0].clone());
        let b = AlgebraicRoot::new(f.clone(), roots[1].clone());
        assert_eq!(compare_moduli(&a, &b).unwrap(), Ordering::Equal);
        let g = PolyZ::from_i64(&[1, -3, 1]);
        let rg = root_isolation(&g).unwrap();
        let c = AlgebraicRoot::new(g.clone(), rg[0].clone());
        let d = AlgebraicRoot::new(g, rg[1].clone());
        assert_eq!(compare_moduli(&c, &d).unwrap(), Ordering::Less);
        // |±√5| tie across a real pair
        let s = PolyZ::from_i64(&[-5, 0, 1]);
        let rs = root_isolation(&s).unwrap();
        let e = AlgebraicRoot::new(s.clone(), rs[0].clone());
        let f2 = AlgebraicRoot::new(s, rs[1].clone());
        assert_eq!(compare_moduli(&e, &f2).unwrap(), Ordering::Equal);
        // |1 + 2i| = √5 = |√5|
        assert_eq!(compare_moduli(&a, &e).unwrap(), Ordering::Equal);
    }
}
