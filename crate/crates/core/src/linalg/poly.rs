use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Signed, Zero};

use super::field::{Rat, Rationals};
use super::matrix::{Matrix, RatMatrix};
use crate::error::{invalid, Result};

/// Dense univariate polynomial, coefficients in ascending degree order.
/// The zero polynomial has no coefficients; otherwise the last one is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type PolyZ = Poly<BigInt>;
pub type PolyQ = Poly<Rat>;

impl<T> Poly<T>
where
    T: Clone + Num + Neg<Output = T>,
{
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly { coeffs: vec![T::zero(), T::one()] }
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().cloned().map(|c| -c).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| {
                    let mut k = T::zero();
                    for _ in 0..i {
                        k = k + T::one();
                    }
                    c.clone() * k
                })
                .collect(),
        )
    }

    /// `x ↦ -x`.
    pub fn reflect(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }
}

impl<T: fmt::Display + Zero + One + PartialEq + Signed> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{mag}x")?,
                _ if unit => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Display + Zero + One + PartialEq + Signed> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl PolyZ {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn to_q(&self) -> PolyQ {
        Poly::new(self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    /// gcd of the coefficients (nonnegative; 0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        Poly::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Exact quotient over ℤ, `None` when `rhs` does not divide `self`.
    pub fn exact_div(&self, rhs: &Self) -> Option<Self> {
        let (q, r) = self.to_q().div_rem(&rhs.to_q());
        if !r.is_zero() {
            return None;
        }
        PolyQ::to_z(&q)
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        self.to_q().eval(x)
    }

    pub fn l2_norm_ceil(&self) -> BigInt {
        let s: BigInt = self.coeffs.iter().map(|c| c * c).sum();
        s.sqrt() + BigInt::one()
    }
}

impl PolyQ {
    pub fn to_z(&self) -> Option<PolyZ> {
        if self.coeffs.iter().all(|c| c.denom().is_one()) {
            Some(Poly::new(self.coeffs.iter().map(|c| c.numer().clone()).collect()))
        } else {
            None
        }
    }

    /// Primitive integer polynomial with the same roots, positive leading coefficient.
    pub fn to_primitive_z(&self) -> PolyZ {
        if self.is_zero() {
            return PolyZ::zero();
        }
        let l = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let z = PolyZ::new(self.coeffs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect());
        z.primitive_part()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s·a + t·b = g`, `g` monic.
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.leading().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).is_constant()
    }

    /// Squarefree part `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> Self {
        if self.is_constant() {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval_matrix(&self, a: &RatMatrix) -> RatMatrix {
        assert!(a.is_square());
        let n = a.rows();
        let mut acc = RatMatrix::zero(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).add(&RatMatrix::identity(n).scale(c));
        }
        acc
    }
}

/// Characteristic polynomial `det(xI − A)` by the Faddeev–LeVerrier recurrence.
pub fn char_poly(a: &RatMatrix) -> Result<PolyQ> {
    if !a.is_square() {
        return invalid("characteristic polynomial of a non-square matrix");
    }
    let n = a.rows();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut m = RatMatrix::zero(n, n);
    for k in 1..=n {
        m = a.mul(&m).add(&RatMatrix::identity(n).scale(&coeffs[n - k + 1]));
        let t = a.mul(&m).trace();
        coeffs[n - k] = -t / Rat::from_integer(BigInt::from(k));
    }
    Ok(Poly::new(coeffs))
}

/// Characteristic polynomial of an integer matrix as an integer polynomial.
pub fn char_poly_z(a: &RatMatrix) -> Result<PolyZ> {
    let p = char_poly(a)?;
    p.to_z().ok_or_else(|| crate::Error::InvalidInput("matrix is not integral".into()))
}

/// Monic least-degree annihilating polynomial.
pub fn min_poly(a: &RatMatrix) -> Result<PolyQ> {
    if !a.is_square() {
        return invalid("minimal polynomial of a non-square matrix");
    }
    let n = a.rows();
    let mut powers: Vec<Vec<Rat>> = vec![RatMatrix::identity(n).entries().to_vec()];
    let mut cur = RatMatrix::identity(n);
    for k in 1..=n {
        cur = cur.mul(a);
        powers.push(cur.entries().to_vec());
        let cols = Matrix::from_columns(n * n, &powers);
        let ker = cols.kernel_in(&Rationals);
        if let Some(v) = ker.into_iter().next() {
            // earlier powers are independent, so the kernel is one-dimensional
            let lead = v[k].clone();
            return Ok(Poly::new(v.iter().map(|c| c / &lead).collect()));
        }
    }
    unreachable!("Cayley–Hamilton bounds the degree by n")
}
