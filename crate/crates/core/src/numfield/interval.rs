use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::{rat_to_f64, Rat};

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rat_to_f64(&self.lo), rat_to_f64(&self.hi))
    }
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Rat::zero())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rat::zero())
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strictly inside `other` (both endpoints).
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| Interval { lo: lo.clone(), hi: hi.clone() })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, s: &Rat) -> Interval {
        let a = &self.lo * s;
        let b = &self.hi * s;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn add_rat(&self, s: &Rat) -> Interval {
        Interval { lo: &self.lo + s, hi: &self.hi + s }
    }

    /// `[x² : x ∈ self]`, tighter than `self·self`.
    pub fn sqr(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            Interval { lo: Rat::zero(), hi: a.max(b) }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval { lo: Rat::zero(), hi: self.lo.abs().max(self.hi.abs()) }
        } else if self.hi.is_positive() || self.hi.is_zero() && self.lo.is_zero() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, o: &Interval) -> Option<Interval> {
        o.recip().map(|r| self.mul(&r))
    }

    /// `-1`, `0` or `1` when the sign is determined, `None` when the interval straddles 0.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Enlarge to dyadic endpoints with denominator `2^bits`.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval { lo: round_dyadic(&self.lo, bits, false), hi: round_dyadic(&self.hi, bits, true) }
    }

    /// Enclosure of `√x` over a nonnegative interval, with dyadic endpoints at `bits`.
    pub fn sqrt(&self, bits: u32) -> Interval {
        assert!(!self.lo.is_negative(), "square root of a negative interval");
        let scale = BigInt::one() << (2 * bits);
        let den = BigInt::one() << bits;
        let lo = (&self.lo * Rat::from_integer(scale.clone())).floor().to_integer().sqrt();
        let hi_sq = (&self.hi * Rat::from_integer(scale)).ceil().to_integer();
        let mut hi = hi_sq.sqrt();
        if &hi * &hi < hi_sq {
            hi += 1;
        }
        Interval { lo: Rat::new(lo, den.clone()), hi: Rat::new(hi, den) }
    }

    pub fn pow(&self, e: u32) -> Interval {
        let mut acc = Interval::point(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Round to a multiple of `2^-bits`, upward or downward.
pub fn round_dyadic(x: &Rat, bits: u32, up: bool) -> Rat {
    if x.denom().is_one() {
        return x.clone();
    }
    let scale = BigInt::one() << bits;
    let num = x.numer() * &scale;
    let (q, r) = num.div_mod_floor(x.denom());
    let q = if up && !r.is_zero() { q + 1 } else { q };
    Rat::new(q, scale)
}

/// Axis-aligned rectangle in ℂ with rational corners.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CBox {
    pub re: Interval,
    pub im: Interval,
}

impl fmt::Debug for CBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

impl CBox {
    pub fn new(re: Interval, im: Interval) -> Self {
        CBox { re, im }
    }

    pub fn point(re: Rat, im: Rat) -> Self {
        CBox { re: Interval::point(re), im: Interval::point(im) }
    }

    pub fn real(re: Interval) -> Self {
        CBox { re, im: Interval::zero() }
    }

    pub fn width(&self) -> Rat {
        self.re.width().max(self.im.width())
    }

    pub fn center(&self) -> (Rat, Rat) {
        (self.re.mid(), self.im.mid())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn interior_of(&self, other: &CBox) -> bool {
        self.re.interior_of(&other.re) && self.im.interior_of(&other.im)
    }

    pub fn subset_of(&self, other: &CBox) -> bool {
        self.re.subset_of(&other.re) && self.im.subset_of(&other.im)
    }

    pub fn intersects(&self, other: &CBox) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn intersect(&self, other: &CBox) -> Option<CBox> {
        Some(CBox { re: self.re.intersect(&other.re)?, im: self.im.intersect(&other.im)? })
    }

    pub fn conj(&self) -> CBox {
        CBox { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn add(&self, o: &CBox) -> CBox {
        CBox { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CBox) -> CBox {
        CBox { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &CBox) -> CBox {
        CBox {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, s: &Rat) -> CBox {
        CBox { re: self.re.scale(s), im: self.im.scale(s) }
    }

    pub fn add_rat(&self, s: &Rat) -> CBox {
        CBox { re: self.re.add_rat(s), im: self.im.clone() }
    }

    /// Enclosure of `|z|²`.
    pub fn norm_sqr(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn round_out(&self, bits: u32) -> CBox {
        CBox { re: self.re.round_out(bits), im: self.im.round_out(bits) }
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }
}

/// Rational enclosure of π from its decimal expansion.
pub fn pi_interval() -> Interval {
    let den = BigInt::from(10u64).pow(30);
    let lo: BigInt = "3141592653589793238462643383279".parse().unwrap();
    Interval { lo: Rat::new(lo.clone(), den.clone()), hi: Rat::new(lo + 1, den) }
}
