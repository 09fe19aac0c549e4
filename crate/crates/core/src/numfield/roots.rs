use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{CBox, Interval};
use crate::error::{invalid, Error, Result};
use crate::linalg::{parse_rat, rat_to_f64, PolyQ, PolyZ, Rat};

/// Isolating region for one root: a real interval or a complex rectangle
/// disjoint from the real axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RootBox {
    Real(Interval),
    Complex(CBox),
}

impl RootBox {
    pub fn is_real(&self) -> bool {
        matches!(self, RootBox::Real(_))
    }

    pub fn width(&self) -> Rat {
        match self {
            RootBox::Real(i) => i.width(),
            RootBox::Complex(b) => b.width(),
        }
    }

    pub fn as_cbox(&self) -> CBox {
        match self {
            RootBox::Real(i) => CBox::real(i.clone()),
            RootBox::Complex(b) => b.clone(),
        }
    }

    pub fn approx(&self) -> Complex64 {
        let (re, im) = self.as_cbox().mid_f64();
        Complex64::new(re, im)
    }

    /// Enclosure of `|root|²`.
    pub fn norm_sqr(&self) -> Interval {
        match self {
            RootBox::Real(i) => i.sqr(),
            RootBox::Complex(b) => b.norm_sqr(),
        }
    }

    /// Shrink below `width`, keeping the same root.
    pub fn refine(&self, p: &PolyQ, width: &Rat) -> RootBox {
        match self {
            RootBox::Real(i) => RootBox::Real(refine_real(p, i, width)),
            RootBox::Complex(b) => RootBox::Complex(refine_complex(p, b, width)),
        }
    }

    pub fn to_json(&self) -> RootBoxJson {
        match self {
            RootBox::Real(i) => RootBoxJson::Real { lo: i.lo.to_string(), hi: i.hi.to_string() },
            RootBox::Complex(b) => RootBoxJson::Complex {
                re_lo: b.re.lo.to_string(),
                re_hi: b.re.hi.to_string(),
                im_lo: b.im.lo.to_string(),
                im_hi: b.im.hi.to_string(),
            },
        }
    }
}

/// Wire form of a root box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootBoxJson {
    Real { lo: String, hi: String },
    Complex { re_lo: String, re_hi: String, im_lo: String, im_hi: String },
}

impl RootBoxJson {
    /// The box as given; containment of a root is checked by the field constructor.
    pub fn parse(&self) -> Result<RootBox> {
        let p = |s: &str| parse_rat(s).ok_or_else(|| Error::Parse(format!("bad rational `{s}` in root box")));
        match self {
            RootBoxJson::Real { lo, hi } => {
                let (lo, hi) = (p(lo)?, p(hi)?);
                if lo > hi {
                    return invalid("root box has lo > hi");
                }
                Ok(RootBox::Real(Interval::new(lo, hi)))
            }
            RootBoxJson::Complex { re_lo, re_hi, im_lo, im_hi } => {
                let (a, b, c, d) = (p(re_lo)?, p(re_hi)?, p(im_lo)?, p(im_hi)?);
                if a > b || c > d {
                    return invalid("root box has lo > hi");
                }
                Ok(RootBox::Complex(CBox::new(Interval::new(a, b), Interval::new(c, d))))
            }
        }
    }
}

/// Divide by a positive rational so that the coefficients are coprime integers.
fn normalize_positive(p: &PolyQ) -> PolyQ {
    if p.is_zero() {
        return p.clone();
    }
    let l = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    PolyQ::new(ints.into_iter().map(|c| Rat::new(c, g.clone())).collect())
}

pub fn sturm_sequence(p: &PolyQ) -> Vec<PolyQ> {
    let mut seq = vec![normalize_positive(p), normalize_positive(&p.derivative())];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(normalize_positive(&r.neg()));
    }
    seq
}

fn sign_changes(seq: &[PolyQ], x: &Rat) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for s in seq {
        let v = s.eval(x);
        let sg = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if sg != 0 {
            if last != 0 && sg != last {
                changes += 1;
            }
            last = sg;
        }
    }
    changes
}

/// Number of distinct real roots in `(a, b]`.
pub fn count_roots(seq: &[PolyQ], a: &Rat, b: &Rat) -> usize {
    sign_changes(seq, a) - sign_changes(seq, b)
}

/// A power of two strictly larger than the modulus of every root.
pub fn root_bound(p: &PolyQ) -> Rat {
    let lead = p.leading().abs();
    let m = p.coeffs()[..p.deg()].iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Rat::zero);
    let b = m + Rat::one();
    let mut pow = Rat::one();
    while pow <= b {
        pow *= Rat::from_integer(BigInt::from(2));
    }
    pow
}

fn half() -> Rat {
    Rat::new(BigInt::one(), BigInt::from(2))
}

/// A splitting point near the middle of `(lo, hi)` where `p` does not vanish.
fn split_point(p: &PolyQ, lo: &Rat, hi: &Rat) -> Rat {
    let w = hi - lo;
    let mut k = 2i64;
    let mut t = half();
    loop {
        let x = lo + &w * &t;
        if !p.eval(&x).is_zero() {
            return x;
        }
        // off-centre dyadic points; finitely many roots means this terminates
        k *= 2;
        t = half() + Rat::new(BigInt::one(), BigInt::from(k));
    }
}

/// Disjoint isolating intervals for the real roots of a squarefree polynomial,
/// in increasing order. Roots hit exactly are returned as point intervals.
pub fn isolate_real_roots(p: &PolyQ) -> Vec<Interval> {
    if p.is_constant() {
        return Vec::new();
    }
    let seq = sturm_sequence(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = count_roots(&seq, &lo, &hi);
        if n == 0 {
            continue;
        }
        if p.eval(&hi).is_zero() {
            out.push(Interval::point(hi.clone()));
            if n > 1 {
                let m = split_point(p, &lo, &hi);
                stack.push((lo, m.clone()));
                stack.push((m, hi));
            }
            continue;
        }
        if n == 1 {
            out.push(Interval::new(lo, hi));
            continue;
        }
        let m = split_point(p, &lo, &hi);
        stack.push((lo, m.clone()));
        stack.push((m, hi));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out.dedup_by(|a, b| a.is_point() && b.is_point() && a.lo == b.lo);
    out
}

/// Bisect an isolating interval of a simple real root down to `width`.
pub fn refine_real(p: &PolyQ, iv: &Interval, width: &Rat) -> Interval {
    if iv.is_point() {
        return iv.clone();
    }
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    if p.eval(&hi).is_zero() {
        return Interval::point(hi);
    }
    if p.eval(&lo).is_zero() {
        return Interval::point(lo);
    }
    let slo = p.eval(&lo).is_positive();
    while &(&hi - &lo) >= width {
        let m = (&lo + &hi) * half();
        let v = p.eval(&m);
        if v.is_zero() {
            return Interval::point(m);
        }
        if v.is_positive() == slo {
            lo = m;
        } else {
            hi = m;
        }
    }
    Interval::new(lo, hi)
}

/// Horner evaluation over a complex rectangle, rounding outward to `bits`.
pub fn eval_cbox(p: &PolyQ, x: &CBox, bits: u32) -> CBox {
    let mut acc = CBox::point(Rat::zero(), Rat::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add_rat(c).round_out(bits);
    }
    acc
}

pub fn eval_interval(p: &PolyQ, x: &Interval, bits: u32) -> Interval {
    let mut acc = Interval::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add_rat(c).round_out(bits);
    }
    acc
}

fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

/// One Krawczyk step `K(X) = m − y·p(m) + (1 − y·p′(X))(X − m)`.
///
/// Returns `K(X)` when it lies in the interior of `X` and `|1 − y·p′(X)| < 1`
/// on `X`; then `X` holds exactly one root and `K(X)` still contains it.
pub fn krawczyk(p: &PolyQ, dp: &PolyQ, x: &CBox, bits: u32) -> Option<CBox> {
    let (mr, mi) = x.center();
    let m = CBox::point(super::interval::round_dyadic(&mr, bits, false), super::interval::round_dyadic(&mi, bits, false));
    let fm = eval_cbox(p, &m, bits);
    let dm = eval_cbox(dp, &m, bits);
    let (a, b) = (dm.re.mid(), dm.im.mid());
    let n = &a * &a + &b * &b;
    if n.is_zero() {
        return None;
    }
    let y = CBox::point(a / &n, -b / &n).round_out(bits);
    let y = CBox::point(y.re.lo, y.im.lo);
    let dx = eval_cbox(dp, x, bits);
    let c = CBox::point(Rat::one(), Rat::zero()).sub(&y.mul(&dx)).round_out(bits);
    if c.norm_sqr().hi >= Rat::one() {
        return None;
    }
    let k = m.sub(&y.mul(&fm)).add(&c.mul(&x.sub(&m))).round_out(bits);
    k.interior_of(x).then_some(k)
}

fn bits_for(width: &Rat) -> u32 {
    let w = rat_to_f64(width).max(1e-300);
    (-(w.log2()) as i64 + 24).clamp(53, 4000) as u32
}

/// Shrink a certified complex box below `width` by iterating the Krawczyk operator.
pub fn refine_complex(p: &PolyQ, b: &CBox, width: &Rat) -> CBox {
    let dp = p.derivative();
    let mut cur = b.clone();
    let bits = bits_for(width);
    for _ in 0..200 {
        if &cur.width() < width {
            return cur;
        }
        match krawczyk(p, &dp, &cur, bits) {
            Some(k) => cur = k,
            None => {
                // the iteration stalls once K(X) reaches X's size at this precision;
                // fall back to subdividing around the current midpoint
                let (re, im) = cur.center();
                let q = cur.width() / Rat::from_integer(BigInt::from(4));
                let trial = CBox::new(
                    Interval::new(&re - &q, &re + &q),
                    Interval::new(&im - &q, &im + &q),
                );
                match krawczyk(p, &dp, &trial, bits) {
                    Some(k) => cur = k,
                    None => return cur,
                }
            }
        }
    }
    cur
}

/// f64 approximations of all complex roots (Aberth–Ehrlich).
pub fn approximate_roots(p: &PolyQ) -> Vec<Complex64> {
    let n = p.deg();
    if n == 0 {
        return Vec::new();
    }
    let lead = rat_to_f64(&p.leading());
    let c: Vec<Complex64> = p.coeffs().iter().map(|x| Complex64::new(rat_to_f64(x) / lead, 0.0)).collect();
    let dc: Vec<Complex64> = (1..=n).map(|i| c[i] * i as f64).collect();
    let ev = |cs: &[Complex64], z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &k| a * z + k);
    let r = rat_to_f64(&root_bound(p)) / 2.0;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let f = ev(&c, z[i]);
            let d = ev(&dc, z[i]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / d;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Certified box around an approximate non-real root, trying several radii.
fn certify_near(p: &PolyQ, dp: &PolyQ, z: Complex64) -> Option<CBox> {
    let scale = 1.0 + z.norm();
    for r in [1e-12, 1e-10, 1e-8, 1e-6, 1e-4] {
        let rr = r * scale;
        if rr >= z.im.abs() {
            break;
        }
        let b = CBox::new(
            Interval::new(rat_from_f64(z.re - rr), rat_from_f64(z.re + rr)),
            Interval::new(rat_from_f64(z.im - rr), rat_from_f64(z.im + rr)),
        );
        if let Some(k) = krawczyk(p, dp, &b, 80) {
            if !k.im.contains_zero() {
                return Some(k);
            }
        }
    }
    None
}

/// Isolating boxes for every complex root of a squarefree polynomial:
/// real roots first (increasing), then non-real roots in conjugate pairs.
pub fn isolate_roots_q(p: &PolyQ) -> Result<Vec<RootBox>> {
    if p.is_zero() {
        return invalid("zero polynomial has no isolated roots");
    }
    if !p.is_squarefree() {
        return invalid("root isolation needs a squarefree polynomial");
    }
    let reals = isolate_real_roots(p);
    let n_complex = p.deg() - reals.len();
    let mut out: Vec<RootBox> = reals.into_iter().map(RootBox::Real).collect();
    if n_complex == 0 {
        return Ok(out);
    }
    let dp = p.derivative();
    let mut approx = approximate_roots(p);
    approx.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal));
    let mut upper: Vec<CBox> = Vec::new();
    for z in approx.iter().take(n_complex / 2) {
        if z.im <= 0.0 {
            return Err(Error::Unsupported(format!("could not separate non-real roots of {p:?}")));
        }
        let b = certify_near(p, &dp, *z)
            .ok_or_else(|| Error::Unsupported(format!("could not certify root near {z} of {p:?}")))?;
        let b = if b.im.lo.is_negative() || b.im.lo.is_zero() {
            return Err(Error::Unsupported(format!("root near {z} too close to the real axis")));
        } else {
            b
        };
        if upper.iter().any(|u| u.intersects(&b)) {
            return Err(Error::Unsupported(format!("overlapping root boxes near {z}")));
        }
        upper.push(b);
    }
    for b in &upper {
        out.push(RootBox::Complex(b.clone()));
        out.push(RootBox::Complex(b.conj()));
    }
    Ok(out)
}

/// Isolating boxes for the distinct roots of a squarefree integer polynomial.
pub fn root_isolation(p: &PolyZ) -> Result<Vec<RootBox>> {
    isolate_roots_q(&p.to_q())
}

/// Locate the unique root of `p` inside a user-supplied box, returning a
/// certified isolating box for it.
pub fn locate_root(p: &PolyQ, user: &RootBox) -> Result<RootBox> {
    let sq = p.squarefree_part();
    match user {
        RootBox::Real(iv) => {
            let seq = sturm_sequence(&sq);
            let at_lo = sq.eval(&iv.lo).is_zero();
            let n = count_roots(&seq, &iv.lo, &iv.hi) + usize::from(at_lo);
            if n != 1 {
                return invalid(format!("root box {iv:?} contains {n} real roots, expected 1"));
            }
            if at_lo {
                return Ok(RootBox::Real(Interval::point(iv.lo.clone())));
            }
            if sq.eval(&iv.hi).is_zero() {
                return Ok(RootBox::Real(Interval::point(iv.hi.clone())));
            }
            Ok(RootBox::Real(iv.clone()))
        }
        RootBox::Complex(b) => {
            let all = isolate_roots_q(&sq)?;
            let mut inside = Vec::new();
            for r in all {
                let mut r = r;
                let mut w = r.width();
                loop {
                    let rb = r.as_cbox();
                    if rb.subset_of(b) {
                        inside.push(r);
                        break;
                    }
                    if !rb.intersects(b) {
                        break;
                    }
                    if w.is_zero() {
                        return invalid("root lies on the boundary of the root box");
                    }
                    w = &w / Rat::from_integer(BigInt::from(16));
                    let next = r.refine(&sq, &w);
                    if next.width() >= r.width() {
                        return Err(Error::Unsupported("root box boundary too close to a root".into()));
                    }
                    r = next;
                }
            }
            if inside.len() != 1 {
                return invalid(format!("root box {b:?} contains {} roots, expected 1", inside.len()));
            }
            Ok(inside.pop().unwrap())
        }
    }
}
