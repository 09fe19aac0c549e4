use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::Rat;
use super::poly::{PolyQ, PolyZ};
use crate::error::{invalid, Error, Result};

/// `content · ∏ fᵢ^{eᵢ}` with each `fᵢ` primitive, irreducible over ℤ and
/// with positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub content: BigInt,
    pub factors: Vec<(PolyZ, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> PolyZ {
        self.factors
            .iter()
            .fold(PolyZ::constant(self.content.clone()), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    pub fn multiplicity(&self, f: &PolyZ) -> usize {
        self.factors.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e)
    }
}

pub fn factor_over_z(p: &PolyZ) -> Result<Factorization> {
    if p.is_zero() {
        return invalid("cannot factor the zero polynomial");
    }
    let mut content = p.content();
    if p.leading().is_negative() {
        content = -content;
    }
    let f = p.primitive_part();
    let mut factors: Vec<(PolyZ, usize)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&f) {
        for g in factor_squarefree(&part)? {
            factors.push((g, mult));
        }
    }
    factors.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    Ok(Factorization { content, factors })
}

/// Yun's algorithm on a primitive polynomial: pairs `(aᵢ, i)` with
/// `f = ∏ aᵢ^i`, each `aᵢ` squarefree, primitive and non-constant.
fn squarefree_decomposition(f: &PolyZ) -> Vec<(PolyZ, usize)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let fq = f.to_q();
    let fd = fq.derivative();
    let a0 = fq.gcd(&fd);
    let mut b = fq.div_rem(&a0).0;
    let mut c = fd.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while !b.is_constant() {
        let a = b.gcd(&d);
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        if !a.is_constant() {
            out.push((a.to_primitive_z(), i));
        }
        i += 1;
    }
    out
}

/// Irreducible factors of a squarefree primitive polynomial.
fn factor_squarefree(f: &PolyZ) -> Result<Vec<PolyZ>> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    // rational roots first
    while !rest.is_constant() {
        match rational_root(&rest)? {
            Some(lin) => {
                rest = rest.exact_div(&lin).expect("root factor divides");
                out.push(lin);
            }
            None => break,
        }
    }
    let mut k = 2;
    while rest.deg() >= 2 * k {
        match kronecker_factor(&rest, k)? {
            Some(g) => {
                rest = rest.exact_div(&g).expect("factor divides");
                out.push(g);
            }
            None => k += 1,
        }
    }
    if !rest.is_constant() {
        out.push(rest.primitive_part());
    }
    Ok(out)
}

/// A linear factor `qx − p` for some rational root `p/q`, if any.
fn rational_root(f: &PolyZ) -> Result<Option<PolyZ>> {
    let a0 = f.coeff(0);
    if a0.is_zero() {
        return Ok(Some(PolyZ::x()));
    }
    let an = f.leading();
    let too_big = || Error::Unsupported(format!("coefficients of {f} too large for the rational root test"));
    let nums = divisors(&a0.abs()).ok_or_else(too_big)?;
    let dens = divisors(&an.abs()).ok_or_else(too_big)?;
    for q in &dens {
        for p in &nums {
            if !p.gcd(q).is_one() {
                continue;
            }
            for sp in [p.clone(), -p.clone()] {
                let r = Rat::new(sp.clone(), q.clone());
                if f.eval_rat(&r).is_zero() {
                    return Ok(Some(PolyZ::new(vec![-sp, q.clone()])));
                }
            }
        }
    }
    Ok(None)
}

/// Positive divisors of `n > 0`, or `None` if `n` is too large for trial division.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u128()?;
    if n == 0 || n > 1u128 << 64 {
        return None;
    }
    let mut primes: Vec<(u128, u32)> = Vec::new();
    let mut m = n;
    let mut d = 2u128;
    while d * d <= m {
        if d > 1 << 20 {
            return None;
        }
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            primes.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        primes.push((m, 1));
    }
    let mut divs = vec![1u128];
    for (p, e) in primes {
        let cur = divs.clone();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            divs.extend(cur.iter().map(|x| x * pk));
        }
    }
    divs.sort_unstable();
    Some(divs.into_iter().map(BigInt::from).collect())
}

/// A factor of degree exactly `k` of a polynomial with no factor of degree
/// below `k`, so any hit is irreducible.
fn kronecker_factor(f: &PolyZ, k: usize) -> Result<Option<PolyZ>> {
    let norm = f.l2_norm_ceil();
    // candidate points: nonzero values with few divisors keep the search small
    let mut cands: Vec<(usize, i64, Vec<BigInt>)> = Vec::new();
    for x in 0..(8 * (k as i64 + 1)) {
        for xv in [x, -x] {
            if cands.iter().any(|c| c.1 == xv) {
                continue;
            }
            let val = f.eval(&BigInt::from(xv));
            if val.is_zero() {
                continue;
            }
            let bound = &norm * BigInt::from(1 + xv.abs()).pow(k as u32);
            if let Some(ds) = divisors(&val.abs()) {
                let ds: Vec<BigInt> = ds.into_iter().filter(|d| d <= &bound).collect();
                cands.push((ds.len(), xv, ds));
            }
        }
    }
    if cands.len() < k + 1 {
        return Err(Error::Unsupported(format!("no usable evaluation points to factor {f}")));
    }
    cands.sort_by_key(|c| (c.0, c.1.abs()));
    cands.truncate(k + 1);
    let xs: Vec<Rat> = cands.iter().map(|c| Rat::from_integer(BigInt::from(c.1))).collect();
    let basis = lagrange_basis(&xs);
    let lead = f.leading();
    let c0 = f.coeff(0);

    // value choices: divisor with a sign; the first point takes positive values only
    let choices: Vec<Vec<BigInt>> = cands
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = c.2.clone();
            if i > 0 {
                v.extend(c.2.iter().map(|d| -d));
            }
            v
        })
        .collect();
    let mut idx = vec![0usize; k + 1];
    loop {
        let mut g = PolyQ::zero();
        for (i, b) in basis.iter().enumerate() {
            g = g.add(&b.scale(&Rat::from_integer(choices[i][idx[i]].clone())));
        }
        if g.deg() == k {
            if let Some(gz) = g.to_z() {
                let gz = gz.primitive_part();
                if gz.deg() == k
                    && lead.is_multiple_of(&gz.leading())
                    && (c0.is_zero() || c0.is_multiple_of(&gz.coeff(0)))
                    && f.exact_div(&gz).is_some()
                {
                    return Ok(Some(gz));
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn lagrange_basis(xs: &[Rat]) -> Vec<PolyQ> {
    xs.iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut num = PolyQ::one();
            let mut den = Rat::one();
            for (j, xj) in xs.iter().enumerate() {
                if i != j {
                    num = num.mul(&PolyQ::new(vec![-xj.clone(), Rat::one()]));
                    den *= xi - xj;
                }
            }
            num.scale(&den.recip())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pz(c: &[i64]) -> PolyZ {
        PolyZ::from_i64(c)
    }

    #[test]
    fn spec_examples() {
        let q = pz(&[-1, -4, 1]);
        let f = factor_over_z(&q.pow(2)).unwrap();
        assert_eq!(f.factors, vec![(q, 2)]);
        let f = factor_over_z(&pz(&[-1, 0, 0, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(pz(&[-1, 1]), 1), (pz(&[1, 1]), 1), (pz(&[1, 0, 1]), 1)]);
        let f = factor_over_z(&pz(&[1, -3, 1])).unwrap();
        assert_eq!(f.factors, vec![(pz(&[1, -3, 1]), 1)]);
        assert!(factor_over_z(&PolyZ::zero()).is_err());
    }

    #[test]
    fn quartic_products() {
        // (x² + x + 1)(x² − 2) has no rational roots
        let p = pz(&[1, 1, 1]).mul(&pz(&[-2, 0, 1]));
        let f = factor_over_z(&p).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), p);
        // x⁴ + 1 is irreducible
        let f = factor_over_z(&pz(&[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(pz(&[1, 0, 0, 0, 1]), 1)]);
        let p = pz(&[-6, 4, 2]).mul(&pz(&[0, 3]));
        let f = factor_over_z(&p).unwrap();
        assert_eq!(f.content, BigInt::from(6));
        assert_eq!(f.expand(), p);
        let p = pz(&[1, -2, 3]).mul(&pz(&[4, 0, -1, 2])).scale(&BigInt::from(-1));
        assert_eq!(factor_over_z(&p).unwrap().expand(), p);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(&BigInt::from(12)).unwrap().len(), 6);
    }
}
