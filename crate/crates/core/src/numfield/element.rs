use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{CBox, Interval};
use super::roots::{eval_cbox, eval_interval, locate_root, RootBox, RootBoxJson};
use crate::error::{invalid, Error, Result};
use crate::json::{self, Num};
use crate::linalg::{factor_over_z, rat_to_f64, Field, Matrix, PolyQ, PolyZ, Rat, RatMatrix};

/// `ℚ[x]/(P)` with a distinguished complex embedding `θ ↦` the root of `P`
/// inside `root_box`.
#[derive(Clone, PartialEq, Eq)]
pub struct NumberField {
    min_poly: PolyZ,
    modulus: PolyQ,
    root_box: RootBox,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[x]/({}) at {:?}", self.min_poly, self.root_box)
    }
}

/// Wire form of a number field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberFieldJson {
    pub min_poly: Vec<Num>,
    pub root_box: RootBoxJson,
}

impl NumberField {
    /// Checks that `min_poly` is monic and irreducible and that `root_box`
    /// isolates exactly one of its roots.
    pub fn new(min_poly: PolyZ, root_box: RootBox) -> Result<Arc<NumberField>> {
        if min_poly.deg() == 0 || !min_poly.is_monic() {
            return invalid(format!("minimal polynomial {min_poly} must be monic of positive degree"));
        }
        let f = factor_over_z(&min_poly)?;
        if f.factors.len() != 1 || f.factors[0].1 != 1 {
            return invalid(format!("minimal polynomial {min_poly} is reducible"));
        }
        let modulus = min_poly.to_q();
        let root_box = locate_root(&modulus, &root_box)?;
        Ok(Arc::new(NumberField { min_poly, modulus, root_box }))
    }

    /// `ℚ` itself, as `ℚ[x]/(x)`.
    pub fn rationals() -> Arc<NumberField> {
        Arc::new(NumberField {
            min_poly: PolyZ::x(),
            modulus: PolyQ::x(),
            root_box: RootBox::Real(Interval::zero()),
        })
    }

    /// `ℚ(√d)` for a non-square integer `d > 0`, embedded at the positive root.
    pub fn real_quadratic(d: i64) -> Result<Arc<NumberField>> {
        let hi = Rat::from_integer(BigInt::from(d.max(1)));
        NumberField::new(PolyZ::from_i64(&[-d, 0, 1]), RootBox::Real(Interval::new(Rat::zero(), hi)))
    }

    pub fn from_json(j: &NumberFieldJson) -> Result<Arc<NumberField>> {
        NumberField::new(json::poly(&j.min_poly)?, j.root_box.parse()?)
    }

    pub fn to_json(&self) -> NumberFieldJson {
        NumberFieldJson { min_poly: json::poly_json(&self.min_poly), root_box: self.root_box.to_json() }
    }

    pub fn degree(&self) -> usize {
        self.min_poly.deg()
    }

    pub fn min_poly(&self) -> &PolyZ {
        &self.min_poly
    }

    pub fn modulus(&self) -> &PolyQ {
        &self.modulus
    }

    pub fn root_box(&self) -> &RootBox {
        &self.root_box
    }

    /// Whether the distinguished embedding is real.
    pub fn is_real(&self) -> bool {
        self.root_box.is_real()
    }

    pub fn same(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }

    /// Coordinates of `p(θ)` in the power basis.
    pub fn reduce(&self, p: &PolyQ) -> Vec<Rat> {
        let r = p.rem(&self.modulus);
        (0..self.degree()).map(|i| r.coeff(i)).collect()
    }

    pub fn coords_poly(c: &[Rat]) -> PolyQ {
        PolyQ::new(c.to_vec())
    }

    pub fn rat_coords(&self, r: &Rat) -> Vec<Rat> {
        let mut c = vec![Rat::zero(); self.degree()];
        c[0] = r.clone();
        c
    }

    /// Enclosure of the image of the element with coordinates `c`, narrower than `precision`.
    pub fn embed_coords(&self, c: &[Rat], precision: &Rat) -> Enclosure {
        let p = NumberField::coords_poly(c);
        if p.is_constant() {
            let v = p.coeff(0);
            return if self.is_real() {
                Enclosure::Real(Interval::point(v))
            } else {
                Enclosure::Complex(CBox::point(v, Rat::zero()))
            };
        }
        let mut w = precision / Rat::from_integer(BigInt::from(4));
        loop {
            let root = self.root_box.refine(&self.modulus, &w);
            let bits = bits_for(precision);
            let enc = match &root {
                RootBox::Real(iv) => Enclosure::Real(eval_interval(&p, iv, bits)),
                RootBox::Complex(b) => Enclosure::Complex(eval_cbox(&p, b, bits)),
            };
            if &enc.width() < precision || root.width().is_zero() {
                return enc;
            }
            w = w / Rat::from_integer(BigInt::from(64));
        }
    }
}

fn bits_for(width: &Rat) -> u32 {
    let w = rat_to_f64(width).max(1e-300);
    (-(w.log2()) as i64 + 16).clamp(40, 4000) as u32
}

impl Field for NumberField {
    type Elem = Vec<Rat>;

    fn zero(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.degree()]
    }
    fn one(&self) -> Vec<Rat> {
        self.rat_coords(&Rat::one())
    }
    fn add(&self, a: &Vec<Rat>, b: &Vec<Rat>) -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn sub(&self, a: &Vec<Rat>, b: &Vec<Rat>) -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }
    fn mul(&self, a: &Vec<Rat>, b: &Vec<Rat>) -> Vec<Rat> {
        if self.degree() == 1 {
            return vec![&a[0] * &b[0]];
        }
        self.reduce(&NumberField::coords_poly(a).mul(&NumberField::coords_poly(b)))
    }
    fn neg(&self, a: &Vec<Rat>) -> Vec<Rat> {
        a.iter().map(|x| -x).collect()
    }
    fn inv(&self, a: &Vec<Rat>) -> Option<Vec<Rat>> {
        if a.iter().all(Zero::is_zero) {
            return None;
        }
        if self.degree() == 1 {
            return Some(vec![a[0].recip()]);
        }
        let (g, s, _) = PolyQ::ext_gcd(&NumberField::coords_poly(a), &self.modulus);
        debug_assert!(g.is_constant());
        Some(self.reduce(&s))
    }
    fn is_zero(&self, a: &Vec<Rat>) -> bool {
        a.iter().all(Zero::is_zero)
    }
    fn from_rat(&self, r: &Rat) -> Vec<Rat> {
        self.rat_coords(r)
    }
}

/// Certified enclosure of an embedded value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enclosure {
    Real(Interval),
    Complex(CBox),
}

impl Enclosure {
    pub fn width(&self) -> Rat {
        match self {
            Enclosure::Real(i) => i.width(),
            Enclosure::Complex(b) => b.width(),
        }
    }

    pub fn as_cbox(&self) -> CBox {
        match self {
            Enclosure::Real(i) => CBox::real(i.clone()),
            Enclosure::Complex(b) => b.clone(),
        }
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        self.as_cbox().mid_f64()
    }

    pub fn norm_sqr(&self) -> Interval {
        match self {
            Enclosure::Real(i) => i.sqr(),
            Enclosure::Complex(b) => b.norm_sqr(),
        }
    }

    pub fn real(&self) -> Option<&Interval> {
        match self {
            Enclosure::Real(i) => Some(i),
            Enclosure::Complex(_) => None,
        }
    }
}

/// Element of a number field, stored in the power basis `1, θ, …, θ^{d−1}`.
#[derive(Clone)]
pub struct NFElement {
    field: Arc<NumberField>,
    coords: Vec<Rat>,
}

impl PartialEq for NFElement {
    fn eq(&self, other: &Self) -> bool {
        NumberField::same(&self.field, &other.field) && self.coords == other.coords
    }
}

impl fmt::Debug for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}*θ"),
                _ => format!("{c}*θ^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl NFElement {
    pub fn new(field: &Arc<NumberField>, coords: Vec<Rat>) -> Result<NFElement> {
        if coords.len() != field.degree() {
            return invalid(format!("element has {} coordinates, field degree is {}", coords.len(), field.degree()));
        }
        Ok(NFElement { field: field.clone(), coords })
    }

    pub(crate) fn from_coords(field: &Arc<NumberField>, coords: Vec<Rat>) -> NFElement {
        debug_assert_eq!(coords.len(), field.degree());
        NFElement { field: field.clone(), coords }
    }

    pub fn from_rat(field: &Arc<NumberField>, r: &Rat) -> NFElement {
        NFElement { field: field.clone(), coords: field.rat_coords(r) }
    }

    pub fn from_i64(field: &Arc<NumberField>, n: i64) -> NFElement {
        NFElement::from_rat(field, &Rat::from_integer(BigInt::from(n)))
    }

    /// The generator `θ`.
    pub fn theta(field: &Arc<NumberField>) -> NFElement {
        NFElement { field: field.clone(), coords: field.reduce(&PolyQ::x()) }
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &PolyQ) -> NFElement {
        NFElement { field: field.clone(), coords: field.reduce(p) }
    }

    pub fn parse(field: &Arc<NumberField>, coords: &[Num]) -> Result<NFElement> {
        NFElement::new(field, json::rats(coords)?)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `ℚ`.
    pub fn as_rat(&self) -> Option<Rat> {
        self.coords[1..].iter().all(Zero::is_zero).then(|| self.coords[0].clone())
    }

    fn check(&self, other: &NFElement) -> Result<()> {
        if NumberField::same(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::InvalidInput("elements of different number fields".into()))
        }
    }

    pub fn add(&self, o: &NFElement) -> Result<NFElement> {
        self.check(o)?;
        Ok(NFElement::from_coords(&self.field, self.field.add(&self.coords, &o.coords)))
    }

    pub fn sub(&self, o: &NFElement) -> Result<NFElement> {
        self.check(o)?;
        Ok(NFElement::from_coords(&self.field, self.field.sub(&self.coords, &o.coords)))
    }

    pub fn mul(&self, o: &NFElement) -> Result<NFElement> {
        self.check(o)?;
        Ok(NFElement::from_coords(&self.field, self.field.mul(&self.coords, &o.coords)))
    }

    pub fn neg(&self) -> NFElement {
        NFElement::from_coords(&self.field, self.field.neg(&self.coords))
    }

    pub fn scale(&self, r: &Rat) -> NFElement {
        NFElement::from_coords(&self.field, self.coords.iter().map(|c| c * r).collect())
    }

    pub fn inv(&self) -> Option<NFElement> {
        self.field.inv(&self.coords).map(|c| NFElement::from_coords(&self.field, c))
    }

    pub fn pow(&self, e: i64) -> NFElement {
        let base = if e < 0 { self.inv().expect("inverse of zero") } else { self.clone() };
        let mut acc = NFElement::from_i64(&self.field, 1);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base).unwrap();
        }
        acc
    }

    pub fn embed(&self, precision: &Rat) -> Enclosure {
        self.field.embed_coords(&self.coords, precision)
    }

    pub fn approx(&self) -> (f64, f64) {
        self.embed(&Rat::new(BigInt::one(), BigInt::from(1u64 << 50))).mid_f64()
    }

    /// Sign under a real embedding.
    pub fn sign(&self) -> Result<Ordering> {
        if !self.field.is_real() {
            return Err(Error::InvalidInput("sign requires a real embedding".into()));
        }
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        let mut prec = Rat::new(BigInt::one(), BigInt::from(1024));
        loop {
            if let Enclosure::Real(iv) = self.embed(&prec) {
                match iv.sign() {
                    Some(1) => return Ok(Ordering::Greater),
                    Some(-1) => return Ok(Ordering::Less),
                    _ => {}
                }
            }
            prec = prec / Rat::from_integer(BigInt::from(1u64 << 20));
        }
    }

    /// Exact comparison under a real embedding.
    pub fn cmp_real(&self, other: &NFElement) -> Result<Ordering> {
        self.sub(other)?.sign()
    }

    /// Exact `|self|²` comparison against a rational.
    pub fn abs_cmp_rat(&self, r: &Rat) -> Result<Ordering> {
        let s = self.sign()?;
        let a = if s == Ordering::Less { self.neg() } else { self.clone() };
        a.cmp_real(&NFElement::from_rat(&self.field, r))
    }
}

/// Vector with entries in one number field.
#[derive(Clone, PartialEq)]
pub struct NFVector {
    field: Arc<NumberField>,
    entries: Vec<Vec<Rat>>,
}

impl fmt::Debug for NFVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.elements()).finish()
    }
}

impl NFVector {
    pub fn new(field: &Arc<NumberField>, entries: Vec<Vec<Rat>>) -> Result<NFVector> {
        if entries.iter().any(|e| e.len() != field.degree()) {
            return invalid("vector entry has wrong number of coordinates");
        }
        Ok(NFVector { field: field.clone(), entries })
    }

    pub fn from_elements(elems: &[NFElement]) -> Result<NFVector> {
        let Some(first) = elems.first() else {
            return invalid("empty vector has no field");
        };
        for e in elems {
            first.check(e)?;
        }
        Ok(NFVector { field: first.field.clone(), entries: elems.iter().map(|e| e.coords.clone()).collect() })
    }

    pub fn from_rats(field: &Arc<NumberField>, v: &[Rat]) -> NFVector {
        NFVector { field: field.clone(), entries: v.iter().map(|r| field.rat_coords(r)).collect() }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn raw(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> NFElement {
        NFElement::from_coords(&self.field, self.entries[i].clone())
    }

    pub fn elements(&self) -> Vec<NFElement> {
        (0..self.len()).map(|i| self.entry(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.iter().all(Zero::is_zero))
    }

    pub fn scale(&self, s: &NFElement) -> NFVector {
        NFVector {
            field: self.field.clone(),
            entries: self.entries.iter().map(|e| self.field.mul(e, &s.coords)).collect(),
        }
    }

    pub fn add(&self, o: &NFVector) -> NFVector {
        NFVector {
            field: self.field.clone(),
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| self.field.add(a, b)).collect(),
        }
    }

    /// `M·v` for a rational matrix `M`.
    pub fn apply(&self, m: &RatMatrix) -> NFVector {
        let k = to_k_matrix(&self.field, m);
        NFVector { field: self.field.clone(), entries: k.mul_vec_in(&*self.field, &self.entries) }
    }

    /// Approximate real embedding of each entry.
    pub fn approx(&self) -> Vec<(f64, f64)> {
        self.elements().iter().map(|e| e.approx()).collect()
    }
}

pub fn to_k_matrix(field: &NumberField, m: &RatMatrix) -> Matrix<Vec<Rat>> {
    m.map(|x| field.rat_coords(x))
}

/// Certified enclosure of `e` narrower than `precision`.
pub fn nf_embed(e: &NFElement, precision: &Rat) -> Enclosure {
    e.embed(precision)
}

/// Exact kernel basis over `K` of a matrix with entries in one field.
pub fn kernel_over_k(m: &Matrix<NFElement>) -> Result<Vec<NFVector>> {
    let Some(first) = m.entries().first() else {
        return invalid("empty matrix has no field");
    };
    let field = first.field.clone();
    if m.entries().iter().any(|e| !NumberField::same(&e.field, &field)) {
        return invalid("matrix mixes elements of different number fields");
    }
    let k = m.map(|e| e.coords.clone());
    Ok(kernel_raw(&field, &k))
}

pub(crate) fn kernel_raw(field: &Arc<NumberField>, k: &Matrix<Vec<Rat>>) -> Vec<NFVector> {
    k.kernel_in(&**field)
        .into_iter()
        .map(|entries| NFVector { field: field.clone(), entries })
        .collect()
}

/// Row `j` holds the coefficient of `θ^j` across the entries of `v`.
pub fn rational_coordinates(v: &NFVector) -> RatMatrix {
    let d = v.field.degree();
    Matrix::from_fn(d, v.len(), |j, i| v.entries[i][j].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn sqrt5() -> Arc<NumberField> {
        NumberField::new(PolyZ::from_i64(&[-5, 0, 1]), RootBox::Real(Interval::new(rat(2), rat(3)))).unwrap()
    }

    #[test]
    fn embeddings() {
        let k = sqrt5();
        let t = NFElement::theta(&k);
        let e = t.embed(&ratio(1, 1_000_000));
        let iv = e.real().unwrap();
        assert!(iv.width() < ratio(1, 1_000_000));
        assert!(iv.contains(&ratio(2236068, 1_000_000)) || (iv.mid_f64() - 5f64.sqrt()).abs() < 1e-6);
        let r = NFElement::from_rat(&k, &ratio(3, 2));
        assert_eq!(r.embed(&ratio(1, 10)), Enclosure::Real(Interval::point(ratio(3, 2))));
        let lambda = NFElement::from_i64(&k, 3).add(&t).unwrap().scale(&ratio(1, 2));
        assert!((lambda.approx().0 - 2.618033988749895).abs() < 1e-12);
    }

    #[test]
    fn arithmetic() {
        let k = sqrt5();
        let t = NFElement::theta(&k);
        assert_eq!(t.mul(&t).unwrap(), NFElement::from_i64(&k, 5));
        let a = NFElement::from_i64(&k, 2).add(&t).unwrap();
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b).unwrap(), NFElement::from_i64(&k, 1));
        assert_eq!(a.sign().unwrap(), Ordering::Greater);
        let c = NFElement::from_i64(&k, 2).sub(&t).unwrap();
        assert_eq!(c.sign().unwrap(), Ordering::Less);
        assert!(NumberField::new(PolyZ::from_i64(&[-4, 0, 1]), RootBox::Real(Interval::new(rat(1), rat(3)))).is_err());
    }

    #[test]
    fn kernel_and_coordinates() {
        let k = sqrt5();
        let t = NFElement::theta(&k);
        let lambda = NFElement::from_i64(&k, 3).add(&t).unwrap().scale(&ratio(1, 2));
        let one = NFElement::from_i64(&k, 1);
        let two = NFElement::from_i64(&k, 2);
        let m = Matrix::from_rows(vec![
            vec![one.sub(&lambda).unwrap(), one.clone()],
            vec![one.clone(), two.sub(&lambda).unwrap()],
        ]);
        let ker = kernel_over_k(&m).unwrap();
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        let normalized = v.scale(&v.entry(0).inv().unwrap());
        let expected = one.add(&t).unwrap().scale(&ratio(1, 2));
        assert_eq!(normalized.entry(1), expected);
        let rc = rational_coordinates(&normalized);
        assert_eq!(rc, Matrix::from_rows(vec![vec![rat(1), ratio(1, 2)], vec![rat(0), ratio(1, 2)]]));
        let z = Matrix::from_rows(vec![vec![NFElement::from_i64(&k, 0); 2]; 2]);
        assert_eq!(kernel_over_k(&z).unwrap().len(), 2);
        let id = Matrix::from_rows(vec![vec![one.clone(), NFElement::from_i64(&k, 0)], vec![NFElement::from_i64(&k, 0), one]]);
        assert!(kernel_over_k(&id).unwrap().is_empty());
    }
}
