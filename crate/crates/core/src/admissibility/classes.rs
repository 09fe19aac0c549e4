use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::splitting::{KMatrix, Splitting};
use crate::error::{invalid, Error, Result};
use crate::linalg::{char_poly_z, factor_over_z, min_poly, rat_to_f64, Field, Matrix, PolyQ, PolyZ, Rat, RatMatrix};
use crate::numfield::element::{kernel_raw, to_k_matrix};
use crate::numfield::{compare_moduli, root_isolation, AlgebraicRoot, FormalVector, Interval, NFElement, NFVector, NumberField, RootBox};

/// One eigenvalue, as a root of an irreducible factor of the characteristic polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRoot {
    pub factor: PolyZ,
    pub root: RootBox,
    pub multiplicity: usize,
}

/// Eigenvalues sharing one modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusClass {
    pub roots: Vec<ClassRoot>,
    /// Certified enclosure of the common modulus.
    pub modulus: Interval,
}

impl ModulusClass {
    pub fn factors(&self) -> Vec<PolyZ> {
        let mut f: Vec<PolyZ> = Vec::new();
        for r in &self.roots {
            if !f.contains(&r.factor) {
                f.push(r.factor.clone());
            }
        }
        f
    }

    pub fn modulus_f64(&self) -> f64 {
        self.modulus.mid_f64()
    }

    pub fn to_json(&self) -> ClassJson {
        ClassJson {
            modulus: self.modulus_f64(),
            modulus_lo: self.modulus.lo.to_string(),
            modulus_hi: self.modulus.hi.to_string(),
            roots: self
                .roots
                .iter()
                .map(|r| {
                    let z = r.root.approx();
                    RootJson { factor: r.factor.to_string(), re: z.re, im: z.im, multiplicity: r.multiplicity }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassJson {
    pub modulus: f64,
    pub modulus_lo: String,
    pub modulus_hi: String,
    pub roots: Vec<RootJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootJson {
    pub factor: String,
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

const MODULUS_BITS: u32 = 60;

/// Partition of the eigenvalues of `A` by exact modulus, largest modulus first.
pub fn modulus_classes(a: &RatMatrix) -> Result<Vec<ModulusClass>> {
    if !a.is_square() || !a.is_integral() {
        return invalid("modulus classes need a square integer matrix");
    }
    let chi = factor_over_z(&char_poly_z(a)?)?;
    let mut roots = Vec::new();
    for (f, m) in &chi.factors {
        for r in root_isolation(f)? {
            roots.push(ClassRoot { factor: f.clone(), root: r, multiplicity: *m });
        }
    }
    let alg = |r: &ClassRoot| AlgebraicRoot::new(r.factor.clone(), r.root.clone());
    let mut classes: Vec<Vec<ClassRoot>> = Vec::new();
    for r in roots {
        let mut placed = false;
        for c in classes.iter_mut() {
            if compare_moduli(&alg(&c[0]), &alg(&r))? == Ordering::Equal {
                c.push(r.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![r]);
        }
    }
    let mut cmp_err = None;
    classes.sort_by(|x, y| match compare_moduli(&alg(&y[0]), &alg(&x[0])) {
        Ok(o) => o,
        Err(e) => {
            cmp_err = Some(e);
            Ordering::Equal
        }
    });
    if let Some(e) = cmp_err {
        return Err(e);
    }
    Ok(classes
        .into_iter()
        .map(|roots| {
            let mut rep = alg(&roots[0]);
            rep.refine(&Rat::new(BigInt::one(), BigInt::one() << (2 * MODULUS_BITS)));
            let modulus = rep.norm_sqr().sqrt(MODULUS_BITS);
            ModulusClass { roots, modulus }
        })
        .collect())
}

/// Options for [`flat_subspace`].
#[derive(Debug, Clone, Copy)]
pub struct FlatOptions {
    /// Fail when some irreducible factor has no root in the class.
    pub require_every_block: bool,
}

impl Default for FlatOptions {
    fn default() -> Self {
        FlatOptions { require_every_block: true }
    }
}

/// Candidate splitting built from one modulus class.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatSubspace {
    pub splitting: Splitting,
    /// Irreducible factors of `χ_A` with no root in the class.
    pub missed_factors: Vec<PolyZ>,
    /// `ρ(A)` restricted to `E^q`, when it lies in the splitting field.
    pub ratio: Option<NFElement>,
    /// `ρ(A)²` as a field element.
    pub ratio_squared: NFElement,
}

/// Real and imaginary parts of the eigenvectors in `class` span `E^q`; the
/// other eigenvalues span `E^{p−q}`.
///
/// Supported classes: real eigenvalues `±θ` for a single algebraic `θ`, or a
/// conjugate pair of roots of one quadratic factor.
pub fn flat_subspace(a: &RatMatrix, class: &ModulusClass, opts: FlatOptions) -> Result<FlatSubspace> {
    let chi = factor_over_z(&char_poly_z(a)?)?;
    let class_factors = class.factors();
    let missed: Vec<PolyZ> = chi.factors.iter().map(|(f, _)| f.clone()).filter(|f| !class_factors.contains(f)).collect();
    if opts.require_every_block && !missed.is_empty() {
        let names: Vec<String> = missed.iter().map(|f| f.to_string()).collect();
        return Err(Error::NotAdmissible(format!("blocks with characteristic polynomial {} miss the modulus class", names.join(", "))));
    }
    let mu = min_poly(a)?;
    if !mu.is_squarefree() {
        return Err(Error::NotAdmissible(format!("matrix is not semi-simple: minimal polynomial {mu}")));
    }
    let mut fs = if class.roots.iter().all(|r| r.root.is_real()) {
        real_class(a, class)?
    } else {
        complex_class(a, class)?
    };
    fs.missed_factors = missed;
    Ok(fs)
}

fn real_class(a: &RatMatrix, class: &ModulusClass) -> Result<FlatSubspace> {
    let p = a.rows();
    let first = &class.roots[0];
    let k = if first.factor.deg() == 1 { NumberField::rationals() } else { NumberField::new(first.factor.clone(), first.root.clone())? };
    let theta = if first.factor.deg() == 1 {
        NFElement::from_rat(&k, &(-Rat::from_integer(first.factor.coeff(0)) / Rat::from_integer(first.factor.coeff(1))))
    } else {
        NFElement::theta(&k)
    };
    let theta_sign = theta.sign()?;
    let mut eigen: Vec<NFElement> = Vec::new();
    for r in &class.roots {
        let RootBox::Real(iv) = &r.root else { unreachable!() };
        let sign = if iv.lo.is_zero() && iv.hi.is_zero() { Ordering::Equal } else { root_sign(&r.factor, iv)? };
        let eps = if sign == theta_sign { 1 } else { -1 };
        let cand = theta.scale(&Rat::from_integer(BigInt::from(eps)));
        let g = r.factor.to_q();
        if !eval_poly_k(&g, &cand).is_zero() {
            return Err(Error::Unsupported(format!("eigenvalues of {} are not ±θ for a single θ", r.factor)));
        }
        if !eigen.contains(&cand) {
            eigen.push(cand);
        }
    }
    let ak = to_k_matrix(&k, a);
    let mut eq: Vec<NFVector> = Vec::new();
    let mut product: KMatrix = Matrix::identity_in(&*k, p);
    for e in &eigen {
        let shifted = ak.sub_in(&*k, &Matrix::identity_in(&*k, p).scale_in(&*k, &e.coords().to_vec()));
        eq.extend(kernel_raw(&k, &shifted));
        product = product.mul_in(&*k, &shifted);
    }
    let epq = column_basis(&k, &product);
    let ratio = if theta_sign == Ordering::Less { theta.neg() } else { theta.clone() };
    let ratio_squared = ratio.mul(&ratio)?;
    let splitting = Splitting::new(plain(eq), plain(epq), None)?;
    Ok(FlatSubspace { splitting, missed_factors: Vec::new(), ratio: Some(ratio), ratio_squared })
}

fn complex_class(a: &RatMatrix, class: &ModulusClass) -> Result<FlatSubspace> {
    let factors = class.factors();
    if factors.len() != 1 || factors[0].deg() != 2 {
        return Err(Error::Unsupported("non-real modulus classes are supported for a single quadratic factor only".into()));
    }
    let f = &factors[0];
    let (b, c) = (Rat::from_integer(f.coeff(1)), Rat::from_integer(f.coeff(0)));
    let two = Rat::from_integer(BigInt::from(2));
    let re = -&b / &two;
    let beta_sq = &c - &b * &b / Rat::from_integer(BigInt::from(4));
    let fa = f.to_q().eval_matrix(a);
    let primary = fa.kernel();
    let mut us: Vec<Vec<Rat>> = Vec::new();
    let mut span: Vec<Vec<Rat>> = Vec::new();
    for seed in primary {
        if rank(&span) == rank(&[span.clone(), vec![seed.clone()]].concat()) {
            continue;
        }
        let w: Vec<Rat> = seed.iter().zip(a.mul_vec(&seed)).map(|(u, au)| (&re * u - au) / &beta_sq).collect();
        span.push(seed.clone());
        span.push(w.clone());
        us.push(seed);
        us.push(w);
    }
    let q = us.len();
    let k = NumberField::rationals();
    let g = Matrix::from_fn(q, q, |i, j| {
        if i != j {
            k.zero()
        } else if i % 2 == 0 {
            k.one()
        } else {
            vec![beta_sq.recip()]
        }
    });
    let eq: Vec<NFVector> = us.iter().map(|u| NFVector::from_rats(&k, u)).collect();
    let epq: Vec<NFVector> = column_basis(&k, &to_k_matrix(&k, &fa));
    let splitting = Splitting::new(plain(eq), plain(epq), Some(g))?;
    let ratio_squared = NFElement::from_rat(&k, &c);
    Ok(FlatSubspace { splitting, missed_factors: Vec::new(), ratio: None, ratio_squared })
}

fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        0
    } else {
        Matrix::from_rows(rows.to_vec()).rank()
    }
}

fn root_sign(f: &PolyZ, iv: &Interval) -> Result<Ordering> {
    let mut iv = iv.clone();
    let fq = f.to_q();
    for _ in 0..200 {
        if let Some(s) = iv.sign() {
            return Ok(s.cmp(&0));
        }
        iv = crate::numfield::roots::refine_real(&fq, &iv, &(iv.width() / Rat::from_integer(BigInt::from(4))));
    }
    Err(Error::Unsupported(format!("could not determine the sign of a root of {f}")))
}

fn eval_poly_k(p: &PolyQ, x: &NFElement) -> NFElement {
    let k = x.field().clone();
    let mut acc = NFElement::from_i64(&k, 0);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).unwrap().add(&NFElement::from_rat(&k, c)).unwrap();
    }
    acc
}

fn column_basis(k: &Arc<NumberField>, m: &KMatrix) -> Vec<NFVector> {
    let t = m.transpose();
    let rows = t.independent_rows_in(&**k);
    rows.into_iter().map(|i| NFVector::new(k, t.row(i).to_vec()).expect("field coordinates")).collect()
}

fn plain(vs: Vec<NFVector>) -> Vec<FormalVector> {
    vs.into_iter().map(FormalVector::plain).collect()
}

/// Approximate modulus, for reports.
pub fn modulus_approx(c: &ModulusClass) -> f64 {
    rat_to_f64(&c.modulus.mid())
}
