//! Chart expressions: rationals, `pi`, named constants, coordinates,
//! `+ − * /` and integer powers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{parse_rat, rat_to_f64, Field, Rat};
use crate::numfield::{NFElement, NumberField};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rat),
    Pi,
    /// Named constant: its value, and its field coordinates when it lies in the field.
    Const { name: String, value: f64, coords: Option<Vec<Rat>> },
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Names the parser resolves: coordinates and constants.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub vars: Vec<String>,
    pub consts: BTreeMap<String, (f64, Option<Vec<Rat>>)>,
}

impl Scope {
    pub fn new(vars: &[String]) -> Scope {
        Scope { vars: vars.to_vec(), consts: BTreeMap::new() }
    }

    /// Adds a field element under `name`.
    pub fn with_element(mut self, name: &str, e: &NFElement) -> Scope {
        self.consts.insert(name.to_string(), (e.approx().0, Some(e.coords().to_vec())));
        self
    }
}

impl Expr {
    pub fn parse(src: &str, scope: &Scope) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, scope };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("unexpected `{}` in `{src}`", p.tokens[p.pos])));
        }
        Ok(e)
    }

    pub fn zero() -> Expr {
        Expr::Num(Rat::default())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(r) => rat_to_f64(r),
            Expr::Pi => std::f64::consts::PI,
            Expr::Const { value, .. } => *value,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, n) => a.eval(x).powi(*n),
        }
    }

    /// Variables raised to a negative power or appearing in a denominator.
    pub fn singular_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Pow(a, n) if *n < 0 => a.vars(out),
            Expr::Div(a, b) => {
                a.singular_vars(out);
                b.vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.singular_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.singular_vars(out);
                b.singular_vars(out);
            }
            _ => {}
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            _ => {}
        }
    }

    /// Exact polynomial over the field, when the expression is one.
    pub fn to_poly(&self, field: &Arc<NumberField>, nvars: usize) -> Option<KPoly> {
        let k = &**field;
        Some(match self {
            Expr::Num(r) => KPoly::constant(field, nvars, k.rat_coords(r)),
            Expr::Pi => return None,
            Expr::Const { coords, .. } => {
                let c = coords.as_ref()?;
                if c.len() != k.degree() {
                    return None;
                }
                KPoly::constant(field, nvars, c.clone())
            }
            Expr::Var(i) => KPoly::var(field, nvars, *i),
            Expr::Neg(a) => a.to_poly(field, nvars)?.neg(),
            Expr::Add(a, b) => a.to_poly(field, nvars)?.add(&b.to_poly(field, nvars)?),
            Expr::Sub(a, b) => a.to_poly(field, nvars)?.sub(&b.to_poly(field, nvars)?),
            Expr::Mul(a, b) => a.to_poly(field, nvars)?.mul(&b.to_poly(field, nvars)?),
            Expr::Div(a, b) => {
                let d = b.to_poly(field, nvars)?.as_constant()?;
                a.to_poly(field, nvars)?.scale(&k.inv(&d)?)
            }
            Expr::Pow(a, n) => {
                let base = a.to_poly(field, nvars)?;
                if *n >= 0 {
                    base.pow(*n as u32)
                } else {
                    let c = base.as_constant()?;
                    KPoly::constant(field, nvars, k.inv(&c)?).pow(n.unsigned_abs())
                }
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Const { name, .. } => write!(f, "{name}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(s) | Token::Ident(s) => write!(f, "{s}"),
            Token::Op(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

/// `"12.25"` as the exact rational `49/4`.
fn decimal(s: &str) -> Option<Rat> {
    match s.split_once('.') {
        None => parse_rat(s),
        Some((int, frac)) => {
            let digits = format!("{int}{frac}");
            let scale = num_bigint::BigInt::from(10).pow(frac.len() as u32);
            Some(Rat::new(digits.parse().ok()?, scale))
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let r = self.product()?;
            e = if op == '+' { Expr::Add(Box::new(e), Box::new(r)) } else { Expr::Sub(Box::new(e), Box::new(r)) };
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let r = self.unary()?;
            e = if op == '*' { Expr::Mul(Box::new(e), Box::new(r)) } else { Expr::Div(Box::new(e), Box::new(r)) };
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek_op() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = match self.tokens.get(self.pos) {
            Some(Token::Num(s)) => s.parse::<i32>().map_err(|_| Error::Parse(format!("exponent `{s}` must be an integer")))?,
            _ => return Err(Error::Parse("exponent must be an integer".into())),
        };
        self.pos += 1;
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(s) => decimal(&s).map(Expr::Num).ok_or_else(|| Error::Parse(format!("bad number `{s}`"))),
            Token::Ident(name) => {
                if let Some(i) = self.scope.vars.iter().position(|v| *v == name) {
                    Ok(Expr::Var(i))
                } else if let Some((value, coords)) = self.scope.consts.get(&name) {
                    Ok(Expr::Const { name, value: *value, coords: coords.clone() })
                } else if name == "pi" {
                    Ok(Expr::Pi)
                } else {
                    Err(Error::Parse(format!("unknown name `{name}`")))
                }
            }
            Token::Op('(') => {
                let e = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }
}

/// Multivariate polynomial with coefficients in a number field.
#[derive(Debug, Clone, PartialEq)]
pub struct KPoly {
    field: Arc<NumberField>,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Vec<Rat>>,
}

impl KPoly {
    pub fn zero(field: &Arc<NumberField>, nvars: usize) -> KPoly {
        KPoly { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Arc<NumberField>, nvars: usize, c: Vec<Rat>) -> KPoly {
        let mut p = KPoly::zero(field, nvars);
        p.insert(vec![0; nvars], c);
        p
    }

    pub fn var(field: &Arc<NumberField>, nvars: usize, i: usize) -> KPoly {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = KPoly::zero(field, nvars);
        p.insert(m, field.one());
        p
    }

    fn insert(&mut self, m: Vec<u32>, c: Vec<Rat>) {
        let k = &*self.field;
        let cur = self.terms.remove(&m).unwrap_or_else(|| k.zero());
        let s = k.add(&cur, &c);
        if !k.is_zero(&s) {
            self.terms.insert(m, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<Vec<Rat>> {
        match self.degree() {
            0 => Some(self.terms.values().next().cloned().unwrap_or_else(|| self.field.zero())),
            _ => None,
        }
    }

    /// Coefficient of `1` and of each variable.
    pub fn affine_parts(&self) -> Option<(Vec<Rat>, Vec<Vec<Rat>>)> {
        if self.degree() > 1 {
            return None;
        }
        let k = &*self.field;
        let c = self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(|| k.zero());
        let lin = (0..self.nvars)
            .map(|i| {
                let mut m = vec![0; self.nvars];
                m[i] = 1;
                self.terms.get(&m).cloned().unwrap_or_else(|| k.zero())
            })
            .collect();
        Some((c, lin))
    }

    pub fn neg(&self) -> KPoly {
        let k = &*self.field;
        KPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), k.neg(c))).collect(), ..self.clone() }
    }

    pub fn add(&self, o: &KPoly) -> KPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.insert(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &KPoly) -> KPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &[Rat]) -> KPoly {
        let k = &*self.field;
        let mut r = KPoly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            r.insert(m.clone(), k.mul(c, &s.to_vec()));
        }
        r
    }

    pub fn mul(&self, o: &KPoly) -> KPoly {
        let k = &*self.field;
        let mut r = KPoly::zero(&self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.insert(m, k.mul(c1, c2));
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> KPoly {
        let mut r = KPoly::constant(&self.field, self.nvars, self.field.one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// `p(Mx + s)`.
    pub fn compose_affine(&self, m: &crate::admissibility::KMatrix, s: &[Vec<Rat>]) -> KPoly {
        let images: Vec<KPoly> = (0..self.nvars)
            .map(|i| {
                let mut acc = KPoly::constant(&self.field, self.nvars, s[i].clone());
                for j in 0..self.nvars {
                    acc = acc.add(&KPoly::var(&self.field, self.nvars, j).scale(m.get(i, j)));
                }
                acc
            })
            .collect();
        let mut r = KPoly::zero(&self.field, self.nvars);
        for (mono, c) in &self.terms {
            let mut t = KPoly::constant(&self.field, self.nvars, c.clone());
            for (i, e) in mono.iter().enumerate() {
                t = t.mul(&images[i].pow(*e));
            }
            r = r.add(&t);
        }
        r
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let v = NFElement::new(&self.field, c.clone()).map(|e| e.approx().0).unwrap_or(f64::NAN);
                m.iter().zip(x).fold(v, |acc, (e, xi)| acc * xi.powi(*e as i32))
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    fn scope() -> Scope {
        Scope::new(&["x".into(), "t".into()])
    }

    #[test]
    fn parse_and_eval() {
        let e = Expr::parse("2/pi^2 + t^-2 * x - -3", &scope()).unwrap();
        let v = e.eval(&[1.5, 2.0]);
        assert!((v - (2.0 / std::f64::consts::PI.powi(2) + 1.5 / 4.0 + 3.0)).abs() < 1e-15);
        assert!(Expr::parse("x +", &scope()).is_err());
        assert!(Expr::parse("y", &scope()).is_err());
        assert!(Expr::parse("x^1.5", &scope()).is_err());
        assert_eq!(Expr::parse("0.25", &scope()).unwrap(), Expr::Num(ratio(1, 4)));
        let mut s = Vec::new();
        e.singular_vars(&mut s);
        assert_eq!(s, vec![1]);
    }

    #[test]
    fn exact_polynomials() {
        let q = NumberField::rationals();
        let e = Expr::parse("x*(x - 1)/2", &scope()).unwrap();
        let p = e.to_poly(&q, 2).unwrap();
        assert_eq!(p.degree(), 2);
        // p(x + 1) − p(x) = x
        let shift = crate::admissibility::KMatrix::identity_in(&*q, 2);
        let d = p.compose_affine(&shift, &[vec![ratio(1, 1)], vec![ratio(0, 1)]]).sub(&p);
        assert_eq!(d, KPoly::var(&q, 2, 0));
        assert!(Expr::parse("pi*x", &scope()).unwrap().to_poly(&q, 2).is_none());
        assert!(Expr::parse("1/x", &scope()).unwrap().to_poly(&q, 2).is_none());
    }
}
