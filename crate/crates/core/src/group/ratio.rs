use serde::Serialize;

use super::automorphism::BundleAutomorphism;
use super::spec::{evaluate_word, GroupSpec};
use super::word::{Letter, Word};
use crate::admissibility::{similarity_ratio, Ratio, RatioJson, Splitting};
use crate::error::{Error, Result};

/// Similarity ratio of the linear part on `E^q`.
pub fn rho(f: &BundleAutomorphism, splitting: &Splitting) -> Result<Ratio> {
    let r = splitting
        .restrict_eq(&f.linear)
        .ok_or_else(|| Error::NotAdmissible(format!("{} does not preserve E^q", f.name)))?;
    similarity_ratio(&splitting.field, &r, &splitting.scalar_product)
}

/// `Ω = ker ρ ⋊ ⟨ω⟩` for a rank-one ratio group `ρ(Ω) = λ^ℤ`.
#[derive(Debug, Clone)]
pub struct SplitExtension {
    pub lambda: Ratio,
    /// `ρ(g) = λ^{n_g}` per generator.
    pub exponents: Vec<i64>,
    pub ratios: Vec<Ratio>,
    pub section: Word,
    /// Words `g·ω^{−n_g}` for every generator other than the section.
    pub kernel: Vec<Word>,
    /// `ρ` recomputed on every output word matches the claim.
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitExtensionJson {
    pub lambda: RatioJson,
    pub exponents: Vec<i64>,
    pub ratios: Vec<RatioJson>,
    pub section: String,
    pub kernel: Vec<String>,
    pub verified: bool,
}

impl SplitExtension {
    pub fn to_json(&self, names: &[String]) -> SplitExtensionJson {
        SplitExtensionJson {
            lambda: self.lambda.to_json(),
            exponents: self.exponents.clone(),
            ratios: self.ratios.iter().map(Ratio::to_json).collect(),
            section: self.section.display(names),
            kernel: self.kernel.iter().map(|w| w.display(names)).collect(),
            verified: self.verified,
        }
    }
}

/// The `n` with `ρ² = (λ²)ⁿ`, found from a logarithm estimate and checked exactly.
fn exponent_of(r: &Ratio, lambda: &Ratio) -> Option<i64> {
    let est = r.approx().ln() / lambda.approx().ln();
    let n = est.round();
    if !n.is_finite() || (est - n).abs() > 1e-6 || n.abs() > 1e6 {
        return None;
    }
    let n = n as i64;
    (lambda.squared.pow(n) == r.squared).then_some(n)
}

/// Chooses a section of `ρ` and generators of its kernel. Without an explicit
/// `λ`, the smallest ratio above 1 among the generators is used.
pub fn split_extension(spec: &GroupSpec, lambda: Option<&Ratio>) -> Result<SplitExtension> {
    let ratios: Vec<Ratio> = spec.generators.iter().map(|g| rho(g, &spec.splitting)).collect::<Result<_>>()?;
    if ratios.iter().all(Ratio::is_one) {
        return Err(Error::NoStrictSimilarity);
    }
    let lambda = match lambda {
        Some(l) => l.clone(),
        None => ratios
            .iter()
            .filter(|r| !r.is_one())
            .map(|r| if r.approx() < 1.0 { r.inv() } else { r.clone() })
            .min_by(|a, b| a.approx().total_cmp(&b.approx()))
            .expect("some ratio differs from 1"),
    };
    if lambda.is_one() {
        return Err(Error::InvalidInput("λ must differ from 1".into()));
    }
    let exponents: Vec<i64> = ratios
        .iter()
        .zip(&spec.generators)
        .map(|(r, g)| exponent_of(r, &lambda).ok_or_else(|| Error::Unsupported(format!("ρ({}) is not a power of λ", g.name))))
        .collect::<Result<_>>()?;
    let (s, sign) = exponents
        .iter()
        .position(|n| n.abs() == 1)
        .map(|i| (i, exponents[i]))
        .ok_or_else(|| Error::InvalidInput("no generator maps onto λ".into()))?;
    let section = Word(vec![Letter::Gen { index: s, power: sign }]);
    let kernel: Vec<Word> = (0..spec.generators.len())
        .filter(|&i| i != s)
        .map(|i| {
            let mut w = vec![Letter::Gen { index: i, power: 1 }];
            let n = exponents[i];
            if n != 0 {
                w.push(Letter::Gen { index: s, power: -n * sign });
            }
            Word(w)
        })
        .collect();
    let mut verified = rho(&evaluate_word(&section, spec)?, &spec.splitting)?.squared == lambda.squared;
    for w in &kernel {
        verified &= rho(&evaluate_word(w, spec)?, &spec.splitting)?.is_one();
    }
    Ok(SplitExtension { lambda, exponents, ratios, section, kernel, verified })
}
