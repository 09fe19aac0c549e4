use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::spec::{eval_metric, AffineMap, MetricSpec};
use crate::error::{invalid, Error, Result};
use crate::group::ratio::rho;
use crate::group::spec::GroupSpec;

/// `χ(y) = max(0, 1 − |y − c|²/r²)^k`, positive exactly on the open ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "default_exponent")]
    pub exponent: u32,
}

fn default_exponent() -> u32 {
    4
}

impl Bump {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.center.len() != dim {
            return invalid(format!("bump centre has {} coordinates, expected {dim}", self.center.len()));
        }
        if !(self.radius > 0.0) || self.exponent < 4 {
            return invalid("bumps need a positive radius and exponent at least 4");
        }
        Ok(())
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        let d2: f64 = y.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        (1.0 - d2 / (self.radius * self.radius)).max(0.0).powi(self.exponent as i32)
    }
}

/// How one generator moves a single coordinate: `y_j ↦ a·y_j` or `y_j ↦ y_j + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Escape {
    Scale(f64),
    Shift(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Averaged {
    pub matrix: DMatrix<f64>,
    /// Exponents `n` of the contributing elements `ωⁿ`.
    pub contributing: Vec<i64>,
    /// No element of the orbit meets a bump.
    pub degenerate: bool,
    pub generator: Option<String>,
    /// Coordinate whose displacement certifies the truncation.
    pub escape_coordinate: Option<String>,
}

const TOL: f64 = 1e-12;

fn escape_along(map: &AffineMap, j: usize) -> Option<Escape> {
    let d = map.dim();
    if (0..d).any(|k| k != j && map.matrix[(j, k)].abs() > TOL) {
        return None;
    }
    let a = map.matrix[(j, j)];
    let b = map.shift[j];
    if (a - 1.0).abs() <= TOL && b.abs() > TOL {
        Some(Escape::Shift(b))
    } else if b.abs() <= TOL && a > 0.0 && (a - 1.0).abs() > TOL {
        Some(Escape::Scale(a))
    } else {
        None
    }
}

/// `g_N(x) = Σ_ω ρ(ω)⁻² (ω*(χ g))(x)` with `χ = Σ χ_i`.
///
/// The contributing set is certified for groups acting through one
/// generator `ω` that moves some coordinate by a nonzero shift or a scaling
/// `≠ 1`: then `ωⁿ x` meets the support of a bump only for the finitely many
/// `n` read off from that coordinate.
pub fn average_metric(spec: &GroupSpec, seed: &MetricSpec, bumps: &[Bump], x: &[f64]) -> Result<Averaged> {
    let d = seed.dim();
    seed.check_domain(x)?;
    for b in bumps {
        b.validate(d)?;
    }
    let chi = |y: &[f64]| bumps.iter().map(|b| b.value(y)).sum::<f64>();
    let acting: Vec<usize> = (0..spec.generators.len()).filter(|&i| !seed.map_for(&spec.generators[i]).is_identity(TOL)).collect();
    let contribution = |map: &AffineMap, rho2n: f64| -> Result<DMatrix<f64>> {
        let y = map.apply(&DVector::from_column_slice(x));
        let c = chi(y.as_slice());
        if c == 0.0 {
            return Ok(DMatrix::zeros(d, d));
        }
        let g = eval_metric(seed, y.as_slice())?;
        Ok(map.matrix.transpose() * g * &map.matrix * (c / rho2n))
    };
    let (index, map) = match acting.as_slice() {
        [] => {
            let m = contribution(&AffineMap::identity(d), 1.0)?;
            let degenerate = m.amax() == 0.0;
            return Ok(Averaged { matrix: m, contributing: vec![0], degenerate, generator: None, escape_coordinate: None });
        }
        [i] => (*i, seed.map_for(&spec.generators[*i])),
        _ => {
            return Err(Error::TruncationUnsound(format!(
                "{} generators act on the chart; only groups acting through a single generator are certified",
                acting.len()
            )))
        }
    };
    let gen = &spec.generators[index];
    let (j, escape) = (0..d)
        .find_map(|j| escape_along(&map, j).map(|e| (j, e)))
        .ok_or_else(|| Error::TruncationUnsound(format!("{} moves no coordinate by a pure shift or scaling", gen.name)))?;
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for b in bumps {
        let (a, c) = (b.center[j] - b.radius, b.center[j] + b.radius);
        let (n0, n1) = match escape {
            Escape::Shift(s) => ((a - x[j]) / s, (c - x[j]) / s),
            Escape::Scale(s) => {
                if a <= 0.0 || x[j] <= 0.0 {
                    return Err(Error::TruncationUnsound(format!("bump reaches {} ≤ 0 along a scaled coordinate", seed.coords[j])));
                }
                ((a / x[j]).ln() / s.ln(), (c / x[j]).ln() / s.ln())
            }
        };
        let (n0, n1) = (n0.min(n1), n0.max(n1));
        if n1 - n0 > 1e5 {
            return Err(Error::TruncationUnsound("contributing set too large".into()));
        }
        lo = lo.min(n0.floor() as i64);
        hi = hi.max(n1.ceil() as i64);
    }
    let ratio = rho(gen, &spec.splitting)?.approx();
    let mut total = DMatrix::zeros(d, d);
    let mut contributing = Vec::new();
    if lo <= hi {
        for n in lo..=hi {
            let m = map.pow(n).ok_or_else(|| Error::InvalidInput(format!("{} is not invertible on the chart", gen.name)))?;
            let c = contribution(&m, ratio.powi(2 * n as i32))?;
            if c.amax() > 0.0 {
                contributing.push(n);
                total += c;
            }
        }
    }
    let degenerate = contributing.is_empty();
    Ok(Averaged { matrix: total, contributing, degenerate, generator: Some(gen.name.clone()), escape_coordinate: Some(seed.coords[j].clone()) })
}

/// `‖f*g_N(x) − ρ(f)² g_N(x)‖_∞ / ‖g_N(x)‖_∞` for a generator `f`.
pub fn averaged_equivariance_residual(spec: &GroupSpec, seed: &MetricSpec, bumps: &[Bump], generator: &str, x: &[f64]) -> Result<f64> {
    let f = spec.generator(generator)?;
    let map = seed.map_for(f);
    let r = rho(f, &spec.splitting)?.approx();
    let here = average_metric(spec, seed, bumps, x)?;
    if here.degenerate {
        return invalid("the averaged metric vanishes at this point");
    }
    let y = map.apply(&DVector::from_column_slice(x));
    let there = average_metric(spec, seed, bumps, y.as_slice())?;
    let pulled = map.matrix.transpose() * there.matrix * &map.matrix;
    Ok((pulled - here.matrix.scale(r * r)).amax() / here.matrix.amax())
}
