use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::expr::{Expr, Scope};
use crate::admissibility::positive_definite;
use crate::error::{invalid, Error, Result};
use crate::group::automorphism::{BundleAutomorphism, FactorKind, NumericAutomorphism};
use crate::group::spec::{ElemJson, GroupSpec};
use crate::linalg::{Field, Matrix};
use crate::numfield::{NFElement, NumberField};

/// Which part of `ℝᵖ × C` the metric lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    #[default]
    Total,
    Base,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpecJson {
    #[serde(default)]
    pub space: Space,
    pub coords: Vec<String>,
    /// Named field elements usable in entries.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, ElemJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<String>>,
    /// `C` with `chart coordinates = C · metric coordinates`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<Vec<ElemJson>>>,
    /// Coordinates restricted to positive values, besides half-line factors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positive: Vec<String>,
}

/// Symmetric matrix of chart expressions.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub space: Space,
    pub coords: Vec<String>,
    pub entries: Vec<Vec<Expr>>,
    pub chart: Option<DMatrix<f64>>,
    chart_inv: Option<DMatrix<f64>>,
    pub positive: Vec<usize>,
    pub scope: Scope,
}

/// `y ↦ J y + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub matrix: DMatrix<f64>,
    pub shift: DVector<f64>,
}

impl AffineMap {
    pub fn identity(n: usize) -> AffineMap {
        AffineMap { matrix: DMatrix::identity(n, n), shift: DVector::zeros(n) }
    }

    pub fn total(f: &NumericAutomorphism) -> AffineMap {
        let p = f.p();
        let n = f.base_shift.len();
        let mut m = DMatrix::zeros(p + n, p + n);
        m.view_mut((0, 0), (p, p)).copy_from(&f.linear);
        m.view_mut((0, p), (p, n)).copy_from(&f.coupling);
        m.view_mut((p, p), (n, n)).copy_from(&f.base_matrix);
        let mut s = DVector::zeros(p + n);
        s.rows_mut(0, p).copy_from(&f.constant);
        s.rows_mut(p, n).copy_from(&f.base_shift);
        AffineMap { matrix: m, shift: s }
    }

    pub fn base(f: &NumericAutomorphism) -> AffineMap {
        AffineMap { matrix: f.base_matrix.clone(), shift: f.base_shift.clone() }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.matrix * y + &self.shift
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &AffineMap) -> AffineMap {
        AffineMap { matrix: &self.matrix * &g.matrix, shift: &self.matrix * &g.shift + &self.shift }
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let inv = self.matrix.clone().try_inverse()?;
        let shift = -(&inv * &self.shift);
        Some(AffineMap { matrix: inv, shift })
    }

    pub fn pow(&self, n: i64) -> Option<AffineMap> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut acc = AffineMap::identity(self.dim());
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc);
        }
        Some(acc)
    }

    /// The same map in coordinates `y` with `chart coordinates = C y`.
    pub fn in_chart(&self, c: &DMatrix<f64>, c_inv: &DMatrix<f64>) -> AffineMap {
        AffineMap { matrix: c_inv * &self.matrix * c, shift: c_inv * &self.shift }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (&self.matrix - DMatrix::identity(self.dim(), self.dim())).amax() <= tol && self.shift.amax() <= tol
    }
}

fn elem_f64(field: &Arc<NumberField>, e: &ElemJson) -> Result<f64> {
    Ok(NFElement::new(field, e.parse(field)?)?.approx().0)
}

impl MetricSpec {
    pub fn from_json(j: &MetricSpecJson, group: &GroupSpec) -> Result<MetricSpec> {
        let field = &group.field;
        let d = j.coords.len();
        let chart_dim = match j.space {
            Space::Total => group.p + group.base.dim(),
            Space::Base => group.base.dim(),
        };
        if d != chart_dim {
            return invalid(format!("metric has {d} coordinates, the chart has dimension {chart_dim}"));
        }
        if j.coords.iter().enumerate().any(|(i, a)| j.coords[..i].contains(a)) {
            return invalid("metric coordinate names must be unique");
        }
        if group.base.ranges().iter().any(|(k, _)| *k == FactorKind::Sphere2) {
            return Err(Error::Unsupported("metrics on sphere factors need more than one chart".into()));
        }
        let mut scope = Scope::new(&j.coords);
        for (name, v) in &j.constants {
            scope = scope.with_element(name, &NFElement::new(field, v.parse(field)?)?);
        }
        let parse = |s: &str| Expr::parse(s, &scope);
        let entries: Vec<Vec<Expr>> = match (&j.entries, &j.diagonal) {
            (Some(rows), None) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return invalid(format!("metric entries must form a {d}×{d} matrix"));
                }
                rows.iter().map(|r| r.iter().map(|s| parse(s)).collect::<Result<_>>()).collect::<Result<_>>()?
            }
            (None, Some(diag)) => {
                if diag.len() != d {
                    return invalid(format!("metric diagonal must have {d} entries"));
                }
                let diag: Vec<Expr> = diag.iter().map(|s| parse(s)).collect::<Result<_>>()?;
                (0..d).map(|i| (0..d).map(|k| if i == k { diag[i].clone() } else { Expr::zero() }).collect()).collect()
            }
            _ => return invalid("give exactly one of `entries` and `diagonal`"),
        };
        for i in 0..d {
            for k in 0..i {
                if entries[i][k] != entries[k][i] {
                    return invalid(format!("metric entry ({i},{k}) differs from ({k},{i})"));
                }
            }
        }
        let (chart, chart_inv) = match &j.chart {
            None => (None, None),
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return invalid(format!("chart must be a {d}×{d} matrix"));
                }
                let exact: Vec<Vec<Vec<_>>> = rows.iter().map(|r| r.iter().map(|e| e.parse(field)).collect::<Result<_>>()).collect::<Result<_>>()?;
                if field.is_zero(&Matrix::from_rows(exact).det_in(&**field)) {
                    return invalid("chart matrix is singular");
                }
                let mut c = DMatrix::zeros(d, d);
                for (i, r) in rows.iter().enumerate() {
                    for (k, e) in r.iter().enumerate() {
                        c[(i, k)] = elem_f64(field, e)?;
                    }
                }
                let inv = c.clone().try_inverse().ok_or_else(|| Error::InvalidInput("chart matrix is singular".into()))?;
                (Some(c), Some(inv))
            }
        };
        let mut positive: Vec<usize> = Vec::new();
        let offset = if j.space == Space::Total { group.p } else { 0 };
        let base_names = group.base.coord_names();
        for (kind, r) in group.base.ranges() {
            if kind == FactorKind::HalfLine {
                for idx in r {
                    if let Some(i) = j.coords.iter().position(|c| *c == base_names[idx]) {
                        positive.push(i);
                    } else if chart.is_none() {
                        positive.push(offset + idx);
                    }
                }
            }
        }
        for name in &j.positive {
            let i = j.coords.iter().position(|c| c == name).ok_or_else(|| Error::InvalidInput(format!("unknown coordinate `{name}`")))?;
            positive.push(i);
        }
        positive.sort_unstable();
        positive.dedup();
        let mut singular = Vec::new();
        entries.iter().flatten().for_each(|e| e.singular_vars(&mut singular));
        if let Some(&i) = singular.iter().find(|i| !positive.contains(i)) {
            return invalid(format!("`{}` appears in a denominator but is not restricted to positive values", j.coords[i]));
        }
        Ok(MetricSpec { space: j.space, coords: j.coords.clone(), entries, chart, chart_inv, positive, scope })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// The action of `f` in metric coordinates.
    pub fn map_for(&self, f: &BundleAutomorphism) -> AffineMap {
        let num = f.to_f64();
        let m = match self.space {
            Space::Total => AffineMap::total(&num),
            Space::Base => AffineMap::base(&num),
        };
        match (&self.chart, &self.chart_inv) {
            (Some(c), Some(ci)) => m.in_chart(c, ci),
            _ => m,
        }
    }

    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return invalid(format!("point has {} coordinates, metric has {}", x.len(), self.dim()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return invalid("point has non-finite coordinates");
        }
        if let Some(&i) = self.positive.iter().find(|&&i| x[i] <= 0.0) {
            return invalid(format!("{} = {} lies outside the domain {} > 0", self.coords[i], x[i], self.coords[i]));
        }
        Ok(())
    }

    /// Entries at `x` without the positivity certificate.
    pub fn raw(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, k| self.entries[i][k].eval(x));
        if m.iter().any(|v| !v.is_finite()) {
            return invalid("metric is not finite at this point");
        }
        Ok(m)
    }
}

/// Exact `LDLᵀ` of the floating-point matrix read as rationals.
pub fn certify_positive_definite(m: &DMatrix<f64>) -> bool {
    let q = NumberField::rationals();
    let rows: Option<Vec<Vec<Vec<_>>>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|k| BigRational::from_float(m[(i, k)]).map(|r| vec![r])).collect())
        .collect();
    match rows {
        Some(rows) => positive_definite(&q, &Matrix::from_rows(rows)).unwrap_or(false),
        None => false,
    }
}

/// The metric at `x`, certified symmetric positive definite.
pub fn eval_metric(m: &MetricSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    let g = m.raw(x)?;
    if !certify_positive_definite(&g) {
        return Err(Error::NotPositiveDefinite(format!("metric is not positive definite at {x:?}")));
    }
    Ok(g)
}

/// `(f*m)(x) = Jᵀ m(f(x)) J`.
pub fn pullback_metric(f: &AffineMap, m: &MetricSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    let y = f.apply(&DVector::from_column_slice(x));
    let g = eval_metric(m, y.as_slice())?;
    Ok(f.matrix.transpose() * g * &f.matrix)
}

/// `‖f*m(x) − ρ² m(x)‖_∞ / ‖m(x)‖_∞`.
pub fn equivariance_residual(f: &AffineMap, m: &MetricSpec, rho: f64, x: &[f64]) -> Result<f64> {
    let pulled = pullback_metric(f, m, x)?;
    let g = eval_metric(m, x)?;
    Ok((pulled - g.scale(rho * rho)).amax() / g.amax())
}

/// `ρ` read off as the square root of the largest eigenvalue of `f*m` relative to `m`.
pub fn estimate_ratio(f: &AffineMap, m: &MetricSpec, x: &[f64]) -> Result<f64> {
    let pulled = pullback_metric(f, m, x)?;
    let g = eval_metric(m, x)?;
    let l = g.cholesky().ok_or_else(|| Error::NotPositiveDefinite("Cholesky failed".into()))?.l();
    let li = l.try_inverse().ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let s = &li * pulled * li.transpose();
    let s = (&s + s.transpose()) * 0.5;
    Ok(s.symmetric_eigenvalues().max().sqrt())
}
