use nalgebra::{DMatrix, DVector};

use super::expr::{Expr, Scope};
use super::spec::{eval_metric, MetricSpec};
use crate::error::{invalid, Result};

/// Components of a vector field or a 1-form in the metric coordinates.
pub type Field = Vec<Expr>;

pub fn parse_field(components: &[String], scope: &Scope) -> Result<Field> {
    if components.len() != scope.vars.len() {
        return invalid(format!("field has {} components, expected {}", components.len(), scope.vars.len()));
    }
    components.iter().map(|s| Expr::parse(s, scope)).collect()
}

pub fn eval_field(f: &Field, x: &[f64]) -> DVector<f64> {
    DVector::from_iterator(f.len(), f.iter().map(|e| e.eval(x)))
}

/// `∂_j F` at `x` by central differences.
fn partial(f: &Field, x: &[f64], j: usize, h: f64) -> DVector<f64> {
    let mut a = x.to_vec();
    let mut b = x.to_vec();
    a[j] += h;
    b[j] -= h;
    (eval_field(f, &a) - eval_field(f, &b)) / (2.0 * h)
}

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`, with `O(h²)` error.
pub fn lie_bracket_fd(x_field: &Field, y_field: &Field, x: &[f64], h: f64) -> DVector<f64> {
    let xv = eval_field(x_field, x);
    let yv = eval_field(y_field, x);
    let mut out = DVector::zeros(x.len());
    for j in 0..x.len() {
        if xv[j] != 0.0 {
            out += partial(y_field, x, j, h) * xv[j];
        }
        if yv[j] != 0.0 {
            out -= partial(x_field, x, j, h) * yv[j];
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameCheck {
    /// Gram matrix, or pairing matrix for a coframe.
    pub matrix: DMatrix<f64>,
    /// `max |matrix − I|`.
    pub residual: f64,
}

fn against_identity(m: DMatrix<f64>) -> FrameCheck {
    let n = m.nrows();
    let residual = (&m - DMatrix::identity(n, n)).amax();
    FrameCheck { matrix: m, residual }
}

/// Gram matrix of the frame under the metric at `x`.
pub fn frame_orthonormality(frame: &[Field], m: &MetricSpec, x: &[f64]) -> Result<FrameCheck> {
    if frame.len() != m.dim() {
        return invalid(format!("frame has {} fields, metric dimension is {}", frame.len(), m.dim()));
    }
    let g = eval_metric(m, x)?;
    let e = DMatrix::from_columns(&frame.iter().map(|f| eval_field(f, x)).collect::<Vec<_>>());
    Ok(against_identity(e.transpose() * g * e))
}

/// `⟨θ_i, e_j⟩` at `x`.
pub fn dual_frame_check(frame: &[Field], coframe: &[Field], x: &[f64]) -> Result<FrameCheck> {
    if frame.len() != coframe.len() {
        return invalid("frame and coframe differ in length");
    }
    let e = DMatrix::from_columns(&frame.iter().map(|f| eval_field(f, x)).collect::<Vec<_>>());
    let t = DMatrix::from_columns(&coframe.iter().map(|f| eval_field(f, x)).collect::<Vec<_>>());
    Ok(against_identity(t.transpose() * e))
}
