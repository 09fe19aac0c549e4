//! Riemannian metrics on charts of the total space: evaluation, pullbacks,
//! averaging, frames and brackets.

pub mod average;
pub mod expr;
pub mod frames;
pub mod run;
pub mod spec;

pub use average::{average_metric, averaged_equivariance_residual, Averaged, Bump};
pub use expr::{Expr, KPoly, Scope};
pub use frames::{dual_frame_check, eval_field, frame_orthonormality, lie_bracket_fd, parse_field, FrameCheck};
pub use spec::{certify_positive_definite, equivariance_residual, estimate_ratio, eval_metric, pullback_metric, AffineMap, MetricSpec, MetricSpecJson, Space};
pub use run::{MetricRun, MetricRunJson, Tolerances};
