//! A metric experiment: a group, a metric on a chart, sample points and the
//! checks to run at them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::average::{average_metric, averaged_equivariance_residual, Bump};
use super::frames::{dual_frame_check, eval_field, frame_orthonormality, lie_bracket_fd, parse_field, Field};
use super::spec::{eval_metric, equivariance_residual, estimate_ratio, MetricSpec, MetricSpecJson};
use crate::error::{invalid, Error, Result};
use crate::fixtures;
use crate::group::ratio::rho;
use crate::group::spec::{ElemJson, GroupSpec, GroupSpecJson};
use crate::numfield::NFElement;
use crate::report::CheckResult;

/// A group given inline or by the name of a shipped example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Builtin(String),
    Inline(Box<GroupSpecJson>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPoints {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Sampling interval per coordinate; `[-2, 2]` by default and `[0.5, 3]` on positive coordinates.
    #[serde(default)]
    pub ranges: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlanJson {
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub random: Option<RandomPoints>,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    1e-4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol_equivariance")]
    pub equivariance: f64,
    #[serde(default = "tol_equivariance")]
    pub frame: f64,
    #[serde(default = "tol_coframe")]
    pub coframe: f64,
    #[serde(default = "tol_bracket")]
    pub bracket: f64,
    #[serde(default = "tol_averaging")]
    pub averaging: f64,
    #[serde(default = "tol_averaging")]
    pub ratio_spread: f64,
}

fn tol_equivariance() -> f64 {
    1e-9
}
fn tol_coframe() -> f64 {
    1e-10
}
fn tol_bracket() -> f64 {
    1e-6
}
fn tol_averaging() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equivariance: tol_equivariance(),
            frame: tol_equivariance(),
            coframe: tol_coframe(),
            bracket: tol_bracket(),
            averaging: tol_averaging(),
            ratio_spread: tol_averaging(),
        }
    }
}

impl Tolerances {
    pub fn uniform(t: f64) -> Tolerances {
        Tolerances { equivariance: t, frame: t, coframe: t, bracket: t, averaging: t, ratio_spread: t }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivarianceJson {
    pub generator: String,
    /// Overrides the ratio read off the splitting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<ElemJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketJson {
    pub name: String,
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingJson {
    pub bumps: Vec<Bump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricRunJson {
    pub group: GroupRef,
    pub metric: MetricSpecJson,
    pub plan: SamplePlanJson,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Every generator with its own ratio when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivariance: Option<Vec<EquivarianceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coframe: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub averaging: Option<AveragingJson>,
}

pub fn builtin_group(name: &str) -> Result<&'static str> {
    Ok(match name {
        "counterexample32" => fixtures::COUNTEREXAMPLE32,
        "withorbifold" => fixtures::WITHORBIFOLD,
        "notsemidirect" => fixtures::NOTSEMIDIRECT,
        "bigexample53" => fixtures::BIGEXAMPLE53,
        _ => return Err(Error::NotFound(format!("no built-in group `{name}`"))),
    })
}

pub struct Bracket {
    pub name: String,
    pub x: Field,
    pub y: Field,
    pub expected: Field,
}

pub struct MetricRun {
    pub group: GroupSpec,
    pub metric: MetricSpec,
    pub points: Vec<Vec<f64>>,
    pub step: f64,
    pub tolerances: Tolerances,
    /// Generator, the ratio its pullback should scale by, and an optional tolerance.
    pub equivariance: Vec<(String, f64, Option<f64>)>,
    pub frame: Option<Vec<Field>>,
    pub coframe: Option<Vec<Field>>,
    pub brackets: Vec<Bracket>,
    pub bumps: Option<Vec<Bump>>,
}

impl MetricRun {
    pub fn from_json_str(s: &str) -> Result<MetricRun> {
        let j: MetricRunJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        MetricRun::from_json(&j)
    }

    pub fn from_json(j: &MetricRunJson) -> Result<MetricRun> {
        let group = match &j.group {
            GroupRef::Builtin(name) => GroupSpec::from_json_str(builtin_group(name)?)?,
            GroupRef::Inline(g) => GroupSpec::from_json(g)?,
        };
        let metric = MetricSpec::from_json(&j.metric, &group)?;
        let d = metric.dim();
        if !(j.plan.step > 0.0) {
            return invalid("finite-difference step must be positive");
        }
        let mut points = j.plan.points.clone();
        if let Some(r) = &j.plan.random {
            points.extend(random_points(&metric, r)?);
        }
        if points.is_empty() {
            return invalid("sample plan has no points");
        }
        for x in &points {
            metric.check_domain(x)?;
        }
        let equivariance = match &j.equivariance {
            None => group
                .generators
                .iter()
                .map(|g| Ok((g.name.clone(), rho(g, &group.splitting)?.approx(), None)))
                .collect::<Result<Vec<_>>>()?,
            Some(list) => list
                .iter()
                .map(|e| {
                    let g = group.generator(&e.generator)?;
                    let r = match &e.ratio {
                        Some(v) => NFElement::new(&group.field, v.parse(&group.field)?)?.approx().0,
                        None => rho(g, &group.splitting)?.approx(),
                    };
                    Ok((e.generator.clone(), r, e.tolerance))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let fields = |list: &Option<Vec<Vec<String>>>, what: &str| -> Result<Option<Vec<Field>>> {
            match list {
                None => Ok(None),
                Some(l) if l.len() != d => invalid(format!("{what} has {} entries, expected {d}", l.len())),
                Some(l) => Ok(Some(l.iter().map(|f| parse_field(f, &metric.scope)).collect::<Result<_>>()?)),
            }
        };
        let frame = fields(&j.frame, "frame")?;
        let coframe = fields(&j.coframe, "coframe")?;
        if coframe.is_some() && frame.is_none() {
            return invalid("a coframe needs a frame to pair with");
        }
        let brackets = j
            .brackets
            .iter()
            .map(|b| {
                Ok(Bracket {
                    name: b.name.clone(),
                    x: parse_field(&b.x, &metric.scope)?,
                    y: parse_field(&b.y, &metric.scope)?,
                    expected: parse_field(&b.expected, &metric.scope)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let bumps = match &j.averaging {
            None => None,
            Some(a) => {
                if a.bumps.is_empty() {
                    return invalid("averaging needs at least one bump");
                }
                for b in &a.bumps {
                    b.validate(d)?;
                }
                Some(a.bumps.clone())
            }
        };
        Ok(MetricRun { group, metric, points, step: j.plan.step, tolerances: j.tolerances, equivariance, frame, coframe, brackets, bumps })
    }

    pub fn run(&self) -> Vec<CheckResult> {
        let mut out = vec![self.positivity()];
        for (name, r, tol) in &self.equivariance {
            out.push(self.equivariance(name, *r, tol.unwrap_or(self.tolerances.equivariance)));
            out.push(self.ratio_estimate(name, *r));
        }
        if let Some(frame) = &self.frame {
            out.push(self.frame_check(frame));
            if let Some(coframe) = &self.coframe {
                out.push(self.coframe_check(frame, coframe));
            }
        }
        for b in &self.brackets {
            out.push(self.bracket_check(b));
        }
        if let Some(bumps) = &self.bumps {
            out.extend(self.averaging(bumps));
        }
        out
    }

    fn positivity(&self) -> CheckResult {
        let name = "metric positive definite at samples";
        for x in &self.points {
            if let Err(e) = eval_metric(&self.metric, x) {
                return CheckResult::new(name, false, json!({ "point": x, "error": e.to_string() }));
            }
        }
        CheckResult::new(name, true, json!({ "points": self.points.len(), "certificate": "exact LDL^T of the evaluated matrix" }))
    }

    fn equivariance(&self, generator: &str, ratio: f64, tol: f64) -> CheckResult {
        let name = format!("equivariance {generator}");
        let Ok(g) = self.group.generator(generator) else {
            return CheckResult::new(name, false, json!({ "error": "unknown generator" }));
        };
        let map = self.metric.map_for(g);
        let mut worst = (0.0f64, 0usize);
        for (i, x) in self.points.iter().enumerate() {
            match equivariance_residual(&map, &self.metric, ratio, x) {
                Ok(r) if r > worst.0 || r.is_nan() => worst = (r, i),
                Ok(_) => {}
                Err(e) => return CheckResult::from_error(name, &e),
            }
        }
        CheckResult::new(
            name,
            worst.0 < tol,
            json!({ "ratio": ratio, "max_residual": worst.0, "worst_point": self.points[worst.1], "tolerance": tol, "points": self.points.len() }),
        )
    }

    fn ratio_estimate(&self, generator: &str, ratio: f64) -> CheckResult {
        let name = format!("ratio estimate {generator}");
        let Ok(g) = self.group.generator(generator) else {
            return CheckResult::new(name, false, json!({ "error": "unknown generator" }));
        };
        let map = self.metric.map_for(g);
        let mut est = Vec::with_capacity(self.points.len());
        for x in &self.points {
            match estimate_ratio(&map, &self.metric, x) {
                Ok(r) => est.push(r),
                Err(e) => return CheckResult::from_error(name, &e),
            }
        }
        let lo = est.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = est.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = self.tolerances.ratio_spread;
        let ok = hi - lo < tol && ((lo + hi) / 2.0 - ratio.abs()).abs() < tol * ratio.abs().max(1.0);
        CheckResult::new(name, ok, json!({ "expected": ratio.abs(), "min": lo, "max": hi, "spread": hi - lo, "tolerance": tol }))
    }

    fn frame_check(&self, frame: &[Field]) -> CheckResult {
        let name = "frame orthonormality";
        let mut worst = 0.0f64;
        for x in &self.points {
            match frame_orthonormality(frame, &self.metric, x) {
                Ok(c) => worst = worst.max(c.residual),
                Err(e) => return CheckResult::from_error(name, &e),
            }
        }
        let tol = self.tolerances.frame;
        CheckResult::new(name, worst < tol, json!({ "max_residual": worst, "tolerance": tol, "points": self.points.len() }))
    }

    fn coframe_check(&self, frame: &[Field], coframe: &[Field]) -> CheckResult {
        let name = "coframe pairing";
        let mut worst = (0.0f64, None);
        for x in &self.points {
            match dual_frame_check(frame, coframe, x) {
                Ok(c) if c.residual > worst.0 => worst = (c.residual, Some((x.clone(), c.matrix))),
                Ok(_) => {}
                Err(e) => return CheckResult::from_error(name, &e),
            }
        }
        let tol = self.tolerances.coframe;
        let mut w = json!({ "max_residual": worst.0, "tolerance": tol, "points": self.points.len() });
        if worst.0 >= tol {
            if let Some((x, m)) = worst.1 {
                let off: Vec<_> = (0..m.nrows())
                    .flat_map(|i| (0..m.ncols()).map(move |k| (i, k)))
                    .filter(|&(i, k)| (m[(i, k)] - if i == k { 1.0 } else { 0.0 }).abs() >= tol)
                    .map(|(i, k)| json!({ "coform": i, "field": k, "pairing": m[(i, k)] }))
                    .collect();
                w["worst_point"] = json!(x);
                w["offending_entries"] = json!(off);
            }
        }
        CheckResult::new(name, worst.0 < tol, w)
    }

    fn bracket_error(&self, b: &Bracket, h: f64) -> f64 {
        self.points
            .iter()
            .map(|x| (lie_bracket_fd(&b.x, &b.y, x, h) - eval_field(&b.expected, x)).amax())
            .fold(0.0, f64::max)
    }

    /// Error at `h`, and its ratio to the error at `2h`: about 4 unless the
    /// difference quotients are already exact.
    fn bracket_check(&self, b: &Bracket) -> CheckResult {
        let name = format!("bracket {}", b.name);
        let h = self.step;
        let e1 = self.bracket_error(b, h);
        let e2 = self.bracket_error(b, 2.0 * h);
        let tol = self.tolerances.bracket;
        let floor = 1e-10;
        let (decay, order) = if e2 <= floor {
            (true, "exact up to rounding".to_string())
        } else {
            let r = e2 / e1;
            ((3.0..=5.0).contains(&r), format!("error ratio {r:.3} on halving h"))
        };
        CheckResult::new(name, e1 < tol && decay, json!({ "step": h, "max_error": e1, "max_error_2h": e2, "convergence": order, "tolerance": tol }))
    }

    fn averaging(&self, bumps: &[Bump]) -> Vec<CheckResult> {
        let mut out = Vec::new();
        let tol = self.tolerances.averaging;
        let mut info = None;
        for x in &self.points {
            match average_metric(&self.group, &self.metric, bumps, x) {
                Ok(a) if a.degenerate => {
                    out.push(CheckResult::new("averaged metric", false, json!({ "point": x, "error": "no orbit element meets a bump" })));
                    return out;
                }
                Ok(a) => {
                    if info.is_none() {
                        info = Some(json!({ "generator": a.generator, "escape_coordinate": a.escape_coordinate, "contributing_at_first_point": a.contributing }));
                    }
                }
                Err(e) => {
                    out.push(CheckResult::from_error("averaged metric", &e));
                    return out;
                }
            }
        }
        out.push(CheckResult::new("averaged metric", true, info.unwrap_or(json!({}))));
        for gen in self.group.names() {
            let name = format!("averaged equivariance {gen}");
            let mut worst = 0.0f64;
            for x in &self.points {
                match averaged_equivariance_residual(&self.group, &self.metric, bumps, &gen, x) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => {
                        worst = f64::NAN;
                        out.push(CheckResult::from_error(name.clone(), &e));
                        break;
                    }
                }
            }
            if !worst.is_nan() {
                out.push(CheckResult::new(name, worst < tol, json!({ "max_residual": worst, "tolerance": tol, "points": self.points.len() })));
            }
        }
        out
    }
}

fn random_points(metric: &MetricSpec, r: &RandomPoints) -> Result<Vec<Vec<f64>>> {
    for name in r.ranges.keys() {
        if metric.index_of(name).is_none() {
            return invalid(format!("range given for unknown coordinate `{name}`"));
        }
    }
    let ranges: Vec<[f64; 2]> = metric
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| r.ranges.get(c).copied().unwrap_or(if metric.positive.contains(&i) { [0.5, 3.0] } else { [-2.0, 2.0] }))
        .collect();
    if ranges.iter().any(|[a, b]| !(a < b) || !a.is_finite() || !b.is_finite()) {
        return invalid("sampling ranges need finite lo < hi");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    Ok((0..r.count).map(|_| ranges.iter().map(|[a, b]| rng.gen_range(*a..*b)).collect()).collect())
}
