//! The shipped worked examples, rerun end to end.

use std::thread;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::admissibility::{block_decompose, check_admissible, density_check, flat_subspace, is_semisimple, modulus_classes, FlatOptions};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::group::automorphism::BundleAutomorphism;
use crate::group::fixed::fiber_fixed_point_free;
use crate::group::ratio::{rho, split_extension};
use crate::group::relations::{conjugate_translation, splitting_obstruction, SplitResult};
use crate::group::section::constant_translation_obstruction;
use crate::group::spec::{evaluate_word, ElemJson, GroupSpec};
use crate::group::word::{Letter, Word};
use crate::json;
use crate::linalg::{rat, ratio, solve_integer, IntegerSolution, PolyZ, Rat, RatMatrix};
use crate::metric::frames::{dual_frame_check, parse_field};
use crate::metric::run::MetricRun;
use crate::numfield::{FormalVector, Interval, NFElement, NFVector, NumberField};
use crate::pipeline::{check_group, leaf_stabilizer_witness};
use crate::report::{timed, CheckResult};

/// Case names in report order.
pub const CASES: [&str; 7] = ["a0-eigen", "averaging-demo", "bigexample53", "counterexample32", "notsemidirect", "split-extension", "withorbifold"];

/// Runs one case, or every case when `case` is `None`. Check names carry the
/// case as a prefix.
pub fn reproduce(case: Option<&str>) -> Result<Vec<CheckResult>> {
    let names: Vec<&str> = match case {
        Some(c) if CASES.contains(&c) => vec![c],
        Some(c) => return Err(Error::NotFound(format!("no case `{c}`; known cases: {}", CASES.join(", ")))),
        None => CASES.to_vec(),
    };
    let results: Vec<Result<Vec<CheckResult>>> =
        thread::scope(|s| names.iter().map(|&n| s.spawn(move || run_case(n))).collect::<Vec<_>>().into_iter().map(|h| h.join().expect("case thread panicked")).collect());
    let mut out = Vec::new();
    for (name, r) in names.iter().zip(results) {
        for mut c in r? {
            c.name = format!("{name}: {}", c.name);
            out.push(c);
        }
    }
    Ok(out)
}

pub fn run_case(name: &str) -> Result<Vec<CheckResult>> {
    let mut err = None;
    let out = timed(|| {
        let r = match name {
            "a0-eigen" => a0_eigen(),
            "averaging-demo" => averaging_demo(),
            "bigexample53" => bigexample53(),
            "counterexample32" => counterexample32(),
            "notsemidirect" => notsemidirect(),
            "split-extension" => split_extension_case(),
            "withorbifold" => withorbifold(),
            _ => Err(Error::NotFound(format!("no case `{name}`"))),
        };
        r.unwrap_or_else(|e| {
            err = Some(e);
            Vec::new()
        })
    });
    match err {
        Some(e @ Error::NotFound(_)) => Err(e),
        Some(e) => Ok(vec![CheckResult::from_error("case", &e)]),
        None => Ok(out),
    }
}

fn load(src: &str) -> Result<GroupSpec> {
    GroupSpec::from_json_str(src)
}

fn kvec(spec: &GroupSpec, v: &[Rat]) -> Vec<Vec<Rat>> {
    v.iter().map(|r| spec.field.rat_coords(r)).collect()
}

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

fn elems(v: &[Vec<Rat>]) -> Vec<ElemJson> {
    v.iter().map(|e| ElemJson::from_coords(e)).collect()
}

/// The enclosure isolates the root of `f` above `floor`: `f` changes sign on it.
fn encloses_root(iv: &Interval, f: &PolyZ, floor: &Rat) -> bool {
    let (a, b) = (f.eval_rat(&iv.lo), f.eval_rat(&iv.hi));
    iv.lo > *floor && (a.is_negative() != b.is_negative() || a == Rat::default() || b == Rat::default())
}

fn word_translation(spec: &GroupSpec, tokens: &[&str], expected: &[i64]) -> Result<CheckResult> {
    let f = evaluate_word(&spec.parse_word(tokens)?, spec)?;
    let want = kvec(spec, &ints(expected));
    let got = f.pure_translation().cloned();
    let ok = got.as_ref() == Some(&want);
    Ok(CheckResult::new(
        format!("{} = translation {expected:?}", tokens.join(" ")),
        ok,
        json!({ "translation": got.as_deref().map(elems), "expected": expected }),
    ))
}

fn group_checks(spec: &GroupSpec) -> Result<Vec<CheckResult>> {
    Ok(check_group(spec)?.into_iter().map(|c| CheckResult { name: format!("group: {}", c.name), ..c }).collect())
}

fn metric_checks(src: &str) -> Result<(MetricRun, Vec<CheckResult>)> {
    let run = MetricRun::from_json_str(src)?;
    let checks = run.run().into_iter().map(|c| CheckResult { name: format!("metric: {}", c.name), ..c }).collect();
    Ok((run, checks))
}

fn a0_eigen() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let a0 = RatMatrix::from_i64(&[&[1, 1], &[1, 2]]);
    let a32 = RatMatrix::from_i64(&[&[1, 2, 0, 0], &[2, 3, 0, 0], &[0, 0, 1, 2], &[0, 0, 2, 3]]);

    let top = modulus_classes(&a0)?.remove(0);
    let golden_sq = PolyZ::from_i64(&[1, -3, 1]);
    let ok = encloses_root(&top.modulus, &golden_sq, &ratio(3, 2)) && top.modulus.width() < ratio(1, 1_000_000_000_000);
    out.push(CheckResult::new("A0 top modulus is (3+sqrt5)/2", ok, json!(top.to_json())));
    let flat = flat_subspace(&a0, &top, FlatOptions::default())?;
    let dense = density_check(&flat.splitting.basis_eq)?;
    out.push(CheckResult::new(
        "A0 eigenline dense, hull R^2",
        dense.dense && dense.hull.rank() == 2,
        json!({ "eq": flat.splitting.basis_eq.iter().map(FormalVector::approx).collect::<Vec<_>>(), "hull_rank": dense.hull.rank() }),
    ));

    let blocks = block_decompose(&a32)?;
    let quad = PolyZ::from_i64(&[-1, -4, 1]);
    let ok = blocks.blocks.len() == 2 && blocks.blocks.iter().all(|b| b.matrix.rows() == 2 && b.poly == quad) && blocks.reassemble() == a32;
    let (basis, bj) = blocks.to_json();
    out.push(CheckResult::new("4x4 matrix splits into two blocks with x^2-4x-1", ok, json!({ "change_of_basis": basis, "blocks": bj })));
    let classes = modulus_classes(&a32)?;
    let ok = encloses_root(&classes[0].modulus, &quad, &rat(4)) && classes[0].modulus.width() < ratio(1, 1_000_000_000_000);
    out.push(CheckResult::new("4x4 top modulus is 2+sqrt5", ok, json!(classes[0].to_json())));
    let flat = flat_subspace(&a32, &classes[0], FlatOptions::default())?;
    out.push(CheckResult::new("4x4 flat subspace has dimension 2", flat.splitting.q() == 2, json!({ "q": flat.splitting.q() })));

    let diag = RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]]);
    let jordan = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
    let (wa, wd, wj) = (is_semisimple(&a0)?, is_semisimple(&diag)?, is_semisimple(&jordan)?);
    let ok = wa.semisimple && wd.semisimple && !wj.semisimple && wj.min_poly == PolyZ::from_i64(&[1, -2, 1]).to_q();
    out.push(CheckResult::new(
        "semi-simplicity gate",
        ok,
        json!({ "A0": wa.semisimple, "diag(1,1,-1,-1)": wd.semisimple, "jordan_min_poly": wj.min_poly.to_string(), "jordan_gcd": wj.gcd.to_string() }),
    ));

    let q = NumberField::rationals();
    let line = FormalVector::plain(NFVector::from_rats(&q, &ints(&[1, 0])));
    let d = density_check(&[line])?;
    out.push(CheckResult::new("rational line (1,0) not dense", !d.dense && d.hull.rank() == 1, json!(d.to_json())));
    Ok(out)
}

fn counterexample32() -> Result<Vec<CheckResult>> {
    let spec = load(fixtures::COUNTEREXAMPLE32)?;
    let mut out = group_checks(&spec)?;
    out.push(word_translation(&spec, &["T_A", "T_B", "T_A^-1", "T_B^-1"], &[1, 1, 0, 0])?);
    out.push(word_translation(&spec, &["T_B^2"], &[0, 1, 0, 0])?);

    let e3 = ints(&[0, 0, 1, 0]);
    let conj = conjugate_translation(spec.generator("T_B")?, &e3)?;
    let got = conj.pure_translation().cloned();
    let ok = got.as_ref() == Some(&kvec(&spec, &ints(&[0, 0, -1, 0])));
    out.push(CheckResult::new(
        "T_B tau_e3 T_B^-1 = tau_-e3, so the leaf stabilizer is not abelian",
        ok,
        json!({ "conjugate": got.as_deref().map(elems), "search": leaf_stabilizer_witness(&spec)? }),
    ));
    out.extend(metric_checks(fixtures::METRIC_COUNTEREXAMPLE32)?.1);
    Ok(out)
}

fn withorbifold() -> Result<Vec<CheckResult>> {
    let spec = load(fixtures::WITHORBIFOLD)?;
    let mut out = group_checks(&spec)?;
    let r = spec.generator("r")?;
    let x = kvec(&spec, &ints(&[0, 0, 1, 0]));
    let res = fiber_fixed_point_free(r, &x)?;
    let ok = res.free && r.constant == kvec(&spec, &[rat(0), ratio(1, 2)]);
    out.push(CheckResult::new("r has no fixed point over ((0,0,1),0)", ok, serde_json::to_value(res.to_json()).unwrap_or_default()));

    let mut mutated = spec.clone();
    let idx = mutated.names().iter().position(|n| n == "r").expect("r is a generator");
    mutated.generators[idx].constant = kvec(&spec, &ints(&[0, 1]));
    mutated.relations.clear();
    let rep = check_admissible(&mutated);
    let failed: Vec<&str> = rep.failures().iter().map(|c| c.hypothesis.as_str()).collect();
    out.push(CheckResult::new(
        "translation (0,1) fails only the fibre check",
        failed == ["no fixed points on fibres over fixed points"],
        json!({ "failed": failed }),
    ));
    Ok(out)
}

fn notsemidirect() -> Result<Vec<CheckResult>> {
    let spec = load(fixtures::NOTSEMIDIRECT)?;
    let mut out = group_checks(&spec)?;
    let nonexistent = matches!(splitting_obstruction(&spec)?, SplitResult::Nonexistent { .. });
    out.push(CheckResult::new("no semidirect splitting", nonexistent, json!({})));

    let i_a = RatMatrix::from_i64(&[&[2, -1], &[-1, 3]]);
    let b = ints(&[1, 0]);
    let ok;
    let witness = match solve_integer(&i_a, &b)? {
        IntegerSolution::RationalOnly { rational, certificate } => {
            let wm: Vec<Rat> = (0..2).map(|j| (0..2).map(|i| &certificate[i] * i_a.get(i, j)).sum()).collect();
            let wb: Rat = certificate.iter().zip(&b).map(|(w, x)| w * x).sum();
            ok = rational == vec![ratio(3, 5), ratio(1, 5)] && wm.iter().all(|x| x.is_integer()) && !wb.is_integer();
            json!({ "rational": json::nums(&rational), "certificate": json::nums(&certificate), "wM": json::nums(&wm), "wb": wb.to_string() })
        }
        other => {
            ok = false;
            json!({ "unexpected": format!("{other:?}") })
        }
    };
    out.push(CheckResult::new("(I-A)x = (1,0) has the rational solution (3/5,1/5) and no integer one", ok, witness));
    Ok(out)
}

fn bigexample53() -> Result<Vec<CheckResult>> {
    let spec = load(fixtures::BIGEXAMPLE53)?;
    let mut out = group_checks(&spec)?;
    out.push(word_translation(&spec, &["[T1,S]"], &[0, 0, 1, 0])?);
    out.push(word_translation(&spec, &["[T2,S]"], &[0, 0, 0, 1])?);
    out.push(word_translation(&spec, &["[T1,T2]"], &[0, 0, 0, 0])?);

    let ob = constant_translation_obstruction(&spec, "T1", "S")?;
    let ok = ob.obstructs && ob.commutator == kvec(&spec, &ints(&[0, 0, 1, 0]));
    out.push(CheckResult::new("constant translation parts are impossible: [T1,S] = (0,0,1,0)", ok, serde_json::to_value(ob.to_json()).unwrap_or_default()));

    let (run, checks) = metric_checks(fixtures::METRIC_BIGEXAMPLE53)?;
    out.extend(checks);
    if let Some(frame) = &run.frame {
        let mut literal = run.coframe.clone().expect("coframe present");
        let t3: Vec<String> = ["-1/pi", "0", "1", "0", "0", "0", "0", "0"].map(String::from).to_vec();
        literal[2] = parse_field(&t3, &run.metric.scope)?;
        let (iw, it) = (run.metric.index_of("w1").expect("w1"), run.metric.index_of("t").expect("t"));
        let mut worst = 0.0f64;
        let mut max_gap = 0.0f64;
        for x in &run.points {
            let c = dual_frame_check(frame, &literal, x)?;
            worst = worst.max(c.residual);
            max_gap = max_gap.max((c.residual - (x[iw] / x[it]).abs()).abs());
        }
        out.push(CheckResult::info(
            "coframe with third form dv1 - du1/pi pairs to |w1/t| against the last field",
            json!({ "max_residual": worst, "max_deviation_from_w1_over_t": max_gap }),
        ));
    }
    Ok(out)
}

fn split_extension_case() -> Result<Vec<CheckResult>> {
    let spec = load(fixtures::BIGEXAMPLE53)?;
    let mut out = Vec::new();
    let x = split_extension(&spec, None)?;
    let lambda = NFElement::new(&spec.field, vec![ratio(3, 2), ratio(1, 2)])?;
    let ok = x.exponents == [0, 0, 0, 1] && x.lambda.squared == lambda.mul(&lambda)? && x.section.display(&spec.names()) == "T" && x.kernel.len() == 3 && x.verified;
    out.push(CheckResult::new("rho = (1,1,1,lambda) with section T", ok, serde_json::to_value(x.to_json(&spec.names())).unwrap_or_default()));

    let mut kernel_ok = true;
    for w in &x.kernel {
        kernel_ok &= rho(&evaluate_word(w, &spec)?, &spec.splitting)?.is_one();
    }
    out.push(CheckResult::new("kernel words have rho = 1", kernel_ok, json!({ "kernel": x.kernel.iter().map(|w| w.display(&spec.names())).collect::<Vec<_>>() })));

    let sq: Vec<NFElement> = x.ratios.iter().map(|r| r.squared.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = None;
    for i in 0..200 {
        let len = rng.gen_range(1..=6);
        let letters: Vec<Letter> = (0..len).map(|_| Letter::Gen { index: rng.gen_range(0..spec.generators.len()), power: rng.gen_range(-2..=2) }).collect();
        let w = Word(letters);
        let f: BundleAutomorphism = evaluate_word(&w, &spec)?;
        let lhs = rho(&f, &spec.splitting)?.squared;
        let mut rhs = NFElement::from_i64(&spec.field, 1);
        for (g, e) in w.reduced() {
            rhs = rhs.mul(&sq[g].pow(e))?;
        }
        if lhs != rhs {
            bad = Some((i, w.display(&spec.names())));
            break;
        }
    }
    out.push(CheckResult::new("rho is a homomorphism on 200 random words", bad.is_none(), json!({ "words": 200, "max_length": 6, "counterexample": bad })));
    Ok(out)
}

/// `g_N(t) = Σ_n χ(λⁿt) (1 + λ^{2n} t²)` for the demo: the pulled-back seed
/// picks up `λ^{2n}` and the weight `ρ^{−2n}` cancels it.
fn averaging_oracle(lambda: f64, center: f64, radius: f64, t: f64) -> f64 {
    (-80..=80)
        .map(|n| {
            let y = lambda.powi(n) * t;
            let chi = (1.0 - (y - center).powi(2) / (radius * radius)).max(0.0).powi(4);
            chi * (1.0 + y * y)
        })
        .sum()
}

fn averaging_demo() -> Result<Vec<CheckResult>> {
    let (run, mut out) = metric_checks(fixtures::METRIC_AVERAGING_DEMO)?;
    let lambda = rho(&run.group.generators[0], &run.group.splitting)?.approx();
    let bump = &run.bumps.as_ref().expect("bumps present")[0];
    let mut worst = 0.0f64;
    for x in &run.points {
        let a = crate::metric::average_metric(&run.group, &run.metric, run.bumps.as_deref().unwrap_or_default(), x)?;
        let want = averaging_oracle(lambda, bump.center[0], bump.radius, x[0]);
        worst = worst.max((a.matrix[(0, 0)] - want).abs() / want);
    }
    out.push(CheckResult::new("averaged metric matches the closed-form sum", worst < 1e-10, json!({ "max_relative_error": worst, "tolerance": 1e-10 })));
    Ok(out)
}
