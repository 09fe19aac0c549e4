use lcp_core::fixtures;
use lcp_core::group::*;
use lcp_core::linalg::{rat, ratio, solve_integer, Field, IntegerSolution, Rat, RatMatrix};
use lcp_core::metric::{Expr, Scope};
use lcp_core::numfield::NFElement;
use lcp_core::Error;
use nalgebra::DVector;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn load(s: &str) -> GroupSpec {
    GroupSpec::from_json_str(s).unwrap()
}

fn all_specs() -> Vec<GroupSpec> {
    [fixtures::COUNTEREXAMPLE32, fixtures::WITHORBIFOLD, fixtures::NOTSEMIDIRECT, fixtures::BIGEXAMPLE53].into_iter().map(load).collect()
}

fn kvec(spec: &GroupSpec, v: &[Rat]) -> KVec {
    v.iter().map(|r| spec.field.rat_coords(r)).collect()
}

/// Random total-space point inside the chart: positive half-line coordinates,
/// unit vectors on spheres.
fn sample(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut y: Vec<f64> = (0..spec.p).map(|_| rng.gen_range(-2.0..2.0)).collect();
    for (kind, r) in spec.base.ranges() {
        match kind {
            FactorKind::Euclidean => y.extend(r.map(|_| rng.gen_range(-2.0..2.0))),
            FactorKind::HalfLine => y.extend(r.map(|_| rng.gen_range(0.2..3.0))),
            FactorKind::Sphere2 => {
                let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
                y.extend(v.iter().map(|x| x / n));
            }
        }
    }
    DVector::from_vec(y)
}

/// Applies a word letter by letter in floating point, last letter first.
fn apply_word_f64(spec: &GroupSpec, tokens: &[&str], y: &DVector<f64>) -> DVector<f64> {
    let w = spec.parse_word(tokens).unwrap();
    let mut z = y.clone();
    for (i, e) in w.reduced().into_iter().rev() {
        let g = &spec.generators[i];
        let step = if e < 0 { g.inverse().unwrap().to_f64() } else { g.to_f64() };
        for _ in 0..e.abs() {
            z = step.apply(&z);
        }
    }
    z
}

#[test]
fn counterexample_commutator_is_a_lattice_translation() {
    let spec = load(fixtures::COUNTEREXAMPLE32);
    let w = spec.parse_word(&["T_A", "T_B", "T_A^-1", "T_B^-1"]).unwrap();
    let c = evaluate_word(&w, &spec).unwrap();
    assert_eq!(c.pure_translation().unwrap(), &kvec(&spec, &[rat(1), rat(1), rat(0), rat(0)]));

    let tb2 = evaluate_word(&spec.parse_word(&["T_B^2"]).unwrap(), &spec).unwrap();
    assert_eq!(tb2.pure_translation().unwrap(), &kvec(&spec, &[rat(0), rat(1), rat(0), rat(0)]));

    let tb = spec.generator("T_B").unwrap();
    let conj = conjugate_translation(tb, &[rat(0), rat(0), rat(1), rat(0)]).unwrap();
    assert_eq!(conj.pure_translation().unwrap(), &kvec(&spec, &[rat(0), rat(0), rat(-1), rat(0)]));
}

#[test]
fn exact_words_agree_with_pointwise_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in all_specs() {
        for rel in &spec.relations {
            let names = spec.names();
            let tokens = rel.word.display(&names);
            let tokens: Vec<&str> = tokens.split('·').collect();
            let exact = evaluate_word(&rel.word, &spec).unwrap().to_f64();
            for _ in 0..20 {
                let y = sample(&spec, &mut rng);
                let a = exact.apply(&y);
                let b = apply_word_f64(&spec, &tokens, &y);
                assert!((a - b).amax() < 1e-8, "{}: {}", spec.name, rel.name);
            }
        }
    }
}

#[test]
fn every_listed_relation_holds() {
    for spec in all_specs() {
        for rel in &spec.relations {
            let r = verify_relation(rel, &spec).unwrap();
            assert!(r.verdict(), "{}: {}", spec.name, rel.name);
            assert!(r.strict && r.torus);
        }
    }
}

#[test]
fn wrong_translation_fails_strictly_but_not_on_the_torus() {
    let mut spec = load(fixtures::COUNTEREXAMPLE32);
    let rel = &mut spec.relations[0];
    rel.equals.translation = Some(rel.equals.translation.take().unwrap().into_iter().map(|_| spec.field.zero()).collect());
    let r = verify_relation(&spec.relations[0], &spec).unwrap();
    assert!(!r.strict && r.torus && !r.verdict());
    spec.relations[0].equals.torus = true;
    assert!(verify_relation(&spec.relations[0], &spec).unwrap().verdict());
}

#[test]
fn commutators_of_the_twisted_example() {
    let spec = load(fixtures::BIGEXAMPLE53);
    let cases: [(&[&str], [i64; 4]); 3] = [
        (&["[T1,S]"], [0, 0, 1, 0]),
        (&["[T2,S]"], [0, 0, 0, 1]),
        (&["[T1,T2]"], [0, 0, 0, 0]),
    ];
    for (w, t) in cases {
        let c = evaluate_word(&spec.parse_word(w).unwrap(), &spec).unwrap();
        let expected = kvec(&spec, &t.map(rat));
        assert_eq!(c.pure_translation().unwrap(), &expected, "{w:?}");
    }
    let lhs = evaluate_word(&spec.parse_word(&["[T,T1]"]).unwrap(), &spec).unwrap();
    let rhs = evaluate_word(&spec.parse_word(&["T1^-1", "T2"]).unwrap(), &spec).unwrap();
    assert!(lhs.same_map(&rhs));
}

#[test]
fn notsemidirect_has_no_split_lift() {
    let spec = load(fixtures::NOTSEMIDIRECT);
    let res = splitting_obstruction(&spec).unwrap();
    let SplitResult::Nonexistent { system, rational, .. } = res else { panic!("expected an obstruction") };
    let z = rational.unwrap();
    assert_eq!(system.matrix.mul_vec(&z), system.rhs);
    // corrections of w2 are forced to −τ
    assert_eq!(&z[2..], &[ratio(-3, 5), ratio(-1, 5)]);

    let a = RatMatrix::from_i64(&[&[-1, 1], &[1, -2]]);
    let i_a = RatMatrix::identity(2).sub(&a);
    match solve_integer(&i_a, &[rat(1), rat(0)]).unwrap() {
        IntegerSolution::RationalOnly { rational, .. } => assert_eq!(rational, vec![ratio(3, 5), ratio(1, 5)]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn split_lifts_make_relations_exact() {
    for spec in all_specs() {
        match splitting_obstruction(&spec).unwrap() {
            SplitResult::Exists { lifts } => {
                let gens: Vec<BundleAutomorphism> = spec
                    .generators
                    .iter()
                    .zip(&lifts)
                    .map(|(g, z)| g.shifted(&z.iter().map(|v| Rat::from_integer(v.clone())).collect::<Vec<_>>()))
                    .collect();
                let mut s = spec.clone();
                s.generators = gens;
                for rel in &s.relations {
                    let mut plain = rel.clone();
                    plain.equals.translation = None;
                    assert!(verify_relation(&plain, &s).unwrap().strict, "{}: {}", spec.name, rel.name);
                }
            }
            SplitResult::Nonexistent { system, certificate, rational } => {
                let y = certificate;
                let yt_m: Vec<Rat> = (0..system.matrix.cols())
                    .map(|j| (0..system.matrix.rows()).fold(Rat::zero(), |acc, i| acc + &y[i] * system.matrix.get(i, j)))
                    .collect();
                let yb = y.iter().zip(&system.rhs).fold(Rat::zero(), |acc, (a, b)| acc + a * b);
                if rational.is_some() {
                    assert!(yt_m.iter().all(|v| v.is_integer()), "{}", spec.name);
                    assert!(!yb.is_integer(), "{}", spec.name);
                } else {
                    assert!(yt_m.iter().all(Zero::is_zero), "{}", spec.name);
                    assert!(!yb.is_zero(), "{}", spec.name);
                }
            }
        }
    }
}

#[test]
fn twisted_example_does_not_split() {
    let spec = load(fixtures::BIGEXAMPLE53);
    assert!(!splitting_obstruction(&spec).unwrap().exists());
}

#[test]
fn orbifold_reflection_acts_freely_on_the_fibre() {
    let spec = load(fixtures::WITHORBIFOLD);
    let r = spec.generator("r").unwrap();
    let x = spec.base_fixed_points[0].point.clone();
    let res = fiber_fixed_point_free(r, &x).unwrap();
    assert!(res.free);
    assert_eq!(fixed_point_in_box(r, &x, 3).unwrap(), None);

    let mut r2 = r.clone();
    r2.constant = kvec(&spec, &[rat(0), rat(1)]);
    let res = fiber_fixed_point_free(&r2, &x).unwrap();
    assert!(!res.free);
    assert!(fixed_point_in_box(&r2, &x, 3).unwrap().is_some());
    let z: Vec<Rat> = res.witness.unwrap().into_iter().map(Rat::from_integer).collect();
    let shifted = r2.shifted(&z);
    let v = res.fixed_point.unwrap();
    assert_eq!(shifted.translation_at(&x).iter().zip(&v).map(|(b, v)| spec.field.add(b, v)).collect::<Vec<_>>(), v);
}

#[test]
fn reflection_in_the_counterexample_is_free() {
    let spec = load(fixtures::COUNTEREXAMPLE32);
    let tb = spec.generator("T_B").unwrap();
    for t in [rat(1), ratio(7, 3), rat(40)] {
        let x = vec![spec.field.rat_coords(&t)];
        let res = fiber_fixed_point_free(tb, &x).unwrap();
        assert!(res.free);
        assert_eq!(res.b1, kvec(&spec, &[rat(0), ratio(1, 2), rat(0), rat(0)]));
        assert_eq!(fixed_point_in_box(tb, &x, 3).unwrap(), None);
    }
}

#[test]
fn fixed_point_analysis_examples() {
    let q = lcp_core::numfield::NumberField::rationals();
    let v = |xs: &[Rat]| xs.iter().map(|r| vec![r.clone()]).collect::<Vec<_>>();
    let minus = RatMatrix::from_i64(&[&[-1, 0], &[0, -1]]);
    let res = affine_fixed_point_analysis(&q, &minus, &v(&[rat(3), ratio(1, 3)])).unwrap();
    assert!(res.has_fixed_point);
    assert_eq!(res.v2, v(&[ratio(3, 2), ratio(1, 6)]));
    let id = RatMatrix::identity(2);
    assert!(affine_fixed_point_analysis(&q, &id, &v(&[rat(0), rat(0)])).unwrap().has_fixed_point);
    let shear = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
    assert!(matches!(affine_fixed_point_analysis(&q, &shear, &v(&[rat(0), rat(0)])), Err(Error::InvalidInput(_))));
}

#[test]
fn base_point_must_be_fixed() {
    let spec = load(fixtures::WITHORBIFOLD);
    let r = spec.generator("r").unwrap();
    let x = kvec(&spec, &[rat(1), rat(0), rat(0), rat(0)]);
    assert!(fiber_fixed_point_free(r, &x).is_err());
}

#[test]
fn ratio_section_for_the_twisted_example() {
    let spec = load(fixtures::BIGEXAMPLE53);
    let ext = split_extension(&spec, None).unwrap();
    let lambda = NFElement::new(&spec.field, vec![ratio(3, 2), ratio(1, 2)]).unwrap();
    assert_eq!(ext.lambda.squared, lambda.mul(&lambda).unwrap());
    assert_eq!(ext.exponents, vec![0, 0, 0, 1]);
    assert_eq!(ext.section.display(&spec.names()), "T");
    assert_eq!(ext.kernel.len(), 3);
    assert!(ext.verified);
}

#[test]
fn counterexample_ratios() {
    let spec = load(fixtures::COUNTEREXAMPLE32);
    let ta = rho(spec.generator("T_A").unwrap(), &spec.splitting).unwrap();
    let l = NFElement::new(&spec.field, vec![rat(2), rat(1)]).unwrap();
    assert_eq!(ta.squared, l.mul(&l).unwrap());
    assert!(rho(spec.generator("T_B").unwrap(), &spec.splitting).unwrap().is_one());
}

#[test]
fn isometric_groups_have_no_split_extension() {
    let mut spec = load(fixtures::COUNTEREXAMPLE32);
    spec.generators.remove(0);
    spec.relations.clear();
    assert!(matches!(split_extension(&spec, None), Err(Error::NoStrictSimilarity)));
}

#[test]
fn quadratic_section_removes_base_dependence() {
    let spec = load(
        r#"{
          "p": 2,
          "base": [{ "kind": "euclidean", "coords": ["x"] }],
          "splitting": { "eq": [[1, 0]], "epq": [[0, 1]] },
          "generators": [{
            "name": "g",
            "linear": [[1, 0], [0, 1]],
            "translation": { "linear": { "x": [0, 1] } },
            "base": [{ "kind": "affine", "shift": [1] }]
          }]
        }"#,
    );
    let scope = Scope::new(&spec.base.coord_names());
    let s = vec![Expr::parse("0", &scope).unwrap(), Expr::parse("x*(x-1)/2", &scope).unwrap()];
    let pts: Vec<Vec<f64>> = vec![vec![-1.5], vec![0.0], vec![2.25]];
    let c = conjugate_by_section(&spec, &s, &pts, 1e-12).unwrap();
    let g = &c.generators[0];
    assert!(g.constant_translation);
    assert_eq!(g.degree, Some(0));
    assert!(g.spread < 1e-12);
    let conj = g.automorphism.as_ref().unwrap();
    assert!(!conj.has_coupling());
    assert!(conj.constant.iter().all(|e| spec.field.is_zero(e)));

    let zero = vec![Expr::zero(), Expr::zero()];
    let c = conjugate_by_section(&spec, &zero, &pts, 1e-12).unwrap();
    assert!(c.spec.unwrap().generators[0].same_map(&spec.generators[0]));
    assert!(!c.generators[0].constant_translation);
}

#[test]
fn twisted_example_cannot_have_constant_translations() {
    let spec = load(fixtures::BIGEXAMPLE53);
    let ob = constant_translation_obstruction(&spec, "T1", "S").unwrap();
    assert!(ob.obstructs);
    assert_eq!(ob.commutator, kvec(&spec, &[rat(0), rat(0), rat(1), rat(0)]));

    let scope = Scope::new(&spec.base.coord_names());
    let s: Vec<Expr> = ["0", "0", "r1*z + t", "z*z - r2"].iter().map(|e| Expr::parse(e, &scope).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<DVector<f64>> = (0..10).map(|_| sample(&spec, &mut rng)).collect();
    for d in conjugated_commutator_f64(&spec, "T1", "S", &s, &pts).unwrap() {
        let expected = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((d - expected).amax() < 1e-9);
    }
    let c = conjugate_by_section(&spec, &s, &pts.iter().map(|y| y.as_slice()[4..].to_vec()).collect::<Vec<_>>(), 1e-9).unwrap();
    assert!(c.generators.iter().any(|g| !g.constant_translation));
}

#[test]
fn spec_round_trips_through_json() {
    for spec in all_specs() {
        let j = serde_json::to_string(&spec.to_json()).unwrap();
        let back = GroupSpec::from_json_str(&j).unwrap();
        assert_eq!(back.generators, spec.generators);
        assert_eq!(back.relations, spec.relations);
    }
}

#[test]
fn malformed_specs_are_rejected() {
    let base = serde_json::from_str::<serde_json::Value>(fixtures::NOTSEMIDIRECT).unwrap();
    let mut v = base.clone();
    v["generators"][0]["linear"] = serde_json::json!([[2, 0], [0, 1]]);
    assert!(GroupSpec::from_json_str(&v.to_string()).is_err());
    let mut v = base.clone();
    v["generators"][1]["name"] = serde_json::json!("w1");
    assert!(GroupSpec::from_json_str(&v.to_string()).is_err());
    let mut v = base.clone();
    v["relations"][0]["word"] = serde_json::json!(["w3"]);
    assert!(GroupSpec::from_json_str(&v.to_string()).is_err());
    let mut v = base;
    v["surprise"] = serde_json::json!(1);
    assert!(GroupSpec::from_json_str(&v.to_string()).is_err());
}
