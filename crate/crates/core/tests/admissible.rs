use lcp_core::admissibility::check_admissible;
use lcp_core::fixtures;
use lcp_core::group::GroupSpec;
use serde_json::json;

fn spec_with(src: &str, edit: impl FnOnce(&mut serde_json::Value)) -> GroupSpec {
    let mut v: serde_json::Value = serde_json::from_str(src).unwrap();
    edit(&mut v);
    GroupSpec::from_json_str(&v.to_string()).unwrap()
}

#[test]
fn shipped_examples_are_admissible() {
    for src in [fixtures::COUNTEREXAMPLE32, fixtures::WITHORBIFOLD, fixtures::NOTSEMIDIRECT, fixtures::BIGEXAMPLE53] {
        let spec = GroupSpec::from_json_str(src).unwrap();
        let r = check_admissible(&spec);
        assert!(r.admissible, "{}: {:#?}", spec.name, r.failures());
    }
}

#[test]
fn orbifold_with_integral_translation_fails_only_the_fibre_check() {
    let spec = spec_with(fixtures::WITHORBIFOLD, |v| {
        v["generators"][0]["translation"]["const"] = json!([0, 1]);
        v["relations"][0]["equals"]["translation"] = json!([0, 2]);
        v["relations"][1]["equals"]["translation"] = json!([-2, -2]);
    });
    let r = check_admissible(&spec);
    assert!(!r.admissible);
    let failed: Vec<&str> = r.failures().iter().map(|c| c.hypothesis.as_str()).collect();
    assert_eq!(failed, ["no fixed points on fibres over fixed points"]);
}

#[test]
fn isometric_groups_are_rejected() {
    let spec = spec_with(fixtures::WITHORBIFOLD, |v| {
        v["generators"][1]["linear"] = json!([[1, 0], [0, 1]]);
        v["relations"] = json!([]);
    });
    let r = check_admissible(&spec);
    assert!(!r.check("not all isometries").unwrap().verdict);
    assert!(!r.admissible);
}

#[test]
fn base_dependence_along_the_flat_part_is_rejected() {
    let spec = spec_with(fixtures::BIGEXAMPLE53, |v| {
        v["generators"][1]["translation"]["linear"] = json!({ "z": [1, 0, 0, 0] });
        v["relations"] = json!([]);
    });
    let r = check_admissible(&spec);
    assert!(!r.check("translation constant along E^q").unwrap().verdict);
}

#[test]
fn report_serializes_one_entry_per_hypothesis() {
    let spec = GroupSpec::from_json_str(fixtures::NOTSEMIDIRECT).unwrap();
    let v = serde_json::to_value(check_admissible(&spec)).unwrap();
    for c in v["checks"].as_array().unwrap() {
        assert!(c["hypothesis"].is_string() && c["verdict"].is_boolean() && c.get("witness").is_some());
    }
    let proper = v["checks"].as_array().unwrap().iter().find(|c| c["hypothesis"] == "proper cocompact base action").unwrap();
    assert_eq!(proper["mandatory"], false);
    assert_eq!(proper["witness"]["proven"], false);
}
