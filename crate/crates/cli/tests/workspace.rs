use relsite_cli::report::{run_check, CheckError, Mode, Report};
use relsite_cli::workspace::{decl, load_workspace, parse_workspace, serialize, LoadError, WorkspaceFile};
use relsite_core::relative::fixtures;
use serde_json::json;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fixtures.json");

fn edited(f: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(FIXTURES).unwrap()).unwrap();
    f(&mut v);
    v.to_string()
}

#[test]
fn fixtures_load_with_all_checks() {
    let ws = load_workspace(FIXTURES).unwrap();
    assert_eq!(ws.problems.len(), 3);
    for mode in Mode::ALL {
        let r = run_check(&ws, "identity", mode).unwrap();
        assert!(r.passed, "{mode}");
        assert!(!r.discrepancy);
    }
}

#[test]
fn loaded_fixtures_match_built_ones() {
    let ws = load_workspace(FIXTURES).unwrap();
    let built = fixtures::identity_problem();
    let loaded = &ws.problems["identity"];
    assert_eq!(loaded.base().topology(), built.base().topology());
    assert_eq!(loaded.a(), built.a());
    let neg = fixtures::neg();
    assert_eq!(ws.problems["neg"].phi(), neg.phi());
}

#[test]
fn unknown_arrow_in_composition_is_unresolved() {
    let text = edited(|v| v["categories"][0]["compose"] = json!([["f", "id:a", "g"]]));
    match parse_workspace(&text) {
        Err(LoadError::UnresolvedReference { name, location }) => {
            assert_eq!(name, "g");
            assert!(location.contains("compose"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_maximal_sieve_names_the_axiom() {
    let text = edited(|v| v["topologies"][0]["covers"]["b"] = json!([["f"]]));
    match parse_workspace(&text) {
        Err(LoadError::ValidationError { location, message }) => {
            assert!(location.contains("J1"));
            assert!(message.contains("maximality"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_json_is_a_parse_error() {
    assert!(matches!(parse_workspace("{\"categories\": ["), Err(LoadError::ParseError { .. })));
    assert!(matches!(parse_workspace("{\"cats\": []}"), Err(LoadError::ParseError { .. })));
}

#[test]
fn invalid_phi_is_a_validation_error() {
    // `f` is not an endomorphism of `b`
    let text = edited(|v| v["nat_transforms"][1]["components"]["*"] = json!("f"));
    assert!(matches!(parse_workspace(&text), Err(LoadError::ValidationError { .. })));
    // a natural transformation that exists but points the wrong way for `neg`
    let text = edited(|v| {
        v["functors"].as_array_mut().unwrap().push(json!({
            "name": "at_a", "source": "1", "target": "C2", "on_objects": { "*": "a" }
        }));
        v["nat_transforms"].as_array_mut().unwrap().push(json!({
            "name": "f_nat", "source": "at_a", "target": "at_b", "components": { "*": "f" }
        }));
        v["problems"][1]["phi"] = json!("f_nat");
    });
    match parse_workspace(&text) {
        Err(LoadError::ValidationError { location, .. }) => assert!(location.contains("neg")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_problem_and_mode() {
    let ws = load_workspace(FIXTURES).unwrap();
    assert_eq!(
        run_check(&ws, "nope", Mode::All).unwrap_err(),
        CheckError::UnknownProblem("nope".into())
    );
    assert!(matches!("sideways".parse::<Mode>(), Err(CheckError::UnknownMode(_))));
}

#[test]
fn neg_fails_every_criterion_at_a() {
    let ws = load_workspace(FIXTURES).unwrap();
    let r = run_check(&ws, "neg", Mode::All).unwrap();
    assert!(!r.passed && !r.discrepancy);
    let failing: Vec<&str> = r.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
    assert_eq!(failing, ["cofinality", "filtered.a", "fiberwise", "diagonal", "oracle"]);
    let a = r.checks.iter().find(|c| c.name == "filtered.a").unwrap();
    assert_eq!(a.witness, Some(json!({"A": {"base": "a", "chi": "id:a", "object": "a"}})));
}

#[test]
fn round_trip_is_identity() {
    let ws = load_workspace(FIXTURES).unwrap();
    let text = serialize(&ws);
    let again = parse_workspace(&text).unwrap();
    assert_eq!(ws, again);
    assert_eq!(text, serialize(&again));
}

#[test]
fn reports_round_trip_and_repeat() {
    let ws = load_workspace(FIXTURES).unwrap();
    for p in ["identity", "neg", "pos"] {
        let r = run_check(&ws, p, Mode::All).unwrap();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(r, back);
        assert_eq!(r, run_check(&ws, p, Mode::All).unwrap());
        assert!(r.timings.is_none());
    }
}

#[test]
fn written_problems_reload() {
    for (name, prob) in [("neg", fixtures::neg()), ("pos", fixtures::pos()), ("id", fixtures::identity_problem())] {
        let file: WorkspaceFile = decl::problem(name, &prob).unwrap();
        let ws = parse_workspace(&serde_json::to_string(&file).unwrap()).unwrap();
        let a = run_check(&ws, name, Mode::All).unwrap();
        let b = relsite_cli::report::check_problem(name, &prob, Mode::All, false);
        assert_eq!(a, b);
    }
}

#[test]
fn indexed_categories_expand_with_projection_and_giraud() {
    let text = edited(|v| {
        v["categories"].as_array_mut().unwrap().push(json!({
            "name": "Two", "objects": ["x", "y"]
        }));
        v["functors"].as_array_mut().unwrap().push(json!({
            "name": "swap", "source": "Two", "target": "Two", "on_objects": { "x": "y", "y": "x" }
        }));
        v["indexed"] = json!([{
            "name": "G", "base": "C2", "fibers": { "a": "Two", "b": "Two" }, "transitions": { "f": "swap" }
        }]);
        v["topologies"].as_array_mut().unwrap().push(json!({
            "name": "JG", "category": "G", "giraud": { "indexed": "G", "base": "J1" }
        }));
    });
    let ws = parse_workspace(&text).unwrap();
    let g = &ws.categories["G"];
    assert_eq!(g.object_count(), 4);
    assert_eq!(g.arrow_count(), 4 + 2);
    let p = &ws.functors["G.projection"];
    assert_eq!(p.target().object_count(), 2);
    assert!(ws.topologies["JG"].validate().is_ok());
    assert!(relsite_core::check_comorphism(p, &ws.topologies["JG"], &ws.topologies["J1"]).holds());
}
