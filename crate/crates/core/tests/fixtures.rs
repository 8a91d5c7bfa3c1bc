use hecke_core::algebra::HeckeAlgebra;
use hecke_core::character::SmoothCharacter;
use hecke_core::fixtures::{self, load_fixture, parse_fixtures, verify, Config, RunOptions, Value};
use hecke_core::functors::{induce_character, LeviDatum};
use hecke_core::module::{is_isomorphic, CharacterKind, HeckeModule};
use hecke_core::report::Status;
use hecke_core::weyl::GroupKind;
use hecke_core::HeckeError;

fn iso(a: &HeckeModule, b: &HeckeModule) -> bool {
    is_isomorphic(a, b).unwrap().is_iso()
}

#[test]
fn registry_is_sorted_and_complete() {
    let ids = fixtures::fixture_ids().unwrap();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for id in [
        "findim.duality",
        "gl2.ps",
        "gl2.steinberg",
        "gl2.supersingular",
        "gl2.trivial",
        "gl3.steinberg",
        "sl2.ps",
        "sl2.steinberg",
        "sl2.supersingular",
        "sl2.trivial",
    ] {
        assert!(ids.iter().any(|i| i == id), "{id} missing");
    }
}

#[test]
fn every_fixture_round_trips_through_its_printer() {
    for spec in fixtures::registry().unwrap() {
        let text = spec.to_string();
        let back = parse_fixtures(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", spec.id));
        assert_eq!(back, vec![spec.clone()], "{}", spec.id);
    }
}

#[test]
fn sl2_trivial_table() {
    let fx = load_fixture("sl2.trivial", Config::default()).unwrap();
    assert_eq!(fx.instances.len(), 1);
    let table = &fx.instances[0].tables["H"];
    assert_eq!(table.top, 3);
    let alg = fx.ctx.alg().unwrap();
    let triv = HeckeModule::character(alg, CharacterKind::Triv).unwrap();
    assert!(iso(table.entry(0).module().unwrap(), &triv));
    assert!(iso(table.entry(3).module().unwrap(), &triv));
    assert_eq!(table.entry(1).module().unwrap().dim(), 2);
}

#[test]
fn degree_suffix_selects_an_entry() {
    let fx = load_fixture("gl2.steinberg.h1", Config::default()).unwrap();
    let entries = fx.selected_entries();
    assert_eq!(entries.len(), 1);
    let alg = HeckeAlgebra::new(GroupKind::GL2, 5, 1).unwrap();
    let datum = LeviDatum::torus(&alg).unwrap();
    let want = induce_character(&datum, &SmoothCharacter::trivial(2))
        .unwrap()
        .direct_sum(&HeckeModule::character(&alg, CharacterKind::SignStar).unwrap())
        .unwrap();
    assert!(iso(entries[0].1.module().unwrap(), &want));
}

#[test]
fn supersingular_h1_is_a_cube() {
    let fx = load_fixture("gl2.supersingular.h1", Config::default()).unwrap();
    assert_eq!(fx.instances.len(), 5);
    for (inst, (_, entry)) in fx.instances.iter().zip(fx.selected_entries()) {
        let Some(Value::Module(m)) = inst.vars.get("m") else { panic!("no m in {}", inst.label) };
        assert!(iso(entry.module().unwrap(), &m.power(3)), "{}", inst.label);
    }
}

#[test]
fn parameter_arguments_restrict_instances() {
    let fx = load_fixture("gl2.supersingular(r=2).h1", Config::default()).unwrap();
    assert_eq!(fx.instances.len(), 1);
    assert_eq!(fx.instances[0].label, "r=2");
    assert_eq!(fx.selected_entries()[0].1.module().unwrap().dim(), 6);
}

#[test]
fn unknown_ids_are_rejected() {
    assert!(matches!(load_fixture("gl2.nothing", Config::default()), Err(HeckeError::UnknownFixture(_))));
    assert!(load_fixture("gl2.trivial.h9", Config::default()).is_err());
    assert!(load_fixture("gl2.supersingular(s=1)", Config::default()).is_err());
}

#[test]
fn every_fixture_passes_at_five() {
    let opts = RunOptions::default();
    for id in fixtures::fixture_ids().unwrap() {
        let report = verify(&id, Config::default(), &opts).unwrap();
        assert_eq!(report.status, Status::Pass, "{id}: {:?}", report.checks.iter().find(|c| c.status != Status::Pass));
        assert!(report.checks.iter().all(|c| !c.cite.is_empty()));
    }
}

#[test]
fn split_assumption_fails_the_gl3_fixture() {
    let opts = RunOptions { assume_split: true, ..RunOptions::default() };
    let report = verify("gl3.steinberg", Config::default(), &opts).unwrap();
    assert_eq!(report.status, Status::Fail);
    let failed = report.checks.iter().find(|c| c.status == Status::Fail).unwrap();
    assert!(failed.detail.contains("assume split"), "{}", failed.detail);
}

#[test]
fn reports_are_reproducible() {
    let opts = RunOptions::default();
    let strip = |mut r: fixtures::VerificationReport| {
        r.elapsed_ms = None;
        serde_json::to_string(&r).unwrap()
    };
    let a = strip(verify("sl2.ps", Config::default(), &opts).unwrap());
    let b = strip(verify("sl2.ps", Config::default(), &opts).unwrap());
    assert_eq!(a, b);
}

#[test]
fn parser_rejects_malformed_fixtures() {
    for text in [
        "[fixture x.c] cite \"c\" group SL3\n",
        "[fixture x.d] cite \"c\" group SL2\nbuild\n  table H top 2\n    0 = triv\nend\n",
        "[fixture x.e] cite \"c\" group SL2\nexpect\n  poincare\nend\n",
    ] {
        assert!(parse_fixtures(text).is_err(), "{text}");
    }
}
