mod common;

use std::process::Command;

use arithdist::action::GroupFunction;
use arithdist::cli::{eval_dist, eval_function, eval_op, run};
use arithdist::diffops::{Chart, DiffOp};
use arithdist::group::ChevalleyDatum;
use arithdist::{GroupKind, LevelContext};
use common::{context, element, rat};
use proptest::prelude::*;

fn printable_groups() -> impl Strategy<Value = GroupKind> {
    prop_oneof![
        Just(GroupKind::Additive(1)),
        Just(GroupKind::Multiplicative(1)),
        Just(GroupKind::Additive(2)),
        Just(GroupKind::sl2()),
        Just(GroupKind::reductive(ChevalleyDatum::gl2())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_elements_parse_back((g, u) in (context(), printable_groups()).prop_flat_map(|(ctx, g)| (Just(g.clone()), element(g, ctx, 5)))) {
        let text = u.to_string();
        let back = eval_dist(&text, &g, *u.ctx()).unwrap();
        prop_assert_eq!(back, u, "{}", text);
    }

    #[test]
    fn printed_operators_parse_back(
        ctx in context(),
        chart in prop::sample::select(vec![Chart::AffineLine, Chart::Torus, Chart::P1(0), Chart::P1(1)]),
        terms in prop::collection::vec((-3i64..=4, 0u32..=4, -6i64..=6), 1..5),
    ) {
        let terms = terms.into_iter().map(|(j, k, c)| (if chart.allows_poles() { j } else { j.abs() }, k, rat(c)));
        let op = DiffOp::from_terms(ctx, chart, terms).unwrap();
        let text = op.to_string();
        prop_assert_eq!(eval_op(&text, ctx, chart).unwrap(), op, "{}", text);
    }

    #[test]
    fn printed_functions_parse_back(terms in prop::collection::vec((-3i64..=5, -5i64..=5), 1..5)) {
        let g = GroupKind::Multiplicative(1);
        let f = GroupFunction::new(g.clone(), terms.into_iter().map(|(e, c)| (vec![e], rat(c)))).unwrap();
        let text = f.to_string();
        prop_assert_eq!(eval_function(&text, &g).unwrap(), f, "{}", text);
    }
}

fn cli(args: &[&str]) -> arithdist::cli::Outcome {
    run(std::iter::once("arithdist").chain(args.iter().copied()))
}

#[test]
fn output_is_deterministic_across_threads() {
    let args = ["normalize", "--group", "sl2", "--p", "3", "--m", "1", "--json", "(e<2> + h)*(f<3> - 2*e)*h<2>"];
    let reference = cli(&args).stdout;
    assert!(!reference.is_empty());
    let handles: Vec<_> = (0..4).map(|_| std::thread::spawn(move || cli(&args).stdout)).collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), reference);
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_arithdist");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["mul", "--group", "Ga", "--p", "2", "--m", "1", "xi<2>", "xi<2>"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), "3*xi<4>\n");
    // a non-integral image with integrality asserted is a mathematical failure
    let bad = status(&["normalize", "--group", "Ga", "--p", "2", "--m", "0", "--assert-integral", "xi/2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(status(&["mul", "--group", "Ga", "xi<"]).status.code(), Some(2));
    assert_eq!(status(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn dagger_check_reads_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.json");
    let series = r#"{"p":2,"m":"inf","rank":1,"horizon":3,"terms":[{"k":[0],"coeff":"1"},{"k":[1],"coeff":"2"},{"k":[2],"coeff":"4"},{"k":[3],"coeff":"8"}]}"#;
    std::fs::write(&path, series).unwrap();
    let path = path.to_str().unwrap();
    let o = cli(&["dagger-check", "--input", path, "--eta", "1", "--c", "0", "--horizon", "3"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("certified"), "{}", o.stdout);
    let o = cli(&["dagger-check", &format!("@{path}"), "--eta", "3/2", "--c", "0"]);
    assert_eq!(o.code, 1);
    let o = cli(&["dagger-check", "--json", "--input", path]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["verdict"]["verdict"], "indeterminate", "{v}");
}

#[test]
fn operator_round_trip_through_json() {
    let ctx = LevelContext::finite(2, 1).unwrap();
    let o = cli(&["qmap", "--group", "sl2", "--p", "2", "--m", "1", "--json", "f<2>"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let op = DiffOp::from_json(v.get("operator").unwrap_or(&v)).unwrap();
    assert_eq!(op, eval_op("t^3*d + t^4*d<2>", ctx, Chart::P1(0)).unwrap());
}
