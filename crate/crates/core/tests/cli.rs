mod common;

use std::path::Path;
use std::process::{Command, Output};

use biteplan::plate::save_fixture;
use biteplan::{FoodCategory, FoodItem, FoodMask, Pixel, PlateObservation, PlateState};

fn biteplan(args: &[&str], extra: &[&Path]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biteplan"));
    cmd.args(args);
    for p in extra {
        cmd.arg(p);
    }
    cmd.output().unwrap()
}

fn run(args: &[&str]) -> Output {
    biteplan(args, &[])
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn three_skewerables(dir: &Path) -> std::path::PathBuf {
    let items = [(1, "carrot", 40), (2, "celery", 100), (3, "broccoli", 160)]
        .into_iter()
        .map(|(id, label, x)| FoodItem {
            instance_id: id,
            label: label.into(),
            category: FoodCategory::Vegetable,
            mask: FoodMask::from_fn(200, 200, |p| p.dist2(Pixel::new(x, 100)) <= 100),
        })
        .collect();
    let state = PlateState::new(PlateObservation {
        width: 200,
        height: 200,
        px_per_mm: 2.0,
        items,
        frame_id: 0,
    })
    .unwrap();
    let out = dir.join("three.txt");
    save_fixture(&state, &out).unwrap();
    out
}

#[test]
fn plan_prints_machine_lines() {
    let f = common::fettuccine_path();
    let out = run(&["plan", "--fixture", path(&f)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let plans: Vec<&str> = text.lines().filter(|l| l.starts_with("plan ")).collect();
    assert!(
        plans
            .iter()
            .any(|l| l.starts_with("plan fettuccine eff=3 seq=push,group,twirl")),
        "{text}"
    );
    assert!(
        plans.iter().any(|l| l.starts_with("plan broccoli eff=1 seq=skewer")),
        "{text}"
    );
    assert_eq!(
        text,
        String::from_utf8(run(&["plan", "--fixture", path(&f)]).stdout).unwrap()
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["plan", "--fixture", "/nonexistent.txt"]).status.code(), Some(2));
    assert_eq!(run(&["plan", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let f = common::fettuccine_path();
    assert_eq!(
        run(&["plan", "--fixture", path(&f), "--set", "sigma=-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "simulate",
            "--fixture",
            path(&f),
            "--planner",
            "nope",
            "--out",
            "/tmp/x"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn efficiency_only_on_three_skewerables_gives_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = three_skewerables(dir.path());
    let out_dir = dir.path().join("out");
    let out = run(&[
        "simulate",
        "--planner",
        "eff",
        "--fixture",
        path(&fixture),
        "--out",
        path(&out_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("curve.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3, "{csv}");
    assert!(rows[2].starts_with("3,3,"));
}

#[test]
fn strict_cassette_miss_exits_one_with_hash() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.cassette");
    std::fs::write(&empty, "cassette v1\n").unwrap();
    let f = common::fettuccine_path();
    let out = run(&[
        "simulate",
        "--planner",
        "flair",
        "--strict-replay",
        "--fixture",
        path(&f),
        "--cassette",
        path(&empty),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    let has_hash = err.split(|c: char| !c.is_ascii_hexdigit()).any(|w| w.len() == 64);
    assert!(has_hash, "{err}");
}

#[test]
fn simulate_is_byte_deterministic() {
    common::check_determinism().unwrap();
}

#[test]
fn compare_writes_three_planner_columns() {
    let dir = tempfile::tempdir().unwrap();
    let plates = common::fixtures().join("plates");
    let mut args = vec!["compare", "--strict-replay", "--jobs", "3", "--fixture", path(&plates)];
    let cassettes: Vec<String> = std::fs::read_dir(common::fixtures().join("cassettes"))
        .unwrap()
        .map(|e| e.unwrap().path().to_string_lossy().into_owned())
        .collect();
    for c in &cassettes {
        args.extend(["--cassette", c]);
    }
    args.extend(["--out", path(dir.path())]);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ordering aggregate eff>=flair>=pref holds"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("fixture,action_index,eff,flair,pref"));
    let fixtures: std::collections::BTreeSet<&str> =
        csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(fixtures.len(), 6);
}

#[test]
fn geometry_writes_pngs() {
    let dir = tempfile::tempdir().unwrap();
    let f = common::fettuccine_path();
    let out = run(&["geometry", "--fixture", path(&f), "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let png = std::fs::read(dir.path().join("fettuccine_chicken_broccoli_plan.png")).unwrap();
    assert_eq!(&png[..4], b"\x89PNG");
    let n = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(n >= 2);
}
