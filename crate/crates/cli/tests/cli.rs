use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelembed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn every_stage_runs_on_a_generated_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = run(&[
        "gen",
        "--m",
        "10",
        "--n",
        "20",
        "--seed",
        "3",
        "--out",
        path(&inst),
    ]);
    assert!(gen.status.success());

    let sk = run(&["skeleton", "--in", path(&inst)]);
    assert_eq!(sk.status.code(), Some(0));
    assert_eq!(json(&sk)["faces"].as_array().unwrap().len(), 10);

    let sss = run(&["sss", "--in", path(&inst)]);
    assert_eq!(sss.status.code(), Some(0));
    assert!(!json(&sss)["subfaces"].as_array().unwrap().is_empty());

    let part = run(&["partition", "--in", path(&inst)]);
    assert_eq!(part.status.code(), Some(0));
    let p = json(&part);
    assert_eq!(
        p["left_count"].as_u64().unwrap() + p["right_count"].as_u64().unwrap(),
        19
    );

    let emb = dir.path().join("emb.json");
    let svg = dir.path().join("emb.svg");
    let e = run(&[
        "embed",
        "--in",
        path(&inst),
        "--out",
        path(&emb),
        "--svg",
        path(&svg),
    ]);
    assert_eq!(e.status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));

    let v = run(&["validate", "--in", path(&inst), "--embedding", path(&emb)]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(json(&v)["valid"], true);
}

#[test]
fn validation_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    assert!(run(&[
        "gen",
        "--m",
        "8",
        "--n",
        "7",
        "--seed",
        "1",
        "--out",
        path(&inst)
    ])
    .status
    .success());
    let e = run(&["embed", "--in", path(&inst)]);
    let mut emb = json(&e);
    // Two nodes on the same point break the bijection.
    emb["node_point"][1] = emb["node_point"][0].clone();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, emb.to_string()).unwrap();
    let v = run(&["validate", "--in", path(&inst), "--embedding", path(&bad)]);
    assert_eq!(v.status.code(), Some(1));
    let report = json(&v);
    assert_eq!(report["valid"], false);
    let failed: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .collect();
    assert!(failed.iter().any(|c| c["name"] == "bijection"));
    assert!(failed
        .iter()
        .all(|c| !c["detail"].as_str().unwrap().is_empty()));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"polygon": [[0,0],[1,0]], "points": [], "tree": {"balanced": 0}}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["skeleton", "--in", path(&bad)]).status.code(),
        Some(2)
    );
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["embed", "--in", path(&bad)]).status.code(), Some(2));
    let count =
        r#"{"polygon": [[0,0],[4,0],[4,4],[0,4]], "points": [[1,1]], "tree": {"balanced": 2}}"#;
    std::fs::write(&bad, count).unwrap();
    assert_eq!(run(&["embed", "--in", path(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["render", "--layers", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = run(&["embed", "--seed", "11", "--m", "12", "--n", "40"]);
    let b = run(&["embed", "--seed", "11", "--m", "12", "--n", "40"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["render", "--seed", "11", "--m", "12", "--n", "40"]);
    let b = run(&["render", "--seed", "11", "--m", "12", "--n", "40"]);
    assert_eq!(a.stdout, b.stdout);
}
