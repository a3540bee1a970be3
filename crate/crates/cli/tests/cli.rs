use std::path::Path;
use std::process::{Command, Output};

const FANO: [&str; 7] =
    ["H-E1-E2-E3", "H-E1-E4-E5", "H-E1-E6-E7", "H-E2-E4-E6", "H-E3-E5-E6", "H-E2-E5-E7", "H-E3-E4-E7"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympconfig")).args(args).output().expect("spawn sympconfig")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn seven_spheres(star: bool, vectors: bool) -> serde_json::Value {
    let comps: Vec<_> = (0..7).map(|_| serde_json::json!({"nu": -2, "genus": 0})).collect();
    let mut v = serde_json::json!({"N": 7, "components": comps});
    if star {
        v["star"] = serde_json::json!({"asserted": true});
    }
    if vectors {
        v["vectors"] = serde_json::json!(FANO);
    }
    v
}

fn write_json(dir: &Path, name: &str, v: &serde_json::Value) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

#[test]
fn scenario_check_passes() {
    let out = run(&["scenario", "fanoExtended8", "--check"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.is_empty());
    assert!(text.lines().all(|l| l.starts_with("ok")), "{text}");
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let out = run(&["scenario", "noSuchThing"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fano_is_eliminated_by_a_large_first_area() {
    let out = run(&["eliminate", "--scenario", "fano7", "--delta", "10,1,1,1,1,1,1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["result"], "Eliminated");
}

#[test]
fn enumeration_contains_the_fano_orbit() {
    let out = run(&["enumerate", "--scenario", "sevenNeg2Config", "--workers", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let records: Vec<serde_json::Value> =
        stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 2);
    // The Fano orbit is the one whose vectors are all lines H - E_i - E_j - E_k.
    let fano = records.iter().filter(|r| {
        r["vectors"].as_array().unwrap().iter().all(|s| {
            let s = s.as_str().unwrap();
            s.starts_with("H-") && s.matches("-E").count() == 3
        })
    });
    assert_eq!(fano.count(), 1);
}

#[test]
fn cremona_on_extended_fano() {
    let out = run(&["cremona", "--scenario", "fanoExtended8", "--gamma", "6,7,8"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reflected = v["report"]["reflected"].as_array().unwrap();
    assert_eq!(reflected.len(), 7);
    assert!(reflected.iter().any(|s| s == "2H-E1-E2-E3-E6-E7-E8"));
}

#[test]
fn bad_invocations_exit_one() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["enumerate"])), 1);
    assert_eq!(code(&run(&["eliminate", "--scenario", "fano7", "--delta", "1,1"])), 1);
    assert_eq!(code(&run(&["--workers", "0", "scenario", "fano7"])), 1);
    assert_eq!(code(&run(&["cremona", "--scenario", "fano7", "--gamma", "1,2,99"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "bad.json", &serde_json::json!({"N": 7}));
    assert_eq!(code(&run(&["enumerate", "--config", path(&p)])), 2);
    let missing = dir.path().join("absent.json");
    assert_eq!(code(&run(&["enumerate", "--config", path(&missing)])), 2);
    let p = write_json(dir.path(), "novec.json", &seven_spheres(false, false));
    assert_eq!(code(&run(&["type", "--config", path(&p)])), 2);
}

#[test]
fn empty_star_cone_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "star.json", &seven_spheres(true, true));
    let out = run(&["eliminate", "--config", path(&p), "--search", "--cone", "star"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("--cone delta"));
}

#[test]
fn delta_outside_the_cone_exits_three() {
    let out = run(&["eliminate", "--scenario", "fano7", "--delta", "0,1,1,1,1,1,1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn file_config_matches_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "fano.json", &seven_spheres(false, true));
    let out = run(&["eliminate", "--config", path(&p), "--delta", "10,1,1,1,1,1,1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["result"], "Eliminated");
}

#[test]
fn checkpoint_mismatch_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let first = run(&["enumerate", "--scenario", "sevenNeg2Config", "--out", path(&out_dir)]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert!(out_dir.join("checkpoint.json").exists());
    let again = run(&[
        "enumerate",
        "--scenario",
        "sevenNeg2Config",
        "--out",
        path(&out_dir),
        "--resume",
        "--caps-override",
        "2,2,2,2,2,2,2",
    ]);
    assert_eq!(code(&again), 4, "{}", stderr(&again));
}

#[test]
fn resume_reproduces_the_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let args = ["enumerate", "--scenario", "sevenNeg2Config", "--out", path(&out_dir)];
    assert_eq!(code(&run(&args)), 0);
    let before = std::fs::read(out_dir.join("assignments.jsonl")).unwrap();
    let mut resumed = args.to_vec();
    resumed.push("--resume");
    assert_eq!(code(&run(&resumed)), 0);
    assert_eq!(std::fs::read(out_dir.join("assignments.jsonl")).unwrap(), before);
}

#[test]
fn pipeline_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, workers) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = run(&[
            "pipeline",
            "--scenario",
            "sevenNeg2Config",
            "--delta",
            "1,1,1,1,1,1,1",
            "--workers",
            workers,
            "--out",
            path(&out_dir),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let report = std::fs::read_to_string(out_dir.join("pipeline.json")).unwrap();
        let jsonl = std::fs::read_to_string(out_dir.join("assignments.jsonl")).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
        outputs.push((report, jsonl, manifest["hash"].clone()));
    }
    // The worker count is not part of the determining flags.
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_str(&outputs[0].0).unwrap();
    assert!(v["report"].is_object());
}
