use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        ws.ok(&["fixtures", "--out", "fx"]);
        ws
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_env(args, &[])
    }

    fn run_env(&self, args: &[&str], env: &[(&str, &str)]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dilatio"));
        cmd.args(args)
            .current_dir(self.dir.path())
            .env_remove("DILATIO_MAX_DIM");
        for (k, v) in env {
            cmd.env(k, v);
        }
        cmd.output().unwrap()
    }

    fn ok(&self, args: &[&str]) -> Output {
        let out = self.run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        out
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }

    fn write(&self, rel: &str, contents: &str) {
        std::fs::write(self.path(rel), contents).unwrap();
    }
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn fixtures_match_their_manifest() {
    let ws = Workspace::new();
    let manifest = read_json(&ws.path("fx/manifest.json"));
    for entry in manifest.as_array().unwrap() {
        let file = format!("fx/{}", entry["file"].as_str().unwrap());
        assert!(ws.path(&file).exists(), "{file}");
        match entry["expect"].as_str() {
            Some("accepted") => assert_eq!(ws.code(&["check", &file]), 0, "{file}"),
            Some("rejected") => assert_eq!(ws.code(&["check", &file]), 2, "{file}"),
            _ => assert_eq!(entry["kind"], "state"),
        }
    }
}

#[test]
fn check_report_lists_certification() {
    let ws = Workspace::new();
    let report = json(&ws.ok(&["check", "fx/damping_0.3.json"]));
    assert_eq!(report["command"], "check");
    assert_eq!(report["pass"], true);
    assert_eq!(report["cp"], true);
    assert_eq!(report["tp_or_unital"], true);
    assert_eq!(report["inputs"].as_str().unwrap().len(), 64);

    let out = ws.run(&["check", "fx/transpose_2.json", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    let report = read_json(&ws.path("r.json"));
    assert_eq!(report["cp"], false);
    assert_eq!(report["tp_or_unital"], true);
    let negativity = report["residuals"][0]["value"].as_f64().unwrap();
    assert!((negativity - 1.0).abs() < 1e-9, "{negativity}");
}

#[test]
fn malformed_inputs_exit_one_and_name_the_problem() {
    let ws = Workspace::new();
    ws.write(
        "bad.json",
        r#"{"dim_in":2,"dim_out":2,"picture":"schroedinger","kraus":[[[1,0]]]}"#,
    );
    let out = ws.run(&["check", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kraus[0]"), "{}", stderr(&out));

    ws.write(
        "extra.json",
        r#"{"dim_in":2,"dim_out":2,"picture":"schroedinger","kraus":[],"rank":1}"#,
    );
    assert!(stderr(&ws.run(&["check", "extra.json"])).contains("rank"));

    assert_eq!(ws.code(&["check", "missing.json"]), 1);
    assert_eq!(ws.code(&["frobnicate"]), 1);
    assert_eq!(ws.code(&["--help"]), 0);
}

#[test]
fn rejected_channels_cannot_be_dilated() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "dilate",
        "fx/transpose_2.json",
        "--mode",
        "semigroup",
        "--steps",
        "2",
        "--out",
        "b.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("rejected"));
    assert!(!ws.path("b.json").exists());
}

#[test]
fn semigroup_pipeline_and_horizon() {
    let ws = Workspace::new();
    let summary = json(&ws.ok(&[
        "dilate",
        "fx/damping_0.3.json",
        "--mode",
        "semigroup",
        "--steps",
        "4",
        "--out",
        "b.json",
    ]));
    assert_eq!(summary["shape"], serde_json::json!([2, 4, 5]));
    assert_eq!(summary["horizon"], 4);

    let report = json(&ws.ok(&["verify", "b.json", "fx/damping_0.3.json"]));
    assert_eq!(report["pass"], true);
    assert_eq!(report["residuals"].as_array().unwrap().len(), 5);

    // A bundle checked against a different channel fails verification.
    assert_eq!(ws.code(&["verify", "b.json", "fx/damping_0.5.json"]), 2);
    // Dimension mismatch is an input error.
    assert_eq!(ws.code(&["verify", "b.json", "fx/identity_3.json"]), 1);

    let state = json(&ws.ok(&["evolve", "b.json", "fx/state_excited.json", "--steps", "4"]));
    let population = state["matrix"][3][0].as_f64().unwrap();
    assert!((population - 0.7f64.powi(4)).abs() < 1e-9);

    let out = ws.run(&["evolve", "b.json", "fx/state_excited.json", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--steps"));
    assert_eq!(
        ws.code(&["evolve", "b.json", "fx/state_excited.json", "--steps", "-2"]),
        1
    );
    assert_eq!(
        ws.code(&[
            "evolve",
            "b.json",
            "fx/state_qutrit_ground.json",
            "--steps",
            "1"
        ]),
        1
    );
}

#[test]
fn bundles_are_byte_identical_across_runs() {
    let ws = Workspace::new();
    for name in ["a.json", "b.json"] {
        ws.ok(&[
            "dilate",
            "fx/hadamard.json",
            "--mode",
            "semigroup",
            "--steps",
            "3",
            "--out",
            name,
        ]);
    }
    assert_eq!(
        std::fs::read(ws.path("a.json")).unwrap(),
        std::fs::read(ws.path("b.json")).unwrap()
    );
}

#[test]
fn tampered_bundles_are_refused() {
    let ws = Workspace::new();
    ws.ok(&[
        "dilate",
        "fx/pauli_x.json",
        "--mode",
        "semigroup",
        "--steps",
        "2",
        "--out",
        "b.json",
    ]);
    let original = read_json(&ws.path("b.json"));

    let mut v = original.clone();
    v["horizon"] = Value::from(3);
    ws.write("h.json", &v.to_string());
    assert_eq!(ws.code(&["verify", "h.json", "fx/pauli_x.json"]), 1);

    let mut v = original.clone();
    v["v"]["data"] = Value::from("not base64!");
    ws.write("d.json", &v.to_string());
    assert_eq!(ws.code(&["verify", "d.json", "fx/pauli_x.json"]), 1);

    let mut v = original;
    v["format"] = Value::from("something-else/9");
    ws.write("f.json", &v.to_string());
    assert_eq!(
        ws.code(&["evolve", "f.json", "fx/state_plus.json", "--steps", "1"]),
        1
    );
}

#[test]
fn size_guard_exits_four_and_can_be_raised() {
    let ws = Workspace::new();
    let args = [
        "dilate",
        "fx/damping_0.1.json",
        "--mode",
        "semigroup",
        "--steps",
        "8",
        "--out",
        "b.json",
    ];
    let out = ws.run_env(&args, &[("DILATIO_MAX_DIM", "32")]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("--max-dim"));
    let mut raised = args.to_vec();
    raised.extend(["--max-dim", "100"]);
    assert_eq!(
        ws.run_env(&raised, &[("DILATIO_MAX_DIM", "32")])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        ws.code(&[
            "dilate",
            "fx/damping_0.1.json",
            "--mode",
            "semigroup",
            "--steps",
            "1000",
            "--out",
            "b.json"
        ]),
        4
    );
}

#[test]
fn cyclic_mode() {
    let ws = Workspace::new();
    let summary = json(&ws.ok(&[
        "dilate",
        "fx/rotation_period_4.json",
        "--mode",
        "cyclic",
        "--out",
        "c.json",
    ]));
    assert_eq!(summary["period"], 4);
    assert_eq!(summary["shape"], serde_json::json!([2, 4, 4]));
    let report = json(&ws.ok(&[
        "verify",
        "c.json",
        "fx/rotation_period_4.json",
        "--steps",
        "20",
    ]));
    assert_eq!(report["residuals"].as_array().unwrap().len(), 21);

    // Cyclic bundles have no horizon.
    let big = json(&ws.ok(&["evolve", "c.json", "fx/state_plus.json", "--steps", "1000"]));
    let small = json(&ws.ok(&["evolve", "c.json", "fx/state_plus.json", "--steps", "1"]));
    let diff: f64 = (0..4)
        .map(|i| {
            (big["matrix"][i][0].as_f64().unwrap() - small["matrix"][i][0].as_f64().unwrap()).abs()
        })
        .sum();
    // 1000 = 1 + 333·3, so T^1000 = T.
    assert!(diff < 1e-9, "{diff}");

    assert_eq!(
        ws.code(&[
            "dilate",
            "fx/damping_0.5.json",
            "--mode",
            "cyclic",
            "--out",
            "x.json"
        ]),
        3
    );
    assert_eq!(
        ws.code(&[
            "dilate",
            "fx/rotation_period_4.json",
            "--mode",
            "cyclic",
            "--period",
            "3",
            "--out",
            "x.json"
        ]),
        3
    );
}

#[test]
fn control_mode_and_reachable_sets() {
    let ws = Workspace::new();
    ws.ok(&[
        "dilate",
        "fx/pair_rotation_t.json",
        "--mode",
        "control",
        "--second",
        "fx/pair_rotation_s.json",
        "--steps",
        "3",
        "--out",
        "k.json",
    ]);
    assert_eq!(
        ws.code(&[
            "verify",
            "k.json",
            "fx/pair_rotation_t.json",
            "fx/pair_rotation_s.json"
        ]),
        0
    );
    assert_eq!(ws.code(&["verify", "k.json", "fx/pair_rotation_t.json"]), 1);
    assert_eq!(
        ws.code(&[
            "verify",
            "k.json",
            "fx/pair_rotation_s.json",
            "fx/pair_rotation_t.json"
        ]),
        2
    );

    // Words with the same number of Ts reach the same state.
    let a = json(&ws.ok(&[
        "evolve",
        "k.json",
        "fx/state_ground.json",
        "--sequence",
        "TSS",
    ]));
    let b = json(&ws.ok(&[
        "evolve",
        "k.json",
        "fx/state_ground.json",
        "--sequence",
        "SST",
    ]));
    for i in 0..4 {
        for c in 0..2 {
            let (x, y) = (
                a["matrix"][i][c].as_f64().unwrap(),
                b["matrix"][i][c].as_f64().unwrap(),
            );
            assert!((x - y).abs() < 1e-9);
        }
    }
    assert_eq!(
        ws.code(&[
            "evolve",
            "k.json",
            "fx/state_ground.json",
            "--sequence",
            "TXS"
        ]),
        1
    );
    assert_eq!(
        ws.code(&[
            "evolve",
            "k.json",
            "fx/state_ground.json",
            "--sequence",
            "TTTT"
        ]),
        3
    );

    let set = json(&ws.ok(&[
        "reachable",
        "fx/pair_rotation_t.json",
        "fx/pair_rotation_s.json",
        "fx/state_ground.json",
        "--steps",
        "3",
    ]));
    let ks: Vec<u64> = set
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|e| {
            e["ks"]
                .as_array()
                .unwrap()
                .iter()
                .map(|k| k.as_u64().unwrap())
        })
        .collect();
    let mut sorted = ks.clone();
    sorted.sort();
    assert_eq!(sorted, vec![0, 1, 2, 3]);

    let non_commuting = [
        "dilate",
        "fx/pauli_x.json",
        "--mode",
        "control",
        "--second",
        "fx/hadamard.json",
        "--steps",
        "2",
        "--out",
        "n.json",
    ];
    assert_eq!(ws.code(&non_commuting), 3);
    assert_eq!(
        ws.code(&[
            "reachable",
            "fx/pauli_x.json",
            "fx/hadamard.json",
            "fx/state_ground.json",
            "--steps",
            "2"
        ]),
        3
    );
}

#[test]
fn truncated_json_and_zero_tolerance() {
    let ws = Workspace::new();
    let text = std::fs::read_to_string(ws.path("fx/damping_0.3.json")).unwrap();
    ws.write("cut.json", &text[..text.len() / 2]);
    assert_eq!(ws.code(&["check", "cut.json"]), 1);

    ws.ok(&[
        "dilate",
        "fx/damping_0.3.json",
        "--mode",
        "semigroup",
        "--steps",
        "3",
        "--out",
        "b.json",
    ]);
    let out = ws.run(&["verify", "b.json", "fx/damping_0.3.json", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn zero_steps_echo_the_input_state() {
    let ws = Workspace::new();
    ws.ok(&[
        "dilate",
        "fx/damping_0.5.json",
        "--mode",
        "semigroup",
        "--steps",
        "2",
        "--out",
        "b.json",
    ]);
    let out = json(&ws.ok(&["evolve", "b.json", "fx/state_plus.json", "--steps", "0"]));
    let input = read_json(&ws.path("fx/state_plus.json"));
    for i in 0..4 {
        for c in 0..2 {
            let (x, y) = (
                out["matrix"][i][c].as_f64().unwrap(),
                input["matrix"][i][c].as_f64().unwrap(),
            );
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn reachable_edge_cases() {
    let ws = Workspace::new();
    let same = json(&ws.ok(&[
        "reachable",
        "fx/damping_0.3.json",
        "fx/damping_0.3.json",
        "fx/state_excited.json",
        "--steps",
        "3",
    ]));
    assert_eq!(same.as_array().unwrap().len(), 1);
    assert_eq!(same[0]["ks"], serde_json::json!([0, 1, 2, 3]));

    let zero = json(&ws.ok(&[
        "reachable",
        "fx/pair_phase_t.json",
        "fx/pair_phase_s.json",
        "fx/state_plus.json",
        "--steps",
        "0",
    ]));
    assert_eq!(zero.as_array().unwrap().len(), 1);
    assert_eq!(
        zero[0]["matrix"],
        read_json(&ws.path("fx/state_plus.json"))["matrix"]
    );
}

#[test]
fn control_words_with_equal_counts_agree() {
    let ws = Workspace::new();
    ws.ok(&[
        "dilate",
        "fx/pair_phase_t.json",
        "--mode",
        "control",
        "--second",
        "fx/pair_phase_s.json",
        "--steps",
        "3",
        "--out",
        "k.json",
    ]);
    let a = json(&ws.ok(&[
        "evolve",
        "k.json",
        "fx/state_plus.json",
        "--sequence",
        "TST",
    ]));
    let b = json(&ws.ok(&[
        "evolve",
        "k.json",
        "fx/state_plus.json",
        "--sequence",
        "STT",
    ]));
    for i in 0..4 {
        for c in 0..2 {
            assert!(
                (a["matrix"][i][c].as_f64().unwrap() - b["matrix"][i][c].as_f64().unwrap()).abs()
                    < 1e-9
            );
        }
    }
}

#[test]
fn regenerated_fixtures_are_byte_identical() {
    let ws = Workspace::new();
    ws.ok(&["fixtures", "--out", "again"]);
    let mut names: Vec<_> = std::fs::read_dir(ws.path("fx"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() > 20);
    for name in names {
        let a = std::fs::read(ws.path("fx").join(&name)).unwrap();
        let b = std::fs::read(ws.path("again").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?}");
    }
}
