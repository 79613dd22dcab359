//! End-to-end checks of the binary: exit codes, file handling, reports.

use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_coupled");

struct Tmp {
    dir: PathBuf,
}

impl Tmp {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("coupled-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).expect("temp dir");
        Tmp { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.join(name).to_str().expect("utf8").to_string()
    }
}

impl Drop for Tmp {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.dir).ok();
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn solve_auto_reports_and_checks_oracle() {
    let tmp = Tmp::new("solve");
    let inst = tmp.path("inst.json");
    std::fs::write(
        &inst,
        r#"{"p": 2, "jobs": [{"id": 1, "b": 1, "d": 5}, {"id": 2, "b": 2, "d": 7}]}"#,
    )
    .unwrap();
    let out = run(&["solve", "--input", &inst, "--check-oracle", "--gantt"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lmax: 1"));
    assert!(text.contains("schedule: (1,2)"));
    assert!(text.contains("match: true"));
    assert!(text.contains("1 |##..=...|"));
}

#[test]
fn malformed_input_exits_1() {
    let tmp = Tmp::new("bad");
    let inst = tmp.path("broken.json");
    std::fs::write(&inst, "{not json").unwrap();
    assert_eq!(code(&run(&["solve", "--input", &inst])), 1);
    assert_eq!(code(&run(&["solve", "--input", &tmp.path("missing.json")])), 1);
    // Duplicate ids are invalid.
    std::fs::write(
        &inst,
        r#"{"p": 2, "jobs": [{"id": 1, "b": 1, "d": 5}, {"id": 1, "b": 2, "d": 7}]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["solve", "--input", &inst])), 1);
}

#[test]
fn unsupported_class_exits_3() {
    let tmp = Tmp::new("general");
    let inst = tmp.path("general.json");
    // General instance beyond the exact-search cap.
    run(&[
        "gen", "--n", "12", "--p", "2", "--class", "general", "--seed", "1", "--out", &inst,
    ]);
    let out = run(&["solve", "--input", &inst, "--algo", "auto"]);
    assert_eq!(code(&out), 3);
    // Wrong class for a dedicated solver.
    let agr = tmp.path("agr.json");
    run(&[
        "gen", "--n", "4", "--p", "2", "--class", "agreeable", "--seed", "3", "--out", &agr,
    ]);
    let out = run(&["solve", "--input", &agr, "--algo", "disagreeable"]);
    assert!(code(&out) == 3 || {
        // Seeded agreeable instances may classify as both-ways.
        let text = String::from_utf8(run(&["solve", "--input", &agr]).stdout).unwrap();
        text.contains("class: both") && code(&out) == 0
    });
}

#[test]
fn verify_accepts_then_rejects_tampered() {
    let tmp = Tmp::new("verify");
    let inst = tmp.path("inst.json");
    let sched = tmp.path("sched.json");
    run(&[
        "gen", "--n", "6", "--p", "3", "--class", "disagreeable", "--seed", "11", "--out", &inst,
    ]);
    assert_eq!(code(&run(&["solve", "--input", &inst, "--out", &sched])), 0);
    assert_eq!(code(&run(&["verify", "--instance", &inst, "--schedule", &sched])), 0);

    // Introduce an overlap by moving one start.
    let text = std::fs::read_to_string(&sched).unwrap();
    let mut file: serde_json::Value = serde_json::from_str(&text).unwrap();
    let starts = file["starts"].as_object_mut().unwrap();
    let first_key = starts.keys().next().unwrap().clone();
    starts.insert(first_key, serde_json::json!(1));
    std::fs::write(&sched, serde_json::to_string(&file).unwrap()).unwrap();
    let out = run(&["verify", "--instance", &inst, "--schedule", &sched]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stdout).unwrap().contains("violation"));
}

#[test]
fn partition_flags_drive_the_single_test() {
    let tmp = Tmp::new("partition");
    let inst = tmp.path("inst.json");
    std::fs::write(
        &inst,
        r#"{"p": 2, "jobs": [{"id": 1, "b": 1, "d": 5}, {"id": 2, "b": 2, "d": 7}]}"#,
    )
    .unwrap();
    let out = run(&[
        "solve", "--input", &inst, "--algo", "partition", "--P", "2", "--T", "1", "--L", "1",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("schedule: (1,2)"));
    let out = run(&[
        "solve", "--input", &inst, "--algo", "partition", "--P", "2", "--T", "1", "--L", "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn dump_graph_and_trace_files_appear()
{
    let tmp = Tmp::new("dump");
    let agr = tmp.path("agr.json");
    run(&[
        "gen", "--n", "5", "--p", "2", "--class", "agreeable", "--seed", "9", "--out", &agr,
    ]);
    let dump = tmp.path("graph.txt");
    assert_eq!(
        code(&run(&["solve", "--input", &agr, "--algo", "agreeable", "--dump-graph", &dump])),
        0
    );
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.contains("NODE kind=") && text.contains("ARC "));

    let dis = tmp.path("dis.json");
    run(&[
        "gen", "--n", "6", "--p", "2", "--class", "disagreeable", "--seed", "9", "--out", &dis,
    ]);
    let trace = tmp.path("trims.txt");
    assert_eq!(
        code(&run(&[
            "solve", "--input", &dis, "--algo", "disagreeable", "--trace-trims", &trace,
        ])),
        0
    );
    let text = std::fs::read_to_string(&trace).unwrap();
    let first = text.lines().next().expect("at least one step");
    assert!(first.starts_with("C=") && first.contains(" k*=") && first.contains(" alpha="));
}

#[test]
fn bench_csv_has_the_stable_schema() {
    let out = run(&[
        "bench", "--class", "general", "--sizes", "3,4", "--trials", "2", "--seed", "5",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,seed,algo,lmax,oracle_lmax,match,micros"));
    assert_eq!(lines.count(), 4);
    assert!(!text.contains("false"));
}
