//! End-to-end runs of the `mchairs` binary.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const TWINS: &str = "mcwords v1 m=2\nword a = lit(1 2);\nword b = lit(1 2);\n";

fn mchairs(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mchairs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn identical_words_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "twins.mcw", TWINS);
    let out = mchairs(&["verify", &f], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "CYCLE_FOUND");
    assert_eq!(v["witness"]["positions"][0], v["witness"]["positions"][2]);
    assert!(!out.stderr.is_empty());
}

#[test]
fn construct_pipes_into_verify() {
    let built = mchairs(&["construct", "recursive", "--n", "2", "--side", "s"], None);
    assert_eq!(built.status.code(), Some(0));
    let env = json(&built);
    assert_eq!(env["system"]["m"], 3);
    assert_eq!(env["system"]["words"][0]["length"], "48");
    let out = mchairs(&["verify", "-"], Some(&built.stdout));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "OBLIVIOUS");
    assert_eq!(v["longest_schedule"], "5");

    // the bare word file works as well
    let text = env["word_file"].as_str().unwrap();
    let out = mchairs(&["verify", "-", "--players", "1,0"], Some(text.as_bytes()));
    assert_eq!(json(&out)["verdict"], "OBLIVIOUS");
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "construct",
        "random-words",
        "--n",
        "3",
        "--N",
        "5",
        "--m",
        "5",
        "--seed",
        "42",
    ];
    let a = mchairs(&args, None);
    let b = mchairs(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v1 = mchairs(&["verify", "-", "--players", "0,1"], Some(&a.stdout));
    let v2 = mchairs(&["verify", "-", "--players", "0,1"], Some(&a.stdout));
    assert_eq!(v1.stdout, v2.stdout);
    assert!(json(&v1).get("timing_ms").is_none());
    let other = mchairs(
        &[
            "construct",
            "random-words",
            "--n",
            "3",
            "--N",
            "5",
            "--m",
            "5",
            "--seed",
            "43",
        ],
        None,
    );
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mchairs(&["verify"], None).status.code(), Some(2));
    assert_eq!(mchairs(&["frobnicate"], None).status.code(), Some(2));
    let bad = mchairs(&["verify", "-"], Some(b"not a word file"));
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["status"], "error");
    let missing = mchairs(&["verify", "/nonexistent/file.mcw"], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn state_cap_exits_three() {
    let built = mchairs(
        &[
            "construct",
            "random-perms",
            "--N",
            "4",
            "--m",
            "9",
            "--seed",
            "1",
        ],
        None,
    );
    let out = mchairs(&["verify", "-", "--cap", "10"], Some(&built.stdout));
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "CAP_EXCEEDED");
}

#[test]
fn simulate_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let sys = mchairs(
        &[
            "construct",
            "recursive",
            "--n",
            "2",
            "--side",
            "s",
            "-o",
            dir.path().join("s.mcw").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(sys.status.code(), Some(0));
    let file = dir.path().join("s.mcw");
    let file = file.to_str().unwrap();
    let trace = dir.path().join("trace.json");
    let sim = mchairs(
        &[
            "simulate",
            file,
            "--seed",
            "3",
            "--trace-out",
            trace.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(sim.status.code(), Some(0));
    let v = json(&sim);
    assert_eq!(v["outcome"], "safe");
    assert!(v["steps"].as_u64().unwrap() <= 5);
    let rep = mchairs(&["replay", file, "--trace", trace.to_str().unwrap()], None);
    assert_eq!(rep.status.code(), Some(0));
    assert_eq!(json(&rep)["report"]["valid"], true);

    // a trace does not replay against different words
    let twins = write(dir.path(), "twins.mcw", TWINS);
    let rep = mchairs(
        &["replay", &twins, "--trace", trace.to_str().unwrap()],
        None,
    );
    assert_ne!(rep.status.code(), Some(0));
}

#[test]
fn manifest_records_digests() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "twins.mcw", TWINS);
    let m = dir.path().join("run.json");
    let out = mchairs(&["--manifest", m.to_str().unwrap(), "verify", &f], None);
    let man: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(man["exit_code"], 1);
    assert_eq!(man["inputs"][0]["path"], f.as_str());
    assert_eq!(man["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let digest = man["stdout_sha256"].as_str().unwrap();
    use sha2::Digest;
    assert_eq!(digest, hex::encode(sha2::Sha256::digest(&out.stdout)));
}

#[test]
fn drift_bound() {
    let out = mchairs(&["analyze", "drift", "--q", "1/7", "--x", "11"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert!(r["r_below_99_100"].as_bool().unwrap());
    let opt = json(&mchairs(
        &["analyze", "drift", "--q", "1/7", "--optimize"],
        None,
    ));
    assert!(opt["report"]["r_approx"].as_f64().unwrap() <= r["r_approx"].as_f64().unwrap() + 1e-12);
    assert_eq!(
        mchairs(&["analyze", "drift", "--q", "7/1", "--x", "1/2"], None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn each_subset_and_probe() {
    let built = mchairs(&["construct", "recursive", "--n", "2", "--side", "w"], None);
    let out = mchairs(&["verify", "-", "--each", "2"], Some(&built.stdout));
    let v = json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
    let probe = mchairs(&["probe-equivalence", "-"], Some(TWINS.as_bytes()));
    assert_eq!(probe.status.code(), Some(0));
    assert_eq!(json(&probe)["agree"], true);
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "exp.json",
        r#"{"generator":"perms","N":3,"n":2,"m":3,"systems":10,"seed":5,"method":"exhaustive"}"#,
    );
    let csv = dir.path().join("runs.csv");
    let out = mchairs(
        &[
            "analyze",
            "experiment",
            &cfg,
            "--csv",
            csv.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 10 * 3);
    let unknown = write(
        dir.path(),
        "bad.json",
        r#"{"generator":"perms","N":3,"n":2,"m":3,"systems":1,"seed":5,"oops":1}"#,
    );
    assert_eq!(
        mchairs(&["analyze", "experiment", &unknown], None)
            .status
            .code(),
        Some(2)
    );
}
