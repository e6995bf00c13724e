use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn quiver(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../quivers")
        .join(name)
}

fn dimred(args: &[&str], cache_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dimred"));
    cmd.args(args).env_remove("DIMRED_CACHE");
    if let Some(dir) = cache_env {
        cmd.env("DIMRED_CACHE", dir);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn kac_table_for_kronecker() {
    let q = quiver("kronecker.toml");
    let out = dimred(
        &[
            "kac",
            "--quiver",
            q.to_str().unwrap(),
            "--bound",
            "2",
            "--out",
            "json",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert!(entries
        .iter()
        .any(|e| e[0] == serde_json::json!([1, 1]) && e[1] == serde_json::json!([1, 1])));
    let text = dimred(
        &["kac", "--quiver", q.to_str().unwrap(), "--bound", "2"],
        None,
    );
    assert!(String::from_utf8(text.stdout).unwrap().contains("q + 1"));
}

#[test]
fn count_for_a2() {
    let q = quiver("a2.toml");
    let out = dimred(
        &[
            "count",
            "--quiver",
            q.to_str().unwrap(),
            "--gamma",
            "1,1",
            "--q",
            "3",
            "--out",
            "json",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["raw"], 5);
    assert_eq!(v["stack"], "5/4");
    let csv = dimred(
        &[
            "count",
            "--quiver",
            q.to_str().unwrap(),
            "--gamma",
            "1,1",
            "--q",
            "3",
            "--out",
            "csv",
        ],
        None,
    );
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap(),
        "gamma,q,raw,stack,seminilpotent\n\"1,1\",3,5,5/4,-\n"
    );
}

#[test]
fn verify_jordan_with_cache() {
    let q = quiver("jordan.toml");
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--quiver",
        q.to_str().unwrap(),
        "--bound",
        "2",
        "--primes",
        "2,3,5",
        "--out",
        "json",
    ];
    let plain = dimred(&args, None);
    assert_eq!(plain.status.code(), Some(0));
    let v = json(&plain);
    assert_eq!(v["passed"], true);
    for r in v["kac"]["residuals"].as_array().unwrap() {
        assert_eq!(r[1], "0");
    }

    let cold = dimred(&args, Some(dir.path()));
    let entries: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert!(!entries.is_empty());
    let warm = dimred(&args, Some(dir.path()));
    assert_eq!(cold.stdout, plain.stdout);
    assert_eq!(warm.stdout, cold.stdout);

    std::fs::write(&entries[0], "garbage").unwrap();
    let repaired = dimred(&args, Some(dir.path()));
    assert_eq!(repaired.status.code(), Some(0));
    assert_eq!(repaired.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&repaired.stderr).contains("corrupt cache entry"));
    let entry: Value =
        serde_json::from_str(&std::fs::read_to_string(&entries[0]).unwrap()).unwrap();
    assert!(entry["created_at"].is_u64());
}

#[test]
fn cache_flag_overrides_nothing_but_location() {
    let q = quiver("a2.toml");
    let dir = tempfile::tempdir().unwrap();
    let out = dimred(
        &[
            "count",
            "--quiver",
            q.to_str().unwrap(),
            "--gamma",
            "1,1",
            "--q",
            "2",
            "--cache",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn dt_stability_for_kronecker() {
    let q = quiver("kronecker.toml");
    let out = dimred(
        &[
            "dt",
            "--quiver",
            q.to_str().unwrap(),
            "--bound",
            "3",
            "--charge",
            "-1,1;1,1",
            "--charge",
            "1,1;-1,2",
            "--out",
            "json",
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["stability"]["passed"], true);
    assert_eq!(v["factorizations"].as_array().unwrap().len(), 2);
}

#[test]
fn qdim_and_twist_check() {
    let q = quiver("jordan.toml");
    let out = dimred(
        &[
            "qdim",
            "--quiver",
            q.to_str().unwrap(),
            "--bound",
            "4",
            "--out",
            "json",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let dims: Vec<u64> = json(&out)["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, vec![1, 2, 3, 5]);
    let tw = dimred(&["twist-check", "--out", "json"], None);
    assert_eq!(tw.status.code(), Some(0));
    assert_eq!(json(&tw)["pairs"], 625);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "vertices = [\"1\"]\narrows = [[\"1\", \"9\"]]\n").unwrap();
    let out = dimred(
        &["kac", "--quiver", bad.to_str().unwrap(), "--bound", "2"],
        None,
    );
    assert_eq!(out.status.code(), Some(2));

    let j = quiver("jordan.toml");
    let j = j.to_str().unwrap();
    assert_eq!(
        dimred(
            &["verify", "--quiver", j, "--bound", "2", "--primes", "2,2"],
            None
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        dimred(
            &["verify", "--quiver", j, "--bound", "2", "--primes", "4"],
            None
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        dimred(&["kac", "--quiver", j, "--bound", "0"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dimred(&["frobnicate"], None).status.code(), Some(2));

    let a2 = quiver("a2.toml");
    let degenerate = dimred(
        &[
            "dt",
            "--quiver",
            a2.to_str().unwrap(),
            "--bound",
            "2",
            "--charge",
            "0,1;0,1",
            "--charge",
            "1,1;-1,1",
        ],
        None,
    );
    assert_eq!(degenerate.status.code(), Some(2));

    let t = quiver("two_loop.toml");
    let big = dimred(
        &[
            "count",
            "--quiver",
            t.to_str().unwrap(),
            "--gamma",
            "3",
            "--q",
            "3",
        ],
        None,
    );
    assert_eq!(big.status.code(), Some(3));
}

#[test]
fn arrow_order_does_not_change_hash() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    std::fs::write(
        &a,
        "vertices = [\"1\", \"2\", \"3\"]\narrows = [[\"1\", \"2\"], [\"2\", \"3\"]]\n",
    )
    .unwrap();
    std::fs::write(
        &b,
        "vertices = [\"1\", \"2\", \"3\"]\narrows = [[\"2\", \"3\"], [\"1\", \"2\"]]\n",
    )
    .unwrap();
    let run = |p: &Path| {
        dimred(
            &[
                "kac",
                "--quiver",
                p.to_str().unwrap(),
                "--bound",
                "2",
                "--out",
                "json",
            ],
            None,
        )
        .stdout
    };
    assert_eq!(run(&a), run(&b));
}
