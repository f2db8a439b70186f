use std::path::Path;
use std::process::Command;

use serde_json::Value;

use ndpp_map::combin::k_subsets;
use ndpp_map::Kernel;

fn ndpp(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ndpp"))
        .args(args)
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = if stdout.is_empty() {
        Value::Null
    } else {
        assert!(stdout.ends_with('\n'));
        serde_json::from_str(&stdout).unwrap()
    };
    (
        out.status.code().unwrap(),
        json,
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let (code, _, err) = ndpp(&full);
    assert_eq!(code, 0, "{err}");
    path
}

fn load(path: &str) -> Kernel<f64> {
    Kernel::parse_text(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_skew_block_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "sb.txt",
        &["--kind", "skew-block", "--c", "4,3,2", "--x", "100,200,300"],
    );
    let k = load(&p);
    assert_eq!(k.n(), 6);
    assert_eq!(k.principal_minor(&[0, 1]).unwrap(), 10016.0);
    assert_eq!(k.entries()[(0, 2)], 0.0);
}

#[test]
fn gen_identity_and_lowrank() {
    let dir = tempfile::tempdir().unwrap();
    let id = load(&gen(
        dir.path(),
        "id.txt",
        &["--kind", "sym-psd", "--n", "4", "--identity"],
    ));
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(id.entries()[(i, j)], if i == j { 1.0 } else { 0.0 });
        }
    }

    let p = gen(
        dir.path(),
        "lr.txt",
        &[
            "--kind",
            "lowrank-npsd",
            "--n",
            "8",
            "--d",
            "3",
            "--seed",
            "1",
        ],
    );
    assert!(std::fs::read_to_string(&p).unwrap().starts_with("8 3\n"));
    let k = load(&p);
    let lr = k.lowrank().unwrap();
    let dense = lr.b.matmul(&lr.c).matmul(&lr.b.transpose());
    assert!(dense.sub(k.entries()).max_abs() <= 1e-12 * dense.max_abs());
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    let p = p.to_str().unwrap();
    let (code, _, _) = ndpp(&[
        "gen",
        "--kind",
        "skew-block",
        "--c",
        "2,3",
        "--x",
        "100,200",
        "--out",
        p,
    ]);
    assert_eq!(code, 4);
    let (code, _, _) = ndpp(&[
        "gen",
        "--kind",
        "skew-block",
        "--c",
        "4,3",
        "--x",
        "20,200",
        "--out",
        p,
    ]);
    assert_eq!(code, 4);
    let (code, _, _) = ndpp(&["gen", "--kind", "lowrank-npsd", "--n", "5", "--out", p]);
    assert_eq!(code, 4);
    let (code, _, _) = ndpp(&["gen", "--kind", "no-such-kind", "--out", p]);
    assert_eq!(code, 4);
}

#[test]
fn map_on_skew_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), "sb.txt", &["--kind", "skew-block"]);
    let (code, r, _) = ndpp(&["map", "--kernel", &p, "--k", "2", "--r", "2", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["set"], serde_json::json!([4, 5]));
    assert_eq!(r["results"]["oracle"]["matches"], Value::Bool(true));

    let (code, r, _) = ndpp(&[
        "map", "--kernel", &p, "--k", "2", "--r", "1", "--init", "standard",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["initial_set"], serde_json::json!([0, 1]));
    assert_eq!(r["results"]["set"], serde_json::json!([0, 1]));
    assert_eq!(r["results"]["value"].as_f64(), Some(10016.0));

    let (_, r, _) = ndpp(&[
        "map", "--kernel", &p, "--k", "2", "--r", "2", "--init", "standard",
    ]);
    assert_eq!(r["results"]["set"], serde_json::json!([4, 5]));
}

#[test]
fn map_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "id.txt",
        &["--kind", "sym-psd", "--n", "5", "--identity"],
    );
    let (code, r, err) = ndpp(&["map", "--kernel", &p, "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["value"].as_f64(), Some(1.0));
    assert!(err.contains("map:"));
}

#[test]
fn map_report_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "k.txt",
        &["--kind", "random-npsd", "--n", "6", "--seed", "3"],
    );
    let out = dir.path().join("report.json");
    let (_, r, _) = ndpp(&[
        "map",
        "--kernel",
        &p,
        "--k",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(saved["results"], r["results"]);
}

#[test]
fn infeasible_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.txt");
    std::fs::write(&zero, "3\n0 0 0\n0 0 0\n0 0 0\n").unwrap();
    let (code, _, _) = ndpp(&["map", "--kernel", zero.to_str().unwrap(), "--k", "2"]);
    assert_eq!(code, 2);
    let (code, _, _) = ndpp(&["map", "--kernel", zero.to_str().unwrap()]);
    assert_eq!(code, 4);
    let (code, _, _) = ndpp(&["map", "--kernel", "/no/such/file", "--k", "2"]);
    assert_eq!(code, 4);
    let (code, _, _) = ndpp(&[
        "map",
        "--kernel",
        zero.to_str().unwrap(),
        "--k",
        "2",
        "--r",
        "3",
    ]);
    assert_eq!(code, 4);
}

#[test]
fn verify_identity_exchange() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "id.txt",
        &["--kind", "sym-psd", "--n", "6", "--identity"],
    );
    let (code, r, _) = ndpp(&["verify", "--kernel", &p, "--k", "3", "--suite", "exchange"]);
    assert_eq!(code, 0);
    let s = &r["results"]["exchange"]["report"];
    assert_eq!(s["failures"].as_u64(), Some(0));
    assert_eq!(
        s["pairs"].as_u64(),
        Some(k_subsets(6, 3).len().pow(2) as u64)
    );
    assert_eq!(s["max_beta"].as_f64(), Some(1.0));
}

#[test]
fn verify_walk_on_seeded_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "k.txt",
        &["--kind", "random-npsd", "--n", "7", "--seed", "9"],
    );
    let (code, r, _) = ndpp(&[
        "verify", "--kernel", &p, "--k", "3", "--suite", "walk", "--fields", "3",
    ]);
    assert_eq!(code, 0);
    let chains = r["results"]["walk"]["report"]["chains"].as_array().unwrap();
    assert_eq!(chains.len(), 4);
    for c in chains {
        assert_eq!(c["validity"]["ok"], Value::Bool(true));
        assert_eq!(c["cheeger_ok"], Value::Bool(true));
        assert_eq!(c["num_states"].as_u64(), Some(35));
    }
}

#[test]
fn verify_coreset_and_all() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "k.txt",
        &["--kind", "sym-psd", "--n", "9", "--seed", "4"],
    );
    let (code, r, _) = ndpp(&["verify", "--kernel", &p, "--k", "2", "--seed", "1"]);
    assert_eq!(code, 0, "{r}");
    let c = &r["results"]["coreset"]["report"];
    assert_eq!(c["bound_ok"], Value::Bool(true));
    assert_eq!(c["parts"].as_array().unwrap().len(), 3);
    assert_eq!(r["passed"], Value::Bool(true));
}

#[test]
fn verify_capacity_surfaces_per_suite() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "big.txt",
        &["--kind", "random-npsd", "--n", "30", "--seed", "2"],
    );
    let (code, r, _) = ndpp(&["verify", "--kernel", &p, "--k", "4", "--suite", "exchange"]);
    assert_eq!(code, 3);
    assert!(r["results"]["exchange"]["report"]["error"]
        .as_str()
        .unwrap()
        .contains("capacity"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(
        dir.path(),
        "k.txt",
        &["--kind", "random-npsd", "--n", "6", "--seed", "5"],
    );
    let run = || {
        let (_, mut r, _) = ndpp(&[
            "verify", "--kernel", &p, "--k", "2", "--seed", "8", "--steps", "2000",
        ]);
        r.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(), run());
}
