use std::fs;
use std::process::Command;

use cakecut::harness::gen_random_instance;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cakecut"))
}

const UNIFORM_131: &str = r#"{"cake":{"kind":"interval","length":"1"},"scalar":{"kind":"rational"},
 "players":[{"demand":"1","density":[{"to":"1","density":"5"}]},
            {"demand":"3","density":[{"to":"1","density":"5"}]},
            {"demand":"1","density":[{"to":"1","density":"5"}]}]}"#;

#[test]
fn divide_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let div = dir.path().join("div.json");
    let trace = dir.path().join("trace.txt");
    fs::write(&inst, UNIFORM_131).unwrap();
    let out = bin()
        .args(["divide", "--protocol", "batch", "--knife", "prefix", "--instance"])
        .arg(&inst)
        .arg("--out")
        .arg(&div)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = fs::read_to_string(&trace).unwrap();
    assert_eq!(lines.lines().count(), 9);
    assert!(lines.lines().all(|l| l.contains("kind=pcut")));
    let out = bin().arg("verify").arg("--instance").arg(&inst).arg("--division").arg(&div).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["proportional"], true);
}

#[test]
fn swapped_division_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let div = dir.path().join("div.json");
    fs::write(&inst, UNIFORM_131).unwrap();
    fs::write(
        &div,
        r#"[{"player":1,"piece":[["1/5","4/5"]]},{"player":2,"piece":[["0","1/5"]]},{"player":3,"piece":[["4/5","1"]]}]"#,
    )
    .unwrap();
    let out = bin().arg("verify").arg("--instance").arg(&inst).arg("--division").arg(&div).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_instance_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.json");
    fs::write(
        &inst,
        r#"{"cake":{"kind":"interval","length":"1"},"scalar":{"kind":"rational"},
            "players":[{"demand":"2","density":[{"to":"1","density":"2"}]},
                       {"demand":"1","density":[{"to":"1","density":"3"}]}]}"#,
    )
    .unwrap();
    let out = bin().arg("divide").arg("--instance").arg(&inst).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_instance_divides_with_every_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("gen.json");
    fs::write(&inst, gen_random_instance(4, 2, 9, 4).unwrap().to_json()).unwrap();
    for p in ["batch", "cnh2", "cnh-rec", "clone", "irrational"] {
        let out = bin().args(["divide", "--protocol", p, "--instance"]).arg(&inst).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{p}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn adversary_report() {
    let out = bin()
        .args(["adversary", "--protocol", "batch", "--n", "4", "--c1", "3/4", "--c2", "3/4", "--D", "81", "--seed", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep["humble_queries"].as_u64().unwrap() >= 12);
    assert_eq!(rep["lower_bound_met"], true);
}

#[test]
fn bench_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args(["bench", "--protocols", "batch,cnh-rec,clone", "--n-list", "2,3", "--d-list", "16,20", "--seeds", "2", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 2 * 2);
}
