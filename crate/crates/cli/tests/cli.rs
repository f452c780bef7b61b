use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mnqc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnqc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_preset_lists_valid_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "c.toml", "preset = \"nope\"\n");
    let o = mnqc(&["roofline", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for p in ["no1", "no2", "no3", "future"] {
        assert!(e.contains(p), "{e}");
    }
    let o = mnqc(&["roofline", "--preset", "nope"], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_value_reports_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "c.toml", "preset = \"no1\"\n\n[noise]\nt1 = \"long\"\n");
    let o = mnqc(&["gate", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let cfg = config(tmp.path(), "c.json", "{\n  \"pe\": 0.5,\n  \"bogus\": 1\n}\n");
    let o = mnqc(&["gate", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn exit_codes_by_failure_class() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("absent.toml");
    let o = mnqc(&["qcpa", "--config", missing.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(3));

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = mnqc(&["qcpa"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(3));

    let cfg = config(tmp.path(), "c.toml", "pe = 0.7\n");
    let o = mnqc(&["gate", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn perfect_pair_gives_exact_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = mnqc(&["gate", "--perfect-ep"], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let g: Value = serde_json::from_str(&fs::read_to_string(out.join("gate.json")).unwrap()).unwrap();
    assert!((g["f_ll"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn pipeline_records_link() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = config(tmp.path(), "c.toml", "preset = \"no1\"\npe = 0.5\nrounds = 0\n");
    let o = mnqc(&["pipeline", "--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out);
    let link = &m["results"]["link"];
    let t = link["t_ll_seconds"].as_f64().unwrap();
    let f = link["f_ll"].as_f64().unwrap();
    assert!((0.8e-6..1.6e-6).contains(&t), "{t}");
    assert!((0.75..0.85).contains(&f), "{f}");
    // the roofline ran against the simulated link time
    let mccr = m["results"]["mccr"][0].as_f64().unwrap();
    assert!((mccr - t / 100e-9).abs() < 1e-9);
}

#[test]
fn qcpa_headline_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert!(mnqc(&["qcpa"], &out).status.success());
    let csv = fs::read_to_string(out.join("qcpa.csv")).unwrap();
    let value = |method: &str| -> f64 {
        let line = csv.lines().find(|l| l.starts_with(method)).unwrap();
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!((value("knit_lower") - 77.1).abs() < 0.1);
    assert!((5.6..=6.0).contains(&value("pec_F0.975")));
    let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("qcpa.json")).unwrap()).unwrap();
    assert_eq!(meta["k_text"], 128);
    assert_eq!(meta["k_profile"], 164);
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "c.toml",
        "seed = 11\n[qv]\ntrials = 100\nmax_width = 4\n[roofline]\nsource = \"compiled\"\n",
    );
    for cmd in ["qv", "roofline", "qcpa", "dqpe", "m2o-sweep", "distill"] {
        let a = tmp.path().join(format!("{cmd}-a"));
        let b = tmp.path().join(format!("{cmd}-b"));
        for d in [&a, &b] {
            let o = mnqc(&[cmd, "--config", cfg.to_str().unwrap(), "--threads", "1"], d);
            assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        }
        let (fa, fb) = (artifacts(&a), artifacts(&b));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{cmd}");
        // every artifact is listed, nothing else is
        let mut listed: Vec<String> = manifest(&a)["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        listed.sort();
        assert_eq!(listed, fa.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
        assert_eq!(manifest(&a)["seed"], 11);
    }
}

#[test]
fn json_config_is_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = config(tmp.path(), "c.json", r#"{"roofline": {"shift_rounds": 1}}"#);
    let o = mnqc(&["roofline", "--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let mccr = manifest(&out)["results"]["mccr"].as_array().unwrap().len();
    assert_eq!(mccr, 2);
}
