use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("BERGMAN_LAB_THREADS")
        .output()
        .expect("binary runs")
}

/// The single cell directory under `out/<sub>/`.
fn cell_dir(out: &Path, sub: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out.join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.pop().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn rank_one_spectrum_csv() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["toeplitz", "--measure", "atomic:[[0,0,2]]"], out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(cell_dir(out.path(), "toeplitz").join("spectrum.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("k,lambda"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lambda: f64 = first[1].parse().unwrap();
    assert_eq!(first[0], "1");
    assert!((lambda - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!(lines.all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap().abs() < 1e-12));
}

#[test]
fn divergent_threshold_case() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["criteria", "--p", "2", "--q", "4", "--measure", "power_density:0.4"], out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = cell_dir(out.path(), "criteria");
    let report = json(&dir.join("theorem_consistency.json"));
    assert_eq!(report["payload"]["verdict"], "divergent");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    let hash = report["config_hash"].as_str().unwrap();
    assert!(dir.ends_with(&hash[..16]));
    let matrix = fs::read_to_string(dir.join("consistency.csv")).unwrap();
    assert!(matrix.contains("theorem,condition,verdict,bounded,compact"));
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["kernel", "--rmax", "1.5"], out.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("r_max"));

    let o = lab(&["criteria", "--measure", "power_density:-1"], out.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("measure.t"));

    // A weight concentrated near the origin makes high monomials numerically
    // dependent.
    let mut grid = String::from("re,im,value\n");
    for i in 0..5 {
        for j in 0..5 {
            let (re, im) = (-1.0 + 0.5 * j as f64, -1.0 + 0.5 * i as f64);
            grid.push_str(&format!("{re},{im},{}\n", if i == 2 && j == 2 { 1.0 } else { 0.0 }));
        }
    }
    fs::write(out.path().join("tent.csv"), grid).unwrap();
    let config = out.path().join("tent.json");
    fs::write(&config, r#"{"weight":{"kind":"grid","file":"tent.csv","n":5},"degree":40}"#).unwrap();
    let o = lab(&["kernel", "--config", config.to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));

    let o = Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
        .args(["lattice", "--out"])
        .arg(out.path())
        .env("BERGMAN_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_cells_get_their_own_directories() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["lattice", "--p", "2,3", "--r", "0.2,0.4"], out.path());
    assert!(o.status.success());
    let summary = json(&out.path().join("lattice/summary.json"));
    let cells = summary["payload"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    for c in cells {
        let dir = PathBuf::from(c["dir"].as_str().unwrap());
        let lattice = json(&dir.join("lattice.json"));
        let p = &lattice["payload"];
        assert_eq!(p["r"], 0.5);
        assert!(p["points"].as_array().unwrap().len() > 100);
        assert!(p["multiplicity_bound"].as_u64().is_some());
        assert_eq!(json(&dir.join("certificate.json"))["payload"]["disjoint"], true);
    }
}

#[test]
fn identical_configs_give_identical_json() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["berezin", "--measure", "power_density:1", "--degree", "40", "--rmax", "0.9"];
    assert!(lab(&args, a.path()).status.success());
    assert!(lab(&args, b.path()).status.success());
    let (da, db) = (cell_dir(a.path(), "berezin"), cell_dir(b.path(), "berezin"));
    assert_eq!(da.file_name(), db.file_name());
    let mut names: Vec<_> = fs::read_dir(&da).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "berezin.csv"));
    // config.json records the output directory; everything else must match.
    for n in names.into_iter().filter(|n| n != "config.json") {
        assert_eq!(fs::read(da.join(&n)).unwrap(), fs::read(db.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn every_subcommand_writes_artifacts() {
    let out = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["kernel", "--weight", "standard:1", "--degree", "40"], "kernel_estimates.json"),
        (&["weights", "--weight", "standard:1", "--p", "2"], "bekolle.json"),
        (&["schatten", "--measure", "power_density:1", "--degree", "100", "--config"], "schatten_integral.json"),
        (&["criteria", "--measure", "atomic:[[0.2,0,1]]", "--p", "4", "--q", "2"], "theorem_consistency.json"),
    ];
    let small = out.path().join("small.json");
    fs::write(&small, r#"{"schatten":{"h":{"kind":"power","p":2.0},"c":1.0,"proxy":"kernel_diagonal","degrees":[50,100],"sweep":[0.9,0.95]}}"#).unwrap();
    for (args, file) in cases {
        let mut args: Vec<&str> = args.to_vec();
        if args.last() == Some(&"--config") {
            args.push(small.to_str().unwrap());
        }
        let o = lab(&args, out.path());
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(cell_dir(out.path(), args[0]).join(file).exists(), "{args:?}");
    }
}
