use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lcdrive(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcdrive")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    let out = lcdrive(args);
    out.status.code().expect("exited normally")
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Every CSV in `dir` has a header row and a sidecar naming the same columns.
fn check_csvs(dir: &Path) -> usize {
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            let text = read(&p);
            let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
            let meta: serde_json::Value =
                serde_json::from_str(&read(&p.with_extension("meta.json"))).unwrap();
            let cols: Vec<&str> = meta["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
            assert_eq!(cols, header, "{}", p.display());
            assert_eq!(meta["rows"].as_u64().unwrap() as usize, text.lines().count() - 1);
            assert!(meta["meta"]["config"].is_object());
            n += 1;
        }
    }
    n
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["run", "--out", out, "--L", "4", "--hxf", "2", "--kind", "lcd", "--lambda-f", "auto"]), 0);
    assert_eq!(check_csvs(dir.path()), 2);
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    let lf = summary["record"]["lambda_f"].as_f64().unwrap();
    assert!((lf - 1.5f64.sqrt()).abs() < 1e-8);
    let traj = read(&dir.path().join("trajectory.csv"));
    assert_eq!(traj.lines().count(), 202);
}

#[test]
fn exit_codes_per_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    // A regular file where a directory is needed makes every writer fail at run time.
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let blocked = blocker.join("sub");
    let blocked = blocked.to_str().unwrap();

    let small = ["--L", "3", "--samples", "11"];
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["run"], 0),
        (vec!["run", "--L", "1"], 2),
        (vec!["run", "--tau", "-1"], 2),
        (vec!["run", "--out", blocked], 1),
        (vec!["scan-lambda", "--grid", "0.5,1.0"], 0),
        (vec!["scan-lambda", "--grid", "1:0.5:0.1"], 2),
        (vec!["scan-lambda", "--kind", "adiabatic", "--grid", "0.5,1.0"], 2),
        (vec!["scan-lambda", "--grid", "0.5,1.0", "--out", blocked], 1),
        (vec!["scan-hx", "--grid", "0.5,2"], 0),
        (vec!["scan-hx", "--grid", "0.5,2", "--lu-mode", "diagonal"], 2),
        (vec!["scan-hx", "--grid", "0.5,2", "--out", blocked], 1),
        (vec!["scaling", "--sizes", "3,4", "--protocols", "adiabatic,lcd"], 0),
        (vec!["scaling", "--sizes", "4", "--protocols", "adiabatic,lcd"], 2),
        (vec!["scaling", "--sizes", "3,4", "--protocols", "warp"], 2),
        (vec!["scaling", "--sizes", "3,4", "--protocols", "lcd", "--out", blocked], 1),
        (vec!["trotter", "--sizes", "2,3", "--steps", "5", "--shots", "50"], 0),
        (vec!["trotter", "--sizes", "2,3", "--steps", "5", "--shots", "0"], 2),
        (vec!["trotter", "--sizes", "2,3", "--steps", "5", "--shots", "50", "--out", blocked], 1),
        (vec!["export-circuit", "--steps", "3"], 0),
        (vec!["export-circuit", "--format", "quil"], 2),
        (vec!["export-circuit", "--output", blocked], 1),
        (vec!["run", "--jobs", "0"], 2),
        (vec!["run", "--frobnicate"], 2),
        (vec!["bogus"], 2),
        (vec!["--help"], 0),
    ];
    for (args, want) in cases {
        let mut full = args.clone();
        if !args.contains(&"--out") && !args.contains(&"--help") && args[0] != "bogus" {
            full.extend(["--out", out]);
            if !args.contains(&"--L") {
                full.extend(small);
            }
        }
        let o = lcdrive(&full);
        assert_eq!(
            o.status.code(),
            Some(want),
            "{full:?}\nstderr: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn export_to_stdout_and_file() {
    let o = lcdrive(&["export-circuit", "--L", "3", "--steps", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;"));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    assert_eq!(code(&["export-circuit", "--L", "3", "--steps", "2", "--format", "json", "--output", p.to_str().unwrap()]), 0);
    let c = lcdrive::trotter::parse_circuit_json(&read(&p)).unwrap();
    assert_eq!(c.steps, 2);
}

fn trotter_run(dir: &Path, seed: &str, jobs: &str) {
    let args = [
        "trotter", "--out", dir.to_str().unwrap(), "--seed", seed, "--jobs", jobs, "--sizes", "2..5", "--steps", "6",
        "--shots", "200", "--hxf", "0.5", "--tomography", "--tomography-shots", "50", "--qasm",
    ];
    let o = lcdrive(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    trotter_run(a.path(), "7", "1");
    trotter_run(b.path(), "7", "3");
    trotter_run(c.path(), "8", "1");
    assert!(check_csvs(a.path()) >= 1);
    for f in ["trotter_energy.csv", "z_histograms.json", "tomography.json"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
    assert_ne!(read(&a.path().join("z_histograms.json")), read(&c.path().join("z_histograms.json")));
    let qasm: Vec<_> = fs::read_dir(a.path().join("circuits")).unwrap().collect();
    assert_eq!(qasm.len(), 4 * 2);

    let (d, e) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [d.path(), e.path()] {
        let o = lcdrive(&["scaling", "--out", dir.to_str().unwrap(), "--sizes", "3..5", "--hxf", "2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read(&d.path().join("scaling.csv")), read(&e.path().join("scaling.csv")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "L = 5\nh_xf = 0.5\nkind = \"lcdlu\"\nlambda_f = 1.5\nsample_count = 21\n[scan_lambda]\ngrid = [0.5, 1.0, 1.5]\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = lcdrive(&[
        "scan-lambda", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--L", "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out.join("scan_lambda.csv"));
    assert_eq!(csv.lines().count(), 4);
    let meta: serde_json::Value = serde_json::from_str(&read(&out.join("scan_lambda.meta.json"))).unwrap();
    assert_eq!(meta["meta"]["config"]["L"], 3);
    assert_eq!(meta["meta"]["config"]["h_xf"], 0.5);

    fs::write(&cfg, "L = 5\nunknown_key = 1\n").unwrap();
    assert_eq!(code(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    assert_eq!(code(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]), 2);
}
