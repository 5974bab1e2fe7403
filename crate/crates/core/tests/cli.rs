use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn prevlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prevlab"))
        .current_dir(dir)
        .env_remove("PREVLAB_WORKERS")
        .args(args)
        .output()
        .expect("spawn prevlab")
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn normal_form(s: f64) -> String {
    format!(
        "family 3 2\n1 1 0 : 1 0\n0 0 1 : -1 0\n0 1 0 : 0 1\n1 0 1 : 0 1\n\
         0 3 0 : {s} 0\n0 1 2 : {s} 0\n0 2 1 : 0 {s}\n0 0 3 : 0 {s}\n"
    )
}

#[test]
fn binary_shift_measure_below_bound() {
    let d = tempfile::tempdir().unwrap();
    let o = prevlab(d.path(), &["sets", "--example", "binary-shift", "--m", "5", "--out", "bs"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(d.path().join("bs.report.txt")).unwrap();
    let measure: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("measure "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(measure < 2f64.powi(-5) && measure > 0.0);
    let csv = fs::read_to_string(d.path().join("bs.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema=1 command=sets"));
    assert_eq!(lines.next(), Some("a,b"));
    assert!(lines.count() > 10);
}

#[test]
fn hopf_normal_form_is_supercritical() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("nf.poly"), normal_form(-1.0)).unwrap();
    let o = prevlab(d.path(), &["hopf", "--family", "nf.poly", "--box", "-0.5,0.5,-0.5,0.5,-0.5,0.5", "--per-axis", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("hopf.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 1, "{csv}");
    assert!(rows[0].ends_with(",nondegenerate-supercritical"), "{}", rows[0]);

    fs::write(d.path().join("sub.poly"), normal_form(1.0)).unwrap();
    let o = prevlab(d.path(), &["hopf", "--family", "sub.poly", "--out", "sub"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(d.path().join("sub.csv")).unwrap();
    assert!(csv.contains(",nondegenerate-subcritical"), "{csv}");
}

#[test]
fn unknown_command_exits_2_without_files() {
    let d = tempfile::tempdir().unwrap();
    let o = prevlab(d.path(), &["frobnicate", "--out", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(files(d.path()).is_empty());
}

#[test]
fn validation_errors_exit_2_without_files() {
    let d = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["tongues"],
        &["tongues", "--eps", "1.5"],
        &["tongues", "--eps", "0.3", "--grid", "10"],
        &["hopf", "--family", "missing.poly"],
        &["sets", "--example", "nope"],
        &["shyness", "--predicate", "nope", "--probe", "constant:1"],
    ];
    for args in cases {
        let o = prevlab(d.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    fs::write(d.path().join("bad.poly"), "family 3 2\n1 1 : 1 0\n").unwrap();
    let o = prevlab(d.path(), &["hopf", "--family", "bad.poly", "--out", "bad"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(files(d.path()), vec![d.path().join("bad.poly")]);
}

#[test]
fn numerical_failure_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let pts: String = (0..1000).map(|_| "0.5,0.5\n").collect();
    fs::write(d.path().join("pts.csv"), pts).unwrap();
    let o = prevlab(d.path(), &["dimension", "--points", "pts.csv", "--scales", "0.5,0.25,0.125,0.0625,0.03125"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!d.path().join("dimension.csv").exists());
}

fn shyness_csv(dir: &Path, workers: &str, out: &str) -> Vec<u8> {
    fs::write(dir.join("base.poly"), "poly 1 1\n1 : 1\n2 : -1\n").unwrap();
    let o = prevlab(
        dir,
        &[
            "shyness",
            "--predicate",
            "fixed-points-hyperbolic",
            "--probe",
            "polynomial:1,1,1",
            "--base",
            "base.poly",
            "--samples",
            "500",
            "--seed",
            "11",
            "--workers",
            workers,
            "--out",
            out,
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(dir.join(format!("{out}.csv"))).unwrap()
}

#[test]
fn workers_do_not_change_output() {
    let d = tempfile::tempdir().unwrap();
    let a = shyness_csv(d.path(), "1", "a");
    let b = shyness_csv(d.path(), "4", "b");
    assert_eq!(a, b);
    // idempotent rerun over an existing output
    let c = shyness_csv(d.path(), "4", "a");
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[2], "500");
}

#[test]
fn tongues_deterministic_and_env_workers() {
    let d = tempfile::tempdir().unwrap();
    let args = ["tongues", "--eps", "0.5", "--grid", "1000", "--q-max", "8", "--burn-in", "200", "--seed", "3"];
    let o = prevlab(d.path(), &[&args[..], &["--out", "t1"]].concat());
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_prevlab"))
        .current_dir(d.path())
        .env("PREVLAB_WORKERS", "3")
        .args(args)
        .args(["--out", "t2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let a = fs::read(d.path().join("t1.csv")).unwrap();
    assert_eq!(a, fs::read(d.path().join("t2.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1002);
}

#[test]
fn config_file_with_flag_override() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("run.cfg"), "# binary shift\ncommand = sets\nexample = binary-shift\nm = 3\nout = cfg\n").unwrap();
    let o = prevlab(d.path(), &["--config", "run.cfg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(d.path().join("cfg.report.txt")).unwrap().contains("m 3\n"));
    let o = prevlab(d.path(), &["--config", "run.cfg", "sets", "--m", "4"]);
    assert!(o.status.success());
    assert!(fs::read_to_string(d.path().join("cfg.report.txt")).unwrap().contains("m 4\n"));
    let o = prevlab(d.path(), &["--config", "run.cfg", "tongues", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convolve_density_dimension_run() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    fs::write(p.join("a.m"), "measure 1 2\n0 : 0.5\n1 : 0.5\n").unwrap();
    fs::write(p.join("b.m"), "measure 1 2\n0 : 0.25\n2 : 0.75\n").unwrap();
    let o = prevlab(p, &["convolve", "--measures", "a.m,b.m", "--box", "-0.5,1.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(p.join("convolve.csv")).unwrap();
    assert_eq!(csv, "# schema=1 command=convolve\nx1,weight\n0.0,0.125\n1.0,0.125\n2.0,0.375\n3.0,0.375\n");
    let rep = fs::read_to_string(p.join("convolve.report.txt")).unwrap();
    assert!(rep.contains("box_measure 0.25\n"), "{rep}");

    fs::write(p.join("s.iv"), "intervals 1 0 1\n0 0.25\n").unwrap();
    let o = prevlab(p, &["density", "--set", "s.iv", "--period", "1", "--family-widths", "1", "--grid", "0:1:0.125"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(p.join("density.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("member,min,max"));
    assert_eq!(csv.lines().count(), 3);

    let pts: String = (0..64 * 64).map(|i| format!("{},{}\n", (i % 64) as f64 / 64.0, (i / 64) as f64 / 64.0)).collect();
    fs::write(p.join("sq.csv"), format!("x,y\n{pts}")).unwrap();
    fs::write(p.join("l.csv"), "1,0\n0,1\n").unwrap();
    let o = prevlab(
        p,
        &["dimension", "--points", "sq.csv", "--scales", "0.25,0.125,0.0625,0.03125,0.015625", "--map", "l.csv", "--delta", "0.01"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = fs::read_to_string(p.join("dimension.report.txt")).unwrap();
    let dim: f64 = rep.lines().find_map(|l| l.strip_prefix("dimension ")).unwrap().parse().unwrap();
    assert!((dim - 2.0).abs() < 1e-9, "{rep}");
    assert!(rep.contains("collision_free true"), "{rep}");
}

#[test]
fn help_lists_schemas() {
    let d = tempfile::tempdir().unwrap();
    let o = prevlab(d.path(), &["--help"]);
    assert!(o.status.success());
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("omega,locked,period,multiplier") && s.contains("schema=1"));
}
