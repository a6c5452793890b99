use std::path::PathBuf;
use std::process::{Command, Output};

fn ci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ci")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"));
    line.parse().unwrap()
}

fn write_tmp(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ci-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn dsbs_point() {
    let o = ci(&["dsbs", "--p", "0.375"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!((field(&s, "exact") - 0.2938933).abs() < 1e-7);
    assert!((field(&s, "wyner") - 0.2300401).abs() < 1e-7);
    assert!((field(&s, "gap") - 0.0638532).abs() < 1e-7);
    assert!(s.starts_with("exact=0.2938933\nwyner=0.2300401\ngap=0.0638532"));
}

#[test]
fn gaussian_point_and_bits() {
    let s = stdout(&ci(&["gaussian", "--rho", "0.5"]));
    assert!((field(&s, "wyner") - 0.5493061).abs() < 1e-7);
    assert!((field(&s, "exact_ub") - 0.8826395).abs() < 1e-7);
    assert!((field(&s, "li_elgamal") - 16.7794).abs() < 1e-4);
    let b = stdout(&ci(&["gaussian", "--rho", "0", "--bits"]));
    assert!((field(&b, "li_elgamal") - 24.0).abs() < 1e-9);
    assert!(b.contains("unit=bits"));
}

#[test]
fn domain_errors_exit_2() {
    let o = ci(&["dsbs", "--p", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p = 0.7"));
    assert_eq!(ci(&["gaussian", "--rho", "1"]).status.code(), Some(2));
    assert_eq!(ci(&["no-such-command"]).status.code(), Some(2));
    let bad = write_tmp("bad.json", "{\"matrix\": [[0.5], [0.2, 0.3]], \"normalized\": true}");
    assert_eq!(ci(&["entropy", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bounds_on_product_is_zero() {
    let f = write_tmp("prod.json", r#"{"matrix": [[0.08, 0.12], [0.32, 0.48]], "normalized": true}"#);
    let o = ci(&["bounds", "--input", f.to_str().unwrap(), "--quantity", "gamma-ub", "--starts", "64", "--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(field(&s, "value").abs() < 1e-6);
    assert!(s.contains("kind=heuristic-upper"));
}

#[test]
fn budget_errors_exit_3() {
    let f = write_tmp("big.json", r#"{"matrix": [[1,1,1,1],[1,1,1,1]], "normalized": false}"#);
    let o = ci(&["bounds", "--input", f.to_str().unwrap(), "--quantity", "multiletter"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ci(&["covering", "--n", "4", "--rate", "5.0", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_dsbs_rows() {
    let s = stdout(&ci(&["sweep-dsbs", "--pmin", "0.1", "--pmax", "0.375", "--steps", "3"]));
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "p,exact_ci,wyner_ci");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.1000000,") && lines[3].starts_with("0.3750000,"));
    for row in &lines[1..] {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] > v[2]);
    }
    let point = stdout(&ci(&["dsbs", "--p", "0.375"]));
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(format!("exact={}", last[1]), point.lines().next().unwrap());
    assert_eq!(ci(&["sweep-dsbs", "--pmin", "0.3", "--pmax", "0.2"]).status.code(), Some(2));
}

#[test]
fn sweep_gaussian_rows() {
    let s = stdout(&ci(&["sweep-gaussian", "--rmin", "0", "--rmax", "0.9", "--steps", "10"]));
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 11);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&first[..3], &[0.0, 0.0, 0.0]);
    assert!((first[3] - 16.6355).abs() < 1e-4);
    for row in &lines[2..] {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] < v[2] && v[2] < v[3]);
        assert!((v[2] - v[1] - v[0] / (1.0 + v[0])).abs() < 1e-6);
    }
}

#[test]
fn covering_rows_are_deterministic() {
    let args = ["covering", "--n", "8", "--eps", "0.2", "--rate", "0.3,0.55", "--seeds", "3", "--seed", "4"];
    let a = ci(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, ci(&args).stdout);
    let s = stdout(&a);
    assert_eq!(s.lines().count(), 7);
    assert!(s.lines().nth(4).unwrap().starts_with("0.5500000,4,"));
    let one = stdout(&ci(&["covering", "--n", "8", "--eps", "0.2", "--rate", "0.3", "--seeds", "1"]));
    assert_eq!(one.lines().count(), 2);
}

#[test]
fn covering_at_n6_reports_empty_shell() {
    let o = ci(&["covering", "--n", "6", "--eps", "0.2", "--rate", "0.3", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("conditional shell"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("ci-cli-out-{}.txt", std::process::id()));
    let o = ci(&["dsbs", "--p", "0.375", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("exact="));
}

#[test]
fn structural_commands() {
    let third = write_tmp("third.json", r#"{"matrix": [[1, 1], [1, 0]], "normalized": false}"#);
    let p = third.to_str().unwrap();
    let s = stdout(&ci(&["condition-star", "--input", p, "--starts", "16"]));
    assert!(s.contains("pseudo_product=true"));
    assert!(field(&s, "difference").abs() < 2e-3);
    let g = stdout(&ci(&["g-infinity", "--input", p]));
    assert!(g.contains("kind=certified-exact"));
    let r = stdout(&ci(&["rank", "--input", p, "--starts", "8"]));
    assert_eq!(field(&r, "rank"), 2.0);
    let e = stdout(&ci(&["entropy", "--input", p, "--alpha", "2"]));
    assert!((field(&e, "h_xy") - 3f64.ln()).abs() < 1e-6);
    let ce = stdout(&ci(&["common-entropy", "--input", p, "--starts", "8"]));
    assert!(field(&ce, "value") > 0.0);
    let d = stdout(&ci(&["divergence", "--input", p, "--reference", p]));
    assert_eq!(field(&d, "kl"), 0.0);
    let sb = stdout(&ci(&["superblock", "--pw", "0.3,0.7", "--n", "4", "--eps", "0.3", "--rate", "1.1"]));
    assert!(sb.contains("within_bound=true"));
}
