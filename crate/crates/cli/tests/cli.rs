use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invdesign"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn write_rows(path: &Path, header: &str, rows: impl IntoIterator<Item = (f64, f64)>) {
    let mut s = format!("{header}\n");
    for (x, v) in rows {
        s += &format!("{x:.17e},{v:.17e}\n");
    }
    fs::write(path, s).unwrap();
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sturm_table_and_verdict() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["counterexample", "sturm"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("roots in [-1,1]: 0"), "{out}");
    assert!(out.contains("P(0) = -6/7"));
    assert!(out.lines().any(|l| l.starts_with("-1") && l.trim_end().ends_with('4')));
}

#[test]
fn period_table_starts_near_the_small_amplitude_limit() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["counterexample", "period", "--count", "10", "--out", "o"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_rows(&tmp.path().join("o/period.csv"));
    assert_eq!(rows.len(), 10);
    let min = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    assert!((min - std::f64::consts::PI / 2f64.sqrt()).abs() < 0.01);
}

#[test]
fn shock_jump_is_positive_after_onset() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["counterexample", "shock", "--t", "1.2", "--out", "o"]);
    assert!(o.status.success());
    let rows = read_rows(&tmp.path().join("o/shock.csv"));
    assert!(rows[0][1] > 0.0);
    let early = run(tmp.path(), &["counterexample", "shock", "--t", "0.5"]);
    assert_eq!(early.status.code(), Some(2));
}

#[test]
fn missing_file_exits_one_and_names_it() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["evolve", "cl", "no_such_datum.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no_such_datum.csv"));
}

#[test]
fn invalid_configs_exit_64_without_output() {
    let tmp = TempDir::new().unwrap();
    write_rows(&tmp.path().join("d.csv"), "x,u", [(-1.0, 0.0), (1.0, 0.0)]);
    for args in [
        vec!["evolve", "cl", "d.csv", "--grid-n", "8", "--out", "o"],
        vec!["evolve", "cl", "d.csv", "--T", "-1", "--out", "o"],
        vec!["evolve", "hj", "d.csv", "--cfl", "1.5", "--out", "o"],
        vec!["evolve", "sideways", "d.csv"],
        vec!["plot", "--out", "o"],
    ] {
        let o = run(tmp.path(), &args);
        assert_eq!(o.status.code(), Some(64), "{args:?}");
        assert!(!tmp.path().join("o").exists(), "{args:?}");
    }
    fs::write(tmp.path().join("bad.json"), r#"{"grid": {"n": 100, "cells": 3}}"#).unwrap();
    let o = run(tmp.path(), &["--config", "bad.json", "counterexample", "sturm"]);
    assert_eq!(o.status.code(), Some(64));
    let o = run(tmp.path(), &["--config", "absent.json", "counterexample", "sturm"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_of_one_series_is_an_svg_with_axes() {
    let tmp = TempDir::new().unwrap();
    write_rows(&tmp.path().join("s.csv"), "x,y", (0..50).map(|k| (k as f64 * 0.1, (k as f64 * 0.1).sin())));
    let o = run(tmp.path(), &["plot", "s.csv", "--x", "x", "--y", "y", "--output", "p.svg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(tmp.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.matches("<line").count() > 4);
}

fn all_files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().into(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let t = tmp.path();
    assert!(run(t, &["counterexample", "exact", "--grid-n", "100", "--T", "0.5", "--out", "ce"]).status.success());
    for out in ["a", "b"] {
        let o = run(t, &["evolve", "cl", "ce/datum.csv", "--grid-n", "100", "--T", "1.3", "--snapshots", "4", "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(all_files(&t.join("a")), all_files(&t.join("b")));
}

#[test]
fn counterexample_steepens_into_a_shock() {
    let tmp = TempDir::new().unwrap();
    let t = tmp.path();
    assert!(run(t, &["counterexample", "exact", "--grid-n", "400", "--out", "ce"]).status.success());
    let o = run(t, &["evolve", "cl", "ce/datum.csv", "--grid-n", "400", "--T", "1.48", "--snapshots", "4", "--out", "fv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let index = fs::read_to_string(t.join("fv/index.csv")).unwrap();
    let rows: Vec<&str> = index.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].ends_with(','), "no shock in the datum rarefaction: {}", rows[0]);
    let last: Vec<&str> = rows[4].split(',').collect();
    let shocks: Vec<f64> = last[2].split(';').map(|v| v.parse().unwrap()).collect();
    assert!(shocks.iter().any(|x| x.abs() < 0.05), "{shocks:?}");
    // the finite volume profile tracks the exact one
    let fv = read_rows(&t.join("fv").join(last[1]));
    let exact = read_rows(&t.join("ce/exact.csv"));
    let l1: f64 = fv.iter().zip(&exact).map(|(a, b)| (a[1] - b[1]).abs() * 6.0 / 400.0).sum();
    assert!(l1 < 0.2, "{l1}");
}

#[test]
fn invert_counterexample_profile() {
    let tmp = TempDir::new().unwrap();
    let t = tmp.path();
    let common = ["--grid-n", "300", "--x-min", "-4", "--x-max", "4"];
    let mut args = vec!["counterexample", "exact", "--out", "ce"];
    args.extend(common);
    assert!(run(t, &args).status.success());
    let mut args = vec!["invert", "ce/exact.csv", "--cl", "--u0", "ce/datum.csv", "--out", "inv"];
    args.extend(common);
    let o = run(t, &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&t.join("inv/report.json"));
    assert_eq!(report["reachable"], true);
    let intervals = report["pi_intervals"].as_array().unwrap();
    assert_eq!(intervals.len(), 1, "{intervals:?}");
    assert_eq!(report["membership"]["member"], true, "{report}");
    let slope = read_rows(&t.join("inv/u_star_slope.csv"));
    let l1: f64 = slope
        .iter()
        .map(|r| (r[1] - if r[0] < 0.0 { -2.0 } else { 2.0 }).abs() * 8.0 / 300.0)
        .sum();
    assert!(l1 < 0.3, "{l1}");
}

#[test]
fn upward_jump_is_not_reachable() {
    let tmp = TempDir::new().unwrap();
    let t = tmp.path();
    fs::write(t.join("burgers.json"), r#"{"model": {"kind": "homogeneous_convex", "flux": "burgers"}, "grid": {"n": 600}, "time": {"T": 1.0}}"#).unwrap();
    // the default tolerance 20 dx Lip(W) only separates the residual 1/2 once dx is small
    write_rows(&t.join("w.csv"), "x,U", (0..=600).map(|k| {
        let x = -3.0 + 0.01 * k as f64;
        (x, x.abs())
    }));
    let o = run(t, &["--config", "burgers.json", "invert", "w.csv", "--out", "inv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&t.join("inv/report.json"))["reachable"], false);
}

#[test]
fn stationary_shock_bump_is_a_member() {
    let tmp = TempDir::new().unwrap();
    let t = tmp.path();
    fs::write(t.join("burgers.json"), r#"{"model": {"kind": "homogeneous_convex", "flux": "burgers"}, "grid": {"n": 300}, "time": {"T": 1.0}}"#).unwrap();
    write_rows(&t.join("w.csv"), "x,U", (0..=300).map(|k| {
        let x = -3.0 + 0.02 * k as f64;
        (x, -x.abs())
    }));
    let o = run(t, &["--config", "burgers.json", "invert", "w.csv", "--out", "a"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let u_star = read_rows(&t.join("a/u_star.csv"));
    write_rows(&t.join("u0.csv"), "x,U", u_star.iter().map(|r| {
        let s = r[0] / 0.5;
        (r[0], r[1] + if s.abs() < 1.0 { 0.2 * (1.0 - s * s).powi(3) } else { 0.0 })
    }));
    let o = run(t, &["--config", "burgers.json", "invert", "w.csv", "--u0", "u0.csv", "--out", "b"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&t.join("b/report.json"));
    assert_eq!(report["membership"]["member"], true, "{report}");
    assert_eq!(report["membership"]["forward_ok"], true);
}
