use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use daest::raster::read_csv;
use daest::report::read_report;
use daest_core::Label;
use tempfile::TempDir;

fn map(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../maps").join(name).display().to_string()
}

fn daest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daest")).args(args).output().expect("run daest")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn analyze_ex1(dir: &TempDir) -> Output {
    let ex1 = map("ex1.map");
    let (emb, csv) = (path(dir, "v.embryo"), path(dir, "v.csv"));
    daest(&[
        "analyze", "--map", &ex1, "--degree", "64", "--box", "-0.8,0.8", "--res", "400", "--out-embryo", &emb,
        "--out-raster", &csv,
    ])
}

#[test]
fn analyze_prints_summary_and_reruns_identically() {
    let dir = TempDir::new().unwrap();
    let o = analyze_ex1(&dir);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("norm of linear part 0.500000000000"), "{out}");
    assert!(out.contains("effective layer 64"), "{out}");
    let line = out.lines().find(|l| l.starts_with("interval ")).expect("interval line");
    let ends: Vec<f64> = line.split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect();
    assert!(ends[0] < 0.0 && ends[1] > 0.0 && (ends[0] + ends[1]).abs() < 1e-6);

    let first = (fs::read(path(&dir, "v.embryo")).unwrap(), fs::read(path(&dir, "v.csv")).unwrap());
    assert_eq!(code(&analyze_ex1(&dir)), 0);
    let second = (fs::read(path(&dir, "v.embryo")).unwrap(), fs::read(path(&dir, "v.csv")).unwrap());
    assert_eq!(first, second);
}

#[test]
fn methods_give_the_same_interval() {
    let ex4 = map("ex4.map");
    let interval = |m: &str| {
        let o = daest(&["analyze", "--map", &ex4, "--degree", "48", "--method", m]);
        assert_eq!(code(&o), 0, "{m}: {}", stderr(&o));
        stdout(&o).lines().find(|l| l.starts_with("interval ")).unwrap().to_string()
    };
    let a = interval("per-degree");
    assert_eq!(a, interval("picard"));
    assert_eq!(a, interval("direct-sum"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = daest(&["analyze", "--map", &map("ex2.map"), "--degree", "8"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("= 1"), "{}", stderr(&o));

    assert_eq!(code(&daest(&["analyze", "--map", &map("ex1.map"), "--degree", "1"])), 1);
    assert_eq!(code(&daest(&["analyze", "--map", &path(&dir, "absent.map"), "--degree", "8"])), 1);
    assert_eq!(code(&daest(&["analyze", "--degree", "8"])), 1);
    assert_eq!(code(&daest(&["analyze", "--bogus"])), 1);
    assert_eq!(code(&daest(&["--help"])), 0);

    let bad = path(&dir, "bad.map");
    fs::write(&bad, "vars: x\nx -> 0.5*x +\n").unwrap();
    assert_eq!(code(&daest(&["analyze", "--map", &bad, "--degree", "8"])), 1);

    // x -> x/2 + x^2 - 1/4 is not fixed at the origin
    let off = path(&dir, "off.map");
    fs::write(&off, "vars: x\nx -> 0.5*x + x^2 - 0.25\n").unwrap();
    assert_eq!(code(&daest(&["analyze", "--map", &off, "--degree", "8"])), 2);
    assert_eq!(code(&daest(&["analyze", "--map", &off, "--degree", "8", "--fixed-point", "0.2"])), 2);
}

#[test]
fn fixed_point_shift_matches_translated_map() {
    // x -> x/2 - x^2 moved so that its fixed point sits at x = 1
    let dir = TempDir::new().unwrap();
    let moved = path(&dir, "moved.map");
    fs::write(&moved, "vars: x\nx -> -0.5 + 2.5*x - x^2\n").unwrap();
    let plain = path(&dir, "plain.map");
    fs::write(&plain, "vars: x\nx -> 0.5*x - x^2\n").unwrap();
    let interval = |args: &[&str]| {
        let o = daest(args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let line = stdout(&o).lines().find(|l| l.starts_with("interval ")).unwrap().to_string();
        line.split_whitespace().skip(1).map(|t| t.parse::<f64>().unwrap()).collect::<Vec<_>>()
    };
    let a = interval(&["analyze", "--map", &plain, "--degree", "32"]);
    let b = interval(&["analyze", "--map", &moved, "--degree", "32", "--fixed-point", "1"]);
    assert!((a[0] + 1.0 - b[0]).abs() < 1e-9 && (a[1] + 1.0 - b[1]).abs() < 1e-9, "{a:?} {b:?}");
}

#[test]
fn extend_auto_with_zero_steps_keeps_step_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&analyze_ex1(&dir)), 0);
    let out = path(&dir, "run");
    let o = daest(&["extend", "--embryo", &path(&dir, "v.embryo"), "--auto", "--steps", "0", "--out-dir", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_report(&fs::read_to_string(dir.path().join("run/report.txt")).unwrap()).unwrap();
    assert_eq!(r.steps.len(), 1);
    assert_eq!(r.steps[0].parent, None);
    assert!(dir.path().join("run/step_0.embryo").exists());
    assert!(!dir.path().join("run/step_1.embryo").exists());
}

#[test]
fn extend_with_centers_is_reproducible() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&analyze_ex1(&dir)), 0);
    let emb = path(&dir, "v.embryo");
    let out = path(&dir, "run");
    let args = ["extend", "--embryo", &emb, "--centers", "0.2;0.3", "--box", "-0.8,0.8", "--res", "200", "--out-dir", &out];
    let o = daest(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let names = ["report.txt", "step_0.embryo", "step_1.embryo", "step_2.embryo", "step_0.csv", "step_2.csv", "union.csv"];
    let snap = |names: &[&str]| names.iter().map(|n| fs::read(dir.path().join("run").join(n)).unwrap()).collect::<Vec<_>>();
    let first = snap(&names);
    assert_eq!(code(&daest(&args)), 0);
    assert_eq!(first, snap(&names));

    let r = read_report(&fs::read_to_string(dir.path().join("run/report.txt")).unwrap()).unwrap();
    assert_eq!(r.steps.len(), 3);
    assert_eq!(r.steps[1].center, vec![0.2]);
    let union = r.union_interval.unwrap();
    for s in &r.steps {
        let (lo, hi) = s.interval.unwrap();
        assert!(union.0 <= lo && hi <= union.1);
    }
    // union raster covers every step raster
    let u = read_csv(&fs::read_to_string(dir.path().join("run/union.csv")).unwrap()).unwrap();
    for k in 0..3 {
        let s = read_csv(&fs::read_to_string(dir.path().join(format!("run/step_{k}.csv"))).unwrap()).unwrap();
        for (a, b) in s.labels().iter().zip(u.labels()) {
            assert!(*a != Label::Member || *b == Label::Member);
        }
    }
}

#[test]
fn extend_needs_centers_or_auto() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&analyze_ex1(&dir)), 0);
    let emb = path(&dir, "v.embryo");
    assert_eq!(code(&daest(&["extend", "--embryo", &emb, "--out-dir", &path(&dir, "a")])), 1);
    assert_eq!(code(&daest(&["extend", "--embryo", &emb, "--auto", "--centers", "0.1", "--out-dir", &path(&dir, "b")])), 1);
    assert_eq!(code(&daest(&["extend", "--embryo", &path(&dir, "none.embryo"), "--auto"])), 1);
    assert_eq!(code(&daest(&["extend", "--embryo", &emb, "--centers", "0.1,0.2", "--out-dir", &path(&dir, "c")])), 1);
    assert_eq!(code(&daest(&["extend", "--embryo", &emb, "--centers", "0.1", "--reexpand", "orbit-sum"])), 1);
}

fn metrics(out: &str, what: &str) -> (f64, f64) {
    let line = out.lines().find(|l| l.starts_with(what)).unwrap_or_else(|| panic!("no `{what}` in {out}"));
    let t: Vec<&str> = line.split_whitespace().collect();
    let at = |key: &str| t[t.iter().position(|w| *w == key).unwrap() + 1].parse::<f64>().unwrap();
    (at("false_inclusion_rate"), at("coverage"))
}

#[test]
fn validate_oracle_against_itself() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&analyze_ex1(&dir)), 0);
    let ex1 = map("ex1.map");
    let oracle = path(&dir, "oracle.csv");
    let o = daest(&["validate", "--map", &ex1, "--raster", &path(&dir, "v.csv"), "--example-id", "1", "--out-oracle", &oracle]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let (fir, cov) = metrics(&out, "estimate vs oracle");
    // at degree 64 the left end sits near -0.2997, past the repelling point
    // at -0.2718, so about 0.047 of the estimate lies outside the basin
    assert!(fir > 0.04 && fir < 0.05, "{out}");
    assert!(cov > 0.3 && cov < 1.0, "{out}");
    assert!(out.contains("estimate vs known basin"));

    let o = daest(&["validate", "--map", &ex1, "--raster", &oracle]);
    assert_eq!(metrics(&stdout(&o), "estimate vs oracle"), (0.0, 1.0));

    assert_eq!(code(&daest(&["validate", "--raster", &oracle])), 1);
    assert_eq!(code(&daest(&["validate", "--map", &map("ex3.map"), "--raster", &oracle])), 1);
}

#[test]
fn render_tones_overlay_and_slices() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&analyze_ex1(&dir)), 0);
    let csv = path(&dir, "v.csv");
    let svg = path(&dir, "one.svg");
    let o = daest(&["render", "--rasters", &csv, "--svg", &svg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let one = fs::read_to_string(&svg).unwrap();
    assert!(one.contains("#505050") && !one.contains("#c0c0c0") && !one.contains("polyline"));
    let again = path(&dir, "again.svg");
    assert_eq!(code(&daest(&["render", "--rasters", &csv, "--svg", &again])), 0);
    assert_eq!(one, fs::read_to_string(&again).unwrap());

    let two = path(&dir, "two.svg");
    assert_eq!(code(&daest(&["render", "--rasters", &format!("{csv},{csv}"), "--overlay", "1", "--svg", &two])), 0);
    let two = fs::read_to_string(&two).unwrap();
    assert!(two.contains("#505050") && two.contains("#c0c0c0") && two.contains("polyline"));

    let ex5 = map("ex5.map");
    let o = daest(&[
        "analyze", "--map", &ex5, "--degree", "32", "--box", "-1,2,-1,2", "--res", "60", "--out-raster", &path(&dir, "e5.csv"),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e5svg = path(&dir, "e5.svg");
    let pgm = path(&dir, "e5.pgm");
    assert_eq!(code(&daest(&["render", "--rasters", &path(&dir, "e5.csv"), "--overlay", "5", "--svg", &e5svg, "--pgm", &pgm])), 0);
    // (1.5, 1.5) sits at five sixths of the way across and one sixth down
    assert!(fs::read_to_string(&e5svg).unwrap().contains("<circle cx=\"500.000\" cy=\"100.000\" r=\"5\""));
    assert!(fs::read_to_string(&pgm).unwrap().starts_with("P2\n60 60\n255\n"));

    let ex6 = map("ex6.map");
    let cube = path(&dir, "e6.csv");
    let o = daest(&["analyze", "--map", &ex6, "--degree", "12", "--box", "-1,1,-1,1,-1,1", "--res", "8", "--out-raster", &cube]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&daest(&["render", "--rasters", &cube, "--svg", &path(&dir, "x.svg")])), 1);
    assert_eq!(code(&daest(&["render", "--rasters", &cube, "--slice", "2=4", "--svg", &path(&dir, "s.svg")])), 0);
    assert_eq!(code(&daest(&["render", "--rasters", &cube, "--slice", "3=0", "--svg", &path(&dir, "t.svg")])), 1);
    assert_eq!(code(&daest(&["render", "--rasters", &cube, "--slice", "2=8", "--svg", &path(&dir, "u.svg")])), 1);
}

#[test]
fn render_from_report_uses_two_tones() {
    let dir = TempDir::new().unwrap();
    let ex5 = map("ex5.map");
    let emb = path(&dir, "v.embryo");
    assert_eq!(code(&daest(&["analyze", "--map", &ex5, "--degree", "32", "--out-embryo", &emb])), 0);
    let run = path(&dir, "run");
    let o = daest(&["extend", "--embryo", &emb, "--auto", "--steps", "2", "--candidates", "2", "--box", "-3,3,-3,3", "--res", "64", "--out-dir", &run]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = path(&dir, "run.svg");
    let report = dir.path().join("run/report.txt").display().to_string();
    let o = daest(&["render", "--report", &report, "--box", "-3,3,-3,3", "--res", "64", "--overlay", "5", "--svg", &svg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.contains("#505050") && text.contains("#c0c0c0") && text.contains("<circle"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = PathBuf::from(path(&dir, "run.cfg"));
    fs::write(&cfg, format!("# example 1\nmap = {}\ndegree = 16\n", map("ex1.map"))).unwrap();
    let cfg = cfg.display().to_string();
    let interval = |extra: &[&str]| {
        let mut args = vec!["analyze", "--config", &cfg];
        args.extend_from_slice(extra);
        let o = daest(&args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        stdout(&o).lines().find(|l| l.starts_with("degree ")).unwrap().to_string()
    };
    assert!(interval(&[]).starts_with("degree 16,"));
    assert!(interval(&["--degree", "24"]).starts_with("degree 24,"));

    let dup = path(&dir, "dup.cfg");
    fs::write(&dup, "degree = 8\ndegree = 9\n").unwrap();
    assert_eq!(code(&daest(&["analyze", "--config", &dup])), 1);
    let unknown = path(&dir, "unknown.cfg");
    fs::write(&unknown, format!("map = {}\ndegree = 8\ncolour = red\n", map("ex1.map"))).unwrap();
    assert_eq!(code(&daest(&["analyze", "--config", &unknown])), 1);
}
