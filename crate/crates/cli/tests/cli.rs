use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pentagram"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// `key: value` lines of a check report.
fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

fn write_polygon(dir: &Path, name: &str, pts: &[(f64, f64)]) -> PathBuf {
    let body: Vec<String> = pts.iter().map(|(x, y)| format!("[{x:?}, {y:?}]")).collect();
    let path = dir.join(name);
    fs::write(&path, format!("{{\"vertices\": [{}]}}\n", body.join(", "))).unwrap();
    path
}

fn regular(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            (t.cos(), t.sin())
        })
        .collect()
}

fn read_vertices(path: &Path) -> Vec<(f64, f64)> {
    // {"vertices": [[x, y], ...]} without pulling in a JSON parser
    let text = fs::read_to_string(path).unwrap();
    let numbers: Vec<f64> = text
        .split(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
        .filter_map(|s| s.parse().ok())
        .collect();
    numbers.chunks(2).map(|c| (c[0], c[1])).collect()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn check_regular_pentagon() {
    let dir = TempDir::new().unwrap();
    let file = write_polygon(dir.path(), "p.json", &regular(5));
    let out = run(&["check", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = stdout(&out);
    assert!(field(&report, "d_relative").parse::<f64>().unwrap() <= 1e-12);
    assert_eq!(field(&report, "affine"), "true");
    assert_eq!(field(&report, "horizon"), "survived");
    assert_eq!(field(&report, "concentric"), "true");
}

#[test]
fn check_random_pentagon() {
    let out = run(&["check", "--random", "5", "--seed", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = stdout(&out);
    assert_eq!(field(&report, "affine"), "false");
    assert_eq!(field(&report, "horizon"), "1");
    assert_eq!(field(&report, "concentric"), "false");
}

#[test]
fn check_rejects_a_quadrilateral() {
    let dir = TempDir::new().unwrap();
    let file = write_polygon(dir.path(), "q.json", &regular(4));
    let out = run(&["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("n must be at least 5"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn malformed_input_exits_1() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"vertices\": [[0, 0], [1]]}").unwrap();
    assert_eq!(
        run(&["check", path.to_str().unwrap()]).status.code(),
        Some(1)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["check", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["check", "--random", "5", "--kmax", "0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn degenerate_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let file = write_polygon(
        dir.path(),
        "flat.json",
        &[(0., 0.), (1., 0.), (2., 0.), (2., 1.), (0., 1.)],
    );
    assert_eq!(
        run(&["check", file.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn orbit_of_the_regular_pentagon_under_s() {
    let dir = TempDir::new().unwrap();
    let file = write_polygon(dir.path(), "p.json", &regular(5));
    let (csv, svg) = (dir.path().join("o.csv"), dir.path().join("o.svg"));
    let out = run(&[
        "orbit",
        file.to_str().unwrap(),
        "--map",
        "S",
        "--kmax",
        "4",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("k,convex,d_norm,diameter"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1] == "true"));

    let svg = fs::read_to_string(&svg).unwrap();
    assert!(svg.contains(r#"width="1280" height="256""#));
    let frames: Vec<&str> = svg.lines().filter(|l| l.contains("<polygon")).collect();
    assert_eq!(frames.len(), 5);
    assert!(frames.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn orbit_of_a_random_pentagon_loses_convexity() {
    let out = run(&["orbit", "--random", "5", "--seed", "7", "--map", "S"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.first().unwrap()[1], "true");
    assert_eq!(rows.last().unwrap()[1], "false");
}

#[test]
fn d_orbit_diameters_decrease() {
    for seed in ["1", "2", "3"] {
        let out = run(&[
            "orbit", "--random", "7", "--seed", seed, "--map", "D", "--kmax", "10",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let rows = csv_rows(&stdout(&out));
        assert_eq!(rows.len(), 11);
        let diameters: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(diameters.windows(2).all(|w| w[1] < w[0]), "{diameters:?}");
    }
}

#[test]
fn solve_keeps_the_regular_pentagon() {
    let dir = TempDir::new().unwrap();
    let pts = regular(5);
    let file = write_polygon(dir.path(), "p.json", &pts);
    let result = dir.path().join("r.json");
    let out = run(&[
        "solve",
        file.to_str().unwrap(),
        "--out",
        result.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = read_vertices(&result);
    assert_eq!(got.len(), 5);
    for (a, b) in got.iter().zip(&pts) {
        assert!((a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12);
    }
}

#[test]
fn solved_polygon_passes_check() {
    let dir = TempDir::new().unwrap();
    let result = dir.path().join("r.json");
    let out = run(&[
        "solve",
        "--random",
        "5",
        "--seed",
        "7",
        "--out",
        result.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let check = run(&["check", result.to_str().unwrap()]);
    assert!(check.status.success(), "{}", stderr(&check));
    let report = stdout(&check);
    assert_eq!(field(&report, "affine"), "true");
    assert_eq!(field(&report, "concentric"), "true");
}

#[test]
fn solve_refuses_a_flat_pentagon() {
    let dir = TempDir::new().unwrap();
    let file = write_polygon(
        dir.path(),
        "flat.json",
        &[(0., 0.), (1., 0.), (2., 1e-13), (2., 1.), (0., 1.)],
    );
    let result = dir.path().join("r.json");
    let out = run(&[
        "solve",
        file.to_str().unwrap(),
        "--out",
        result.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error: "));
    assert!(!result.exists());
}

#[test]
fn experiment_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = run(&[
            "experiment",
            "--trials",
            "1",
            "--seed",
            "5",
            "--kmax",
            "20",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert!(String::from_utf8(text)
        .unwrap()
        .starts_with("trial,arm,seed,d_norm,horizon,status\n"));
}

#[test]
fn experiment_random_arm_loses_convexity() {
    let out = run(&[
        "experiment",
        "--trials",
        "1000",
        "--seed",
        "42",
        "--kmax",
        "50",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    let random: Vec<&Vec<String>> = rows
        .iter()
        .filter(|r| r[0] != "median" && r[1] == "random")
        .collect();
    assert_eq!(random.len(), 1000);
    let finite = random
        .iter()
        .filter(|r| r[5] == "ok" && r[4].parse::<usize>().is_ok_and(|h| h <= 50))
        .count();
    assert!(
        finite * 100 >= 95 * random.len(),
        "{finite} finite horizons"
    );

    let reprojected: Vec<&Vec<String>> = rows
        .iter()
        .filter(|r| r[1] == "variety_reprojected" && r[5] == "ok")
        .collect();
    assert!(!reprojected.is_empty());
    assert!(reprojected.iter().all(|r| r[4] == "survived"));
    let summary: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "median").collect();
    assert_eq!(summary.len(), 3);
}

#[test]
fn outputs_replace_files_whole() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("o.csv");
    fs::write(
        &path,
        "stale contents that are longer than the new ones ".repeat(1000),
    )
    .unwrap();
    let out = run(&[
        "orbit",
        "--random",
        "5",
        "--seed",
        "1",
        "--kmax",
        "2",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("k,convex,d_norm,diameter\n"));
    assert!(!text.contains("stale"));
    // no temporary files left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}
