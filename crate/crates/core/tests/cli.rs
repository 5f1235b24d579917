use std::fs;
use std::path::Path;
use std::process::Command;

use pairspec::cli::{run, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn pairspec(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pairspec").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write_example(dir: &Path, k: u8) -> String {
    let path = dir.join(format!("ex{k}.txt"));
    let p = path.to_str().unwrap().to_string();
    let r = pairspec(&["example", &k.to_string(), "--out", &p]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    p
}

fn count(haystack: &str, needle: &str) -> usize {
    haystack.matches(needle).count()
}

#[test]
fn help_and_version_exit_zero() {
    let r = pairspec(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("collisions"));
    let r = pairspec(&["trace", "--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("branch_id, alpha, beta, dbeta_dalpha, rect_p, rect_q"));
    assert_eq!(pairspec(&["--version"]).code, EXIT_OK);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pairspec(&[]).code, EXIT_USAGE);
    assert_eq!(pairspec(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(pairspec(&["example", "9"]).code, EXIT_USAGE);
    assert_eq!(pairspec(&["example", "2", "--n", "5"]).code, EXIT_USAGE);
    assert_eq!(pairspec(&["spectra", "/nonexistent/problem.txt"]).code, EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), 2);
    let r = pairspec(&["trace", &p, "--alpha-min", "1", "--alpha-max", "-1"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("alpha-min"));
}

#[test]
fn parse_errors_carry_position_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "n 2\nA 1 0 0 1\nB 1 2 3 1\nz 1 0\nkappa 1\n").unwrap();
    let r = pairspec(&["spectra", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("[E07]"), "{}", r.err);
    assert!(r.err.contains("line 3"), "{}", r.err);
}

#[test]
fn numerical_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // κ = 0 parses but the pair spectrum degenerates
    let path = dir.path().join("zero.txt");
    fs::write(&path, "n 1\nA 0\nB 0\nz 1\nkappa 0\n").unwrap();
    let r = pairspec(&["trace", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_NUMERICAL, "{}", r.err);
    assert!(r.err.contains("coupling constant is zero"));
}

#[test]
fn example_files_round_trip_through_stdout() {
    let dir = tempfile::tempdir().unwrap();
    for k in 1..=5u8 {
        let p = write_example(dir.path(), k);
        let printed = pairspec(&["example", &k.to_string()]).out;
        assert_eq!(printed, fs::read_to_string(&p).unwrap());
    }
}

#[test]
fn spectra_reports_exceptional_sets() {
    let dir = tempfile::tempdir().unwrap();
    let r = pairspec(&["spectra", &write_example(dir.path(), 3)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("Gamma:       {-1}"), "{}", r.out);
    assert!(r.out.contains("Gamma:       {3}"), "{}", r.out);
    let r = pairspec(&["spectra", &write_example(dir.path(), 5)]);
    assert!(r.out.contains("Delta:       {2}"), "{}", r.out);
    let r = pairspec(&["mesh", &write_example(dir.path(), 2)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("-0.6"), "{}", r.out);
}

#[test]
fn trace_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), 2);
    let mut csvs = Vec::new();
    let mut svgs = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("t{i}.csv"));
        let svg = dir.path().join(format!("t{i}.svg"));
        let r = pairspec(&[
            "trace",
            &p,
            "--samples",
            "300",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        csvs.push(fs::read(csv).unwrap());
        svgs.push(fs::read_to_string(svg).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(svgs[0], svgs[1]);
    let csv = String::from_utf8(csvs.swap_remove(0)).unwrap();
    assert!(csv.starts_with("branch_id,alpha,beta,dbeta_dalpha,rect_p,rect_q\n"));
    assert!(!csv.contains('\r'));
    let svg = &svgs[0];
    assert_eq!(count(svg, r#"class="mesh-x""#), 3);
    assert_eq!(count(svg, r#"class="mesh-y""#), 3);
    assert_eq!(count(svg, r#"class="gamma-a""#), 0);
    assert_eq!(count(svg, r#"class="corner""#), 4);
    assert!(count(svg, r#"<g class="branch""#) > 0);
}

#[test]
fn svg_counts_straight_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), 4);
    let svg = dir.path().join("ex4.svg");
    let csv = dir.path().join("ex4.csv");
    let r = pairspec(&["trace", &p, "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let svg = fs::read_to_string(svg).unwrap();
    assert_eq!(count(&svg, r#"class="gamma-a""#), 2);
    assert_eq!(count(&svg, r#"class="gamma-b""#), 2);
}

#[test]
fn nsa_and_collision_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), 1);
    let r = pairspec(&["nsa", &p, "--gamma", "-0.5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], "re,im,from_line");
    assert_eq!(lines.len(), 1 + 8);
    let r = pairspec(&["collisions", &p, "--gamma-min", "3", "--gamma-max", "0"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rows: Vec<&str> = r.out.lines().skip(1).collect();
    assert!(!rows.is_empty());
    for row in rows {
        let slope: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((slope + 1.0).abs() < 1e-4, "{row}");
    }
}

#[test]
fn verify_passes_on_examples() {
    let dir = tempfile::tempdir().unwrap();
    for k in [2u8, 4] {
        let r = pairspec(&["verify", &write_example(dir.path(), k)]);
        assert_eq!(r.code, EXIT_OK, "{}", r.out);
        assert!(!r.out.contains("FAIL"));
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pairspec");
    let status = Command::new(bin).arg("example").arg("2").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&status.stdout).contains("kappa"));
    let status = Command::new(bin).arg("bogus").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
}
