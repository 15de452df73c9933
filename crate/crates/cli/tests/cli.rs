use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plancherel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let p = tmp(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
}

#[test]
fn rsk_worked_example() {
    let f = write("example.txt", "5 2 11 9 8 1 3 10 4 7 6\n");
    let o = run(&["rsk", &f, "--emit-pq"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "shape"), "4,3,2,1,1");
    let h: f64 = field(&s, "H").parse().unwrap();
    assert!((h - 17280f64.ln()).abs() < 1e-12);
    assert_eq!(field(&s, "kappa"), "1 2 1 1 3 1 2 3 4 2 5");
    assert_eq!(field(&s, "P"), "1 3 4 6 | 2 7 10 | 5 8 | 9 | 11");
}

#[test]
fn rsk_identity() {
    let f = write("identity.txt", "1 2 3");
    let s = stdout(&run(&["rsk", &f]));
    assert_eq!(field(&s, "shape"), "3");
    assert_eq!(field(&s, "kappa"), "1 1 1");
    let lp: f64 = field(&s, "LP").parse().unwrap();
    assert!((lp - 6f64.ln()).abs() < 1e-12);
}

#[test]
fn rsk_real_sample_matches_ranks() {
    let f = write(
        "sample.txt",
        "0.473 0.251\n2.917 1.216\n0.822 0.032 0.343\n1.905 0.574 0.634 0.548\n",
    );
    let ranks = write("ranks.txt", "4 2 11 9 8 1 3 10 6 7 5");
    let a = stdout(&run(&["rsk", &f]));
    let b = stdout(&run(&["rsk", &ranks]));
    assert_eq!(field(&a, "shape"), field(&b, "shape"));
    assert_eq!(field(&a, "kappa"), field(&b, "kappa"));
}

#[test]
fn malformed_input_exits_2_with_line() {
    let f = write("bad.txt", "# comment\n0.1 0.2\n0.3 oops\n");
    let o = run(&["rsk", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = run(&["rsk", &tmp("missing.txt").to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_tables() {
    let s = stdout(&run(&["enumerate", "--n", "11"]));
    let rows: Vec<&str> = s.lines().skip(1).collect();
    assert_eq!(rows.len(), 56);
    assert_eq!(rows.iter().filter(|r| r.ends_with(",1")).count(), 27);
    assert_eq!(stdout(&run(&["enumerate", "--n", "1"])).lines().count(), 2);
    let s = stdout(&run(&["enumerate", "--n", "5"]));
    let total: f64 = s
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.rsplitn(6, ',').collect();
            f[4].parse::<f64>().unwrap()
        })
        .sum();
    assert_eq!(s.lines().count(), 8);
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_iid_n2_constant_h() {
    let s = stdout(&run(&["simulate", "--n", "2", "--replicas", "50"]));
    let hs: Vec<&str> = s.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(hs.len(), 50);
    assert!(hs.iter().all(|h| *h == hs[0]));
}

#[test]
fn outputs_independent_of_workers() {
    let grid = write("grid.txt", "iid,30\nar1,30,0.6\nexp_family,6,1.0\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["simulate", "--model", "ar1", "--rho", "0.4", "--n", "200", "--replicas", "300"],
        vec!["simulate", "--model", "exp_family", "--t", "0.5", "--n", "10", "--replicas", "50"],
        vec!["power", &grid, "--replicas", "200", "--calibration-replicas", "300"],
        vec!["power", &grid, "--test", "shape-set", "--replicas", "200"],
        vec!["enumerate", "--n", "20"],
        vec!["decompose", "--n", "5", "--shape", "3,1,1"],
        vec!["figures", "--figure", "h-hist", "--n", "100", "--replicas", "400"],
    ];
    for args in cases {
        let outs: Vec<Vec<u8>> = ["1", "2", "3"]
            .iter()
            .map(|w| {
                let mut a = vec!["--seed", "7", "--workers", w];
                a.extend(&args);
                let o = run(&a);
                assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
                o.stdout
            })
            .collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{args:?} differs across workers");
    }
}

#[test]
fn seed_changes_simulation() {
    let a = run(&["--seed", "1", "simulate", "--n", "50", "--replicas", "20"]).stdout;
    let b = run(&["--seed", "2", "simulate", "--n", "50", "--replicas", "20"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn test_exit_codes() {
    assert_eq!(run(&["test", "--shape", "11"]).status.code(), Some(1));
    assert_eq!(run(&["test", "--shape", "5,3,2,1"]).status.code(), Some(0));
    assert_eq!(run(&["test", "--shape", "5,3,2,1", "--test", "h"]).status.code(), Some(0));
    let f = write("sorted.txt", &(1..=40).map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
    let o = run(&["test", &f, "--test", "h"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("decision=reject"));
    assert_eq!(run(&["test", "--shape", "5,3,2,1", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["test", "--shape", "3,4"]).status.code(), Some(2));
    assert_eq!(run(&["test"]).status.code(), Some(2));
}

#[test]
fn figures() {
    let dir = tmp("fig-y");
    let o = run(&["--out", &dir.to_string_lossy(), "figures", "--figure", "y-process", "--n", "11"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.join("y_process.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.starts_with("y_value,level,n\n"));
    assert!(fs::read_to_string(dir.join("y_process.svg")).unwrap().starts_with("<svg"));

    let s = stdout(&run(&["figures", "--figure", "h-hist", "--n", "30", "--replicas", "1"]));
    assert_eq!(s.lines().count(), 2);

    let s = stdout(&run(&["figures", "--figure", "min-shape", "--n", "8"]));
    assert_eq!(s, "k,lambda_k\n1,4\n2,2\n3,1\n4,1\n");

    assert_eq!(run(&["figures", "--figure", "nope", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn power_grid_errors_report_line() {
    let grid = write("badgrid.txt", "iid,10\nar1,10,abc\n");
    let o = run(&["power", &grid, "--replicas", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn power_checkerboard_with_matrix() {
    let m = write("matrix.txt", "0 1 0\n1 0 1\n0 1 0\n");
    let grid = write("cbgrid.txt", "checkerboard,3\n");
    let o = run(&["power", &grid, "--matrix", &m, "--replicas", "50", "--test", "shape-set"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.lines().nth(1).unwrap().starts_with("checkerboard,,3,50,"));
}

#[test]
fn decompose_row() {
    let s = stdout(&run(&["decompose", "--n", "4", "--shape", "2,1,1", "--reference", "7.5"]));
    let row: Vec<&str> = s.lines().nth(1).unwrap().rsplitn(5, ',').collect();
    let d_u: f64 = row[1].parse().unwrap();
    let d_p: f64 = row[2].parse().unwrap();
    let p_u: f64 = row[3].parse().unwrap();
    assert!((d_u - d_p - p_u).abs() < 1e-12);
    assert_eq!(row[0], "7.5000000000000000e0");
    assert_eq!(run(&["decompose", "--n", "5", "--shape", "2,1,1"]).status.code(), Some(2));
}
