use std::path::Path;
use std::process::{Command, Output};

use alladi::report::ConvergenceReport;

fn alladi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alladi"))
        .args(args)
        .env_remove("ALLADI_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hardy_example_to_ten_million() {
    let o = alladi(&[
        "sum", "--weight", "mu/phi", "--set", "ap:4,1", "--xmax", "1e7",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,value,target,abs_error");
    assert_eq!(lines.len(), 6);
    let last: Vec<&str> = lines[5].split(',').collect();
    assert_eq!(last[0], "10000000");
    assert_eq!(last[2], "0.5");
    let v: f64 = last[1].parse().unwrap();
    assert!((v - 0.5).abs() < 0.1);
}

#[test]
fn identical_flags_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str, threads: &str| {
        let out = dir.path().join(format!("{tag}.json"));
        let plot = dir.path().join(format!("{tag}.plot.csv"));
        let o = alladi(&[
            "sum",
            "--weight",
            "lambda/n",
            "--set",
            "kronecker:-4",
            "--xmax",
            "2e6",
            "--format",
            "json",
            "--threads",
            threads,
            "--out",
            path(&out),
            "--plot",
            path(&plot),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (std::fs::read(out).unwrap(), std::fs::read(plot).unwrap())
    };
    let a = run("a", "4");
    assert_eq!(a, run("b", "4"));
    assert_eq!(a, run("c", "1"));
    let report: ConvergenceReport = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(report.meta.set, "kronecker:-4");
    assert_eq!(report.rows.len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(alladi(&["--help"]).status.code(), Some(0));
    assert_eq!(alladi(&["sum", "--weight", "mu/n"]).status.code(), Some(1));
    let bad_gcd = alladi(&[
        "sum", "--weight", "mu/n", "--set", "ap:4,2", "--xmax", "1000",
    ]);
    assert_eq!(bad_gcd.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_gcd.stderr).contains("gcd(k,l) != 1"));
    let too_big = alladi(&[
        "sum", "--weight", "mu/n", "--set", "all", "--xmax", "1e7", "--mode", "exact",
    ]);
    assert_eq!(too_big.status.code(), Some(1));
    assert_eq!(
        alladi(&["verify", "--suite", "nosuch"]).status.code(),
        Some(1)
    );
    assert_eq!(
        alladi(&["verify", "--suite", "r4r8"]).status.code(),
        Some(0)
    );
    // the m = 12 series is non-monotone between 10^5 and 10^6
    let fail = alladi(&[
        "sum",
        "--weight",
        "ramanujan/phi:m=12",
        "--set",
        "ap:5,2",
        "--checkpoints",
        "1e4,1e5,1e6",
        "--window",
        "2",
    ]);
    assert_eq!(fail.status.code(), Some(2));
    // a single checkpoint cannot show a trend
    let short = alladi(&[
        "duality", "--set", "ap:4,1", "--xmax", "1000", "--format", "json",
    ]);
    assert_eq!(short.status.code(), Some(0));
    assert!(stdout(&short).contains("INCONCLUSIVE"));
}

#[test]
fn sieve_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_alladi"))
        .args(["sieve", "--limit", "100000"])
        .env("ALLADI_CACHE", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("9592 primes"));
    assert!(dir.path().join("spf-100000.alsv").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_alladi"))
        .args(["eval", "classify", "99990"])
        .env("ALLADI_CACHE", dir.path())
        .output()
        .unwrap();
    assert_eq!(
        stdout(&o).trim(),
        "n=99990 p=2 P=101 mu=0 phi=24000 lambda=1 omega_big=6"
    );
}

#[test]
fn exact_rsum() {
    let o = alladi(&["rsum", "--x", "10", "--y", "1"]);
    assert_eq!(o.status.code(), Some(0));
    // 1 - 1/2 - 1/3 - 1/5 + 1/6 - 1/7 + 1/10
    assert!(stdout(&o).contains("19/210"));
}
