use std::process::{Command, Output};

use qap_core::builders::{build_restoring_division, build_ss_divider};
use qap_core::netlist::parse_netlist;
use qap_core::{ProblemSpec, Variant};

fn qap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qap"))
        .args(args)
        .env_remove("QAP_JOBS")
        .output()
        .expect("spawn qap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn factor_ninety_one() {
    let o = qap(&["factor", "91"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "7 x 13\n");
    for v in ["restoring", "restoring-irrev", "ss"] {
        let o = qap(&["factor", "91", "--variant", v]);
        assert_eq!(stdout(&o), "7 x 13\n", "{v}");
    }
}

#[test]
fn factor_prime_exits_one() {
    let o = qap(&["factor", "13"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "no divisors ≤ 3");
}

#[test]
fn factor_trace_ss() {
    let o = qap(&["factor", "15", "--variant", "ss", "--trace"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("3 x 5\n"), "{out}");
    // 15 = 5 * 3: five borrowing-free subtractions, then the one that goes negative
    assert_eq!(out.matches("subtraction ").count(), 6, "{out}");
    assert!(out.contains("subtraction 6: 0000 + 1101 = (0)1101"), "{out}");
    assert!(out.contains("flag 1"), "{out}");
}

#[test]
fn factor_trace_restoring() {
    let o = qap(&["factor", "15", "--variant", "restoring", "--trace"]);
    let out = stdout(&o);
    assert!(out.contains("step 2: 001 + 101 = (0)110  restore: 110 + 011 = (1)001"), "{out}");
    assert!(out.contains("quotient 101  remainder 000  flag 1"), "{out}");
}

#[test]
fn factor_all_and_records() {
    let o = qap(&["factor", "36", "--all", "--format", "records"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let divisors: Vec<u64> = out
        .lines()
        .filter(|l| l.starts_with("record=divisor"))
        .map(|l| {
            let field = l.split(' ').find(|f| f.starts_with("divisor=")).unwrap();
            field["divisor=".len()..].parse().unwrap()
        })
        .collect();
    // a 6-bit dividend gets a 3-bit divisor register
    assert_eq!(divisors, [2, 3, 4, 6]);
    assert!(out.lines().last().unwrap().starts_with("record=summary dividend=36"));
}

#[test]
fn records_stable_across_jobs() {
    let base = stdout(&qap(&["factor", "65535", "--format", "records"]));
    for jobs in ["1", "4", "8"] {
        let o = qap(&["factor", "65535", "--format", "records", "--jobs", jobs]);
        assert_eq!(stdout(&o), base, "--jobs {jobs}");
        let o = Command::new(env!("CARGO_BIN_EXE_qap"))
            .args(["factor", "65535", "--format", "records"])
            .env("QAP_JOBS", jobs)
            .output()
            .unwrap();
        assert_eq!(stdout(&o), base, "QAP_JOBS={jobs}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["factor", "abc"][..],
        &["factor", "1"],
        &["factor", "-5"],
        &["factor", "91", "--variant", "bogus"],
        &["factor", "91", "--all", "--sqrt-only"],
        &["factor", "91", "--jobs", "0"],
        &["factor", "1099511627776"],
        &["report", "5"],
        &["report", "66"],
        &["export", "5", "-o", "x.qapnet"],
        &["verify", "--max-n", "7"],
        &[],
    ] {
        assert_eq!(code(&qap(args)), 2, "{args:?}");
    }
}

#[test]
fn report_values() {
    let out = stdout(&qap(&["report", "4", "--variant", "restoring-irrev"]));
    assert!(out.lines().any(|l| l.split_whitespace().eq(["bits_paper", "16"])), "{out}");
    let out = stdout(&qap(&["report", "32", "--variant", "restoring"]));
    assert!(out.lines().any(|l| l.split_whitespace().eq(["ops_paper", "12202"])), "{out}");
    assert!(out.contains("11n^2=11264"), "{out}");
    let out = stdout(&qap(&["report", "8", "--variant", "ss", "--format", "records"]));
    assert!(out.contains(" bits_paper=25 "), "{out}");
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.qapnet");
    let o = qap(&["export", "4", "--variant", "restoring", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let parsed = parse_netlist(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let built = build_restoring_division(&ProblemSpec::new(4, Variant::RestoringReversible).unwrap()).unwrap();
    assert_eq!(parsed, built);
}

#[test]
fn export_ss_writes_three_fragments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ss.qapnet");
    assert_eq!(code(&qap(&["export", "6", "--variant", "ss", "-o", path.to_str().unwrap()])), 0);
    let ss = build_ss_divider(&ProblemSpec::new(6, Variant::SuccessiveSubtraction).unwrap()).unwrap();
    for (part, d) in [("setup", &ss.setup), ("subtract", &ss.subtract), ("match", &ss.match_test)] {
        let text = std::fs::read_to_string(dir.path().join(format!("ss.{part}.qapnet"))).unwrap();
        assert_eq!(&parse_netlist(&text).unwrap(), d, "{part}");
    }
}

#[test]
fn export_unwritable_path_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("d.qapnet");
    assert_eq!(code(&qap(&["export", "4", "-o", path.to_str().unwrap()])), 2);
}

#[test]
fn verify_passes() {
    let o = qap(&["verify", "--max-n", "12"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("pass")), "{out}");
    assert!(out.contains("oracle sweep n=12 restoring: 253952 passed, 0 failed"), "{out}");
}
