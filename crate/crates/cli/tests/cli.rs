use std::process::{Command, Output};

fn bsfh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsfh")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("bsfh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn blocks_of_z1() {
    let o = bsfh(&["blocks", "Z1.arcd"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
    assert_eq!(rows, ["I\tJ\tdim", "{}\t{}\t1", "{1}\t{1}\t2"]);
}

#[test]
fn header_names_tool_and_seed() {
    let out = stdout(&bsfh(&["--seed", "7", "blocks", "z2"]));
    assert!(out.starts_with("# tool\tbsfh "));
    assert!(out.contains("# seed\t7\n"));
    assert!(stdout(&bsfh(&["blocks", "z2"])).contains("# seed\t0\n"));
}

#[test]
fn validation_errors_exit_one() {
    let bad = write("bad.arcd", "type: alpha\narc: a b c\nmatch 1: a b c\n");
    let o = bsfh(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let good = write("z2.arcd", "type: alpha\narc: a1 a2 a3 a4\nmatch 1: a1 a3\nmatch 2: a2 a4\n");
    assert!(bsfh(&["validate", &good]).status.success());
    assert_eq!(bsfh(&["validate", "no-such-file"]).status.code(), Some(1));
}

#[test]
fn malformed_flags_exit_one() {
    assert_eq!(bsfh(&["--parallel", "maybe", "blocks", "z1"]).status.code(), Some(1));
    assert_eq!(bsfh(&["--max-homotopy-len", "x", "blocks", "z1"]).status.code(), Some(1));
    assert_eq!(bsfh(&["join", "z1", "nonsense", "alg", "alg"]).status.code(), Some(1));
    assert_eq!(bsfh(&["check", "z1", "nonsense"]).status.code(), Some(1));
}

#[test]
fn check_reports_each_suite() {
    let o = bsfh(&["check", "z1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    for s in bsfh::checks::SUITES {
        assert!(out.lines().any(|l| l.starts_with(&format!("PASS\t{s}\t"))), "{s}");
    }
    assert!(!out.contains("FAIL"));
}

#[test]
fn parallel_output_matches_serial() {
    let a = bsfh(&["check", "z1", "all"]);
    let b = bsfh(&["--parallel", "on", "check", "z1", "all"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn nice_and_double() {
    let o = bsfh(&["nice", "z2", "slice"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# isomorphic to"));
    assert!(bsfh(&["nice", "z2", "cap:{1}"]).status.success());
    assert_eq!(bsfh(&["nice", "z2", "disc"]).status.code(), Some(1));
    let d = stdout(&bsfh(&["double", "z2", "alg:{1}"]));
    assert!(d.contains("# generators\t18\n"));
    assert!(d.contains("# diagonal is a cycle\ttrue"));
}

#[test]
fn join_is_repeatable() {
    let args = ["join", "z2", "alg:{1}:right*id:DD", "alg:{1}", "id:DD*alg:{1}"];
    let a = bsfh(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout(&a).contains("# basis\tdomain\t32\n"));
    assert_eq!(a.stdout, bsfh(&args).stdout);
}
