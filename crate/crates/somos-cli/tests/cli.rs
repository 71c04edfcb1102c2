//! End-to-end tests of the binary: flag surface, exit codes, file
//! formats, pipe composability, and byte-for-byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn somos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_somos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("somos-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn gen_gap4_reference_values() {
    let out = somos(&[
        "gen", "--gap", "4", "--coeffs", "1,1", "--init", "1,1,1,1", "--range", "0..8",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.ends_with("8\t59\n"), "got: {text}");
    assert!(text.contains("4\t2\n"));
}

#[test]
fn gen_eds_reference_values() {
    let out = somos(&["gen", "--eds", "--init", "6,36,-1296", "--range", "0..4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("4\t-1296\n"));
}

#[test]
fn gen_degenerate_mu_zero() {
    let out = somos(&[
        "gen", "--gap", "4", "--coeffs", "1,0", "--init", "1,1,1,1", "--range", "0..5",
    ]);
    assert_eq!(code(&out), 0);
    for line in stdout(&out).lines() {
        assert!(line.ends_with("\t1"), "line: {line}");
    }
}

#[test]
fn gen_two_sided_range() {
    let out = somos(&[
        "gen",
        "--gap",
        "5",
        "--coeffs",
        "1,1",
        "--init",
        "1,1,1,1,1",
        "--range",
        "-1..10",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("-1\t2\n"));
    assert!(text.ends_with("10\t83\n"));
}

#[test]
fn gen_zero_division_exit_code() {
    let out = somos(&[
        "gen", "--gap", "4", "--coeffs", "1,1", "--init", "0,1,1,1", "--range", "0..6",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn gen_parse_error_exit_code() {
    let out = somos(&[
        "gen", "--gap", "4", "--coeffs", "1,1", "--init", "1,1,x,1", "--range", "0..6",
    ]);
    assert_eq!(code(&out), 2);
    let out = somos(&[
        "gen", "--gap", "4", "--coeffs", "1,1", "--init", "1,1,1,1", "--range", "6..0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_output_is_deterministic() {
    let args = [
        "gen", "--gap", "4", "--coeffs", "3/2,-5", "--init", "2,1,1,3", "--range", "-6..10",
    ];
    let first = somos(&args);
    let second = somos(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn lift_pipes_from_gen_unmodified() {
    let path = tmp("somos4.tsv");
    let out = somos(&[
        "gen",
        "--gap",
        "4",
        "--coeffs",
        "1,1",
        "--init",
        "1,1,1,1",
        "--range",
        "-12..12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let out = somos(&["lift", "--k", "5,6,8", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("5:-1,5\tverified"), "got: {text}");
    assert!(text.contains("6:1,5\tverified"));
    assert!(text.contains("8:25,-4\tverified"));

    let out = somos(&["lift", "--k", "10", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("10:16,145\tverified"));

    let out = somos(&["fit", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "4:1,1\n");
}

#[test]
fn lift_rejects_constant_input() {
    let path = tmp("ones.tsv");
    let body: String = (0..=12).map(|h| format!("{h}\t1\n")).collect();
    std::fs::write(&path, body).unwrap();
    let out = somos(&["lift", "--k", "5", path.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn json_format_round_trips_through_lift() {
    let path = tmp("somos4.json");
    let out = somos(&[
        "gen",
        "--format",
        "json",
        "--gap",
        "4",
        "--coeffs",
        "1,1",
        "--init",
        "1,1,1,1",
        "--range",
        "-12..12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains(r#""relation":{"gap":4,"lambda":"1","mu":"1"}"#));

    let out = somos(&[
        "lift",
        "--format",
        "json",
        "--k",
        "5",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out).trim(),
        r#"[{"gap":5,"lambda":"-1","mu":"5","verified":true}]"#
    );
}

#[test]
fn curve_constants_and_membership() {
    let out = somos(&[
        "curve",
        "--model",
        "1,7,6,12",
        "--M",
        "-2,-2",
        "--range",
        "0..3",
        "--constants",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("0\t2\n1\t3\n"), "got: {text}");
    assert!(text.contains("# alpha^2=36 beta=36 gamma=30"));
    assert!(text.contains("# identities verified"));

    let off = somos(&[
        "curve", "--model", "1,7,6,12", "--M", "1,1", "--range", "0..3",
    ]);
    assert_eq!(code(&off), 6);
}

#[test]
fn curve_singular_placements() {
    // Literal M = S: values 0, 1 at indices 0, 1.
    let out = somos(&[
        "curve", "--model", "1,7,6,12", "--M", "0,0", "--range", "0..1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0\t0\n1\t1\n");
    // M at infinity: ē_h = -x(hS) with ē_0 infinite.
    let out = somos(&[
        "curve", "--model", "1,7,6,12", "--M", "inf", "--range", "0..2",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0\tinf\n1\t0\n2\t1\n");
}

#[test]
fn verify_ward_flags() {
    let path = tmp("eds.tsv");
    let out = somos(&[
        "gen",
        "--eds",
        "--init",
        "2,3,4",
        "--range",
        "-20..20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let out = somos(&["verify", "--ward-m", "2..6", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let out = somos(&[
        "verify",
        "--ward-full",
        "--samples",
        "200",
        "--seed",
        "7",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.matches("triple ").count(), 200);
    assert!(text.contains("ward symmetric: ok"));

    let out = somos(&["verify", "--division", "15", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_ward_full_is_seed_deterministic() {
    let path = tmp("eds-det.tsv");
    somos(&[
        "gen",
        "--eds",
        "--init",
        "1,-1,-5",
        "--range",
        "-16..16",
        "--out",
        path.to_str().unwrap(),
    ]);
    let args = [
        "verify",
        "--ward-full",
        "--samples",
        "40",
        "--seed",
        "11",
        path.to_str().unwrap(),
    ];
    let first = somos(&args);
    let second = somos(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_relation_success_and_failure() {
    let path = tmp("somos4-rel.tsv");
    somos(&[
        "gen",
        "--gap",
        "4",
        "--coeffs",
        "1,1",
        "--init",
        "1,1,1,1",
        "--range",
        "-10..10",
        "--out",
        path.to_str().unwrap(),
    ]);
    let out = somos(&["verify", "--relation", "6:1,5", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("relation 6:1,5: ok"));

    let out = somos(&["verify", "--relation", "6:1,4", path.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    let text = stdout(&out);
    assert!(text.contains("FAILED"));
    assert!(text.contains("fails at h="));
}

#[test]
fn verify_perturbed_eds_fails_with_indices() {
    let path = tmp("eds-bad.tsv");
    somos(&[
        "gen",
        "--eds",
        "--init",
        "2,3,4",
        "--range",
        "0..15",
        "--out",
        path.to_str().unwrap(),
    ]);
    let mut text = std::fs::read_to_string(&path).unwrap();
    text = text.replace("12\t12", "12\t13");
    std::fs::write(&path, text).unwrap();
    let out = somos(&["verify", "--ward-m", "2..3", path.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(stdout(&out).contains("fails at h="));
}
