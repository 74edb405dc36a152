//! Byte-for-byte golden outputs and rerun determinism.

use std::fs;
use std::path::{Path, PathBuf};

use nabla_kit_cli::run;

fn nk(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut argv = vec!["nabla-kit"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut Vec::new());
    (code, out)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check(name: &str, args: &[&str]) {
    let (code, out) = nk(args);
    assert_eq!(code, 0, "{args:?}");
    let want = fs::read(golden(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert_eq!(String::from_utf8_lossy(&out), String::from_utf8_lossy(&want), "{name}");
}

#[test]
fn grayson_r_1_2() {
    check("grayson_r_1_2.txt", &["grayson", "--m", "1", "--n", "2", "--flavor", "r"]);
}

#[test]
fn grayson_q_1_3() {
    check("grayson_q_1_3.txt", &["grayson", "--m", "1", "--n", "3", "--flavor", "q"]);
}

#[test]
fn q_certificate() {
    check("collapse_q_1_3.cert", &["collapse", "--m", "1", "--n", "3"]);
}

#[test]
fn hat_certificate_of_a_triangle() {
    let k = golden("triangle.cplx");
    check("collapse_triangle_n2.cert", &["collapse", k.to_str().unwrap(), "--n", "2"]);
}

#[test]
fn tower_example() {
    check("hawaiian_3_1.tower", &["tower", "example", "hawaiian", "--size", "3"]);
}

#[test]
fn reruns_write_identical_files() {
    let k = golden("triangle.cplx");
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("res");
        let (code, stdout) = nk(&["resolve", k.to_str().unwrap(), "--n", "2", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        snapshots.push((stdout, files));
    }
    assert_eq!(snapshots[0], snapshots[1]);
    assert_eq!(snapshots[0].1.len(), 6);
}
