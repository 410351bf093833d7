use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use staircase::blocks::{consim_descriptor, pair_descriptor, DecompositionDescriptor};
use staircase::io::write_matrix;
use staircase::testgen::{exhaustive_block_suite, ProblemClass};
use staircase::{Complex64, ComplexMatrix};
use staircase_cli::{AnalysisReport, Structure};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_staircase"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn put(dir: &TempDir, name: &str, m: &ComplexMatrix) -> PathBuf {
    let p = dir.path().join(name);
    write_matrix(&p, m).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn example_one() -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(9, 9);
    for (i, j) in [(1, 0), (2, 1), (3, 2), (5, 4), (6, 5), (8, 7)] {
        a[(i, j)] = Complex64::new(1.0, 0.0);
    }
    a
}

fn jordan(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(if i == j + 1 { 1.0 } else { 0.0 }, 0.0))
}

#[test]
fn example_one_text_report() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "a.txt", &example_one());
    let o = run(&["analyze-consim", s(&f), "--format", "text"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("r_seq: 3 3 2 1\n"), "{out}");
    assert!(out.contains("singular part: J_2 + J_3 + J_4\n"), "{out}");
    assert!(out.contains("regular part: 0x0\n"), "{out}");
}

#[test]
fn identity_has_no_singular_part() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "i.txt", &ComplexMatrix::identity(4));
    let o = run(&["analyze-consim", s(&f)]);
    assert!(o.status.success());
    let r: AnalysisReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.indices.r_seq, Some(vec![]));
    let Structure::Consim(st) = r.structure else { panic!("consim report expected") };
    assert!(st.jordan.is_empty());
    assert_eq!(st.regular_dim, 4);
}

#[test]
fn single_ji_block_pair() {
    let dir = TempDir::new().unwrap();
    let a = put(&dir, "a.txt", &ComplexMatrix::zeros(1, 1));
    let b = put(&dir, "b.txt", &ComplexMatrix::identity(1));
    let o = run(&["analyze-pair", s(&a), s(&b)]);
    assert!(o.status.success());
    let r: AnalysisReport = serde_json::from_slice(&o.stdout).unwrap();
    let Structure::Pair(st) = r.structure else { panic!("pair report expected") };
    assert_eq!(st.ji, BTreeMap::from([(1, 1)]));
    assert!(st.fg.is_empty() && st.fgt.is_empty() && st.ij.is_empty());
    assert_eq!(st.regular.shape(), (0, 0));
}

#[test]
fn identity_pair_is_all_regular() {
    let dir = TempDir::new().unwrap();
    let a = put(&dir, "a.txt", &ComplexMatrix::identity(3));
    let o = run(&["analyze-pair", s(&a), s(&a), "--format", "text"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("singular part: none\n"), "{out}");
    assert!(out.contains("regular part: 3x3\n"), "{out}");
}

fn expected_counts(desc: &DecompositionDescriptor) -> BTreeMap<(u8, usize), usize> {
    desc.multiplicities()
}

fn report_counts(st: &Structure) -> BTreeMap<(u8, usize), usize> {
    match st {
        Structure::Consim(c) => consim_descriptor(c, ComplexMatrix::zeros(0, 0)).multiplicities(),
        Structure::Pair(p) => pair_descriptor(p).multiplicities(),
    }
}

#[test]
fn generate_then_analyze_recovers_descriptors() {
    let dir = TempDir::new().unwrap();
    let cases: Vec<DecompositionDescriptor> = exhaustive_block_suite(5, ProblemClass::Consimilarity)
        .into_iter()
        .chain(exhaustive_block_suite(3, ProblemClass::MixedPair))
        .map(|(d, _)| d)
        .collect();
    assert!(cases.len() > 30);
    for (i, desc) in cases.iter().enumerate() {
        let dpath = dir.path().join("desc.json");
        std::fs::write(&dpath, serde_json::to_string(desc).unwrap()).unwrap();
        let seed = i.to_string();
        let scramble = if i % 2 == 0 { "unitary" } else { "general" };
        let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
        let mut args = vec!["generate", s(&dpath), "--seed", &seed, "--scramble", scramble, "--regular-size", "2", "--out", s(&a)];
        if desc.is_pair() {
            args.push(s(&b));
        }
        let g = run(&args);
        assert!(g.status.success(), "generate failed: {}", String::from_utf8_lossy(&g.stderr));
        let o = if desc.is_pair() {
            run(&["analyze-pair", s(&a), s(&b)])
        } else {
            run(&["analyze-consim", s(&a)])
        };
        assert!(o.status.success(), "{desc:?}: {}", String::from_utf8_lossy(&o.stderr));
        let r: AnalysisReport = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report_counts(&r.structure), expected_counts(desc), "{desc:?}");
    }
}

#[test]
fn output_is_deterministic_and_verifies() {
    let dir = TempDir::new().unwrap();
    let dpath = dir.path().join("d.json");
    std::fs::write(
        &dpath,
        r#"{"blocks":[{"kind":"fg","n":2,"multiplicity":1},{"kind":"ij","n":2,"multiplicity":1},{"kind":"ji","n":1,"multiplicity":1}],
            "regular":{"pair":{"first":{"rows":0,"cols":0,"entries":[]},"second":{"rows":0,"cols":0,"entries":[]}}}}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    let gen = ["generate", s(&dpath), "--seed", "11", "--scramble", "general", "--cond", "50", "--regular-size", "1", "--out", s(&a), s(&b)];
    assert!(run(&gen).status.success());
    let first_a = std::fs::read(&a).unwrap();
    assert!(run(&gen).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), first_a);

    let report = dir.path().join("r.json");
    let args = ["analyze-pair", s(&a), s(&b), "--emit-transforms", "--output", s(&report)];
    assert!(run(&args).status.success());
    let bytes = std::fs::read(&report).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read(&report).unwrap(), bytes);

    // The report re-reads to identical values.
    let parsed: AnalysisReport = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(staircase_cli::report_json(&parsed).unwrap().as_bytes(), bytes.as_slice());

    let v = run(&["verify", s(&report), s(&a), s(&b)]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    assert!(stdout(&v).starts_with("ok"));
}

#[test]
fn verify_rejects_wrong_input() {
    let dir = TempDir::new().unwrap();
    let a = put(&dir, "a.txt", &jordan(4));
    let other = put(&dir, "b.txt", &jordan(3));
    let report = dir.path().join("r.json");
    assert!(run(&["analyze-consim", s(&a), "--output", s(&report)]).status.success());
    assert_eq!(run(&["verify", s(&report), s(&a)]).status.code(), Some(0));
    assert_eq!(run(&["verify", s(&report), s(&other)]).status.code(), Some(5));
    assert_eq!(run(&["verify", s(&report), s(&a), s(&a)]).status.code(), Some(5));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "complex-matrix v1 2 2\n1 0 2 0\n").unwrap();
    assert_eq!(run(&["analyze-consim", s(&bad)]).status.code(), Some(2));

    let nonfinite = dir.path().join("nan.txt");
    std::fs::write(&nonfinite, "complex-matrix v1 1 1\nNaN 0\n").unwrap();
    assert_eq!(run(&["analyze-consim", s(&nonfinite)]).status.code(), Some(2));

    let wide = put(&dir, "w.txt", &ComplexMatrix::zeros(2, 3));
    assert_eq!(run(&["analyze-consim", s(&wide)]).status.code(), Some(3));

    let sq = put(&dir, "s.txt", &ComplexMatrix::zeros(2, 2));
    assert_eq!(run(&["analyze-pair", s(&sq), s(&wide)]).status.code(), Some(3));

    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["analyze-consim", s(&missing)]).status.code(), Some(1));
}

#[test]
fn matrix_market_input() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("j.mtx");
    std::fs::write(&f, "%%MatrixMarket matrix coordinate real general\n3 3 2\n2 1 1\n3 2 1\n").unwrap();
    let o = run(&["analyze-consim", s(&f), "--format", "text"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("singular part: J_3\n"));
}
