//! End-to-end tests of the `rankone` binary: exit codes, file round trips,
//! and the generate → verify → recover pipeline.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use rankone::tensor::factor_permutation;
use rankone::ComplexMatrix;
use rankone_cli::bundle::{MapBundle, MatrixFile};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankone"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn help_exits_zero_and_usage_errors_exit_one() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["gen", "--dims", "banana", "--partition", "1|||", "--out", "/tmp/x.json"]).status.code(), Some(1));
}

#[test]
fn gen_verify_recover_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let bundle_path = dir.path().join("bundle.json");

    let out = run(&[
        "gen",
        "--dims",
        "2,2",
        "--partition",
        "1|2||",
        "--seed",
        "7",
        "--out",
        bundle_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = run(&["verify", bundle_path.to_str().unwrap(), "--trials", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("Pass"));

    let out = run(&["verify", bundle_path.to_str().unwrap(), "--trials", "64", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("residual"));

    // strip to a phi-only bundle and recover the structure back
    let bundle = MapBundle::read(&bundle_path).unwrap();
    let phi_only = MapBundle {
        dims: bundle.dims.clone(),
        m: None,
        n: None,
        partition: None,
        phi: bundle.phi.clone(),
    };
    let phi_path = dir.path().join("phi_only.json");
    phi_only.write(&phi_path).unwrap();

    let rec_path = dir.path().join("recovered.json");
    let out = run(&[
        "recover",
        phi_path.to_str().unwrap(),
        "--out",
        rec_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recovered = MapBundle::read(&rec_path).unwrap();
    assert_eq!(
        recovered.partition,
        Some([vec![1], vec![2], vec![], vec![]])
    );
}

#[test]
fn gen_rejects_exceptional_case_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.json");
    for partition in ["||1,2|", "|||1,2"] {
        let out = run(&[
            "gen",
            "--dims",
            "2,2",
            "--partition",
            partition,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(2), "partition {partition}");
    }
    // same classes are fine away from dimension two
    let out = run(&[
        "gen",
        "--dims",
        "3,3",
        "--partition",
        "||1,2|",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_rejects_symmetrizer_with_counterexample() {
    // A ↦ A + Aᵀ on (2,2)
    let swap = factor_permutation(&[4, 4], &[1, 0]).unwrap();
    let phi = ComplexMatrix::identity(16).add(&swap.to_matrix()).unwrap();
    let bundle = MapBundle {
        dims: vec![2, 2],
        m: None,
        n: None,
        partition: None,
        phi: Some(MatrixFile::from_matrix(&phi)),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("symmetrizer.json");
    bundle.write(&path).unwrap();

    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("counterexample"), "{text}");
    // the echoed counterexample parses as a matrix file
    let json_start = text.find('{').unwrap();
    let parsed: MatrixFile = serde_json::from_str(text[json_start..].trim()).unwrap();
    let input = parsed.to_matrix().unwrap();
    let output = {
        let v = rankone::tensor::vec_mat(&input);
        let w = phi.matvec(&v).unwrap();
        rankone::tensor::unvec(&w, 4, 4).unwrap()
    };
    assert_ne!(rankone::tensor::numerical_rank(&output, None).unwrap(), 1);

    // recovery on the same bundle exits 4
    let out = run(&["recover", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn recover_identity_map_reports_p1() {
    let bundle = MapBundle {
        dims: vec![2, 2],
        m: None,
        n: None,
        partition: None,
        phi: Some(MatrixFile::from_matrix(&ComplexMatrix::identity(16))),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity.json");
    bundle.write(&path).unwrap();

    let out = run_in(dir.path(), &["recover", "identity.json"]);
    assert_eq!(out.status.code(), Some(0));
    let recovered: MapBundle = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        recovered.partition,
        Some([vec![1, 2], vec![], vec![], vec![]])
    );
    // factors proportional to the identity
    let m = recovered.m.unwrap().to_matrix().unwrap();
    let lead = m.get(0, 0);
    assert!(lead.norm() > 1e-8);
    let scaled = ComplexMatrix::identity(4).scale(lead);
    assert!(m.max_abs_diff(&scaled) < 1e-8);
}

#[test]
fn kernel_check_fixture_reports_none_found() {
    let fixture = common::fixtures_dir().join("example1_n.json");
    let out = run(&[
        "kernel-check",
        fixture.to_str().unwrap(),
        "--dims",
        "3,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("kernel dimension: 4"), "{text}");
    assert!(text.contains("NoneFound"), "{text}");

    // dims that do not match the column count are a usage error
    let out = run(&["kernel-check", fixture.to_str().unwrap(), "--dims", "2,3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_lists_sixteen_forms() {
    let out = run(&["catalog", "2", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("14 of 16 forms exist"), "{text}");

    let out = run(&["catalog", "3", "3"]);
    assert!(stdout(&out).contains("16 of 16 forms exist"));

    let out = run(&["catalog", "2", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 16);
}

#[test]
fn ces_prints_basis_of_expected_dimension() {
    let out = run(&["ces", "2", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("dim 2"), "{text}");
    assert!(text.contains("NoneFound"), "{text}");

    let out = run(&["ces", "2", "3", "--json"]);
    let parsed: MatrixFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((parsed.rows, parsed.cols), (6, 2));
}

#[test]
fn bundle_write_read_write_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundle.json");
    let out = run(&[
        "gen",
        "--dims",
        "2,2",
        "--partition",
        "1,2|||",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read_to_string(&path).unwrap();
    let reread = MapBundle::read(&path).unwrap();
    assert_eq!(reread.canonical_json(), first);
}
