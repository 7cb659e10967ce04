use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use implicit_res::fixtures::{flip_machine, omega1, omega2};
use implicit_res::formulas::serialize_dimacs;
use implicit_res::implicit::{implicit_from_cnf, write_manifest};
use implicit_res::tableau::serialize_tm;

fn implres(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_implres")).args(args).output().expect("binary runs")
}

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/omega1")
}

fn copy_golden(to: &Path) -> PathBuf {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(golden()).unwrap() {
        let e = entry.unwrap();
        fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
    to.join("manifest.txt")
}

fn p(s: &str) -> &Path {
    Path::new(s)
}

#[test]
fn golden_manifest_verifies() {
    let out = implres(&[p("verify"), &golden().join("manifest.txt")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("accept"));
}

#[test]
fn golden_manifest_is_regenerated_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let ir = implicit_from_cnf(&omega1()).unwrap().unwrap();
    write_manifest(tmp.path(), &ir).unwrap();
    for name in ["manifest.txt", "omega.cnf", "beta.circ", "alpha.rproof"] {
        assert_eq!(fs::read(tmp.path().join(name)).unwrap(), fs::read(golden().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn mutated_beta_is_rejected_at_stage_iv() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = copy_golden(tmp.path());
    let beta = tmp.path().join("beta.circ");
    let text = fs::read_to_string(&beta).unwrap().replace("gate 3 1 -2 0", "gate 3 1 2 0");
    fs::write(&beta, text).unwrap();
    let out = implres(&[p("verify"), &manifest]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage (iv)"));
}

#[test]
fn malformed_inputs_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = copy_golden(tmp.path());
    fs::write(tmp.path().join("alpha.rproof"), "res-proof 30\nq 1\n").unwrap();
    assert_eq!(implres(&[p("verify"), &manifest]).status.code(), Some(2));
    assert_eq!(implres(&[p("verify"), &tmp.path().join("absent.txt")]).status.code(), Some(2));
    assert_eq!(implres(&[p("no-such-command")]).status.code(), Some(2));
}

#[test]
fn gen_c_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = implres(&[p("gen-c"), &golden().join("omega.cnf"), &golden().join("beta.circ"), p("-o"), dir]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["c.cnf", "c.layout"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }
    assert!(fs::read_to_string(a.join("c.layout")).unwrap().contains("neg-delta-clause"));
}

#[test]
fn satisfiable_input_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cnf = tmp.path().join("sat.cnf");
    fs::write(&cnf, "p cnf 2 1\n1 -2 0\n").unwrap();
    let out = implres(&[p("prove"), &cnf, p("-o"), &tmp.path().join("out")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("satisfiable"));
}

#[test]
fn er_translation_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let cnf = tmp.path().join("omega2.cnf");
    fs::write(&cnf, serialize_dimacs(&omega2())).unwrap();
    let prove = tmp.path().join("prove");
    assert_eq!(implres(&[p("prove"), &cnf, p("-o"), &prove]).status.code(), Some(0));
    let er = tmp.path().join("er");
    assert_eq!(implres(&[p("translate-er"), &cnf, &prove.join("proof.erproof"), p("-o"), &er]).status.code(), Some(0));
    assert_eq!(implres(&[p("verify"), &er.join("manifest.txt")]).status.code(), Some(0));
}

#[test]
fn search_translation_writes_a_checked_proof() {
    let tmp = tempfile::tempdir().unwrap();
    let out = implres(&[p("translate-search"), p("--not"), p("2"), p("-o"), tmp.path()]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["s.circ", "c.circ", "correct.cnf", "rho.rproof"] {
        assert!(tmp.path().join(name).exists(), "{name}");
    }
}

#[test]
fn tableau_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let tm = tmp.path().join("flip.tm");
    fs::write(&tm, serialize_tm(&flip_machine())).unwrap();
    let dir = tmp.path().join("gen");
    let out = implres(&[p("tableau-gen"), &tm, p("--m"), p("1"), p("--input"), p("1"), p("-o"), &dir]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let files = [dir.join("tau.txt"), dir.join("beta.circ"), dir.join("alpha.rproof")];
    let ok = implres(&[p("tableau-verify"), &tm, &files[0], &files[1], &files[2]]);
    assert_eq!(ok.status.code(), Some(0));
    let wrong = tmp.path().join("wrong.tau");
    fs::write(&wrong, "1 1\n").unwrap();
    assert_eq!(implres(&[p("tableau-verify"), &tm, &wrong, &files[1], &files[2]]).status.code(), Some(1));
}

#[test]
fn bench_csv_is_deterministic() {
    let a = implres(&[p("bench"), p("--csv")]);
    let b = implres(&[p("bench"), p("--csv")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("table,name,input,output,ratio,accepted\n"));
}
