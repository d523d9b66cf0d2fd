use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn pdgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdgen"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lix_prints_the_residual_program() {
    let o = pdgen(&[
        "lix",
        fixture("parser.ann").to_str().unwrap(),
        "nont(c,T,R)",
    ]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(fixture("parser.golden")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn cogen_output_runs_as_a_genex() {
    let dir = std::env::temp_dir().join(format!("pdgen-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let gx = dir.join("vanilla.gx");
    let o = pdgen(&[
        "cogen",
        fixture("vanilla.ann").to_str().unwrap(),
        "-o",
        gx.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = pdgen(&["genex", gx.to_str().unwrap(), "demo(dapp(X,Y,Z,R))"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let golden = std::fs::read_to_string(fixture("vanilla.golden")).unwrap();
    assert_eq!(stdout(&o), golden);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bta_annotates_the_vanilla_interpreter() {
    let o = pdgen(&[
        "bta",
        fixture("vanilla_solve.pl").to_str().unwrap(),
        "solve([mem(X,Xs)])",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("memo(solve_atom(A))"), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 round(s)"));
}

#[test]
fn run_accepts_annotated_programs() {
    let o = pdgen(&["run", fixture("hide_nf.ann").to_str().unwrap(), "p(X)"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("% 2 answer(s)"), "{}", stdout(&o));
}

#[test]
fn errors_exit_nonzero() {
    let o = pdgen(&["lix", fixture("parser.ann").to_str().unwrap(), "nont(c,"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = pdgen(&[
        "bta",
        fixture("vanilla_solve.pl").to_str().unwrap(),
        "solve(X)",
        "--norm",
        "depth",
    ]);
    assert!(!o.status.success());
}

#[test]
fn check_reports_clause_counts() {
    let o = pdgen(&["check", fixture("kmp.ann").to_str().unwrap(), "--strict"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3 clauses, 0 errors"), "{}", stdout(&o));
}
