use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn mdlconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdlconf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn f(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn configure_three_buyer_writes_one_cfg_per_service() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cfgs");
    let o = mdlconf(&[
        "configure",
        "--topo",
        &f("three_buyer/app.topo"),
        "--ifc-dir",
        &f("three_buyer/ifcs"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut cfgs: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".cfg"))
        .collect();
    cfgs.sort();
    assert_eq!(cfgs, ["Alice.cfg", "Bob.cfg", "Carol.cfg", "Seller.cfg"]);
    assert_eq!(
        fs::read_to_string(out.join("Alice.cfg")).unwrap(),
        "BV_x = true\nBV_y = false\n"
    );
}

#[test]
fn check_is_reflexive_and_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mdl");
    let b = dir.path().join("b.mdl");
    fs::write(&a, "(: m: {x: int} :)").unwrap();
    fs::write(&b, "(: m: {x: int}, n: {} :)").unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    assert_eq!(code(&mdlconf(&["check", a, a])), 0);
    assert_eq!(code(&mdlconf(&["check", a, b])), 0);
    assert_eq!(code(&mdlconf(&["check", b, a])), 1);
}

#[test]
fn check_rejects_non_ground_terms() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mdl");
    fs::write(&a, "{x: $v}").unwrap();
    let a = a.to_str().unwrap();
    let o = mdlconf(&["check", a, a]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not a ground term"));
}

#[test]
fn unsat_names_the_channel() {
    let o = mdlconf(&[
        "solve",
        "--topo",
        &f("unsat/app.topo"),
        "--ifc",
        &f("unsat/A.ifc"),
        &f("unsat/B.ifc"),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("channel 0: A.out1 -> B.in1"), "{}", stderr(&o));
}

#[test]
fn constraints_then_solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cons = dir.path().join("flow.cons");
    let sol = dir.path().join("flow.sol");
    let o = mdlconf(&[
        "constraints",
        "--topo",
        &f("flow/app.topo"),
        "--ifc-dir",
        &f("flow/ifcs"),
        "-o",
        cons.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&cons).unwrap();
    assert_eq!(text.lines().count(), 6, "{text}");
    assert!(!text.contains("Seller.out2"), "unwired port leaked: {text}");

    let o = mdlconf(&["solve", "--constraints", cons.to_str().unwrap(), "-o", sol.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = mdlconf(&["verify", "--constraints", cons.to_str().unwrap(), "--sol", sol.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let flipped = fs::read_to_string(&sol)
        .unwrap()
        .replace("bool Seller_payment = false", "bool Seller_payment = true");
    fs::write(&sol, flipped).unwrap();
    let o = mdlconf(&["verify", "--constraints", cons.to_str().unwrap(), "--sol", sol.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("Seller.out1 -> Consumer.in1"));
}

#[test]
fn derive_from_stub_and_shell() {
    let o = mdlconf(&["derive", &f("seller.stub")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("service Seller\nin1 = "));
    assert_eq!(stdout(&o).matches("constraint ").count(), 4);

    let o = mdlconf(&["derive", &f("calc/calc.ifc"), "--shell", &f("calc/calc.shell")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("out2 = (: square: {c: int} :)\n"));
}

#[test]
fn emit_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("s.sol");
    let o = mdlconf(&["solve", "--topo", &f("flow/app.topo"), "--ifc-dir", &f("flow/ifcs"), "-o", sol.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = dir.path().join("out");
    let o = mdlconf(&[
        "emit",
        "--sol",
        sol.to_str().unwrap(),
        "--ifc",
        &f("flow/ifcs/Seller.stub"),
        "--out",
        out.to_str().unwrap(),
        "--cpp-header",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let h = fs::read_to_string(out.join("Seller.h")).unwrap();
    assert!(h.contains("#define BV_Seller_request\n"));
    assert!(!h.contains("BV_Seller_payment"));
    assert!(h.contains("#define TV_Seller_in_request_decl , string author\n"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mdl");
    fs::write(&bad, "{a: int,").unwrap();
    let o = mdlconf(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error: "));
    assert_eq!(code(&mdlconf(&["parse", "/nonexistent/file.mdl"])), 2);
    assert_eq!(code(&mdlconf(&["solve"])), 2);
    assert_eq!(code(&mdlconf(&["frobnicate"])), 2);
}
