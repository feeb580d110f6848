//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mdlconf_core::constraints::{parse_bundle, render_bundle, Constraint, ConstraintSet, Origin};
use mdlconf_core::derivation::canonical_rename;
use mdlconf_core::mdl::{parse_term, BoolExpr, Collection, Element, Kind, Label, Term};
use mdlconf_core::seniority::{join, leq, meet};
use mdlconf_core::solver::{brute_solve, enumerate_terms, parse_solution, solve, verify, Universe};
use mdlconf_core::{Solution, SolverConfig, Verdict};

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fx(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn mdlconf(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mdlconf"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!(
            "mdlconf {} exited with {:?}: {}",
            args.join(" "),
            o.status.code(),
            String::from_utf8_lossy(&o.stderr).trim()
        ));
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn configure(fixture: &str, out: &Path) -> Result<Duration, String> {
    let started = Instant::now();
    mdlconf(&[
        "configure",
        "--topo",
        &fx(&format!("{fixture}/app.topo")),
        "--ifc-dir",
        &fx(&format!("{fixture}/ifcs")),
        "--out",
        out.to_str().unwrap(),
        "--cpp-header",
    ])?;
    Ok(started.elapsed())
}

fn read_solution(dir: &Path) -> Result<Solution, String> {
    let text = fs::read_to_string(dir.join("solution.sol")).map_err(|e| e.to_string())?;
    parse_solution(&text).map_err(|e| e.to_string())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn three_buyer() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let took = configure("three_buyer", dir.path())?;
    let s = read_solution(dir.path())?;
    let b = |v: &str| s.booleans.get(&Label::from_static(v)).copied();
    check(b("x") == Some(true), || format!("x = {:?}", b("x")))?;
    check(b("y") == Some(false), || format!("y = {:?}", b("y")))?;
    check(b("z") == Some(true), || format!("z = {:?}", b("z")))?;
    let want = parse_term("(: share: {title: string, money: int} :)").unwrap();
    let got = s.terms.get(&Label::from_static("b"));
    check(got == Some(&want), || format!("b = {got:?}"))?;
    let cfgs = ["Alice", "Bob", "Carol", "Seller"]
        .iter()
        .filter(|n| dir.path().join(format!("{n}.cfg")).is_file())
        .count();
    check(cfgs == 4, || format!("{cfgs} .cfg files"))?;
    check(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("x=true y=false z=true, b={want}, {took:.1?}"))
}

fn seller_derivation() -> Outcome {
    let derived = parse_bundle(&mdlconf(&["derive", &fx("seller.stub")])?, None).map_err(|e| e.to_string())?;
    let expected_text = fs::read_to_string(fixtures().join("seller_expected.ifc")).map_err(|e| e.to_string())?;
    let expected = parse_bundle(&expected_text, None).map_err(|e| e.to_string())?;
    let (d, e) = (render_bundle(&canonical_rename(&derived)), render_bundle(&canonical_rename(&expected)));
    check(d == e, || format!("derived:\n{d}expected:\n{e}"))?;
    Ok("3 interfaces and 4 constraints match after renaming".into())
}

fn flow_inheritance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    configure("flow", dir.path())?;
    let s = read_solution(dir.path())?;
    let author = parse_term("{author: string}").unwrap();
    for v in ["Seller_in_request", "Seller_out1_response"] {
        let got = s.terms.get(&Label::from_static(v));
        check(got == Some(&author), || format!("{v} = {got:?}"))?;
    }
    let cfg = fs::read_to_string(dir.path().join("Seller.cfg")).map_err(|e| e.to_string())?;
    for line in [
        "TV_Seller_in_request_decl = \", string author\"",
        "TV_Seller_in_request_use = \", author\"",
        "TV_Seller_out1_response_decl = \", string author\"",
        "TV_Seller_out1_response_use = \", author\"",
    ] {
        check(cfg.lines().any(|l| l == line), || format!("missing `{line}` in\n{cfg}"))?;
    }
    Ok("request and response tails = {author: string}; texts `, string author` / `, author`".into())
}

fn shell_renaming() -> Outcome {
    let out = mdlconf(&["derive", &fx("calc/calc.ifc"), "--shell", &fx("calc/calc.shell")])?;
    let outputs: Vec<&str> = out.lines().filter(|l| l.starts_with("out")).collect();
    let want = ["out1 = (: factorial: {c: int} :)", "out2 = (: square: {c: int} :)"];
    check(outputs == want, || format!("got {outputs:?}"))?;
    Ok(want.join("; "))
}

// ---- random generation -------------------------------------------------

const LABELS: [&str; 3] = ["a", "b", "c"];

fn collection(kind: Kind, elems: impl IntoIterator<Item = (&'static str, BoolExpr, Term)>, tail: Option<&str>) -> Term {
    let mut c = Collection::new(kind);
    for (l, guard, term) in elems {
        c.elements.insert(Label::from_static(l), Element { guard, term });
    }
    c.tail = tail.map(Label::from_static);
    Term::Collection(c)
}

fn random_ground(rng: &mut ChaCha8Rng, depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => Term::symbol("int"),
            1 => Term::symbol("string"),
            2 => Term::nil(),
            _ => Term::empty_choice(),
        };
    }
    let kind = if rng.gen_bool(0.5) { Kind::Record } else { Kind::Choice };
    let mut elems = Vec::new();
    for l in LABELS {
        if rng.gen_bool(0.5) {
            elems.push((l, BoolExpr::TRUE, random_ground(rng, depth - 1)));
        }
    }
    collection(kind, elems, None)
}

/// A junior of `t`: records gain fields, choices lose alternatives, nil may
/// become a symbol.
fn weaken(rng: &mut ChaCha8Rng, t: &Term) -> Term {
    let Term::Collection(c) = t else {
        return t.clone();
    };
    if t.is_nil() && rng.gen_bool(0.25) {
        return Term::symbol("int");
    }
    let mut out = Collection::new(c.kind);
    for (l, e) in &c.elements {
        if c.kind == Kind::Choice && rng.gen_bool(0.3) {
            continue;
        }
        out.elements.insert(l.clone(), Element { guard: BoolExpr::TRUE, term: weaken(rng, &e.term) });
    }
    if c.kind == Kind::Record {
        for l in LABELS {
            let l = Label::from_static(l);
            if !out.elements.contains_key(&l) && rng.gen_bool(0.3) {
                out.elements.insert(l, Element { guard: BoolExpr::TRUE, term: Term::symbol("string") });
            }
        }
    }
    Term::Collection(out)
}

fn seniority_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 1000;
    let mut violations = Vec::new();
    for _ in 0..n {
        let t = random_ground(&mut rng, 3);
        let t1 = weaken(&mut rng, &t);
        let t2 = weaken(&mut rng, &t1);
        let below_nil = t.kind() != Some(Kind::Choice);
        let checks = [
            ("reflexivity", leq(&t, &t)),
            ("nil", leq(&t, &Term::nil()) == below_nil),
            ("width/depth", leq(&t1, &t) && leq(&t2, &t1)),
            ("transitivity", leq(&t2, &t)),
        ];
        for (law, ok) in checks {
            if !ok {
                violations.push(format!("{law}: {t} / {t1} / {t2}"));
            }
        }
    }
    check(violations.is_empty(), || format!("{} violations, first {}", violations.len(), violations[0]))?;
    Ok(format!("{n} random terms, 0 violations"))
}

const BOOLS: [&str; 6] = ["p", "q", "r", "s", "u", "w"];

/// Labels {a, b}; `$v` only as a side or a tail, `$e` only as an element.
fn random_instance(seed: u64) -> ConstraintSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bools = BOOLS.to_vec();
    bools.shuffle(&mut rng);
    bools.truncate(rng.gen_range(0..=6));
    let (side_var, elem_var) = (rng.gen_bool(0.6), rng.gen_bool(0.4));
    let guard = |rng: &mut ChaCha8Rng| -> BoolExpr {
        if bools.is_empty() || rng.gen_bool(0.35) {
            return BoolExpr::TRUE;
        }
        let mut var = || BoolExpr::var(bools.choose(rng).unwrap());
        let a = var();
        match rng.gen_range(0..4) {
            0 | 1 => a,
            2 => BoolExpr::not(a),
            _ => {
                let b = BoolExpr::var(bools.choose(rng).unwrap());
                if rng.gen_bool(0.5) { BoolExpr::and(a, b) } else { BoolExpr::or(a, b) }
            }
        }
    };
    let side = |rng: &mut ChaCha8Rng, kind: Kind| -> Term {
        if side_var && rng.gen_bool(0.2) {
            return Term::var("v");
        }
        let mut elems = Vec::new();
        for l in ["a", "b"] {
            if rng.gen_bool(0.6) {
                let g = guard(rng);
                let t = match rng.gen_range(0..if elem_var { 5 } else { 4 }) {
                    0 => Term::symbol("int"),
                    1 => Term::symbol("string"),
                    2 => Term::nil(),
                    3 => Term::empty_choice(),
                    _ => Term::var("e"),
                };
                elems.push((l, g, t));
            }
        }
        let tail = (side_var && rng.gen_bool(0.3)).then_some("v");
        collection(kind, elems, tail)
    };
    let n = rng.gen_range(1..=3);
    let cs = (0..n)
        .map(|i| {
            let kind = if rng.gen_bool(0.5) { Kind::Record } else { Kind::Choice };
            let other = match (rng.gen_bool(0.85), kind) {
                (true, k) => k,
                (false, Kind::Record) => Kind::Choice,
                (false, Kind::Choice) => Kind::Record,
            };
            Constraint {
                junior: side(&mut rng, kind),
                senior: side(&mut rng, other),
                origin: Origin::Other(format!("c{i}")),
            }
        })
        .collect();
    ConstraintSet::new(cs)
}

fn universe(labels: &[&'static str]) -> Universe {
    Universe {
        labels: labels.iter().map(|l| Label::from_static(l)).collect(),
        symbols: vec![Label::from_static("int"), Label::from_static("string")],
        max_depth: 2,
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let n = 600;
    let u = universe(&["a", "b"]);
    let config = SolverConfig::default();
    let (mut sat, mut disagreements) = (0, Vec::new());
    for seed in 0..n {
        let cs = random_instance(seed);
        let brute = brute_solve(&cs, &u).map_err(|e| e.to_string())?;
        match (solve(&cs, &config), brute) {
            (Verdict::Sat(s), Verdict::Sat(_)) => {
                sat += 1;
                if !verify(&cs, &s).map_err(|e| e.to_string())?.is_ok() {
                    disagreements.push(format!("seed {seed}: solution fails verify"));
                }
            }
            (Verdict::Unsat(_), Verdict::Unsat(_)) => {}
            (got, want) => disagreements.push(format!("seed {seed}: {got:?} vs {want:?}")),
        }
    }
    let took = started.elapsed();
    check(disagreements.is_empty(), || format!("{} disagreements, first {}", disagreements.len(), disagreements[0]))?;
    check(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{n} instances ({sat} sat), 0 disagreements, {took:.1?}"))
}

fn lattice_oracle() -> Outcome {
    let terms = enumerate_terms(&universe(&LABELS));
    let index: HashMap<String, usize> = terms.iter().enumerate().map(|(i, t)| (t.to_string(), i)).collect();
    let le: Vec<Vec<bool>> = terms.iter().map(|a| terms.iter().map(|b| leq(a, b)).collect()).collect();
    let n = terms.len();
    let mut violations = 0;
    for a in 0..n {
        for b in a..n {
            let lower: Vec<usize> = (0..n).filter(|&x| le[x][a] && le[x][b]).collect();
            let upper: Vec<usize> = (0..n).filter(|&x| le[a][x] && le[b][x]).collect();
            let glb_ok = match meet(&terms[a], &terms[b]) {
                None => lower.is_empty(),
                Some(m) => index
                    .get(&m.to_string())
                    .is_some_and(|&m| lower.contains(&m) && lower.iter().all(|&x| le[x][m])),
            };
            let lub_ok = match join(&terms[a], &terms[b]) {
                None => upper.is_empty(),
                Some(j) => index
                    .get(&j.to_string())
                    .is_some_and(|&j| upper.contains(&j) && upper.iter().all(|&x| le[j][x])),
            };
            violations += usize::from(!glb_ok) + usize::from(!lub_ok);
        }
    }
    check(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{} pairs over {n} terms, 0 violations", n * (n + 1) / 2))
}

fn determinism() -> Outcome {
    let snapshot = |dir: &Path| -> Result<BTreeMap<String, Vec<u8>>, String> {
        let mut files = BTreeMap::new();
        for e in fs::read_dir(dir).map_err(|e| e.to_string())? {
            let p = e.map_err(|e| e.to_string())?.path();
            files.insert(
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).map_err(|e| e.to_string())?,
            );
        }
        Ok(files)
    };
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    configure("three_buyer", d1.path())?;
    configure("three_buyer", d2.path())?;
    let (a, b) = (snapshot(d1.path())?, snapshot(d2.path())?);
    check(a == b, || "outputs differ".into())?;
    Ok(format!("{} files byte-identical", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("three-buyer reproduction", three_buyer),
        ("Seller derivation", seller_derivation),
        ("flow-inheritance emission", flow_inheritance),
        ("shell renaming", shell_renaming),
        ("seniority laws", seniority_laws),
        ("oracle equivalence", oracle_equivalence),
        ("lattice oracle", lattice_oracle),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
