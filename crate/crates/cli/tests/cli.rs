use std::path::PathBuf;
use std::process::{Command, Output};

use gamealg::games::NonlocalGame;
use gamealg::io;
use gamealg::linalg::{pauli, CMatrix, StateVector};
use gamealg::strategies::QuantumModel;
use serde_json::Value;

fn gamealg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamealg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gamealg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn analyze_builtin_chsh() {
    let o = gamealg(&["analyze", "--game", "chsh"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let expected = (2.0 + 2f64.sqrt()) / 4.0;
    assert!((r["value"].as_f64().unwrap() - expected).abs() < 1e-8);
    assert!((r["polynomialValue"].as_f64().unwrap() - expected).abs() < 1e-8);
    assert_eq!(r["flags"]["projective"], true);
    assert_eq!(r["selfTest"]["gap"]["topMultiplicity"], 1);
    assert!((r["selfTest"]["gap"]["gap"].as_f64().unwrap() - 2f64.sqrt() / 4.0).abs() < 1e-9);
    assert!((r["selfTest"]["gapQuarterWeight"]["gap"].as_f64().unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-9);
    assert!(r["config"]["tolerances"]["tol"].is_number());
}

#[test]
fn analyze_other_builtins() {
    let r = json(&gamealg(&["analyze", "--game", "k3-coloring"]));
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let r = json(&gamealg(&["analyze", "--game", "chsh-parallel-2"]));
    let t = (2.0 + 2f64.sqrt()) / 4.0;
    assert!((r["value"].as_f64().unwrap() - t * t).abs() < 1e-9);
    assert!(r["selfTest"]["pair"].is_null());
}

#[test]
fn analyze_strategy_file() {
    let g = NonlocalGame::chsh();
    let s = 0.5f64.sqrt();
    let (x, z) = (pauli::x(), pauli::z());
    let b1 = &z.scale_real(0.1f64.cos()) + &x.scale_real(0.1f64.sin());
    let m = QuantumModel::from_binary_observables(
        &[(&x + &z).scale_real(s), (&x - &z).scale_real(s)],
        &[x, b1],
        StateVector::max_entangled(2),
    )
    .unwrap();
    let path = temp_file("rotated.json", &io::strategy_to_json(&m, Some(&g)).unwrap());
    let o = gamealg(&["analyze", "--game", "chsh", "--strategy", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let eps = r["selfTest"]["epsilon"].as_f64().unwrap();
    assert!(eps > 0.0);
    let d = &r["selfTest"]["dilation"];
    assert!(d["achieved"].as_f64().unwrap() <= d["bound"].as_f64().unwrap() + 1e-8);
}

#[test]
fn malformed_game_names_the_field() {
    let path = temp_file(
        "bad_game.json",
        r#"{"type":"general","X":[0],"Y":[0],"A":[0],"B":[0],"mu":[[1.0]],"V":[[[[1, "one"]]]]}"#,
    );
    let o = gamealg(&["analyze", "--game", path.to_str().unwrap(), "--strategy", "ideal"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`V[0][0][0][1]`"), "{}", stderr(&o));
    let path = temp_file("truncated.json", "{\"type\": \"xor\",\n \"omega\": [[1, ");
    let o = gamealg(&["analyze", "--game", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn non_psd_effect_is_an_input_error() {
    let g = NonlocalGame::chsh();
    let text = io::strategy_to_json(&QuantumModel::chsh_ideal(), Some(&g)).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let bent = CMatrix::diag_real(&[1.25, 0.0]);
    let rest = CMatrix::diag_real(&[-0.25, 1.0]);
    v["alice"]["1"] = serde_json::json!([bent, rest]);
    let path = temp_file("non_psd.json", &v.to_string());
    let o = gamealg(&["analyze", "--strategy", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("alice effect x=1 a=1") && err.contains("min eigenvalue -2.5"),
        "{err}"
    );
}

#[test]
fn input_errors_exit_2() {
    for args in [
        vec!["analyze", "--game", "no-such-game"],
        vec!["analyze", "--format", "csv"],
        vec!["analyze", "--tol", "0"],
        vec!["sweep", "--grid", "0.1:0.2:0"],
        vec!["sweep", "--grid", ""],
        vec!["sweep", "--grid", "0.1:x:3"],
        vec!["sweep", "--grid", "0.1:0.2:3", "--family", "spin"],
        vec!["sweep", "--grid", "0.1:0.2:3", "--game", "k3-coloring"],
        vec!["gh", "--family", "rotation"],
        vec!["seesaw", "--restarts", "0"],
    ] {
        let o = gamealg(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn sweep_rows_and_footer() {
    let o = gamealg(&[
        "sweep",
        "--game",
        "chsh",
        "--family",
        "bob-rotation",
        "--grid",
        "0.01:0.3:30",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,eps,condI,condII,condIII,delta,bound,achieved");
    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 30);
    for r in &rows {
        assert_eq!(r.len(), 8);
        assert!(r[7] <= r[6] + 1e-8);
    }
    let footer = lines.last().unwrap();
    let e: f64 = footer
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("fit_exponent="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.4..=0.6).contains(&e), "{footer}");
}

#[test]
fn sweep_is_byte_identical_for_a_seed() {
    let args = ["sweep", "--family", "depolarize", "--grid", "0:0.2:5", "--seed", "7"];
    let a = gamealg(&args);
    let b = gamealg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let j = gamealg(&["sweep", "--grid", "0:0.2:5", "--seed", "7", "--format", "json"]);
    let r = json(&j);
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_writes_out_file() {
    let dir = std::env::temp_dir().join(format!("gamealg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("sweep.csv");
    let o = gamealg(&["sweep", "--grid", "0.05,0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("param,eps"));
}

#[test]
fn gh_anticommuting_rep_has_zero_lhs() {
    let o = gamealg(&["gh"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    for row in r["points"][0]["report"]["rows"].as_array().unwrap() {
        assert!(row["lhs"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn gh_rotation_reports_cp_failure() {
    let o = gamealg(&["gh", "--family", "rotation", "--grid", "0.1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not completely positive"));
    let r = json(&o);
    let pt = &r["points"][0];
    assert!(pt["report"].is_null());
    for row in pt["linearDeviation"].as_array().unwrap() {
        let dev = row["deviation"].as_f64().unwrap();
        assert!((dev - 0.1f64.sin()).abs() < 1e-12);
        assert!(dev <= row["rhs"].as_f64().unwrap() + 1e-8);
    }
}

#[test]
fn gh_missing_decomposition_is_an_input_error() {
    let rep = r#"{
        "images": {
            "b0": {"rows": 2, "cols": 2, "data": [[0,0],[1,0],[1,0],[0,0]]},
            "b1": {"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[-1,0]]}
        },
        "decompositions": {
            "b0": {"terms": [{"lambda": [-0.5, 0.0], "u": ["b1"], "relation": 0, "v": []}],
                   "relationNorms": {"0": 2.0}}
        }
    }"#;
    let path = temp_file("rep.json", rep);
    let o = gamealg(&["gh", "--rep", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("generator b1"), "{}", stderr(&o));
}

#[test]
fn seesaw_reaches_tsirelson_deterministically() {
    let args = ["seesaw", "--game", "chsh", "--restarts", "5", "--seed", "3"];
    let a = gamealg(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let r = json(&a);
    assert!((r["value"].as_f64().unwrap() - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-6);
    assert_eq!(a.stdout, gamealg(&args).stdout);
    let s = serde_json::to_string(&r["strategy"]).unwrap();
    let m = io::strategy_from_json(&s, Some(&NonlocalGame::chsh()), &Default::default()).unwrap();
    assert_eq!(m.dim_a(), 2);
}
