use std::fs;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothness-lab"))
        .args(args)
        .env("SMOOTHNESS_LAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn corpus_list_names_the_builtins() {
    let o = lab(&["corpus", "list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["dirichlet", "even_denominator", "gaussian_bump", "power_singularity", "bspline"] {
        assert!(text.contains(id), "missing {id}");
    }
}

#[test]
fn corpus_checks_lists_registry() {
    let o = lab(&["corpus", "checks"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "moduli.omega_le_tau"));
}

#[test]
fn reproduce_example_one_passes() {
    let o = lab(&["reproduce-example", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("pass"));

    let o = lab(&["reproduce-example", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_single_check_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let json = dir.path().join("summary.json");
    let o = lab(&[
        "verify",
        "bernstein.upper_affine",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("degenerate"));
    let rows = fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("check,report,f,operator,scale,p,r,s,lhs,rhs,ratio,degenerate"));
    assert!(rows.lines().count() > 1);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["degenerate"], 1);
}

#[test]
fn violated_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let constants = dir.path().join("tight.json");
    fs::write(&constants, r#"{"bernstein.k3": 1e-6}"#).unwrap();
    let o = lab(&["verify", "bernstein.sobolev_rate", "--constants", constants.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violated"));
}

#[test]
fn unknown_check_is_an_error() {
    let o = lab(&["verify", "no.such.check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_config_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bernstein.toml");
    let out = dir.path().join("out.csv");
    fs::write(
        &cfg,
        r#"
p = 2.0
domain = { kind = "interval", a = 0.0, b = 1.0 }
[function]
id = "poly"
params = { coeffs = [0.0, 0.0, 1.0] }
[experiment]
kind = "operator_error"
family = { kind = "bernstein" }
scales = [16, 32]
"#,
    )
    .unwrap();
    let o = lab(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn moduli_subcommand_prints_csv() {
    let o = lab(&[
        "moduli",
        "--function",
        "gaussian_bump",
        "--param",
        "width=0.5",
        "--orders",
        "1",
        "--deltas",
        "0.25",
        "--cells",
        "256",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn bad_family_is_an_error() {
    let o = lab(&["operator-error", "--function", "gaussian_bump", "--family", "fourier", "--scales", "8"]);
    assert_eq!(o.status.code(), Some(2));
}
