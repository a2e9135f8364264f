use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qubit-roof"))
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&Path]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_str(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn channel_info_reports_roof_geometry() {
    let dir = TempDir::new().unwrap();
    let id = file(&dir, "id.json", r#"{"named":{"type":"identity"}}"#);
    let out = run_str(&["channel-info", id.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(f(&v["roof"]["w0"]), 1.0);
    assert_eq!(v["roof"]["flat"], Value::Bool(true));
    assert!(v.get("concurrence").is_none());
    assert_eq!(v["checks"]["completely_positive"], Value::Bool(true));
    assert_eq!(v["tool"]["name"], "qubit-roof");

    let unital = file(
        &dir,
        "unital.json",
        r#"{"lambda":[[0.2,0,0],[0,0.5,0],[0,0,0.8]],"t":[0,0,0]}"#,
    );
    let v = json(&run_str(&["channel-info", unital.to_str().unwrap()]));
    assert!((f(&v["roof"]["w0"]) - 0.64).abs() < 1e-12);
    assert_eq!(v["roof"]["flat"], Value::Bool(true));

    let axial = file(&dir, "axial.json", r#"{"named":{"type":"axial","alpha":0.9,"beta":0.1,"gamma":0.3}}"#);
    let v = json(&run_str(&["channel-info", axial.to_str().unwrap()]));
    assert!((f(&v["roof"]["w0"]) - 0.0650454583026497).abs() < 1e-9);
    assert_eq!(v["roof"]["flat"], Value::Bool(false));
    assert_eq!(v["roof"]["kernel_class"], "space-like");
}

#[test]
fn concurrence_with_decomposition_and_oracle() {
    let dir = TempDir::new().unwrap();
    let pd = file(&dir, "pd.json", r#"{"named":{"type":"phase_damping","beta":0.6}}"#);
    let st = file(&dir, "st.json", r#"{"bloch":[0.6,0,0.2]}"#);
    let v = json(&run(&[Path::new("concurrence"), &pd, &st, Path::new("--decompose")]));
    assert!((f(&v["concurrence"]) - 0.48).abs() < 1e-12);
    let comps = v["decomposition"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    let weights: Vec<f64> = comps.iter().map(|c| f(&c["weight"])).collect();
    assert!((weights[0] - 0.625).abs() < 1e-12 && (weights[1] - 0.375).abs() < 1e-12);

    let ad = file(&dir, "ad.json", r#"{"named":{"type":"amplitude_damping","alpha":0.5}}"#);
    let center = file(&dir, "center.json", r#"{"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#);
    let v = json(&run(&[Path::new("concurrence"), &ad, &center, Path::new("--oracle")]));
    assert!((f(&v["concurrence"]) - 0.5).abs() < 1e-12);
    assert!(f(&v["oracle"]["gap"]).abs() <= 1e-3);
    assert_eq!(v["oracle"]["config"]["grid_resolution"], 256);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = file(&dir, "good.json", r#"{"named":{"type":"identity"}}"#);
    let broken = file(&dir, "broken.json", r#"{"named":"#);
    let not_positive = file(&dir, "np.json", r#"{"lambda":[[0.5,0,0],[0,0.5,0],[0,0,0.5]],"t":[0,0,0.6]}"#);
    let outside = file(&dir, "outside.json", r#"{"bloch":[1,1,0]}"#);
    let rank3 = file(
        &dir,
        "rank3.json",
        r#"{"dims":[2,2],"mixture":[
            {"weight":0.25,"ket":[[1,0],[0,0],[0,0],[0,0]]},
            {"weight":0.25,"ket":[[0,0],[1,0],[0,0],[0,0]]},
            {"weight":0.5,"ket":[[0,0],[0,0],[1,0],[0,0]]}]}"#,
    );
    let code = |args: &[&Path]| run(args).status.code().unwrap();
    assert_eq!(code(&[Path::new("channel-info"), &broken]), 2);
    assert_eq!(code(&[Path::new("channel-info"), &dir.path().join("missing.json")]), 2);
    assert_eq!(code(&[Path::new("channel-info"), &not_positive]), 3);
    assert_eq!(code(&[Path::new("concurrence"), &good, &outside]), 4);
    assert_eq!(code(&[Path::new("reduce"), &rank3]), 5);
    assert_eq!(run_str(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run_str(&["--tol-psd", "-1", "channel-info", good.to_str().unwrap()]).status.code(), Some(2));
    let help = run_str(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("--tol-psd") && text.contains("--seed") && text.contains("Exit codes"));
}

#[test]
fn reduce_reports_blocks_and_bound() {
    let dir = TempDir::new().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let state = file(
        &dir,
        "mix.json",
        &format!(
            r#"{{"dims":[2,2],"mixture":[
                {{"weight":0.5,"ket":[[{s},0],[0,0],[0,0],[{s},0]]}},
                {{"weight":0.5,"ket":[[1,0],[0,0],[0,0],[0,0]]}}]}}"#
        ),
    );
    let v = json(&run(&[Path::new("reduce"), &state, Path::new("--then-concurrence")]));
    let red = &v["reduction"];
    assert_eq!(red["rank"], 2);
    assert_eq!(red["completely_positive"], Value::Bool(true));
    for i in 0..2 {
        let b = &red["blocks"][i][i];
        assert!((f(&b[0][0][0]) + f(&b[1][1][0]) - 1.0).abs() < 1e-12);
    }
    let c = f(&v["concurrence"]);
    assert!(c > 0.0 && c < 1.0);
    assert!(f(&v["eof_bound"]["value"]) > 0.0);

    let product = file(&dir, "product.json", r#"{"dims":[2,3],"mixture":[{"weight":1,"ket":[[0,0],[1,0],[0,0],[0,0],[0,0],[0,0]]}]}"#);
    let v = json(&run(&[Path::new("reduce"), &product, Path::new("--then-concurrence")]));
    assert_eq!(f(&v["concurrence"]), 0.0);
    assert_eq!(v["eof_bound"]["exact"], Value::Bool(true));
}

#[test]
fn sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let template = file(&dir, "t.json", r#"{"named":{"type":"axial","alpha":"$alpha","beta":0.1,"gamma":"$gamma"}}"#);
    let csv = dir.path().join("out.csv");
    let out = bin()
        .args(["sweep", template.to_str().unwrap(), "--param", "alpha=0.1:0.9:9", "--param", "gamma=0.1:0.9:9"])
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "alpha");
    assert_eq!(&header[2], "w0");
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 81);
    assert_eq!(&rows[0][0], &rows[8][0]);
    assert!(rows.iter().all(|r| &r[7] == "0"));

    let out = bin()
        .args(["sweep", template.to_str().unwrap(), "--param", "alpha=0:1:0", "--param", "gamma=0:1:3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);

    let st = file(&dir, "st.json", r#"{"bloch":[0,0,0.5]}"#);
    let out = bin()
        .args(["sweep", template.to_str().unwrap(), "--param", "alpha=0.5", "--param", "gamma=0.5"])
        .args(["--state", st.to_str().unwrap()])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("alpha,gamma,x1,x2,x3,w0"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn oracle_subcommand_and_sufficiency() {
    let dir = TempDir::new().unwrap();
    let ch = file(&dir, "c.json", r#"{"canonical":{"alpha":0.6,"beta":0.7,"omega":[0.3,0.8,1],"xi":[0,0.6,0.8]}}"#);
    let st = file(&dir, "s.json", r#"{"bloch":[0.1,0.2,-0.3]}"#);
    let args = |extra: &[&str]| {
        let mut a = vec!["oracle", ch.to_str().unwrap(), st.to_str().unwrap()];
        a.extend_from_slice(extra);
        a.iter().map(|s| s.to_string()).collect::<Vec<_>>()
    };
    let v = json(&bin().args(args(&["--sufficiency", "--restarts", "4"])).output().unwrap());
    let o = &v["oracle"];
    assert_eq!(o["config"]["restarts"], 4);
    assert!(f(&o["gap"]) >= -1e-9 && f(&o["gap"]) <= 1e-3);
    assert_eq!(o["sufficiency"]["two_point_sufficient"], Value::Bool(true));
    let bad = bin().args(args(&["--grid-resolution", "8"])).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reports_round_trip_at_full_precision() {
    let dir = TempDir::new().unwrap();
    let ch = file(&dir, "c.json", r#"{"lambda":[[0.3,0.1,0],[-0.1,0.4,0.05],[0,0.1,0.2]],"t":[0.1,-0.2,0.3]}"#);
    let st = file(&dir, "s.json", r#"{"bloch":[0.2,-0.1,0.3]}"#);
    let out = run(&[Path::new("concurrence"), &ch, &st, Path::new("--decompose")]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = json(&out);
    // every float is printed in 17-digit scientific form
    assert!(text.contains("\"w0\": ") && text.contains("e-"));
    let lambda01 = f(&v["channel"]["lambda"][0][1]);
    assert_eq!(lambda01.to_bits(), 0.1f64.to_bits());
    let w0 = f(&v["roof"]["w0"]);
    let reprinted = format!("{w0:.16e}");
    assert!(text.contains(&reprinted));
    assert_eq!(reprinted.parse::<f64>().unwrap().to_bits(), w0.to_bits());
}
