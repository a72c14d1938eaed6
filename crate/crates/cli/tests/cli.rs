use std::fs;
use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use serde_json::Value;
use tempfile::TempDir;

use skewpencil_cli::{run, Cli};

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }
}

fn invoke(args: &[&str]) -> (i32, String) {
    let cli =
        Cli::try_parse_from(std::iter::once("skewpencil").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    let code = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => e.exit_code(),
    };
    (code, String::from_utf8(out).unwrap())
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_skewpencil"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

const H1_ZERO: &str = r#"{"blocks":[{"kind":"H","n":1,"lambda":[0.0,0.0]}]}"#;

#[test]
fn codim_of_a_singular_block_is_zero() {
    let fx = Fixture::new();
    let path = fx.file("l5.json", r#"{"blocks":[{"kind":"L","n":5}]}"#);
    assert_eq!(
        invoke(&["codim", path.to_str().unwrap()]),
        (0, "0\n".to_string())
    );
}

#[test]
fn verify_h1_reports_rank_one_plus_one() {
    let fx = Fixture::new();
    let path = fx.file("h1.json", H1_ZERO);
    for backend in ["exact", "float"] {
        let (code, out) = invoke(&["--backend", backend, "verify", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["global"]["rank_t"], 1);
        assert_eq!(v["global"]["params"], 1);
        assert_eq!(v["global"]["ambient"], 2);
        assert_eq!(v["ok"], true);
        assert_eq!(v["backend"], backend);
    }
}

#[test]
fn pattern_output_shape() {
    let fx = Fixture::new();
    let path = fx.file("h1.json", H1_ZERO);
    let (code, out) = invoke(&["pattern", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["params"], 1);
    assert_eq!(v["maskA"], serde_json::json!([[0, 0], [0, 0]]));
    assert_eq!(v["maskB"], serde_json::json!([[0, 1], [1, 0]]));
}

#[test]
fn reduce_with_zero_perturbation_takes_no_steps() {
    let fx = Fixture::new();
    let base = fx.file("h1.json", H1_ZERO);
    let pert = fx.file(
        "zero.json",
        r#"{"A":{"rows":2,"cols":2,"entries":[[0,0],[0,0],[0,0],[0,0]]},
            "B":{"rows":2,"cols":2,"entries":[[0,0],[0,0],[0,0],[0,0]]}}"#,
    );
    let (code, out) = invoke(&[
        "reduce",
        "--base",
        base.to_str().unwrap(),
        "--perturbation",
        pert.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trace"]["iteration_count"], 0);
    assert_eq!(v["trace"]["converged"], true);
    assert_eq!(v["schedule"]["m"].as_u64().map(|m| m >= 3), Some(true));
}

#[test]
fn reduce_removes_an_off_pattern_perturbation() {
    let fx = Fixture::new();
    let base = fx.file(
        "s.json",
        r#"{"blocks":[{"kind":"H","n":1,"lambda":[1.0,0.0]},{"kind":"L","n":0}]}"#,
    );
    let pert = fx.file(
        "p.json",
        r#"{"A":{"rows":3,"cols":3,"entries":[[0,0],[0,0],[1e-4,0],[0,0],[0,0],[0,2e-4],[-1e-4,0],[0,-2e-4],[0,0]]},
            "B":{"rows":3,"cols":3,"entries":[[0,0],[3e-4,0],[0,0],[-3e-4,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}}"#,
    );
    let (code, out) = invoke(&[
        "reduce",
        "--base",
        base.to_str().unwrap(),
        "--perturbation",
        pert.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trace"]["converged"], true);
    assert!(v["trace"]["d_off_pattern_norm"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn frozen_linearization_also_converges() {
    let fx = Fixture::new();
    let base = fx.file(
        "s.json",
        r#"{"blocks":[{"kind":"K","n":1},{"kind":"L","n":1}]}"#,
    );
    let pert = fx.file(
        "p.json",
        r#"{"A":{"rows":5,"cols":5,"entries":[[0,0],[0,0],[1e-4,0],[0,0],[0,0],[0,0],[0,0],[0,0],[2e-4,0],[0,0],[-1e-4,0],[0,0],[0,0],[0,0],[0,0],[0,0],[-2e-4,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]},
            "B":{"rows":5,"cols":5,"entries":[[0,0],[0,0],[0,0],[0,0],[0,3e-4],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,-3e-4],[0,0],[0,0],[0,0],[0,0]]}}"#,
    );
    let args = |lin: &'static str| {
        invoke(&[
            "reduce",
            "--base",
            base.to_str().unwrap(),
            "--perturbation",
            pert.to_str().unwrap(),
            "--linearization",
            lin,
        ])
    };
    for lin in ["current", "base"] {
        let (code, out) = args(lin);
        assert_eq!(code, 0, "{lin}: {out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["trace"]["d_off_pattern_norm"].as_f64().unwrap() <= 1e-10);
    }
    assert!(Cli::try_parse_from([
        "skewpencil",
        "reduce",
        "--base",
        "x",
        "--perturbation",
        "y",
        "--linearization",
        "exact"
    ])
    .is_err());
}

#[test]
fn reduce_reports_non_convergence_with_exit_one() {
    let fx = Fixture::new();
    let base = fx.file(
        "h1h1.json",
        r#"{"blocks":[{"kind":"H","n":1,"lambda":[0,0]},{"kind":"H","n":1,"lambda":[0,0]}]}"#,
    );
    let pert = fx.file(
        "p.json",
        r#"{"A":{"rows":4,"cols":4,"entries":[[0,0],[0.01,0],[0.02,0],[0,0],[-0.01,0],[0,0],[0,0],[0.03,0],[-0.02,0],[0,0],[0,0],[0,0],[0,0],[-0.03,0],[0,0],[0,0]]},
            "B":{"rows":4,"cols":4,"entries":[[0,0],[0,0],[0,0],[0.01,0],[0,0],[0,0],[0.02,0],[0,0],[0,0],[-0.02,0],[0,0],[0,0],[-0.01,0],[0,0],[0,0],[0,0]]}}"#,
    );
    let args = [
        "--tol",
        "0",
        "reduce",
        "--base",
        base.to_str().unwrap(),
        "--perturbation",
        pert.to_str().unwrap(),
        "--max-iter",
        "1",
    ];
    let (code, out) = invoke(&args);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trace"]["converged"], false);
    assert_eq!(v["trace"]["iteration_count"], 1);
}

#[test]
fn corpus_counts_and_is_reproducible() {
    let (code, out) = invoke(&["corpus", "--max-dim", "6"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 173);

    let args = [
        "--seed",
        "11",
        "corpus",
        "--max-dim",
        "3",
        "--perturbations",
        "2",
    ];
    let (_, first) = invoke(&args);
    let (_, second) = invoke(&args);
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(
        v["structures"][0]["perturbations"]
            .as_array()
            .unwrap()
            .len(),
        2
    );
    let (_, other_seed) = invoke(&[
        "--seed",
        "12",
        "corpus",
        "--max-dim",
        "3",
        "--perturbations",
        "2",
    ]);
    assert_ne!(first, other_seed);
}

#[test]
fn bad_inputs_exit_with_two() {
    let fx = Fixture::new();
    let broken = fx.file("broken.json", "{\"blocks\": [");
    let unknown = fx.file("unknown.json", r#"{"blocks":[{"kind":"Z","n":1}]}"#);
    assert_eq!(invoke(&["codim", broken.to_str().unwrap()]).0, 2);
    assert_eq!(invoke(&["verify", unknown.to_str().unwrap()]).0, 2);
    assert_eq!(invoke(&["pattern", "/nonexistent/structure.json"]).0, 2);

    let base = fx.file("h1.json", H1_ZERO);
    let not_skew = fx.file(
        "ns.json",
        r#"{"A":{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[0,0]]},
            "B":{"rows":2,"cols":2,"entries":[[0,0],[0,0],[0,0],[0,0]]}}"#,
    );
    let args = [
        "reduce",
        "--base",
        base.to_str().unwrap(),
        "--perturbation",
        not_skew.to_str().unwrap(),
    ];
    assert_eq!(invoke(&args).0, 2);
    let wrong_size = fx.file(
        "ws.json",
        r#"{"A":{"rows":1,"cols":1,"entries":[[0,0]]},"B":{"rows":1,"cols":1,"entries":[[0,0]]}}"#,
    );
    let args = [
        "reduce",
        "--base",
        base.to_str().unwrap(),
        "--perturbation",
        wrong_size.to_str().unwrap(),
    ];
    assert_eq!(invoke(&args).0, 2);
    assert_eq!(invoke(&["--tol=-1", "codim", base.to_str().unwrap()]).0, 2);
}

#[test]
fn binary_exit_codes_and_determinism() {
    let fx = Fixture::new();
    let path = fx.file("h1.json", H1_ZERO);
    let (code, first, _) = binary(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, second, _) = binary(&["verify", path.to_str().unwrap()]);
    assert_eq!(first, second);

    let (code, _, err) = binary(&["--backend", "fast", "verify", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("fast"));
    let (code, _, _) = binary(&["nonsense"]);
    assert_eq!(code, 2);
    let broken = fx.file("broken.json", "not json");
    let (code, _, err) = binary(&["codim", broken.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.starts_with("skewpencil:"));
}
