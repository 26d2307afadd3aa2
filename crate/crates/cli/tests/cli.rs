use std::path::Path;
use std::process::{Command, Output};

fn qys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qys"))
        .args(args)
        .env_remove("QYS_LOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn table_matches_golden_file() {
    let o = qys(&["table"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("golden/table.txt");
    assert_eq!(stdout(&o), golden);
    assert_eq!(golden.lines().skip(2).count(), 24);
}

#[test]
fn oracle_reports_lambda_and_error() {
    let o = qys(&["oracle", "--family", "exponential", "--n", "3", "--c", "0.1666666667", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let field = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.trim_start().starts_with(name)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    assert!(field("lambda").abs() < 1e-9);
    assert!(field("max psi error") < 1e-6);
    let o = qys(&["oracle", "--family", "constant-psi", "--a", "2", "--c", "-1", "--c1", "-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn zero_quasi_constant_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c0.toml",
        "[params]\nn = 3\nlambda = 0.0\nc = 0.0\nrbar = 0.0\n[line]\npsi = 1.0\ndpsi = 0.0\n",
    );
    let o = qys(&["--config", &cfg, "run"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("c must be nonzero"), "{}", stderr(&o));
}

#[test]
fn malformed_configs_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[params]\nn = 3\nlambda = 0.0\nc = 1.0\nrbar = 0.0\nmu = 2\n");
    let o = qys(&["--config", &cfg, "run"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("mu") && err.contains("line 6"), "{err}");

    let cfg = write(dir.path(), "mode.toml", "mode = \"sweep\"\n");
    assert_eq!(qys(&["--config", &cfg, "table"]).status.code(), Some(0));
    assert_eq!(qys(&["--config", &cfg, "run"]).status.code(), Some(1));
    assert_eq!(qys(&["--rtol", "-1", "table"]).status.code(), Some(1));
    assert_eq!(qys(&["--nope"]).status.code(), Some(1));
    assert_eq!(qys(&["run", "--n", "3"]).status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    // ψ below the tip threshold cannot start a line-mode run.
    let o = qys(&["run", "--n", "3", "--lambda", "0", "--c", "1", "--rbar", "0", "--psi", "1e-14", "--dpsi", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "loose.toml", "[integrator]\nh_init = 1.0\nh_max = 10.0\n");
    let o = qys(&["--config", &cfg, "--rtol", "1e-2", "--atol", "1e-2", "oracle", "--family", "exponential", "--c", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stderr(&o).contains("oracle mismatch"));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "[params]\nn = 3\nlambda = 0.0\nc = 0.0\nrbar = 0.0\n[line]\npsi = 1.0\ndpsi = -0.5\nspan = [0.0, 2.0]\n",
    );
    let out = dir.path().join("o");
    let o = qys(&["--config", &cfg, "--out", out.to_str().unwrap(), "run", "--c", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("r,psi,dpsi,ddpsi,F,Fprime,R,rbar_residual\n"));
    assert!(csv.lines().nth(1).unwrap().starts_with("0.0,1.0,-0.5,"));
}

#[test]
fn shoot_and_sweep_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        r#"
[[sweep.runs]]
n = 3
lambda = 0.0
c = 1.0
rbar = 2.0
init = { F0 = 0.0 }
span = 3.0

[[sweep.cells]]
name = "cell"
types = ["shrinking", "expanding"]
c_sign = "neg"
r_condition = "below-lambda-eps"
samples = 20
span = 20.0
"#,
    );
    let run = |tag: &str| {
        let out = dir.path().join(tag);
        let o = qys(&["--config", &cfg, "--seed", "17", "--out", out.to_str().unwrap(), "sweep"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out.join("sweep.jsonl")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 21);
    let first: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    for key in [
        "run-id", "n", "lambda", "c", "rbar", "mode", "init", "verdict", "event-kind", "event-r",
        "alpha", "consistent", "seed",
    ] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(first["seed"], 17);

    let shoot = |tag: &str| {
        let out = dir.path().join(tag);
        let o = qys(&[
            "shoot", "--n", "3", "--lambda", "0", "--c", "1", "--rbar", "2", "--r-end", "2",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out.join("shoot.csv")).unwrap()
    };
    assert_eq!(shoot("s1"), shoot("s2"));
}

#[test]
fn sweep_without_out_streams_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.toml", "[sweep]\n");
    let o = qys(&["--config", &cfg, "sweep"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert_eq!(qys(&["sweep"]).status.code(), Some(1));
}
