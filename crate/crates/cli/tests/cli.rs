use std::process::Command;

fn multirat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multirat"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_then_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    run_ok(
        multirat()
            .args(["generate", "--seed", "4", "--users", "3", "--out"])
            .arg(&path),
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["ues"].as_array().unwrap().len(), 3);

    for solver in ["heuristic", "baseline", "oracle"] {
        let out = run_ok(
            multirat()
                .args([
                    "solve",
                    "--solver",
                    solver,
                    "--assignment",
                    "--scenario-file",
                ])
                .arg(&path),
        );
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(
            doc["report"]["sum_rate_bps"].as_f64().unwrap() > 0.0,
            "{solver}"
        );
        assert_eq!(doc["seed"], 4);
    }
}

#[test]
fn deterministic_sweep_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = |name: &str, extra: &[&str]| {
        let csv = dir.path().join(name);
        run_ok(
            multirat()
                .args(extra)
                .args([
                    "sweep",
                    "--users",
                    "2,3",
                    "--reps",
                    "3",
                    "--seed",
                    "9",
                    "--deterministic",
                    "--out",
                ])
                .arg(&csv),
        );
        std::fs::read(&csv).unwrap()
    };
    let a = sweep("a.csv", &[]);
    let b = sweep("b.csv", &["--sequential"]);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "sweep_U,sweep_Jue,zeta,lm,solver,seed,sum_rate_bps,success_prob,iterations,wall_time_s,feasible\n"
    ));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 7);
}

#[test]
fn plot_data_has_one_series_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    run_ok(
        multirat()
            .args([
                "sweep",
                "--users",
                "2,4",
                "--reps",
                "2",
                "--solver",
                "heuristic,baseline",
                "--zeta",
                "0",
            ])
            .args(["--lm", "1", "--out"])
            .arg(dir.path().join("rows.csv"))
            .arg("--plot-out")
            .arg(&plot),
    );
    let text = std::fs::read_to_string(plot).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("sweep_U,sweep_Jue,series,n,sum_rate_mean"));
    assert_eq!(lines.len(), 1 + 2 * 2);
}

#[test]
fn bad_flags_are_rejected() {
    assert!(!multirat()
        .args(["solve", "--zeta", "2"])
        .output()
        .unwrap()
        .status
        .success());
    assert!(!multirat()
        .args(["solve", "--solver", "gurobi"])
        .output()
        .unwrap()
        .status
        .success());
    let out = multirat().args(["sweep", "--reps", "0"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("replications"));
}
