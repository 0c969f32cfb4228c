use multirat::harness::{self, child_seed, ExperimentSpec, Instance, SolverKind, SolverRun};
use multirat::{ChannelParams, Execution, ScenarioConfig};

#[test]
fn heuristic_tracks_oracle_over_a_paired_sweep() {
    let spec = ExperimentSpec {
        users: vec![2, 3, 4],
        zetas: vec![false],
        lms: vec![1.0],
        solvers: vec![SolverKind::Heuristic, SolverKind::Oracle],
        replications: 50,
        master_seed: 17,
        record_timing: false,
        ..ExperimentSpec::desk()
    };
    let res = harness::run_experiment(&spec, Execution::Parallel).unwrap();
    assert!(res.skipped.is_empty());
    let ratios: Vec<f64> = res
        .rows
        .chunks(2)
        .map(|pair| {
            assert_eq!(pair[0].seed, pair[1].seed);
            assert_eq!(pair[1].solver, SolverKind::Oracle);
            pair[0].sum_rate_bps / pair[1].sum_rate_bps
        })
        .collect();
    assert_eq!(ratios.len(), 150);
    assert!(ratios.iter().all(|&r| r <= 1.0 + 1e-9));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(mean >= 0.90, "mean ratio {mean}");
}

#[test]
fn exact_search_is_slower_than_the_heuristic() {
    let mut cfg = ScenarioConfig::desk();
    cfg.num_bs = 3;
    cfg.num_ap = 2;
    cfg.num_ue = 5;
    let heuristic = SolverRun {
        kind: SolverKind::Heuristic,
        zeta: Some(false),
        lm: Some(1.0),
    };
    let oracle = SolverRun {
        kind: SolverKind::Oracle,
        zeta: Some(false),
        lm: None,
    };
    let slower = (0..50)
        .filter(|&k| {
            let inst = Instance::generate(
                &cfg,
                &ChannelParams::default(),
                child_seed(5, 5, k),
                Execution::Sequential,
            )
            .unwrap();
            let time = |run| {
                harness::run_solver(run, &inst, 0.001, 100, Execution::Sequential)
                    .unwrap()
                    .1
                    .wall_time_s
            };
            time(&oracle) > time(&heuristic)
        })
        .count();
    assert!(slower >= 45, "oracle slower on only {slower}/50");
}

#[test]
fn heuristic_runtime_grows_polynomially_in_users() {
    let mean_time = |users: usize| {
        let mut cfg = ScenarioConfig::paper();
        cfg.num_ue = users;
        let run = SolverRun {
            kind: SolverKind::Heuristic,
            zeta: Some(false),
            lm: Some(1.0),
        };
        (0..10)
            .map(|k| {
                let inst = Instance::generate(
                    &cfg,
                    &ChannelParams::default(),
                    child_seed(6, users, k),
                    Execution::Sequential,
                )
                .unwrap();
                (0..3)
                    .map(|_| {
                        harness::run_solver(&run, &inst, 0.001, 100, Execution::Sequential)
                            .unwrap()
                            .1
                            .wall_time_s
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / 10.0
    };
    let ratio = mean_time(40) / mean_time(10);
    // Quadratic growth in U would give 16; allow one extra factor for
    // timer noise at the small end.
    assert!(ratio < 64.0, "U=40 / U=10 time ratio {ratio}");
}
