//! Paired experiment runner and CSV emission.
//!
//! Every sweep point × replication draws one scenario and one CSI snapshot
//! from a child seed, and every requested solver runs on that same instance.
//! Child seeds come from a hash chain over `(master_seed, point, replication)`
//! so any row can be reproduced in isolation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocator::{self, SolverConfig, SolverReport};
use crate::channel::{self, ChannelError, ChannelParams, CsiSnapshot};
use crate::exec::Execution;
use crate::oracle::{self, OracleError};
use crate::radio::{self, Assignment, SinrTable};
use crate::rng;
use crate::scenario::{self, Scenario, ScenarioConfig, ScenarioError};

/// Exact CSV header of [`emit_csv`].
pub const CSV_HEADER: [&str; 11] = [
    "sweep_U",
    "sweep_Jue",
    "zeta",
    "lm",
    "solver",
    "seed",
    "sum_rate_bps",
    "success_prob",
    "iterations",
    "wall_time_s",
    "feasible",
];

/// Word mixed into a child seed to obtain its channel seed.
const CHANNEL_SEED_TAG: u64 = 0xC5_1C_5E_ED;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Wall-clock seconds spent in `f`, on the monotonic clock.
pub fn measure_runtime<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Heuristic,
    Baseline,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [
        SolverKind::Heuristic,
        SolverKind::Baseline,
        SolverKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Heuristic => "heuristic",
            SolverKind::Baseline => "baseline",
            SolverKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heuristic" => Ok(SolverKind::Heuristic),
            "baseline" => Ok(SolverKind::Baseline),
            "oracle" => Ok(SolverKind::Oracle),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

/// A scenario with its channel realization and SINR table.
#[derive(Debug, Clone)]
pub struct Instance {
    pub scenario: Scenario,
    pub snapshot: CsiSnapshot,
    pub table: SinrTable,
}

impl Instance {
    pub fn build(
        scenario: Scenario,
        channel: &ChannelParams,
        channel_seed: u64,
        exec: Execution,
    ) -> Result<Self, HarnessError> {
        let snapshot = channel::build_csi_snapshot(&scenario, channel, channel_seed, exec)?;
        let table = radio::sinr_table(&snapshot, &radio::uniform_power_plan(&scenario), &scenario);
        Ok(Self {
            scenario,
            snapshot,
            table,
        })
    }

    /// Scenario and channel both derived from `seed`, the way the sweep does it.
    pub fn generate(
        cfg: &ScenarioConfig,
        channel: &ChannelParams,
        seed: u64,
        exec: Execution,
    ) -> Result<Self, HarnessError> {
        let mut cfg = cfg.clone();
        cfg.rng_seed = seed;
        let s = scenario::generate_scenario(&cfg)?;
        Self::build(s, channel, channel_seed(seed), exec)
    }
}

pub fn child_seed(master_seed: u64, point: usize, replication: usize) -> u64 {
    rng::derive_seed(master_seed, &[point as u64, replication as u64])
}

pub fn channel_seed(instance_seed: u64) -> u64 {
    rng::derive_seed(instance_seed, &[CHANNEL_SEED_TAG])
}

/// One solver invocation on an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverRun {
    pub kind: SolverKind,
    /// ζ for the heuristic; QoS enforcement for the oracle.
    pub zeta: Option<bool>,
    pub lm: Option<f64>,
}

impl SolverRun {
    /// Label distinguishing variants of one solver, e.g. `heuristic(zeta=1,lm=0.5)`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(z) = self.zeta {
            parts.push(format!("zeta={}", u8::from(z)));
        }
        if let Some(lm) = self.lm {
            parts.push(format!("lm={lm}"));
        }
        if parts.is_empty() {
            self.kind.name().to_string()
        } else {
            format!("{}({})", self.kind, parts.join(","))
        }
    }
}

pub fn run_solver(
    run: &SolverRun,
    inst: &Instance,
    epsilon_mbps: f64,
    max_iters: usize,
    exec: Execution,
) -> Result<(Assignment, SolverReport), OracleError> {
    let (t, s) = (&inst.table, &inst.scenario);
    Ok(match run.kind {
        SolverKind::Heuristic => {
            let cfg = SolverConfig {
                qos_aware: run.zeta.unwrap_or(false),
                lm: run.lm.unwrap_or(1.0),
                epsilon_mbps,
                max_iters,
            };
            allocator::solve_heuristic(t, s, &cfg)
        }
        SolverKind::Baseline => allocator::solve_baseline(t, s),
        SolverKind::Oracle => oracle::solve_exact(t, s, run.zeta.unwrap_or(false), exec)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Scenario template; `num_ue`, `multi_conn` and `rng_seed` are
    /// overridden per sweep point and replication.
    pub base: ScenarioConfig,
    pub channel: ChannelParams,
    pub users: Vec<usize>,
    pub multi_conn: Vec<usize>,
    pub zetas: Vec<bool>,
    pub lms: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    pub replications: usize,
    pub master_seed: u64,
    pub epsilon_mbps: f64,
    pub max_iters: usize,
    /// When false, wall times are recorded as 0 so output is byte-stable.
    pub record_timing: bool,
}

impl ExperimentSpec {
    /// Desk-scale sweep small enough for the exact solver.
    pub fn desk() -> Self {
        Self {
            base: ScenarioConfig::desk(),
            channel: ChannelParams::default(),
            users: vec![2, 3, 4, 5, 6],
            multi_conn: vec![1],
            zetas: vec![false, true],
            lms: vec![1.0, 0.5],
            solvers: SolverKind::ALL.to_vec(),
            replications: 20,
            master_seed: 0,
            epsilon_mbps: 0.001,
            max_iters: 100,
            record_timing: true,
        }
    }

    /// Full-scale sweep (heuristic and baseline only).
    pub fn paper() -> Self {
        Self {
            base: ScenarioConfig::paper(),
            users: vec![10, 20, 30, 40, 50, 60],
            solvers: vec![SolverKind::Heuristic, SolverKind::Baseline],
            replications: 10,
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidSpec(m.into()));
        if self.replications < 1 {
            return bad("replications must be >= 1");
        }
        if self.users.is_empty() || self.multi_conn.is_empty() || self.solvers.is_empty() {
            return bad("users, multi_conn and solvers must be non-empty");
        }
        if self.solvers.contains(&SolverKind::Heuristic)
            && (self.zetas.is_empty() || self.lms.is_empty())
        {
            return bad("the heuristic needs at least one zeta and one lm");
        }
        for &lm in &self.lms {
            let cfg = SolverConfig {
                lm,
                epsilon_mbps: self.epsilon_mbps,
                max_iters: self.max_iters,
                ..SolverConfig::default()
            };
            cfg.validate()
                .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
        }
        for (&u, &jue) in self.points().iter().map(|(u, j)| (u, j)) {
            let mut cfg = self.base.clone();
            cfg.num_ue = u;
            cfg.multi_conn = jue;
            cfg.validate()?;
        }
        self.channel.validate()?;
        Ok(())
    }

    /// Sweep points `(U, J_ue)` in emission order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.users
            .iter()
            .flat_map(|&u| self.multi_conn.iter().map(move |&j| (u, j)))
            .collect()
    }

    /// Solver variants run on every instance, in emission order.
    pub fn runs(&self) -> Vec<SolverRun> {
        let mut out = Vec::new();
        for &kind in &self.solvers {
            match kind {
                SolverKind::Heuristic => {
                    for &z in &self.zetas {
                        for &lm in &self.lms {
                            out.push(SolverRun {
                                kind,
                                zeta: Some(z),
                                lm: Some(lm),
                            });
                        }
                    }
                }
                SolverKind::Baseline => out.push(SolverRun {
                    kind,
                    zeta: None,
                    lm: None,
                }),
                SolverKind::Oracle => {
                    let mut zs = self.zetas.clone();
                    if zs.is_empty() {
                        zs.push(false);
                    }
                    for z in zs {
                        out.push(SolverRun {
                            kind,
                            zeta: Some(z),
                            lm: None,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub point: usize,
    pub replication: usize,
    pub sweep_u: usize,
    pub sweep_jue: usize,
    pub zeta: Option<bool>,
    pub lm: Option<f64>,
    pub solver: SolverKind,
    pub seed: u64,
    pub sum_rate_bps: f64,
    pub success_prob: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub converged: bool,
    pub feasible: bool,
}

impl ResultRow {
    pub fn label(&self) -> String {
        SolverRun {
            kind: self.solver,
            zeta: self.zeta,
            lm: self.lm,
        }
        .label()
    }
}

/// A solver run that produced no row.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRun {
    pub point: usize,
    pub replication: usize,
    pub seed: u64,
    pub solver: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub skipped: Vec<SkippedRun>,
}

/// Runs the sweep. Instances fan out under `exec`; each instance's solvers
/// run sequentially on it. Output order is (point, replication, solver run)
/// regardless of execution mode.
pub fn run_experiment(
    spec: &ExperimentSpec,
    exec: Execution,
) -> Result<ExperimentResult, HarnessError> {
    spec.validate()?;
    let points = spec.points();
    let runs = spec.runs();
    let reps = spec.replications;

    let per_instance = exec.map_range(points.len() * reps, |k| {
        let (point, replication) = (k / reps, k % reps);
        let (u, jue) = points[point];
        let seed = child_seed(spec.master_seed, point, replication);
        let mut cfg = spec.base.clone();
        cfg.num_ue = u;
        cfg.multi_conn = jue;
        // The instance is built sequentially; the outer fan-out already
        // saturates the pool.
        let inst = Instance::generate(&cfg, &spec.channel, seed, Execution::Sequential)?;

        let mut rows = Vec::with_capacity(runs.len());
        let mut skipped = Vec::new();
        for run in &runs {
            let skip = |reason: String| SkippedRun {
                point,
                replication,
                seed,
                solver: run.label(),
                reason,
            };
            match run_solver(
                run,
                &inst,
                spec.epsilon_mbps,
                spec.max_iters,
                Execution::Sequential,
            ) {
                Ok((a, rep)) => {
                    let violations = radio::validate_assignment(&a, &inst.scenario);
                    if !violations.is_empty() {
                        skipped.push(skip(format!("constraint violations: {violations:?}")));
                        continue;
                    }
                    rows.push(ResultRow {
                        point,
                        replication,
                        sweep_u: u,
                        sweep_jue: jue,
                        zeta: run.zeta,
                        lm: run.lm,
                        solver: run.kind,
                        seed,
                        sum_rate_bps: rep.sum_rate_bps,
                        success_prob: rep.success_prob,
                        iterations: rep.iterations,
                        wall_time_s: if spec.record_timing {
                            rep.wall_time_s
                        } else {
                            0.0
                        },
                        converged: rep.converged,
                        feasible: true,
                    });
                }
                Err(e) => skipped.push(skip(e.to_string())),
            }
        }
        Ok::<_, HarnessError>((rows, skipped))
    });

    let mut out = ExperimentResult::default();
    for r in per_instance {
        let (rows, skipped) = r?;
        out.rows.extend(rows);
        out.skipped.extend(skipped);
    }
    Ok(out)
}

fn fmt_opt_bool(v: Option<bool>) -> String {
    v.map(|b| u8::from(b).to_string()).unwrap_or_default()
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows under [`CSV_HEADER`]. `zeta` and `lm` are empty for solvers
/// that do not use them.
pub fn emit_csv<W: Write>(rows: &[ResultRow], sink: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep_u.to_string(),
            r.sweep_jue.to_string(),
            fmt_opt_bool(r.zeta),
            fmt_opt_f64(r.lm),
            r.solver.name().to_string(),
            r.seed.to_string(),
            r.sum_rate_bps.to_string(),
            r.success_prob.to_string(),
            r.iterations.to_string(),
            r.wall_time_s.to_string(),
            r.feasible.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sweep coordinate usable as a plot axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKey {
    Users,
    MultiConn,
}

impl GroupKey {
    fn column(self) -> &'static str {
        match self {
            GroupKey::Users => "sweep_U",
            GroupKey::MultiConn => "sweep_Jue",
        }
    }

    fn value(self, r: &ResultRow) -> usize {
        match self {
            GroupKey::Users => r.sweep_u,
            GroupKey::MultiConn => r.sweep_jue,
        }
    }
}

impl FromStr for GroupKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "U" | "users" => Ok(GroupKey::Users),
            "Jue" | "multi-conn" => Ok(GroupKey::MultiConn),
            other => Err(format!("unknown group key `{other}`")),
        }
    }
}

/// Mean and sample standard deviation (0 for fewer than two samples).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub group: Vec<usize>,
    pub series: String,
    pub n: usize,
    pub sum_rate: (f64, f64),
    pub success: (f64, f64),
    pub wall_time: (f64, f64),
}

/// Aggregates rows per (group values, solver series) in first-appearance order.
pub fn aggregate(rows: &[ResultRow], group_by: &[GroupKey]) -> Vec<PlotPoint> {
    let mut keys: Vec<(Vec<usize>, String)> = Vec::new();
    let mut members: Vec<Vec<&ResultRow>> = Vec::new();
    for r in rows {
        let key = (
            group_by.iter().map(|g| g.value(r)).collect::<Vec<_>>(),
            r.label(),
        );
        match keys.iter().position(|k| *k == key) {
            Some(p) => members[p].push(r),
            None => {
                keys.push(key);
                members.push(vec![r]);
            }
        }
    }
    keys.into_iter()
        .zip(members)
        .map(|((group, series), rs)| {
            let col =
                |f: fn(&ResultRow) -> f64| mean_std(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            PlotPoint {
                group,
                series,
                n: rs.len(),
                sum_rate: col(|r| r.sum_rate_bps),
                success: col(|r| r.success_prob),
                wall_time: col(|r| r.wall_time_s),
            }
        })
        .collect()
}

/// Per-group mean ± sample standard deviation, one series per solver variant.
pub fn emit_plot_data<W: Write>(
    rows: &[ResultRow],
    group_by: &[GroupKey],
    sink: W,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = group_by.iter().map(|g| g.column()).collect();
    header.extend([
        "series",
        "n",
        "sum_rate_mean",
        "sum_rate_std",
        "success_mean",
        "success_std",
        "wall_time_mean",
        "wall_time_std",
    ]);
    w.write_record(&header)?;
    for p in aggregate(rows, group_by) {
        let mut rec: Vec<String> = p.group.iter().map(ToString::to_string).collect();
        rec.push(p.series);
        rec.push(p.n.to_string());
        for (m, s) in [p.sum_rate, p.success, p.wall_time] {
            rec.push(m.to_string());
            rec.push(s.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            users: vec![2, 3],
            replications: 3,
            record_timing: false,
            ..ExperimentSpec::desk()
        }
    }

    fn csv_bytes(rows: &[ResultRow]) -> Vec<u8> {
        let mut buf = Vec::new();
        emit_csv(rows, &mut buf).unwrap();
        buf
    }

    #[test]
    fn one_point_two_solvers_gives_paired_rows() {
        let spec = ExperimentSpec {
            users: vec![3],
            replications: 1,
            zetas: vec![false],
            lms: vec![1.0],
            solvers: vec![SolverKind::Heuristic, SolverKind::Baseline],
            ..small_spec()
        };
        let res = run_experiment(&spec, Execution::Sequential).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert_eq!(res.rows[0].seed, res.rows[1].seed);
        assert_eq!(res.rows[0].solver, SolverKind::Heuristic);
        assert_eq!(res.rows[1].solver, SolverKind::Baseline);
    }

    #[test]
    fn rerun_is_byte_identical_across_modes() {
        let spec = small_spec();
        let a = run_experiment(&spec, Execution::Sequential).unwrap();
        let b = run_experiment(&spec, Execution::Parallel).unwrap();
        assert!(a.skipped.is_empty());
        assert_eq!(csv_bytes(&a.rows), csv_bytes(&b.rows));
        // 2 points × 3 reps × (4 heuristic + 1 baseline + 2 oracle variants).
        assert_eq!(a.rows.len(), 2 * 3 * 7);
        assert!(a.rows.iter().all(|r| r.feasible));
    }

    #[test]
    fn empty_rows_give_header_only() {
        let text = String::from_utf8(csv_bytes(&[])).unwrap();
        assert_eq!(
            text,
            "sweep_U,sweep_Jue,zeta,lm,solver,seed,sum_rate_bps,success_prob,iterations,wall_time_s,feasible\n"
        );
    }

    fn row(u: usize, solver: SolverKind, rate: f64) -> ResultRow {
        ResultRow {
            point: 0,
            replication: 0,
            sweep_u: u,
            sweep_jue: 1,
            zeta: None,
            lm: None,
            solver,
            seed: 1,
            sum_rate_bps: rate,
            success_prob: 1.0,
            iterations: 0,
            wall_time_s: 0.0,
            converged: true,
            feasible: true,
        }
    }

    #[test]
    fn aggregation_means_and_shapes() {
        let rows = [
            row(2, SolverKind::Baseline, 1.0),
            row(2, SolverKind::Baseline, 3.0),
        ];
        let agg = aggregate(&rows, &[GroupKey::Users]);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].sum_rate.0, 2.0);
        assert!((agg[0].sum_rate.1 - 2f64.sqrt()).abs() < 1e-15);

        let spec = small_spec();
        let res = run_experiment(&spec, Execution::Parallel).unwrap();
        let agg = aggregate(&res.rows, &[GroupKey::Users]);
        // 2 U values × 7 solver variants, each averaging 3 replications.
        assert_eq!(agg.len(), 2 * 7);
        assert!(agg.iter().all(|p| p.n == 3));
        let mut buf = Vec::new();
        emit_plot_data(&res.rows, &[GroupKey::Users], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 14);
    }

    #[test]
    fn budget_exceeded_becomes_a_skip_marker() {
        let spec = ExperimentSpec {
            base: ScenarioConfig::paper(),
            users: vec![40],
            replications: 1,
            zetas: vec![false],
            lms: vec![1.0],
            solvers: vec![SolverKind::Oracle, SolverKind::Baseline],
            ..small_spec()
        };
        let res = run_experiment(&spec, Execution::Sequential).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.skipped.len(), 1);
        assert!(res.skipped[0].reason.contains("candidate"));
    }

    #[test]
    fn trivial_instance_is_fast() {
        let mut cfg = ScenarioConfig::desk();
        cfg.num_bs = 0;
        cfg.num_ap = 1;
        cfg.num_ue = 1;
        cfg.num_jammers = 0;
        let inst =
            Instance::generate(&cfg, &ChannelParams::default(), 0, Execution::Sequential).unwrap();
        for kind in SolverKind::ALL {
            let run = SolverRun {
                kind,
                zeta: Some(false),
                lm: Some(1.0),
            };
            let (_, rep) = run_solver(&run, &inst, 0.001, 100, Execution::Sequential).unwrap();
            assert!(rep.wall_time_s < 0.01, "{kind}: {}", rep.wall_time_s);
        }
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let spec = ExperimentSpec {
            replications: 0,
            ..small_spec()
        };
        assert!(matches!(
            run_experiment(&spec, Execution::Sequential),
            Err(HarnessError::InvalidSpec(_))
        ));
        let spec = ExperimentSpec {
            lms: vec![0.0],
            ..small_spec()
        };
        assert!(run_experiment(&spec, Execution::Sequential).is_err());
    }
}
