//! Two-phase association / bandwidth heuristic and the Round-Robin baseline.
//!
//! Phase one associates every UE greedily by descending SINR (respecting SP
//! caps and the per-UE limit), then splits each SP's bandwidth in proportion
//! to its members' SINRs. Phase two sweeps the SPs and, for every member UE,
//! tries swapping that association for one of the best-ranked free SPs,
//! committing the swap that most improves the sum-rate (or, in QoS-aware
//! mode, that first lets the UE meet its minimum rate). Sweeps repeat until
//! the sum-rate moves by less than `epsilon`.
//!
//! Ties are always resolved toward the lowest index, so every run is a pure
//! function of its inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::measure_runtime;
use crate::matrix::Matrix;
use crate::radio::{self, Assignment, SinrTable};
use crate::scenario::Scenario;

/// A swap must beat the incumbent by more than this fraction of the local
/// throughput; smaller differences are rounding noise.
const IMPROVEMENT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
#[error("invalid solver config: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// ζ = 1: prefer candidates that let the UE meet its minimum rate.
    pub qos_aware: bool,
    /// Fraction of all SPs kept in each UE's candidate list, in (0, 1].
    pub lm: f64,
    /// Convergence threshold on the sweep-to-sweep sum-rate change, Mbit/s.
    pub epsilon_mbps: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            qos_aware: false,
            lm: 1.0,
            epsilon_mbps: 0.001,
            max_iters: 100,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lm > 0.0 && self.lm <= 1.0) {
            return Err(ConfigError(format!(
                "lm must be in (0, 1], got {}",
                self.lm
            )));
        }
        if !(self.epsilon_mbps > 0.0 && self.epsilon_mbps.is_finite()) {
            return Err(ConfigError("epsilon must be positive".into()));
        }
        if self.max_iters < 1 {
            return Err(ConfigError("max_iters must be >= 1".into()));
        }
        Ok(())
    }

    /// Candidate-list length for a network of `sps` service points.
    pub fn candidate_limit(&self, sps: usize) -> usize {
        // Guard against 0.5 * 4 = 2.0000000000000004 style rounding.
        ((self.lm * sps as f64) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementTrace {
    /// Sum-rate of the starting assignment, bits/s.
    pub initial_sum_rate: f64,
    /// Sum-rate after each full sweep, bits/s.
    pub sum_rates: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

impl RefinementTrace {
    /// True when no sweep lowered the sum-rate.
    pub fn is_non_decreasing(&self) -> bool {
        std::iter::once(&self.initial_sum_rate)
            .chain(&self.sum_rates)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solver: String,
    pub sum_rate_bps: f64,
    pub success_prob: f64,
    /// Refinement sweeps (heuristic), candidate associations evaluated
    /// (oracle), or 0 (baseline).
    pub iterations: usize,
    pub wall_time_s: f64,
    pub converged: bool,
    pub trace: Option<RefinementTrace>,
}

/// Greedy association: each UE, in id order, takes its highest-SINR SPs that
/// still have room, up to the multi-connectivity limit.
pub fn initial_association(t: &SinrTable, s: &Scenario) -> Assignment {
    let (u, j) = (s.ues.len(), s.sps.len());
    let mut a = Assignment::empty(u, j);
    let mut load = vec![0usize; j];
    for i in 0..u {
        let mut taken = 0;
        for sp in ranked_sps(t, i, 0..j) {
            if taken == s.config.multi_conn {
                break;
            }
            if load[sp] < s.sps[sp].ue_cap {
                a.x[(i, sp)] = true;
                load[sp] += 1;
                taken += 1;
            }
        }
    }
    a
}

/// SPs from `pool` ordered by descending SINR for `ue`, lowest id first on ties.
fn ranked_sps(t: &SinrTable, ue: usize, pool: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = pool.collect();
    v.sort_by(|&a, &b| t.get(ue, b).total_cmp(&t.get(ue, a)).then(a.cmp(&b)));
    v
}

/// SINR-proportional split of `bandwidth` among `members`. The last member
/// takes the remainder so the shares sum to the budget.
fn proportional_shares(t: &SinrTable, sp: usize, members: &[usize], bandwidth: f64) -> Vec<f64> {
    let total: f64 = members.iter().map(|&k| t.get(k, sp)).sum();
    let mut shares: Vec<f64> = members
        .iter()
        .map(|&k| bandwidth * t.get(k, sp) / total)
        .collect();
    if let Some((last, rest)) = shares.split_last_mut() {
        let used: f64 = rest.iter().sum();
        *last = (bandwidth - used).max(0.0);
    }
    shares
}

fn apply_shares(a: &mut Assignment, sp: usize, members: &[usize], shares: &[f64]) {
    for i in 0..a.num_ues() {
        a.y[(i, sp)] = 0.0;
    }
    for (&k, &y) in members.iter().zip(shares) {
        a.y[(k, sp)] = y;
    }
}

fn reallocate_proportional(a: &mut Assignment, sp: usize, t: &SinrTable, s: &Scenario) {
    let members = a.members(sp);
    let shares = proportional_shares(t, sp, &members, s.sps[sp].bandwidth_hz);
    apply_shares(a, sp, &members, &shares);
}

/// Bandwidth for a fixed association: each SP splits its budget in
/// proportion to its members' SINRs.
pub fn proportional_bandwidth(x: &Matrix<bool>, t: &SinrTable, s: &Scenario) -> Matrix<f64> {
    let mut a = Assignment {
        x: x.clone(),
        y: Matrix::filled(x.rows(), x.cols(), 0.0),
    };
    for sp in 0..s.sps.len() {
        reallocate_proportional(&mut a, sp, t, s);
    }
    a.y
}

/// Greedy association followed by proportional bandwidth.
pub fn initial_assignment_phase(t: &SinrTable, s: &Scenario) -> Assignment {
    let mut a = initial_association(t, s);
    a.y = proportional_bandwidth(&a.x, t, s);
    a
}

/// Equal split of each SP's bandwidth over the greedy association.
pub fn round_robin_baseline(t: &SinrTable, s: &Scenario) -> Assignment {
    let mut a = initial_association(t, s);
    for sp in 0..s.sps.len() {
        let members = a.members(sp);
        if members.is_empty() {
            continue;
        }
        let share = s.sps[sp].bandwidth_hz / members.len() as f64;
        apply_shares(&mut a, sp, &members, &vec![share; members.len()]);
    }
    a
}

/// Throughput carried by `sp` when its bandwidth is split proportionally
/// among `members`.
fn sp_throughput(t: &SinrTable, sp: usize, members: &[usize], bandwidth: f64) -> f64 {
    proportional_shares(t, sp, members, bandwidth)
        .iter()
        .zip(members)
        .map(|(y, &k)| y * t.efficiency(k, sp))
        .sum()
}

/// One option considered for a UE: keeping its incumbent SP or swapping to
/// `sp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionOption {
    pub sp: usize,
    /// Sum-rate change relative to keeping the incumbent, bits/s.
    pub delta_sum_rate: f64,
    /// Whether the UE meets its minimum rate under this option.
    pub meets_qos: bool,
    /// Rounding tolerance on `delta_sum_rate` comparisons.
    pub tolerance: f64,
}

/// Picks the winning option. `options[0]` must be the keep-option.
///
/// Without QoS awareness the largest sum-rate change wins. With it, options
/// where the UE meets its minimum rate rank above those where it does not,
/// and the sum-rate change breaks ties. A swap must strictly beat the
/// incumbent; among swaps the lowest SP id wins ties.
pub fn select_option(options: &[SelectionOption], qos_aware: bool) -> usize {
    let better = |a: &SelectionOption, b: &SelectionOption| {
        if qos_aware && a.meets_qos != b.meets_qos {
            return a.meets_qos;
        }
        a.delta_sum_rate > b.delta_sum_rate + a.tolerance.max(b.tolerance)
    };
    // Swaps are visited in ascending SP id so the first maximum is kept.
    let mut order: Vec<usize> = (1..options.len()).collect();
    order.sort_by_key(|&k| options[k].sp);
    let mut best_swap: Option<usize> = None;
    for k in order {
        if best_swap.is_none_or(|b| better(&options[k], &options[b])) {
            best_swap = Some(k);
        }
    }
    match best_swap {
        Some(k) if better(&options[k], &options[0]) => k,
        _ => 0,
    }
}

/// Outcome of one selection step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub chosen_sp: usize,
    pub delta_sum_rate: f64,
}

/// Reconsiders UE `ue`'s association with `incumbent`: evaluates swapping it
/// for each admissible top-ranked free SP, and commits the best option
/// (possibly keeping the incumbent). Only the two SPs touched by a swap have
/// their bandwidth recomputed.
pub fn sp_selection_for_ue(
    ue: usize,
    incumbent: usize,
    a: &mut Assignment,
    t: &SinrTable,
    s: &Scenario,
    cfg: &SolverConfig,
) -> Selection {
    assert!(
        a.is_linked(ue, incumbent),
        "UE {ue} is not served by SP {incumbent}"
    );
    let j = s.sps.len();
    let free = (0..j).filter(|&sp| !a.is_linked(ue, sp));
    let mut candidates = ranked_sps(t, ue, free);
    candidates.truncate(cfg.candidate_limit(j));

    let src_members = a.members(incumbent);
    let src_members_after: Vec<usize> = src_members.iter().copied().filter(|&k| k != ue).collect();
    let src_bw = s.sps[incumbent].bandwidth_hz;
    let src_before = sp_throughput(t, incumbent, &src_members, src_bw);
    let src_after = sp_throughput(t, incumbent, &src_members_after, src_bw);

    let rate_now = radio::ue_rate(ue, a, t);
    let required = s.ues[ue].min_rate_bps;
    let incumbent_contrib = a.y[(ue, incumbent)] * t.efficiency(ue, incumbent);

    let mut options = vec![SelectionOption {
        sp: incumbent,
        delta_sum_rate: 0.0,
        meets_qos: rate_now >= required,
        tolerance: 0.0,
    }];
    for &cand in &candidates {
        let members = a.members(cand);
        if members.len() >= s.sps[cand].ue_cap {
            continue;
        }
        let mut joined = members.clone();
        let pos = joined.partition_point(|&k| k < ue);
        joined.insert(pos, ue);
        let bw = s.sps[cand].bandwidth_hz;
        let dst_before = sp_throughput(t, cand, &members, bw);
        let dst_after = sp_throughput(t, cand, &joined, bw);
        let before = src_before + dst_before;
        let after = src_after + dst_after;

        let shares = proportional_shares(t, cand, &joined, bw);
        let new_contrib = shares[pos] * t.efficiency(ue, cand);
        let rate_after = rate_now - incumbent_contrib + new_contrib;

        options.push(SelectionOption {
            sp: cand,
            delta_sum_rate: after - before,
            meets_qos: rate_after >= required,
            tolerance: IMPROVEMENT_REL_TOL * before.max(after),
        });
    }

    let pick = options[select_option(&options, cfg.qos_aware)];
    if pick.sp != incumbent {
        a.x[(ue, incumbent)] = false;
        a.x[(ue, pick.sp)] = true;
        reallocate_proportional(a, incumbent, t, s);
        reallocate_proportional(a, pick.sp, t, s);
    }
    Selection {
        chosen_sp: pick.sp,
        delta_sum_rate: pick.delta_sum_rate,
    }
}

/// Repeated sweeps of [`sp_selection_for_ue`] over SPs in id order until the
/// sum-rate changes by less than `epsilon` between sweeps or `max_iters`
/// sweeps have run.
pub fn refine_assignment(
    a0: Assignment,
    t: &SinrTable,
    s: &Scenario,
    cfg: &SolverConfig,
) -> (Assignment, RefinementTrace) {
    let mut a = a0;
    let eps_bps = cfg.epsilon_mbps * 1e6;
    let initial = radio::sum_rate(&a, t);
    let mut trace = RefinementTrace {
        initial_sum_rate: initial,
        sum_rates: Vec::new(),
        iterations_run: 0,
        converged: false,
    };
    let mut prev = initial;
    for _ in 0..cfg.max_iters {
        for sp in 0..s.sps.len() {
            for ue in a.members(sp) {
                // A UE handled earlier in this SP's list never leaves `sp`
                // on another UE's behalf, but check anyway.
                if a.is_linked(ue, sp) {
                    sp_selection_for_ue(ue, sp, &mut a, t, s, cfg);
                }
            }
        }
        let now = radio::sum_rate(&a, t);
        trace.sum_rates.push(now);
        trace.iterations_run += 1;
        if (now - prev).abs() < eps_bps {
            trace.converged = true;
            break;
        }
        prev = now;
    }
    (a, trace)
}

/// Full heuristic: initial phase, then refinement.
pub fn solve_heuristic(
    t: &SinrTable,
    s: &Scenario,
    cfg: &SolverConfig,
) -> (Assignment, SolverReport) {
    let ((a, trace), wall) = measure_runtime(|| {
        let a0 = initial_assignment_phase(t, s);
        refine_assignment(a0, t, s, cfg)
    });
    let report = SolverReport {
        solver: "heuristic".into(),
        sum_rate_bps: radio::sum_rate(&a, t),
        success_prob: radio::success_probability(&a, t, s),
        iterations: trace.iterations_run,
        wall_time_s: wall,
        converged: trace.converged,
        trace: Some(trace),
    };
    (a, report)
}

pub fn solve_baseline(t: &SinrTable, s: &Scenario) -> (Assignment, SolverReport) {
    let (a, wall) = measure_runtime(|| round_robin_baseline(t, s));
    let report = SolverReport {
        solver: "baseline".into(),
        sum_rate_bps: radio::sum_rate(&a, t),
        success_prob: radio::success_probability(&a, t, s),
        iterations: 0,
        wall_time_s: wall,
        converged: true,
        trace: None,
    };
    (a, report)
}
