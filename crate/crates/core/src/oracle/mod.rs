//! Exact solver for small instances.
//!
//! Every association satisfying the SP caps and the per-UE limit is
//! enumerated (caps prune during the recursion), and for each one the
//! bandwidth is set by an exact LP: maximize Σ log2(1+Γ_ij)·y_ij subject to
//! the per-SP bandwidth budgets and, optionally, the per-UE minimum rates.
//! The best association wins; among equal optima the lexicographically
//! smallest association matrix is returned.

pub mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocator::SolverReport;
use crate::exec::Execution;
use crate::harness::measure_runtime;
use crate::matrix::Matrix;
use crate::radio::{self, Assignment, SinrTable};
use crate::scenario::Scenario;
use simplex::{Constraint, LpOutcome, Relation};

/// Upper bound on candidate associations the enumeration will accept.
pub const MAX_CANDIDATES: f64 = 1e7;

/// Objective values closer than this (relative) count as equal.
const TIE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance needs up to {candidates:.3e} candidate associations (limit {limit:.0e})")]
    BudgetExceeded { candidates: f64, limit: f64 },
    #[error("no association meets every UE's minimum rate")]
    Infeasible,
}

/// The bandwidth LP for a fixed association, over its active links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    /// Active links `(ue, sp)` in row-major order; one variable each.
    pub links: Vec<(usize, usize)>,
    /// log2(1 + Γ) per link, bits/s/Hz.
    pub efficiency: Vec<f64>,
    /// `(sp, W_sp)` for every SP with at least one link.
    pub sp_rows: Vec<(usize, f64)>,
    /// `(ue, R̄_ue)` for every UE whose requirement is enforced.
    pub qos_rows: Vec<(usize, f64)>,
}

impl LpProblem {
    pub fn new(x: &Matrix<bool>, t: &SinrTable, s: &Scenario, enforce_qos: bool) -> Self {
        let mut links = Vec::new();
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                if x[(i, j)] {
                    links.push((i, j));
                }
            }
        }
        let efficiency = links.iter().map(|&(i, j)| t.efficiency(i, j)).collect();
        let sp_rows = (0..x.cols())
            .filter(|&j| links.iter().any(|&(_, sp)| sp == j))
            .map(|j| (j, s.sps[j].bandwidth_hz))
            .collect();
        let qos_rows = if enforce_qos {
            s.ues
                .iter()
                .filter(|ue| ue.min_rate_bps > 0.0)
                .map(|ue| (ue.id, ue.min_rate_bps))
                .collect()
        } else {
            Vec::new()
        };
        Self {
            links,
            efficiency,
            sp_rows,
            qos_rows,
        }
    }

    fn constraints(&self) -> Vec<Constraint> {
        let n = self.links.len();
        let mut rows = Vec::with_capacity(self.sp_rows.len() + self.qos_rows.len());
        for &(sp, w) in &self.sp_rows {
            let coeffs = (0..n)
                .map(|k| if self.links[k].1 == sp { 1.0 } else { 0.0 })
                .collect();
            rows.push(Constraint {
                coeffs,
                relation: Relation::LessEq,
                rhs: w,
            });
        }
        for &(ue, r) in &self.qos_rows {
            let coeffs = (0..n)
                .map(|k| {
                    if self.links[k].0 == ue {
                        self.efficiency[k]
                    } else {
                        0.0
                    }
                })
                .collect();
            rows.push(Constraint {
                coeffs,
                relation: Relation::GreaterEq,
                rhs: r,
            });
        }
        rows
    }

    /// Solves the LP; `None` when the QoS rows cannot all be met.
    pub fn solve(&self) -> Option<(Vec<f64>, f64)> {
        // A UE with a requirement but no link can never meet it.
        if self
            .qos_rows
            .iter()
            .any(|&(ue, _)| !self.links.iter().any(|&(i, _)| i == ue))
        {
            return None;
        }
        match simplex::maximize(&self.efficiency, &self.constraints()) {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("every variable sits in a bounded SP row"),
        }
    }

    /// Closed-form optimum without QoS rows: each SP gives its whole budget
    /// to its most efficient link (lowest UE id on ties).
    pub fn winner_takes_all(&self) -> (Vec<f64>, f64) {
        let mut y = vec![0.0; self.links.len()];
        for &(sp, w) in &self.sp_rows {
            let mut best: Option<usize> = None;
            for k in (0..self.links.len()).filter(|&k| self.links[k].1 == sp) {
                if best.is_none_or(|b| self.efficiency[k] > self.efficiency[b]) {
                    best = Some(k);
                }
            }
            if let Some(k) = best {
                y[k] = w;
            }
        }
        let value = y.iter().zip(&self.efficiency).map(|(y, c)| y * c).sum();
        (y, value)
    }
}

/// Optimal bandwidth for a fixed association.
pub fn optimal_bandwidth_for_association(
    x: &Matrix<bool>,
    t: &SinrTable,
    s: &Scenario,
    enforce_qos: bool,
) -> Result<(Matrix<f64>, f64), OracleError> {
    let lp = LpProblem::new(x, t, s, enforce_qos);
    let (yv, value) = lp.solve().ok_or(OracleError::Infeasible)?;
    let mut y = Matrix::filled(x.rows(), x.cols(), 0.0);
    for (&(i, j), v) in lp.links.iter().zip(yv) {
        y[(i, j)] = v;
    }
    Ok((y, value))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper bound on the number of associations the enumeration may visit
/// (ignoring SP caps).
pub fn candidate_bound(s: &Scenario) -> f64 {
    let j = s.sps.len();
    let per_ue: f64 = (0..=s.config.multi_conn.min(j))
        .map(|k| binomial(j, k))
        .sum();
    per_ue.powi(s.ues.len() as i32)
}

/// All SP subsets of size ≤ `limit`, ordered as association-matrix rows
/// compare lexicographically (SP 0 most significant, unassociated < associated).
fn row_options(sps: usize, limit: usize) -> Vec<Vec<usize>> {
    fn extend(
        start: usize,
        sps: usize,
        limit: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(cur.clone());
        if cur.len() == limit {
            return;
        }
        for sp in start..sps {
            cur.push(sp);
            extend(sp + 1, sps, limit, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, sps, limit, &mut Vec::new(), &mut out);
    let key = |set: &Vec<usize>| {
        let mut row = vec![false; sps];
        for &sp in set {
            row[sp] = true;
        }
        row
    };
    out.sort_by_cached_key(key);
    out
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    x: Matrix<bool>,
    y: Matrix<f64>,
}

fn improves(candidate: f64, incumbent: &Option<Best>) -> bool {
    match incumbent {
        None => true,
        Some(b) => candidate > b.value + TIE_REL_TOL * b.value.abs().max(1.0),
    }
}

struct Search<'a> {
    t: &'a SinrTable,
    s: &'a Scenario,
    enforce_qos: bool,
    options: &'a [Vec<usize>],
    load: Vec<usize>,
    x: Matrix<bool>,
    best: Option<Best>,
    visited: usize,
}

impl Search<'_> {
    fn fits(&self, set: &[usize]) -> bool {
        set.iter().all(|&sp| self.load[sp] < self.s.sps[sp].ue_cap)
    }

    fn set_row(&mut self, ue: usize, set: &[usize], on: bool) {
        for &sp in set {
            self.x[(ue, sp)] = on;
            if on {
                self.load[sp] += 1;
            } else {
                self.load[sp] -= 1;
            }
        }
    }

    fn recurse(&mut self, ue: usize) {
        if ue == self.s.ues.len() {
            self.visited += 1;
            let lp = LpProblem::new(&self.x, self.t, self.s, self.enforce_qos);
            if let Some((yv, value)) = lp.solve() {
                if improves(value, &self.best) {
                    let mut y = Matrix::filled(self.x.rows(), self.x.cols(), 0.0);
                    for (&(i, j), v) in lp.links.iter().zip(yv) {
                        y[(i, j)] = v;
                    }
                    self.best = Some(Best {
                        value,
                        x: self.x.clone(),
                        y,
                    });
                }
            }
            return;
        }
        for k in 0..self.options.len() {
            let set = &self.options[k];
            if !self.fits(set) {
                continue;
            }
            let set = set.clone();
            self.set_row(ue, &set, true);
            self.recurse(ue + 1);
            self.set_row(ue, &set, false);
        }
    }
}

/// Global optimum by exhaustive enumeration. Branches over the first UE's
/// options fan out under `exec`; their winners are merged in branch order,
/// so the result does not depend on scheduling.
pub fn solve_exact(
    t: &SinrTable,
    s: &Scenario,
    enforce_qos: bool,
    exec: Execution,
) -> Result<(Assignment, SolverReport), OracleError> {
    let bound = candidate_bound(s);
    if bound > MAX_CANDIDATES {
        return Err(OracleError::BudgetExceeded {
            candidates: bound,
            limit: MAX_CANDIDATES,
        });
    }
    let ((best, visited), wall) = measure_runtime(|| {
        let (u, j) = (s.ues.len(), s.sps.len());
        let options = row_options(j, s.config.multi_conn.min(j));
        let branches = exec.map_slice(&options, |first| {
            let mut search = Search {
                t,
                s,
                enforce_qos,
                options: &options,
                load: vec![0; j],
                x: Matrix::filled(u, j, false),
                best: None,
                visited: 0,
            };
            if !search.fits(first) {
                return (None, 0);
            }
            search.set_row(0, first, true);
            search.recurse(1);
            (search.best, search.visited)
        });
        let mut best: Option<Best> = None;
        let mut visited = 0;
        for (b, n) in branches {
            visited += n;
            if let Some(b) = b {
                if improves(b.value, &best) {
                    best = Some(b);
                }
            }
        }
        (best, visited)
    });
    let best = best.ok_or(OracleError::Infeasible)?;
    let a = Assignment {
        x: best.x,
        y: best.y,
    };
    let report = SolverReport {
        solver: "oracle".into(),
        sum_rate_bps: radio::sum_rate(&a, t),
        success_prob: radio::success_probability(&a, t, s),
        iterations: visited,
        wall_time_s: wall,
        converged: true,
        trace: None,
    };
    Ok((a, report))
}
