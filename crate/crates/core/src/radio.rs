//! Power plan, SINR table, rates and constraint checking.

use serde::{Deserialize, Serialize};

use crate::channel::CsiSnapshot;
use crate::matrix::Matrix;
use crate::scenario::Scenario;

/// Fixed per-stream transmit powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPlan {
    /// Power each SP spends on one UE stream, indexed by SP.
    pub sp_stream_w: Vec<f64>,
    /// Power each jammer aims at one UE, indexed by jammer.
    pub jam_stream_w: Vec<f64>,
}

/// Uniform allocation: an SP splits its budget over its UE cap, a jammer over
/// all UEs. Neither depends on the association, so the SINR table can be
/// computed before any UE is assigned.
pub fn uniform_power_plan(s: &Scenario) -> PowerPlan {
    let u = s.ues.len() as f64;
    PowerPlan {
        sp_stream_w: s
            .sps
            .iter()
            .map(|sp| sp.max_power_w / sp.ue_cap as f64)
            .collect(),
        jam_stream_w: s.jammers.iter().map(|jm| jm.max_power_w / u).collect(),
    }
}

impl PowerPlan {
    /// Worst-case budget check: every SP serving `ue_cap` streams and every
    /// jammer targeting every UE must stay within its maximum power.
    pub fn within_budget(&self, s: &Scenario) -> bool {
        let slack = 1.0 + 1e-12;
        let sp_ok = s
            .sps
            .iter()
            .zip(&self.sp_stream_w)
            .all(|(sp, &eta)| eta > 0.0 && eta * sp.ue_cap as f64 <= sp.max_power_w * slack);
        let jam_ok = s
            .jammers
            .iter()
            .zip(&self.jam_stream_w)
            .all(|(jm, &eta)| eta > 0.0 && eta * s.ues.len() as f64 <= jm.max_power_w * slack);
        sp_ok && jam_ok
    }
}

/// Linear SINR of every UE–SP link, U × J.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrTable {
    pub gamma: Matrix<f64>,
}

impl SinrTable {
    /// Table from explicit rows (one per UE).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        Self {
            gamma: Matrix::from_rows(rows),
        }
    }

    #[inline]
    pub fn get(&self, ue: usize, sp: usize) -> f64 {
        self.gamma[(ue, sp)]
    }

    pub fn num_ues(&self) -> usize {
        self.gamma.rows()
    }

    pub fn num_sps(&self) -> usize {
        self.gamma.cols()
    }

    /// Spectral efficiency `log2(1 + Γ)` of a link, bits/s/Hz.
    #[inline]
    pub fn efficiency(&self, ue: usize, sp: usize) -> f64 {
        self.get(ue, sp).ln_1p() / std::f64::consts::LN_2
    }
}

/// Γ_ij = η_j‖h_ij‖² / (Σ_{p same RAT, p≠j} η_p‖h_ip‖² + Σ_l η_l‖h_il‖² + σ²).
///
/// Interference only comes from SPs of j's RAT; the two RATs use disjoint
/// bands.
pub fn sinr_table(snap: &CsiSnapshot, plan: &PowerPlan, s: &Scenario) -> SinrTable {
    let (u, j) = (s.ues.len(), s.sps.len());
    assert_eq!(
        snap.sp_gain.rows(),
        u,
        "snapshot/scenario UE count mismatch"
    );
    assert_eq!(
        snap.sp_gain.cols(),
        j,
        "snapshot/scenario SP count mismatch"
    );
    assert_eq!(
        snap.jam_gain.cols(),
        s.jammers.len(),
        "snapshot/scenario jammer count mismatch"
    );
    let noise = s.config.noise_power_w;

    let mut gamma = Matrix::filled(u, j, 0.0);
    for i in 0..u {
        let jam: f64 = plan
            .jam_stream_w
            .iter()
            .zip(snap.jam_gain.row(i))
            .map(|(eta, g)| eta * g)
            .sum();
        let rx: Vec<f64> = plan
            .sp_stream_w
            .iter()
            .zip(snap.sp_gain.row(i))
            .map(|(eta, g)| eta * g)
            .collect();
        for sp in 0..j {
            let rat = s.sps[sp].rat;
            let co_channel: f64 = (0..j)
                .filter(|&p| p != sp && s.sps[p].rat == rat)
                .map(|p| rx[p])
                .sum();
            gamma[(i, sp)] = rx[sp] / (co_channel + jam + noise);
        }
    }
    SinrTable { gamma }
}

/// Association `x` and bandwidth `y`, both U × J.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub x: Matrix<bool>,
    /// Hertz.
    pub y: Matrix<f64>,
}

impl Assignment {
    pub fn empty(ues: usize, sps: usize) -> Self {
        Self {
            x: Matrix::filled(ues, sps, false),
            y: Matrix::filled(ues, sps, 0.0),
        }
    }

    pub fn num_ues(&self) -> usize {
        self.x.rows()
    }

    pub fn num_sps(&self) -> usize {
        self.x.cols()
    }

    #[inline]
    pub fn is_linked(&self, ue: usize, sp: usize) -> bool {
        self.x[(ue, sp)]
    }

    /// UEs associated with `sp`, ascending.
    pub fn members(&self, sp: usize) -> Vec<usize> {
        (0..self.num_ues()).filter(|&i| self.x[(i, sp)]).collect()
    }

    pub fn member_count(&self, sp: usize) -> usize {
        (0..self.num_ues()).filter(|&i| self.x[(i, sp)]).count()
    }

    /// SPs serving `ue`, ascending.
    pub fn serving(&self, ue: usize) -> Vec<usize> {
        (0..self.num_sps()).filter(|&j| self.x[(ue, j)]).collect()
    }

    pub fn degree(&self, ue: usize) -> usize {
        self.x.row(ue).iter().filter(|&&b| b).count()
    }

    pub fn allocated(&self, sp: usize) -> f64 {
        (0..self.num_ues())
            .filter(|&i| self.x[(i, sp)])
            .map(|i| self.y[(i, sp)])
            .sum()
    }
}

/// R_i = Σ_j x_ij·y_ij·log2(1 + Γ_ij).
pub fn ue_rate(ue: usize, a: &Assignment, t: &SinrTable) -> f64 {
    (0..a.num_sps())
        .filter(|&j| a.x[(ue, j)])
        .map(|j| a.y[(ue, j)] * t.efficiency(ue, j))
        .sum()
}

pub fn sum_rate(a: &Assignment, t: &SinrTable) -> f64 {
    (0..a.num_ues()).map(|i| ue_rate(i, a, t)).sum()
}

/// Fraction of UEs with `R_i >= R̄_i`.
pub fn success_probability(a: &Assignment, t: &SinrTable, s: &Scenario) -> f64 {
    let met = s
        .ues
        .iter()
        .filter(|ue| ue_rate(ue.id, a, t) >= ue.min_rate_bps)
        .count();
    met as f64 / s.ues.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// Total bandwidth handed out by an SP exceeds its budget.
    BandwidthExceeded {
        sp: usize,
        allocated_hz: f64,
        capacity_hz: f64,
    },
    /// More UEs than the SP's cap.
    SpOverloaded {
        sp: usize,
        associated: usize,
        cap: usize,
    },
    /// A UE holds more associations than the multi-connectivity limit.
    UeOverConnected {
        ue: usize,
        associated: usize,
        limit: usize,
    },
    /// Positive bandwidth on a link that is not associated.
    BandwidthOnInactiveLink {
        ue: usize,
        sp: usize,
        bandwidth_hz: f64,
    },
    /// Negative or non-finite bandwidth.
    InvalidBandwidth {
        ue: usize,
        sp: usize,
        bandwidth_hz: f64,
    },
}

/// Relative slack on the per-SP bandwidth budget, absorbing summation
/// rounding only.
pub const BANDWIDTH_REL_TOL: f64 = 1e-12;

/// Checks the bandwidth, SP-cap and per-UE association limits, plus the
/// structural invariants on `y`. The minimum-rate constraint is reported
/// separately by [`qos_report`].
pub fn validate_assignment(a: &Assignment, s: &Scenario) -> Vec<Violation> {
    let expected = (s.ues.len(), s.sps.len());
    for found in [(a.x.rows(), a.x.cols()), (a.y.rows(), a.y.cols())] {
        if found != expected {
            return vec![Violation::ShapeMismatch { expected, found }];
        }
    }
    let mut out = Vec::new();
    for (i, ue) in s.ues.iter().enumerate() {
        for j in 0..s.sps.len() {
            let y = a.y[(i, j)];
            if !(y.is_finite() && y >= 0.0) {
                out.push(Violation::InvalidBandwidth {
                    ue: i,
                    sp: j,
                    bandwidth_hz: y,
                });
            } else if y > 0.0 && !a.x[(i, j)] {
                out.push(Violation::BandwidthOnInactiveLink {
                    ue: i,
                    sp: j,
                    bandwidth_hz: y,
                });
            }
        }
        let degree = a.degree(i);
        if degree > s.config.multi_conn {
            out.push(Violation::UeOverConnected {
                ue: ue.id,
                associated: degree,
                limit: s.config.multi_conn,
            });
        }
    }
    for sp in &s.sps {
        let allocated = a.allocated(sp.id);
        if allocated > sp.bandwidth_hz * (1.0 + BANDWIDTH_REL_TOL) {
            out.push(Violation::BandwidthExceeded {
                sp: sp.id,
                allocated_hz: allocated,
                capacity_hz: sp.bandwidth_hz,
            });
        }
        let count = a.member_count(sp.id);
        if count > sp.ue_cap {
            out.push(Violation::SpOverloaded {
                sp: sp.id,
                associated: count,
                cap: sp.ue_cap,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosStatus {
    pub ue: usize,
    pub rate_bps: f64,
    pub required_bps: f64,
    /// `rate − required`; negative when the requirement is missed.
    pub slack_bps: f64,
}

impl QosStatus {
    pub fn met(&self) -> bool {
        self.slack_bps >= 0.0
    }
}

pub fn qos_report(a: &Assignment, t: &SinrTable, s: &Scenario) -> Vec<QosStatus> {
    s.ues
        .iter()
        .map(|ue| {
            let rate = ue_rate(ue.id, a, t);
            QosStatus {
                ue: ue.id,
                rate_bps: rate,
                required_bps: ue.min_rate_bps,
                slack_bps: rate - ue.min_rate_bps,
            }
        })
        .collect()
}
