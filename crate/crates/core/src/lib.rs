//! Multi-RAT (5G NR + WiFi 6) downlink simulator with UAV jammers, and a
//! solver suite for joint UE–SP association and bandwidth assignment.
//!
//! The pipeline mirrors how a central controller would use a network
//! replica as its source of channel knowledge:
//!
//! 1. [`scenario`] generates (or loads) the physical layout.
//! 2. [`channel`] turns the layout into a [`channel::CsiSnapshot`].
//! 3. [`radio`] fixes the power plan and derives the [`radio::SinrTable`].
//! 4. [`allocator`] (two-phase heuristic, Round-Robin baseline) and
//!    [`oracle`] (exhaustive enumeration + LP) produce an
//!    [`radio::Assignment`].
//!
//! [`harness`] runs paired experiments over seeds and sweeps, and emits CSV.
//!
//! With the default `parallel` feature, snapshot construction, oracle
//! enumeration and experiment sweeps fan out over rayon. Every parallel path
//! produces the same bytes as its sequential counterpart.

pub mod allocator;
pub mod channel;
pub mod exec;
pub mod harness;
pub mod matrix;
pub mod oracle;
pub mod radio;
pub mod rng;
pub mod scenario;

pub use allocator::{solve_heuristic, RefinementTrace, SolverConfig, SolverReport};
pub use channel::{build_csi_snapshot, ChannelParams, CsiSnapshot};
pub use exec::Execution;
pub use matrix::Matrix;
pub use oracle::solve_exact;
pub use radio::{sinr_table, uniform_power_plan, Assignment, PowerPlan, SinrTable};
pub use scenario::{generate_scenario, Scenario, ScenarioConfig};
