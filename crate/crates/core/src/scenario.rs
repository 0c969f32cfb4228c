//! Physical world state: service points (5G NR base stations and WiFi 6
//! access points), user equipment, and UAV-mounted jammers.
//!
//! A [`Scenario`] is generated from a [`ScenarioConfig`] as a pure function of
//! its seed and is immutable afterwards. Scenarios persist as a JSON document
//! whose field names carry SI units.

use std::fmt;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

/// Rejection-sampling attempts per service point before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error("cannot place {rat} point {index}: no position at least {spacing_m} m from the others after {attempts} attempts")]
    PlacementInfeasible {
        rat: RatKind,
        index: usize,
        spacing_m: f64,
        attempts: usize,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("scenario fails validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RatKind {
    Nr5g,
    Wifi6,
}

impl fmt::Display for RatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatKind::Nr5g => f.write_str("5G NR"),
            RatKind::Wifi6 => f.write_str("WiFi 6"),
        }
    }
}

/// Radio parameters shared by every service point of one RAT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioProfile {
    pub antennas: usize,
    pub max_power_w: f64,
    pub bandwidth_hz: f64,
    pub ue_cap: usize,
    pub carrier_hz: f64,
}

impl RadioProfile {
    fn check(&self, what: &str) -> Result<(), String> {
        if self.antennas < 1 {
            return Err(format!("{what}: antennas must be >= 1"));
        }
        if !(self.max_power_w > 0.0 && self.max_power_w.is_finite()) {
            return Err(format!("{what}: max_power_w must be positive"));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(format!("{what}: bandwidth_hz must be positive"));
        }
        if self.ue_cap < 1 {
            return Err(format!("{what}: ue_cap must be >= 1"));
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(format!("{what}: carrier_hz must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JammerProfile {
    pub antennas: usize,
    pub max_power_w: f64,
    pub altitude_m: f64,
    pub speed_mps: f64,
    /// Emitted frequency of the jamming signal.
    pub carrier_hz: f64,
}

impl JammerProfile {
    fn check(&self) -> Result<(), String> {
        if self.antennas < 1 {
            return Err("jammer: antennas must be >= 1".into());
        }
        if !(self.max_power_w > 0.0 && self.max_power_w.is_finite()) {
            return Err("jammer: max_power_w must be positive".into());
        }
        if !(self.altitude_m > 0.0 && self.altitude_m.is_finite()) {
            return Err("jammer: altitude_m must be positive".into());
        }
        if !(self.speed_mps >= 0.0 && self.speed_mps.is_finite()) {
            return Err("jammer: speed_mps must be non-negative".into());
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err("jammer: carrier_hz must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Side of the square service area.
    pub area_side_m: f64,
    pub num_bs: usize,
    pub num_ap: usize,
    pub num_ue: usize,
    pub num_jammers: usize,
    /// Minimum distance between two service points of the same RAT.
    pub min_sp_spacing_m: f64,
    pub nr: RadioProfile,
    pub wifi: RadioProfile,
    pub jammer: JammerProfile,
    /// Maximum number of simultaneous SP associations per UE.
    pub multi_conn: usize,
    pub noise_power_w: f64,
    /// Minimum rate requirement given to every generated UE.
    pub min_rate_bps: f64,
    pub rng_seed: u64,
}

impl ScenarioConfig {
    /// Full-scale setup: 20 BSs + 20 APs, 40 UEs, 10 jammers on a 1 km square.
    pub fn paper() -> Self {
        Self {
            area_side_m: 1000.0,
            num_bs: 20,
            num_ap: 20,
            num_ue: 40,
            num_jammers: 10,
            min_sp_spacing_m: 100.0,
            nr: RadioProfile {
                antennas: 32,
                max_power_w: 100.0,
                bandwidth_hz: 100e6,
                ue_cap: 20,
                carrier_hz: 25e9,
            },
            wifi: RadioProfile {
                antennas: 8,
                max_power_w: 40.0,
                bandwidth_hz: 80e6,
                ue_cap: 8,
                carrier_hz: 6e9,
            },
            jammer: JammerProfile {
                antennas: 4,
                max_power_w: 20.0,
                altitude_m: 100.0,
                speed_mps: 10.0,
                carrier_hz: 6e9,
            },
            multi_conn: 1,
            noise_power_w: 1e-9,
            min_rate_bps: 0.5e6,
            rng_seed: 0,
        }
    }

    /// Desk-scale setup small enough for the exact solver: 2 BSs + 2 APs,
    /// 4 UEs, 1 jammer, with UE caps scaled down to 2 (BS) and 1 (AP).
    pub fn desk() -> Self {
        let mut cfg = Self::paper();
        cfg.area_side_m = 500.0;
        cfg.num_bs = 2;
        cfg.num_ap = 2;
        cfg.num_ue = 4;
        cfg.num_jammers = 1;
        cfg.nr.ue_cap = 2;
        cfg.wifi.ue_cap = 1;
        cfg
    }

    pub fn num_sps(&self) -> usize {
        self.num_bs + self.num_ap
    }

    pub fn profile(&self, rat: RatKind) -> &RadioProfile {
        match rat {
            RatKind::Nr5g => &self.nr,
            RatKind::Wifi6 => &self.wifi,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.check().map_err(ScenarioError::InvalidConfig)
    }

    fn check(&self) -> Result<(), String> {
        if !(self.area_side_m > 0.0 && self.area_side_m.is_finite()) {
            return Err("area_side_m must be positive".into());
        }
        if self.num_ue < 1 {
            return Err("at least one UE is required".into());
        }
        if self.multi_conn < 1 {
            return Err("multi_conn must be >= 1".into());
        }
        if !(self.noise_power_w > 0.0 && self.noise_power_w.is_finite()) {
            return Err("noise_power_w must be positive".into());
        }
        if !(self.min_sp_spacing_m >= 0.0 && self.min_sp_spacing_m.is_finite()) {
            return Err("min_sp_spacing_m must be non-negative".into());
        }
        if !(self.min_rate_bps >= 0.0 && self.min_rate_bps.is_finite()) {
            return Err("min_rate_bps must be non-negative".into());
        }
        self.nr.check("nr")?;
        self.wifi.check("wifi")?;
        self.jammer.check()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServicePoint {
    pub id: usize,
    pub rat: RatKind,
    pub position_m: [f64; 2],
    pub antennas: usize,
    pub max_power_w: f64,
    pub bandwidth_hz: f64,
    pub ue_cap: usize,
    pub carrier_hz: f64,
}

impl ServicePoint {
    fn new(id: usize, rat: RatKind, position_m: [f64; 2], p: &RadioProfile) -> Self {
        Self {
            id,
            rat,
            position_m,
            antennas: p.antennas,
            max_power_w: p.max_power_w,
            bandwidth_hz: p.bandwidth_hz,
            ue_cap: p.ue_cap,
            carrier_hz: p.carrier_hz,
        }
    }

    fn matches_profile(&self, p: &RadioProfile) -> bool {
        self.antennas == p.antennas
            && self.max_power_w == p.max_power_w
            && self.bandwidth_hz == p.bandwidth_hz
            && self.ue_cap == p.ue_cap
            && self.carrier_hz == p.carrier_hz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    pub id: usize,
    pub position_m: [f64; 2],
    pub min_rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jammer {
    pub id: usize,
    pub position_m: [f64; 2],
    pub altitude_m: f64,
    pub antennas: usize,
    pub max_power_w: f64,
    pub speed_mps: f64,
    pub carrier_hz: f64,
}

/// Immutable network layout. Service points are ordered base stations first,
/// then access points; ids equal positions in each list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub sps: Vec<ServicePoint>,
    pub ues: Vec<UserEquipment>,
    pub jammers: Vec<Jammer>,
}

pub fn planar_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Draws a scenario from `cfg`. Identical configs give bit-identical results.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    cfg.validate()?;
    let mut rng = rng::seeded(cfg.rng_seed);
    let side = cfg.area_side_m;

    let mut sps = Vec::with_capacity(cfg.num_sps());
    for (rat, count) in [(RatKind::Nr5g, cfg.num_bs), (RatKind::Wifi6, cfg.num_ap)] {
        let placed = place_spaced(&mut rng, rat, count, side, cfg.min_sp_spacing_m)?;
        let profile = cfg.profile(rat);
        for pos in placed {
            sps.push(ServicePoint::new(sps.len(), rat, pos, profile));
        }
    }

    let ues = (0..cfg.num_ue)
        .map(|id| UserEquipment {
            id,
            position_m: uniform_point(&mut rng, side),
            min_rate_bps: cfg.min_rate_bps,
        })
        .collect();

    let j = &cfg.jammer;
    let jammers = (0..cfg.num_jammers)
        .map(|id| Jammer {
            id,
            position_m: uniform_point(&mut rng, side),
            altitude_m: j.altitude_m,
            antennas: j.antennas,
            max_power_w: j.max_power_w,
            speed_mps: j.speed_mps,
            carrier_hz: j.carrier_hz,
        })
        .collect();

    Ok(Scenario {
        config: cfg.clone(),
        sps,
        ues,
        jammers,
    })
}

fn uniform_point<R: Rng>(rng: &mut R, side: f64) -> [f64; 2] {
    [rng.random::<f64>() * side, rng.random::<f64>() * side]
}

fn place_spaced<R: Rng>(
    rng: &mut R,
    rat: RatKind,
    count: usize,
    side: f64,
    spacing: f64,
) -> Result<Vec<[f64; 2]>, ScenarioError> {
    let infeasible = |index| ScenarioError::PlacementInfeasible {
        rat,
        index,
        spacing_m: spacing,
        attempts: MAX_PLACEMENT_ATTEMPTS,
    };
    // Two points can never be farther apart than the diagonal.
    if count >= 2 && spacing > side * std::f64::consts::SQRT_2 {
        return Err(infeasible(1));
    }
    let mut placed: Vec<[f64; 2]> = Vec::with_capacity(count);
    for index in 0..count {
        let mut accepted = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = uniform_point(rng, side);
            if placed.iter().all(|&q| planar_distance(p, q) >= spacing) {
                accepted = Some(p);
                break;
            }
        }
        placed.push(accepted.ok_or_else(|| infeasible(index))?);
    }
    Ok(placed)
}

impl Scenario {
    pub fn num_sps(&self) -> usize {
        self.sps.len()
    }

    pub fn num_ues(&self) -> usize {
        self.ues.len()
    }

    /// Checks every structural invariant. Loaded documents go through this.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.check().map_err(ScenarioError::Validation)
    }

    fn check(&self) -> Result<(), String> {
        let cfg = &self.config;
        cfg.check()?;
        if self.sps.len() != cfg.num_sps() {
            return Err(format!(
                "expected {} service points, found {}",
                cfg.num_sps(),
                self.sps.len()
            ));
        }
        if self.ues.len() != cfg.num_ue {
            return Err(format!(
                "expected {} UEs, found {}",
                cfg.num_ue,
                self.ues.len()
            ));
        }
        if self.jammers.len() != cfg.num_jammers {
            return Err(format!(
                "expected {} jammers, found {}",
                cfg.num_jammers,
                self.jammers.len()
            ));
        }
        let side = cfg.area_side_m;
        let inside = |p: [f64; 2]| p.iter().all(|c| (0.0..=side).contains(c));

        for (k, sp) in self.sps.iter().enumerate() {
            if sp.id != k {
                return Err(format!("service point at index {k} has id {}", sp.id));
            }
            let expected = if k < cfg.num_bs {
                RatKind::Nr5g
            } else {
                RatKind::Wifi6
            };
            if sp.rat != expected {
                return Err(format!("service point {k} should be {expected}"));
            }
            if !sp.matches_profile(cfg.profile(sp.rat)) {
                return Err(format!(
                    "service point {k} deviates from the {} profile",
                    sp.rat
                ));
            }
            if !inside(sp.position_m) {
                return Err(format!("service point {k} lies outside the area"));
            }
        }
        for a in 0..self.sps.len() {
            for b in a + 1..self.sps.len() {
                let (p, q) = (&self.sps[a], &self.sps[b]);
                if p.rat == q.rat
                    && planar_distance(p.position_m, q.position_m) < cfg.min_sp_spacing_m
                {
                    return Err(format!(
                        "service points {a} and {b} are closer than min_sp_spacing_m"
                    ));
                }
            }
        }
        for (k, ue) in self.ues.iter().enumerate() {
            if ue.id != k {
                return Err(format!("UE at index {k} has id {}", ue.id));
            }
            if !inside(ue.position_m) {
                return Err(format!("UE {k} lies outside the area"));
            }
            if !(ue.min_rate_bps >= 0.0 && ue.min_rate_bps.is_finite()) {
                return Err(format!("UE {k} has a negative min_rate_bps"));
            }
        }
        for (k, jm) in self.jammers.iter().enumerate() {
            if jm.id != k {
                return Err(format!("jammer at index {k} has id {}", jm.id));
            }
            if !inside(jm.position_m) {
                return Err(format!("jammer {k} lies outside the area"));
            }
            if jm.antennas < 1 {
                return Err(format!("jammer {k} has no antennas"));
            }
            if !(jm.max_power_w > 0.0 && jm.max_power_w.is_finite()) {
                return Err(format!("jammer {k} must have positive max_power_w"));
            }
            if !(jm.altitude_m > 0.0 && jm.altitude_m.is_finite()) {
                return Err(format!("jammer {k} must have positive altitude_m"));
            }
            if !(jm.speed_mps >= 0.0 && jm.carrier_hz > 0.0) {
                return Err(format!("jammer {k} has invalid speed or carrier"));
            }
        }
        Ok(())
    }
}

pub fn save_scenario<W: Write>(s: &Scenario, sink: W) -> Result<(), ScenarioError> {
    write_json(s, sink)
}

pub fn load_scenario<R: Read>(source: R) -> Result<Scenario, ScenarioError> {
    let s: Scenario = read_json(source)?;
    s.validate()?;
    Ok(s)
}

pub(crate) fn write_json<T: Serialize, W: Write>(
    value: &T,
    mut sink: W,
) -> Result<(), ScenarioError> {
    serde_json::to_writer_pretty(&mut sink, value).map_err(|e| match e.io_error_kind() {
        Some(kind) => ScenarioError::Io(std::io::Error::new(kind, e.to_string())),
        None => ScenarioError::Validation(e.to_string()),
    })?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned, R: Read>(
    source: R,
) -> Result<T, ScenarioError> {
    serde_json::from_reader(source).map_err(|e| {
        if e.is_io() {
            let kind = e.io_error_kind().unwrap_or(std::io::ErrorKind::Other);
            ScenarioError::Io(std::io::Error::new(kind, e.to_string()))
        } else {
            ScenarioError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::paper();
        cfg.num_bs = 0;
        cfg.num_ap = 1;
        cfg.num_ue = 1;
        cfg.num_jammers = 0;
        cfg.min_sp_spacing_m = 0.0;
        cfg
    }

    #[test]
    fn full_scale_counts() {
        let mut cfg = ScenarioConfig::paper();
        cfg.rng_seed = 1;
        let s = generate_scenario(&cfg).unwrap();
        assert_eq!(s.sps.len(), 40);
        assert_eq!(
            s.sps.iter().filter(|sp| sp.rat == RatKind::Nr5g).count(),
            20
        );
        assert_eq!(s.ues.len(), 40);
        assert_eq!(s.jammers.len(), 10);
        s.validate().unwrap();
    }

    #[test]
    fn degenerate_minimum() {
        let s = generate_scenario(&tiny()).unwrap();
        assert_eq!(s.sps.len(), 1);
        assert_eq!(s.sps[0].rat, RatKind::Wifi6);
        assert_eq!(s.ues.len(), 1);
        assert!(s.jammers.is_empty());
    }

    #[test]
    fn spacing_beyond_diagonal_is_infeasible() {
        let mut cfg = tiny();
        cfg.num_bs = 2;
        cfg.num_ap = 0;
        cfg.area_side_m = 50.0;
        cfg.min_sp_spacing_m = 100.0;
        assert!(matches!(
            generate_scenario(&cfg),
            Err(ScenarioError::PlacementInfeasible {
                rat: RatKind::Nr5g,
                ..
            })
        ));
    }

    #[test]
    fn crowded_area_exhausts_attempts() {
        // Diagonal check passes but 50 points cannot fit at 60 m in 100 m.
        let mut cfg = tiny();
        cfg.num_ap = 50;
        cfg.area_side_m = 100.0;
        cfg.min_sp_spacing_m = 60.0;
        match generate_scenario(&cfg) {
            Err(ScenarioError::PlacementInfeasible { attempts, .. }) => {
                assert_eq!(attempts, MAX_PLACEMENT_ATTEMPTS)
            }
            other => panic!("expected infeasible placement, got {other:?}"),
        }
    }

    #[test]
    fn spacing_only_binds_within_a_rat() {
        // One BS and one AP may sit anywhere relative to each other.
        let mut cfg = tiny();
        cfg.num_bs = 1;
        cfg.area_side_m = 10.0;
        cfg.min_sp_spacing_m = 1000.0;
        assert!(generate_scenario(&cfg).is_ok());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = tiny();
        cfg.num_ue = 0;
        assert!(matches!(
            generate_scenario(&cfg),
            Err(ScenarioError::InvalidConfig(_))
        ));
        let mut cfg = tiny();
        cfg.noise_power_w = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = tiny();
        cfg.multi_conn = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = ScenarioConfig::paper();
        cfg.rng_seed = 9;
        let s = generate_scenario(&cfg).unwrap();
        let mut buf = Vec::new();
        save_scenario(&s, &mut buf).unwrap();
        assert_eq!(load_scenario(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn ue_outside_area_fails_validation() {
        let s = generate_scenario(&ScenarioConfig::desk()).unwrap();
        let mut v = serde_json::to_value(&s).unwrap();
        v["ues"][0]["position_m"][0] = serde_json::json!(5000.0);
        let doc = serde_json::to_vec(&v).unwrap();
        assert!(matches!(
            load_scenario(doc.as_slice()),
            Err(ScenarioError::Validation(_))
        ));
    }

    #[test]
    fn missing_altitude_names_the_field() {
        let s = generate_scenario(&ScenarioConfig::desk()).unwrap();
        let mut v = serde_json::to_value(&s).unwrap();
        v["jammers"][0]
            .as_object_mut()
            .unwrap()
            .remove("altitude_m");
        let doc = serde_json::to_vec_pretty(&v).unwrap();
        match load_scenario(doc.as_slice()) {
            Err(ScenarioError::Parse { message, line, .. }) => {
                assert!(message.contains("altitude_m"), "{message}");
                assert!(line > 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_document_is_a_parse_error() {
        let err = load_scenario(&b"{\"config\": 3"[..]).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { .. }));
    }
}
