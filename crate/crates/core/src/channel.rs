//! Geometric multipath channels between service points, jammers and UEs.
//!
//! Each link is one LOS component plus `Q` (or `Z`) NLOS components, every
//! component a complex Gaussian amplitude times a uniform-linear-array
//! steering vector. Component variance is the linear inverse of the link's
//! log-distance path loss with log-normal shadowing. Jammer links add the
//! air-to-ground corrections: receiver height offset, constant loss and an
//! optional Doppler term.
//!
//! The resulting [`CsiSnapshot`] stores only the squared norms `‖h‖²`, which is
//! all the SINR computation consumes.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::matrix::Matrix;
use crate::rng;
use crate::scenario::{self, Jammer, Scenario, ScenarioError, ServicePoint, UserEquipment};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type ComplexVector = Vec<Complex64>;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("link distance {distance_m} m is below the reference distance {ref_distance_m} m")]
    BelowReferenceDistance {
        distance_m: f64,
        ref_distance_m: f64,
    },
    #[error("height offset is zero; the height correction term is singular")]
    ZeroHeightOffset,
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// NLOS paths per SP–UE link.
    pub nlos_paths_sp: usize,
    /// NLOS paths per jammer–UE link.
    pub nlos_paths_jam: usize,
    /// Element spacing as a fraction of the carrier wavelength.
    pub antenna_spacing_wavelengths: f64,
    pub shadowing_sigma_db: f64,
    pub pathloss_exp: f64,
    pub ref_distance_m: f64,
    /// Foliage / antenna-orientation loss on jammer links, in dB (>= 0).
    pub jammer_const_loss_db: f64,
    /// Receiver height at which jammer path loss is minimal.
    pub h_opt_m: f64,
    /// Receiver (UE) height above ground.
    pub ue_height_m: f64,
    /// Antenna height of every service point.
    pub sp_height_m: f64,
    pub doppler_enabled: bool,
    /// Exponent of the Doppler frequency term; `None` uses `pathloss_exp`.
    pub freq_exp: Option<f64>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            nlos_paths_sp: 3,
            nlos_paths_jam: 3,
            antenna_spacing_wavelengths: 0.5,
            shadowing_sigma_db: 4.0,
            pathloss_exp: 3.0,
            ref_distance_m: 1.0,
            jammer_const_loss_db: 0.0,
            h_opt_m: 1.5,
            ue_height_m: 1.5,
            sp_height_m: 10.0,
            doppler_enabled: false,
            freq_exp: None,
        }
    }
}

impl ChannelParams {
    pub fn freq_exp(&self) -> f64 {
        self.freq_exp.unwrap_or(self.pathloss_exp)
    }

    // Negated comparisons so NaN fails validation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |m: &str| Err(ChannelError::InvalidParams(m.into()));
        if !(self.ref_distance_m > 0.0 && self.ref_distance_m.is_finite()) {
            return bad("ref_distance_m must be positive");
        }
        if !(self.pathloss_exp > 0.0 && self.pathloss_exp.is_finite()) {
            return bad("pathloss_exp must be positive");
        }
        if !(self.jammer_const_loss_db >= 0.0) {
            return bad("jammer_const_loss_db must be >= 0 dB");
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            return bad("shadowing_sigma_db must be >= 0");
        }
        if !(self.h_opt_m > 0.0) {
            return bad("h_opt_m must be positive");
        }
        if !(self.antenna_spacing_wavelengths >= 0.0) {
            return bad("antenna spacing must be >= 0");
        }
        if !(self.ue_height_m >= 0.0 && self.sp_height_m >= 0.0) {
            return bad("heights must be >= 0");
        }
        Ok(())
    }
}

/// Uniform linear array response; entry `m` is
/// `exp(j·2π·δ·m/λ · sin α · cos β)`.
pub fn steering_vector(
    alpha: f64,
    beta: f64,
    antennas: usize,
    spacing_m: f64,
    wavelength_m: f64,
) -> ComplexVector {
    let step = 2.0 * PI * spacing_m / wavelength_m * alpha.sin() * beta.cos();
    (0..antennas)
        .map(|m| Complex64::from_polar(1.0, step * m as f64))
        .collect()
}

/// Friis free-space loss in dB at `distance_m` and carrier `freq_hz`.
pub fn free_space_loss_db(distance_m: f64, freq_hz: f64) -> f64 {
    20.0 * (4.0 * PI * distance_m * freq_hz / SPEED_OF_LIGHT).log10()
}

/// Log-distance SP–UE path loss in dB.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn pathloss_sp_ue(
    distance_m: f64,
    p: &ChannelParams,
    freq_hz: f64,
    shadow_db: f64,
) -> Result<f64, ChannelError> {
    if !(distance_m >= p.ref_distance_m) {
        return Err(ChannelError::BelowReferenceDistance {
            distance_m,
            ref_distance_m: p.ref_distance_m,
        });
    }
    Ok(free_space_loss_db(p.ref_distance_m, freq_hz)
        + 10.0 * p.pathloss_exp * (distance_m / p.ref_distance_m).log10()
        + shadow_db)
}

/// Doppler correction `10·e·log10((f_e + Δf)/f_e)` with `Δf = (Δv/c)·f_e`.
pub fn doppler_term_db(p: &ChannelParams, emitted_hz: f64, speed_mps: f64) -> f64 {
    let shift = speed_mps / SPEED_OF_LIGHT * emitted_hz;
    // ln_1p keeps the tiny ratio accurate.
    10.0 * p.freq_exp() * (shift / emitted_hz).ln_1p() / std::f64::consts::LN_10
}

/// Air-to-ground jammer–UE path loss in dB: the SP–UE form, minus the height
/// gain `10·log10(Δh/h_opt)`, plus the constant loss and (if enabled) the
/// Doppler term.
pub fn pathloss_jammer_ue(
    distance_m: f64,
    height_offset_m: f64,
    p: &ChannelParams,
    emitted_hz: f64,
    speed_mps: f64,
    shadow_db: f64,
) -> Result<f64, ChannelError> {
    if height_offset_m == 0.0 {
        return Err(ChannelError::ZeroHeightOffset);
    }
    let base = pathloss_sp_ue(distance_m, p, emitted_hz, 0.0)?;
    let doppler = if p.doppler_enabled {
        doppler_term_db(p, emitted_hz, speed_mps)
    } else {
        0.0
    };
    Ok(base - 10.0 * (height_offset_m.abs() / p.h_opt_m).log10()
        + p.jammer_const_loss_db
        + doppler
        + shadow_db)
}

/// Draws `g0·a(LOS) + sqrt(1/paths)·Σ g_q·a(q)` with every `g ~ CN(0, 10^(−PL/10))`
/// and departure angles uniform (vertical on [−π/2, π/2], horizontal on [0, 2π)).
pub fn multipath_vector<R: Rng + ?Sized>(
    pathloss_db: f64,
    antennas: usize,
    nlos_paths: usize,
    spacing_wavelengths: f64,
    rng: &mut R,
) -> ComplexVector {
    let variance = 10f64.powf(-pathloss_db / 10.0);
    let amp = (variance / 2.0).sqrt();
    let mut h = vec![Complex64::new(0.0, 0.0); antennas];
    let mut add_path = |rng: &mut R, weight: f64| {
        let alpha = rng.random_range(-PI / 2.0..=PI / 2.0);
        let beta = rng.random_range(0.0..2.0 * PI);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let g = Complex64::new(re, im) * (amp * weight);
        // Only the δ/λ ratio matters, so use λ = 1.
        for (hm, b) in h.iter_mut().zip(steering_vector(
            alpha,
            beta,
            antennas,
            spacing_wavelengths,
            1.0,
        )) {
            *hm += g * b;
        }
    };
    add_path(rng, 1.0);
    if nlos_paths > 0 {
        let w = (1.0 / nlos_paths as f64).sqrt();
        for _ in 0..nlos_paths {
            add_path(rng, w);
        }
    }
    h
}

/// Expected `‖h‖²` for a link with the given path loss: LOS and the
/// normalized NLOS sum each contribute `antennas · 10^(−PL/10)`.
pub fn expected_gain(pathloss_db: f64, antennas: usize, nlos_paths: usize) -> f64 {
    let per_component = antennas as f64 * 10f64.powf(-pathloss_db / 10.0);
    if nlos_paths > 0 {
        2.0 * per_component
    } else {
        per_component
    }
}

pub fn sp_ue_distance(ue: &UserEquipment, sp: &ServicePoint, p: &ChannelParams) -> f64 {
    scenario::planar_distance(ue.position_m, sp.position_m).hypot(p.sp_height_m - p.ue_height_m)
}

pub fn jammer_ue_distance(ue: &UserEquipment, jammer: &Jammer, p: &ChannelParams) -> f64 {
    scenario::planar_distance(ue.position_m, jammer.position_m)
        .hypot(jammer.altitude_m - p.ue_height_m)
}

/// Receiver height offset used in the jammer height term. When the UE sits
/// exactly at the optimal height the term is defined to vanish, which is the
/// same as passing `h_opt` itself.
fn jammer_height_offset(p: &ChannelParams) -> f64 {
    let dh = (p.ue_height_m - p.h_opt_m).abs();
    if dh == 0.0 {
        p.h_opt_m
    } else {
        dh
    }
}

fn shadow_draw<R: Rng + ?Sized>(p: &ChannelParams, rng: &mut R) -> f64 {
    if p.shadowing_sigma_db > 0.0 {
        p.shadowing_sigma_db * rng.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    }
}

pub fn sp_ue_channel<R: Rng + ?Sized>(
    ue: &UserEquipment,
    sp: &ServicePoint,
    p: &ChannelParams,
    rng: &mut R,
) -> Result<ComplexVector, ChannelError> {
    let shadow = shadow_draw(p, rng);
    let pl = pathloss_sp_ue(sp_ue_distance(ue, sp, p), p, sp.carrier_hz, shadow)?;
    Ok(multipath_vector(
        pl,
        sp.antennas,
        p.nlos_paths_sp,
        p.antenna_spacing_wavelengths,
        rng,
    ))
}

pub fn jammer_ue_channel<R: Rng + ?Sized>(
    ue: &UserEquipment,
    jammer: &Jammer,
    p: &ChannelParams,
    rng: &mut R,
) -> Result<ComplexVector, ChannelError> {
    let shadow = shadow_draw(p, rng);
    let pl = pathloss_jammer_ue(
        jammer_ue_distance(ue, jammer, p),
        jammer_height_offset(p),
        p,
        jammer.carrier_hz,
        jammer.speed_mps,
        shadow,
    )?;
    Ok(multipath_vector(
        pl,
        jammer.antennas,
        p.nlos_paths_jam,
        p.antenna_spacing_wavelengths,
        rng,
    ))
}

pub fn squared_norm(h: &[Complex64]) -> f64 {
    h.iter().map(|c| c.norm_sqr()).sum()
}

/// Effective linear power gains `‖h‖²` for every UE–SP and UE–jammer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsiSnapshot {
    /// U × J.
    pub sp_gain: Matrix<f64>,
    /// U × L.
    pub jam_gain: Matrix<f64>,
}

impl CsiSnapshot {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let ok =
            |m: &Matrix<f64>| m.is_well_formed() && m.iter().all(|g| g.is_finite() && *g >= 0.0);
        if !(ok(&self.sp_gain) && ok(&self.jam_gain)) {
            return Err(ScenarioError::Validation(
                "snapshot gains must be finite and non-negative".into(),
            ));
        }
        if self.sp_gain.rows() != self.jam_gain.rows() {
            return Err(ScenarioError::Validation(
                "snapshot row counts differ".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the snapshot. Each pair draws from its own ChaCha stream of
/// `channel_seed`, so the result is identical under either execution mode.
pub fn build_csi_snapshot(
    s: &Scenario,
    p: &ChannelParams,
    channel_seed: u64,
    exec: Execution,
) -> Result<CsiSnapshot, ChannelError> {
    p.validate()?;
    let (u, j, l) = (s.ues.len(), s.sps.len(), s.jammers.len());
    let sp_seed = rng::derive_seed(channel_seed, &[0]);
    let jam_seed = rng::derive_seed(channel_seed, &[1]);

    let sp_gain = exec.map_range(u * j, |k| {
        let (ui, si) = (k / j, k % j);
        let mut r = rng::stream(sp_seed, k as u64);
        sp_ue_channel(&s.ues[ui], &s.sps[si], p, &mut r).map(|h| squared_norm(&h))
    });
    let jam_gain = exec.map_range(u * l, |k| {
        let (ui, li) = (k / l, k % l);
        let mut r = rng::stream(jam_seed, k as u64);
        jammer_ue_channel(&s.ues[ui], &s.jammers[li], p, &mut r).map(|h| squared_norm(&h))
    });

    Ok(CsiSnapshot {
        sp_gain: Matrix::from_vec(u, j, sp_gain.into_iter().collect::<Result<_, _>>()?),
        jam_gain: Matrix::from_vec(u, l, jam_gain.into_iter().collect::<Result<_, _>>()?),
    })
}

pub fn save_snapshot<W: Write>(snap: &CsiSnapshot, sink: W) -> Result<(), ScenarioError> {
    scenario::write_json(snap, sink)
}

pub fn load_snapshot<R: Read>(source: R) -> Result<CsiSnapshot, ScenarioError> {
    let snap: CsiSnapshot = scenario::read_json(source)?;
    snap.validate()?;
    Ok(snap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, ScenarioConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn no_shadow() -> ChannelParams {
        ChannelParams {
            shadowing_sigma_db: 0.0,
            ..ChannelParams::default()
        }
    }

    #[test]
    fn steering_single_antenna() {
        let b = steering_vector(0.7, 1.3, 1, 0.5, 1.0);
        assert_eq!(b, vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn steering_broadside_is_all_ones() {
        for b in steering_vector(0.0, 2.0, 4, 0.5, 1.0) {
            assert_relative_eq!(b.re, 1.0);
            assert_relative_eq!(b.im, 0.0);
        }
    }

    #[test]
    fn steering_half_wavelength_endfire_alternates() {
        let lambda = 0.05;
        let b = steering_vector(PI / 2.0, 0.0, 4, lambda / 2.0, lambda);
        for (m, v) in b.iter().enumerate() {
            let expected = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12,
                "{m}: {v}"
            );
        }
    }

    #[test]
    fn pathloss_at_reference_distance_is_free_space() {
        let p = no_shadow();
        let f = 25e9;
        assert_eq!(
            pathloss_sp_ue(1.0, &p, f, 0.0).unwrap(),
            free_space_loss_db(1.0, f)
        );
    }

    #[test]
    fn pathloss_decade_at_exponent_two() {
        let p = ChannelParams {
            pathloss_exp: 2.0,
            ..no_shadow()
        };
        let f = 6e9;
        let near = pathloss_sp_ue(p.ref_distance_m, &p, f, 0.0).unwrap();
        let far = pathloss_sp_ue(10.0 * p.ref_distance_m, &p, f, 0.0).unwrap();
        assert_relative_eq!(far - near, 20.0, epsilon = 1e-12);
    }

    #[test]
    fn friis_constant_at_six_ghz() {
        // 4π · 1 m · 6e9 / 299792458 = 251.50..., 20·log10 → 48.011 dB.
        let hand = 20.0 * (4.0 * std::f64::consts::PI * 6.0e9 / 2.997_924_58e8_f64).log10();
        assert!((hand - 48.0).abs() < 0.1);
        let pl = pathloss_sp_ue(1.0, &no_shadow(), 6e9, 0.0).unwrap();
        assert!((pl - 48.0).abs() < 0.1, "{pl}");
    }

    #[test]
    fn below_reference_distance_is_an_error() {
        assert!(matches!(
            pathloss_sp_ue(0.5, &no_shadow(), 6e9, 0.0),
            Err(ChannelError::BelowReferenceDistance { .. })
        ));
    }

    #[test]
    fn jammer_loss_reduces_to_sp_form() {
        let p = ChannelParams {
            jammer_const_loss_db: 0.0,
            doppler_enabled: false,
            ..no_shadow()
        };
        for d in [1.0, 3.7, 120.0, 950.0] {
            let a = pathloss_jammer_ue(d, p.h_opt_m, &p, 6e9, 30.0, 1.25).unwrap();
            let b = pathloss_sp_ue(d, &p, 6e9, 1.25).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn jammer_constant_loss_adds() {
        let base = no_shadow();
        let lossy = ChannelParams {
            jammer_const_loss_db: 3.0,
            ..no_shadow()
        };
        let a = pathloss_jammer_ue(200.0, base.h_opt_m, &base, 6e9, 0.0, 0.0).unwrap();
        let b = pathloss_jammer_ue(200.0, base.h_opt_m, &lossy, 6e9, 0.0, 0.0).unwrap();
        assert_relative_eq!(b - a, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn doppler_term_is_negligible() {
        let p = ChannelParams {
            doppler_enabled: true,
            freq_exp: Some(2.0),
            ..no_shadow()
        };
        // Δf/f = 30 / 299792458 ≈ 1.0007e-7; 20·log10(1 + 1.0007e-7) ≈ 8.69e-7 dB.
        let hand = 20.0 * (30.0 / 299_792_458.0) / std::f64::consts::LN_10;
        let term = doppler_term_db(&p, 6e9, 30.0);
        assert_relative_eq!(term, hand, max_relative = 1e-6);
        assert!((term - 8.7e-7).abs() < 0.05e-7);
        let on = pathloss_jammer_ue(100.0, p.h_opt_m, &p, 6e9, 30.0, 0.0).unwrap();
        let off = pathloss_jammer_ue(
            100.0,
            p.h_opt_m,
            &ChannelParams {
                doppler_enabled: false,
                ..p.clone()
            },
            6e9,
            30.0,
            0.0,
        )
        .unwrap();
        assert!(on - off < 1e-5 && on > off);
    }

    #[test]
    fn zero_height_offset_is_an_error() {
        assert_eq!(
            pathloss_jammer_ue(100.0, 0.0, &no_shadow(), 6e9, 0.0, 0.0),
            Err(ChannelError::ZeroHeightOffset)
        );
    }

    #[test]
    fn single_path_single_antenna_is_scalar() {
        let mut r = rng::seeded(3);
        let h = multipath_vector(60.0, 1, 0, 0.5, &mut r);
        assert_eq!(h.len(), 1);
    }

    fn mean_gain(pl: f64, antennas: usize, paths: usize, draws: usize, seed: u64) -> f64 {
        let mut r = rng::seeded(seed);
        (0..draws)
            .map(|_| squared_norm(&multipath_vector(pl, antennas, paths, 0.5, &mut r)))
            .sum::<f64>()
            / draws as f64
    }

    #[test]
    fn second_moment_matches_analytic_value() {
        let pl = 90.0;
        for (antennas, paths) in [(8, 3), (4, 2), (1, 0)] {
            let emp = mean_gain(pl, antennas, paths, 100_000, 11);
            let ana = expected_gain(pl, antennas, paths);
            assert!(
                (emp / ana - 1.0).abs() < 0.02,
                "M={antennas} Q={paths}: {emp} vs {ana}"
            );
        }
    }

    #[test]
    fn channel_draws_are_deterministic() {
        let s = generate_scenario(&ScenarioConfig::desk()).unwrap();
        let p = ChannelParams::default();
        let a = jammer_ue_channel(&s.ues[0], &s.jammers[0], &p, &mut rng::seeded(5)).unwrap();
        let b = jammer_ue_channel(&s.ues[0], &s.jammers[0], &p, &mut rng::seeded(5)).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a, b);
        let c = sp_ue_channel(&s.ues[0], &s.sps[0], &p, &mut rng::seeded(5)).unwrap();
        assert_eq!(
            c,
            sp_ue_channel(&s.ues[0], &s.sps[0], &p, &mut rng::seeded(5)).unwrap()
        );
    }

    #[test]
    fn snapshot_dimensions() {
        let mut cfg = ScenarioConfig::paper();
        cfg.num_bs = 0;
        cfg.num_ap = 1;
        cfg.num_ue = 1;
        cfg.num_jammers = 0;
        let s = generate_scenario(&cfg).unwrap();
        let snap =
            build_csi_snapshot(&s, &ChannelParams::default(), 1, Execution::Sequential).unwrap();
        assert_eq!((snap.sp_gain.rows(), snap.sp_gain.cols()), (1, 1));
        assert_eq!((snap.jam_gain.rows(), snap.jam_gain.cols()), (1, 0));

        let full = generate_scenario(&ScenarioConfig::paper()).unwrap();
        let snap =
            build_csi_snapshot(&full, &ChannelParams::default(), 1, Execution::Parallel).unwrap();
        assert_eq!((snap.sp_gain.rows(), snap.sp_gain.cols()), (40, 40));
        assert_eq!((snap.jam_gain.rows(), snap.jam_gain.cols()), (40, 10));
        snap.validate().unwrap();
    }

    #[test]
    fn snapshot_is_schedule_independent() {
        let s = generate_scenario(&ScenarioConfig::paper()).unwrap();
        let p = ChannelParams::default();
        let a = build_csi_snapshot(&s, &p, 77, Execution::Sequential).unwrap();
        let b = build_csi_snapshot(&s, &p, 77, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_distances_scales_gains_by_the_power_law() {
        // Equal heights make the link distance purely planar; identical
        // per-pair streams make the draws identical up to variance.
        let p = ChannelParams {
            pathloss_exp: 2.0,
            nlos_paths_sp: 0,
            sp_height_m: 1.5,
            ..no_shadow()
        };
        let mut cfg = ScenarioConfig::desk();
        cfg.min_sp_spacing_m = 0.0;
        let near = generate_scenario(&cfg).unwrap();
        for factor in [2.0, 10.0] {
            let mut far = near.clone();
            far.config.area_side_m *= factor;
            for sp in &mut far.sps {
                sp.position_m = sp.position_m.map(|c| c * factor);
            }
            for ue in &mut far.ues {
                ue.position_m = ue.position_m.map(|c| c * factor);
            }
            let g0 = build_csi_snapshot(&near, &p, 4, Execution::Sequential).unwrap();
            let g1 = build_csi_snapshot(&far, &p, 4, Execution::Sequential).unwrap();
            for (a, b) in g0.sp_gain.iter().zip(g1.sp_gain.iter()) {
                assert_relative_eq!(b / a, factor.powi(-2), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn snapshot_round_trips() {
        let s = generate_scenario(&ScenarioConfig::desk()).unwrap();
        let snap =
            build_csi_snapshot(&s, &ChannelParams::default(), 2, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        save_snapshot(&snap, &mut buf).unwrap();
        assert_eq!(load_snapshot(buf.as_slice()).unwrap(), snap);
    }

    proptest! {
        #[test]
        fn steering_entries_have_unit_modulus(
            alpha in -PI..PI, beta in 0.0..(2.0 * PI), m in 1usize..40, spacing in 0.01f64..2.0
        ) {
            let b = steering_vector(alpha, beta, m, spacing, 1.0);
            prop_assert_eq!(b[0], Complex64::new(1.0, 0.0));
            for v in b {
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn pathloss_strictly_increases_with_distance(
            d in 1.0f64..5000.0, extra in 0.001f64..1000.0, shadow in -10.0f64..10.0, n in 1.5f64..5.0
        ) {
            let p = ChannelParams { pathloss_exp: n, ..no_shadow() };
            let a = pathloss_sp_ue(d, &p, 6e9, shadow).unwrap();
            let b = pathloss_sp_ue(d + extra, &p, 6e9, shadow).unwrap();
            prop_assert!(b > a);
        }
    }
}
