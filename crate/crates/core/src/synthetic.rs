//! Simulated radio surveys written in the UJIIndoorLoc column layout.
//!
//! Received power follows a log-distance path-loss model with per-floor
//! attenuation, spatially correlated static shadowing per AP and
//! per-sample noise. Each phone distorts the true power with its own
//! linear response and detection threshold, which is what makes a model
//! trained on one phone degrade on another.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::UJI_AP_COUNT;

#[derive(Debug, Clone, PartialEq)]
pub struct PhoneProfile {
    pub phone_id: u32,
    /// Slope of the phone's reported power against true power.
    pub gain: f64,
    pub offset_db: f64,
    /// Weakest power the phone reports; anything below reads as absent.
    pub sensitivity_dbm: f64,
    pub noise_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyConfig {
    pub building_id: u32,
    pub floors: u32,
    pub floor_height: f64,
    /// Reference point grid per floor (columns, rows).
    pub grid: (u32, u32),
    pub grid_spacing: f64,
    /// Access points placed in the building; the rest of the 520 columns
    /// are never detected.
    pub active_aps: usize,
    pub samples_per_rp: usize,
    pub tx_power_dbm: f64,
    pub path_loss_exponent: f64,
    pub floor_loss_db: f64,
    pub shadowing_db: f64,
    /// Distance over which shadowing correlation decays by a factor of e.
    pub shadowing_decorrelation_m: f64,
    pub phones: Vec<PhoneProfile>,
    pub seed: u64,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        Self {
            building_id: 0,
            floors: 2,
            floor_height: 4.0,
            grid: (12, 5),
            grid_spacing: 2.0,
            active_aps: 60,
            samples_per_rp: 6,
            tx_power_dbm: -30.0,
            path_loss_exponent: 3.0,
            floor_loss_db: 15.0,
            shadowing_db: 6.0,
            shadowing_decorrelation_m: 4.0,
            phones: vec![
                PhoneProfile {
                    phone_id: 13,
                    gain: 1.0,
                    offset_db: 0.0,
                    sensitivity_dbm: -95.0,
                    noise_db: 4.0,
                },
                PhoneProfile {
                    phone_id: 14,
                    gain: 0.85,
                    offset_db: -6.0,
                    sensitivity_dbm: -88.0,
                    noise_db: 4.0,
                },
            ],
            seed: 7,
        }
    }
}

/// Simulates the survey and renders it as UJIIndoorLoc CSV text. Rows are
/// ordered by phone, then reference point, then sample.
pub fn simulate_uji_csv(cfg: &SurveyConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (cols, rows) = cfg.grid;
    let width = cols.max(1) as f64 * cfg.grid_spacing;
    let depth = rows.max(1) as f64 * cfg.grid_spacing;

    let n_aps = cfg.active_aps.min(UJI_AP_COUNT);
    let wap_columns = rand::seq::index::sample(&mut rng, UJI_AP_COUNT, n_aps).into_vec();
    let aps: Vec<(f64, f64, u32)> = (0..n_aps)
        .map(|_| {
            (
                rng.random_range(-2.0..width + 2.0),
                rng.random_range(-2.0..depth + 2.0),
                rng.random_range(0..cfg.floors.max(1)),
            )
        })
        .collect();

    let mut rps = Vec::new();
    for floor in 0..cfg.floors {
        for r in 0..rows {
            for c in 0..cols {
                rps.push((floor, (c as f64 + 0.5) * cfg.grid_spacing, (r as f64 + 0.5) * cfg.grid_spacing));
            }
        }
    }
    let shadowing = correlated_shadowing(&rps, n_aps, cfg, &mut rng);

    let mut out = String::new();
    let header: Vec<String> = (1..=UJI_AP_COUNT)
        .map(|i| format!("WAP{i:03}"))
        .chain(
            [
                "LONGITUDE",
                "LATITUDE",
                "FLOOR",
                "BUILDINGID",
                "SPACEID",
                "RELATIVEPOSITION",
                "USERID",
                "PHONEID",
                "TIMESTAMP",
            ]
            .iter()
            .map(|s| s.to_string()),
        )
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');

    let mut timestamp = 1_371_700_000u64;
    let mut cells = vec![100i32; UJI_AP_COUNT];
    for phone in &cfg.phones {
        let noise = Normal::new(0.0, phone.noise_db.max(1e-12)).unwrap();
        for (rp_idx, &(floor, x, y)) in rps.iter().enumerate() {
            let per_floor = (rows * cols) as usize;
            let space_id = 100 + rp_idx % per_floor.max(1);
            for _ in 0..cfg.samples_per_rp {
                cells.fill(100);
                for (a, &(ax, ay, af)) in aps.iter().enumerate() {
                    let dz = (f64::from(floor) - f64::from(af)) * cfg.floor_height;
                    let d = ((x - ax).powi(2) + (y - ay).powi(2) + dz * dz).sqrt().max(1.0);
                    let true_power = cfg.tx_power_dbm
                        - 10.0 * cfg.path_loss_exponent * d.log10()
                        - cfg.floor_loss_db * f64::from(floor.abs_diff(af))
                        + shadowing[rp_idx][a];
                    let reported = phone.gain * true_power + phone.offset_db + noise.sample(&mut rng);
                    if reported >= phone.sensitivity_dbm {
                        cells[wap_columns[a]] = reported.round().clamp(-104.0, 0.0) as i32;
                    }
                }
                for v in &cells {
                    write!(out, "{v},").unwrap();
                }
                writeln!(
                    out,
                    "{:.4},{:.4},{},{},{},2,1,{},{}",
                    -7600.0 + x,
                    4_864_800.0 + y,
                    floor,
                    cfg.building_id,
                    space_id,
                    phone.phone_id,
                    timestamp
                )
                .unwrap();
                timestamp += 1;
            }
        }
    }
    out
}

/// Shadowing in dB indexed by [rp][ap]. Each AP gets an independent field
/// whose correlation between two points on the same floor decays as
/// exp(-distance / decorrelation); different floors are independent.
#[allow(clippy::needless_range_loop)]
fn correlated_shadowing(
    rps: &[(u32, f64, f64)],
    n_aps: usize,
    cfg: &SurveyConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let unit = Normal::new(0.0, 1.0).unwrap();
    let dc = cfg.shadowing_decorrelation_m.max(1e-9);
    let weights: Vec<Vec<(usize, f64)>> = rps
        .iter()
        .map(|&(f, x, y)| {
            let w: Vec<(usize, f64)> = rps
                .iter()
                .enumerate()
                .filter(|(_, &(g, _, _))| g == f)
                .map(|(j, &(_, u, v))| (j, (-((x - u).powi(2) + (y - v).powi(2)).sqrt() / dc).exp()))
                .filter(|&(_, w)| w > 1e-6)
                .collect();
            let norm = w.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            w.into_iter().map(|(j, w)| (j, w / norm)).collect()
        })
        .collect();
    let mut out = vec![vec![0.0; n_aps]; rps.len()];
    for a in 0..n_aps {
        let z: Vec<f64> = (0..rps.len()).map(|_| unit.sample(rng)).collect();
        for (i, w) in weights.iter().enumerate() {
            out[i][a] = cfg.shadowing_db * w.iter().map(|&(j, w)| w * z[j]).sum::<f64>();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_uji_csv, UjiOptions};

    #[test]
    fn output_parses_in_uji_layout() {
        let cfg = SurveyConfig {
            grid: (3, 2),
            samples_per_rp: 2,
            ..SurveyConfig::default()
        };
        let db = parse_uji_csv(simulate_uji_csv(&cfg).as_bytes(), "sim", &UjiOptions::default()).unwrap();
        assert_eq!(db.dim(), UJI_AP_COUNT);
        assert_eq!(db.len(), 2 * 2 * 3 * 2 * 2);
        assert_eq!(db.devices(), vec!["13", "14"]);
        assert_eq!(db.rp_labels().len(), 12);
        assert_eq!(simulate_uji_csv(&cfg), simulate_uji_csv(&cfg));
    }
}
