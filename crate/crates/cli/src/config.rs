//! Run configuration: TOML in engineering units, validated and converted to
//! SI on load.

use serde::Deserialize;
use sg_router::channel::{Band, BandParams, FadingModel};
use sg_router::simulate::StrategyKind;
use sg_router::units::{db_to_linear, dbm_to_watts, mhz_to_hz};
use std::path::Path;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThzSection {
    pub gain_dbi: f64,
    pub loss_db: f64,
    pub absorption_per_m: f64,
    pub noise_dbm: f64,
    pub bandwidth_mhz: f64,
    pub carrier_ghz: f64,
    pub alpha: f64,
    pub mu: f64,
    pub relay_density_per_m2: f64,
    pub gamma_db: f64,
    pub long_hop_radius_m: f64,
    /// Route lengths for compare.
    pub distances_m: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfSection {
    pub gain_dbi: f64,
    pub loss_db: f64,
    pub pathloss_exponent: f64,
    pub noise_dbm: f64,
    pub bandwidth_mhz: f64,
    pub carrier_ghz: f64,
    pub relay_density_per_m2: f64,
    pub gamma_db: f64,
    pub long_hop_radius_m: f64,
    /// Route lengths for compare.
    pub distances_m: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSection {
    pub thz: ThzSection,
    pub rf: RfSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub bands: Vec<String>,
    pub powers_dbm: Vec<f64>,
    pub strategies: Vec<String>,
    pub short_hop_max_angle_deg: f64,
    pub fairness: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapSection {
    pub distances_m: Vec<f64>,
    pub powers_dbm: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavSection {
    pub altitudes_m: Vec<f64>,
    pub densities_per_km2: Vec<f64>,
    pub altitude_m: f64,
    pub density_per_km2: f64,
    pub distances_m: Vec<f64>,
    pub powers_dbm: Vec<f64>,
    pub absorption_los_per_m: f64,
    pub absorption_nlos_per_m: f64,
    pub los_a: f64,
    pub los_b: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub band: BandsSection,
    pub scenario: ScenarioSection,
    pub run: RunSection,
    pub heatmap: HeatmapSection,
    pub uav: UavSection,
}

/// One band resolved to SI units.
#[derive(Debug, Clone, Copy)]
pub struct BandSetup<'a> {
    pub params: BandParams,
    pub relay_density: f64,
    /// Linear SNR threshold after any fairness mapping.
    pub gamma: f64,
    pub long_hop_radius: f64,
    pub distances: &'a [f64],
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.band.thz;
        let r = &self.band.rf;
        // Thermal noise over these bandwidths sits far below 1 mW; a positive
        // dBm figure is almost certainly a sign error.
        for (name, n) in [("band.thz.noise_dbm", t.noise_dbm), ("band.rf.noise_dbm", r.noise_dbm)] {
            if !(n.is_finite() && n <= 0.0) {
                return invalid(format!("{name} must be a nonpositive dBm value, got {n}"));
            }
        }
        for (name, v) in [
            ("band.thz.relay_density_per_m2", t.relay_density_per_m2),
            ("band.rf.relay_density_per_m2", r.relay_density_per_m2),
            ("band.thz.bandwidth_mhz", t.bandwidth_mhz),
            ("band.rf.bandwidth_mhz", r.bandwidth_mhz),
            ("band.thz.long_hop_radius_m", t.long_hop_radius_m),
            ("band.rf.long_hop_radius_m", r.long_hop_radius_m),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive"));
            }
        }
        let s = &self.scenario;
        if s.bands.is_empty() {
            return invalid("scenario.bands is empty");
        }
        for b in &s.bands {
            parse_band(b)?;
        }
        if s.strategies.is_empty() {
            return invalid("scenario.strategies is empty");
        }
        for name in &s.strategies {
            parse_strategy(name, 1.0, 1.0)?;
        }
        if !(s.short_hop_max_angle_deg > 0.0 && s.short_hop_max_angle_deg < 180.0) {
            return invalid("scenario.short_hop_max_angle_deg must lie in (0, 180)");
        }
        positive_list("band.thz.distances_m", &t.distances_m)?;
        positive_list("band.rf.distances_m", &r.distances_m)?;
        finite_list("scenario.powers_dbm", &s.powers_dbm)?;
        positive_list("heatmap.distances_m", &self.heatmap.distances_m)?;
        finite_list("heatmap.powers_dbm", &self.heatmap.powers_dbm)?;
        let u = &self.uav;
        if u.altitudes_m.is_empty() && u.densities_per_km2.is_empty() {
            return invalid("uav needs an altitude or a density grid");
        }
        if !u.altitudes_m.is_empty() {
            positive_list("uav.altitudes_m", &u.altitudes_m)?;
        }
        if !u.densities_per_km2.is_empty() {
            positive_list("uav.densities_per_km2", &u.densities_per_km2)?;
        }
        positive_list("uav.distances_m", &u.distances_m)?;
        finite_list("uav.powers_dbm", &u.powers_dbm)?;
        if self.run.trials == 0 || u.trials == 0 {
            return invalid("trial counts must be positive");
        }
        // Surface physical-range errors from the library at load time.
        self.band_setup(Band::Thz)?;
        self.band_setup(Band::Rf)?;
        Ok(())
    }

    pub fn band_setup(&self, band: Band) -> Result<BandSetup<'_>, ConfigError> {
        let lib = |e: sg_router::Error| ConfigError::Invalid(e.to_string());
        let t = &self.band.thz;
        let r = &self.band.rf;
        let rf = BandParams::rf(
            db_to_linear(r.gain_dbi),
            db_to_linear(r.loss_db),
            r.pathloss_exponent,
            dbm_to_watts(r.noise_dbm),
            mhz_to_hz(r.bandwidth_mhz),
            FadingModel::ExponentialUnitMean,
            r.carrier_ghz * 1e9,
        )
        .map_err(lib)?;
        let rf_gamma = db_to_linear(r.gamma_db);
        match band {
            Band::Rf => {
                Ok(BandSetup { params: rf, relay_density: r.relay_density_per_m2, gamma: rf_gamma, long_hop_radius: r.long_hop_radius_m, distances: &r.distances_m })
            }
            Band::Thz => {
                let thz = BandParams::thz(
                    db_to_linear(t.gain_dbi),
                    db_to_linear(t.loss_db),
                    t.absorption_per_m,
                    dbm_to_watts(t.noise_dbm),
                    mhz_to_hz(t.bandwidth_mhz),
                    FadingModel::alpha_mu_unit_mean(t.alpha, t.mu).map_err(lib)?,
                    t.carrier_ghz * 1e9,
                )
                .map_err(lib)?;
                let gamma = if self.scenario.fairness {
                    sg_router::analysis::fairness_threshold(&rf, &thz, rf_gamma)
                } else {
                    db_to_linear(t.gamma_db)
                };
                Ok(BandSetup { params: thz, relay_density: t.relay_density_per_m2, gamma, long_hop_radius: t.long_hop_radius_m, distances: &t.distances_m })
            }
        }
    }

    pub fn bands(&self) -> Vec<Band> {
        self.scenario.bands.iter().map(|b| parse_band(b).expect("validated")).collect()
    }

    pub fn strategies(&self, setup: &BandSetup) -> Vec<StrategyKind> {
        let angle = self.scenario.short_hop_max_angle_deg.to_radians();
        self.scenario
            .strategies
            .iter()
            .map(|s| parse_strategy(s, setup.long_hop_radius, angle).expect("validated"))
            .collect()
    }
}

pub fn parse_band(name: &str) -> Result<Band, ConfigError> {
    match name.to_ascii_lowercase().as_str() {
        "thz" => Ok(Band::Thz),
        "rf" => Ok(Band::Rf),
        other => invalid(format!("unknown band {other:?}")),
    }
}

pub fn parse_strategy(name: &str, radius: f64, max_angle: f64) -> Result<StrategyKind, ConfigError> {
    Ok(match name {
        "ideal" => StrategyKind::Ideal,
        "stepwise-optimal" => StrategyKind::StepwiseOptimal,
        "stepwise-suboptimal" => StrategyKind::StepwiseSuboptimal,
        "long-hop" => StrategyKind::LongHop { radius },
        "short-hop" => StrategyKind::ShortHop { max_angle },
        other => return invalid(format!("unknown strategy {other:?}")),
    })
}

fn positive_list(name: &str, v: &[f64]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return invalid(format!("{name} is empty"));
    }
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return invalid(format!("{name} must contain positive values"));
    }
    Ok(())
}

fn finite_list(name: &str, v: &[f64]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return invalid(format!("{name} is empty"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return invalid(format!("{name} must contain finite values"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_defaults_match_library_defaults() {
        let cfg = RunConfig::from_toml(DEFAULT_CONFIG).unwrap();
        assert_eq!(cfg.band_setup(Band::Thz).unwrap().params, BandParams::default_thz());
        assert_eq!(cfg.band_setup(Band::Rf).unwrap().params, BandParams::default_rf());
        let thz = cfg.band_setup(Band::Thz).unwrap();
        assert!((thz.gamma - 0.08).abs() < 1e-12);
    }

    #[test]
    fn rejects_positive_noise() {
        let text = DEFAULT_CONFIG.replace("noise_dbm = -107.0", "noise_dbm = 7.0");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_unknown_names() {
        let text = DEFAULT_CONFIG.replace("\"short-hop\"]", "\"zigzag\"]");
        assert!(RunConfig::from_toml(&text).is_err());
        let text = DEFAULT_CONFIG.replace("bands = [\"thz\", \"rf\"]", "bands = [\"optical\"]");
        assert!(RunConfig::from_toml(&text).is_err());
        let text = DEFAULT_CONFIG.replace("[run]", "[run]\ncolour = 3");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn rejects_empty_ranges() {
        let text = DEFAULT_CONFIG.replace("distances_m = [1000.0]", "distances_m = []");
        assert!(RunConfig::from_toml(&text).is_err());
    }
}
