//! Scenario files.
//!
//! TOML with four sections, all optional; missing keys take the standard
//! defaults. Units: W for powers, b for packet sizes, kb/s for the rate and
//! dB for the power delay profile ratio.
//!
//! ```toml
//! [channel]
//! num_users = 10
//! num_paths = 200
//! pdp_ratio_db = 20.0
//! distance_min_m = 3.0
//! distance_max_m = 30.0
//! path_gain_scale = 0.3
//!
//! [rake]
//! finger_fractions = [1.0]
//! processing_gains = [256]
//! chips_per_frame = [1, 10, 50]   # 1 is DS-CDMA
//!
//! [game]
//! total_bits = 100
//! info_bits = 100
//! rate_kbps = 100.0
//! noise_power_w = 5e-16
//! max_power_w = 1e-6
//!
//! [run]
//! realizations = 2000
//! seed = 1
//! ```

use std::path::Path;

use rakegame::channel::{db_to_linear, ChannelConfig};
use rakegame::experiments::{Scenario, DEFAULT_REALIZATIONS};
use rakegame::rake::{AccessScheme, RakeConfig};
use rakegame::GameParams;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub channel: ChannelSection,
    pub rake: RakeSection,
    pub game: GameSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub num_users: usize,
    pub num_paths: usize,
    pub pdp_ratio_db: f64,
    pub distance_min_m: f64,
    pub distance_max_m: f64,
    pub path_gain_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RakeSection {
    pub finger_fractions: Vec<f64>,
    pub processing_gains: Vec<u32>,
    pub chips_per_frame: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameSection {
    pub total_bits: u32,
    pub info_bits: u32,
    pub rate_kbps: f64,
    pub noise_power_w: f64,
    pub max_power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub realizations: usize,
    pub seed: u64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection {
            num_users: 10,
            num_paths: 200,
            pdp_ratio_db: 20.0,
            distance_min_m: 3.0,
            distance_max_m: 30.0,
            path_gain_scale: 0.3,
        }
    }
}

impl Default for RakeSection {
    fn default() -> Self {
        RakeSection {
            finger_fractions: vec![1.0],
            processing_gains: vec![256],
            chips_per_frame: vec![1, 10, 50],
        }
    }
}

impl Default for GameSection {
    fn default() -> Self {
        let g = GameParams::standard();
        GameSection {
            total_bits: g.total_bits,
            info_bits: g.info_bits,
            rate_kbps: g.rate / 1e3,
            noise_power_w: g.noise_power,
            max_power_w: g.max_power,
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            realizations: DEFAULT_REALIZATIONS,
            seed: 1,
        }
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|message| CliError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses and validates; the error carries line and column for syntax
    /// and unknown-key problems.
    pub fn parse(text: &str) -> Result<Self, String> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| e.to_string())?;
        file.check()?;
        Ok(file)
    }

    fn check(&self) -> Result<(), String> {
        let r = &self.rake;
        if r.finger_fractions.is_empty()
            || r.processing_gains.is_empty()
            || r.chips_per_frame.is_empty()
        {
            return Err(
                "rake: finger_fractions, processing_gains and chips_per_frame must be non-empty"
                    .into(),
            );
        }
        if r.processing_gains.contains(&0) {
            return Err("rake.processing_gains: entries must be positive".into());
        }
        if r.chips_per_frame.contains(&0) {
            return Err("rake.chips_per_frame: entries must be at least 1".into());
        }
        if self.run.realizations == 0 {
            return Err("run.realizations must be positive".into());
        }
        self.channel_config()
            .validate()
            .map_err(|e| format!("channel: {e}"))?;
        self.game_params()
            .validate()
            .map_err(|e| format!("game: {e}"))?;
        for &rho in &r.finger_fractions {
            RakeConfig::new(rho, r.processing_gains[0], AccessScheme::Cdma)
                .map_err(|e| format!("rake: {e}"))?;
        }
        Ok(())
    }

    pub fn pdp_ratio(&self) -> f64 {
        db_to_linear(self.channel.pdp_ratio_db)
    }

    pub fn channel_config(&self) -> ChannelConfig {
        let c = &self.channel;
        ChannelConfig {
            num_users: c.num_users,
            num_paths: c.num_paths,
            pdp_ratio: db_to_linear(c.pdp_ratio_db),
            distance_range: (c.distance_min_m, c.distance_max_m),
            path_gain_scale: c.path_gain_scale,
            seed: self.run.seed,
        }
    }

    pub fn game_params(&self) -> GameParams {
        let g = &self.game;
        GameParams {
            total_bits: g.total_bits,
            info_bits: g.info_bits,
            rate: g.rate_kbps * 1e3,
            noise_power: g.noise_power_w,
            max_power: g.max_power_w,
        }
    }

    pub fn schemes(&self) -> Vec<AccessScheme> {
        self.rake
            .chips_per_frame
            .iter()
            .map(|&nc| AccessScheme::from_chips_per_frame(nc))
            .collect()
    }

    /// Scenario for finger fraction `rho` at the first processing gain and
    /// chip count; sweeps vary those.
    pub fn scenario(&self, rho: f64) -> Scenario {
        let rake = RakeConfig {
            finger_fraction: rho,
            processing_gain: self.rake.processing_gains[0],
            scheme: self.schemes()[0],
        };
        Scenario {
            channel: self.channel_config(),
            rake,
            game: self.game_params(),
            n_realizations: self.run.realizations,
            master_seed: self.run.seed,
        }
    }
}
