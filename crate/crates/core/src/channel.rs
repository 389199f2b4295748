//! Seeded Rayleigh multipath channels with an exponentially decaying
//! average power delay profile.
//!
//! Tap `l` (1-based) of user `k` is circular complex Gaussian with variance
//! `σ²_k · λ^(−(l−1)/(L−1))`, where `σ²_k = c · d_k^(−2)` depends on the
//! user's distance to the access point and `λ` is the ratio between the
//! first and the last tap power.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub num_users: usize,
    pub num_paths: usize,
    /// First-to-last tap power ratio λ, linear.
    pub pdp_ratio: f64,
    /// Distances are uniform in `[min, max]` meters.
    pub distance_range: (f64, f64),
    /// Constant `c` in `σ²_k = c · d_k^(−2)`.
    pub path_gain_scale: f64,
    pub seed: u64,
}

impl ChannelConfig {
    /// Simulation setup used throughout the evaluation: users between 3 and
    /// 30 m, `σ²_k = 0.3 · d_k^(−2)`.
    pub fn standard(num_users: usize, num_paths: usize, pdp_ratio_db: f64) -> Self {
        ChannelConfig {
            num_users,
            num_paths,
            pdp_ratio: db_to_linear(pdp_ratio_db),
            distance_range: (3.0, 30.0),
            path_gain_scale: 0.3,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 {
            return Err(Error::domain("num_users", "must be at least 1"));
        }
        if self.num_paths == 0 {
            return Err(Error::domain("num_paths", "must be at least 1"));
        }
        if !(self.pdp_ratio > 1.0) || !self.pdp_ratio.is_finite() {
            return Err(Error::domain(
                "pdp_ratio",
                format!("must be a finite value > 1, got {}", self.pdp_ratio),
            ));
        }
        let (lo, hi) = self.distance_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::domain(
                "distance_range",
                format!("need 0 < d_min <= d_max, got [{lo}, {hi}]"),
            ));
        }
        if !(self.path_gain_scale > 0.0) || !self.path_gain_scale.is_finite() {
            return Err(Error::domain(
                "path_gain_scale",
                "must be finite and positive",
            ));
        }
        Ok(())
    }

    /// Per-user mean path power `σ²_k` for a user at `distance` meters.
    pub fn user_variance(&self, distance: f64) -> f64 {
        self.path_gain_scale / (distance * distance)
    }
}

/// Variance of tap `path` (1-based) out of `num_paths` for a user of mean
/// power `user_variance`.
pub fn apdp_variance(
    path: usize,
    num_paths: usize,
    pdp_ratio: f64,
    user_variance: f64,
) -> Result<f64> {
    if num_paths == 0 || path == 0 || path > num_paths {
        return Err(Error::domain(
            "path",
            format!("index {path} outside 1..={num_paths}"),
        ));
    }
    if !(pdp_ratio > 1.0) {
        return Err(Error::domain(
            "pdp_ratio",
            format!("must be > 1, got {pdp_ratio}"),
        ));
    }
    if !(user_variance > 0.0) {
        return Err(Error::domain(
            "user_variance",
            format!("must be > 0, got {user_variance}"),
        ));
    }
    Ok(user_variance * profile_factor(path - 1, num_paths, pdp_ratio.ln()))
}

/// `λ^(−l/(L−1))` for the 0-based tap `l`; a single tap is flat.
fn profile_factor(tap: usize, num_paths: usize, ln_ratio: f64) -> f64 {
    if num_paths == 1 {
        return 1.0;
    }
    (-(tap as f64) / (num_paths - 1) as f64 * ln_ratio).exp()
}

/// One network realization: complex tap gains, user distances and the tap
/// variances they were drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    gains: Vec<Vec<Complex64>>,
    distances: Vec<f64>,
    variances: Vec<Vec<f64>>,
}

impl ChannelSet {
    /// Builds a channel set from explicit tap gains. Distances and variances
    /// are set to NaN since they are unknown.
    pub fn from_gains(gains: Vec<Vec<Complex64>>) -> Result<Self> {
        let num_paths = gains.first().map_or(0, Vec::len);
        if gains.is_empty() || num_paths == 0 {
            return Err(Error::domain(
                "gains",
                "need at least one user and one path",
            ));
        }
        if gains.iter().any(|g| g.len() != num_paths) {
            return Err(Error::domain(
                "gains",
                "all users must have the same path count",
            ));
        }
        if gains
            .iter()
            .flatten()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::domain("gains", "tap gains must be finite"));
        }
        let k = gains.len();
        Ok(ChannelSet {
            gains,
            distances: vec![f64::NAN; k],
            variances: vec![vec![f64::NAN; num_paths]; k],
        })
    }

    pub fn num_users(&self) -> usize {
        self.gains.len()
    }

    pub fn num_paths(&self) -> usize {
        self.gains[0].len()
    }

    pub fn gains(&self) -> &[Vec<Complex64>] {
        &self.gains
    }

    pub fn user_gains(&self, user: usize) -> &[Complex64] {
        &self.gains[user]
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn variances(&self) -> &[Vec<f64>] {
        &self.variances
    }

    /// Keeps only the first `num_users` users.
    pub fn truncated(&self, num_users: usize) -> ChannelSet {
        let k = num_users.min(self.num_users());
        ChannelSet {
            gains: self.gains[..k].to_vec(),
            distances: self.distances[..k].to_vec(),
            variances: self.variances[..k].to_vec(),
        }
    }
}

/// Draws realization 0 for `cfg.seed`.
pub fn draw_channels(cfg: &ChannelConfig) -> Result<ChannelSet> {
    draw_realization(cfg, 0, 0)
}

/// Draws one realization. Every user gets its own generator derived from
/// `(cfg.seed, realization, attempt, user)`, so a realization does not
/// depend on which other realizations were drawn or in which order.
/// `attempt` distinguishes redraws of a rejected realization.
pub fn draw_realization(cfg: &ChannelConfig, realization: u64, attempt: u32) -> Result<ChannelSet> {
    cfg.validate()?;
    let ln_ratio = cfg.pdp_ratio.ln();
    let profile: Vec<f64> = (0..cfg.num_paths)
        .map(|l| profile_factor(l, cfg.num_paths, ln_ratio))
        .collect();
    let (d_min, d_max) = cfg.distance_range;

    let mut gains = Vec::with_capacity(cfg.num_users);
    let mut distances = Vec::with_capacity(cfg.num_users);
    let mut variances = Vec::with_capacity(cfg.num_users);
    for user in 0..cfg.num_users {
        let mut rng = stream_rng(cfg.seed, realization, attempt, user as u64);
        let distance = if d_max > d_min {
            rng.random_range(d_min..=d_max)
        } else {
            d_min
        };
        let user_variance = cfg.user_variance(distance);
        let taps: Vec<f64> = profile.iter().map(|p| user_variance * p).collect();
        let alpha = taps
            .iter()
            .map(|&v| {
                let scale = (v / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(scale * re, scale * im)
            })
            .collect();
        gains.push(alpha);
        distances.push(distance);
        variances.push(taps);
    }
    Ok(ChannelSet {
        gains,
        distances,
        variances,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn stream_rng(seed: u64, realization: u64, attempt: u32, user: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(seed);
    for (chunk, word) in
        key.chunks_exact_mut(8)
            .zip([realization, u64::from(attempt), user, 0x5241_4b45])
    {
        state = splitmix64(state ^ word);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
