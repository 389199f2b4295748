//! Rake combining and the gain coefficients of the SINR model.
//!
//! For user `k` with tap gains `α_k` and MRC weights `β_k`, the output SINR
//! is
//!
//! ```text
//! γ_k = h_SP,k p_k / (h_SI,k p_k + Σ_{j≠k} h_MAI,kj p_j + σ²)
//! ```
//!
//! Every gain is a function of the lag correlations between `β_k` and the
//! tap vectors. `h_MAI,kj` needs the energy of the full cross-correlation of
//! `β_k` and `α_j` over all `2L − 1` lags. `h_SI,k` needs the
//! per-lag values of `r_βα + r_αβ` for positive lags, weighted by
//! `φ_l² = min(m, N_c)/N_c` where `m` is the lag. Both are evaluated on
//! zero-padded FFTs, so no banded `A`/`B` matrices are built.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};

/// Multiple access scheme. DS-CDMA is the IR-UWB model with a single pulse
/// position per frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessScheme {
    Cdma,
    Uwb { chips_per_frame: u32 },
}

impl AccessScheme {
    pub fn chips_per_frame(self) -> u32 {
        match self {
            AccessScheme::Cdma => 1,
            AccessScheme::Uwb { chips_per_frame } => chips_per_frame,
        }
    }

    /// `Cdma` for one chip per frame, `Uwb` otherwise.
    pub fn from_chips_per_frame(chips_per_frame: u32) -> Self {
        if chips_per_frame <= 1 {
            AccessScheme::Cdma
        } else {
            AccessScheme::Uwb { chips_per_frame }
        }
    }

    pub fn is_cdma(self) -> bool {
        self.chips_per_frame() == 1
    }

    pub fn label(self) -> &'static str {
        if self.is_cdma() {
            "cdma"
        } else {
            "uwb"
        }
    }
}

impl fmt::Display for AccessScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccessScheme::Cdma => write!(f, "cdma"),
            AccessScheme::Uwb { chips_per_frame } => write!(f, "uwb(Nc={chips_per_frame})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RakeConfig {
    /// Fraction ρ of the paths tracked by a finger, in (0, 1].
    pub finger_fraction: f64,
    /// Processing gain N = N_f · N_c.
    pub processing_gain: u32,
    pub scheme: AccessScheme,
}

impl RakeConfig {
    pub fn new(finger_fraction: f64, processing_gain: u32, scheme: AccessScheme) -> Result<Self> {
        let cfg = RakeConfig {
            finger_fraction,
            processing_gain,
            scheme,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction(self.finger_fraction)?;
        if self.processing_gain == 0 {
            return Err(Error::domain("processing_gain", "must be positive"));
        }
        let nc = self.scheme.chips_per_frame();
        if nc == 0 {
            return Err(Error::domain("chips_per_frame", "must be positive"));
        }
        if self.processing_gain < nc {
            return Err(Error::domain(
                "processing_gain",
                format!("N = {} is smaller than N_c = {nc}", self.processing_gain),
            ));
        }
        Ok(())
    }

    pub fn chips_per_frame(&self) -> u32 {
        self.scheme.chips_per_frame()
    }

    /// N_f = N / N_c. Only N and N_c enter the SINR model, so this may be
    /// fractional.
    pub fn frames_per_symbol(&self) -> f64 {
        f64::from(self.processing_gain) / f64::from(self.chips_per_frame())
    }

    /// Number of Rake fingers `L_p = ⌈ρ L⌉` for an `num_paths`-tap channel.
    pub fn fingers(&self, num_paths: usize) -> usize {
        finger_count(self.finger_fraction, num_paths)
    }
}

fn check_fraction(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::domain(
            "finger_fraction",
            format!("must lie in (0, 1], got {rho}"),
        ));
    }
    Ok(())
}

fn finger_count(rho: f64, num_paths: usize) -> usize {
    // Absorb representation error so that e.g. 0.7 * 10 does not round up to 8.
    let raw = (rho * num_paths as f64 - 1e-9).ceil();
    (raw as usize).clamp(1, num_paths.max(1))
}

/// PRake MRC weights: `β_l = α_l` on the first `⌈ρ L⌉` taps, zero after.
pub fn prake_weights(alpha: &[Complex64], finger_fraction: f64) -> Result<Vec<Complex64>> {
    check_fraction(finger_fraction)?;
    let fingers = finger_count(finger_fraction, alpha.len());
    Ok(alpha
        .iter()
        .enumerate()
        .map(|(l, &a)| {
            if l < fingers {
                a
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// `φ_l = sqrt(min(L − l, N_c) / N_c)` for `l = 1..L−1`.
pub fn phi_coefficients(num_paths: usize, chips_per_frame: u32) -> Vec<f64> {
    let nc = f64::from(chips_per_frame.max(1));
    (1..num_paths)
        .map(|l| ((num_paths - l) as f64).min(nc) / nc)
        .map(f64::sqrt)
        .collect()
}

/// Signal-part, self-interference and multiple-access gains of one
/// realization.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub h_sp: Vec<f64>,
    pub h_si: Vec<f64>,
    /// `h_mai[k][j]`; the diagonal is unused and stored as zero.
    pub h_mai: Vec<Vec<f64>>,
    /// `ζ_k = h_SP,k / h_SI,k`, infinite when there is no self-interference.
    pub zeta: Vec<f64>,
}

impl GainSet {
    /// Assembles a gain set from its parts, deriving `ζ`.
    pub fn new(h_sp: Vec<f64>, h_si: Vec<f64>, mut h_mai: Vec<Vec<f64>>) -> Result<Self> {
        let k = h_sp.len();
        if h_si.len() != k || h_mai.len() != k || h_mai.iter().any(|row| row.len() != k) {
            return Err(Error::domain("gains", "inconsistent user counts"));
        }
        if let Some(user) = h_sp.iter().position(|&h| !(h > 0.0)) {
            return Err(Error::DegenerateChannel { user });
        }
        if h_si
            .iter()
            .chain(h_mai.iter().flatten())
            .any(|&h| !(h >= 0.0))
        {
            return Err(Error::domain(
                "gains",
                "interference gains must be nonnegative",
            ));
        }
        for (i, row) in h_mai.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let zeta = h_sp
            .iter()
            .zip(&h_si)
            .map(|(&sp, &si)| if si > 0.0 { sp / si } else { f64::INFINITY })
            .collect();
        Ok(GainSet {
            h_sp,
            h_si,
            h_mai,
            zeta,
        })
    }

    pub fn num_users(&self) -> usize {
        self.h_sp.len()
    }

    /// Users whose `ζ_k < 1`.
    pub fn zeta_violations(&self) -> Vec<usize> {
        self.zeta
            .iter()
            .enumerate()
            .filter(|(_, &z)| z < 1.0)
            .map(|(k, _)| k)
            .collect()
    }

    /// `Σ_{j≠k} h_MAI,kj p_j`.
    pub fn mai(&self, user: usize, powers: &[f64]) -> f64 {
        self.h_mai[user]
            .iter()
            .zip(powers)
            .enumerate()
            .filter(|(j, _)| *j != user)
            .map(|(_, (h, p))| h * p)
            .sum()
    }

    /// Output SINR of every user for the given transmit powers.
    pub fn sinrs(&self, powers: &[f64], noise_power: f64) -> Vec<f64> {
        (0..self.num_users())
            .map(|k| {
                let signal = self.h_sp[k] * powers[k];
                signal / (self.h_si[k] * powers[k] + self.mai(k, powers) + noise_power)
            })
            .collect()
    }
}

/// Reusable FFT plans for gain computation at a fixed path count.
pub struct GainComputer {
    num_paths: usize,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for GainComputer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GainComputer")
            .field("num_paths", &self.num_paths)
            .field("fft_len", &self.fft_len)
            .finish()
    }
}

impl GainComputer {
    pub fn new(num_paths: usize) -> Self {
        // Linear correlation spans 2L − 1 lags; pad so the circular one does
        // not wrap.
        let fft_len = (2 * num_paths.max(1)).next_power_of_two();
        let mut planner = FftPlanner::new();
        GainComputer {
            num_paths,
            fft_len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
        }
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    pub fn compute(&self, channels: &ChannelSet, rake: &RakeConfig) -> Result<GainSet> {
        rake.validate()?;
        let paths = channels.num_paths();
        if paths != self.num_paths {
            return Err(Error::domain(
                "num_paths",
                format!(
                    "computer planned for L = {}, channel has L = {paths}",
                    self.num_paths
                ),
            ));
        }
        let users = channels.num_users();
        let n = self.fft_len;
        let scale = 1.0 / n as f64;
        let processing_gain = f64::from(rake.processing_gain);
        let fingers = rake.fingers(paths);
        let lag_weights: Vec<f64> = phi_coefficients(paths, rake.chips_per_frame())
            .iter()
            .rev()
            .map(|phi| phi * phi)
            .collect();

        let zero = Complex64::new(0.0, 0.0);
        let mut scratch = vec![
            zero;
            self.forward
                .get_inplace_scratch_len()
                .max(self.inverse.get_inplace_scratch_len())
        ];
        let mut h_sp = Vec::with_capacity(users);
        let mut h_si = Vec::with_capacity(users);
        let mut tap_spectra = Vec::with_capacity(users);
        let mut weight_spectra = Vec::with_capacity(users);

        let mut taps = vec![zero; n];
        let mut weights = vec![zero; n];
        let mut cross = vec![zero; n];
        for k in 0..users {
            let alpha = channels.user_gains(k);
            let sp: f64 = alpha[..fingers].iter().map(Complex64::norm_sqr).sum();
            if !(sp > 0.0) {
                return Err(Error::DegenerateChannel { user: k });
            }

            taps.fill(zero);
            weights.fill(zero);
            taps[..paths].copy_from_slice(alpha);
            weights[..fingers].copy_from_slice(&alpha[..fingers]);
            self.forward.process_with_scratch(&mut taps, &mut scratch);
            self.forward
                .process_with_scratch(&mut weights, &mut scratch);

            // c_m = Σ_i conj(β_{i+m}) α_i + conj(α_{i+m}) β_i sits at index n − m.
            let si = if paths > 1 {
                for ((c, a), b) in cross.iter_mut().zip(&taps).zip(&weights) {
                    *c = b.conj() * a + a.conj() * b;
                }
                self.inverse.process_with_scratch(&mut cross, &mut scratch);
                let energy: f64 = lag_weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * (cross[n - 1 - i] * scale).norm_sqr())
                    .sum();
                energy / (processing_gain * sp)
            } else {
                0.0
            };

            h_sp.push(sp);
            h_si.push(si);
            tap_spectra.push(taps.iter().map(Complex64::norm_sqr).collect::<Vec<f64>>());
            weight_spectra.push(
                weights
                    .iter()
                    .map(Complex64::norm_sqr)
                    .collect::<Vec<f64>>(),
            );
        }

        // Parseval: Σ_m |r_m|² = (1/n) Σ_f |B_k(f)|² |A_j(f)|².
        let h_mai = (0..users)
            .map(|k| {
                (0..users)
                    .map(|j| {
                        if j == k {
                            return 0.0;
                        }
                        let energy: f64 = weight_spectra[k]
                            .iter()
                            .zip(&tap_spectra[j])
                            .map(|(b, a)| b * a)
                            .sum();
                        energy * scale / (processing_gain * h_sp[k])
                    })
                    .collect()
            })
            .collect();

        GainSet::new(h_sp, h_si, h_mai)
    }
}

/// One-shot gain computation; plans FFTs on every call.
pub fn compute_gains(channels: &ChannelSet, rake: &RakeConfig) -> Result<GainSet> {
    GainComputer::new(channels.num_paths()).compute(channels, rake)
}
