//! Noncooperative energy-efficient power control.
//!
//! Each user maximizes its throughput per unit transmit power,
//! `u_k = (D/M) R f(γ_k) / p_k`, with the efficiency function
//! `f(γ) = (1 − e^(−γ/2))^M`. The best response targets the SINR
//! `γ* = Γ(ζ_k)` solving `f'(γ) γ (1 − γ/ζ) = f(γ)` and is capped at `p_max`.

use crate::error::{Error, Result};
use crate::rake::GainSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    /// M, bits per packet.
    pub total_bits: u32,
    /// D, information bits per packet.
    pub info_bits: u32,
    /// R, bit/s.
    pub rate: f64,
    /// σ², W.
    pub noise_power: f64,
    /// p_max, W.
    pub max_power: f64,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams::standard()
    }
}

impl GameParams {
    /// M = D = 100 b, R = 100 kb/s, σ² = 5e−16 W, p_max = 1 µW.
    pub fn standard() -> Self {
        GameParams {
            total_bits: 100,
            info_bits: 100,
            rate: 100e3,
            noise_power: 5e-16,
            max_power: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_bits == 0 || self.info_bits == 0 {
            return Err(Error::domain("bits", "packet sizes must be positive"));
        }
        if self.info_bits > self.total_bits {
            return Err(Error::domain(
                "info_bits",
                format!("D = {} exceeds M = {}", self.info_bits, self.total_bits),
            ));
        }
        for (name, v) in [
            ("rate", self.rate),
            ("noise_power", self.noise_power),
            ("max_power", self.max_power),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(
                    name,
                    format!("must be finite and positive, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Throughput scale `(D/M) R`.
    pub fn goodput_scale(&self) -> f64 {
        f64::from(self.info_bits) / f64::from(self.total_bits) * self.rate
    }
}

/// `f(γ) = (1 − e^(−γ/2))^M`.
pub fn efficiency(sinr: f64, total_bits: u32) -> f64 {
    if sinr <= 0.0 {
        return 0.0;
    }
    (-(-sinr / 2.0).exp_m1()).powi(total_bits as i32)
}

/// `f'(γ) = (M/2) e^(−γ/2) (1 − e^(−γ/2))^(M−1)`.
pub fn efficiency_derivative(sinr: f64, total_bits: u32) -> f64 {
    if sinr < 0.0 {
        return 0.0;
    }
    let m = f64::from(total_bits);
    let decay = (-sinr / 2.0).exp();
    m / 2.0 * decay * (-(-sinr / 2.0).exp_m1()).powi(total_bits as i32 - 1)
}

/// Residual `f'(γ) γ (1 − γ/ζ) − f(γ)` of the target-SINR equation.
pub fn target_sinr_residual(sinr: f64, zeta: f64, total_bits: u32) -> f64 {
    let shrink = if zeta.is_infinite() {
        1.0
    } else {
        1.0 - sinr / zeta
    };
    efficiency_derivative(sinr, total_bits) * sinr * shrink - efficiency(sinr, total_bits)
}

/// The residual divided by `f(γ)`:
/// `M γ (1 − γ/ζ) / (2 (e^(γ/2) − 1)) − 1`, strictly decreasing on (0, ζ)
/// from `M − 1` to `−1`.
fn scaled_residual(sinr: f64, zeta: f64, total_bits: u32) -> f64 {
    let shrink = if zeta.is_infinite() {
        1.0
    } else {
        1.0 - sinr / zeta
    };
    f64::from(total_bits) * sinr * shrink / (2.0 * (sinr / 2.0).exp_m1()) - 1.0
}

const MAX_BISECTIONS: usize = 200;

/// `Γ(ζ)`: the positive root of the target-SINR equation, which lies in
/// `(0, ζ)`.
pub fn gamma_star(zeta: f64, total_bits: u32) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::domain(
            "zeta",
            format!("must be positive, got {zeta}"),
        ));
    }
    // Near zero the scaled residual tends to M − 1; it must start positive.
    if total_bits < 2 {
        return Err(Error::RootNotBracketed { zeta, total_bits });
    }
    let mut lo = 0.0_f64;
    let mut hi = if zeta.is_finite() {
        zeta
    } else {
        let mut hi = 2.0 * f64::from(total_bits).ln() + 4.0;
        while scaled_residual(hi, zeta, total_bits) > 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::RootNotBracketed { zeta, total_bits });
            }
        }
        hi
    };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if scaled_residual(mid, zeta, total_bits) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    if !(root > 0.0 && root < zeta) {
        return Err(Error::RootNotBracketed { zeta, total_bits });
    }
    Ok(root)
}

/// `u = (D/M) R f(γ) / p`; zero at `p = 0`.
pub fn utility(power: f64, sinr: f64, params: &GameParams) -> f64 {
    if power <= 0.0 {
        return 0.0;
    }
    params.goodput_scale() * efficiency(sinr, params.total_bits) / power
}

/// Capped best response of `user` to the others' `powers`.
pub fn best_response(
    user: usize,
    powers: &[f64],
    gains: &GainSet,
    target_sinr: f64,
    params: &GameParams,
) -> Result<f64> {
    let zeta = gains.zeta[user];
    if !(target_sinr < zeta) {
        return Err(Error::Invariant(format!(
            "target SINR {target_sinr} is not below zeta {zeta} for user {user}"
        )));
    }
    let shrink = if zeta.is_infinite() {
        1.0
    } else {
        1.0 - target_sinr / zeta
    };
    let interference = gains.mai(user, powers) + params.noise_power;
    let power = target_sinr * interference / (gains.h_sp[user] * shrink);
    Ok(power.min(params.max_power))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once no power changes by more than this relative amount in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub initial_power: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            max_sweeps: 10_000,
            initial_power: 1e-12,
        }
    }
}

/// Equilibrium reached (or last iterate) of best-response dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct NashOutcome {
    pub powers: Vec<f64>,
    pub sinrs: Vec<f64>,
    pub utilities: Vec<f64>,
    /// `Γ(ζ_k)` per user.
    pub targets: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Users transmitting at `p_max`.
    pub saturated: Vec<usize>,
}

impl NashOutcome {
    /// `u_k / h_SP,k` per user.
    pub fn normalized_utilities(&self, gains: &GainSet) -> Vec<f64> {
        self.utilities
            .iter()
            .zip(&gains.h_sp)
            .map(|(u, h)| u / h)
            .collect()
    }
}

/// Target SINR `Γ(ζ_k)` of every user.
pub fn target_sinrs(gains: &GainSet, params: &GameParams) -> Result<Vec<f64>> {
    gains
        .zeta
        .iter()
        .map(|&z| gamma_star(z, params.total_bits))
        .collect()
}

pub fn solve_equilibrium(gains: &GainSet, params: &GameParams) -> Result<NashOutcome> {
    solve_equilibrium_with(gains, params, &SolverConfig::default(), None)
}

/// Whether a sweep that moved powers by `step` (after one of `previous`)
/// leaves the iterate within `tolerance` of the fixed point, using the
/// geometric tail `step · c / (1 − c)` with `c = step / previous`.
fn within_tolerance(step: f64, previous: f64, tolerance: f64) -> bool {
    // Below this the step is rounding noise and `c` means nothing.
    if step <= 64.0 * f64::EPSILON {
        return true;
    }
    let c = step / previous;
    c < 1.0 && step * c / (1.0 - c) < tolerance
}

/// Sequential best-response sweeps from `initial` (or the configured
/// uniform starting power).
pub fn solve_equilibrium_with(
    gains: &GainSet,
    params: &GameParams,
    solver: &SolverConfig,
    initial: Option<&[f64]>,
) -> Result<NashOutcome> {
    params.validate()?;
    let users = gains.num_users();
    let targets = target_sinrs(gains, params)?;
    let mut powers = match initial {
        Some(p) if p.len() == users => p.to_vec(),
        Some(p) => {
            return Err(Error::domain(
                "initial",
                format!("{} starting powers for {users} users", p.len()),
            ))
        }
        None => vec![solver.initial_power; users],
    };
    if powers.iter().any(|&p| !(p > 0.0 && p <= params.max_power)) {
        return Err(Error::domain(
            "initial",
            "starting powers must lie in (0, p_max]",
        ));
    }

    let mut converged = false;
    let mut iterations = 0;
    let mut previous = f64::INFINITY;
    while iterations < solver.max_sweeps {
        iterations += 1;
        let mut worst = 0.0_f64;
        for k in 0..users {
            let next = best_response(k, &powers, gains, targets[k], params)?;
            worst = worst.max((next - powers[k]).abs() / powers[k]);
            powers[k] = next;
        }
        if worst < solver.tolerance && within_tolerance(worst, previous, solver.tolerance) {
            converged = true;
            break;
        }
        previous = worst;
    }

    let sinrs = gains.sinrs(&powers, params.noise_power);
    let utilities = powers
        .iter()
        .zip(&sinrs)
        .map(|(&p, &g)| utility(p, g, params))
        .collect();
    let saturated = powers
        .iter()
        .enumerate()
        .filter(|(_, &p)| p >= params.max_power)
        .map(|(k, _)| k)
        .collect();
    Ok(NashOutcome {
        powers,
        sinrs,
        utilities,
        targets,
        iterations,
        converged,
        saturated,
    })
}
