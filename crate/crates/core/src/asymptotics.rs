//! Large-system limits as the number of paths grows with `ρ = L_p/L` and
//! `β = N_c/L` held fixed.
//!
//! In that regime `N h_SI,k / h_SP,k → ν(λ, ρ, β)` and the multiple-access
//! term seen by user `k` tends to `μ(λ, ρ)/N` times the other users' received
//! powers. The equilibrium utility normalized by `h_SP,k` becomes
//!
//! ```text
//! u*/h_SP = (D/M) R f(Γ(N/ν)) / (σ² Γ(N/ν)) · (1 − Γ(N/ν) [(K−1) μ + ν] / N)
//! ```
//!
//! DS-CDMA is the `β → 0` limit, where `ν` becomes `ν₀(λ, ρ)`.
//!
//! All powers of `λ` are evaluated as `exp(x ln λ)`, and differences such as
//! `λ^x − 1` as `expm1(x ln λ)`.

use crate::error::{Error, Result};
use crate::game::{efficiency, gamma_star, GameParams};

/// `10 log10(e)`: dB per neper of linear loss.
pub const DB_PER_LINEAR_LOSS: f64 = 10.0 * std::f64::consts::LOG10_E;

fn check_ratio(pdp_ratio: f64) -> Result<f64> {
    if !(pdp_ratio > 1.0 && pdp_ratio.is_finite()) {
        return Err(Error::domain(
            "pdp_ratio",
            format!("must be finite and > 1, got {pdp_ratio}"),
        ));
    }
    // ln(1 + x) keeps precision for λ just above one.
    Ok((pdp_ratio - 1.0).ln_1p())
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

/// MAI coefficient `μ(λ, ρ) = (λ − 1) λ^(ρ−1) / (λ^ρ − 1)`.
pub fn mu(pdp_ratio: f64, finger_fraction: f64) -> Result<f64> {
    let t = check_ratio(pdp_ratio)?;
    check_fraction(finger_fraction)?;
    let rho = finger_fraction;
    // (λ − 1)/λ = 1 − λ^(−1), (λ^ρ − 1)/λ^ρ = 1 − λ^(−ρ).
    Ok((-t).exp_m1() / (-rho * t).exp_m1())
}

/// CDMA self-interference coefficient
/// `ν₀(λ, ρ) = (λ + λ^ρ − 2λ^(1+ρ)) / (λ − λ^(1+ρ))`.
pub fn nu0(pdp_ratio: f64, finger_fraction: f64) -> Result<f64> {
    let t = check_ratio(pdp_ratio)?;
    check_fraction(finger_fraction)?;
    let rho = finger_fraction;
    // Divide through by λ^(1+ρ): (λ^(−ρ) + λ^(−1) − 2) / (λ^(−ρ) − 1).
    let neg_rho = (-rho * t).exp_m1();
    let neg_one = (-t).exp_m1();
    Ok((neg_rho + neg_one) / neg_rho)
}

/// Closed-form pieces of `ν(λ, ρ, β)`, named after the interval of `β` they
/// cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NuBranch {
    /// `0 < β ≤ min(ρ, 1 − ρ)`.
    Short,
    /// `ρ ≤ β ≤ 1 − ρ`, with `ρ ≤ 1/2`.
    MidFewFingers,
    /// `1 − ρ ≤ β ≤ ρ`, with `ρ ≥ 1/2`.
    MidManyFingers,
    /// `max(ρ, 1 − ρ) ≤ β ≤ 1`.
    Long,
    /// `β ≥ 1`.
    FrameExceedsSpread,
}

impl NuBranch {
    pub const ALL: [NuBranch; 5] = [
        NuBranch::Short,
        NuBranch::MidFewFingers,
        NuBranch::MidManyFingers,
        NuBranch::Long,
        NuBranch::FrameExceedsSpread,
    ];

    /// Branch used for `(ρ, β)`. Where two intervals meet, the one covering
    /// smaller `β` wins.
    pub fn select(finger_fraction: f64, load_factor: f64) -> NuBranch {
        let rho = finger_fraction;
        let beta = load_factor;
        if beta <= rho.min(1.0 - rho) {
            NuBranch::Short
        } else if rho <= 0.5 && beta <= 1.0 - rho {
            NuBranch::MidFewFingers
        } else if rho > 0.5 && beta <= rho {
            NuBranch::MidManyFingers
        } else if beta <= 1.0 {
            NuBranch::Long
        } else {
            NuBranch::FrameExceedsSpread
        }
    }

    /// Evaluates this branch's formula, whether or not `(ρ, β)` lies in its
    /// interval.
    pub fn eval(self, pdp_ratio: f64, finger_fraction: f64, load_factor: f64) -> Result<f64> {
        let t = check_ratio(pdp_ratio)?;
        check_fraction(finger_fraction)?;
        if !(load_factor > 0.0 && load_factor.is_finite()) {
            return Err(Error::domain(
                "load_factor",
                format!("must be finite and positive, got {load_factor}"),
            ));
        }
        let rho = finger_fraction;
        let beta = load_factor;
        let pow = |x: f64| (x * t).exp();
        let lam = pow(1.0);
        let lam_rho = pow(rho);
        let rho_m1 = (rho * t).exp_m1();
        let common = 2.0 * rho_m1 * rho_m1 * beta * t;

        let value = match self {
            // Numerator and denominator divided by λ^(1+β).
            NuBranch::Short => {
                let num = -(-beta * t).exp_m1() * (4.0 * pow(2.0 * rho) + 3.0 * pow(beta) - 1.0)
                    - 2.0 * pow(rho - 1.0) * (lam_rho + 3.0 * lam - 1.0) * beta * t;
                num / common
            }
            NuBranch::MidFewFingers => {
                let num = (4.0 - pow(-beta)) * (2.0 * rho * t).exp_m1()
                    - 2.0 * pow(rho - 1.0) * (3.0 * lam * rho - beta + lam_rho * beta) * t;
                num / common
            }
            // Numerator and denominator divided by λ^(2+β).
            NuBranch::MidManyFingers => {
                let num = -4.0 * pow(2.0 * rho - beta) - 4.0
                    + pow(2.0 * (rho + beta) - 2.0 - beta)
                    + 4.0 * pow(2.0 * rho)
                    + 3.0 * pow(beta)
                    - 2.0 * pow(rho - 1.0) * (rho + 3.0 * lam * beta + lam_rho * beta - 1.0) * t;
                num / common
            }
            NuBranch::Long => {
                let num = -pow(2.0 * rho - beta) - 4.0
                    + pow(2.0 * (rho + beta) - 2.0 - beta)
                    + 4.0 * pow(2.0 * rho)
                    - 2.0 * pow(rho - 1.0) * (rho + 3.0 * lam * rho + lam_rho * beta - 1.0) * t;
                num / common
            }
            // Numerator and denominator divided by λ.
            NuBranch::FrameExceedsSpread => {
                let num = 2.0 * (2.0 * rho * t).exp_m1()
                    - (lam_rho + rho + 3.0 * lam * rho - 1.0) * pow(rho - 1.0) * t;
                2.0 * num / common
            }
        };
        Ok(value)
    }
}

/// UWB self-interference coefficient `ν(λ, ρ, β)` for `β > 0`.
pub fn nu(pdp_ratio: f64, finger_fraction: f64, load_factor: f64) -> Result<f64> {
    NuBranch::select(finger_fraction, load_factor).eval(pdp_ratio, finger_fraction, load_factor)
}

/// `ν` with `β = 0` read as the CDMA limit `ν₀`.
pub fn nu_or_limit(pdp_ratio: f64, finger_fraction: f64, load_factor: f64) -> Result<f64> {
    if load_factor == 0.0 {
        nu0(pdp_ratio, finger_fraction)
    } else {
        nu(pdp_ratio, finger_fraction, load_factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Uses `ν(λ, ρ, β)`; `β = 0` falls back to `ν₀`.
    Uwb,
    /// Uses `ν₀(λ, ρ)` regardless of `β`.
    Cdma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticInputs {
    /// λ, linear.
    pub pdp_ratio: f64,
    /// ρ = L_p / L.
    pub finger_fraction: f64,
    /// β = N_c / L; zero means DS-CDMA.
    pub load_factor: f64,
    pub processing_gain: u32,
    pub num_users: u32,
    pub game: GameParams,
}

impl AsymptoticInputs {
    pub fn validate(&self) -> Result<()> {
        check_ratio(self.pdp_ratio)?;
        check_fraction(self.finger_fraction)?;
        if !(self.load_factor >= 0.0 && self.load_factor.is_finite()) {
            return Err(Error::domain(
                "load_factor",
                "must be finite and nonnegative",
            ));
        }
        if self.processing_gain == 0 || self.num_users == 0 {
            return Err(Error::domain(
                "sizes",
                "processing gain and user count must be positive",
            ));
        }
        self.game.validate()?;
        if f64::from(self.num_users) > 0.1 * f64::from(self.processing_gain) {
            log::warn!(
                "K = {} is not much smaller than N = {}; large-system figures may be loose",
                self.num_users,
                self.processing_gain
            );
        }
        Ok(())
    }

    fn nu_for(&self, mode: Mode) -> Result<f64> {
        match mode {
            Mode::Uwb => nu_or_limit(self.pdp_ratio, self.finger_fraction, self.load_factor),
            Mode::Cdma => nu0(self.pdp_ratio, self.finger_fraction),
        }
    }
}

struct Terms {
    mu: f64,
    nu: f64,
    gamma: f64,
    /// `N − Γ [(K−1) μ + ν]`.
    headroom: f64,
}

fn terms(inputs: &AsymptoticInputs, nu: f64) -> Result<Terms> {
    let n = f64::from(inputs.processing_gain);
    let mu = mu(inputs.pdp_ratio, inputs.finger_fraction)?;
    let gamma = gamma_star(n / nu, inputs.game.total_bits)?;
    let load = gamma * (f64::from(inputs.num_users - 1) * mu + nu);
    if !(load < n) {
        return Err(Error::Infeasible {
            load,
            processing_gain: n,
        });
    }
    Ok(Terms {
        mu,
        nu,
        gamma,
        headroom: n - load,
    })
}

fn utility_from(inputs: &AsymptoticInputs, t: &Terms) -> f64 {
    let game = &inputs.game;
    let n = f64::from(inputs.processing_gain);
    game.goodput_scale() * efficiency(t.gamma, game.total_bits) / (game.noise_power * t.gamma)
        * (t.headroom / n)
}

/// Large-system equilibrium utility per unit `h_SP`, in bit/J.
pub fn asymptotic_utility(inputs: &AsymptoticInputs, mode: Mode) -> Result<f64> {
    inputs.validate()?;
    let t = terms(inputs, inputs.nu_for(mode)?)?;
    Ok(utility_from(inputs, &t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loss {
    /// Linear loss ε.
    pub epsilon: f64,
    /// First-order loss `10 log10(e) ε`, in dB.
    pub loss_db: f64,
}

/// Loss of DS-CDMA with respect to IR-UWB at equal processing gain:
/// `ε = Γ(N/ν) (ν₀ − ν) / (N − Γ(N/ν) [(K−1) μ + ν])`.
pub fn loss(inputs: &AsymptoticInputs) -> Result<Loss> {
    inputs.validate()?;
    let uwb = terms(inputs, inputs.nu_for(Mode::Uwb)?)?;
    let delta_nu = nu0(inputs.pdp_ratio, inputs.finger_fraction)? - uwb.nu;
    let epsilon = uwb.gamma * delta_nu / uwb.headroom;
    Ok(Loss {
        epsilon,
        loss_db: DB_PER_LINEAR_LOSS * epsilon,
    })
}

/// `10 log10(u_UWB / u_CDMA)` from the two closed-form utilities, each with
/// its own target SINR.
pub fn exact_loss_db(inputs: &AsymptoticInputs) -> Result<f64> {
    let uwb = asymptotic_utility(inputs, Mode::Uwb)?;
    let cdma = asymptotic_utility(inputs, Mode::Cdma)?;
    Ok(10.0 * (uwb / cdma).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReport {
    pub mu: f64,
    pub nu: f64,
    pub nu0: f64,
    /// Γ(N/ν).
    pub gamma_target: f64,
    pub normalized_utility: f64,
    pub normalized_utility_cdma: f64,
    pub epsilon: f64,
    pub loss_db: f64,
}

/// Every closed-form quantity for one parameter point. Fails if either the
/// UWB or the CDMA system is infeasible.
pub fn report(inputs: &AsymptoticInputs) -> Result<AsymptoticReport> {
    inputs.validate()?;
    let uwb = terms(inputs, inputs.nu_for(Mode::Uwb)?)?;
    let cdma = terms(inputs, inputs.nu_for(Mode::Cdma)?)?;
    let epsilon = uwb.gamma * (cdma.nu - uwb.nu) / uwb.headroom;
    Ok(AsymptoticReport {
        mu: uwb.mu,
        nu: uwb.nu,
        nu0: cdma.nu,
        gamma_target: uwb.gamma,
        normalized_utility: utility_from(inputs, &uwb),
        normalized_utility_cdma: utility_from(inputs, &cdma),
        epsilon,
        loss_db: DB_PER_LINEAR_LOSS * epsilon,
    })
}
