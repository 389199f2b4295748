//! Monte Carlo ensembles and parameter sweeps.
//!
//! A realization draws channels, computes the Rake gains, solves the power
//! control game and records the mean of `u*_k / h_SP,k` over users.
//! Realizations are seeded from `(master_seed, index)` only, so ensembles
//! that share a seed also share channels. This is how the paired
//! CDMA/UWB comparisons are built. Per-realization results are collected in
//! index order and reduced serially, which keeps the statistics bitwise
//! independent of the worker count.

use rayon::prelude::*;

use crate::asymptotics::{self, AsymptoticInputs, Loss, Mode};
use crate::channel::{draw_realization, ChannelConfig};
use crate::error::{Error, Result};
use crate::game::{solve_equilibrium, GameParams};
use crate::rake::{AccessScheme, GainComputer, RakeConfig};

/// Redraws allowed for one realization before the ensemble gives up.
const MAX_ATTEMPTS: u32 = 64;

/// An ensemble above this non-converged fraction is flagged as failed.
pub const MAX_NON_CONVERGED_FRACTION: f64 = 0.01;

/// Default ensemble size. Full-fidelity runs use 10 000.
pub const DEFAULT_REALIZATIONS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: ChannelConfig,
    pub rake: RakeConfig,
    pub game: GameParams,
    pub n_realizations: usize,
    /// Overrides `channel.seed`.
    pub master_seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.rake.validate()?;
        self.game.validate()?;
        if self.n_realizations == 0 {
            return Err(Error::domain("n_realizations", "must be positive"));
        }
        Ok(())
    }

    pub fn with_scheme(&self, scheme: AccessScheme) -> Scenario {
        let mut s = self.clone();
        s.rake.scheme = scheme;
        s
    }

    pub fn with_processing_gain(&self, processing_gain: u32) -> Scenario {
        let mut s = self.clone();
        s.rake.processing_gain = processing_gain;
        s
    }

    /// β = N_c / L, or 0 for DS-CDMA.
    pub fn load_factor(&self) -> f64 {
        load_factor(self.rake.scheme, self.channel.num_paths)
    }

    pub fn asymptotic_inputs(&self) -> AsymptoticInputs {
        AsymptoticInputs {
            pdp_ratio: self.channel.pdp_ratio,
            finger_fraction: self.rake.finger_fraction,
            load_factor: self.load_factor(),
            processing_gain: self.rake.processing_gain,
            num_users: self.channel.num_users as u32,
            game: self.game,
        }
    }

    /// Closed-form normalized utility for this scenario's access scheme.
    pub fn closed_form_utility(&self) -> Result<f64> {
        let mode = if self.rake.scheme.is_cdma() {
            Mode::Cdma
        } else {
            Mode::Uwb
        };
        asymptotics::asymptotic_utility(&self.asymptotic_inputs(), mode)
    }

    pub fn cell(&self) -> CellInfo {
        CellInfo {
            processing_gain: self.rake.processing_gain,
            chips_per_frame: self.rake.chips_per_frame(),
            num_users: self.channel.num_users,
            num_paths: self.channel.num_paths,
            pdp_ratio: self.channel.pdp_ratio,
            finger_fraction: self.rake.finger_fraction,
        }
    }
}

fn load_factor(scheme: AccessScheme, num_paths: usize) -> f64 {
    if scheme.is_cdma() {
        0.0
    } else {
        f64::from(scheme.chips_per_frame()) / num_paths as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellInfo {
    pub processing_gain: u32,
    pub chips_per_frame: u32,
    pub num_users: usize,
    pub num_paths: usize,
    pub pdp_ratio: f64,
    pub finger_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationOutcome {
    /// Mean over users of `u*_k / h_SP,k`.
    pub normalized_utility: f64,
    pub converged: bool,
    pub iterations: usize,
    pub rejections: u32,
    pub saturated_users: usize,
    pub zeta_violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub cell: CellInfo,
    pub n_realizations: usize,
    pub mean_normalized_utility: f64,
    /// Standard error of the mean across realizations.
    pub std_error: f64,
    /// Paired `10 log10(ū_UWB / ū_CDMA)` when a CDMA twin was run.
    pub mean_loss_db: Option<f64>,
    pub rejection_count: u64,
    pub non_converged: usize,
    pub saturated_users: usize,
    pub zeta_violations: usize,
}

impl AggregateStats {
    fn from_outcomes(cell: CellInfo, outcomes: &[RealizationOutcome]) -> AggregateStats {
        let n = outcomes.len();
        let mean = outcomes.iter().map(|o| o.normalized_utility).sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = outcomes
                .iter()
                .map(|o| (o.normalized_utility - mean).powi(2))
                .sum::<f64>()
                / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        AggregateStats {
            cell,
            n_realizations: n,
            mean_normalized_utility: mean,
            std_error,
            mean_loss_db: None,
            rejection_count: outcomes.iter().map(|o| u64::from(o.rejections)).sum(),
            non_converged: outcomes.iter().filter(|o| !o.converged).count(),
            saturated_users: outcomes.iter().map(|o| o.saturated_users).sum(),
            zeta_violations: outcomes.iter().map(|o| o.zeta_violations).sum(),
        }
    }

    /// More than 1% of the equilibria did not converge.
    pub fn failed(&self) -> bool {
        self.non_converged as f64 > MAX_NON_CONVERGED_FRACTION * self.n_realizations as f64
    }
}

/// Runs one realization of `scenario`, redrawing channels with a zero
/// signal-part gain.
pub fn run_realization(
    scenario: &Scenario,
    index: u64,
    computer: &GainComputer,
) -> Result<RealizationOutcome> {
    let mut channel = scenario.channel.clone();
    channel.seed = scenario.master_seed;
    for attempt in 0..MAX_ATTEMPTS {
        let channels = draw_realization(&channel, index, attempt)?;
        let gains = match computer.compute(&channels, &scenario.rake) {
            Ok(g) => g,
            Err(Error::DegenerateChannel { .. }) => continue,
            Err(e) => return Err(e),
        };
        let outcome = solve_equilibrium(&gains, &scenario.game)?;
        let normalized = outcome.normalized_utilities(&gains);
        return Ok(RealizationOutcome {
            normalized_utility: normalized.iter().sum::<f64>() / normalized.len() as f64,
            converged: outcome.converged,
            iterations: outcome.iterations,
            rejections: attempt,
            saturated_users: outcome.saturated.len(),
            zeta_violations: gains.zeta_violations().len(),
        });
    }
    Err(Error::Invariant(format!(
        "realization {index}: {MAX_ATTEMPTS} consecutive degenerate channel draws"
    )))
}

/// Executes ensembles on a fixed number of worker threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Runner {
    workers: usize,
}

impl Default for Runner {
    fn default() -> Self {
        Runner::new(rayon::current_num_threads())
    }
}

impl Runner {
    pub fn new(workers: usize) -> Self {
        Runner {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Per-realization outcomes in index order.
    pub fn realizations(&self, scenario: &Scenario) -> Result<Vec<RealizationOutcome>> {
        scenario.validate()?;
        if self.workers == 1 {
            let computer = GainComputer::new(scenario.channel.num_paths);
            return (0..scenario.n_realizations as u64)
                .map(|i| run_realization(scenario, i, &computer))
                .collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..scenario.n_realizations as u64)
                .into_par_iter()
                .map_init(
                    || GainComputer::new(scenario.channel.num_paths),
                    |computer, i| run_realization(scenario, i, computer),
                )
                .collect()
        })
    }

    pub fn run_ensemble(&self, scenario: &Scenario) -> Result<AggregateStats> {
        let outcomes = self.realizations(scenario)?;
        Ok(AggregateStats::from_outcomes(scenario.cell(), &outcomes))
    }

    /// Runs `scenario` and its DS-CDMA twin on the same channels. Returns
    /// `(cdma, uwb)`, with the paired loss stored on the UWB statistics.
    pub fn run_paired(&self, scenario: &Scenario) -> Result<(AggregateStats, AggregateStats)> {
        let cdma = self.run_ensemble(&scenario.with_scheme(AccessScheme::Cdma))?;
        let mut uwb = self.run_ensemble(scenario)?;
        uwb.mean_loss_db = Some(paired_loss_db(&uwb, &cdma));
        Ok((cdma, uwb))
    }

    /// One ensemble per `(N, scheme)` at the base scenario's `ρ`.
    pub fn sweep_gain(
        &self,
        base: &Scenario,
        processing_gains: &[u32],
        schemes: &[AccessScheme],
    ) -> Result<GainSweep> {
        let mut sweep = GainSweep::default();
        for &n in processing_gains {
            let mut cdma_mean = None;
            let mut cells = Vec::new();
            for &scheme in schemes {
                let nc = scheme.chips_per_frame();
                if n < nc {
                    sweep.skipped.push(format!(
                        "N = {n} with N_c = {nc}: fewer than one frame per symbol"
                    ));
                    continue;
                }
                let scenario = base.with_processing_gain(n).with_scheme(scheme);
                let stats = self.run_ensemble(&scenario)?;
                if scheme.is_cdma() {
                    cdma_mean = Some(stats.mean_normalized_utility);
                }
                let closed_form = scenario.closed_form_utility();
                cells.push((scheme, stats, closed_form));
            }
            for (scheme, mut stats, closed_form) in cells {
                if !scheme.is_cdma() {
                    stats.mean_loss_db =
                        cdma_mean.map(|c| 10.0 * (stats.mean_normalized_utility / c).log10());
                }
                let closed_form = match closed_form {
                    Ok(v) => Some(v),
                    Err(Error::Infeasible { .. }) => None,
                    Err(e) => return Err(e),
                };
                let rel_gap = closed_form.map(|c| stats.mean_normalized_utility / c - 1.0);
                sweep.rows.push(GainSweepRow {
                    scheme,
                    stats,
                    closed_form,
                    rel_gap,
                });
            }
        }
        Ok(sweep)
    }
}

/// `10 log10(ū_UWB / ū_CDMA)`.
pub fn paired_loss_db(uwb: &AggregateStats, cdma: &AggregateStats) -> f64 {
    10.0 * (uwb.mean_normalized_utility / cdma.mean_normalized_utility).log10()
}

pub fn run_ensemble(scenario: &Scenario) -> Result<AggregateStats> {
    Runner::default().run_ensemble(scenario)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSweepRow {
    pub scheme: AccessScheme,
    pub stats: AggregateStats,
    /// Closed-form normalized utility; `None` when the cell is infeasible.
    pub closed_form: Option<f64>,
    /// `mean / closed_form − 1`.
    pub rel_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GainSweep {
    pub rows: Vec<GainSweepRow>,
    /// Cells that were not run, with the reason.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossAxes {
    pub processing_gains: Vec<u32>,
    pub num_users: Vec<u32>,
    pub num_paths: Vec<usize>,
    pub finger_fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub processing_gain: u32,
    pub num_users: u32,
    pub num_paths: usize,
    pub chips_per_frame: u32,
    pub finger_fraction: f64,
    pub load_factor: f64,
    /// `Err(Error::Infeasible)` marks an infeasible cell.
    pub loss: Result<Loss>,
}

/// Closed-form CDMA-vs-UWB loss over the grid spanned by `axes`, with
/// `N_c` and `λ` taken from `base`.
pub fn sweep_loss(base: &Scenario, axes: &LossAxes) -> Vec<LossRow> {
    let nc = base.rake.chips_per_frame();
    let mut rows = Vec::new();
    for &n in &axes.processing_gains {
        for &k in &axes.num_users {
            for &l in &axes.num_paths {
                for &rho in &axes.finger_fractions {
                    let beta = load_factor(base.rake.scheme, l);
                    let inputs = AsymptoticInputs {
                        pdp_ratio: base.channel.pdp_ratio,
                        finger_fraction: rho,
                        load_factor: beta,
                        processing_gain: n,
                        num_users: k,
                        game: base.game,
                    };
                    rows.push(LossRow {
                        processing_gain: n,
                        num_users: k,
                        num_paths: l,
                        chips_per_frame: nc,
                        finger_fraction: rho,
                        load_factor: beta,
                        loss: asymptotics::loss(&inputs),
                    });
                }
            }
        }
    }
    rows
}
