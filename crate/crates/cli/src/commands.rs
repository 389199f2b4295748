use rakegame::asymptotics::{self, AsymptoticInputs, Mode};
use rakegame::experiments::{sweep_loss, LossAxes, Runner};
use rakegame::game::gamma_star;
use rakegame::Error;

use crate::config::ScenarioFile;
use crate::error::CliError;
use crate::grid::{integers, Grid};
use crate::table::{real, Table};

pub const INFEASIBLE: &str = "infeasible";

/// A finished table plus the condition, if any, that should still make the
/// process exit nonzero.
pub struct Output {
    pub csv: Vec<u8>,
    pub problem: Option<CliError>,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// `Ok(Some(v))`, `Ok(None)` for an infeasible cell, or a hard error.
fn feasible<T>(r: rakegame::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn or_infeasible(v: Option<f64>) -> String {
    v.map_or_else(|| INFEASIBLE.to_string(), real)
}

pub const ANALYZE_COLUMNS: [&str; 11] = [
    "lambda_db",
    "rho",
    "beta",
    "mu",
    "nu",
    "nu0",
    "gamma_target",
    "util_uwb_norm",
    "util_cdma_norm",
    "epsilon",
    "loss_db",
];

/// Closed-form coefficients, utilities and loss over a `(λ, ρ, β)` grid at
/// processing gain `gain` (default: the file's first) and the file's `K`.
/// `β = 0` is the DS-CDMA limit.
pub fn analyze(file: &ScenarioFile, grid: &str, gain: Option<u32>) -> Result<Output, CliError> {
    let grid = Grid::parse(grid, &["lambda_db", "rho", "beta"]).map_err(usage)?;
    let l = file.channel.num_paths as f64;
    let default_beta = file
        .rake
        .chips_per_frame
        .iter()
        .map(|&nc| if nc == 1 { 0.0 } else { f64::from(nc) / l })
        .collect();
    let lambdas = grid.or("lambda_db", vec![file.channel.pdp_ratio_db]);
    let rhos = grid.or("rho", file.rake.finger_fractions.clone());
    let betas = grid.or("beta", default_beta);
    let n = gain.unwrap_or(file.rake.processing_gains[0]);
    let k = u32::try_from(file.channel.num_users).map_err(usage)?;
    let game = file.game_params();

    let mut table = Table::new(&ANALYZE_COLUMNS)?;
    let mut infeasible = 0;
    for &lambda_db in &lambdas {
        let lam = rakegame::channel::db_to_linear(lambda_db);
        for &rho in &rhos {
            for &beta in &betas {
                let inputs = AsymptoticInputs {
                    pdp_ratio: lam,
                    finger_fraction: rho,
                    load_factor: beta,
                    processing_gain: n,
                    num_users: k,
                    game,
                };
                inputs.validate()?;
                let mu = asymptotics::mu(lam, rho)?;
                let nu0 = asymptotics::nu0(lam, rho)?;
                let nu = asymptotics::nu_or_limit(lam, rho, beta)?;
                let gamma = gamma_star(f64::from(n) / nu, game.total_bits)?;
                let uwb = feasible(asymptotics::asymptotic_utility(&inputs, Mode::Uwb))?;
                let cdma = feasible(asymptotics::asymptotic_utility(&inputs, Mode::Cdma))?;
                let loss = feasible(asymptotics::loss(&inputs))?;
                if uwb.is_none() || cdma.is_none() {
                    infeasible += 1;
                }
                table.row([
                    real(lambda_db),
                    real(rho),
                    real(beta),
                    real(mu),
                    real(nu),
                    real(nu0),
                    real(gamma),
                    or_infeasible(uwb),
                    or_infeasible(cdma),
                    or_infeasible(loss.map(|x| x.epsilon)),
                    or_infeasible(loss.map(|x| x.loss_db)),
                ])?;
            }
        }
    }
    if infeasible > 0 {
        log::info!("{infeasible} grid cells have no feasible closed form");
    }
    Ok(Output {
        csv: table.into_bytes()?,
        problem: None,
    })
}

pub const LOSS_COLUMNS: [&str; 9] = [
    "N", "K", "L", "Nc", "rho", "beta", "epsilon", "loss_db", "status",
];

/// Closed-form DS-CDMA loss over an `(N, K, L, ρ)` grid for every chip count
/// in the file.
pub fn loss(file: &ScenarioFile, grid: &str) -> Result<Output, CliError> {
    let grid = Grid::parse(grid, &["n", "k", "l", "rho"]).map_err(usage)?;
    let as_f64 = |v: &[u32]| v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>();
    let axes = LossAxes {
        processing_gains: integers("n", &grid.or("n", as_f64(&file.rake.processing_gains)))
            .map_err(usage)?,
        num_users: integers("k", &grid.or("k", vec![file.channel.num_users as f64]))
            .map_err(usage)?,
        num_paths: integers("l", &grid.or("l", vec![file.channel.num_paths as f64]))
            .map_err(usage)?,
        finger_fractions: grid.or("rho", file.rake.finger_fractions.clone()),
    };
    if axes.num_paths.contains(&0)
        || axes.num_users.contains(&0)
        || axes.processing_gains.contains(&0)
    {
        return Err(usage("grid axes n, k and l must be positive"));
    }
    let mut table = Table::new(&LOSS_COLUMNS)?;
    for scheme in file.schemes() {
        let base = file
            .scenario(file.rake.finger_fractions[0])
            .with_scheme(scheme);
        for row in sweep_loss(&base, &axes) {
            let loss = feasible(row.loss)?;
            table.row([
                row.processing_gain.to_string(),
                row.num_users.to_string(),
                row.num_paths.to_string(),
                row.chips_per_frame.to_string(),
                real(row.finger_fraction),
                real(row.load_factor),
                or_infeasible(loss.map(|x| x.epsilon)),
                or_infeasible(loss.map(|x| x.loss_db)),
                if loss.is_some() { "ok" } else { INFEASIBLE }.to_string(),
            ])?;
        }
    }
    Ok(Output {
        csv: table.into_bytes()?,
        problem: None,
    })
}

pub const SIMULATE_COLUMNS: [&str; 13] = [
    "N",
    "Nf",
    "Nc",
    "K",
    "L",
    "rho",
    "mode",
    "n_real",
    "mean_util_norm",
    "stderr",
    "closed_form_util_norm",
    "rel_gap",
    "loss_db_pair",
];

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
}

/// Monte Carlo ensembles for every `(ρ, N, N_c)` cell of the file. CDMA and
/// UWB cells at the same `(ρ, N)` share channel draws, and UWB rows carry
/// the paired loss when a CDMA column is present.
pub fn simulate(file: &ScenarioFile, opts: &SimulateOptions) -> Result<Output, CliError> {
    let mut file = file.clone();
    if let Some(seed) = opts.seed {
        file.run.seed = seed;
    }
    if let Some(n) = opts.realizations {
        if n == 0 {
            return Err(usage("--realizations must be positive"));
        }
        file.run.realizations = n;
    }
    let runner = opts.workers.map_or_else(Runner::default, Runner::new);
    log::info!("running on {} worker(s)", runner.workers());

    let schemes = file.schemes();
    let mut table = Table::new(&SIMULATE_COLUMNS)?;
    let mut infeasible = Vec::new();
    let mut failed = Vec::new();
    for &rho in &file.rake.finger_fractions {
        let base = file.scenario(rho);
        let sweep = runner.sweep_gain(&base, &file.rake.processing_gains, &schemes)?;
        for note in &sweep.skipped {
            log::warn!("rho = {rho}: skipped {note}");
        }
        for row in sweep.rows {
            let s = &row.stats;
            let cell = format!(
                "N={} Nc={} rho={rho} ({})",
                s.cell.processing_gain,
                s.cell.chips_per_frame,
                row.scheme.label()
            );
            if row.closed_form.is_none() {
                infeasible.push(cell.clone());
            }
            if s.failed() {
                failed.push(format!(
                    "{cell}: {} of {} equilibria did not converge",
                    s.non_converged, s.n_realizations
                ));
            }
            if s.zeta_violations > 0 {
                log::warn!("{cell}: {} users with zeta < 1", s.zeta_violations);
            }
            table.row([
                s.cell.processing_gain.to_string(),
                real(f64::from(s.cell.processing_gain) / f64::from(s.cell.chips_per_frame)),
                s.cell.chips_per_frame.to_string(),
                s.cell.num_users.to_string(),
                s.cell.num_paths.to_string(),
                real(rho),
                row.scheme.label().to_string(),
                s.n_realizations.to_string(),
                real(s.mean_normalized_utility),
                real(s.std_error),
                or_infeasible(row.closed_form),
                or_infeasible(row.rel_gap),
                s.mean_loss_db.map_or_else(String::new, real),
            ])?;
        }
    }
    let problem = if !failed.is_empty() {
        Some(CliError::EnsembleFailed(format!(
            "ensemble failure:\n  {}",
            failed.join("\n  ")
        )))
    } else if !infeasible.is_empty() {
        Some(CliError::Infeasible(format!(
            "no feasible closed form (N too small for K users):\n  {}",
            infeasible.join("\n  ")
        )))
    } else {
        None
    };
    Ok(Output {
        csv: table.into_bytes()?,
        problem,
    })
}
