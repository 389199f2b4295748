//! Acceptance criteria, one line each. Run with
//! `cargo test -p rakegame-cli --test acceptance`; exits nonzero if any
//! criterion fails.

// Negated comparisons make NaN count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use std::process::{Command, ExitCode};

use rakegame::asymptotics::{self, nu, nu0, NuBranch};
use rakegame::channel::{draw_realization, ChannelConfig};
use rakegame::experiments::{Runner, Scenario};
use rakegame::game::{best_response, gamma_star, solve_equilibrium, target_sinr_residual};
use rakegame::rake::{compute_gains, AccessScheme, RakeConfig};
use rakegame::GameParams;
use rakegame_oracle::dense::dense_gains;

const LAMBDAS: [f64; 3] = [10.0, 100.0, 1e4];

fn rhos() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Small deterministic generator for test instances.
struct Stream(u64);

impl Stream {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn from_failures(summary: String, failures: Vec<String>) -> Verdict {
        Verdict {
            pass: failures.is_empty(),
            summary,
            details: failures,
        }
    }
}

fn c1_identities() -> Verdict {
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for lam in [2.0, 10.0, 100.0, 1e4] {
        let e_nu0 = rel(nu0(lam, 1.0).unwrap(), 2.0);
        let e_mu = rel(asymptotics::mu(lam, 1.0).unwrap(), 1.0);
        worst = worst.max(e_nu0).max(e_mu);
        if e_nu0 > 1e-12 || e_mu > 1e-12 {
            failures.push(format!(
                "λ={lam}: nu0 rel err {e_nu0:.2e}, mu rel err {e_mu:.2e}"
            ));
        }
    }
    Verdict::from_failures(
        format!("nu0(λ,1)=2 and mu(λ,1)=1, worst rel err {worst:.2e} (tol 1e-12)"),
        failures,
    )
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

fn c2_branch_continuity() -> Verdict {
    let mut worst = 0.0_f64;
    let mut checked = 0;
    let mut failures = Vec::new();
    for lam in LAMBDAS {
        for rho in rhos() {
            let mut bounds = vec![rho.min(1.0 - rho), rho, 1.0 - rho, rho.max(1.0 - rho), 1.0];
            bounds.retain(|&b| b > 0.0);
            bounds.sort_by(f64::total_cmp);
            bounds.dedup();
            for b in bounds {
                let below = NuBranch::select(rho, b);
                let above = NuBranch::select(rho, next_up(b));
                if below == above {
                    continue;
                }
                let lo = below.eval(lam, rho, b).unwrap();
                let hi = above.eval(lam, rho, b).unwrap();
                let e = rel(lo, hi);
                worst = worst.max(e);
                checked += 1;
                if e > 1e-9 {
                    failures.push(format!(
                        "λ={lam} ρ={rho} β={b}: {below:?}={lo} vs {above:?}={hi}"
                    ));
                }
            }
        }
    }
    Verdict::from_failures(
        format!("{checked} branch boundaries, worst rel gap {worst:.2e} (tol 1e-9)"),
        failures,
    )
}

fn c3_limit() -> Verdict {
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for lam in LAMBDAS {
        for rho in rhos() {
            let limit = nu0(lam, rho).unwrap();
            let e = (nu(lam, rho, 1e-8).unwrap() - limit).abs() / limit;
            worst = worst.max(e);
            if !(e < 1e-5) {
                failures.push(format!("λ={lam} ρ={rho}: rel err {e:.2e}"));
            }
        }
    }
    Verdict::from_failures(
        format!("nu(λ,ρ,1e-8) vs nu0, worst rel err {worst:.2e} (tol 1e-5)"),
        failures,
    )
}

fn c4_monotonicity() -> Verdict {
    let betas = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0];
    let rhos = rhos();
    let v = |lam: f64, rho: f64, beta: f64| nu(lam, rho, beta).unwrap();
    let (mut in_beta, mut in_lambda, mut in_rho, mut above) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &lam in &LAMBDAS {
        for &rho in &rhos {
            for w in betas.windows(2) {
                if !(v(lam, rho, w[1]) < v(lam, rho, w[0])) {
                    in_beta.push(format!("λ={lam} ρ={rho} β {}→{}", w[0], w[1]));
                }
            }
            for &beta in &betas {
                if !(nu0(lam, rho).unwrap() > v(lam, rho, beta)) {
                    above.push(format!("λ={lam} ρ={rho} β={beta}"));
                }
            }
        }
    }
    for &rho in &rhos {
        for &beta in &betas {
            for w in LAMBDAS.windows(2) {
                if v(w[1], rho, beta) > v(w[0], rho, beta) {
                    in_lambda.push(format!("ρ={rho} β={beta} λ {}→{}", w[0], w[1]));
                }
            }
        }
    }
    for &lam in &LAMBDAS {
        for &beta in &betas {
            for w in rhos.windows(2) {
                let (a, b) = (v(lam, w[0], beta), v(lam, w[1], beta));
                if b > a {
                    in_rho.push(format!(
                        "λ={lam} β={beta} ρ {}→{}: {a:.6} → {b:.6}",
                        w[0], w[1]
                    ));
                }
            }
        }
    }
    let summary = format!(
        "violations: β {} , λ {} , ρ {} , nu0>nu {}",
        in_beta.len(),
        in_lambda.len(),
        in_rho.len(),
        above.len()
    );
    let mut failures = Vec::new();
    for (part, list) in [
        ("β", in_beta),
        ("λ", in_lambda),
        ("ρ", in_rho),
        ("nu0>nu", above),
    ] {
        for item in list.iter().take(5) {
            failures.push(format!("[{part}] {item}"));
        }
        if list.len() > 5 {
            failures.push(format!("[{part}] ... {} more", list.len() - 5));
        }
    }
    Verdict::from_failures(summary, failures)
}

fn c5_gain_oracle() -> Verdict {
    let mut s = Stream(5);
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for instance in 0..200u64 {
        let k = 1 + s.below(4) as usize;
        let l = 1 + s.below(16) as usize;
        let fingers = 1 + s.below(l as u64) as usize;
        let mut cfg = ChannelConfig::standard(k, l, 1.0 + 39.0 * s.unit());
        cfg.seed = s.next();
        let set = draw_realization(&cfg, instance, 0).unwrap();
        for nc in [1u32, 4] {
            let n = nc * (1 + s.below(32) as u32);
            let rake = RakeConfig::new(
                fingers as f64 / l as f64,
                n,
                AccessScheme::from_chips_per_frame(nc),
            )
            .unwrap();
            let got = compute_gains(&set, &rake).unwrap();
            let want = dense_gains(set.gains(), fingers, nc, f64::from(n));
            let mut e = 0.0_f64;
            for u in 0..k {
                e = e
                    .max(rel(got.h_sp[u], want.h_sp[u]))
                    .max(rel(got.h_si[u], want.h_si[u]));
                for j in (0..k).filter(|&j| j != u) {
                    e = e.max(rel(got.h_mai[u][j], want.h_mai[u][j]));
                }
            }
            worst = worst.max(e);
            if !(e <= 1e-10) {
                failures.push(format!(
                    "instance {instance} K={k} L={l} Lp={fingers} Nc={nc}: rel err {e:.2e}"
                ));
            }
        }
    }
    Verdict::from_failures(
        format!("200 instances x N_c in {{1,4}}, worst rel err {worst:.2e} (tol 1e-10)"),
        failures,
    )
}

fn c6_equilibrium() -> Verdict {
    let params = GameParams::standard();
    let mut s = Stream(6);
    let (mut worst_sinr, mut worst_move, mut worst_residual) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut non_converged, mut checked_users) = (0, 0);
    let mut failures = Vec::new();
    for scenario in 0..100u64 {
        let k = 1 + s.below(10) as usize;
        let l = 1 + s.below(50) as usize;
        let rho = (1 + s.below(l as u64)) as f64 / l as f64;
        let nc = [1u32, 2, 5, 10][s.below(4) as usize];
        let n = nc * [16u32, 32, 64, 128][s.below(4) as usize];
        let mut cfg = ChannelConfig::standard(k, l, 20.0);
        cfg.seed = s.next();
        let set = draw_realization(&cfg, scenario, 0).unwrap();
        let gains = compute_gains(
            &set,
            &RakeConfig::new(rho, n, AccessScheme::from_chips_per_frame(nc)).unwrap(),
        )
        .unwrap();
        let out = solve_equilibrium(&gains, &params).unwrap();
        if !out.converged {
            non_converged += 1;
            continue;
        }
        let sinrs = gains.sinrs(&out.powers, params.noise_power);
        for u in 0..k {
            let target = gamma_star(gains.zeta[u], params.total_bits).unwrap();
            let residual = target_sinr_residual(target, gains.zeta[u], params.total_bits).abs();
            worst_residual = worst_residual.max(residual);
            let moved = rel(
                best_response(u, &out.powers, &gains, target, &params).unwrap(),
                out.powers[u],
            );
            worst_move = worst_move.max(moved);
            if !out.saturated.contains(&u) {
                checked_users += 1;
                worst_sinr = worst_sinr.max(rel(sinrs[u], target));
            }
            if residual >= 1e-10
                || moved > 1e-8
                || (!out.saturated.contains(&u) && rel(sinrs[u], target) > 1e-6)
            {
                failures.push(format!(
                    "scenario {scenario} user {u}: residual {residual:.2e} move {moved:.2e}"
                ));
            }
        }
    }
    Verdict::from_failures(
        format!(
            "100 scenarios ({non_converged} non-converged, {checked_users} unsaturated users): SINR err {worst_sinr:.2e} (1e-6), \
             re-sweep move {worst_move:.2e} (1e-8), residual {worst_residual:.2e} (1e-10)"
        ),
        failures,
    )
}

struct McCell {
    rho: f64,
    n: u32,
    nc: u32,
    mean: f64,
    closed: Option<f64>,
    pair_loss: Option<f64>,
    closed_loss: Option<asymptotics::Loss>,
    failed: bool,
}

fn figure_scenario(rho: f64, n: u32) -> Scenario {
    Scenario {
        channel: ChannelConfig::standard(10, 200, 20.0),
        rake: RakeConfig::new(rho, n, AccessScheme::Cdma).unwrap(),
        game: GameParams::standard(),
        n_realizations: 2000,
        master_seed: 20_240_101,
    }
}

fn monte_carlo_cells() -> Vec<McCell> {
    let runner = Runner::default();
    let schemes = [
        AccessScheme::Cdma,
        AccessScheme::Uwb {
            chips_per_frame: 10,
        },
        AccessScheme::Uwb {
            chips_per_frame: 50,
        },
    ];
    let mut cells = Vec::new();
    for rho in [0.2, 1.0] {
        for n in [128u32, 256] {
            let base = figure_scenario(rho, n);
            let sweep = runner.sweep_gain(&base, &[n], &schemes).unwrap();
            for row in sweep.rows {
                let scenario = base.with_scheme(row.scheme);
                let closed_loss = if row.scheme.is_cdma() {
                    None
                } else {
                    asymptotics::loss(&scenario.asymptotic_inputs()).ok()
                };
                cells.push(McCell {
                    rho,
                    n,
                    nc: row.scheme.chips_per_frame(),
                    mean: row.stats.mean_normalized_utility,
                    closed: row.closed_form,
                    pair_loss: row.stats.mean_loss_db,
                    closed_loss,
                    failed: row.stats.failed(),
                });
            }
        }
    }
    cells
}

fn c7_monte_carlo(cells: &[McCell]) -> Verdict {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for c in cells {
        let label = format!("ρ={} N={} Nc={}", c.rho, c.n, c.nc);
        match c.closed {
            Some(closed) => {
                let gap = c.mean / closed - 1.0;
                worst = worst.max(gap.abs());
                if !(gap.abs() < 0.05) || c.failed {
                    failures.push(format!(
                        "{label}: MC {:.6e} vs closed form {closed:.6e}, gap {:+.2}%",
                        c.mean,
                        100.0 * gap
                    ));
                }
            }
            None => failures.push(format!(
                "{label}: closed form infeasible (MC mean {:.6e})",
                c.mean
            )),
        }
    }
    Verdict::from_failures(
        format!(
            "{} cells at n=2000, worst feasible |gap| {:.2}% (tol 5%)",
            cells.len(),
            100.0 * worst
        ),
        failures,
    )
}

fn c8_loss_bound(cells: &[McCell]) -> Verdict {
    let mut failures = Vec::new();
    let mut uwb = 0;
    for c in cells.iter().filter(|c| c.nc > 1) {
        uwb += 1;
        let label = format!("ρ={} N={} Nc={}", c.rho, c.n, c.nc);
        let pair = c.pair_loss.unwrap_or(f64::NAN);
        match c.closed_loss {
            Some(l) if l.loss_db < 1.0 && l.epsilon >= 0.0 && pair < 1.0 => {}
            Some(l) => failures.push(format!(
                "{label}: closed-form loss {:.3} dB (ε {:.4}), paired loss {pair:.3} dB",
                l.loss_db, l.epsilon
            )),
            None => failures.push(format!(
                "{label}: closed-form loss infeasible, paired loss {pair:.3} dB"
            )),
        }
    }
    Verdict::from_failures(
        format!("{uwb} UWB cells, closed-form and paired loss < 1 dB, ε ≥ 0"),
        failures,
    )
}

fn c9_loss_invariance() -> Verdict {
    let mut failures = Vec::new();
    for rho in [0.2, 0.5, 1.0] {
        for n in [256u32, 512, 1024] {
            let eps = |l: usize, nc: u32| {
                let mut s = figure_scenario(rho, n).with_scheme(AccessScheme::Uwb {
                    chips_per_frame: nc,
                });
                s.channel.num_paths = l;
                asymptotics::loss(&s.asymptotic_inputs()).map(|x| x.epsilon)
            };
            match (eps(200, 50), eps(400, 100)) {
                (Ok(a), Ok(b)) if a.to_bits() == b.to_bits() => {}
                (a, b) => failures.push(format!("ρ={rho} N={n}: {a:?} vs {b:?}")),
            }
        }
    }
    Verdict::from_failures(
        "(L=200,Nc=50) vs (L=400,Nc=100) at 9 (ρ,N) cells, bit-identical ε".into(),
        failures,
    )
}

fn c10_reproducibility() -> Verdict {
    let dir = std::env::temp_dir().join(format!("rakegame-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("scenario.toml");
    std::fs::write(
        &file,
        "[rake]\nfinger_fractions = [1.0, 0.2]\nprocessing_gains = [256]\nchips_per_frame = [1, 10, 50]\n\
         [run]\nrealizations = 200\nseed = 42\n",
    )
    .unwrap();
    let mut csvs = Vec::new();
    let mut failures = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.join(format!("workers-{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_rakegame"))
            .args([
                "simulate",
                file.to_str().unwrap(),
                "--workers",
                workers,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        if !status.success() {
            failures.push(format!("--workers {workers}: exit {status}"));
        }
        csvs.push(std::fs::read(&out).unwrap_or_default());
    }
    let _ = std::fs::remove_dir_all(&dir);
    if csvs[0].is_empty() || csvs[0] != csvs[1] {
        failures.push("CSV output differs between --workers 1 and --workers 8".into());
    }
    Verdict::from_failures(
        format!("simulate --workers 1 vs 8, {} CSV bytes", csvs[0].len()),
        failures,
    )
}

fn main() -> ExitCode {
    let cells = monte_carlo_cells();
    let criteria: Vec<(&str, Verdict)> = vec![
        ("closed-form identities", c1_identities()),
        ("branch continuity", c2_branch_continuity()),
        ("small-load limit", c3_limit()),
        ("monotonicity", c4_monotonicity()),
        ("gain oracle equivalence", c5_gain_oracle()),
        ("equilibrium characterization", c6_equilibrium()),
        ("Monte Carlo vs closed form", c7_monte_carlo(&cells)),
        ("loss below 1 dB", c8_loss_bound(&cells)),
        ("loss invariance at fixed load", c9_loss_invariance()),
        ("reproducibility across workers", c10_reproducibility()),
    ];
    let mut failed = 0;
    for (i, (name, v)) in criteria.iter().enumerate() {
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.summary
        );
        for d in &v.details {
            println!("      {d}");
        }
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
