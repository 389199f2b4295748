//! Self-interference coefficient as the continuum limit of its lag sum.
//!
//! With tap power `λ^(−x)` at normalized delay `x ∈ [0, 1]`, fingers on
//! `[0, ρ]` and lag weight `min(y, β)/β` at normalized lag `y`,
//!
//! ```text
//! ν = ∫₀¹ w(y) e^(−a y) ∫ c(x, y) e^(−2 a x) dx dy / (∫₀^ρ e^(−a x) dx)²
//! ```
//!
//! where `a = ln λ` and `c = 4` when both taps of a lag pair are fingers, `1`
//! when only the earlier one is, `0` otherwise. The inner integral is
//! analytic. The outer one uses Gauss-Legendre on each smooth piece.

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    rule: &(Vec<f64>, Vec<f64>),
    pieces: usize,
) -> f64 {
    let h = (hi - lo) / pieces as f64;
    let mut total = 0.0;
    for p in 0..pieces {
        let a = lo + p as f64 * h;
        let mid = a + h / 2.0;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            total += w * f(mid + h / 2.0 * x) * h / 2.0;
        }
    }
    total
}

/// `ν(λ, ρ, β)`; `β = 0` gives the CDMA limit `ν₀`.
pub fn nu_by_quadrature(pdp_ratio: f64, finger_fraction: f64, load_factor: f64) -> f64 {
    let a = pdp_ratio.ln();
    let rho = finger_fraction;
    let beta = load_factor;
    let seg = |p: f64, q: f64| ((-2.0 * a * p).exp() - (-2.0 * a * q).exp()) / (2.0 * a);
    let integrand = |y: f64| {
        let w = if beta == 0.0 { 1.0 } else { y.min(beta) / beta };
        let both = (rho - y).min(1.0 - y).max(0.0);
        let first = rho.min(1.0 - y).max(both);
        w * (-a * y).exp() * (4.0 * seg(0.0, both) + seg(both, first))
    };
    let mut cuts = vec![0.0, 1.0, rho, 1.0 - rho];
    if beta > 0.0 && beta < 1.0 {
        cuts.push(beta);
    }
    cuts.retain(|c| (0.0..=1.0).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = gauss_legendre(40);
    let num: f64 = cuts
        .windows(2)
        .map(|w| integrate(&integrand, w[0], w[1], &rule, 8))
        .sum();
    let den = (-(-a * rho).exp_m1() / a).powi(2);
    num / den
}
