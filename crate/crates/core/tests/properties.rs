use num_complex::Complex64;
use proptest::prelude::*;
use rakegame::channel::{draw_realization, ChannelConfig, ChannelSet};
use rakegame::rake::{compute_gains, AccessScheme, RakeConfig};

fn drawn(k: usize, l: usize, seed: u64) -> ChannelSet {
    let mut cfg = ChannelConfig::standard(k, l, 20.0);
    cfg.seed = seed;
    draw_realization(&cfg, seed % 97, 0).unwrap()
}

proptest! {
    #[test]
    fn profile_steps_by_constant_ratio(k in 1usize..5, l in 2usize..60, db in 0.5f64..40.0, seed: u64) {
        let mut cfg = ChannelConfig::standard(k, l, db);
        cfg.seed = seed;
        let set = draw_realization(&cfg, 0, 0).unwrap();
        let step = cfg.pdp_ratio.powf(1.0 / (l - 1) as f64);
        for v in set.variances() {
            for w in v.windows(2) {
                prop_assert!((w[0] / w[1] / step - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gains_are_nonnegative(
        k in 1usize..6, l in 1usize..80, rho in 0.01f64..=1.0, nc in 1u32..20, frames in 1u32..64,
        seed: u64,
    ) {
        let set = drawn(k, l, seed);
        let rake = RakeConfig::new(rho, nc * frames, AccessScheme::from_chips_per_frame(nc)).unwrap();
        let g = compute_gains(&set, &rake).unwrap();
        for u in 0..k {
            prop_assert!(g.h_sp[u] > 0.0);
            prop_assert!(g.h_si[u] >= 0.0);
            prop_assert!(g.h_mai[u].iter().all(|&x| x >= 0.0));
            if l == 1 {
                prop_assert_eq!(g.h_si[u], 0.0);
            }
        }
    }

    #[test]
    fn zeta_is_at_least_one_in_the_evaluation_regime(
        k in 1usize..11, l in 50usize..=500, rho in 0.2f64..=1.0,
        nc in prop::sample::select(vec![1u32, 10, 50, 100]), n in 128u32..=1024, seed: u64,
    ) {
        let set = drawn(k, l, seed);
        let rake = RakeConfig::new(rho, n.max(nc), AccessScheme::from_chips_per_frame(nc)).unwrap();
        let g = compute_gains(&set, &rake).unwrap();
        prop_assert!(g.zeta_violations().is_empty(), "zeta {:?}", g.zeta);
    }

    #[test]
    fn scaling_one_user_scales_its_signal_gain_only(
        k in 1usize..5, l in 2usize..40, rho in 0.05f64..=1.0, c in 0.1f64..10.0, seed: u64,
    ) {
        let set = drawn(k, l, seed);
        let rake = RakeConfig::new(rho, 64, AccessScheme::Uwb { chips_per_frame: 4 }).unwrap();
        let base = compute_gains(&set, &rake).unwrap();
        let mut taps = set.gains().to_vec();
        for t in &mut taps[0] {
            *t *= Complex64::new(c, 0.0);
        }
        let scaled = compute_gains(&ChannelSet::from_gains(taps).unwrap(), &rake).unwrap();
        prop_assert!((scaled.h_sp[0] / base.h_sp[0] / (c * c) - 1.0).abs() < 1e-12);
        prop_assert!((scaled.zeta[0] / base.zeta[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn one_chip_frames_are_cdma(k in 1usize..5, l in 1usize..40, rho in 0.05f64..=1.0, seed: u64) {
        let set = drawn(k, l, seed);
        let cdma = compute_gains(&set, &RakeConfig::new(rho, 128, AccessScheme::Cdma).unwrap()).unwrap();
        let uwb = compute_gains(
            &set,
            &RakeConfig::new(rho, 128, AccessScheme::Uwb { chips_per_frame: 1 }).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(cdma, uwb);
    }
}

#[test]
fn short_spreading_violations_are_reported_not_clamped() {
    let set = drawn(3, 56, 721_789_535);
    let rake = RakeConfig::new(0.01, 8, AccessScheme::Cdma).unwrap();
    let g = compute_gains(&set, &rake).unwrap();
    let flagged = g.zeta_violations();
    assert!(!flagged.is_empty());
    for u in flagged {
        assert!(g.zeta[u] < 1.0);
        assert_eq!(g.zeta[u], g.h_sp[u] / g.h_si[u]);
    }
}
