use ain_core::channel::{sample_two_antenna_relay_channel, streams, RunSeed};
use ain_core::dof::{fit_dof_slope, sweep, two_antenna_relay_neutralize, Normalization, Scenario, SweepConfig, TWO_ANTENNA_TOL};

const GRID: [f64; 5] = [60.0, 70.0, 80.0, 90.0, 100.0];

fn estimate(scenario: Scenario, m: usize, channels: usize, seed: u64) -> ain_core::dof::DofEstimate {
    sweep(&SweepConfig::new(scenario, m, GRID.to_vec(), channels, seed)).unwrap()
}

#[test]
fn relay_scenario_beats_baselines() {
    let ain = estimate(Scenario::AinRelay, 4, 40, 7);
    let zf = estimate(Scenario::NoRelayZf, 4, 40, 7);
    let tdma = estimate(Scenario::Tdma, 4, 40, 7);
    assert!(ain.slope - zf.slope >= 1.5, "{} vs {}", ain.slope, zf.slope);
    assert!((zf.slope - tdma.slope).abs() < 0.2);
}

#[test]
fn top_points_are_affine_for_every_scenario() {
    for sc in Scenario::ALL {
        let est = estimate(sc, 4, 30, 8);
        let top: Vec<(f64, f64)> = est.grid[2..].iter().map(|g| (g.snr_db, g.sum_rate)).collect();
        let (_, r2) = fit_dof_slope(&top, Normalization::Complex).unwrap();
        assert!(r2 >= 0.999, "{sc}: r^2 {r2}");
        assert!((0.0..=1.0).contains(&est.r_squared));
    }
}

#[test]
fn slope_is_stable_across_seed_blocks() {
    let slopes: Vec<f64> = (100..105).map(|s| estimate(Scenario::AinRelay, 4, 40, s).slope).collect();
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((hi - lo) / lo < 0.02, "{slopes:?}");
}

#[test]
fn two_antenna_residuals_in_every_trial() {
    for i in 0..1000 {
        let ch = sample_two_antenna_relay_channel(RunSeed::new(9, streams::CHANNEL).fork(i));
        let relay = two_antenna_relay_neutralize(&ch).unwrap();
        assert!(relay.residuals.iter().all(|&r| r <= TWO_ANTENNA_TOL), "trial {i}: {:?}", relay.residuals);
    }
}

#[test]
fn sweep_grid_matches_request() {
    let est = estimate(Scenario::Tdma, 4, 5, 1);
    assert_eq!(est.grid.iter().map(|g| g.snr_db).collect::<Vec<_>>(), GRID.to_vec());
    for g in &est.grid {
        assert!((g.sum_rate - g.user_rates[0] - g.user_rates[1]).abs() < 1e-12);
    }
}
