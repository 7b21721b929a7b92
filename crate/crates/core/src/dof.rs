//! SNR sweeps, DoF slope fitting and the comparison scenarios.
//!
//! A sweep draws `n_channels` channels, runs every grid point on each of
//! them, averages the sum rate per grid point and fits the slope of that
//! average against `log2 P` over the upper half of the grid. Channel `c`
//! always uses seeds forked with index `c`, so a grid point sees the same
//! channels regardless of how many workers run or in which order they
//! finish; the per-channel results are reduced in channel order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ain_mimo::{build_beams, diversity_optimize_beams};
use crate::ain_scalar::{choose_q, ScalarSystem};
use crate::channel::{
    complex_noise, sample_mimo_channel, sample_scalar_channel, sample_two_antenna_relay_channel, streams,
    MimoChannel, RunSeed, TwoAntennaRelayChannel,
};
use crate::link_sim::{
    joint_backoff, qpsk, qpsk_error, run_mimo_trial, run_scalar_trial, snr_to_power, zf_sinrs, RelayMode,
    TrialResult,
};
use crate::linalg::{hstack, inverse, random_unit_columns, stacked_inverse};
use crate::{AinError, CMatrix, CVector, Result, C64};

/// Residual tolerance of the two-antenna relay's cross-link cancellation.
pub const TWO_ANTENNA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Aligned interference neutralization through the `M`-antenna relay.
    AinRelay,
    /// Relay silent; each user sends `M/2` streams, ZF at the receivers.
    NoRelayZf,
    /// Users take turns, `M` streams each, half the time.
    Tdma,
    /// Single-antenna users, two-antenna relay, full cross-link cancellation.
    TwoAntennaRelay,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::AinRelay,
        Scenario::NoRelayZf,
        Scenario::Tdma,
        Scenario::TwoAntennaRelay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::AinRelay => "ain_relay",
            Scenario::NoRelayZf => "no_relay_zf",
            Scenario::Tdma => "tdma",
            Scenario::TwoAntennaRelay => "two_antenna_relay",
        }
    }

    /// Antenna count the scenario actually runs with.
    pub fn effective_m(self, m: usize) -> usize {
        match self {
            Scenario::TwoAntennaRelay => 1,
            _ => m,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = AinError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                AinError::InvalidArgument(format!(
                    "unknown scenario '{s}' (expected ain_relay, no_relay_zf, tdma or two_antenna_relay)"
                ))
            })
    }
}

/// Horizontal axis of the DoF fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `log2 P`, for complex channels.
    Complex,
    /// `½ log2 P`, for real channels.
    Real,
}

impl Normalization {
    pub fn axis(self, snr_db: f64) -> f64 {
        let x = snr_to_power(snr_db).log2();
        match self {
            Normalization::Complex => x,
            Normalization::Real => 0.5 * x,
        }
    }
}

/// Rate divided by the normalization axis at power `p`.
pub fn normalized_dof(rate: f64, p: f64, normalization: Normalization) -> f64 {
    rate / normalization.axis(10.0 * p.log10())
}

/// Channel-averaged results at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub snr_db: f64,
    pub sum_rate: f64,
    pub user_rates: [f64; 2],
    pub ser: [f64; 2],
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofEstimate {
    pub scenario: Scenario,
    pub grid: Vec<GridPoint>,
    pub slope: f64,
    pub r_squared: f64,
}

/// Least-squares slope of `sum_rate` against the normalization axis.
///
/// Returns `(slope, r²)`; `r²` is 1 when the rates are exactly constant.
pub fn fit_dof_slope(grid: &[(f64, f64)], normalization: Normalization) -> Result<(f64, f64)> {
    if grid.len() < 3 {
        return Err(AinError::InvalidArgument(format!(
            "slope fit needs at least 3 points, got {}",
            grid.len()
        )));
    }
    let n = grid.len() as f64;
    let xs: Vec<f64> = grid.iter().map(|&(s, _)| normalization.axis(s)).collect();
    let ys: Vec<f64> = grid.iter().map(|&(_, r)| r).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) || !sxx.is_finite() || !syy.is_finite() {
        return Err(AinError::InvalidArgument("slope fit needs distinct, finite SNR points".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy <= f64::EPSILON * my.abs().max(1.0) * n {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok((slope, r2))
}

/// Fit over the upper half of the grid (at least three points).
pub fn fit_upper_half(points: &[GridPoint], normalization: Normalization) -> Result<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = points.iter().map(|g| (g.snr_db, g.sum_rate)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let keep = sorted.len().div_ceil(2).max(3).min(sorted.len());
    fit_dof_slope(&sorted[sorted.len() - keep..], normalization)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub m: usize,
    pub snr_grid: Vec<f64>,
    pub n_channels: usize,
    /// QPSK channel uses per (channel, grid point) for the error-rate estimate.
    pub n_noise: usize,
    pub seed: u64,
    pub mode: RelayMode,
    /// Replace the first-part beams by the diversity-optimized ones.
    pub diversity: bool,
}

impl SweepConfig {
    pub fn new(scenario: Scenario, m: usize, snr_grid: Vec<f64>, n_channels: usize, seed: u64) -> Self {
        SweepConfig {
            scenario,
            m,
            snr_grid,
            n_channels,
            n_noise: 0,
            seed,
            mode: RelayMode::Genie,
            diversity: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.snr_grid;
        if g.len() < 3 {
            return Err(AinError::InvalidArgument("snr grid needs at least 3 points".into()));
        }
        if g.iter().any(|s| !s.is_finite()) {
            return Err(AinError::InvalidArgument("snr grid has non-finite points".into()));
        }
        let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 20.0 {
            return Err(AinError::InvalidArgument(format!(
                "snr grid must span at least 20 dB (spans {} dB)",
                hi - lo
            )));
        }
        if hi < 60.0 {
            return Err(AinError::InvalidArgument(format!(
                "top snr grid point must be at least 60 dB (got {hi} dB)"
            )));
        }
        if self.n_channels == 0 {
            return Err(AinError::InvalidArgument("n_channels must be >= 1".into()));
        }
        match self.scenario {
            Scenario::AinRelay => {
                crate::ain_mimo::streams_per_part(self.m)?;
            }
            Scenario::NoRelayZf | Scenario::Tdma => {
                if self.m == 0 || !self.m.is_multiple_of(2) {
                    return Err(AinError::InvalidArgument(format!(
                        "{} needs an even antenna count (got M = {})",
                        self.scenario, self.m
                    )));
                }
            }
            Scenario::TwoAntennaRelay => {}
        }
        if self.mode == RelayMode::HardDecision {
            return Err(AinError::UnsupportedMode {
                mode: self.mode.name(),
                scheme: "MIMO sweeps",
            });
        }
        Ok(())
    }
}

/// Runs a sweep and fits its DoF slope.
pub fn sweep(cfg: &SweepConfig) -> Result<DofEstimate> {
    cfg.validate()?;
    let per_channel: Vec<Vec<TrialResult>> = (0..cfg.n_channels)
        .into_par_iter()
        .map(|c| channel_trials(cfg, c as u64))
        .collect::<Result<_>>()?;

    let n = cfg.n_channels as f64;
    let grid: Vec<GridPoint> = cfg
        .snr_grid
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let mut rates = [0.0; 2];
            let mut ser = [0.0; 2];
            let mut max_residual: f64 = 0.0;
            for trials in &per_channel {
                let t = &trials[i];
                for u in 0..2 {
                    rates[u] += t.rates[u];
                    ser[u] += t.ser[u];
                }
                max_residual = max_residual.max(t.residuals[0]).max(t.residuals[1]);
            }
            let user_rates = rates.map(|r| r / n);
            GridPoint {
                snr_db,
                sum_rate: user_rates[0] + user_rates[1],
                user_rates,
                ser: ser.map(|s| s / n),
                max_residual,
            }
        })
        .collect();
    let (slope, r_squared) = fit_upper_half(&grid, Normalization::Complex)?;
    Ok(DofEstimate {
        scenario: cfg.scenario,
        grid,
        slope,
        r_squared,
    })
}

fn channel_trials(cfg: &SweepConfig, c: u64) -> Result<Vec<TrialResult>> {
    let ch_seed = RunSeed::new(cfg.seed, streams::CHANNEL).fork(c);
    let beam_seed = RunSeed::new(cfg.seed, streams::BEAMS).fork(c);
    let noise_seed = RunSeed::new(cfg.seed, streams::NOISE).fork(c);
    let point = |i: usize| noise_seed.fork(i as u64);
    match cfg.scenario {
        Scenario::AinRelay => {
            let ch = sample_mimo_channel(cfg.m, ch_seed)?;
            let mut beams = build_beams(&ch, beam_seed)?;
            if cfg.diversity {
                beams = diversity_optimize_beams(&ch, &beams)?;
            }
            cfg.snr_grid
                .iter()
                .enumerate()
                .map(|(i, &s)| run_mimo_trial(&ch, &beams, s, cfg.mode, cfg.n_noise, point(i)))
                .collect()
        }
        Scenario::NoRelayZf => {
            let ch = sample_mimo_channel(cfg.m, ch_seed)?;
            let mut rng = beam_seed.rng();
            let half = cfg.m / 2;
            let v1 = random_unit_columns(&mut rng, cfg.m, half);
            let v2 = random_unit_columns(&mut rng, cfg.m, half);
            let links = [hstack(&[&(&ch.h_11 * &v1), &(&ch.h_12 * &v2)]), hstack(&[&(&ch.h_22 * &v2), &(&ch.h_21 * &v1)])];
            cfg.snr_grid
                .iter()
                .enumerate()
                .map(|(i, &s)| zf_links_trial(&links, half, s, 1.0, cfg.n_noise, point(i)))
                .collect()
        }
        Scenario::Tdma => {
            let ch = sample_mimo_channel(cfg.m, ch_seed)?;
            let links = [ch.h_11.clone(), ch.h_22.clone()];
            cfg.snr_grid
                .iter()
                .enumerate()
                .map(|(i, &s)| zf_links_trial(&links, cfg.m, s, 0.5, cfg.n_noise, point(i)))
                .collect()
        }
        Scenario::TwoAntennaRelay => {
            let ch = sample_two_antenna_relay_channel(ch_seed);
            let relay = two_antenna_relay_neutralize(&ch)?;
            cfg.snr_grid
                .iter()
                .enumerate()
                .map(|(i, &s)| run_two_antenna_trial(&ch, &relay, s, cfg.mode, cfg.n_noise, point(i)))
                .collect()
        }
    }
}

/// Two users over square links `[desired | interfering]`, white noise,
/// power split over the `n_desired` streams of each user. `share` is the
/// fraction of time each user is active.
fn zf_links_trial(
    links: &[CMatrix; 2],
    n_desired: usize,
    snr_db: f64,
    share: f64,
    n_symbols: usize,
    seed: RunSeed,
) -> Result<TrialResult> {
    let p = snr_to_power(snr_db);
    let p_stream = p / n_desired as f64;
    let mut rates = [0.0; 2];
    let mut ser = [0.0; 2];
    let mut rng = seed.rng();
    let amp = C64::from(p_stream.sqrt());
    let dim = links[0].nrows();
    for (u, h) in links.iter().enumerate() {
        let k = CMatrix::identity(dim, dim);
        let sinrs = zf_sinrs(h, &k, p_stream)?;
        rates[u] = share * sinrs[..n_desired].iter().map(|s| (1.0 + s).log2()).sum::<f64>();
        let w = stacked_inverse(h, "zero-forcing link")?;
        let mut errors = 0usize;
        for _ in 0..n_symbols {
            let s = CVector::from_fn(h.ncols(), |_, _| qpsk(&mut rng));
            let y = h * &s * amp + complex_noise(&mut rng, dim, 1.0);
            let est = &w * y;
            errors += (0..n_desired).filter(|&j| qpsk_error(s[j], est[j])).count();
        }
        if n_symbols > 0 {
            ser[u] = errors as f64 / (n_symbols * n_desired) as f64;
        }
    }
    Ok(TrialResult {
        snr_db,
        rates,
        submessage_rates: rates.map(|r| [r, 0.0, 0.0]),
        ser,
        submessage_ser: ser.map(|s| [s, 0.0, 0.0]),
        relay_ser: 0.0,
        residuals: [0.0, 0.0],
        tx_power: [p * share, p * share, 0.0],
    })
}

/// Relay processing for the two-antenna case.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAntennaRelay {
    /// Inverse of the relay's 2×2 receive matrix `[h_R1 h_R2]`.
    pub receive_inverse: CMatrix,
    /// Transmit matrix: the relay sends `W [s1; s2]`.
    pub w: CMatrix,
    /// `|h_12 + h_1R w_2| / |h_12|` and `|h_21 + h_2R w_1| / |h_21|`.
    pub residuals: [f64; 2],
}

/// Solves for the relay transmit vectors that cancel both cross links.
///
/// With `H = [h_1R; h_2R]` the relay sends `W = H⁻¹ [[0, -h_12], [-h_21, 0]]`,
/// which removes `h_12` at Destination 1 and `h_21` at Destination 2 and
/// adds nothing to the direct links.
pub fn two_antenna_relay_neutralize(ch: &TwoAntennaRelayChannel) -> Result<TwoAntennaRelay> {
    let receive = hstack(&[&ch.h_r1, &ch.h_r2]);
    let receive_inverse = inverse(&receive, "relay receive matrix [H_R1 H_R2]")?;
    let tx = CMatrix::from_fn(2, 2, |i, j| if i == 0 { ch.h_1r[(0, j)] } else { ch.h_2r[(0, j)] });
    let tx_inv = inverse(&tx, "relay transmit matrix [H_1R; H_2R]")?;
    let target = CMatrix::from_row_slice(2, 2, &[C64::from(0.0), -ch.h_12[(0, 0)], -ch.h_21[(0, 0)], C64::from(0.0)]);
    let w = tx_inv * target;
    let r1 = (ch.h_12[(0, 0)] + (&ch.h_1r * w.column(1))[(0, 0)]).norm() / ch.h_12[(0, 0)].norm();
    let r2 = (ch.h_21[(0, 0)] + (&ch.h_2r * w.column(0))[(0, 0)]).norm() / ch.h_21[(0, 0)].norm();
    Ok(TwoAntennaRelay {
        receive_inverse,
        w,
        residuals: [r1, r2],
    })
}

/// One trial of the two-antenna relay scheme, same power rules as the MIMO
/// scheme: a joint back-off keeps the relay within `P`.
pub fn run_two_antenna_trial(
    ch: &TwoAntennaRelayChannel,
    relay: &TwoAntennaRelay,
    snr_db: f64,
    mode: RelayMode,
    n_symbols: usize,
    seed: RunSeed,
) -> Result<TrialResult> {
    if mode == RelayMode::HardDecision {
        return Err(AinError::UnsupportedMode {
            mode: mode.name(),
            scheme: "the two-antenna relay scheme",
        });
    }
    let p = snr_to_power(snr_db);
    let c = &relay.receive_inverse * relay.receive_inverse.adjoint();
    let signal = relay.w.norm_squared();
    let fwd_noise = if mode == RelayMode::ZfForward {
        (&relay.w * &c * relay.w.adjoint()).trace().re
    } else {
        0.0
    };
    let beta2 = joint_backoff(p, p, signal, fwd_noise);
    let direct = [ch.h_11[(0, 0)], ch.h_22[(0, 0)]];
    let relay_rows = [&ch.h_1r, &ch.h_2r];

    let mut rates = [0.0; 2];
    for u in 0..2 {
        let mut noise = 1.0;
        if mode == RelayMode::ZfForward {
            let g = relay_rows[u] * &relay.w;
            noise += (&g * &c * g.adjoint())[(0, 0)].re;
        }
        rates[u] = (1.0 + beta2 * p * direct[u].norm_sqr() / noise).log2();
    }

    let amp = C64::from((beta2 * p).sqrt());
    let mut rng = seed.rng();
    let mut errors = [0usize; 2];
    let mut power = [0.0; 3];
    for _ in 0..n_symbols {
        let s = CVector::from_fn(2, |_, _| qpsk(&mut rng));
        let x = [s[0] * amp, s[1] * amp];
        let y_r = &ch.h_r1 * x[0] + &ch.h_r2 * x[1] + complex_noise(&mut rng, 2, 1.0);
        let forwarded = match mode {
            RelayMode::Genie => &s * amp,
            _ => &relay.receive_inverse * y_r,
        };
        let x_r = &relay.w * forwarded;
        power[0] += x[0].norm_sqr();
        power[1] += x[1].norm_sqr();
        power[2] += x_r.norm_squared();
        let y1 = ch.h_11[(0, 0)] * x[0] + ch.h_12[(0, 0)] * x[1] + (&ch.h_1r * &x_r)[(0, 0)] + complex_noise(&mut rng, 1, 1.0)[0];
        let y2 = ch.h_21[(0, 0)] * x[0] + ch.h_22[(0, 0)] * x[1] + (&ch.h_2r * &x_r)[(0, 0)] + complex_noise(&mut rng, 1, 1.0)[0];
        for (u, y) in [y1, y2].into_iter().enumerate() {
            if amp.re == 0.0 || qpsk_error(s[u], y / (direct[u] * amp)) {
                errors[u] += 1;
            }
        }
    }
    let n = n_symbols.max(1) as f64;
    let ser = errors.map(|e| if n_symbols == 0 { 0.0 } else { e as f64 / n });
    Ok(TrialResult {
        snr_db,
        rates,
        submessage_rates: rates.map(|r| [r, 0.0, 0.0]),
        ser,
        submessage_ser: ser.map(|s| [s, 0.0, 0.0]),
        relay_ser: 0.0,
        residuals: relay.residuals,
        tx_power: power.map(|e| e / n),
    })
}

/// Scalar-scheme experiment over a power grid on one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSweepConfig {
    pub p_db_grid: Vec<f64>,
    pub gamma: f64,
    pub epsilon: f64,
    pub n_symbols: usize,
    pub budget: u64,
    pub seed: u64,
    pub mode: RelayMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPoint {
    pub p_db: f64,
    pub q: u32,
    /// Minimum distance of the relay's received constellation.
    pub d_min: f64,
    pub trial: TrialResult,
    /// Sum rate over `½ log2 P`.
    pub dof: f64,
}

/// Runs the scalar scheme at every power point. The channel comes from
/// `(seed, CHANNEL)`, the free directions from `(seed, BEAMS)` and the noise
/// for point `i` from `(seed, NOISE).fork(i)`.
pub fn scalar_sweep(cfg: &ScalarSweepConfig) -> Result<Vec<ScalarPoint>> {
    if cfg.p_db_grid.is_empty() {
        return Err(AinError::InvalidArgument("power grid is empty".into()));
    }
    let ch = sample_scalar_channel(RunSeed::new(cfg.seed, streams::CHANNEL));
    let beam_seed = RunSeed::new(cfg.seed, streams::BEAMS);
    let noise_seed = RunSeed::new(cfg.seed, streams::NOISE);
    cfg.p_db_grid
        .iter()
        .enumerate()
        .map(|(i, &p_db)| {
            let p = snr_to_power(p_db);
            let q = choose_q(p, cfg.gamma, cfg.epsilon)?;
            let sys = ScalarSystem::build(&ch, p, q, beam_seed, cfg.budget)?;
            let trial = run_scalar_trial(&ch, &sys, cfg.mode, cfg.n_symbols, noise_seed.fork(i as u64))?;
            let dof = normalized_dof(trial.sum_rate(), p, Normalization::Real);
            Ok(ScalarPoint {
                p_db,
                q,
                d_min: sys.relay.d_min,
                trial,
                dof,
            })
        })
        .collect()
}

/// The MIMO channel a sweep uses for channel index `c`.
pub fn sweep_channel(seed: u64, m: usize, c: u64) -> Result<MimoChannel> {
    sample_mimo_channel(m, RunSeed::new(seed, streams::CHANNEL).fork(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(f: impl Fn(f64) -> f64, norm: Normalization) -> Vec<(f64, f64)> {
        [60.0, 70.0, 80.0, 90.0]
            .iter()
            .map(|&s| (s, f(norm.axis(s))))
            .collect()
    }

    #[test]
    fn exact_line_fits_exactly() {
        let (slope, r2) = fit_dof_slope(&line(|x| 6.0 * x + 3.0, Normalization::Complex), Normalization::Complex).unwrap();
        assert!((slope - 6.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_rates_have_zero_slope() {
        let g: Vec<_> = [60.0, 70.0, 80.0].iter().map(|&s| (s, 4.2)).collect();
        let (slope, r2) = fit_dof_slope(&g, Normalization::Complex).unwrap();
        assert!(slope.abs() < 1e-12);
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn real_normalization_halves_the_axis() {
        let (slope, _) = fit_dof_slope(&line(|x| 1.5 * x, Normalization::Real), Normalization::Real).unwrap();
        assert!((slope - 1.5).abs() < 1e-12);
    }

    #[test]
    fn fit_needs_three_points() {
        assert!(fit_dof_slope(&[(60.0, 1.0), (70.0, 2.0)], Normalization::Complex).is_err());
        assert!(fit_dof_slope(&[(60.0, 1.0), (60.0, 2.0), (60.0, 3.0)], Normalization::Complex).is_err());
    }

    #[test]
    fn upper_half_uses_top_points() {
        let pts: Vec<GridPoint> = [60.0, 70.0, 80.0, 90.0, 100.0]
            .iter()
            .map(|&s| GridPoint {
                snr_db: s,
                // curved at the bottom, affine at the top
                sum_rate: if s < 80.0 { 0.0 } else { 2.0 * Normalization::Complex.axis(s) },
                user_rates: [0.0; 2],
                ser: [0.0; 2],
                max_residual: 0.0,
            })
            .collect();
        let (slope, r2) = fit_upper_half(&pts, Normalization::Complex).unwrap();
        assert!((slope - 2.0).abs() < 1e-12 && r2 > 0.999_999);
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("ain".parse::<Scenario>().is_err());
    }

    #[test]
    fn grid_preconditions() {
        let mut cfg = SweepConfig::new(Scenario::Tdma, 4, vec![60.0, 70.0], 1, 1);
        assert!(cfg.validate().is_err());
        cfg.snr_grid = vec![40.0, 45.0, 50.0];
        assert!(cfg.validate().is_err());
        cfg.snr_grid = vec![40.0, 50.0, 60.0];
        assert!(cfg.validate().is_ok());
        cfg.scenario = Scenario::AinRelay;
        cfg.m = 6;
        assert!(matches!(cfg.validate(), Err(AinError::UnsupportedDimension { m: 6 })));
    }

    #[test]
    fn two_antenna_cancels_cross_links() {
        for s in 0..50 {
            let ch = sample_two_antenna_relay_channel(RunSeed::new(s, streams::CHANNEL));
            let relay = two_antenna_relay_neutralize(&ch).unwrap();
            assert!(relay.residuals.iter().all(|&r| r <= TWO_ANTENNA_TOL), "{:?}", relay.residuals);
            // nothing added to the direct links
            assert!((&ch.h_1r * relay.w.column(0))[(0, 0)].norm() < 1e-12 * relay.w.norm());
            assert!((&ch.h_2r * relay.w.column(1))[(0, 0)].norm() < 1e-12 * relay.w.norm());
        }
    }

    #[test]
    fn sweep_is_deterministic_and_order_independent() {
        let mut cfg = SweepConfig::new(Scenario::AinRelay, 4, vec![60.0, 70.0, 80.0], 6, 3);
        cfg.n_noise = 10;
        let a = sweep(&cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sweep(&cfg).unwrap());
        assert_eq!(a, b);
    }
}
