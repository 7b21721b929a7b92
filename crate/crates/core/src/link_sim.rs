//! Symbol-level link simulation and zero-forcing rate analysis.
//!
//! MIMO trials report analytic rates `Σ log2(1 + SINR_k)` from the
//! post-zero-forcing SINR of each desired stream, and measure QPSK symbol
//! error rates by pushing symbols through the full five-node network. Scalar
//! trials measure integer-symbol error rates and convert them to rates with
//! [`rate_lower_bound`].
//!
//! # Power accounting
//!
//! Every source spreads `P` uniformly over its streams. The relay beams are
//! not normalized (neutralization needs them exactly as constructed), so the
//! relay can exceed `P`. A single back-off factor `β ≤ 1` then scales both
//! sources; the relay forwards with unit gain, so the relayed and direct
//! copies of every stream shrink together and all cancellations stay exact.
//! With relay signal power `β²·p_s·S` and forwarded-noise power `N`:
//!
//! ```text
//! β² = min(1, (P - N) / (p_s·S))      (0 when N ≥ P)
//! ```
//!
//! `N = 0` with a genie relay. The forwarded-noise model (`zf_forward`) is
//! this simulator's own construction: the relay applies its ZF filter and
//! forwards the soft estimates, noise included.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::ain_mimo::{compute_effective_channels, relay_combinations, BeamformerSet, RelayReceiver};
use crate::ain_scalar::{
    destination_decode_scalar, destination_observation, rate_lower_bound, relay_combinations as scalar_combinations,
    relay_observation, ScalarSystem,
};
use crate::channel::{complex_noise, MimoChannel, RunSeed, ScalarChannel};
use crate::linalg::stacked_inverse;
use crate::{AinError, CMatrix, CVector, Destination, Result, C64};

/// How the relay turns what it hears into what it forwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelayMode {
    /// Forwards the exact aligned combinations.
    Genie,
    /// Forwards zero-forcing soft estimates; relay noise propagates.
    ZfForward,
    /// Decodes the integer combinations and re-modulates them (scalar only).
    HardDecision,
}

impl RelayMode {
    pub const ALL: [RelayMode; 3] = [RelayMode::Genie, RelayMode::ZfForward, RelayMode::HardDecision];

    pub fn name(self) -> &'static str {
        match self {
            RelayMode::Genie => "genie",
            RelayMode::ZfForward => "zf_forward",
            RelayMode::HardDecision => "hard_decision",
        }
    }
}

impl fmt::Display for RelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelayMode {
    type Err = AinError;

    fn from_str(s: &str) -> Result<Self> {
        RelayMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                AinError::InvalidArgument(format!(
                    "unknown relay mode '{s}' (expected genie, zf_forward or hard_decision)"
                ))
            })
    }
}

/// Outcome of one trial at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub snr_db: f64,
    /// Per-user rate in bits per channel use.
    pub rates: [f64; 2],
    /// Per-user, per-message-part rates.
    pub submessage_rates: [[f64; 3]; 2],
    /// Per-user symbol error rate (mean over the three parts).
    pub ser: [f64; 2],
    pub submessage_ser: [[f64; 3]; 2],
    /// Error rate of the relay's decisions (zero unless it decides).
    pub relay_ser: f64,
    /// Neutralization residuals at Destinations 1 and 2.
    pub residuals: [f64; 2],
    /// Sample mean transmit power of source 1, source 2 and relay.
    pub tx_power: [f64; 3],
}

impl TrialResult {
    pub fn sum_rate(&self) -> f64 {
        self.rates[0] + self.rates[1]
    }
}

/// `P` for an SNR in dB over unit noise variance.
pub fn snr_to_power(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Post-zero-forcing SINR of every stream of `channel` (square).
///
/// With `W = H⁻¹` and noise covariance `K`, stream `k` sees
/// `SINR_k = p / (W K Wᴴ)_kk`.
pub fn zf_sinrs(channel: &CMatrix, noise_cov: &CMatrix, p_per_stream: f64) -> Result<Vec<f64>> {
    let w = stacked_inverse(channel, "effective channel")?;
    let filtered = &w * noise_cov * w.adjoint();
    Ok((0..channel.ncols())
        .map(|k| p_per_stream / filtered[(k, k)].re)
        .collect())
}

/// Post-zero-forcing SINR of a single stream; see [`zf_sinrs`].
pub fn zf_sinr(channel: &CMatrix, stream: usize, noise_cov: &CMatrix, p_per_stream: f64) -> Result<f64> {
    if stream >= channel.ncols() {
        return Err(AinError::InvalidArgument(format!(
            "stream {stream} out of range for {} streams",
            channel.ncols()
        )));
    }
    Ok(zf_sinrs(channel, noise_cov, p_per_stream)?[stream])
}

/// Unit-energy QPSK symbol from two bits.
pub(crate) fn qpsk<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = if rng.random::<bool>() { h } else { -h };
    let im = if rng.random::<bool>() { h } else { -h };
    C64::new(re, im)
}

pub(crate) fn qpsk_error(sent: C64, estimate: C64) -> bool {
    (sent.re > 0.0) != (estimate.re > 0.0) || (sent.im > 0.0) != (estimate.im > 0.0)
}

/// Relay power terms for unit-variance symbols: `(S, N)` where `S` is the
/// relay signal power per unit stream power and `N` the forwarded-noise power.
pub fn relay_power_terms(beams: &BeamformerSet, relay: &RelayReceiver, mode: RelayMode) -> (f64, f64) {
    let r = beams.r;
    let mut signal = 0.0;
    for (j, vr) in beams.vr.iter().enumerate() {
        for (k, col) in vr.column_iter().enumerate() {
            let var = match j {
                2 => 1.0 + beams.lambda2[k].powi(2),
                3 => 1.0 + beams.lambda3[k].powi(2),
                _ => 1.0,
            };
            signal += col.norm_squared() * var;
        }
    }
    let noise = match mode {
        RelayMode::ZfForward => {
            let pre = beams.relay_precoder();
            (&pre * &relay.noise_cov * pre.adjoint()).trace().re
        }
        _ => 0.0,
    };
    debug_assert_eq!(beams.relay_precoder().ncols(), 4 * r);
    (signal, noise)
}

/// Common back-off `β²` for sources and relay.
pub fn joint_backoff(p: f64, p_stream: f64, relay_signal: f64, relay_noise: f64) -> f64 {
    if relay_noise >= p {
        return 0.0;
    }
    if relay_signal <= 0.0 {
        return 1.0;
    }
    ((p - relay_noise) / (p_stream * relay_signal)).min(1.0)
}

fn part_rates(sinrs: &[f64], r: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        *o = sinrs[j * r..(j + 1) * r].iter().map(|s| (1.0 + s).log2()).sum();
    }
    out
}

/// One MIMO trial of the aligned-neutralization scheme.
///
/// Rates are analytic; symbol error rates and transmit powers come from
/// `n_symbols` QPSK channel uses drawn from `seed`.
pub fn run_mimo_trial(
    ch: &MimoChannel,
    beams: &BeamformerSet,
    snr_db: f64,
    mode: RelayMode,
    n_symbols: usize,
    seed: RunSeed,
) -> Result<TrialResult> {
    if mode == RelayMode::HardDecision {
        return Err(AinError::UnsupportedMode {
            mode: mode.name(),
            scheme: "the MIMO scheme",
        });
    }
    let r = beams.r;
    let m = ch.m;
    let p = snr_to_power(snr_db);
    let p_stream = p / (3 * r) as f64;

    let relay = RelayReceiver::new(ch, &beams.source_beams())?;
    let (relay_signal, relay_noise) = relay_power_terms(beams, &relay, mode);
    let beta2 = joint_backoff(p, p_stream, relay_signal, relay_noise);
    let eff = compute_effective_channels(ch, beams);
    let precoder = beams.relay_precoder();

    let mut submessage_rates = [[0.0; 3]; 2];
    for dest in Destination::BOTH {
        let h_relay = match dest {
            Destination::One => &ch.h_1r,
            Destination::Two => &ch.h_2r,
        };
        let mut k = CMatrix::identity(m, m);
        if mode == RelayMode::ZfForward {
            let fwd = h_relay * &precoder;
            k += &fwd * &relay.noise_cov * fwd.adjoint();
        }
        let sinrs = zf_sinrs(&eff.stacked(dest), &k, beta2 * p_stream)?;
        submessage_rates[dest.index()] = part_rates(&sinrs, r);
    }

    // symbol-level run through the full network
    let amp = (beta2 * p_stream).sqrt();
    let zf = [
        stacked_inverse(&eff.stacked(Destination::One), "destination 1 effective channel")?,
        stacked_inverse(&eff.stacked(Destination::Two), "destination 2 effective channel")?,
    ];
    let mut rng = seed.rng();
    let mut errors = [[0usize; 3]; 2];
    let mut power = [0.0; 3];
    let src = beams.source_beams();
    for _ in 0..n_symbols {
        let s1: [CVector; 3] = std::array::from_fn(|_| CVector::from_fn(r, |_, _| qpsk(&mut rng)));
        let s2: [CVector; 3] = std::array::from_fn(|_| CVector::from_fn(r, |_, _| qpsk(&mut rng)));
        let x1 = (&beams.v1[0] * &s1[0] + &beams.v1[1] * &s1[1] + &beams.v1[2] * &s1[2]) * C64::from(amp);
        let x2 = (&beams.v2[0] * &s2[0] + &beams.v2[1] * &s2[1] + &beams.v2[2] * &s2[2]) * C64::from(amp);
        let n_r = complex_noise(&mut rng, m, 1.0);
        let forwarded = match mode {
            RelayMode::Genie => relay_combinations(&src, &s1, &s2) * C64::from(amp),
            _ => relay.estimate(&(&ch.h_r1 * &x1 + &ch.h_r2 * &x2 + n_r)),
        };
        let x_r = &precoder * forwarded;
        power[0] += x1.norm_squared();
        power[1] += x2.norm_squared();
        power[2] += x_r.norm_squared();

        let n1 = complex_noise(&mut rng, m, 1.0);
        let n2 = complex_noise(&mut rng, m, 1.0);
        let y = [
            &ch.h_11 * &x1 + &ch.h_12 * &x2 + &ch.h_1r * &x_r + n1,
            &ch.h_21 * &x1 + &ch.h_22 * &x2 + &ch.h_2r * &x_r + n2,
        ];
        for dest in Destination::BOTH {
            let d = dest.index();
            let own = if d == 0 { &s1 } else { &s2 };
            let est = &zf[d] * &y[d];
            for (j, part) in own.iter().enumerate() {
                for kk in 0..r {
                    if amp == 0.0 || qpsk_error(part[kk], est[j * r + kk]) {
                        errors[d][j] += 1;
                    }
                }
            }
        }
    }

    let n = n_symbols.max(1) as f64;
    let submessage_ser = errors.map(|e| e.map(|c| if n_symbols == 0 { 0.0 } else { c as f64 / (n * r as f64) }));
    Ok(TrialResult {
        snr_db,
        rates: submessage_rates.map(|p| p.iter().sum()),
        submessage_rates,
        ser: submessage_ser.map(|s| s.iter().sum::<f64>() / 3.0),
        submessage_ser,
        relay_ser: 0.0,
        residuals: [eff.residual_d1, eff.residual_d2],
        tx_power: power.map(|e| e / n),
    })
}

/// One scalar-scheme trial over `n_symbols` channel uses.
///
/// Symbols are uniform on `[-Q, Q]`; noise is real `N(0, 1)` at every
/// receiver. Each part's rate is the Fano bound of its measured error rate.
pub fn run_scalar_trial(
    ch: &ScalarChannel,
    sys: &ScalarSystem,
    mode: RelayMode,
    n_symbols: usize,
    seed: RunSeed,
) -> Result<TrialResult> {
    if mode == RelayMode::ZfForward {
        return Err(AinError::UnsupportedMode {
            mode: mode.name(),
            scheme: "the scalar scheme",
        });
    }
    if n_symbols == 0 {
        return Err(AinError::InvalidArgument("n_symbols must be >= 1".into()));
    }
    let sch = &sys.scheme;
    let q = sch.q as i32;
    let mut rng = seed.rng();
    let mut errors = [[0usize; 3]; 2];
    let mut relay_errors = 0usize;
    let mut power = [0.0; 3];
    let normal = rand_distr::StandardNormal;

    for _ in 0..n_symbols {
        let s1: [i32; 3] = std::array::from_fn(|_| rng.random_range(-q..=q));
        let s2: [i32; 3] = std::array::from_fn(|_| rng.random_range(-q..=q));
        let truth = scalar_combinations(&s1, &s2);
        let n_r: f64 = rng.sample(normal);
        let forwarded = match mode {
            RelayMode::Genie => truth,
            _ => sys.relay.nearest(relay_observation(ch, sch, &s1, &s2) + n_r),
        };
        if forwarded != truth {
            relay_errors += 1;
        }
        power[0] += sch.source_signal(1, &s1).powi(2);
        power[1] += sch.source_signal(2, &s2).powi(2);
        power[2] += sch.relay_signal(&forwarded).powi(2);

        for dest in Destination::BOTH {
            let noise: f64 = rng.sample(normal);
            let y = destination_observation(ch, sch, dest, &s1, &s2, &forwarded) + noise;
            let dec = destination_decode_scalar(y, sys.destination(dest));
            let own = if dest == Destination::One { &s1 } else { &s2 };
            for j in 0..3 {
                if dec.desired[j] != own[j] {
                    errors[dest.index()][j] += 1;
                }
            }
        }
    }

    let n = n_symbols as f64;
    let submessage_ser = errors.map(|e| e.map(|c| c as f64 / n));
    let submessage_rates = submessage_ser.map(|s| s.map(|e| rate_lower_bound(e, sch.q)));
    let residuals = sch.neutralization_residuals(ch);
    Ok(TrialResult {
        snr_db: 10.0 * sch.p.log10(),
        rates: submessage_rates.map(|p| p.iter().sum()),
        submessage_rates,
        ser: submessage_ser.map(|s| s.iter().sum::<f64>() / 3.0),
        submessage_ser,
        relay_ser: relay_errors as f64 / n,
        residuals: [residuals[0].max(residuals[1]), residuals[2].max(residuals[3])],
        tx_power: power.map(|e| e / n),
    })
}
