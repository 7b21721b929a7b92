//! Single-antenna scheme over rational dimensions.
//!
//! Each source sends `x = A·Σ_j v_j s_j` with integer symbols
//! `s_j ∈ [-Q, Q]`. Parts 2 and 3 are aligned at the relay, which therefore
//! observes a point of the four-dimensional integer constellation
//!
//! ```text
//! A h[R,1]v1_1·s1_1 + A h[R,2]v2_1·s2_1 + A h[R,1]v1_2·(s1_2+s2_2) + A h[R,1]v1_3·(s1_3+s2_3)
//! ```
//!
//! decodes the tuple by nearest-point search and forwards
//! `x_R = B·Σ_j v[R]_j s[R]_j` with directions chosen so that `s2_1`, `s2_2`
//! cancel at Destination 1 and `s1_1`, `s1_3` at Destination 2.
//!
//! Power: `A` is backed off jointly so that both sources *and* the relay
//! meet `E[x²] ≤ P` while every cancellation identity stays exact:
//! `A = √P / (Q·max(η1, η2, ‖w‖))`, where `ηi² = Σ_j v[i]_j²` and `w` holds
//! the relay amplitudes per unit `A`. The relay directions are `w/‖w‖`
//! (so `η[R] = 1`) and `B = A‖w‖`.

use rand::Rng;

use crate::channel::{RunSeed, ScalarChannel};
use crate::{AinError, Destination, Result};

/// Number of rationally independent integers seen by every receiver.
pub const M_RATIONAL: u32 = 4;
/// Default cap on enumerated constellation tuples.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Points of distinct tuples closer than this (times `A`) are coincident.
pub const COINCIDENCE_TOL: f64 = 1e-13;
/// Relative tolerance on the alignment and cancellation identities.
pub const CANCELLATION_TOL: f64 = 1e-12;
/// Direction redraws before a channel is declared rationally dependent.
pub const MAX_DIRECTION_DRAWS: usize = 100;

/// `Q = max(1, ⌊γ·P^((1-ε)/(2(m+ε)))⌋)` with `m = 4`.
pub fn choose_q(p: f64, gamma: f64, epsilon: f64) -> Result<u32> {
    if !(p > 0.0) || !(gamma > 0.0) || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(AinError::InvalidArgument(format!(
            "choose_q needs p > 0, gamma > 0, 0 < epsilon < 1 (got {p}, {gamma}, {epsilon})"
        )));
    }
    let m = M_RATIONAL as f64;
    let exponent = (1.0 - epsilon) / (2.0 * (m + epsilon));
    let q = gamma * p.powf(exponent);
    // absorb pow() rounding just below an exact integer
    let q = (q * (1.0 + 1e-12)).floor();
    Ok(q.clamp(1.0, u32::MAX as f64) as u32)
}

/// Fano-type lower bound `max(0, (1 - Pe)·log2(2Q - 1) - 1)` in bits.
///
/// # Panics
///
/// Panics if `ser` is outside `[0, 1]` or `q == 0`.
pub fn rate_lower_bound(ser: f64, q: u32) -> f64 {
    assert!((0.0..=1.0).contains(&ser), "symbol error rate {ser} outside [0, 1]");
    assert!(q >= 1, "constellation bound must be >= 1");
    let bits = (2.0 * q as f64 - 1.0).log2();
    ((1.0 - ser) * bits - 1.0).max(0.0)
}

/// Direction coefficients and power constants of the scalar scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarScheme {
    pub p: f64,
    pub q: u32,
    pub v1: [f64; 3],
    pub v2: [f64; 3],
    /// Unit-norm relay directions.
    pub vr: [f64; 4],
    pub a_const: f64,
    pub b_const: f64,
    /// `η1`, `η2`.
    pub eta_sources: [f64; 2],
    /// Norm of the relay amplitudes per unit `A`.
    pub eta_relay: f64,
    pub m_rational: u32,
}

fn free_direction<R: Rng>(rng: &mut R) -> f64 {
    let mag = rng.random_range(0.5..1.5);
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Builds the scheme for power `p` and constellation bound `q`.
///
/// `v1_1, v1_2, v2_1, v2_3` are drawn at random; `v2_2` and `v1_3` follow
/// from the relay alignment `h[R,1]v1_2 = h[R,2]v2_2`,
/// `h[R,1]v1_3 = h[R,2]v2_3`.
pub fn build_scalar_scheme(ch: &ScalarChannel, p: f64, q: u32, seed: RunSeed) -> Result<ScalarScheme> {
    ch.validate()?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(AinError::InvalidArgument(format!("power must be positive (got {p})")));
    }
    if q == 0 {
        return Err(AinError::InvalidArgument("Q must be >= 1".into()));
    }
    let mut rng = seed.rng();
    let v1_1 = free_direction(&mut rng);
    let v1_2 = free_direction(&mut rng);
    let v2_1 = free_direction(&mut rng);
    let v2_3 = free_direction(&mut rng);
    let v2_2 = ch.h_r1 * v1_2 / ch.h_r2;
    let v1_3 = ch.h_r2 * v2_3 / ch.h_r1;
    let v1 = [v1_1, v1_2, v1_3];
    let v2 = [v2_1, v2_2, v2_3];

    // relay amplitude per unit A, from B·h[j,R]·v[R] = -A·h[j,i]·v[i]
    let w = [
        -ch.h_21 * v1_1 / ch.h_2r,
        -ch.h_12 * v2_1 / ch.h_1r,
        -ch.h_12 * v2_2 / ch.h_1r,
        -ch.h_21 * v1_3 / ch.h_2r,
    ];
    let eta1 = v1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eta2 = v2.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eta_relay = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eta_max = eta1.max(eta2).max(eta_relay);

    let a_const = p.sqrt() / (q as f64 * eta_max);
    let b_const = a_const * eta_relay;
    let vr = w.map(|x| x / eta_relay);
    Ok(ScalarScheme {
        p,
        q,
        v1,
        v2,
        vr,
        a_const,
        b_const,
        eta_sources: [eta1, eta2],
        eta_relay,
        m_rational: M_RATIONAL,
    })
}

impl ScalarScheme {
    /// Transmit signal of source `user` (1 or 2).
    pub fn source_signal(&self, user: usize, s: &[i32; 3]) -> f64 {
        let v = if user == 1 { &self.v1 } else { &self.v2 };
        self.a_const * v.iter().zip(s).map(|(v, &s)| v * s as f64).sum::<f64>()
    }

    pub fn relay_signal(&self, sr: &[i32; 4]) -> f64 {
        self.b_const * self.vr.iter().zip(sr).map(|(v, &s)| v * s as f64).sum::<f64>()
    }

    /// Upper bounds `A²ηi²Q²` (sources) and `B²η[R]²Q²` (relay) on the
    /// transmit powers.
    pub fn power_bounds(&self) -> [f64; 3] {
        let q2 = (self.q as f64).powi(2);
        let eta_r2: f64 = self.vr.iter().map(|v| v * v).sum();
        [
            self.a_const.powi(2) * self.eta_sources[0].powi(2) * q2,
            self.a_const.powi(2) * self.eta_sources[1].powi(2) * q2,
            self.b_const.powi(2) * eta_r2 * q2,
        ]
    }

    /// Exact transmit powers for uniform symbols on `[-Q, Q]`.
    pub fn uniform_symbol_powers(&self) -> [f64; 3] {
        let q = self.q as f64;
        let es2 = q * (q + 1.0) / 3.0;
        let b = self.power_bounds();
        [b[0] / (q * q) * es2, b[1] / (q * q) * es2, b[2] / (q * q) * es2]
    }

    /// Relay constellation coefficients for `(s1_1, s2_1, s1_2+s2_2, s1_3+s2_3)`.
    pub fn relay_coefficients(&self, ch: &ScalarChannel) -> [f64; 4] {
        let a = self.a_const;
        [
            a * ch.h_r1 * self.v1[0],
            a * ch.h_r2 * self.v2[0],
            a * ch.h_r1 * self.v1[1],
            a * ch.h_r1 * self.v1[2],
        ]
    }

    /// Effective coefficients at a destination. Destination 1 sees
    /// `(s1_1, s1_2, s1_3, s2_3)`, Destination 2 `(s2_1, s2_2, s2_3, s1_2)`.
    pub fn destination_coefficients(&self, ch: &ScalarChannel, dest: Destination) -> [f64; 4] {
        let (a, b) = (self.a_const, self.b_const);
        let (v1, v2, vr) = (&self.v1, &self.v2, &self.vr);
        match dest {
            Destination::One => [
                a * ch.h_11 * v1[0] + b * ch.h_1r * vr[0],
                a * ch.h_11 * v1[1] + b * ch.h_1r * vr[2],
                a * ch.h_11 * v1[2] + b * ch.h_1r * vr[3],
                a * ch.h_12 * v2[2] + b * ch.h_1r * vr[3],
            ],
            Destination::Two => [
                a * ch.h_22 * v2[0] + b * ch.h_2r * vr[1],
                a * ch.h_22 * v2[1] + b * ch.h_2r * vr[2],
                a * ch.h_22 * v2[2] + b * ch.h_2r * vr[3],
                a * ch.h_21 * v1[1] + b * ch.h_2r * vr[2],
            ],
        }
    }

    /// Total (direct + relayed) coefficients of the neutralized symbols
    /// relative to their direct parts: `s2_1`, `s2_2` at Destination 1 and
    /// `s1_1`, `s1_3` at Destination 2.
    pub fn neutralization_residuals(&self, ch: &ScalarChannel) -> [f64; 4] {
        let (a, b) = (self.a_const, self.b_const);
        let rel = |direct: f64, relayed: f64| ((direct + relayed) / direct).abs();
        [
            rel(a * ch.h_12 * self.v2[0], b * ch.h_1r * self.vr[1]),
            rel(a * ch.h_12 * self.v2[1], b * ch.h_1r * self.vr[2]),
            rel(a * ch.h_21 * self.v1[0], b * ch.h_2r * self.vr[0]),
            rel(a * ch.h_21 * self.v1[2], b * ch.h_2r * self.vr[3]),
        ]
    }

    /// Relative residual of the two relay alignments.
    pub fn alignment_residuals(&self, ch: &ScalarChannel) -> [f64; 2] {
        let rel = |a: f64, b: f64| ((a - b) / a).abs();
        [
            rel(ch.h_r1 * self.v1[1], ch.h_r2 * self.v2[1]),
            rel(ch.h_r1 * self.v1[2], ch.h_r2 * self.v2[2]),
        ]
    }
}

/// Symbols the relay forwards for the given source symbols.
pub fn relay_combinations(s1: &[i32; 3], s2: &[i32; 3]) -> [i32; 4] {
    [s1[0], s2[0], s1[1] + s2[1], s1[2] + s2[2]]
}

/// Noise-free relay observation.
pub fn relay_observation(ch: &ScalarChannel, sch: &ScalarScheme, s1: &[i32; 3], s2: &[i32; 3]) -> f64 {
    ch.h_r1 * sch.source_signal(1, s1) + ch.h_r2 * sch.source_signal(2, s2)
}

/// Noise-free destination observation given what the relay forwards.
pub fn destination_observation(
    ch: &ScalarChannel,
    sch: &ScalarScheme,
    dest: Destination,
    s1: &[i32; 3],
    s2: &[i32; 3],
    sr: &[i32; 4],
) -> f64 {
    let (x1, x2, xr) = (sch.source_signal(1, s1), sch.source_signal(2, s2), sch.relay_signal(sr));
    match dest {
        Destination::One => ch.h_11 * x1 + ch.h_12 * x2 + ch.h_1r * xr,
        Destination::Two => ch.h_21 * x1 + ch.h_22 * x2 + ch.h_2r * xr,
    }
}

/// A one-dimensional constellation of integer combinations
/// `Σ_k c_k t_k`, `t_k ∈ [-b_k, b_k]`, sorted for nearest-point search.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub coefficients: [f64; 4],
    pub bounds: [i32; 4],
    points: Vec<(f64, [i32; 4])>,
    /// Smallest gap between distinct points (coincident points excluded).
    pub d_min: f64,
    /// Distinct tuples landed on (numerically) the same point.
    pub rationally_dependent: bool,
}

/// The relay's received constellation.
pub type ReceivedConstellation = Constellation;

impl Constellation {
    /// Exhaustive enumeration. `coincidence_tol` is absolute.
    pub fn enumerate(
        coefficients: [f64; 4],
        bounds: [i32; 4],
        coincidence_tol: f64,
        budget: u64,
    ) -> Result<Self> {
        if bounds.iter().any(|&b| b < 0) {
            return Err(AinError::InvalidArgument("negative symbol bound".into()));
        }
        let tuples: u128 = bounds.iter().map(|&b| 2 * b as u128 + 1).product();
        if tuples > budget as u128 {
            return Err(AinError::EnumerationTooLarge {
                q: bounds[0] as u32,
                tuples,
                budget,
            });
        }
        let mut points = Vec::with_capacity(tuples as usize);
        let [b0, b1, b2, b3] = bounds;
        for t0 in -b0..=b0 {
            for t1 in -b1..=b1 {
                for t2 in -b2..=b2 {
                    for t3 in -b3..=b3 {
                        let t = [t0, t1, t2, t3];
                        points.push((dot(&coefficients, &t), t));
                    }
                }
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut d_min = f64::INFINITY;
        let mut rationally_dependent = false;
        for w in points.windows(2) {
            let gap = w[1].0 - w[0].0;
            if gap <= coincidence_tol {
                rationally_dependent = true;
            } else {
                d_min = d_min.min(gap);
            }
        }
        Ok(Self {
            coefficients,
            bounds,
            points,
            d_min,
            rationally_dependent,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point values in ascending order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn value(&self, t: &[i32; 4]) -> f64 {
        dot(&self.coefficients, t)
    }

    /// Tuple of the point nearest to `y`; equal distances resolve to the
    /// lexicographically smallest tuple.
    pub fn nearest(&self, y: f64) -> [i32; 4] {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.0 < y);
        let mut best: Option<(f64, [i32; 4])> = None;
        if i > 0 {
            let v = pts[i - 1].0;
            let mut j = i - 1;
            while j > 0 && pts[j - 1].0 == v {
                j -= 1;
            }
            best = Some((y - v, pts[j].1));
        }
        if i < pts.len() {
            let cand = (pts[i].0 - y, pts[i].1);
            best = match best {
                Some(b) if b.0 < cand.0 || (b.0 == cand.0 && b.1 < cand.1) => Some(b),
                _ => Some(cand),
            };
        }
        best.expect("constellation is never empty").1
    }
}

fn dot(c: &[f64; 4], t: &[i32; 4]) -> f64 {
    c.iter().zip(t).map(|(c, &t)| c * t as f64).sum()
}

/// Relay constellation: `s1_1, s2_1 ∈ [-Q, Q]`, aligned sums in `[-2Q, 2Q]`.
pub fn enumerate_received_constellation(
    ch: &ScalarChannel,
    sch: &ScalarScheme,
    budget: u64,
) -> Result<ReceivedConstellation> {
    let q = sch.q as i32;
    Constellation::enumerate(
        sch.relay_coefficients(ch),
        [q, q, 2 * q, 2 * q],
        COINCIDENCE_TOL * sch.a_const,
        budget,
    )
}

/// Four-symbol effective constellation seen by a destination.
pub fn destination_constellation(
    ch: &ScalarChannel,
    sch: &ScalarScheme,
    dest: Destination,
    budget: u64,
) -> Result<Constellation> {
    let q = sch.q as i32;
    Constellation::enumerate(
        sch.destination_coefficients(ch, dest),
        [q; 4],
        COINCIDENCE_TOL * sch.a_const,
        budget,
    )
}

/// Nearest-point estimate of `(s1_1, s2_1, s1_2+s2_2, s1_3+s2_3)`.
pub fn relay_estimate_scalar(y_r: f64, constellation: &ReceivedConstellation) -> [i32; 4] {
    constellation.nearest(y_r)
}

/// Destination decision: the three desired symbols plus the surviving cross symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DestinationDecision {
    pub desired: [i32; 3],
    pub cross: i32,
}

pub fn destination_decode_scalar(y: f64, constellation: &Constellation) -> DestinationDecision {
    let t = constellation.nearest(y);
    DestinationDecision {
        desired: [t[0], t[1], t[2]],
        cross: t[3],
    }
}

/// A scheme together with the constellations every receiver decodes over.
#[derive(Debug, Clone)]
pub struct ScalarSystem {
    pub scheme: ScalarScheme,
    pub relay: ReceivedConstellation,
    pub destinations: [Constellation; 2],
}

impl ScalarSystem {
    /// Builds the scheme and enumerates all three constellations, redrawing
    /// the free directions while any constellation is rationally dependent.
    pub fn build(ch: &ScalarChannel, p: f64, q: u32, seed: RunSeed, budget: u64) -> Result<Self> {
        for attempt in 0..MAX_DIRECTION_DRAWS {
            let scheme = build_scalar_scheme(ch, p, q, seed.fork(attempt as u64))?;
            let relay = enumerate_received_constellation(ch, &scheme, budget)?;
            let d1 = destination_constellation(ch, &scheme, Destination::One, budget)?;
            let d2 = destination_constellation(ch, &scheme, Destination::Two, budget)?;
            if !(relay.rationally_dependent || d1.rationally_dependent || d2.rationally_dependent) {
                return Ok(Self {
                    scheme,
                    relay,
                    destinations: [d1, d2],
                });
            }
        }
        Err(AinError::RationallyDependent {
            attempts: MAX_DIRECTION_DRAWS,
        })
    }

    pub fn destination(&self, dest: Destination) -> &Constellation {
        &self.destinations[dest.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_scalar_channel, streams};

    fn channel(s: u64) -> ScalarChannel {
        sample_scalar_channel(RunSeed::new(s, streams::CHANNEL))
    }

    fn scheme(s: u64, p: f64, q: u32) -> (ScalarChannel, ScalarScheme) {
        let ch = channel(s);
        let sch = build_scalar_scheme(&ch, p, q, RunSeed::new(s, streams::BEAMS)).unwrap();
        (ch, sch)
    }

    #[test]
    fn choose_q_examples() {
        assert_eq!(choose_q(1.0, 1.0, 0.5).unwrap(), 1);
        // 10^(8 * 0.5 / 9) = 10^0.444... = 2.78
        assert_eq!(choose_q(1e8, 1.0, 0.5).unwrap(), 2);
        assert_eq!(choose_q(1e-3, 1.0, 0.5).unwrap(), 1);
        assert!(choose_q(0.0, 1.0, 0.5).is_err());
        assert!(choose_q(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rate_bound_examples() {
        assert_eq!(rate_lower_bound(0.0, 1), 0.0);
        assert_eq!(rate_lower_bound(1.0, 9), 0.0);
        // 0.99 * log2(15) - 1
        assert!((rate_lower_bound(0.01, 8) - 2.867_821_689_652_433_6).abs() < 1e-9);
    }

    #[test]
    #[should_panic]
    fn rate_bound_rejects_bad_ser() {
        rate_lower_bound(1.5, 2);
    }

    #[test]
    fn alignment_is_exact() {
        let (ch, sch) = scheme(1, 1e8, 2);
        assert_eq!(ch.h_r1 * sch.v1[1] - ch.h_r2 * sch.v2[1], 0.0);
        assert!(sch.alignment_residuals(&ch).iter().all(|&r| r <= 1e-15));
    }

    #[test]
    fn power_constraints_hold() {
        for s in 0..50 {
            let (_, sch) = scheme(s, 1e6, 3);
            for bound in sch.power_bounds() {
                assert!(bound <= 1e6 * (1.0 + 1e-12), "{bound}");
            }
            // at least one transmitter is tight
            let tight = sch.power_bounds().iter().cloned().fold(0.0, f64::max);
            assert!((tight - 1e6).abs() <= 1e-6);
        }
    }

    #[test]
    fn third_cancellation_identity() {
        let (ch, sch) = scheme(2, 1e10, 3);
        let lhs = sch.b_const * ch.h_1r * sch.vr[2] + sch.a_const * ch.h_12 * sch.v2[1];
        assert!(lhs.abs() <= 1e-12 * (sch.a_const * ch.h_12 * sch.v2[1]).abs());
        assert!(sch.neutralization_residuals(&ch).iter().all(|&r| r <= 1e-12));
    }

    #[test]
    fn zero_coefficient_rejected() {
        let mut ch = channel(3);
        ch.h_2r = 0.0;
        assert!(matches!(
            build_scalar_scheme(&ch, 1e6, 2, RunSeed::new(0, 1)),
            Err(AinError::DegenerateChannel { .. })
        ));
    }

    #[test]
    fn single_free_symbol_has_lattice_spacing() {
        let c = 0.37;
        let con = Constellation::enumerate([c, 0.0, 0.0, 0.0], [2, 2, 4, 4], 1e-13, DEFAULT_BUDGET)
            .unwrap();
        assert!((con.d_min - c).abs() < 1e-15);
        assert!(con.rationally_dependent);
    }

    #[test]
    fn generic_relay_constellation_has_positive_distance() {
        let (ch, sch) = scheme(4, 1e6, 2);
        let con = enumerate_received_constellation(&ch, &sch, DEFAULT_BUDGET).unwrap();
        assert_eq!(con.len(), 5 * 5 * 9 * 9);
        assert!(con.d_min > 0.0);
        assert!(!con.rationally_dependent);
    }

    #[test]
    fn d_min_is_homogeneous_in_a() {
        let (ch, sch) = scheme(5, 1e6, 2);
        let mut doubled = sch.clone();
        doubled.a_const *= 2.0;
        let d = enumerate_received_constellation(&ch, &sch, DEFAULT_BUDGET).unwrap().d_min;
        let d2 = enumerate_received_constellation(&ch, &doubled, DEFAULT_BUDGET).unwrap().d_min;
        assert!((d2 - 2.0 * d).abs() <= 1e-12 * d2);
    }

    #[test]
    fn budget_is_enforced() {
        let (ch, sch) = scheme(6, 1e6, 10);
        let err = enumerate_received_constellation(&ch, &sch, 1000).unwrap_err();
        assert_eq!(
            err,
            AinError::EnumerationTooLarge {
                q: 10,
                tuples: 21 * 21 * 41 * 41,
                budget: 1000
            }
        );
    }

    #[test]
    fn relay_decodes_noise_free_and_small_perturbations() {
        let (ch, sch) = scheme(7, 1e8, 2);
        let con = enumerate_received_constellation(&ch, &sch, DEFAULT_BUDGET).unwrap();
        let t = [1, -1, 0, 2];
        let y = con.value(&t);
        assert_eq!(relay_estimate_scalar(y, &con), t);
        assert_eq!(relay_estimate_scalar(y + 0.49 * con.d_min, &con), t);
        assert_eq!(relay_estimate_scalar(y - 0.49 * con.d_min, &con), t);
    }

    #[test]
    fn nearest_breaks_ties_lexicographically() {
        let con = Constellation::enumerate([1.0, 0.0, 0.0, 0.0], [1, 0, 0, 0], 1e-13, 100).unwrap();
        assert_eq!(con.nearest(0.5), [0, 0, 0, 0]);
        assert_eq!(con.nearest(-0.5), [-1, 0, 0, 0]);
        assert_eq!(con.nearest(-7.0), [-1, 0, 0, 0]);
        assert_eq!(con.nearest(7.0), [1, 0, 0, 0]);
    }

    #[test]
    fn direct_cross_coefficients_are_cancelled() {
        let (ch, sch) = scheme(8, 1e8, 2);
        let total = sch.a_const * ch.h_12 * sch.v2[0] + sch.b_const * ch.h_1r * sch.vr[1];
        assert!(total.abs() <= 1e-12 * sch.a_const);
        let total = sch.a_const * ch.h_12 * sch.v2[1] + sch.b_const * ch.h_1r * sch.vr[2];
        assert!(total.abs() <= 1e-12 * sch.a_const);
    }

    #[test]
    fn destination_decodes_noise_free() {
        let ch = channel(9);
        let sys = ScalarSystem::build(&ch, 1e8, 2, RunSeed::new(9, 1), DEFAULT_BUDGET).unwrap();
        let (s1, s2) = ([2, -1, 0], [-2, 1, 1]);
        let sr = relay_combinations(&s1, &s2);
        let y1 = destination_observation(&ch, &sys.scheme, Destination::One, &s1, &s2, &sr);
        let d1 = destination_decode_scalar(y1, sys.destination(Destination::One));
        assert_eq!(d1, DestinationDecision { desired: s1, cross: s2[2] });
        let y2 = destination_observation(&ch, &sys.scheme, Destination::Two, &s1, &s2, &sr);
        let d2 = destination_decode_scalar(y2, sys.destination(Destination::Two));
        assert_eq!(d2, DestinationDecision { desired: s2, cross: s1[1] });
    }
}
