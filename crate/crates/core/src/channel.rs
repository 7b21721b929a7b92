//! Seeded channel realizations and noise.
//!
//! Every draw is a pure function of a [`RunSeed`]: the 64-bit seed keys a
//! ChaCha8 generator and the stream id selects one of its independent
//! streams, so channel, beam and noise draws never share randomness.
//!
//! All nodes are given full channel knowledge. In the underlying network the
//! sources only need their links to the relay (the direct links are needed
//! solely by the destinations and by the diversity variant of the beams).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{complex_gaussian, complex_gaussian_matrix, condition_number};
use crate::{AinError, CMatrix, CVector, Result};

/// Condition number above which a sampled matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Consecutive singular draws tolerated before giving up.
pub const MAX_SINGULAR_DRAWS: usize = 100;

/// Well-known stream ids.
pub mod streams {
    pub const CHANNEL: u64 = 0;
    pub const BEAMS: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const SYMBOLS: u64 = 3;
}

/// Seed plus stream selector. Identical values reproduce identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunSeed {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RunSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Same seed, different stream.
    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// Derives the seed of the `index`-th independent job (trial, grid point)
    /// on the same stream.
    pub fn fork(self, index: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(index.wrapping_add(0x5EED))),
            stream_id: self.stream_id,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// The eight `M x M` matrices of the five-node network. `h_ji` maps sender
/// `i` to receiver `j`, with `r` standing for the relay.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoChannel {
    pub m: usize,
    pub h_r1: CMatrix,
    pub h_r2: CMatrix,
    pub h_11: CMatrix,
    pub h_12: CMatrix,
    pub h_21: CMatrix,
    pub h_22: CMatrix,
    pub h_1r: CMatrix,
    pub h_2r: CMatrix,
}

impl MimoChannel {
    /// Assembles a channel from explicit matrices, checking shapes only.
    #[allow(clippy::too_many_arguments)]
    pub fn from_matrices(
        h_r1: CMatrix,
        h_r2: CMatrix,
        h_11: CMatrix,
        h_12: CMatrix,
        h_21: CMatrix,
        h_22: CMatrix,
        h_1r: CMatrix,
        h_2r: CMatrix,
    ) -> Result<Self> {
        let m = h_r1.nrows();
        let ch = Self {
            m,
            h_r1,
            h_r2,
            h_11,
            h_12,
            h_21,
            h_22,
            h_1r,
            h_2r,
        };
        if m == 0 || ch.matrices().iter().any(|(_, h)| h.shape() != (m, m)) {
            return Err(AinError::InvalidArgument(
                "all channel matrices must be M x M with M >= 1".into(),
            ));
        }
        Ok(ch)
    }

    pub fn matrices(&self) -> [(&'static str, &CMatrix); 8] {
        [
            ("H[R,1]", &self.h_r1),
            ("H[R,2]", &self.h_r2),
            ("H[1,1]", &self.h_11),
            ("H[1,2]", &self.h_12),
            ("H[2,1]", &self.h_21),
            ("H[2,2]", &self.h_22),
            ("H[1,R]", &self.h_1r),
            ("H[2,R]", &self.h_2r),
        ]
    }

    /// Multiplies every link by the same complex scalar.
    pub fn scaled(&self, c: crate::C64) -> Self {
        let s = |h: &CMatrix| h * c;
        Self {
            m: self.m,
            h_r1: s(&self.h_r1),
            h_r2: s(&self.h_r2),
            h_11: s(&self.h_11),
            h_12: s(&self.h_12),
            h_21: s(&self.h_21),
            h_22: s(&self.h_22),
            h_1r: s(&self.h_1r),
            h_2r: s(&self.h_2r),
        }
    }
}

fn well_conditioned_matrix<R: Rng>(rng: &mut R, m: usize) -> Result<CMatrix> {
    for _ in 0..MAX_SINGULAR_DRAWS {
        let h = complex_gaussian_matrix(rng, m, m);
        if condition_number(&h) <= MAX_CONDITION {
            return Ok(h);
        }
    }
    Err(AinError::GenerationFailure {
        attempts: MAX_SINGULAR_DRAWS,
    })
}

/// I.i.d. `CN(0, 1)` entries for all eight matrices, each resampled while its
/// condition number exceeds [`MAX_CONDITION`].
pub fn sample_mimo_channel(m: usize, seed: RunSeed) -> Result<MimoChannel> {
    if m == 0 {
        return Err(AinError::InvalidArgument("antenna count must be >= 1".into()));
    }
    let mut rng = seed.rng();
    let mut draw = || well_conditioned_matrix(&mut rng, m);
    Ok(MimoChannel {
        m,
        h_r1: draw()?,
        h_r2: draw()?,
        h_11: draw()?,
        h_12: draw()?,
        h_21: draw()?,
        h_22: draw()?,
        h_1r: draw()?,
        h_2r: draw()?,
    })
}

/// Real single-antenna channel gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarChannel {
    pub h_r1: f64,
    pub h_r2: f64,
    pub h_11: f64,
    pub h_12: f64,
    pub h_21: f64,
    pub h_22: f64,
    pub h_1r: f64,
    pub h_2r: f64,
}

impl ScalarChannel {
    pub fn coefficients(&self) -> [(&'static str, f64); 8] {
        [
            ("h[R,1]", self.h_r1),
            ("h[R,2]", self.h_r2),
            ("h[1,1]", self.h_11),
            ("h[1,2]", self.h_12),
            ("h[2,1]", self.h_21),
            ("h[2,2]", self.h_22),
            ("h[1,R]", self.h_1r),
            ("h[2,R]", self.h_2r),
        ]
    }

    /// Fails on the first zero or non-finite coefficient.
    pub fn validate(&self) -> Result<()> {
        for (which, h) in self.coefficients() {
            if h == 0.0 || !h.is_finite() {
                return Err(AinError::DegenerateChannel { which });
            }
        }
        Ok(())
    }
}

fn nonzero_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        if x != 0.0 {
            return x;
        }
    }
}

/// Real standard Gaussian gains, none exactly zero.
pub fn sample_scalar_channel(seed: RunSeed) -> ScalarChannel {
    let mut rng = seed.rng();
    let mut g = || nonzero_normal(&mut rng);
    ScalarChannel {
        h_r1: g(),
        h_r2: g(),
        h_11: g(),
        h_12: g(),
        h_21: g(),
        h_22: g(),
        h_1r: g(),
        h_2r: g(),
    }
}

/// Single-antenna sources and destinations around a two-antenna relay.
///
/// `h_r1`, `h_r2` are 2x1 relay receive columns, `h_1r`, `h_2r` are 1x2 relay
/// transmit rows, the direct links are 1x1.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAntennaRelayChannel {
    pub h_r1: CMatrix,
    pub h_r2: CMatrix,
    pub h_11: CMatrix,
    pub h_12: CMatrix,
    pub h_21: CMatrix,
    pub h_22: CMatrix,
    pub h_1r: CMatrix,
    pub h_2r: CMatrix,
}

pub fn sample_two_antenna_relay_channel(seed: RunSeed) -> TwoAntennaRelayChannel {
    let mut rng = seed.rng();
    TwoAntennaRelayChannel {
        h_r1: complex_gaussian_matrix(&mut rng, 2, 1),
        h_r2: complex_gaussian_matrix(&mut rng, 2, 1),
        h_11: complex_gaussian_matrix(&mut rng, 1, 1),
        h_12: complex_gaussian_matrix(&mut rng, 1, 1),
        h_21: complex_gaussian_matrix(&mut rng, 1, 1),
        h_22: complex_gaussian_matrix(&mut rng, 1, 1),
        h_1r: complex_gaussian_matrix(&mut rng, 1, 2),
        h_2r: complex_gaussian_matrix(&mut rng, 1, 2),
    }
}

fn check_noise_args(dim: usize, variance: f64) -> Result<()> {
    if dim == 0 {
        return Err(AinError::InvalidArgument("noise dimension must be >= 1".into()));
    }
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(AinError::InvalidArgument(format!(
            "noise variance must be a finite non-negative number (got {variance})"
        )));
    }
    Ok(())
}

/// Circularly-symmetric complex Gaussian noise vector, `E|n_k|^2 = variance`.
pub fn sample_noise(dim: usize, variance: f64, seed: RunSeed) -> Result<CVector> {
    check_noise_args(dim, variance)?;
    let mut rng = seed.rng();
    Ok(complex_noise(&mut rng, dim, variance))
}

/// Real Gaussian noise vector with the given per-entry variance.
pub fn sample_real_noise(dim: usize, variance: f64, seed: RunSeed) -> Result<Vec<f64>> {
    check_noise_args(dim, variance)?;
    let mut rng = seed.rng();
    Ok(real_noise(&mut rng, dim, variance))
}

pub(crate) fn complex_noise<R: Rng + ?Sized>(rng: &mut R, dim: usize, variance: f64) -> CVector {
    if variance == 0.0 {
        return CVector::zeros(dim);
    }
    CVector::from_fn(dim, |_, _| complex_gaussian(rng, variance))
}

pub(crate) fn real_noise<R: Rng + ?Sized>(rng: &mut R, dim: usize, variance: f64) -> Vec<f64> {
    if variance == 0.0 {
        return vec![0.0; dim];
    }
    let s = variance.sqrt();
    (0..dim)
        .map(|_| s * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(s: u64) -> RunSeed {
        RunSeed::new(s, streams::CHANNEL)
    }

    #[test]
    fn mimo_channel_is_deterministic() {
        let a = sample_mimo_channel(1, seed(7)).unwrap();
        let b = sample_mimo_channel(1, seed(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.h_11.shape(), (1, 1));
    }

    #[test]
    fn mimo_channel_shapes() {
        let ch = sample_mimo_channel(4, seed(1)).unwrap();
        assert_eq!(ch.m, 4);
        for (_, h) in ch.matrices() {
            assert_eq!(h.shape(), (4, 4));
            assert!(condition_number(h) <= MAX_CONDITION);
        }
    }

    #[test]
    fn zero_antennas_rejected() {
        assert!(sample_mimo_channel(0, seed(1)).is_err());
    }

    #[test]
    fn from_matrices_checks_shapes() {
        let ch = sample_mimo_channel(2, seed(2)).unwrap();
        let bad = MimoChannel::from_matrices(
            CMatrix::zeros(3, 3),
            ch.h_r2.clone(),
            ch.h_11.clone(),
            ch.h_12.clone(),
            ch.h_21.clone(),
            ch.h_22.clone(),
            ch.h_1r.clone(),
            ch.h_2r.clone(),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn scalar_channel_is_deterministic_and_nonzero() {
        let a = sample_scalar_channel(seed(11));
        assert_eq!(a, sample_scalar_channel(seed(11)));
        assert!(a.validate().is_ok());
    }

    #[test]
    fn zero_coefficient_is_degenerate() {
        let mut ch = sample_scalar_channel(seed(1));
        ch.h_12 = 0.0;
        assert_eq!(
            ch.validate(),
            Err(AinError::DegenerateChannel { which: "h[1,2]" })
        );
    }

    #[test]
    fn zero_variance_noise_is_zero() {
        let n = sample_noise(4, 0.0, seed(5)).unwrap();
        assert_eq!(n, CVector::zeros(4));
        assert_eq!(sample_real_noise(3, 0.0, seed(5)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn negative_variance_rejected() {
        assert!(matches!(
            sample_noise(4, -1.0, seed(5)),
            Err(AinError::InvalidArgument(_))
        ));
        assert!(sample_real_noise(4, -0.5, seed(5)).is_err());
        assert!(sample_noise(0, 1.0, seed(5)).is_err());
    }

    #[test]
    fn noise_is_deterministic() {
        let a = sample_noise(4, 1.0, seed(9)).unwrap();
        let b = sample_noise(4, 1.0, seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forks_and_streams_differ() {
        let s = RunSeed::new(1, 0);
        assert_ne!(s.fork(0), s.fork(1));
        let a: u64 = s.rng().random();
        let b: u64 = s.with_stream(1).rng().random();
        assert_ne!(a, b);
    }
}
