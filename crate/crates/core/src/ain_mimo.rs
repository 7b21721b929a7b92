//! Beamformers for aligned interference neutralization with `M = 4r` antennas.
//!
//! Each source splits its message into three parts of `r` streams. Parts 2
//! and 3 of the two sources are aligned at the relay, so the relay resolves
//! only `4r` quantities in its `M`-dimensional space:
//!
//! ```text
//! s1_1, s2_1, Λ2·s1_2 + s2_2, s1_3 + Λ3·s2_3
//! ```
//!
//! The relay forwards each of them along a beam that cancels, at the
//! unintended destination, the direct-path copy of one interfering stream.
//! Destination 1 is left with `[s1_1 s1_2 s1_3 s2_3]`, Destination 2 with
//! `[s2_1 s2_2 s2_3 s1_2]`, both resolvable by zero forcing.

use rand::Rng;

use crate::channel::{MimoChannel, RunSeed};
use crate::linalg::{
    column_norms, hstack, inverse, min_singular_value, random_unit_columns, scale_columns,
    stacked_inverse,
};
use crate::{AinError, CMatrix, CVector, Destination, Result};

/// Tolerance on relative alignment and neutralization residuals.
pub const NEUTRALIZATION_TOL: f64 = 1e-10;
/// Smallest singular value accepted for a stacked effective matrix.
pub const DECODABILITY_TOL: f64 = 1e-8;

/// Streams per message part for `m` antennas.
pub fn streams_per_part(m: usize) -> Result<usize> {
    if m == 0 || !m.is_multiple_of(4) {
        return Err(AinError::UnsupportedDimension { m });
    }
    Ok(m / 4)
}

/// Source beams and the alignment gains they induce at the relay.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBeams {
    pub r: usize,
    /// `V[1]_1, V[1]_2, V[1]_3`, each `M x r` with unit-norm columns.
    pub v1: [CMatrix; 3],
    /// `V[2]_1, V[2]_2, V[2]_3`.
    pub v2: [CMatrix; 3],
    /// Diagonal of `Λ[R,1]_2`.
    pub lambda2: Vec<f64>,
    /// Diagonal of `Λ[R,2]_3`.
    pub lambda3: Vec<f64>,
}

/// Complete beamformer set: source beams plus the four relay beam blocks.
///
/// Relay beams are kept exactly as the cancellation identities produce them
/// (not normalized); power is accounted for by a common back-off in
/// [`crate::link_sim`].
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    pub r: usize,
    pub v1: [CMatrix; 3],
    pub v2: [CMatrix; 3],
    pub vr: [CMatrix; 4],
    pub lambda2: Vec<f64>,
    pub lambda3: Vec<f64>,
}

impl BeamformerSet {
    pub fn source_beams(&self) -> SourceBeams {
        SourceBeams {
            r: self.r,
            v1: self.v1.clone(),
            v2: self.v2.clone(),
            lambda2: self.lambda2.clone(),
            lambda3: self.lambda3.clone(),
        }
    }

    /// `[V[R]_1 V[R]_2 V[R]_3 V[R]_4]`, the map from the relay's `4r`
    /// forwarded quantities to its transmit vector.
    pub fn relay_precoder(&self) -> CMatrix {
        hstack(&[&self.vr[0], &self.vr[1], &self.vr[2], &self.vr[3]])
    }
}

/// Draws the free source beams and aligns the dependent ones at the relay.
///
/// Part 2: source 1 is free and `v[2]_{2,l} ∝ (H[R,2])⁻¹ H[R,1] v[1]_{2,l}`.
/// Part 3: source 2 is free and `v[1]_{3,l} ∝ (H[R,1])⁻¹ H[R,2] v[2]_{3,l}`.
/// The proportionality constants are positive, so each `Λ` entry is exactly
/// the ratio of received column norms.
pub fn build_source_beams(ch: &MimoChannel, seed: RunSeed) -> Result<SourceBeams> {
    let r = streams_per_part(ch.m)?;
    let m = ch.m;
    let mut rng = seed.rng();
    let v1_1 = random_unit_columns(&mut rng, m, r);
    let v1_2 = random_unit_columns(&mut rng, m, r);
    let v2_1 = random_unit_columns(&mut rng, m, r);
    let v2_3 = random_unit_columns(&mut rng, m, r);
    align_sources(ch, v1_1, v1_2, v2_1, v2_3)
}

fn align_sources(
    ch: &MimoChannel,
    v1_1: CMatrix,
    v1_2: CMatrix,
    v2_1: CMatrix,
    v2_3: CMatrix,
) -> Result<SourceBeams> {
    let r = v1_1.ncols();
    let inv_r1 = inverse(&ch.h_r1, "H[R,1]")?;
    let inv_r2 = inverse(&ch.h_r2, "H[R,2]")?;

    let mut v2_2 = &inv_r2 * &ch.h_r1 * &v1_2;
    let lambda2 = column_norms(&v2_2);
    crate::linalg::normalize_columns(&mut v2_2);

    let mut v1_3 = &inv_r1 * &ch.h_r2 * &v2_3;
    let lambda3 = column_norms(&v1_3);
    crate::linalg::normalize_columns(&mut v1_3);

    if lambda2.iter().chain(&lambda3).any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(AinError::SingularChannel { which: "H[R,1]/H[R,2]" });
    }
    Ok(SourceBeams {
        r,
        v1: [v1_1, v1_2, v1_3],
        v2: [v2_1, v2_2, v2_3],
        lambda2,
        lambda3,
    })
}

/// Relay beams from the four neutralization identities:
///
/// ```text
/// H[2,R] v[R]_1 = -H[2,1] v[1]_1     H[1,R] v[R]_2 = -H[1,2] v[2]_1
/// H[1,R] v[R]_3 = -H[1,2] v[2]_2     H[2,R] v[R]_4 = -H[2,1] v[1]_3
/// ```
pub fn build_relay_beams(ch: &MimoChannel, beams: &SourceBeams) -> Result<BeamformerSet> {
    let inv_1r = inverse(&ch.h_1r, "H[1,R]")?;
    let inv_2r = inverse(&ch.h_2r, "H[2,R]")?;
    let to_d2 = -(&inv_2r * &ch.h_21);
    let to_d1 = -(&inv_1r * &ch.h_12);
    let vr = [
        &to_d2 * &beams.v1[0],
        &to_d1 * &beams.v2[0],
        &to_d1 * &beams.v2[1],
        &to_d2 * &beams.v1[2],
    ];
    Ok(BeamformerSet {
        r: beams.r,
        v1: beams.v1.clone(),
        v2: beams.v2.clone(),
        vr,
        lambda2: beams.lambda2.clone(),
        lambda3: beams.lambda3.clone(),
    })
}

/// Source beams followed by relay beams.
pub fn build_beams(ch: &MimoChannel, seed: RunSeed) -> Result<BeamformerSet> {
    build_relay_beams(ch, &build_source_beams(ch, seed)?)
}

/// Per-destination effective channels after neutralization.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    /// `H̄[1,1]_1, H̄[1,1]_2, H̄[1,1]_3, H̄[1,2]_3`.
    pub d1_blocks: [CMatrix; 4],
    /// `H̄[2,2]_1, H̄[2,2]_2, H̄[2,2]_3, H̄[2,1]_2`.
    pub d2_blocks: [CMatrix; 4],
    /// Largest column norm of the neutralized coefficients of `s2_1`, `s2_2`
    /// at Destination 1, relative to the direct-path column norm.
    pub residual_d1: f64,
    /// Same for `s1_1`, `s1_3` at Destination 2.
    pub residual_d2: f64,
}

impl EffectiveChannels {
    /// The `M x M` matrix a destination inverts; the first `3r` columns carry
    /// its own streams, the last `r` the surviving cross part.
    pub fn stacked(&self, dest: Destination) -> CMatrix {
        let b = match dest {
            Destination::One => &self.d1_blocks,
            Destination::Two => &self.d2_blocks,
        };
        hstack(&[&b[0], &b[1], &b[2], &b[3]])
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_d1.max(self.residual_d2)
    }
}

fn relative_residual(direct: &CMatrix, relayed: &CMatrix) -> f64 {
    let total = direct + relayed;
    total
        .column_iter()
        .zip(direct.column_iter())
        .map(|(t, d)| t.norm() / d.norm())
        .fold(0.0, f64::max)
}

/// Composite channels of both destinations and the neutralization residuals.
pub fn compute_effective_channels(ch: &MimoChannel, beams: &BeamformerSet) -> EffectiveChannels {
    let [v1_1, v1_2, v1_3] = &beams.v1;
    let [v2_1, v2_2, v2_3] = &beams.v2;
    let [vr1, vr2, vr3, vr4] = &beams.vr;
    let vr3_l2 = scale_columns(vr3, &beams.lambda2);
    let vr4_l3 = scale_columns(vr4, &beams.lambda3);

    let d1_blocks = [
        &ch.h_11 * v1_1 + &ch.h_1r * vr1,
        &ch.h_11 * v1_2 + &ch.h_1r * &vr3_l2,
        &ch.h_11 * v1_3 + &ch.h_1r * vr4,
        &ch.h_12 * v2_3 + &ch.h_1r * &vr4_l3,
    ];
    let d2_blocks = [
        &ch.h_22 * v2_1 + &ch.h_2r * vr2,
        &ch.h_22 * v2_2 + &ch.h_2r * vr3,
        &ch.h_22 * v2_3 + &ch.h_2r * &vr4_l3,
        &ch.h_21 * v1_2 + &ch.h_2r * &vr3_l2,
    ];

    let residual_d1 = relative_residual(&(&ch.h_12 * v2_1), &(&ch.h_1r * vr2))
        .max(relative_residual(&(&ch.h_12 * v2_2), &(&ch.h_1r * vr3)));
    let residual_d2 = relative_residual(&(&ch.h_21 * v1_1), &(&ch.h_2r * vr1))
        .max(relative_residual(&(&ch.h_21 * v1_3), &(&ch.h_2r * vr4)));

    EffectiveChannels {
        d1_blocks,
        d2_blocks,
        residual_d1,
        residual_d2,
    }
}

/// `[H[R,1]V[1]_1 | H[R,2]V[2]_1 | H[R,2]V[2]_2 | H[R,1]V[1]_3]`, the matrix
/// the relay inverts.
pub fn relay_stacked_matrix(ch: &MimoChannel, beams: &SourceBeams) -> CMatrix {
    hstack(&[
        &(&ch.h_r1 * &beams.v1[0]),
        &(&ch.h_r2 * &beams.v2[0]),
        &(&ch.h_r2 * &beams.v2[1]),
        &(&ch.h_r1 * &beams.v1[2]),
    ])
}

/// The `4r` quantities the relay resolves, in relay order.
pub fn relay_combinations(beams: &SourceBeams, s1: &[CVector; 3], s2: &[CVector; 3]) -> CVector {
    let r = beams.r;
    let mut z = CVector::zeros(4 * r);
    for k in 0..r {
        z[k] = s1[0][k];
        z[r + k] = s2[0][k];
        z[2 * r + k] = s1[1][k] * beams.lambda2[k] + s2[1][k];
        z[3 * r + k] = s1[2][k] + s2[2][k] * beams.lambda3[k];
    }
    z
}

/// Relay-side zero-forcing receiver.
#[derive(Debug, Clone)]
pub struct RelayReceiver {
    inverse: CMatrix,
    /// `G⁻¹ G⁻ᴴ`: covariance of the filtered noise per unit noise variance.
    pub noise_cov: CMatrix,
}

impl RelayReceiver {
    pub fn new(ch: &MimoChannel, beams: &SourceBeams) -> Result<Self> {
        let g = relay_stacked_matrix(ch, beams);
        let inverse = stacked_inverse(&g, "relay stacked matrix")?;
        let noise_cov = &inverse * inverse.adjoint();
        Ok(Self { inverse, noise_cov })
    }

    pub fn estimate(&self, y_r: &CVector) -> CVector {
        &self.inverse * y_r
    }
}

/// Output of [`relay_zero_force`].
#[derive(Debug, Clone)]
pub struct RelayEstimate {
    /// `[s1_1; s2_1; Λ2 s1_2 + s2_2; s1_3 + Λ3 s2_3]` plus filtered noise.
    pub combinations: CVector,
    /// Filtered-noise covariance per unit receiver noise variance.
    pub noise_cov: CMatrix,
}

/// Inverts the relay's stacked matrix to recover the aligned combinations.
pub fn relay_zero_force(
    y_r: &CVector,
    ch: &MimoChannel,
    beams: &SourceBeams,
) -> Result<RelayEstimate> {
    let rx = RelayReceiver::new(ch, beams)?;
    Ok(RelayEstimate {
        combinations: rx.estimate(y_r),
        noise_cov: rx.noise_cov,
    })
}

/// `G1 = H[1,1] - H[1,R](H[2,R])⁻¹H[2,1]` and its Destination-2 mirror
/// `G2 = H[2,2] - H[2,R](H[1,R])⁻¹H[1,2]`: the effective desired channel of
/// part 1 as a function of the free source beam.
pub fn diversity_channels(ch: &MimoChannel) -> Result<(CMatrix, CMatrix)> {
    let inv_1r = inverse(&ch.h_1r, "H[1,R]")?;
    let inv_2r = inverse(&ch.h_2r, "H[2,R]")?;
    let g1 = &ch.h_11 - &ch.h_1r * inv_2r * &ch.h_21;
    let g2 = &ch.h_22 - &ch.h_2r * inv_1r * &ch.h_12;
    Ok((g1, g2))
}

/// The `count` dominant right singular vectors of `g`, as columns.
pub fn dominant_right_singular_vectors(g: &CMatrix, count: usize) -> CMatrix {
    let svd = g.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut out = CMatrix::zeros(g.ncols(), count);
    for (k, &i) in order.iter().take(count).enumerate() {
        out.set_column(k, &v_t.row(i).adjoint());
    }
    out
}

/// Replaces the free part-1 beams by the gain-maximizing directions and
/// rebuilds the relay beams that depend on them.
///
/// The relayed part-1 beam is linear in the source beam, so the effective
/// gain `‖G1 v‖` over unit `v` peaks at the dominant right singular vector of
/// `G1`. With `r > 1` streams per part, stream `k` takes the `k`-th singular
/// vector so the beams stay orthonormal.
pub fn diversity_optimize_beams(ch: &MimoChannel, beams: &BeamformerSet) -> Result<BeamformerSet> {
    let (g1, g2) = diversity_channels(ch)?;
    let mut src = beams.source_beams();
    src.v1[0] = dominant_right_singular_vectors(&g1, beams.r);
    src.v2[0] = dominant_right_singular_vectors(&g2, beams.r);
    build_relay_beams(ch, &src)
}

/// Numerical certificate of one constructed beam set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// Relative residual of the two relay-side alignments.
    pub alignment_residual: f64,
    /// Relative residual of the four relay-beam defining identities.
    pub relay_beam_residual: f64,
    pub residual_d1: f64,
    pub residual_d2: f64,
    pub relay_sigma_min: f64,
    pub d1_sigma_min: f64,
    pub d2_sigma_min: f64,
}

impl Certificate {
    pub fn max_residual(&self) -> f64 {
        self.alignment_residual
            .max(self.relay_beam_residual)
            .max(self.residual_d1)
            .max(self.residual_d2)
    }

    pub fn min_sigma(&self) -> f64 {
        self.relay_sigma_min.min(self.d1_sigma_min).min(self.d2_sigma_min)
    }

    /// Name of the first violated invariant, if any.
    pub fn violation(&self) -> Option<&'static str> {
        if !(self.alignment_residual <= NEUTRALIZATION_TOL) {
            Some("relay alignment")
        } else if !(self.relay_beam_residual <= NEUTRALIZATION_TOL) {
            Some("relay beam identities")
        } else if !(self.residual_d1 <= NEUTRALIZATION_TOL) {
            Some("neutralization at destination 1")
        } else if !(self.residual_d2 <= NEUTRALIZATION_TOL) {
            Some("neutralization at destination 2")
        } else if !(self.relay_sigma_min > DECODABILITY_TOL) {
            Some("relay stacked matrix rank")
        } else if !(self.d1_sigma_min > DECODABILITY_TOL) {
            Some("destination 1 decodability")
        } else if !(self.d2_sigma_min > DECODABILITY_TOL) {
            Some("destination 2 decodability")
        } else {
            None
        }
    }
}

fn alignment_residual(ch: &MimoChannel, beams: &BeamformerSet) -> f64 {
    let a2 = &ch.h_r1 * &beams.v1[1];
    let b2 = scale_columns(&(&ch.h_r2 * &beams.v2[1]), &beams.lambda2);
    let a3 = &ch.h_r2 * &beams.v2[2];
    let b3 = scale_columns(&(&ch.h_r1 * &beams.v1[2]), &beams.lambda3);
    relative_residual(&a2, &(-b2)).max(relative_residual(&a3, &(-b3)))
}

fn relay_beam_residual(ch: &MimoChannel, beams: &BeamformerSet) -> f64 {
    [
        (&ch.h_21 * &beams.v1[0], &ch.h_2r * &beams.vr[0]),
        (&ch.h_12 * &beams.v2[0], &ch.h_1r * &beams.vr[1]),
        (&ch.h_12 * &beams.v2[1], &ch.h_1r * &beams.vr[2]),
        (&ch.h_21 * &beams.v1[2], &ch.h_2r * &beams.vr[3]),
    ]
    .iter()
    .map(|(d, r)| relative_residual(d, r))
    .fold(0.0, f64::max)
}

pub fn certify(ch: &MimoChannel, beams: &BeamformerSet) -> Certificate {
    let eff = compute_effective_channels(ch, beams);
    Certificate {
        alignment_residual: alignment_residual(ch, beams),
        relay_beam_residual: relay_beam_residual(ch, beams),
        residual_d1: eff.residual_d1,
        residual_d2: eff.residual_d2,
        relay_sigma_min: min_singular_value(&relay_stacked_matrix(ch, &beams.source_beams())),
        d1_sigma_min: min_singular_value(&eff.stacked(Destination::One)),
        d2_sigma_min: min_singular_value(&eff.stacked(Destination::Two)),
    }
}

/// Complex Gaussian symbol vectors for one source's three parts, used by tests
/// and the noise-free oracle.
pub fn random_symbols<R: Rng + ?Sized>(rng: &mut R, r: usize) -> [CVector; 3] {
    let mut draw = || CVector::from_fn(r, |_, _| crate::linalg::complex_gaussian(rng, 1.0));
    [draw(), draw(), draw()]
}
