//! Small dense complex linear-algebra helpers shared by the schemes.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{AinError, CMatrix, CVector, Result, C64};

/// Draws a circularly-symmetric complex Gaussian with total variance
/// `variance` (real and imaginary parts each `variance / 2`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    // column-major fill keeps the draw order fixed for a given shape
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, 1.0))
}

/// Isotropically distributed unit vectors, one per column.
pub fn random_unit_columns<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = complex_gaussian_matrix(rng, rows, cols);
    normalize_columns(&mut m);
    m
}

pub fn normalize_columns(m: &mut CMatrix) {
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
}

/// Singular values, largest first.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn min_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// 2-norm condition number; infinite when the matrix is exactly singular.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Inverse of a square matrix via LU. Fails when the condition number exceeds
/// [`crate::channel::MAX_CONDITION`].
pub fn inverse(m: &CMatrix, which: &'static str) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(AinError::InvalidArgument(format!(
            "{which} is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if !(condition_number(m) <= crate::channel::MAX_CONDITION) {
        return Err(AinError::SingularChannel { which });
    }
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(AinError::SingularChannel { which })?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(AinError::SingularChannel { which });
    }
    Ok(inv)
}

/// Inverse of a stacked effective matrix, reported as a rank deficiency when it fails.
pub fn stacked_inverse(m: &CMatrix, what: &'static str) -> Result<CMatrix> {
    inverse(m, what).map_err(|_| AinError::RankDeficient {
        what,
        sigma_min: min_singular_value(m),
    })
}

/// Horizontal concatenation of equally tall blocks.
pub fn hstack(blocks: &[&CMatrix]) -> CMatrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack: block heights differ");
        out.columns_mut(at, b.ncols()).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Right-multiplication by a real diagonal matrix given as its diagonal.
pub fn scale_columns(m: &CMatrix, diag: &[f64]) -> CMatrix {
    let mut out = m.clone();
    for (mut col, &d) in out.column_iter_mut().zip(diag) {
        col.scale_mut(d);
    }
    out
}

/// Column norms of a matrix.
pub fn column_norms(m: &CMatrix) -> Vec<f64> {
    m.column_iter().map(|c| c.norm()).collect()
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Squared Euclidean norm of a complex vector.
pub fn energy(v: &CVector) -> f64 {
    v.norm_squared()
}
