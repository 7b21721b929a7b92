//! Aligned interference neutralization for the two-user interference channel
//! with an instantaneous (memoryless, full-duplex) relay.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`] draws seeded channel realizations and noise;
//! * [`ain_mimo`] builds source and relay beamformers for `M` a multiple of 4
//!   and certifies the alignment and neutralization geometry;
//! * [`ain_scalar`] is the single-antenna scheme over integer constellations;
//! * [`link_sim`] pushes symbols through the network and evaluates
//!   zero-forcing rates;
//! * [`dof`] sweeps SNR grids, runs baselines and fits degrees-of-freedom
//!   slopes.

// `!(x <= tol)` is used on purpose so that NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ain_mimo;
pub mod ain_scalar;
pub mod channel;
pub mod dof;
mod error;
pub mod link_sim;
pub mod linalg;

pub use error::{AinError, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Destination node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Destination {
    One,
    Two,
}

impl Destination {
    pub const BOTH: [Destination; 2] = [Destination::One, Destination::Two];

    pub fn index(self) -> usize {
        match self {
            Destination::One => 0,
            Destination::Two => 1,
        }
    }
}
