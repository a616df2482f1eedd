//! Exactly soluble few-electron atoms with harmonic interactions.
//!
//! Two models are implemented end to end:
//!
//! * [`model3e`] — three spin-1/2 electrons on a line, confined by a common
//!   harmonic trap and coupled pairwise by a harmonic interaction (attractive
//!   or repulsive). Eigenstates separate in Jacobi coordinates; the linear
//!   entropy of the one-particle reduced density matrix is available both in
//!   closed form and from a quadrature-based numerical oracle.
//! * [`model2e`] — two electrons in a 3D harmonic trap threaded by a uniform
//!   magnetic field along z. Center-of-mass and relative motion decouple; the
//!   same closed-form/oracle pair is provided, together with the strong-field
//!   asymptotics and the single-particle confinement entropies.
//!
//! [`perturb`] treats the interaction as a perturbation on degenerate levels
//! of the non-interacting problem: it enumerates the degenerate Slater
//! determinants, builds and diagonalizes the perturbation blocks, computes
//! eigenvector entanglement in the finite orbital basis, and samples the
//! entanglement distribution of Haar-random states in a degenerate subspace.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! `libm`. Everything is pure and thread-safe: no globals, no interior
//! mutability, no I/O.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod model2e;
pub mod model3e;
pub mod perturb;
pub mod quadrature;
pub mod special;

mod math;

pub use error::Error;
pub use quadrature::QuadratureRule;

/// How an entanglement value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact closed-form expression.
    ClosedForm,
    /// Quadrature-discretized reduced-density-matrix oracle.
    Oracle,
    /// Finite orbital-basis reduced density matrix.
    FiniteRdm,
}

/// An entanglement value together with its provenance and, for numerical
/// routes, an order-doubling convergence estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub epsilon: f64,
    pub method: Method,
    /// `|epsilon(refined order) - epsilon(working order)|`; `None` for
    /// closed-form values.
    pub convergence: Option<f64>,
}

impl EntanglementResult {
    pub fn closed(epsilon: f64) -> Self {
        Self {
            epsilon,
            method: Method::ClosedForm,
            convergence: None,
        }
    }
}

/// Attractive or repulsive pair interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    Attractive,
    Repulsive,
}

impl Interaction {
    /// +1 for attractive, -1 for repulsive; the sign in front of the
    /// interaction frequency squared.
    pub fn sign(self) -> f64 {
        match self {
            Interaction::Attractive => 1.0,
            Interaction::Repulsive => -1.0,
        }
    }
}

/// Single-particle spin projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Spin projection in units of hbar.
    pub fn sz(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }
}
