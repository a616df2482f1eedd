//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An integer argument exceeded its supported range.
    Range {
        what: &'static str,
        max: u32,
        got: u32,
    },
    /// Parameters outside the model's admissible domain (unbound repulsive
    /// coupling, negative frequency, out-of-range probability, ...).
    Domain(String),
    /// The requested state is outside the supported set of the operation.
    UnsupportedState(String),
    /// Order-doubled recomputation moved the result by more than the
    /// tolerance; both values are reported.
    NotConverged { primary: f64, refined: f64 },
    /// Two basis determinants handed to a degenerate-block builder do not
    /// share the unperturbed energy.
    DegeneracyViolation {
        index_a: usize,
        index_b: usize,
        energy_a: f64,
        energy_b: f64,
    },
    /// A coefficient vector is not normalized.
    NotNormalized { norm_sq: f64 },
    /// Fewer single-particle states than particles.
    PauliBound { particles: usize, orbitals: usize },
    /// The quadrature node solver failed to converge.
    NodeSolver { order: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Range { what, max, got } => {
                write!(f, "{what} = {got} exceeds supported maximum {max}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnsupportedState(msg) => write!(f, "unsupported state: {msg}"),
            Error::NotConverged { primary, refined } => write!(
                f,
                "oracle did not converge: working order gave {primary:.12e}, \
                 refined order gave {refined:.12e}"
            ),
            Error::DegeneracyViolation {
                index_a,
                index_b,
                energy_a,
                energy_b,
            } => write!(
                f,
                "basis determinants {index_a} and {index_b} are not degenerate: \
                 E = {energy_a:.12} vs {energy_b:.12}"
            ),
            Error::NotNormalized { norm_sq } => {
                write!(
                    f,
                    "coefficient vector has squared norm {norm_sq:.12}, expected 1"
                )
            }
            Error::PauliBound {
                particles,
                orbitals,
            } => write!(
                f,
                "{orbitals} distinct orbitals cannot host {particles} fermions"
            ),
            Error::NodeSolver { order } => {
                write!(
                    f,
                    "quadrature node iteration failed to converge at order {order}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
