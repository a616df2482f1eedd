//! Gauss-Hermite quadrature with a per-rule grid dilation.
//!
//! Nodes are the roots of the order-n Hermite polynomial, found by Newton
//! iteration on the orthonormal three-term recurrence with the classical
//! asymptotic initial guesses; weights are Christoffel numbers. The stored
//! weights are "flattened": the Gaussian weight function and the dilation
//! Jacobian are folded in, so that
//!
//! `sum_i weights[i] * f(scale * nodes[i])  ~=  integral of f over R`
//!
//! whenever `f` is a polynomial times a Gaussian envelope at least as narrow
//! as `exp(-(x/scale)^2)`. The raw Gauss-Hermite rule (exact for polynomials
//! of degree `2 order - 1` against `exp(-x^2)`) is recoverable through
//! [`QuadratureRule::raw_weight`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 128;

/// Immutable Gauss-Hermite rule; see the module docs for the weight
/// convention. Safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    /// Raw Hermite roots, strictly increasing, symmetric about zero.
    nodes: Vec<f64>,
    /// Flattened weights including the dilation Jacobian; all positive.
    weights: Vec<f64>,
    /// Grid dilation: evaluation points are `scale * node`.
    scale: f64,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// i-th evaluation abscissa, `scale * nodes[i]`.
    pub fn point(&self, i: usize) -> f64 {
        self.scale * self.nodes[i]
    }

    /// Weight of the plain Gauss-Hermite rule (against `exp(-x^2)`).
    pub fn raw_weight(&self, i: usize) -> f64 {
        self.weights[i] / self.scale * math::exp(-self.nodes[i] * self.nodes[i])
    }

    /// Approximates the integral of `f` over the real line.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.order {
            acc += self.weights[i] * f(self.scale * self.nodes[i]);
        }
        acc
    }

    /// Same rule with a different dilation.
    pub fn with_scale(&self, scale: f64) -> QuadratureRule {
        let ratio = scale / self.scale;
        QuadratureRule {
            order: self.order,
            nodes: self.nodes.clone(),
            weights: self.weights.iter().map(|w| w * ratio).collect(),
            scale,
        }
    }
}

/// Orthonormal Hermite value `p_n(x)` and the value one degree down, for
/// Newton steps: `p_n'(x) = sqrt(2n) p_{n-1}(x)`.
fn orthonormal_hermite_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = libm::pow(core::f64::consts::PI, -0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * math::sqrt(2.0 / (kf + 1.0)) * cur - math::sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Christoffel number `1 / sum_{k<n} p_k(x)^2`.
fn christoffel_weight(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = libm::pow(core::f64::consts::PI, -0.25);
    let mut sum_sq = cur * cur;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = x * math::sqrt(2.0 / (kf + 1.0)) * cur - math::sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
        sum_sq += cur * cur;
    }
    1.0 / sum_sq
}

/// Builds the Gauss-Hermite rule of the given order and dilation.
///
/// Orders 2 through 128 are supported; the node iteration is converged to a
/// step tolerance of 1e-14 (relative to the node magnitude).
pub fn gauss_hermite(order: usize, scale: f64) -> Result<QuadratureRule> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::Range {
            what: "quadrature order",
            max: MAX_ORDER as u32,
            got: order as u32,
        });
    }
    debug_assert!(scale > 0.0, "grid dilation must be positive");

    let n = order;
    let n_half = n.div_ceil(2);
    // Non-negative roots, found from the largest downward.
    let mut upper = Vec::with_capacity(n_half);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n_half {
        // Classical initial guesses for Hermite roots.
        z = match i {
            0 => {
                let t = 2.0 * nf + 1.0;
                math::sqrt(t) - 1.85575 * libm::pow(t, -1.0 / 6.0)
            }
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * upper[0],
            3 => 1.91 * z - 0.91 * upper[1],
            _ => 2.0 * z - upper[i - 2],
        };
        if n % 2 == 1 && i == n_half - 1 {
            // The middle root of an odd-order rule is exactly zero.
            z = 0.0;
        } else {
            let mut converged = false;
            for _ in 0..100 {
                let (p, p_down) = orthonormal_hermite_pair(n, z);
                let dp = math::sqrt(2.0 * nf) * p_down;
                let step = p / dp;
                z -= step;
                if math::abs(step) <= 1e-14 * (1.0 + math::abs(z)) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NodeSolver { order });
            }
        }
        upper.push(z);
    }

    // Ascending assembly: `upper` holds the non-negative roots from largest
    // down, so the left half is `-upper[i]` and the right half mirrors it.
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let node = if i < n / 2 {
            -upper[i]
        } else {
            upper[n - 1 - i]
        };
        nodes.push(node);
        let raw = christoffel_weight(n, node);
        weights.push(scale * raw * math::exp(node * node));
    }

    // Construction sanity: strictly increasing, exactly symmetric.
    for i in 1..n {
        debug_assert!(nodes[i] > nodes[i - 1]);
    }
    for i in 0..n {
        debug_assert!(nodes[i] == -nodes[n - 1 - i]);
        debug_assert!(weights[i] > 0.0);
    }

    Ok(QuadratureRule {
        order: n,
        nodes,
        weights,
        scale,
    })
}
