//! Three electrons on a line in a common harmonic trap with pairwise
//! harmonic coupling.
//!
//! In the Jacobi frame the Hamiltonian splits into a center-of-mass mode of
//! curvature `omega^2` and two relative modes of curvature
//! `Lambda^2 = omega^2 +- 3 lambda^2`, so every eigenstate is a product of
//! three oscillator functions labelled `(n1, n2, n3)`. Antisymmetric
//! spin-1/2 eigenstates are built from the three cyclic Jacobi frames
//! combined with mixed spin triples; which combination applies is set by the
//! parity of `n3`.
//!
//! Entanglement is the linear entropy of the spin-resolved one-particle
//! reduced density matrix, `eps = 1 - 3 Tr[rho^2]`. For the ground, first
//! and second excited states it has closed forms, rational in the frequency
//! ratio `A = Lambda/omega` up to a single `sqrt(A)`; an independent
//! quadrature oracle evaluates the same quantity from the wavefunction.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::math;
use crate::quadrature::{gauss_hermite, QuadratureRule, MAX_ORDER};
use crate::special::ho_wavefunction_1d;
use crate::{EntanglementResult, Interaction, Method, Spin};

/// Critical repulsive coupling ratio `1/sqrt(3)`; bound states require
/// `tau < CRITICAL_TAU`.
pub const CRITICAL_TAU: f64 = 0.577_350_269_189_625_8;

/// Strictness margin on the repulsive domain check.
const REPULSIVE_GUARD: f64 = 1e-12;

/// Default grid order for the reduced-density-matrix oracle.
pub const DEFAULT_ORACLE_ORDER_3E: usize = 48;

/// Tolerance on the order-doubling convergence check of the oracle.
pub const ORACLE_CONVERGENCE_TOL: f64 = 1e-7;

/// Trap frequency, interaction frequency and interaction sign.
///
/// Constructed values always describe a bound model: for a repulsive
/// interaction `lambda/omega` must stay below [`CRITICAL_TAU`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams3e {
    omega: f64,
    lambda: f64,
    sign: Interaction,
}

impl ModelParams3e {
    pub fn new(omega: f64, lambda: f64, sign: Interaction) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::Domain(format!(
                "trap frequency must be positive, got {omega}"
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "interaction frequency must be non-negative, got {lambda}"
            )));
        }
        let params = ModelParams3e {
            omega,
            lambda,
            sign,
        };
        if sign == Interaction::Repulsive && params.tau() >= CRITICAL_TAU - REPULSIVE_GUARD {
            return Err(Error::Domain(format!(
                "repulsive coupling tau = {:.6} admits no bound states (tau_c = {:.6})",
                params.tau(),
                CRITICAL_TAU
            )));
        }
        Ok(params)
    }

    /// Unit trap frequency, coupling fixed through `tau = lambda/omega`.
    pub fn from_tau(tau: f64, sign: Interaction) -> Result<Self> {
        Self::new(1.0, tau, sign)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn interaction(&self) -> Interaction {
        self.sign
    }

    /// Dimensionless coupling `tau = lambda/omega`.
    pub fn tau(&self) -> f64 {
        self.lambda / self.omega
    }

    /// Relative-mode frequency ratio `A = sqrt(1 +- 3 tau^2)`.
    pub fn freq_ratio(&self) -> f64 {
        let t = self.tau();
        math::sqrt(1.0 + self.sign.sign() * 3.0 * t * t)
    }

    /// Relative-mode frequency `Lambda = omega * A`.
    pub fn rel_frequency(&self) -> f64 {
        self.omega * self.freq_ratio()
    }

    /// Center-of-mass curvature `beta_1 = omega^2`.
    pub fn beta_cm(&self) -> f64 {
        self.omega * self.omega
    }

    /// Relative-mode curvature `beta_2 = beta_3 = Lambda^2`.
    pub fn beta_rel(&self) -> f64 {
        let l = self.rel_frequency();
        l * l
    }
}

/// Total spin projection of the three-electron state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SzSector {
    PlusHalf,
    MinusHalf,
}

/// Jacobi-mode quantum numbers plus the spin sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLabel3e {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub sz: SzSector,
}

impl StateLabel3e {
    pub fn new(n1: u32, n2: u32, n3: u32, sz: SzSector) -> Self {
        StateLabel3e { n1, n2, n3, sz }
    }

    pub fn quanta(&self) -> (u32, u32, u32) {
        (self.n1, self.n2, self.n3)
    }

    /// Ground through second excited states, the set with closed-form
    /// entanglement.
    pub fn is_supported(&self) -> bool {
        SUPPORTED_STATES_3E.contains(&(self.n1, self.n2, self.n3))
    }
}

/// Quantum numbers of the states with closed-form entanglement, in energy
/// order at weak attractive coupling.
pub const SUPPORTED_STATES_3E: [(u32, u32, u32); 8] = [
    (0, 1, 0),
    (1, 1, 0),
    (0, 1, 1),
    (2, 1, 0),
    (1, 1, 1),
    (0, 1, 2),
    (0, 2, 1),
    (0, 0, 3),
];

/// The three cyclic Jacobi frames. All share the center-of-mass mode; the
/// primed and double-primed relative modes are cyclic relabelings of the
/// particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Plain,
    Primed,
    DoublePrimed,
}

pub const FRAMES: [Frame; 3] = [Frame::Plain, Frame::Primed, Frame::DoublePrimed];

/// Jacobi coordinates `(R1, R2, R3)` of the requested frame.
pub fn jacobi_coordinates(x1: f64, x2: f64, x3: f64, frame: Frame) -> [f64; 3] {
    let s3 = math::sqrt(3.0);
    let s6 = math::sqrt(6.0);
    let s2 = math::sqrt(2.0);
    let r1 = (x1 + x2 + x3) / s3;
    match frame {
        Frame::Plain => [r1, (-2.0 * x1 + x2 + x3) / s6, (x2 - x3) / s2],
        Frame::Primed => [r1, (x1 - 2.0 * x2 + x3) / s6, (x3 - x1) / s2],
        Frame::DoublePrimed => [r1, (x1 + x2 - 2.0 * x3) / s6, (x1 - x2) / s2],
    }
}

/// Eigenenergy `E = omega (n1 + 1/2) + Lambda (n2 + n3 + 1)` in atomic units.
pub fn energy_3e(state: &StateLabel3e, params: &ModelParams3e) -> f64 {
    params.omega * (state.n1 as f64 + 0.5)
        + params.rel_frequency() * (state.n2 as f64 + state.n3 as f64 + 1.0)
}

// ---------------------------------------------------------------------------
// Closed-form entanglement
// ---------------------------------------------------------------------------

/// One closed form: `eps = 1 - sqrt(A) P(A) / (divisor * ((2+A)(1+2A))^{k/2})`
/// with `P` the tabulated palindromic polynomial and `k = half_power`.
struct ClosedForm3e {
    quanta: (u32, u32, u32),
    divisor: f64,
    half_power: i32,
    coeffs: &'static [f64],
    /// Exact decoupled-limit value, returned verbatim at `tau == 0`.
    at_zero: f64,
}

static CLOSED_FORMS_3E: [ClosedForm3e; 8] = [
    ClosedForm3e {
        quanta: (0, 1, 0),
        divisor: 4.0,
        half_power: 5,
        coeffs: &[59.0, 232.0, 390.0, 232.0, 59.0],
        at_zero: 0.0,
    },
    ClosedForm3e {
        quanta: (1, 1, 0),
        divisor: 4.0,
        half_power: 9,
        coeffs: &[
            177.0, 1034.0, 6213.0, 12582.0, 15392.0, 12582.0, 6213.0, 1034.0, 177.0,
        ],
        at_zero: 8.0 / 27.0,
    },
    ClosedForm3e {
        quanta: (0, 1, 1),
        divisor: 64.0,
        half_power: 9,
        coeffs: &[
            3057.0, 24608.0, 93180.0, 196704.0, 251366.0, 196704.0, 93180.0, 24608.0, 3057.0,
        ],
        at_zero: 8.0 / 27.0,
    },
    ClosedForm3e {
        quanta: (2, 1, 0),
        divisor: 16.0,
        half_power: 13,
        coeffs: &[
            2419.0, 19480.0, 218138.0, 564200.0, 1466241.0, 2943840.0, 3743124.0, 2943840.0,
            1466241.0, 564200.0, 218138.0, 19480.0, 2419.0,
        ],
        at_zero: 4.0 / 9.0,
    },
    ClosedForm3e {
        quanta: (1, 1, 1),
        divisor: 64.0,
        half_power: 13,
        coeffs: &[
            9171.0, 80546.0, 700555.0, 2659770.0, 6668841.0, 11416740.0, 13615794.0, 11416740.0,
            6668841.0, 2659770.0, 700555.0, 80546.0, 9171.0,
        ],
        at_zero: 4.0 / 9.0,
    },
    ClosedForm3e {
        quanta: (0, 1, 2),
        divisor: 256.0,
        half_power: 13,
        coeffs: &[
            42739.0, 506008.0, 3123242.0, 11179160.0, 26922957.0, 44982480.0, 53234988.0,
            44982480.0, 26922957.0, 11179160.0, 3123242.0, 506008.0, 42739.0,
        ],
        at_zero: 4.0 / 9.0,
    },
    ClosedForm3e {
        quanta: (0, 2, 1),
        divisor: 4096.0,
        half_power: 13,
        coeffs: &[
            727363.0,
            8982520.0,
            54219206.0,
            196856600.0,
            469858317.0,
            776694000.0,
            915625428.0,
            776694000.0,
            469858317.0,
            196856600.0,
            54219206.0,
            8982520.0,
            727363.0,
        ],
        at_zero: 43.0 / 108.0,
    },
    ClosedForm3e {
        quanta: (0, 0, 3),
        divisor: 4096.0,
        half_power: 13,
        coeffs: &[
            762395.0,
            9419160.0,
            61156086.0,
            232139320.0,
            576896949.0,
            982782000.0,
            1171448436.0,
            982782000.0,
            576896949.0,
            232139320.0,
            61156086.0,
            9419160.0,
            762395.0,
        ],
        at_zero: 1.0 / 4.0,
    },
];

fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Closed-form linear-entropy entanglement of a supported state.
///
/// Depends on the parameters only through `tau` (equivalently through the
/// frequency ratio `A`). The decoupled limit is returned as an exact
/// rational rather than evaluated from the formula.
pub fn epsilon_closed_3e(state: &StateLabel3e, params: &ModelParams3e) -> Result<f64> {
    let form = CLOSED_FORMS_3E
        .iter()
        .find(|f| f.quanta == state.quanta())
        .ok_or_else(|| {
            Error::UnsupportedState(format!(
                "no closed form for |{}{}{}> (supported: ground through second excited)",
                state.n1, state.n2, state.n3
            ))
        })?;
    if params.tau() == 0.0 {
        return Ok(form.at_zero);
    }
    let a = params.freq_ratio();
    let g = (2.0 + a) * (1.0 + 2.0 * a);
    let p = horner(form.coeffs, a);
    Ok(1.0 - math::sqrt(a) * p / (form.divisor * math::pow_half_odd(g, form.half_power)))
}

// ---------------------------------------------------------------------------
// Spin-resolved eigenstates
// ---------------------------------------------------------------------------

/// One term of a spin-resolved state: a Jacobi-frame product wavefunction
/// attached to a definite spin triple, with its (normalization-included)
/// coefficient.
#[derive(Debug, Clone, Copy)]
pub struct Component3e {
    pub frame: Frame,
    pub spins: [Spin; 3],
    pub coeff: f64,
}

/// A fully antisymmetric three-electron eigenstate as an explicit sum of
/// frame wavefunctions times spin triples.
#[derive(Debug, Clone)]
pub struct SpinResolvedState3e {
    pub label: StateLabel3e,
    pub params: ModelParams3e,
    pub components: Vec<Component3e>,
    /// Global normalization constant that has been folded into the
    /// component coefficients.
    pub normalization: f64,
}

impl SpinResolvedState3e {
    /// Coordinate wavefunction of one Jacobi frame at a spatial point.
    pub fn frame_value(&self, frame: Frame, x: [f64; 3]) -> f64 {
        frame_wavefunction(&self.label, &self.params, frame, x)
    }

    /// Full wavefunction value at given positions and spins.
    pub fn evaluate(&self, x: [f64; 3], spins: [Spin; 3]) -> f64 {
        let mut acc = 0.0;
        for c in &self.components {
            if c.spins == spins {
                acc += c.coeff * self.frame_value(c.frame, x);
            }
        }
        acc
    }
}

fn frame_wavefunction(
    label: &StateLabel3e,
    params: &ModelParams3e,
    frame: Frame,
    x: [f64; 3],
) -> f64 {
    let r = jacobi_coordinates(x[0], x[1], x[2], frame);
    // Quanta <= 3 stay far below the degree cap; unwrap is safe.
    ho_wavefunction_1d(label.n1, params.beta_cm(), r[0]).unwrap()
        * ho_wavefunction_1d(label.n2, params.beta_rel(), r[1]).unwrap()
        * ho_wavefunction_1d(label.n3, params.beta_rel(), r[2]).unwrap()
}

fn spin_triple(sz: SzSector, base: [Spin; 3]) -> [Spin; 3] {
    match sz {
        SzSector::PlusHalf => base,
        SzSector::MinusHalf => [base[0].flipped(), base[1].flipped(), base[2].flipped()],
    }
}

/// Unnormalized component list for the antisymmetric combination matching
/// the parity of `n3`.
fn raw_components(label: &StateLabel3e) -> Vec<(Frame, [Spin; 3], f64)> {
    use Frame::*;
    use Spin::*;
    let t1 = spin_triple(label.sz, [Up, Up, Down]);
    let t2 = spin_triple(label.sz, [Up, Down, Up]);
    let t3 = spin_triple(label.sz, [Down, Up, Up]);
    if label.n3 % 2 == 0 {
        // (phi - phi') |t1> + (phi'' - phi) |t2> + (phi' - phi'') |t3>
        alloc::vec![
            (Plain, t1, 1.0),
            (Primed, t1, -1.0),
            (DoublePrimed, t2, 1.0),
            (Plain, t2, -1.0),
            (Primed, t3, 1.0),
            (DoublePrimed, t3, -1.0),
        ]
    } else {
        // phi'' |t1> + phi' |t2> + phi |t3>
        alloc::vec![(DoublePrimed, t1, 1.0), (Primed, t2, 1.0), (Plain, t3, 1.0)]
    }
}

/// Grid dilation for the oracle and the overlap integrals: the inverse
/// square root of the smallest effective frequency, so the quadrature
/// envelope dominates every integrand envelope.
fn grid_scale(params: &ModelParams3e) -> f64 {
    1.0 / math::sqrt(math::min(params.omega, params.rel_frequency()))
}

/// Overlap Gram matrix of the three frame wavefunctions under a tensor
/// quadrature rule. The frames are not mutually orthogonal in general.
pub fn frame_gram(label: &StateLabel3e, params: &ModelParams3e, rule: &QuadratureRule) -> Mat {
    let n = rule.order();
    let mut values = [Vec::new(), Vec::new(), Vec::new()];
    for (fi, &frame) in FRAMES.iter().enumerate() {
        let mut v = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    v.push(frame_wavefunction(
                        label,
                        params,
                        frame,
                        [rule.point(i), rule.point(j), rule.point(k)],
                    ));
                }
            }
        }
        values[fi] = v;
    }
    let mut gram = Mat::zeros(3, 3);
    for a in 0..3 {
        for b in a..3 {
            let mut acc = 0.0;
            let mut idx = 0;
            for i in 0..n {
                for j in 0..n {
                    let wij = rule.weights()[i] * rule.weights()[j];
                    for k in 0..n {
                        acc += wij * rule.weights()[k] * values[a][idx] * values[b][idx];
                        idx += 1;
                    }
                }
            }
            gram[(a, b)] = acc;
            gram[(b, a)] = acc;
        }
    }
    gram
}

/// Builds the normalized antisymmetric eigenstate for a supported label.
///
/// The normalization constant is obtained numerically from the Gram matrix
/// of the three frame wavefunctions.
pub fn build_state_3e(state: &StateLabel3e, params: &ModelParams3e) -> Result<SpinResolvedState3e> {
    if !state.is_supported() {
        return Err(Error::UnsupportedState(format!(
            "state |{}{}{}> is outside the constructible set",
            state.n1, state.n2, state.n3
        )));
    }
    let raw = raw_components(state);
    let rule = gauss_hermite(32, grid_scale(params))?;
    let gram = frame_gram(state, params, &rule);
    let frame_idx = |f: Frame| match f {
        Frame::Plain => 0usize,
        Frame::Primed => 1,
        Frame::DoublePrimed => 2,
    };
    // norm^2 = sum over spin triples of the squared norm of that triple's
    // coordinate part, expanded through the Gram matrix.
    let mut norm_sq = 0.0;
    for &(fa, ta, ca) in &raw {
        for &(fb, tb, cb) in &raw {
            if ta == tb {
                norm_sq += ca * cb * gram[(frame_idx(fa), frame_idx(fb))];
            }
        }
    }
    if norm_sq.is_nan() || norm_sq <= 1e-12 {
        return Err(Error::UnsupportedState(format!(
            "combination for |{}{}{}> collapses to the zero state",
            state.n1, state.n2, state.n3
        )));
    }
    let normalization = 1.0 / math::sqrt(norm_sq);
    let components = raw
        .into_iter()
        .map(|(frame, spins, c)| Component3e {
            frame,
            spins,
            coeff: c * normalization,
        })
        .collect();
    Ok(SpinResolvedState3e {
        label: *state,
        params: *params,
        components,
        normalization,
    })
}

// ---------------------------------------------------------------------------
// Reduced-density-matrix oracle
// ---------------------------------------------------------------------------

/// Quadrature rule sized and dilated for the this model's oracle.
pub fn oracle_rule_3e(params: &ModelParams3e, order: usize) -> Result<QuadratureRule> {
    gauss_hermite(order, grid_scale(params))
}

fn spin_index(s: Spin) -> usize {
    match s {
        Spin::Up => 0,
        Spin::Down => 1,
    }
}

/// Spin-resolved one-particle reduced density matrix on the quadrature grid.
///
/// Row/column index is `(spin, grid point)`; quadrature weights are folded
/// in symmetrically, so the matrix is the discretization of
/// `rho(x sigma; x' sigma')` with `Tr rho ~= 1` and exact symmetry and
/// positive semidefiniteness by construction.
pub fn rdm_3e(state: &SpinResolvedState3e, rule: &QuadratureRule) -> Mat {
    let n = rule.order();
    // Frame wavefunctions tabulated once on the grid cube.
    let mut frame_vals: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (fi, &frame) in FRAMES.iter().enumerate() {
        let mut v = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    v.push(state.frame_value(frame, [rule.point(i), rule.point(j), rule.point(k)]));
                }
            }
        }
        frame_vals[fi] = v;
    }
    let sqrt_w: Vec<f64> = (0..n).map(|i| math::sqrt(rule.weights()[i])).collect();

    // U[(s1, i1), (s2 s3, i2 i3)] = Psi(x1 s1, x2 s2, x3 s3) sqrt(w1 w2 w3);
    // the reduced matrix is U U^T.
    let mut u = Mat::zeros(2 * n, 4 * n * n);
    for c in &state.components {
        let fi = match c.frame {
            Frame::Plain => 0usize,
            Frame::Primed => 1,
            Frame::DoublePrimed => 2,
        };
        let vals = &frame_vals[fi];
        let s1 = spin_index(c.spins[0]);
        let pair = spin_index(c.spins[1]) * 2 + spin_index(c.spins[2]);
        for i in 0..n {
            let row = u.row_mut(s1 * n + i);
            let wi = sqrt_w[i];
            for j in 0..n {
                let wij = wi * sqrt_w[j];
                let base = pair * n * n + j * n;
                let vbase = (i * n + j) * n;
                for k in 0..n {
                    row[base + k] += c.coeff * wij * sqrt_w[k] * vals[vbase + k];
                }
            }
        }
    }
    u.gram()
}

fn oracle_epsilon_once(state: &SpinResolvedState3e, rule: &QuadratureRule) -> f64 {
    let rho = rdm_3e(state, rule);
    let tr = rho.trace();
    let tr_sq = rho.frobenius_norm_sq();
    1.0 - 3.0 * tr_sq / (tr * tr)
}

/// Numerical entanglement of a supported state from the discretized reduced
/// density matrix, with an order-doubling convergence estimate.
///
/// The value is recomputed on a doubled grid (clamped to the maximum rule
/// order); if the two results differ by more than [`ORACLE_CONVERGENCE_TOL`]
/// both are reported as an error.
pub fn epsilon_oracle_3e(
    state: &StateLabel3e,
    params: &ModelParams3e,
    rule: &QuadratureRule,
) -> Result<EntanglementResult> {
    let built = build_state_3e(state, params)?;
    oracle_epsilon_state(&built, rule)
}

/// Oracle entry point for an already-built (possibly mixed) state.
pub fn oracle_epsilon_state(
    state: &SpinResolvedState3e,
    rule: &QuadratureRule,
) -> Result<EntanglementResult> {
    let primary = oracle_epsilon_once(state, rule);
    let refined_order = (2 * rule.order()).min(MAX_ORDER);
    if refined_order == rule.order() {
        return Ok(EntanglementResult {
            epsilon: primary,
            method: Method::Oracle,
            convergence: None,
        });
    }
    let refined_rule = gauss_hermite(refined_order, rule.scale())?;
    let refined = oracle_epsilon_once(state, &refined_rule);
    let convergence = math::abs(refined - primary);
    if convergence > ORACLE_CONVERGENCE_TOL {
        return Err(Error::NotConverged { primary, refined });
    }
    Ok(EntanglementResult {
        epsilon: refined,
        method: Method::Oracle,
        convergence: Some(convergence),
    })
}

/// Entanglement of `cos(theta) |state>_+ + sin(theta) |state>_-`, the mixing
/// of the two spin sectors of a degenerate pair, evaluated by the oracle.
///
/// Supported for the first excited states `|011>` and `|110>`; the result is
/// independent of `theta`.
pub fn epsilon_theta_mixture_3e(
    state: &StateLabel3e,
    theta: f64,
    params: &ModelParams3e,
    rule: &QuadratureRule,
) -> Result<f64> {
    if !matches!(state.quanta(), (0, 1, 1) | (1, 1, 0)) {
        return Err(Error::UnsupportedState(format!(
            "spin-sector mixing is defined for |011> and |110>, got |{}{}{}>",
            state.n1, state.n2, state.n3
        )));
    }
    let plus = build_state_3e(
        &StateLabel3e {
            sz: SzSector::PlusHalf,
            ..*state
        },
        params,
    )?;
    let minus = build_state_3e(
        &StateLabel3e {
            sz: SzSector::MinusHalf,
            ..*state
        },
        params,
    )?;
    let (c, s) = (math::cos(theta), math::sin(theta));
    let mut components = Vec::new();
    for comp in &plus.components {
        components.push(Component3e {
            coeff: c * comp.coeff,
            ..*comp
        });
    }
    for comp in &minus.components {
        components.push(Component3e {
            coeff: s * comp.coeff,
            ..*comp
        });
    }
    let mixed = SpinResolvedState3e {
        label: *state,
        params: *params,
        components,
        normalization: 1.0,
    };
    Ok(oracle_epsilon_state(&mixed, rule)?.epsilon)
}
