//! Two electrons in a 3D harmonic trap with a uniform magnetic field along z
//! and a harmonic pair interaction.
//!
//! In center-of-mass/relative coordinates the Hamiltonian separates into four
//! independent sectors: two 2D oscillators in the xy plane (frequencies
//! `omega sqrt(1 + sigma^2)` and `omega sqrt(1 + sigma^2 +- tau^2)`, each with
//! a Larmor term that only shifts energies of `m != 0` states) and two 1D
//! oscillators along z (frequencies `omega` and `omega sqrt(1 +- tau^2)`).
//! Here `tau = lambda/omega` fixes the interaction and `sigma = b/omega` the
//! field (`b` is half the cyclotron frequency in atomic units).
//!
//! The wavefunctions of the studied states factor into an xy part and a z
//! part in the particle coordinates, so the coordinate purity factorizes as
//! `Tr[rho_c^2] = T_xy * T_z`; with the spin factor this gives
//! `eps = 1 - 2 Tr[rho_c^2] Tr[rho_s^2]`. Every sector purity reduces to two
//! ingredients:
//!
//! * ground 1D sector with mode frequencies `(p, q)`:
//!   `P1(p, q) = 2 sqrt(pq) / (p + q)`;
//! * the xy sector with one radial quantum,
//!   `T_xy = P1(w, v)^2 (1 + xi^2) / 4`, `xi = ((w - v)/(w + v))^2`;
//! * a z sector with one quantum on either mode,
//!   `T_z = sqrt(u) (3u^2 + 2u + 3) / (2 (1 + u)^3)`, invariant under
//!   `u -> 1/u` (so exciting the center of mass or the relative mode gives
//!   the same entanglement).
//!
//! The strong-field limits follow by `w, v -> infinity` at fixed ratio:
//! `P1(w, v) -> 1`, leaving only the z-sector factors.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::math;
use crate::quadrature::{gauss_hermite, QuadratureRule, MAX_ORDER};
use crate::special::{ho_wavefunction_1d, radial_2d};
use crate::{EntanglementResult, Interaction, Method};

/// Default z-grid order for the oracle; the xy grid uses half of it.
pub const DEFAULT_ORACLE_ORDER_2E: usize = 32;

/// Tolerance on the order-doubling convergence check of the oracle.
pub const ORACLE_CONVERGENCE_TOL: f64 = 1e-7;

const REPULSIVE_GUARD: f64 = 1e-12;

/// Trap frequency, interaction frequency, magnetic parameter `b = B/(2c)`
/// and interaction sign. Repulsive coupling requires `lambda < omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams2e {
    omega: f64,
    lambda: f64,
    b: f64,
    sign: Interaction,
}

impl ModelParams2e {
    pub fn new(omega: f64, lambda: f64, b: f64, sign: Interaction) -> Result<Self> {
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
        if !b.is_finite() || b < 0.0 {
            return Err(Error::Domain(format!(
                "magnetic parameter must be non-negative, got {b}"
            )));
        }
        let params = ModelParams2e {
            omega,
            lambda,
            b,
            sign,
        };
        if sign == Interaction::Repulsive && params.tau() >= 1.0 - REPULSIVE_GUARD {
            return Err(Error::Domain(format!(
                "repulsive coupling tau = {:.6} admits no bound states (tau_c = 1)",
                params.tau()
            )));
        }
        Ok(params)
    }

    /// Unit trap frequency, dimensionless coupling and field.
    pub fn from_tau_sigma(tau: f64, sigma: f64, sign: Interaction) -> Result<Self> {
        Self::new(1.0, tau, sigma, sign)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn interaction(&self) -> Interaction {
        self.sign
    }

    pub fn tau(&self) -> f64 {
        self.lambda / self.omega
    }

    pub fn sigma(&self) -> f64 {
        self.b / self.omega
    }

    /// Relative z frequency over omega: `u = sqrt(1 +- tau^2)`.
    pub fn z_rel_ratio(&self) -> f64 {
        let t = self.tau();
        math::sqrt(1.0 + self.sign.sign() * t * t)
    }

    /// Center-of-mass xy frequency over omega: `w = sqrt(1 + sigma^2)`.
    pub fn xy_cm_ratio(&self) -> f64 {
        let s = self.sigma();
        math::sqrt(1.0 + s * s)
    }

    /// Relative xy frequency over omega: `v = sqrt(1 + sigma^2 +- tau^2)`.
    pub fn xy_rel_ratio(&self) -> f64 {
        let s = self.sigma();
        let t = self.tau();
        math::sqrt(1.0 + s * s + self.sign.sign() * t * t)
    }

    /// Energy factor of the center-of-mass xy sector,
    /// `y_R = sqrt(1 + sigma^2) + sigma`.
    pub fn y_cm(&self) -> f64 {
        self.xy_cm_ratio() + self.sigma()
    }

    /// Energy factor of the relative xy sector,
    /// `y_r = sqrt(1 + b^2/(omega^2 +- lambda^2)) + b/sqrt(omega^2 +- lambda^2)`.
    pub fn y_rel(&self) -> f64 {
        let sr = self.sigma() / self.z_rel_ratio();
        math::sqrt(1.0 + sr * sr) + sr
    }
}

/// Spin pairing of the two electrons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinConfig {
    /// Opposite projections; spin purity 1/2.
    Antiparallel,
    /// Aligned spins; spin purity 1, requires an antisymmetric coordinate
    /// part.
    Parallel,
}

impl SpinConfig {
    /// 1 for antiparallel, 2 for parallel: the factor multiplying the
    /// subtracted term of the entanglement.
    pub fn alpha(self) -> f64 {
        match self {
            SpinConfig::Antiparallel => 1.0,
            SpinConfig::Parallel => 2.0,
        }
    }

    /// `Tr[rho_s^2]` of the one-particle spin reduction.
    pub fn spin_purity(self) -> f64 {
        match self {
            SpinConfig::Antiparallel => 0.5,
            SpinConfig::Parallel => 1.0,
        }
    }
}

/// Quantum numbers `(nu, m, n)` for the center-of-mass and relative sectors
/// plus the spin pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLabel2e {
    nu_cm: u32,
    m_cm: i32,
    n_cm: u32,
    nu_rel: u32,
    m_rel: i32,
    n_rel: u32,
    spin: SpinConfig,
}

/// Which of the closed-form states a label denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind2e {
    Ground,
    NuExcited,
    NExcited,
}

impl StateLabel2e {
    /// Validates the spin-statistics constraint: swapping the particles maps
    /// `r -> -r`, so the coordinate part has exchange parity
    /// `(-1)^(|m_rel| + n_rel)` and parallel spins require it to be odd.
    pub fn new(
        nu_cm: u32,
        m_cm: i32,
        n_cm: u32,
        nu_rel: u32,
        m_rel: i32,
        n_rel: u32,
        spin: SpinConfig,
    ) -> Result<Self> {
        let parity_odd = (m_rel.unsigned_abs() + n_rel) % 2 == 1;
        if spin == SpinConfig::Parallel && !parity_odd {
            return Err(Error::Domain(format!(
                "parallel spins need an antisymmetric coordinate part, but \
                 |m_rel| + n_rel = {} is even",
                m_rel.unsigned_abs() + n_rel
            )));
        }
        Ok(StateLabel2e {
            nu_cm,
            m_cm,
            n_cm,
            nu_rel,
            m_rel,
            n_rel,
            spin,
        })
    }

    pub fn ground(spin: SpinConfig) -> Result<Self> {
        Self::new(0, 0, 0, 0, 0, 0, spin)
    }

    pub fn cm(&self) -> (u32, i32, u32) {
        (self.nu_cm, self.m_cm, self.n_cm)
    }

    pub fn rel(&self) -> (u32, i32, u32) {
        (self.nu_rel, self.m_rel, self.n_rel)
    }

    pub fn spin(&self) -> SpinConfig {
        self.spin
    }

    fn epsilon_kind(&self) -> Option<Kind2e> {
        match (self.cm(), self.rel()) {
            ((0, 0, 0), (0, 0, 0)) => Some(Kind2e::Ground),
            ((1, 0, 0), (0, 0, 0)) | ((0, 0, 0), (1, 0, 0)) => Some(Kind2e::NuExcited),
            ((0, 0, 1), (0, 0, 0)) | ((0, 0, 0), (0, 0, 1)) => Some(Kind2e::NExcited),
            _ => None,
        }
    }

    /// True for the five states with closed-form entanglement.
    pub fn is_supported(&self) -> bool {
        self.epsilon_kind().is_some()
    }
}

// ---------------------------------------------------------------------------
// Energies
// ---------------------------------------------------------------------------

/// Dimensionless single-sector energy
/// `E'(y) = y/2 (2 nu + |m| + m + 1) + 1/(2y) (2 nu + |m| - m + 1) + n + 1/2`.
fn sector_energy(nu: u32, m: i32, n: u32, y: f64) -> f64 {
    let nu = nu as f64;
    let abs_m = m.unsigned_abs() as f64;
    let m = m as f64;
    0.5 * y * (2.0 * nu + abs_m + m + 1.0) + 0.5 / y * (2.0 * nu + abs_m - m + 1.0) + n as f64 + 0.5
}

/// Total energy `E = omega E'_cm(y_R) + sqrt(omega^2 +- lambda^2) E'_rel(y_r)`
/// in atomic units.
pub fn energy_2e(state: &StateLabel2e, params: &ModelParams2e) -> f64 {
    let (nu_cm, m_cm, n_cm) = state.cm();
    let (nu_rel, m_rel, n_rel) = state.rel();
    params.omega() * sector_energy(nu_cm, m_cm, n_cm, params.y_cm())
        + params.omega()
            * params.z_rel_ratio()
            * sector_energy(nu_rel, m_rel, n_rel, params.y_rel())
}

// ---------------------------------------------------------------------------
// Closed forms and strong-field asymptotics
// ---------------------------------------------------------------------------

/// Purity of a ground 1D sector with mode frequencies `p` and `q`.
fn p1(p: f64, q: f64) -> f64 {
    2.0 * math::sqrt(p * q) / (p + q)
}

/// Purity of the xy sector with one radial quantum on either mode.
fn t_xy_excited(w: f64, v: f64) -> f64 {
    let xi = ((w - v) / (w + v)) * ((w - v) / (w + v));
    let p = p1(w, v);
    p * p * (1.0 + xi * xi) / 4.0
}

/// Purity of the z sector with one quantum on either mode (`u` is the ratio
/// of the two mode frequencies; the expression is invariant under
/// `u -> 1/u`).
fn t_z_excited(u: f64) -> f64 {
    math::sqrt(u) * (3.0 * u * u + 2.0 * u + 3.0) / (2.0 * (1.0 + u) * (1.0 + u) * (1.0 + u))
}

fn ensure_supported(state: &StateLabel2e) -> Result<Kind2e> {
    state.epsilon_kind().ok_or_else(|| {
        Error::UnsupportedState(format!(
            "no closed form for cm {:?}, rel {:?}",
            state.cm(),
            state.rel()
        ))
    })
}

/// Closed-form linear-entropy entanglement of a supported state,
/// `eps = 1 - 2 Tr[rho_c^2] Tr[rho_s^2]`.
///
/// The decoupled limit `tau = 0` is returned exactly; it is independent of
/// the magnetic field.
pub fn epsilon_closed_2e(state: &StateLabel2e, params: &ModelParams2e) -> Result<f64> {
    let kind = ensure_supported(state)?;
    let alpha = state.spin().alpha();
    if params.tau() == 0.0 {
        return Ok(match kind {
            Kind2e::Ground => 0.0,
            Kind2e::NuExcited => 3.0 / 4.0,
            Kind2e::NExcited => 1.0 - alpha * 0.5,
        });
    }
    let u = params.z_rel_ratio();
    let w = params.xy_cm_ratio();
    let v = params.xy_rel_ratio();
    Ok(match kind {
        Kind2e::Ground => 1.0 - p1(w, v) * p1(w, v) * p1(1.0, u),
        Kind2e::NuExcited => 1.0 - t_xy_excited(w, v) * p1(1.0, u),
        Kind2e::NExcited => 1.0 - alpha * p1(w, v) * p1(w, v) * t_z_excited(u),
    })
}

/// Strong-field limit (`sigma -> infinity`) of the closed forms at fixed
/// coupling. The xy factors saturate (`P1(w, v) -> 1`, excited xy purity
/// `-> 1/4`), so only the z-sector dependence survives:
///
/// * ground: `1 - 2 sqrt(u) / (1 + u)`
/// * radial-excited: `1 - sqrt(u) / (2 (1 + u))`
/// * z-excited: `1 - alpha sqrt(u) (3u^2 + 2u + 3) / (2 (1 + u)^3)`
pub fn epsilon_asymptotic_2e(state: &StateLabel2e, tau: f64, sign: Interaction) -> Result<f64> {
    let kind = ensure_supported(state)?;
    let u_sq = 1.0 + sign.sign() * tau * tau;
    if u_sq.is_nan() || u_sq <= 0.0 {
        return Err(Error::Domain(format!(
            "repulsive coupling tau = {tau} admits no bound states (tau_c = 1)"
        )));
    }
    let u = math::sqrt(u_sq);
    let alpha = state.spin().alpha();
    Ok(match kind {
        Kind2e::Ground => 1.0 - p1(1.0, u),
        Kind2e::NuExcited => 1.0 - 0.25 * p1(1.0, u),
        Kind2e::NExcited => 1.0 - alpha * t_z_excited(u),
    })
}

/// Linear and von Neumann entropies of the single-particle ground-state
/// density under the combined trap + field confinement:
///
/// `S_L  = 1 - sqrt(omega) sqrt(b^2 + omega^2) / (2 sqrt(2) pi^(3/2))`
/// `S_vN = [3 (1 + ln pi) - ln omega - ln(b^2 + omega^2)] / 2`
///
/// Both decrease strictly with the field: confinement grows with `b`.
pub fn single_particle_entropies(omega: f64, b: f64) -> Result<(f64, f64)> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::Domain(format!(
            "trap frequency must be positive, got {omega}"
        )));
    }
    if !b.is_finite() || b < 0.0 {
        return Err(Error::Domain(format!(
            "magnetic parameter must be non-negative, got {b}"
        )));
    }
    let pi = core::f64::consts::PI;
    let w_perp_sq = b * b + omega * omega;
    let s_l = 1.0
        - math::sqrt(omega) * math::sqrt(w_perp_sq) / (2.0 * math::sqrt(2.0) * pi * math::sqrt(pi));
    let s_vn = 0.5 * (3.0 * (1.0 + math::ln(pi)) - math::ln(omega) - math::ln(w_perp_sq));
    Ok((s_l, s_vn))
}

// ---------------------------------------------------------------------------
// Reduced-density-matrix oracle
// ---------------------------------------------------------------------------

/// 2D oscillator eigenfunction with `m = 0`, frequency `freq`, evaluated at
/// Cartesian `(x, y)`.
fn psi_2d_m0(nu: u32, freq: f64, x: f64, y: f64) -> f64 {
    let rho = math::hypot(x, y) * math::sqrt(freq);
    math::sqrt(freq / (2.0 * core::f64::consts::PI)) * radial_2d(nu, 0, rho).unwrap()
}

/// Purity `Tr[rho^2] / Tr[rho]^2` of the one-particle reduction of a
/// two-particle amplitude discretized on a tensor grid.
///
/// `amp(a, b)` takes the flattened grid indices of the two particles;
/// `weights` are the square roots of the per-point quadrature weights.
fn sector_purity<F: Fn(usize, usize) -> f64>(dim: usize, weights: &[f64], amp: F) -> f64 {
    let mut m = Mat::zeros(dim, dim);
    for a in 0..dim {
        let row = m.row_mut(a);
        for b in 0..dim {
            row[b] = weights[a] * weights[b] * amp(a, b);
        }
    }
    let rho = m.gram();
    let tr = rho.trace();
    rho.frobenius_norm_sq() / (tr * tr)
}

fn xy_purity(state: &StateLabel2e, params: &ModelParams2e, order: usize) -> Result<f64> {
    let w_freq = params.omega() * params.xy_cm_ratio();
    let v_freq = params.omega() * params.xy_rel_ratio();
    let scale = 1.0 / math::sqrt(math::min(w_freq, v_freq));
    let rule = gauss_hermite(order, scale)?;
    let n = rule.order();
    let pts: Vec<f64> = (0..n).map(|i| rule.point(i)).collect();
    let sqrt_w: Vec<f64> = (0..n).map(|i| math::sqrt(rule.weights()[i])).collect();
    let (nu_cm, _, _) = state.cm();
    let (nu_rel, _, _) = state.rel();
    let inv_sqrt2 = 1.0 / math::sqrt(2.0);

    // Composite index a = i * n + j for the (x, y) of one particle.
    let dim = n * n;
    let mut weights = Vec::with_capacity(dim);
    for i in 0..n {
        for j in 0..n {
            weights.push(sqrt_w[i] * sqrt_w[j]);
        }
    }
    Ok(sector_purity(dim, &weights, |a, b| {
        let (x1, y1) = (pts[a / n], pts[a % n]);
        let (x2, y2) = (pts[b / n], pts[b % n]);
        let rx = (x1 + x2) * inv_sqrt2;
        let ry = (y1 + y2) * inv_sqrt2;
        let sx = (x1 - x2) * inv_sqrt2;
        let sy = (y1 - y2) * inv_sqrt2;
        psi_2d_m0(nu_cm, w_freq, rx, ry) * psi_2d_m0(nu_rel, v_freq, sx, sy)
    }))
}

fn z_purity(state: &StateLabel2e, params: &ModelParams2e, order: usize) -> Result<f64> {
    let cm_freq = params.omega();
    let rel_freq = params.omega() * params.z_rel_ratio();
    let scale = 1.0 / math::sqrt(math::min(cm_freq, rel_freq));
    let rule = gauss_hermite(order, scale)?;
    let n = rule.order();
    let pts: Vec<f64> = (0..n).map(|i| rule.point(i)).collect();
    let sqrt_w: Vec<f64> = (0..n).map(|i| math::sqrt(rule.weights()[i])).collect();
    let (_, _, n_cm) = state.cm();
    let (_, _, n_rel) = state.rel();
    let beta_cm = cm_freq * cm_freq;
    let beta_rel = rel_freq * rel_freq;
    let inv_sqrt2 = 1.0 / math::sqrt(2.0);
    Ok(sector_purity(n, &sqrt_w, |a, b| {
        let zc = (pts[a] + pts[b]) * inv_sqrt2;
        let zr = (pts[a] - pts[b]) * inv_sqrt2;
        ho_wavefunction_1d(n_cm, beta_cm, zc).unwrap()
            * ho_wavefunction_1d(n_rel, beta_rel, zr).unwrap()
    }))
}

fn oracle_epsilon_once(
    state: &StateLabel2e,
    params: &ModelParams2e,
    xy_order: usize,
    z_order: usize,
) -> Result<f64> {
    let coord_purity = xy_purity(state, params, xy_order)? * z_purity(state, params, z_order)?;
    Ok(1.0 - 2.0 * coord_purity * state.spin().spin_purity())
}

/// Numerical entanglement from the discretized one-particle reduced density
/// matrix, exploiting the xy/z factorization of the wavefunction:
/// `Tr[rho_c^2] = T_xy * T_z`, each sector traced on its own tensor grid.
///
/// `rule.order()` sets the z grid; the xy grid uses half that order per
/// axis. The rule's dilation is ignored: each sector rebuilds its grid with
/// the dilation matched to its own frequencies. A doubled-order recompute
/// provides the convergence estimate.
pub fn epsilon_oracle_2e(
    state: &StateLabel2e,
    params: &ModelParams2e,
    rule: &QuadratureRule,
) -> Result<EntanglementResult> {
    ensure_supported(state)?;
    let z_order = rule.order();
    let xy_order = (z_order / 2).max(8);
    let primary = oracle_epsilon_once(state, params, xy_order, z_order)?;
    let z_refined = (2 * z_order).min(MAX_ORDER);
    let xy_refined = (2 * xy_order).min(MAX_ORDER);
    let refined = oracle_epsilon_once(state, params, xy_refined, z_refined)?;
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

#[cfg(test)]
mod tests {
    use super::*;

    fn attr(tau: f64, sigma: f64) -> ModelParams2e {
        ModelParams2e::from_tau_sigma(tau, sigma, Interaction::Attractive).unwrap()
    }

    fn rep(tau: f64, sigma: f64) -> ModelParams2e {
        ModelParams2e::from_tau_sigma(tau, sigma, Interaction::Repulsive).unwrap()
    }

    fn ground_a() -> StateLabel2e {
        StateLabel2e::ground(SpinConfig::Antiparallel).unwrap()
    }

    fn nu_cm_a() -> StateLabel2e {
        StateLabel2e::new(1, 0, 0, 0, 0, 0, SpinConfig::Antiparallel).unwrap()
    }

    fn nu_rel_a() -> StateLabel2e {
        StateLabel2e::new(0, 0, 0, 1, 0, 0, SpinConfig::Antiparallel).unwrap()
    }

    fn n_cm_a() -> StateLabel2e {
        StateLabel2e::new(0, 0, 1, 0, 0, 0, SpinConfig::Antiparallel).unwrap()
    }

    fn n_rel(spin: SpinConfig) -> StateLabel2e {
        StateLabel2e::new(0, 0, 0, 0, 0, 1, spin).unwrap()
    }

    #[test]
    fn spin_statistics_constraint_enforced() {
        // Symmetric coordinate parts cannot carry parallel spins.
        assert!(StateLabel2e::ground(SpinConfig::Parallel).is_err());
        assert!(StateLabel2e::new(0, 0, 1, 0, 0, 0, SpinConfig::Parallel).is_err());
        assert!(StateLabel2e::new(1, 0, 0, 0, 0, 0, SpinConfig::Parallel).is_err());
        // Odd relative parity admits both pairings.
        assert!(StateLabel2e::new(0, 0, 0, 0, 0, 1, SpinConfig::Parallel).is_ok());
        assert!(StateLabel2e::new(0, 0, 0, 0, 1, 0, SpinConfig::Parallel).is_ok());
    }

    #[test]
    fn repulsive_domain_guard() {
        assert!(ModelParams2e::from_tau_sigma(0.99, 0.0, Interaction::Repulsive).is_ok());
        assert!(ModelParams2e::from_tau_sigma(1.0, 0.0, Interaction::Repulsive).is_err());
    }

    #[test]
    fn ground_energy_decoupled_and_in_field() {
        let p = attr(0.0, 0.0);
        assert!((energy_2e(&ground_a(), &p) - 3.0).abs() < 1e-14);
        // y = sqrt(1 + 9/16) + 3/4 = 2 per sector, E' = 1.75, E = 3.5.
        let p = attr(0.0, 0.75);
        assert!((energy_2e(&ground_a(), &p) - 3.5).abs() < 1e-14);
    }

    #[test]
    fn decoupled_excited_energies_degenerate() {
        let p = attr(0.0, 0.0);
        assert!((energy_2e(&nu_cm_a(), &p) - energy_2e(&nu_rel_a(), &p)).abs() < 1e-14);
        assert!(
            (energy_2e(&n_cm_a(), &p) - energy_2e(&n_rel(SpinConfig::Antiparallel), &p)).abs()
                < 1e-14
        );
    }

    #[test]
    fn decoupled_entanglement_exact_rationals() {
        for sigma in [0.0, 0.5, 5.0] {
            let p = attr(0.0, sigma);
            assert_eq!(epsilon_closed_2e(&ground_a(), &p).unwrap(), 0.0);
            assert_eq!(epsilon_closed_2e(&nu_cm_a(), &p).unwrap(), 0.75);
            assert_eq!(epsilon_closed_2e(&nu_rel_a(), &p).unwrap(), 0.75);
            assert_eq!(epsilon_closed_2e(&n_cm_a(), &p).unwrap(), 0.5);
            assert_eq!(
                epsilon_closed_2e(&n_rel(SpinConfig::Antiparallel), &p).unwrap(),
                0.5
            );
            assert_eq!(
                epsilon_closed_2e(&n_rel(SpinConfig::Parallel), &p).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn closed_form_rejects_unsupported_states() {
        let s = StateLabel2e::new(0, 2, 0, 0, 0, 0, SpinConfig::Antiparallel).unwrap();
        assert!(matches!(
            epsilon_closed_2e(&s, &attr(0.4, 0.0)),
            Err(Error::UnsupportedState(_))
        ));
    }

    #[test]
    fn excited_pairs_are_identical_functions() {
        for &(tau, sigma) in &[(0.2, 0.0), (0.7, 1.5), (1.4, 6.0)] {
            let p = attr(tau, sigma);
            assert_eq!(
                epsilon_closed_2e(&nu_cm_a(), &p).unwrap(),
                epsilon_closed_2e(&nu_rel_a(), &p).unwrap()
            );
            assert_eq!(
                epsilon_closed_2e(&n_cm_a(), &p).unwrap(),
                epsilon_closed_2e(&n_rel(SpinConfig::Antiparallel), &p).unwrap()
            );
        }
    }

    #[test]
    fn closed_form_monotone_in_coupling_and_field() {
        let states = [ground_a(), nu_cm_a(), n_cm_a(), n_rel(SpinConfig::Parallel)];
        for state in states {
            for sigma in [0.0, 1.0, 4.0] {
                let mut last = -1.0;
                for i in 0..=40 {
                    let tau = 2.0 * i as f64 / 40.0;
                    let eps = epsilon_closed_2e(&state, &attr(tau, sigma)).unwrap();
                    assert!((0.0..=1.0).contains(&eps));
                    assert!(eps >= last - 1e-12, "not tau-monotone at tau={tau}");
                    last = eps;
                }
            }
            for tau in [0.3, 1.0] {
                let mut last = 2.0;
                for i in 0..=40 {
                    let sigma = 20.0 * i as f64 / 40.0;
                    let eps = epsilon_closed_2e(&state, &attr(tau, sigma)).unwrap();
                    assert!(eps <= last + 1e-12, "not sigma-monotone at sigma={sigma}");
                    last = eps;
                }
            }
        }
    }

    #[test]
    fn repulsive_approaches_maximal_entanglement() {
        let p = rep(1.0 - 1e-9, 0.0);
        let eps = epsilon_closed_2e(&ground_a(), &p).unwrap();
        assert!(eps > 0.999, "eps = {eps}");
    }

    #[test]
    fn asymptotics_match_closed_form_at_huge_field() {
        let states = [
            ground_a(),
            nu_cm_a(),
            nu_rel_a(),
            n_cm_a(),
            n_rel(SpinConfig::Antiparallel),
            n_rel(SpinConfig::Parallel),
        ];
        for sign in [Interaction::Attractive, Interaction::Repulsive] {
            let tau = 0.5;
            for state in states {
                let p = ModelParams2e::from_tau_sigma(tau, 1e4, sign).unwrap();
                let closed = epsilon_closed_2e(&state, &p).unwrap();
                let asym = epsilon_asymptotic_2e(&state, tau, sign).unwrap();
                assert!(
                    (closed - asym).abs() < 1e-3,
                    "{state:?} {sign:?}: closed {closed} vs asym {asym}"
                );
            }
        }
    }

    #[test]
    fn asymptotic_ground_vanishes_when_decoupled() {
        let eps = epsilon_asymptotic_2e(&ground_a(), 0.0, Interaction::Attractive).unwrap();
        assert_eq!(eps, 0.0);
    }

    #[test]
    fn asymptotic_spin_factor_scales_subtracted_term() {
        let tau = 0.8;
        let anti = epsilon_asymptotic_2e(
            &n_rel(SpinConfig::Antiparallel),
            tau,
            Interaction::Attractive,
        )
        .unwrap();
        let par = epsilon_asymptotic_2e(&n_rel(SpinConfig::Parallel), tau, Interaction::Attractive)
            .unwrap();
        // 1 - eps doubles with alpha.
        assert!(((1.0 - par) - 2.0 * (1.0 - anti)).abs() < 1e-14);
    }

    #[test]
    fn entropies_at_zero_field_and_monotone() {
        let (s_l, s_vn) = single_particle_entropies(1.0, 0.0).unwrap();
        let pi = core::f64::consts::PI;
        assert!((s_l - (1.0 - 1.0 / (2.0 * libm::sqrt(2.0) * pi * libm::sqrt(pi)))).abs() < 1e-15);
        assert!((s_vn - 1.5 * (1.0 + libm::log(pi))).abs() < 1e-14);
        let mut last = (f64::INFINITY, f64::INFINITY);
        for i in 0..=50 {
            let b = 10.0 * i as f64 / 50.0;
            let (l, v) = single_particle_entropies(1.0, b).unwrap();
            assert!(
                l < last.0 && v < last.1,
                "entropies not strictly decreasing at b={b}"
            );
            last = (l, v);
        }
        assert!(single_particle_entropies(0.0, 1.0).is_err());
    }

    #[test]
    fn oracle_vanishes_for_decoupled_ground_state() {
        let p = attr(0.0, 0.3);
        let rule = gauss_hermite(DEFAULT_ORACLE_ORDER_2E, 1.0).unwrap();
        let got = epsilon_oracle_2e(&ground_a(), &p, &rule).unwrap();
        assert!(got.epsilon.abs() < 1e-10, "eps = {}", got.epsilon);
    }

    #[test]
    fn oracle_matches_closed_form_attractive_ground() {
        let p = attr(0.5, 1.0);
        let rule = gauss_hermite(DEFAULT_ORACLE_ORDER_2E, 1.0).unwrap();
        let oracle = epsilon_oracle_2e(&ground_a(), &p, &rule).unwrap();
        let closed = epsilon_closed_2e(&ground_a(), &p).unwrap();
        assert!(
            (oracle.epsilon - closed).abs() < 1e-7,
            "oracle {} vs closed {closed}",
            oracle.epsilon
        );
    }

    #[test]
    fn oracle_matches_closed_form_excited_states() {
        let p = attr(0.6, 0.8);
        let rule = gauss_hermite(DEFAULT_ORACLE_ORDER_2E, 1.0).unwrap();
        for state in [nu_cm_a(), nu_rel_a(), n_cm_a(), n_rel(SpinConfig::Parallel)] {
            let oracle = epsilon_oracle_2e(&state, &p, &rule).unwrap();
            let closed = epsilon_closed_2e(&state, &p).unwrap();
            assert!(
                (oracle.epsilon - closed).abs() < 1e-7,
                "{state:?}: oracle {} vs closed {closed}",
                oracle.epsilon
            );
        }
    }

    #[test]
    fn oracle_matches_closed_form_repulsive() {
        let p = rep(0.4, 2.0);
        let rule = gauss_hermite(DEFAULT_ORACLE_ORDER_2E, 1.0).unwrap();
        let state = n_cm_a();
        let oracle = epsilon_oracle_2e(&state, &p, &rule).unwrap();
        let closed = epsilon_closed_2e(&state, &p).unwrap();
        assert!(
            (oracle.epsilon - closed).abs() < 1e-7,
            "oracle {} vs closed {closed}",
            oracle.epsilon
        );
    }
}
