//! Hermite and associated Laguerre polynomials plus the harmonic-oscillator
//! eigenfunctions built from them.
//!
//! Everything is evaluated by upward three-term recurrence in double
//! precision. Degrees are capped at [`MAX_DEGREE`]; well below the cap the
//! recurrences are forward-stable and the oscillator prefactors stay far from
//! overflow.

use crate::error::{Error, Result};
use crate::math;

/// Largest polynomial degree accepted by [`hermite`] and [`assoc_laguerre`].
pub const MAX_DEGREE: u32 = 60;

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: u32, x: f64) -> Result<f64> {
    if n > MAX_DEGREE {
        return Err(Error::Range {
            what: "hermite degree n",
            max: MAX_DEGREE,
            got: n,
        });
    }
    let mut prev = 1.0; // H_0
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x; // H_1
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Associated Laguerre polynomial `L_nu^k(x)`.
pub fn assoc_laguerre(nu: u32, k: u32, x: f64) -> Result<f64> {
    if nu > MAX_DEGREE {
        return Err(Error::Range {
            what: "laguerre degree nu",
            max: MAX_DEGREE,
            got: nu,
        });
    }
    let kf = k as f64;
    let mut prev = 1.0; // L_0
    if nu == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + kf - x; // L_1
    for j in 1..nu {
        let jf = j as f64;
        let next = ((2.0 * jf + kf + 1.0 - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// ln(n!), exact in f64 for the factorials that show up here.
fn ln_factorial(n: u32) -> f64 {
    let mut acc = 0.0;
    for k in 2..=n {
        acc += math::ln(k as f64);
    }
    acc
}

/// Normalized 1D oscillator eigenfunction for a quadratic potential with
/// curvature `beta` (frequency `sqrt(beta)` in atomic units):
///
/// `Psi_n(x) = (beta^{1/4} / (2^n n! pi^{1/2}))^{1/2}
///             e^{-sqrt(beta) x^2 / 2} H_n(beta^{1/4} x)`.
pub fn ho_wavefunction_1d(n: u32, beta: f64, x: f64) -> Result<f64> {
    debug_assert!(beta > 0.0, "oscillator curvature must be positive");
    let root_beta = math::sqrt(beta);
    let quarter_beta = math::sqrt(root_beta);
    // Log-space prefactor keeps 2^n n! harmless for every supported n.
    let ln_norm = 0.5
        * (math::ln(quarter_beta)
            - (n as f64) * core::f64::consts::LN_2
            - ln_factorial(n)
            - 0.5 * math::ln(core::f64::consts::PI));
    let h = hermite(n, quarter_beta * x)?;
    Ok(math::exp(ln_norm - 0.5 * root_beta * x * x) * h)
}

/// Unit-frequency 1D oscillator eigenfunction `chi_n(z)`.
pub fn chi_z(n: u32, z: f64) -> Result<f64> {
    ho_wavefunction_1d(n, 1.0, z)
}

/// Radial eigenfunction of the unit-frequency 2D oscillator,
///
/// `R_{nu,|m|}(rho) = (2 nu! / (nu+|m|)!)^{1/2} rho^{|m|} e^{-rho^2/2}
///                    L_nu^{|m|}(rho^2)`,
///
/// normalized so that the integral of `R^2 rho` over `[0, inf)` is one.
pub fn radial_2d(nu: u32, abs_m: u32, rho: f64) -> Result<f64> {
    debug_assert!(rho >= 0.0, "radial coordinate must be non-negative");
    let lag = assoc_laguerre(nu, abs_m, rho * rho)?;
    let ln_norm = 0.5 * (core::f64::consts::LN_2 + ln_factorial(nu) - ln_factorial(nu + abs_m));
    Ok(math::exp(ln_norm) * math::powi(rho, abs_m as i32) * math::exp(-0.5 * rho * rho) * lag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_hermite;

    const PI: f64 = core::f64::consts::PI;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 1.7).unwrap(), 1.0);
        assert!((hermite(3, 1.0).unwrap() - (-4.0)).abs() < 1e-14);
        assert!((hermite(2, 0.0).unwrap() - (-2.0)).abs() < 1e-14);
    }

    #[test]
    fn hermite_rejects_beyond_cap() {
        assert!(matches!(hermite(61, 0.0), Err(Error::Range { .. })));
        assert!(hermite(60, 0.5).is_ok());
    }

    #[test]
    fn hermite_recurrence_consistency() {
        // H_{n+1}(x) = 2x H_n(x) - 2n H_{n-1}(x) on a sampled grid.
        for n in 1..=20u32 {
            for i in 0..=40 {
                let x = -5.0 + 0.25 * i as f64;
                let lhs = hermite(n + 1, x).unwrap();
                let rhs =
                    2.0 * x * hermite(n, x).unwrap() - 2.0 * n as f64 * hermite(n - 1, x).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * scale,
                    "recurrence off at n={n}, x={x}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(assoc_laguerre(0, 3, 2.5).unwrap(), 1.0);
        assert!((assoc_laguerre(1, 0, 2.0).unwrap() - (-1.0)).abs() < 1e-14);
        assert!((assoc_laguerre(1, 2, 0.0).unwrap() - 3.0).abs() < 1e-14);
        assert!(matches!(
            assoc_laguerre(61, 0, 1.0),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn ho_ground_peak_value() {
        let got = ho_wavefunction_1d(0, 1.0, 0.0).unwrap();
        assert!((got - libm::pow(PI, -0.25)).abs() < 1e-15);
        assert!((chi_z(0, 0.0).unwrap() - libm::pow(PI, -0.25)).abs() < 1e-15);
    }

    #[test]
    fn ho_first_excited_parity_and_node() {
        assert_eq!(ho_wavefunction_1d(1, 4.0, 0.0).unwrap(), 0.0);
        for i in 1..=10 {
            let x = 0.3 * i as f64;
            let plus = ho_wavefunction_1d(1, 4.0, x).unwrap();
            let minus = ho_wavefunction_1d(1, 4.0, -x).unwrap();
            assert!((plus + minus).abs() < 1e-14 * plus.abs().max(1e-300));
            assert!(plus != 0.0);
        }
    }

    #[test]
    fn chi_parity() {
        for n in 0..=6u32 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..=12 {
                let z = -3.0 + 0.5 * i as f64;
                let a = chi_z(n, z).unwrap();
                let b = chi_z(n, -z).unwrap();
                assert!((a - sign * b).abs() < 1e-13 * a.abs().max(1e-12));
            }
        }
    }

    #[test]
    fn ho_orthonormality_under_quadrature() {
        // <Psi_m | Psi_n> = delta_mn for beta in {0.5, 1, 4}, m, n <= 6.
        for &beta in &[0.5, 1.0, 4.0] {
            let scale = libm::pow(beta, -0.25);
            let rule = gauss_hermite(40, scale).unwrap();
            for m in 0..=6u32 {
                for n in 0..=6u32 {
                    let overlap = rule.integrate(|x| {
                        ho_wavefunction_1d(m, beta, x).unwrap()
                            * ho_wavefunction_1d(n, beta, x).unwrap()
                    });
                    let want = if m == n { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - want).abs() < 1e-12,
                        "beta={beta}, m={m}, n={n}: overlap={overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn radial_ground_value_and_normalization() {
        assert!((radial_2d(0, 0, 0.0).unwrap() - libm::sqrt(2.0)).abs() < 1e-15);
        // Radial integrals over [0, inf) against the measure rho drho, recast
        // as 2D Cartesian integrals (the rho weight is the polar Jacobian):
        // int g(rho) rho drho = (1/2pi) int int g(|r|) dx dy,
        // and g(|r|) here is polynomial x Gaussian in (x, y), which the
        // tensor rule handles exactly.
        let rule = gauss_hermite(40, 1.0).unwrap();
        let radial_int = |g: &dyn Fn(f64) -> f64| {
            let mut acc = 0.0;
            for i in 0..rule.order() {
                for j in 0..rule.order() {
                    let w = rule.weights()[i] * rule.weights()[j];
                    acc += w * g(libm::hypot(rule.point(i), rule.point(j)));
                }
            }
            acc / (2.0 * PI)
        };
        let norm00 =
            radial_int(&|rho| radial_2d(0, 0, rho).unwrap() * radial_2d(0, 0, rho).unwrap());
        assert!((norm00 - 1.0).abs() < 1e-12, "norm00 = {norm00}");
        for m in 0..=2u32 {
            let ortho =
                radial_int(&|rho| radial_2d(0, m, rho).unwrap() * radial_2d(1, m, rho).unwrap());
            assert!(ortho.abs() < 1e-12, "m={m}: <R0m|R1m> = {ortho}");
            let norm1m = radial_int(&|rho| {
                let r = radial_2d(1, m, rho).unwrap();
                r * r
            });
            assert!((norm1m - 1.0).abs() < 1e-12, "m={m}: |R1m|^2 = {norm1m}");
        }
    }
}
