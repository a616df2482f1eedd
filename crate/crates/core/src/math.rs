//! Thin wrappers over `libm` so the rest of the crate reads like ordinary
//! float code under `no_std`.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Integer power by binary exponentiation; `powi` is not available in core.
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi(x, -n);
    }
    let mut base = x;
    let mut k = n as u32;
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// x^(k/2) for odd k >= 1 and x > 0, via integer power times square root.
pub(crate) fn pow_half_odd(x: f64, k: i32) -> f64 {
    debug_assert!(k >= 1 && k % 2 == 1);
    powi(x, (k - 1) / 2) * sqrt(x)
}

pub(crate) fn max(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

pub(crate) fn min(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_multiplication() {
        let mut acc = 1.0;
        for k in 0..12 {
            assert!((powi(1.7, k) - acc).abs() < 1e-12 * acc);
            acc *= 1.7;
        }
        assert!((powi(2.0, -3) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn pow_half_odd_matches_powf() {
        for &x in &[0.3, 1.0, 2.5, 17.0] {
            for &k in &[1, 5, 9, 13] {
                let want = libm::pow(x, k as f64 / 2.0);
                let got = pow_half_odd(x, k);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
            }
        }
    }
}
