//! Gamma-function helpers on top of `libm`.

/// Γ(x) for real x. Returns ±inf at the poles.
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln|Γ(x)|.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// 1/Γ(x), which is entire: exactly zero at x = 0, -1, -2, ...
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / libm::tgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma(1.75), 0.919_062_526_848_883_5, max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(171.0), 706.573_062_245_787_4, max_relative = 1e-14);
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        for n in 0..6 {
            assert_eq!(recip_gamma(-(n as f64)), 0.0);
        }
        assert_relative_eq!(recip_gamma(0.25), 1.0 / gamma(0.25), max_relative = 1e-15);
    }
}
