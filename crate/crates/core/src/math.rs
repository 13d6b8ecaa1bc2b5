//! Scalar helpers that behave identically with and without `std`.

use faer::c64;

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// `e^{iφ}`.
#[inline]
pub fn cis(phase: f64) -> c64 {
    c64::new(cos(phase), sin(phase))
}

/// Principal argument in `(−π, π]`.
#[inline]
pub fn arg(z: c64) -> f64 {
    atan2(z.im, z.re)
}

#[inline]
pub fn modulus(z: c64) -> f64 {
    hypot(z.re, z.im)
}

#[inline]
pub fn cexp(z: c64) -> c64 {
    cis(z.im) * exp(z.re)
}

/// Principal complex logarithm.
#[inline]
pub fn cln(z: c64) -> c64 {
    c64::new(ln(modulus(z)), arg(z))
}

#[inline]
pub fn is_finite(z: c64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Folds an angle into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = libm::fmod(x, TAU);
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_phase_lands_in_half_open_interval() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.5 + TAU) - 0.5).abs() < 1e-12);
        assert!((wrap_phase(-0.5 - 2.0 * TAU) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn complex_log_inverts_exp() {
        let z = c64::new(0.3, -1.2);
        let w = cexp(cln(z));
        assert!(modulus(w - z) < 1e-14);
    }
}
