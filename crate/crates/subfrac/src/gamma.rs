//! Gamma-function helpers shared by the special-function kernels.
//!
//! The reciprocal gamma 1/Γ(x) is the primitive here: it is entire, so
//! poles of Γ at non-positive integers become exact zeros and series
//! terms never overflow through a pole.

pub const LN_PI: f64 = 1.144_729_885_849_400_2;

/// sin(πx) with argument reduction exact in x, so integer x gives 0.
pub fn sinpi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = x.round();
    let r = x - n;
    let s = (std::f64::consts::PI * r).sin();
    // sin(π(n+r)) = (−1)^n sin(πr)
    if (n as i64) & 1 == 0 {
        s
    } else {
        -s
    }
}

/// cos(πx) with the same exact reduction; half-integer x gives 0.
pub fn cospi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = x.round();
    let r = x - n;
    let c = (std::f64::consts::PI * r).cos();
    if (n as i64) & 1 == 0 {
        c
    } else {
        -c
    }
}

/// Γ(x) for x > 0 (delegates to the musl port in libm, ~1 ulp).
pub fn gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::tgamma(x)
}

/// ln Γ(x) for x > 0.
pub fn lngamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// 1/Γ(x) for any real x; zero at non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x > 0.5 {
        if x > 170.0 {
            // Γ overflows past ~171.6; go through logs (underflows to 0)
            (-libm::lgamma(x)).exp()
        } else {
            1.0 / libm::tgamma(x)
        }
    } else {
        // reflection: 1/Γ(x) = sin(πx)·Γ(1−x)/π
        let s = sinpi(x);
        if s == 0.0 {
            return 0.0;
        }
        let y = 1.0 - x;
        if y > 170.0 {
            let ln_mag = libm::lgamma(y) - LN_PI + s.abs().ln();
            let mag = ln_mag.exp();
            if s > 0.0 {
                mag
            } else {
                -mag
            }
        } else {
            s * libm::tgamma(y) / std::f64::consts::PI
        }
    }
}
