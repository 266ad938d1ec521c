//! Complex error function and the Faddeeva function w(z) = exp(-z^2) erfc(-iz).
//!
//! Branches (upper half-plane after reflection):
//! * |z| < 6: Maclaurin series of w in double-double arithmetic. The series
//!   terms grow to ~1e14 before decaying at |z| = 6, so plain f64 would lose
//!   far too many digits.
//! * |z| >= 6: Laplace continued fraction, evaluated bottom-up with a fixed
//!   depth.
//!
//! erf uses its own double-double Maclaurin series for |z| < 3 (avoids the
//! cancellation in 1 - exp(-z^2) w(iz) near the origin) and w elsewhere.

use crate::dd::{inv_sqrt_pi, CDd, Dd};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SpecialFnError {
    #[error("non-finite argument {0}")]
    NonFinite(C64),
    #[error("exp(-z^2) leaves the representable range at z = {0}")]
    Overflow(C64),
    #[error("asymptotic erf expansion needs |z| >= 3, got |z| = {0}")]
    Domain(f64),
}

const W_SERIES_RADIUS: f64 = 6.0;
const ERF_SERIES_RADIUS: f64 = 3.0;
const CF_DEPTH: usize = 40;
/// ln(f64::MAX) with a little headroom.
pub(crate) const EXP_LIMIT: f64 = 708.0;

fn check_finite(z: C64) -> Result<(), SpecialFnError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(SpecialFnError::NonFinite(z))
    }
}

/// exp(c - z^2) with an overflow check on the real part of the exponent.
pub fn exp_shifted_neg_sq(z: C64, c: C64) -> Result<C64, SpecialFnError> {
    // -z^2 = (y-x)(y+x) - 2ixy, written to keep the real part accurate.
    let re = (z.im - z.re) * (z.im + z.re) + c.re;
    let im = -2.0 * z.re * z.im + c.im;
    if re > EXP_LIMIT {
        return Err(SpecialFnError::Overflow(z));
    }
    if re < -745.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(C64::from_polar(re.exp(), im))
}

/// w(z) for Im z >= 0, |z| < W_SERIES_RADIUS:  sum (iz)^n / Gamma(n/2 + 1).
fn w_maclaurin(z: C64) -> C64 {
    let u = CDd::new(Dd::from(-z.im), Dd::from(z.re));
    let u2 = u.mul(u);
    let mut c_even = Dd::from(1.0);
    let mut c_odd = inv_sqrt_pi().mul_f64(2.0);
    let mut pow_even = CDd::new(Dd::from(1.0), Dd::ZERO);
    let mut pow_odd = u;
    let mut sum = CDd::new(Dd::ZERO, Dd::ZERO);
    let peak = 2.0 * z.norm_sqr();
    let mut m = 0usize;
    loop {
        let te = pow_even.scale(c_even);
        let to = pow_odd.scale(c_odd);
        sum = sum.add(te).add(to);
        let n = 2 * m;
        let mag = te.norm_hi() + to.norm_hi();
        if (n as f64) > peak && mag < 1e-22 * sum.norm_hi() {
            break;
        }
        if n > 2000 {
            break;
        }
        // c_{n+2} = c_n / (n/2 + 1)
        c_even = c_even.div_f64(n as f64 / 2.0 + 1.0);
        c_odd = c_odd.div_f64((n + 1) as f64 / 2.0 + 1.0);
        pow_even = pow_even.mul(u2);
        pow_odd = pow_odd.mul(u2);
        m += 1;
    }
    C64::new(sum.re.to_f64(), sum.im.to_f64())
}

/// Laplace continued fraction  w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...)))).
fn w_continued_fraction(z: C64) -> C64 {
    let mut t = z;
    for n in (1..=CF_DEPTH).rev() {
        t = z - (n as f64 / 2.0) / t;
    }
    C64::new(0.0, 1.0 / PI.sqrt()) / t
}

fn w_upper(z: C64) -> C64 {
    if z.norm() < W_SERIES_RADIUS {
        w_maclaurin(z)
    } else {
        w_continued_fraction(z)
    }
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
pub fn faddeeva(z: C64) -> Result<C64, SpecialFnError> {
    check_finite(z)?;
    if z.im >= 0.0 {
        return Ok(w_upper(z));
    }
    // w(z) = 2 exp(-z^2) - w(-z)
    let e = exp_shifted_neg_sq(z, C64::new(0.0, 0.0))?;
    Ok(2.0 * e - w_upper(-z))
}

fn erf_maclaurin(z: C64) -> C64 {
    // erf(z) = 2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1))
    let zz = CDd::new(Dd::from(z.re), Dd::from(z.im));
    let mz2 = {
        let s = zz.mul(zz);
        CDd::new(s.re.neg(), s.im.neg())
    };
    let mut t = zz;
    let mut sum = CDd::new(Dd::ZERO, Dd::ZERO);
    let peak = z.norm_sqr();
    let mut n = 0usize;
    loop {
        let inv = Dd::from(1.0).div_f64((2 * n + 1) as f64);
        let term = t.scale(inv);
        sum = sum.add(term);
        if (n as f64) > peak && term.norm_hi() < 1e-22 * sum.norm_hi() {
            break;
        }
        if n > 1000 {
            break;
        }
        n += 1;
        t = t.mul(mz2);
        t = CDd::new(t.re.div_f64(n as f64), t.im.div_f64(n as f64));
    }
    let s = sum.scale(inv_sqrt_pi().mul_f64(2.0));
    C64::new(s.re.to_f64(), s.im.to_f64())
}

/// exp(c) * erfc(z), combining exponents before exponentiating so that
/// products like exp(-a^2) erfc(z) with huge erfc stay finite.
pub fn erfc_scaled(z: C64, c: C64) -> Result<C64, SpecialFnError> {
    check_finite(z)?;
    let iz = C64::new(-z.im, z.re);
    if z.re >= 0.0 {
        // erfc(z) = exp(-z^2) w(iz), Im(iz) = Re z >= 0
        let e = exp_shifted_neg_sq(z, c)?;
        Ok(e * w_upper(iz))
    } else {
        // erfc(z) = 2 - exp(-z^2) w(-iz)
        let e = exp_shifted_neg_sq(z, c)?;
        if c.re > EXP_LIMIT {
            return Err(SpecialFnError::Overflow(z));
        }
        Ok(2.0 * c.exp() - e * w_upper(-iz))
    }
}

pub fn erfc_complex(z: C64) -> Result<C64, SpecialFnError> {
    check_finite(z)?;
    if z.norm() < ERF_SERIES_RADIUS && z.re < 0.5 {
        return Ok(1.0 - erf_maclaurin(z));
    }
    erfc_scaled(z, C64::new(0.0, 0.0))
}

/// erf(z) = 1 - exp(-z^2) w(iz).
pub fn erf_complex(z: C64) -> Result<C64, SpecialFnError> {
    check_finite(z)?;
    if z.norm() < ERF_SERIES_RADIUS {
        return Ok(erf_maclaurin(z));
    }
    if z.re >= 0.0 {
        Ok(1.0 - erfc_scaled(z, C64::new(0.0, 0.0))?)
    } else {
        Ok(erfc_scaled(-z, C64::new(0.0, 0.0))? - 1.0)
    }
}

pub fn erf_real(x: f64) -> f64 {
    erf_complex(C64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN)
}

/// sgn(Re z) - exp(-z^2)/(sqrt(pi) z) * sum_{m<n_terms} (-1)^m (2m-1)!! / (2z^2)^m.
///
/// sgn(Re z) is taken as 0 on the imaginary axis.
pub fn erf_asymptotic(z: C64, n_terms: usize) -> Result<C64, SpecialFnError> {
    check_finite(z)?;
    let r = z.norm();
    if r < 3.0 {
        return Err(SpecialFnError::Domain(r));
    }
    let inv2z2 = 1.0 / (2.0 * z * z);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for m in 0..n_terms {
        sum += term;
        term *= -((2 * m + 1) as f64) * inv2z2;
    }
    let e = exp_shifted_neg_sq(z, C64::new(0.0, 0.0))?;
    let sgn = if z.re > 0.0 {
        1.0
    } else if z.re < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(sgn - e / (PI.sqrt() * z) * sum)
}

/// Remainder bound for `erf_asymptotic`: the first omitted bracket term times
/// |exp(-z^2)/(sqrt(pi) z)|, widened by csc(2|ph z'|) when pi/4 < |ph z'| < pi/2
/// (z' = z or -z, whichever has Re >= 0). Infinite on the imaginary axis.
pub fn erf_asymptotic_bound(z: C64, n_terms: usize) -> f64 {
    let x = 1.0 / (2.0 * z.norm_sqr());
    let mut t = 1.0;
    for m in 0..n_terms {
        t *= (2 * m + 1) as f64 * x;
    }
    let pref = ((z.im - z.re) * (z.im + z.re)).exp() / (PI.sqrt() * z.norm());
    let ph = z.im.abs().atan2(z.re.abs());
    let sector = if ph <= PI / 4.0 { 1.0 } else { 1.0 / (2.0 * ph).sin() };
    t * pref * sector
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn w_at_origin() {
        assert_eq!(faddeeva(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn erf_one() {
        let v = erf_complex(c(1.0, 0.0)).unwrap();
        assert!((v.re - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!(v.im.abs() < 1e-300);
    }

    #[test]
    fn seam_between_series_and_fraction() {
        for k in 0..64 {
            let th = PI * k as f64 / 63.0;
            for r in [6.0, 6.2] {
                let z = C64::from_polar(r, th);
                let a = w_maclaurin(z);
                let b = w_continued_fraction(z);
                assert!((a - b).norm() / a.norm() < 1e-12, "z={z} {a} {b}");
            }
        }
    }

    #[test]
    fn imaginary_axis_decreasing() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let t = 0.25 * i as f64;
            let w = faddeeva(c(0.0, t)).unwrap();
            assert!(w.im.abs() < 1e-14 * w.re);
            assert!(w.re < last);
            last = w.re;
        }
    }

    #[test]
    fn overflow_reported() {
        assert!(matches!(faddeeva(c(0.0, -40.0)), Err(SpecialFnError::Overflow(_))));
        assert!(matches!(erf_complex(c(0.1, 40.0)), Err(SpecialFnError::Overflow(_))));
        assert!(faddeeva(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn asymptotic_domain() {
        assert!(erf_asymptotic(c(1.0, 1.0), 3).is_err());
        let v = erf_asymptotic(c(5.0, 0.0), 2).unwrap();
        let e = erf_complex(c(5.0, 0.0)).unwrap();
        assert!((v - e).norm() <= 1e-9);
    }

    #[test]
    fn erfc_scaled_large_negative_argument() {
        // exp(-100) erfc(-10 + i) stays finite and equals 2 exp(-100) - ...
        let v = erfc_scaled(c(-10.0, 1.0), c(-100.0, 0.0)).unwrap();
        assert!((v - 2.0 * (-100.0f64).exp()).norm() < 1e-50);
    }
}
