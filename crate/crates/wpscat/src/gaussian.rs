//! Complex Gaussian integrals  int exp(-a x^2 + b x + c) dx  over the line,
//! half-lines and intervals. Re a > 0 throughout.

use crate::special_fn::{erfc_scaled, SpecialFnError};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn check(a: C64) -> Result<(), SpecialFnError> {
    if !(a.re > 0.0) {
        return Err(SpecialFnError::Domain(a.re));
    }
    Ok(())
}

/// Whole line: sqrt(pi/a) exp(b^2/(4a) + c).
pub fn gauss_full(a: C64, b: C64, c: C64) -> Result<C64, SpecialFnError> {
    check(a)?;
    let e = b * b / (4.0 * a) + c;
    if e.re > crate::special_fn::EXP_LIMIT {
        return Err(SpecialFnError::Overflow(e));
    }
    Ok((PI / a).sqrt() * e.exp())
}

/// int_{x0}^{inf}. Written as sqrt(pi/a)/2 * e^{b^2/4a + c} erfc(sqrt(a)(x0 - b/2a))
/// with the exponential folded into the scaled erfc so neither factor overflows.
pub fn gauss_upper(a: C64, b: C64, c: C64, x0: f64) -> Result<C64, SpecialFnError> {
    check(a)?;
    let sa = a.sqrt();
    let m = b / (2.0 * a);
    let shift = b * b / (4.0 * a) + c;
    Ok(0.5 * (PI.sqrt() / sa) * erfc_scaled(sa * (x0 - m), shift)?)
}

/// int_{-inf}^{x0}, by reflecting x -> -x.
pub fn gauss_lower(a: C64, b: C64, c: C64, x0: f64) -> Result<C64, SpecialFnError> {
    gauss_upper(a, -b, c, -x0)
}

/// int_{lo}^{hi}. Uses whichever pair of tails cancels least.
pub fn gauss_interval(a: C64, b: C64, c: C64, lo: f64, hi: f64) -> Result<C64, SpecialFnError> {
    check(a)?;
    let m = (b / (2.0 * a)).re;
    if m >= hi {
        Ok(gauss_lower(a, b, c, hi)? - gauss_lower(a, b, c, lo)?)
    } else if m <= lo {
        Ok(gauss_upper(a, b, c, lo)? - gauss_upper(a, b, c, hi)?)
    } else {
        Ok(gauss_full(a, b, c)? - gauss_lower(a, b, c, lo)? - gauss_upper(a, b, c, hi)?)
    }
}
