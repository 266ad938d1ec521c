//! Phase-space integrals of the marginal terms: the A~11 / A~22 products of
//! erf projections, and the B11 operator integrand whose value depends on
//! the order of integration.

use super::StationaryError;
use crate::quadrature::{gauss_legendre_nodes, gl_integrate, integrate_adaptive_with, PartialIntegral, QuadConfig, QuadResult, Region};
use crate::special_fn::{erfc_scaled, faddeeva, SpecialFnError};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::Mutex;

/// (sigma pi/2) e^{i(k-k')X - sigma((k+P)^2 + (k'+P)^2)/2}
///   (1 - erf(z1))^* (1 - erf(z2)),  z1 = (X + i sigma(k+P))/sqrt(2 sigma),
///   z2 = (X + i sigma(k'+P))/sqrt(2 sigma).
pub fn a11_full(sigma: f64, k: f64, kp: f64, p: f64, x: f64) -> Result<C64, SpecialFnError> {
    let r = (2.0 * sigma).sqrt();
    let z1 = C64::new(x, sigma * (k + p)) / r;
    let z2 = C64::new(x, sigma * (kp + p)) / r;
    let e1 = erfc_scaled(z1.conj(), C64::new(-0.5 * sigma * (k + p).powi(2), 0.0))?;
    let e2 = erfc_scaled(z2, C64::new(-0.5 * sigma * (kp + p).powi(2), 0.0))?;
    Ok(0.5 * sigma * PI * C64::from_polar(1.0, (k - kp) * x) * e1 * e2)
}

/// Transmitted-side partner: e^{-i(k-k')X - sigma((k-P)^2 + (k'-P)^2)/2}
///   (1 - erf((-X + i sigma(k-P))/sqrt(2 sigma)))^* (1 - erf((-X + i sigma(k'-P))/sqrt(2 sigma))),
/// which equals a11_full(-P, -X).
pub fn a22_full(sigma: f64, k: f64, kp: f64, p: f64, x: f64) -> Result<C64, SpecialFnError> {
    let r = (2.0 * sigma).sqrt();
    let z1 = C64::new(-x, sigma * (k - p)) / r;
    let z2 = C64::new(-x, sigma * (kp - p)) / r;
    let e1 = erfc_scaled(z1.conj(), C64::new(-0.5 * sigma * (k - p).powi(2), 0.0))?;
    let e2 = erfc_scaled(z2, C64::new(-0.5 * sigma * (kp - p).powi(2), 0.0))?;
    Ok(0.5 * sigma * PI * C64::from_polar(1.0, -(k - kp) * x) * e1 * e2)
}

/// Leading asymptotic form of a11_full for |X| >> sqrt(sigma):
/// sigma^2 e^{2i(k-k')X - X^2/sigma} / ((X - i sigma(k+P))(X + i sigma(k'+P))).
pub fn a11_marginal(sigma: f64, k: f64, kp: f64, p: f64, x: f64) -> C64 {
    let num = C64::from_polar(sigma * sigma * (-x * x / sigma).exp(), 2.0 * (k - kp) * x);
    num / (C64::new(x, -sigma * (k + p)) * C64::new(x, sigma * (kp + p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalOrder {
    /// inner P, outer X
    PFirst,
    /// inner X, outer P
    XFirst,
}

fn q1(f: impl Fn(f64) -> C64 + Sync, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult, StationaryError> {
    let r = Region::new(vec![lo], vec![hi])?;
    Ok(integrate_adaptive_with(|z: &[f64]| f(z[0]), &r, cfg)?)
}

fn add(a: &mut QuadResult, b: &QuadResult) {
    a.value += b.value;
    a.error_estimate += b.error_estimate;
    a.evaluations += b.evaluations;
    a.converged &= b.converged;
}

fn zero_result() -> QuadResult {
    QuadResult { value: C64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0, converged: true, truncation_bound: 0.0 }
}

/// int dP dX/(2 pi) of the marginal A~11 term, nested in the requested order.
/// P runs over the whole line through P = c + s tan(theta); X is cut at
/// +-12 sqrt(sigma) where the Gaussian factor is below e^{-144}.
pub fn marginal_overlap(sigma: f64, k: f64, kp: f64, cfg: &QuadConfig, order: MarginalOrder) -> Result<QuadResult, StationaryError> {
    if k == kp {
        return Err(StationaryError::Unsupported("marginal overlap is defined for k != k'".into()));
    }
    let xw = 12.0 * sigma.sqrt();
    let c = -0.5 * (k + kp);
    let s = (1.0 / sigma.sqrt()).max((k - kp).abs());
    let th = |p: f64| ((p - c) / s).atan();
    let f = |p: f64, x: f64| a11_marginal(sigma, k, kp, p, x) / (2.0 * PI);
    let fth = |t: f64, x: f64| {
        let ct = t.cos();
        f(c + s * t.tan(), x) * (s / (ct * ct))
    };
    let h = 0.5 * PI;
    // theta breakpoints at the images of P = -k and P = -k'
    let mut tb = vec![-h, th(-k), th(-kp), h];
    tb.sort_by(|a, b| a.total_cmp(b));
    let inner_cfg = QuadConfig { tol_abs: cfg.tol_abs * 0.01, ..*cfg };
    let fail = Mutex::new(false);
    let mut out = zero_result();
    match order {
        MarginalOrder::PFirst => {
            let g = |x: f64| {
                let mut acc = C64::new(0.0, 0.0);
                for w in tb.windows(2) {
                    match q1(|t| fth(t, x), w[0], w[1], &inner_cfg) {
                        Ok(r) => {
                            if !r.converged {
                                *fail.lock().unwrap() = true;
                            }
                            acc += r.value
                        }
                        Err(_) => *fail.lock().unwrap() = true,
                    }
                }
                acc
            };
            for (lo, hi) in [(-xw, 0.0), (0.0, xw)] {
                add(&mut out, &q1(&g, lo, hi, cfg)?);
            }
        }
        MarginalOrder::XFirst => {
            let g = |t: f64| {
                let mut acc = C64::new(0.0, 0.0);
                for (lo, hi) in [(-xw, 0.0), (0.0, xw)] {
                    match q1(|x| fth(t, x), lo, hi, &inner_cfg) {
                        Ok(r) => {
                            if !r.converged {
                                *fail.lock().unwrap() = true;
                            }
                            acc += r.value
                        }
                        Err(_) => *fail.lock().unwrap() = true,
                    }
                }
                acc
            };
            for w in tb.windows(2) {
                add(&mut out, &q1(&g, w[0], w[1], cfg)?);
            }
        }
    }
    out.converged &= !*fail.lock().unwrap();
    out.error_estimate += 2.0 * xw * inner_cfg.tol_abs * 4.0;
    Ok(out)
}

/// Independent oracle for `marginal_overlap`: the P integral done by residues,
/// int dP/(2 pi) = i sgn(X)/(d + 2iX/sigma) with d = k - k', leaving
/// i int_0^inf dX e^{-X^2/sigma} [e^{2idX}/(d + 2iX/sigma) - e^{-2idX}/(d - 2iX/sigma)].
pub fn marginal_overlap_oracle(sigma: f64, k: f64, kp: f64, cfg: &QuadConfig) -> Result<QuadResult, StationaryError> {
    let d = k - kp;
    let f = |x: f64| {
        let g = (-x * x / sigma).exp();
        let a = C64::from_polar(g, 2.0 * d * x) / C64::new(d, 2.0 * x / sigma);
        let b = C64::from_polar(g, -2.0 * d * x) / C64::new(d, -2.0 * x / sigma);
        C64::i() * (a - b)
    };
    q1(f, 0.0, 12.0 * sigma.sqrt(), cfg)
}

/// B11 integrand u(z1) K(z1, z2) v(z2) / (2 pi)^2 with z = (P, X):
///   u = e^{ikX1} e^{-X1^2/(2 sigma) + iX1(k+P1)} / (X1 - i sigma(k+P1))
///   K = <P1,X1|P2,X2> (1 + b12)
///   v = e^{-ik'X2} e^{-X2^2/(2 sigma) - iX2(k'+P2)} / (X2 + i sigma(k'+P2))
pub fn b11_integrand(sigma: f64, k: f64, kp: f64, z1: [f64; 2], z2: [f64; 2]) -> C64 {
    let ([p1, x1], [p2, x2]) = (z1, z2);
    let u = C64::from_polar((-x1 * x1 / (2.0 * sigma)).exp(), k * x1 + x1 * (k + p1)) / C64::new(x1, -sigma * (k + p1));
    let v = C64::from_polar((-x2 * x2 / (2.0 * sigma)).exp(), -kp * x2 - x2 * (kp + p2)) / C64::new(x2, sigma * (kp + p2));
    let dx = x1 - x2;
    let ov = C64::from_polar((-dx * dx / (4.0 * sigma) - sigma * (p1 - p2).powi(2) / 4.0).exp(), 0.5 * (p1 + p2) * dx);
    let b = 0.5 * C64::new(p1 + p2, dx / sigma);
    u * ov * (1.0 + b) * v / (4.0 * PI * PI)
}

// e^{shift} w(z), safe when Im z < 0 makes w large
fn w_shifted(z: C64, shift: f64) -> Result<C64, SpecialFnError> {
    if z.im >= 0.0 {
        Ok(shift.exp() * faddeeva(z)?)
    } else {
        let e = (C64::new(shift, 0.0) - z * z).exp();
        Ok(2.0 * e - shift.exp() * faddeeva(-z)?)
    }
}

/// int du e^{-sigma u^2/4 + i gamma u} (l0 + l1 u)/(u - u0) over the real
/// line, Im u0 != 0, via int e^{-t^2}/(t - zeta) dt = +-i pi w(+-zeta).
pub(crate) fn gauss_pole(sigma: f64, gamma: f64, l0: C64, l1: C64, u0: C64) -> Result<C64, SpecialFnError> {
    let rs = sigma.sqrt();
    let eta = gamma / rs;
    let z = 0.5 * rs * u0;
    let zeta = z - C64::new(0.0, eta);
    let i0 = if u0.im > 0.0 {
        C64::new(0.0, PI) * w_shifted(zeta, -eta * eta)?
    } else {
        C64::new(0.0, -PI) * w_shifted(-zeta, -eta * eta)?
    };
    Ok(l1 * (4.0 * PI / sigma).sqrt() * (-eta * eta).exp() + (l0 + l1 * u0) * i0)
}

/// int dP1 b11_integrand over the whole line at fixed (X1; P2, X2).
fn b11_inner_p1(sigma: f64, k: f64, kp: f64, x1: f64, z2: [f64; 2]) -> Result<C64, SpecialFnError> {
    let [p2, x2] = z2;
    let dx = x1 - x2;
    let pre_u = C64::from_polar((-x1 * x1 / (2.0 * sigma)).exp(), 2.0 * k * x1);
    let v = C64::from_polar((-x2 * x2 / (2.0 * sigma)).exp(), -kp * x2 - x2 * (kp + p2)) / C64::new(x2, sigma * (kp + p2));
    let ov0 = C64::from_polar((-dx * dx / (4.0 * sigma)).exp(), p2 * dx);
    // P1 = P2 + u; phases i x1 P1 + i P1 dx/2 split into the P2 part (in ov0 and
    // the shift below) and gamma u
    let shift = C64::from_polar(1.0, x1 * p2);
    let gamma = x1 + 0.5 * dx;
    let p0 = C64::new(-k, -x1 / sigma);
    let l0 = 1.0 + 0.5 * C64::new(2.0 * p2, dx / sigma);
    let l1 = C64::new(0.5, 0.0);
    // 1/(X1 - i sigma(k + P1)) = (i/sigma)/(P1 - p0)
    let core = gauss_pole(sigma, gamma, l0, l1, p0 - p2)? * C64::new(0.0, 1.0 / sigma);
    Ok(pre_u * ov0 * shift * core * v / (4.0 * PI * PI))
}

/// int dP2 b11_integrand over the whole line at fixed (P1, X1; X2).
fn b11_inner_p2(sigma: f64, k: f64, kp: f64, z1: [f64; 2], x2: f64) -> Result<C64, SpecialFnError> {
    let [p1, x1] = z1;
    let dx = x1 - x2;
    let u = C64::from_polar((-x1 * x1 / (2.0 * sigma)).exp(), k * x1 + x1 * (k + p1)) / C64::new(x1, -sigma * (k + p1));
    let pre_v = C64::from_polar((-x2 * x2 / (2.0 * sigma)).exp(), -2.0 * kp * x2);
    let ov0 = C64::from_polar((-dx * dx / (4.0 * sigma)).exp(), p1 * dx);
    // P2 = P1 + u: phase -i x2 P2 + i P2 dx/2
    let shift = C64::from_polar(1.0, -x2 * p1);
    let gamma = 0.5 * dx - x2;
    let q0 = C64::new(-kp, x2 / sigma);
    let l0 = 1.0 + 0.5 * C64::new(2.0 * p1, dx / sigma);
    let l1 = C64::new(0.5, 0.0);
    // 1/(X2 + i sigma(k' + P2)) = (-i/sigma)/(P2 - q0)
    let core = gauss_pole(sigma, gamma, l0, l1, q0 - p1)? * C64::new(0.0, -1.0 / sigma);
    Ok(u * pre_v * ov0 * shift * core / (4.0 * PI * PI))
}

#[derive(Debug, Clone, PartialEq)]
pub struct B11Diagnostic {
    /// inner zeta1 complete, outer P2 cut at each Lambda
    pub zeta1_first: Vec<PartialIntegral>,
    /// inner zeta2 complete, outer P1 cut at each Lambda
    pub zeta2_first: Vec<PartialIntegral>,
    pub difference: f64,
    pub combined_error: f64,
    /// difference > 10x combined error
    pub order_dependent: bool,
}

/// Both nesting orders of the B11 integrand. The inner momentum integral is
/// exact (Faddeeva), the inner position integral and the outer (P, X)
/// integral are adaptive; the outer momentum is cut at +-Lambda around the
/// pole line P = -k' (or -k) and accumulated shell by shell.
pub fn b11_order_diagnostic(
    sigma: f64,
    k: f64,
    kp: f64,
    cutoffs: &[f64],
    inner_cfg: &QuadConfig,
    outer_cfg: &QuadConfig,
) -> Result<B11Diagnostic, StationaryError> {
    if cutoffs.is_empty() || cutoffs[0] <= 0.0 || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(StationaryError::Unsupported("cutoffs must be positive and increasing".into()));
    }
    let xw = 10.0 * sigma.sqrt();
    let gl_lo = gauss_legendre_nodes(48)?;
    let gl_hi = gauss_legendre_nodes(64)?;
    let run = |first: bool| -> Result<Vec<PartialIntegral>, StationaryError> {
        let fail = Mutex::new(false);
        let worst = Mutex::new(0.0f64);
        // outer point (P, X) -> int dX_inner of the analytic inner momentum integral
        let outer = |z: &[f64]| {
            let g = |xi: f64| {
                let r = if first { b11_inner_p1(sigma, k, kp, xi, [z[0], z[1]]) } else { b11_inner_p2(sigma, k, kp, [z[0], z[1]], xi) };
                r.unwrap_or(C64::new(f64::NAN, 0.0))
            };
            let mut acc = C64::new(0.0, 0.0);
            for (lo, hi) in [(-xw, 0.0), (0.0, xw)] {
                // each half is smooth: two Gauss-Legendre orders first, adaptive
                // only when they disagree
                let a: C64 = gl_integrate(&gl_lo, lo, hi, &g);
                let b: C64 = gl_integrate(&gl_hi, lo, hi, &g);
                if (a - b).norm() <= inner_cfg.tol_abs && b.re.is_finite() && b.im.is_finite() {
                    let mut m = worst.lock().unwrap();
                    *m = m.max((a - b).norm());
                    acc += b;
                    continue;
                }
                match q1(g, lo, hi, inner_cfg) {
                    Ok(r) => {
                        if !r.converged || !r.value.re.is_finite() {
                            *fail.lock().unwrap() = true;
                        }
                        let mut m = worst.lock().unwrap();
                        *m = m.max(r.error_estimate);
                        acc += r.value;
                    }
                    Err(_) => *fail.lock().unwrap() = true,
                }
            }
            acc
        };
        let pc = if first { -kp } else { -k };
        let mut out = Vec::new();
        let mut acc = zero_result();
        let mut prev = 0.0;
        for &lam in cutoffs {
            let strips: Vec<(f64, f64)> =
                if prev == 0.0 { vec![(pc - lam, pc), (pc, pc + lam)] } else { vec![(pc - lam, pc - prev), (pc + prev, pc + lam)] };
            for (a, b) in strips {
                // p = anchor + dir t^2, x = xdir s^2 with the anchor on the side
                // nearest the pole line; the Jacobian 4ts cancels the 1/r
                // behaviour of the outer integrand at (pc, 0)
                let (anchor, dir) = if b <= pc { (b, -1.0) } else { (a, 1.0) };
                for xdir in [-1.0, 1.0] {
                    let mapped = |z: &[f64]| {
                        let (t, sx) = (z[0], z[1]);
                        outer(&[anchor + dir * t * t, xdir * sx * sx]) * (4.0 * t * sx)
                    };
                    let r = Region::new(vec![0.0, 0.0], vec![(b - a).sqrt(), xw.sqrt()])?;
                    let q = integrate_adaptive_with(mapped, &r, outer_cfg)?;
                    add(&mut acc, &q);
                    acc.error_estimate += (b - a) * xw * 2.0 * *worst.lock().unwrap();
                }
            }
            prev = lam;
            let mut res = acc;
            res.converged &= !*fail.lock().unwrap();
            out.push(PartialIntegral { cutoff: lam, result: res });
        }
        Ok(out)
    };
    let a = run(true)?;
    let b = run(false)?;
    let (x, y) = (a.last().unwrap().result, b.last().unwrap().result);
    let difference = (x.value - y.value).norm();
    let combined_error = x.error_estimate + y.error_estimate;
    Ok(B11Diagnostic { zeta1_first: a, zeta2_first: b, difference, combined_error, order_dependent: difference > 10.0 * combined_error })
}
