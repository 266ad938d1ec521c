//! Closed-form amplitudes for rigid packets
//!   phi(t, x) = (pi sigma)^{-3/4} exp(-(x - X - V (t - T))^2 / (2 sigma) - i E (t - T) + i P.(x - X)).
//!
//! First order:
//!   S1 = -i int_{T0}^{T1} dt <phi_2(t)| V |phi_1(t)>
//!      = -i g (4 pi/sigma_V)^{3/2} N_1 N_2 (2 pi sigma_s)^{3/2} (2 pi sigma_t)^{1/2}
//!        exp(-sigma_s dP^2/2 - R/2 + i phase) G(T_int)
//!   G  = int_{T0}^{T1} dt (2 pi sigma_t)^{-1/2} exp(-(t - T_int)^2/(2 sigma_t) - i dw (t - T_int))
//!      = A + B,
//! A the sgn bracket times exp(-sigma_t dw^2/2) and B what the two window
//! edges add. B is evaluated exactly through erfc; its leading asymptotic term
//! (`b_leading`) is
//!   B ~ -(1/2) sqrt(2 sigma_t/pi) e^{-a_0^2/(2 sigma_t) + i dw a_0} / (a_0 - i sigma_t dw)
//!       +(1/2) sqrt(2 sigma_t/pi) e^{-a_1^2/(2 sigma_t) + i dw a_1} / (a_1 - i sigma_t dw),
//! a_I = T_int - T_I.

use super::gauss3::{packet_g3, G3};
use super::kinematics::{derived_params, KinematicDerived};
use super::{dot, sub, GaussianPotential3D, Packet3D, ScatterError, TimeWindow, Vec3};
use crate::quadrature::{integrate_adaptive_with, QuadConfig, Region};
use crate::special_fn::erfc_scaled;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn sgn0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Rigid packet at time t as a separable Gaussian.
pub(crate) fn rigid_packet(p: &Packet3D, t: f64) -> G3 {
    packet_g3(p.sigma, p.p, p.center_at(t), p.x).add_const(C64::new(0.0, -p.energy() * (t - p.t)))
}

/// phi(t, x) for the rigid packet; used by the spacetime quadrature oracle.
pub fn rigid_packet_value(p: &Packet3D, t: f64, x: Vec3) -> C64 {
    rigid_packet(p, t).eval(x)
}

/// Overlap of the two rigid packets evaluated midway between their reference
/// times. The centre offset is then X_1 - X_2 - Vbar (T_1 - T_2) with Vbar the
/// mean group velocity, and |S0| = exp(-offset^2/(2(s_1+s_2)) - s_1 s_2 dP^2/(2(s_1+s_2)))
/// is symmetric under exchanging the packets.
pub fn s0(initial: &Packet3D, final_: &Packet3D) -> C64 {
    let tm = 0.5 * (initial.t + final_.t);
    rigid_packet(final_, tm).inner(rigid_packet(initial, tm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeIntegral {
    pub a_bulk: C64,
    /// exact edge contribution, G - A
    pub b_boundary: C64,
    /// leading asymptotic term of B
    pub b_leading: C64,
    /// A + B
    pub g: C64,
}

/// exp(-sigma dw^2/2) erf(u) - s exp(-sigma dw^2/2),  s = sgn(Re u), without
/// forming erf(u) itself (it overflows when sigma dw is large).
fn edge(u: C64, s: f64, c: f64) -> Result<C64, ScatterError> {
    let cc = C64::new(c, 0.0);
    Ok(if s != 0.0 {
        -s * erfc_scaled(s * u, cc)?
    } else {
        c.exp() - erfc_scaled(u, cc)?
    })
}

pub fn g_time_integral(kin: &KinematicDerived, window: &TimeWindow) -> Result<TimeIntegral, ScatterError> {
    let st = kin.sigma_t;
    let dw = kin.delta_omega;
    let tc = kin.t_int;
    let damp = -0.5 * st * dw * dw;
    let r = (2.0 * st).sqrt();
    let u = |ti: f64| C64::new((ti - tc) / r, st * dw / r);
    let (s0, s1) = (sgn0(window.t0 - tc), sgn0(window.t1 - tc));
    let a_bulk = C64::new(0.5 * (sgn0(tc - window.t0) - sgn0(tc - window.t1)) * damp.exp(), 0.0);
    let b_boundary = 0.5 * (edge(u(window.t1), s1, damp)? - edge(u(window.t0), s0, damp)?);
    let lead = |ti: f64| {
        let a = tc - ti;
        let e = C64::new(-a * a / (2.0 * st), dw * a).exp();
        0.5 * (2.0 * st / PI).sqrt() * e / C64::new(a, -st * dw)
    };
    let b_leading = lead(window.t1) - lead(window.t0);
    Ok(TimeIntegral { a_bulk, b_boundary, b_leading, g: a_bulk + b_boundary })
}

/// G by adaptive quadrature of the time integrand, as an independent check.
pub fn g_direct(kin: &KinematicDerived, window: &TimeWindow, tol: f64) -> Result<(C64, f64), ScatterError> {
    let (st, dw, tc) = (kin.sigma_t, kin.delta_omega, kin.t_int);
    let norm = 1.0 / (2.0 * PI * st).sqrt();
    // outside T_int +- 40 sqrt(sigma_t) the integrand is below e^{-800}
    let half = 40.0 * st.sqrt();
    let (lo, hi) = (window.t0.max(tc - half), window.t1.min(tc + half));
    if lo >= hi {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let f = |t: &[f64]| {
        let d = t[0] - tc;
        norm * C64::new(-d * d / (2.0 * st), -dw * d).exp()
    };
    let cfg = QuadConfig { tol_abs: tol, tol_rel: 0.0, max_evals: 4_000_000 };
    let q = integrate_adaptive_with(f, &Region::new(vec![lo], vec![hi])?, &cfg)?;
    if !q.converged {
        return Err(ScatterError::NotConverged(format!("time integral, error {:e}", q.error_estimate)));
    }
    Ok((q.value, q.error_estimate))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeParts {
    pub kin: KinematicDerived,
    pub time: TimeIntegral,
    pub s0: C64,
    pub s1: C64,
    pub s1_bulk: C64,
    pub s1_boundary: C64,
    /// S1 / G
    pub prefactor: C64,
    /// |prefactor| with the sign of g
    pub magnitude: f64,
}

fn magnitude(initial: &Packet3D, final_: &Packet3D, pot: &GaussianPotential3D, kin: &KinematicDerived) -> f64 {
    let n = initial.norm_const() * final_.norm_const();
    let dp2 = dot(kin.delta_p, kin.delta_p);
    pot.g
        * pot.amplitude()
        * n
        * (2.0 * PI * kin.sigma_s).powf(1.5)
        * (2.0 * PI * kin.sigma_t).sqrt()
        * (-0.5 * kin.sigma_s * dp2 - 0.5 * kin.r_traj).exp()
}

pub fn s1(
    initial: &Packet3D,
    final_: &Packet3D,
    pot: &GaussianPotential3D,
    window: &TimeWindow,
) -> Result<AmplitudeParts, ScatterError> {
    let kin = derived_params(initial, final_, pot)?;
    let time = g_time_integral(&kin, window)?;
    let m = magnitude(initial, final_, pot, &kin);
    let prefactor = C64::new(0.0, -1.0) * m * C64::from_polar(1.0, kin.phase);
    Ok(AmplitudeParts {
        kin,
        time,
        s0: s0(initial, final_),
        s1: prefactor * time.g,
        s1_bulk: prefactor * time.a_bulk,
        s1_boundary: prefactor * time.b_boundary,
        prefactor,
        magnitude: m,
    })
}

/// Q1 = e^{-a_0^2/(2 s)} (a_0 sin(dw a_0) + s dw cos(dw a_0)) / (a_0^2 + s^2 dw^2)
///    - e^{-a_1^2/(2 s)} (a_1 sin(dw a_1) + s dw cos(dw a_1)) / (a_1^2 + s^2 dw^2)
/// with a_I = T_int - T_I and s = sigma_t. Odd in dw.
pub fn q1(t_int: f64, window: &TimeWindow, sigma_t: f64, dw: f64) -> f64 {
    let term = |ti: f64| {
        let a = t_int - ti;
        let den = a * a + sigma_t * sigma_t * dw * dw;
        if den == 0.0 {
            return 0.0;
        }
        (-a * a / (2.0 * sigma_t)).exp() * (a * (dw * a).sin() + sigma_t * dw * (dw * a).cos()) / den
    };
    term(window.t0) - term(window.t1)
}

/// S0 S1* + c.c. with the phases of S0 and S1 aligned, so only |S0| and the
/// real magnitude of S1 enter. The bulk part drops out (S1_bulk is -i times a
/// real number); what is left is the leading edge term,
///   -|S0| M sqrt(2 sigma_t/pi) Q1,
/// whose Gaussian factors combine into exp(-sigma_s' dP^2/2).
pub fn interference_density(
    initial: &Packet3D,
    final_: &Packet3D,
    pot: &GaussianPotential3D,
    window: &TimeWindow,
) -> Result<f64, ScatterError> {
    let kin = derived_params(initial, final_, pot)?;
    let m = magnitude(initial, final_, pot, &kin);
    let s0a = s0(initial, final_).norm();
    Ok(-s0a * m * (2.0 * kin.sigma_t / PI).sqrt() * q1(kin.t_int, window, kin.sigma_t, kin.delta_omega))
}

/// Same phase-aligned product with the exact time integral: 2 |S0| M Im G.
pub fn dp1_density(parts: &AmplitudeParts) -> f64 {
    2.0 * parts.s0.norm() * parts.magnitude * parts.time.g.im
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dp2Density {
    /// M^2 A^2 = M^2 theta(T0, T_int, T1) exp(-sigma_t dw^2)
    pub bulk: f64,
    /// M^2 |B|^2
    pub boundary: f64,
    /// M^2 2 Re(A conj B)
    pub cross: f64,
    /// M^2 |B_leading|^2
    pub boundary_leading: f64,
    /// |S1|^2
    pub total: f64,
}

pub fn dp2_density(parts: &AmplitudeParts) -> Dp2Density {
    let m2 = parts.magnitude * parts.magnitude;
    let (a, b) = (parts.time.a_bulk, parts.time.b_boundary);
    Dp2Density {
        bulk: m2 * a.norm_sqr(),
        boundary: m2 * b.norm_sqr(),
        cross: m2 * 2.0 * (a * b.conj()).re,
        boundary_leading: m2 * parts.time.b_leading.norm_sqr(),
        total: parts.s1.norm_sqr(),
    }
}

/// theta(T0, T_int, T1) with half weight on the edges
pub fn window_theta(t_int: f64, window: &TimeWindow) -> f64 {
    let s = 0.5 * (sgn0(t_int - window.t0) - sgn0(t_int - window.t1));
    s * s
}

/// Offset between the rigid centres at the midpoint time, see `s0`.
pub fn s0_offset(initial: &Packet3D, final_: &Packet3D) -> Vec3 {
    let tm = 0.5 * (initial.t + final_.t);
    sub(initial.center_at(tm), final_.center_at(tm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kin(st: f64, dw: f64, tc: f64) -> KinematicDerived {
        KinematicDerived {
            sigma_s: 1.0,
            sigma_t: st,
            v0: [0.0; 3],
            delta_p: [0.0; 3],
            delta_e: 0.0,
            delta_omega: dw,
            t_int: tc,
            r_traj: 0.0,
            theta0: 0.0,
            sigma_s_prime: 1.0,
            phase: 0.0,
        }
    }

    #[test]
    fn bulk_examples() {
        let w = TimeWindow::new(-50.0, 50.0).unwrap();
        let t = g_time_integral(&kin(1.0, 0.0, 0.0), &w).unwrap();
        assert!((t.a_bulk - 1.0).norm() < 1e-15);
        assert!(t.b_boundary.norm() < 1e-300 + 1e-15);
        let t = g_time_integral(&kin(1.0, 0.3, 80.0), &w).unwrap();
        assert_eq!(t.a_bulk, C64::new(0.0, 0.0));
        assert!(t.b_boundary.norm() < 1e-100);
        // edge: half weight
        let t = g_time_integral(&kin(1.0, 0.0, 50.0), &w).unwrap();
        assert!((t.a_bulk - 0.5).norm() < 1e-15);
        assert!((t.g - 0.5).norm() < 1e-14);
    }

    #[test]
    fn exact_matches_quadrature_everywhere() {
        let w = TimeWindow::new(0.0, 3.0).unwrap();
        for &(st, dw, tc) in &[(1.0, 0.0, 1.0), (0.5, 2.0, -1.0), (2.0, -0.7, 5.0), (1.0, 6.0, 1.5), (0.3, 0.1, 0.0)] {
            let k = kin(st, dw, tc);
            let t = g_time_integral(&k, &w).unwrap();
            let (d, _) = g_direct(&k, &w, 1e-14).unwrap();
            assert!((t.g - d).norm() < 1e-12, "{st} {dw} {tc}: {} vs {d}", t.g);
        }
    }

    #[test]
    fn leading_edge_term_is_asymptotic() {
        let w = TimeWindow::new(0.0, 100.0).unwrap();
        // relative error of the leading term falls like 1/a^2
        let err = |a: f64| {
            let t = g_time_integral(&kin(1.0, 0.2, a), &w).unwrap();
            ((t.b_leading - t.b_boundary) / t.b_boundary).norm()
        };
        let (e1, e2) = (err(4.0), err(8.0));
        assert!(e1 < 0.07 && e2 < 0.02 && e2 < e1 / 3.0, "{e1} {e2}");
    }

    #[test]
    fn q1_is_twice_im_of_leading_edge() {
        let w = TimeWindow::new(0.0, 10.0).unwrap();
        for &(st, dw, tc) in &[(1.0, 0.4, 3.0), (2.0, -1.1, 6.5), (0.7, 3.0, 12.0)] {
            let t = g_time_integral(&kin(st, dw, tc), &w).unwrap();
            let lhs = 2.0 * t.b_leading.im;
            let rhs = -(2.0 * st / PI).sqrt() * q1(tc, &w, st, dw);
            assert!((lhs - rhs).abs() < 1e-14, "{lhs} {rhs}");
        }
    }
}
