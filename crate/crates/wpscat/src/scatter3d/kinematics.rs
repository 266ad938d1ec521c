//! Derived kinematic parameters of the first-order amplitude.
//!
//! With c_j(t) = Y_j + V_j t the two envelope centres and the potential
//! centred at X_V, the x-integral of conj(phi_2) V phi_1 is Gaussian with
//! width sigma_s, and what remains in t is Gaussian with width sigma_t centred
//! at T_int:
//!
//!   1/sigma_s = 1/sigma_1 + 1/sigma_2 + 2/sigma_V
//!   V0        = sigma_s (V_1/sigma_1 + V_2/sigma_2)
//!   1/sigma_t = V_1^2/sigma_1 + V_2^2/sigma_2 - V0^2/sigma_s
//!   T_int     = sigma_t (V0.Yt - V_1.Y_1/sigma_1 - V_2.Y_2/sigma_2),
//!   Yt        = Y_1/sigma_1 + Y_2/sigma_2 + 2 X_V/sigma_V
//!
//! R is the minimum over (x, t) of
//!   (x - c_1)^2/sigma_1 + (x - c_2)^2/sigma_2 + 2 (x - X_V)^2/sigma_V,
//! attained at t = T_int, so R >= 0 and R = 0 exactly when both trajectories
//! pass through X_V at the same time.

use super::{axpy, dot, scale, sub, GaussianPotential3D, Packet3D, ScatterError, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicDerived {
    pub sigma_s: f64,
    pub sigma_t: f64,
    pub v0: Vec3,
    /// P_1 - P_2
    pub delta_p: Vec3,
    /// E_1 - E_2
    pub delta_e: f64,
    /// delta_e - V0.delta_p
    pub delta_omega: f64,
    pub t_int: f64,
    pub r_traj: f64,
    /// E_2 T_2 - P_2.X_2 - E_1 T_1 + P_1.X_1
    pub theta0: f64,
    /// sigma_s + sigma_1 sigma_2 / (sigma_1 + sigma_2); sigma_s + sigma_e/2 at equal widths
    pub sigma_s_prime: f64,
    /// phase of the first-order amplitude apart from G and the factor -i
    pub phase: f64,
}

pub fn derived_params(
    initial: &Packet3D,
    final_: &Packet3D,
    pot: &GaussianPotential3D,
) -> Result<KinematicDerived, ScatterError> {
    let (s1, s2, sv) = (initial.sigma, final_.sigma, pot.sigma_v);
    let (v1, v2) = (initial.velocity(), final_.velocity());
    let y1 = axpy(-initial.t, v1, initial.x);
    let y2 = axpy(-final_.t, v2, final_.x);
    let sigma_s = 1.0 / (1.0 / s1 + 1.0 / s2 + 2.0 / sv);
    let w = axpy(1.0 / s2, v2, scale(1.0 / s1, v1));
    let v0 = scale(sigma_s, w);
    let c2 = dot(v1, v1) / s1 + dot(v2, v2) / s2;
    let inv_t = c2 - dot(v0, w);
    if !(c2 > 0.0) || inv_t <= 1e-12 * c2 {
        return Err(ScatterError::Degenerate(format!(
            "1/sigma_t = {inv_t:e} for velocities {v1:?}, {v2:?}"
        )));
    }
    let sigma_t = 1.0 / inv_t;
    let yt = axpy(2.0 / sv, pot.x_v, axpy(1.0 / s2, y2, scale(1.0 / s1, y1)));
    let c1 = dot(v1, y1) / s1 + dot(v2, y2) / s2;
    let t_int = sigma_t * (dot(v0, yt) - c1);
    // R evaluated at the minimiser as a sum of squares, which keeps it >= 0
    let xs = scale(sigma_s, axpy(t_int, w, yt));
    let d1 = sub(xs, axpy(t_int, v1, y1));
    let d2 = sub(xs, axpy(t_int, v2, y2));
    let dv = sub(xs, pot.x_v);
    let r_traj = dot(d1, d1) / s1 + dot(d2, d2) / s2 + 2.0 * dot(dv, dv) / sv;
    let delta_p = sub(initial.p, final_.p);
    let delta_e = initial.energy() - final_.energy();
    let delta_omega = delta_e - dot(v0, delta_p);
    let theta0 = final_.energy() * final_.t - dot(final_.p, final_.x) - initial.energy() * initial.t
        + dot(initial.p, initial.x);
    let phase = sigma_s * dot(yt, delta_p) - theta0 - delta_omega * t_int;
    Ok(KinematicDerived {
        sigma_s,
        sigma_t,
        v0,
        delta_p,
        delta_e,
        delta_omega,
        t_int,
        r_traj,
        theta0,
        sigma_s_prime: sigma_s + s1 * s2 / (s1 + s2),
        phase,
    })
}

/// sigma_s at sigma_1 = sigma_2 = sigma_e: sigma_e sigma_V / (2 (sigma_e + sigma_V)).
pub fn sigma_s_equal_width(sigma_e: f64, sigma_v: f64) -> f64 {
    0.5 * sigma_e * sigma_v / (sigma_e + sigma_v)
}

/// sigma_t at equal widths from speeds and the angle between the velocities:
///   1/sigma_t = [(1 - sigma_s/sigma_e)(V_1^2 + V_2^2) - 2 (sigma_s/sigma_e) V_1 V_2 cos(theta)] / sigma_e
pub fn sigma_t_equal_width(sigma_e: f64, sigma_s: f64, v1: f64, v2: f64, cos_theta: f64) -> f64 {
    let r = sigma_s / sigma_e;
    sigma_e / ((1.0 - r) * (v1 * v1 + v2 * v2) - 2.0 * r * v1 * v2 * cos_theta)
}
