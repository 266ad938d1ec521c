//! Amplitudes with freely evolving packets (m = 1) and the probability ladder.
//!
//! Final states |P, X> are packets of width sigma_f labelled at T1. Summed
//! over X at fixed P they give the momentum filter
//!   int d^3X/(2 pi)^3 |P, X><P, X| = (sigma_f/pi)^{3/2} exp(-sigma_f (p - P)^2),
//! which commutes with free evolution. Every X-summed quantity is therefore a
//! Gaussian integral; only the P grid (Gauss-Hermite, 12^3 by default) and
//! the time integrals are numerical. The second-order amplitude propagates
//! V phi_1(t') freely to t, which is the packet completeness sum between the
//! two vertices done in closed form; `s2_integrand_lattice` does the same sum
//! on an explicit packet lattice as a cross-check.

use super::gauss3::{packet_g3, potential_g3, G1, G3};
use super::{GaussianPotential3D, Packet3D, ScatterError, TimeWindow, Vec3};
use crate::par::{map_indexed, tree_sum, tree_sum_real};
use crate::quadrature::{gauss_hermite_nodes, gauss_legendre_nodes};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    P0,
    P1,
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderConfig {
    /// width of the final packets; None takes the initial width
    pub final_sigma: Option<f64>,
    /// Gauss-Hermite nodes per momentum axis
    pub n_p: usize,
    pub time_panels: usize,
    pub nodes_per_panel: usize,
    /// relative change between full and half time resolution above which the
    /// result is flagged as not converged
    pub time_tol: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig { final_sigma: None, n_p: 12, time_panels: 16, nodes_per_panel: 8, time_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityReport {
    pub order: Order,
    /// P0, P1, or |S1|^2 + (S0 S2* + c.c.) summed, depending on `order`
    pub value: f64,
    /// sum of |dP1| over the momentum grid (P1 only)
    pub abs_scale: f64,
    pub s1_sq: f64,
    pub s0_s2: f64,
    /// |s0_s2 + s1_sq| / s1_sq (P2 only)
    pub unitarity_residual: f64,
    /// change of the time-integrated sums between full and half resolution
    pub time_error: f64,
    pub converged: bool,
    pub grid_points: usize,
}

fn exact_packet(p: &Packet3D, t: f64) -> G3 {
    packet_g3(p.sigma, p.p, p.x, p.x).evolve(C64::new(t - p.t, 0.0))
}

fn composite_gl(lo: f64, hi: f64, panels: usize, nodes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * nodes.len());
    for k in 0..panels {
        let (a, b) = (lo + k as f64 * h, lo + (k + 1) as f64 * h);
        for &(x, w) in nodes {
            out.push((0.5 * (a + b) + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

fn check_nonrel(p: &Packet3D) -> Result<(), ScatterError> {
    match p.dispersion {
        super::Dispersion::NonRelativistic => Ok(()),
        _ => Err(ScatterError::Unsupported("exact evolution is implemented for E = p^2/2 only".into())),
    }
}

struct Setup {
    v: G3,
    g: f64,
    phi1: Packet3D,
    t_end: f64,
}

impl Setup {
    fn phi1_at(&self, t: f64) -> G3 {
        exact_packet(&self.phi1, t)
    }

    /// U(T_end - t) V phi_1(t), without g
    fn psi(&self, t: f64) -> G3 {
        self.v.mul(self.phi1_at(t)).evolve(C64::new(self.t_end - t, 0.0))
    }

    /// U(T_end - t) V U(t - tp) V phi_1(tp), without g^2
    fn xi(&self, t: f64, tp: f64) -> G3 {
        let inner = self.v.mul(self.phi1_at(tp)).evolve(C64::new(t - tp, 0.0));
        self.v.mul(inner).evolve(C64::new(self.t_end - t, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactAmplitudes {
    pub s0: C64,
    pub s1: C64,
    pub s2: C64,
}

/// S0, S1, S2 for one final packet (labelled at its own reference time),
/// time integrals on a composite Gauss-Legendre grid.
pub fn exact_amplitudes(
    initial: &Packet3D,
    final_: &Packet3D,
    pot: &GaussianPotential3D,
    window: &TimeWindow,
    cfg: &LadderConfig,
) -> Result<ExactAmplitudes, ScatterError> {
    check_nonrel(initial)?;
    check_nonrel(final_)?;
    let su = Setup { v: potential_g3(pot.sigma_v, pot.x_v), g: pot.g, phi1: *initial, t_end: final_.t };
    let phi2 = exact_packet(final_, final_.t);
    let gl = gauss_legendre_nodes(cfg.nodes_per_panel)?;
    let tn = composite_gl(window.t0, window.t1, cfg.time_panels, &gl);
    let s0 = phi2.inner(su.phi1_at(final_.t));
    let s1: C64 = tn.iter().map(|&(t, w)| phi2.inner(su.psi(t)) * w).sum();
    let mut s2 = C64::new(0.0, 0.0);
    for &(t, w) in &tn {
        for &(tp, wp) in &composite_gl(window.t0, t, cfg.time_panels, &gl) {
            s2 += phi2.inner(su.xi(t, tp)) * w * wp;
        }
    }
    Ok(ExactAmplitudes { s0, s1: C64::new(0.0, -su.g) * s1, s2: -su.g * su.g * s2 })
}

/// <phi_2(t)| V U(t - tp) V |phi_1(tp)>
pub fn s2_integrand(initial: &Packet3D, final_: &Packet3D, pot: &GaussianPotential3D, t: f64, tp: f64) -> C64 {
    let v = potential_g3(pot.sigma_v, pot.x_v);
    let left = exact_packet(final_, t).conj().mul(v);
    let right = v.mul(exact_packet(initial, tp)).evolve(C64::new(t - tp, 0.0));
    left.mul(right).integral()
}

/// Uniform lattice of intermediate packets, identical on every axis up to
/// the per-axis centres.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketLattice {
    pub sigma: f64,
    pub x_center: Vec3,
    pub p_center: Vec3,
    /// half extents
    pub x_half: f64,
    pub p_half: f64,
    pub nx: usize,
    pub np: usize,
}

impl PacketLattice {
    /// spacing at most sqrt(sigma)/2 in x and 1/(2 sqrt(sigma)) in p
    pub fn new(sigma: f64, x_center: Vec3, p_center: Vec3, x_half: f64, p_half: f64) -> Self {
        let nx = (2.0 * x_half / (0.5 * sigma.sqrt())).ceil() as usize + 1;
        let np = (2.0 * p_half / (0.5 / sigma.sqrt())).ceil() as usize + 1;
        PacketLattice { sigma, x_center, p_center, x_half, p_half, nx, np }
    }

    fn axis(&self, i: usize) -> (Vec<f64>, f64, Vec<f64>, f64) {
        let grid = |c: f64, h: f64, n: usize| {
            let d = 2.0 * h / (n - 1) as f64;
            ((0..n).map(|k| c - h + k as f64 * d).collect::<Vec<_>>(), d)
        };
        let (xs, dx) = grid(self.x_center[i], self.x_half, self.nx);
        let (ps, dp) = grid(self.p_center[i], self.p_half, self.np);
        (xs, dx, ps, dp)
    }
}

/// Same as `s2_integrand` with sum_gamma |gamma(t)><gamma(tp)| in place of
/// U(t - tp); gamma are packets of the lattice labelled at tp.
pub fn s2_integrand_lattice(
    initial: &Packet3D,
    final_: &Packet3D,
    pot: &GaussianPotential3D,
    t: f64,
    tp: f64,
    lat: &PacketLattice,
) -> C64 {
    let v = potential_g3(pot.sigma_v, pot.x_v);
    let left = exact_packet(final_, t).conj().mul(v);
    let right = v.mul(exact_packet(initial, tp));
    let ln_n = -0.25 * (PI * lat.sigma).ln();
    let mut total = C64::new(1.0, 0.0);
    for i in 0..3 {
        let (xs, dx, ps, dp) = lat.axis(i);
        let mut acc = C64::new(0.0, 0.0);
        for &x in &xs {
            for &p in &ps {
                let gam = G1 {
                    a: C64::new(0.5 / lat.sigma, 0.0),
                    b: C64::new(x / lat.sigma, p),
                    c: C64::new(-x * x / (2.0 * lat.sigma) + ln_n, -p * x),
                };
                let l = left.0[i].mul(gam.evolve(C64::new(t - tp, 0.0))).ln_integral();
                let r = gam.conj().mul(right.0[i]).ln_integral();
                acc += (l + r).exp();
            }
        }
        total *= acc * dx * dp / (2.0 * PI);
    }
    total
}

struct PGrid {
    points: Vec<(Vec3, f64)>,
}

fn hermite_grid(center: Vec3, scale: f64, n: usize) -> Result<PGrid, ScatterError> {
    let nodes = gauss_hermite_nodes(n)?;
    let mut points = Vec::with_capacity(n * n * n);
    for &(x0, w0) in &nodes {
        for &(x1, w1) in &nodes {
            for &(x2, w2) in &nodes {
                let wt = w0 * w1 * w2 * (x0 * x0 + x1 * x1 + x2 * x2).exp() * scale.powi(3);
                points.push(([center[0] + scale * x0, center[1] + scale * x1, center[2] + scale * x2], wt));
            }
        }
    }
    Ok(PGrid { points })
}

struct TimeNodes {
    outer: Vec<(f64, f64)>,
    /// per outer node: inner nodes on [T0, t]
    inner: Vec<Vec<(f64, f64)>>,
}

fn time_nodes(window: &TimeWindow, panels: usize, npp: usize) -> Result<TimeNodes, ScatterError> {
    let gl = gauss_legendre_nodes(npp)?;
    let outer = composite_gl(window.t0, window.t1, panels, &gl);
    let inner = outer.iter().map(|&(t, _)| composite_gl(window.t0, t, panels, &gl)).collect();
    Ok(TimeNodes { outer, inner })
}

/// per momentum node: (X-summed 2 Re S0* S1, |S1|^2, 2 Re S0* S2)
fn ladder_densities(su: &Setup, sf: f64, grid: &PGrid, tn: &TimeNodes, want_s2: bool) -> Vec<(f64, f64, f64)> {
    let phi_end = su.phi1_at(su.t_end);
    let psis: Vec<G3> = tn.outer.iter().map(|&(t, _)| su.psi(t)).collect();
    let xis: Vec<Vec<(G3, f64)>> = if want_s2 {
        tn.outer
            .iter()
            .zip(&tn.inner)
            .map(|(&(t, w), inn)| inn.iter().map(|&(tp, wp)| (su.xi(t, tp), w * wp)).collect())
            .collect()
    } else {
        Vec::new()
    };
    let g = su.g;
    map_indexed(grid.points.len(), |k| {
        let (p, _) = grid.points[k];
        let left = phi_end.momentum_filter(sf, p).conj();
        // X-summed S0* S1 = -i g sum_t w <phi_1(T)| Pi |psi(t)>
        let a: Vec<C64> = psis.iter().zip(&tn.outer).map(|(ps, &(_, w))| left.mul(*ps).integral() * w).collect();
        let s0s1 = C64::new(0.0, -g) * tree_sum(&a);
        // |S1|^2 summed over X: g^2 sum_{a,b} w_a w_b <psi_b| Pi |psi_a>, Hermitian in (a, b)
        let filt: Vec<G3> = psis.iter().map(|ps| ps.momentum_filter(sf, p)).collect();
        let mut rows = Vec::with_capacity(psis.len());
        for i in 0..psis.len() {
            let ci = psis[i].conj();
            let mut row = Vec::with_capacity(i + 1);
            for (j, f) in filt.iter().enumerate().take(i + 1) {
                let v = ci.mul(*f).integral() * tn.outer[i].1 * tn.outer[j].1;
                row.push(if j == i { 0.5 * v.re } else { v.re });
            }
            rows.push(tree_sum_real(&row));
        }
        let s1sq = 2.0 * g * g * tree_sum_real(&rows);
        let s0s2 = if want_s2 {
            let parts: Vec<C64> = xis.iter().map(|row| {
                let v: Vec<C64> = row.iter().map(|&(x, w)| left.mul(x).integral() * w).collect();
                tree_sum(&v)
            }).collect();
            2.0 * (-g * g * tree_sum(&parts)).re
        } else {
            0.0
        };
        (2.0 * s0s1.re, s1sq, s0s2)
    })
}

/// P0, P1 or the second-order unitarity check, summed over final packets of
/// width sigma_f labelled at T1.
pub fn total_probability(
    order: Order,
    initial: &Packet3D,
    pot: &GaussianPotential3D,
    window: &TimeWindow,
    cfg: &LadderConfig,
) -> Result<ProbabilityReport, ScatterError> {
    check_nonrel(initial)?;
    if cfg.n_p < 2 || cfg.time_panels < 2 || cfg.nodes_per_panel < 2 {
        return Err(ScatterError::InvalidParameter("ladder grid too coarse".into()));
    }
    let sf = cfg.final_sigma.unwrap_or(initial.sigma);
    if !(sf > 0.0) {
        return Err(ScatterError::InvalidParameter(format!("final sigma must be positive, got {sf}")));
    }
    let su = Setup { v: potential_g3(pot.sigma_v, pot.x_v), g: pot.g, phi1: *initial, t_end: window.t1 };
    // forward momentum spread; the scattered wave is wider by the potential
    let fwd = (1.0 / initial.sigma + 1.0 / sf).sqrt();
    let scat = (1.0 / initial.sigma + 2.0 / pot.sigma_v + 1.0 / sf).sqrt();
    let mut rep = ProbabilityReport {
        order,
        value: 0.0,
        abs_scale: 0.0,
        s1_sq: 0.0,
        s0_s2: 0.0,
        unitarity_residual: 0.0,
        time_error: 0.0,
        converged: true,
        grid_points: cfg.n_p.pow(3),
    };
    match order {
        Order::P0 => {
            let grid = hermite_grid(initial.p, fwd, cfg.n_p)?;
            let phi = su.phi1_at(window.t1);
            let v = map_indexed(grid.points.len(), |k| {
                let (p, w) = grid.points[k];
                phi.inner(phi.momentum_filter(sf, p)).re * w
            });
            rep.value = tree_sum_real(&v);
        }
        Order::P1 | Order::P2 => {
            let grid = hermite_grid(initial.p, scat, cfg.n_p)?;
            let want_s2 = order == Order::P2;
            let sums = |panels: usize| -> Result<(f64, f64, f64, f64), ScatterError> {
                let tn = time_nodes(window, panels, cfg.nodes_per_panel)?;
                let d = ladder_densities(&su, sf, &grid, &tn, want_s2);
                let w: Vec<f64> = grid.points.iter().map(|&(_, w)| w).collect();
                let col = |f: &dyn Fn(&(f64, f64, f64)) -> f64| {
                    tree_sum_real(&d.iter().zip(&w).map(|(x, w)| f(x) * w).collect::<Vec<_>>())
                };
                Ok((col(&|x| x.0), col(&|x| x.0.abs()), col(&|x| x.1), col(&|x| x.2)))
            };
            let full = sums(cfg.time_panels)?;
            let half = sums((cfg.time_panels / 2).max(1))?;
            rep.abs_scale = full.1;
            rep.s1_sq = full.2;
            rep.s0_s2 = full.3;
            if order == Order::P1 {
                rep.value = full.0;
                rep.time_error = (full.0 - half.0).abs();
                rep.converged = rep.time_error <= cfg.time_tol * full.1.max(f64::MIN_POSITIVE);
            } else {
                rep.value = full.2 + full.3;
                rep.unitarity_residual = (full.2 + full.3).abs() / full.2;
                rep.time_error = (full.2 - half.2).abs().max((full.3 - half.3).abs());
                rep.converged = rep.time_error <= cfg.time_tol * full.2.abs().max(f64::MIN_POSITIVE);
            }
        }
    }
    Ok(rep)
}
