//! Final-state tables over a (P, X) grid, their energy marginals, and the
//! golden-rule integral of the bulk term over final positions.

use super::amplitude::{dp1_density, dp2_density, interference_density, s1};
use super::kinematics::derived_params;
use super::{axpy, dot, scale, GaussianPotential3D, Packet3D, ScatterError, TimeWindow, Vec3};
use crate::par::map_indexed;
use crate::quadrature::gauss_legendre_nodes;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region3 {
    /// |S0| > 0.5
    OnAxis,
    /// |S0| < 1e-6
    OffAxis,
    All,
}

impl Region3 {
    pub fn contains(&self, s0_abs: f64) -> bool {
        match self {
            Region3::OnAxis => s0_abs > 0.5,
            Region3::OffAxis => s0_abs < 1e-6,
            Region3::All => true,
        }
    }
}

/// Uniform midpoint grid of final packets labelled at T1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalGrid {
    pub sigma: f64,
    pub p_center: Vec3,
    pub p_half: f64,
    pub n_p: usize,
    pub x_center: Vec3,
    pub x_half: f64,
    pub n_x: usize,
}

impl FinalGrid {
    /// centred on the initial packet's momentum and on where its centre is at T1
    pub fn around(initial: &Packet3D, window: &TimeWindow, n_p: usize, n_x: usize) -> Self {
        FinalGrid {
            sigma: initial.sigma,
            p_center: initial.p,
            p_half: 3.0 / initial.sigma.sqrt(),
            n_p,
            x_center: initial.center_at(window.t1),
            x_half: 3.0 * initial.sigma.sqrt(),
            n_x,
        }
    }

    fn axis(c: f64, h: f64, n: usize) -> Vec<f64> {
        let d = 2.0 * h / n as f64;
        (0..n).map(|k| c - h + (k as f64 + 0.5) * d).collect()
    }

    /// d^3P d^3X / (2 pi)^3 of one cell
    pub fn cell_measure(&self) -> f64 {
        let dp = 2.0 * self.p_half / self.n_p as f64;
        let dx = 2.0 * self.x_half / self.n_x as f64;
        (dp * dx).powi(3) / (2.0 * PI).powi(3)
    }

    pub fn points(&self) -> Vec<(Vec3, Vec3)> {
        let ax =
            |c: Vec3, h: f64, n: usize| -> Vec<Vec3> {
                let (a, b, d) = (Self::axis(c[0], h, n), Self::axis(c[1], h, n), Self::axis(c[2], h, n));
                let mut out = Vec::with_capacity(n * n * n);
                for &x in &a {
                    for &y in &b {
                        for &z in &d {
                            out.push([x, y, z]);
                        }
                    }
                }
                out
            };
        let ps = ax(self.p_center, self.p_half, self.n_p);
        let xs = ax(self.x_center, self.x_half, self.n_x);
        let mut out = Vec::with_capacity(ps.len() * xs.len());
        for &p in &ps {
            for &x in &xs {
                out.push((p, x));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub p: Vec3,
    pub x: Vec3,
    pub e: f64,
    pub s0_abs: f64,
    /// |S0|^2
    pub dp0: f64,
    /// phase-aligned S0 S1* + c.c. with the exact time integral
    pub dp1: f64,
    pub dp2_bulk: f64,
    pub dp2_boundary: f64,
    /// |S1|^2 - bulk - boundary
    pub dp2_cross: f64,
    /// leading-edge (Q1) form of the interference term
    pub interference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBin {
    pub e_lo: f64,
    pub e_hi: f64,
    pub dp0: f64,
    pub dp1: f64,
    pub dp2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub region: Region3,
    pub rows: Vec<Row>,
    pub cell_measure: f64,
    pub energy_bins: Vec<EnergyBin>,
}

impl DistributionTable {
    /// sums of dP0, dP1, |S1|^2 over the rows, times the cell measure
    pub fn totals(&self) -> (f64, f64, f64) {
        let w = self.cell_measure;
        let mut t = (0.0, 0.0, 0.0);
        for r in &self.rows {
            t.0 += r.dp0 * w;
            t.1 += r.dp1 * w;
            t.2 += (r.dp2_bulk + r.dp2_boundary + r.dp2_cross) * w;
        }
        t
    }

    pub const CSV_HEADER: &'static str = "Px,Py,Pz,Xx,Xy,Xz,E,dP0,dP1,dP2_bulk,dP2_boundary,interference";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.p[0], r.p[1], r.p[2], r.x[0], r.x[1], r.x[2], r.e, r.dp0, r.dp1, r.dp2_bulk, r.dp2_boundary,
                r.interference
            ));
        }
        s
    }
}

pub fn distributions(
    initial: &Packet3D,
    pot: &GaussianPotential3D,
    window: &TimeWindow,
    grid: &FinalGrid,
    region: Region3,
    n_bins: usize,
) -> Result<DistributionTable, ScatterError> {
    if n_bins == 0 || grid.n_p == 0 || grid.n_x == 0 {
        return Err(ScatterError::InvalidParameter("empty grid".into()));
    }
    let base = Packet3D { sigma: grid.sigma, t: window.t1, ..*initial };
    let pts = grid.points();
    let rows: Vec<Result<Option<Row>, ScatterError>> = map_indexed(pts.len(), |k| {
        let (p, x) = pts[k];
        let f = base.with_center(p, x);
        let parts = s1(initial, &f, pot, window)?;
        let s0a = parts.s0.norm();
        if !region.contains(s0a) {
            return Ok(None);
        }
        let d2 = dp2_density(&parts);
        // away from the beam S0 is dropped and only |S1|^2 is tabulated
        let keep_s0 = if region == Region3::OffAxis { 0.0 } else { 1.0 };
        Ok(Some(Row {
            p,
            x,
            e: f.energy(),
            s0_abs: s0a,
            dp0: keep_s0 * s0a * s0a,
            dp1: keep_s0 * dp1_density(&parts),
            dp2_bulk: d2.bulk,
            dp2_boundary: d2.boundary,
            dp2_cross: d2.total - d2.bulk - d2.boundary,
            interference: keep_s0 * interference_density(initial, &f, pot, window)?,
        }))
    });
    let mut kept = Vec::new();
    for r in rows {
        if let Some(r) = r? {
            kept.push(r);
        }
    }
    let w = grid.cell_measure();
    let (lo, hi) = kept.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.e), b.max(r.e)));
    let mut bins = Vec::new();
    if !kept.is_empty() {
        let width = ((hi - lo) / n_bins as f64).max(1e-300);
        bins = (0..n_bins)
            .map(|i| EnergyBin { e_lo: lo + i as f64 * width, e_hi: lo + (i + 1) as f64 * width, dp0: 0.0, dp1: 0.0, dp2: 0.0 })
            .collect();
        for r in &kept {
            let i = (((r.e - lo) / width) as usize).min(n_bins - 1);
            bins[i].dp0 += r.dp0 * w;
            bins[i].dp1 += r.dp1 * w;
            bins[i].dp2 += (r.dp2_bulk + r.dp2_boundary + r.dp2_cross) * w;
        }
    }
    Ok(DistributionTable { region, rows: kept, cell_measure: w, energy_bins: bins })
}

/// int d^3X/(2 pi)^3 of the bulk |S1|^2 term at fixed final momentum.
///
/// T_int is affine in the final position X and R is a positive semidefinite
/// quadratic in X, so with X = s n + y (n along grad T_int) the y-integral is
/// Gaussian and only s, which runs over the window, is done numerically.
pub fn golden_rule_bulk(
    initial: &Packet3D,
    p_final: Vec3,
    sigma_final: f64,
    pot: &GaussianPotential3D,
    window: &TimeWindow,
) -> Result<f64, ScatterError> {
    let base = Packet3D { sigma: sigma_final, p: p_final, x: initial.center_at(window.t1), t: window.t1, ..*initial };
    let at = |x: Vec3| derived_params(initial, &base.with_center(p_final, x), pot);
    let x0 = base.x;
    let k0 = at(x0)?;
    let h = sigma_final.sqrt();
    let e = [[h, 0.0, 0.0], [0.0, h, 0.0], [0.0, 0.0, h]];
    let r = |x: Vec3| at(x).map(|k| k.r_traj);
    let mut grad_t = [0.0; 3];
    let mut grad_r = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    let rp: Vec<f64> = (0..3).map(|i| r(axpy(1.0, e[i], x0))).collect::<Result<_, _>>()?;
    let rm: Vec<f64> = (0..3).map(|i| r(axpy(-1.0, e[i], x0))).collect::<Result<_, _>>()?;
    for i in 0..3 {
        grad_t[i] = (at(axpy(1.0, e[i], x0))?.t_int - k0.t_int) / h;
        grad_r[i] = (rp[i] - rm[i]) / (2.0 * h);
        hess[i][i] = (rp[i] - 2.0 * k0.r_traj + rm[i]) / (h * h);
        for j in 0..i {
            let rij = r(axpy(1.0, e[j], axpy(1.0, e[i], x0)))?;
            hess[i][j] = (rij - rp[i] - rp[j] + k0.r_traj) / (h * h);
            hess[j][i] = hess[i][j];
        }
    }
    let gn = dot(grad_t, grad_t).sqrt();
    if !(gn > 0.0) {
        return Err(ScatterError::Degenerate("T_int does not depend on the final position".into()));
    }
    let n = scale(1.0 / gn, grad_t);
    let a = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let v = axpy(-dot(a, n), n, a);
        scale(1.0 / dot(v, v).sqrt(), v)
    };
    let e2 = [n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]];
    let hv = |v: Vec3| -> Vec3 { std::array::from_fn(|i| dot(hess[i], v)) };
    // R(x0 + s n + y) = R0 + grad.(s n + y) + (s n + y).H.(s n + y)/2
    let a11 = dot(e1, hv(e1));
    let a12 = dot(e1, hv(e2));
    let a22 = dot(e2, hv(e2));
    let det = a11 * a22 - a12 * a12;
    if !(det > 0.0) {
        return Err(ScatterError::Degenerate("trajectory factor is flat across the beam".into()));
    }
    let hn = hv(n);
    let nhn = dot(n, hn);
    let amp = {
        let dp2 = dot(k0.delta_p, k0.delta_p);
        let m = pot.g
            * pot.amplitude()
            * initial.norm_const()
            * base.norm_const()
            * (2.0 * PI * k0.sigma_s).powf(1.5)
            * (2.0 * PI * k0.sigma_t).sqrt();
        m * m * (-k0.sigma_s * dp2 - k0.sigma_t * k0.delta_omega * k0.delta_omega).exp() / (2.0 * PI).powi(3)
    };
    let gauss_y = |s: f64| {
        let b1 = dot(e1, grad_r) + s * dot(e1, hn);
        let b2 = dot(e2, grad_r) + s * dot(e2, hn);
        let c = k0.r_traj + s * dot(n, grad_r) + 0.5 * s * s * nhn;
        // int d^2y exp(-(y.A.y/2 + b.y + c))
        let quad = (a22 * b1 * b1 - 2.0 * a12 * b1 * b2 + a11 * b2 * b2) / det;
        2.0 * PI / det.sqrt() * (0.5 * quad - c).exp()
    };
    let s_lo = (window.t0 - k0.t_int) / gn;
    let s_hi = (window.t1 - k0.t_int) / gn;
    let gl = gauss_legendre_nodes(16)?;
    let panels = 64;
    let hs = (s_hi - s_lo) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let (lo, hi) = (s_lo + k as f64 * hs, s_lo + (k + 1) as f64 * hs);
        for &(x, w) in &gl {
            acc += gauss_y(0.5 * (lo + hi) + 0.5 * (hi - lo) * x) * 0.5 * (hi - lo) * w;
        }
    }
    Ok(amp * acc)
}
