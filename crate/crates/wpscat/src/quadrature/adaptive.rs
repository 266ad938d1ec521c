//! Globally adaptive h-refinement: 7/15 Gauss-Kronrod in one dimension,
//! Genz-Malik degree 7/5 embedded pair in two or more.
//!
//! Cells are refined largest-error-first; ties go to the lower cell index.
//! Each round pops a fixed number of cells, so the sequence of states does not
//! depend on how many worker threads evaluate the children.

use super::gauss::{WG, WGK, XGK};
use super::QuadError;
use crate::par;
use crate::special_fn::erfc_complex;
use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTruncation {
    pub center: Vec<f64>,
    /// standard deviation of the integrand envelope per dimension
    pub width: Vec<f64>,
    pub n_sigmas: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub truncation: Option<GaussianTruncation>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Region, QuadError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(QuadError::BadRegion("bounds must be non-empty and of equal length".into()));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(QuadError::BadRegion(format!("dimension {i}: need finite lower < upper, got [{a}, {b}]")));
            }
        }
        Ok(Region { lo, hi, truncation: None })
    }

    /// Box center +- n_sigmas * width, remembering the Gaussian envelope so the
    /// dropped tail can be bounded separately.
    pub fn gaussian_truncated(center: Vec<f64>, width: Vec<f64>, n_sigmas: f64) -> Result<Region, QuadError> {
        if n_sigmas < 4.0 {
            return Err(QuadError::BadRegion(format!("n_sigmas must be >= 4, got {n_sigmas}")));
        }
        if center.len() != width.len() || width.iter().any(|w| !(*w > 0.0)) {
            return Err(QuadError::BadRegion("widths must be positive, one per dimension".into()));
        }
        let lo = center.iter().zip(&width).map(|(c, w)| c - n_sigmas * w).collect();
        let hi = center.iter().zip(&width).map(|(c, w)| c + n_sigmas * w).collect();
        let mut r = Region::new(lo, hi)?;
        r.truncation = Some(GaussianTruncation { center, width, n_sigmas });
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Fraction of a unit-mass Gaussian envelope lying outside the box.
    pub fn truncated_mass_fraction(&self) -> f64 {
        match &self.truncation {
            None => 0.0,
            Some(t) => {
                let tail = erfc_complex(C64::new(t.n_sigmas / std::f64::consts::SQRT_2, 0.0)).map(|v| v.re).unwrap_or(0.0);
                1.0 - (1.0 - tail).powi(self.dim() as i32)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol_abs: 1e-10, tol_rel: 0.0, max_evals: 4_000_000 }
    }
}

impl QuadConfig {
    pub fn abs(tol: f64) -> Self {
        QuadConfig { tol_abs: tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// |value| times the Gaussian mass outside a truncated region, kept apart
    /// from the discretisation error.
    pub truncation_bound: f64,
}

#[derive(Debug, Clone)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: C64,
    err: f64,
    split: usize,
}

#[derive(PartialEq)]
struct Key {
    err: f64,
    idx: usize,
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.idx.cmp(&self.idx))
    }
}

const BATCH: usize = 16;

fn rule_points(dim: usize) -> usize {
    if dim == 1 {
        15
    } else {
        1 + 4 * dim + 2 * dim * (dim - 1) + (1usize << dim)
    }
}

fn gk15<F: Fn(&[f64]) -> C64>(f: &F, lo: f64, hi: f64) -> (C64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(&[c]);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(&[c - x]) + f(&[c + x]);
        resk += s * WGK[j];
        if j % 2 == 1 {
            resg += s * WG[j / 2];
        }
    }
    (resk * h, ((resk - resg) * h).norm())
}

fn genz_malik<F: Fn(&[f64]) -> C64>(f: &F, lo: &[f64], hi: &[f64]) -> (C64, f64, usize) {
    let n = lo.len();
    let nf = n as f64;
    let l2 = (9.0f64 / 70.0).sqrt();
    let l4 = (9.0f64 / 10.0).sqrt();
    let l5 = (9.0f64 / 19.0).sqrt();
    let w1 = (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0;
    let w2 = 980.0 / 6561.0;
    let w3 = (1820.0 - 400.0 * nf) / 19683.0;
    let w4 = 200.0 / 19683.0;
    let w5 = 6859.0 / 19683.0 / (1u64 << n) as f64;
    let e1 = (729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0;
    let e2 = 245.0 / 486.0;
    let e3 = (265.0 - 100.0 * nf) / 1458.0;
    let e4 = 25.0 / 729.0;

    let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let vol: f64 = h.iter().map(|x| 2.0 * x).product();
    let mut p = c.clone();
    let f1 = f(&p);
    let mut f2 = C64::new(0.0, 0.0);
    let mut f3 = C64::new(0.0, 0.0);
    let mut best = (0usize, -1.0f64);
    for i in 0..n {
        p[i] = c[i] + l2 * h[i];
        let a = f(&p);
        p[i] = c[i] - l2 * h[i];
        let b = f(&p);
        p[i] = c[i] + l4 * h[i];
        let cc = f(&p);
        p[i] = c[i] - l4 * h[i];
        let d = f(&p);
        p[i] = c[i];
        f2 += a + b;
        f3 += cc + d;
        let dd = (a + b - 2.0 * f1 - (cc + d - 2.0 * f1) / 7.0).norm();
        if dd > best.1 {
            best = (i, dd);
        }
    }
    let mut f4 = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                p[i] = c[i] + si * l4 * h[i];
                p[j] = c[j] + sj * l4 * h[j];
                f4 += f(&p);
            }
            p[i] = c[i];
            p[j] = c[j];
        }
    }
    let mut f5 = C64::new(0.0, 0.0);
    for mask in 0..(1usize << n) {
        for i in 0..n {
            let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
            p[i] = c[i] + s * l5 * h[i];
        }
        f5 += f(&p);
    }
    let i7 = (f1 * w1 + f2 * w2 + f3 * w3 + f4 * w4 + f5 * w5) * vol;
    let i5 = (f1 * e1 + f2 * e2 + f3 * e3 + f4 * e4) * vol;
    (i7, (i7 - i5).norm(), best.0)
}

fn eval_cell<F: Fn(&[f64]) -> C64>(f: &F, lo: Vec<f64>, hi: Vec<f64>) -> Cell {
    if lo.len() == 1 {
        let (value, err) = gk15(f, lo[0], hi[0]);
        Cell { lo, hi, value, err, split: 0 }
    } else {
        let (value, err, split) = genz_malik(f, &lo, &hi);
        Cell { lo, hi, value, err, split }
    }
}

/// Adaptive integration with an absolute tolerance and the default budget.
pub fn integrate_adaptive<F>(f: F, region: &Region, tol: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    integrate_adaptive_with(f, region, &QuadConfig::abs(tol))
}

pub fn integrate_adaptive_with<F>(f: F, region: &Region, cfg: &QuadConfig) -> Result<QuadResult, QuadError>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    if !(cfg.tol_abs > 0.0 || cfg.tol_rel > 0.0) {
        return Err(QuadError::BadTolerance(cfg.tol_abs));
    }
    let per_cell = rule_points(region.dim());
    let first = eval_cell(&f, region.lo.clone(), region.hi.clone());
    let mut evals = per_cell;
    let mut value = first.value;
    let mut err = first.err;
    let mut cells = vec![first];
    let mut active = vec![true];
    let mut heap = BinaryHeap::new();
    heap.push(Key { err, idx: 0 });
    let target = |v: C64| cfg.tol_abs.max(cfg.tol_rel * v.norm());
    let mut best = (err, value);
    let mut converged = err <= target(value);

    while !converged && evals + 2 * per_cell <= cfg.max_evals {
        let room = (cfg.max_evals - evals) / (2 * per_cell);
        let take = BATCH.min(room).min(heap.len()).max(1);
        let mut parents = Vec::with_capacity(take);
        for _ in 0..take {
            if let Some(k) = heap.pop() {
                parents.push(k.idx);
            }
        }
        let halves: Vec<(Vec<f64>, Vec<f64>)> = parents
            .iter()
            .flat_map(|&pi| {
                let c = &cells[pi];
                let d = c.split;
                let mid = 0.5 * (c.lo[d] + c.hi[d]);
                let mut hi_a = c.hi.clone();
                hi_a[d] = mid;
                let mut lo_b = c.lo.clone();
                lo_b[d] = mid;
                [(c.lo.clone(), hi_a), (lo_b, c.hi.clone())]
            })
            .collect();
        let children = par::map_indexed(halves.len(), |i| eval_cell(&f, halves[i].0.clone(), halves[i].1.clone()));
        evals += children.len() * per_cell;
        for &pi in &parents {
            active[pi] = false;
            value -= cells[pi].value;
            err -= cells[pi].err;
        }
        for ch in children {
            value += ch.value;
            err += ch.err;
            heap.push(Key { err: ch.err, idx: cells.len() });
            cells.push(ch);
            active.push(true);
        }
        err = err.max(0.0);
        if err < best.0 {
            best = (err, value);
        }
        converged = err <= target(value);
    }

    // exact totals in index order
    let mut v = C64::new(0.0, 0.0);
    let mut e = 0.0;
    for (c, a) in cells.iter().zip(&active) {
        if *a {
            v += c.value;
            e += c.err;
        }
    }
    let (value, error_estimate) = if e <= best.0 { (v, e) } else { (best.1, best.0) };
    let converged = error_estimate <= target(value);
    Ok(QuadResult {
        value,
        error_estimate,
        evaluations: evals,
        converged,
        truncation_bound: value.norm() * region.truncated_mass_fraction(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrand() {
        let r = Region::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let q = integrate_adaptive(|_| C64::new(0.0, 0.0), &r, 1e-10).unwrap();
        assert_eq!(q.value, C64::new(0.0, 0.0));
        assert_eq!(q.error_estimate, 0.0);
        assert!(q.evaluations > 0 && q.converged);
    }

    #[test]
    fn genz_malik_degree_seven_exact() {
        for dim in 2..=4 {
            let lo = vec![-0.3; dim];
            let hi = vec![1.1; dim];
            let f = |x: &[f64]| {
                let mut s = 1.0;
                for (i, xi) in x.iter().enumerate() {
                    s += xi.powi(7 - i as i32) * 0.5 + xi * xi;
                }
                C64::new(s, x[0] * x[1].powi(3) * x[x.len() - 1].powi(2))
            };
            let (v, _, _) = genz_malik(&f, &lo, &hi);
            // exact by iterated 1D integration with a high-order Gauss rule
            let gl = super::super::gauss::gauss_legendre_nodes(12).unwrap();
            let mut exact = C64::new(0.0, 0.0);
            let mut idx = vec![0usize; dim];
            loop {
                let mut w = 1.0;
                let mut p = vec![0.0; dim];
                for d in 0..dim {
                    let (x, wi) = gl[idx[d]];
                    p[d] = 0.5 * (lo[d] + hi[d]) + 0.5 * (hi[d] - lo[d]) * x;
                    w *= wi * 0.5 * (hi[d] - lo[d]);
                }
                exact += f(&p) * w;
                let mut d = 0;
                while d < dim {
                    idx[d] += 1;
                    if idx[d] < gl.len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == dim {
                    break;
                }
            }
            assert!((v - exact).norm() < 1e-12 * exact.norm(), "dim {dim}: {v} vs {exact}");
        }
    }

    #[test]
    fn one_dimensional_gaussian() {
        let r = Region::new(vec![-10.0], vec![10.0]).unwrap();
        let q = integrate_adaptive(|x| C64::new((-x[0] * x[0]).exp(), 0.0), &r, 1e-12).unwrap();
        assert!((q.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(q.converged);
    }

    #[test]
    fn bad_inputs() {
        assert!(Region::new(vec![1.0], vec![0.0]).is_err());
        assert!(Region::gaussian_truncated(vec![0.0], vec![1.0], 3.0).is_err());
        let r = Region::new(vec![0.0], vec![1.0]).unwrap();
        assert!(integrate_adaptive(|_| C64::new(1.0, 0.0), &r, 0.0).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let r = Region::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let cfg = QuadConfig { tol_abs: 1e-15, tol_rel: 0.0, max_evals: 2000 };
        let q = integrate_adaptive_with(|x| C64::new(1.0 / (x[0] + x[1]).sqrt().max(1e-300), 0.0), &r, &cfg).unwrap();
        assert!(!q.converged);
        assert!(q.evaluations <= 2000);
    }
}
