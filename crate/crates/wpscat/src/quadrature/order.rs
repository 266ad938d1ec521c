//! Iterated phase-space integrals with an explicit nesting order.
//!
//! For `Zeta1First` the inner integral over zeta1 = (P1, X1) is done over its
//! whole box at every outer point, and the outer integral over zeta2 has its
//! momentum range cut at +-Lambda around the box centre. Partial values are
//! accumulated shell by shell, so the sequence is monotone in Lambda by
//! construction. `Zeta2First` swaps the roles.

use super::adaptive::{integrate_adaptive_with, QuadConfig, QuadResult, Region};
use super::QuadError;
use num_complex::Complex64 as C64;
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestingOrder {
    Zeta1First,
    Zeta2First,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedRegion {
    /// (P1, X1) box
    pub zeta1: Region,
    /// (P2, X2) box
    pub zeta2: Region,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialIntegral {
    pub cutoff: f64,
    pub result: QuadResult,
}

pub fn order_sensitive_integral<F>(
    f: F,
    region: &NestedRegion,
    cutoffs: &[f64],
    order: NestingOrder,
    inner_cfg: &QuadConfig,
    outer_cfg: &QuadConfig,
) -> Result<Vec<PartialIntegral>, QuadError>
where
    F: Fn([f64; 2], [f64; 2]) -> C64 + Sync,
{
    if region.zeta1.dim() != 2 || region.zeta2.dim() != 2 {
        return Err(QuadError::BadRegion("both phase-space boxes must be two-dimensional".into()));
    }
    if cutoffs.is_empty() || cutoffs[0] <= 0.0 || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QuadError::BadRegion("cutoffs must be positive and increasing".into()));
    }
    let (inner, outer) = match order {
        NestingOrder::Zeta1First => (&region.zeta1, &region.zeta2),
        NestingOrder::Zeta2First => (&region.zeta2, &region.zeta1),
    };
    let pc = 0.5 * (outer.lo[0] + outer.hi[0]);
    let (xlo, xhi) = (outer.lo[1], outer.hi[1]);
    let worst_inner = Mutex::new(0.0f64);
    let inner_failed = Mutex::new(false);

    let outer_integrand = |z: &[f64]| -> C64 {
        let zo = [z[0], z[1]];
        let g = |w: &[f64]| {
            let zi = [w[0], w[1]];
            match order {
                NestingOrder::Zeta1First => f(zi, zo),
                NestingOrder::Zeta2First => f(zo, zi),
            }
        };
        match integrate_adaptive_with(g, inner, inner_cfg) {
            Ok(q) => {
                let mut m = worst_inner.lock().unwrap();
                *m = m.max(q.error_estimate);
                if !q.converged {
                    *inner_failed.lock().unwrap() = true;
                }
                q.value
            }
            Err(_) => {
                *inner_failed.lock().unwrap() = true;
                C64::new(f64::NAN, 0.0)
            }
        }
    };

    let mut out = Vec::with_capacity(cutoffs.len());
    let mut acc = C64::new(0.0, 0.0);
    let mut acc_err = 0.0;
    let mut evals = 0usize;
    let mut converged = true;
    let mut prev = 0.0;
    for &lam in cutoffs {
        let strips: Vec<(f64, f64)> = if prev == 0.0 {
            vec![(pc - lam, pc + lam)]
        } else {
            vec![(pc - lam, pc - prev), (pc + prev, pc + lam)]
        };
        for (a, b) in strips {
            let r = Region::new(vec![a, xlo], vec![b, xhi])?;
            let q = integrate_adaptive_with(&outer_integrand, &r, outer_cfg)?;
            acc += q.value;
            acc_err += q.error_estimate + r.volume() * *worst_inner.lock().unwrap();
            evals += q.evaluations;
            converged &= q.converged;
        }
        prev = lam;
        out.push(PartialIntegral {
            cutoff: lam,
            result: QuadResult {
                value: acc,
                error_estimate: acc_err,
                evaluations: evals,
                converged: converged && !*inner_failed.lock().unwrap(),
                truncation_bound: 0.0,
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integrand_order_independent() {
        let b = Region::new(vec![-6.0, -6.0], vec![6.0, 6.0]).unwrap();
        let region = NestedRegion { zeta1: b.clone(), zeta2: b };
        let f = |a: [f64; 2], c: [f64; 2]| {
            let r = a[0] * a[0] + a[1] * a[1] + c[0] * c[0] + c[1] * c[1] + 0.5 * (a[0] - c[0]).powi(2);
            C64::new((-0.5 * r).exp(), 0.2 * (-r).exp())
        };
        let inner = QuadConfig::abs(1e-6);
        let outer = QuadConfig::abs(1e-5);
        let cut = [2.0, 4.0, 6.0];
        let a = order_sensitive_integral(f, &region, &cut, NestingOrder::Zeta1First, &inner, &outer).unwrap();
        let c = order_sensitive_integral(f, &region, &cut, NestingOrder::Zeta2First, &inner, &outer).unwrap();
        let (x, y) = (a.last().unwrap().result, c.last().unwrap().result);
        assert!((x.value - y.value).norm() <= 2.0 * (x.error_estimate + y.error_estimate));
        assert!(a.windows(2).all(|w| w[0].cutoff < w[1].cutoff));
        // closed form: 4 pi^2 / sqrt 2 + 0.2 i 2 pi^2 / sqrt 8
        let pi2 = std::f64::consts::PI.powi(2);
        let exact = C64::new(4.0 * pi2 / 2f64.sqrt(), 0.2 * 2.0 * pi2 / 8f64.sqrt());
        assert!((x.value - exact).norm() <= x.error_estimate.max(1e-4), "{} {}", x.value, exact);
    }
}
