//! Fixed Gauss rules: Hermite (weight e^{-x^2}), Legendre on [-1, 1], and the
//! 7/15 Gauss-Kronrod pair.

use super::QuadError;
use std::f64::consts::PI;

/// Nodes and weights for  integral f(x) e^{-x^2} dx,  ascending in x.
///
/// Golub-Welsch: eigenvalues of the Jacobi matrix by implicit QL, then one or
/// two Newton steps on the orthonormal recurrence, which also gives the
/// weights 2 / (sqrt(2n) p_{n-1})^2 to full relative accuracy.
pub fn gauss_hermite_nodes(n: usize) -> Result<Vec<(f64, f64)>, QuadError> {
    if !(1..=200).contains(&n) {
        return Err(QuadError::OrderOutOfRange { n, min: 1, max: 200 });
    }
    let pim4 = PI.powf(-0.25);
    let mut d = vec![0.0; n];
    let mut e: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    e.push(0.0);
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(|a, b| a.total_cmp(b));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // symmetric pairs: polish the non-negative half and mirror it
        let j = n - 1 - i;
        let mut z = if j < i { -d[j] } else { d[i] }.abs();
        for _ in 0..4 {
            let (p1, p2) = hermite_orthonormal(n, z, pim4);
            let dz = p1 / ((2.0 * n as f64).sqrt() * p2);
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        let (_, p2) = hermite_orthonormal(n, z, pim4);
        let pp = (2.0 * n as f64).sqrt() * p2;
        let x = if i < n / 2 { -z } else { z };
        out.push((x, 2.0 / (pp * pp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Eigenvalues of a symmetric tridiagonal matrix (diagonal d, off-diagonal
/// e[0..n-1], e[n-1] unused) by implicit QL with Wilkinson shifts.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// (p_n(z), p_{n-1}(z)) of the orthonormal Hermite family.
fn hermite_orthonormal(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
    }
    (p1, p2)
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre_nodes(n: usize) -> Result<Vec<(f64, f64)>, QuadError> {
    if !(1..=1000).contains(&n) {
        return Err(QuadError::OrderOutOfRange { n, min: 1, max: 1000 });
    }
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        if n == 1 {
            out[0] = (0.0, 2.0);
            break;
        }
        for _ in 0..100 {
            let (p1, p2) = legendre(n, z);
            let dz = p1 / (n as f64 * (z * p1 - p2) / (z * z - 1.0));
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (p1, p2) = legendre(n, z);
        let pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        out[i] = (-z, wi);
        out[n - 1 - i] = (z, wi);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    Ok(out)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
    }
    (p1, p2)
}

/// Kronrod abscissae on [0, 1); odd indices coincide with the 7-point Gauss nodes.
pub(crate) const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
pub(crate) const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
pub(crate) const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Fixed n-point Gauss-Legendre integration of f over [a, b].
pub fn gl_integrate<T, F>(nodes: &[(f64, f64)], a: f64, b: f64, f: F) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: Fn(f64) -> T,
{
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let mut s = T::default();
    for &(x, w) in nodes {
        s = s + f(c + h * x) * w;
    }
    s * h
}
