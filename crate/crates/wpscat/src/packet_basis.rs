//! One-dimensional Gaussian packets |P0, X0> of width sigma, their overlaps
//! and closed-form operator matrix elements.
//!
//!   <x|P0,X0> = N1 exp(i P0 (x - X0) - (x - X0)^2 / (2 sigma)),  N1^2 = (pi sigma)^{-1/2}
//!   <p|P0,X0> = N1 sigma^{1/2} exp(-i p X0 - sigma (p - P0)^2 / 2)
//!
//! with <x|p> = e^{ipx} / sqrt(2 pi). hbar = m = 1.

use crate::quadrature::{integrate_adaptive_with, QuadConfig, QuadError, QuadResult, Region};
use crate::special_fn::erf_real;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PacketError {
    #[error("packet width sigma must be positive and finite, got {0}")]
    BadWidth(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("packets have different widths ({0} vs {1}); use overlap_general")]
    WidthMismatch(f64, f64),
    #[error("unsupported operator: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet1D {
    pub sigma: f64,
    pub p0: f64,
    pub x0: f64,
}

impl Packet1D {
    pub fn new(sigma: f64, p0: f64, x0: f64) -> Result<Self, PacketError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(PacketError::BadWidth(sigma));
        }
        if !p0.is_finite() {
            return Err(PacketError::NonFinite("P0"));
        }
        if !x0.is_finite() {
            return Err(PacketError::NonFinite("X0"));
        }
        Ok(Packet1D { sigma, p0, x0 })
    }

    /// N1^2 = (pi sigma)^{-1/2}
    pub fn n1_sq(&self) -> f64 {
        1.0 / (PI * self.sigma).sqrt()
    }

    pub fn with_center(&self, p0: f64, x0: f64) -> Packet1D {
        Packet1D { sigma: self.sigma, p0, x0 }
    }
}

pub fn position_amplitude(pkt: &Packet1D, x: f64) -> C64 {
    let d = x - pkt.x0;
    let n1 = pkt.n1_sq().sqrt();
    C64::from_polar(n1 * (-d * d / (2.0 * pkt.sigma)).exp(), pkt.p0 * d)
}

pub fn momentum_amplitude(pkt: &Packet1D, p: f64) -> C64 {
    let n1 = pkt.n1_sq().sqrt();
    let d = p - pkt.p0;
    C64::from_polar(n1 * pkt.sigma.sqrt() * (-0.5 * pkt.sigma * d * d).exp(), -p * pkt.x0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Identity,
    X,
    X2,
    PowX(u32),
    P,
    P2,
    PowP(u32),
    DeltaAt0,
    PlaneWave(f64),
    /// 1 + p, the kernel that appears between phase-space integrals of
    /// stationary-state products.
    OnePlusP,
}

impl OperatorKind {
    pub fn name(&self) -> String {
        match self {
            OperatorKind::Identity => "identity".into(),
            OperatorKind::X => "x".into(),
            OperatorKind::X2 => "x2".into(),
            OperatorKind::PowX(n) => format!("x^{n}"),
            OperatorKind::P => "p".into(),
            OperatorKind::P2 => "p2".into(),
            OperatorKind::PowP(n) => format!("p^{n}"),
            OperatorKind::DeltaAt0 => "delta".into(),
            OperatorKind::PlaneWave(k) => format!("exp(i*{k}*x)"),
            OperatorKind::OnePlusP => "1+p".into(),
        }
    }

    /// Parses the CLI spellings: identity, x, x2, x^n, p, p2, p^n, delta,
    /// plane:<k>, 1+p.
    pub fn parse(s: &str) -> Result<OperatorKind, PacketError> {
        let bad = || PacketError::Unsupported(s.to_string());
        Ok(match s {
            "identity" | "1" => OperatorKind::Identity,
            "x" => OperatorKind::X,
            "x2" => OperatorKind::X2,
            "p" => OperatorKind::P,
            "p2" => OperatorKind::P2,
            "delta" => OperatorKind::DeltaAt0,
            "1+p" => OperatorKind::OnePlusP,
            _ => {
                if let Some(n) = s.strip_prefix("x^") {
                    OperatorKind::PowX(n.parse().map_err(|_| bad())?)
                } else if let Some(n) = s.strip_prefix("p^") {
                    OperatorKind::PowP(n.parse().map_err(|_| bad())?)
                } else if let Some(k) = s.strip_prefix("plane:") {
                    let k: f64 = k.parse().map_err(|_| bad())?;
                    if !k.is_finite() {
                        return Err(bad());
                    }
                    OperatorKind::PlaneWave(k)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

fn same_width(a: &Packet1D, b: &Packet1D) -> Result<f64, PacketError> {
    if a.sigma != b.sigma {
        return Err(PacketError::WidthMismatch(a.sigma, b.sigma));
    }
    Ok(a.sigma)
}

fn overlap_raw(sigma: f64, p1: f64, x1: f64, p2: f64, x2: f64) -> C64 {
    let dx = x1 - x2;
    let dp = p1 - p2;
    let re = -dx * dx / (4.0 * sigma) - sigma * dp * dp / 4.0;
    C64::from_polar(re.exp(), 0.5 * (p1 + p2) * dx)
}

/// <a|b> for packets of one common width.
pub fn overlap(a: &Packet1D, b: &Packet1D) -> Result<C64, PacketError> {
    let s = same_width(a, b)?;
    Ok(overlap_raw(s, a.p0, a.x0, b.p0, b.x0))
}

/// <a|b> for arbitrary widths, from the Gaussian integral over x.
pub fn overlap_general(a: &Packet1D, b: &Packet1D) -> C64 {
    // conj(psi_a) psi_b = N exp(-A x^2 + B x + C)
    let (sa, sb) = (a.sigma, b.sigma);
    let aa = 0.5 / sa + 0.5 / sb;
    let bb = C64::new(a.x0 / sa + b.x0 / sb, b.p0 - a.p0);
    let cc = C64::new(-a.x0 * a.x0 / (2.0 * sa) - b.x0 * b.x0 / (2.0 * sb), a.p0 * a.x0 - b.p0 * b.x0);
    let norm = (a.n1_sq() * b.n1_sq()).sqrt();
    norm * (PI / aa).sqrt() * (bb * bb / (4.0 * aa) + cc).exp()
}

/// a(1,2) = (X1 + X2 - i sigma (P1 - P2)) / 2, centre of the x-weight.
pub fn a12(a: &Packet1D, b: &Packet1D) -> C64 {
    C64::new(0.5 * (a.x0 + b.x0), -0.5 * a.sigma * (a.p0 - b.p0))
}

/// b(1,2) = (P1 + P2 + i (X1 - X2) / sigma) / 2, centre of the p-weight.
pub fn b12(a: &Packet1D, b: &Packet1D) -> C64 {
    C64::new(0.5 * (a.p0 + b.p0), 0.5 * (a.x0 - b.x0) / a.sigma)
}

/// int t^{2q} e^{-s t^2} dt / int e^{-s t^2} dt, written as the normalised
/// (-d/ds)^q s^{-1/2}: (2q - 1)!! / (2 s)^q.
fn even_moment(q: u32, s: f64) -> f64 {
    let mut m = 1.0;
    for j in 0..q {
        m *= (2 * j + 1) as f64 / (2.0 * s);
    }
    m
}

fn binomial(n: u32, r: u32) -> f64 {
    let mut c = 1.0;
    for j in 0..r {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// sum_q C(n, 2q) c^{n-2q} m_{2q}(s): the n-th moment of a Gaussian weight
/// e^{-s t^2} shifted to complex centre c. Odd moments vanish.
fn shifted_power(n: u32, c: C64, s: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for q in 0..=n / 2 {
        acc += binomial(n, 2 * q) * c.powu(n - 2 * q) * even_moment(q, s);
    }
    acc
}

pub fn matrix_element(op: OperatorKind, a: &Packet1D, b: &Packet1D) -> Result<C64, PacketError> {
    let s = same_width(a, b)?;
    let o = overlap_raw(s, a.p0, a.x0, b.p0, b.x0);
    Ok(match op {
        OperatorKind::Identity => o,
        // x-weight is exp(-(x - a)^2 / sigma): s = 1/sigma
        OperatorKind::X => a12(a, b) * o,
        OperatorKind::X2 => (s / 2.0 + a12(a, b) * a12(a, b)) * o,
        OperatorKind::PowX(n) => shifted_power(n, a12(a, b), 1.0 / s) * o,
        // p-weight is exp(-sigma (p - b)^2)
        OperatorKind::P => b12(a, b) * o,
        OperatorKind::P2 => (0.5 / s + b12(a, b) * b12(a, b)) * o,
        OperatorKind::PowP(n) => shifted_power(n, b12(a, b), s) * o,
        OperatorKind::OnePlusP => (1.0 + b12(a, b)) * o,
        OperatorKind::DeltaAt0 => {
            let re = -(a.x0 * a.x0 + b.x0 * b.x0) / (2.0 * s);
            a.n1_sq() * C64::from_polar(re.exp(), a.p0 * a.x0 - b.p0 * b.x0)
        }
        OperatorKind::PlaneWave(k) => {
            if !k.is_finite() {
                return Err(PacketError::Unsupported(op.name()));
            }
            let dx = a.x0 - b.x0;
            let dp = a.p0 - b.p0 - k;
            let xi = 0.5 * (a.p0 + b.p0) * dx + 0.5 * k * (a.x0 + b.x0);
            C64::from_polar((-(dx * dx + s * s * dp * dp) / (4.0 * s)).exp(), xi)
        }
    })
}

/// |M(a,b) - conj(M^dagger(b,a))|. For e^{ikx} the adjoint is e^{-ikx}.
pub fn hermiticity_defect(op: OperatorKind, a: &Packet1D, b: &Packet1D) -> Result<f64, PacketError> {
    let adj = match op {
        OperatorKind::PlaneWave(k) => OperatorKind::PlaneWave(-k),
        o => o,
    };
    let m = matrix_element(op, a, b)?;
    let mt = matrix_element(adj, b, a)?;
    Ok((m - mt.conj()).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessConfig {
    /// half-width of the (P, X) box in standard deviations of the integrand
    pub n_sigmas: f64,
    pub quad: QuadConfig,
}

impl Default for CompletenessConfig {
    fn default() -> Self {
        CompletenessConfig { n_sigmas: 8.0, quad: QuadConfig { tol_abs: 1e-10, tol_rel: 0.0, max_evals: 2_000_000 } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    pub value: C64,
    /// closed-form <probe|target>
    pub reference: C64,
    pub quad: QuadResult,
    /// bound on |integrand| mass outside the box
    pub truncation_bound: f64,
    /// converged, and both error estimate and truncation bound below tolerance
    pub ok: bool,
}

/// int dP dX / (2 pi) <probe|P,X><P,X|target> over a box centred on the
/// midpoint of the two packets.
///
/// |<probe|Z><Z|target>| = |<probe|target>|^{1/2} G(Z) with G a unit-mass
/// Gaussian of widths sqrt(sigma) in X and 1/sqrt(sigma) in P, so the mass
/// outside the box is known exactly.
pub fn resolve_identity(target: &Packet1D, probe: &Packet1D, cfg: &CompletenessConfig) -> Result<Completeness, PacketError> {
    let s = same_width(target, probe)?;
    if !(cfg.n_sigmas > 0.0) {
        return Err(PacketError::Quad(QuadError::BadRegion(format!("n_sigmas must be positive, got {}", cfg.n_sigmas))));
    }
    let (pc, xc) = (0.5 * (target.p0 + probe.p0), 0.5 * (target.x0 + probe.x0));
    let (wp, wx) = (1.0 / s.sqrt(), s.sqrt());
    let region = Region::new(
        vec![pc - cfg.n_sigmas * wp, xc - cfg.n_sigmas * wx],
        vec![pc + cfg.n_sigmas * wp, xc + cfg.n_sigmas * wx],
    )?;
    // the two overlap_raw factors fused into one exponential
    let f = |z: &[f64]| {
        let (p, x) = (z[0], z[1]);
        let (d1, q1) = (probe.x0 - x, probe.p0 - p);
        let (d2, q2) = (x - target.x0, p - target.p0);
        let re = -(d1 * d1 + d2 * d2) / (4.0 * s) - s * (q1 * q1 + q2 * q2) / 4.0;
        let ph = 0.5 * ((probe.p0 + p) * d1 + (p + target.p0) * d2);
        C64::from_polar(re.exp() / (2.0 * PI), ph)
    };
    let q = integrate_adaptive_with(f, &region, &cfg.quad)?;
    let reference = overlap_raw(s, probe.p0, probe.x0, target.p0, target.x0);
    let inside = erf_real(cfg.n_sigmas / std::f64::consts::SQRT_2).powi(2);
    let truncation_bound = reference.norm().sqrt() * (1.0 - inside);
    let tol = cfg.quad.tol_abs.max(cfg.quad.tol_rel * q.value.norm());
    Ok(Completeness {
        value: q.value,
        reference,
        quad: q,
        truncation_bound,
        ok: q.converged && q.error_estimate <= tol && truncation_bound <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pk(s: f64, p: f64, x: f64) -> Packet1D {
        Packet1D::new(s, p, x).unwrap()
    }

    #[test]
    fn self_overlap_and_peak() {
        let a = pk(1.3, 0.4, -2.0);
        assert_eq!(overlap(&a, &a).unwrap(), C64::new(1.0, 0.0));
        let v = position_amplitude(&a, a.x0);
        assert!(v.im == 0.0 && (v.re - a.n1_sq().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn displaced_by_two_root_sigma() {
        let s = 2.0;
        let a = pk(s, 0.7, 0.0);
        let b = pk(s, 0.7, 2.0 * s.sqrt());
        assert!((overlap(&a, &b).unwrap().norm() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn diagonal_moments() {
        let a = pk(0.8, 1.1, 0.3);
        let p = matrix_element(OperatorKind::P, &a, &a).unwrap();
        assert!((p - C64::new(1.1, 0.0)).norm() < 1e-15);
        let x2 = matrix_element(OperatorKind::X2, &a, &a).unwrap();
        assert!((x2.re - (0.4 + 0.09)).abs() < 1e-15);
        let x = matrix_element(OperatorKind::X, &a, &a).unwrap();
        assert!((x2.re - x.re * x.re - 0.8 / 2.0).abs() < 1e-15);
        let origin = pk(0.8, 1.1, 0.0);
        let d = matrix_element(OperatorKind::DeltaAt0, &origin, &origin).unwrap();
        assert!((d.re - origin.n1_sq()).abs() < 1e-15 && d.im == 0.0);
    }

    #[test]
    fn powers_match_named_forms() {
        let a = pk(0.9, 0.2, -0.5);
        let b = pk(0.9, -0.6, 0.8);
        for (gen, named) in [
            (OperatorKind::PowP(1), OperatorKind::P),
            (OperatorKind::PowP(2), OperatorKind::P2),
            (OperatorKind::PowX(1), OperatorKind::X),
            (OperatorKind::PowX(2), OperatorKind::X2),
            (OperatorKind::PowX(0), OperatorKind::Identity),
        ] {
            let u = matrix_element(gen, &a, &b).unwrap();
            let v = matrix_element(named, &a, &b).unwrap();
            assert!((u - v).norm() < 1e-15, "{gen:?}");
        }
    }

    #[test]
    fn general_overlap_reduces_to_equal_width() {
        let a = pk(1.4, 0.3, 0.2);
        let b = pk(1.4, -0.5, 1.7);
        let u = overlap(&a, &b).unwrap();
        let v = overlap_general(&a, &b);
        assert!((u - v).norm() < 1e-14);
        let c = pk(0.5, 0.3, 0.2);
        assert!(overlap_general(&a, &c).norm() < 1.0);
        assert!(matches!(overlap(&a, &c), Err(PacketError::WidthMismatch(..))));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["x", "x2", "p", "p2", "delta", "1+p", "identity"] {
            let op = OperatorKind::parse(s).unwrap();
            assert!(!op.name().is_empty());
        }
        assert_eq!(OperatorKind::parse("p^5").unwrap(), OperatorKind::PowP(5));
        assert_eq!(OperatorKind::parse("plane:1.5").unwrap(), OperatorKind::PlaneWave(1.5));
        assert!(OperatorKind::parse("q").is_err());
    }

    #[test]
    fn bad_packets_rejected() {
        assert!(Packet1D::new(0.0, 0.0, 0.0).is_err());
        assert!(Packet1D::new(1.0, f64::NAN, 0.0).is_err());
    }
}
