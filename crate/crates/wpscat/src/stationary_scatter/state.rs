use super::StationaryError;
use crate::gaussian::{gauss_full, gauss_interval, gauss_lower, gauss_upper};
use crate::packet_basis::Packet1D;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPotential {
    pub g: f64,
}

/// V(x) = -depth on (a, b), zero outside. Positive depth is attractive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWell {
    pub depth: f64,
    pub a: f64,
    pub b: f64,
}

impl SquareWell {
    pub fn new(depth: f64, a: f64, b: f64) -> Result<SquareWell, StationaryError> {
        if !(a.is_finite() && b.is_finite() && depth.is_finite() && a < b) {
            return Err(StationaryError::BadWell(a, b));
        }
        Ok(SquareWell { depth, a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    Delta(DeltaPotential),
    SquareWell(SquareWell),
}

/// sum_j amp_j e^{i kappa_j x} on (lo, hi); infinite ends allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<(C64, C64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub k: f64,
    pub potential: Potential,
    pub r: C64,
    pub t: C64,
    pub segments: Vec<Segment>,
}

pub fn reflection_transmission(pot: DeltaPotential, k: f64) -> Result<(C64, C64), StationaryError> {
    if !(k > 0.0) {
        return Err(StationaryError::NonPositiveK(k));
    }
    let d = C64::new(k, pot.g);
    Ok((C64::new(0.0, -pot.g) / d, k / d))
}

pub fn flux_defect(r: C64, t: C64) -> f64 {
    (r.norm_sqr() + t.norm_sqr() - 1.0).abs()
}

// (A, B) of A e^{iqx} + B e^{-iqx} -> (value, derivative) at x0
fn to_vd(q: C64, x0: f64, ab: [C64; 2]) -> [C64; 2] {
    let e = (C64::i() * q * x0).exp();
    let (p, m) = (ab[0] * e, ab[1] / e);
    [p + m, C64::i() * q * (p - m)]
}

fn from_vd(q: C64, x0: f64, vd: [C64; 2]) -> [C64; 2] {
    let e = (C64::i() * q * x0).exp();
    let s = vd[1] / (C64::i() * q);
    [0.5 * (vd[0] + s) / e, 0.5 * (vd[0] - s) * e]
}

/// (R, T, C, D, K) for the well; any real k != 0, so R(-k) is available as
/// the analytic continuation needed by the delta(k1 + k2) coefficient.
pub(crate) fn well_amplitudes(w: SquareWell, k: f64) -> Result<(C64, C64, C64, C64, C64), StationaryError> {
    let kc = C64::new(k, 0.0);
    let kin = C64::new(k * k + 2.0 * w.depth, 0.0).sqrt();
    if kin.norm() < 1e-10 || k == 0.0 {
        return Err(StationaryError::Unsupported("interior or exterior wavenumber vanishes".into()));
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    // march right to left from T = 1, then normalise the incident amplitude
    let cd = from_vd(kin, w.b, to_vd(kc, w.b, [one, zero]));
    let lr = from_vd(kc, w.a, to_vd(kin, w.a, cd));
    let n = lr[0];
    Ok((lr[1] / n, one / n, cd[0] / n, cd[1] / n, kin))
}

impl StationaryState {
    pub fn new(pot: Potential, k: f64) -> Result<StationaryState, StationaryError> {
        match pot {
            Potential::Free => StationaryState::free(k),
            Potential::Delta(d) => StationaryState::delta(d, k),
            Potential::SquareWell(w) => StationaryState::square_well(w, k),
        }
    }

    pub fn delta(pot: DeltaPotential, k: f64) -> Result<StationaryState, StationaryError> {
        let (r, t) = reflection_transmission(pot, k)?;
        let kc = C64::new(k, 0.0);
        let one = C64::new(1.0, 0.0);
        Ok(StationaryState {
            k,
            potential: Potential::Delta(pot),
            r,
            t,
            segments: vec![
                Segment { lo: f64::NEG_INFINITY, hi: 0.0, terms: vec![(one, kc), (r, -kc)] },
                Segment { lo: 0.0, hi: f64::INFINITY, terms: vec![(t, kc)] },
            ],
        })
    }

    pub fn free(k: f64) -> Result<StationaryState, StationaryError> {
        let mut s = StationaryState::delta(DeltaPotential { g: 0.0 }, k)?;
        s.potential = Potential::Free;
        Ok(s)
    }

    /// Transfer-matrix solution; interior wavenumber K = sqrt(k^2 + 2 depth),
    /// imaginary below a barrier top.
    pub fn square_well(w: SquareWell, k: f64) -> Result<StationaryState, StationaryError> {
        if !(k > 0.0) {
            return Err(StationaryError::NonPositiveK(k));
        }
        let kc = C64::new(k, 0.0);
        let one = C64::new(1.0, 0.0);
        let (r, t, c, d, kin) = well_amplitudes(w, k)?;
        Ok(StationaryState {
            k,
            potential: Potential::SquareWell(w),
            r,
            t,
            segments: vec![
                Segment { lo: f64::NEG_INFINITY, hi: w.a, terms: vec![(one, kc), (r, -kc)] },
                Segment { lo: w.a, hi: w.b, terms: vec![(c, kin), (d, -kin)] },
                Segment { lo: w.b, hi: f64::INFINITY, terms: vec![(t, kc)] },
            ],
        })
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.k * self.k
    }

    pub fn wavefunction(&self, x: f64) -> C64 {
        let seg = self.segments.iter().find(|s| x >= s.lo && x < s.hi).unwrap_or(self.segments.last().unwrap());
        seg.terms.iter().map(|&(a, q)| a * (C64::i() * q * x).exp()).sum()
    }
}

// int_lo^hi conj(<x|P,X>) e^{i kappa x} dx without N1
fn piece(pkt: &Packet1D, kappa: C64, lo: f64, hi: f64) -> Result<C64, StationaryError> {
    let s = pkt.sigma;
    let a = C64::new(0.5 / s, 0.0);
    let b = pkt.x0 / s + C64::i() * (kappa - pkt.p0);
    let c = C64::new(-pkt.x0 * pkt.x0 / (2.0 * s), pkt.p0 * pkt.x0);
    Ok(match (lo.is_finite(), hi.is_finite()) {
        (false, false) => gauss_full(a, b, c)?,
        (false, true) => gauss_lower(a, b, c, hi)?,
        (true, false) => gauss_upper(a, b, c, lo)?,
        (true, true) => gauss_interval(a, b, c, lo, hi)?,
    })
}

fn project_segments(segs: &[Segment], pkt: &Packet1D) -> Result<C64, StationaryError> {
    let mut acc = C64::new(0.0, 0.0);
    for s in segs {
        for &(amp, q) in &s.terms {
            acc += amp * piece(pkt, q, s.lo, s.hi)?;
        }
    }
    Ok(acc * pkt.n1_sq().sqrt())
}

/// <P,X|psi_k> in closed form, one Gaussian-times-exponential erf piece per
/// region and plane-wave component.
pub fn packet_projection(state: &StationaryState, pkt: &Packet1D) -> Result<C64, StationaryError> {
    project_segments(&state.segments, pkt)
}

/// The sgn part of the projection: erf replaced by its saturated value
/// sgn(X), i.e. the plane-wave pieces that survive far from the potential.
pub fn packet_projection_sgn_part(state: &StationaryState, pkt: &Packet1D) -> Result<C64, StationaryError> {
    let n1 = pkt.n1_sq().sqrt();
    let full = |q: f64| -> Result<C64, StationaryError> {
        let f = piece(pkt, C64::new(q, 0.0), f64::NEG_INFINITY, f64::INFINITY)?;
        Ok(f * n1)
    };
    let k = state.k;
    Ok(if pkt.x0 > 0.0 { state.t * full(k)? } else { full(k)? + state.r * full(-k)? })
}

/// Leading marginal terms of the delta-potential projection, i.e. the first
/// term of the erfc asymptotics of every half-line piece, valid for
/// |X| >> sqrt(sigma). Each term is N1 sigma amp e^{iPX - X^2/(2 sigma)} /
/// (X + i sigma(kappa - P)); the reflected wave gives 1/(X - i sigma(k + P)).
pub fn marginal_terms(state: &StationaryState, pkt: &Packet1D) -> Result<C64, StationaryError> {
    if !matches!(state.potential, Potential::Delta(_) | Potential::Free) {
        return Err(StationaryError::Unsupported("marginal terms are defined for the delta potential".into()));
    }
    // int_0^inf e^{-x^2/(2s) + b x + c} ~ -e^{c}/b  for Re b << 0, and
    // int_-inf^0 ~ e^{c}/b for Re b >> 0 (first term of the erfc asymptotics).
    let s = pkt.sigma;
    let c = C64::new(-pkt.x0 * pkt.x0 / (2.0 * s), pkt.p0 * pkt.x0);
    let n1 = pkt.n1_sq().sqrt();
    let mut acc = C64::new(0.0, 0.0);
    for seg in &state.segments {
        for &(amp, q) in &seg.terms {
            let b = pkt.x0 / s + C64::i() * (q - pkt.p0);
            let sign = if pkt.x0 > 0.0 {
                // tail lives on the half-line x < 0
                if seg.hi <= 0.0 { 1.0 } else { -1.0 }
            } else if seg.lo >= 0.0 {
                -1.0
            } else {
                1.0
            };
            // for X > 0 the x<0 pieces are tails and the x>0 piece is the full
            // line minus the same tail, hence the minus sign
            acc += sign * amp * c.exp() / b;
        }
    }
    Ok(acc * n1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionDecomposition {
    pub total: C64,
    pub delta_like_part: C64,
    pub delta_correction: C64,
}

/// Splits a square-well projection into the delta-potential form (outer
/// waves continued to the origin, with the square well's R and T) and the
/// finite-region remainder Delta.
pub fn general_projection_decomposition(
    state: &StationaryState,
    pkt: &Packet1D,
) -> Result<ProjectionDecomposition, StationaryError> {
    if !matches!(state.potential, Potential::SquareWell(_)) {
        return Err(StationaryError::Unsupported("decomposition needs a square-well state".into()));
    }
    let kc = C64::new(state.k, 0.0);
    let one = C64::new(1.0, 0.0);
    let like = vec![
        Segment { lo: f64::NEG_INFINITY, hi: 0.0, terms: vec![(one, kc), (state.r, -kc)] },
        Segment { lo: 0.0, hi: f64::INFINITY, terms: vec![(state.t, kc)] },
    ];
    let total = packet_projection(state, pkt)?;
    let delta_like_part = project_segments(&like, pkt)?;
    // correction computed piecewise so it does not suffer cancellation
    let w = match state.potential {
        Potential::SquareWell(w) => w,
        _ => unreachable!(),
    };
    let mut corr = Vec::new();
    let s_in = &state.segments[1];
    corr.push(s_in.clone());
    // outer waves removed from the parts of (a, b) on each side of 0, and
    // added back outside (a, b) where the delta form is on the wrong side
    let (lw, rw) = (&state.segments[0].terms, &state.segments[2].terms);
    let neg = |t: &Vec<(C64, C64)>| t.iter().map(|&(a, q)| (-a, q)).collect::<Vec<_>>();
    // inside (a, b): subtract the delta form there
    if w.a < 0.0 {
        corr.push(Segment { lo: w.a, hi: w.b.min(0.0), terms: neg(lw) });
    }
    if w.b > 0.0 {
        corr.push(Segment { lo: w.a.max(0.0), hi: w.b, terms: neg(rw) });
    }
    // outside (a, b) where the delta form differs from the true waves
    if w.a > 0.0 {
        // on (0, a) true is the left wave, delta form is the right wave
        corr.push(Segment { lo: 0.0, hi: w.a, terms: lw.clone() });
        corr.push(Segment { lo: 0.0, hi: w.a, terms: neg(rw) });
    }
    if w.b < 0.0 {
        corr.push(Segment { lo: w.b, hi: 0.0, terms: rw.clone() });
        corr.push(Segment { lo: w.b, hi: 0.0, terms: neg(lw) });
    }
    corr.retain(|s| s.hi > s.lo);
    let delta_correction = project_segments(&corr, pkt)?;
    Ok(ProjectionDecomposition { total, delta_like_part, delta_correction })
}
