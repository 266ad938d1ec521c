//! Symbolic A_n = [A_{n-1}, H], H = p^2/2 + V, A_0 = p + i x, in the normal
//! order coeff x^a V^(d1) V^(d2) ... p^m.

use super::StationaryError;
use crate::packet_basis::{matrix_element, OperatorKind, Packet1D};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainPotential {
    Free,
    /// V = C x
    Linear { c: f64 },
    /// V = omega^2 x^2 / 2
    Harmonic { omega: f64 },
    /// V = g delta(x), kept symbolic
    Delta { g: f64 },
}

/// coeff x^a (prod_i V^(d_i)) p^m. For the delta potential each V^(d) stands
/// for g delta^(d)(x).
#[derive(Debug, Clone, PartialEq)]
pub struct OpTerm {
    pub coeff: C64,
    pub x_pow: u32,
    pub v_derivs: Vec<u32>,
    pub p_pow: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDescriptor {
    pub potential: ChainPotential,
    pub order: u32,
    pub terms: Vec<OpTerm>,
}

type Key = (u32, Vec<u32>, u32);

fn collect(map: BTreeMap<Key, C64>) -> Vec<OpTerm> {
    map.into_iter()
        .filter(|(_, c)| c.norm() > 1e-14)
        .map(|((x_pow, v_derivs, p_pow), coeff)| OpTerm { coeff, x_pow, v_derivs, p_pow })
        .collect()
}

fn add(map: &mut BTreeMap<Key, C64>, c: C64, a: u32, mut d: Vec<u32>, m: u32) {
    d.sort_unstable();
    *map.entry((a, d, m)).or_insert(C64::new(0.0, 0.0)) += c;
}

// d/dx of c x^a prod V^(d_i)
fn derive(c: C64, a: u32, d: &[u32]) -> Vec<(C64, u32, Vec<u32>)> {
    let mut out = Vec::new();
    if a > 0 {
        out.push((c * a as f64, a - 1, d.to_vec()));
    }
    for i in 0..d.len() {
        let mut e = d.to_vec();
        e[i] += 1;
        out.push((c, a, e));
    }
    out
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Replaces V^(d) by its value for the concrete potentials; the delta
/// potential is left symbolic.
fn substitute(pot: ChainPotential, terms: Vec<OpTerm>) -> Vec<OpTerm> {
    let mut map = BTreeMap::new();
    'outer: for t in terms {
        let (mut c, mut a) = (t.coeff, t.x_pow);
        match pot {
            ChainPotential::Delta { .. } => {
                add(&mut map, c, a, t.v_derivs, t.p_pow);
                continue;
            }
            ChainPotential::Free => {
                if !t.v_derivs.is_empty() {
                    continue;
                }
            }
            ChainPotential::Linear { c: f } => {
                for &d in &t.v_derivs {
                    match d {
                        0 => {
                            c *= f;
                            a += 1;
                        }
                        1 => c *= f,
                        _ => continue 'outer,
                    }
                }
            }
            ChainPotential::Harmonic { omega } => {
                let w2 = omega * omega;
                for &d in &t.v_derivs {
                    match d {
                        0 => {
                            c *= 0.5 * w2;
                            a += 2;
                        }
                        1 => {
                            c *= w2;
                            a += 1;
                        }
                        2 => c *= w2,
                        _ => continue 'outer,
                    }
                }
            }
        }
        add(&mut map, c, a, vec![], t.p_pow);
    }
    collect(map)
}

/// [T, H] with T in normal order:
///   [f p^m, V]      = f sum_{j>=1} C(m,j) (-i)^j V^(j) p^{m-j}
///   [f p^m, p^2/2]  = i f' p^{m+1} + f'' p^m / 2
pub fn commutator_with_h(desc: &OperatorDescriptor) -> OperatorDescriptor {
    let mut map = BTreeMap::new();
    let mi = C64::new(0.0, -1.0);
    for t in &desc.terms {
        for j in 1..=t.p_pow {
            let mut d = t.v_derivs.clone();
            d.push(j);
            add(&mut map, t.coeff * binom(t.p_pow, j) * mi.powu(j), t.x_pow, d, t.p_pow - j);
        }
        for (c1, a1, d1) in derive(t.coeff, t.x_pow, &t.v_derivs) {
            add(&mut map, C64::i() * c1, a1, d1.clone(), t.p_pow + 1);
            for (c2, a2, d2) in derive(c1, a1, &d1) {
                add(&mut map, 0.5 * c2, a2, d2, t.p_pow);
            }
        }
    }
    OperatorDescriptor { potential: desc.potential, order: desc.order + 1, terms: substitute(desc.potential, collect(map)) }
}

pub fn a_chain(pot: ChainPotential, n: u32) -> Result<OperatorDescriptor, StationaryError> {
    if n > 6 {
        return Err(StationaryError::Unsupported(format!("A_{n} beyond the implemented order 6")));
    }
    let mut d = OperatorDescriptor {
        potential: pot,
        order: 0,
        terms: vec![
            OpTerm { coeff: C64::new(1.0, 0.0), x_pow: 0, v_derivs: vec![], p_pow: 1 },
            OpTerm { coeff: C64::i(), x_pow: 1, v_derivs: vec![], p_pow: 0 },
        ],
    };
    for _ in 0..n {
        d = commutator_with_h(&d);
    }
    Ok(d)
}

impl OperatorDescriptor {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, s: C64) -> OperatorDescriptor {
        let mut o = self.clone();
        for t in &mut o.terms {
            t.coeff *= s;
        }
        o
    }

    /// max coefficient difference over the union of terms
    pub fn distance(&self, other: &OperatorDescriptor) -> f64 {
        let mut map: BTreeMap<Key, C64> = BTreeMap::new();
        for t in &self.terms {
            add(&mut map, t.coeff, t.x_pow, t.v_derivs.clone(), t.p_pow);
        }
        for t in &other.terms {
            add(&mut map, -t.coeff, t.x_pow, t.v_derivs.clone(), t.p_pow);
        }
        map.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for OperatorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vname = match self.potential {
            ChainPotential::Delta { .. } => "g delta",
            _ => "V",
        };
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)", t.coeff.re, t.coeff.im)?;
            if t.x_pow > 0 {
                write!(f, " x^{}", t.x_pow)?;
            }
            for d in &t.v_derivs {
                write!(f, " {vname}^({d})")?;
            }
            if t.p_pow > 0 {
                write!(f, " p^{}", t.p_pow)?;
            }
        }
        Ok(())
    }
}

fn poly_mul_linear(q: &[C64], c0: C64, c1: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); q.len() + 1];
    for (j, &v) in q.iter().enumerate() {
        out[j] += v * c0;
        out[j + 1] += v * c1;
    }
    out
}

/// <a| desc |b> for descriptors already reduced to polynomials in x and p.
/// Uses (-i d/dx)^m psi_b = Q_m(x) psi_b with
/// Q_{m+1} = -i Q_m' + Q_m (P_b + i (x - X_b)/sigma).
pub fn packet_matrix_element(desc: &OperatorDescriptor, a: &Packet1D, b: &Packet1D) -> Result<C64, StationaryError> {
    let mut acc = C64::new(0.0, 0.0);
    for t in &desc.terms {
        if !t.v_derivs.is_empty() {
            return Err(StationaryError::Unsupported("symbolic potential factors have no packet closed form here".into()));
        }
        let c0 = C64::new(b.p0, -b.x0 / b.sigma);
        let c1 = C64::new(0.0, 1.0 / b.sigma);
        let mut q = vec![C64::new(1.0, 0.0)];
        for _ in 0..t.p_pow {
            let mut dq: Vec<C64> = (1..q.len()).map(|j| q[j] * j as f64 * C64::new(0.0, -1.0)).collect();
            let mut nq = poly_mul_linear(&q, c0, c1);
            dq.resize(nq.len(), C64::new(0.0, 0.0));
            for (x, y) in nq.iter_mut().zip(dq) {
                *x += y;
            }
            q = nq;
        }
        for (j, &cj) in q.iter().enumerate() {
            if cj != C64::new(0.0, 0.0) {
                acc += t.coeff * cj * matrix_element(OperatorKind::PowX(t.x_pow + j as u32), a, b)?;
            }
        }
    }
    Ok(acc)
}
