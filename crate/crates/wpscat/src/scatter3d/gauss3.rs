//! Separable complex Gaussians exp(sum_i (-a_i x_i^2 + b_i x_i + c_i)) and the
//! operations the amplitudes need: products, integrals over R^3, free
//! evolution and complex translations. All packets and the potential are
//! products over Cartesian axes, so everything stays separable.

use super::Vec3;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct G1 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl G1 {
    pub fn mul(self, o: G1) -> G1 {
        G1 { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c }
    }

    pub fn conj(self) -> G1 {
        G1 { a: self.a.conj(), b: self.b.conj(), c: self.c.conj() }
    }

    /// log of the integral over the line; needs Re a > 0
    pub fn ln_integral(self) -> C64 {
        0.5 * (PI / self.a).ln() + self.b * self.b / (4.0 * self.a) + self.c
    }

    /// exp(-i p^2 tau / 2) applied in momentum space. Complex tau with
    /// Im tau <= 0 is allowed (tau = -2 i s gives exp(-s p^2)).
    pub fn evolve(self, tau: C64) -> G1 {
        let d = 1.0 + 2.0 * C64::i() * self.a * tau;
        G1 { a: self.a / d, b: self.b / d, c: self.c + C64::i() * tau * self.b * self.b / (2.0 * d) - 0.5 * d.ln() }
    }

    /// x -> f(x - s)
    pub fn shift(self, s: C64) -> G1 {
        G1 { a: self.a, b: self.b + 2.0 * self.a * s, c: self.c - self.a * s * s - self.b * s }
    }

    #[cfg(test)]
    pub fn eval(self, x: f64) -> C64 {
        (-self.a * x * x + self.b * x + self.c).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct G3(pub [G1; 3]);

impl G3 {
    pub fn mul(self, o: G3) -> G3 {
        G3([self.0[0].mul(o.0[0]), self.0[1].mul(o.0[1]), self.0[2].mul(o.0[2])])
    }

    pub fn conj(self) -> G3 {
        G3(self.0.map(G1::conj))
    }

    pub fn evolve(self, tau: C64) -> G3 {
        G3(self.0.map(|g| g.evolve(tau)))
    }

    pub fn add_const(mut self, lnc: C64) -> G3 {
        self.0[0].c += lnc;
        self
    }

    pub fn ln_integral(self) -> C64 {
        self.0.iter().map(|g| g.ln_integral()).sum()
    }

    pub fn integral(self) -> C64 {
        self.ln_integral().exp()
    }

    /// int conj(self) other
    pub fn inner(self, other: G3) -> C64 {
        self.conj().mul(other).integral()
    }

    pub fn eval(self, x: Vec3) -> C64 {
        let e: C64 = (0..3).map(|i| -self.0[i].a * x[i] * x[i] + self.0[i].b * x[i] + self.0[i].c).sum();
        e.exp()
    }

    /// Gaussian momentum filter (s/pi)^{3/2} exp(-s (p - k)^2).
    pub fn momentum_filter(self, s: f64, k: Vec3) -> G3 {
        let mut out = self;
        for i in 0..3 {
            let g = self.0[i].evolve(C64::new(0.0, -2.0 * s));
            // exp(2 s k p) with p = -i d/dx translates by -2 i s k
            let mut g = g.shift(C64::new(0.0, 2.0 * s * k[i]));
            g.c += 0.5 * (s / PI).ln() - s * k[i] * k[i];
            out.0[i] = g;
        }
        out
    }
}

/// (pi sigma)^{-3/4} exp(-(x - centre)^2 / (2 sigma) + i p.(x - x_label)).
pub(crate) fn packet_g3(sigma: f64, p: Vec3, centre: Vec3, x_label: Vec3) -> G3 {
    let ln_n = -0.25 * (PI * sigma).ln();
    G3(std::array::from_fn(|i| G1 {
        a: C64::new(0.5 / sigma, 0.0),
        b: C64::new(centre[i] / sigma, p[i]),
        c: C64::new(-centre[i] * centre[i] / (2.0 * sigma) + ln_n, -p[i] * x_label[i]),
    }))
}

/// (4 pi / s)^{3/2} exp(-(x - x_v)^2 / s), without the coupling.
pub(crate) fn potential_g3(sigma_v: f64, x_v: Vec3) -> G3 {
    let ln_amp = 0.5 * (4.0 * PI / sigma_v).ln();
    G3(std::array::from_fn(|i| G1 {
        a: C64::new(1.0 / sigma_v, 0.0),
        b: C64::new(2.0 * x_v[i] / sigma_v, 0.0),
        c: C64::new(-x_v[i] * x_v[i] / sigma_v + ln_amp, 0.0),
    }))
}
