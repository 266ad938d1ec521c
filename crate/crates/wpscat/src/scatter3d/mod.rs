//! Perturbative scattering of a 3D Gaussian packet off a Gaussian potential
//! V(x) = g (4 pi / sigma_V)^{3/2} exp(-(x - X_V)^2 / sigma_V).
//!
//! Two layers:
//! * `amplitude`: closed forms for rigid packets, whose envelope moves at the
//!   group velocity without spreading and whose phase is
//!   exp(-i E (t - T) + i P.(x - X)). Everything is Gaussian in x, so the
//!   first-order amplitude reduces to one Gaussian time integral G(T_int).
//! * `exact`: packets evolved with the free propagator (m = 1). Used for the
//!   probability ladder, which the rigid packets satisfy only approximately.

pub mod amplitude;
pub mod distributions;
pub mod exact;
mod gauss3;
pub mod kinematics;

pub use amplitude::{
    dp2_density, g_time_integral, interference_density, q1, s0, s1, AmplitudeParts, Dp2Density, TimeIntegral,
};
pub use distributions::{distributions, golden_rule_bulk, DistributionTable, FinalGrid, Region3, Row};
pub use exact::{total_probability, ExactAmplitudes, LadderConfig, Order, ProbabilityReport};
pub use kinematics::{derived_params, KinematicDerived};

use crate::quadrature::QuadError;
use crate::special_fn::SpecialFnError;

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatterError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate kinematics: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature did not converge: {0}")]
    NotConverged(String),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn axpy(s: f64, a: Vec3, b: Vec3) -> Vec3 {
    [s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2]]
}

pub(crate) fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dispersion {
    /// E = P^2 / 2, V = P
    NonRelativistic,
    /// E = sqrt(P^2 + m^2), V = P / E
    Relativistic { m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet3D {
    pub sigma: f64,
    pub p: Vec3,
    pub x: Vec3,
    /// reference time at which the envelope is centred on `x`
    pub t: f64,
    pub dispersion: Dispersion,
}

fn finite3(v: Vec3) -> bool {
    v.iter().all(|c| c.is_finite())
}

impl Packet3D {
    pub fn new(sigma: f64, p: Vec3, x: Vec3, t: f64) -> Result<Self, ScatterError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ScatterError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !(finite3(p) && finite3(x) && t.is_finite()) {
            return Err(ScatterError::InvalidParameter("non-finite packet centre".into()));
        }
        Ok(Packet3D { sigma, p, x, t, dispersion: Dispersion::NonRelativistic })
    }

    pub fn relativistic(self, m: f64) -> Result<Self, ScatterError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(ScatterError::InvalidParameter(format!("mass must be positive, got {m}")));
        }
        Ok(Packet3D { dispersion: Dispersion::Relativistic { m }, ..self })
    }

    pub fn with_center(&self, p: Vec3, x: Vec3) -> Self {
        Packet3D { p, x, ..*self }
    }

    pub fn energy(&self) -> f64 {
        let p2 = dot(self.p, self.p);
        match self.dispersion {
            Dispersion::NonRelativistic => 0.5 * p2,
            Dispersion::Relativistic { m } => (p2 + m * m).sqrt(),
        }
    }

    pub fn velocity(&self) -> Vec3 {
        match self.dispersion {
            Dispersion::NonRelativistic => self.p,
            Dispersion::Relativistic { .. } => scale(1.0 / self.energy(), self.p),
        }
    }

    /// (pi sigma)^{-3/4}
    pub fn norm_const(&self) -> f64 {
        (std::f64::consts::PI * self.sigma).powf(-0.75)
    }

    /// envelope centre at time t
    pub fn center_at(&self, t: f64) -> Vec3 {
        axpy(t - self.t, self.velocity(), self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPotential3D {
    pub g: f64,
    pub sigma_v: f64,
    pub x_v: Vec3,
}

impl GaussianPotential3D {
    pub fn new(g: f64, sigma_v: f64, x_v: Vec3) -> Result<Self, ScatterError> {
        if !(sigma_v > 0.0 && sigma_v.is_finite()) {
            return Err(ScatterError::InvalidParameter(format!("sigma_V must be positive, got {sigma_v}")));
        }
        if !(g.is_finite() && finite3(x_v)) {
            return Err(ScatterError::InvalidParameter("non-finite potential parameters".into()));
        }
        Ok(GaussianPotential3D { g, sigma_v, x_v })
    }

    /// (4 pi / sigma_V)^{3/2}, the amplitude per unit g
    pub fn amplitude(&self) -> f64 {
        (4.0 * std::f64::consts::PI / self.sigma_v).powf(1.5)
    }

    pub fn value(&self, x: Vec3) -> f64 {
        let d = sub(x, self.x_v);
        self.g * self.amplitude() * (-dot(d, d) / self.sigma_v).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub t0: f64,
    pub t1: f64,
}

impl TimeWindow {
    pub fn new(t0: f64, t1: f64) -> Result<Self, ScatterError> {
        if !(t0 < t1 && t0.is_finite() && t1.is_finite()) {
            return Err(ScatterError::InvalidParameter(format!("need T0 < T1, got [{t0}, {t1}]")));
        }
        Ok(TimeWindow { t0, t1 })
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(Packet3D::new(0.0, [0.0; 3], [0.0; 3], 0.0).is_err());
        assert!(Packet3D::new(1.0, [f64::NAN, 0.0, 0.0], [0.0; 3], 0.0).is_err());
        assert!(GaussianPotential3D::new(1.0, -1.0, [0.0; 3]).is_err());
        assert!(TimeWindow::new(1.0, 1.0).is_err());
        assert!(Packet3D::new(1.0, [0.0; 3], [0.0; 3], 0.0).unwrap().relativistic(0.0).is_err());
    }

    #[test]
    fn dispersion_relations() {
        let p = Packet3D::new(1.0, [3.0, 0.0, 4.0], [0.0; 3], 0.0).unwrap();
        assert_eq!(p.energy(), 12.5);
        assert_eq!(p.velocity(), [3.0, 0.0, 4.0]);
        let r = p.relativistic(12.0).unwrap();
        assert!((r.energy() - 13.0).abs() < 1e-15);
        assert!((r.velocity()[2] - 4.0 / 13.0).abs() < 1e-15);
    }
}
