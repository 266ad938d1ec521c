//! Quadrature engines: Gauss rules, adaptive cubature, eps-extrapolation and
//! order-explicit iterated phase-space integrals.

mod adaptive;
mod extrapolate;
mod gauss;
mod order;

pub use adaptive::{integrate_adaptive, integrate_adaptive_with, GaussianTruncation, QuadConfig, QuadResult, Region};
pub use extrapolate::{extrapolate_eps, extrapolate_eps_pow, Extrapolated, Regularization};
pub use gauss::{gauss_hermite_nodes, gauss_legendre_nodes, gl_integrate};
pub use order::{order_sensitive_integral, NestedRegion, NestingOrder, PartialIntegral};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("rule order {n} outside [{min}, {max}]")]
    OrderOutOfRange { n: usize, min: usize, max: usize },
    #[error("invalid region: {0}")]
    BadRegion(String),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("invalid regularization: {0}")]
    BadSchedule(String),
}
