//! Gaussian wave-packet scattering toolkit.
//!
//! Units: hbar = m = 1 unless a module says otherwise. Complex numbers are
//! `num_complex::Complex64`.
mod dd;
pub mod gaussian;
pub mod packet_basis;
pub mod par;
pub mod quadrature;
pub mod special_fn;
pub mod scatter3d;
pub mod stationary_scatter;
pub mod tdse_oracle;
pub use num_complex::Complex64 as C64;
