//! Stationary scattering states of g delta(x) and of a square well, their
//! packet projections, eps-regularised scalar products and matrix elements of
//! the A-chain, and the phase-space diagnostics built on them.

mod achain;
mod assoc;
mod direct;
mod marginal;
mod state;

pub use achain::{a_chain, commutator_with_h, packet_matrix_element, ChainPotential, OpTerm, OperatorDescriptor};
pub use assoc::{associativity_report, packet_commutator_check, AssocPotential, AssociativityReport, CommutatorCheck, Verdict};
pub use direct::{
    delta1_closed_form, delta2_closed_form, delta_r_closed_form, kernel_fit, local_element, log_log_slope, matrix_a_direct,
    regularized_bulk, scalar_product_regularized, A2Form, ADirect, BulkOp, KernelFit, LocalOp, LocalTerm, PSide,
    ScalarProduct, Which,
};
pub use marginal::{
    a11_full, a11_marginal, a22_full, b11_integrand, b11_order_diagnostic, marginal_overlap, marginal_overlap_oracle,
    B11Diagnostic, MarginalOrder,
};
pub use state::{
    flux_defect, general_projection_decomposition, marginal_terms, packet_projection, packet_projection_sgn_part,
    reflection_transmission, DeltaPotential, Potential, ProjectionDecomposition, Segment, SquareWell, StationaryState,
};

use crate::packet_basis::PacketError;
use crate::quadrature::QuadError;
use crate::special_fn::SpecialFnError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StationaryError {
    #[error("wavenumber must be positive, got {0}")]
    NonPositiveK(f64),
    #[error("square well needs finite a < b, got a = {0}, b = {1}")]
    BadWell(f64, f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Packet(#[from] PacketError),
}
