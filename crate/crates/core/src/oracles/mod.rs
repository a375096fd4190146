//! Linear minimization oracles for compact domains, proximal operators for the
//! non-smooth terms, and the linear maps that connect the two.

mod domains;
mod maps;
mod prox;

pub use domains::{
    lmo_box, lmo_euclidean_ball, lmo_l1_ball, lmo_nuclear_ball, lmo_simplex, lmo_spectrahedron,
    BoxDomain, Domain, EuclideanBall, L1Ball, LmoOutput, NuclearBall, Simplex, Spectrahedron,
};
pub use maps::{
    adjoint_mismatch, probe_norm, IdentityMap, LinearMap, MatrixMap, NormEstimate, RowSumMap,
    SampleMap,
};
pub use prox::{
    proj_box, proj_simplex, prox_l1_residual, prox_max, prox_point_indicator, soft_threshold,
    BoxIndicator, L1Residual, MaxTerm, NonsmoothTerm, PointIndicator, TermKind, ZeroTerm,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("empty input vector")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
