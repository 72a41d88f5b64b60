//! Determinantal structure of eigenvector overlaps for the induced spherical
//! unitary ensemble: finite-N overlap kernels, their scaling limits, Monte
//! Carlo sampling and brute-force reference integrals.
//!
//! The analytic modules are generic over [`Real`]; the `f64` aliases below
//! cover the common case.

#![allow(non_snake_case, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod finite_kernels;
pub mod finite_structures;
pub mod limit_kernels;
pub mod linalg;
pub mod oracles;
pub mod sampler;
pub mod scalar;
pub mod scaled;
pub mod special_functions;

pub use error::{OverlapError, Result};
pub use scalar::{Cx, Real};
pub use scaled::Scaled;

/// Double precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
pub type EnsembleParams64 = finite_structures::EnsembleParams<f64>;
pub type PolyFamily64 = finite_structures::PolyFamily<f64>;
pub type LduFactors64 = finite_structures::LduFactors<f64>;
pub type WeightedPoint64 = finite_kernels::WeightedPoint<f64>;
pub type ConfigPoint64 = finite_kernels::ConfigPoint<f64>;
pub type KernelEval64 = finite_kernels::KernelEval<f64>;
pub type RegimeSpec64 = limit_kernels::RegimeSpec<f64>;
