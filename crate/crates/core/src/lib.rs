//! MAP inference for nonsymmetric determinantal point processes.
//!
//! A kernel `L` is nPSD when `L + Lᵀ ⪰ 0`; its principal minors are then
//! nonnegative and `μ(S) = det(L_S)` is an unnormalized density over the
//! `k`-subsets of `{0, …, n-1}`. The pipeline is [`greedy::induced_greedy`]
//! followed by [`localsearch::local_search`] with swap radius 2. The
//! remaining modules verify the exchange inequalities, down-up walk and
//! core-set guarantees behind it by brute force at desk scale.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod charpoly;
pub mod cli;
pub mod combin;
pub mod coreset;
pub mod distribution;
pub mod downup;
pub mod error;
pub mod exchange;
pub mod greedy;
pub mod instances;
pub mod kernel;
pub mod linalg;
pub mod localsearch;
pub mod scalar;

pub use distribution::{DppDistribution, SetDistribution, Tabulated};
pub use error::{Error, Result};
pub use kernel::Kernel;
pub use linalg::Matrix;
pub use localsearch::{map_inference, SearchConfig};
pub use scalar::Scalar;

pub type Kernel64 = Kernel<f64>;
pub type Kernel32 = Kernel<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Dpp64 = DppDistribution<f64>;
pub type Dpp32 = DppDistribution<f32>;
pub type Poly64 = charpoly::PolyCoeffs<f64>;
pub type Chain64 = downup::ChainMatrix<f64>;
