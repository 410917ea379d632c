//! Bayesian optimization of combinatorial structures over {0,1}^d.
//!
//! The numerical core (surrogate, acquisition, search) is generic over the
//! scalar type through [`Real`], implemented for `f32` and `f64`. Benchmarks
//! are `f64` only. Concrete aliases for both precisions live at the crate root.

pub mod acquisition;
pub mod benchmarks;
pub mod error;
pub mod point;
pub mod random;
pub mod scalar;
pub mod search;
pub mod seeding;
pub mod surrogate;

pub use error::{Error, Result};
pub use point::BinaryPoint;
pub use scalar::Real;

pub type DatasetF32 = surrogate::Dataset<f32>;
pub type DatasetF64 = surrogate::Dataset<f64>;
pub type SurrogatePosteriorF32 = surrogate::SurrogatePosterior<f32>;
pub type SurrogatePosteriorF64 = surrogate::SurrogatePosterior<f64>;
pub type CoefficientDrawF32 = surrogate::CoefficientDraw<f32>;
pub type CoefficientDrawF64 = surrogate::CoefficientDraw<f64>;
pub type QuadObjectiveF32 = acquisition::QuadObjective<f32>;
pub type QuadObjectiveF64 = acquisition::QuadObjective<f64>;
pub type PlusMinusFormF32 = acquisition::PlusMinusForm<f32>;
pub type PlusMinusFormF64 = acquisition::PlusMinusForm<f64>;
pub type SdpSolutionF32 = acquisition::SdpSolution<f32>;
pub type SdpSolutionF64 = acquisition::SdpSolution<f64>;
pub type SearchResultF32 = search::SearchResult<f32>;
pub type SearchResultF64 = search::SearchResult<f64>;
