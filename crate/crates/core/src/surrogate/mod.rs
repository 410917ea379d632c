//! Monomial feature expansion and Bayesian regression surrogates over {0,1}^d.

mod basis;
mod dataset;
mod horseshoe;
mod linear;

pub use basis::{predict, term_count, MonomialBasis};
pub use dataset::Dataset;
pub use horseshoe::{
    conditionals, sample_alpha_direct, sample_alpha_fast, AlphaSampler, CoefficientDraw,
    SurrogatePosterior, MAX_CONDITION, VARIANCE_CAP, VARIANCE_FLOOR,
};
pub use linear::{blr_fit, least_squares, mle_fit, NigPosterior, NigPrior};
