//! Harris extended Weibull (HEW) lifetime distribution: closed-form
//! densities, seven estimation procedures, goodness-of-fit against Weibull
//! variants, and a Monte-Carlo harness for comparing estimators.

pub mod bayes;
pub mod datasets;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod gof;
pub mod montecarlo;
pub mod sampling;

pub use distributions::{ComparisonKind, ComparisonModel, HewParams, LifetimeModel, PARAM_NAMES};
pub use error::{HewError, Result};
pub use sampling::{sample_hew, Sample, SampleSource};
