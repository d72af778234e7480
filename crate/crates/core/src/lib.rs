//! Random-effects meta-analysis under the normal-normal hierarchical model.
//!
//! The Bayesian side computes the marginal posterior of the overall effect
//! exactly, as a weighted mixture of normal distributions obtained by
//! discretising the heterogeneity posterior on an adaptive grid. The
//! frequentist side provides the common-effect, DerSimonian-Laird, REML,
//! Hartung-Knapp-Sidik-Jonkman and Q-profile results that are usually
//! reported next to it.

pub mod bayes;
pub mod data;
pub mod error;
pub mod freq;
pub mod io;
pub mod numerics;
pub mod priors;

pub use bayes::{BayesFit, IntervalKind, NormalMixture, PosteriorSummary, TauPosterior};
pub use data::{CountTable, Dataset, Study};
pub use error::{Error, ErrorClass, Result};
pub use freq::{FrequentistResult, Method, TauMethod};
pub use numerics::Interval;
pub use priors::{EffectPrior, HeterogeneityPrior};
