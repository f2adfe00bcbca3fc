//! Distribution families, maximum-likelihood fitting, and goodness-of-fit
//! statistics for heavy-tailed wind-speed data.
//!
//! The centerpiece is the four-parameter beta-generalized Lindley (BGL)
//! family together with its submodels (beta-Lindley, generalized Lindley,
//! Lindley) and five reference families (gamma, beta-Weibull, Weibull,
//! beta-exponential, log-normal). Everything transcendental is computed by
//! the self-contained [`specfun`] kernel, so results are bit-reproducible
//! across platforms.
//!
//! The crate is `no_std` (with `alloc`); file formats, CSV ingestion, and
//! the command-line front end live in the companion `windfit-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod describe;
pub mod dist;
pub mod fit;
pub mod gof;
pub mod sample;
pub mod specfun;

mod error;
pub(crate) mod math;
pub(crate) mod quad;
pub(crate) mod solve;
pub(crate) mod sum;

pub use dist::{Family, FamilySpec};
pub use error::{Error, Result};
pub use fit::{bgl_score, fit_mle, log_likelihood, FitConfig, FitResult, Optimizer};
pub use gof::{GofReport, PercentileBias};
pub use sample::Sample;
