//! Model-assisted prevalence estimation for respondent-driven sampling.
//!
//! The crate simulates networked populations and link-tracing samples, fits a
//! degree- and infection-conditioned exponential-family random graph working
//! model by tetradic pseudo-likelihood, estimates class-level inclusion
//! probabilities by simulation, and reports seed-bias-corrected prevalence
//! estimates with parametric-bootstrap uncertainty.

pub mod ergmfit;
pub mod harness;
pub mod estimate;
pub mod error;
pub mod bootstrap;
pub mod netcore;
pub mod netgen;
pub mod rdssim;
pub mod rng;

pub use error::{Error, Result};
