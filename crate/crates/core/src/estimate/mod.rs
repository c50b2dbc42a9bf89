//! Prevalence estimators: sample mean, Volz-Heckathorn, and the iterative
//! model-assisted estimator.

mod basic;
pub mod io;
mod ma;
mod weights;

pub use basic::{hajek, naive_mean, vh_estimate};
pub use ma::{
    design_estimates, design_estimates_with, initial_weights, ma_estimate, matched_design,
    realize_population, update_weights, IterationDiagnostics, MaConfig, MaResult, OffspringSource,
};
pub(crate) use ma::chain_draws;
pub use weights::{hajek_by, WeightTable};
