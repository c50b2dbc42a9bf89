//! Network generators: the dyad-independent mixing model for study
//! populations, and construction/sampling for the conditional working model.

mod anneal;
mod mcmc;
mod mixing;
mod reed_molloy;
mod swap;

pub use anneal::{anneal_to_crossties, AnnealOutcome, AnnealSchedule};
pub use mcmc::{ergm_mcmc_sample, ErgmChain, ErgmSpec, McmcOptions};
pub use mixing::{gen_bernoulli_mixing, solve_mixing_cells, MixingCells, MixingSpec};
pub use reed_molloy::reed_molloy;
pub use swap::{sample_valid_tetrad, SwapGraph, Tetrad, TetradSampler, TetradState};
