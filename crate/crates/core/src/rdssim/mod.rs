//! Respondent-driven sampling on a network: seed choice, coupon-limited
//! recruitment, and Monte Carlo tallies of which classes get sampled.

mod counts;
mod design;
pub mod io;
mod recruit;
mod referrals;
mod sample;
mod seeds;

pub use counts::{simulate_class_counts, ClassCounts};
pub use design::{Coupons, OffspringTable, SamplingDesign, SeedMode, MAX_OFFSPRING};
pub use recruit::run_rds;
pub use referrals::{estimate_x_from_referrals, infected_alters};
pub use sample::{RdsRecord, RdsSample};
pub use seeds::select_seeds;
