//! Network representation and the statistics computed on it.

mod classes;
pub mod io;
mod network;
mod stats;

pub use classes::{ClassKey, ClassTable, TableScale};
pub(crate) use network::edge_key;
pub use network::Network;
pub use stats::{
    class_table, cross_group_ties, edgewise_shared_partners, gwesp, mixing_and_ratios,
    node_cross_alters, NetStats,
};
