//! Discrete pricing routes that must agree with the closed form: a
//! recombining Cox-Ross-Rubinstein tree and a seeded Monte Carlo engine.

mod monte_carlo;
mod tree;

pub use monte_carlo::{mc_forward_check, mc_price, ForwardCheck, McConfig};
pub use tree::{crr_tree_price, CrrParameters, TreeConfig, LOG_SPACE_THRESHOLD};
