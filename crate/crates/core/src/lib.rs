//! Linear Threshold diffusion with user valuations (LT-V).
//!
//! Nodes move `inactive -> influenced -> adopting`; only adopters spread
//! influence, and an influenced node adopts when its private valuation is at
//! least the price it is quoted. The crate provides:
//!
//! * [`graph`]: edge-list loading and WD / TV influence weights,
//! * [`valuation`]: valuation distributions, optimal myopic prices, fitting,
//! * [`diffusion`]: single runs, Monte-Carlo and exact profit evaluation,
//! * [`optimizer`]: U-Greedy with CELF and the All-OMP, FFS and PAGE
//!   pricing strategies.

pub mod diffusion;
pub mod error;
pub mod graph;
pub mod optimizer;
pub mod rng;
pub mod valuation;

pub use error::{Error, Result};
