//! Maximum-throughput multi-hop routing over Poisson-distributed THz and RF relays.
//!
//! The crate covers link physics ([`channel`]), relay fields and hop-distance
//! laws ([`geometry`]), the stepwise throughput optimizer ([`optimizer`]),
//! quadrature evaluation of throughput and coverage ([`analysis`]), a seeded
//! Monte Carlo engine ([`simulate`]) and a ground–UAV–ground extension ([`uav`]).
//!
//! ```
//! use sg_router::channel::BandParams;
//! use sg_router::optimizer::{hop_design, Scenario};
//! use sg_router::simulate::{monte_carlo, StrategyKind};
//!
//! # fn main() -> sg_router::Result<()> {
//! let sc = Scenario::new(BandParams::default_thz(), 100.0, 1.0, 1e-2)?;
//! let design = hop_design(&sc)?;
//! let mc = monte_carlo(StrategyKind::StepwiseOptimal, &sc, 1.0, 200, 7)?;
//! assert!(design.hop_count >= 1 && mc.mean_throughput > 0.0);
//! # Ok(())
//! # }
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod optimizer;
pub mod quad;
pub mod simulate;
pub mod uav;
pub mod units;

pub use error::{Error, Result};
