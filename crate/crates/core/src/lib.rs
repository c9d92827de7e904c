//! Exact and sampled analysis of increasing events on `{1,…,r}^n`.
//!
//! The crate is `no_std` (with `alloc`). It covers:
//!
//! * [`product_space`]: configurations, increasing events and their
//!   enumeration;
//! * [`measure_family`]: parametrized measures `t ↦ μ_t` on `{1,…,r}` with
//!   tails `G_k(t)` and tail derivatives `S_{t,k}`;
//! * [`exact_engine`]: event probability, influences, pivotal probabilities
//!   and the Russo-type derivative by full enumeration;
//! * [`dyadic_lift`]: the binary-digit lift of each coordinate, digit
//!   operators `Δ_{i,j}` and the functionals `M_1`, `M_2`;
//! * [`monte_carlo`]: sampling estimators with Wilson intervals;
//! * [`threshold_analysis`]: sweeps over `t`, the threshold bound and
//!   threshold windows.
//!
//! IO, file formats and the command-line runner live in the `threshold-lab`
//! crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dyadic_lift;
pub mod error;
pub mod exact_engine;
pub mod measure_family;
pub mod monte_carlo;
pub mod product_space;
pub mod stats;
pub mod threshold_analysis;
pub mod verdict;

pub use error::{Error, Result};
pub use exact_engine::{ExactEngine, PointReport};
pub use measure_family::{MeasureFamily, PmfSnapshot};
pub use product_space::{IncreasingEvent, LevelConfig, MonotoneClause};
pub use verdict::{Inequality, Status, Tolerances};

/// Default bound on `r^n` (and on other enumeration sizes).
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;
