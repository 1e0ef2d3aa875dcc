//! Age-structured passenger-car fleet model with a logit sales split, Bass
//! adoption dynamics and a backcasting optimal control layer that finds the
//! cheapest yearly EV purchase-incentive trajectory meeting a terminal CO2
//! target.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, bundled data and the
//! command-line front end live in the `backcast` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod calibration;
pub mod choice;
mod error;
pub mod fleet;
pub mod linalg;
pub mod ocp;
pub mod scenarios;
mod series;
pub mod units;

pub use error::{Error, Result};
pub use series::YearSeries;
