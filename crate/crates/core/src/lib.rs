//! Euler–Phillips dynamics of the New Keynesian (NK) and wealth-in-utility
//! New Keynesian (WUNK) models.
//!
//! The crate computes steady states and local classifications, solves
//! zero-lower-bound episodes as terminal-condition problems, measures
//! forward-guidance and government-spending effects, and checks the WUNK
//! calibration condition against estimable statistics.
//!
//! ```
//! use wunklab_core::model::ModelParams;
//! use wunklab_core::analysis::{classify, steady_state, Kind};
//! use wunklab_core::dynamics::{jacobian, Regime};
//!
//! let p = ModelParams::builder(0.108, 6.0, 1.0, 500.0, 1.0, 0.15, 1.5).build()?;
//! let zlb = steady_state(&p, Regime::Zlb, 0.0)?;
//! let class = classify(&jacobian(&p, Regime::Zlb, zlb, 0.0)?)?;
//! assert_eq!(class.kind, Kind::NodalSource);
//! # Ok::<(), wunklab_core::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;

pub mod analysis;
pub mod discrete;
pub mod dynamics;
pub mod model;
pub mod output;
pub mod scenarios;
pub mod statics;

pub use error::{Error, Result};
pub use model::{ModelParams, ParamId};
