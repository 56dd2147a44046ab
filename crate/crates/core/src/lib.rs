//! Quantum noise limits on interferometric length measurements: the
//! standard limit, the vacuum radiation-pressure limit and the
//! gravitational (Planck length) limit, with the curvature computation
//! behind the last one, time-domain commutators and noise simulation.
//!
//! Modules roughly follow the pipeline: [`units`] → [`kernels`] →
//! [`timedomain`] / [`curvature`] → [`limits`] → [`simulate`], with
//! [`cli`] and [`plot`] on top.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod curvature;
pub mod error;
pub mod kernels;
pub mod limits;
pub mod plot;
pub mod quadrature;
pub mod simulate;
pub mod timedomain;
pub mod units;

pub use error::{Error, Result};
