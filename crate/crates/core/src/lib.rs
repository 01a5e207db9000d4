//! Repeat-until-success (RUS) rotation arithmetic.
//!
//! This crate implements the circuit primitives and synthesis algorithms for
//! performing arithmetic directly on rotation angles: gearbox and PAR
//! circuits that map input rotations `e^{-i phi X}` to non-linear functions
//! of their angles, a small dense statevector simulator with mid-circuit
//! measurement for validating them, Taylor-series and square-wave function
//! synthesis built on top of the primitives, and analytic T-count /
//! qubit-count models for comparing against reversible-arithmetic baselines.
//!
//! The crate is `no_std` + `alloc` compatible; the `std` feature (default)
//! only toggles dependency features.
//!
//! # Example
//!
//! ```
//! use rus_core::primitives::{gb_angle, gb_success_prob};
//!
//! // A gearbox circuit on one input squares small angles: GB(x) ~ x^2.
//! let angle = gb_angle(&[0.1]);
//! assert!((angle - 0.1f64.tan().powi(2).atan()).abs() < 1e-15);
//! assert!(gb_success_prob(&[0.1]) > 0.98);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod costs;
pub mod error;
pub mod linalg;
pub mod primitives;
pub mod rng;
pub mod series;
pub mod sim;
pub mod synth;

pub use error::Error;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
