//! Exact and asymptotic statistics of p-watermelons.
//!
//! A p-watermelon of length `2n` is a family of `p` non-intersecting lattice
//! paths with steps `(1, ±1)`, path `i` running from `(0, 2i)` to `(2n, 2i)`.
//! This crate counts them exactly (determinants of binomial coefficients),
//! derives the finite-n laws of *height* and *range*, evaluates the limiting
//! distributions, and builds the Gaussian-exponential expressions that carry
//! the moment asymptotics. An exhaustive enumerator in [`brute`] serves as
//! ground truth for everything exact.

pub mod brute;
mod config;
mod error;
pub mod exact;
pub mod gauss;
pub mod limit;
pub mod special;

pub use config::{MelonConfig, StripBound};
pub use error::{MelonError, Result};
