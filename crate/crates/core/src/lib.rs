//! Core of the rational-program toolkit.
//!
//! Everything here is pure computation over `alloc`: exact rationals and the
//! rational-program IR, multivariate rational least-squares fitting, the
//! occupancy and MWP-CWP models, sample design and synthesis, and the
//! fit/generate/search pipeline. File formats and the command line live in
//! the `ratprog` crate.

#![no_std]

extern crate alloc;

pub mod datakit;
pub mod perfmodel;
pub mod pipeline;
pub mod polyfit;
pub mod ratir;
pub mod rational;

pub use rational::Rational;
